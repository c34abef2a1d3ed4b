import { describe, expect, it } from "vitest";
import { pushTrace } from "../src/trace.js";
import type { TraceEntry } from "../src/types.js";

function entry(i: number): TraceEntry {
  return { preference: [i, 0], losses: [i, i] };
}

describe("pushTrace", () => {
  it("keeps insertion order below the bound", () => {
    const trace: TraceEntry[] = [];
    for (let i = 0; i < 5; i++) pushTrace(trace, entry(i));
    expect(trace.map((t) => t.losses[0])).toEqual([0, 1, 2, 3, 4]);
  });

  it("evicts oldest entries beyond the bound: 250 pushes keep the last 200", () => {
    const trace: TraceEntry[] = [];
    for (let i = 0; i < 250; i++) pushTrace(trace, entry(i));
    expect(trace.length).toBe(200);
    expect(trace[0].losses[0]).toBe(50);
    expect(trace[199].losses[0]).toBe(249);
  });

  it("honors a custom bound", () => {
    const trace: TraceEntry[] = [];
    for (let i = 0; i < 10; i++) pushTrace(trace, entry(i), 3);
    expect(trace.map((t) => t.losses[0])).toEqual([7, 8, 9]);
  });
});
