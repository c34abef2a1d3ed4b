import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { debounce } from "../src/debounce.js";

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("collapses a rapid burst into one trailing call with the last args", () => {
    const calls: number[] = [];
    const d = debounce((v: number) => calls.push(v), 50);
    d(1);
    d(2);
    d(3);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(49);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(1);
    expect(calls).toEqual([3]);
  });

  it("fires again for bursts separated by more than the window", () => {
    const calls: number[] = [];
    const d = debounce((v: number) => calls.push(v), 50);
    d(1);
    vi.advanceTimersByTime(50);
    d(2);
    vi.advanceTimersByTime(50);
    expect(calls).toEqual([1, 2]);
  });

  it("cancel drops the pending call entirely", () => {
    const calls: number[] = [];
    const d = debounce((v: number) => calls.push(v), 50);
    d(1);
    d.cancel();
    vi.advanceTimersByTime(100);
    expect(calls).toEqual([]);
  });

  it("flush runs the pending call immediately, once", () => {
    const calls: number[] = [];
    const d = debounce((v: number) => calls.push(v), 50);
    d(7);
    d.flush();
    expect(calls).toEqual([7]);
    vi.advanceTimersByTime(100);
    expect(calls).toEqual([7]);
  });

  it("flush with nothing pending is a no-op", () => {
    const calls: number[] = [];
    const d = debounce((v: number) => calls.push(v), 50);
    d.flush();
    expect(calls).toEqual([]);
  });
});
