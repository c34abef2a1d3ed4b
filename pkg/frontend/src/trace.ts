/** Bounded history of (preference, losses) pairs for the trace overlay. */

import { TRACE_LIMIT, type TraceEntry } from "./types.js";

/** Append in place, evicting the oldest entries beyond the bound. */
export function pushTrace(
  trace: TraceEntry[],
  entry: TraceEntry,
  limit: number = TRACE_LIMIT
): void {
  trace.push(entry);
  while (trace.length > limit) trace.shift();
}
