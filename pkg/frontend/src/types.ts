/** Shapes of the three server payloads and the view-owned state. */

export type PreferenceMode = "simplex" | "sphere";

export interface Meta {
  problem: string;
  m: number;
  preference_mode: PreferenceMode;
  checkpoint_digest: string;
  has_oracle: boolean;
  oracle_front: number[][] | null;
}

export interface InferResponse {
  preference_normalized: number[];
  losses: number[];
  mode: PreferenceMode;
  checkpoint_digest: string;
}

export interface FrontSamplePayload {
  preference: number[];
  losses: number[];
}

export interface FrontPayload {
  samples: FrontSamplePayload[];
  checkpoint_digest: string;
}

export interface TraceEntry {
  preference: number[];
  losses: number[];
}

/** All mutable view state; owned by a single store, rendered by one view. */
export interface UiState {
  meta: Meta;
  currentPreference: number[];
  /** Last server-reported losses; null only before the first response.
   * Kept (and drawn dimmed) while a newer request is pending or failed. */
  currentLosses: number[] | null;
  frontOverlay: FrontPayload;
  trace: TraceEntry[];
  showDiagnostics: boolean;
  /** true while a newer preference awaits its response (marker dimmed;
   * currentLosses still belong to the previous preference). */
  pending: boolean;
  /** true when the latest inference failed (marker drawn dimmed). */
  stale: boolean;
}

export const TRACE_LIMIT = 200;
export const DEBOUNCE_MS = 50;
export const AXIS_MAX = 1.05;
