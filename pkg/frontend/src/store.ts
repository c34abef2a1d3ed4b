/** The view-model: owns UiState, debounces preference changes, issues
 * sequenced inference requests, and notifies the renderer.
 *
 * All displayed loss numbers come from server responses — the store never
 * computes losses itself.
 */

import { ApiClient } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { normalizePreference } from "./normalize.js";
import { RequestSequencer } from "./sequencer.js";
import { pushTrace } from "./trace.js";
import { DEBOUNCE_MS, type Meta, type UiState } from "./types.js";

export type StoreEvent =
  | { kind: "state"; state: UiState }
  | { kind: "error"; message: string };

export type Listener = (event: StoreEvent) => void;

export interface StoreOptions {
  debounceMs?: number;
  frontSamples?: number;
}

export class ExplorerStore {
  private state!: UiState;
  private listeners: Listener[] = [];
  private sequencer = new RequestSequencer();
  private scheduleInfer: Debounced<[number[]]>;
  /** Resolves when all inferences issued so far have settled (test hook). */
  private inflight: Promise<void> = Promise.resolve();
  private readonly frontSamples: number;

  constructor(
    private readonly api: ApiClient,
    options: StoreOptions = {}
  ) {
    this.frontSamples = options.frontSamples ?? 200;
    this.scheduleInfer = debounce(
      (p: number[]) => this.issueInfer(p),
      options.debounceMs ?? DEBOUNCE_MS
    );
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(event: StoreEvent): void {
    for (const listener of this.listeners) listener(event);
  }

  private emitState(): void {
    this.emit({ kind: "state", state: this.state });
  }

  getState(): UiState {
    return this.state;
  }

  /** Fetch /meta and /front, set the initial preference to the first-task
   * extreme, and run one inference for it. */
  async load(): Promise<void> {
    const meta: Meta = await this.api.meta();
    const front = await this.api.front(this.frontSamples);
    const initial = normalizePreference(
      Array.from({ length: meta.m }, (_, i) => (i === 0 ? 1 : 0)),
      meta.preference_mode
    );
    this.state = {
      meta,
      currentPreference: initial,
      currentLosses: null,
      frontOverlay: front,
      trace: [],
      showDiagnostics: true,
      pending: true,
      stale: false,
    };
    this.emitState();
    await this.issueInfer(initial);
  }

  /** Debounced entry point for control movement. Identical positions are
   * dropped before the debounce window, so "no movement" costs nothing. */
  setPreference(raw: number[]): void {
    const p = normalizePreference(raw, this.state.meta.preference_mode);
    const same = p.every(
      (v, i) => Math.abs(v - this.state.currentPreference[i]) < 1e-12
    );
    if (same) return;
    this.state.currentPreference = p;
    this.state.pending = true;
    this.emitState();
    this.scheduleInfer(p);
  }

  toggleDiagnostics(): void {
    this.state.showDiagnostics = !this.state.showDiagnostics;
    this.emitState();
  }

  /** Wait for the debounce window and every issued request (test hook). */
  async settle(): Promise<void> {
    this.scheduleInfer.flush();
    await this.inflight;
  }

  private issueInfer(p: number[]): Promise<void> {
    const seq = this.sequencer.issue();
    const task = (async () => {
      try {
        const resp = await this.api.infer(p);
        if (!this.sequencer.isCurrent(seq)) return; // superseded: discard
        this.state.currentPreference = resp.preference_normalized;
        this.state.currentLosses = resp.losses;
        this.state.pending = false;
        this.state.stale = false;
        pushTrace(this.state.trace, {
          preference: resp.preference_normalized,
          losses: resp.losses,
        });
        this.emitState();
      } catch (err) {
        if (!this.sequencer.isCurrent(seq)) return;
        this.state.pending = false;
        this.state.stale = true; // dim the marker; state otherwise unchanged
        this.emitState();
        this.emit({ kind: "error", message: String(err) });
      }
    })();
    this.inflight = this.inflight.then(() => task);
    return task;
  }
}
