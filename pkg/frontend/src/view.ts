/** DOM rendering: an SVG loss-space chart with fixed [0, 1.05] axes, the
 * preference control (slider for m=2, barycentric triangle for m=3, numeric
 * fields beyond), an error banner with retry, and a failure toast. */

import {
  preferenceToSlider,
  sliderToPreference,
  triangleToPreference,
  xyToBarycentric,
} from "./normalize.js";
import type { ExplorerStore, StoreEvent } from "./store.js";
import { AXIS_MAX, type UiState } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CHART_SIZE = 440;
const MARGIN = 40;

function toPixel(v: number): number {
  return MARGIN + (v / AXIS_MAX) * (CHART_SIZE - 2 * MARGIN);
}

function toPixelY(v: number): number {
  return CHART_SIZE - toPixel(v);
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

export class ExplorerView {
  private chart!: SVGSVGElement;
  private controlHost!: HTMLElement;
  private lossReadout!: HTMLElement;
  private banner!: HTMLElement;
  private toast!: HTMLElement;
  private toastTimer: ReturnType<typeof setTimeout> | undefined;

  constructor(
    private readonly root: HTMLElement,
    private readonly store: ExplorerStore
  ) {}

  mount(): void {
    this.root.innerHTML = "";
    this.banner = el("div", "error-banner");
    this.banner.hidden = true;
    this.chart = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.chart.setAttribute("viewBox", `0 0 ${CHART_SIZE} ${CHART_SIZE}`);
    this.chart.setAttribute("class", "loss-chart");
    this.controlHost = el("div", "preference-control");
    this.lossReadout = el("div", "loss-readout");
    this.toast = el("div", "toast");
    this.toast.hidden = true;

    const diagToggle = el("button", "diagnostics-toggle");
    diagToggle.textContent = "toggle diagnostics";
    diagToggle.addEventListener("click", () => this.store.toggleDiagnostics());

    this.root.append(
      this.banner,
      this.chart,
      this.controlHost,
      this.lossReadout,
      diagToggle,
      this.toast
    );
    this.store.subscribe((event) => this.onEvent(event));
  }

  showLoadError(message: string, retry: () => void): void {
    this.banner.hidden = false;
    this.banner.innerHTML = "";
    const text = el("span");
    text.textContent = `server unreachable: ${message}`;
    const button = el("button", "retry");
    button.textContent = "retry";
    button.addEventListener("click", retry);
    this.banner.append(text, button);
  }

  private onEvent(event: StoreEvent): void {
    if (event.kind === "error") {
      this.showToast(event.message);
      return;
    }
    this.banner.hidden = true;
    this.renderChart(event.state);
    this.renderControl(event.state);
    this.renderReadout(event.state);
  }

  private showToast(message: string): void {
    this.toast.textContent = message;
    this.toast.hidden = false;
    if (this.toastTimer) clearTimeout(this.toastTimer);
    this.toastTimer = setTimeout(() => {
      this.toast.hidden = true;
    }, 4000);
  }

  private renderChart(state: UiState): void {
    this.chart.innerHTML = "";
    this.chart.append(
      svgEl("line", {
        x1: String(MARGIN), y1: String(CHART_SIZE - MARGIN),
        x2: String(CHART_SIZE - MARGIN), y2: String(CHART_SIZE - MARGIN),
        class: "axis",
      }),
      svgEl("line", {
        x1: String(MARGIN), y1: String(MARGIN),
        x2: String(MARGIN), y2: String(CHART_SIZE - MARGIN),
        class: "axis",
      })
    );

    if (state.showDiagnostics && state.meta.oracle_front) {
      const points = state.meta.oracle_front
        .map(([f1, f2]) => `${toPixel(f1)},${toPixelY(f2)}`)
        .join(" ");
      this.chart.append(
        svgEl("polyline", { points, class: "oracle-front", fill: "none" })
      );
    }

    for (const sample of state.frontOverlay.samples) {
      this.chart.append(
        svgEl("circle", {
          cx: String(toPixel(sample.losses[0])),
          cy: String(toPixelY(sample.losses[1])),
          r: "2.5",
          class: "front-mark",
        })
      );
    }

    if (state.showDiagnostics && state.trace.length > 1) {
      const points = state.trace
        .map((t) => `${toPixel(t.losses[0])},${toPixelY(t.losses[1])}`)
        .join(" ");
      this.chart.append(
        svgEl("polyline", { points, class: "trace-path", fill: "none" })
      );
    }

    if (state.currentLosses) {
      this.chart.append(
        svgEl("circle", {
          cx: String(toPixel(state.currentLosses[0])),
          cy: String(toPixelY(state.currentLosses[1])),
          r: "6",
          class:
            state.stale || state.pending ? "current-mark dimmed" : "current-mark",
        })
      );
    }
  }

  private renderControl(state: UiState): void {
    const m = state.meta.m;
    if (m === 2) this.renderSlider(state);
    else if (m === 3) this.renderTriangle(state);
    else this.renderNumericFields(state);
  }

  private renderSlider(state: UiState): void {
    let slider = this.controlHost.querySelector<HTMLInputElement>("input.trade-off-slider");
    if (!slider) {
      this.controlHost.innerHTML = "";
      const left = el("span", "slider-label");
      left.textContent = "task 1";
      const right = el("span", "slider-label");
      right.textContent = "task 2";
      slider = el("input", "trade-off-slider");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1000";
      slider.addEventListener("input", () => {
        const t = Number(slider!.value) / 1000;
        this.store.setPreference(sliderToPreference(t, state.meta.preference_mode));
      });
      this.controlHost.append(left, slider, right);
    }
    slider.value = String(
      Math.round(preferenceToSlider(state.currentPreference, state.meta.preference_mode) * 1000)
    );
  }

  private renderTriangle(state: UiState): void {
    let picker = this.controlHost.querySelector<SVGSVGElement>("svg.triangle-picker");
    if (!picker) {
      this.controlHost.innerHTML = "";
      picker = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
      picker.setAttribute("class", "triangle-picker");
      picker.setAttribute("viewBox", "0 0 1 0.87");
      picker.append(
        svgEl("polygon", {
          points: "0,0.866 1,0.866 0.5,0",
          class: "triangle-face",
        })
      );
      picker.addEventListener("pointerdown", (ev) => {
        const rect = picker!.getBoundingClientRect();
        const x = (ev.clientX - rect.left) / rect.width;
        const y = 0.866 - ((ev.clientY - rect.top) / rect.height) * 0.866;
        const bary = xyToBarycentric(x, y);
        this.store.setPreference(
          triangleToPreference(bary, state.meta.preference_mode)
        );
      });
      this.controlHost.append(picker);
    }
  }

  private renderNumericFields(state: UiState): void {
    if (!this.controlHost.querySelector("input.preference-field")) {
      this.controlHost.innerHTML = "";
      for (let i = 0; i < state.meta.m; i++) {
        const field = el("input", "preference-field");
        field.type = "number";
        field.min = "0";
        field.step = "0.01";
        // normalize-on-blur: raw entries become a preference when focus leaves
        field.addEventListener("blur", () => {
          const fields = this.controlHost.querySelectorAll<HTMLInputElement>(
            "input.preference-field"
          );
          const raw = Array.from(fields, (f) => Number(f.value) || 0);
          if (raw.some((v) => v > 0)) this.store.setPreference(raw);
        });
        this.controlHost.append(field);
      }
    }
    const fields = this.controlHost.querySelectorAll<HTMLInputElement>(
      "input.preference-field"
    );
    fields.forEach((f, i) => {
      if (document.activeElement !== f) {
        f.value = state.currentPreference[i].toFixed(4);
      }
    });
  }

  private renderReadout(state: UiState): void {
    if (!state.currentLosses) {
      this.lossReadout.textContent = "losses: pending";
      return;
    }
    this.lossReadout.textContent =
      "losses: " + state.currentLosses.map((v) => v.toFixed(4)).join(", ");
  }
}
