import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { ExplorerStore } from "../src/store.js";
import { ExplorerView } from "../src/view.js";
import type { FrontSamplePayload } from "../src/types.js";

function fetchFor(m: number, opts: { failInfers?: boolean } = {}) {
  const json = (obj: unknown) => new Response(JSON.stringify(obj), { status: 200 });
  return async (url: string, init?: RequestInit): Promise<Response> => {
    if (url.endsWith("/meta")) {
      return json({
        problem: "synthetic",
        m,
        preference_mode: "sphere",
        checkpoint_digest: "d",
        has_oracle: false,
        oracle_front: null,
      });
    }
    if (url.includes("/front")) {
      const n = Number(new URL(url, "http://x").searchParams.get("samples"));
      const samples: FrontSamplePayload[] = [];
      for (let i = 0; i < n; i++) {
        const p = Array.from({ length: m }, (_, j) => (j === 0 ? 1 : 0.5));
        samples.push({ preference: p, losses: [i / n, 1 - i / n] });
      }
      return json({ samples, checkpoint_digest: "d" });
    }
    if (url.endsWith("/infer")) {
      if (opts.failInfers) throw new TypeError("down");
      const body = JSON.parse(String(init?.body)) as { preference: number[] };
      const norm = Math.hypot(...body.preference);
      return json({
        preference_normalized: body.preference.map((v) => v / norm),
        losses: [0.3, 0.4],
        mode: "sphere",
        checkpoint_digest: "d",
      });
    }
    throw new Error(`unexpected ${url}`);
  };
}

async function mountFor(m: number, opts: { failInfers?: boolean } = {}) {
  const root = document.createElement("div");
  document.body.append(root);
  const store = new ExplorerStore(new ApiClient("http://t", fetchFor(m, opts)), {
    debounceMs: 1,
    frontSamples: 16,
  });
  const view = new ExplorerView(root, store);
  view.mount();
  await store.load().catch(() => undefined);
  return { root, store, view };
}

describe("ExplorerView", () => {
  it("renders the chart with overlay marks and the current marker", async () => {
    const { root } = await mountFor(2);
    expect(root.querySelector("svg.loss-chart")).toBeTruthy();
    expect(root.querySelectorAll("circle.front-mark").length).toBe(16);
    const marker = root.querySelector("circle.current-mark");
    expect(marker).toBeTruthy();
    expect(marker!.classList.contains("dimmed")).toBe(false);
    expect(root.querySelector(".loss-readout")!.textContent).toContain("0.3");
  });

  it("uses a slider control for two tasks", async () => {
    const { root } = await mountFor(2);
    expect(root.querySelector("input.trade-off-slider")).toBeTruthy();
    expect(root.querySelector("svg.triangle-picker")).toBeNull();
    const labels = Array.from(root.querySelectorAll(".slider-label"), (n) => n.textContent);
    expect(labels).toEqual(["task 1", "task 2"]);
  });

  it("uses a barycentric triangle for three tasks", async () => {
    const { root } = await mountFor(3);
    expect(root.querySelector("svg.triangle-picker")).toBeTruthy();
    expect(root.querySelector("input.trade-off-slider")).toBeNull();
  });

  it("falls back to numeric fields above three tasks", async () => {
    const { root } = await mountFor(5);
    expect(root.querySelectorAll("input.preference-field").length).toBe(5);
  });

  it("moving the slider triggers a new inference through the store", async () => {
    const { root, store } = await mountFor(2);
    const slider = root.querySelector<HTMLInputElement>("input.trade-off-slider")!;
    slider.value = "500";
    slider.dispatchEvent(new Event("input"));
    await store.settle();
    const p = store.getState().currentPreference;
    expect(p[0]).toBeCloseTo(p[1], 6); // mid-slider = balanced preference
  });

  it("dims the current marker when the latest inference failed", async () => {
    // a mount whose inference starts failing after a good initial load
    const root2 = document.createElement("div");
    document.body.append(root2);
    let fail = false;
    const base = fetchFor(2);
    const flaky = async (url: string, init?: RequestInit) => {
      if (url.endsWith("/infer") && fail) throw new TypeError("down");
      return base(url, init);
    };
    const store2 = new ExplorerStore(new ApiClient("http://t", flaky), {
      debounceMs: 1,
      frontSamples: 4,
    });
    new ExplorerView(root2, store2).mount();
    await store2.load();
    expect(root2.querySelector("circle.current-mark.dimmed")).toBeNull();
    fail = true;
    store2.setPreference([0.5, 0.5]);
    await store2.settle();
    expect(root2.querySelector("circle.current-mark.dimmed")).toBeTruthy();
    expect(root2.querySelector(".toast")!.textContent).toContain("unreachable");
  });

  it("diagnostics toggle adds and removes the trace path", async () => {
    const { root, store } = await mountFor(2);
    store.setPreference([0.5, 0.5]);
    await store.settle();
    store.setPreference([0.2, 0.8]);
    await store.settle();
    expect(root.querySelector("polyline.trace-path")).toBeTruthy();
    root.querySelector<HTMLButtonElement>("button.diagnostics-toggle")!.click();
    expect(root.querySelector("polyline.trace-path")).toBeNull();
  });

  it("shows an error banner with retry when the server is unreachable at load", async () => {
    const root = document.createElement("div");
    document.body.append(root);
    let up = false;
    const base = fetchFor(2);
    const flaky = async (url: string, init?: RequestInit) => {
      if (!up) throw new TypeError("refused");
      return base(url, init);
    };
    const store = new ExplorerStore(new ApiClient("http://t", flaky), {
      debounceMs: 1,
      frontSamples: 4,
    });
    const view = new ExplorerView(root, store);
    view.mount();
    try {
      await store.load();
    } catch (err) {
      view.showLoadError(String(err), () => void store.load());
    }
    const banner = root.querySelector<HTMLElement>(".error-banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("unreachable");
    up = true;
    banner.querySelector("button.retry")!.dispatchEvent(new Event("click"));
    for (let i = 0; i < 100 && !root.querySelector("circle.current-mark"); i++) {
      await new Promise((r) => setTimeout(r, 5));
    }
    expect(root.querySelector("circle.current-mark")).toBeTruthy();
  });
});
