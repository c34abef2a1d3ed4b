/** Page entry point: wire the API client, store, and view together.
 * The server base address comes from the `server` page parameter
 * (e.g. ?server=http://127.0.0.1:8080), defaulting to localhost. */

import { ApiClient } from "./api.js";
import { ExplorerStore } from "./store.js";
import { ExplorerView } from "./view.js";

export const DEFAULT_SERVER = "http://127.0.0.1:8080";

export function serverBaseFromSearch(search: string): string {
  const params = new URLSearchParams(search);
  return params.get("server") ?? DEFAULT_SERVER;
}

export async function loadAndRender(
  root: HTMLElement,
  base: string
): Promise<ExplorerStore> {
  const store = new ExplorerStore(new ApiClient(base));
  const view = new ExplorerView(root, store);
  view.mount();
  const attempt = async () => {
    try {
      await store.load();
    } catch (err) {
      view.showLoadError(String(err), () => {
        void attempt();
      });
    }
  };
  await attempt();
  return store;
}

if (typeof document !== "undefined" && document.getElementById("explorer-root")) {
  const root = document.getElementById("explorer-root") as HTMLElement;
  void loadAndRender(root, serverBaseFromSearch(window.location.search));
}
