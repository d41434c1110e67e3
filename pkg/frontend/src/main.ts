// Boot: one session, two tabs (builder and viewer), frame polling while
// the viewer tab is active.

import { ApiClient } from "./api.js";
import { SessionStore } from "./state.js";
import { BuilderView } from "./builder.js";
import { ViewerView } from "./viewer.js";

export function boot(root: HTMLElement, baseUrl = ""): {
  store: SessionStore;
  builder: BuilderView;
  viewer: ViewerView;
} {
  const api = new ApiClient(baseUrl);
  const store = new SessionStore(api);

  const tabs = document.createElement("div");
  tabs.className = "tabs";
  const builderTab = document.createElement("button");
  builderTab.textContent = "Map Builder";
  builderTab.id = "tab-builder";
  const viewerTab = document.createElement("button");
  viewerTab.textContent = "Map Viewer";
  viewerTab.id = "tab-viewer";
  tabs.append(builderTab, viewerTab);

  const builderRoot = document.createElement("section");
  builderRoot.id = "builder-view";
  const viewerRoot = document.createElement("section");
  viewerRoot.id = "viewer-view";
  viewerRoot.classList.add("hidden");
  root.append(tabs, builderRoot, viewerRoot);

  const builder = new BuilderView(builderRoot, store);
  const viewer = new ViewerView(viewerRoot, store);

  builderTab.addEventListener("click", () => {
    builderRoot.classList.remove("hidden");
    viewerRoot.classList.add("hidden");
    viewer.stopPolling();
  });
  viewerTab.addEventListener("click", () => {
    viewerRoot.classList.remove("hidden");
    builderRoot.classList.add("hidden");
    viewer.startPolling();
  });

  void store.init();
  return { store, builder, viewer };
}

declare const window: (Window & { __nnm?: unknown }) | undefined;

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root && window) {
    // served under /ui/, the API lives at the server root
    window.__nnm = boot(root, "..");
  }
}
