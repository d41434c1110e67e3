// Builder view: prompt submission, fragment selection, topic-group
// assignment, seed groups, and the find-closest popup.

import { SessionStore } from "./state.js";
import { renderMap, type Ctx } from "./render.js";
import type { ViewState } from "./state.js";

const DEFAULT_TEMPLATE =
  "Here's a short list of military rules of engagement like '{}':";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class BuilderView {
  templateInput: HTMLInputElement;
  seedInput: HTMLInputElement;
  seedGroupInput: HTMLInputElement;
  submitButton: HTMLButtonElement;
  layoutButton: HTMLButtonElement;
  pendingList: HTMLUListElement;
  topicInput: HTMLInputElement;
  assignButton: HTMLButtonElement;
  findClosestButton: HTMLButtonElement;
  popup: HTMLDivElement;
  banner: HTMLDivElement;
  canvas: HTMLCanvasElement;

  constructor(private root: HTMLElement, private store: SessionStore) {
    const controls = el("div", "controls");

    this.templateInput = el("input");
    this.templateInput.value = DEFAULT_TEMPLATE;
    this.templateInput.id = "template-input";
    this.seedInput = el("input");
    this.seedInput.placeholder = "seed text for {}";
    this.seedInput.id = "seed-input";
    this.seedGroupInput = el("input");
    this.seedGroupInput.placeholder = "seed group (node)";
    this.seedGroupInput.id = "seed-group-input";
    this.submitButton = el("button", "", "Submit prompt");
    this.submitButton.id = "submit-prompt";
    this.layoutButton = el("button", "", "Run layout");
    this.layoutButton.id = "run-layout";

    controls.append(
      labelled("Prompt template", this.templateInput),
      labelled("Seed", this.seedInput),
      labelled("Set Seed Group", this.seedGroupInput),
      this.submitButton,
      this.layoutButton,
    );

    this.pendingList = el("ul", "pending");
    this.pendingList.id = "pending-list";
    this.topicInput = el("input");
    this.topicInput.placeholder = "topic group name";
    this.topicInput.id = "topic-input";
    this.assignButton = el("button", "", "Assign to topic");
    this.assignButton.id = "assign-fragment";
    this.findClosestButton = el("button", "", "Find Closest");
    this.findClosestButton.id = "find-closest";
    this.popup = el("div", "popup hidden");
    this.popup.id = "closest-popup";
    this.banner = el("div", "banner hidden");
    this.banner.id = "builder-banner";
    this.canvas = el("canvas");
    this.canvas.id = "builder-canvas";
    this.canvas.width = 640;
    this.canvas.height = 480;

    const assignRow = el("div", "controls");
    assignRow.append(labelled("Topic group", this.topicInput), this.assignButton,
                     this.findClosestButton);

    this.root.append(this.banner, controls, this.pendingList, assignRow,
                     this.popup, this.canvas);

    this.submitButton.addEventListener("click", () => {
      void this.store
        .submitPrompt(
          this.templateInput.value,
          this.seedInput.value,
          this.seedGroupInput.value || undefined,
        )
        .catch(() => undefined); // surfaced via the banner
    });
    this.layoutButton.addEventListener("click", () => {
      void this.store.runLayout({ iterations: 300 }).catch(() => undefined);
    });
    this.assignButton.addEventListener("click", () => {
      const selected = this.store.state.selectedFragment;
      if (selected === null || !this.topicInput.value) return;
      void this.store.assignFragment(selected, this.topicInput.value).catch(() => undefined);
    });
    this.findClosestButton.addEventListener("click", () => {
      void this.showClosest();
    });
    this.banner.addEventListener("click", () => this.store.dismissBanner());

    this.store.subscribe((state) => this.render(state));
  }

  private async showClosest(): Promise<void> {
    const selected = this.store.state.selectedFragment;
    const doc = this.store.state.doc;
    if (selected === null || !doc) return;
    const fragment = doc.pending.find((f) => f.id === selected);
    if (!fragment) return;
    let results;
    try {
      results = await this.store.findClosest(fragment.text, 8);
    } catch {
      return; // surfaced via the banner
    }
    this.popup.textContent = "";
    this.popup.classList.remove("hidden");
    const title = el("div", "popup-title", "Topics by similarity");
    this.popup.append(title);
    const list = el("ol");
    for (const result of results) {
      const item = el(
        "li",
        "",
        `${result.score.toFixed(4)}  ${result.node}: ${result.text}`,
      );
      item.addEventListener("click", () => {
        this.topicInput.value = result.node;
        this.popup.classList.add("hidden");
      });
      list.append(item);
    }
    this.popup.append(list);
    const close = el("button", "", "Close");
    close.addEventListener("click", () => this.popup.classList.add("hidden"));
    this.popup.append(close);
  }

  render(state: ViewState): void {
    if (state.banner) {
      this.banner.textContent = `${state.banner} (click to dismiss)`;
      this.banner.classList.remove("hidden");
    } else {
      this.banner.classList.add("hidden");
    }

    this.pendingList.textContent = "";
    const doc = state.doc;
    if (!doc) return;
    for (const fragment of doc.pending) {
      const item = el("li", "", fragment.text);
      item.dataset.fragmentId = String(fragment.id);
      if (fragment.id === state.selectedFragment) item.classList.add("selected");
      item.addEventListener("click", () => this.store.selectFragment(fragment.id));
      this.pendingList.append(item);
    }

    const ctx = this.canvas.getContext?.("2d");
    if (ctx) {
      renderMap(ctx as unknown as Ctx, doc.graph, state.agents, {
        width: this.canvas.width,
        height: this.canvas.height,
      });
    }
  }
}

function labelled(text: string, input: HTMLElement): HTMLLabelElement {
  const label = document.createElement("label");
  label.append(text, input);
  return label;
}
