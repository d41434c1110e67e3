// Viewer view: script loading, advance/reverse/reset playback, animated
// agent markers fed by frame polling, and the live metrics chart.

import { SessionStore } from "./state.js";
import { renderChart, renderMap, type Ctx } from "./render.js";
import type { ViewState } from "./state.js";

export const FRAME_POLL_MS = 33; // ~30 Hz

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

export class ViewerView {
  scriptInput: HTMLTextAreaElement;
  loadButton: HTMLButtonElement;
  advanceButton: HTMLButtonElement;
  reverseButton: HTMLButtonElement;
  resetButton: HTMLButtonElement;
  statusLine: HTMLDivElement;
  banner: HTMLDivElement;
  mapCanvas: HTMLCanvasElement;
  chartCanvas: HTMLCanvasElement;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(private root: HTMLElement, private store: SessionStore) {
    this.banner = el("div", "banner hidden");
    this.banner.id = "viewer-banner";
    this.scriptInput = el("textarea");
    this.scriptInput.id = "script-input";
    this.scriptInput.placeholder = '{"steps": [...]}';
    this.loadButton = el("button", "", "Load script");
    this.loadButton.id = "load-script";
    this.advanceButton = el("button", "", "Advance");
    this.advanceButton.id = "advance";
    this.reverseButton = el("button", "", "Reverse");
    this.reverseButton.id = "reverse";
    this.resetButton = el("button", "", "Reset");
    this.resetButton.id = "reset";
    this.statusLine = el("div", "status");
    this.statusLine.id = "script-status";
    this.mapCanvas = el("canvas");
    this.mapCanvas.id = "viewer-canvas";
    this.mapCanvas.width = 640;
    this.mapCanvas.height = 480;
    this.chartCanvas = el("canvas");
    this.chartCanvas.id = "chart-canvas";
    this.chartCanvas.width = 640;
    this.chartCanvas.height = 200;

    const controls = el("div", "controls");
    controls.append(this.loadButton, this.advanceButton, this.reverseButton,
                    this.resetButton, this.statusLine);
    this.root.append(this.banner, this.scriptInput, controls,
                     this.mapCanvas, this.chartCanvas);

    this.loadButton.addEventListener("click", () => {
      let script;
      try {
        script = JSON.parse(this.scriptInput.value);
      } catch (err) {
        this.banner.textContent = `script is not valid JSON: ${err}`;
        this.banner.classList.remove("hidden");
        return;
      }
      void this.store.loadScript(script).catch(() => undefined);
    });
    this.advanceButton.addEventListener("click", () => {
      void this.store.step("advance").catch(() => undefined);
    });
    this.reverseButton.addEventListener("click", () => {
      void this.store.step("reverse").catch(() => undefined);
    });
    this.resetButton.addEventListener("click", () => {
      void this.store.step("reset").catch(() => undefined);
    });
    this.banner.addEventListener("click", () => this.store.dismissBanner());

    this.store.subscribe((state) => this.render(state));
  }

  startPolling(intervalMs: number = FRAME_POLL_MS): void {
    this.stopPolling();
    this.timer = setInterval(() => {
      void this.store.pollFrame().catch(() => undefined);
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  render(state: ViewState): void {
    if (state.banner) {
      this.banner.textContent = `${state.banner} (click to dismiss)`;
      this.banner.classList.remove("hidden");
    } else {
      this.banner.classList.add("hidden");
    }

    const total = this.store.scriptLength();
    this.statusLine.textContent = total
      ? `step ${state.cursor} / ${total}`
      : "no script loaded";
    // stepping past either end is disabled rather than erroring
    this.advanceButton.disabled = total === 0 || state.cursor >= total;
    this.reverseButton.disabled = total === 0 || state.cursor === 0;
    this.resetButton.disabled = total === 0;

    const doc = state.doc;
    if (!doc) return;
    const mapCtx = this.mapCanvas.getContext?.("2d");
    if (mapCtx) {
      renderMap(mapCtx as unknown as Ctx, doc.graph, state.agents, {
        width: this.mapCanvas.width,
        height: this.mapCanvas.height,
      });
    }
    const chartCtx = this.chartCanvas.getContext?.("2d");
    if (chartCtx) {
      renderChart(chartCtx as unknown as Ctx, state.records, {
        width: this.chartCanvas.width,
        height: this.chartCanvas.height,
      });
    }
  }
}
