// Canvas rendering for the map view and the metrics chart. The drawing
// context is taken structurally, so tests can pass a recording stub.

import type { AgentDoc, GraphDoc, RecordDoc } from "./types.js";

export type Ctx = Pick<
  CanvasRenderingContext2D,
  | "beginPath"
  | "arc"
  | "moveTo"
  | "lineTo"
  | "stroke"
  | "fill"
  | "fillText"
  | "clearRect"
  | "setLineDash"
> & {
  lineWidth: number;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  font: string;
  textAlign: CanvasTextAlign;
};

export interface Viewport {
  width: number;
  height: number;
}

export const NODE_FILL = "#7fb3d5";
export const EDGE_COLOR = "#000000";
const MARGIN = 40;

export function nodeRadius(queryCount: number): number {
  return 6 * Math.sqrt(queryCount + 1);
}

export type Transform = (xy: [number, number]) => [number, number];

/** Fit the positioned nodes into the viewport with a margin. */
export function mapTransform(graph: GraphDoc, viewport: Viewport): Transform {
  const positioned = graph.nodes.filter((n) => n.position !== null);
  if (positioned.length === 0) {
    return ([x, y]) => [viewport.width / 2 + x, viewport.height / 2 + y];
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const node of positioned) {
    const [x, y] = node.position as [number, number];
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    minY = Math.min(minY, y);
    maxY = Math.max(maxY, y);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min(
    (viewport.width - 2 * MARGIN) / spanX,
    (viewport.height - 2 * MARGIN) / spanY,
  );
  const cx = (minX + maxX) / 2;
  const cy = (minY + maxY) / 2;
  return ([x, y]) => [
    viewport.width / 2 + (x - cx) * scale,
    viewport.height / 2 + (y - cy) * scale,
  ];
}

export function renderMap(
  ctx: Ctx,
  graph: GraphDoc,
  agents: Record<string, AgentDoc>,
  viewport: Viewport,
): void {
  ctx.clearRect(0, 0, viewport.width, viewport.height);
  const transform = mapTransform(graph, viewport);
  const byId = new Map(graph.nodes.map((n) => [n.id, n]));

  // edges first: black connecting lines under the nodes
  ctx.strokeStyle = EDGE_COLOR;
  ctx.lineWidth = 1;
  for (const [a, b] of graph.edges) {
    const na = byId.get(a);
    const nb = byId.get(b);
    if (!na?.position || !nb?.position) continue;
    const [ax, ay] = transform(na.position);
    const [bx, by] = transform(nb.position);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
  }

  ctx.font = "12px sans-serif";
  ctx.textAlign = "left";
  for (const node of graph.nodes) {
    if (!node.position) continue;
    const [x, y] = transform(node.position);
    const radius = nodeRadius(node.query_count);
    ctx.beginPath();
    ctx.arc(x, y, radius, 0, 2 * Math.PI);
    ctx.fillStyle = NODE_FILL;
    ctx.fill();
    ctx.strokeStyle = EDGE_COLOR;
    ctx.stroke();
    ctx.fillStyle = "#222222";
    ctx.fillText(node.name, x + radius + 3, y + 4);
  }

  for (const role of Object.keys(agents).sort()) {
    const agent = agents[role];
    const [x, y] = transform(agent.position);
    ctx.beginPath();
    ctx.arc(x, y, 9, 0, 2 * Math.PI);
    ctx.fillStyle = agent.color;
    ctx.fill();
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 2;
    ctx.stroke();
    ctx.fillStyle = agent.color;
    ctx.fillText(role, x + 12, y - 8);
    ctx.lineWidth = 1;
  }
}

export const DIST_COLOR = "#1f77b4";
export const SIM_COLOR = "#d62728";

/** Two series per record: node distance (blue) and text similarity (red). */
export function renderChart(ctx: Ctx, records: RecordDoc[], viewport: Viewport): void {
  ctx.clearRect(0, 0, viewport.width, viewport.height);
  const left = 34;
  const bottom = viewport.height - 18;
  const top = 10;
  const right = viewport.width - 10;
  ctx.strokeStyle = "#888888";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(left, top);
  ctx.lineTo(left, bottom);
  ctx.lineTo(right, bottom);
  ctx.stroke();
  if (records.length === 0) return;

  const maxDist = Math.max(...records.map((r) => r.node_dist), 1e-9);
  const xAt = (i: number) =>
    records.length === 1
      ? (left + right) / 2
      : left + ((right - left) * i) / (records.length - 1);
  const yDist = (d: number) => bottom - ((bottom - top) * d) / maxDist;
  const ySim = (s: number) => bottom - (bottom - top) * s;

  ctx.strokeStyle = DIST_COLOR;
  ctx.beginPath();
  records.forEach((r, i) => {
    const x = xAt(i);
    const y = yDist(r.node_dist);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
  ctx.fillStyle = DIST_COLOR;
  records.forEach((r, i) => {
    ctx.beginPath();
    ctx.arc(xAt(i), yDist(r.node_dist), 3, 0, 2 * Math.PI);
    ctx.fill();
  });

  ctx.strokeStyle = SIM_COLOR;
  ctx.beginPath();
  let started = false;
  records.forEach((r, i) => {
    if (r.text_similarity === null) return;
    const x = xAt(i);
    const y = ySim(r.text_similarity);
    if (!started) {
      ctx.moveTo(x, y);
      started = true;
    } else {
      ctx.lineTo(x, y);
    }
  });
  if (started) ctx.stroke();
  ctx.fillStyle = SIM_COLOR;
  records.forEach((r, i) => {
    if (r.text_similarity === null) return;
    ctx.beginPath();
    ctx.arc(xAt(i), ySim(r.text_similarity), 3, 0, 2 * Math.PI);
    ctx.fill();
  });

  ctx.font = "10px sans-serif";
  ctx.fillStyle = DIST_COLOR;
  ctx.fillText("node distance", left + 6, top + 10);
  ctx.fillStyle = SIM_COLOR;
  ctx.fillText("text similarity", left + 6, top + 22);
}
