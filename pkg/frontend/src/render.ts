/** Top-down fog-of-war canvas renderer. */

import { cellAt, type PlayState } from "./state.js";
import type { Facing } from "./types.js";

export const TILE = 28;

const COLORS: Record<string, string> = {
  ".": "#d8d3c5",
  "#": "#4a4a52",
};
const FOG = "#15151a";
const CUE_PALETTE = [
  "#c0392b",
  "#2980b9",
  "#27ae60",
  "#8e44ad",
  "#d35400",
  "#16a085",
];

function cueColor(c: string): string {
  const idx = c.charCodeAt(0) - "a".charCodeAt(0);
  return CUE_PALETTE[idx % CUE_PALETTE.length];
}

const HEADING: Record<Facing, number> = {
  N: -Math.PI / 2,
  E: 0,
  S: Math.PI / 2,
  W: Math.PI,
};

export function sizeCanvas(canvas: HTMLCanvasElement, state: PlayState): void {
  canvas.width = state.width * TILE;
  canvas.height = state.height * TILE;
}

export function draw(ctx: CanvasRenderingContext2D, state: PlayState): void {
  for (let y = 0; y < state.height; y++) {
    for (let x = 0; x < state.width; x++) {
      const c = cellAt(state, x, y);
      if (c === undefined) {
        ctx.fillStyle = FOG;
      } else if (c === "D") {
        ctx.fillStyle = COLORS["."];
      } else {
        ctx.fillStyle = COLORS[c] ?? cueColor(c);
      }
      ctx.fillRect(x * TILE, y * TILE, TILE, TILE);
      ctx.strokeStyle = "#00000022";
      ctx.strokeRect(x * TILE + 0.5, y * TILE + 0.5, TILE - 1, TILE - 1);
      if (c === "D") {
        drawDiamond(ctx, x, y);
      }
    }
  }
  drawAgent(ctx, state);
}

function drawDiamond(ctx: CanvasRenderingContext2D, x: number, y: number): void {
  const cx = x * TILE + TILE / 2;
  const cy = y * TILE + TILE / 2;
  const r = TILE * 0.3;
  ctx.fillStyle = "#2ec4e6";
  ctx.beginPath();
  ctx.moveTo(cx, cy - r);
  ctx.lineTo(cx + r, cy);
  ctx.lineTo(cx, cy + r);
  ctx.lineTo(cx - r, cy);
  ctx.closePath();
  ctx.fill();
  ctx.strokeStyle = "#0d6e86";
  ctx.stroke();
}

function drawAgent(ctx: CanvasRenderingContext2D, state: PlayState): void {
  const { x, y, facing } = state.pose;
  const cx = x * TILE + TILE / 2;
  const cy = y * TILE + TILE / 2;
  const r = TILE * 0.36;
  const a = HEADING[facing];
  ctx.fillStyle = "#e8b93c";
  ctx.beginPath();
  ctx.moveTo(cx + r * Math.cos(a), cy + r * Math.sin(a));
  ctx.lineTo(cx + r * Math.cos(a + 2.5), cy + r * Math.sin(a + 2.5));
  ctx.lineTo(cx + r * Math.cos(a - 2.5), cy + r * Math.sin(a - 2.5));
  ctx.closePath();
  ctx.fill();
  ctx.strokeStyle = "#7a5c0e";
  ctx.stroke();
}
