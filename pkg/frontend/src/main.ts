/** Wiring: map picker, keyboard input, HUD, trajectory export.
 * Strictly sequential input: at most one action request in flight; keys
 * pressed while waiting are dropped, never queued. */

import { ApiClient } from "./api.js";
import { draw, sizeCanvas } from "./render.js";
import { actionForKey, applyResult, initState, type PlayState } from "./state.js";

const api = new ApiClient();

const canvas = document.getElementById("board") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const mapSelect = document.getElementById("map-select") as HTMLSelectElement;
const startBtn = document.getElementById("start") as HTMLButtonElement;
const exportBtn = document.getElementById("export") as HTMLButtonElement;
const hudDiamonds = document.getElementById("hud-diamonds")!;
const hudSteps = document.getElementById("hud-steps")!;
const hudStatus = document.getElementById("hud-status")!;

let state: PlayState | null = null;
let inFlight = false;

function hud(): void {
  if (!state) return;
  hudDiamonds.textContent = `${state.diamondsCollected} / ${state.diamondsTotal}`;
  hudSteps.textContent = String(state.stepsLeft);
  hudStatus.textContent = state.done
    ? state.diamondsCollected === state.diamondsTotal
      ? "complete!"
      : "out of time"
    : "playing";
  exportBtn.disabled = false;
}

function redraw(): void {
  if (!state) return;
  draw(ctx, state);
  hud();
}

async function startSession(): Promise<void> {
  const mapId = mapSelect.value;
  if (!mapId) return;
  state = initState(await api.startSession(mapId));
  sizeCanvas(canvas, state);
  redraw();
}

async function onKey(ev: KeyboardEvent): Promise<void> {
  if (ev.key === "r") {
    void startSession();
    return;
  }
  const action = actionForKey(ev.key);
  if (!action || !state || state.done || inFlight) return;
  ev.preventDefault();
  inFlight = true;
  try {
    applyResult(state, await api.takeAction(state.sessionId, action));
  } finally {
    inFlight = false;
  }
  redraw();
}

async function exportTrajectory(): Promise<void> {
  if (!state) return;
  const res = await api.finish(state.sessionId);
  const blob = new Blob([JSON.stringify(res.trajectory, null, 2)], {
    type: "application/json",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = `${res.trajectory_id}.json`;
  a.click();
  URL.revokeObjectURL(a.href);
  state = null;
  hudStatus.textContent = "exported — press Start to play again";
  exportBtn.disabled = true;
}

async function init(): Promise<void> {
  const maps = await api.listMaps();
  for (const m of maps) {
    const opt = document.createElement("option");
    opt.value = m.id;
    opt.textContent = m.title;
    mapSelect.appendChild(opt);
  }
  startBtn.addEventListener("click", () => void startSession());
  exportBtn.addEventListener("click", () => void exportTrajectory());
  window.addEventListener("keydown", (ev) => void onKey(ev));
}

void init();
