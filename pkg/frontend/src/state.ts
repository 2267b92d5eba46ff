/** Client-side session state.  The server is authoritative: every field here
 * is copied from a server response, and fogged cells simply have no entry in
 * `known` until the server reveals them. */

import type { ActionResult, CellTriple, Pose, SessionStart } from "./types.js";

export interface PlayState {
  sessionId: string;
  mapId: string;
  width: number;
  height: number;
  pose: Pose;
  /** index (y * width + x) -> cell char; absent = fogged */
  known: Map<number, string>;
  diamondsTotal: number;
  diamondsCollected: number;
  stepsLeft: number;
  done: boolean;
  /** poses visited, in order (for the optional trail overlay) */
  trail: Pose[];
}

function addCells(state: PlayState, cells: CellTriple[]): void {
  for (const [x, y, c] of cells) {
    state.known.set(y * state.width + x, c);
  }
}

export function initState(start: SessionStart): PlayState {
  const state: PlayState = {
    sessionId: start.session_id,
    mapId: start.map_id,
    width: start.dims.width,
    height: start.dims.height,
    pose: start.pose,
    known: new Map(),
    diamondsTotal: start.diamonds_total,
    diamondsCollected: start.diamonds_collected,
    stepsLeft: start.steps_left,
    done: start.done,
    trail: [start.pose],
  };
  addCells(state, start.observed);
  return state;
}

/** Fold one action response into the state (mutates and returns it). */
export function applyResult(state: PlayState, res: ActionResult): PlayState {
  state.pose = res.pose;
  addCells(state, res.observed_new);
  // the diamond under the new pose is consumed the moment it is stepped on
  if (res.reward > 0) {
    state.known.set(res.pose.y * state.width + res.pose.x, ".");
  }
  state.diamondsCollected = res.diamonds_collected;
  state.diamondsTotal = res.diamonds_total;
  state.stepsLeft = res.steps_left;
  state.done = res.done;
  state.trail.push(res.pose);
  return state;
}

export function cellAt(state: PlayState, x: number, y: number): string | undefined {
  return state.known.get(y * state.width + x);
}

export function knownCount(state: PlayState): number {
  return state.known.size;
}

/** Keyboard mapping: left/right arrows turn, up arrow steps forward. */
export function actionForKey(key: string): "TurnLeft" | "TurnRight" | "Forward" | null {
  switch (key) {
    case "ArrowLeft":
      return "TurnLeft";
    case "ArrowRight":
      return "TurnRight";
    case "ArrowUp":
      return "Forward";
    default:
      return null;
  }
}
