/** Wire types for the play API.  Cells travel as single characters:
 * '.' empty, '#' wall, 'D' diamond, 'a'..'z' cue colors. */

export type Facing = "N" | "E" | "S" | "W";

export interface Pose {
  x: number;
  y: number;
  facing: Facing;
}

/** [x, y, cellChar] */
export type CellTriple = [number, number, string];

export interface MapEntry {
  id: string;
  title: string;
}

export interface SessionStart {
  session_id: string;
  map_id: string;
  dims: { width: number; height: number };
  pose: Pose;
  observed: CellTriple[];
  diamonds_total: number;
  diamonds_collected: number;
  steps_left: number;
  done: boolean;
}

export interface ActionResult {
  pose: Pose;
  reward: number;
  observed_new: CellTriple[];
  diamonds_collected: number;
  diamonds_total: number;
  steps_left: number;
  done: boolean;
}

export interface FinishResult {
  trajectory_id: string;
  trajectory: unknown;
}

export type Action = "TurnLeft" | "TurnRight" | "Forward";
