/** Thin typed client for the play API.  One in-flight request at a time is
 * enforced by the caller (main.ts); this module is transport only. */

import type {
  Action,
  ActionResult,
  FinishResult,
  MapEntry,
  SessionStart,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private fetchImpl: FetchLike = (i, n) => fetch(i, n)) {}

  private async request<T>(path: string, body?: unknown): Promise<T> {
    const init: RequestInit =
      body === undefined
        ? { method: "POST" }
        : {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
          };
    const res = await this.fetchImpl(path, init);
    if (!res.ok) {
      throw new ApiError(res.status, await res.text());
    }
    return (await res.json()) as T;
  }

  async listMaps(): Promise<MapEntry[]> {
    const res = await this.fetchImpl("/api/maps");
    if (!res.ok) {
      throw new ApiError(res.status, await res.text());
    }
    const body = (await res.json()) as { maps: MapEntry[] };
    return body.maps;
  }

  startSession(mapId: string): Promise<SessionStart> {
    return this.request<SessionStart>("/api/session", { map_id: mapId });
  }

  takeAction(sessionId: string, action: Action): Promise<ActionResult> {
    return this.request<ActionResult>(`/api/session/${sessionId}/action`, {
      action,
    });
  }

  finish(sessionId: string): Promise<FinishResult> {
    return this.request<FinishResult>(`/api/session/${sessionId}/finish`);
  }
}
