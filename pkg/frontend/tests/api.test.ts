import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function fakeFetch(
  handler: (url: string, init?: RequestInit) => { status: number; body: unknown },
) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    const { status, body } = handler(url, init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { impl, calls };
}

describe("ApiClient", () => {
  it("lists maps", async () => {
    const { impl } = fakeFetch(() => ({
      status: 200,
      body: { maps: [{ id: "exp1_u2", title: "exp1 u2" }] },
    }));
    const maps = await new ApiClient(impl).listMaps();
    expect(maps).toEqual([{ id: "exp1_u2", title: "exp1 u2" }]);
  });

  it("posts the action name the engine expects", async () => {
    const { impl, calls } = fakeFetch(() => ({
      status: 200,
      body: {
        pose: { x: 1, y: 0, facing: "E" },
        reward: 0,
        observed_new: [],
        diamonds_collected: 0,
        diamonds_total: 1,
        steps_left: 9,
        done: false,
      },
    }));
    await new ApiClient(impl).takeAction("s1", "Forward");
    expect(calls[0].url).toBe("/api/session/s1/action");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      action: "Forward",
    });
  });

  it("raises ApiError with the status on failure", async () => {
    const { impl } = fakeFetch(() => ({ status: 409, body: { detail: "done" } }));
    await expect(new ApiClient(impl).takeAction("s1", "Forward")).rejects.toThrow(
      ApiError,
    );
    await expect(
      new ApiClient(impl).takeAction("s1", "Forward"),
    ).rejects.toMatchObject({ status: 409 });
  });

  it("finish posts without a body and returns the trajectory blob", async () => {
    const { impl, calls } = fakeFetch(() => ({
      status: 200,
      body: { trajectory_id: "tiny_human_s1", trajectory: { steps: [] } },
    }));
    const res = await new ApiClient(impl).finish("s1");
    expect(res.trajectory_id).toBe("tiny_human_s1");
    expect(calls[0].init?.body).toBeUndefined();
  });
});
