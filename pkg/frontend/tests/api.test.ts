import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";

interface Call {
  url: string;
  method: string;
  body: string | null;
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Fetch stub that runs through a scripted list of outcomes. */
function scriptedFetch(script: (Response | Error)[]) {
  const calls: Call[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? init.body : null,
    });
    const next = script.shift();
    if (!next) throw new Error("script exhausted");
    if (next instanceof Error) throw next;
    return next;
  };
  return { calls, fetchImpl };
}

function client(fetchImpl: (url: string, init?: RequestInit) => Promise<Response>) {
  return new ApiClient("", { fetchImpl, retryDelayMs: 0, maxAttempts: 3 });
}

describe("submit retries", () => {
  it("resends the identical body after a network failure", async () => {
    const ok = { session: "s", feedback: { correct: true } };
    const { calls, fetchImpl } = scriptedFetch([
      new TypeError("fetch failed"),
      jsonResponse(ok),
    ]);
    const result = await client(fetchImpl).submit("s", 7, { ack: true });
    expect(result.session).toBe("s");
    expect(calls).toHaveLength(2);
    expect(calls[0]?.body).toBe(calls[1]?.body);
    expect(JSON.parse(calls[1]?.body ?? "")).toEqual({
      response: { ack: true },
      seq: 7,
    });
  });

  it("retries gateway errors but not client errors", async () => {
    const { calls, fetchImpl } = scriptedFetch([
      jsonResponse({ detail: "bad gateway" }, 502),
      jsonResponse({ ok: true }),
    ]);
    await client(fetchImpl).submit("s", 1, { ack: true });
    expect(calls).toHaveLength(2);
  });

  it("raises ApiError without retrying on a conflict", async () => {
    const { calls, fetchImpl } = scriptedFetch([
      jsonResponse({ detail: "expected seq 4" }, 409),
    ]);
    const err = await client(fetchImpl)
      .submit("s", 9, { ack: true })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).detail).toBe("expected seq 4");
    expect(calls).toHaveLength(1);
  });

  it("gives up after maxAttempts and surfaces the failure", async () => {
    const { calls, fetchImpl } = scriptedFetch([
      new TypeError("offline"),
      new TypeError("offline"),
      new TypeError("offline"),
    ]);
    const err = await client(fetchImpl)
      .submit("s", 2, { ack: true })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(TypeError);
    expect(calls).toHaveLength(3);
  });
});

describe("endpoints", () => {
  it("posts treatment and seed to create a session", async () => {
    const body = {
      session: "abc",
      treatment: "Null",
      status: "active",
      next_seq: 1,
      screen: { id: "consent", kind: "consent", payload: {} },
    };
    const { calls, fetchImpl } = scriptedFetch([jsonResponse(body, 201)]);
    const result = await client(fetchImpl).createSession("Null", 42);
    expect(result.screen.id).toBe("consent");
    expect(calls[0]?.method).toBe("POST");
    expect(calls[0]?.url).toBe("/sessions");
    expect(JSON.parse(calls[0]?.body ?? "")).toEqual({ treatment: "Null", seed: 42 });
  });

  it("fetches the current screen by session id", async () => {
    const body = {
      session: "abc",
      treatment: "Null",
      status: "active",
      next_seq: 3,
      screen: { id: "exit", kind: "exit", payload: {} },
    };
    const { calls, fetchImpl } = scriptedFetch([jsonResponse(body)]);
    const result = await client(fetchImpl).screen("abc");
    expect(result.next_seq).toBe(3);
    expect(calls[0]?.url).toBe("/sessions/abc/screen");
    expect(calls[0]?.method).toBe("GET");
  });
});
