import type { ResponsePayload, ScreenBody, SubmitResult } from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

interface ClientOptions {
  fetchImpl?: FetchLike;
  maxAttempts?: number;
  retryDelayMs?: number;
}

const RETRYABLE_STATUS = new Set([502, 503, 504]);

/** Thin wrapper over the session endpoints.
 *
 * Network failures are retried with the byte-identical request, so a submit
 * that died in flight goes out again under the same sequence number and the
 * server's idempotent replay handling resolves whether the first copy landed.
 * HTTP errors other than gateway hiccups are not retried; they mean the
 * request itself was wrong.
 */
export class ApiClient {
  readonly base: string;
  private readonly fetchImpl: FetchLike;
  private readonly maxAttempts: number;
  private readonly retryDelayMs: number;

  constructor(base = "", options: ClientOptions = {}) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
    this.maxAttempts = options.maxAttempts ?? 4;
    this.retryDelayMs = options.retryDelayMs ?? 400;
  }

  async createSession(
    treatment: string,
    seed: number,
    config?: Record<string, unknown>,
  ): Promise<ScreenBody> {
    const body: Record<string, unknown> = { treatment, seed };
    if (config !== undefined) body.config = config;
    return (await this.request("POST", "/sessions", body)) as ScreenBody;
  }

  async screen(session: string): Promise<ScreenBody> {
    const path = `/sessions/${encodeURIComponent(session)}/screen`;
    return (await this.request("GET", path)) as ScreenBody;
  }

  async submit(
    session: string,
    seq: number,
    response: ResponsePayload,
  ): Promise<SubmitResult> {
    const path = `/sessions/${encodeURIComponent(session)}/response`;
    return (await this.request("POST", path, { response, seq })) as SubmitResult;
  }

  async log(session: string): Promise<Record<string, unknown>> {
    const path = `/sessions/${encodeURIComponent(session)}/log`;
    return (await this.request("GET", path)) as Record<string, unknown>;
  }

  async score(session: string): Promise<Record<string, unknown>> {
    const path = `/sessions/${encodeURIComponent(session)}/score`;
    return (await this.request("GET", path)) as Record<string, unknown>;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<unknown> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let lastFailure: unknown;
    for (let attempt = 1; attempt <= this.maxAttempts; attempt++) {
      let resp: Response;
      try {
        resp = await this.fetchImpl(this.base + path, init);
      } catch (err) {
        lastFailure = err;
        await this.backoff(attempt);
        continue;
      }
      if (RETRYABLE_STATUS.has(resp.status)) {
        lastFailure = new ApiError(resp.status, await describeError(resp));
        await this.backoff(attempt);
        continue;
      }
      if (!resp.ok) {
        throw new ApiError(resp.status, await describeError(resp));
      }
      return resp.json();
    }
    throw lastFailure instanceof Error
      ? lastFailure
      : new Error(`request failed after ${this.maxAttempts} attempts`);
  }

  private backoff(attempt: number): Promise<void> {
    const delay = this.retryDelayMs * attempt;
    if (delay <= 0) return Promise.resolve();
    return new Promise((resolve) => setTimeout(resolve, delay));
  }
}

async function describeError(resp: Response): Promise<string> {
  try {
    const parsed = (await resp.json()) as { detail?: unknown };
    if (typeof parsed.detail === "string") return parsed.detail;
    if (parsed.detail !== undefined) return JSON.stringify(parsed.detail);
  } catch {
    // fall through to the status line
  }
  return resp.statusText || "request failed";
}
