/**
 * Typed client for the trustnet HTTP API.
 *
 * All calls are asynchronous and never block rendering; the fetch
 * implementation is injectable for tests. Batched endpoints enforce the
 * server's 200-URL cap client-side so oversized pages degrade gracefully
 * instead of erroring.
 */

import type {
  LinkStatusView,
  PageStatusView,
  ResolveResult,
  Verdict,
} from "./wire";

export const BATCH_CAP = 200;

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface ApiClientOptions {
  baseUrl: string;
  token?: string;
  fetchImpl?: FetchLike;
}

export class ApiClient {
  private baseUrl: string;
  private token: string | undefined;
  private fetchImpl: FetchLike;

  constructor(options: ApiClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, "");
    this.token = options.token;
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
  }

  setToken(token: string | undefined): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "error";
      let message = `${method} ${path} failed with ${response.status}`;
      try {
        const parsed = await response.json();
        code = parsed.code ?? code;
        message = parsed.message ?? message;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  async login(username: string, password: string): Promise<string> {
    const body = await this.request<{ token: string }>("POST", "/v1/auth/login", {
      username,
      password,
    });
    this.token = body.token;
    return body.token;
  }

  async pageStatus(url: string): Promise<PageStatusView> {
    const body = await this.request<{ results: PageStatusView[] }>(
      "POST",
      "/v1/status",
      { urls: [url] },
    );
    const result = body.results[0];
    if (!result) throw new ApiError(500, "empty_result", "status response was empty");
    return result;
  }

  async linkStatuses(urls: string[]): Promise<Record<string, LinkStatusView>> {
    if (urls.length === 0) return {};
    if (urls.length > BATCH_CAP) {
      throw new ApiError(400, "batch_too_large", `at most ${BATCH_CAP} urls per call`);
    }
    const body = await this.request<{ statuses: Record<string, LinkStatusView> }>(
      "POST",
      "/v1/links/status",
      { urls },
    );
    return body.statuses;
  }

  async getMappings(urls: string[]): Promise<Record<string, string>> {
    if (urls.length === 0) return {};
    const query = urls.map((u) => `orig=${encodeURIComponent(u)}`).join("&");
    const body = await this.request<{ mappings: Record<string, string> }>(
      "GET",
      `/v1/urls/mappings?${query}`,
    );
    return body.mappings;
  }

  async postMappings(pairs: Array<{ original: string; target: string }>): Promise<void> {
    if (pairs.length === 0) return;
    await this.request("POST", "/v1/urls/mappings", { mappings: pairs });
  }

  async resolveServerSide(url: string): Promise<ResolveResult> {
    return this.request<ResolveResult>("POST", "/v1/urls/resolve", { url });
  }

  async submitAssessment(
    url: string,
    verdict: Verdict,
    rationale?: string,
  ): Promise<void> {
    await this.request("POST", "/v1/assessments", { url, verdict, rationale });
  }

  async submitQuestion(
    url: string,
    bodyText: string | undefined,
    anonymous: boolean,
  ): Promise<void> {
    await this.request("POST", "/v1/questions", { url, body: bodyText, anonymous });
  }

  async share(url: string): Promise<void> {
    await this.request("POST", "/v1/shares", { url });
  }

  async follow(sourceId: string): Promise<void> {
    const current = await this.request<{ sourceIds: string[] }>(
      "GET",
      "/v1/relations/followed",
    );
    if (current.sourceIds.includes(sourceId)) return;
    await this.request("PUT", "/v1/relations/followed", {
      sourceIds: [...current.sourceIds, sourceId],
    });
  }
}
