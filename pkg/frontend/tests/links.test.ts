import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { LinkAnnotator, looksLikeRedirector, REDIRECTOR_HOSTS } from "../src/links";
import { FakeBackend } from "./fakeBackend";

const PAGE = "https://host.example/page";

function makeAnnotator(
  backend: FakeBackend,
  clientFetch: ((url: string, init?: RequestInit) => Promise<Response>) | null = null,
) {
  const api = new ApiClient({
    baseUrl: "https://backend.example",
    token: "t",
    fetchImpl: backend.fetch,
  });
  return new LinkAnnotator(document, api, PAGE, {
    interBatchDelayMs: 0,
    clientFetch,
  });
}

describe("looksLikeRedirector", () => {
  it("matches known shortener hosts and subdomains", () => {
    expect(looksLikeRedirector("https://t.co/xyz", REDIRECTOR_HOSTS)).toBe(true);
    expect(looksLikeRedirector("https://news.google.com/articles/1", REDIRECTOR_HOSTS)).toBe(true);
    expect(looksLikeRedirector("https://news.example/a", REDIRECTOR_HOSTS)).toBe(false);
  });
});

describe("LinkAnnotator redirect handling", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("uses cached server mappings to badge shortened links", async () => {
    document.body.innerHTML = '<a id="short" href="https://t.co/AbC">tweet link</a>';
    const backend = new FakeBackend();
    backend.mappings["https://t.co/AbC"] = "https://news.example/story";
    backend.linkStatuses["https://news.example/story"] = {
      status: "inaccurate",
      basis: "trusted",
      hasQuestions: false,
    };
    const annotator = makeAnnotator(backend);
    const started = annotator.start();
    await vi.advanceTimersByTimeAsync(10);
    await started;
    const anchor = document.querySelector<HTMLAnchorElement>("#short")!;
    expect(anchor.nextElementSibling?.classList.contains("trustnet-badge--cross")).toBe(true);
    expect(anchor.classList.contains("trustnet-faded")).toBe(true);
    annotator.stop();
  });

  it("client-side resolution reports discovered mappings to the server", async () => {
    document.body.innerHTML = '<a href="https://t.co/Fresh">new link</a>';
    const backend = new FakeBackend();
    const clientFetch = vi.fn(async (url: string) => {
      return { url: "https://news.example/target", ok: true } as Response;
    });
    const annotator = makeAnnotator(backend, clientFetch);
    const started = annotator.start();
    await vi.advanceTimersByTimeAsync(10);
    await started;
    expect(clientFetch).toHaveBeenCalledWith("https://t.co/Fresh", { redirect: "follow" });
    expect(backend.mappings["https://t.co/Fresh"]).toBe("https://news.example/target");
    annotator.stop();
  });

  it("falls back to server-side resolution when the browser blocks the fetch", async () => {
    document.body.innerHTML = '<a href="https://t.co/CorsBlocked">blocked</a>';
    const backend = new FakeBackend();
    backend.resolveResults["https://t.co/CorsBlocked"] = {
      url: "https://t.co/CorsBlocked",
      urlKey: "https://t.co/CorsBlocked",
      outcome: "ok",
      finalKey: "https://news.example/story",
    };
    backend.linkStatuses["https://news.example/story"] = {
      status: "accurate",
      basis: "trusted",
      hasQuestions: false,
    };
    // CORS failures surface as TypeError from fetch
    const clientFetch = vi.fn(async () => {
      throw new TypeError("Failed to fetch");
    });
    const annotator = makeAnnotator(backend, clientFetch);
    const started = annotator.start();
    await vi.advanceTimersByTimeAsync(10);
    await started;
    expect(backend.callsTo("/v1/urls/resolve")).toHaveLength(1);
    const anchor = document.querySelector<HTMLAnchorElement>("a")!;
    expect(anchor.nextElementSibling?.classList.contains("trustnet-badge--check")).toBe(true);
    annotator.stop();
  });

  it("per-link resolution failures stay silent", async () => {
    document.body.innerHTML = '<a href="https://t.co/Dead">dead</a>';
    const backend = new FakeBackend(); // resolve returns fetch_failed by default
    const annotator = makeAnnotator(backend);
    const started = annotator.start();
    await vi.advanceTimersByTimeAsync(10);
    await started;
    expect(document.querySelector(".trustnet-badge")).toBeNull();
    annotator.stop();
  });
});
