/**
 * The link-annotation pipeline: collect cleaned hrefs, swap known
 * redirector originals for their cached targets, fetch statuses in paced
 * batches, badge the anchors, and keep watching the page for links that
 * arrive later (infinite scroll).
 *
 * Redirect discovery: links on known redirector hosts that the server has
 * no mapping for are fetched once from the client (the client can see
 * targets the server cannot); when the browser blocks that with CORS, the
 * link is handed to the server's resolver instead. Newly discovered
 * original -> target pairs are reported back so the next visitor hits the
 * cache.
 */

import type { ApiClient, FetchLike } from "./api";
import { annotateAnchors } from "./badges";
import { dispatchBatches } from "./batcher";
import { watchForNewLinks } from "./observer";
import { cleanHref, collectLinks } from "./urlclean";
import type { LinkStatusView } from "./wire";

export const REDIRECTOR_HOSTS = [
  "t.co",
  "bit.ly",
  "goo.gl",
  "tinyurl.com",
  "news.google.com",
  "l.facebook.com",
  "lm.facebook.com",
  "out.reddit.com",
];

export interface LinkAnnotatorOptions {
  batchSize?: number;
  interBatchDelayMs?: number;
  redirectorHosts?: string[];
  clientFetch?: FetchLike | null; // null disables client-side resolving
}

export function looksLikeRedirector(url: string, hosts: string[]): boolean {
  try {
    const host = new URL(url).hostname.toLowerCase();
    return hosts.some((h) => host === h || host.endsWith("." + h));
  } catch {
    return false;
  }
}

export class LinkAnnotator {
  private readonly doc: Document;
  private readonly api: ApiClient;
  private readonly baseUrl: string;
  private readonly options: LinkAnnotatorOptions;
  private readonly statuses: Record<string, LinkStatusView> = {};
  private readonly targetByOriginal: Record<string, string> = {};
  private observer: MutationObserver | null = null;

  constructor(
    doc: Document,
    api: ApiClient,
    baseUrl: string,
    options: LinkAnnotatorOptions = {},
  ) {
    this.doc = doc;
    this.api = api;
    this.baseUrl = baseUrl;
    this.options = options;
  }

  /** Annotate everything currently on the page and start watching. */
  async start(): Promise<void> {
    await this.processLinks(collectLinks(this.doc, this.baseUrl));
    this.observer = watchForNewLinks(this.doc.body, (anchors) => {
      const fresh = new Set<string>();
      for (const anchor of anchors) {
        const cleaned = cleanHref(anchor.getAttribute("href") ?? "", this.baseUrl);
        if (cleaned && !(cleaned in this.statuses)) fresh.add(cleaned);
      }
      if (fresh.size) void this.processLinks([...fresh]);
      this.repaint();
    });
  }

  stop(): void {
    this.observer?.disconnect();
    this.observer = null;
  }

  private async processLinks(links: string[]): Promise<void> {
    if (!links.length) return;
    await this.learnMappings(links);
    const lookups = links.map((link) => this.targetByOriginal[link] ?? link);
    const uniqueLookups = [...new Set(lookups)];
    await dispatchBatches(
      uniqueLookups,
      async (batch) => {
        const statuses = await this.api.linkStatuses(batch);
        for (const [url, view] of Object.entries(statuses)) {
          this.statuses[url] = view;
        }
        // register statuses under the original spelling too
        for (const link of links) {
          const target = this.targetByOriginal[link];
          if (target && statuses[target]) this.statuses[link] = statuses[target]!;
        }
        this.repaint();
      },
      {
        batchSize: this.options.batchSize,
        interBatchDelayMs: this.options.interBatchDelayMs,
      },
    );
  }

  /** Ask the server for cached redirect targets; discover missing ones. */
  private async learnMappings(links: string[]): Promise<void> {
    const hosts = this.options.redirectorHosts ?? REDIRECTOR_HOSTS;
    const candidates = links.filter((l) => looksLikeRedirector(l, hosts));
    if (!candidates.length) return;
    let cached: Record<string, string> = {};
    try {
      cached = await this.api.getMappings(candidates);
    } catch {
      return; // mapping lookups are an optimization, never fatal
    }
    Object.assign(this.targetByOriginal, cached);

    const unknown = candidates.filter((l) => !(l in this.targetByOriginal));
    for (const link of unknown) {
      const target = await this.discoverTarget(link);
      if (target && target !== link) {
        this.targetByOriginal[link] = target;
      }
    }
  }

  /**
   * Follow one redirector link from the client; fall back to the server
   * when the browser blocks the fetch (CORS shows up as a TypeError).
   */
  private async discoverTarget(link: string): Promise<string | null> {
    const clientFetch = this.options.clientFetch;
    if (clientFetch) {
      try {
        const response = await clientFetch(link, { redirect: "follow" });
        const finalUrl = response.url || link;
        if (finalUrl !== link) {
          try {
            await this.api.postMappings([{ original: link, target: finalUrl }]);
          } catch {
            // reporting is best-effort
          }
          return finalUrl;
        }
        return null;
      } catch {
        // CORS or network: hand this one to the server below
      }
    }
    try {
      const result = await this.api.resolveServerSide(link);
      if (result.outcome === "ok" && result.finalKey) return result.finalKey;
    } catch {
      // per-link failures are silent: the link simply gets no badge
    }
    return null;
  }

  private repaint(): void {
    annotateAnchors(this.doc, this.statuses, cleanHref, this.baseUrl);
  }
}
