/**
 * Client-side href cleaning: turn whatever sits in an anchor into an
 * absolute http(s) URL, or null for things that cannot be fetched
 * (javascript:, mailto:, fragments, malformed). Canonicalization proper
 * (tracking-param stripping, host folding) lives on the server; the
 * client only needs hrefs clean enough to batch.
 */

export function cleanHref(rawHref: string, baseUrl: string): string | null {
  const href = rawHref.trim();
  if (!href || href.startsWith("#")) return null;
  let url: URL;
  try {
    url = new URL(href, baseUrl);
  } catch {
    return null;
  }
  if (url.protocol !== "http:" && url.protocol !== "https:") return null;
  if (!url.hostname) return null;
  return url.href;
}

/** Deduplicated cleaned hrefs of all anchors under `root`, page order. */
export function collectLinks(root: ParentNode, baseUrl: string): string[] {
  const seen = new Set<string>();
  const links: string[] = [];
  root.querySelectorAll("a[href]").forEach((anchor) => {
    const cleaned = cleanHref(anchor.getAttribute("href") ?? "", baseUrl);
    if (cleaned && !seen.has(cleaned)) {
      seen.add(cleaned);
      links.push(cleaned);
    }
  });
  return links;
}
