/**
 * Content-script entry: wires options, the pane, and the link annotator
 * together for one page. On blacklisted hosts nothing is injected at all.
 */

import { ApiClient } from "./api";
import { LinkAnnotator, LinkAnnotatorOptions } from "./links";
import { isBlacklisted, KeyValueStorage, loadOptions, localStorageBackend } from "./options";
import { Pane } from "./pane";

export interface ContentHandles {
  pane: Pane;
  annotator: LinkAnnotator;
}

export interface InitOptions {
  storage?: KeyValueStorage;
  annotator?: LinkAnnotatorOptions;
}

export async function initContentScript(
  doc: Document,
  api: ApiClient,
  pageUrl: string,
  init: InitOptions = {},
): Promise<ContentHandles | null> {
  const options = await loadOptions(init.storage ?? localStorageBackend());
  const host = new URL(pageUrl).hostname;
  if (isBlacklisted(host, options.blacklist)) return null;

  const pane = new Pane(doc, api, pageUrl, { dwellMs: options.dwellMs });
  pane.mount();
  const annotator = new LinkAnnotator(doc, api, pageUrl, init.annotator ?? {});
  // Fire both concurrently; neither blocks the page or the other.
  void pane.initialize();
  void annotator.start();
  return { pane, annotator };
}
