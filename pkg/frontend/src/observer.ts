/**
 * Watch the document for links added after load (infinite scroll, lazy
 * widgets) and hand them to a callback, debounced so mutation storms
 * produce one batched lookup instead of hundreds.
 */

export const DEBOUNCE_MS = 400;

export function watchForNewLinks(
  root: Node,
  onNewAnchors: (anchors: HTMLAnchorElement[]) => void,
  debounceMs: number = DEBOUNCE_MS,
): MutationObserver {
  let pending: HTMLAnchorElement[] = [];
  let timer: ReturnType<typeof setTimeout> | null = null;

  const flush = () => {
    timer = null;
    const anchors = pending;
    pending = [];
    if (anchors.length) onNewAnchors(anchors);
  };

  const collect = (node: Node) => {
    if (node.nodeType !== Node.ELEMENT_NODE) return;
    const el = node as Element;
    if (el instanceof HTMLAnchorElement && el.hasAttribute("href")) {
      pending.push(el);
    }
    el.querySelectorAll?.("a[href]").forEach((a) => {
      pending.push(a as HTMLAnchorElement);
    });
  };

  const observer = new MutationObserver((records) => {
    for (const record of records) {
      record.addedNodes.forEach(collect);
      if (
        record.type === "attributes" &&
        record.target instanceof HTMLAnchorElement &&
        record.target.hasAttribute("href")
      ) {
        pending.push(record.target);
      }
    }
    if (pending.length && timer === null) {
      timer = setTimeout(flush, debounceMs);
    }
  });
  observer.observe(root, {
    childList: true,
    subtree: true,
    attributes: true,
    attributeFilter: ["href"],
  });
  return observer;
}
