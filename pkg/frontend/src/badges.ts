/**
 * Link badges: a small icon appended next to each anchor whose resource
 * has a known status, plus visual fading of links assessed inaccurate.
 *
 * DOM discipline: everything is additive (a span after the anchor, a CSS
 * class on it); page content is never removed or reordered, and fading
 * only lowers opacity, never hides.
 */

import type { LinkStatusView } from "./wire";

export type BadgeKind = "check" | "cross" | "question";

export const FADE_OPACITY = 0.45;
export const BADGE_CLASS = "trustnet-badge";
export const FADED_CLASS = "trustnet-faded";
const BADGED_ATTR = "data-trustnet-badge";

const BADGE_GLYPHS: Record<BadgeKind, string> = {
  check: "✓",
  cross: "✕",
  question: "?",
};

const BADGE_TITLES: Record<BadgeKind, string> = {
  check: "Assessed accurate by your sources",
  cross: "Assessed inaccurate by your sources",
  question: "Your sources asked about this link",
};

/** Badge for a link's status, or null when there is nothing to show. */
export function badgeFor(view: LinkStatusView): BadgeKind | null {
  switch (view.status) {
    case "accurate":
      return "check";
    case "inaccurate":
      return "cross";
    case "split_opinion":
      return "question"; // disagreement reads as an open question on links
    case "none":
      return view.hasQuestions ? "question" : null;
  }
}

export function applyBadge(anchor: HTMLAnchorElement, kind: BadgeKind): void {
  if (anchor.getAttribute(BADGED_ATTR) === kind) return;
  removeBadge(anchor);
  anchor.setAttribute(BADGED_ATTR, kind);
  const badge = anchor.ownerDocument.createElement("span");
  badge.className = `${BADGE_CLASS} ${BADGE_CLASS}--${kind}`;
  badge.textContent = BADGE_GLYPHS[kind];
  badge.title = BADGE_TITLES[kind];
  badge.setAttribute("aria-hidden", "true");
  anchor.after(badge);
  if (kind === "cross") {
    anchor.classList.add(FADED_CLASS);
    anchor.style.opacity = String(FADE_OPACITY); // de-emphasized, still visible
  }
}

export function removeBadge(anchor: HTMLAnchorElement): void {
  if (!anchor.hasAttribute(BADGED_ATTR)) return;
  anchor.removeAttribute(BADGED_ATTR);
  const next = anchor.nextElementSibling;
  if (next && next.classList.contains(BADGE_CLASS)) next.remove();
  anchor.classList.remove(FADED_CLASS);
  anchor.style.removeProperty("opacity");
}

/** Badge every anchor under `root` whose cleaned href has a status. */
export function annotateAnchors(
  root: ParentNode,
  statuses: Record<string, LinkStatusView>,
  cleanHref: (href: string, base: string) => string | null,
  baseUrl: string,
): number {
  let applied = 0;
  root.querySelectorAll<HTMLAnchorElement>("a[href]").forEach((anchor) => {
    const cleaned = cleanHref(anchor.getAttribute("href") ?? "", baseUrl);
    if (!cleaned) return;
    const view = statuses[cleaned];
    if (!view) return;
    const kind = badgeFor(view);
    if (!kind) return;
    applyBadge(anchor, kind);
    applied += 1;
  });
  return applied;
}
