/**
 * Status -> color bijection: green for accurate, red for inaccurate,
 * orange for a split opinion, grey when nothing is known.
 */

import type { Status } from "./wire";

export type PaneColor = "green" | "red" | "orange" | "grey";

const STATUS_TO_COLOR: Record<Status, PaneColor> = {
  accurate: "green",
  inaccurate: "red",
  split_opinion: "orange",
  none: "grey",
};

const COLOR_TO_STATUS: Record<PaneColor, Status> = {
  green: "accurate",
  red: "inaccurate",
  orange: "split_opinion",
  grey: "none",
};

export function statusColor(status: Status): PaneColor {
  return STATUS_TO_COLOR[status];
}

export function colorStatus(color: PaneColor): Status {
  return COLOR_TO_STATUS[color];
}

/** Background shades: pale enough to keep pane text readable. */
export const COLOR_CSS: Record<PaneColor, string> = {
  green: "#d8f0d8",
  red: "#f6d6d6",
  orange: "#fbe4c4",
  grey: "#e8e8e8",
};
