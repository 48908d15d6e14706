/**
 * The in-page assessment pane and its floating button.
 *
 * Behavior on page load: the page's status is fetched; when assessments
 * from the viewer's sources are visible the pane opens automatically,
 * dwells a configurable few seconds, then minimizes to a floating button
 * in the top-right corner. Pane and button share one color, in bijection
 * with the page status. Unassessed pages get only the grey button (with a
 * question indicator when open inquiries are visible). Submitting an own
 * verdict recolors the pane immediately: the viewer's own assessment
 * outranks everything else.
 *
 * All DOM edits are additive (one container element) and all API calls
 * are async; the host page never waits on us. Remote strings are rendered
 * with textContent only.
 */

import type { ApiClient } from "./api";
import { COLOR_CSS, PaneColor, statusColor } from "./colors";
import type { PageStatusView, Verdict } from "./wire";

export type Visibility = "auto-open" | "minimized" | "expanded" | "closed";

export interface PaneState {
  visibility: Visibility;
  color: PaneColor;
  view: PageStatusView | null;
  draftVerdict: Verdict | null;
  error: string | null;
}

export interface PaneOptions {
  dwellMs: number;
}

const ROOT_ID = "trustnet-root";

const STYLE = `
#${ROOT_ID} { all: initial; font-family: system-ui, sans-serif; }
.trustnet-button {
  position: fixed; top: 12px; right: 12px; z-index: 2147483646;
  width: 36px; height: 36px; border-radius: 50%;
  border: 1px solid rgba(0,0,0,.25); cursor: pointer; font-size: 15px;
}
.trustnet-button--error { outline: 2px dashed #999; }
.trustnet-pane {
  position: fixed; top: 12px; right: 12px; z-index: 2147483647;
  width: 320px; max-height: 80vh; overflow-y: auto;
  border: 1px solid rgba(0,0,0,.3); border-radius: 6px;
  padding: 10px; font-size: 13px; color: #1a1a1a;
}
.trustnet-pane[hidden] { display: none; }
.trustnet-badge { margin-left: 3px; font-weight: 700; }
.trustnet-badge--check { color: #1d7a2f; }
.trustnet-badge--cross { color: #b21f1f; }
.trustnet-badge--question { color: #b96b00; }
.trustnet-faded { opacity: 0.45; }
.trustnet-error { color: #b21f1f; margin-top: 6px; }
.trustnet-pane h4 { margin: 8px 0 4px; font-size: 12px; }
.trustnet-pane ul { margin: 0; padding-left: 16px; }
`;

const STATUS_LABEL: Record<string, string> = {
  accurate: "Assessed accurate",
  inaccurate: "Assessed inaccurate",
  split_opinion: "Split opinion",
  none: "No assessments",
};

export class Pane {
  private readonly doc: Document;
  private readonly api: ApiClient;
  private readonly pageUrl: string;
  private readonly dwellMs: number;

  private root!: HTMLElement;
  private button!: HTMLButtonElement;
  private pane!: HTMLElement;
  private dwellTimer: ReturnType<typeof setTimeout> | null = null;

  private stateInternal: PaneState = {
    visibility: "closed",
    color: "grey",
    view: null,
    draftVerdict: null,
    error: null,
  };

  constructor(doc: Document, api: ApiClient, pageUrl: string, options: PaneOptions) {
    this.doc = doc;
    this.api = api;
    this.pageUrl = pageUrl;
    this.dwellMs = options.dwellMs;
  }

  get state(): Readonly<PaneState> {
    return this.stateInternal;
  }

  mount(): void {
    this.root = this.doc.createElement("div");
    this.root.id = ROOT_ID;
    const style = this.doc.createElement("style");
    style.textContent = STYLE;
    this.root.appendChild(style);

    this.button = this.doc.createElement("button");
    this.button.className = "trustnet-button";
    this.button.title = "Trustnet assessments";
    this.button.addEventListener("click", () => {
      if (this.stateInternal.visibility === "expanded") this.minimize();
      else this.expand();
    });
    this.root.appendChild(this.button);

    this.pane = this.doc.createElement("aside");
    this.pane.className = "trustnet-pane";
    this.pane.hidden = true;
    this.root.appendChild(this.pane);

    this.doc.body.appendChild(this.root);
    this.paint();
  }

  /** Fetch the page's status and apply the auto-open rule. */
  async initialize(): Promise<void> {
    let view: PageStatusView;
    try {
      view = await this.api.pageStatus(this.pageUrl);
    } catch {
      this.stateInternal.error = "could not reach the assessment service";
      this.button.classList.add("trustnet-button--error");
      this.stateInternal.visibility = "minimized";
      this.paint();
      return;
    }
    this.applyView(view);
    if (view.assessments.length > 0) {
      this.stateInternal.visibility = "auto-open";
      this.paint();
      this.dwellTimer = setTimeout(() => {
        if (this.stateInternal.visibility === "auto-open") this.minimize();
      }, this.dwellMs);
    } else {
      this.stateInternal.visibility = "minimized";
      this.paint();
    }
  }

  applyView(view: PageStatusView): void {
    this.stateInternal.view = view;
    this.stateInternal.color = statusColor(view.status);
    this.stateInternal.error = null;
    this.paint();
  }

  expand(): void {
    if (this.dwellTimer) clearTimeout(this.dwellTimer);
    this.stateInternal.visibility = "expanded";
    this.paint();
  }

  minimize(): void {
    this.stateInternal.visibility = "minimized";
    this.paint();
  }

  close(): void {
    if (this.dwellTimer) clearTimeout(this.dwellTimer);
    this.stateInternal.visibility = "closed";
    this.paint();
  }

  async submitAssessment(
    verdict: Verdict,
    rationale: string | undefined,
    share: boolean,
  ): Promise<void> {
    try {
      await this.api.submitAssessment(this.pageUrl, verdict, rationale);
    } catch (error) {
      this.showError(error);
      return;
    }
    // Own verdict dominates: recolor immediately, then refresh in background.
    const view = this.stateInternal.view;
    if (view) {
      this.applyView({
        ...view,
        status: verdict,
        basis: "own",
      });
    } else {
      this.stateInternal.color = statusColor(verdict);
      this.paint();
    }
    if (share) {
      try {
        await this.api.share(this.pageUrl);
      } catch (error) {
        this.showError(error);
      }
    }
    void this.refresh();
  }

  async submitQuestion(
    body: string | undefined,
    anonymous: boolean,
    share: boolean,
  ): Promise<void> {
    try {
      await this.api.submitQuestion(this.pageUrl, body, anonymous);
      if (share) await this.api.share(this.pageUrl);
    } catch (error) {
      this.showError(error);
      return;
    }
    void this.refresh();
  }

  async shareOnly(): Promise<void> {
    try {
      await this.api.share(this.pageUrl);
      this.stateInternal.error = null;
      this.paint();
    } catch (error) {
      this.showError(error);
    }
  }

  async refresh(): Promise<void> {
    try {
      this.applyView(await this.api.pageStatus(this.pageUrl));
    } catch {
      // keep the last known view; pane content is advisory
    }
  }

  private showError(error: unknown): void {
    this.stateInternal.error =
      error instanceof Error ? error.message : "request failed";
    this.paint();
  }

  // -- rendering ----------------------------------------------------------

  private paint(): void {
    if (!this.button) return;
    const { color, visibility, view, error } = this.stateInternal;
    this.button.style.backgroundColor = COLOR_CSS[color];
    this.button.dataset.color = color;
    this.button.textContent =
      view && view.hasQuestions && view.assessments.length === 0 ? "?" : "";
    this.button.hidden = visibility === "auto-open" || visibility === "expanded";

    this.pane.hidden = !(visibility === "auto-open" || visibility === "expanded");
    this.pane.style.backgroundColor = COLOR_CSS[color];
    this.pane.dataset.color = color;
    if (!this.pane.hidden || error) this.renderContent();
  }

  private renderContent(): void {
    const { view, error } = this.stateInternal;
    this.pane.replaceChildren();

    const header = this.doc.createElement("header");
    const title = this.doc.createElement("strong");
    title.textContent = view ? STATUS_LABEL[view.status] ?? view.status : "Trustnet";
    header.appendChild(title);
    const minimizeBtn = this.doc.createElement("button");
    minimizeBtn.textContent = "–";
    minimizeBtn.className = "trustnet-minimize";
    minimizeBtn.addEventListener("click", () => this.minimize());
    const closeBtn = this.doc.createElement("button");
    closeBtn.textContent = "×";
    closeBtn.className = "trustnet-close";
    closeBtn.addEventListener("click", () => this.close());
    header.append(" ", minimizeBtn, closeBtn);
    this.pane.appendChild(header);

    if (view) {
      if (view.questions.length) {
        this.pane.appendChild(this.sectionTitle("Questions"));
        const list = this.doc.createElement("ul");
        list.className = "trustnet-questions";
        for (const q of view.questions) {
          const item = this.doc.createElement("li");
          const who = q.anonymous || !q.asker ? "Anonymous" : q.asker.displayName;
          item.textContent = `${who}: ${q.body ?? "Is this accurate?"}`;
          list.appendChild(item);
        }
        this.pane.appendChild(list);
      }

      this.pane.appendChild(this.sectionTitle("Assessments"));
      const list = this.doc.createElement("ul");
      list.className = "trustnet-assessments";
      if (!view.assessments.length) {
        const item = this.doc.createElement("li");
        item.textContent = "None from your sources yet.";
        list.appendChild(item);
      }
      for (const a of view.assessments) {
        const item = this.doc.createElement("li");
        const suffix = a.rationale ? ` — ${a.rationale}` : "";
        item.textContent = `${a.assessor.displayName} (${a.relation}): ${a.verdict}${suffix}`;
        list.appendChild(item);
      }
      this.pane.appendChild(list);

      if (view.recommendations.length) {
        this.pane.appendChild(this.sectionTitle("Also assessed by"));
        const recList = this.doc.createElement("ul");
        recList.className = "trustnet-recommendations";
        for (const rec of view.recommendations) {
          const item = this.doc.createElement("li");
          item.textContent = `${rec.source.displayName} (trusted by ${rec.platformTrustCount})`;
          const follow = this.doc.createElement("button");
          follow.textContent = "Follow";
          follow.className = "trustnet-follow";
          follow.dataset.sourceId = rec.source.id;
          follow.addEventListener("click", () => {
            void this.api.follow(rec.source.id).then(() => this.refresh());
          });
          item.append(" ", follow);
          recList.appendChild(item);
        }
        this.pane.appendChild(recList);
      }
    }

    this.pane.appendChild(this.renderSubmitForm());

    const errorBox = this.doc.createElement("div");
    errorBox.className = "trustnet-error";
    errorBox.hidden = !error;
    errorBox.textContent = error ?? "";
    this.pane.appendChild(errorBox);
  }

  private sectionTitle(text: string): HTMLElement {
    const h = this.doc.createElement("h4");
    h.textContent = text;
    return h;
  }

  private renderSubmitForm(): HTMLElement {
    const form = this.doc.createElement("section");
    form.className = "trustnet-own";

    const rationale = this.doc.createElement("textarea");
    rationale.className = "trustnet-rationale";
    rationale.placeholder = "Why? (optional)";

    const share = this.doc.createElement("input");
    share.type = "checkbox";
    share.className = "trustnet-share-flag";
    const shareLabel = this.doc.createElement("label");
    shareLabel.append(share, " share to feed");

    const accurate = this.doc.createElement("button");
    accurate.textContent = "Accurate";
    accurate.className = "trustnet-submit-accurate";
    accurate.addEventListener("click", () => {
      void this.submitAssessment("accurate", rationale.value || undefined, share.checked);
    });

    const inaccurate = this.doc.createElement("button");
    inaccurate.textContent = "Inaccurate";
    inaccurate.className = "trustnet-submit-inaccurate";
    inaccurate.addEventListener("click", () => {
      void this.submitAssessment("inaccurate", rationale.value || undefined, share.checked);
    });

    const anonymous = this.doc.createElement("input");
    anonymous.type = "checkbox";
    anonymous.className = "trustnet-anonymous-flag";
    const anonymousLabel = this.doc.createElement("label");
    anonymousLabel.append(anonymous, " ask anonymously");

    const ask = this.doc.createElement("button");
    ask.textContent = "Ask about accuracy";
    ask.className = "trustnet-submit-question";
    ask.addEventListener("click", () => {
      void this.submitQuestion(rationale.value || undefined, anonymous.checked, share.checked);
    });

    const shareNow = this.doc.createElement("button");
    shareNow.textContent = "Share to feed";
    shareNow.className = "trustnet-share-now";
    shareNow.addEventListener("click", () => void this.shareOnly());

    form.append(
      this.sectionTitle("Your assessment"),
      rationale,
      accurate,
      inaccurate,
      ask,
      anonymousLabel,
      shareLabel,
      shareNow,
    );
    return form;
  }
}
