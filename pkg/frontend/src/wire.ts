/** JSON shapes of the /v1 HTTP API. */

export type Status = "accurate" | "inaccurate" | "split_opinion" | "none";
export type Basis = "own" | "trusted" | "followed" | "no_assessment";
export type Verdict = "accurate" | "inaccurate";
export type Relation = "trusted" | "followed" | "self";

export interface SourceView {
  id: string;
  username: string;
  displayName: string;
}

export interface AssessmentView {
  id: string;
  urlKey: string;
  verdict: Verdict;
  rationale: string | null;
  createdAt: string;
  updatedAt: string;
  assessor: SourceView;
  relation: Relation;
}

export interface QuestionView {
  id: string;
  urlKey: string;
  body: string | null;
  createdAt: string;
  anonymous: boolean;
  asker: SourceView | null;
  isOwn: boolean;
}

export interface RecommendationView {
  source: SourceView;
  platformTrustCount: number;
}

export interface PageStatusView {
  url: string;
  urlKey: string;
  status: Status;
  basis: Basis;
  hasQuestions: boolean;
  assessments: AssessmentView[];
  questions: QuestionView[];
  recommendations: RecommendationView[];
}

export interface LinkStatusView {
  status: Status;
  basis: Basis;
  hasQuestions: boolean;
}

export interface ResolveResult {
  url: string;
  urlKey: string;
  outcome: "ok" | "loop" | "depth_exceeded" | "fetch_failed";
  finalUrl?: string;
  finalKey?: string;
  hops?: number;
  cached?: boolean;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
