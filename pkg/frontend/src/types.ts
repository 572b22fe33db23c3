// Response shapes published by the copyforge service API. The client
// renders these verbatim; it never derives or edits copy content.

export interface TrailRow {
  evaluator_id: string;
  pass: boolean;
  plan_round: number;
  reason_code: string | null;
  narrative: string | null;
}

export interface CopySummary {
  copy_id: string;
  usecase_id: string;
  state: string;
  refine_count: number;
  max_refines: number;
  components: Record<string, string>;
  persona: string | null;
  trail: TrailRow[];
}

export interface QueuePage {
  job_id: string;
  copies: CopySummary[];
}

export interface LineageEvent {
  event_id: number;
  timestamp: string;
  copy_id: string;
  job_id: string;
  kind: string;
  payload: Record<string, unknown>;
  plan_version: number;
}

export interface Lineage {
  copy_id: string;
  usecase_id: string;
  refine_count: number;
  max_refines: number;
  state: string;
  events: LineageEvent[];
}

export interface TaxonomyDoc {
  version: string;
  codes: string[];
}

export interface ReviewResult {
  copy_id: string;
  state: string;
}

export interface ReviewRequest {
  verdict: "approve" | "reject";
  reason_code?: string;
  note?: string;
}
