// Payload shapes of the review service API. The UI renders exactly these
// fields and never fabricates its own numbers.

export type Decision = 'misuse' | 'not-misuse';

export interface Location {
  project: string;
  version: string;
  file: string;
  method: string;
  line: number | null;
}

export interface AssessmentView {
  reviewer_id: string;
  decision: Decision;
  fp_root_cause: string | null;
  fn_root_cause: string | null;
  comment: string;
  timestamp: string;
}

export interface ReviewView {
  reviewers: string[];
  assessments: AssessmentView[];
  review_complete: boolean;
  disputed: boolean;
  resolution: { decision: Decision; note: string; resolved_by: string } | null;
  final_decision: Decision | null;
}

export interface FindingSummary {
  finding_id: string;
  detector_id: string;
  rank: number | null;
  location: Location;
  score: number | 'Infinite';
  missing: string[];
  review: ReviewView;
}

export interface SnippetLine {
  number: number;
  text: string;
  marked: boolean;
}

export interface MisuseView {
  misuse_id: string;
  description: string;
  fix_description: string;
  muc_labels: string[];
  ambiguous: boolean;
}

export interface FindingDetail {
  experiment: string;
  finding: {
    finding_id: string;
    detector_id: string;
    rank: number | null;
    location: Location;
    score: number | 'Infinite';
    missing: string[];
    present: string[];
    redundant: string[];
    pattern_support: number;
    pattern_items: string[];
    metadata: Record<string, string>;
  };
  snippet: { file: string; lines: SnippetLine[] } | null;
  potential_hit_of: MisuseView[];
  review: ReviewView;
  review_guidance: string;
}

export interface ExperimentInfo {
  name: string;
  detectors: string[];
  misuse_count: number;
  progress: {
    total_findings: number;
    reviewed_once: number;
    review_complete: number;
    decided: number;
  };
}

export interface DetectorStats {
  experiment: string;
  detector_id: string;
  total_findings: number;
  reviewed: number;
  confirmed: number;
  awaiting_resolution: number;
  precision: string | null;
  kappa: number | null;
  kappa_pairs: number;
  fp_root_causes: Record<string, number>;
  fn_root_causes: Record<string, number>;
  known_misuses: number | null;
  actual_hits: number | null;
  recall: string | null;
  conceptual_rub: string | null;
}

export interface StatsResponse {
  experiment: string;
  progress: ExperimentInfo['progress'];
  primary_reviewers: string[];
  detectors: DetectorStats[];
}

export interface RootCauses {
  decisions: Decision[];
  fp_root_causes: string[];
  fn_root_causes: string[];
}

export interface AssessmentBody {
  finding_id: string;
  decision: Decision;
  fp_root_cause?: string | null;
  fn_root_cause?: string | null;
  comment?: string;
}

export interface ResolutionBody {
  finding_id: string;
  decision: Decision;
  note?: string;
}
