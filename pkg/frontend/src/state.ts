// Pure view logic: queue filtering, ordering and progress derivation.
// Keeping this free of DOM and fetch makes it directly unit-testable.

import type { FindingSummary, ReviewView } from './types.js';

export interface QueueFilter {
  detector: string | null;
  version: string | null;
  unreviewedBy: string | null; // reviewer id: hide findings they already assessed
}

export const emptyFilter: QueueFilter = { detector: null, version: null, unreviewedBy: null };

export function reviewProgressLabel(review: ReviewView): string {
  if (review.resolution) return 'resolved';
  const count = Math.min(review.reviewers.length, 2);
  return `${count}/2`;
}

export function isAssessedBy(review: ReviewView, reviewerId: string): boolean {
  return review.reviewers.includes(reviewerId);
}

export function needsResolution(review: ReviewView): boolean {
  return review.disputed;
}

export function applyFilter(findings: FindingSummary[], filter: QueueFilter): FindingSummary[] {
  return findings.filter((f) => {
    if (filter.detector && f.detector_id !== filter.detector) return false;
    if (filter.version && f.location.version !== filter.version) return false;
    if (filter.unreviewedBy && isAssessedBy(f.review, filter.unreviewedBy)) return false;
    return true;
  });
}

/** Next unreviewed finding after the given one, wrapping around the queue. */
export function nextInQueue(
  findings: FindingSummary[],
  currentId: string,
  reviewerId: string,
): FindingSummary | null {
  const start = findings.findIndex((f) => f.finding_id === currentId);
  const total = findings.length;
  for (let step = 1; step <= total; step += 1) {
    const candidate = findings[(start + step + total) % total];
    if (candidate && !isAssessedBy(candidate.review, reviewerId)) return candidate;
  }
  return null;
}

export function disputedFindings(findings: FindingSummary[]): FindingSummary[] {
  return findings.filter((f) => needsResolution(f.review));
}

export function distinctVersions(findings: FindingSummary[]): string[] {
  return [...new Set(findings.map((f) => f.location.version))].sort();
}

export function scoreLabel(score: number | 'Infinite'): string {
  if (score === 'Infinite') return '∞';
  return Number.isInteger(score) ? score.toFixed(1) : score.toPrecision(4);
}

/** Decision form validity per the service's rules: a false-positive root
 * cause may only accompany a not-misuse decision. */
export function validateDecisionForm(
  decision: string,
  fpRootCause: string | null,
): string | null {
  if (decision !== 'misuse' && decision !== 'not-misuse') {
    return 'pick a decision';
  }
  if (fpRootCause && decision !== 'not-misuse') {
    return 'false-positive root causes apply to not-misuse decisions only';
  }
  return null;
}
