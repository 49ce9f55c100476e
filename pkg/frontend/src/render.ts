// HTML renderers, all pure string builders over API payloads.

import type {
  DetectorStats,
  ExperimentInfo,
  FindingDetail,
  FindingSummary,
  RootCauses,
  StatsResponse,
} from './types.js';
import { reviewProgressLabel, scoreLabel } from './state.js';

export function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

export function renderExperimentList(experiments: ExperimentInfo[]): string {
  if (!experiments.length) {
    return '<p class="empty">No experiment exports in this workspace yet.</p>';
  }
  const rows = experiments
    .map((exp) => {
      const p = exp.progress;
      return `<tr>
        <td><a href="#/queue/${encodeURIComponent(exp.name)}">${escapeHtml(exp.name)}</a></td>
        <td>${exp.detectors.map(escapeHtml).join(', ')}</td>
        <td>${p.review_complete}/${p.total_findings} reviewed twice</td>
        <td>${exp.misuse_count}</td>
        <td><a href="#/stats/${encodeURIComponent(exp.name)}">dashboard</a></td>
      </tr>`;
    })
    .join('');
  return `<table class="list">
    <thead><tr><th>experiment</th><th>detectors</th><th>progress</th><th>known misuses</th><th></th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

export function renderQueue(experiment: string, findings: FindingSummary[]): string {
  if (!findings.length) return '<p class="empty">Queue is empty under the current filter.</p>';
  const rows = findings
    .map((f) => {
      const badge = reviewProgressLabel(f.review);
      const badgeClass = f.review.disputed ? 'disputed' : badge === 'resolved' ? 'resolved' : '';
      return `<tr>
        <td>${f.rank ?? ''}</td>
        <td><a href="#/finding/${encodeURIComponent(f.finding_id)}">${escapeHtml(f.location.file)}#${escapeHtml(f.location.method)}</a></td>
        <td>${escapeHtml(f.detector_id)}</td>
        <td>${scoreLabel(f.score)}</td>
        <td>${f.missing.map(escapeHtml).join(', ')}</td>
        <td class="badge ${badgeClass}">${badge}</td>
      </tr>`;
    })
    .join('');
  return `<table class="list">
    <thead><tr><th>#</th><th>location</th><th>detector</th><th>score</th><th>missing facts</th><th>reviews</th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

export function renderSnippet(detail: FindingDetail): string {
  if (!detail.snippet) return '<p class="empty">Source snippet unavailable.</p>';
  const lines = detail.snippet.lines
    .map(
      (line) =>
        `<div class="line${line.marked ? ' marked' : ''}"><span class="no">${line.number}</span>${escapeHtml(line.text) || '&nbsp;'}</div>`,
    )
    .join('');
  return `<div class="snippet"><div class="path">${escapeHtml(detail.snippet.file)}</div>${lines}</div>`;
}

export function renderMisuseContext(detail: FindingDetail): string {
  if (!detail.potential_hit_of.length) return '';
  const blocks = detail.potential_hit_of
    .map(
      (m) => `<div class="misuse">
      <h3>Potential hit: ${escapeHtml(m.misuse_id)}${m.ambiguous ? ' <em>(ambiguous match, verify the method)</em>' : ''}</h3>
      <p>${escapeHtml(m.description)}</p>
      <p class="fix"><strong>Known fix:</strong> ${escapeHtml(m.fix_description)}</p>
      <p class="labels">${m.muc_labels.map(escapeHtml).join(', ')}</p>
    </div>`,
    )
    .join('');
  return blocks;
}

export function renderDecisionForm(detail: FindingDetail, vocab: RootCauses): string {
  const fpOptions = vocab.fp_root_causes
    .map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`)
    .join('');
  const fnOptions = vocab.fn_root_causes
    .map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`)
    .join('');
  const reviews = detail.review.assessments
    .map(
      (a) =>
        `<li>${escapeHtml(a.reviewer_id)}: <strong>${a.decision}</strong>${
          a.fp_root_cause ? ` (${escapeHtml(a.fp_root_cause)})` : ''
        }${a.comment ? ` — ${escapeHtml(a.comment)}` : ''}</li>`,
    )
    .join('');
  return `
  <ul class="assessments">${reviews}</ul>
  <form id="decision-form">
    <label><input type="radio" name="decision" value="misuse"> misuse</label>
    <label><input type="radio" name="decision" value="not-misuse"> not a misuse</label>
    <label>false-positive cause
      <select name="fp_root_cause"><option value="">—</option>${fpOptions}</select>
    </label>
    <label>divergence cause
      <select name="fn_root_cause"><option value="">—</option>${fnOptions}</select>
    </label>
    <label>comment <input type="text" name="comment" placeholder="optional"></label>
    <button type="submit">save assessment</button>
    <span id="form-error" class="error"></span>
  </form>`;
}

export function renderResolutionScreen(experiment: string, disputed: FindingSummary[]): string {
  if (!disputed.length) return '<p class="empty">No disagreements waiting for resolution.</p>';
  const rows = disputed
    .map((f) => {
      const verdicts = f.review.assessments
        .map((a) => `${escapeHtml(a.reviewer_id)}: ${a.decision}`)
        .join(' vs ');
      return `<div class="dispute" data-finding="${escapeHtml(f.finding_id)}">
        <a href="#/finding/${encodeURIComponent(f.finding_id)}">${escapeHtml(f.location.file)}#${escapeHtml(f.location.method)}</a>
        <span>${verdicts}</span>
        <button data-resolve="misuse" data-finding="${escapeHtml(f.finding_id)}">resolve: misuse</button>
        <button data-resolve="not-misuse" data-finding="${escapeHtml(f.finding_id)}">resolve: not a misuse</button>
      </div>`;
    })
    .join('');
  return `<div class="resolutions">${rows}</div>`;
}

export function renderDashboard(stats: StatsResponse): string {
  const header = `<p class="meta">primary reviewers: ${stats.primary_reviewers.map(escapeHtml).join(', ') || 'n/a'}
    — ${stats.progress.review_complete}/${stats.progress.total_findings} findings reviewed twice</p>`;
  const rows = stats.detectors.map(renderDetectorRow).join('');
  const causeRows = stats.detectors
    .map((d) => {
      const fp = Object.entries(d.fp_root_causes)
        .filter(([, n]) => n > 0)
        .map(([cause, n]) => `${escapeHtml(cause)}: ${n}`)
        .join(', ');
      return fp ? `<tr><td>${escapeHtml(d.detector_id)}</td><td>${fp}</td></tr>` : '';
    })
    .join('');
  return `${header}
  <table class="list">
    <thead><tr><th>detector</th><th>reviewed</th><th>confirmed</th><th>precision</th>
      <th>kappa</th><th>hits</th><th>recall</th><th>conceptual RUB</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
  ${causeRows ? `<h3>False-positive root causes</h3><table class="list"><tbody>${causeRows}</tbody></table>` : ''}`;
}

function renderDetectorRow(d: DetectorStats): string {
  return `<tr>
    <td>${escapeHtml(d.detector_id)}</td>
    <td>${d.reviewed}</td>
    <td>${d.confirmed}</td>
    <td data-stat="precision-${escapeHtml(d.detector_id)}">${d.precision ?? '—'}</td>
    <td>${d.kappa ?? '—'}</td>
    <td>${d.actual_hits ?? '—'}</td>
    <td>${d.recall ?? '—'}</td>
    <td>${d.conceptual_rub ?? '—'}</td>
  </tr>`;
}
