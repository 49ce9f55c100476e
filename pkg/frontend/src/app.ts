// Screen wiring: hash routing, token handling, form submission.
// Review data is never cached across navigations; every screen re-fetches,
// so reloading the page always reproduces exactly the server state.

import { ApiClient, ApiError } from './api.js';
import {
  applyFilter,
  disputedFindings,
  distinctVersions,
  emptyFilter,
  nextInQueue,
  validateDecisionForm,
  type QueueFilter,
} from './state.js';
import {
  renderDashboard,
  renderDecisionForm,
  renderExperimentList,
  renderMisuseContext,
  renderQueue,
  renderResolutionScreen,
  renderSnippet,
  escapeHtml,
} from './render.js';
import type { Decision, RootCauses } from './types.js';

const TOKEN_KEY = 'misuselab-review-token';
const REVIEWER_KEY = 'misuselab-reviewer-id';
const POLL_INTERVAL_MS = 5000;

const api = new ApiClient('', sessionStorage.getItem(TOKEN_KEY));
let vocab: RootCauses | null = null;
let filter: QueueFilter = { ...emptyFilter };
let pollTimer: number | undefined;

function root(): HTMLElement {
  return document.getElementById('app') as HTMLElement;
}

function setStatus(message: string, isError = false): void {
  const bar = document.getElementById('status') as HTMLElement;
  bar.textContent = message;
  bar.className = isError ? 'error' : '';
}

function reviewerId(): string {
  return sessionStorage.getItem(REVIEWER_KEY) ?? '';
}

async function withErrors(work: () => Promise<void>): Promise<void> {
  try {
    setStatus('');
    await work();
  } catch (error) {
    if (error instanceof ApiError && error.status === 401) {
      setStatus('authentication failed: set your reviewer token', true);
      showTokenForm();
      return;
    }
    if (error instanceof ApiError && error.status === 409) {
      setStatus(`not yet: ${error.detail}`, true);
      await route(); // conflict means our view is stale: re-fetch
      return;
    }
    setStatus(error instanceof Error ? error.message : String(error), true);
  }
}

function showTokenForm(): void {
  root().innerHTML = `
    <h2>Reviewer sign-in</h2>
    <form id="token-form">
      <label>reviewer id <input name="reviewer" value="${escapeHtml(reviewerId())}" required></label>
      <label>token <input name="token" type="password" required></label>
      <button type="submit">save for this session</button>
    </form>`;
  const form = document.getElementById('token-form') as HTMLFormElement;
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const data = new FormData(form);
    sessionStorage.setItem(TOKEN_KEY, String(data.get('token')));
    sessionStorage.setItem(REVIEWER_KEY, String(data.get('reviewer')));
    api.setToken(String(data.get('token')));
    location.hash = '#/';
  });
}

async function showExperiments(): Promise<void> {
  const experiments = await api.listExperiments();
  root().innerHTML = `<h2>Experiments</h2>${renderExperimentList(experiments)}`;
}

async function showQueue(experiment: string): Promise<void> {
  const findings = await api.listFindings(experiment);
  const filtered = applyFilter(findings, filter);
  const detectors = [...new Set(findings.map((f) => f.detector_id))].sort();
  const versions = distinctVersions(findings);
  const options = (values: string[], selected: string | null) =>
    ['<option value="">all</option>']
      .concat(
        values.map(
          (v) =>
            `<option value="${escapeHtml(v)}"${v === selected ? ' selected' : ''}>${escapeHtml(v)}</option>`,
        ),
      )
      .join('');
  root().innerHTML = `
    <h2>${escapeHtml(experiment)} queue</h2>
    <div class="filters">
      <label>detector <select id="filter-detector">${options(detectors, filter.detector)}</select></label>
      <label>version <select id="filter-version">${options(versions, filter.version)}</select></label>
      <label><input type="checkbox" id="filter-mine" ${filter.unreviewedBy ? 'checked' : ''}>
        unreviewed by me</label>
      <a href="#/resolve/${encodeURIComponent(experiment)}">resolution screen</a>
      <a href="#/stats/${encodeURIComponent(experiment)}">dashboard</a>
    </div>
    ${renderQueue(experiment, filtered)}`;
  (document.getElementById('filter-detector') as HTMLSelectElement).addEventListener('change', (e) => {
    filter = { ...filter, detector: (e.target as HTMLSelectElement).value || null };
    void route();
  });
  (document.getElementById('filter-version') as HTMLSelectElement).addEventListener('change', (e) => {
    filter = { ...filter, version: (e.target as HTMLSelectElement).value || null };
    void route();
  });
  (document.getElementById('filter-mine') as HTMLInputElement).addEventListener('change', (e) => {
    filter = {
      ...filter,
      unreviewedBy: (e.target as HTMLInputElement).checked ? reviewerId() : null,
    };
    void route();
  });
}

async function showFinding(findingId: string): Promise<void> {
  vocab = vocab ?? (await api.getRootCauses());
  const detail = await api.getFinding(findingId);
  const f = detail.finding;
  root().innerHTML = `
    <h2>${escapeHtml(f.location.file)}#${escapeHtml(f.location.method)}
      <span class="badge">${escapeHtml(f.detector_id)}</span></h2>
    <p class="meta">score ${f.score === 'Infinite' ? '∞' : f.score} —
      pattern support ${f.pattern_support} —
      missing: ${f.missing.map(escapeHtml).join(', ') || 'none'} —
      present: ${f.present.map(escapeHtml).join(', ') || 'none'}</p>
    ${renderMisuseContext(detail)}
    ${renderSnippet(detail)}
    <h3>Your assessment</h3>
    <p class="guidance">${escapeHtml(detail.review_guidance)}</p>
    ${renderDecisionForm(detail, vocab)}
    <p><a href="#/queue/${encodeURIComponent(detail.experiment)}">back to queue</a></p>`;

  const form = document.getElementById('decision-form') as HTMLFormElement;
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void withErrors(async () => {
      const data = new FormData(form);
      const decision = String(data.get('decision') ?? '');
      const fpCause = String(data.get('fp_root_cause') ?? '') || null;
      const problem = validateDecisionForm(decision, fpCause);
      const errorSpan = document.getElementById('form-error') as HTMLElement;
      if (problem) {
        errorSpan.textContent = problem;
        return;
      }
      errorSpan.textContent = '';
      await api.postAssessment({
        finding_id: findingId,
        decision: decision as Decision,
        fp_root_cause: fpCause,
        fn_root_cause: String(data.get('fn_root_cause') ?? '') || null,
        comment: String(data.get('comment') ?? ''),
      });
      // Queue advances to the next finding this reviewer has not seen.
      const queue = await api.listFindings(detail.experiment);
      const next = nextInQueue(applyFilter(queue, filter), findingId, reviewerId());
      location.hash = next
        ? `#/finding/${encodeURIComponent(next.finding_id)}`
        : `#/queue/${encodeURIComponent(detail.experiment)}`;
    });
  });
}

async function showResolutions(experiment: string): Promise<void> {
  const findings = await api.listFindings(experiment);
  const disputed = disputedFindings(findings);
  root().innerHTML = `
    <h2>${escapeHtml(experiment)} — disagreements</h2>
    ${renderResolutionScreen(experiment, disputed)}
    <p><a href="#/queue/${encodeURIComponent(experiment)}">back to queue</a></p>`;
  root()
    .querySelectorAll<HTMLButtonElement>('button[data-resolve]')
    .forEach((button) => {
      button.addEventListener('click', () => {
        void withErrors(async () => {
          await api.postResolution({
            finding_id: button.dataset.finding as string,
            decision: button.dataset.resolve as Decision,
            note: 'resolved via review ui',
          });
          await route();
        });
      });
    });
}

async function showStats(experiment: string): Promise<void> {
  const stats = await api.getStats(experiment);
  root().innerHTML = `<h2>${escapeHtml(experiment)} dashboard</h2>${renderDashboard(stats)}
    <p><a href="#/queue/${encodeURIComponent(experiment)}">back to queue</a></p>`;
  window.clearTimeout(pollTimer);
  pollTimer = window.setTimeout(() => {
    if (location.hash.startsWith('#/stats/')) void withErrors(() => showStats(experiment));
  }, POLL_INTERVAL_MS);
}

async function route(): Promise<void> {
  window.clearTimeout(pollTimer);
  const [, screen = '', argument = ''] = location.hash.split('/');
  const arg = decodeURIComponent(argument);
  await withErrors(async () => {
    if (!sessionStorage.getItem(TOKEN_KEY) && screen !== 'token') {
      showTokenForm();
      return;
    }
    switch (screen) {
      case 'queue':
        return showQueue(arg);
      case 'finding':
        return showFinding(arg);
      case 'resolve':
        return showResolutions(arg);
      case 'stats':
        return showStats(arg);
      case 'token':
        return showTokenForm();
      default:
        return showExperiments();
    }
  });
}

window.addEventListener('hashchange', () => void route());
// Other reviewers work concurrently: refresh the current screen on focus.
window.addEventListener('focus', () => void route());
window.addEventListener('DOMContentLoaded', () => void route());
