// End-to-end review round trip against the real service:
// two reviewers assess the bundled Experiment-P findings through the UI's
// client and state modules, the two-review gate provably blocks stats for
// singly-reviewed findings, the dashboard numbers equal the CLI `stats`
// output, and a service restart loses nothing.

import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, resolve } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { applyFilter, disputedFindings, emptyFilter, nextInQueue } from '../src/state.js';

const REPO = resolve(__dirname, '..', '..');
const DATASET = join(REPO, 'dataset');
const PORT = 18200 + (process.pid % 1800);
const BASE = `http://127.0.0.1:${PORT}`;

let workspace: string;
let tokensFile: string;
let server: ChildProcess | null = null;

function python(args: string[]): void {
  const result = spawnSync('python3', ['-m', 'misuselab.cli', ...args], {
    cwd: REPO,
    encoding: 'utf8',
  });
  if (result.status !== 0) {
    throw new Error(`cli ${args.join(' ')} failed: ${result.stderr}`);
  }
}

async function startServer(): Promise<ChildProcess> {
  const child = spawn(
    'python3',
    [
      '-m',
      'misuselab.cli',
      'serve',
      '--workspace',
      workspace,
      '--tokens',
      tokensFile,
      '--port',
      String(PORT),
    ],
    { cwd: REPO, stdio: ['ignore', 'pipe', 'pipe'] },
  );
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/experiments`);
      if (response.ok) return child;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  child.kill();
  throw new Error('review service did not come up');
}

async function stopServer(child: ChildProcess | null): Promise<void> {
  if (!child) return;
  child.kill('SIGTERM');
  await new Promise((r) => {
    child.once('exit', r);
    setTimeout(r, 3000);
  });
}

beforeAll(async () => {
  workspace = mkdtempSync(join(tmpdir(), 'review-ui-'));
  tokensFile = join(workspace, 'tokens.yml');
  writeFileSync(tokensFile, 'tok-alice: alice\ntok-bob: bob\n');
  python(['exp', 'p', '--dataset', DATASET, '--workspace', workspace, '--seed', '7']);
  server = await startServer();
}, 120_000);

afterAll(async () => {
  await stopServer(server);
});

// The planted deviations the reviewers recognize as actual misuses.
const TRUE_MISUSE_METHODS = new Set(['idle', 'idleNoisy', 'leakA']);

describe('review round trip through the UI client', () => {
  it('walks the two-reviewer workflow and matches the CLI stats', async () => {
    const alice = new ApiClient(BASE, 'tok-alice');
    const bob = new ApiClient(BASE, 'tok-bob');

    const experiments = await alice.listExperiments();
    expect(experiments.map((e) => e.name)).toContain('P');

    const vocab = await alice.getRootCauses();
    expect(vocab.fp_root_causes).toContain('Uncommon');

    let queue = applyFilter(await alice.listFindings('P'), emptyFilter);
    expect(queue.length).toBeGreaterThanOrEqual(10);

    // Alice assesses exactly one finding; the gate must keep stats at zero.
    const first = queue[0]!;
    await alice.postAssessment({
      finding_id: first.finding_id,
      decision: 'misuse',
    });
    const gated = await alice.getStats('P');
    for (const row of gated.detectors) {
      expect(row.reviewed).toBe(0);
    }
    expect(gated.progress.reviewed_once).toBe(1);

    // A third party may not resolve before two assessments exist (409).
    await expect(
      bob.postResolution({ finding_id: first.finding_id, decision: 'misuse' }),
    ).rejects.toMatchObject({ status: 409 });

    // Both reviewers work through their queues, advancing like the UI does.
    for (const [client, reviewer] of [
      [alice, 'alice'],
      [bob, 'bob'],
    ] as const) {
      queue = applyFilter(await client.listFindings('P'), emptyFilter);
      let current = queue.find((f) => !f.review.reviewers.includes(reviewer)) ?? null;
      while (current) {
        const isMisuse = TRUE_MISUSE_METHODS.has(current.location.method);
        await client.postAssessment({
          finding_id: current.finding_id,
          decision: isMisuse ? 'misuse' : 'not-misuse',
          fp_root_cause: isMisuse ? null : 'Uncommon',
          comment: `reviewed by ${reviewer}`,
        });
        const fresh = await client.listFindings('P');
        current = nextInQueue(applyFilter(fresh, emptyFilter), current.finding_id, reviewer);
      }
    }

    // Alice disagreed with herself on the very first finding earlier ('misuse'
    // twice is consistent), so force one genuine dispute and resolve it.
    const second = queue[1]!;
    await alice.postAssessment({ finding_id: second.finding_id, decision: 'misuse' });
    let findings = await alice.listFindings('P');
    const disputed = disputedFindings(findings);
    expect(disputed.map((f) => f.finding_id)).toContain(second.finding_id);
    await bob.postResolution({
      finding_id: second.finding_id,
      decision: 'not-misuse',
      note: 'discussed until consensus',
    });

    findings = await alice.listFindings('P');
    expect(disputedFindings(findings)).toHaveLength(0);
    for (const f of findings) {
      expect(f.review.review_complete).toBe(true);
      expect(f.review.final_decision).not.toBeNull();
    }

    // Dashboard numbers come from /stats verbatim and must equal the CLI's.
    const dashboard = await alice.getStats('P');
    expect(dashboard.primary_reviewers).toEqual(['alice', 'bob']);
    const cli = spawnSync(
      'python3',
      [
        '-m',
        'misuselab.cli',
        'stats',
        '--workspace',
        workspace,
        '--experiment',
        'P',
        '--tokens',
        tokensFile,
      ],
      { cwd: REPO, encoding: 'utf8' },
    );
    expect(cli.status).toBe(0);
    const lines = cli.stdout.trim().split('\n');
    const header = lines[0]!.split(',');
    const byDetector = new Map(
      lines.slice(1).map((line) => {
        const cells = line.split(',');
        return [cells[header.indexOf('detector')]!, cells] as const;
      }),
    );
    for (const row of dashboard.detectors) {
      const cliRow = byDetector.get(row.detector_id);
      expect(cliRow, `CLI row for ${row.detector_id}`).toBeDefined();
      expect(cliRow![header.indexOf('reviewed')]).toBe(String(row.reviewed));
      expect(cliRow![header.indexOf('confirmed')]).toBe(String(row.confirmed));
      expect(cliRow![header.indexOf('precision')]).toBe(row.precision ?? '');
    }

    // Restart: the append-only store must preserve every assessment.
    const before = await alice.getStats('P');
    await stopServer(server);
    server = await startServer();
    const after = new ApiClient(BASE, 'tok-alice');
    const reloaded = await after.getStats('P');
    expect(reloaded).toEqual(before);
  }, 120_000);
});
