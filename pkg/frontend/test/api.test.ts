import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';

function mockFetch(status: number, body: unknown) {
  const mock = vi.fn().mockResolvedValue({
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: () => Promise.resolve(body),
  });
  vi.stubGlobal('fetch', mock);
  return mock;
}

afterEach(() => vi.unstubAllGlobals());

describe('ApiClient', () => {
  it('attaches the bearer token to write requests', async () => {
    const mock = mockFetch(201, { status: 'recorded' });
    const client = new ApiClient('http://service', 'tok-alice');
    await client.postAssessment({ finding_id: 'f1', decision: 'misuse' });
    const [url, init] = mock.mock.calls[0]!;
    expect(url).toBe('http://service/assessments');
    expect(init.headers.Authorization).toBe('Bearer tok-alice');
    expect(JSON.parse(init.body).decision).toBe('misuse');
  });

  it('builds query strings for finding filters', async () => {
    const mock = mockFetch(200, []);
    await new ApiClient().listFindings('P', 'temporal', 'v1');
    expect(mock.mock.calls[0]![0]).toBe('/findings?experiment=P&detector=temporal&version=v1');
  });

  it('surfaces service error details', async () => {
    mockFetch(409, { detail: 'a resolution requires at least two prior assessments' });
    const client = new ApiClient('', 'tok');
    await expect(
      client.postResolution({ finding_id: 'f1', decision: 'misuse' }),
    ).rejects.toThrowError(ApiError);
    await expect(
      client.postResolution({ finding_id: 'f1', decision: 'misuse' }),
    ).rejects.toMatchObject({ status: 409 });
  });

  it('keeps the status text when the error body is not json', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn().mockResolvedValue({
        ok: false,
        status: 500,
        statusText: 'boom',
        json: () => Promise.reject(new Error('not json')),
      }),
    );
    await expect(new ApiClient().listExperiments()).rejects.toMatchObject({
      status: 500,
      detail: 'boom',
    });
  });
});
