// Typed client over the review service; every screen talks to the server
// through this module only.

import type {
  AssessmentBody,
  ExperimentInfo,
  FindingDetail,
  FindingSummary,
  ResolutionBody,
  RootCauses,
  StatsResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private token: string | null = null,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = {
      ...(init?.headers as Record<string, string> | undefined),
    };
    if (init?.body) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const response = await fetch(this.baseUrl + path, { ...init, headers });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listExperiments(): Promise<ExperimentInfo[]> {
    return this.request('/experiments');
  }

  listFindings(experiment: string, detector?: string, version?: string): Promise<FindingSummary[]> {
    const params = new URLSearchParams({ experiment });
    if (detector) params.set('detector', detector);
    if (version) params.set('version', version);
    return this.request(`/findings?${params}`);
  }

  getFinding(findingId: string): Promise<FindingDetail> {
    return this.request(`/findings/${encodeURIComponent(findingId)}`);
  }

  getStats(experiment: string, detector?: string): Promise<StatsResponse> {
    const params = new URLSearchParams({ experiment });
    if (detector) params.set('detector', detector);
    return this.request(`/stats?${params}`);
  }

  getRootCauses(): Promise<RootCauses> {
    return this.request('/root-causes');
  }

  postAssessment(body: AssessmentBody): Promise<{ status: string }> {
    return this.request('/assessments', { method: 'POST', body: JSON.stringify(body) });
  }

  postResolution(body: ResolutionBody): Promise<{ status: string }> {
    return this.request('/resolutions', { method: 'POST', body: JSON.stringify(body) });
  }
}
