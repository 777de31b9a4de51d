/** Typed client for the /v1 session API; keeps raw response bytes. */

import type {
  CombineResponse,
  MachineReport,
  OverrideResponse,
  PosteriorBins,
  RawOverrideResponse,
  RawReport,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
  }
}

async function failFrom(res: Response): Promise<never> {
  let code = 'HttpError';
  let message = `${res.status}`;
  let detail: unknown = null;
  try {
    const body = await res.json();
    code = body.code ?? code;
    message = body.message ?? message;
    detail = body.detail ?? null;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(res.status, code, message, detail);
}

export class Client {
  constructor(
    private readonly base = '',
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async createSession(scenarioText: string): Promise<string> {
    const res = await this.fetchFn(`${this.base}/v1/sessions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ scenario: scenarioText }),
    });
    if (res.status !== 201) await failFrom(res);
    const body = await res.json();
    return body.id as string;
  }

  async getReport(sessionId: string): Promise<RawReport> {
    const res = await this.fetchFn(`${this.base}/v1/sessions/${sessionId}/report`);
    if (!res.ok) await failFrom(res);
    const raw = await res.text();
    return { raw, report: JSON.parse(raw) as MachineReport };
  }

  async setOverride(
    sessionId: string,
    path: string,
    value: string | number | boolean,
  ): Promise<RawOverrideResponse> {
    const res = await this.fetchFn(
      `${this.base}/v1/sessions/${sessionId}/overrides`,
      {
        method: 'PATCH',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ path, value }),
      },
    );
    if (!res.ok) await failFrom(res);
    const raw = await res.text();
    return { raw, body: JSON.parse(raw) as OverrideResponse };
  }

  async getPosterior(sessionId: string, node: string): Promise<PosteriorBins> {
    const res = await this.fetchFn(
      `${this.base}/v1/sessions/${sessionId}/posteriors/${node}`,
    );
    if (!res.ok) await failFrom(res);
    return (await res.json()) as PosteriorBins;
  }

  async combine(
    reports: { name: string; report: MachineReport }[],
  ): Promise<{ raw: string; body: CombineResponse }> {
    const res = await this.fetchFn(`${this.base}/v1/combine`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ reports }),
    });
    if (!res.ok) await failFrom(res);
    const raw = await res.text();
    return { raw, body: JSON.parse(raw) as CombineResponse };
  }

  async health(): Promise<boolean> {
    try {
      const res = await this.fetchFn(`${this.base}/v1/health`);
      return res.ok;
    } catch {
      return false;
    }
  }
}
