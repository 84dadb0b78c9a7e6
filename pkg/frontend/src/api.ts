/** API client for the analysis server, plus latest-wins request gating. */

import type {
  AnalysisPayload,
  ApiErrorDetail,
  ComputeResult,
  DatasetInfo,
  TransformOptions,
  UploadResult,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail: ApiErrorDetail = { code: 'error', message: response.statusText };
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'object') detail = body.detail;
    else if (typeof body.detail === 'string') detail = { code: 'error', message: body.detail };
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, detail.code, detail.message);
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) throw await parseError(response);
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(public base: string) {}

  private url(path: string): string {
    return `${this.base.replace(/\/$/, '')}${path}`;
  }

  async listDatasets(): Promise<DatasetInfo[]> {
    const body = await asJson<{ datasets: DatasetInfo[] }>(await fetch(this.url('/datasets')));
    return body.datasets;
  }

  async upload(file: Blob, name: string): Promise<UploadResult> {
    const response = await fetch(this.url(`/datasets?name=${encodeURIComponent(name)}`), {
      method: 'POST',
      body: file,
    });
    return asJson<UploadResult>(response);
  }

  async compute(
    id: string,
    transform: TransformOptions,
    epsilon: number,
  ): Promise<ComputeResult> {
    const response = await fetch(this.url(`/datasets/${id}/analysis`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ transform, epsilon }),
    });
    return asJson<ComputeResult>(response);
  }

  async analysis(id: string, epsilon: number, signal?: AbortSignal): Promise<AnalysisPayload> {
    const response = await fetch(this.url(`/datasets/${id}/analysis?epsilon=${epsilon}`), {
      signal,
    });
    return asJson<AnalysisPayload>(response);
  }

  async bundle(id: string): Promise<Blob> {
    const response = await fetch(this.url(`/datasets/${id}/bundle.tar`));
    if (!response.ok) throw await parseError(response);
    return response.blob();
  }

  plotUrl(id: string, kind: string, epsilon?: number): string {
    const suffix = epsilon === undefined ? '' : `?epsilon=${epsilon}`;
    return this.url(`/datasets/${id}/plots/${kind}.svg${suffix}`);
  }
}

/**
 * Serializes overlapping requests: starting a new one aborts the previous,
 * so a rapidly moved slider only ever applies the newest response.
 */
export class LatestWins {
  private controller: AbortController | null = null;

  async run<T>(request: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    try {
      const result = await request(controller.signal);
      return controller.signal.aborted ? null : result;
    } catch (error) {
      if (controller.signal.aborted) return null;
      throw error;
    }
  }
}
