import type {
  BuilderOp,
  EvaluateResponse,
  ExportBundle,
  FrameDoc,
  FrameSession,
  PatchResponse,
  ProduceResponse,
  ValidationState,
  Violation,
} from './types.js';

export interface TranscriptTail {
  step: string;
  kind: string;
  prompt_tail: string;
  response_tail: string;
}

// Every non-2xx reply carries {"error": {"type", "detail", ...}}.
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly type: string,
    readonly detail: string,
    readonly violations: Violation[] = [],
    readonly transcriptExcerpt: TranscriptTail[] = [],
  ) {
    super(`${type}: ${detail}`);
    this.name = 'ApiError';
  }

  get isBusy(): boolean {
    return this.status === 409 && this.type === 'FrameBusy';
  }

  get isUpstream(): boolean {
    return this.status === 502;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/+$/, '');
    this.fetchFn = fetchFn;
  }

  async createFrame(frame?: FrameDoc): Promise<{ frame_id: string; validation: ValidationState }> {
    return this.request('POST', '/frames', frame ? { frame } : {});
  }

  async getFrame(frameId: string): Promise<FrameSession> {
    return this.request('GET', `/frames/${frameId}`);
  }

  async patch(frameId: string, ops: BuilderOp[]): Promise<PatchResponse> {
    return this.request('PATCH', `/frames/${frameId}`, { ops });
  }

  async generate(frameId: string): Promise<ProduceResponse> {
    return this.request('POST', `/frames/${frameId}/generate`, {});
  }

  async regenerate(frameId: string, suggestion?: string): Promise<ProduceResponse> {
    return this.request('POST', `/frames/${frameId}/regenerate`, suggestion ? { suggestion } : {});
  }

  async evaluate(frameId: string, version?: number): Promise<EvaluateResponse> {
    return this.request('POST', `/frames/${frameId}/evaluate`, version === undefined ? {} : { version });
  }

  async exportBundle(frameId: string): Promise<ExportBundle> {
    return this.request('GET', `/frames/${frameId}/export`);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'content-type': 'application/json' } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchFn(this.base + path, init);
    const payload = await response.json().catch(() => null);
    if (!response.ok) throw toApiError(response.status, payload);
    return payload as T;
  }
}

function toApiError(status: number, payload: unknown): ApiError {
  const record = payload as { error?: Record<string, unknown> } | null;
  const err = record?.error ?? {};
  return new ApiError(
    status,
    typeof err['type'] === 'string' ? (err['type'] as string) : 'HttpError',
    typeof err['detail'] === 'string' ? (err['detail'] as string) : `request failed with status ${status}`,
    Array.isArray(err['violations']) ? (err['violations'] as Violation[]) : [],
    Array.isArray(err['transcript_excerpt']) ? (err['transcript_excerpt'] as TranscriptTail[]) : [],
  );
}
