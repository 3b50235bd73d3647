/** Thin typed client over the documented HTTP API — nothing else. */

import type { Answer, ApiError, FrameTable, GraphPayload, StatementReply } from './types.js';

export class RequestFailed extends Error {
  constructor(readonly status: number, readonly body: ApiError) {
    super(`${body.error}: ${body.detail}`);
  }
}

async function decode<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new RequestFailed(response.status, body as ApiError);
  }
  return body as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async openSession(): Promise<string> {
    const response = await fetch(this.url('/sessions'), { method: 'POST' });
    const body = await decode<{ session_id: string }>(response);
    return body.session_id;
  }

  async sendStatement(sessionId: string, text: string): Promise<StatementReply> {
    const response = await fetch(this.url(`/sessions/${sessionId}/statements`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    });
    return decode<StatementReply>(response);
  }

  async graph(): Promise<GraphPayload> {
    return decode<GraphPayload>(await fetch(this.url('/kb/graph')));
  }

  async frameTable(name: string): Promise<FrameTable> {
    const response = await fetch(this.url(`/kb/frames/${encodeURIComponent(name)}`));
    return decode<FrameTable>(response);
  }

  async query(facts: Record<string, unknown>, goal: string): Promise<Answer> {
    const response = await fetch(this.url('/kb/query'), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ facts, goal }),
    });
    return decode<Answer>(response);
  }

  async save(): Promise<{ path: string; revision: number }> {
    const response = await fetch(this.url('/kb/save'), { method: 'POST' });
    return decode<{ path: string; revision: number }>(response);
  }
}

/** Every feature mentioned by any frame, via documented endpoints only. */
export async function collectFeatures(api: ApiClient): Promise<string[]> {
  const graph = await api.graph();
  const frames = graph.edges.filter((e) => e.kind === 'frame').map((e) => e.label);
  const features = new Set<string>();
  for (const frame of frames) {
    const table = await api.frameTable(frame);
    for (const column of [...table.inputs, ...table.outputs, ...table.externals]) {
      features.add(column.feature);
    }
  }
  return [...features].sort();
}
