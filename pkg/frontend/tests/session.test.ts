import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, RequestFailed } from '../src/api.js';
import { highlightsFromDelta, SessionStore } from '../src/session.js';
import type { KbDelta, StatementReply } from '../src/types.js';

function emptyDelta(overrides: Partial<KbDelta> = {}): KbDelta {
  return {
    concepts_added: [],
    classes_added: [],
    features_added: [],
    frames_added: [],
    rules_added: 0,
    values_added: {},
    ...overrides,
  };
}

function reply(kind: StatementReply['machine_reply']['kind'], text: string,
               revision: number, payload: Record<string, unknown> = {},
               delta: KbDelta = emptyDelta()): StatementReply {
  return { machine_reply: { kind, text, payload }, kb_delta: delta, revision };
}

function mockFetch(routes: Array<[RegExp, number, unknown]>): void {
  vi.stubGlobal('fetch', vi.fn(async (input: RequestInfo | URL) => {
    const url = String(input);
    for (const [pattern, status, body] of routes) {
      if (pattern.test(url)) {
        return new Response(JSON.stringify(body), { status });
      }
    }
    throw new Error(`unmocked fetch: ${url}`);
  }));
}

afterEach(() => vi.unstubAllGlobals());

describe('SessionStore', () => {
  it('mirrors trainer and machine lines with the server revision', async () => {
    mockFetch([
      [/\/sessions$/, 200, { session_id: 's1' }],
      [/\/statements$/, 200, reply('acknowledgment', 'New feature "Breakable": No, Yes.', 3,
        {}, emptyDelta({ features_added: ['Breakable'] }))],
    ]);
    const store = new SessionStore(new ApiClient('http://x'));
    await store.open();
    await store.send('adj Breakable : No, Yes');
    expect(store.transcript).toEqual([
      { speaker: 'trainer', text: 'adj Breakable : No, Yes', revision: 3 },
      { speaker: 'machine', text: 'New feature "Breakable": No, Yes.', revision: 3 },
    ]);
    expect(store.revision).toBe(3);
    expect(store.pending).toBeNull();
  });

  it('blocks declarations while a clarification is pending', async () => {
    mockFetch([
      [/\/sessions$/, 200, { session_id: 's1' }],
      [/\/statements$/, 200, reply('clarification', 'Your Glasses? New class of "Humans"? (yes/no)', 0,
        { proposal: { action: 'add_class', concept: 'Humans', name: 'Glasses' } })],
    ]);
    const store = new SessionStore(new ApiClient('http://x'));
    await store.open();
    await store.send('noun Glasses');
    expect(store.pendingQuestion).toContain('Glasses');
    expect(store.blocks('adj Breakable : No, Yes')).toBe(true);
    expect(store.blocks('yes')).toBe(false);
    expect(store.blocks('no')).toBe(false);
    await expect(store.send('adj Breakable : No, Yes')).rejects.toThrow(/pending question/);
    // the blocked line never reached the server, so it is not in the transcript
    expect(store.transcript).toHaveLength(2);
  });

  it('clears the pending question after a confirmation', async () => {
    let calls = 0;
    vi.stubGlobal('fetch', vi.fn(async (input: RequestInfo | URL) => {
      const url = String(input);
      if (/\/sessions$/.test(url)) {
        return new Response(JSON.stringify({ session_id: 's1' }), { status: 200 });
      }
      calls += 1;
      const body = calls === 1
        ? reply('clarification', 'Your Glasses?', 0,
          { proposal: { action: 'add_class', concept: 'Humans', name: 'Glasses' } })
        : reply('acknowledgment', 'New class "Glasses" of concept "Humans".', 1,
          {}, emptyDelta({ classes_added: ['Humans::Glasses'] }));
      return new Response(JSON.stringify(body), { status: 200 });
    }));
    const store = new SessionStore(new ApiClient('http://x'));
    await store.open();
    await store.send('noun Glasses');
    expect(store.pending).not.toBeNull();
    await store.send('yes');
    expect(store.pending).toBeNull();
    expect(store.lastHighlights.nodes).toEqual(['Humans::Glasses']);
  });

  it('surfaces parse errors with their column', async () => {
    mockFetch([
      [/\/sessions$/, 200, { session_id: 's1' }],
      [/\/statements$/, 400, {
        error: 'ParseError', detail: "unexpected 'No'", line: 1, column: 15, expected: [':'],
      }],
    ]);
    const store = new SessionStore(new ApiClient('http://x'));
    await store.open();
    try {
      await store.send('adj Breakable No Yes');
      expect.unreachable('should have thrown');
    } catch (error) {
      expect(error).toBeInstanceOf(RequestFailed);
      expect((error as RequestFailed).status).toBe(400);
      expect((error as RequestFailed).body.column).toBe(15);
    }
    // a refused statement mutates nothing client-side either
    expect(store.transcript).toHaveLength(0);
  });
});

describe('highlightsFromDelta', () => {
  it('collects created nodes and frame edges', () => {
    const delta = emptyDelta({
      concepts_added: ['See well'],
      classes_added: ['Humans::Glasses'],
      frames_added: ['TO SEE'],
    });
    expect(highlightsFromDelta(delta)).toEqual({
      nodes: ['See well', 'Humans::Glasses'],
      edges: ['TO SEE'],
    });
  });
});
