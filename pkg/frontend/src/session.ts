/** Client-side session state: transcript, pending question, highlights.
 *
 * The store never mutates anything except by POSTing statements; its
 * transcript mirrors the server's exactly (one trainer entry, one machine
 * entry per accepted statement). While a clarification is pending, only
 * yes/no goes through — the server would refuse other statements anyway.
 */

import { ApiClient } from './api.js';
import type { KbDelta, MachineReply } from './types.js';

export interface TranscriptEntry {
  speaker: 'trainer' | 'machine';
  text: string;
  revision: number;
}

export interface HighlightSet {
  nodes: string[];
  edges: string[];
}

export function highlightsFromDelta(delta: KbDelta): HighlightSet {
  return {
    nodes: [...delta.concepts_added, ...delta.classes_added],
    edges: [...delta.frames_added],
  };
}

// a confirmation, possibly with a trailing comment the server will strip
const CONFIRMATION = /^(yes|no)\s*(#.*)?$/;

export class SessionStore {
  transcript: TranscriptEntry[] = [];
  revision = 0;
  pending: MachineReply | null = null;
  lastHighlights: HighlightSet = { nodes: [], edges: [] };
  private sessionId: string | null = null;

  constructor(private readonly api: ApiClient) {}

  async open(): Promise<void> {
    this.sessionId = await this.api.openSession();
  }

  get pendingQuestion(): string | null {
    return this.pending ? this.pending.text : null;
  }

  /** A non-confirmation while a question is pending never reaches the server. */
  blocks(text: string): boolean {
    return this.pending !== null && !CONFIRMATION.test(text.trim());
  }

  async send(text: string): Promise<MachineReply> {
    if (this.sessionId === null) {
      throw new Error('session not open');
    }
    if (this.blocks(text)) {
      throw new Error(`answer the pending question first: ${this.pending!.text}`);
    }
    const reply = await this.api.sendStatement(this.sessionId, text);
    this.revision = reply.revision;
    this.transcript.push({ speaker: 'trainer', text, revision: reply.revision });
    this.transcript.push({
      speaker: 'machine',
      text: reply.machine_reply.text,
      revision: reply.revision,
    });
    const isQuestion =
      reply.machine_reply.kind === 'clarification' &&
      reply.machine_reply.payload &&
      'proposal' in reply.machine_reply.payload;
    this.pending = isQuestion ? reply.machine_reply : null;
    this.lastHighlights = highlightsFromDelta(reply.kb_delta);
    return reply.machine_reply;
  }
}
