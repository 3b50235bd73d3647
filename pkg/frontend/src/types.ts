/** Wire types for the conceptkit HTTP API. */

export interface GraphNode {
  id: string;
  label: string;
  kind: 'concept' | 'class';
  parent?: string;
}

export interface GraphEdge {
  source: string;
  target: string;
  label: string;
  kind: 'frame' | 'subconcept';
}

export interface GraphPayload {
  revision: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface MachineReply {
  kind: 'clarification' | 'acknowledgment' | 'question_back' | 'answer';
  text: string;
  payload: Record<string, unknown>;
}

export interface KbDelta {
  concepts_added: string[];
  classes_added: string[];
  features_added: string[];
  frames_added: string[];
  rules_added: number;
  values_added: Record<string, string[]>;
}

export interface StatementReply {
  machine_reply: MachineReply;
  kb_delta: KbDelta;
  revision: number;
}

export interface FrameColumn {
  feature: string;
  values: string[];
  unit?: string;
  kind?: string;
}

export interface FrameTable {
  name: string;
  source: string;
  target: string;
  inputs: FrameColumn[];
  rules: string[];
  outputs: FrameColumn[];
  externals: FrameColumn[];
}

export interface DerivationStep {
  frame: string;
  direction: 'forward' | 'backward';
  kind: 'logical' | 'remedial';
  rule: string;
  consumed: Record<string, unknown>;
  produced: Record<string, unknown>;
}

export interface Answer {
  status: 'exact' | 'approximate' | 'unknown';
  value?: unknown;
  derivation?: DerivationStep[];
  candidates?: string[];
  missing?: string[];
}

export interface ApiError {
  error: string;
  detail: string;
  line?: number;
  column?: number;
  expected?: string[];
}
