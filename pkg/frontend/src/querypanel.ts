/** Query panel model: run a question, describe the outcome, and list the
 * frame edges to highlight in derivation order. */

import { ApiClient } from './api.js';
import type { Answer } from './types.js';

export interface QueryOutcome {
  headline: string;
  detail: string[];
  /** frame labels in step order; the view walks them with a delay */
  highlightSequence: string[];
}

export function describeAnswer(goal: string, answer: Answer): QueryOutcome {
  if (answer.status === 'exact') {
    const steps = answer.derivation ?? [];
    const detail = steps.map((step, index) => {
      const arrow = step.direction === 'backward' ? '↩' : '↪';
      const note = step.kind === 'remedial' ? ' (recommendation)' : '';
      return `${index + 1}. ${step.frame} ${arrow} ${step.rule}${note}`;
    });
    return {
      headline: `${goal} = ${String(answer.value)}`,
      detail: detail.length ? detail : ['given directly'],
      highlightSequence: steps.map((s) => s.frame),
    };
  }
  if (answer.status === 'approximate') {
    return {
      headline: `${goal}: it depends — ${(answer.candidates ?? []).join(' or ')}`,
      detail: [`missing facts: ${(answer.missing ?? []).join(', ')}`],
      highlightSequence: [],
    };
  }
  return { headline: `no deduction for ${goal}`, detail: [], highlightSequence: [] };
}

export async function runQuery(
  api: ApiClient,
  facts: Record<string, unknown>,
  goal: string,
): Promise<QueryOutcome> {
  const answer = await api.query(facts, goal);
  return describeAnswer(goal, answer);
}
