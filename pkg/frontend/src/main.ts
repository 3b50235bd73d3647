/** Console wiring: transcript pane, live graph, frame inspector, query panel. */

import { ApiClient, collectFeatures, RequestFailed } from './api.js';
import { frameTableHtml } from './frametable.js';
import { GraphView } from './graphview.js';
import { highlightsFromDelta, SessionStore } from './session.js';
import { runQuery } from './querypanel.js';

const api = new ApiClient('');
const store = new SessionStore(api);

const transcriptEl = document.getElementById('transcript') as HTMLDivElement;
const inputEl = document.getElementById('statement') as HTMLInputElement;
const formEl = document.getElementById('statement-form') as HTMLFormElement;
const pendingEl = document.getElementById('pending') as HTMLDivElement;
const revisionEl = document.getElementById('revision') as HTMLSpanElement;
const frameSelect = document.getElementById('frame-select') as HTMLSelectElement;
const frameTableEl = document.getElementById('frame-table') as HTMLDivElement;
const goalSelect = document.getElementById('goal-select') as HTMLSelectElement;
const factsInput = document.getElementById('query-facts') as HTMLInputElement;
const queryForm = document.getElementById('query-form') as HTMLFormElement;
const queryResult = document.getElementById('query-result') as HTMLDivElement;
const saveButton = document.getElementById('save') as HTMLButtonElement;

const graphView = new GraphView(
  document.getElementById('graph') as unknown as SVGSVGElement,
);

function say(speaker: 'trainer' | 'machine' | 'error', text: string): void {
  const line = document.createElement('div');
  line.className = `line ${speaker}`;
  line.textContent = `${speaker === 'machine' ? 'M' : speaker === 'trainer' ? 'T' : '!'}  ${text}`;
  transcriptEl.appendChild(line);
  transcriptEl.scrollTop = transcriptEl.scrollHeight;
}

async function refreshGraph(withHighlights = true): Promise<void> {
  const graph = await api.graph();
  const h = withHighlights ? store.lastHighlights : { nodes: [], edges: [] };
  graphView.render(graph, { nodes: new Set(h.nodes), edges: new Set(h.edges) });
  revisionEl.textContent = String(graph.revision);
  const frames = graph.edges.filter((e) => e.kind === 'frame').map((e) => e.label).sort();
  frameSelect.replaceChildren(
    ...frames.map((name) => new Option(name, name, false, name === frameSelect.value)),
  );
  const features = await collectFeatures(api);
  goalSelect.replaceChildren(
    ...features.map((name) => new Option(name, name, false, name === goalSelect.value)),
  );
}

function showPending(): void {
  pendingEl.textContent = store.pendingQuestion ?? '';
  pendingEl.classList.toggle('active', store.pending !== null);
}

formEl.addEventListener('submit', async (event) => {
  event.preventDefault();
  const text = inputEl.value.trim();
  if (!text) return;
  if (store.blocks(text)) {
    say('error', `answer the pending question first (yes/no)`);
    return;
  }
  try {
    const reply = await store.send(text);
    say('trainer', text);
    say('machine', reply.text);
    inputEl.value = '';
    showPending();
    await refreshGraph();
  } catch (error) {
    if (error instanceof RequestFailed) {
      const col = error.body.column !== undefined ? ` at column ${error.body.column}` : '';
      say('error', `${error.body.detail}${col}`);
    } else {
      say('error', String(error));
    }
  }
});

frameSelect.addEventListener('change', async () => {
  if (!frameSelect.value) return;
  try {
    const table = await api.frameTable(frameSelect.value);
    frameTableEl.innerHTML = frameTableHtml(table);
  } catch (error) {
    frameTableEl.textContent = error instanceof RequestFailed
      ? `frame not found: ${frameSelect.value}`
      : String(error);
  }
});

queryForm.addEventListener('submit', async (event) => {
  event.preventDefault();
  const goal = goalSelect.value;
  if (!goal) return;
  const facts: Record<string, unknown> = {};
  for (const part of factsInput.value.split(',')) {
    const [name, value] = part.split('=').map((s) => s.trim());
    if (name && value !== undefined) {
      const num = Number(value);
      facts[name] = Number.isFinite(num) && value !== '' ? num : value;
    }
  }
  try {
    const outcome = await runQuery(api, facts, goal);
    queryResult.replaceChildren();
    const headline = document.createElement('div');
    headline.className = 'headline';
    headline.textContent = outcome.headline;
    queryResult.appendChild(headline);
    for (const line of outcome.detail) {
      const el = document.createElement('div');
      el.textContent = line;
      queryResult.appendChild(el);
    }
    await refreshGraph(false);
    await graphView.playHighlights(outcome.highlightSequence);
  } catch (error) {
    queryResult.textContent = error instanceof RequestFailed
      ? error.body.detail
      : String(error);
  }
});

saveButton.addEventListener('click', async () => {
  try {
    const saved = await api.save();
    say('machine', `saved to ${saved.path} (revision ${saved.revision})`);
  } catch (error) {
    say('error', String(error));
  }
});

(async () => {
  await store.open();
  showPending();
  await refreshGraph(false);
  say('machine', 'Session open. Teach me something, or ask.');
})().catch((error) => say('error', String(error)));

export { highlightsFromDelta };
