/** Frame inspector: the three-column Input / Rules / Output view. */

import type { FrameTable } from './types.js';

export interface FrameTableModel {
  title: string;
  inputs: string[];
  rules: string[];
  outputs: string[];
  externals: string[];
}

function columnLines(columns: FrameTable['inputs']): string[] {
  return columns.map((column) => {
    if (column.values.length > 0) {
      return `${column.feature}: ${column.values.join(', ')}`;
    }
    return column.unit ? `${column.feature} (${column.unit})` : column.feature;
  });
}

export function frameTableModel(table: FrameTable): FrameTableModel {
  return {
    title: `${table.name}: ${table.source} to "${table.target}" (frame)`,
    inputs: columnLines(table.inputs),
    rules: [...table.rules],
    outputs: columnLines(table.outputs),
    externals: columnLines(table.externals),
  };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function cell(lines: string[]): string {
  return lines.map((line) => `<div>${escapeHtml(line)}</div>`).join('');
}

export function frameTableHtml(table: FrameTable): string {
  const model = frameTableModel(table);
  const externalsRow = model.externals.length
    ? `<tr><td colspan="3" class="externals">External: ${escapeHtml(model.externals.join('; '))}</td></tr>`
    : '';
  return [
    `<table class="frame-table">`,
    `<caption>${escapeHtml(model.title)}</caption>`,
    `<thead><tr><th>Input</th><th>Rules</th><th>Output</th></tr></thead>`,
    `<tbody><tr>`,
    `<td>${cell(model.inputs)}</td>`,
    `<td>${cell(model.rules)}</td>`,
    `<td>${cell(model.outputs)}</td>`,
    `</tr>${externalsRow}</tbody>`,
    `</table>`,
  ].join('');
}
