/**
 * Multi-hazard table: per-hazard acceptability rows plus the combined
 * row computed by POST /v1/combine. Cells follow the published table
 * convention (integer percent, round half up; the combined benefit-risk
 * cell keeps one decimal when the column mean is not integral).
 */

import { escapeHtml, pctBr, pctInt } from './format.js';
import type { CombineResponse, HazardRowPayload } from './types.js';
import { SEVERITIES } from './types.js';

function cells(row: HazardRowPayload, combined: boolean): string {
  const severityCells = SEVERITIES.map(
    (s) => `<td data-col="${s}">${pctInt(row.acceptability[s])}</td>`,
  ).join('');
  const br =
    row.benefit_risk === null
      ? '-'
      : combined
        ? pctBr(row.benefit_risk)
        : pctInt(row.benefit_risk);
  return `
    <td class="hazard-name">${escapeHtml(row.name)}</td>
    ${severityCells}
    <td data-col="orr">${pctInt(row.orr)}</td>
    <td data-col="benefit_risk">${br}</td>`;
}

export function hazardTableView(response: CombineResponse): string {
  const header = SEVERITIES.map((s) => `<th>${s}</th>`).join('');
  const rows = response.rows
    .map((row) => `<tr class="hazard-row">${cells(row, false)}</tr>`)
    .join('\n');
  return `
<table class="hazard-table">
  <thead>
    <tr>
      <th>Risk Class</th>${header}
      <th>Overall residual risk</th>
      <th>Overall residual risk given benefits</th>
    </tr>
  </thead>
  <tbody>
    ${rows}
    <tr class="combined-row">${cells(response.combined, true)}</tr>
  </tbody>
</table>`;
}
