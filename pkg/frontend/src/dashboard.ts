/**
 * Dashboard view: per-severity acceptability bars with criterion
 * markers, the ORR gauge, the controls-required banner (10% rule), the
 * benefit-risk panel and a posterior density chart for a selected node.
 *
 * Every displayed number is the raw lexeme from the service response —
 * the client never recomputes or reformats report values, it only adds
 * presentational percent renderings next to them.
 */

import { barWidth, escapeHtml, logPosition, pctInt } from './format.js';
import { rawAt } from './rawjson.js';
import type { PosteriorBins, RawReport, Severity } from './types.js';
import { SEVERITIES } from './types.js';

export function severityRow(raw: string, severity: Severity): string {
  const acceptability = rawAt(raw, `severities.${severity}.acceptability`);
  const median = rawAt(raw, `severities.${severity}.median`);
  const criterion = rawAt(raw, `severities.${severity}.criterion`);
  const fraction = Number(acceptability);
  const flagged = Number(median) > Number(criterion);
  return `
  <div class="severity-row${flagged ? ' flagged' : ''}" data-severity="${severity}">
    <span class="severity-name">${severity}</span>
    <div class="bar-track">
      <div class="bar" style="width: ${barWidth(fraction)}"></div>
      <div class="criterion-marker" style="left: ${logPosition(Number(criterion))}"
           title="criterion ${escapeHtml(criterion)}"></div>
    </div>
    <span class="pct">${pctInt(fraction)}</span>
    <code class="raw" data-path="severities.${severity}.acceptability">${escapeHtml(acceptability)}</code>
    <span class="median-label">median</span>
    <code class="raw" data-path="severities.${severity}.median">${escapeHtml(median)}</code>
    <code class="raw" data-path="severities.${severity}.criterion">${escapeHtml(criterion)}</code>
    <span class="verdict">${flagged ? 'Not Acceptable' : 'Acceptable'}</span>
  </div>`;
}

export function orrGauge(raw: string): string {
  const mean = rawAt(raw, 'orr.mean');
  const median = rawAt(raw, 'orr.median');
  return `
  <div class="orr-gauge">
    <div class="gauge-track"><div class="gauge-fill" style="width: ${barWidth(Number(mean))}"></div></div>
    <span class="gauge-label">Overall Residual Risk (ORR) Acceptability</span>
    <span class="pct">${pctInt(Number(mean))}</span>
    <code class="raw" data-path="orr.mean">${escapeHtml(mean)}</code>
    <code class="raw" data-path="orr.median">${escapeHtml(median)}</code>
  </div>`;
}

export function controlsBanner(raw: string): string {
  const fraction = rawAt(raw, 'controls_required.fraction');
  const flag = rawAt(raw, 'controls_required.flag');
  if (flag !== 'true') {
    return `<div class="controls-banner hidden" data-flag="false"></div>`;
  }
  return `
  <div class="controls-banner shown" data-flag="true" role="alert">
    Additional risk controls required (criteria 10%):
    <span class="pct">${pctInt(Number(fraction))}</span>
    <code class="raw" data-path="controls_required.fraction">${escapeHtml(fraction)}</code>
  </div>`;
}

export function benefitRiskPanel(raw: string): string {
  const value = rawAt(raw, 'benefit_risk');
  if (value === 'null') {
    return `<div class="benefit-panel empty">No benefits information</div>`;
  }
  return `
  <div class="benefit-panel">
    <span class="label">Benefit-Risk Analysis: ORR Acceptability</span>
    <span class="pct">${pctInt(Number(value))}</span>
    <code class="raw" data-path="benefit_risk">${escapeHtml(value)}</code>
  </div>`;
}

/** Density chart: service-provided bins rendered as-is, no smoothing. */
export function densityChart(posterior: PosteriorBins): string {
  const peak = Math.max(...posterior.masses, 1e-300);
  const bars = posterior.masses
    .map((mass, i) => {
      const height = ((100 * mass) / peak).toFixed(2);
      return `<div class="density-bin" data-bin="${i}" data-mass="${mass}" style="height: ${height}%"></div>`;
    })
    .join('');
  return `
  <div class="density-chart" data-node="${escapeHtml(posterior.node)}"
       data-mean="${posterior.mean}" data-median="${posterior.median}">
    ${bars}
  </div>`;
}

export function dashboard(report: RawReport, posterior?: PosteriorBins): string {
  const raw = report.raw;
  const rows = SEVERITIES.map((s) => severityRow(raw, s)).join('\n');
  return `
<section class="dashboard">
  <div class="severity-bars">${rows}</div>
  ${orrGauge(raw)}
  ${controlsBanner(raw)}
  ${benefitRiskPanel(raw)}
  ${posterior ? densityChart(posterior) : ''}
</section>`;
}
