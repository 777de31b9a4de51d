/**
 * What-if panel: rework and benefits toggles that PATCH overrides and
 * show the pre/post reports side by side, highlighting changed fields.
 */

import { dashboard } from './dashboard.js';
import { rawAt } from './rawjson.js';
import type { OverrideStep, RawReport } from './types.js';
import { SEVERITIES } from './types.js';

export interface WhatIfDelta {
  pre: RawReport;
  post: RawReport;
  steps: OverrideStep[];
}

const COMPARED_PATHS = [
  ...SEVERITIES.flatMap((s) => [
    `severities.${s}.median`,
    `severities.${s}.acceptability`,
  ]),
  'orr.mean',
  'orr.median',
  'controls_required.fraction',
  'benefit_risk',
];

/** Dotted paths whose raw lexemes differ between pre and post. */
export function changedPaths(delta: WhatIfDelta): string[] {
  return COMPARED_PATHS.filter(
    (path) => rawAt(delta.pre.raw, path) !== rawAt(delta.post.raw, path),
  );
}

export function whatifPanel(delta: WhatIfDelta | null): string {
  if (delta === null) {
    return `<section class="whatif empty">No what-if active</section>`;
  }
  const changed = changedPaths(delta);
  const steps = delta.steps
    .map(
      (s) =>
        `<li class="override-step" data-path="${s.path}" data-value="${String(
          s.value,
        )}">${s.path} = ${String(s.value)}</li>`,
    )
    .join('');
  return `
<section class="whatif">
  <ul class="override-log">${steps}</ul>
  <div class="columns">
    <div class="pre-column">
      <h3>Before</h3>
      ${dashboard(delta.pre)}
    </div>
    <div class="post-column">
      <h3>After</h3>
      ${dashboard(delta.post)}
    </div>
  </div>
  <div class="changed" data-changed="${changed.join(' ')}"></div>
</section>`;
}

/** The override steps a rework toggle produces (one control, one path
 *  each; quality implies effort until set separately). */
export function reworkToggleSteps(enabled: boolean, level = 'very_high'): OverrideStep[] {
  if (!enabled) return [];
  return [
    { path: 'rework.quality', value: level },
    { path: 'rework.effort', value: level },
  ];
}

export function benefitStep(panel: string, level: string): OverrideStep {
  return { path: `benefits.${panel}`, value: level };
}
