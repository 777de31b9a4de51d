/**
 * Scenario editor: form groups mirroring the .mdra sections, with
 * client-side validation mirroring the service's schema rules so a
 * submission that would be rejected never leaves the browser.
 */

import type { ScenarioForm, Severity } from './types.js';
import { SEVERITIES } from './types.js';

export const RANKED_LABELS = [
  'very_low',
  'low',
  'medium',
  'high',
  'very_high',
] as const;

export function emptyForm(): ScenarioForm {
  const criteria = {} as Record<Severity, string>;
  const injuries = {} as Record<Severity, string>;
  for (const s of SEVERITIES) {
    criteria[s] = '';
    injuries[s] = '0';
  }
  return {
    device: { name: '', hazard: '' },
    testing: { enabled: false, hazards: '', demands: '' },
    field: { enabled: false, demands: '', occurrences: '', injuries },
    criteria,
    benefits: {
      enabled: false,
      patient_population: 'medium',
      device_performance: 'medium',
      clinical_outcome: 'medium',
    },
    blendWeight: '1.0',
  };
}

export interface ValidationIssue {
  field: string;
  message: string;
}

function intOrNull(text: string): number | null {
  if (!/^\d+$/.test(text.trim())) return null;
  return Number(text.trim());
}

function floatOrNull(text: string): number | null {
  const v = Number(text.trim());
  return Number.isFinite(v) ? v : null;
}

/** Mirrors the scenario schema rules; an empty list means submittable. */
export function validateForm(form: ScenarioForm): ValidationIssue[] {
  const issues: ValidationIssue[] = [];

  if (!form.device.name.trim()) {
    issues.push({ field: 'device.name', message: 'device name is required' });
  }

  for (const s of SEVERITIES) {
    const v = floatOrNull(form.criteria[s]);
    if (v === null) {
      issues.push({ field: `criteria.${s}`, message: `criterion for ${s} is required` });
    } else if (!(v > 0 && v < 1)) {
      issues.push({
        field: `criteria.${s}`,
        message: `criterion for ${s} must lie in (0, 1)`,
      });
    }
  }

  if (!form.testing.enabled && !form.field.enabled) {
    issues.push({
      field: 'testing',
      message: 'at least one hazard-probability source (testing or field) is needed',
    });
  }

  if (form.testing.enabled) {
    const hazards = intOrNull(form.testing.hazards);
    const demands = intOrNull(form.testing.demands);
    if (demands === null || demands < 1) {
      issues.push({ field: 'testing.demands', message: 'demands must be a count >= 1' });
    }
    if (hazards === null) {
      issues.push({ field: 'testing.hazards', message: 'hazards must be a count' });
    } else if (demands !== null && hazards > demands) {
      issues.push({
        field: 'testing.hazards',
        message: 'hazards observed cannot exceed demands',
      });
    }
  }

  if (form.field.enabled) {
    const demands = intOrNull(form.field.demands);
    const occurrences = intOrNull(form.field.occurrences);
    if (demands === null || demands < 1) {
      issues.push({ field: 'field.demands', message: 'field demands must be a count >= 1' });
    }
    if (occurrences === null) {
      issues.push({ field: 'field.occurrences', message: 'occurrences must be a count' });
    } else {
      if (demands !== null && occurrences > demands) {
        issues.push({
          field: 'field.occurrences',
          message: 'occurrences cannot exceed demands',
        });
      }
      let total = 0;
      for (const s of SEVERITIES) {
        const count = intOrNull(form.field.injuries[s]);
        if (count === null) {
          issues.push({ field: `field.${s}`, message: `${s} injuries must be a count` });
        } else {
          total += count;
        }
      }
      if (total > occurrences) {
        issues.push({
          field: 'field.injuries',
          message: `injuries (${total}) exceed hazard occurrences (${occurrences})`,
        });
      }
    }
  }

  const weight = floatOrNull(form.blendWeight);
  if (weight === null || weight < 0 || weight > 1) {
    issues.push({ field: 'blend.weight', message: 'blend weight must lie in [0, 1]' });
  } else if (weight < 1 && !form.field.enabled) {
    issues.push({
      field: 'blend.weight',
      message: 'a blend weight below 1 requires field data',
    });
  }

  return issues;
}

/** Serialize the form as scenario text for POST /v1/sessions. */
export function serializeScenario(form: ScenarioForm): string {
  const lines: string[] = [];
  lines.push('[device]');
  lines.push(`name = ${form.device.name}`);
  if (form.device.hazard) lines.push(`hazard = ${form.device.hazard}`);
  lines.push('');

  if (form.testing.enabled) {
    lines.push('[testing]');
    lines.push(`hazards = ${form.testing.hazards}`);
    lines.push(`demands = ${form.testing.demands}`);
    lines.push('');
  }

  if (form.field.enabled) {
    lines.push('[field]');
    lines.push(`demands = ${form.field.demands}`);
    lines.push(`occurrences = ${form.field.occurrences}`);
    for (const s of SEVERITIES) {
      if (form.field.injuries[s] !== '0') {
        lines.push(`${s} = ${form.field.injuries[s]}`);
      }
    }
    lines.push('');
  }

  if (form.blendWeight !== '1.0' && form.blendWeight !== '1') {
    lines.push('[blend]');
    lines.push(`weight = ${form.blendWeight}`);
    lines.push('');
  }

  lines.push('[criteria]');
  for (const s of SEVERITIES) {
    lines.push(`${s} = ${form.criteria[s]}`);
  }
  lines.push('');

  if (form.benefits.enabled) {
    lines.push('[benefits]');
    lines.push(`patient_population = ${form.benefits.patient_population}`);
    lines.push(`device_performance = ${form.benefits.device_performance}`);
    lines.push(`clinical_outcome = ${form.benefits.clinical_outcome}`);
    lines.push('');
  }

  return lines.join('\n');
}

/** Inline issue list; a non-empty list blocks submission. */
export function issuesView(issues: ValidationIssue[]): string {
  if (issues.length === 0) return '<ul class="issues empty"></ul>';
  const items = issues
    .map(
      (issue) =>
        `<li class="issue" data-field="${issue.field}">${issue.message}</li>`,
    )
    .join('');
  return `<ul class="issues blocking">${items}</ul>`;
}
