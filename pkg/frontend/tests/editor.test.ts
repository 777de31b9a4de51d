/** Client-side validation mirrors the service schema rules. */

import { describe, expect, it } from 'vitest';

import { emptyForm, issuesView, serializeScenario, validateForm } from '../src/editor.js';
import { SEVERITIES } from '../src/types.js';

function validForm() {
  const form = emptyForm();
  form.device.name = 'Defibrillator';
  form.testing.enabled = true;
  form.testing.hazards = '5';
  form.testing.demands = '1000';
  const criteria = ['6.2e-5', '9.9e-5', '2.5e-4', '7.6e-3', '1.0e-2'];
  SEVERITIES.forEach((s, i) => {
    form.criteria[s] = criteria[i]!;
  });
  return form;
}

describe('scenario form validation', () => {
  it('accepts the table-2 style scenario', () => {
    expect(validateForm(validForm())).toEqual([]);
  });

  it('blocks submission when criteria are cleared', () => {
    const form = validForm();
    form.criteria.fatal = '';
    const issues = validateForm(form);
    expect(issues.some((i) => i.field === 'criteria.fatal')).toBe(true);
    expect(issuesView(issues)).toContain('blocking');
  });

  it('rejects injuries above occurrences inline', () => {
    const form = validForm();
    form.field.enabled = true;
    form.field.demands = '3310';
    form.field.occurrences = '15';
    form.field.injuries.fatal = '16';
    const issues = validateForm(form);
    expect(issues.some((i) => i.field === 'field.injuries')).toBe(true);
  });

  it('requires field data for a partial blend weight', () => {
    const form = validForm();
    form.blendWeight = '0.6';
    const issues = validateForm(form);
    expect(issues.some((i) => i.field === 'blend.weight')).toBe(true);
  });

  it('requires at least one hazard-probability source', () => {
    const form = validForm();
    form.testing.enabled = false;
    const issues = validateForm(form);
    expect(issues.some((i) => i.field === 'testing')).toBe(true);
  });

  it('serializes to scenario text the service can parse', () => {
    const form = validForm();
    form.field.enabled = true;
    form.field.demands = '3310';
    form.field.occurrences = '15';
    form.field.injuries.fatal = '3';
    form.field.injuries.major = '10';
    form.field.injuries.negligible = '2';
    form.benefits.enabled = true;
    form.benefits.patient_population = 'very_high';
    form.benefits.device_performance = 'high';
    form.benefits.clinical_outcome = 'very_high';
    const text = serializeScenario(form);
    expect(text).toContain('[device]');
    expect(text).toContain('name = Defibrillator');
    expect(text).toContain('[testing]');
    expect(text).toContain('hazards = 5');
    expect(text).toContain('[field]');
    expect(text).toContain('fatal = 3');
    expect(text).toContain('[criteria]');
    expect(text).toContain('fatal = 6.2e-5');
    expect(text).toContain('[benefits]');
    expect(text).not.toContain('[blend]');
  });
});
