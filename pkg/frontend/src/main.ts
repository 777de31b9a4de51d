/** Browser bootstrap: wires the console to the DOM. */

import { Client } from './api.js';
import { Console } from './app.js';
import { emptyForm, issuesView, validateForm } from './editor.js';
import { hazardTableView } from './hazards.js';
import type { MachineReport, ScenarioForm, Severity } from './types.js';
import { SEVERITIES } from './types.js';

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function readForm(): ScenarioForm {
  const form = emptyForm();
  form.device.name = (document.getElementById('device-name') as HTMLInputElement).value;
  form.device.hazard = (document.getElementById('device-hazard') as HTMLInputElement).value;
  form.testing.enabled = (document.getElementById('testing-enabled') as HTMLInputElement).checked;
  form.testing.hazards = (document.getElementById('testing-hazards') as HTMLInputElement).value;
  form.testing.demands = (document.getElementById('testing-demands') as HTMLInputElement).value;
  form.field.enabled = (document.getElementById('field-enabled') as HTMLInputElement).checked;
  form.field.demands = (document.getElementById('field-demands') as HTMLInputElement).value;
  form.field.occurrences = (document.getElementById('field-occurrences') as HTMLInputElement).value;
  for (const s of SEVERITIES) {
    form.field.injuries[s] = (document.getElementById(`field-${s}`) as HTMLInputElement).value || '0';
    form.criteria[s] = (document.getElementById(`criteria-${s}`) as HTMLInputElement).value;
  }
  form.benefits.enabled = (document.getElementById('benefits-enabled') as HTMLInputElement).checked;
  for (const key of ['patient_population', 'device_performance', 'clinical_outcome'] as const) {
    form.benefits[key] = (document.getElementById(`benefits-${key}`) as HTMLSelectElement).value;
  }
  form.blendWeight = (document.getElementById('blend-weight') as HTMLInputElement).value || '1.0';
  return form;
}

async function boot(): Promise<void> {
  const client = new Client('');
  const view = $('view');
  const issues = $('issues');
  const consoleApp = new Console(client, (html) => {
    view.innerHTML = html;
  });

  // live validation on every edit
  document.querySelectorAll('#scenario-form input, #scenario-form select').forEach((el) => {
    el.addEventListener('input', () => {
      issues.innerHTML = issuesView(validateForm(readForm()));
    });
  });

  $('submit-scenario').addEventListener('click', async () => {
    const blocking = await consoleApp.submitScenario(readForm());
    issues.innerHTML = issuesView(blocking);
  });

  $('open-file').addEventListener('click', async () => {
    const text = (document.getElementById('scenario-text') as HTMLTextAreaElement).value;
    if (text.trim()) {
      await consoleApp.openScenarioText(text);
    }
  });

  $('rework-toggle').addEventListener('change', async (event) => {
    const enabled = (event.target as HTMLInputElement).checked;
    await consoleApp.toggleRework(enabled);
  });

  const hazardReports: { name: string; report: MachineReport }[] = [];
  $('add-hazard').addEventListener('click', async () => {
    const report = consoleApp.report;
    if (report === null) return;
    hazardReports.push({
      name: `Hazard ${hazardReports.length + 1}`,
      report: report.report,
    });
    const combined = await client.combine(hazardReports);
    $('hazard-table').innerHTML = hazardTableView(combined.body);
  });

  $('remove-hazard').addEventListener('click', async () => {
    hazardReports.pop();
    if (hazardReports.length === 0) {
      $('hazard-table').innerHTML = '';
      return;
    }
    const combined = await client.combine(hazardReports);
    $('hazard-table').innerHTML = hazardTableView(combined.body);
  });
}

document.addEventListener('DOMContentLoaded', () => {
  void boot();
});
