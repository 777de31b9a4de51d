/**
 * Console controller: one session per tab, no optimistic UI — every edit
 * waits for the recomputed service report. Edits debounce into PATCH
 * overrides and the full override log is kept so a displayed report can
 * be reproduced through the CLI.
 */

import { Client } from './api.js';
import { dashboard } from './dashboard.js';
import { serializeScenario, validateForm } from './editor.js';
import type { ScenarioForm } from './types.js';
import type { OverrideStep, RawReport } from './types.js';
import { reworkToggleSteps, whatifPanel, type WhatIfDelta } from './whatif.js';

const DEBOUNCE_MS = 250;

export class Console {
  private sessionId: string | null = null;
  private scenarioText: string | null = null;
  private baseline: RawReport | null = null;
  private current: RawReport | null = null;
  private delta: WhatIfDelta | null = null;
  readonly overrideLog: OverrideStep[] = [];
  private pending: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly client: Client,
    private readonly render: (html: string) => void = () => {},
  ) {}

  get report(): RawReport | null {
    return this.current;
  }

  /** Validate and submit the scenario form; returns blocking issues. */
  async submitScenario(form: ScenarioForm) {
    const issues = validateForm(form);
    if (issues.length > 0) {
      return issues;
    }
    return this.openScenarioText(serializeScenario(form));
  }

  async openScenarioText(text: string) {
    this.scenarioText = text;
    this.sessionId = await this.client.createSession(text);
    this.baseline = await this.client.getReport(this.sessionId);
    this.current = this.baseline;
    this.delta = null;
    this.overrideLog.length = 0;
    this.render(dashboard(this.current));
    return [];
  }

  /** Queue an override; edits within the window collapse into one flush. */
  queueOverride(step: OverrideStep): Promise<void> {
    return new Promise((resolve, reject) => {
      if (this.pending !== null) clearTimeout(this.pending);
      this.pending = setTimeout(() => {
        this.applyOverride(step).then(resolve, reject);
      }, DEBOUNCE_MS);
    });
  }

  async applyOverride(step: OverrideStep): Promise<void> {
    if (this.sessionId === null) throw new Error('no active session');
    await this.client.setOverride(this.sessionId, step.path, step.value);
    this.overrideLog.push(step);
    const fresh = await this.client.getReport(this.sessionId);
    if (this.baseline !== null) {
      this.delta = {
        pre: this.baseline,
        post: fresh,
        steps: [...this.overrideLog],
      };
    }
    this.current = fresh;
    this.render(this.view());
  }

  /** Apply the rework toggle; off reopens the scenario (overrides are
   *  append-only server-side) and clears the delta view. */
  async toggleRework(enabled: boolean, level = 'very_high'): Promise<void> {
    if (!enabled) {
      if (this.scenarioText !== null) {
        await this.openScenarioText(this.scenarioText);
      }
      return;
    }
    for (const step of reworkToggleSteps(true, level)) {
      await this.applyOverride(step);
    }
  }

  view(): string {
    if (this.current === null) return '<section class="empty"></section>';
    if (this.delta !== null) return whatifPanel(this.delta);
    return dashboard(this.current);
  }
}
