/** Shapes of the /v1 API payloads. */

export const SEVERITIES = [
  'fatal',
  'critical',
  'major',
  'minor',
  'negligible',
] as const;

export type Severity = (typeof SEVERITIES)[number];

export interface SeverityEntry {
  criterion: number;
  median: number;
  acceptability: number;
}

export interface MachineReport {
  severities: Record<Severity, SeverityEntry>;
  orr: { mean: number; median: number };
  controls_required: { fraction: number; flag: boolean };
  benefit_risk: number | null;
  meta: Record<string, unknown>;
}

/** A report plus the exact bytes it arrived as. */
export interface RawReport {
  raw: string;
  report: MachineReport;
}

export interface OverrideResponse {
  pre: { orr: { mean: number; median: number } };
  post: { orr: { mean: number; median: number } };
  report: MachineReport;
}

export interface RawOverrideResponse {
  raw: string;
  body: OverrideResponse;
}

export interface PosteriorBins {
  node: string;
  kind: 'continuous';
  edges: number[];
  masses: number[];
  mean: number;
  median: number;
}

export interface HazardRowPayload {
  name: string;
  acceptability: Record<Severity, number>;
  orr: number;
  benefit_risk: number | null;
}

export interface CombineResponse {
  rows: HazardRowPayload[];
  combined: HazardRowPayload;
}

/** One recorded what-if step; replaying these through the CLI reproduces
 *  the displayed report. */
export interface OverrideStep {
  path: string;
  value: string | number | boolean;
}

/** Scenario form state mirroring the .mdra sections. */
export interface ScenarioForm {
  device: { name: string; hazard: string };
  testing: { enabled: boolean; hazards: string; demands: string };
  field: {
    enabled: boolean;
    demands: string;
    occurrences: string;
    injuries: Record<Severity, string>;
  };
  criteria: Record<Severity, string>;
  benefits: {
    enabled: boolean;
    patient_population: string;
    device_performance: string;
    clinical_outcome: string;
  };
  blendWeight: string;
}
