/** Wire types for the analysis API payloads the UI renders. */

export interface DatasetInfo {
  id: string;
  name: string;
  source: string;
  n_instances: number;
  n_algorithms: number;
  uploaded_at: number;
}

export interface UploadResult {
  id: string;
  name: string;
  n_instances: number;
  n_algorithms: number;
}

export interface TransformOptions {
  scale: boolean;
  invert: boolean;
  scale_by: 'column' | 'global';
}

export interface ComputeResult {
  dataset_id: string;
  cache_key: string;
  cache_hit: boolean;
  fit_created_at: number;
  converged: boolean;
  epsilon: number;
}

export interface AlgorithmAttributeEntry {
  anomalous: boolean;
  consistency: number;
  difficulty_limit: number;
}

export interface OccupancyRow {
  algorithm: string;
  strength_proportion: number;
  weakness_proportion: number;
}

export interface AnalysisPayload {
  fit_created_at: number;
  cache_key: string;
  epsilon: number;
  dataset: {
    name: string;
    algorithms: string[];
    instance_ids: string[];
    n_instances: number;
    n_algorithms: number;
  };
  performance: { values: number[][] };
  parameters: {
    algorithms: Record<string, { mu: number; lambda: number; psi: number; a: number; alpha: number; b: number }>;
    converged: boolean;
    iterations: number;
    loglik: number;
  };
  attributes: Record<string, AlgorithmAttributeEntry>;
  traits: { theta: number[]; theta_sd: number[]; difficulty: number[] };
  spectrum: { span: [number, number]; grid: number[] };
  splines: { df: number; fitted: Record<string, number[]>; se: Record<string, number[]> };
  partition: {
    epsilon: number;
    good: Record<string, boolean[]>;
    bad: Record<string, boolean[]>;
    strength_proportion: Record<string, number>;
    weakness_proportion: Record<string, number>;
  };
  occupancy: OccupancyRow[];
  goodness: {
    tolerances: number[];
    curves: Record<string, number[]>;
    auc: Record<string, number>;
  };
  effectiveness: {
    tolerances: number[];
    actual: Record<string, number[]>;
    predicted: Record<string, number[]>;
    auc_actual: Record<string, number>;
    auc_predicted: Record<string, number>;
  };
  heatmaps: {
    theta_grid: number[];
    algorithms: Record<string, { z_grid: number[]; density: number[][] }>;
  };
}

export interface ApiErrorDetail {
  code: string;
  message: string;
}
