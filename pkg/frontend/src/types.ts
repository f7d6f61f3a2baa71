// Wire types matching the solve service JSON payloads.

export interface Spot {
  j: number;
  k: number;
}

export interface SolveMetrics {
  gap: number;
  err_lit: number;
  err_dark: number;
  contrast: number | "unbounded" | null;
}

export interface SolveTiming {
  ingest_ms: number;
  per_iter_ms: number;
  total_ms: number;
}

export interface SolveResponse {
  mask_png_b64: string;
  recon_log_png_b64: string;
  metrics: SolveMetrics;
  timing: SolveTiming;
  iters_run: number;
  aborted: boolean;
  budget_ms: number;
  budget_met: boolean;
}

export interface StreamRecord {
  iter: number;
  gap: number;
  err_lit: number;
  err_dark: number;
  time_fft_ms: number;
  time_constraint_ms: number;
  time_total_ms: number;
}

export interface SolverSettings {
  iters: number;
  precision: "single" | "double";
  strategy: string;
  recordEvery: number;
}
