// Session state and the pure update functions behind the studio.
//
// The UI never computes optics math: masks and reconstructions are bytes
// from the service, and this module only tracks spots, settings and the
// curve buffers fed by the event stream.

import { SolveResponse, SolverSettings, Spot, StreamRecord } from "./types.js";

export interface CurvePoint {
  iter: number;
  gap: number;
  errSum: number;
}

export interface SessionState {
  width: number;
  height: number;
  spots: Spot[];
  spotRadius: number;
  settings: SolverSettings;
  curves: CurvePoint[];
  lastResponse: SolveResponse | null;
  latencyHistory: number[];
}

export type SpotEdit =
  | { action: "add"; position: Spot }
  | { action: "move"; index: number; position: Spot }
  | { action: "delete"; index: number };

const LATENCY_HISTORY_LIMIT = 50;

export function createSession(width: number, height: number,
                              settings?: Partial<SolverSettings>): SessionState {
  if (!Number.isInteger(width) || !Number.isInteger(height) ||
      width < 1 || height < 1) {
    throw new RangeError(`bad grid size ${width}x${height}`);
  }
  return {
    width,
    height,
    spots: [],
    spotRadius: 1,
    settings: {
      iters: 25,
      precision: "double",
      strategy: "serial",
      recordEvery: 1,
      ...settings,
    },
    curves: [],
    lastResponse: null,
    latencyHistory: [],
  };
}

export function clampToGrid(state: SessionState, position: Spot): Spot {
  const clamp = (v: number, hi: number) =>
    Math.min(hi - 1, Math.max(0, Math.round(v)));
  return { j: clamp(position.j, state.width), k: clamp(position.k, state.height) };
}

export function editSpots(state: SessionState, edit: SpotEdit): SessionState {
  const spots = state.spots.slice();
  switch (edit.action) {
    case "add":
      spots.push(clampToGrid(state, edit.position));
      break;
    case "move":
      if (edit.index < 0 || edit.index >= spots.length) {
        throw new RangeError(`no spot at index ${edit.index}`);
      }
      spots[edit.index] = clampToGrid(state, edit.position);
      break;
    case "delete":
      if (edit.index < 0 || edit.index >= spots.length) {
        throw new RangeError(`no spot at index ${edit.index}`);
      }
      spots.splice(edit.index, 1);
      break;
  }
  return { ...state, spots };
}

/** Find the spot within pickRadius of a grid position, or -1. */
export function spotAt(state: SessionState, position: Spot,
                       pickRadius = 4): number {
  for (let i = state.spots.length - 1; i >= 0; i--) {
    const s = state.spots[i];
    const d2 = (s.j - position.j) ** 2 + (s.k - position.k) ** 2;
    if (d2 <= pickRadius * pickRadius) return i;
  }
  return -1;
}

/**
 * Append one streamed convergence record to the curve buffers.
 *
 * Records must arrive in increasing iteration order; a duplicate or
 * out-of-order iteration index is discarded with a console warning so a
 * glitchy stream cannot corrupt the plot.
 */
export function appendRecord(state: SessionState,
                             record: StreamRecord): SessionState {
  const last = state.curves.length > 0
    ? state.curves[state.curves.length - 1].iter : 0;
  if (record.iter <= last) {
    console.warn(`discarding out-of-order record iter=${record.iter} ` +
                 `(last=${last})`);
    return state;
  }
  const point: CurvePoint = {
    iter: record.iter,
    gap: record.gap,
    errSum: record.err_lit + record.err_dark,
  };
  return { ...state, curves: [...state.curves, point] };
}

export function clearCurves(state: SessionState): SessionState {
  return { ...state, curves: [] };
}

export function applyResult(state: SessionState,
                            response: SolveResponse): SessionState {
  const latencyHistory =
    [...state.latencyHistory, response.timing.total_ms]
      .slice(-LATENCY_HISTORY_LIMIT);
  return { ...state, lastResponse: response, latencyHistory };
}
