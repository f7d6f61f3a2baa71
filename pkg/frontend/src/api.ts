// HTTP client for the solve service.

import { readEventStream } from "./sse.js";
import { SessionState } from "./state.js";
import { SolveResponse, StreamRecord } from "./types.js";

export function solveBody(state: SessionState): Record<string, unknown> {
  return {
    width: state.width,
    height: state.height,
    iters: state.settings.iters,
    precision: state.settings.precision,
    strategy: state.settings.strategy,
    record_every: state.settings.recordEvery,
    spots: state.spots,
    spot_radius: state.spotRadius,
  };
}

export function streamParams(state: SessionState): URLSearchParams {
  return new URLSearchParams({
    width: String(state.width),
    height: String(state.height),
    iters: String(state.settings.iters),
    precision: state.settings.precision,
    strategy: state.settings.strategy,
    record_every: String(state.settings.recordEvery),
    spots: JSON.stringify(state.spots),
    spot_radius: String(state.spotRadius),
  });
}

export async function solveOnce(baseUrl: string, state: SessionState,
                                signal?: AbortSignal): Promise<SolveResponse> {
  const resp = await fetch(`${baseUrl}/api/solve`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(solveBody(state)),
    signal,
  });
  if (!resp.ok) {
    throw new Error(`solve failed: ${resp.status} ${await resp.text()}`);
  }
  return (await resp.json()) as SolveResponse;
}

export interface StreamHandlers {
  onRecord: (record: StreamRecord) => void;
  onResult: (response: SolveResponse) => void;
  onError?: (detail: string) => void;
}

/** Subscribe to a streamed solve; resolves when the stream closes. */
export async function solveStream(baseUrl: string, state: SessionState,
                                  handlers: StreamHandlers,
                                  signal?: AbortSignal): Promise<void> {
  const url = `${baseUrl}/api/solve/stream?${streamParams(state)}`;
  const resp = await fetch(url, { signal });
  if (!resp.ok || resp.body === null) {
    throw new Error(`stream failed: ${resp.status} ${await resp.text()}`);
  }
  await readEventStream(resp.body, (event) => {
    if (event.event === "record") {
      handlers.onRecord(JSON.parse(event.data) as StreamRecord);
    } else if (event.event === "result") {
      handlers.onResult(JSON.parse(event.data) as SolveResponse);
    } else if (event.event === "error") {
      const detail = (JSON.parse(event.data) as { detail: string }).detail;
      if (handlers.onError) handlers.onError(detail);
      else throw new Error(`stream error: ${detail}`);
    }
  });
}
