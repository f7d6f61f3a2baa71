// Studio wiring: spot editing on the target canvas, debounced streamed
// solves, live curve updates, pane refresh.

import { solveStream } from "./api.js";
import { Panes, renderViews } from "./render.js";
import { SolveScheduler } from "./scheduler.js";
import {
  SessionState, SpotEdit, appendRecord, applyResult, clearCurves,
  createSession, editSpots, spotAt,
} from "./state.js";
import { SolverSettings, Spot } from "./types.js";

export interface Studio {
  readonly state: SessionState;
  edit(edit: SpotEdit): void;
  configure(settings: Partial<SolverSettings>): void;
  solveNow(): Promise<void>;
  cancel(): void;
  panes: Panes;
}

export function createStudio(panes: Panes, baseUrl: string,
                             width = 256, height = 256,
                             debounceMs = 150): Studio {
  let state = createSession(width, height);

  const scheduler = new SolveScheduler(async (signal) => {
    if (state.spots.length === 0) return;
    state = clearCurves(state);
    await solveStream(baseUrl, state, {
      onRecord: (record) => {
        state = appendRecord(state, record);
        renderViews(panes, state);
      },
      onResult: (response) => {
        state = applyResult(state, response);
        renderViews(panes, state);
      },
      onError: (detail) => console.error(`solve failed: ${detail}`),
    }, signal);
  }, debounceMs);

  const studio: Studio = {
    get state() {
      return state;
    },
    edit(e: SpotEdit) {
      state = editSpots(state, e);
      renderViews(panes, state);
      scheduler.request();
    },
    configure(settings: Partial<SolverSettings>) {
      state = { ...state, settings: { ...state.settings, ...settings } };
      scheduler.request();
    },
    solveNow() {
      return scheduler.flush();
    },
    cancel() {
      scheduler.cancel();
    },
    panes,
  };

  panes.target.addEventListener("mousedown", (ev: MouseEvent) => {
    const rect = panes.target.getBoundingClientRect();
    const scaleX = rect.width > 0 ? state.width / rect.width : 1;
    const scaleY = rect.height > 0 ? state.height / rect.height : 1;
    const pos: Spot = {
      j: Math.round((ev.clientX - rect.left) * scaleX),
      k: Math.round((ev.clientY - rect.top) * scaleY),
    };
    const hit = spotAt(state, pos);
    if (ev.shiftKey && hit >= 0) {
      studio.edit({ action: "delete", index: hit });
    } else if (hit >= 0) {
      studio.edit({ action: "move", index: hit, position: pos });
    } else {
      studio.edit({ action: "add", position: pos });
    }
  });

  renderViews(panes, state);
  return studio;
}

function boot(): void {
  const root = document.getElementById("app");
  if (root === null) return;
  const panes: Panes = {
    target: document.getElementById("target") as HTMLCanvasElement,
    mask: document.getElementById("mask") as HTMLImageElement,
    recon: document.getElementById("recon") as HTMLImageElement,
    curves: document.getElementById("curves") as HTMLCanvasElement,
    badge: document.getElementById("badge") as HTMLElement,
    stats: document.getElementById("stats") as HTMLElement,
  };
  const studio = createStudio(panes, "");

  const iters = document.getElementById("iters") as HTMLInputElement;
  iters.addEventListener("change", () => {
    studio.configure({ iters: Math.max(1, Number(iters.value) || 25) });
  });
  const precision = document.getElementById("precision") as HTMLSelectElement;
  precision.addEventListener("change", () => {
    studio.configure({ precision: precision.value as "single" | "double" });
  });
}

if (typeof document !== "undefined") boot();
