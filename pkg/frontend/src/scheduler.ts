// Debounced single-flight dispatch for solve requests.
//
// Every edit calls request(); after the quiet period one solve runs. A
// newer edit aborts the in-flight stream subscription, so at most one
// solve is active per session at any time.

export type Runner = (signal: AbortSignal) => Promise<void>;

export class SolveScheduler {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private running: Promise<void> = Promise.resolve();

  constructor(private runner: Runner, private delayMs = 150) {}

  request(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.dispatch();
    }, this.delayMs);
  }

  /** Skip the quiet period and dispatch now (manual mode trigger). */
  flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.dispatch();
    return this.running;
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.controller !== null) this.controller.abort();
  }

  /** Settles when the currently dispatched solve finishes. */
  get inFlight(): Promise<void> {
    return this.running;
  }

  private dispatch(): void {
    if (this.controller !== null) this.controller.abort();
    const controller = new AbortController();
    this.controller = controller;
    this.running = this.runner(controller.signal).catch((err) => {
      // an aborted fetch is a cancelled subscription, not a failure
      if (!controller.signal.aborted) throw err;
    });
  }
}
