import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { SolveScheduler } from "../src/scheduler.js";

describe("SolveScheduler", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("coalesces a burst of edits into one dispatch", async () => {
    const runner = vi.fn(async () => {});
    const s = new SolveScheduler(runner, 100);
    s.request();
    s.request();
    s.request();
    await vi.advanceTimersByTimeAsync(150);
    expect(runner).toHaveBeenCalledTimes(1);
  });

  it("a new dispatch aborts the in-flight one", async () => {
    const signals: AbortSignal[] = [];
    const runner = vi.fn(async (signal: AbortSignal) => {
      signals.push(signal);
      await new Promise<void>((resolve) => {
        signal.addEventListener("abort", () => resolve());
        setTimeout(resolve, 10_000);
      });
    });
    const s = new SolveScheduler(runner, 10);
    s.request();
    await vi.advanceTimersByTimeAsync(20);
    s.request();
    await vi.advanceTimersByTimeAsync(20);
    expect(runner).toHaveBeenCalledTimes(2);
    expect(signals[0].aborted).toBe(true);
    expect(signals[1].aborted).toBe(false);
  });

  it("abort of the active run is not surfaced as an error", async () => {
    const runner = vi.fn(async (signal: AbortSignal) => {
      await new Promise<void>((_, reject) => {
        signal.addEventListener("abort", () =>
          reject(new DOMException("aborted", "AbortError")));
      });
    });
    const s = new SolveScheduler(runner, 10);
    s.request();
    await vi.advanceTimersByTimeAsync(20);
    s.cancel();
    await expect(s.inFlight).resolves.toBeUndefined();
  });

  it("flush dispatches immediately", async () => {
    const runner = vi.fn(async () => {});
    const s = new SolveScheduler(runner, 10_000);
    s.request();
    const done = s.flush();
    expect(runner).toHaveBeenCalledTimes(1);
    await done;
  });

  it("cancel drops a pending dispatch", async () => {
    const runner = vi.fn(async () => {});
    const s = new SolveScheduler(runner, 100);
    s.request();
    s.cancel();
    await vi.advanceTimersByTimeAsync(500);
    expect(runner).not.toHaveBeenCalled();
  });
});
