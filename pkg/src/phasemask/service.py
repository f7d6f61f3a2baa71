"""Local HTTP service for interactive mask synthesis.

Endpoints:
  POST /api/solve          full solve, JSON response with base64 PNG payloads
  GET  /api/solve/stream   server-sent events: one per recorded iteration,
                           then a final event carrying the full response
  GET  /api/health         liveness + plan-cache stats

FFT providers are cached per (size, precision, workers) so repeat solves at
one size skip planning. The 10 ms latency budget is reported, not enforced;
an optional deadline_ms request field enables a cooperative hard abort.
"""

from __future__ import annotations

import base64
import io
import json
import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from PIL import Image
from pydantic import BaseModel, Field as PydField

from . import __version__
from .backends import BackendSelector
from .grid import GridSpec, Precision, RealGrid
from .metrics import contrast_ratio, reconstructed_intensity
from .patterns import (LOG_FLOOR, SpotSpec, load_target, modulus_from_intensity,
                       spot_pattern, to_centered_order, to_fourier_order)
from .projections import FourierConstraint, SlmConstraint
from .solver import SolveConfig, default_amplitude, solve
from .transform import FftProvider

MAX_PIXELS = 4096 * 4096
DEFAULT_BUDGET_MS = 10.0


class SpotModel(BaseModel):
    j: int
    k: int


class SolveRequest(BaseModel):
    width: int = PydField(ge=1)
    height: int = PydField(ge=1)
    iters: int = PydField(default=25, ge=1)
    precision: str = "double"
    strategy: str = "serial"
    record_every: int = PydField(default=1, ge=1)
    seed: int = 0
    spots: list[SpotModel] | None = None
    spot_radius: int = PydField(default=1, ge=1)
    target_png_b64: str | None = None
    deadline_ms: float | None = None


@dataclass
class PlanCache:
    providers: dict = field(default_factory=dict)
    hits: int = 0
    misses: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def get(self, spec: GridSpec, precision: Precision, workers: int) -> FftProvider:
        key = (spec.n_x, spec.n_y, precision.tag, workers)
        with self.lock:
            provider = self.providers.get(key)
            if provider is not None:
                self.hits += 1
                return provider
            self.misses += 1
            provider = FftProvider(spec, precision, workers)
            self.providers[key] = provider
            return provider


def _png_b64(array_u8: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(array_u8, mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _log_scale_u8(intensity: np.ndarray) -> np.ndarray:
    peak = intensity.max()
    data = intensity / peak if peak > 0 else np.zeros_like(intensity)
    data = (np.log10(np.maximum(data, LOG_FLOOR)) - math.log10(LOG_FLOOR)) / (-math.log10(LOG_FLOOR))
    return np.round(data * 255.0).astype(np.uint8)


def _ingest(req: SolveRequest):
    """Build the constraint pair from the request; raises HTTPException."""
    if req.width * req.height > MAX_PIXELS:
        raise HTTPException(status_code=413, detail="grid exceeds 4096x4096")
    spec = GridSpec(n_x=req.width, n_y=req.height)
    try:
        precision = Precision.from_tag(req.precision)
        sel = BackendSelector.parse(req.strategy)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))

    if req.target_png_b64 is not None:
        try:
            intensity = load_target(io.BytesIO(base64.b64decode(req.target_png_b64)))
        except Exception as exc:
            raise HTTPException(status_code=400, detail=f"bad target image: {exc}")
        if intensity.spec != spec:
            raise HTTPException(status_code=400,
                                detail="target image size does not match grid size")
    elif req.spots:
        for s in req.spots:
            if not (0 <= s.j < spec.n_x and 0 <= s.k < spec.n_y):
                raise HTTPException(status_code=400,
                                    detail=f"spot ({s.j}, {s.k}) out of bounds")
        try:
            intensity = spot_pattern(SpotSpec(
                spec, tuple((s.j, s.k) for s in req.spots), radius=req.spot_radius))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
    else:
        raise HTTPException(status_code=400, detail="request has neither spots nor target image")

    if intensity.data.max() == 0:
        raise HTTPException(status_code=422, detail="target is all dark")

    target = modulus_from_intensity(to_fourier_order(intensity))
    m = FourierConstraint(target, precision)
    c = SlmConstraint(default_amplitude(m.m, precision), precision)
    cfg = SolveConfig(max_iters=req.iters, precision=precision,
                      record_every=req.record_every, backend=sel, seed=req.seed)
    return spec, c, m, cfg, sel


def create_app(budget_ms: float = DEFAULT_BUDGET_MS,
               frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="phasemask service", version=__version__)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    cache = PlanCache()
    active_streams = {"count": 0}
    solves_done = {"count": 0}

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def run_solve(req: SolveRequest, on_record=None, should_abort=None):
        t0 = time.perf_counter()
        spec, c, m, cfg, sel = _ingest(req)
        provider = cache.get(spec, cfg.precision, sel.fft_workers)
        ingest_ms = (time.perf_counter() - t0) * 1e3

        deadline_abort = None
        if req.deadline_ms is not None:
            t_deadline = t0 + req.deadline_ms / 1e3

            def deadline_abort():
                return time.perf_counter() > t_deadline

        def abort():
            if should_abort is not None and should_abort():
                return True
            return deadline_abort() if deadline_abort is not None else False

        result = solve(c, m, cfg, provider, on_record=on_record, should_abort=abort)
        total_ms = (time.perf_counter() - t0) * 1e3

        target_energy = float((m.m.data.astype(np.float64) ** 2).sum())
        recon = reconstructed_intensity(result.u_star, provider, target_energy)
        target_intensity = RealGrid(spec, m.m.data.astype(np.float64) ** 2)
        lit = target_intensity.data > 0
        contrast = None
        if lit.any() and not lit.all():
            value = contrast_ratio(recon, target_intensity)
            contrast = "unbounded" if math.isinf(value) else value

        recon_centered = to_centered_order(recon)
        final = result.final
        solves_done["count"] += 1
        return {
            "mask_png_b64": _png_b64(result.mask.to_uint8()),
            "recon_log_png_b64": _png_b64(_log_scale_u8(recon_centered.data)),
            "metrics": {
                "gap": final.gap,
                "err_lit": final.err_lit,
                "err_dark": final.err_dark,
                "contrast": contrast,
            },
            "timing": {
                "ingest_ms": ingest_ms,
                "per_iter_ms": result.timing.per_iter_ms,
                "total_ms": total_ms,
            },
            "iters_run": result.iters_run,
            "aborted": result.aborted,
            "budget_ms": budget_ms,
            "budget_met": total_ms <= budget_ms,
        }

    @app.post("/api/solve")
    def api_solve(req: SolveRequest):
        return run_solve(req)

    @app.get("/api/solve/stream")
    def api_solve_stream(
        width: int = Query(ge=1), height: int = Query(ge=1),
        iters: int = Query(default=25, ge=1), precision: str = "double",
        strategy: str = "serial", record_every: int = Query(default=1, ge=1),
        seed: int = 0, spots: str | None = None, spot_radius: int = 1,
        deadline_ms: float | None = None,
    ):
        spot_list = None
        if spots:
            try:
                spot_list = [SpotModel(j=int(s["j"]), k=int(s["k"]))
                             for s in json.loads(spots)]
            except (ValueError, TypeError, KeyError) as exc:
                raise HTTPException(status_code=400, detail=f"bad spots: {exc}")
        req = SolveRequest(width=width, height=height, iters=iters,
                           precision=precision, strategy=strategy,
                           record_every=record_every, seed=seed,
                           spots=spot_list, spot_radius=spot_radius,
                           deadline_ms=deadline_ms)
        # validate ingestion eagerly so HTTP errors surface before streaming
        _ingest(req)

        cancelled = threading.Event()
        records: list = []
        done = threading.Event()
        outcome: dict = {}

        def worker():
            try:
                outcome["response"] = run_solve(
                    req, on_record=records.append,
                    should_abort=cancelled.is_set)
            except Exception as exc:  # surfaced as an error event
                outcome["error"] = str(exc)
            finally:
                done.set()

        thread = threading.Thread(target=worker, daemon=True)

        def event_stream():
            active_streams["count"] += 1
            sent = 0
            thread.start()
            try:
                while True:
                    while sent < len(records):
                        rec = records[sent]
                        sent += 1
                        payload = json.dumps({
                            "iter": rec.iter, "gap": rec.gap,
                            "err_lit": rec.err_lit, "err_dark": rec.err_dark,
                            "time_fft_ms": rec.time_fft_ms,
                            "time_constraint_ms": rec.time_constraint_ms,
                            "time_total_ms": rec.time_total_ms})
                        yield f"event: record\ndata: {payload}\n\n"
                    if done.is_set() and sent == len(records):
                        break
                    time.sleep(0.001)
                if "error" in outcome:
                    yield f"event: error\ndata: {json.dumps({'detail': outcome['error']})}\n\n"
                else:
                    yield f"event: result\ndata: {json.dumps(outcome['response'])}\n\n"
            finally:
                cancelled.set()
                active_streams["count"] -= 1

        return StreamingResponse(event_stream(), media_type="text/event-stream")

    @app.get("/api/health")
    def api_health():
        return {
            "status": "ok",
            "version": __version__,
            "plan_cache": {
                "size": len(cache.providers),
                "hits": cache.hits,
                "misses": cache.misses,
            },
            "active_streams": active_streams["count"],
            "solves_done": solves_done["count"],
        }

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
