"""Command-line front end.

Subcommands: solve, patterns, bench, curves, serve. Flags can be supplied
via PHASEMASK_* environment variables (e.g. PHASEMASK_SOLVE_ITERS=10).
Exit codes: 0 ok, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import math
import re
import sys
from pathlib import Path

import click
import numpy as np

from . import bench as bench_mod
from .backends import BackendSelector
from .grid import DOUBLE, GridSpec, Precision, RealGrid
from .metrics import contrast_ratio, records_to_text, reconstructed_intensity
from .patterns import (SpotSpec, StarSpec, load_target, modulus_from_intensity,
                       save_image, siemens_star, spot_pattern, to_centered_order,
                       to_fourier_order)
from .projections import FourierConstraint, SlmConstraint
from .solver import SolveConfig, default_amplitude, solve
from .transform import FftProvider


def parse_size(text: str) -> GridSpec:
    match = re.fullmatch(r"(\d+)x(\d+)", text)
    if not match:
        raise click.UsageError(f"--size must look like 256x256, got {text!r}")
    return GridSpec(n_x=int(match.group(1)), n_y=int(match.group(2)))


def _parse_strategy(text: str) -> BackendSelector:
    try:
        return BackendSelector.parse(text)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def build_target(spec: GridSpec, pattern: str | None, target_path: str | None,
                 spokes: int, spot_radius: int) -> RealGrid:
    """Target intensity in the centered visual frame."""
    if target_path is not None:
        path = Path(target_path)
        if not path.exists():
            raise click.UsageError(f"target image not found: {path}")
        return load_target(path)
    if pattern is None:
        raise click.UsageError("either --pattern or --target is required")
    if pattern.startswith("spots"):
        cols, rows = 3, 3
        if ":" in pattern:
            match = re.fullmatch(r"spots:(\d+)x(\d+)", pattern)
            if not match:
                raise click.UsageError(f"cannot parse pattern {pattern!r}")
            cols, rows = int(match.group(1)), int(match.group(2))
        centers = bench_mod.spot_grid_centers(spec, cols, rows)
        return spot_pattern(SpotSpec(spec, centers, radius=spot_radius))
    if pattern == "siemens":
        return siemens_star(StarSpec(spec, spokes=spokes))
    raise click.UsageError(f"unknown pattern {pattern!r}")


@click.group()
def cli():
    """Compute SLM phase masks from target stimulation patterns."""


@cli.command("solve")
@click.option("--pattern", default=None, help="spots[:CxR] or siemens")
@click.option("--target", "target_path", default=None, help="grayscale target image")
@click.option("--size", default="256x256", show_default=True)
@click.option("--iters", default=25, show_default=True)
@click.option("--precision", type=click.Choice(["single", "double"]), default="double",
              show_default=True)
@click.option("--strategy", default="serial", show_default=True,
              help="serial or threaded[:N]")
@click.option("--seed", default=0, show_default=True)
@click.option("--spokes", default=32, show_default=True)
@click.option("--spot-radius", default=1, show_default=True)
@click.option("--record-every", default=1, show_default=True)
@click.option("--out", "out_dir", default=".", show_default=True)
def cmd_solve(pattern, target_path, size, iters, precision, strategy, seed,
              spokes, spot_radius, record_every, out_dir):
    """Solve a target to a phase mask and write mask/reconstruction/curves."""
    spec = parse_size(size)
    prec = Precision.from_tag(precision)
    sel = _parse_strategy(strategy)
    intensity = build_target(spec, pattern, target_path, spokes, spot_radius)
    if intensity.spec != spec and target_path is not None:
        spec = intensity.spec

    target = modulus_from_intensity(to_fourier_order(intensity))
    m = FourierConstraint(target, prec)
    c = SlmConstraint(default_amplitude(m.m, prec), prec)
    cfg = SolveConfig(max_iters=iters, precision=prec, record_every=record_every,
                      backend=sel, seed=seed)
    provider = FftProvider(spec, prec, sel.fft_workers)
    result = solve(c, m, cfg, provider)

    target_energy = float((target.data.astype(np.float64) ** 2).sum())
    recon = reconstructed_intensity(result.u_star, provider, target_energy)
    recon_centered = to_centered_order(recon)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from PIL import Image
    Image.fromarray(result.mask.to_uint8(), mode="L").save(out / "mask.png")
    save_image(recon_centered, out / "recon_linear.png", scale="linear")
    save_image(recon_centered, out / "recon_log.png", scale="log")
    (out / "convergence.tsv").write_text(records_to_text(result.history))

    final = result.final
    target_intensity = RealGrid(spec, target.data.astype(np.float64) ** 2)
    lit = target_intensity.data > 0
    if lit.any() and not lit.all():
        contrast = contrast_ratio(recon, target_intensity)
    else:
        contrast = math.nan
    click.echo(f"iterations: {result.iters_run}")
    click.echo(f"gap: {final.gap:.6e}")
    click.echo(f"err_lit: {final.err_lit:.6e}")
    click.echo(f"err_dark: {final.err_dark:.6e}")
    click.echo(f"contrast: {contrast:.6e}")
    click.echo(f"wall_time_ms: {result.timing.total_ms:.3f}")


@cli.command("patterns")
@click.argument("kind", type=click.Choice(["spots", "siemens"]))
@click.option("--size", default="256x256", show_default=True)
@click.option("--spokes", default=32, show_default=True)
@click.option("--grid", "grid_layout", default="3x3", show_default=True,
              help="spot lattice CxR")
@click.option("--spot-radius", default=1, show_default=True)
@click.option("--out", "out_path", default="pattern.png", show_default=True)
def cmd_patterns(kind, size, spokes, grid_layout, spot_radius, out_path):
    """Generate a target pattern image."""
    spec = parse_size(size)
    if kind == "siemens":
        grid = siemens_star(StarSpec(spec, spokes=spokes))
    else:
        match = re.fullmatch(r"(\d+)x(\d+)", grid_layout)
        if not match:
            raise click.UsageError(f"--grid must look like 3x3, got {grid_layout!r}")
        centers = bench_mod.spot_grid_centers(spec, int(match.group(1)),
                                             int(match.group(2)))
        grid = spot_pattern(SpotSpec(spec, centers, radius=spot_radius))
    save_image(grid, out_path)
    click.echo(f"wrote {out_path} ({int(np.count_nonzero(grid.data))} lit pixels)")


@cli.command("bench")
@click.option("--sizes", default="256,512", show_default=True,
              help="comma list of N (NxN) or WxH entries")
@click.option("--iters", default=25, show_default=True)
@click.option("--repetitions", default=5, show_default=True)
@click.option("--strategies", default="serial", show_default=True,
              help="comma list of serial / threaded[:N]")
@click.option("--precisions", default="single,double", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json-lines"]),
              default="table", show_default=True)
@click.option("--out", "out_path", default=None, help="write report here")
def cmd_bench(sizes, iters, repetitions, strategies, precisions, fmt, out_path):
    """Run the timing harness and emit a report."""
    size_list = []
    for entry in sizes.split(","):
        entry = entry.strip()
        if "x" in entry:
            w, h = entry.split("x")
            size_list.append((int(w), int(h)))
        else:
            size_list.append((int(entry), int(entry)))
    sels = tuple(_parse_strategy(s.strip()) for s in strategies.split(","))
    precs = tuple(Precision.from_tag(p.strip()) for p in precisions.split(","))
    plan = bench_mod.BenchPlan(sizes=tuple(size_list), iters=iters,
                               repetitions=repetitions, strategies=sels,
                               precisions=precs)
    report = bench_mod.run_bench(plan)
    text = bench_mod.emit_report(report, fmt)
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@cli.command("curves")
@click.option("--size", default="64x64", show_default=True)
@click.option("--iters", default=25, show_default=True)
@click.option("--precision", type=click.Choice(["single", "double"]), default="double",
              show_default=True)
@click.option("--strategy", default="serial", show_default=True)
@click.option("--out", "out_path", default="curves.tsv", show_default=True)
def cmd_curves(size, iters, precision, strategy, out_path):
    """Dump the convergence table for the fixture spot problem."""
    spec = parse_size(size)
    prec = Precision.from_tag(precision)
    sel = _parse_strategy(strategy)
    intensity = spot_pattern(SpotSpec(spec, bench_mod.spot_grid_centers(spec)))
    target = modulus_from_intensity(to_fourier_order(intensity))
    m = FourierConstraint(target, prec)
    c = SlmConstraint(default_amplitude(m.m, prec), prec)
    cfg = SolveConfig(max_iters=iters, precision=prec, backend=sel)
    result = solve(c, m, cfg, FftProvider(spec, prec, sel.fft_workers))
    Path(out_path).write_text(records_to_text(result.history))
    click.echo(f"wrote {out_path}")


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8777, show_default=True)
@click.option("--budget-ms", default=10.0, show_default=True)
@click.option("--frontend-dir", default=None,
              help="directory of static UI assets to serve at /")
def cmd_serve(host, port, budget_ms, frontend_dir):
    """Run the interactive solve service."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(budget_ms=budget_ms, frontend_dir=frontend_dir),
                host=host, port=port)


def main():
    try:
        cli(standalone_mode=False, auto_envvar_prefix="PHASEMASK")
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except (OSError, ValueError, RuntimeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
