"""Command-line front end: ``polytransport {fit,sample,invert,convergence}``.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure,
4 I/O failure (including a misbehaving external density process).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cf
from .interp import fit_interpolation
from .io import FormatError, load_surrogate, read_points, save_surrogate, write_points
from .metrics import QuadratureGrid, convergence_study
from .oracle import ProtocolError
from .transport import DEFAULT_ITERATIONS, TriangularTransport, bisection_iterations, pushforward_sample
from .wls import FitError, fit

log = logging.getLogger("polytransport")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class InputError(cf.ConfigError):
    """User-supplied data is unusable (for example, points outside the cube)."""


def _effective_config_path(out: Path) -> Path:
    return out.with_name(out.name + ".config.yaml")


def _finish(cfg: cf.RunConfig, out: Path) -> None:
    cfg.dump(_effective_config_path(out))


def _output(cfg, args, default: str) -> Path:
    return Path(args.out) if args.out else Path(default)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fit(cfg: cf.RunConfig, args) -> int:
    cf.validate(cfg, "fit")
    oracle, _ = cf.build_oracle(cfg)
    dim = oracle.dim
    out = _output(cfg, args, cfg.output.surrogate)
    cfg.output.surrogate = str(out)
    if cfg.method.name == "wls":
        lam = cf.build_index_set(cfg, dim)
        g, run = fit(oracle, lam, np.random.default_rng(cfg.seed), n=cfg.method.n, max_rounds=cfg.method.max_rounds)
        g.meta.update(n=run.n, seed=cfg.seed)
    else:
        lam = None
        if cfg.method.mode == "sparse-combination" or cfg.method.degrees is None and cfg.method.mode == "tensor":
            lam = cf.build_index_set(cfg, dim)
        g = fit_interpolation(oracle, cf.interpolation_plan(cfg, dim, lam))
        g.meta.update(n=g.meta["evaluations"], seed=cfg.seed, rounds=0)
    save_surrogate(g, out)
    _finish(cfg, out)
    print(
        f"|Lambda|={len(g.index_set)} n={g.meta['n']} rounds={g.meta.get('rounds', 0)} "
        f"mass={g.mass():.17g} -> {out}"
    )
    return EXIT_OK


def _iterations(cfg_value, g, smoothness=None) -> int:
    if cfg_value is not None:
        return int(cfg_value)
    if smoothness is not None:
        return bisection_iterations(len(g.index_set), g.dim, tuple(smoothness))
    return DEFAULT_ITERATIONS


def cmd_sample(cfg: cf.RunConfig, args) -> int:
    cf.validate(cfg, "sample")
    g = load_surrogate(cfg.resolve(cfg.sampling.surrogate))
    r = _iterations(cfg.sampling.iterations, g, cfg.sampling.smoothness)
    cfg.sampling.iterations = r
    transport = TriangularTransport(g)
    rng = np.random.default_rng(cfg.seed)
    samples = pushforward_sample(transport, cfg.sampling.n, rng, iterations=r, threads=cfg.threads)
    out = _output(cfg, args, cfg.output.samples)
    cfg.output.samples = str(out)
    write_points(out, samples, g.dim)
    _finish(cfg, out)
    print(f"{cfg.sampling.n} samples (r={r}) -> {out}")
    return EXIT_OK


def cmd_invert(cfg: cf.RunConfig, args) -> int:
    cf.validate(cfg, "invert")
    g = load_surrogate(cfg.resolve(cfg.invert.surrogate))
    pts = read_points(cfg.resolve(cfg.invert.points), g.dim)
    bad = np.flatnonzero(~np.all((pts >= 0.0) & (pts <= 1.0), axis=1))
    if bad.size:
        raise InputError(f"row {bad[0] + 1} of {cfg.invert.points} lies outside [0, 1]^{g.dim}: {pts[bad[0]].tolist()}")
    transport = TriangularTransport(g)
    if cfg.invert.direction == "S":
        mapped = transport.S(pts, threads=cfg.threads) if len(pts) else pts
    else:
        r = _iterations(cfg.invert.iterations, g)
        cfg.invert.iterations = r
        mapped = transport.T(pts, iterations=r, threads=cfg.threads) if len(pts) else pts
    out = _output(cfg, args, cfg.output.mapped)
    cfg.output.mapped = str(out)
    write_points(out, mapped, g.dim)
    _finish(cfg, out)
    print(f"{len(pts)} points mapped by {cfg.invert.direction} -> {out}")
    return EXIT_OK


def cmd_convergence(cfg: cf.RunConfig, args) -> int:
    cf.validate(cfg, "convergence")
    oracle, _ = cf.build_oracle(cfg)
    dim = oracle.dim
    q = cfg.quadrature
    grid = None
    if q.mode == "mc" or (q.mode == "auto" and dim > 3):
        grid = QuadratureGrid.monte_carlo(dim, q.samples, q.seed)
    elif q.points is not None:
        grid = QuadratureGrid.tensor(dim, q.points)
    out = _output(cfg, args, cfg.output.convergence)
    cfg.output.convergence = str(out)

    def report(row):
        status = "failed: " + row.message if row.failed else f"hellinger={row.hellinger:.6g} +- {row.stderr:.2g}"
        log.info("|Lambda|=%d n=%d %s (%.2fs)", row.cardinality, row.evaluations, status, row.seconds)

    record = convergence_study(
        oracle,
        cfg.target.name,
        cfg.index_set.weights,
        cfg.levels,
        method=cfg.method.name,
        grid=grid,
        seed=cfg.seed or 0,
        log=report,
        n=cfg.method.n,
        max_rounds=cfg.method.max_rounds,
        interp_mode=cfg.method.mode,
    )
    record.write_csv(out)
    record.write_csv(out.with_name(out.stem + ".detail" + out.suffix), extra=True)
    _finish(cfg, out)
    print(f"{len(record.rows)} rows -> {out}")
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "sample": cmd_sample, "invert": cmd_invert, "convergence": cmd_convergence}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--seed", type=int, help="random seed (overrides the config)")
    common.add_argument("--out", help="primary output path")
    common.add_argument("--threads", type=int, help="worker threads for point batches")
    common.add_argument("--deterministic", action="store_true", help="require thread-count independent results")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="polytransport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fit", parents=[common], help="fit a polynomial surrogate of sqrt(density)")
    p = sub.add_parser("sample", parents=[common], help="push uniform draws through the transport")
    p.add_argument("--surrogate")
    p.add_argument("--n", type=int)
    p.add_argument("--iterations", type=int)
    p = sub.add_parser("invert", parents=[common], help="evaluate S or T on a CSV of points")
    p.add_argument("--surrogate")
    p.add_argument("--points")
    p.add_argument("--direction", choices=("S", "T"))
    p.add_argument("--iterations", type=int)
    sub.add_parser("convergence", parents=[common], help="Hellinger error over a list of index-set levels")
    return parser


def _apply_overrides(cfg: cf.RunConfig, args) -> None:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    if args.deterministic:
        cfg.deterministic = True
    section = {"sample": cfg.sampling, "invert": cfg.invert}.get(args.command)
    for key in ("surrogate", "n", "iterations", "points", "direction"):
        value = getattr(args, key, None)
        if value is not None:
            # paths given on the command line are relative to the working directory
            if key in ("surrogate", "points"):
                value = str(Path(value).resolve())
            setattr(section, key, value)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = cf.load_config(args.config) if args.config else cf.from_dict({})
        _apply_overrides(cfg, args)
        return COMMANDS[args.command](cfg, args)
    except (ProtocolError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except cf.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FitError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
