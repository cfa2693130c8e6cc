"""Run configuration: YAML in, dataclasses inside, the effective YAML back out."""
from __future__ import annotations

import dataclasses
import shutil
import shlex
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import targets as tg
from .interp import MODES, InterpolationPlan
from .io import load_index_set
from .multiindex import MultiIndexSet, construct_anisotropic, full_box
from .oracle import DensityOracle, ExternalDensity

BUILTIN_TARGETS = ("uniform", "rosenbrock", "deconvolution", "external")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass
class TargetConfig:
    name: str = "rosenbrock"
    params: dict = field(default_factory=dict)
    command: str | None = None
    dim: int | None = None
    timeout: float | None = None


@dataclass
class MethodConfig:
    name: str = "wls"
    mode: str = "sparse-combination"
    degrees: list[int] | None = None
    level: int | None = None
    n: int | None = None
    max_rounds: int = 50


@dataclass
class IndexSetConfig:
    weights: list[float] | None = None
    level: float | None = None
    file: str | None = None


@dataclass
class SamplingConfig:
    surrogate: str | None = None
    n: int = 1000
    iterations: int | None = None
    smoothness: list[float] | None = None


@dataclass
class InvertConfig:
    surrogate: str | None = None
    points: str | None = None
    direction: str = "S"
    iterations: int | None = None


@dataclass
class QuadratureConfig:
    mode: str = "auto"
    points: int | None = None
    samples: int = 100_000
    seed: int = 0


@dataclass
class OutputConfig:
    surrogate: str = "surrogate.txt"
    samples: str = "samples.csv"
    mapped: str = "mapped.csv"
    convergence: str = "convergence.csv"


@dataclass
class RunConfig:
    target: TargetConfig = field(default_factory=TargetConfig)
    method: MethodConfig = field(default_factory=MethodConfig)
    index_set: IndexSetConfig = field(default_factory=IndexSetConfig)
    seed: int | None = None
    levels: list[float] | None = None
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    invert: InvertConfig = field(default_factory=InvertConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    threads: int = 1
    deterministic: bool = False
    base_dir: str = field(default=".", metadata={"internal": True})

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out.pop("base_dir")
        return out

    def dump(self, path) -> None:
        text = yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)
        Path(path).write_text(text, newline="\n")

    def resolve(self, path: str | None) -> Path | None:
        if path is None:
            return None
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p


def _build(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    known = {f.name: f for f in dataclasses.fields(cls) if not f.metadata.get("internal")}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        sub = _SECTIONS.get((cls, name))
        kwargs[name] = _build(sub, value, f"{where}.{name}") if sub else value
    return cls(**kwargs)


_SECTIONS = {
    (RunConfig, "target"): TargetConfig,
    (RunConfig, "method"): MethodConfig,
    (RunConfig, "index_set"): IndexSetConfig,
    (RunConfig, "sampling"): SamplingConfig,
    (RunConfig, "invert"): InvertConfig,
    (RunConfig, "quadrature"): QuadratureConfig,
    (RunConfig, "output"): OutputConfig,
}


def from_dict(data: dict | None, base_dir=".") -> RunConfig:
    cfg = _build(RunConfig, data or {}, "config")
    cfg.base_dir = str(base_dir)
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return from_dict(data, Path(path).resolve().parent)


# ---------------------------------------------------------------------------
# validation and construction
# ---------------------------------------------------------------------------


def _int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(f"{name} must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}")
    return int(value)


def target_dim(cfg: RunConfig) -> int:
    t = cfg.target
    if t.name == "rosenbrock":
        return 2
    if t.name == "deconvolution":
        return deconvolution_spec(cfg).dim
    if t.name == "uniform":
        return _int(t.params.get("dim", t.dim if t.dim is not None else 1), "target dim", 1)
    if t.name == "external":
        if t.dim is None:
            raise ConfigError("external target needs target.dim")
        return _int(t.dim, "target.dim", 1)
    raise ConfigError(f"unknown target {t.name!r}; choose from {', '.join(BUILTIN_TARGETS)}")


def deconvolution_spec(cfg: RunConfig) -> tg.DeconvolutionSpec:
    params = {k: v for k, v in cfg.target.params.items() if k != "data_seed"}
    if "x_true" in params and params["x_true"] is not None:
        params["x_true"] = tuple(params["x_true"])
    try:
        return tg.DeconvolutionSpec(**params)
    except TypeError as exc:
        raise ConfigError(f"target.params: {exc}") from None


def build_oracle(cfg: RunConfig) -> tuple[DensityOracle, object]:
    """The density oracle and the underlying target object (for the record)."""
    t = cfg.target
    dim = target_dim(cfg)
    if t.name == "rosenbrock":
        params = dict(t.params)
        for key in ("thetas", "centers"):
            if key in params:
                params[key] = tuple(tuple(v) if isinstance(v, list) else v for v in params[key])
        try:
            target = tg.RosenbrockTarget(**params)
        except TypeError as exc:
            raise ConfigError(f"target.params: {exc}") from None
        t.params = target.to_dict()
        return target.oracle(), target
    if t.name == "deconvolution":
        spec = deconvolution_spec(cfg)
        seed = _int(t.params.get("data_seed", 0), "target.params.data_seed", 0)
        try:
            target = tg.build_deconvolution(spec, seed)
        except ValueError as exc:
            raise ConfigError(f"target.params: {exc}") from None
        t.params = dict(dataclasses.asdict(spec), data_seed=seed)
        return target.oracle(), target
    if t.name == "uniform":
        return tg.uniform_oracle(dim), None
    if not t.command:
        raise ConfigError("external target needs target.command")
    words = shlex.split(t.command)
    if not words or shutil.which(words[0]) is None and not Path(words[0]).exists():
        raise ConfigError(f"external command not found: {t.command!r}")
    ext = ExternalDensity(t.command, dim, timeout=t.timeout)
    return DensityOracle(ext, dim, name="external"), ext


def build_index_set(cfg: RunConfig, dim: int, level=None) -> MultiIndexSet:
    spec = cfg.index_set
    if spec.file is not None and level is None:
        path = cfg.resolve(spec.file)
        if not path.exists():
            raise ConfigError(f"index_set.file not found: {path}")
        lam = load_index_set(path)
        if lam.dim != dim:
            raise ConfigError(f"index set has dimension {lam.dim}, target has {dim}")
        return lam
    weights = default_weights(cfg, dim)
    level = spec.level if level is None else level
    if level is None:
        raise ConfigError("index_set.level (or index_set.file) is required")
    try:
        return construct_anisotropic(weights, float(level))
    except ValueError as exc:
        raise ConfigError(f"index_set: {exc}") from None


def default_weights(cfg: RunConfig, dim: int) -> list[float]:
    w = cfg.index_set.weights
    if w is None:
        if cfg.target.name == "deconvolution":
            return tg.anisotropic_weights(dim).tolist()
        return [1.0] * dim
    if len(w) != dim:
        raise ConfigError(f"index_set.weights has {len(w)} entries, target dimension is {dim}")
    return [float(v) for v in w]


def interpolation_plan(cfg: RunConfig, dim: int, lam: MultiIndexSet | None) -> InterpolationPlan:
    m = cfg.method
    if m.mode not in MODES:
        raise ConfigError(f"method.mode must be one of {', '.join(MODES)}")
    if m.mode == "tensor":
        degrees = m.degrees if m.degrees is not None else (lam.max_degrees().tolist() if lam else None)
        if degrees is None or len(degrees) != dim:
            raise ConfigError(f"tensor interpolation needs method.degrees of length {dim}")
        return InterpolationPlan("tensor", degrees=tuple(_int(v, "degree", 0) for v in degrees))
    if m.mode == "sparse-mix":
        if m.level is None:
            raise ConfigError("sparse-mix interpolation needs method.level")
        return InterpolationPlan("sparse-mix", level=_int(m.level, "method.level", 0), dim=dim)
    return InterpolationPlan("sparse-combination", index_set=lam)


def validate(cfg: RunConfig, command: str) -> None:
    """Checks done before any work starts; fills defaults into ``cfg`` so the dump is complete."""
    dim = target_dim(cfg)
    if cfg.method.name not in ("wls", "interp"):
        raise ConfigError("method.name must be 'wls' or 'interp'")
    if cfg.method.n is not None:
        _int(cfg.method.n, "method.n", 1)
    _int(cfg.method.max_rounds, "method.max_rounds", 1)
    _int(cfg.threads, "threads", 1)
    if cfg.seed is not None:
        _int(cfg.seed, "seed", 0)
    if command in ("fit", "convergence"):
        if cfg.method.name == "wls" and cfg.seed is None:
            raise ConfigError("a seed is mandatory for least-squares fits (config 'seed' or --seed)")
        cfg.index_set.weights = default_weights(cfg, dim)
        if cfg.method.name == "interp":
            interpolation_plan(cfg, dim, full_box([0] * dim))
    if command == "fit":
        if cfg.index_set.file is not None and not cfg.resolve(cfg.index_set.file).exists():
            raise ConfigError(f"index_set.file not found: {cfg.resolve(cfg.index_set.file)}")
        needs_set = cfg.method.name == "wls" or cfg.method.mode == "sparse-combination"
        if needs_set and cfg.index_set.file is None and cfg.index_set.level is None:
            raise ConfigError("index_set.level (or index_set.file) is required")
    if command == "convergence":
        if not cfg.levels:
            raise ConfigError("convergence needs a nonempty 'levels' list")
        levels = [float(v) for v in cfg.levels]
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ConfigError("levels must be strictly increasing")
        if cfg.method.name == "interp" and cfg.method.mode == "sparse-mix":
            raise ConfigError("convergence studies run over index-set levels; use tensor or sparse-combination")
        if cfg.quadrature.mode not in ("auto", "tensor", "mc"):
            raise ConfigError("quadrature.mode must be auto, tensor or mc")
    if command == "sample":
        if cfg.seed is None:
            raise ConfigError("a seed is mandatory for sampling (config 'seed' or --seed)")
        _int(cfg.sampling.n, "sampling.n", 0)
        _check_iterations(cfg.sampling.iterations)
        if cfg.sampling.smoothness is not None and len(cfg.sampling.smoothness) != 2:
            raise ConfigError("sampling.smoothness must be [k, alpha]")
        _need_file(cfg, cfg.sampling.surrogate, "sampling.surrogate")
    if command == "invert":
        if cfg.invert.direction not in ("S", "T"):
            raise ConfigError("invert.direction must be S or T")
        _check_iterations(cfg.invert.iterations)
        _need_file(cfg, cfg.invert.surrogate, "invert.surrogate")
        _need_file(cfg, cfg.invert.points, "invert.points")


def _check_iterations(value):
    if value is not None:
        _int(value, "iterations", 1)


def _need_file(cfg, path, name):
    if path is None:
        raise ConfigError(f"{name} is required")
    if not cfg.resolve(path).exists():
        raise ConfigError(f"{name} not found: {cfg.resolve(path)}")
