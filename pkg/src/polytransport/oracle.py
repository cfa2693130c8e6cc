"""Pointwise evaluators of unnormalized densities on [0, 1]^d."""
from __future__ import annotations

import shlex
import subprocess
import threading

import numpy as np


class ProtocolError(RuntimeError):
    """An external density process answered with malformed output."""


class DensityOracle:
    """Wraps a vectorized density ``fn(points) -> values`` and counts evaluations.

    ``points`` has shape (n, dim); the wrapped function must return n
    nonnegative values. Calls are safe from several threads.
    """

    def __init__(self, fn, dim: int, name: str = "density"):
        self.fn = fn
        self.dim = int(dim)
        self.name = name
        self.evaluations = 0
        self._lock = threading.Lock()

    def __call__(self, points) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {x.shape[1]}")
        values = np.asarray(self.fn(x), dtype=float).reshape(-1)
        if values.shape[0] != x.shape[0]:
            raise ValueError("density returned the wrong number of values")
        with self._lock:
            self.evaluations += x.shape[0]
        return values

    def reset(self) -> None:
        with self._lock:
            self.evaluations = 0

    def scaled(self, factor: float) -> DensityOracle:
        fn = self.fn
        return DensityOracle(lambda x: factor * fn(x), self.dim, name=f"{factor}*{self.name}")


class ExternalDensity:
    """Density computed by a child process.

    Points go to the child's stdin as lines of ``dim`` space-separated decimals;
    the child prints one density value per line.
    """

    def __init__(self, command: str, dim: int, timeout: float | None = None):
        self.command = command
        self.dim = int(dim)
        self.timeout = timeout

    def __call__(self, x: np.ndarray) -> np.ndarray:
        lines = "".join(" ".join(format(v, ".17g") for v in row) + "\n" for row in x)
        proc = subprocess.run(
            shlex.split(self.command),
            input=lines,
            capture_output=True,
            text=True,
            timeout=self.timeout,
            check=False,
        )
        if proc.returncode != 0:
            raise ProtocolError(
                f"density command exited with status {proc.returncode}: {proc.stderr.strip()}"
            )
        out = [ln for ln in proc.stdout.splitlines() if ln.strip()]
        if len(out) != len(x):
            raise ProtocolError(f"density command returned {len(out)} values for {len(x)} points")
        try:
            return np.array([float(v) for v in out])
        except ValueError as exc:
            raise ProtocolError(f"non-numeric density value: {exc}") from None
