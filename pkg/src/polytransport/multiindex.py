"""Downward-closed multi-index sets and the tail partitions used by the transport."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class MultiIndexSet:
    """Finite set of d-dimensional multi-indices in lexicographic order.

    ``weights`` and ``level`` are set when the set was built as
    ``{nu : nu . weights < level}``.
    """

    indices: np.ndarray
    weights: tuple[float, ...] | None = None
    level: float | None = None
    _lookup: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 2:
            raise ValueError("indices must be a 2-d array (count, dim)")
        if idx.size and idx.min() < 0:
            raise ValueError("multi-indices must be nonnegative")
        if len(idx):
            idx = np.unique(idx, axis=0)  # sorted lexicographically, duplicate-free
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "_lookup", {tuple(r): i for i, r in enumerate(idx.tolist())})

    @classmethod
    def from_indices(cls, indices, dim: int | None = None) -> MultiIndexSet:
        arr = np.asarray(list(indices), dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, dim or 0), dtype=np.int64)
        return cls(arr)

    @property
    def dim(self) -> int:
        return self.indices.shape[1]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return (tuple(r) for r in self.indices.tolist())

    def __contains__(self, nu) -> bool:
        return tuple(int(v) for v in nu) in self._lookup

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiIndexSet):
            return NotImplemented
        return self.indices.shape == other.indices.shape and bool(
            np.all(self.indices == other.indices)
        )

    def __hash__(self):
        return hash(self.indices.tobytes())

    def position(self, nu) -> int:
        return self._lookup[tuple(int(v) for v in nu)]

    def max_degrees(self) -> np.ndarray:
        if len(self) == 0:
            return np.zeros(self.dim, dtype=np.int64)
        return self.indices.max(axis=0)


def is_downward_closed(lam) -> bool:
    if not isinstance(lam, MultiIndexSet):
        lam = MultiIndexSet.from_indices(lam)
    members = lam._lookup
    for nu in members:
        for j, v in enumerate(nu):
            if v > 0 and nu[:j] + (v - 1,) + nu[j + 1 :] not in members:
                return False
    return True


class _Counter:
    def __init__(self):
        self.calls = 0


def _construct(k, level, prefix, out, counter):
    # recursion over the leading coordinate; prefix holds the coordinates fixed so far
    if counter is not None:
        counter.calls += 1
    if not k:
        out.append(prefix)
        return
    k1 = k[0]
    m = int(np.floor(level / k1))
    if m * k1 >= level:  # strict inequality at exact ties
        m -= 1
    for i in range(m + 1):
        _construct(k[1:], level - i * k1, prefix + (i,), out, counter)


def construct_anisotropic(weights, level: float, counter: _Counter | None = None) -> MultiIndexSet:
    """All ``nu`` with ``sum_j nu_j * weights_j < level``."""
    k = tuple(float(w) for w in weights)
    if not k:
        raise ValueError("need at least one weight")
    if any(not w > 0 for w in k):
        raise ValueError("weights must be positive")
    if not level > 0:
        raise ValueError("level must be positive")
    out: list[tuple[int, ...]] = []
    _construct(k, float(level), (), out, counter)
    arr = np.array(out, dtype=np.int64).reshape(len(out), len(k))
    return MultiIndexSet(arr, weights=k, level=float(level))


def total_degree(dim: int, level: float) -> MultiIndexSet:
    """``{nu : |nu|_1 < level}``."""
    return construct_anisotropic((1.0,) * dim, level)


def full_box(degrees) -> MultiIndexSet:
    """``{mu : mu_j <= degrees_j}``."""
    ranges = [range(int(v) + 1) for v in degrees]
    return MultiIndexSet(np.array(list(itertools.product(*ranges)), dtype=np.int64))


@dataclass(frozen=True)
class TailLevel:
    """Tails of length d - j (0-based j) grouped by their own tail one shorter.

    ``tails[group_ptr[g]:group_ptr[g + 1]]`` are the members sharing the g-th
    tail of the next level; ``degrees`` holds their leading coordinate.
    ``pair_a``/``pair_b`` enumerate all ordered pairs within a group.
    """

    tails: np.ndarray
    degrees: np.ndarray
    group_ptr: np.ndarray
    pair_a: np.ndarray
    pair_b: np.ndarray

    @property
    def n_groups(self) -> int:
        return len(self.group_ptr) - 1

    def groups(self):
        for g in range(self.n_groups):
            yield self.degrees[self.group_ptr[g] : self.group_ptr[g + 1]]


@dataclass(frozen=True)
class TailPartition:
    levels: tuple[TailLevel, ...]
    # position of each member of the parent set (in its lexicographic order)
    # inside levels[0].tails
    order: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.levels)

    def stored_items(self) -> int:
        return sum(len(lv.tails) for lv in self.levels)


def build_tail_partition(lam: MultiIndexSet) -> TailPartition:
    if len(lam) == 0:
        raise ValueError("empty multi-index set")
    if not is_downward_closed(lam):
        raise ValueError("multi-index set is not downward closed")
    d = lam.dim
    idx = lam.indices
    levels: list[TailLevel] = [None] * d
    next_pos = {(): 0}  # tails of length 0
    for j in range(d - 1, -1, -1):
        uniq = np.unique(idx[:, j:], axis=0)
        parent = np.array([next_pos[tuple(r[1:])] for r in uniq.tolist()], dtype=np.int64)
        order = np.lexsort((uniq[:, 0], parent))
        tails = uniq[order]
        parent = parent[order]
        ptr = np.searchsorted(parent, np.arange(parent[-1] + 2))
        pa, pb = [], []
        for g in range(len(ptr) - 1):
            members = np.arange(ptr[g], ptr[g + 1])
            a, b = np.meshgrid(members, members, indexing="ij")
            pa.append(a.ravel())
            pb.append(b.ravel())
        levels[j] = TailLevel(
            tails=tails,
            degrees=tails[:, 0].copy(),
            group_ptr=ptr,
            pair_a=np.concatenate(pa),
            pair_b=np.concatenate(pb),
        )
        next_pos = {tuple(r): i for i, r in enumerate(tails.tolist())}
    order = np.array([next_pos[tuple(r)] for r in idx.tolist()], dtype=np.int64)
    return TailPartition(levels=tuple(levels), order=order)
