"""The injectivization map ``f -> f_V`` and exact tools to study when it fails.

Given ``f : G -> S`` and a tuple ``V = (v_1, ..., v_m)`` of group elements,
``f_V(x) = (f(x + v_1), ..., f(x + v_m))``.  A tuple value is packed into one
integer, little-endian in base ``|S|``: ``sum_k f(x + v_k) * |S|**k``.
When ``|S|**m`` does not fit in int64, use :func:`fV_components`, which keeps
the ``(|G|, m)`` component matrix and compares rows lexicographically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .group import GroupSpec
from .oracle import MAX_RANGE, FunctionTable, rng_for

__all__ = [
    "TupleV",
    "InjectivizedTable",
    "make_tuple",
    "build_fV",
    "fV_components",
    "sample_V_distinct",
    "sample_V_uniform",
    "is_injective",
    "random_function_failure_bound",
    "average_case_m",
    "bent_m",
    "brute_force_shifts",
    "exact_failure_rate",
]

# Feasibility guards for exhaustive enumeration.
MAX_FUNCTIONS = 2**20
MAX_TUPLES = 2**24


@dataclass(frozen=True, eq=False)
class TupleV:
    spec: GroupSpec
    indices: tuple
    distinct: bool = False

    def __post_init__(self):
        if len(self.indices) < 1:
            raise ValueError("V needs at least one component")
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 or i >= self.spec.order for i in idx):
            raise ValueError("component index out of range")
        if self.distinct and len(set(idx)) != len(idx):
            raise ValueError("components are not pairwise distinct")
        object.__setattr__(self, "indices", idx)

    @property
    def m(self) -> int:
        return len(self.indices)

    @property
    def components(self) -> tuple:
        return tuple(self.spec.element_at(i) for i in self.indices)

    def extend(self, more: "TupleV") -> "TupleV":
        return TupleV(self.spec, self.indices + more.indices, False)


def make_tuple(spec: GroupSpec, components: Sequence, distinct: bool = False) -> TupleV:
    """Build a tuple from elements (digit sequences) or indices."""
    idx = [c if isinstance(c, (int, np.integer)) else spec.index_of(c) for c in components]
    return TupleV(spec, tuple(idx), distinct)


@dataclass(frozen=True, eq=False)
class InjectivizedTable:
    """``f_V`` stored as a packed table with ``range_size = base_range**m``."""

    table: FunctionTable
    m: int
    base_range: int

    @property
    def spec(self) -> GroupSpec:
        return self.table.spec

    @property
    def values(self) -> np.ndarray:
        return self.table.values

    @property
    def range_size(self) -> int:
        return self.table.range_size

    def decode(self, value: int) -> tuple:
        out = []
        for _ in range(self.m):
            value, d = divmod(int(value), self.base_range)
            out.append(d)
        return tuple(out)

    def decoded(self) -> list[tuple]:
        return [self.decode(v) for v in self.table.values]

    def components(self) -> np.ndarray:
        weights = self.base_range ** np.arange(self.m, dtype=np.int64)
        return (self.table.values[:, None] // weights) % self.base_range


def _check_fits(base_range: int, m: int) -> None:
    if base_range**m > MAX_RANGE:
        raise OverflowError(
            f"|S|^m = {base_range}^{m} does not fit in int64; use fV_components"
        )


def build_fV(f, V: TupleV) -> InjectivizedTable:
    """Evaluate ``f_V`` on every point, issuing exactly ``m * |G|`` queries to ``f``.

    ``f`` may be a :class:`FunctionTable` or a :class:`CountingOracle`.
    """
    if V.spec != f.spec:
        raise ValueError("V and f live on different groups")
    S = f.range_size
    _check_fits(S, V.m)
    packed = np.zeros(f.spec.order, dtype=np.int64)
    weight = 1
    for v in V.indices:
        packed += f.query_many(f.spec.translation(v)) * weight
        weight *= S
    meta = {"m": V.m, "base_range": S, "V": list(V.indices)}
    table = FunctionTable(f.spec, S**V.m, packed, meta)
    return InjectivizedTable(table, V.m, S)


def fV_components(f, V: TupleV) -> np.ndarray:
    """Unpacked ``(|G|, m)`` matrix of ``f_V``; no overflow limit on ``m``."""
    if V.spec != f.spec:
        raise ValueError("V and f live on different groups")
    cols = [f.query_many(f.spec.translation(v)) for v in V.indices]
    return np.stack(cols, axis=1)


def sample_V_distinct(spec: GroupSpec, m: int, seed) -> TupleV:
    """``m`` components drawn uniformly without replacement."""
    if m < 1 or m > spec.order:
        raise ValueError(f"need 1 <= m <= {spec.order}, got {m}")
    rng = rng_for(seed)
    idx = rng.choice(spec.order, size=m, replace=False)
    return TupleV(spec, tuple(idx.tolist()), True)


def sample_V_uniform(spec: GroupSpec, m: int, seed) -> TupleV:
    """``m`` i.i.d. uniform components (repetition allowed)."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    rng = rng_for(seed)
    idx = rng.integers(0, spec.order, size=m)
    return TupleV(spec, tuple(idx.tolist()), False)


def _first_collision(values: np.ndarray):
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    dup = ordered[1:] == ordered[:-1]
    if not dup.any():
        return None
    pos = np.flatnonzero(dup)
    # Start of each run of equal values; the stable sort keeps indices ascending.
    starts = pos[np.r_[True, pos[1:] != pos[:-1] + 1]]
    best = starts[np.argmin(order[starts])]
    return int(order[best]), int(order[best + 1])


def is_injective(t) -> tuple[bool, tuple[int, int] | None]:
    """Check that all values are distinct.

    Accepts a :class:`FunctionTable`, an :class:`InjectivizedTable`, a 1-D value
    array, or a 2-D component matrix (rows compared as tuples).  On failure
    returns the lexicographically least colliding index pair ``(i, j)``, ``i < j``.
    """
    values = t.values if hasattr(t, "values") else np.asarray(t)
    if values.ndim == 2:
        values = np.unique(values, axis=0, return_inverse=True)[1].reshape(-1)
    witness = _first_collision(values)
    return witness is None, witness


def random_function_failure_bound(order: int, range_size: int, m: int) -> Fraction:
    """``|G|^2 / |S|^ceil(m/2)``: failure bound for uniform ``f`` and distinct-component ``V``.

    Exact rational; values above 1 are returned unchanged.
    """
    if min(order, range_size, m) < 1:
        raise ValueError("all arguments must be >= 1")
    return Fraction(order**2, range_size ** ((m + 1) // 2))


def _log_ratio(order: int, range_size: int) -> float:
    return math.log(order) / math.log(range_size)


def average_case_m(order: int, range_size: int, epsilon: float = 0.5) -> int:
    """Smallest integer ``m >= (4 + epsilon) * log_|S| |G|``."""
    return max(1, math.ceil((4 + epsilon) * _log_ratio(order, range_size) - 1e-9))


def bent_m(n: int, epsilon: float = 0.5) -> int:
    """Smallest integer ``m > (2 + epsilon) * n``."""
    return math.floor((2 + epsilon) * n + 1e-9) + 1


def _values_of(t) -> np.ndarray:
    if isinstance(t, InjectivizedTable):
        return t.table.values
    if hasattr(t, "values"):
        return t.values
    return np.asarray(t)


def brute_force_shifts(f, g, spec: GroupSpec | None = None) -> set[tuple]:
    """Every ``s`` with ``f(x) = g(s + x)`` for all ``x``, by exhaustive search.

    Works on tables, injectivized tables, or raw value/component arrays (pass
    ``spec`` in the last case).
    """
    spec = spec or f.spec
    if hasattr(g, "spec") and g.spec != spec:
        raise ValueError("f and g live on different groups")
    fv, gv = _values_of(f), _values_of(g)
    if fv.shape != gv.shape:
        raise ValueError("f and g have different shapes")
    if getattr(f, "range_size", None) != getattr(g, "range_size", None):
        raise ValueError("f and g have different ranges")
    shifts = set()
    for s in range(spec.order):
        if np.array_equal(fv, gv[spec.translation(s)]):
            shifts.add(spec.element_at(s))
    return shifts


def _packed_rows(F_rows: np.ndarray, tuples: np.ndarray, S: int) -> np.ndarray:
    """Packed ``f_V`` for a batch of tuples; ``F_rows[v, x] = f(x + v)``."""
    packed = np.zeros((tuples.shape[0], F_rows.shape[1]), dtype=np.int64)
    weight = 1
    for k in range(tuples.shape[1]):
        packed += F_rows[tuples[:, k]] * weight
        weight *= S
    return packed


def _rows_noninjective(packed: np.ndarray) -> np.ndarray:
    s = np.sort(packed, axis=1)
    return np.any(s[:, 1:] == s[:, :-1], axis=1)


def exact_failure_rate(
    mode: str,
    spec: GroupSpec,
    range_size: int,
    m: int | None = None,
    f: FunctionTable | None = None,
    V: TupleV | None = None,
    chunk: int = 1 << 15,
) -> Fraction:
    """Exact fraction of instances on which ``f_V`` is not injective.

    ``mode="over-f"`` enumerates every ``f : G -> S`` at the fixed ``V``;
    ``mode="over-V"`` enumerates every ``V`` in ``G^m`` (with repetition) at
    the fixed ``f``.
    """
    S = range_size
    if mode == "over-f":
        if V is None:
            raise ValueError("over-f mode needs a fixed V")
        total = S**spec.order
        if total > MAX_FUNCTIONS:
            raise ValueError(f"{S}^{spec.order} functions exceed the {MAX_FUNCTIONS} guard")
        _check_fits(S, V.m)
        shifts = np.stack([spec.translation(v) for v in V.indices])  # (m, |G|)
        place = S ** np.arange(spec.order, dtype=np.int64)
        failures = 0
        for start in range(0, total, chunk):
            codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
            tables = (codes[:, None] // place) % S
            packed = np.zeros_like(tables)
            weight = 1
            for k in range(V.m):
                packed += tables[:, shifts[k]] * weight
                weight *= S
            failures += int(_rows_noninjective(packed).sum())
        return Fraction(failures, total)
    if mode == "over-V":
        if f is None or m is None:
            raise ValueError("over-V mode needs a fixed f and m")
        if f.spec != spec or f.range_size != S:
            raise ValueError("f does not match spec/range_size")
        total = spec.order**m
        if total > MAX_TUPLES:
            raise ValueError(f"{spec.order}^{m} tuples exceed the {MAX_TUPLES} guard")
        _check_fits(S, m)
        F_rows = f.values[spec.translation_table()]
        place = spec.order ** np.arange(m, dtype=np.int64)
        failures = 0
        for start in range(0, total, chunk):
            codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
            tuples = (codes[:, None] // place) % spec.order
            failures += int(_rows_noninjective(_packed_rows(F_rows, tuples, S)).sum())
        return Fraction(failures, total)
    raise ValueError(f"unknown mode {mode!r}; expected 'over-f' or 'over-V'")
