"""Simon's problem from an injectivized hidden-shift instance over Z_2^n.

The combined oracle on Z_2^(n+1) is ``h(0||x) = f_V(x)`` and ``h(1||x) = g_V(x)``,
where the selector is digit ``n`` (the most significant bit of the index).  If
``f(x) = g(s + x)`` then ``h`` has period ``1||s``.

Measurement outcomes are simulated exactly from ``h`` alone.  One Simon round
leaves the first register in a uniformly random value class ``P_z`` and then
outputs ``y`` with probability ``|sum_{x in P_z} (-1)^<x,y>|^2 / (|P_z| 2^(n+1))``.
Choosing ``z`` as ``h`` of a uniform point reproduces the ``|P_z| / 2^(n+1)``
weighting.  All arithmetic is integer, so sampling is exact.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .group import GroupSpec
from .influence import fwht
from .injectivization import (
    InjectivizedTable,
    brute_force_shifts,
    build_fV,
    is_injective,
    sample_V_distinct,
)
from .oracle import CountingOracle, FunctionTable

__all__ = [
    "SimonOracle",
    "SimonSampler",
    "SampleMatrix",
    "PeriodNotFoundError",
    "FailedInjectivizationError",
    "AttemptReport",
    "HiddenShiftResult",
    "build_simon_oracle",
    "simon_sample",
    "simon_distribution",
    "gf2_nullspace",
    "recover_period",
    "extract_shift",
    "end_to_end_hidden_shift",
    "bits_to_int",
    "int_to_bits",
]


class PeriodNotFoundError(RuntimeError):
    def __init__(self, message, reason, rank, samples):
        super().__init__(message)
        self.reason = reason
        self.rank = rank
        self.samples = samples


class FailedInjectivizationError(ValueError):
    """The recovered period has selector bit 0, so ``f_V`` itself is periodic."""


def bits_to_int(bits) -> int:
    """Little-endian digit sequence to index (digit ``j`` is bit ``j``)."""
    return sum(int(b) << j for j, b in enumerate(bits))


def int_to_bits(value: int, width: int) -> tuple:
    return tuple((value >> j) & 1 for j in range(width))


@dataclass(frozen=True, eq=False)
class SimonOracle:
    n: int
    table: FunctionTable

    @property
    def width(self) -> int:
        return self.n + 1


def build_simon_oracle(fV: InjectivizedTable, gV: InjectivizedTable) -> SimonOracle:
    if fV.spec != gV.spec:
        raise ValueError("f_V and g_V live on different groups")
    if fV.m != gV.m or fV.base_range != gV.base_range:
        raise ValueError("f_V and g_V were built with different m or |S|")
    if fV.spec.q != 2:
        raise ValueError("the Simon oracle needs q = 2")
    n = fV.spec.n
    values = np.concatenate([fV.table.values, gV.table.values])
    table = FunctionTable(GroupSpec(2, n + 1), fV.table.range_size, values,
                          {"m": fV.m, "base_range": fV.base_range})
    return SimonOracle(n, table)


class SimonSampler:
    """Draws Simon measurement outcomes for ``h``; never sees anything but ``h``."""

    def __init__(self, h: SimonOracle, cache_size: int = 4096):
        self.h = h
        self.size = 1 << h.width
        _, labels, counts = np.unique(h.table.values, return_inverse=True, return_counts=True)
        self._labels = labels.reshape(-1)
        self._counts = counts
        self._members = None
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self._cache_size = cache_size

    def _class_members(self, label: int) -> np.ndarray:
        if self._members is None:
            order = np.argsort(self._labels, kind="stable")
            bounds = np.r_[0, np.cumsum(self._counts)]
            self._members = (order, bounds)
        order, bounds = self._members
        return order[bounds[label]:bounds[label + 1]]

    def _cumulative(self, label: int) -> np.ndarray:
        cum = self._cache.get(label)
        if cum is not None:
            self._cache.move_to_end(label)
            return cum
        indicator = np.zeros(self.size, dtype=np.int64)
        indicator[self._class_members(label)] = 1
        cum = np.cumsum(fwht(indicator) ** 2)
        self._cache[label] = cum
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return cum

    def draw(self, rng: np.random.Generator) -> int:
        x = int(rng.integers(0, self.size))
        label = int(self._labels[x])
        if self._counts[label] == 1:
            return int(rng.integers(0, self.size))
        cum = self._cumulative(label)
        r = int(rng.integers(0, int(cum[-1])))
        return int(np.searchsorted(cum, r, side="right"))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.array([self.draw(rng) for _ in range(size)], dtype=np.int64)


def simon_sample(h: SimonOracle, seed) -> int:
    """One measurement outcome ``y`` (as an index over Z_2^(n+1))."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return SimonSampler(h).draw(rng)


def simon_distribution(h: SimonOracle) -> list[Fraction]:
    """Exact outcome distribution ``P(y) = sum_z |sum_{x in P_z} (-1)^<x,y>|^2 / 4^(n+1)``."""
    size = 1 << h.width
    _, labels = np.unique(h.table.values, return_inverse=True)
    labels = labels.reshape(-1)
    total = np.zeros(size, dtype=np.int64)
    for label in range(labels.max() + 1):
        total += fwht((labels == label).astype(np.int64)) ** 2
    return [Fraction(int(t), size * size) for t in total]


class SampleMatrix:
    """Measurement vectors over GF(2), kept in reduced row echelon form.

    Rows are bitmasks.  Each new row takes its lowest set bit as pivot.
    """

    def __init__(self, width: int):
        self.width = width
        self.samples: list[int] = []
        self._rows: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def add(self, y: int) -> bool:
        """Record a sample; return whether it raised the rank."""
        self.samples.append(int(y))
        y = int(y)
        for pivot, row in self._rows.items():
            if (y >> pivot) & 1:
                y ^= row
        if not y:
            return False
        pivot = (y & -y).bit_length() - 1
        for other, row in self._rows.items():
            if (row >> pivot) & 1:
                self._rows[other] = row ^ y
        self._rows[pivot] = y
        return True

    def nullspace(self) -> list[int]:
        """Basis of ``{p : <y, p> = 0 for every recorded y}``, one vector per free column."""
        basis = []
        for free in range(self.width):
            if free in self._rows:
                continue
            vec = 1 << free
            for pivot, row in self._rows.items():
                if (row >> free) & 1:
                    vec |= 1 << pivot
            basis.append(vec)
        return basis


def gf2_nullspace(rows, width: int) -> list[int]:
    """Nullspace basis of the GF(2) rows (bitmasks or bit sequences)."""
    matrix = SampleMatrix(width)
    for row in rows:
        matrix.add(row if isinstance(row, (int, np.integer)) else bits_to_int(row))
    return matrix.nullspace()


def recover_period(h: SimonOracle, seed, budget: int | None = None,
                   confirmations: int = 16) -> int:
    """Find the hidden period of ``h`` from simulated Simon samples.

    Samples until the rank reaches ``n``, then draws up to ``confirmations``
    more.  A sample that pushes the rank to ``n + 1`` proves there is no
    nontrivial period.  Everything counts against ``budget``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    width = h.width
    budget = budget if budget is not None else 8 * width + 32
    sampler = SimonSampler(h)
    matrix = SampleMatrix(width)
    extra = 0
    for _ in range(budget):
        matrix.add(sampler.draw(rng))
        if matrix.rank == width:
            raise PeriodNotFoundError(
                "samples span the whole space: no nontrivial period",
                "absent", matrix.rank, len(matrix.samples))
        if matrix.rank == width - 1:
            extra += 1
            if extra > confirmations:
                break
    if matrix.rank < width - 1:
        raise PeriodNotFoundError(
            f"budget of {budget} samples exhausted at rank {matrix.rank} < {width - 1}",
            "ambiguous", matrix.rank, len(matrix.samples))
    (period,) = matrix.nullspace()
    return period


def extract_shift(p: int, n: int) -> tuple:
    """Split the period ``1||s`` and return ``s`` as ``n`` digits."""
    if p <= 0 or p >= 1 << (n + 1):
        raise ValueError(f"period {p} is not a nonzero vector of width {n + 1}")
    if not (p >> n) & 1:
        raise FailedInjectivizationError(
            f"period has selector bit 0: f_V is periodic with period {int_to_bits(p, n)}")
    return int_to_bits(p & ((1 << n) - 1), n)


@dataclass
class AttemptReport:
    V: list
    fV_injective: bool
    solver: str
    candidate: tuple | None = None
    verified: bool = False
    rank: int | None = None
    samples: int | None = None
    error: str | None = None


@dataclass
class HiddenShiftResult:
    success: bool
    shift: tuple | None
    attempts: list = field(default_factory=list)
    f_queries: int = 0
    g_queries: int = 0
    delegated: bool = False

    @property
    def queries(self) -> int:
        return self.f_queries + self.g_queries

    @property
    def diagnostics(self) -> list[str]:
        notes = []
        for k, a in enumerate(self.attempts):
            state = "injective" if a.fV_injective else "f_V non-injective"
            notes.append(f"attempt {k}: {state}; {a.error or ('verified' if a.verified else 'unverified')}")
        if self.delegated:
            notes.append("injective-HSP solver delegated")
        return notes


def end_to_end_hidden_shift(f: FunctionTable, g: FunctionTable, m: int, seed,
                            budget: int | None = None, retries: int = 3) -> HiddenShiftResult:
    """Recover ``s`` with ``f(x) = g(s + x)`` through injectivization.

    For ``q == 2`` the injectivized pair goes through the Simon oracle; for
    ``q >= 3`` an exhaustive injective solver on ``(f_V, g_V)`` stands in.
    Each candidate is checked against ``f`` and ``g`` on every point, and a
    failed attempt is retried with a fresh ``V`` up to ``retries`` times.
    """
    if f.spec != g.spec or f.range_size != g.range_size:
        raise ValueError("f and g must share group and range")
    spec = f.spec
    fc, gc = CountingOracle(f), CountingOracle(g)
    delegated = spec.q != 2
    result = HiddenShiftResult(False, None, delegated=delegated)
    streams = np.random.SeedSequence(seed).spawn(retries + 1)
    everything = np.arange(spec.order, dtype=np.int64)
    for stream in streams:
        v_seed, sample_seed = stream.spawn(2)
        V = sample_V_distinct(spec, min(m, spec.order), np.random.default_rng(v_seed))
        fV, gV = build_fV(fc, V), build_fV(gc, V)
        attempt = AttemptReport(list(V.indices), is_injective(fV)[0],
                                "delegated-exhaustive" if delegated else "simon")
        result.attempts.append(attempt)
        try:
            if delegated:
                shifts = brute_force_shifts(fV, gV)
                if len(shifts) != 1:
                    raise FailedInjectivizationError(f"{len(shifts)} candidate shifts for f_V, g_V")
                (candidate,) = shifts
            else:
                h = build_simon_oracle(fV, gV)
                period = recover_period(h, np.random.default_rng(sample_seed), budget)
                candidate = extract_shift(period, spec.n)
        except PeriodNotFoundError as exc:
            attempt.rank, attempt.samples, attempt.error = exc.rank, exc.samples, str(exc)
            continue
        except FailedInjectivizationError as exc:
            attempt.error = str(exc)
            continue
        attempt.candidate = candidate
        ok = np.array_equal(fc.query_many(everything), gc.query_many(spec.translation(candidate)))
        attempt.verified = bool(ok)
        if ok:
            result.success, result.shift = True, candidate
            break
        attempt.error = "candidate failed verification"
    result.f_queries, result.g_queries = fc.count, gc.count
    return result
