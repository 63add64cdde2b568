"""Generalized influence, periodicity, and Walsh-Hadamard analysis.

The influence of ``v`` on ``f`` is ``gamma_v = Pr_x[f(x) != f(x + v)]``.  All
influences are kept as exact integer counts over ``|G|`` so predicates such as
``gamma_v == 1/2`` never touch floating point.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .group import MAX_TABLE_ORDER, GroupSpec
from .oracle import FunctionTable

__all__ = [
    "InfluenceProfile",
    "WalshSpectrum",
    "influence_of",
    "influence_counts",
    "influence_profile",
    "is_periodic",
    "influence_failure_bounds",
    "fwht",
    "walsh_spectrum",
    "is_bent",
    "is_perfectly_nonlinear",
    "influence_counts_from_spectrum",
    "profile_to_csv",
]


@dataclass(frozen=True, eq=False)
class InfluenceProfile:
    """``counts[v] = |{x : f(x) != f(x + v)}|`` for every ``v`` in index order."""

    spec: GroupSpec
    counts: np.ndarray

    @property
    def denominator(self) -> int:
        return self.spec.order

    def gamma(self, v) -> Fraction:
        i = v if isinstance(v, (int, np.integer)) else self.spec.index_of(v)
        return Fraction(int(self.counts[i]), self.denominator)

    def gammas(self) -> list[Fraction]:
        return [Fraction(int(c), self.denominator) for c in self.counts]

    @property
    def gamma_min(self) -> Fraction:
        if self.spec.order == 1:
            return Fraction(0)
        return Fraction(int(self.counts[1:].min()), self.denominator)


def influence_of(f: FunctionTable, v) -> Fraction:
    perm = f.spec.translation(v)
    return Fraction(int(np.count_nonzero(f.values != f.values[perm])), f.spec.order)


def influence_counts(values: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Influence numerators for one value table (1-D) or a batch of tables (2-D)."""
    values = np.asarray(values)
    if spec.order <= MAX_TABLE_ORDER:
        shifted = values[..., spec.translation_table()]
        return np.count_nonzero(shifted != values[..., None, :], axis=-1)
    out = np.empty(values.shape[:-1] + (spec.order,), dtype=np.int64)
    for v in range(spec.order):
        out[..., v] = np.count_nonzero(values != values[..., spec.translation(v)], axis=-1)
    return out


def influence_profile(f: FunctionTable) -> InfluenceProfile:
    """Exact influence of every group element; costs ``O(|G|^2)``."""
    counts = influence_counts(f.values, f.spec)
    counts.flags.writeable = False
    return InfluenceProfile(f.spec, counts)


def is_periodic(f: FunctionTable) -> tuple[bool, int | None]:
    """``(True, v)`` for the least-index nonzero period ``v``, else ``(False, None)``."""
    spec = f.spec
    if spec.order <= MAX_TABLE_ORDER:
        zero = np.flatnonzero(influence_counts(f.values, spec)[1:] == 0)
        return (True, int(zero[0]) + 1) if zero.size else (False, None)
    for v in range(1, spec.order):
        if np.array_equal(f.values, f.values[spec.translation(v)]):
            return True, v
    return False, None


def influence_failure_bounds(profile: InfluenceProfile, m: int) -> tuple[Fraction, Fraction]:
    """Failure bounds for uniformly random ``V`` in ``G^m`` at a fixed ``f``.

    Returns ``(N/2 * sum_{v != 0} (1 - gamma_v)^m,  N^2 * (1 - gamma_min)^m)``.
    The identity is left out of the sum because its term is always 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    N = profile.denominator
    vals, mult = np.unique(profile.counts[1:], return_counts=True)
    total = sum(int(k) * (N - int(c)) ** m for c, k in zip(vals, mult))
    sum_bound = Fraction(N * total, 2 * N**m)
    min_count = int(profile.counts[1:].min()) if N > 1 else 0
    min_bound = Fraction(N * N * (N - min_count) ** m, N**m)
    return sum_bound, min_bound


# -- Walsh-Hadamard ------------------------------------------------------

def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform along the last axis."""
    a = np.array(a, dtype=np.int64)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        blocks = a.reshape(*lead, -1, 2, h)
        lo, hi = blocks[..., 0, :], blocks[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2).reshape(*lead, size)
        h *= 2
    return a


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    """``coefficients[w] = sum_x (-1)^(f(x) + <x, w>)``."""

    n: int
    coefficients: np.ndarray


def _require_boolean(f: FunctionTable) -> None:
    if f.spec.q != 2 or f.range_size != 2:
        raise ValueError("Walsh analysis needs q = 2 and |S| = 2")


def walsh_spectrum(f: FunctionTable) -> WalshSpectrum:
    _require_boolean(f)
    coeffs = fwht(1 - 2 * f.values)
    coeffs.flags.writeable = False
    return WalshSpectrum(f.spec.n, coeffs)


def is_bent(f: FunctionTable) -> bool:
    """Flat spectrum test: every ``|F(w)| == 2^(n/2)``.  Always false for odd ``n``."""
    _require_boolean(f)
    n = f.spec.n
    if n % 2:
        return False
    return bool(np.all(np.abs(walsh_spectrum(f).coefficients) == 1 << (n // 2)))


def is_perfectly_nonlinear(f: FunctionTable) -> bool:
    """Every nonzero ``v`` has influence exactly 1/2."""
    counts = influence_profile(f).counts
    return bool(np.all(2 * counts[1:] == f.spec.order))


def influence_counts_from_spectrum(spectrum: WalshSpectrum) -> np.ndarray:
    """Influence numerators recovered from the spectrum alone.

    The autocorrelation ``C(v) = sum_x (-1)^(f(x) + f(x+v))`` equals
    ``fwht(F^2)[v] / 2^n``, and ``count_v = (2^n - C(v)) / 2``.
    """
    size = 1 << spectrum.n
    auto = fwht(spectrum.coefficients.astype(np.int64) ** 2)
    assert np.all(auto % size == 0)
    auto //= size
    return (size - auto) // 2


def profile_to_csv(profile: InfluenceProfile) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["v_index", "gamma_numerator", "gamma_denominator"])
    for v, c in enumerate(profile.counts):
        writer.writerow([v, int(c), profile.denominator])
    return buf.getvalue()
