"""Arithmetic and enumeration for the additive groups Z_q^n.

Elements are tuples of ``n`` digits in ``[0, q)``.  Every element also has a
canonical integer index in little-endian mixed radix (digit ``j`` carries
weight ``q**j``), which is what dense function tables are indexed by.  For
``q == 2`` the index is simply the bit-packed element, so translation is XOR.

Dependents only rely on ``identity``, ``mul``, ``inv``, ``element_at`` and
``index_of`` (plus the vectorised index helpers), so another finite group can
be dropped in by providing the same methods.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = [
    "MAX_ORDER",
    "GroupSpec",
    "Subspace",
    "make_group",
    "is_prime",
    "smallest_prime_divisor",
    "enumerate_1dim_subspaces",
]

# Indices are stored in int64 arrays.
MAX_ORDER = 2**63 - 1

# Cap for materialising |G| x |G| translation tables.
MAX_TABLE_ORDER = 4096

Element = tuple


@dataclass(frozen=True)
class GroupSpec:
    """The group Z_q^n under component-wise addition mod q."""

    q: int
    n: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise ValueError(f"modulus q must be an integer >= 2, got {self.q!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"dimension n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "n", int(self.n))
        if self.q**self.n > MAX_ORDER:
            raise OverflowError(f"order {self.q}^{self.n} exceeds {MAX_ORDER}")

    @property
    def order(self) -> int:
        return self.q**self.n

    @property
    def identity(self) -> Element:
        return (0,) * self.n

    def element(self, a: Sequence[int]) -> Element:
        """Validate ``a`` and return it as a canonical digit tuple."""
        digits = tuple(int(d) for d in a)
        if len(digits) != self.n:
            raise ValueError(f"expected {self.n} digits, got {len(digits)}")
        if any(d < 0 or d >= self.q for d in digits):
            raise ValueError(f"digits of {digits} must lie in [0, {self.q})")
        return digits

    def mul(self, a: Sequence[int], b: Sequence[int]) -> Element:
        """Group product, written additively: ``(a_i + b_i) mod q``."""
        a, b = self.element(a), self.element(b)
        return tuple((x + y) % self.q for x, y in zip(a, b))

    def inv(self, a: Sequence[int]) -> Element:
        a = self.element(a)
        return tuple((self.q - x) % self.q for x in a)

    def element_at(self, i: int) -> Element:
        i = int(i)
        if not 0 <= i < self.order:
            raise IndexError(f"index {i} out of range for order {self.order}")
        digits = []
        for _ in range(self.n):
            i, d = divmod(i, self.q)
            digits.append(d)
        return tuple(digits)

    def index_of(self, a: Sequence[int]) -> int:
        a = self.element(a)
        index = 0
        for d in reversed(a):
            index = index * self.q + d
        return index

    def elements(self):
        """Iterate over all elements in index order."""
        for i in range(self.order):
            yield self.element_at(i)

    # -- vectorised index arithmetic ------------------------------------

    @cached_property
    def weights(self) -> np.ndarray:
        return self.q ** np.arange(self.n, dtype=np.int64)

    @cached_property
    def digits(self) -> np.ndarray:
        """``(order, n)`` array whose row ``i`` is ``element_at(i)``."""
        idx = np.arange(self.order, dtype=np.int64)
        out = (idx[:, None] // self.weights[None, :]) % self.q
        out.flags.writeable = False
        return out

    def translation(self, v: int | Sequence[int]) -> np.ndarray:
        """Index permutation ``x -> index_of(x + v)`` for every ``x`` in index order."""
        v = self._as_index(v)
        if self.q == 2:
            return np.arange(self.order, dtype=np.int64) ^ v
        vd = self.digits[v]
        return ((self.digits + vd) % self.q) @ self.weights

    def translation_table(self) -> np.ndarray:
        """``T[v, x] = index_of(x + v)``; only for small groups."""
        if self.order > MAX_TABLE_ORDER:
            raise ValueError(
                f"translation table for order {self.order} exceeds {MAX_TABLE_ORDER}"
            )
        return self._translation_table

    @cached_property
    def _translation_table(self) -> np.ndarray:
        if self.q == 2:
            idx = np.arange(self.order, dtype=np.int64)
            table = idx[:, None] ^ idx[None, :]
        else:
            table = ((self.digits[:, None, :] + self.digits[None, :, :]) % self.q) @ self.weights
        table.flags.writeable = False
        return table

    def add_indices(self, i, j):
        """Index of ``element_at(i) + element_at(j)``; works elementwise on arrays."""
        if self.q == 2:
            return np.bitwise_xor(i, j)
        i, j = np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64)
        di = (i[..., None] // self.weights) % self.q
        dj = (j[..., None] // self.weights) % self.q
        return ((di + dj) % self.q) @ self.weights

    def neg_indices(self, i):
        if self.q == 2:
            return i
        i = np.asarray(i, dtype=np.int64)
        d = (i[..., None] // self.weights) % self.q
        return ((self.q - d) % self.q) @ self.weights

    def _as_index(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            v = int(v)
            if not 0 <= v < self.order:
                raise IndexError(f"index {v} out of range for order {self.order}")
            return v
        return self.index_of(v)


def make_group(q: int, n: int) -> GroupSpec:
    return GroupSpec(q, n)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def smallest_prime_divisor(q: int) -> int:
    if q < 2:
        raise ValueError("q must be >= 2")
    d = 2
    while d * d <= q:
        if q % d == 0:
            return d
        d += 1
    return q


@dataclass(frozen=True)
class Subspace:
    """A line ``{0, v, 2v, ..., (p-1)v}`` in Z_p^n.

    ``basis`` is canonical: its first nonzero digit (lowest digit position)
    equals 1, so each line has exactly one representative.
    """

    p: int
    n: int
    basis: Element
    members: tuple

    @property
    def nonzero_members(self) -> tuple:
        return self.members[1:]


def enumerate_1dim_subspaces(p: int, n: int) -> list[Subspace]:
    """All ``(p**n - 1) / (p - 1)`` one-dimensional subspaces of Z_p^n.

    Ordered by the index of the canonical basis vector.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    spec = GroupSpec(p, n)
    lines = []
    for i in range(1, spec.order):
        v = spec.element_at(i)
        lead = next(d for d in v if d)
        if lead != 1:
            continue
        members = tuple(tuple((c * d) % p for d in v) for c in range(p))
        lines.append(Subspace(p, n, v, members))
    return lines


def line_labels(p: int, n: int) -> np.ndarray:
    """Array mapping each index of Z_p^n to the position of its line, -1 for zero."""
    spec = GroupSpec(p, n)
    labels = np.full(spec.order, -1, dtype=np.int64)
    for k, line in enumerate(enumerate_1dim_subspaces(p, n)):
        for member in line.nonzero_members:
            labels[spec.index_of(member)] = k
    return labels
