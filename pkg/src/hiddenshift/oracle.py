"""Dense black-box oracles ``f : Z_q^n -> S`` with ``S = {0, ..., |S|-1}``.

Randomness everywhere in the package comes from numpy's PCG64 bit generator
(``numpy.random.default_rng``) seeded with 64-bit integers, so tables are
reproducible across platforms for a fixed numpy release.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .group import GroupSpec

__all__ = [
    "FunctionTable",
    "CountingOracle",
    "OracleFormatError",
    "make_table",
    "make_random_function",
    "make_random_nonperiodic",
    "make_shifted",
    "make_mm_bent",
    "random_mm_bent",
    "serialize",
    "deserialize",
    "save",
    "load",
]

MAX_RANGE = 2**63 - 1


class OracleFormatError(ValueError):
    """Raised when an oracle document is malformed."""


def rng_for(seed) -> np.random.Generator:
    """PCG64 generator for an int seed, a SeedSequence, or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Immutable value table of a function on a group, in index order."""

    spec: GroupSpec
    range_size: int
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.range_size < 2 or self.range_size > MAX_RANGE:
            raise ValueError(f"range_size must lie in [2, 2^63), got {self.range_size}")
        values = np.array(self.values, dtype=np.int64)
        if values.shape != (self.spec.order,):
            raise ValueError(f"expected {self.spec.order} values, got shape {values.shape}")
        if values.size and (values.min() < 0 or values.max() >= self.range_size):
            raise ValueError(f"values must lie in [0, {self.range_size})")
        values.flags.writeable = False
        object.__setattr__(self, "range_size", int(self.range_size))
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.range_size == other.range_size
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def query(self, x: Sequence[int]) -> int:
        return int(self.values[self.spec.index_of(x)])

    def query_index(self, i: int) -> int:
        return int(self.values[i])

    def query_many(self, indices) -> np.ndarray:
        return self.values[indices]

    @property
    def table(self) -> "FunctionTable":
        return self


class CountingOracle:
    """Wraps a table and tallies every point query made through it.

    ``query_many`` counts one query per requested index.  The tally is guarded
    by a lock, so concurrent callers always see an exact total.
    """

    def __init__(self, inner: FunctionTable):
        self.inner = inner
        self._count = 0
        self._lock = threading.Lock()

    @property
    def spec(self) -> GroupSpec:
        return self.inner.spec

    @property
    def range_size(self) -> int:
        return self.inner.range_size

    @property
    def count(self) -> int:
        return self._count

    def reset(self) -> None:
        with self._lock:
            self._count = 0

    def _tally(self, k: int) -> None:
        with self._lock:
            self._count += k

    def query(self, x: Sequence[int]) -> int:
        value = self.inner.query(x)
        self._tally(1)
        return value

    def query_index(self, i: int) -> int:
        value = self.inner.query_index(i)
        self._tally(1)
        return value

    def query_many(self, indices) -> np.ndarray:
        out = self.inner.query_many(indices)
        self._tally(int(np.size(indices)))
        return out


def make_table(spec: GroupSpec, range_size: int, values, meta: dict | None = None) -> FunctionTable:
    return FunctionTable(spec, range_size, values, dict(meta or {}))


def make_random_function(spec: GroupSpec, range_size: int, seed) -> FunctionTable:
    """Table with i.i.d. uniform entries in ``[0, range_size)``."""
    if range_size < 2:
        raise ValueError(f"range_size must be >= 2, got {range_size}")
    rng = rng_for(seed)
    values = rng.integers(0, range_size, size=spec.order, dtype=np.int64)
    meta = {"generator": "uniform"}
    if isinstance(seed, (int, np.integer)):
        meta["seed"] = int(seed)
    return FunctionTable(spec, range_size, values, meta)


def make_random_nonperiodic(spec: GroupSpec, range_size: int, seed, max_draws: int = 1000) -> FunctionTable:
    """Uniform random table conditioned on being non-periodic (rejection sampling)."""
    from .influence import is_periodic

    rng = rng_for(seed)
    for draw in range(1, max_draws + 1):
        f = make_random_function(spec, range_size, rng)
        if not is_periodic(f)[0]:
            meta = {"generator": "uniform-nonperiodic", "draws": draw}
            if isinstance(seed, (int, np.integer)):
                meta["seed"] = int(seed)
            return FunctionTable(spec, range_size, f.values, meta)
    raise RuntimeError(f"no non-periodic function found in {max_draws} draws")


def make_shifted(g: FunctionTable, s: Sequence[int] | int) -> FunctionTable:
    """Return ``f`` with ``f(x) = g(s + x)`` for every ``x``."""
    perm = g.spec.translation(s)
    s_elem = g.spec.element_at(s) if isinstance(s, (int, np.integer)) else g.spec.element(s)
    meta = dict(g.meta)
    meta["shift"] = list(s_elem)
    return FunctionTable(g.spec, g.range_size, g.values[perm], meta)


def make_mm_bent(k: int, pi: Sequence[int], aux: Sequence[int]) -> FunctionTable:
    """Maiorana-McFarland bent function on Z_2^(2k).

    Writing ``x = (a, b)`` with ``a`` the low ``k`` digits,
    ``f(a, b) = <a, pi(b)> XOR aux[b]``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    size = 1 << k
    pi = np.asarray(pi, dtype=np.int64)
    aux = np.asarray(aux, dtype=np.int64)
    if pi.shape != (size,) or not np.array_equal(np.sort(pi), np.arange(size)):
        raise ValueError(f"pi must be a permutation of range({size})")
    if aux.shape != (size,) or np.any((aux != 0) & (aux != 1)):
        raise ValueError(f"aux must be {size} bits")
    spec = GroupSpec(2, 2 * k)
    idx = np.arange(spec.order, dtype=np.int64)
    a = idx & (size - 1)
    b = idx >> k
    prod = a & pi[b]
    parity = np.zeros_like(prod)
    for bit in range(k):
        parity ^= (prod >> bit) & 1
    values = parity ^ aux[b]
    meta = {"generator": "maiorana-mcfarland", "pi": pi.tolist(), "aux": aux.tolist()}
    return FunctionTable(spec, 2, values, meta)


def random_mm_bent(k: int, seed) -> FunctionTable:
    rng = rng_for(seed)
    size = 1 << k
    return make_mm_bent(k, rng.permutation(size), rng.integers(0, 2, size=size))


# -- serialization -------------------------------------------------------

def _to_document(table: FunctionTable) -> dict[str, Any]:
    doc = {
        "q": table.spec.q,
        "n": table.spec.n,
        "range_size": table.range_size,
        "values": [int(v) for v in table.values],
    }
    if table.meta:
        doc["meta"] = table.meta
    return doc


def serialize(table: FunctionTable) -> bytes:
    """Encode as a UTF-8 JSON document ``{q, n, range_size, values, meta?}``."""
    return json.dumps(_to_document(table), sort_keys=True).encode("utf-8")


def _require_int(doc, key):
    value = doc.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise OracleFormatError(f"field {key!r} must be an integer")
    return value


def deserialize(data: bytes | str) -> FunctionTable:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise OracleFormatError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise OracleFormatError("oracle document must be a JSON object")
    q, n = _require_int(doc, "q"), _require_int(doc, "n")
    range_size = _require_int(doc, "range_size")
    values = doc.get("values")
    if not isinstance(values, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in values
    ):
        raise OracleFormatError("field 'values' must be an array of integers")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise OracleFormatError("field 'meta' must be an object")
    try:
        spec = GroupSpec(q, n)
    except (ValueError, OverflowError) as exc:
        raise OracleFormatError(str(exc)) from exc
    if len(values) != spec.order:
        raise OracleFormatError(f"expected {spec.order} values, got {len(values)}")
    if range_size < 2:
        raise OracleFormatError("range_size must be >= 2")
    if any(v < 0 or v >= range_size for v in values):
        raise OracleFormatError(f"values must lie in [0, {range_size})")
    return FunctionTable(spec, range_size, values, meta)


def save(table: FunctionTable, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(table))


def load(path) -> FunctionTable:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
