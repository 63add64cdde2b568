import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from hiddenshift.group import make_group
from hiddenshift.influence import is_periodic
from hiddenshift.injectivization import (
    average_case_m,
    bent_m,
    brute_force_shifts,
    build_fV,
    exact_failure_rate,
    fV_components,
    is_injective,
    make_tuple,
    random_function_failure_bound,
    sample_V_distinct,
    sample_V_uniform,
)
from hiddenshift.oracle import (
    CountingOracle,
    make_mm_bent,
    make_random_function,
    make_shifted,
    make_table,
)


def _direct_fV(f, V):
    """Tuples f(x + v_k) built element by element."""
    spec = f.spec
    return [tuple(f.query(spec.mul(x, v)) for v in V.components) for x in spec.elements()]


def test_build_fV_identity_tuple():
    f = make_random_function(make_group(3, 2), 4, 1)
    fV = build_fV(f, make_tuple(f.spec, [f.spec.identity]))
    assert [t[0] for t in fV.decoded()] == f.values.tolist()


def test_build_fV_hand_example():
    spec = make_group(2, 2)
    f = make_table(spec, 2, [0, 1, 1, 0])
    fV = build_fV(f, make_tuple(spec, [(0, 0), (1, 0)]))
    assert fV.decoded() == [(0, 1), (1, 0), (1, 0), (0, 1)]
    assert is_injective(fV) == (False, (0, 3))
    assert fV.table.range_size == 4


@given(st.integers(2, 4), st.integers(1, 3), st.integers(2, 5), st.integers(1, 6), st.integers(0, 2**32))
def test_build_fV_matches_definition(q, n, S, m, seed):
    spec = make_group(q, n)
    f = make_random_function(spec, S, seed)
    V = sample_V_uniform(spec, m, seed + 1)
    counter = CountingOracle(f)
    fV = build_fV(counter, V)
    assert counter.count == m * spec.order
    assert fV.decoded() == _direct_fV(f, V)
    assert np.array_equal(fV.components(), fV_components(f, V))
    assert np.array_equal(fV.components(), np.array(_direct_fV(f, V)))


def test_wide_encoding():
    spec = make_group(2, 4)
    f = make_random_function(spec, 3, 0)
    V = sample_V_uniform(spec, 50, 1)
    with pytest.raises(OverflowError):
        build_fV(f, V)
    comps = fV_components(f, V)
    assert comps.shape == (16, 50)
    rows = _direct_fV(f, V)
    assert comps.tolist() == [list(r) for r in rows]
    assert is_injective(comps)[0] == (len(set(rows)) == len(rows))
    const = make_table(spec, 3, [2] * 16)
    assert is_injective(fV_components(const, V)) == (False, (0, 1))


def test_build_fV_spec_mismatch():
    f = make_random_function(make_group(2, 3), 2, 0)
    with pytest.raises(ValueError):
        build_fV(f, make_tuple(make_group(3, 2), [0]))


def test_sample_V_distinct_examples():
    spec = make_group(2, 3)
    V = sample_V_distinct(spec, 8, 3)
    assert sorted(V.indices) == list(range(8)) and V.distinct
    assert sorted(sample_V_distinct(make_group(2, 1), 2, 9).components) == [(0,), (1,)]
    assert sample_V_distinct(spec, 5, 11).indices == sample_V_distinct(spec, 5, 11).indices
    with pytest.raises(ValueError):
        sample_V_distinct(spec, 9, 0)


def test_sample_V_distinct_many_draws():
    spec = make_group(2, 8)
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        assert len(set(sample_V_distinct(spec, 64, rng).indices)) == 64


def test_sample_V_uniform_chi_square():
    spec = make_group(2, 1)
    counts = np.zeros(4, dtype=int)
    for seed in range(100_000):
        a, b = sample_V_uniform(spec, 2, seed).indices
        counts[2 * a + b] += 1
    assert chisquare(counts).pvalue > 0.001


def test_sample_V_uniform_birthday_rate():
    spec = make_group(2, 3)
    rng = np.random.default_rng(5)
    draws = 100_000
    repeats = sum(len(set(sample_V_uniform(spec, 2, rng).indices)) == 1 for _ in range(draws))
    p = 1 / spec.order
    assert abs(repeats / draws - p) <= 4 * np.sqrt(p * (1 - p) / draws)


def test_sample_V_uniform_determinism_and_errors():
    spec = make_group(3, 2)
    assert sample_V_uniform(spec, 7, 1).indices == sample_V_uniform(spec, 7, 1).indices
    assert not sample_V_uniform(spec, 7, 1).distinct
    with pytest.raises(ValueError):
        sample_V_uniform(spec, 0, 1)


def test_is_injective_examples():
    spec = make_group(2, 3)
    assert is_injective(make_table(spec, 8, range(8))) == (True, None)
    assert is_injective(make_table(spec, 2, [0] * 8)) == (False, (0, 1))


@given(st.lists(st.integers(0, 5), min_size=2, max_size=30))
def test_is_injective_witness_is_least_pair(values):
    pairs = [(i, j) for i, j in itertools.combinations(range(len(values)), 2)
             if values[i] == values[j]]
    ok, witness = is_injective(np.array(values))
    assert ok == (not pairs)
    assert witness == (min(pairs) if pairs else None)
    rows = np.array([[v % 2, v // 2] for v in values])
    assert is_injective(rows) == (ok, witness)


@pytest.mark.parametrize("args, expected", [
    ((256, 2, 44), Fraction(1, 64)),
    ((4, 2, 2), Fraction(8)),
    ((256, 2, 45), Fraction(1, 128)),
    ((9, 3, 5), Fraction(81, 27)),
])
def test_random_function_failure_bound(args, expected):
    assert random_function_failure_bound(*args) == expected


def test_m_presets():
    assert average_case_m(256, 2) == 36
    assert average_case_m(256, 2, epsilon=1.0) == 40
    assert average_case_m(9, 3) == 9
    assert bent_m(4) == 11
    assert bent_m(6, 0.5) == 16


def test_brute_force_shifts_examples():
    spec = make_group(3, 2)
    g = make_table(spec, 9, np.random.default_rng(0).permutation(9))
    s = (2, 1)
    assert brute_force_shifts(make_shifted(g, s), g) == {s}
    const = make_table(spec, 2, [1] * 9)
    assert brute_force_shifts(const, const) == set(spec.elements())


def test_brute_force_shifts_independent_pairs():
    spec = make_group(2, 6)
    for seed in range(100):
        f = make_random_function(spec, 2, 2 * seed)
        g = make_random_function(spec, 2, 2 * seed + 1)
        assert brute_force_shifts(f, g) == set()


def test_brute_force_shifts_rejects_mismatch():
    f = make_random_function(make_group(2, 2), 2, 0)
    with pytest.raises(ValueError):
        brute_force_shifts(f, make_random_function(make_group(2, 2), 3, 0))
    with pytest.raises(ValueError):
        brute_force_shifts(f, make_random_function(make_group(4, 1), 2, 0))


# -- exact enumeration against independent python loops -------------------

def _python_over_f(spec, S, V):
    fails = 0
    for values in itertools.product(range(S), repeat=spec.order):
        f = make_table(spec, S, values)
        rows = _direct_fV(f, V)
        fails += len(set(rows)) < len(rows)
    return Fraction(fails, S**spec.order)


def _python_over_V(f, m):
    spec = f.spec
    fails = 0
    for combo in itertools.product(range(spec.order), repeat=m):
        rows = _direct_fV(f, make_tuple(spec, combo))
        fails += len(set(rows)) < len(rows)
    return Fraction(fails, spec.order**m)


def test_exact_over_f_small_hand_case():
    spec = make_group(2, 1)
    V = make_tuple(spec, [(0,), (1,)], distinct=True)
    assert exact_failure_rate("over-f", spec, 2, V=V) == Fraction(1, 2)
    assert random_function_failure_bound(2, 2, 2) == 2


@pytest.mark.parametrize("q, n, S, m, seed", [(2, 2, 2, 3, 0), (3, 1, 3, 2, 1), (2, 3, 2, 4, 2)])
def test_exact_over_f_matches_python(q, n, S, m, seed):
    spec = make_group(q, n)
    V = sample_V_distinct(spec, m, seed)
    assert exact_failure_rate("over-f", spec, S, V=V) == _python_over_f(spec, S, V)


def test_exact_over_V_constant():
    spec = make_group(2, 2)
    assert exact_failure_rate("over-V", spec, 2, m=3, f=make_table(spec, 2, [1] * 4)) == 1


def test_exact_over_V_inner_product():
    f = make_mm_bent(1, [0, 1], [0, 0])
    rate = exact_failure_rate("over-V", f.spec, 2, m=6, f=f)
    assert rate == _python_over_V(f, 6)
    assert rate <= Fraction(3, 32)


def test_exact_failure_rate_guards():
    spec = make_group(2, 5)
    with pytest.raises(ValueError):
        exact_failure_rate("over-f", spec, 2, V=sample_V_distinct(spec, 3, 0))
    with pytest.raises(ValueError):
        exact_failure_rate("over-V", spec, 2, m=5, f=make_random_function(spec, 2, 0))
    with pytest.raises(ValueError):
        exact_failure_rate("sideways", spec, 2)


# -- properties -------------------------------------------------------------

@settings(max_examples=60)
@given(st.sampled_from([(2, 3), (3, 2), (4, 1), (2, 2)]), st.integers(2, 3),
       st.integers(1, 4), st.integers(0, 2**32), st.booleans(), st.data())
def test_injectivization_preserves_shift(group, S, m, seed, planted, data):
    spec = make_group(*group)
    g = make_random_function(spec, S, seed)
    if planted:
        f = make_shifted(g, spec.element_at(data.draw(st.integers(0, spec.order - 1))))
    else:
        f = make_random_function(spec, S, seed + 1)
    V = sample_V_uniform(spec, m, seed + 2)
    assert brute_force_shifts(f, g) == brute_force_shifts(build_fV(f, V), build_fV(g, V))


@given(st.integers(0, 2**32), st.integers(1, 6), st.integers(1, 6))
def test_appending_components_keeps_injectivity(seed, m1, m2):
    spec = make_group(2, 3)
    f = make_random_function(spec, 2, seed)
    V = sample_V_uniform(spec, m1, seed + 1)
    W = V.extend(sample_V_uniform(spec, m2, seed + 2))
    if is_injective(build_fV(f, V))[0]:
        assert is_injective(build_fV(f, W))[0]


@given(st.integers(0, 2**32), st.integers(1, 8))
def test_periodic_input_never_injectivizes(seed, m):
    spec = make_group(2, 3)
    half = make_random_function(make_group(2, 2), 3, seed).values
    f = make_table(spec, 3, np.concatenate([half, half]))  # period (0, 0, 1)
    assert is_periodic(f)[0]
    assert not is_injective(build_fV(f, sample_V_uniform(spec, m, seed)))[0]


def test_monte_carlo_respects_bound_small():
    spec = make_group(2, 3)
    m = 8
    V = sample_V_distinct(spec, m, 0)
    bound = float(random_function_failure_bound(spec.order, 4, m))
    assert bound == 0.25
    trials = 4000
    rng = np.random.default_rng(1)
    fails = sum(not is_injective(build_fV(make_random_function(spec, 4, rng), V))[0]
                for _ in range(trials))
    rate = fails / trials
    assert rate <= bound + 3 * np.sqrt(rate * (1 - rate) / trials)
