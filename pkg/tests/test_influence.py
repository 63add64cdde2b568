import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hiddenshift.group import make_group
from hiddenshift.influence import (
    fwht,
    influence_counts_from_spectrum,
    influence_failure_bounds,
    influence_of,
    influence_profile,
    is_bent,
    is_perfectly_nonlinear,
    is_periodic,
    profile_to_csv,
    walsh_spectrum,
)
from hiddenshift.injectivization import exact_failure_rate
from hiddenshift.oracle import make_mm_bent, make_random_function, make_table, random_mm_bent


def _direct_gamma(f, v):
    spec = f.spec
    flips = sum(f.query(x) != f.query(spec.mul(x, v)) for x in spec.elements())
    return Fraction(flips, spec.order)


def _direct_walsh(values, n):
    return [sum((-1) ** (int(values[x]) + bin(x & w).count("1")) for x in range(1 << n))
            for w in range(1 << n)]


def _all_boolean(n):
    spec = make_group(2, n)
    for bits in itertools.product((0, 1), repeat=1 << n):
        yield make_table(spec, 2, bits)


inner_product = make_mm_bent(1, [0, 1], [0, 0])


def test_influence_examples():
    spec = make_group(3, 2)
    f = make_random_function(spec, 4, 0)
    assert influence_of(f, spec.identity) == 0
    assert influence_of(make_table(spec, 4, [2] * 9), (1, 2)) == 0
    for v in range(1, 4):
        assert influence_of(inner_product, inner_product.spec.element_at(v)) == Fraction(1, 2)


def test_profile_parity_and_dictator():
    spec = make_group(2, 3)
    parity = make_table(spec, 2, [bin(x).count("1") % 2 for x in range(8)])
    profile = influence_profile(parity)
    for v in range(8):
        assert profile.gamma(v) == bin(v).count("1") % 2
    assert profile.gamma_min == 0
    dictator = make_table(spec, 2, [x & 1 for x in range(8)])
    assert influence_profile(dictator).gammas() == [Fraction(v & 1) for v in range(8)]


def test_bent_profiles_are_half():
    for seed in range(10):
        profile = influence_profile(random_mm_bent(2, seed))
        assert profile.gammas()[1:] == [Fraction(1, 2)] * 15
        assert profile.gamma_min == Fraction(1, 2)


@given(st.sampled_from([(2, 3), (3, 2), (4, 2), (5, 1), (6, 1)]), st.integers(2, 4), st.integers(0, 2**32))
def test_profile_matches_definition_and_symmetry(group, S, seed):
    spec = make_group(*group)
    f = make_random_function(spec, S, seed)
    profile = influence_profile(f)
    assert profile.gamma(0) == 0
    for v in spec.elements():
        assert profile.gamma(v) == _direct_gamma(f, v)
        assert profile.gamma(v) == profile.gamma(spec.inv(v))
    assert (profile.gamma_min == 0) == is_periodic(f)[0]


def test_is_periodic_examples():
    spec = make_group(2, 2)
    assert is_periodic(make_table(spec, 2, [1] * 4)) == (True, 1)
    assert is_periodic(make_table(spec, 4, [3, 0, 2, 1])) == (False, None)
    assert is_periodic(make_table(spec, 2, [0, 1, 1, 0])) == (True, 3)


def test_bounds_for_bent_functions():
    for n in (2, 4, 6):
        f = random_mm_bent(n // 2, n)
        N = 1 << n
        profile = influence_profile(f)
        previous = None
        for m in range(1, 20):
            sum_bound, min_bound = influence_failure_bounds(profile, m)
            assert sum_bound == Fraction(N, 2) * (N - 1) * Fraction(1, 2**m)
            assert min_bound == Fraction(N * N, 2**m)
            assert sum_bound <= min_bound
            if previous:
                assert sum_bound <= previous[0] and min_bound <= previous[1]
            previous = (sum_bound, min_bound)


def test_bounds_are_monotone_for_random_f():
    profile = influence_profile(make_random_function(make_group(3, 2), 3, 4))
    bounds = [influence_failure_bounds(profile, m) for m in range(1, 30)]
    assert all(a[0] >= b[0] and a[1] >= b[1] for a, b in zip(bounds, bounds[1:]))


def test_inner_product_bound_and_exact_rate():
    sum_bound, _ = influence_failure_bounds(influence_profile(inner_product), 6)
    assert sum_bound == Fraction(3, 32)
    assert exact_failure_rate("over-V", inner_product.spec, 2, m=6, f=inner_product) <= sum_bound


@pytest.mark.parametrize("q, n, S, m", [(2, 2, 2, 3), (2, 2, 3, 4), (3, 1, 2, 5), (2, 3, 2, 4)])
def test_sum_bound_dominates_exact_rate(q, n, S, m):
    spec = make_group(q, n)
    for seed in range(5):
        f = make_random_function(spec, S, seed)
        sum_bound, _ = influence_failure_bounds(influence_profile(f), m)
        assert exact_failure_rate("over-V", spec, S, m=m, f=f) <= sum_bound


def test_walsh_examples():
    spec = make_group(2, 3)
    zero = walsh_spectrum(make_table(spec, 2, [0] * 8)).coefficients
    assert zero.tolist() == [8] + [0] * 7
    a = 5
    linear = make_table(spec, 2, [bin(a & x).count("1") % 2 for x in range(8)])
    coeffs = walsh_spectrum(linear).coefficients
    assert coeffs[a] == 8 and np.count_nonzero(coeffs) == 1
    assert np.abs(walsh_spectrum(inner_product).coefficients).tolist() == [2, 2, 2, 2]


@given(st.integers(1, 7), st.integers(0, 2**32))
def test_walsh_matches_definition_and_parseval(n, seed):
    f = make_random_function(make_group(2, n), 2, seed)
    coeffs = walsh_spectrum(f).coefficients
    assert coeffs.tolist() == _direct_walsh(f.values, n)
    assert int((coeffs.astype(object) ** 2).sum()) == 1 << (2 * n)


def test_fwht_rejects_bad_length():
    with pytest.raises(ValueError):
        fwht(np.ones(6))


def test_walsh_needs_boolean_functions():
    with pytest.raises(ValueError):
        walsh_spectrum(make_random_function(make_group(3, 2), 2, 0))
    with pytest.raises(ValueError):
        is_bent(make_random_function(make_group(2, 2), 3, 0))


def test_is_bent_on_every_mm_construction():
    for k in (1, 2):
        size = 1 << k
        for pi in itertools.permutations(range(size)):
            for aux in itertools.product((0, 1), repeat=size):
                assert is_bent(make_mm_bent(k, pi, aux))


def test_linear_and_odd_dimension_are_not_bent():
    spec = make_group(2, 4)
    assert not is_bent(make_table(spec, 2, [bin(7 & x).count("1") % 2 for x in range(16)]))
    assert not any(is_bent(f) for f in _all_boolean(3))


def _corpus():
    yield from _all_boolean(2)
    spec = make_group(2, 6)
    for seed in range(100):
        yield make_random_function(spec, 2, seed)
    for seed in range(5):
        yield random_mm_bent(3, seed)


def test_walsh_influence_cross_check():
    for f in _corpus():
        spectrum = walsh_spectrum(f)
        assert np.array_equal(influence_counts_from_spectrum(spectrum), influence_profile(f).counts)
        assert is_bent(f) == is_perfectly_nonlinear(f)


def test_profile_csv():
    text = profile_to_csv(influence_profile(inner_product))
    assert text.splitlines() == [
        "v_index,gamma_numerator,gamma_denominator",
        "0,0,4", "1,2,4", "2,2,4", "3,2,4",
    ]
