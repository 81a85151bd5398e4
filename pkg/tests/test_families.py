import math

import numpy as np
import pytest

from glsdim import (ExplicitWeights, FamilyParameterError, NormalizationError,
                    make_family)

from conftest import GOLDEN_RATIO


ALL_KINDS = ["luroth", "geometric", "golden", "loglog", "explicit_tail", "explicit_finite"]


def build(kind):
    if kind == "geometric":
        return make_family("geometric", ratio=0.5)
    if kind == "explicit_tail":
        return make_family("explicit", values=[0.4, 0.3], tail_ratio=0.5)
    if kind == "explicit_finite":
        return make_family("explicit", values=[1 / 3, 1 / 3, 1 / 3])
    return make_family(kind)


@pytest.fixture(scope="module", params=ALL_KINDS)
def family(request):
    return build(request.param)


def test_luroth_first_weight_is_half(luroth):
    # telescoping: sum 1/((i+1)(i+2)) = 1, and q_0 = 1/(1*2)
    assert luroth.weight(0) == 0.5
    assert luroth.weight(3) == pytest.approx(1 / 20)


def test_luroth_tail_is_telescoped(luroth):
    for k in (0, 1, 7, 100):
        assert luroth.tail_sum_from(k) == pytest.approx(1.0 / (k + 1), rel=1e-15)


def test_golden_partial_sums_converge_to_one(golden):
    # geometric series with first term phi^-2 and ratio phi^-1 sums to 1
    # because phi^2 = phi + 1
    partial = sum(GOLDEN_RATIO ** -(i + 2) for i in range(200))
    assert partial == pytest.approx(1.0, abs=1e-15)
    for i in range(10):
        assert golden.weight(i) == pytest.approx(GOLDEN_RATIO ** -(i + 2), rel=1e-14)


def test_loglog_normalizer_against_independent_bracket(loglog):
    # oracle: reverse-order summation of 10^6 terms plus the plain integral
    # test bracket [1/ln(M+2), f(M) + 1/ln(M+2)] for the remainder
    m = 10 ** 6
    i = np.arange(m, dtype=np.float64)[::-1]
    t = i + 2.0
    partial = float((1.0 / (t * np.log(t) ** 2)).sum())
    f_m = 1.0 / ((m + 2.0) * math.log(m + 2.0) ** 2)
    s_lo = partial + 1.0 / math.log(m + 2.0)
    s_hi = partial + f_m + 1.0 / math.log(m + 2.0)
    a_lo, a_hi = 1.0 / s_hi, 1.0 / s_lo
    a_family = loglog.weight(0) * (2.0 * math.log(2.0) ** 2)
    assert a_lo - 1e-12 <= a_family <= a_hi + 1e-12
    br_lo, br_hi = loglog.normalizer_bracket
    assert br_lo <= a_family <= br_hi
    assert br_hi - br_lo < 1e-12


def test_total_mass_within_tolerance(family):
    lo, hi = family.total_mass_bounds()
    assert lo <= 1.0 <= hi
    assert hi - lo < 1e-12


def test_weight_deterministic_and_positive(family):
    top = 50 if family.alphabet_size is None else family.alphabet_size
    for i in range(top):
        w1, w2 = family.weight(i), family.weight(i)
        assert w1 == w2 and w1 > 0.0


def test_weight_block_matches_scalar(family):
    top = 40 if family.alphabet_size is None else family.alphabet_size
    block = family.weight_block(0, top)
    for i in range(top):
        assert block[i] == family.weight(i)


def test_tail_power_bounds_ordering_and_monotone_in_k(family):
    for x in (0.0, 0.3, 0.6, 0.9, 1.0):
        prev_lo = math.inf
        for k in (1, 4, 16, 64):
            lo, hi = family.tail_power_bounds(k, x)
            assert lo <= hi
            assert math.isfinite(lo)
            assert lo <= prev_lo + 1e-12
            prev_lo = lo


@pytest.mark.parametrize("kind", ["luroth", "loglog"])
@pytest.mark.parametrize("x", [0.62, 0.8, 1.0])
def test_tail_power_bounds_enclose_brute_sum(kind, x):
    if kind == "loglog" and x < 1.0:
        pytest.skip("divergent regime: covered by the sentinel test")
    fam = build(kind)
    k = 50
    # oracle: 10^6 exact terms, then a plain coarse integral-test bracket
    i = np.arange(k, k + 10 ** 6, dtype=np.float64)
    q = fam.weight_block(k, k + 10 ** 6)
    s = float((q ** x).sum())
    m = k + 10 ** 6
    if kind == "luroth":
        t_lo = (m + 2.0) ** (1 - 2 * x) / (2 * x - 1)
        t_hi = fam.weight(m) ** x + (m + 1.0) ** (1 - 2 * x) / (2 * x - 1)
    else:
        t_lo = fam.weight(0) * (2.0 * math.log(2.0) ** 2) / math.log(m + 2.0)
        t_hi = fam.weight(m) + t_lo
    lo, hi = fam.tail_power_bounds(k, x)
    assert lo <= s + t_hi
    assert s + t_lo <= hi
    assert hi - lo < 1e-3 * max(lo, 1e-30)


def test_divergent_tails_report_huge_lower():
    lu, ll = build("luroth"), build("loglog")
    for x in (0.0, 0.25, 0.5):
        lo, hi = lu.tail_power_bounds(10, x)
        assert lo > 1e100 and hi == math.inf
    for x in (0.0, 0.5, 0.999999):
        lo, hi = ll.tail_power_bounds(10, x)
        assert lo > 1e100 and hi == math.inf


def test_geometric_tail_closed_forms(geometric_half):
    fam = geometric_half
    for k in (0, 3, 10):
        assert fam.tail_sum_from(k) == 0.5 ** k
        lo, hi = fam.tail_power_bounds(k, 1.0)
        assert lo <= 0.5 ** k <= hi
    # sum_{i>=0} ((1/2)(1/2)^i)^x = 2^-x / (1 - 2^-x)
    x = 0.7
    expected = 2.0 ** -x / (1.0 - 2.0 ** -x)
    lo, hi = fam.tail_power_bounds(0, x)
    assert lo <= expected <= hi
    assert hi - lo < 1e-12


@pytest.mark.parametrize("kind", ["luroth", "loglog"])
@pytest.mark.parametrize("x", [0.7, 1.0])
def test_block_power_bounds_match_exact_summation(kind, x):
    fam = build(kind)
    a, b = 1 << 16, (1 << 16) + 150_000  # forces the bracketed path
    exact = float((fam.weight_block(a, b) ** x).sum())
    lo, hi = fam.block_power_bounds(a, b, x)
    assert lo <= exact <= hi
    assert hi - lo < 1e-6 * exact
    # small blocks take the exact path and are tight
    lo, hi = fam.block_power_bounds(3, 30, x)
    exact_small = float((fam.weight_block(3, 30) ** x).sum())
    assert lo <= exact_small <= hi
    assert hi - lo < 1e-12


def test_block_power_bounds_geometric_exact(geometric_half):
    a, b, x = 2, 40, 0.8
    exact = float((geometric_half.weight_block(a, b) ** x).sum())
    lo, hi = geometric_half.block_power_bounds(a, b, x)
    assert lo <= exact <= hi and hi - lo < 1e-12


def test_explicit_tail_family_weights():
    fam = build("explicit_tail")
    # remaining mass 0.3 spread as c * 0.5^j with c = 0.3 * 0.5
    assert fam.weight(0) == 0.4
    assert fam.weight(2) == pytest.approx(0.15)
    assert fam.weight(3) == pytest.approx(0.075)
    assert fam.tail_sum_from(2) == pytest.approx(0.3)
    assert fam.q_max == 0.4


def test_explicit_finite_family_is_bounded():
    fam = build("explicit_finite")
    assert fam.alphabet_size == 3
    assert fam.tail_sum_from(3) == 0.0
    with pytest.raises(IndexError):
        fam.weight(3)


def test_q_max_accessor(luroth, geometric_half, golden, loglog):
    assert luroth.q_max == 0.5
    assert geometric_half.q_max == 0.5
    assert golden.q_max == pytest.approx(GOLDEN_RATIO ** -2, rel=1e-14)
    assert loglog.q_max == loglog.weight(0)


def test_parameter_errors_name_the_field():
    with pytest.raises(FamilyParameterError, match="ratio"):
        make_family("geometric", ratio=1.5)
    with pytest.raises(FamilyParameterError, match="ratio"):
        make_family("geometric")
    with pytest.raises(FamilyParameterError, match="values"):
        make_family("explicit")
    with pytest.raises(FamilyParameterError, match="values"):
        make_family("explicit", values=[0.5, -0.1])
    with pytest.raises(FamilyParameterError, match="tail_ratio"):
        make_family("explicit", values=[0.5], tail_ratio=1.0)
    with pytest.raises(FamilyParameterError, match="kind"):
        make_family("cantor")


def test_explicit_mass_errors():
    with pytest.raises(NormalizationError):
        make_family("explicit", values=[0.5, 0.6])
    with pytest.raises(NormalizationError):
        make_family("explicit", values=[0.5, 0.5], tail_ratio=0.5)
    # diagnostics path: construction without the mass check is possible
    fam = ExplicitWeights([0.5, 0.6], check_mass=False)
    lo, hi = fam.total_mass_bounds()
    assert lo > 1.0 + 1e-9
