from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smoothext.conditions import (
    FAILS,
    HOLDS,
    ClassifyParams,
    SequenceSpec,
    check_necessary_point,
    check_ratio,
    check_sufficient,
    check_vogt,
    classify,
    custom_sequence,
    dn_sequence_q,
    dn_sequence_q_direct,
    eps_grid,
    ratio_term,
    recheck_sufficient_cell,
    select_regular_points,
)
from smoothext.conditions.checks import _Neighbours, necessary_violation
from smoothext.conditions.classify import truncation_floor
from smoothext.conditions.selection import ladder_exponent
from smoothext.interpolation import PointSet
from smoothext.numerics import ctx, scalar

TINY = ctx.ldexp(1, -200)


# sequences ----------------------------------------------------------------------------


def test_unknown_family_rejected():
    with pytest.raises(ValueError, match="unknown family"):
        SequenceSpec("nope")


def test_geometric_logs_are_exact():
    seq = SequenceSpec("exp-geometric", p=2, length=10)
    assert seq.log_values[9] == -(2**10)


def test_factorial_values_refused_beyond_cap():
    seq = SequenceSpec("exp-factorial", length=60)
    with pytest.raises(ValueError, match="30"):
        seq.values()
    # the log values themselves are fine
    assert seq.log_values[59] == -ctx.mpf(factorial(60))
    assert len(seq.pointset()) == 31


def test_custom_sequence_must_decrease():
    with pytest.raises(ValueError, match="strictly decreasing"):
        custom_sequence([1, 0.5, 0.7]).log_values


def test_almost_accumulation_clusters():
    seq = SequenceSpec("almost-accumulation", length=4)
    assert len(seq.values()) == sum(k + 1 for k in range(1, 5))


# selection --------------------------------------------------------------------------------


@pytest.mark.parametrize("k", [1, 2])
def test_equispaced_points_use_scheme_a(k):
    eps = scalar("0.1")
    K = PointSet(tuple(eps * i / (k + 1) for i in range(k + 2)))
    sel = select_regular_points(K, K.nodes[-1], eps, k)
    assert sel.scheme == "A"
    assert min(sel.gaps()) >= eps / (4 * k)


def test_scheme_a_gap_bounds_on_exponential_sequence():
    # each step lands on the largest node at least eps/4k lower, so the gap
    # exceeds eps/4k by less than the gap of K just above the chosen node
    K = SequenceSpec("exp-power", alpha=1, length=80).pointset()
    k = 3
    checked = 0
    for e in range(4, 9):
        eps = ctx.ldexp(1, -e)
        for x in K.nodes:
            sel = select_regular_points(K, x, eps, k, truncation_floor(K))
            if sel is None or sel == "truncated" or sel.scheme != "A":
                continue
            for upper, lower in zip(sel.nodes, sel.nodes[1:]):
                above = K.nodes[K.nodes.index(lower) + 1]
                assert upper - lower >= eps / (4 * k)
                assert upper - lower < eps / (4 * k) + (above - lower)
                if above - lower < eps / (4 * k):
                    assert upper - lower < eps / (2 * k)
            checked += 1
    assert checked > 0


def test_window_with_k_points_fails():
    K = PointSet(tuple(scalar(v) for v in ("0", "0.01", "0.02")))
    assert select_regular_points(K, scalar("0.01"), scalar("0.5"), 3) is None


def test_ladder_exponent_equation():
    for k in (1, 2, 5):
        p = ladder_exponent(k)
        assert abs(k * p ** (2 * k + 1) - (k + 1)) < TINY


# sufficient ---------------------------------------------------------------------------------


def test_sufficient_holds_for_exp_power_two():
    seq = SequenceSpec("exp-power", alpha=2)
    K = seq.pointset()
    v = check_sufficient(K, 0, 2, 2, 1, 2, floor=truncation_floor(K))
    assert v.status == HOLDS


def test_single_point_is_vacuous():
    v = check_sufficient(PointSet((scalar(0),)), 0, 2, 2, 1, 1)
    assert v.status == HOLDS
    assert any("vacuous" in note for note in v.notes)


def test_sufficient_fails_for_factorial_with_valid_witnesses():
    seq = SequenceSpec("exp-factorial")
    K = seq.pointset()
    floor = truncation_floor(K)
    v = check_sufficient(K, 0, 2, 2, 1, 2, floor=floor)
    assert v.status == FAILS and v.witnesses
    for w in v.witnesses:
        again = recheck_sufficient_cell(K, w["x"], w["eps"], 0, 2, 2, 1, 2, floor)
        if w["kind"] == "no-tuple":
            assert again is None


@pytest.mark.parametrize("alpha", [2])
def test_grid_refinement_does_not_flip(alpha):
    seq = SequenceSpec("exp-power", alpha=alpha)
    K = seq.pointset()
    floor = truncation_floor(K)
    for per_octave in (1, 2):
        v = check_sufficient(K, 0, 2, 2, 1, 2, eps_grid(2, 40, per_octave), floor)
        assert v.status == HOLDS


# necessary ------------------------------------------------------------------------------


def test_necessary_rejects_small_s():
    with pytest.raises(ValueError):
        check_necessary_point(PointSet((scalar(0),)), 0, 1)


def test_equispaced_grid_never_violates():
    K = PointSet(tuple(scalar(i) / 1000 for i in range(1001)))
    for n in range(4):
        for s in range(2, 7):
            assert check_necessary_point(K, n, s, eps_grid(2, 20)).status == HOLDS


def test_almost_accumulation_witness_is_a_cluster_base():
    seq = SequenceSpec("almost-accumulation", length=30)
    K = seq.pointset()
    v = check_necessary_point(K, 1, 3, eps_grid(2, 30))
    assert v.status == FAILS
    nb = _Neighbours(K)
    for w in v.witnesses:
        z, eps = w["z"], w["eps"]
        k = int(ctx.nint(1 / z))
        assert 0 <= z - ctx.one / k < (k + 1) * ctx.exp(-k)
        assert necessary_violation(nb, z, eps, 1, 3)


def test_exp_power_two_necessary_holds_for_large_s():
    K = SequenceSpec("exp-power", alpha=2).pointset()
    for n in range(4):
        for s in range(3, 7):
            assert check_necessary_point(K, n, s).status == HOLDS


def test_exp_power_two_s2_violations_match_closed_form():
    # an empty annulus (eps^2, eps) means no square lies in (L, 2L), L = log(1/eps)
    K = SequenceSpec("exp-power", alpha=2).pointset()
    grid = eps_grid()
    expected = set()
    for eps in grid:
        L = -ctx.log(eps)
        if not any(L < ell * ell < 2 * L for ell in range(1, 60)):
            expected.add(eps)
    assert expected == {ctx.ldexp(1, -2), ctx.ldexp(1, -6)}
    nb = _Neighbours(K)
    for n in range(4):
        bad = {eps for eps in grid if any(necessary_violation(nb, z, eps, n, 2) for z in K.nodes)}
        assert bad == expected
        assert check_necessary_point(K, n, 2, eps_grid(7, 40)).status == HOLDS


# ratio and Vogt -------------------------------------------------------------------------------


def test_ratio_telescopes_for_geometric():
    seq = SequenceSpec("exp-geometric", p=3, length=30)
    v = check_ratio(seq, 3)
    assert all(y == 0 for _, y in v.series)
    assert v.status == HOLDS


def test_ratio_factorial_closed_form():
    seq = SequenceSpec("exp-factorial", length=40)
    for p in (1, 2, 5, 20):
        v = check_ratio(seq, p)
        assert v.status == FAILS
        for ell, y in v.series[:20]:
            assert y == factorial(ell) * (ell + 1 - p)
        w = v.witnesses[0]
        assert ratio_term(seq, p, w["index"]) == w["value"]


def test_ratio_exp_power_two():
    seq = SequenceSpec("exp-power", alpha=2, length=50)
    v = check_ratio(seq, 2)
    for ell, y in v.series:
        assert y == -(ell**2) + 2 * ell + 1
    assert v.status == HOLDS


def test_vogt_exponential():
    v = check_vogt(SequenceSpec("exp-power", alpha=1, length=200))
    assert v.status == HOLDS
    assert all(abs(y - 1) < TINY for _, y in v.parts["b"].series)
    assert v.params["q"] == 1


def test_vogt_square_exponent_fails_b():
    v = check_vogt(SequenceSpec("exp-power", alpha=2, length=60))
    assert v.parts["b"].status == FAILS
    assert v.status == FAILS


def test_vogt_harmonic_needs_q_two():
    v = check_vogt(custom_sequence([Fraction(1, n) for n in range(1, 400)]))
    assert v.status == HOLDS
    assert v.parts["c"].params["q"] == 2


# dn_sequence_q ----------------------------------------------------------------------------------


def test_dn_empty_product_when_k_equals_s():
    seq = SequenceSpec("exp-power", alpha=1, length=60)
    n, k, r = 1, 3, 5
    got = dn_sequence_q(seq, n, k, r, k, 4).logmag
    expected = (r - 2 * k * (2 * n + 2)) * (-4) - (3 * n + 4) * (-(4 + k))
    assert got == expected


def test_dn_rejects_bad_arguments():
    seq = SequenceSpec("exp-power", alpha=1, length=20)
    with pytest.raises(ValueError):
        dn_sequence_q(seq, 0, 3, 1, 2, 1)
    slow = SequenceSpec("power-log", length=50)
    with pytest.raises(ValueError, match="halving"):
        dn_sequence_q(slow, 0, 1, 1, 1, 1)


@pytest.mark.parametrize("p", [2, 3])
def test_dn_geometric_telescoping_constant(p):
    seq = SequenceSpec("exp-geometric", p=p, length=60)
    n, s, r, k = 1, 3, 50, 8
    ratios = [dn_sequence_q(seq, n, s, r, k, d).logmag / ctx.mpf(p) ** d for d in range(5, 41)]
    # closed form: -(r - 2kM) + (3n+4) p^k - 4M sum_{j=1}^{k-s} p^j
    M = 2 * n + 2
    closed = -(r - 2 * k * M) + (3 * n + 4) * p**k - 4 * M * sum(p**j for j in range(1, k - s + 1))
    for v in ratios:
        assert abs(v - closed) <= TINY * abs(closed)


def test_dn_geometric_diverges_for_admissible_s():
    p, n = 2, 1
    s = next(s for s in range(1, 10) if p ** (1 - s) * 4 * (2 * n + 2) < 3 * n + 4)
    seq = SequenceSpec("exp-geometric", p=p, length=60)
    traj = [dn_sequence_q(seq, n, s, 20, 14, d).logmag for d in range(1, 30)]
    assert traj[-1] > traj[-2] > 0


def test_dn_exp_power_two_goes_to_minus_infinity():
    seq = SequenceSpec("exp-power", alpha=2, length=60)
    n = 1
    for k in (1, 2, 3):
        r = 4 * k * (2 * n + 2)
        traj = [dn_sequence_q(seq, n, 1, r, k, d).logmag for d in range(1, 41)]
        tail = traj[20:]
        assert all(b < a for a, b in zip(tail, tail[1:]))
        assert traj[-1] < -1000


def test_dn_log_matches_direct_evaluation():
    seq = SequenceSpec("exp-power", alpha=1, length=40)
    for d in (1, 5, 10):
        a = dn_sequence_q(seq, 1, 2, 7, 4, d)
        b = dn_sequence_q_direct(seq, 1, 2, 7, 4, d)
        assert abs(a.logmag - b.logmag) <= ctx.ldexp(1, -100) * max(1, abs(a.logmag))


@given(st.integers(0, 3), st.integers(1, 4), st.integers(0, 60), st.integers(0, 4), st.integers(1, 20))
def test_dn_raising_r_lowers_q(n, s, r, extra, d):
    seq = SequenceSpec("exp-power", alpha=1, length=60)
    k = s + extra
    assert dn_sequence_q(seq, n, s, r + 1, k, d) < dn_sequence_q(seq, n, s, r, k, d)


# classify -----------------------------------------------------------------------------------------


def test_classify_quick_families():
    quick = ClassifyParams(dn_n=(0, 1), dn_s=(1, 2, 3))
    cases = {
        SequenceSpec("exp-power", alpha=2): "positive",
        SequenceSpec("exp-factorial"): "negative",
        SequenceSpec("exp-geometric", p=2): "negative",
    }
    for seq, expected in cases.items():
        out = classify(seq, quick)
        assert out.overall == expected, seq.label()
        assert out.consistent_with_paper == "yes"


def test_classify_factorial_negative_via_ratio():
    out = classify(SequenceSpec("exp-factorial"))
    assert all(v.fails for v in out.ratio)
    assert any("ratio" in r for r in out.reasons)


def test_classify_geometric_negative_via_dn():
    out = classify(SequenceSpec("exp-geometric", p=2))
    assert any("dn-sequence" in r for r in out.reasons)


def test_failing_verdicts_carry_witnesses():
    out = classify(SequenceSpec("exp-factorial"), ClassifyParams(dn_n=(0,), dn_s=(1,)))
    for v in out.verdicts():
        if v.fails:
            assert v.witnesses
