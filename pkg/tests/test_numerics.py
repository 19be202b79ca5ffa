import math
import pickle
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smoothext.numerics import (
    Jet,
    LogSigned,
    bump_jet,
    ctx,
    lattice_offsets,
    log_sum,
    order_key,
    precision,
    psi_jet,
    scalar,
    scaled_patch_jet,
)
from smoothext.numerics import backend as sc


# Scalar backend -------------------------------------------------------------


def test_tiny_values_do_not_underflow():
    x = ctx.exp(-ctx.mpf(math.factorial(25)))
    assert x > 0
    big = ctx.mpf(math.factorial(25))
    assert abs(ctx.log(x) + big) <= big * ctx.mpf("1e-60")


def test_precision_context_restores():
    before = sc.get_precision()
    with precision(64):
        assert sc.get_precision() == 64
    assert sc.get_precision() == before


def test_precision_bounds_rejected():
    with pytest.raises(ValueError):
        sc.set_precision(8)


def test_scalar_parses_fraction_strings():
    assert scalar("1/4") == ctx.mpf(1) / 4
    assert scalar(Fraction(3, 8)) == ctx.mpf(3) / 8


def test_scalars_pickle_roundtrip():
    x = ctx.exp(-ctx.mpf(10) ** 6)
    assert pickle.loads(pickle.dumps(x)) == x


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=20))
def test_order_key_matches_comparison(values):
    xs = [scalar(v) for v in values] + [ctx.exp(-ctx.mpf(10) ** 5)]
    assert sorted(xs) == sorted(xs, key=order_key)


# LogSigned --------------------------------------------------------------------


def test_logsigned_product_and_quotient():
    a, b = LogSigned.from_value(-3), LogSigned.from_value(4)
    assert float((a * b).to_scalar()) == pytest.approx(-12)
    assert float((b / a).to_scalar()) == pytest.approx(-4 / 3)
    assert float((a**2).to_scalar()) == pytest.approx(9)


def test_logsigned_huge_exponents():
    big = LogSigned.from_log(-ctx.mpf(2) ** 200)
    assert (big * big).logmag == -ctx.mpf(2) ** 201
    assert big > LogSigned.zero() or big.sign == 1


@given(st.floats(1e-300, 1e300), st.floats(1e-300, 1e300))
def test_same_sign_sum_dominates(x, y):
    s = LogSigned.from_value(x) + LogSigned.from_value(y)
    assert s.logmag >= max(ctx.log(x), ctx.log(y))


def test_log_sum_cancels_exactly():
    assert log_sum([LogSigned.from_value(5), LogSigned.from_value(-5)]).is_zero


# Jets -------------------------------------------------------------------------


def _poly_jet(coeffs, x, order):
    """Jet of sum c_i t^i at x from exact Taylor shifts."""
    out = []
    for j in range(order + 1):
        out.append(sum(Fraction(math.comb(i, j)) * c * x ** (i - j) for i, c in enumerate(coeffs) if i >= j))
    return Jet(x, tuple(out))


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


rational = st.fractions(min_value=-5, max_value=5, max_denominator=20)


@given(st.lists(rational, min_size=1, max_size=7), st.lists(rational, min_size=1, max_size=7), rational)
def test_jet_product_matches_polynomial_product(p, q, x):
    order = 6
    lhs = _poly_jet(p, x, order) * _poly_jet(q, x, order)
    assert lhs.coeffs == _poly_jet(_poly_mul(p, q), x, order).coeffs


def test_jet_product_truncates():
    a = Jet(0, (1, 2, 3))
    b = Jet(0, (1, 1))
    assert (a * b).order == 1


def test_reciprocal_and_exp_against_closed_forms():
    x = ctx.mpf("0.3")
    X = Jet.variable(x, 4)
    inv = (1 + X).reciprocal()
    for j, c in enumerate(inv.coeffs):
        assert c == pytest.approx((-1) ** j / (1 + x) ** (j + 1), rel=1e-60)
    e = X.exp()
    for j, c in enumerate(e.coeffs):
        assert c == pytest.approx(ctx.exp(x) / math.factorial(j), rel=1e-60)


def test_sin_and_composition():
    x = ctx.mpf("0.7")
    X = Jet.variable(x, 5)
    s = X.sin()
    assert s.derivative(3) == pytest.approx(-ctx.cos(x), rel=1e-60)
    # exp(sin(x)) by composition equals the direct chain
    outer = Jet.variable(s.value, 5).exp()
    assert s.compose(outer).coeffs == pytest.approx(s.exp().coeffs, rel=1e-60)


def test_powers_reject_negative():
    with pytest.raises(ValueError):
        Jet.variable(1, 2) ** -1


# bump and partition of unity ------------------------------------------------------


def test_partition_at_zero():
    total = bump_jet(0, 0).value + bump_jet(-1, 0).value + bump_jet(1, 0).value
    assert total == 1


def test_bump_outside_support_is_zero():
    assert bump_jet(scalar("1.5"), 3).is_zero()
    assert psi_jet(1, 2).is_zero()


def test_bump_matches_finite_differences():
    # independent oracle: central differences of the value alone; the
    # tolerances cover truncation plus 256-bit rounding divided by the step
    x = ctx.mpf("0.3")
    h = ctx.mpf("1e-30")
    h2 = ctx.mpf("1e-20")

    def phi(t):
        return bump_jet(t, 0).value

    jet = bump_jet(x, 2)
    d1 = (phi(x + h) - phi(x - h)) / (2 * h)
    d2 = (phi(x + h2) - 2 * phi(x) + phi(x - h2)) / (h2 * h2)
    assert jet.coeffs[0] == phi(x)
    assert abs(jet.derivative(1) - d1) < ctx.mpf("1e-40")
    assert abs(jet.derivative(2) - d2) < ctx.mpf("1e-30")


def test_partition_identity_random_points():
    rng = random.Random(7)
    tol = ctx.ldexp(1, -200)
    for _ in range(1000):
        x = scalar(rng.uniform(-3, 3))
        total = sum(bump_jet(x - ell, 0).value for ell in range(-4, 5))
        assert abs(total - 1) <= tol


@given(st.floats(-3, 3), st.integers(1, 4))
def test_partition_derivatives_vanish(x, order):
    x = scalar(x)
    total = [sum(bump_jet(x - ell, order).coeffs[j] for ell in range(-4, 5)) for j in range(1, order + 1)]
    assert all(abs(c) <= ctx.ldexp(1, -190) for c in total)


def test_scaled_patch_centre_value_is_one():
    eps = ctx.ldexp(1, -5)
    assert scaled_patch_jet(3 * eps, eps, 3, 0).value == 1


def test_scaled_patch_chain_rule():
    eps, ell = ctx.mpf("0.125"), 2
    x = ctx.mpf("0.27")
    inner = bump_jet(x / eps - ell, 4)
    outer = scaled_patch_jet(x, eps, ell, 4)
    for j in range(5):
        assert outer.coeffs[j] == pytest.approx(inner.coeffs[j] / eps**j, rel=1e-70)


def test_scaled_patch_support_boundary():
    eps = ctx.mpf("0.25")
    assert scaled_patch_jet(3 * eps, eps, 2, 5).is_zero()
    with pytest.raises(ValueError):
        scaled_patch_jet(0, 0, 0, 1)


def _scaled_sups(eps, ts, order):
    sups = [ctx.zero] * (order + 1)
    for t in ts:
        jet = scaled_patch_jet((t + 5) * eps, eps, 5, order)
        for j in range(order + 1):
            sups[j] = max(sups[j], abs(jet.derivative(j)) * eps**j)
    return sups


def test_derivative_bound_independent_of_eps():
    order = 3
    dense = [ctx.mpf(-1) + ctx.mpf(2) * i / 10_000 for i in range(10_001)]
    ref = _scaled_sups(ctx.ldexp(1, -2), dense, order)
    for e in (11, 20):
        got = _scaled_sups(ctx.ldexp(1, -e), dense, order)
        for a, b in zip(ref, got):
            assert max(a, b) / min(a, b) <= 1 + 1e-6
    coarse = dense[::20]
    ref = _scaled_sups(ctx.ldexp(1, -2), coarse, order)
    for e in range(3, 21):
        got = _scaled_sups(ctx.ldexp(1, -e), coarse, order)
        for a, b in zip(ref, got):
            assert max(a, b) / min(a, b) <= 1 + 1e-6


def test_lattice_offsets_cached_tables():
    offsets, left, right = lattice_offsets(8, 2)
    assert len(offsets) == len(left) == len(right) == 8
    assert offsets[0] == 0 and left[0][0] == 1 and right[0][0] == 0
    for l, r in zip(left, right):
        assert abs(l[0] + r[0] - 1) < ctx.ldexp(1, -200)
    assert lattice_offsets(8, 2) is lattice_offsets(8, 2)
