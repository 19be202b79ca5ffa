"""Test polynomials ``P(x) = prod_j (x^2 - x_j^2)^(2n+2)`` and the DN probe.

With ``x_j = a_(d+j)`` and ``eps = |a_d|``, the quantity

    rho_d = |P^(m)(0)|^2 eps^r / (sup_{|t|<=eps} |P| * sup_{j<=n} |f^(j)|),

where ``m = 2s(2n+2)`` and ``f`` is ``P`` cut off outside ``|x| <= |x_k|``,
must stay bounded in ``d`` when ``C^inf(K)`` has a dominating norm.  Three
inequalities bound the pieces:

* (alpha) ``|P^(m)(0)|^2 >= prod_{j<=k-s} |x_j|^(4(2n+2))``
* (beta)  ``sup_{|t|<=eps} |P| <= |2 x_0|^(2k(2n+2))``
* (gamma) ``sup_{j<=n} |f^(j)| <= c_k |x_k|^(3n+4)``

and turn ``rho_d`` into the closed form ``q_d / (4^(k(2n+2)) c_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial

from ..conditions.checks import dn_sequence_q, dn_sequence_q_direct
from ..conditions.sequences import LINEAR_FACTORIAL_CAP, SequenceSpec
from ..conditions.verdict import linear_fit
from ..interpolation import NewtonPolynomial
from ..numerics import backend as sc
from ..numerics.jet import Jet

GRID_POINTS = 257
CROSS_CHECK_BITS = 100
DIRECT_MAX_D = 12


def _halving_window(seq: SequenceSpec, d: int, k: int) -> None:
    logs = seq.log_values
    if d < 1 or d + k > len(logs):
        raise ValueError(f"indices {d}..{d + k} outside the truncation (length {len(logs)})")
    log2 = sc.ctx.ln2
    for i in range(d + 1, d + k + 1):
        if not logs[i - 1] < logs[i - 2] - log2:
            raise ValueError(f"halving condition |a_l| < |a_(l-1)|/2 violated at index {i}")


def _roots(seq: SequenceSpec, d: int, k: int) -> list:
    """``[x_0, x_1, ..., x_k]`` with ``x_j = a_(d+j)`` as Scalars."""
    if seq.family == "exp-factorial" and d + k > LINEAR_FACTORIAL_CAP:
        raise ValueError(f"factorial decay is only materialized for l <= {LINEAR_FACTORIAL_CAP}")
    return [sc.ctx.exp(seq.log_values[d + j - 1]) for j in range(k + 1)]


def build_test_polynomial(seq: SequenceSpec, d: int, k: int, n: int) -> NewtonPolynomial:
    """Monomial coefficients of ``P`` by repeated convolution, as a Newton polynomial with zero nodes."""
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    _halving_window(seq, d, k)
    xs = _roots(seq, d, k)[1:]
    coeffs = [sc.ctx.one]
    for x in xs:
        c = -(x * x)
        for _ in range(2 * n + 2):
            nxt = [sc.ctx.zero] * (len(coeffs) + 2)
            for i, a in enumerate(coeffs):
                nxt[i] += a * c
                nxt[i + 2] += a
            coeffs = nxt
    return NewtonPolynomial.from_monomial(coeffs)


def _product_jet(t, squares: tuple, power: int, order: int) -> Jet:
    """Jet of ``prod (x^2 - s)^power`` at ``t``: no cancellation near the roots."""
    X = Jet.variable(t, order)
    out = Jet.constant(t, sc.ctx.one, order)
    for s in squares:
        out = out * ((X * X - s) ** power)
    return out


def _grid_sup(squares: tuple, power: int, order: int, bound, points: int) -> list:
    """``sup_{|t|<=bound} |P^(j)|`` for ``j <= order`` on an equispaced grid of ``[0, bound]``."""
    sups = [sc.ctx.zero] * (order + 1)
    for i in range(points):
        t = bound * i / (points - 1)
        jet = _product_jet(t, squares, power, order)
        for j, c in enumerate(jet.coeffs):
            v = abs(c) * factorial(j)
            if v > sups[j]:
                sups[j] = v
    return sups


def gamma_constant(k: int, n: int, x1=None):
    """Explicit ``c_k`` for (gamma): ``max_j j! C(2N, j) 2^(3n+4)`` times ``max(1, 2|x_1|)^(2N-3n-4)``."""
    N = k * (2 * n + 2)
    base = max(factorial(j) * comb(2 * N, j) for j in range(n + 1)) * 2 ** (3 * n + 4)
    c = sc.ctx.mpf(base)
    if x1 is not None and 2 * abs(x1) > 1:
        c *= (2 * abs(x1)) ** (2 * N - 3 * n - 4)
    return c


@dataclass
class BoundCheck:
    name: str
    lhs: object
    rhs: object
    holds: bool
    extra: dict = field(default_factory=dict)


@dataclass
class BoundReport:
    params: dict
    alpha: BoundCheck
    beta: BoundCheck
    gamma: BoundCheck

    @property
    def holds(self) -> bool:
        return self.alpha.holds and self.beta.holds and self.gamma.holds

    def checks(self) -> list:
        return [self.alpha, self.beta, self.gamma]


def verify_test_polynomial_bounds(seq: SequenceSpec, d: int, k: int, n: int, s: int, points: int = GRID_POINTS) -> BoundReport:
    """Evaluate both sides of (alpha), (beta), (gamma) directly.

    (alpha) uses ``P^(m)(0) = m! * coefficient``; the sups in (beta) and
    (gamma) are grid sups, exact at the endpoints where they are attained
    for (beta).  (beta) also reports the ratio against its right side,
    which lies in ``[(3/16)^N, 4^-N)`` for ``N = k(2n+2)``.
    """
    if not k >= s >= 1:
        raise ValueError("need k >= s >= 1")
    M = 2 * n + 2
    m = 2 * s * M
    poly = build_test_polynomial(seq, d, k, n)
    xs = _roots(seq, d, k)
    squares = tuple(x * x for x in xs[1:])

    deriv = abs(poly.coeffs[m]) * factorial(m)
    a_lhs = deriv * deriv
    a_rhs = sc.ctx.one
    for j in range(1, k - s + 1):
        a_rhs *= abs(xs[j]) ** (4 * M)
    alpha = BoundCheck("alpha", a_lhs, a_rhs, a_lhs >= a_rhs, {"m": m})

    sup_p = _grid_sup(squares, M, 0, abs(xs[0]), points)[0]
    b_rhs = (2 * abs(xs[0])) ** (2 * k * M)
    ratio = sup_p / b_rhs
    floor = (sc.ctx.mpf(3) / 16) ** (k * M)
    beta = BoundCheck("beta", sup_p, b_rhs, sup_p <= b_rhs, {"ratio": ratio, "ratio_floor": floor, "tight": ratio >= floor})

    sups = _grid_sup(squares, M, n, abs(xs[k]), points)
    g_lhs = max(sups)
    ck = gamma_constant(k, n, xs[1])
    g_rhs = ck * abs(xs[k]) ** (3 * n + 4)
    gamma = BoundCheck("gamma", g_lhs, g_rhs, g_lhs <= g_rhs, {"c_k": ck, "scaled": g_lhs / abs(xs[k]) ** (3 * n + 4)})
    params = {"family": seq.family, "d": d, "k": k, "n": n, "s": s}
    return BoundReport(params, alpha, beta, gamma)


@dataclass
class ProbePoint:
    d: int
    log_q: object  # closed form from log a_l
    log_rho_bound: object  # log q_d - N log 4 - log c_k, a lower bound for log rho_d
    log_q_direct: object = None
    log_rho_direct: object = None
    log_rho_closed: object = None  # k = s only: exact closed forms of P^(m)(0) and sup |P|


@dataclass
class ProbeResult:
    params: dict
    points: list
    slope: object  # of log rho_bound against d
    geometric_coefficient: object = None  # c in log rho_d ~ c p^d (exp-geometric only)
    geometric_residual: object = None  # max relative deviation of log rho_d / p^d from c
    max_cross_error: object = None  # largest |log_q - log_q_direct| (and closed vs direct rho)

    def trajectory(self) -> list:
        return [(pt.d, pt.log_rho_bound) for pt in self.points]

    @property
    def bounded(self) -> bool:
        return self.slope <= sc.ctx.mpf("0.05")


@lru_cache(maxsize=256)
def _direct_rho(seq: SequenceSpec, n: int, s: int, r: int, k: int, d: int, points: int, prec: int):
    M = 2 * n + 2
    m = 2 * s * M
    poly = build_test_polynomial(seq, d, k, n)
    xs = _roots(seq, d, k)
    squares = tuple(x * x for x in xs[1:])
    deriv = abs(poly.coeffs[m]) * factorial(m)
    sup_p = _grid_sup(squares, M, 0, abs(xs[0]), points)[0]
    sup_f = max(_grid_sup(squares, M, n, abs(xs[k]), points))
    log_rho = 2 * sc.ctx.log(deriv) + r * sc.ctx.log(abs(xs[0])) - sc.ctx.log(sup_p) - sc.ctx.log(sup_f)
    closed = None
    if k == s:
        # P^(m)(0) = m! exactly; sup |P| = P(x_0) in log form
        logs = seq.log_values
        lx0 = logs[d - 1]
        log_sup = sum(
            M * (2 * lx0 + sc.ctx.log1p(-sc.ctx.exp(2 * (logs[d + j - 1] - lx0)))) for j in range(1, k + 1)
        )
        closed = 2 * sc.ctx.log(factorial(m)) + r * lx0 - log_sup - sc.ctx.log(sup_f)
    return log_rho, closed


def dn_probe(
    seq: SequenceSpec,
    n: int,
    s: int,
    r: int,
    k: int,
    d_range,
    direct_max_d: int = DIRECT_MAX_D,
    points: int = GRID_POINTS,
) -> ProbeResult:
    """Trajectory of ``log rho_d`` over ``d_range``.

    Every ``d`` gets the closed-form lower bound from ``q_d``.  For
    ``d <= direct_max_d`` the three ingredients are also evaluated directly
    and ``q_d`` is recomputed from linear Scalar values; the largest
    discrepancy is reported in ``max_cross_error``.
    """
    if not k >= s >= 1:
        raise ValueError("need k >= s >= 1")
    ds = list(d_range)
    if len(ds) < 2:
        raise ValueError("need at least two values of d")
    M = 2 * n + 2
    logs = seq.log_values
    pts, worst = [], None
    for d in ds:
        log_q = dn_sequence_q(seq, n, s, r, k, d).logmag
        x1 = sc.ctx.exp(logs[d]) if logs[d] > -sc.ctx.ln2 else None
        log_ck = sc.ctx.log(gamma_constant(k, n, x1))
        pt = ProbePoint(d, log_q, log_q - k * M * sc.ctx.log(4) - log_ck)
        direct_ok = d <= direct_max_d and not (seq.family == "exp-factorial" and d + k > LINEAR_FACTORIAL_CAP)
        if direct_ok:
            pt.log_q_direct = dn_sequence_q_direct(seq, n, s, r, k, d).logmag
            pt.log_rho_direct, pt.log_rho_closed = _direct_rho(seq, n, s, r, k, d, points, sc.get_precision())
            errs = [abs(pt.log_q - pt.log_q_direct) / max(1, abs(pt.log_q))]
            if pt.log_rho_closed is not None:
                errs.append(abs(pt.log_rho_closed - pt.log_rho_direct) / max(1, abs(pt.log_rho_direct)))
            e = max(errs)
            worst = e if worst is None or e > worst else worst
        pts.append(pt)
    fit = linear_fit([sc.ctx.mpf(d) for d in ds], [pt.log_rho_bound for pt in pts])
    out = ProbeResult({"family": seq.family, "n": n, "s": s, "r": r, "k": k, "d": [ds[0], ds[-1]]}, pts, fit.slope, max_cross_error=worst)
    if seq.family == "exp-geometric":
        p = sc.scalar(seq.p)
        xs = [p**d for d in ds]
        geo = linear_fit(xs, [pt.log_rho_bound for pt in pts])
        out.geometric_coefficient = geo.slope
        if geo.slope == 0:
            out.geometric_residual = sc.ctx.inf
        else:
            out.geometric_residual = max(
                abs((pt.log_rho_bound - geo.intercept) / x - geo.slope) / abs(geo.slope) for pt, x in zip(pts, xs)
            )
    return out
