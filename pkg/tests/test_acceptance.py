"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``CRITERION <n> PASS|FAIL`` line to the terminal
(even under output capture) so a plain ``pytest tests/test_acceptance.py``
run doubles as a scorecard.
"""

import json
import random
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations
from math import factorial

import pytest

from smoothext import cli
from smoothext.conditions import (
    FAILS,
    HOLDS,
    ClassifyParams,
    SequenceSpec,
    classify,
    dn_sequence_q,
    dn_sequence_q_direct,
    linear_fit,
    ratio_term,
)
from smoothext.conditions.classify import necessary_bundle
from smoothext.extension import (
    IdealSpec,
    dn_probe,
    flat_oscillation,
    omega_decompose,
    quotient_norm_sandwich,
    verify_test_polynomial_bounds,
)
from smoothext.interpolation import HermiteData, PointSet, SampleFunction, hermite_interpolant, whitney_seminorm
from smoothext.markov import MarkovQuery, markov_factor_lagrange, markov_factor_lp
from smoothext.numerics import ctx, scalar


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def scope(number, title):
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"\nCRITERION {number} FAIL  {title}")
            raise
        with capsys.disabled():
            print(f"\nCRITERION {number} PASS  {title}")

    return scope


# 1 ----------------------------------------------------------------------------------------------


def _solve_exact(rows, rhs):
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        for i in range(n):
            if i != col and a[i][col] != 0:
                t = a[i][col] / a[col][col]
                a[i] = [x - t * y for x, y in zip(a[i], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def _confluent_vandermonde_solution(data):
    # unknown monomial coefficients; one row per prescribed derivative
    total = data.points.total
    rows, rhs = [], []
    for x, jet in zip(data.points.nodes, data.jets):
        for j, value in enumerate(jet):
            rows.append([Fraction(factorial(i), factorial(i - j)) * x ** (i - j) if i >= j else Fraction(0) for i in range(total)])
            rhs.append(value)
    return _solve_exact(rows, rhs)


def _random_hermite(rng):
    while True:
        count = rng.randint(1, 5)
        mults = [rng.randint(1, 3) for _ in range(count)]
        if sum(mults) <= 8:
            break
    nodes = sorted({Fraction(rng.randint(-40, 40), rng.randint(1, 9)) for _ in range(3 * count)})
    nodes = sorted(rng.sample(nodes, count)) if len(nodes) >= count else nodes
    mults = mults[: len(nodes)]
    jets = tuple(tuple(Fraction(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(mu)) for mu in mults)
    return HermiteData(PointSet(tuple(nodes), tuple(mults)), jets)


def test_criterion_1_hermite_matches_linear_system(criterion):
    with criterion(1, "Hermite interpolant equals dense linear-system oracle on 200 rational instances"):
        rng = random.Random(101)
        for _ in range(200):
            data = _random_hermite(rng)
            p = hermite_interpolant(data)
            got = list(p.power_coefficients())
            want = _confluent_vandermonde_solution(data)
            got += [Fraction(0)] * (len(want) - len(got))
            assert got == want
            assert all(isinstance(c, (int, Fraction)) for c in got)


# 2 ----------------------------------------------------------------------------------------------


def _enumerate_seminorm(xs, ys, n):
    best = max(abs(y) for y in ys)
    for j in range(1, n + 1):
        for idx in combinations(range(len(xs)), j + 1):
            level = [ys[i] for i in idx]
            for s in range(1, j + 1):
                level = [(level[i + 1] - level[i]) / (xs[idx[i + s]] - xs[idx[i]]) for i in range(len(level) - 1)]
            best = max(best, abs(level[0]))
    return best


def test_criterion_2_whitney_seminorm_brute_force(criterion):
    with criterion(2, "Whitney seminorm equals full tuple enumeration on 50 random 12-point sets"):
        rng = random.Random(202)
        for _ in range(50):
            pool = {Fraction(rng.randint(-500, 500), rng.randint(1, 17)) for _ in range(40)}
            xs = sorted(rng.sample(sorted(pool), 12))
            ys = [Fraction(rng.randint(-50, 50), rng.randint(1, 5)) for _ in xs]
            n = rng.randint(0, 4)
            res = whitney_seminorm(SampleFunction(PointSet(tuple(xs)), tuple(ys)), n)
            assert res.exhaustive
            assert res.value == _enumerate_seminorm(xs, ys, n)


# 3 ----------------------------------------------------------------------------------------------


def test_criterion_3_markov_extremal_and_fast_path(criterion):
    with criterion(3, "dense-grid LP gives k^2 within 1%; LP and Lagrange agree to 1e-8 on 100 instances"):
        grid = PointSet(tuple(scalar(-1) + scalar(2) * i / 2000 for i in range(2001)))
        for k in (2, 3, 4, 5):
            value = markov_factor_lp(MarkovQuery(grid, scalar(1), k, 1))
            assert abs(value - k * k) <= 0.01 * k * k
        rng = random.Random(303)
        for _ in range(100):
            k = rng.randint(1, 6)
            S = PointSet.from_values([scalar(rng.uniform(-3, 3)) for _ in range(k + 1)])
            if len(S) != k + 1:
                continue
            y = scalar(rng.uniform(-3, 3))
            j = rng.randint(0, k)
            lp = markov_factor_lp(MarkovQuery(S, y, k, j))
            lag = markov_factor_lagrange(S, y, j)
            assert abs(lp - lag) <= 1e-8 * max(abs(lp), abs(lag))


# 4 ----------------------------------------------------------------------------------------------


def test_criterion_4_omega_scaling(criterion):
    with criterion(4, "omega decomposition slopes on {0} U {1/j}: ||f-g||_1 >= 0.7, ||g||_k <= k + 0.3"):
        ideal = IdealSpec(PointSet((scalar(0),) + tuple(scalar(1) / j for j in range(30, 0, -1))))
        eps_list = [ctx.ldexp(1, -e) for e in range(3, 13)]
        for k in (3, 5):
            diffs, gs = [], []
            for eps in eps_list:
                res = omega_decompose(flat_oscillation, ideal, 1, k, eps, per_patch=8)
                diffs.append(res.diff_norm.value)
                gs.append(res.g_norm.value)
            log_eps = [ctx.log(e) for e in eps_list]
            diff_fit = linear_fit(log_eps, [ctx.log(v) for v in diffs])
            g_fit = linear_fit([-x for x in log_eps], [ctx.log(v) for v in gs])
            assert diff_fit.slope >= 0.7, (k, diff_fit.slope)
            assert g_fit.slope <= k + 0.3, (k, g_fit.slope)


# 5 ----------------------------------------------------------------------------------------------


def test_criterion_5_verdict_table(criterion):
    with criterion(5, "classify reproduces the verdict table for all listed families"):
        params = ClassifyParams()

        for seq in (
            SequenceSpec("exp-power", alpha=0.5),
            SequenceSpec("exp-power", alpha=1),
            SequenceSpec("exp-power", alpha=2),
            SequenceSpec("inv-log", alpha=1),
        ):
            out = classify(seq, params)
            assert out.sufficient
            assert all(v.status == HOLDS for v in out.sufficient), seq.label()
            assert out.consistent_with_paper == "yes", seq.label()

        fact = SequenceSpec("exp-factorial")
        out = classify(fact, params)
        assert out.ratio and all(v.fails and v.witnesses for v in out.ratio)
        for p in (1, 2):
            traj = [ratio_term(fact, p, d) for d in range(1, 9)]
            tail = traj[p:]
            assert all(b > a for a, b in zip(tail, tail[1:]))
            # super-exponential: successive growth factors keep increasing
            growth = [b / a for a, b in zip(tail, tail[1:]) if a > 0]
            assert len(growth) >= 4 and all(h > g for g, h in zip(growth, growth[1:]))

        for p in (2, 3):
            geo = SequenceSpec("exp-geometric", p=p)
            out = classify(geo, params)
            failing = [v for v in out.dn if v.fails]
            assert failing and any("dn-sequence" in r for r in out.reasons)
            for v in failing:
                w = v.witnesses[0]
                ratios = [
                    dn_sequence_q(geo, v.params["n"], v.params["s"], w["r"], w["k"], d).logmag / ctx.mpf(p) ** d
                    for d in range(5, 41)
                ]
                mid = ratios[len(ratios) // 2]
                assert mid > 0
                assert max(abs(x - mid) for x in ratios) <= 1e-6 * abs(mid)

        acc = SequenceSpec("almost-accumulation")
        K = acc.pointset()
        verdicts = necessary_bundle(K, params)
        assert len(verdicts) == 20
        assert {(v.params["n"], v.params["s"]) for v in verdicts} == {(n, s) for n in range(4) for s in range(2, 7)}
        for v in verdicts:
            assert v.status == FAILS and v.witnesses


# 6 ----------------------------------------------------------------------------------------------


def test_criterion_6_dn_probe_dichotomy(criterion):
    with criterion(6, "dn probe: e^-l bounded for some r <= 200; e^-2^l grows like c 2^d for every r"):
        expo = SequenceSpec("exp-power", alpha=1, length=60)
        for k in range(1, 9):
            res = dn_probe(expo, 0, 1, 200, k, range(1, 41), direct_max_d=0)
            assert res.bounded and res.slope <= 0.05, (k, res.slope)

        geo = SequenceSpec("exp-geometric", p=2, length=60)
        for r in (1, 25, 50, 100, 150, 199, 200):
            best = None
            for k in range(3, 13):
                res = dn_probe(geo, 0, 3, r, k, range(1, 21), direct_max_d=0)
                if res.geometric_coefficient > 0 and res.geometric_residual < 1e-6:
                    best = k
                    break
            assert best is not None, r


# 7 ----------------------------------------------------------------------------------------------


def test_criterion_7_test_polynomial_bounds(criterion):
    with criterion(7, "bounds (alpha), (beta), (gamma) hold on 100 sampled configurations; log q_d cross-check"):
        rng = random.Random(707)
        families = [
            SequenceSpec("exp-power", alpha=1, length=40),
            SequenceSpec("exp-power", alpha=2, length=40),
            SequenceSpec("exp-power", alpha=1.5, length=40),
            SequenceSpec("exp-geometric", p=2, length=20),
            SequenceSpec("exp-geometric", p=3, length=14),
            SequenceSpec("exp-factorial", length=14),
        ]
        for _ in range(100):
            seq = rng.choice(families)
            k = rng.randint(1, 4)
            s = rng.randint(1, k)
            n = rng.randint(0, 2)
            d = rng.randint(1, 4)
            rep = verify_test_polynomial_bounds(seq, d, k, n, s)
            assert rep.holds, (rep.params, [c.name for c in rep.checks() if not c.holds])

        seq = SequenceSpec("exp-power", alpha=1, length=40)
        for _ in range(20):
            k = rng.randint(1, 4)
            s = rng.randint(1, k)
            n, r, d = rng.randint(0, 2), rng.randint(0, 40), rng.randint(1, 12)
            a = dn_sequence_q(seq, n, s, r, k, d).logmag
            b = dn_sequence_q_direct(seq, n, s, r, k, d).logmag
            assert abs(a - b) <= ctx.ldexp(1, -100) * max(1, abs(a))


# 8 ----------------------------------------------------------------------------------------------


def test_criterion_8_sandwich(criterion):
    with criterion(8, "lower <= upper on 100 truncated geometric sets; equality within 1e-9 for constants"):
        rng = random.Random(808)
        for _ in range(100):
            q = rng.choice((2, 3, ctx.e))
            count = rng.randint(3, 10)
            K = PointSet((scalar(0),) + tuple(scalar(q) ** -ell for ell in range(count, 0, -1)))
            f = SampleFunction(K, tuple(scalar(rng.uniform(-1, 1)) for _ in K.nodes))
            sw = quotient_norm_sandwich(f, rng.randint(0, 2), per_patch=8)
            assert sw.ordered, (q, count)

        for value in (scalar(-3), scalar("0.5")):
            K = PointSet((scalar(0),) + tuple(ctx.exp(-ell) for ell in range(10, 0, -1)))
            sw = quotient_norm_sandwich(SampleFunction(K, (value,) * len(K)), 2, per_patch=8)
            assert abs(sw.lower - abs(value)) <= 1e-9
            assert abs(sw.upper - abs(value)) <= 1e-9


# 9 ----------------------------------------------------------------------------------------------


def test_criterion_9_determinism_across_workers(criterion, tmp_path):
    with criterion(9, "reports byte-identical with 1, 4 and 8 workers"):
        pts = tmp_path / "k.txt"
        pts.write_text("0\n" + "".join(f"log:{-ell}\n" for ell in range(8, 0, -1)))
        vals = tmp_path / "v.txt"
        vals.write_text("".join(f"{(-1) ** i * i / 7!r}\n" for i in range(9)))
        commands = {
            "analyze": ["analyze", "--family", "exp-power", "--alpha", "2"],
            "catalog": ["catalog", "--only", "exp-geometric", "--only", "exp-factorial"],
            "probe": ["probe-dn", "--family", "exp-geometric", "--p", "2", "--s", "3", "--k", "12", "--d-max", "12"],
            "extend": ["extend", "--points", str(pts), "--values", str(vals), "--n", "1"],
            "markov": ["markov", "--points", str(pts), "--degree", "3", "--deriv", "1", "--at", "0"],
        }
        for name, argv in commands.items():
            outputs = []
            for workers in (1, 4, 8):
                out = tmp_path / f"{name}-{workers}.json"
                code = cli.run([*argv, "--workers", str(workers), "--out", str(out)])
                assert code in (0, 1, 2), (name, code)
                outputs.append(out.read_bytes())
            assert outputs[0] == outputs[1] == outputs[2], name
            json.loads(outputs[0])
