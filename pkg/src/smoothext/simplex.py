"""Small dense revised simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Arithmetic is generic (Scalar or Fraction).  Bland's rule is used for both
the entering and the leaving variable, so the method terminates on degenerate
problems and the pivot sequence is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import backend as sc


class Unbounded(ArithmeticError):
    pass


class Infeasible(ArithmeticError):
    pass


@dataclass(frozen=True)
class SimplexResult:
    x: tuple
    objective: object
    duals: tuple  # simplex multipliers y with y^T A <= c at the optimum
    basis: tuple
    pivots: int


def _default_tol(sample):
    if sc.is_rational(sample):
        return 0
    return sc.ctx.ldexp(sc.ctx.one, -(sc.ctx.prec * 3 // 4))


class _Revised:
    def __init__(self, columns, b, tol):
        self.cols = columns
        self.m = len(b)
        self.tol = tol
        one = sc.one_like(b[0]) if b else 1
        zero = one - one
        self.zero, self.one = zero, one
        self.binv = [[one if i == j else zero for j in range(self.m)] for i in range(self.m)]
        self.xb = list(b)
        self.pivots = 0

    def column(self, j):
        return self.cols[j]

    def ftran(self, col):
        return [sum((r[i] * col[i] for i in range(self.m)), self.zero) for r in self.binv]

    def multipliers(self, cb):
        m = self.m
        return [sum((cb[i] * self.binv[i][k] for i in range(m)), self.zero) for k in range(m)]

    def run(self, basis, cost, allowed):
        m, tol = self.m, self.tol
        while True:
            y = self.multipliers([cost[j] for j in basis])
            entering = None
            in_basis = set(basis)
            for j in allowed:
                if j in in_basis:
                    continue
                col = self.cols[j]
                reduced = cost[j] - sum((y[i] * col[i] for i in range(m)), self.zero)
                if reduced < -tol:
                    entering = j
                    break
            if entering is None:
                return y
            w = self.ftran(self.cols[entering])
            leave, best = None, None
            for i in range(m):
                if w[i] > tol:
                    ratio = self.xb[i] / w[i]
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and basis[i] < basis[leave])
                    ):
                        leave, best = i, ratio
            if leave is None:
                raise Unbounded("objective unbounded below")
            self.pivot(basis, leave, entering, w)

    def pivot(self, basis, leave, entering, w):
        m = self.m
        piv = w[leave]
        row = [v / piv for v in self.binv[leave]]
        xl = self.xb[leave] / piv
        for i in range(m):
            if i == leave:
                continue
            f = w[i]
            if f:
                self.binv[i] = [a - f * c for a, c in zip(self.binv[i], row)]
                self.xb[i] = self.xb[i] - f * xl
        self.binv[leave] = row
        self.xb[leave] = xl
        basis[leave] = entering
        self.pivots += 1


def invert(matrix, tol=0):
    """Gauss-Jordan inverse with partial pivoting; ``None`` if singular."""
    m = len(matrix)
    one = sc.one_like(matrix[0][0])
    zero = one - one
    aug = [list(row) + [one if i == j else zero for j in range(m)] for i, row in enumerate(matrix)]
    for col in range(m):
        piv = max(range(col, m), key=lambda r: abs(aug[r][col]))
        if abs(aug[piv][col]) <= tol:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * c for a, c in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def _warm_start(solver, cols, rhs, basis, tol):
    m = len(rhs)
    B = [[cols[j][i] for j in basis] for i in range(m)]
    binv = invert(B, tol)
    if binv is None:
        return False
    xb = [sum((r[i] * rhs[i] for i in range(m)), solver.zero) for r in binv]
    scale = max([abs(v) for v in rhs] + [solver.one])
    if any(v < -tol * scale for v in xb):
        return False
    solver.binv = binv
    solver.xb = [v if v > 0 else solver.zero for v in xb]
    return True


def solve_standard_form(columns, b, c, tol=None, initial_basis=None) -> SimplexResult:
    """Two-phase revised simplex.

    ``columns[j]`` is the ``j``-th column of ``A`` (length ``len(b)``).  A
    primal feasible ``initial_basis`` skips phase one.
    """
    m, n = len(b), len(columns)
    if tol is None:
        tol = _default_tol(b[0] if b else 0)
    cols = [list(col) for col in columns]
    rhs = list(b)
    for i in range(m):
        if rhs[i] < 0:
            rhs[i] = -rhs[i]
            for col in cols:
                col[i] = -col[i]
    one = sc.one_like(rhs[0]) if rhs else 1
    zero = one - one
    for i in range(m):  # artificial identity block
        cols.append([one if r == i else zero for r in range(m)])
    solver = _Revised(cols, rhs, tol)
    if initial_basis is not None and _warm_start(solver, cols, rhs, list(initial_basis), tol):
        basis = list(initial_basis)
    else:
        basis = list(range(n, n + m))
        phase1 = [zero] * n + [one] * m
        solver.run(basis, phase1, range(n + m))
        infeas = sum((solver.xb[i] for i in range(m) if basis[i] >= n), zero)
        scale = max([abs(v) for v in rhs] + [one])
        if infeas > tol * scale * m:
            raise Infeasible("no feasible point")
    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if j in basis:
                    continue
                w = solver.ftran(cols[j])
                if abs(w[i]) > tol:
                    solver.pivot(basis, i, j, w)
                    break

    cost = list(c) + [zero] * m
    y = solver.run(basis, cost, range(n))
    x = [zero] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = solver.xb[i]
    # undo the row sign flips in the multipliers
    duals = tuple(-y[i] if b[i] < 0 else y[i] for i in range(m))
    obj = sum((c[j] * x[j] for j in range(n)), zero)
    return SimplexResult(tuple(x), obj, duals, tuple(basis), solver.pivots)
