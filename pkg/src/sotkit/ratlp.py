"""Exact rational linear programming: two-phase primal simplex with Bland's rule.

Problems are minimizations over nonnegative variables with equality and
`>=` rows. Internally `>=` rows get surplus variables and every row gets
an artificial; Bland's smallest-index rule is used for both the entering
and the leaving choice, so the solver terminates on every input including
degenerate and cycling-prone ones.

Dual sign convention (part of the public contract): in a minimization,
multipliers of `>=` rows are >= 0 and equality-row multipliers are free.
Every returned certificate is re-verified exactly before it leaves this
module: primal residuals, dual feasibility, complementary slackness and a
zero duality gap for optima; the ray inequalities for infeasibility.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import InputError, SotError

ZERO = Fraction(0)
ONE = Fraction(1)

EQ = "eq"
GEQ = "geq"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LinearRow:
    kind: str  # EQ or GEQ
    coeffs: List[Tuple[int, Fraction]]  # sparse (column, coefficient)
    rhs: Fraction


class RationalLpProblem:
    """min objective . v  subject to  eq/geq rows,  v >= 0."""

    def __init__(self, num_vars: int, objective=None):
        if num_vars < 0:
            raise InputError("variable count must be nonnegative")
        self.num_vars = num_vars
        if objective is None:
            objective = [ZERO] * num_vars
        self.objective = [Fraction(c) for c in objective]
        if len(self.objective) != num_vars:
            raise InputError("objective length does not match variable count")
        self.rows: List[LinearRow] = []

    def _add(self, kind, coeffs, rhs):
        clean = []
        for col, coef in coeffs:
            if not 0 <= col < self.num_vars:
                raise InputError(f"column {col} out of range")
            coef = Fraction(coef)
            if coef != 0:
                clean.append((col, coef))
        self.rows.append(LinearRow(kind, clean, Fraction(rhs)))

    def add_eq(self, coeffs, rhs):
        self._add(EQ, coeffs, rhs)

    def add_geq(self, coeffs, rhs):
        self._add(GEQ, coeffs, rhs)

    @property
    def num_rows(self):
        return len(self.rows)


@dataclass
class LpSolution:
    status: str
    primal: Optional[List[Fraction]] = None
    duals: Optional[List[Fraction]] = None
    objective_value: Optional[Fraction] = None
    farkas: Optional[List[Fraction]] = None


def _pivot(tableau, basis, r, c):
    row = tableau[r]
    piv = row[c]
    inv = ONE / piv
    tableau[r] = row = [v * inv for v in row]
    for k, other in enumerate(tableau):
        if k == r:
            continue
        f = other[c]
        if f != 0:
            tableau[k] = [a - f * b for a, b in zip(other, row)]
    basis[r] = c


def _bland_entering(obj_row, allowed):
    for j in allowed:
        if obj_row[j] < 0:
            return j
    return None


def _bland_leaving(tableau, basis, col, m):
    best = None
    for r in range(m):
        a = tableau[r][col]
        if a > 0:
            ratio = tableau[r][-1] / a
            if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < best[1]):
                best = (ratio, basis[r], r)
    return None if best is None else best[2]


def solve(problem: RationalLpProblem) -> LpSolution:
    """Two-phase simplex. Returns a verified optimum, Farkas ray, or unbounded status."""
    n_vars = problem.num_vars
    geq_rows = [i for i, row in enumerate(problem.rows) if row.kind == GEQ]
    surplus_of = {ri: n_vars + k for k, ri in enumerate(geq_rows)}
    n_struct = n_vars + len(geq_rows)
    m = problem.num_rows

    if m == 0:
        # origin is optimal iff no objective coefficient rewards growth
        if any(c < 0 for c in problem.objective):
            return LpSolution(status=UNBOUNDED)
        return LpSolution(OPTIMAL, [ZERO] * n_vars, [], ZERO)

    sigma = [ONE] * m
    art_col = [n_struct + i for i in range(m)]
    width = n_struct + m + 1
    tableau = []
    for i, row in enumerate(problem.rows):
        dense = [ZERO] * width
        for col, coef in row.coeffs:
            dense[col] = coef
        if row.kind == GEQ:
            dense[surplus_of[i]] = -ONE
        rhs = row.rhs
        if rhs < 0:
            sigma[i] = -ONE
            dense = [-v for v in dense]
            rhs = -rhs
        dense[art_col[i]] = ONE
        dense[-1] = rhs
        tableau.append(dense)
    basis = art_col[:]

    # phase-1 objective (sum of artificials) and phase-2 objective, both as
    # reduced-cost rows updated by every pivot; last entry holds -value
    phase1 = [ZERO] * width
    for j in range(width):
        s = ZERO
        for r in range(m):
            s += tableau[r][j]
        phase1[j] = (ONE if n_struct <= j < width - 1 else ZERO) - s
    phase2 = [ZERO] * width
    for j in range(n_vars):
        phase2[j] = problem.objective[j]
    tableau.append(phase1)
    tableau.append(phase2)
    structural = list(range(n_struct))

    def run(obj_index, allowed):
        while True:
            col = _bland_entering(tableau[obj_index], allowed)
            if col is None:
                return OPTIMAL
            r = _bland_leaving(tableau, basis, col, m)
            if r is None:
                return UNBOUNDED
            _pivot(tableau, basis, r, col)

    status = run(m, structural)
    if status == UNBOUNDED:  # phase 1 is bounded below by zero
        raise SotError("internal error: unbounded phase-1 problem")
    phase1_value = -tableau[m][-1]
    if phase1_value > 0:
        ray = [sigma[i] * (ONE - tableau[m][art_col[i]]) for i in range(m)]
        _verify_farkas(problem, ray)
        return LpSolution(INFEASIBLE, farkas=ray)

    # drive leftover artificials out of the basis; all-zero rows are redundant
    kept = list(range(m))
    removed = set()
    for r in range(m):
        if basis[r] >= n_struct:
            piv_col = next((j for j in structural if tableau[r][j] != 0), None)
            if piv_col is None:
                removed.add(r)
            else:
                _pivot(tableau, basis, r, piv_col)
    if removed:
        keep = [r for r in range(m) if r not in removed]
        tableau = [tableau[r] for r in keep] + [tableau[m + 1]]
        basis = [basis[r] for r in keep]
        kept = keep
        m_eff = len(keep)
        obj_index = m_eff
    else:
        tableau = tableau[:m] + [tableau[m + 1]]
        m_eff = m
        obj_index = m

    def run2():
        while True:
            col = _bland_entering(tableau[obj_index], structural)
            if col is None:
                return OPTIMAL
            r = _bland_leaving(tableau, basis, col, m_eff)
            if r is None:
                return UNBOUNDED
            _pivot(tableau, basis, r, col)

    status = run2()
    if status == UNBOUNDED:
        return LpSolution(status=UNBOUNDED)

    primal = [ZERO] * n_vars
    for r in range(m_eff):
        if basis[r] < n_vars:
            primal[basis[r]] = tableau[r][-1]
    value = -tableau[obj_index][-1]

    duals = [ZERO] * m
    for pos, orig in enumerate(kept):
        # artificial columns carry -y in the reduced-cost row (their cost is 0)
        duals[orig] = sigma[orig] * (-tableau[obj_index][art_col[orig]])
    _verify_optimal(problem, primal, duals, value)
    return LpSolution(OPTIMAL, primal, duals, value)


def feasible(problem: RationalLpProblem) -> LpSolution:
    """Phase-one query: a feasible point (as an optimum of the zero objective) or a Farkas ray."""
    probe = RationalLpProblem(problem.num_vars)
    probe.rows = problem.rows
    return solve(probe)


def _row_value(row: LinearRow, x) -> Fraction:
    return sum((coef * x[col] for col, coef in row.coeffs), ZERO)


def _verify_optimal(problem, primal, duals, value):
    if any(v < 0 for v in primal):
        raise SotError("internal error: negative primal variable")
    for row, y in zip(problem.rows, duals):
        lhs = _row_value(row, primal)
        if row.kind == EQ:
            if lhs != row.rhs:
                raise SotError("internal error: equality residual nonzero")
        else:
            if lhs < row.rhs:
                raise SotError("internal error: >= row violated")
            if y < 0:
                raise SotError("internal error: negative multiplier on >= row")
            if y != 0 and lhs != row.rhs:
                raise SotError("internal error: complementary slackness (rows)")
    reduced = list(problem.objective)
    for row, y in zip(problem.rows, duals):
        if y != 0:
            for col, coef in row.coeffs:
                reduced[col] -= y * coef
    for j, rc in enumerate(reduced):
        if rc < 0:
            raise SotError("internal error: dual infeasibility")
        if rc != 0 and primal[j] != 0:
            raise SotError("internal error: complementary slackness (columns)")
    dual_value = sum((y * row.rhs for row, y in zip(problem.rows, duals)), ZERO)
    primal_value = sum((c * v for c, v in zip(problem.objective, primal)), ZERO)
    if primal_value != value or dual_value != value:
        raise SotError("internal error: duality gap nonzero")


def _verify_farkas(problem, ray):
    combo = [ZERO] * problem.num_vars
    rhs = ZERO
    for row, y in zip(problem.rows, ray):
        if row.kind == GEQ and y < 0:
            raise SotError("internal error: Farkas ray sign")
        if y != 0:
            for col, coef in row.coeffs:
                combo[col] += y * coef
            rhs += y * row.rhs
    if rhs <= 0 or any(c > 0 for c in combo):
        raise SotError("internal error: invalid Farkas certificate")
