"""Map-valued (single-trip) transport by exact depth-first search, plus the
refugee-resettlement integer program it generalizes.

The search assigns source points to targets in index order. A branch is
abandoned when, for some component, the supply still unassigned cannot
cover the remaining demand (a deliberately relaxed aggregate check), or
when its accumulated cost already matches the incumbent. No LP relaxation
is used; desk-scale instances need nothing more. Search order is fixed,
so results and node counts are deterministic for a given budget.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .errors import InputError
from .measures import DiscreteVectorMeasure
from .rational import parse_rational
from .solver import CostMatrix, resolve_eta, solve_sot

ZERO = Fraction(0)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
BUDGET_EXCEEDED = "budget_exceeded"

DEFAULT_NODE_BUDGET = 10**6


@dataclass
class MongeAssignment:
    assignment: tuple  # target index per source point; None means unassigned
    value: Fraction  # cost for transport search, score for refugee search


@dataclass
class MongeResult:
    status: str
    best: Optional[MongeAssignment]
    nodes: int
    optimal: bool  # False when the node budget cut the search short


def _search_min(n, m, eta_w, cost, supplies, demands, node_budget):
    """DFS over maps, minimizing sum eta(x) c(x, T(x)) under coverage."""
    d = len(supplies)
    remaining = [sum(supplies[j], ZERO) for j in range(d)]
    residual = [list(demands[j]) for j in range(d)]
    residual_total = [
        sum((max(v, ZERO) for v in residual[j]), ZERO) for j in range(d)
    ]
    state = {"nodes": 0, "best": None, "best_cost": None, "hit_budget": False}
    choice = [None] * n

    def feasible_prefix():
        return all(remaining[j] >= residual_total[j] for j in range(d))

    def recurse(i, prefix_cost):
        if state["hit_budget"]:
            return
        if i == n:
            if all(residual_total[j] == 0 for j in range(d)):
                if state["best_cost"] is None or prefix_cost < state["best_cost"]:
                    state["best_cost"] = prefix_cost
                    state["best"] = tuple(choice)
            return
        for k in range(m):
            state["nodes"] += 1
            if state["nodes"] > node_budget:
                state["hit_budget"] = True
                return
            cost_here = prefix_cost + eta_w[i] * cost[i][k]
            if state["best_cost"] is not None and cost_here >= state["best_cost"]:
                continue
            for j in range(d):
                remaining[j] -= supplies[j][i]
                old = residual[j][k]
                new = old - supplies[j][i]
                residual[j][k] = new
                residual_total[j] += max(new, ZERO) - max(old, ZERO)
            choice[i] = k
            if feasible_prefix():
                recurse(i + 1, cost_here)
            choice[i] = None
            for j in range(d):
                remaining[j] += supplies[j][i]
                new = residual[j][k]
                old = new + supplies[j][i]
                residual[j][k] = old
                residual_total[j] += max(old, ZERO) - max(new, ZERO)
            if state["hit_budget"]:
                return

    recurse(0, ZERO)
    return state


def monge_solve(
    mu: DiscreteVectorMeasure,
    nu: DiscreteVectorMeasure,
    eta=None,
    cost: CostMatrix = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MongeResult:
    """Exact minimum-cost map sending each source point to one target so the
    image measure covers the target tuple; see module docstring for search rules."""
    if cost is None:
        raise InputError("monge_solve needs a cost matrix")
    if mu.d != nu.d:
        raise InputError("tuples must share d")
    eta = resolve_eta(mu, eta)
    state = _search_min(
        mu.n, nu.n, eta.weights, cost, mu.weights, nu.weights, node_budget
    )
    if state["best"] is None:
        status = BUDGET_EXCEEDED if state["hit_budget"] else INFEASIBLE
        return MongeResult(status, None, state["nodes"], False)
    best = MongeAssignment(state["best"], state["best_cost"])
    if state["hit_budget"]:
        return MongeResult(BUDGET_EXCEEDED, best, state["nodes"], False)
    return MongeResult(OPTIMAL, best, state["nodes"], True)


@dataclass
class RefugeeInstance:
    """Families contribute quota vectors; affiliates impose quota floors;
    scores rate each family-affiliate match."""

    family_ids: tuple
    contributions: tuple  # per family, one rational per quota
    affiliate_ids: tuple
    floors: tuple  # per affiliate, one rational per quota
    scores: tuple  # families x affiliates

    @classmethod
    def from_dict(cls, data) -> "RefugeeInstance":
        try:
            families = data["families"]
            affiliates = data["affiliates"]
            scores = data["scores"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"refugee instance missing key: {exc}") from exc
        fam_ids = tuple(str(f["id"]) for f in families)
        contrib = tuple(
            tuple(parse_rational(v) for v in f["q"]) for f in families
        )
        aff_ids = tuple(str(a["id"]) for a in affiliates)
        floors = tuple(
            tuple(parse_rational(v) for v in a["floors"]) for a in affiliates
        )
        score_rows = tuple(tuple(parse_rational(v) for v in row) for row in scores)
        K = {len(q) for q in contrib} | {len(f) for f in floors}
        if len(K) != 1:
            raise InputError("quota vector lengths differ")
        if len(score_rows) != len(fam_ids) or any(
            len(r) != len(aff_ids) for r in score_rows
        ):
            raise InputError("score matrix shape does not match families x affiliates")
        if any(v < 0 for q in contrib for v in q) or any(
            v < 0 for f in floors for v in f
        ):
            raise InputError("quota contributions and floors must be nonnegative")
        return cls(fam_ids, contrib, aff_ids, floors, score_rows)

    @property
    def num_quotas(self):
        return len(self.floors[0]) if self.floors else len(self.contributions[0])


def refugee_solve(inst: RefugeeInstance, node_budget: int = DEFAULT_NODE_BUDGET) -> MongeResult:
    """Maximize total match score; each family joins at most one affiliate and
    every affiliate's quota floors must be met. Unassigned families are
    modeled as a dummy affiliate with zero floors and zero score."""
    n = len(inst.family_ids)
    num_aff = len(inst.affiliate_ids)
    K = inst.num_quotas
    # dummy column: target index num_aff
    score_shift = [
        [inst.scores[i][l] for l in range(num_aff)] + [ZERO] for i in range(n)
    ]
    residual = [list(inst.floors[l]) for l in range(num_aff)] + [[ZERO] * K]
    remaining = [sum((inst.contributions[i][k] for i in range(n)), ZERO) for k in range(K)]
    residual_total = [
        sum((max(residual[l][k], ZERO) for l in range(num_aff + 1)), ZERO)
        for k in range(K)
    ]
    max_gain = [max([ZERO] + [s for s in score_shift[i]]) for i in range(n)]
    suffix_gain = [ZERO] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_gain[i] = suffix_gain[i + 1] + max_gain[i]
    state = {"nodes": 0, "best": None, "best_value": None, "hit_budget": False}
    choice = [None] * n

    def recurse(i, value):
        if state["hit_budget"]:
            return
        if i == n:
            if all(residual_total[k] == 0 for k in range(K)):
                if state["best_value"] is None or value > state["best_value"]:
                    state["best_value"] = value
                    state["best"] = tuple(
                        c if c < num_aff else None for c in choice
                    )
            return
        if (
            state["best_value"] is not None
            and value + suffix_gain[i] <= state["best_value"]
        ):
            return
        for l in range(num_aff + 1):
            state["nodes"] += 1
            if state["nodes"] > node_budget:
                state["hit_budget"] = True
                return
            ok = True
            for k in range(K):
                remaining[k] -= inst.contributions[i][k]
                old = residual[l][k]
                new = old - inst.contributions[i][k]
                residual[l][k] = new
                residual_total[k] += max(new, ZERO) - max(old, ZERO)
                if remaining[k] < residual_total[k]:
                    ok = False
            choice[i] = l
            if ok:
                recurse(i + 1, value + score_shift[i][l])
            choice[i] = None
            for k in range(K):
                remaining[k] += inst.contributions[i][k]
                new = residual[l][k]
                old = new + inst.contributions[i][k]
                residual[l][k] = old
                residual_total[k] += max(old, ZERO) - max(new, ZERO)
            if state["hit_budget"]:
                return

    recurse(0, ZERO)
    if state["best"] is None:
        status = BUDGET_EXCEEDED if state["hit_budget"] else INFEASIBLE
        return MongeResult(status, None, state["nodes"], False)
    best = MongeAssignment(state["best"], state["best_value"])
    if state["hit_budget"]:
        return MongeResult(BUDGET_EXCEEDED, best, state["nodes"], False)
    return MongeResult(OPTIMAL, best, state["nodes"], True)


@dataclass
class MongeGapReport:
    monge_cost: Optional[Fraction]
    kernel_cost: Optional[Fraction]
    gap: Optional[Fraction]  # None with monge_infeasible means an infinite gap
    monge_infeasible: bool


def monge_gap(mu, nu, eta=None, cost=None, node_budget=DEFAULT_NODE_BUDGET) -> MongeGapReport:
    """Map optimum minus kernel optimum; maps are special kernels, so the gap
    is nonnegative whenever a map exists, and infinite when only kernels do."""
    kernel = solve_sot(mu, nu, eta, cost)
    if not kernel.feasible:
        raise InputError("monge_gap needs a kernel-feasible instance")
    monge = monge_solve(mu, nu, eta, cost, node_budget)
    if monge.status == INFEASIBLE:
        return MongeGapReport(None, kernel.optimal_cost, None, True)
    if monge.status == BUDGET_EXCEEDED:
        raise InputError("node budget exhausted before the search completed")
    gap = monge.best.value - kernel.optimal_cost
    if gap < 0:
        raise AssertionError("map cost below kernel optimum")
    return MongeGapReport(monge.best.value, kernel.optimal_cost, gap, False)
