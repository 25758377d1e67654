"""Command implementations shared by the HTTP service, the CLI and selftest.

Every function takes plain JSON-shaped dicts, runs the library, and
returns a JSON-shaped payload with rationals rendered per the requested
mode ("p/q" strings in exact mode, round-trip floats otherwise).
Infeasibility is reported inside the payload (status / feasible fields,
with certificates), never as an exception; exceptions mean bad input.
"""

from fractions import Fraction

from . import bounds as bounds_mod
from . import duality, feasibility, monge as monge_mod, oracles, parity as parity_mod
from . import ratlp, twoway
from .errors import SotError
from .io import SCHEMA, Instance, parse_instance, ser
from .measures import ReferenceMeasure
from .rational import parse_rational
from .solver import (
    decomposable_cost_check,
    kernel_lp,
    kernel_objective,
    resolve_eta,
    solve_sot,
)

ZERO = Fraction(0)


def _base(command, mode):
    return {"schema": SCHEMA, "command": command, "mode": mode}


def _law_pair(inst: Instance):
    mu = inst.mu.trim()
    nu = inst.nu.trim()
    return mu.derivative_law(), nu.derivative_law()


def run_solve(data: dict, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    result = solve_sot(inst.mu, inst.nu, inst.eta, inst.require_cost())
    payload = _base("solve", mode)
    payload["status"] = result.status
    payload["source_labels"] = list(inst.mu.labels)
    payload["target_labels"] = list(inst.nu.labels)
    if result.feasible:
        payload["optimal_cost"] = ser(result.optimal_cost, mode)
        payload["kernel"] = ser(result.kernel.matrix, mode)
        payload["plan"] = ser(result.plan, mode)
        payload["is_balanced"] = result.is_balanced
    else:
        payload["farkas"] = ser(result.farkas, mode)
    return payload


def run_feasible(data: dict, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    report = feasibility.kernel_feasible(inst.mu, inst.nu)
    law_mu, law_nu = _law_pair(inst)
    order = feasibility.icx_order_feasible(law_mu, law_nu)
    if order.feasible != report.feasible:
        raise SotError(
            "internal error: kernel LP and order coupling disagree on feasibility"
        )
    payload = _base("feasible", mode)
    payload["feasible"] = report.feasible
    payload["method"] = "kernel+icx-order"
    payload["icx_agrees"] = True
    if report.feasible:
        payload["witness_kernel"] = ser(report.witness_kernel.matrix, mode)
        payload["order_witness"] = ser(order.order_witness, mode)
    else:
        payload["farkas"] = ser(report.farkas, mode)
    return payload


def run_dual(data: dict, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    cost = inst.require_cost()
    primal = solve_sot(inst.mu, inst.nu, inst.eta, cost)
    payload = _base("dual", mode)
    if not primal.feasible:
        payload["status"] = ratlp.INFEASIBLE
        payload["farkas"] = ser(primal.farkas, mode)
        return payload
    cert = duality.dual_certificate(inst.mu, inst.nu, inst.eta, cost)
    eta = resolve_eta(inst.mu, inst.eta)
    if not duality.verify_dual_feasibility(cert, inst.mu, eta, cost):
        raise SotError("internal error: certificate failed independent verification")
    payload["status"] = "optimal"
    payload["primal_value"] = ser(cert.primal_value, mode)
    payload["dual_value"] = ser(cert.dual_value, mode)
    payload["gap"] = ser(cert.gap, mode)
    payload["phi"] = ser(cert.phi, mode)
    payload["psi"] = ser(cert.psi, mode)
    payload["one_sided"] = cert.one_sided
    payload["finite_lp_attainment"] = cert.finite_lp_attainment
    payload["feasibility_verified"] = True
    return payload


def run_equilibrium(data: dict, production, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    report = duality.equilibrium(inst.mu, inst.nu, inst.eta, production)
    payload = _base("equilibrium", mode)
    payload["status"] = "optimal"
    payload["production_value"] = ser(report.production_value, mode)
    payload["wage"] = ser(report.wage, mode)
    payload["profit_per_skill"] = ser(report.profit_per_skill, mode)
    payload["matching"] = ser(report.matching, mode)
    payload["source_labels"] = list(inst.mu.labels)
    payload["target_labels"] = list(inst.nu.labels)
    return payload


def _slice_payload(decomposition, per_slice, mode):
    slices = []
    values = dict()
    for profile, value in per_slice:
        values[profile] = value
    for sl in decomposition.slices:
        slices.append(
            {
                "profile": ser(sl.profile, mode),
                "mass": ser(sl.mass, mode),
                "cost": ser(values[sl.profile], mode),
                "x_members": [decomposition.mu.labels[i] for i in sl.x_members],
                "y_members": [decomposition.nu.labels[k] for k in sl.y_members],
            }
        )
    return slices


def run_decompose(data: dict, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    result = twoway.decompose_solve(inst.mu, inst.nu, inst.require_cost(), mode)
    payload = _base("decompose", mode)
    payload["status"] = "optimal"
    payload["total"] = ser(result.total, mode)
    payload["slices"] = _slice_payload(result.decomposition, result.per_slice, mode)
    payload["kernel"] = ser(result.kernel.matrix, mode)
    payload["source_labels"] = list(result.decomposition.mu.labels)
    payload["target_labels"] = list(result.decomposition.nu.labels)
    return payload


def run_wasserstein(data: dict, p, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    result = twoway.wasserstein(inst.mu, inst.nu, p, mode)
    bound = twoway.wd_lower_bound(inst.mu, inst.nu, p, mode)
    payload = _base("wasserstein", mode)
    payload["p"] = ser(result.p, mode)
    payload["power"] = ser(result.power, mode)
    payload["distance"] = result.distance
    payload["per_slice_powers"] = [
        {"profile": ser(profile, mode), "power": ser(value, mode)}
        for profile, value in result.per_slice
    ]
    payload["componentwise_lower_bound_power"] = ser(bound, mode)
    return payload


def run_parity(data: dict, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    cost = inst.require_cost()
    report = parity_mod.parity_solve(inst.mu, inst.nu, cost)
    payload = _base("parity", mode)
    payload["status"] = report.status
    if report.status != "optimal":
        return payload
    payload["mot_value"] = ser(report.mot_value, mode)
    payload["sot_value"] = ser(report.sot_value, mode)
    payload["equal"] = report.equal
    payload["coupling"] = ser(report.coupling.matrix, mode)
    payload["source_atoms"] = ser(report.coupling.source_atoms, mode)
    payload["target_atoms"] = ser(report.coupling.target_atoms, mode)
    kernel = parity_mod.kernel_from_martingale(report.coupling, inst.mu, inst.nu)
    mu_t = inst.mu.trim()
    mb = mu_t.mubar()
    recovered_cost = sum(
        (
            mb[i] * kernel[i][k] * cost[i][k]
            for i in range(mu_t.n)
            for k in range(inst.nu.trim().n)
        ),
        ZERO,
    )
    payload["recovered_kernel"] = ser(kernel.matrix, mode)
    payload["recovered_kernel_cost"] = ser(recovered_cost, mode)
    return payload


def run_bounds(data: dict, grid=None, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    cost = inst.require_cost()
    simplex = bounds_mod.simplex_bound(inst.mu, inst.nu, inst.eta, cost, grid)
    payload = _base("bounds", mode)
    payload["simplex_scalarization"] = _bound_payload(simplex, mode)
    if simplex.infinite:
        payload["status"] = ratlp.INFEASIBLE
        return payload
    try:
        positive = bounds_mod.positive_part_bound(inst.mu, inst.nu, inst.eta, cost)
        payload["positive_part"] = _bound_payload(positive, mode)
        payload["status"] = ratlp.INFEASIBLE if positive.infinite else "optimal"
    except SotError as exc:
        payload["positive_part"] = {"applicable": False, "reason": str(exc)}
        payload["status"] = "optimal"
    return payload


def _bound_payload(report, mode):
    out = {
        "kind": report.kind,
        "applicable": report.applicable,
        "infinite": report.infinite,
        "detail": ser(report.detail, mode),
    }
    if report.value is not None:
        out["value"] = ser(report.value, mode)
    return out


def run_monge(data: dict, node_budget=None, mode: str = "exact") -> dict:
    inst = parse_instance(data)
    budget = node_budget or monge_mod.DEFAULT_NODE_BUDGET
    result = monge_mod.monge_solve(
        inst.mu, inst.nu, inst.eta, inst.require_cost(), budget
    )
    payload = _base("monge", mode)
    payload["status"] = result.status
    payload["nodes"] = result.nodes
    payload["optimal"] = result.optimal
    if result.best is not None:
        payload["assignment"] = [
            inst.nu.labels[k] if k is not None else None
            for k in result.best.assignment
        ]
        payload["cost"] = ser(result.best.value, mode)
    return payload


def run_refugee(data: dict, node_budget=None, mode: str = "exact") -> dict:
    inst = monge_mod.RefugeeInstance.from_dict(data)
    budget = node_budget or monge_mod.DEFAULT_NODE_BUDGET
    result = monge_mod.refugee_solve(inst, budget)
    payload = _base("refugee", mode)
    payload["status"] = result.status
    payload["nodes"] = result.nodes
    payload["optimal"] = result.optimal
    if result.best is not None:
        payload["assignment"] = {
            inst.family_ids[i]: (
                inst.affiliate_ids[l] if l is not None else None
            )
            for i, l in enumerate(result.best.assignment)
        }
        payload["value"] = ser(result.best.value, mode)
    return payload


def run_markov(variances, mode: str = "exact") -> dict:
    values = [parse_rational(v) for v in variances]
    report = feasibility.gaussian_markov_check(values)
    payload = _base("markov", mode)
    payload["classification"] = report.classification
    payload["sufficient"] = report.sufficient
    if report.note:
        payload["note"] = report.note
    return payload


def run_dev_vertex_enumerate(data: dict, mode: str = "exact") -> dict:
    """Debug helper: brute-force the kernel polytope of an instance."""
    inst = parse_instance(data)
    eta = resolve_eta(inst.mu, inst.eta)
    problem = kernel_lp(
        inst.mu, inst.nu, kernel_objective(eta, inst.require_cost())
    )
    result = oracles.vertex_enumerate(problem)
    payload = _base("dev-vertex-enumerate", mode)
    payload["status"] = result.status
    payload["enumerated"] = result.enumerated
    if result.value is not None:
        payload["value"] = ser(result.value, mode)
    return payload


COMMANDS_NEEDING_COST = {"solve", "dual", "decompose", "parity", "bounds", "monge"}
