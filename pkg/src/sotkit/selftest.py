"""Replay of the bundled golden instances with their published values.

Each check recomputes a documented quantity from a bundled instance and
compares exactly. Used by `sot selftest` and by GET /selftest.
"""

import importlib.resources
import json
from fractions import Fraction

from . import api
from .io import parse_instance
from .measures import DiscreteVectorMeasure
from .rational import parse_rational

F = Fraction


def load_golden(name: str) -> dict:
    ref = importlib.resources.files("sotkit.golden").joinpath(name)
    with ref.open() as fh:
        return json.load(fh, parse_float=parse_rational, parse_int=int)


def _check_unique_kernel():
    data = load_golden("unique_kernel.json")
    inst = parse_instance(data)
    solved = api.run_solve(data)
    row = ["1/3", "2/3"]
    if solved["status"] != "optimal" or solved["kernel"] != [row, row]:
        return False, f"kernel {solved.get('kernel')}"
    if solved["optimal_cost"] != "1/2":
        return False, f"cost {solved['optimal_cost']}"
    law_mu = inst.mu.derivative_law()
    law_nu = inst.nu.derivative_law()
    want_mu = {(F(2, 3), F(4, 3)): F(1, 2), (F(4, 3), F(2, 3)): F(1, 2)}
    want_nu = {(F(1), F(1)): F(1)}
    if law_mu.as_dict() != want_mu or law_nu.as_dict() != want_nu:
        return False, "derivative laws off"
    parity = api.run_parity(data)
    if not (
        parity["equal"]
        and parity["mot_value"] == "1/2"
        and parity["coupling"] == [["1/2", "1/2"]]
        and parity["recovered_kernel"] == [row, row]
    ):
        return False, f"parity {parity}"
    return True, "unique kernel rows (1/3, 2/3); cost and parity value 1/2"


def _check_intro_pair():
    bad = api.run_feasible(load_golden("intro_infeasible.json"))
    good = api.run_feasible(load_golden("intro_feasible.json"))
    if bad["feasible"] or "farkas" not in bad:
        return False, "equal-ratio instance not certified infeasible"
    if not good["feasible"]:
        return False, "3:1 / 1:3 instance not feasible"
    return True, "demand 2:1/1:2 infeasible with Farkas ray; 3:1/1:3 supply feasible"


def _check_markov():
    report = api.run_markov(["64", "16", "4", "2", "1"])
    if report["classification"] != "DecreasingLogConvex" or report["sufficient"]:
        return False, str(report)
    report2 = api.run_markov(["1", "4", "4"])
    if report2["classification"] != "IncreasingLogConcave" or not report2["sufficient"]:
        return False, str(report2)
    return True, "variance schedules (64,16,4,2,1) and (1,4,4) classified"


def _check_translation():
    data = load_golden("translation_twoway.json")
    w1 = api.run_wasserstein(data, 1)
    w2 = api.run_wasserstein(data, 2)
    if w1["power"] != "2" or w2["power"] != "4":
        return False, f"powers {w1['power']}, {w2['power']}"
    if w1["componentwise_lower_bound_power"] != "2":
        return False, "translation lower bound not tight"
    return True, "shift by 2: W_1 power 2 and W_2 power 4, bound tight"


def _check_disjoint_sharpness():
    data = load_golden("disjoint_supports.json")
    solved = api.run_solve(data)
    bounds = api.run_bounds(data)
    opt = solved["optimal_cost"]
    if bounds["simplex_scalarization"].get("value") != opt:
        return False, f"scalarization {bounds['simplex_scalarization']} vs {opt}"
    if bounds["positive_part"].get("value") != opt:
        return False, f"positive part {bounds['positive_part']} vs {opt}"
    return True, f"both lower bounds equal the optimum {opt} on disjoint supports"


CHECKS = [
    ("unique-kernel", _check_unique_kernel),
    ("intro-feasibility-pair", _check_intro_pair),
    ("markov-variance-schedules", _check_markov),
    ("translation-distance", _check_translation),
    ("disjoint-support-sharpness", _check_disjoint_sharpness),
]


def run_selftest() -> dict:
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check()
        except Exception as exc:  # a broken golden file must fail, not crash
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": passed, "detail": detail})
    return {
        "schema": "sot/1",
        "command": "selftest",
        "passed": all(r["passed"] for r in results),
        "results": results,
    }
