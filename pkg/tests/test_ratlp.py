import random
from fractions import Fraction as F

import pytest

from sotkit import ratlp
from sotkit.oracles import vertex_enumerate


def lp(num_vars, objective=None):
    return ratlp.RationalLpProblem(num_vars, objective)


class TestBasics:
    def test_min_x_geq_3(self):
        p = lp(1, [F(1)])
        p.add_geq([(0, F(1))], F(3))
        s = ratlp.solve(p)
        assert s.status == "optimal"
        assert s.primal == [F(3)] and s.objective_value == F(3)

    def test_contradictory_equalities_give_farkas(self):
        p = lp(1)
        p.add_eq([(0, F(1))], F(1))
        p.add_eq([(0, F(1))], F(2))
        s = ratlp.solve(p)
        assert s.status == "infeasible"
        # ray checked inside solve; re-check the headline inequality here
        assert sum(y * row.rhs for y, row in zip(s.farkas, p.rows)) > 0

    def test_unbounded(self):
        p = lp(2, [F(-1), F(0)])
        p.add_geq([(0, F(1)), (1, F(1))], F(1))
        assert ratlp.solve(p).status == "unbounded"

    def test_negative_rhs_geq(self):
        p = lp(1, [F(1)])
        p.add_geq([(0, F(-1))], F(-5))  # x <= 5
        s = ratlp.solve(p)
        assert s.status == "optimal" and s.objective_value == 0

    def test_redundant_rows_are_dropped(self):
        p = lp(2, [F(1), F(2)])
        p.add_eq([(0, F(1)), (1, F(1))], F(1))
        p.add_eq([(0, F(2)), (1, F(2))], F(2))
        s = ratlp.solve(p)
        assert s.status == "optimal" and s.objective_value == 1


class TestFeasible:
    def test_sign_contradiction(self):
        p = lp(1)
        p.add_eq([(0, F(1))], F(-1))  # x = -1 with x >= 0
        s = ratlp.feasible(p)
        assert s.status == "infeasible" and s.farkas is not None

    def test_empty_constraints_origin(self):
        s = ratlp.feasible(lp(3))
        assert s.status == "optimal" and s.primal == [0, 0, 0]


class TestAgainstVertexOracle:
    def test_random_instances(self):
        rng = random.Random(42)
        for _ in range(50):
            n, m = 6, 4
            p = lp(n, [F(rng.randint(-6, 6)) for _ in range(n)])
            for _ in range(m):
                coeffs = [
                    (j, F(rng.randint(-4, 4))) for j in range(n) if rng.random() < 0.8
                ]
                rhs = F(rng.randint(-5, 8))
                if rng.random() < 0.5:
                    p.add_geq(coeffs, rhs)
                else:
                    p.add_eq(coeffs, rhs)
            # keep the region bounded so the oracle minimum is the LP minimum
            p.add_geq([(j, F(-1)) for j in range(n)], F(-30))
            got = ratlp.solve(p)
            want = vertex_enumerate(p)
            assert got.status == want.status
            if got.status == "optimal":
                assert got.objective_value == want.value

    def test_transport_shaped_instance(self):
        p = lp(4, [F(0), F(1), F(1), F(0)])
        p.add_eq([(0, F(1)), (1, F(1))], F(1))
        p.add_eq([(2, F(1)), (3, F(1))], F(1))
        p.add_geq([(0, F(1, 2)), (2, F(1, 2))], F(1, 2))
        s = ratlp.solve(p)
        assert s.objective_value == vertex_enumerate(p).value == 0


class TestAntiCycling:
    def test_beale_terminates_at_its_optimum(self):
        # classic cycling example for non-Bland pivoting; <= rows as negated >=
        p = lp(4, [F(-3, 4), F(150), F(-1, 50), F(6)])
        p.add_geq([(0, F(-1, 4)), (1, F(60)), (2, F(1, 25)), (3, F(-9))], F(0))
        p.add_geq([(0, F(-1, 2)), (1, F(90)), (2, F(1, 50)), (3, F(-3))], F(0))
        p.add_geq([(2, F(-1))], F(-1))
        s = ratlp.solve(p)
        assert s.status == "optimal"
        assert s.objective_value == F(-1, 20)


class TestCertificates:
    def test_duals_and_gap_on_randoms(self):
        rng = random.Random(7)
        for _ in range(30):
            p = lp(5, [F(rng.randint(0, 9)) for _ in range(5)])
            for _ in range(3):
                coeffs = [(j, F(rng.randint(0, 3))) for j in range(1, 5)]
                coeffs.append((0, F(rng.randint(1, 3))))
                p.add_geq(coeffs, F(rng.randint(0, 6)))
            s = ratlp.solve(p)
            assert s.status == "optimal"
            dual_value = sum(y * row.rhs for y, row in zip(s.duals, p.rows))
            assert dual_value == s.objective_value
            assert all(y >= 0 for y in s.duals)  # all rows are >=

    def test_determinism(self):
        def build():
            p = lp(4, [F(1), F(-1), F(2), F(0)])
            p.add_eq([(0, F(1)), (1, F(1)), (2, F(1))], F(2))
            p.add_geq([(1, F(1)), (3, F(1))], F(1))
            return p

        a = ratlp.solve(build())
        b = ratlp.solve(build())
        assert a.primal == b.primal and a.duals == b.duals
