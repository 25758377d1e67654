import random
from fractions import Fraction as F

import pytest

from sotkit import ratlp
from sotkit.errors import TooLarge, UnbalancedInput
from sotkit.oracles import (
    classic_ot,
    enumerate_maps,
    kernel_grid_search,
    vertex_enumerate,
)

from conftest import rand_cost, rand_measure


class TestVertexEnumerate:
    def test_single_point_polytope(self):
        p = ratlp.RationalLpProblem(2, [F(1), F(1)])
        p.add_eq([(0, F(1))], F(2))
        p.add_eq([(1, F(1))], F(3))
        r = vertex_enumerate(p)
        assert r.status == "optimal" and r.value == 5 and r.witness == [F(2), F(3)]

    def test_empty_feasible_set(self):
        p = ratlp.RationalLpProblem(1)
        p.add_eq([(0, F(1))], F(-2))
        assert vertex_enumerate(p).status == "infeasible"

    def test_size_limit(self):
        with pytest.raises(TooLarge):
            vertex_enumerate(ratlp.RationalLpProblem(13))

    def test_counts_bases(self):
        p = ratlp.RationalLpProblem(2, [F(1), F(0)])
        p.add_geq([(0, F(1)), (1, F(1))], F(1))
        r = vertex_enumerate(p)
        assert r.status == "optimal" and r.value == 0
        assert r.enumerated >= 1


class TestClassicOt:
    def test_requires_balanced(self):
        with pytest.raises(UnbalancedInput):
            classic_ot([F(1)], [F(2)], [[F(0)]])

    def test_zero_diagonal_identity(self):
        cost = [[F(0), F(5)], [F(5), F(0)]]
        r = classic_ot([F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)], cost)
        assert r.value == 0

    def test_submodular_cost_is_comonotone(self):
        # sorted marginals with |x-y| style cost: staircase coupling is optimal
        cost = [[F(0), F(1)], [F(1), F(0)]]
        r = classic_ot([F(3, 4), F(1, 4)], [F(1, 4), F(3, 4)], cost)
        # comonotone: send 1/4 of the first row across
        assert r.value == F(1, 2)

    def test_agrees_with_vertex_enumeration(self):
        rng = random.Random(11)
        for _ in range(20):
            n, m = rng.randint(2, 4), rng.randint(2, 3)
            supply = [F(rng.randint(1, 6), 6) for _ in range(n)]
            demand = [F(rng.randint(1, 6), 6) for _ in range(m)]
            total_s, total_d = sum(supply), sum(demand)
            demand = [v * total_s / total_d for v in demand]
            cost = [[F(rng.randint(0, 9)) for _ in range(m)] for _ in range(n)]
            got = classic_ot(supply, demand, cost)
            p = ratlp.RationalLpProblem(
                n * m, [cost[i][k] for i in range(n) for k in range(m)]
            )
            for i in range(n):
                p.add_eq([(i * m + k, F(1)) for k in range(m)], supply[i])
            for k in range(m):
                p.add_eq([(i * m + k, F(1)) for i in range(n)], demand[k])
            want = vertex_enumerate(p)
            assert got.value == want.value

    def test_plan_has_correct_marginals(self):
        supply = [F(1, 3), F(2, 3)]
        demand = [F(1, 2), F(1, 2)]
        r = classic_ot(supply, demand, [[F(2), F(7)], [F(3), F(1)]])
        assert [sum(row) for row in r.witness] == supply
        assert [sum(col) for col in zip(*r.witness)] == demand


class TestEnumerations:
    def test_enumerate_maps_counts_all(self, rng):
        mu = rand_measure(rng, 3, 2)
        nu = rand_measure(rng, 2, 2, labels_prefix="y").scaled(F(1, 100))
        eta = mu.mubar()
        cost = rand_cost(rng, 3, 2)
        r = enumerate_maps(mu, nu, eta, cost)
        assert r.enumerated == 2**3

    def test_grid_search_finds_constant_kernel(self):
        mu = rand_measure(random.Random(5), 2, 2)
        # target = half of the source pushed through the uniform kernel
        half = [[w / 4 for w in row] for row in mu.weights]
        from sotkit.measures import DiscreteVectorMeasure, make_support

        nu = DiscreteVectorMeasure(
            make_support(["y0", "y1"]),
            [[sum(row) / 4, sum(row) / 4] for row in mu.weights],
        )
        obj = [[F(1), F(1)], [F(1), F(1)]]
        r = kernel_grid_search(mu, nu, mu.mubar(), obj, steps=4)
        assert r.status == "optimal" and r.value == 1
