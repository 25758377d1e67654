import random
from fractions import Fraction as F

import pytest

from sotkit.errors import NonPositiveSigma, UnbalancedInput
from sotkit.feasibility import (
    constant_kernel_witness,
    cx_order_feasible,
    gaussian_markov_check,
    icx_order_feasible,
    kernel_feasible,
)
from sotkit.measures import DerivativeLaw, DiscreteVectorMeasure, make_support

from conftest import (
    arbitrary_pair,
    feasible_pair,
    pushforward_measure,
    rand_kernel_rows,
    rand_measure,
    unbalanced_feasible_pair,
)


def law(pairs):
    atoms = tuple(tuple(F(v) for v in atom) for atom, _ in pairs)
    masses = tuple(F(m) for _, m in pairs)
    return DerivativeLaw(atoms, masses, tuple((i,) for i in range(len(pairs))))


INTRO_NU = [[F(2, 3), F(1, 3)], [F(1, 3), F(2, 3)]]


def intro_instances():
    nu = DiscreteVectorMeasure(make_support(["r1", "r2"]), INTRO_NU)
    bad_mu = DiscreteVectorMeasure(make_support(["f"]), [[F(1)], [F(1)]])
    good_mu = DiscreteVectorMeasure(
        make_support(["f1", "f2"]), [[F(3, 4), F(1, 4)], [F(1, 4), F(3, 4)]]
    )
    return bad_mu, good_mu, nu


class TestKernelFeasible:
    def test_equal_ratio_supply_is_infeasible(self):
        bad_mu, _, nu = intro_instances()
        report = kernel_feasible(bad_mu, nu)
        assert not report.feasible and report.farkas is not None

    def test_split_ratio_supply_is_feasible(self):
        _, good_mu, nu = intro_instances()
        report = kernel_feasible(good_mu, nu)
        assert report.feasible
        assert report.witness_kernel.covers(good_mu, nu)

    def test_constructed_pushforward_always_feasible(self, rng):
        for _ in range(10):
            mu, nu, kernel = feasible_pair(rng, 3, 3, 2)
            report = kernel_feasible(mu, nu)
            assert report.feasible
            # the generating kernel itself is a witness too
            from sotkit.solver import TransportKernel

            assert TransportKernel(kernel).covers(mu, nu)


class TestOrderRoutes:
    def test_paper_barycenter_coupling(self):
        m_mu = law([((F(4, 3), F(2, 3)), F(1, 2)), ((F(2, 3), F(4, 3)), F(1, 2))])
        m_nu = law([((1, 1), 1)])
        assert icx_order_feasible(m_mu, m_nu).feasible

    def test_identity_coupling_for_equal_laws(self):
        m = law([((F(4, 3), F(2, 3)), F(1, 2)), ((F(2, 3), F(4, 3)), F(1, 2))])
        report = icx_order_feasible(m, m)
        assert report.feasible

    def test_reversed_direction_infeasible(self):
        # a point mass cannot dominate a genuine two-atom spread
        m_mu = law([((1, 1), 1)])
        m_nu = law([((F(4, 3), F(2, 3)), F(1, 2)), ((F(2, 3), F(4, 3)), F(1, 2))])
        assert not icx_order_feasible(m_mu, m_nu).feasible

    def test_cx_requires_balance(self):
        m_mu = law([((2, 1), 1)])
        m_nu = law([((1, 1), 1)])
        with pytest.raises(UnbalancedInput):
            cx_order_feasible(m_mu, m_nu)

    def test_cx_mirrors_icx_when_balanced(self, rng):
        for _ in range(20):
            mu, nu = arbitrary_pair(rng, 3, 3, 2)
            m_mu = mu.trim().derivative_law()
            m_nu = nu.trim().derivative_law()
            assert (
                cx_order_feasible(m_mu, m_nu, mu, nu).feasible
                == icx_order_feasible(m_mu, m_nu).feasible
            )


class TestEquivalenceProperty:
    def test_kernel_iff_order_on_random_instances(self, rng):
        """The two independent feasibility routes must agree everywhere."""
        agree = 0
        for trial in range(60):
            n, m, d = rng.randint(2, 5), rng.randint(2, 5), rng.randint(1, 3)
            if trial % 3 == 0:
                mu, nu, _ = feasible_pair(rng, n, m, d)
            elif trial % 3 == 1:
                mu, nu, _ = unbalanced_feasible_pair(rng, n, m, d)
            else:
                mu, nu = arbitrary_pair(rng, n, m, d)
            kernel = kernel_feasible(mu, nu)
            order = icx_order_feasible(
                mu.trim().derivative_law(), nu.trim().derivative_law()
            )
            assert kernel.feasible == order.feasible
            agree += 1
        assert agree == 60

    def test_composition_through_chains(self, rng):
        for _ in range(10):
            mu, nu, _ = feasible_pair(rng, 3, 3, 2)
            rho = pushforward_measure(
                nu, rand_kernel_rows(rng, 3, 2), labels_prefix="z"
            )
            assert kernel_feasible(mu, nu).feasible
            assert kernel_feasible(nu, rho).feasible
            assert kernel_feasible(mu, rho).feasible

    def test_icx_implies_mass_dominance(self, rng):
        for _ in range(20):
            n, m, d = rng.randint(2, 4), rng.randint(2, 4), rng.randint(1, 3)
            mu, nu = arbitrary_pair(rng, n, m, d)
            nu = nu.scaled([F(rng.randint(1, 4), 4) for _ in range(d)])
            if kernel_feasible(mu, nu).feasible:
                assert all(
                    tm >= tn
                    for tm, tn in zip(mu.component_totals(), nu.component_totals())
                )

    def test_peak_dominance_sufficient_condition(self, rng):
        for _ in range(10):
            mu = rand_measure(rng, 3, 2)
            mu = mu.scaled([F(1) / t for t in mu.component_totals()])
            nu = rand_measure(rng, 3, 2, labels_prefix="y")
            # shrink the target until its atomwise peak total drops below 1
            peak_total = sum(
                max(nu.weights[j][k] for j in range(nu.d)) for k in range(nu.n)
            )
            nu = nu.scaled(F(1, 2) / peak_total)
            witness = constant_kernel_witness(mu, nu)
            assert witness is not None
            assert kernel_feasible(mu, nu).feasible


class TestGaussianMarkov:
    def test_appendix_counterexample_schedule(self):
        report = gaussian_markov_check([64, 16, 4, 2, 1])
        assert report.classification == "DecreasingLogConvex"
        assert not report.sufficient

    def test_short_increasing_schedule(self):
        report = gaussian_markov_check([1, 4, 4])
        assert report.classification == "IncreasingLogConcave"
        assert report.sufficient

    def test_non_monotone_is_neither(self):
        report = gaussian_markov_check([1, 4, 1])
        assert report.classification == "NeitherInfeasible"
        assert not report.sufficient

    def test_scale_invariance(self, rng):
        for _ in range(10):
            T = rng.randint(2, 6)
            values = [F(rng.randint(1, 20), rng.randint(1, 5)) for _ in range(T)]
            scale = F(rng.randint(1, 9), rng.randint(1, 9))
            a = gaussian_markov_check(values)
            b = gaussian_markov_check([scale * v for v in values])
            assert a.classification == b.classification

    def test_two_point_schedules_flagged(self):
        report = gaussian_markov_check([1, 2])
        assert report.note is not None and not report.sufficient

    def test_positive_input_required(self):
        with pytest.raises(NonPositiveSigma):
            gaussian_markov_check([1, 0, 4])
        with pytest.raises(NonPositiveSigma):
            gaussian_markov_check([4])
