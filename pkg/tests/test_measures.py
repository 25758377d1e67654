import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sotkit.errors import AmbiguousCluster, DivisionByZeroMass, InputError
from sotkit.measures import (
    DiscreteVectorMeasure,
    ReferenceMeasure,
    group_profiles,
    make_support,
)

from conftest import rand_measure


def dvm(weights, labels=None):
    n = len(weights[0])
    labels = labels or [str(i) for i in range(n)]
    return DiscreteVectorMeasure(make_support(labels), weights)


class TestMubar:
    def test_symmetric_pair(self):
        m = dvm([[F(1, 3), F(2, 3)], [F(2, 3), F(1, 3)]])
        assert m.mubar() == (F(1, 2), F(1, 2))

    def test_d1_identity(self):
        m = dvm([[F(1, 4), F(3, 4)]])
        assert m.mubar() == (F(1, 4), F(3, 4))

    def test_disjoint_masses(self):
        m = dvm([[F(2), F(0)], [F(0), F(2)]])
        assert m.mubar() == (F(1, 2), F(1, 2))


class TestDerivativeProfile:
    def test_paper_atoms(self):
        m = dvm([[F(1, 3), F(2, 3)], [F(2, 3), F(1, 3)]])
        assert m.derivative_profile().vectors == (
            (F(2, 3), F(4, 3)),
            (F(4, 3), F(2, 3)),
        )

    def test_identical_components(self):
        m = dvm([[F(1, 3), F(2, 3)], [F(1, 3), F(2, 3)], [F(1, 3), F(2, 3)]])
        assert all(v == (1, 1, 1) for v in m.derivative_profile().vectors)

    def test_cross_pair(self):
        m = dvm([[F(3, 4), F(1, 4)], [F(1, 4), F(3, 4)]])
        profile = m.derivative_profile().vectors
        assert profile == ((F(3, 2), F(1, 2)), (F(1, 2), F(3, 2)))
        # reconstruction: z_i[j] * mubar_i == weight[j][i]
        mb = m.mubar()
        for i in range(m.n):
            for j in range(m.d):
                assert profile[i][j] * mb[i] == m.weights[j][i]

    def test_untrimmed_rejected(self):
        m = DiscreteVectorMeasure(
            make_support(["a", "b", "c"]),
            [[F(1), F(0), F(1)], [F(1), F(0), F(1)]],
        )
        with pytest.raises(DivisionByZeroMass):
            m.derivative_profile()


class TestDerivativeLaw:
    def test_identical_components_single_atom(self):
        m = dvm([[F(1, 3), F(2, 3)], [F(1, 3), F(2, 3)]])
        law = m.derivative_law()
        assert law.atoms == ((F(1), F(1)),)
        assert law.masses == (F(1),)

    def test_d1_always_point_mass(self):
        m = dvm([[F(1, 5), F(2, 5), F(2, 5)]])
        law = m.derivative_law()
        assert len(law.atoms) == 1 and law.masses == (F(1),)

    def test_grouping_against_pairwise_oracle(self):
        m = dvm([[F(1, 2), F(1, 4), F(1, 4)], [F(1, 2), F(1, 8), F(3, 8)]])
        law = m.derivative_law()
        # oracle: quadratic pairwise grouping without hashing
        vectors = m.derivative_profile().vectors
        mb = m.mubar()
        oracle = []
        for i, v in enumerate(vectors):
            for group in oracle:
                if vectors[group[0]] == v:
                    group.append(i)
                    break
            else:
                oracle.append([i])
        expected = sorted(
            (vectors[g[0]], sum(mb[i] for i in g)) for g in oracle
        )
        assert list(zip(law.atoms, law.masses)) == expected
        assert law.as_dict() == {
            (F(1), F(1)): F(1, 2),
            (F(4, 3), F(2, 3)): F(3, 16),
            (F(4, 5), F(6, 5)): F(5, 16),
        }

    def test_masses_match_member_sets(self, rng):
        for _ in range(25):
            m = rand_measure(rng, rng.randint(2, 6), rng.randint(1, 3))
            law = m.derivative_law()
            mb = m.mubar()
            assert sum(law.masses) == 1
            for mass, members in zip(law.masses, law.members):
                assert mass == sum(mb[i] for i in members)

    def test_profile_sum_is_d_for_probabilities(self, rng):
        for _ in range(25):
            m = rand_measure(rng, rng.randint(2, 5), rng.randint(1, 4))
            m = m.scaled([F(1) / t for t in m.component_totals()])
            for v in m.derivative_profile().vectors:
                assert sum(v) == m.d


class TestTrim:
    def test_removes_zero_column(self):
        m = DiscreteVectorMeasure(
            make_support(["a", "b"]), [[F(1), F(0)], [F(2), F(0)]]
        )
        t = m.trim()
        assert t.n == 1 and t.labels == ("a",)

    def test_identity_without_zero_columns(self):
        m = dvm([[F(1), F(1)], [F(1), F(2)]])
        assert m.trim() is m

    def test_totals_preserved(self):
        m = DiscreteVectorMeasure(
            make_support(list("abcde")),
            [
                [F(1), F(0), F(2), F(0), F(1)],
                [F(0), F(0), F(1), F(0), F(3)],
            ],
        )
        t = m.trim()
        assert t.n == 3
        assert t.component_totals() == m.component_totals()

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_idempotent(self, seed):
        m = rand_measure(random.Random(seed), 4, 2)
        once = m.trim()
        assert once.trim() == once


class TestReferenceMeasure:
    def test_mubar_reference_is_equivalent(self):
        m = dvm([[F(1, 2), F(1, 2)]])
        eta = ReferenceMeasure.mubar_of(m)
        assert eta.equivalence_flag and sum(eta.weights) == 1

    def test_absolute_continuity_enforced(self):
        m = DiscreteVectorMeasure(
            make_support(["a", "b"]), [[F(1), F(0)], [F(1), F(0)]]
        )
        with pytest.raises(InputError):
            ReferenceMeasure.from_weights([F(1, 2), F(1, 2)], m)

    def test_strict_subset_support_flags_nonequivalent(self):
        m = dvm([[F(1, 2), F(1, 2)]])
        eta = ReferenceMeasure.from_weights([F(1), F(0)], m)
        assert not eta.equivalence_flag

    def test_normalizes_weights(self):
        m = dvm([[F(1, 2), F(1, 2)]])
        eta = ReferenceMeasure.from_weights([F(3), F(1)], m)
        assert eta.weights == (F(3, 4), F(1, 4))


class TestFloatModeGrouping:
    def test_nearby_profiles_cluster(self):
        vectors = ((F(1), F(1)), (F(1) + F(1, 10**12), F(1) - F(1, 10**12)))
        law = group_profiles(vectors, (F(1, 2), F(1, 2)), mode="float")
        assert len(law.atoms) == 1 and law.masses == (F(1),)

    def test_exact_mode_keeps_them_apart(self):
        vectors = ((F(1), F(1)), (F(1) + F(1, 10**12), F(1) - F(1, 10**12)))
        law = group_profiles(vectors, (F(1, 2), F(1, 2)), mode="exact")
        assert len(law.atoms) == 2

    def test_ambiguous_separation_aborts(self):
        eps = F(15, 10**10)  # 1.5e-9: beyond linking range, inside 2x tolerance
        vectors = ((F(1), F(1)), (F(1) + eps, F(1)))
        with pytest.raises(AmbiguousCluster):
            group_profiles(vectors, (F(1, 2), F(1, 2)), mode="float")
