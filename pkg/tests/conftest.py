"""Seeded random-instance generators shared across the suite.

All randomness flows through explicit random.Random seeds so every suite
run is reproducible; no generator touches global state.
"""

import random
from fractions import Fraction as F

import pytest

from sotkit.measures import DiscreteVectorMeasure, make_support
from sotkit.solver import CostMatrix

ZERO = F(0)


def rand_fraction(rng, den_max=12, allow_zero=True):
    den = rng.randint(1, den_max)
    low = 0 if allow_zero else 1
    return F(rng.randint(low, den_max), den)


def rand_measure(rng, n, d, den_max=12, labels_prefix="x", coords=False):
    """Trimmed measure tuple with positive component totals."""
    w = [[F(rng.randint(0, den_max), den_max) for _ in range(n)] for _ in range(d)]
    for j in range(d):
        if sum(w[j], ZERO) == 0:
            w[j][rng.randrange(n)] = F(rng.randint(1, den_max), den_max)
    for i in range(n):
        if all(w[j][i] == 0 for j in range(d)):
            w[rng.randrange(d)][i] = F(rng.randint(1, den_max), den_max)
    pts = None
    if coords:
        pts = [[F(rng.randint(0, 40), rng.randint(1, 4))] for _ in range(n)]
    support = make_support([f"{labels_prefix}{i}" for i in range(n)], pts)
    return DiscreteVectorMeasure(support, w)


def rand_kernel_rows(rng, n, m, den=8, strictly_positive=True):
    rows = []
    for _ in range(n):
        low = 1 if strictly_positive else 0
        raw = [rng.randint(low, den) for _ in range(m)]
        if sum(raw) == 0:
            raw[rng.randrange(m)] = 1
        s = sum(raw)
        rows.append([F(v, s) for v in raw])
    return rows


def pushforward_measure(mu, kernel_rows, labels_prefix="y", coords=False, rng=None):
    m = len(kernel_rows[0])
    weights = [
        [
            sum((kernel_rows[i][k] * mu.weights[j][i] for i in range(mu.n)), ZERO)
            for k in range(m)
        ]
        for j in range(mu.d)
    ]
    pts = None
    if coords:
        pts = [[F(rng.randint(0, 40), rng.randint(1, 4))] for _ in range(m)]
    support = make_support([f"{labels_prefix}{k}" for k in range(m)], pts)
    return DiscreteVectorMeasure(support, weights)


def feasible_pair(rng, n, m, d, den_max=12, coords=False):
    """Balanced feasible pair: the target is a pushforward of the source."""
    mu = rand_measure(rng, n, d, den_max, coords=coords)
    kernel = rand_kernel_rows(rng, n, m)
    nu = pushforward_measure(mu, kernel, coords=coords, rng=rng)
    return mu, nu, kernel


def unbalanced_feasible_pair(rng, n, m, d, den_max=12):
    """Feasible pair with componentwise slack: scale the target down."""
    mu, nu, kernel = feasible_pair(rng, n, m, d, den_max)
    factors = [F(rng.randint(1, 4), 4) for _ in range(d)]
    return mu, nu.scaled(factors), kernel


def arbitrary_pair(rng, n, m, d, den_max=12):
    """Independent tuples with componentwise equal masses; may be infeasible."""
    mu = rand_measure(rng, n, d, den_max)
    nu = rand_measure(rng, m, d, den_max, labels_prefix="y")
    totals_mu = mu.component_totals()
    totals_nu = nu.component_totals()
    nu = nu.scaled([tm / tn for tm, tn in zip(totals_mu, totals_nu)])
    return mu, nu


def rand_cost(rng, n, m, high=10, allow_negative=False):
    low = -high if allow_negative else 0
    return CostMatrix(
        [[F(rng.randint(low, high)) for _ in range(m)] for _ in range(n)],
        allow_negative=allow_negative,
    )


def _positive_partition(rng, total, parts, den=24):
    """Positive rationals with the given exact sum."""
    cuts = sorted(rng.sample(range(1, den), parts - 1)) if parts > 1 else []
    edges = [0] + cuts + [den]
    return [total * F(edges[i + 1] - edges[i], den) for i in range(parts)]


def twoway_pair(rng, d=2, n_slices=2, max_pts=3, coords=True):
    """Same-class pair built from a shared law over profile atoms."""
    while True:
        atoms = set()
        for _ in range(n_slices):
            shares = _positive_partition(rng, F(1), d, den=12)
            atoms.add(tuple(d * s for s in shares))
        if len(atoms) == n_slices:
            break
    atoms = sorted(atoms)
    masses = _positive_partition(rng, F(1), n_slices, den=16)

    def build(prefix):
        labels, weights_cols, pts = [], [], []
        for s, (atom, mass) in enumerate(zip(atoms, masses)):
            k = rng.randint(1, max_pts)
            conditional = _positive_partition(rng, mass, k, den=20)
            for t, w in enumerate(conditional):
                labels.append(f"{prefix}{s}_{t}")
                weights_cols.append([atom[j] * w for j in range(d)])
                pts.append([F(rng.randint(0, 30), rng.randint(1, 3))])
        support = make_support(labels, pts if coords else None)
        weights = [[col[j] for col in weights_cols] for j in range(d)]
        return DiscreteVectorMeasure(support, weights)

    return build("x"), build("y")


def injective_pair(rng, n=3, m=3, d=2, den_max=10, max_tries=60):
    """Balanced feasible pair whose profiles are injective on both sides."""
    for _ in range(max_tries):
        mu = rand_measure(rng, n, d, den_max)
        kernel = rand_kernel_rows(rng, n, m)
        nu = pushforward_measure(mu, kernel, rng=rng)
        try:
            law_mu = mu.derivative_law()
            law_nu = nu.derivative_law()
        except Exception:
            continue
        if all(len(g) == 1 for g in law_mu.members) and all(
            len(g) == 1 for g in law_nu.members
        ):
            return mu, nu
    raise AssertionError("failed to draw an injective-profile instance")


@pytest.fixture
def rng():
    return random.Random(20260810)
