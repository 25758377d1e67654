"""Tuples of discrete measures, their averages and derivative profiles.

A DiscreteVectorMeasure holds d nonnegative weight rows over one labeled
finite support. Masses are stored unnormalized; nothing here normalizes
implicitly. The derivative profile at a point is the vector of component
weights divided by the average-measure weight, and the derivative law is
its distribution under the average measure, grouped by exact equality
(exact mode) or by 1e-9 single-linkage clustering (float mode).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import AmbiguousCluster, DivisionByZeroMass, InputError, ZeroTotalMass
from .rational import FLOAT_TOL, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class SupportPoint:
    label: str
    coords: Optional[tuple] = None  # tuple of Fraction, used by metric costs only

    def require_scalar_coord(self) -> Fraction:
        from .errors import MissingCoords

        if self.coords is None or len(self.coords) != 1:
            raise MissingCoords(f"point {self.label!r} needs a single real coordinate")
        return self.coords[0]


def make_support(labels, coords=None):
    pts = []
    for i, label in enumerate(labels):
        c = None
        if coords is not None and coords[i] is not None:
            c = tuple(parse_rational(v) for v in coords[i])
        pts.append(SupportPoint(str(label), c))
    return tuple(pts)


@dataclass(frozen=True)
class DerivativeProfile:
    """Per-point derivative vector z_i with z_i[j] * mubar_i = weight[j][i]."""

    vectors: tuple


@dataclass(frozen=True)
class DerivativeLaw:
    """Distribution of the derivative profile under the average measure.

    atoms[k] is a distinct profile vector, masses[k] the total average-measure
    mass of its members, members[k] the support indices carrying it.
    """

    atoms: tuple
    masses: tuple
    members: tuple

    def as_dict(self):
        return dict(zip(self.atoms, self.masses))

    def __eq__(self, other):
        if not isinstance(other, DerivativeLaw):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(frozenset(self.as_dict().items()))


class DiscreteVectorMeasure:
    """d-tuple of finite measures over a common finite labeled support."""

    def __init__(self, support: Sequence[SupportPoint], weights):
        self.support = tuple(support)
        self.weights = tuple(tuple(parse_rational(w) for w in row) for row in weights)
        if not self.weights:
            raise InputError("measure tuple needs at least one component")
        n = len(self.support)
        labels = [p.label for p in self.support]
        if len(set(labels)) != n:
            raise InputError("support labels must be unique")
        for row in self.weights:
            if len(row) != n:
                raise InputError("weight row length does not match support size")
            for w in row:
                if w < 0:
                    raise InputError("weights must be nonnegative")
        for j, row in enumerate(self.weights):
            if sum(row) <= 0:
                raise InputError(f"component {j} has zero total mass")

    @property
    def d(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return len(self.support)

    @property
    def labels(self):
        return tuple(p.label for p in self.support)

    def component_totals(self):
        return tuple(sum(row) for row in self.weights)

    def total_mass(self) -> Fraction:
        total = sum(self.component_totals(), ZERO)
        if total == 0:
            raise ZeroTotalMass("all components have zero mass")
        return total

    def column(self, i):
        return tuple(row[i] for row in self.weights)

    def mubar(self):
        """Normalized average measure: weight i is (sum_j mu_j(x_i)) / total."""
        total = self.total_mass()
        return tuple(sum(self.column(i), ZERO) / total for i in range(self.n))

    def is_trimmed(self) -> bool:
        return all(any(row[i] != 0 for row in self.weights) for i in range(self.n))

    def trim_indices(self):
        """Indices of support points that survive trim(), in order."""
        return [i for i in range(self.n) if any(row[i] != 0 for row in self.weights)]

    def trim(self) -> "DiscreteVectorMeasure":
        """Drop support points whose column is entirely zero. Idempotent."""
        keep = [i for i in range(self.n) if any(row[i] != 0 for row in self.weights)]
        if len(keep) == self.n:
            return self
        support = tuple(self.support[i] for i in keep)
        weights = tuple(tuple(row[i] for i in keep) for row in self.weights)
        return DiscreteVectorMeasure(support, weights)

    def derivative_profile(self) -> DerivativeProfile:
        mb = self.mubar()
        vectors = []
        for i in range(self.n):
            if mb[i] == 0:
                raise DivisionByZeroMass(
                    f"support point {self.support[i].label!r} has zero average mass; trim first"
                )
            vectors.append(tuple(row[i] / mb[i] for row in self.weights))
        return DerivativeProfile(tuple(vectors))

    def derivative_law(self, mode: str = "exact") -> DerivativeLaw:
        profile = self.derivative_profile()
        mb = self.mubar()
        return group_profiles(profile.vectors, mb, mode)

    def scaled(self, factor) -> "DiscreteVectorMeasure":
        """Scale every component by a positive rational (or one factor per component)."""
        if isinstance(factor, (list, tuple)):
            factors = [parse_rational(f) for f in factor]
        else:
            factors = [parse_rational(factor)] * self.d
        if len(factors) != self.d or any(f <= 0 for f in factors):
            raise InputError("scaling factors must be positive, one per component")
        weights = tuple(
            tuple(f * w for w in row) for f, row in zip(factors, self.weights)
        )
        return DiscreteVectorMeasure(self.support, weights)

    def single_component(self, weights) -> "DiscreteVectorMeasure":
        """Build a d=1 measure on this support from raw weights."""
        return DiscreteVectorMeasure(self.support, (tuple(weights),))

    def __eq__(self, other):
        if not isinstance(other, DiscreteVectorMeasure):
            return NotImplemented
        return self.support == other.support and self.weights == other.weights

    def __repr__(self):
        return f"DiscreteVectorMeasure(d={self.d}, n={self.n})"


@dataclass(frozen=True)
class ReferenceMeasure:
    """Probability weights over a source support, absolutely continuous w.r.t. mubar.

    equivalence_flag is True iff the weight is positive exactly where the
    average source mass is positive; duality certificates require it.
    """

    weights: tuple
    equivalence_flag: bool

    @classmethod
    def mubar_of(cls, m: DiscreteVectorMeasure) -> "ReferenceMeasure":
        return cls(m.mubar(), True)

    @classmethod
    def from_weights(cls, weights, m: DiscreteVectorMeasure) -> "ReferenceMeasure":
        vals = tuple(parse_rational(w) for w in weights)
        if len(vals) != m.n:
            raise InputError("reference weights length does not match support")
        if any(v < 0 for v in vals):
            raise InputError("reference weights must be nonnegative")
        total = sum(vals, ZERO)
        if total == 0:
            raise InputError("reference measure must have positive mass")
        if total != 1:
            vals = tuple(v / total for v in vals)
        mb = m.mubar()
        equivalent = True
        for v, b in zip(vals, mb):
            if v > 0 and b == 0:
                raise InputError("reference measure not absolutely continuous w.r.t. the average source measure")
            if v == 0 and b > 0:
                equivalent = False
        return cls(vals, equivalent)

    @property
    def n(self):
        return len(self.weights)


def group_profiles(vectors, masses, mode: str = "exact") -> DerivativeLaw:
    """Group equal profile vectors into derivative-law atoms.

    Exact mode groups by exact rational equality. Float mode runs
    single-linkage clustering with an l-infinity threshold of 1e-9 and
    aborts when two resulting clusters come within twice the threshold,
    rather than guessing a grouping the decomposition results depend on.
    Atoms are reported in lexicographically increasing order.
    """
    n = len(vectors)
    if n == 0:
        raise InputError("cannot group an empty profile")
    if mode == "exact":
        groups = {}
        for i, v in enumerate(vectors):
            groups.setdefault(v, []).append(i)
        keyed = sorted(groups.items())
    else:
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        floats = [tuple(float(c) for c in v) for v in vectors]
        for i in range(n):
            for k in range(i + 1, n):
                if max(abs(a - b) for a, b in zip(floats[i], floats[k])) <= FLOAT_TOL:
                    parent[find(i)] = find(k)
        clusters = {}
        for i in range(n):
            clusters.setdefault(find(i), []).append(i)
        reps = list(clusters.values())
        for a in range(len(reps)):
            for b in range(a + 1, len(reps)):
                gap = min(
                    max(abs(x - y) for x, y in zip(floats[i], floats[k]))
                    for i in reps[a]
                    for k in reps[b]
                )
                if gap <= 2 * FLOAT_TOL:
                    raise AmbiguousCluster(
                        "profile atoms separated by less than twice the grouping tolerance"
                    )
        keyed = []
        for members in reps:
            total = sum((masses[i] for i in members), ZERO)
            rep = tuple(
                sum((masses[i] * vectors[i][c] for i in members), ZERO) / total
                for c in range(len(vectors[0]))
            )
            keyed.append((rep, members))
        keyed.sort()
    atoms, law_masses, members = [], [], []
    for vec, idxs in keyed:
        atoms.append(vec)
        members.append(tuple(sorted(idxs)))
        law_masses.append(sum((masses[i] for i in idxs), ZERO))
    return DerivativeLaw(tuple(atoms), tuple(law_masses), tuple(members))
