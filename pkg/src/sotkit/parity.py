"""Discrete MOT-SOT parity in the injective-derivative case.

When the source derivative profile is injective (every law atom sits on a
single support point) a balanced simultaneous transport problem collapses
onto the profile atoms: couplings r(z', z) between the target law and the
source law that are backward martingales (conditional source barycenter
equal to the target atom) correspond to transport kernels, and the cost
collapses to a reduced matrix over atoms. With an injective target
profile the reduced cost is just c evaluated at the two carrying points;
a non-injective target profile is handled by averaging c over the slice
conditional, which is the exact reduction whenever c depends only on the
profiles and is always an upper bound otherwise (the report's `equal`
field records the exact comparison with the kernel optimum).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import ratlp
from .errors import InputError, NotInjectiveProfile, UnbalancedInput
from .measures import DiscreteVectorMeasure, ReferenceMeasure
from .solver import CostMatrix, TransportKernel, is_balanced, solve_sot

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class ReducedCost:
    """Cost over (source atoms) x (target atoms); entry (a, l) evaluates the
    original cost at the source atom's carrier against the target slice."""

    matrix: tuple
    source_atoms: tuple
    target_atoms: tuple


@dataclass
class MartingaleCoupling:
    """r(z', z) >= 0 with target-law rows, source-law columns, and conditional
    source barycenter equal to each target atom (backward martingale)."""

    matrix: tuple
    source_atoms: tuple
    source_masses: tuple
    target_atoms: tuple
    target_masses: tuple

    def verify(self) -> bool:
        nb, na = len(self.target_atoms), len(self.source_atoms)
        d = len(self.source_atoms[0])
        for l in range(nb):
            if sum(self.matrix[l], ZERO) != self.target_masses[l]:
                return False
            for j in range(d):
                bary = sum(
                    (self.matrix[l][a] * self.source_atoms[a][j] for a in range(na)),
                    ZERO,
                )
                if bary != self.target_masses[l] * self.target_atoms[l][j]:
                    return False
        for a in range(na):
            col = sum((self.matrix[l][a] for l in range(nb)), ZERO)
            if col != self.source_masses[a]:
                return False
        return True


@dataclass
class ParityReport:
    mot_value: Optional[Fraction]
    sot_value: Optional[Fraction]
    equal: bool
    coupling: Optional[MartingaleCoupling]
    reduced_cost: Optional[ReducedCost]
    status: str


def _injective_law(measure: DiscreteVectorMeasure, side: str):
    law = measure.derivative_law()
    if any(len(members) != 1 for members in law.members):
        raise NotInjectiveProfile(
            f"{side} derivative profile is not injective; near-duplicate points are rejected, not merged"
        )
    return law


def reduced_cost(mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure, cost: CostMatrix) -> ReducedCost:
    """Cost over law atoms. Source injectivity is required; target slices with
    several points are averaged under the slice conditional."""
    mu = mu.trim()
    nu = nu.trim()
    law_mu = _injective_law(mu, "source")
    law_nu = nu.derivative_law()
    nb_bar = nu.mubar()
    matrix = []
    for atom, members in zip(law_mu.atoms, law_mu.members):
        i = members[0]
        row = []
        for l, (t_atom, t_mass) in enumerate(zip(law_nu.atoms, law_nu.masses)):
            ks = law_nu.members[l]
            row.append(
                sum((cost[i][k] * nb_bar[k] for k in ks), ZERO) / t_mass
            )
        matrix.append(tuple(row))
    return ReducedCost(tuple(matrix), law_mu.atoms, law_nu.atoms)


def _martingale_lp(law_nu, law_mu, objective=None):
    """Rows: target-law marginal, source-law marginal, barycenter equalities."""
    na, nb = len(law_mu.atoms), len(law_nu.atoms)
    d = len(law_mu.atoms[0])
    problem = ratlp.RationalLpProblem(nb * na, objective)
    var = lambda l, a: l * na + a
    for l in range(nb):
        problem.add_eq([(var(l, a), ONE) for a in range(na)], law_nu.masses[l])
    for a in range(na):
        problem.add_eq([(var(l, a), ONE) for l in range(nb)], law_mu.masses[a])
    for l in range(nb):
        for j in range(d):
            coeffs = [
                (var(l, a), law_mu.atoms[a][j])
                for a in range(na)
                if law_mu.atoms[a][j] != 0
            ]
            problem.add_eq(coeffs, law_nu.masses[l] * law_nu.atoms[l][j])
    return problem


def parity_solve(mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure, cost: CostMatrix) -> ParityReport:
    """Solve the reduced backward-martingale problem and the kernel problem.

    Balanced instances with injective source profile only; the reference is
    the average source measure. `equal` is the exact value comparison.
    """
    if not is_balanced(mu, nu):
        raise UnbalancedInput("the parity holds in the balanced setting")
    mu = mu.trim()
    nu = nu.trim()
    law_mu = _injective_law(mu, "source")
    law_nu = nu.derivative_law()
    reduced = reduced_cost(mu, nu, cost)
    na = len(law_mu.atoms)
    objective = [
        reduced.matrix[a][l]
        for l in range(len(law_nu.atoms))
        for a in range(na)
    ]
    problem = _martingale_lp(law_nu, law_mu, objective)
    mot = ratlp.solve(problem)
    sot = solve_sot(mu, nu, ReferenceMeasure.mubar_of(mu), cost)
    if mot.status != ratlp.OPTIMAL or not sot.feasible:
        return ParityReport(None, None, False, None, reduced, ratlp.INFEASIBLE)
    coupling = MartingaleCoupling(
        matrix=tuple(
            tuple(mot.primal[l * na + a] for a in range(na))
            for l in range(len(law_nu.atoms))
        ),
        source_atoms=law_mu.atoms,
        source_masses=law_mu.masses,
        target_atoms=law_nu.atoms,
        target_masses=law_nu.masses,
    )
    return ParityReport(
        mot_value=mot.objective_value,
        sot_value=sot.optimal_cost,
        equal=mot.objective_value == sot.optimal_cost,
        coupling=coupling,
        reduced_cost=reduced,
        status=ratlp.OPTIMAL,
    )


def kernel_from_martingale(
    coupling: MartingaleCoupling,
    mu: DiscreteVectorMeasure,
    nu: DiscreteVectorMeasure,
) -> TransportKernel:
    """Recover a transport kernel from a backward-martingale coupling.

    kappa(x, y) = r(profile(y), profile(x)) * nubar(y) / (mass(profile(y)) * mubar(x));
    with an injective target profile this is r / mubar(x). The result is
    verified to be row-stochastic and to push the source onto the target.
    """
    mu = mu.trim()
    nu = nu.trim()
    if not coupling.verify():
        raise InputError("coupling violates the martingale-coupling invariants")
    law_mu = _injective_law(mu, "source")
    law_nu = nu.derivative_law()
    if law_mu.atoms != coupling.source_atoms or law_nu.atoms != coupling.target_atoms:
        raise InputError("coupling atoms do not match the instance laws")
    atom_of_x = {members[0]: a for a, members in enumerate(law_mu.members)}
    slice_of_y = {}
    for l, members in enumerate(law_nu.members):
        for k in members:
            slice_of_y[k] = l
    mb = mu.mubar()
    nb_bar = nu.mubar()
    matrix = []
    for i in range(mu.n):
        a = atom_of_x[i]
        row = []
        for k in range(nu.n):
            l = slice_of_y[k]
            row.append(
                coupling.matrix[l][a] * nb_bar[k] / (law_nu.masses[l] * mb[i])
            )
        matrix.append(row)
    kernel = TransportKernel(matrix)
    if not kernel.covers(mu, nu):
        raise InputError("recovered kernel does not cover the target")
    return kernel
