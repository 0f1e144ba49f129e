"""Structure of the periodic hard-phase graphs.

For each hard phase the strong bonds induce a periodic graph on a
sublattice of Z^d.  Components of the quotient graph on residues are
classified through their displacement subgroup H <= Z^d (generated by
the cycle displacements of the quotient component, in units of the
period): H = Z^d means the component lifts to a single infinite
component, H = {0} means the lifts are finite copies ("islands"), and
anything in between lifts to infinitely many infinite components.

A model is usable downstream when every hard phase has exactly one
infinite-unique component (its "core") and every other component is
finite.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from . import intlattice
from .model import LatticeModel, Residue, Site, Violation

CLASS_FINITE = "finite"
CLASS_UNIQUE = "infinite-unique"
CLASS_MULTIPLE = "infinite-multiple"


@dataclass(frozen=True)
class PeriodicComponent:
    phase: int
    residues: frozenset[Residue]
    # echelon basis rows of the displacement subgroup (units of one period)
    displacement_basis: tuple[tuple[int, ...], ...]
    classification: str
    # one concrete copy of the component, for finite components only
    lift_sites: tuple[Site, ...] | None = None
    lift_diameter_sq: int | None = None
    # exact Euclidean diameter when it is an integer, else the integer ceiling
    lift_diameter: Fraction | None = None


@dataclass(frozen=True)
class ConnectivitySummary:
    period: int
    components: Mapping[int, tuple[PeriodicComponent, ...]]
    core_residues: Mapping[int, frozenset[Residue]]
    densities: Mapping[int, Fraction]
    island_radius: Fraction
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def in_core(self, phase: int, site: Site) -> bool:
        res = tuple(c % self.period for c in site)
        return res in self.core_residues.get(phase, frozenset())

    def islands(self, phase: int | None = None) -> list[PeriodicComponent]:
        phases = [phase] if phase is not None else sorted(self.components)
        return [c for j in phases for c in self.components.get(j, ()) if c.classification == CLASS_FINITE]


def _ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def classify(model: LatticeModel) -> ConnectivitySummary:
    """Classify every hard component; records violations instead of raising."""
    dim, t = model.dimension, model.period
    components: dict[int, tuple[PeriodicComponent, ...]] = {}
    core: dict[int, frozenset[Residue]] = {}
    densities: dict[int, Fraction] = {}
    violations: list[Violation] = []
    radius = Fraction(0)

    for j in range(1, model.num_phases + 1):
        residues_j = sorted(r for r, lab in model.labels.items() if lab == j)
        comps: list[PeriodicComponent] = []
        pot: dict[Residue, Site] = {}
        for start in residues_j:
            if start in pot:
                continue
            pot[start] = start
            comp_res = [start]
            gens: list[tuple[int, ...]] = []
            queue = deque([start])
            while queue:
                r = queue.popleft()
                base = pot[r]
                for off in sorted(model.strong_offsets(r)):
                    lift = tuple(a + b for a, b in zip(base, off))
                    r2 = tuple(c % t for c in lift)
                    if r2 not in pot:
                        pot[r2] = lift
                        comp_res.append(r2)
                        queue.append(r2)
                    else:
                        diff = tuple((a - b) // t for a, b in zip(lift, pot[r2]))
                        if any(diff):
                            gens.append(diff)
            basis = intlattice.hermite_basis(gens, dim)
            if not basis:
                sites = tuple(sorted(pot[r] for r in comp_res))
                dsq = max(
                    (sum((a - b) ** 2 for a, b in zip(p, q)) for p in sites for q in sites),
                    default=0,
                )
                comps.append(
                    PeriodicComponent(
                        phase=j,
                        residues=frozenset(comp_res),
                        displacement_basis=(),
                        classification=CLASS_FINITE,
                        lift_sites=sites,
                        lift_diameter_sq=dsq,
                        lift_diameter=Fraction(_ceil_sqrt(dsq)),
                    )
                )
            elif intlattice.is_full_lattice(basis, dim):
                comps.append(
                    PeriodicComponent(j, frozenset(comp_res), tuple(basis), CLASS_UNIQUE)
                )
            else:
                comps.append(
                    PeriodicComponent(j, frozenset(comp_res), tuple(basis), CLASS_MULTIPLE)
                )

        components[j] = tuple(comps)
        unique = [c for c in comps if c.classification == CLASS_UNIQUE]
        multiple = [c for c in comps if c.classification == CLASS_MULTIPLE]
        for c in multiple:
            violations.append(
                Violation(
                    "unique-infinite-component",
                    (j, tuple(sorted(c.residues))),
                    f"phase {j}: component {sorted(c.residues)} lifts to multiple infinite components (displacement rank {len(c.displacement_basis)} of {dim})",
                )
            )
        if len(unique) == 0 and residues_j:
            if not multiple:
                violations.append(
                    Violation(
                        "unique-infinite-component",
                        (j,),
                        f"phase {j} has no infinite component (all components are finite)",
                    )
                )
        elif len(unique) > 1:
            violations.append(
                Violation(
                    "unique-infinite-component",
                    (j,),
                    f"phase {j} has {len(unique)} disjoint infinite components under one label",
                )
            )
        core_j = unique[0].residues if len(unique) == 1 else frozenset()
        core[j] = core_j
        densities[j] = Fraction(len(core_j), t**dim)
        for c in comps:
            if c.classification == CLASS_FINITE and c.lift_diameter is not None:
                radius = max(radius, c.lift_diameter)

    return ConnectivitySummary(
        period=t,
        components=components,
        core_residues=core,
        densities=densities,
        island_radius=radius,
        violations=tuple(violations),
    )


# ---------------------------------------------------------------------------
# cube conventions


def cube_range(m: int) -> range:
    """Integer points of [-m/2, m/2) along one axis (m consecutive values)."""
    lo = -(m // 2)
    return range(lo, lo + m)


def cube_sites(dim: int, m: int) -> list[Site]:
    return list(product(cube_range(m), repeat=dim))


def in_cube(site: Site, m: int) -> bool:
    lo = -(m // 2)
    return all(lo <= c < lo + m for c in site)


def _in_shrunk_cube(site: Site, side: Fraction) -> bool:
    """Membership in [-side/2, side/2)^d for a possibly fractional side."""
    if side <= 0:
        return False
    half = side / 2
    return all(-half <= c < half for c in site)


def excluded_set(
    model: LatticeModel, m: int, summary: ConnectivitySummary | None = None
) -> frozenset[Site]:
    """Island copies near the boundary of the centered cube of side m.

    Returns the sites (clipped to the cube) of every finite-component
    copy that meets the cube but stays clear of the concentric cube of
    side m - R, where R is the island radius.
    """
    if summary is None:
        summary = classify(model)
    radius = summary.island_radius
    if radius == 0:
        return frozenset()
    if m <= radius:
        warnings.warn(
            f"cube side {m} does not exceed the island radius {radius}; "
            "the excluded set may cover the whole cube",
            stacklevel=2,
        )
    t = model.period
    lo = -(m // 2)
    hi = lo + m  # exclusive
    inner_side = Fraction(m) - radius
    out: set[Site] = set()
    for comp in summary.islands():
        sites = comp.lift_sites or ()
        mins = [min(s[i] for s in sites) for i in range(model.dimension)]
        maxs = [max(s[i] for s in sites) for i in range(model.dimension)]
        ranges = []
        for i in range(model.dimension):
            m_lo = -((maxs[i] - lo) // t)  # ceil((lo - maxs) / t)
            m_hi = (hi - 1 - mins[i]) // t
            ranges.append(range(m_lo, m_hi + 1))
        for shift in product(*ranges):
            copy = [tuple(c + t * s for c, s in zip(site, shift)) for site in sites]
            inside = [s for s in copy if all(lo <= c < hi for c in s)]
            if not inside:
                continue
            if any(_in_shrunk_cube(s, inner_side) for s in copy):
                continue
            out.update(inside)
    return frozenset(out)


def coarsening_side(
    model: LatticeModel,
    phase: int,
    summary: ConnectivitySummary | None = None,
    cap_multiple: int = 64,
) -> int:
    """Smallest multiple M of the period such that core sites sharing an
    M-cube are always connected within the concentric 3M-cube.

    Tested over all period^d translation classes of the cube lattice.
    """
    if summary is None:
        summary = classify(model)
    core = summary.core_residues.get(phase, frozenset())
    if not core:
        raise ValueError(f"phase {phase} has no infinite-unique component")
    t = model.period
    dim = model.dimension

    def neighbors(site: Site):
        res = tuple(c % t for c in site)
        for off in model.strong_offsets(res):
            yield tuple(a + b for a, b in zip(site, off))

    for mult in range(1, cap_multiple + 1):
        m = mult * t
        ok = True
        for shift in product(range(t), repeat=dim):
            inner = [
                tuple(c + s for c, s in zip(site, shift))
                for site in product(range(m), repeat=dim)
                if tuple((c + s) % t for c, s in zip(site, shift)) in core
            ]
            if len(inner) <= 1:
                continue
            big_lo = [s - m for s in shift]
            big_hi = [s + 2 * m for s in shift]  # exclusive

            def in_big(site: Site) -> bool:
                return all(a <= c < b for c, a, b in zip(site, big_lo, big_hi))

            seen = {inner[0]}
            queue = deque([inner[0]])
            while queue:
                cur = queue.popleft()
                for nxt in neighbors(cur):
                    if nxt not in seen and in_big(nxt) and summary.in_core(phase, nxt):
                        seen.add(nxt)
                        queue.append(nxt)
            if not all(site in seen for site in inner):
                ok = False
                break
        if ok:
            return m
    raise RuntimeError(
        f"coarsening side of phase {phase} exceeds {cap_multiple} periods; "
        "the core connects too slowly for cube-based coarsening"
    )
