"""Exact and approximate ground-state solvers against brute enumeration."""

import itertools
import random
from fractions import Fraction

import pytest

from spinhom.ground_state import (
    FrustratedInstance,
    GroundStateInstance,
    TooManyFreeGroups,
    energy,
    enum_cap,
    fold_instance,
    minimize,
    minimize_anneal,
    minimize_cut,
    minimize_enum,
)


def random_instance(rng: random.Random, n: int, signed: bool, with_structure: bool = True):
    """Random pairwise instance on n single-index variables.

    Pair weights are dyadic Fractions, nonnegative unless ``signed``.
    With ``with_structure`` a few variables are fixed and one pair is
    merged into a rigid group, exercising the folding layer.
    """
    variables = tuple((i,) for i in range(n))
    pairs = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < 0.35:
            lo = -8 if signed else 0
            w = Fraction(rng.randrange(lo, 9), 8)
            if w:
                pairs.append(((u,), (v,), w))
    unary = {}
    for i in range(n):
        if rng.random() < 0.6:
            unary[(i,)] = (
                Fraction(rng.randrange(-8, 9), 4),
                Fraction(rng.randrange(-8, 9), 4),
            )
    fixed = {}
    groups = []
    if with_structure and n >= 4:
        if rng.random() < 0.5:
            fixed[(0,)] = rng.choice([1, -1])
        if rng.random() < 0.5:
            groups.append(frozenset({(1,), (2,)}))
    return GroundStateInstance(
        variables=variables,
        pair_terms=tuple(pairs),
        unary_terms=unary,
        fixed=fixed,
        groups=tuple(groups),
    )


def brute_minimum(instance: GroundStateInstance) -> Fraction:
    folded = fold_instance(instance)
    reps = folded.free_reps
    best = None
    for bits in itertools.product((1, -1), repeat=len(reps)):
        assignment = dict(instance.fixed)
        rep_values = dict(zip(reps, bits))
        rep_values.update(folded.fixed_reps)
        for v in instance.variables:
            assignment[v] = rep_values[folded.rep_of[v]]
        e = energy(instance, assignment)
        if best is None or e < best:
            best = e
    return best


def test_cut_matches_brute_force_on_nonnegative_couplings():
    rng = random.Random(101)
    for trial in range(120):
        inst = random_instance(rng, rng.randrange(2, 11), signed=False)
        ref = brute_minimum(inst)
        sol = minimize_cut(inst)
        assert sol.energy == ref, f"trial {trial}"
        assert sol.exact and sol.method == "mincut"
        assert energy(inst, sol.assignment) == sol.energy


def test_enum_matches_brute_force_on_signed_couplings():
    rng = random.Random(202)
    for trial in range(120):
        inst = random_instance(rng, rng.randrange(2, 9), signed=True)
        ref = brute_minimum(inst)
        sol = minimize_enum(inst)
        assert sol.energy == ref, f"trial {trial}"
        assert energy(inst, sol.assignment) == sol.energy


def test_cut_on_signed_couplings_matches_or_reports_frustration():
    rng = random.Random(303)
    agreed = frustrated = 0
    for _ in range(120):
        inst = random_instance(rng, rng.randrange(2, 9), signed=True)
        ref = brute_minimum(inst)
        try:
            sol = minimize_cut(inst)
        except FrustratedInstance:
            frustrated += 1
            continue
        agreed += 1
        assert sol.energy == ref
    assert agreed > 0 and frustrated > 0


def test_gauge_flip_preserves_minimum():
    """Flipping any sign pattern through couplings and unaries is a relabeling."""
    rng = random.Random(404)
    for _ in range(60):
        n = rng.randrange(2, 9)
        inst = random_instance(rng, n, signed=False, with_structure=False)
        flips = {v: rng.choice([1, -1]) for v in inst.variables}
        # relabeling t = flip * s keeps the spectrum: a pair broken under s is
        # unbroken under t when the endpoint flips disagree, so the weight
        # changes sign and the traded cost 4w moves into a constant
        gauged_pairs = []
        extra = Fraction(0)
        for u, v, w in inst.pair_terms:
            if flips[u] * flips[v] > 0:
                gauged_pairs.append((u, v, w))
            else:
                gauged_pairs.append((u, v, -w))
                extra += 4 * w
        gauged_unary = {}
        for v, (hp, hm) in inst.unary_terms.items():
            gauged_unary[v] = (hp, hm) if flips[v] > 0 else (hm, hp)
        gauged = GroundStateInstance(
            variables=inst.variables,
            pair_terms=tuple(gauged_pairs),
            unary_terms=gauged_unary,
        )
        assert minimize_enum(gauged).energy + extra == minimize_enum(inst).energy
        # the gauged instance is exactly what the cut solver undoes internally
        assert minimize_cut(gauged).energy + extra == minimize_cut(inst).energy


def test_solution_on_all_fixed_instance():
    inst = GroundStateInstance(
        variables=((0,), (1,)),
        pair_terms=(((0,), (1,), Fraction(1, 2)),),
        fixed={(0,): 1, (1,): -1},
    )
    for solver in (minimize_enum, minimize_cut):
        sol = solver(inst)
        assert sol.energy == 2
        assert sol.assignment == {(0,): 1, (1,): -1}
    assert minimize_cut(inst).exact


def test_groups_force_rigid_moves():
    # two grouped variables tied by a negative pair to a fixed one
    inst = GroundStateInstance(
        variables=((0,), (1,), (2,)),
        pair_terms=(((0,), (1,), Fraction(1)), ((1,), (2,), Fraction(1))),
        fixed={(0,): 1},
        groups=(frozenset({(1,), (2,)}),),
    )
    sol = minimize_cut(inst)
    assert sol.energy == 0
    assert sol.assignment[(1,)] == sol.assignment[(2,)] == 1
    folded = fold_instance(inst)
    assert folded.free_count == 1


def test_fixed_member_pins_whole_group():
    inst = GroundStateInstance(
        variables=((0,), (1,)),
        unary_terms={(1,): (Fraction(5), Fraction(0))},
        fixed={(0,): 1},
        groups=(frozenset({(0,), (1,)}),),
    )
    sol = minimize_enum(inst)
    assert sol.assignment[(1,)] == 1
    assert sol.energy == 5


def test_enum_cap_enforced():
    rng = random.Random(505)
    inst = random_instance(rng, 8, signed=False, with_structure=False)
    with pytest.raises(TooManyFreeGroups):
        minimize_enum(inst, cap=4)
    sol = minimize(inst, method="auto", cap=4)
    assert sol.method == "mincut"
    assert sol.energy == brute_minimum(inst)


def test_enum_cap_environment_override(monkeypatch):
    monkeypatch.setenv("SPINHOM_ENUM_CAP", "7")
    assert enum_cap() == 7
    assert enum_cap(12) == 12
    monkeypatch.delenv("SPINHOM_ENUM_CAP")
    assert enum_cap() == 24


def test_auto_raises_on_large_frustrated_without_anneal():
    # odd antiferromagnetic triangle, forced past the enum cap
    inst = GroundStateInstance(
        variables=((0,), (1,), (2,)),
        pair_terms=(
            ((0,), (1,), Fraction(-1)),
            ((1,), (2,), Fraction(-1)),
            ((0,), (2,), Fraction(-1)),
        ),
    )
    with pytest.raises(FrustratedInstance, match="anneal"):
        minimize(inst, method="auto", cap=1)
    sol = minimize(inst, method="auto", cap=1, allow_anneal=True)
    assert sol.method == "annealing"
    assert not sol.exact
    assert sol.energy == brute_minimum(inst)  # tiny instance, annealing lands exactly


def test_anneal_never_beats_exact_and_is_seed_stable():
    rng = random.Random(606)
    for _ in range(30):
        inst = random_instance(rng, rng.randrange(2, 9), signed=True)
        ref = brute_minimum(inst)
        a1 = minimize_anneal(inst, seed=11)
        a2 = minimize_anneal(inst, seed=11)
        assert a1.energy >= ref
        assert a1.energy == a2.energy
        assert a1.assignment == a2.assignment
        assert energy(inst, a1.assignment) == a1.energy


def test_instance_validation():
    with pytest.raises(ValueError, match="duplicate"):
        GroundStateInstance(variables=((0,), (0,)))
    with pytest.raises(ValueError, match="unknown variable"):
        GroundStateInstance(variables=((0,),), pair_terms=(((0,), (1,), Fraction(1)),))
    with pytest.raises(ValueError, match="fixed spin"):
        GroundStateInstance(variables=((0,),), fixed={(0,): 0})
    with pytest.raises(ValueError, match="two groups"):
        GroundStateInstance(
            variables=((0,), (1,), (2,)),
            groups=(frozenset({(0,), (1,)}), frozenset({(1,), (2,)})),
        )
    with pytest.raises(ValueError, match="unknown method"):
        minimize(GroundStateInstance(variables=()), method="magic")


def test_energy_validates_assignment():
    inst = GroundStateInstance(variables=((0,), (1,)), fixed={(0,): 1})
    with pytest.raises(ValueError, match="missing variable"):
        energy(inst, {(0,): 1})
    with pytest.raises(ValueError, match="violates fixed"):
        energy(inst, {(0,): -1, (1,): 1})
