"""Directional interface energies from finite cell problems."""

from fractions import Fraction

import pytest

from spinhom.connectivity import classify
from spinhom.surface_tension import (
    SurfaceTable,
    canonical_direction,
    cell_value,
    fhom_estimate,
    fhom_total,
    in_frame_cube,
    orthogonal_frame,
)

from conftest import fixture_model


def test_canonical_direction_scaling_and_sign():
    assert canonical_direction((2, 4)) == (1, 2)
    assert canonical_direction((-2, -4)) == (1, 2)
    assert canonical_direction((0, -3)) == (0, 1)
    assert canonical_direction((Fraction(1, 2), Fraction(1, 3))) == (3, 2)
    assert canonical_direction((Fraction(-3, 7),)) == (1,)
    with pytest.raises(ValueError):
        canonical_direction((0, 0))


def test_orthogonal_frame_is_orthogonal_and_aligned():
    for direction in [(1, 0), (1, 1), (3, 4), (2, -5)]:
        frame = orthogonal_frame(direction)
        assert len(frame) == 2
        first = frame[0]
        # first row is a positive multiple of the direction
        ratios = {Fraction(a, b) for a, b in zip(first, direction) if b}
        assert len(ratios) == 1 and ratios.pop() > 0
        dot = sum(a * b for a, b in zip(frame[0], frame[1]))
        assert dot == 0
    frame3 = orthogonal_frame((1, 1, 1))
    for i in range(3):
        for j in range(i + 1, 3):
            assert sum(a * b for a, b in zip(frame3[i], frame3[j])) == 0


def test_frame_cube_is_half_open():
    frame = orthogonal_frame((1, 0))
    # side 4 along the first axis: -2 included, +2 excluded
    assert in_frame_cube((-2, 0), frame, 4)
    assert not in_frame_cube((2, 0), frame, 4)
    assert in_frame_cube((1, -2), frame, 4)
    assert not in_frame_cube((1, 2), frame, 4)

    frame = orthogonal_frame((3, 4))
    # boundary planes <x, (3,4)> = +-10 at side 4: negative face in, positive out
    assert in_frame_cube((-2, -1), frame, 4)
    assert not in_frame_cube((2, 1), frame, 4)


def test_frame_cube_axis_counts():
    frame = orthogonal_frame((0, 1))
    for side in (2, 3, 5, 8):
        count = sum(
            in_frame_cube((x, y), frame, side)
            for x in range(-10, 11)
            for y in range(-10, 11)
        )
        assert count == side * side


def test_cell_value_invariant_under_direction_rescaling():
    model = fixture_model("soft_inclusions_2d")
    s = classify(model)
    base = cell_value(model, 1, (1, 0), 4, s)
    assert cell_value(model, 1, (2, 0), 4, s) == base
    assert cell_value(model, 1, (Fraction(1, 3), 0), 4, s) == base
    model = fixture_model("diagonal_2d")
    s = classify(model)
    base = cell_value(model, 1, (1, 1), 8, s)
    assert cell_value(model, 1, (3, 3), 8, s) == base
    assert cell_value(model, 1, (Fraction(1, 2), Fraction(1, 2)), 8, s) == base


def test_cell_value_symmetric_under_direction_flip():
    model = fixture_model("soft_inclusions_2d")
    s = classify(model)
    assert cell_value(model, 1, (1, 0), 4, s) == cell_value(model, 1, (-1, 0), 4, s)
    assert cell_value(model, 1, (1, 1), 4, s) == cell_value(model, 1, (-1, -1), 4, s)


def test_chain_wall_cost_independent_of_side():
    model = fixture_model("chain_soft_even")
    s = classify(model)
    for side in (2, 3, 4, 7, 10):
        assert cell_value(model, 1, (1,), side, s) == 1


def test_two_chain_wall_costs():
    model = fixture_model("two_chains")
    s = classify(model)
    assert cell_value(model, 1, (1,), 4, s) == 1
    assert cell_value(model, 2, (1,), 4, s) == 2
    assert fhom_total(model, (1,), (4, 8), s) == 3


def test_inclusion_lattice_axis_wall():
    model = fixture_model("soft_inclusions_2d")
    s = classify(model)
    for side in (4, 8, 12):
        assert cell_value(model, 1, (1, 0), side, s) == Fraction(1, 2)
        assert cell_value(model, 1, (0, 1), side, s) == Fraction(1, 2)


def test_diagonal_lattice_walls_decrease_with_side():
    model = fixture_model("diagonal_2d")
    s = classify(model)
    axis = [cell_value(model, 1, (1, 0), side, s) for side in (8, 16, 32)]
    assert axis == [Fraction(9, 8), Fraction(17, 16), Fraction(33, 32)]
    diag = [cell_value(model, 1, (1, 1), side, s) for side in (8, 16, 32)]
    assert diag == [Fraction(5, 8), Fraction(11, 16), Fraction(23, 32)]


def test_cell_value_argument_errors():
    model = fixture_model("soft_inclusions_2d")
    s = classify(model)
    with pytest.raises(ValueError):
        cell_value(model, 0, (1, 0), 4, s)
    with pytest.raises(ValueError):
        cell_value(model, 3, (1, 0), 4, s)
    with pytest.raises(ValueError):
        cell_value(model, 1, (0, 0), 4, s)
    with pytest.raises(ValueError):
        cell_value(model, 1, (1,), 4, s)
    with pytest.raises(ValueError):
        cell_value(model, 1, (1, 0), 0, s)


def test_cell_value_warns_below_coarsening_side():
    model = fixture_model("islands_1d")
    s = classify(model)
    with pytest.warns(UserWarning, match="coarsening"):
        cell_value(model, 1, (1,), 2, s)


def test_fhom_estimate_requires_increasing_sides():
    model = fixture_model("chain_soft_even")
    s = classify(model)
    with pytest.raises(ValueError):
        fhom_estimate(model, 1, (1,), (4,), s)
    with pytest.raises(ValueError):
        fhom_estimate(model, 1, (1,), (8, 4), s)
    row = fhom_estimate(model, 1, (1,), (2, 4, 8), s)
    assert row.estimate == 1
    assert row.increment == 0
    assert row.sides == (2, 4, 8)


def test_surface_table_round_trip():
    model = fixture_model("two_chains")
    s = classify(model)
    table = SurfaceTable.from_model(model, [(1,)], (4, 8), s)
    assert table.directions() == [(1,)]
    assert table.value(1, (1,)) == 1
    assert table.value(2, (1,)) == 2
    assert table.total((1,)) == 3
    # scaled query hits the same canonical row
    assert table.total((-3,)) == 3
    with pytest.raises(KeyError):
        table.row(1, (7, 7))


def test_surface_table_from_values():
    table = SurfaceTable.from_values(
        2, {(1, (1,)): Fraction(1), (2, (1,)): Fraction(2)}
    )
    assert table.total((1,)) == 3
    assert table.value(2, (1,)) == 2
