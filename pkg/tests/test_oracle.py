"""Tests for the brute-force cross-check oracles."""

import numpy as np
import pytest

from calx.energy import Competitor1D, energy_1d, energy_radial_optimal
from calx.oracle import (
    JumpSearchSpace,
    oracle_1d_best,
    oracle_radial_sweep,
    oracle_robin_shooting,
)
from calx.potentials import delta_robin


def test_search_space_validation():
    space = JumpSearchSpace.uniform(resolution=10)
    assert space.locations[0] == 0.0 and space.locations[-1] == 1.0
    assert len(space.locations) == 11
    assert space.max_jumps == 2
    with pytest.raises(ValueError):
        JumpSearchSpace(locations=(-0.5, 1.0), values=(0.0, 1.0))
    with pytest.raises(ValueError):
        JumpSearchSpace(locations=(), values=(0.0, 1.0))
    with pytest.raises(ValueError):
        JumpSearchSpace(locations=(0.0, 1.0), values=(0.0, 1.0), max_jumps=3)
    messy = JumpSearchSpace(locations=(1.0, 0.5, 0.5, 0.0),
                            values=(0.3, 0.3, 0.1))
    assert messy.locations == (0.0, 0.5, 1.0)
    assert messy.values == (0.1, 0.3)


def test_oracle_expensive_boundary_jump_case():
    best, energy = oracle_1d_best(0.0, 1.0, 1.0, resolution=1000)
    assert energy == 0.5
    assert energy_1d(best, 1.0).total == pytest.approx(0.5, abs=1e-15)
    # the winner jumps from the datum 0 to 1/2 at the left endpoint and
    # stays affine afterwards
    assert best.left_data == 0.0
    assert best.breakpoints == ()
    assert best.pieces == ((0.5, 0.5),)
    # strictly better than the best affine interpolant, which pays 1
    affine = Competitor1D.affine(0.0, 1.0, 0.0, 1.0,
                                 left_data=0.0, right_data=1.0)
    assert energy_1d(affine, 1.0).total == pytest.approx(1.0)


def test_oracle_prefers_affine_when_jumps_cost_too_much():
    best, energy = oracle_1d_best(0.8, 1.0, 3.0, resolution=400)
    assert energy == pytest.approx(0.2 ** 2, abs=1e-15)
    assert best.breakpoints == ()
    assert best.left_data == 0.8 and best.right_data == 1.0
    assert best.trace_at_a() == pytest.approx(0.8)


def test_oracle_reports_energy_of_returned_competitor():
    rng = np.random.default_rng(5)
    for _ in range(20):
        m = float(rng.uniform(0.0, 0.9))
        M = float(rng.uniform(m, 1.0))
        beta = float(rng.uniform(0.2, 3.0))
        best, energy = oracle_1d_best(m, M, beta, resolution=200)
        assert energy == pytest.approx(energy_1d(best, beta).total, abs=1e-13)
        affine = Competitor1D.affine(0.0, 1.0, m, M, left_data=m, right_data=M)
        assert energy <= energy_1d(affine, beta).total + 1e-13


def brute_force_best(m, M, beta, space):
    """Exhaustive search over zero-, one- and two-jump profiles.

    Pure nested loops over the candidate grids, deliberately naive so it
    shares nothing with the vectorized implementation.  A jump at x has
    independent one-sided traces drawn from the value grid (or pinned to
    the boundary datum when x sits on an endpoint), and the profile is
    affine between consecutive jump points.
    """

    locs = space.locations
    vals = space.values

    def dirichlet(v0, v1, length):
        if length > 0.0:
            return (v1 - v0) ** 2 / length
        return 0.0

    best = (M - m) ** 2
    for x0 in locs:
        left = (m,) if x0 == 0.0 else vals
        right = (M,) if x0 == 1.0 else vals
        for q in left:
            for l in right:
                e = (dirichlet(m, q, x0) + beta * (q ** 2 + l ** 2)
                     + dirichlet(l, M, 1.0 - x0))
                best = min(best, e)
    for i0, x0 in enumerate(locs):
        for x1 in locs[i0 + 1:]:
            left = (m,) if x0 == 0.0 else vals
            right = (M,) if x1 == 1.0 else vals
            for q0 in left:
                for l0 in vals:
                    for q1 in vals:
                        for l1 in right:
                            e = (dirichlet(m, q0, x0)
                                 + beta * (q0 ** 2 + l0 ** 2)
                                 + dirichlet(l0, q1, x1 - x0)
                                 + beta * (q1 ** 2 + l1 ** 2)
                                 + dirichlet(l1, M, 1.0 - x1))
                            best = min(best, e)
    return best


def test_oracle_matches_naive_exhaustive_search():
    # the naive scan covers exactly the candidate family the tables
    # enumerate, so the minima must agree to rounding
    space = JumpSearchSpace.uniform(resolution=8)
    for m, M, beta in [(0.0, 1.0, 1.0), (0.125, 0.875, 0.5),
                       (0.25, 1.0, 2.0)]:
        _, energy = oracle_1d_best(m, M, beta, space=space)
        naive = brute_force_best(m, M, beta, space)
        assert energy == pytest.approx(naive, abs=1e-12)


def test_oracle_handles_spaces_without_zero_value():
    space = JumpSearchSpace(
        locations=tuple(np.linspace(0.0, 1.0, 9)),
        values=tuple(np.linspace(0.05, 1.0, 8)),
    )
    best, energy = oracle_1d_best(0.0, 1.0, 0.05, space=space)
    assert energy == pytest.approx(energy_1d(best, 0.05).total, abs=1e-13)
    naive = brute_force_best(0.0, 1.0, 0.05, space)
    assert energy == pytest.approx(naive, abs=1e-12)


def test_oracle_zero_jump_budget():
    best, energy = oracle_1d_best(0.0, 1.0, 0.01, max_jumps=0)
    assert best.breakpoints == ()
    assert energy == pytest.approx(1.0)


def test_oracle_rejects_bad_data():
    with pytest.raises(ValueError):
        oracle_1d_best(0.5, 0.4, 1.0)
    with pytest.raises(ValueError):
        oracle_1d_best(0.0, 1.2, 1.0)
    with pytest.raises(ValueError):
        oracle_1d_best(0.0, 1.0, 0.0)


def test_shooting_reproduces_the_robin_trace():
    for n, beta, R in [(1, 2.0, 2.5), (2, 3.0, 2.0), (3, 0.7, 4.0),
                       (2, 1.3, 1.08)]:
        got = oracle_robin_shooting(n, beta, R)
        assert got == pytest.approx(delta_robin(n, beta, R), abs=1e-9)


def test_shooting_rejects_bad_arguments():
    with pytest.raises(ValueError):
        oracle_robin_shooting(0, 1.0, 2.0)
    with pytest.raises(ValueError):
        oracle_robin_shooting(2, -1.0, 2.0)
    with pytest.raises(ValueError):
        oracle_robin_shooting(2, 1.0, 1.0)


def test_radial_sweep_layout_and_best_row():
    R_grid = np.linspace(1.2, 3.0, 16)
    delta_grid = np.linspace(0.05, 1.0, 20)
    sweep = oracle_radial_sweep(2, 1.0, 0.4, R_grid, delta_grid)
    assert sweep.rows[0].R == 1.0 and sweep.rows[0].delta == 1.0
    assert sweep.is_indicator_best
    # every scanned row with R > 1 loses to the indicator here
    others = [row.total for row in sweep.rows[1:]]
    assert min(others) >= sweep.best.total


def test_radial_sweep_folds_explicit_unit_radius():
    sweep = oracle_radial_sweep(2, 1.0, 0.4, [1.0, 2.0], [0.3, 0.8])
    unit_rows = [row for row in sweep.rows if row.R == 1.0]
    assert len(unit_rows) == 1


def test_radial_sweep_rejects_bad_grids():
    with pytest.raises(ValueError):
        oracle_radial_sweep(2, 1.0, 0.4, [0.5, 2.0], [0.5])
    with pytest.raises(ValueError):
        oracle_radial_sweep(2, 1.0, 0.4, [2.0], [0.0, 0.5])
    with pytest.raises(ValueError):
        oracle_radial_sweep(2, 1.0, 0.4, [], [0.5])


def test_radial_sweep_tracks_the_closed_form_optimum():
    n, beta, gamma_ = 2, 3.0, 0.0
    delta_grid = np.linspace(1.0 / 4000.0, 1.0, 4000)
    sweep = oracle_radial_sweep(n, beta, gamma_, [2.0], delta_grid)
    rows_at_2 = [row for row in sweep.rows if row.R == 2.0]
    grid_min = min(row.total for row in rows_at_2)
    closed = energy_radial_optimal(n, beta, gamma_, 2.0)
    assert grid_min == pytest.approx(closed, rel=1e-6)
    assert grid_min >= closed - 1e-12


def test_radial_sweep_threads_and_csv(tmp_path):
    R_grid = np.linspace(1.1, 2.5, 8)
    delta_grid = np.linspace(0.1, 1.0, 9)
    sweep1 = oracle_radial_sweep(2, 1.0, 0.34, R_grid, delta_grid)
    sweep2 = oracle_radial_sweep(2, 1.0, 0.34, R_grid, delta_grid, threads=2)
    assert sweep1.rows == sweep2.rows
    assert sweep1.best_index == sweep2.best_index

    path = tmp_path / "sweep.csv"
    sweep1.write_csv(path)
    text = path.read_text()
    lines = text.strip().splitlines()
    assert lines[0] == "R,delta,dirichlet,jump,volume,total"
    assert len(lines) == len(sweep1.rows) + 1
    sweep1.write_csv(path)
    assert path.read_text() == text
