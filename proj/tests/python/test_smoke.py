"""End-to-end smoke tests for the habopt Python bindings.

These deliberately stay small and fast; the heavy numerical checks live in
the C++ unit and acceptance suites. Here we verify that the bindings expose
the core operations, that basic invariants hold through the Python surface,
and that errors map onto idiomatic Python exceptions.
"""

import json
import math

import pytest

import habopt


def test_grid_and_integrate():
    g = habopt.build_grid(1, [64])
    assert g.dim == 1
    assert g.total_cells == 64
    assert g.spacing[0] == pytest.approx(1.0 / 64)
    one = habopt.ScalarField(g, 1.0)
    assert habopt.integrate(g, one) == pytest.approx(1.0, abs=1e-15)
    # Laplacian annihilates constants exactly.
    lap = habopt.laplacian_apply(g, one)
    assert max(abs(v) for v in lap.values) == 0.0


def test_constant_resource_is_exact():
    g = habopt.build_grid(1, [64])
    c = habopt.ConstraintSet(1.0, 0.4)
    m = habopt.ResourceField(habopt.ScalarField(g, 0.4), c)
    sol = habopt.solve_steady(g, m, 1.0)
    assert sol.iterations == 0
    assert sol.total_population == pytest.approx(0.4, abs=1e-12)
    assert max(abs(v - 0.4) for v in sol.theta.values) <= 1e-12


def test_crenel_beats_constant():
    g = habopt.build_grid(1, [128])
    c = habopt.ConstraintSet(1.0, 0.4)
    m = habopt.make_crenel_1d(g, c, [(0.0, 0.4)])
    mean = habopt.integrate(g, m.field)
    assert mean == pytest.approx(0.4, abs=1e-12)
    sol = habopt.solve_steady(g, m, 1.0)
    assert sol.total_population > 0.4 + 1e-6


def test_threshold_to_volume_properties():
    g = habopt.build_grid(1, [32])
    c = habopt.ConstraintSet(1.0, 0.4)
    scores = habopt.ScalarField(g, [math.sin(7.0 * i) for i in range(32)])
    m = habopt.threshold_to_volume(scores, c)
    vals = list(m.field.values)
    assert habopt.integrate(g, m.field) == pytest.approx(0.4, abs=1e-12)
    fractional = [v for v in vals if 1e-12 < v < 1.0 - 1e-12]
    assert len(fractional) <= 1
    assert all(-1e-15 <= v <= 1.0 + 1e-15 for v in vals)


def test_adjoint_gradient_positive():
    g = habopt.build_grid(1, [64])
    c = habopt.ConstraintSet(1.0, 0.4)
    m = habopt.make_random(g, c, seed=11)
    sol = habopt.solve_steady(g, m, 1.0)
    bundle = habopt.solve_adjoint(g, m, 1.0, sol)
    assert min(bundle.grad.values) > 0.0


def test_evolution_matches_steady():
    g = habopt.build_grid(1, [64])
    c = habopt.ConstraintSet(1.0, 0.4)
    m = habopt.make_crenel_1d(g, c, [(0.3, 0.7)])
    sol = habopt.solve_steady(g, m, 0.5)
    opts = habopt.EvolutionOptions()
    opts.stop_tol = 1e-12
    res = habopt.evolve(g, m, 0.5, habopt.ScalarField(g, 0.4), opts)
    assert res.stationary
    gap = max(abs(a - b) for a, b in zip(res.u.values, sol.theta.values))
    assert gap <= 1e-6


def test_tiny_optimize_is_bang_bang():
    g = habopt.build_grid(1, [32])
    c = habopt.ConstraintSet(1.0, 0.4)
    opts = habopt.OptimOptions()
    opts.seed = 5
    init = habopt.ResourceField(habopt.ScalarField(g, 0.4), c)
    run = habopt.optimize(g, c, 10.0, init, opts)
    assert run.termination == habopt.Termination.converged
    assert run.bang_bang >= 1.0 - 2.0 / 32
    assert run.final_f >= 0.4
    # Every accepted step strictly improved the objective.
    hist = run.f_history
    assert all(b > a for a, b in zip(hist, hist[1:]))


def test_field_json_roundtrip():
    g = habopt.build_grid(2, [4, 3])
    f = habopt.ScalarField(g, [0.1 * i for i in range(12)])
    doc = json.loads(habopt.field_to_json(f))
    assert doc["dim"] == 2
    assert doc["cells"] == [4, 3]
    assert doc["order"] == "row-major-last-axis-fastest"
    back = habopt.field_from_json(habopt.field_to_json(f))
    assert list(back.values) == list(f.values)


def test_config_error_maps_to_value_error(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"scenario": "solve", "constraints": {"kappa": -1.0}}))
    with pytest.raises(ValueError, match="constraints.kappa"):
        habopt.run_scenario_file(str(cfg))


def test_run_scenario_file_writes_artifacts(tmp_path):
    cfg = tmp_path / "solve.json"
    cfg.write_text(
        json.dumps(
            {
                "scenario": "solve",
                "grid": {"dim": 1, "cells": [32]},
                "mu": 1.0,
            }
        )
    )
    out = habopt.run_scenario_file(str(cfg), out_dir=str(tmp_path / "out"))
    names = {p.name for p in (tmp_path / "out").iterdir()}
    assert out == str(tmp_path / "out")
    assert {"solve.csv", "manifest.json", "theta_0.json", "m.json"} <= names
