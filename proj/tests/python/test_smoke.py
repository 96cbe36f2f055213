import math

import numpy as np
import pytest

import cohesive


def test_catalog_lists_all_laws():
    names = cohesive.catalog_names()
    for n in ["dugdale", "linear", "bilinear", "hyperbolic", "quad_hyperbolic", "exponential", "logarithmic"]:
        assert n in names
    e = cohesive.catalog_entry("linear", {"k": 2.0})
    assert e["s_frac0"] == pytest.approx(0.5)
    assert e["g0"](0.25) == pytest.approx(0.25 - 0.25**2)


def test_linear_forward_curve():
    solver = cohesive.ForwardSolver(cohesive.load_model("catalog:linear"))
    s = np.linspace(0.1, 0.9, 9)
    c = solver.curve(s)
    assert np.allclose(c["g"], s - s**2 / 2, atol=1e-8)
    assert np.allclose(c["g_prime"], 1 - s, atol=1e-8)
    assert solver.g(3.0) == pytest.approx(0.5, abs=1e-12)


def test_dugdale_model_from_dict():
    model = cohesive.load_model({"catalog": "dugdale", "pair": 1})
    solver = cohesive.ForwardSolver(model)
    for s in [0.3, 0.8, 1.5]:
        assert solver.g(s) == pytest.approx(min(s, 1.0), abs=1e-6)


def test_reconstruct_linear_softening():
    r = cohesive.reconstruct("catalog:linear", "khat=t^2")
    assert r["produced_name"] == "omega0(1-t)"
    t = r["produced"]["x"]
    w = r["produced"]["y"]
    mask = t <= 0.999
    assert np.max(np.abs(w[mask] - (1 - t[mask] ** 2) / math.pi**2)) < 1e-7
    solver = cohesive.ForwardSolver(r["model"])
    assert solver.g(0.5) == pytest.approx(0.375, rel=1e-4)


def test_oracle_agrees_with_forward():
    model = cohesive.load_model("catalog:linear")
    g, m = cohesive.discrete_g(model, 0.5, n_w=400, n_m=40)
    assert g == pytest.approx(0.375, rel=2e-2)
    assert 0.0 < m < 1.0


def test_diffuse_density_boundary_and_interior():
    assert cohesive.h_sigma(10.0, 0.1) == pytest.approx(0.01)
    assert cohesive.h_sigma(1.0, 1.0) == pytest.approx(0.75)


def test_hypothesis_violation_is_raised():
    with pytest.raises(cohesive.HypothesisViolation):
        cohesive.load_model({"fhat": "t^2", "Q": "t^2/4", "omega": "-t"})
    with pytest.raises(cohesive.CohesiveError):
        cohesive.catalog_entry("nothing")


def test_acceptance_criterion_from_python():
    r = cohesive.run_criterion(3)
    assert r["id"] == 3 and r["pass"]
