"""Smoke tests for the python bindings.

Light checks only: the heavy numerical validation lives in the C++ unit
and acceptance suites.
"""

import math

import pytest

import conilay


def test_version():
    assert conilay.__version__


def test_bessel_basics():
    assert conilay.j0(0.0) == 1.0
    z1 = conilay.j0_zero(1)
    assert abs(z1 - 2.404825557695773) < 1e-10
    assert abs(conilay.j0(z1)) < 1e-12
    # Wronskian at x=1: J0 Y1 - ... via the bound functions
    x = 1.0
    w = conilay.j1(x) * conilay.y0(x) - conilay.j0(x) * conilay.y1(x)
    assert abs(w - 2.0 / (math.pi * x)) < 1e-12
    with pytest.raises(Exception):
        conilay.y0(-1.0)


def test_airy_zero():
    assert abs(conilay.airy_zero(1) - 2.33810741) < 1e-7
    assert abs(conilay.airy(-conilay.airy_zero(1))) < 1e-12


def test_effective_potential():
    s = conilay.effective_potential(0.0)
    assert abs(s["v"] - conilay.v0()) < 1e-14
    s = conilay.effective_potential(1.0)
    assert 0.29 < s["v"] < 0.5
    assert abs(s["residual"]) < 1e-10


def test_asymptotic_formulas():
    assert abs(conilay.counting_asymptote(math.pi / 4, math.exp(-1.0))
               - 1.0 / (4 * math.pi)) < 1e-14
    a = conilay.mu_two_term(1, 0.02, "aperture")
    b = conilay.mu_two_term(1, 0.02, "cone_rescaled")
    assert b > a > 0.58
    mu = 0.83
    lam = conilay.scale_mu_lambda(mu, 0.3, True)
    assert abs(conilay.scale_mu_lambda(lam, 0.3, False) - mu) < 1e-14
    assert conilay.staircase([0.5, 0.9], [0.05, 0.2]) == [2, 1]


def test_small_meridian_solve():
    res = conilay.solve_meridian(30.0, m=0, truncation=15.0, k=2,
                                 h_near=0.3, ratio=1.3)
    assert res["dofs"] > 100
    mu1 = res["values"][0]
    assert 0.5 < mu1 < 1.001
    assert res["values"][1] > mu1
    assert max(res["residuals"]) < 1e-8


def test_triangle_expansion_consistency():
    h = 0.15
    lam = conilay.solve_scaled("triangle", h, k=1, h_near=0.06)["values"][0]
    expansion = conilay.lambda_delta_expansion(1, h)
    assert abs(lam - expansion) < h ** (4.0 / 3.0)  # next expansion term
