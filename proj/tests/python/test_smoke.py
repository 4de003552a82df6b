import math

import numpy as np
import pytest

import hillwalsh as hw


def test_free_problem():
    assert hw.delta(0.0, 0.0) == 2.0


def test_closed_form():
    assert abs(hw.delta(0.25, 0.0, k=14) + 2.0) < 5e-3
    assert abs(hw.delta(-1.0, 0.0, tau=1.0, k=14) - 2 * math.cosh(1.0)) < 5e-3


def test_methods_agree():
    rec = hw.delta(1.0, 0.5, k=8)
    assert hw.delta(1.0, 0.5, k=8, method="triangular") == pytest.approx(rec, rel=1e-10)
    assert hw.delta(1.0, 0.5, k=6, method="direct") == pytest.approx(hw.delta(1.0, 0.5, k=6), abs=1e-6)
    assert hw.delta(1.0, 0.5, k=14) == pytest.approx(hw.delta(1.0, 0.5, method="monodromy"), abs=1e-2)


def test_monodromy_matrix_unimodular():
    m = hw.monodromy_matrix(1.0, 0.5, excitation="cossum:1x1,1x2")
    assert m.shape == (2, 2)
    assert abs(np.linalg.det(m) - 1.0) < 1e-8


def test_grid_shapes_and_classes():
    g = hw.grid((0.0, 4.0, 9), (0.0, 2.0, 5), excitation="cossum:1x1,1x2", k=8)
    assert g["deltas"].shape == (5, 9)
    assert g["classes"].dtype == np.int8
    assert g["singular_count"] == 0
    names = [hw.CLASS_NAMES[c] for c in g["classes"].ravel()]
    assert names == [hw.classify(d) for d in g["deltas"].ravel()]


def test_walsh_layer():
    w = hw.walsh_matrix(3)
    assert np.array_equal(w @ w, 8 * np.eye(8))
    p = hw.integration_operator(2)
    assert p[0, 0] == 0.5 and p[1, 0] == 0.25
    assert len(hw.samples("cos", 4)) == 16


def test_singularity():
    k = 4
    alpha = -(2.0 ** (2 * k + 2)) / (2 * math.pi) ** 2
    assert hw.singularity_index(alpha, 0.0, k=k) == 1
    with pytest.raises(hw.SingularityError):
        hw.delta(alpha, 0.0, k=k)
    assert hw.singularity_index(alpha * (1 + 1e-6), 0.0, k=k) is None


def test_bad_input():
    with pytest.raises(ValueError):
        hw.delta(1.0, 0.0, excitation="sin")
    with pytest.raises(ValueError):
        hw.delta(1.0, 0.0, k=30)


def test_interlacing():
    r = hw.interlacing(0.5, (-1.0, 2.0), k=10)
    assert r["ordering_ok"]
    assert len(r["lambdas"]) == 3
