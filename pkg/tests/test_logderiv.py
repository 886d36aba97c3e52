import math

import numpy as np
import pytest

from critpoint.errors import ParameterError, PoleOnContourError
from critpoint.logderiv import (Circle, RootSet, circle_sup_norm,
                                circle_sup_norm_refined, eval_S, eval_S_prime,
                                log_minus, log_plus)

# sup |S| on C(0.5, 1) for roots {1, -1}: |S(z)| = 2|z| / (|z-1| |z+1|) peaks
# at z = 1.5, giving 3 / 1.25 (value pinned by refined dense sampling)
JENSEN_EXAMPLE_SUP = 2.4


def test_eval_S_values():
    assert eval_S([1, -1], 0j).value == 0
    assert eval_S([0], 2.0).value == 0.5
    r = eval_S([1, -1], 1.0)
    assert r.is_pole and r.pole_index == 0
    assert r.magnitude == math.inf


def test_eval_S_prime_values():
    assert eval_S_prime([0], 2.0).value == -0.25
    assert eval_S_prime([1, -1], 0j).value == -2.0
    assert eval_S_prime([1, -1], 1.0).is_pole


def test_eval_S_permutation_bit_stable():
    rng = np.random.default_rng(3)
    roots = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    z = 3.5 + 0.25j
    base = eval_S(roots, z).value
    for seed in range(5):
        perm = np.random.default_rng(seed).permutation(40)
        assert eval_S(roots[perm], z).value == base
        assert eval_S_prime(roots[perm], z).value == eval_S_prime(roots, z).value


def test_eval_S_prime_central_difference():
    # independent check: (S(z+h) - S(z-h)) / 2h
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(10):
        roots = rng.standard_normal(25) + 1j * rng.standard_normal(25)
        z = complex(*rng.uniform(2.0, 3.0, 2))
        fd = (eval_S(roots, z + h).value - eval_S(roots, z - h).value) / (2 * h)
        scale = 1.0 + float(np.sum(1.0 / np.abs(z - roots) ** 2))
        assert abs(fd - eval_S_prime(roots, z).value) <= 10 * h * scale


def test_pole_dominance():
    # one root at distance delta, the others at least `spacing` away
    spacing = 1.0
    others = np.array([2.0, 2.0 + 1j, 3.0 - 1j, -2.0, -2.0 - 2j], dtype=complex)
    for delta in (1e-3, 1e-6, 1e-9):
        roots = np.concatenate([[0j], others])
        z = complex(delta, 0.0)
        got = eval_S(roots, z)
        n = len(roots)
        assert got.magnitude >= 1 / delta - (n - 1) / spacing


def test_circle_sup_norm_single_root():
    c = Circle(0j, 2.0)
    for m in (3, 64, 4096):
        assert circle_sup_norm([0], c, m) == pytest.approx(0.5, abs=1e-12)


def test_circle_sup_norm_nested_grids_monotone():
    rng = np.random.default_rng(5)
    roots = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    c = Circle(0.1 + 0.1j, 4.0)
    prev = 0.0
    for m in (16, 32, 64, 128, 256):
        cur = circle_sup_norm(roots, c, m)
        assert cur >= prev
        prev = cur


def test_circle_sup_norm_refined_jensen_example():
    value, m_used, delta = circle_sup_norm_refined([1, -1], Circle(0.5, 1.0),
                                                   m_start=4096, rtol=1e-6)
    assert value == pytest.approx(JENSEN_EXAMPLE_SUP, rel=1e-9)
    assert value > 0 and math.isfinite(value)
    assert m_used >= 8192 and delta < 1e-6


def test_pole_on_contour_detected():
    with pytest.raises(PoleOnContourError):
        circle_sup_norm([2.0], Circle(0j, 2.0), 64)


def test_log_plus_minus_values():
    assert log_minus(0.5) == pytest.approx(math.log(2), rel=1e-12)
    assert log_plus(1.0) == 0.0
    assert log_minus(1.0) == 0.0
    assert log_minus(2.0) == 0.0
    assert log_plus(math.e) == pytest.approx(1.0, rel=1e-12)
    assert log_minus(0.0) == math.inf
    assert log_plus(0.0) == 0.0
    with pytest.raises(ParameterError):
        log_minus(-1.0)
    with pytest.raises(ParameterError):
        log_plus(-0.5)


def test_log_identity_decomposition():
    xs = np.concatenate([np.geomspace(1e-8, 1.0, 50), np.geomspace(1.0, 1e8, 50)])
    for x in xs:
        assert math.log(x) == pytest.approx(log_plus(x) - log_minus(x), abs=1e-15)
    arr = np.array([0.25, 1.0, 4.0])
    assert np.allclose(log_plus(arr) - log_minus(arr), np.log(arr))


def test_rootset_validation():
    with pytest.raises(ParameterError):
        RootSet(np.array([], dtype=complex))
    assert RootSet(np.array([1j])).n == 1
