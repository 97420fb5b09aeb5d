import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ellipstone import kernels
from ellipstone import quadrature as quad


def direct(targets, nodes, weights, power):
    vals, grads = [], []
    for x in targets:
        v, g = 0.0, np.zeros(len(x))
        for y, w in zip(nodes, weights):
            r = math.dist(x, y)
            v += w / r**power
            g += -power * w / r ** (power + 2) * (x - y)
        vals.append(v)
        grads.append(g)
    return np.array(vals), np.array(grads)


@pytest.mark.parametrize("backend", kernels.available_backends())
@pytest.mark.parametrize("dim", [3, 4, 5])
def test_kernel_sums_against_loop(backend, dim):
    rng = np.random.default_rng(dim)
    nodes = rng.normal(size=(200, dim))
    weights = rng.uniform(0.1, 1.0, size=200)
    targets = rng.normal(size=(4, dim)) + 5.0
    v, g = kernels.kernel_sums(targets, nodes, weights, dim - 2, with_grad=True, backend=backend)
    rv, rg = direct(targets, nodes, weights, dim - 2)
    np.testing.assert_allclose(v, rv, rtol=1e-13)
    np.testing.assert_allclose(g, rg, rtol=1e-12)


def test_backends_agree():
    if len(kernels.available_backends()) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(0)
    nodes = rng.normal(size=(100_000, 3))
    weights = rng.uniform(size=100_000)
    targets = rng.normal(size=(3, 3)) * 4
    a = kernels.kernel_sums(targets, nodes, weights, 1, True, backend="compiled")
    b = kernels.kernel_sums(targets, nodes, weights, 1, True, backend="python")
    np.testing.assert_allclose(a[0], b[0], rtol=1e-13)
    np.testing.assert_allclose(a[1], b[1], rtol=1e-12)


def test_pure_python_env_switch():
    env = dict(os.environ, ELLIPSTONE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import ellipstone.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_sphere_rule_area_and_moments():
    for d in (2, 3, 4, 5):
        pts, w = quad.sphere_rule(d, 12)
        area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
        assert w.sum() == pytest.approx(area, rel=1e-13)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
        # <x_1^2> over the sphere is 1/d
        assert (pts[:, 0] ** 2) @ w / area == pytest.approx(1 / d, rel=1e-13)
        assert (pts[:, -1] ** 4) @ w / area == pytest.approx(3 / (d * (d + 2)), rel=1e-13)


def test_hemisphere_rule():
    for d in (2, 3, 4):
        pts, w = quad.hemisphere_rule(d, 16)
        area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
        assert np.all(pts[:, 0] <= 1e-15)
        assert w.sum() == pytest.approx(area / 2, rel=1e-13)


def test_ball_and_semicircle_rules():
    for d in (2, 3, 4):
        pts, w = quad.ball_rule(d, 10)
        vol = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
        assert w.sum() == pytest.approx(vol, rel=1e-13)
        assert (np.sum(pts**2, axis=1)) @ w == pytest.approx(vol * d / (d + 2), rel=1e-13)
        # int_B sqrt(1 - |x|^2) dx = |S^{d-1}| * B(d/2, 3/2) / 2
        pts, w = quad.semicircle_ball_rule(d, 10)
        area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
        ref = area * math.gamma(d / 2) * math.gamma(1.5) / math.gamma(d / 2 + 1.5) / 2
        assert w.sum() == pytest.approx(ref, rel=1e-13)


def test_rotation_to():
    n = np.array([0.3, -0.5, 0.8])
    q = quad.rotation_to(n)
    np.testing.assert_allclose(q.T @ q, np.eye(3), atol=1e-14)
    np.testing.assert_allclose(q[:, 0], n / np.linalg.norm(n), atol=1e-15)


def test_graded_hemisphere_rule():
    for d in (3, 4, 5):
        area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
        for k in (0, 6, 20):
            pts, w = quad.graded_hemisphere_rule(d, 10, k)
            assert np.all(pts[:, 0] <= 0)
            assert w.sum() == pytest.approx(area / 2, rel=1e-13)
            assert (pts[:, 1] ** 2) @ w == pytest.approx(area / (2 * d), rel=1e-12)
