"""Hand-derived data against a sixth-order finite-difference oracle on the exact solution."""
import math

import numpy as np
import pytest

from lrnn import example
from lrnn.errors import ConfigError, UnknownExample

# sixth-order central stencils
D1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
D2 = np.array([2, -27, 270, -490, 270, -27, 2]) / 180.0
OFFS = np.arange(-3, 4)


def fd_grad(u, x, t, h=1e-2):
    return np.stack([sum(c * u(x + o * h * e, t) for c, o in zip(D1, OFFS)) / h for e in np.eye(x.shape[1])], axis=1)


def fd_lap(u, x, t, h=1e-2):
    return sum(sum(c * u(x + o * h * e, t) for c, o in zip(D2, OFFS)) / h**2 for e in np.eye(x.shape[1]))


def fd_dt(u, x, t, h=1e-2):
    return sum(c * u(x, t + o * h) for c, o in zip(D1, OFFS)) / h


CASES = [(1, {}), (1, {"beta": (1e-4, 1e4)}), (2, {}), (3, {}), (4, {}), (4, {"d": 10}), (5, {}), (6, {})]


@pytest.mark.parametrize("eid,kw", CASES)
def test_source_and_derivatives(eid, kw):
    prob = example(eid, **kw).problem
    geom = prob.geom
    rng = np.random.default_rng(eid)
    x = geom.box.uniform(rng, 1000)
    t = rng.uniform(0.05, 0.95, 1000) if geom.is_spacetime else None
    for s, piece in enumerate(prob.pieces):
        scale = max(1.0, np.abs(piece.u(x, t)).max())
        assert np.max(np.abs(piece.grad(x, t) - fd_grad(piece.u, x, t))) <= 1e-8 * scale
        assert np.max(np.abs(piece.lap(x, t) - fd_lap(piece.u, x, t))) <= 1e-8 * scale
        sub = np.full(len(x), s)
        f = -prob.beta[s] * fd_lap(piece.u, x, t)
        if geom.is_spacetime:
            assert np.max(np.abs(piece.dt(x, t) - fd_dt(piece.u, x, t))) <= 1e-8 * scale
            f = f + fd_dt(piece.u, x, t)
        assert np.max(np.abs(prob.source(x, t, sub) - f)) <= 1e-8 * scale * max(prob.beta)


@pytest.mark.parametrize("eid,kw", CASES)
def test_interface_data(eid, kw):
    prob = example(eid, **kw).problem
    geom = prob.geom
    rng = np.random.default_rng(100 + eid)
    for label, iface in enumerate(geom.interfaces):
        x, t = iface.sample(rng, 1000, geom.box, geom.time_horizon)
        n = iface.normal(x, t)
        inner, outer = geom.adjacent(label)
        pi, po = prob.pieces[inner], prob.pieces[outer]
        assert np.allclose(prob.jump(x, t, label), pi.u(x, t) - po.u(x, t), rtol=0, atol=1e-12)
        g2 = (prob.beta[inner] * np.sum(fd_grad(pi.u, x, t) * n, axis=1)
              - prob.beta[outer] * np.sum(fd_grad(po.u, x, t) * n, axis=1))
        scale = max(1.0, np.abs(g2).max())
        assert np.max(np.abs(prob.flux_jump(x, t, n, label) - g2)) <= 1e-8 * scale


def test_example1_source_vanishes_at_origin():
    prob = example(1).problem
    assert prob.source(np.zeros((1, 2)), None, np.array([0]))[0] == 0.0


def test_example2_jump_value():
    prob = example(2).problem
    assert prob.jump(np.array([[0.75, 0.0, 0.0]]), None, 0)[0] == pytest.approx(5 * math.exp(0.5625) + 20 - 7.5, rel=1e-14)


def test_example5_initial_value_at_origin():
    prob = example(5).problem
    assert prob.initial(np.zeros((1, 2)), np.array([0]))[0] == pytest.approx(3.5)


def test_example4_jump_data_closed_form():
    d = 5
    prob = example(4, d=d, beta=(2.0, 3.0)).problem
    rng = np.random.default_rng(0)
    x = rng.uniform(size=(50, d))
    x[:, 0] = 0.5
    n = np.tile(np.eye(d)[0], (50, 1))
    assert np.allclose(prob.jump(x, None, 0), np.sum(x**2, axis=1) / d - x.sum(axis=1) / d)
    assert np.allclose(prob.flux_jump(x, None, n, 0), 2.0 * (2 * 0.5 / d) - 3.0 * (1 / d))


def test_table_settings():
    s = example(1)
    assert (s.m, s.plan.total, s.ranges[0], s.problem.beta) == (320, 5000, (1.6, 0.7), (1.0, 10.0))
    s = example(2)
    assert (s.m, s.plan.total, s.ranges[0], s.problem.beta) == (640, 10000, (2.54, 0.33), (1.0, 100.0))
    s = example(3)
    assert s.ranges == ((1.1, 1.1), (0.7, 0.7), (0.3, 0.3), (1.0, 1.0))
    assert s.problem.beta == (1.0, 2.0, 3.0, 4.0)
    s = example(4)
    assert (s.m, s.ranges[0], s.error_rule.kind, s.error_rule.n_samples) == (1800, (0.01, 0.01), "mc", 10_000)
    assert example(5).ranges[0] == (0.6, 0.6) and example(6).ranges[0] == (1.0, 1.0)
    mixed = example(1, formulation="mixed")
    assert mixed.ranges[0] == (1.0, 1.1) and mixed.flux_ranges == (0.7, 2.1)


def test_table2_ranges_follow_beta():
    assert example(1, beta=(1, 1e4)).ranges[0] == (1.8, 1.3)
    assert example(1, beta=(1e4, 1e-4)).ranges[0] == (1.0, 1.8)


def test_settings_echo():
    s = example(5).settings()
    assert s["m"] == 320 and s["N"] == 5000


def test_bad_requests():
    with pytest.raises(UnknownExample):
        example(7)
    with pytest.raises(ConfigError):
        example(2, formulation="mixed")
    with pytest.raises(ConfigError):
        example(1, d=3)
    with pytest.raises(ConfigError):
        example(4, N=100)
    with pytest.raises(ConfigError):
        example(1, beta=(1.0, -1.0))
