import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrnn import example
from lrnn.assembly import (
    RowTag,
    Weights,
    assemble_elliptic,
    assemble_mixed,
    assemble_spacetime,
    read_matrix,
    residual,
    write_matrix,
    write_system,
)
from lrnn.calculus import FdConfig, analytic_derivatives
from lrnn.errors import DimensionMismatch, MissingInitialCondition, UnsupportedDimension
from lrnn.problems import Piece, ProblemDefinition
from lrnn.randnet import build_network, eval_basis
from lrnn.runner import assemble, build_networks
from lrnn.sampling import sample_collocation


def _system(spec, seed=0, gamma=Weights()):
    nets, flux = build_networks(spec, seed)
    pts = sample_collocation(spec.problem.geom, spec.plan.with_seed(seed))
    return assemble(spec, nets, flux, pts, FdConfig(), gamma), nets, flux, pts


@pytest.fixture(scope="module")
def ex1_system():
    return _system(example(1))


def test_strong_shape(ex1_system):
    sys = ex1_system[0]
    assert sys.shape == (3000 + 2 * 1000 + 1000, 640)
    assert [len(sys.rows(t)) for t in (RowTag.PDE, RowTag.JUMP, RowTag.FLUX_JUMP, RowTag.DIRICHLET)] == [3000, 1000, 1000, 1000]


def test_mixed_shape():
    sys = _system(example(1, formulation="mixed"), gamma=Weights())[0]
    assert sys.shape == (3 * 3000 + 2 * 1000 + 1000, 1920)


def test_spacetime_shape():
    sys = _system(example(5))[0]
    assert sys.shape == (3500 + 750 + 750 + 600 + 150, 640)
    assert len(sys.rows(RowTag.INITIAL)) == 150


def test_example2_and_3_shapes():
    assert _system(example(2, m=20))[0].shape == (6000 + 2 * 1000 + 3000, 40)
    assert _system(example(3, m=10))[0].shape == (3000 + 2 * 1500 + 500, 40)


def test_column_block_sparsity(ex1_system):
    sys, nets, _, pts = ex1_system
    M = sys.matrix
    pde = sys.rows(RowTag.PDE)
    c0, c1 = slice(0, 320), slice(320, 640)
    inner = pde[pts.interior_sub == 0]
    outer = pde[pts.interior_sub == 1]
    assert not M[inner, c1].any() and not M[outer, c0].any()
    d = sys.rows(RowTag.DIRICHLET)
    assert not M[d, c0].any()


def test_interface_rows_touch_adjacent_blocks_only():
    sys, nets, _, pts = _system(example(3, m=10))
    for tag in (RowTag.JUMP, RowTag.FLUX_JUMP):
        rows = sys.rows(tag)
        for label in range(3):
            r = rows[pts.iface_label == label]
            for s in range(4):
                block = sys.matrix[np.ix_(r, range(10 * s, 10 * s + 10))]
                assert block.any() == (s in (label, label + 1))


@pytest.mark.parametrize("c", [0.0, 0.5, 3.0])
def test_weight_scaling_is_exact(c):
    spec = example(1, m=20, N=400)
    ref = _system(spec, gamma=Weights.uniform(1.0))[0]
    sys = _system(spec, gamma=Weights(jump=c, flux=1.0, dirichlet=1.0))[0]
    rows = ref.rows(RowTag.JUMP)
    other = np.setdiff1d(np.arange(ref.shape[0]), rows)
    assert np.array_equal(sys.matrix[rows], c * ref.matrix[rows])
    assert np.array_equal(sys.rhs[rows], c * ref.rhs[rows])
    assert np.array_equal(sys.matrix[other], ref.matrix[other])


def test_zero_problem_has_zero_rhs():
    spec = example(1, m=8, N=200)
    zero = lambda x, t=None: np.zeros(len(x))  # noqa: E731
    zgrad = lambda x, t=None: np.zeros_like(x)  # noqa: E731
    prob = ProblemDefinition(spec.problem.geom, (1.0, 10.0), (Piece(zero, zgrad, zero),) * 2)
    nets, _ = build_networks(spec, 0)
    pts = sample_collocation(prob.geom, spec.plan)
    sys = assemble_elliptic(prob, nets, pts)
    assert not sys.rhs.any()
    r = residual(sys, np.zeros(16))
    assert all(v == 0.0 for v in r.values())


def test_single_point_pde_row():
    spec = example(1, m=1, N=20)
    nets, _ = build_networks(spec, 0)
    pts = sample_collocation(spec.problem.geom, spec.plan)
    sys = assemble_elliptic(spec.problem, nets, pts)
    i = 0
    s = pts.interior_sub[i]
    x = pts.interior_x[i:i + 1]
    h = 5e-4
    net = nets[s]
    lap = sum((eval_basis(net, x + h * e) - 2 * eval_basis(net, x) + eval_basis(net, x - h * e)) / h**2 for e in np.eye(2))
    assert sys.matrix[sys.rows(RowTag.PDE)[i], s] == pytest.approx(-spec.problem.beta[s] * lap[0, 0], rel=1e-12)


def test_operators_reproduce_data_for_basis_solution():
    # exact solution inside the basis span: data from analytic derivatives,
    # rows from finite differences, so residuals sit at FD truncation level
    spec = example(1, m=12, N=600)
    geom = spec.problem.geom
    nets, _ = build_networks(spec, 3)
    rng = np.random.default_rng(0)
    alpha = [rng.normal(size=12) for _ in nets]

    def piece(s):
        net, a = nets[s], alpha[s]
        return Piece(
            lambda x, t=None: eval_basis(net, x) @ a,
            lambda x, t=None: np.stack([g @ a for g in analytic_derivatives(net, x)[0]], axis=1),
            lambda x, t=None: analytic_derivatives(net, x)[1].sum(axis=0) @ a,
        )

    prob = ProblemDefinition(geom, (1.0, 10.0), (piece(0), piece(1)))
    pts = sample_collocation(geom, spec.plan)
    sys = assemble_elliptic(prob, nets, pts)
    r = residual(sys, np.concatenate(alpha))
    assert max(r.values()) <= 1e-5


def test_mixed_zero_guess_residual_is_data_rms():
    spec = example(1, m=6, N=300, formulation="mixed")
    sys, nets, flux, pts = _system(spec)
    X = np.zeros(sys.shape[1])
    r = residual(sys, X)
    for tag in (RowTag.MIXED_DIV, RowTag.JUMP, RowTag.DIRICHLET):
        rows = sys.rows(tag)
        expected = np.sqrt(np.mean((sys.rhs[rows] / sys.row_weights[rows]) ** 2))
        assert r[tag.name] == pytest.approx(expected)


def test_mixed_gradient_rows_vanish_for_consistent_flux():
    # p - beta grad(u) = 0: the u-columns carry -beta times the basis gradient
    spec = example(1, m=6, N=300, formulation="mixed")
    sys, nets, flux, pts = _system(spec)
    gx = sys.rows(RowTag.MIXED_GRAD_X)
    assert not sys.rhs[gx].any()
    block = sys.matrix[gx]
    sub = pts.interior_sub
    beta = np.asarray(spec.problem.beta)[sub]
    x = pts.interior_x
    for s in (0, 1):
        rows = sub == s
        grad, _ = analytic_derivatives(nets[s], x[rows])
        assert np.allclose(block[rows][:, 6 * s:6 * s + 6], -beta[rows][:, None] * grad[0], atol=1e-6)


def test_wrong_assembler_for_problem_kind():
    spec5 = example(5, m=4, N=200)
    nets, _ = build_networks(spec5, 0)
    pts = sample_collocation(spec5.problem.geom, spec5.plan)
    with pytest.raises(DimensionMismatch):
        assemble_elliptic(spec5.problem, nets, pts)
    spec1 = example(1, m=4, N=200)
    nets1, _ = build_networks(spec1, 0)
    pts1 = sample_collocation(spec1.problem.geom, spec1.plan)
    with pytest.raises(MissingInitialCondition):
        assemble_spacetime(spec1.problem, nets1, pts1)
    spec2 = example(2, m=4, N=200)
    nets2, _ = build_networks(spec2, 0)
    pts2 = sample_collocation(spec2.problem.geom, spec2.plan)
    flux = tuple((build_network(0, 3, [4], 1, 1), build_network(1, 3, [4], 1, 1)) for _ in range(2))
    with pytest.raises(UnsupportedDimension):
        assemble_mixed(spec2.problem, nets2, flux, pts2)


def test_residual_on_consistent_square_system():
    spec = example(1, m=4, N=200)
    sys = _system(spec)[0]
    X = np.random.default_rng(0).normal(size=8)
    r = sys.matrix @ X - sys.rhs
    res = residual(sys, X)
    rows = sys.rows(RowTag.FLUX_JUMP)
    assert res["FLUX_JUMP"] == pytest.approx(np.sqrt(np.mean((r[rows] / 50.0) ** 2)))


def test_zero_weight_block_reports_nan():
    sys = _system(example(1, m=4, N=200), gamma=Weights(dirichlet=0.0))[0]
    assert np.isnan(residual(sys, np.zeros(8))["DIRICHLET"])


def test_binary_round_trip(tmp_path):
    a = np.random.default_rng(0).normal(size=(7, 3))
    write_matrix(tmp_path / "m.bin", a)
    raw = (tmp_path / "m.bin").read_bytes()
    assert int.from_bytes(raw[:8], "little") == 7 and int.from_bytes(raw[8:16], "little") == 3
    assert np.array_equal(read_matrix(tmp_path / "m.bin"), a)


def test_write_system(tmp_path, ex1_system):
    sys = ex1_system[0]
    write_system(tmp_path / "s.bin", sys, rhs_path=tmp_path / "r.bin")
    assert np.array_equal(read_matrix(tmp_path / "s.bin"), sys.matrix)
    assert np.array_equal(read_matrix(tmp_path / "r.bin").ravel(), sys.rhs)


@settings(max_examples=10, deadline=None)
@given(st.integers(50, 400), st.integers(1, 30))
def test_shapes_follow_counts(n, m):
    spec = example(1, N=n, m=m)
    sys, _, _, pts = _system(spec)
    c = pts.counts()
    assert sys.shape == (c["interior"] + 2 * c["interface.0"] + c["boundary"], 2 * m)
