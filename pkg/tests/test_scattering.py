import numpy as np
import pytest

from mrc import geometry, oracle, scattering
from mrc.errors import ConfigurationError, DomainError
from mrc.lsq import normalized_norm


def _problem(shape="circle:1", k=1.0, deg=0.0, m=720):
    d = scattering.direction_2d(np.radians(deg))
    return scattering.ScatteringProblem(geometry.parse_shape(shape), k, d, m)


def test_residual_additivity_invariant():
    # r_min must be the norm of u0 plus the fitted field on the nodes
    pr = _problem("kite")
    rep = scattering.random_mrc(pr, 4, 3, 1e-6, N_max=5, rng=np.random.default_rng(0))
    total = pr.u0 + rep.expansion.evaluate(pr.nodes)
    assert rep.r_min == pytest.approx(normalized_norm(total), rel=1e-9)
    assert len(rep.history) == rep.iterations == 5
    assert rep.expansion.n_sources == 20


def test_random_mrc_is_seeded():
    pr = _problem("ellipse:2,1", k=5.0)
    a = scattering.random_mrc(pr, 2, 5, 1e-6, N_max=4, rng=np.random.default_rng(42))
    b = scattering.random_mrc(pr, 2, 5, 1e-6, N_max=4, rng=np.random.default_rng(42))
    assert a.history == b.history
    assert np.array_equal(a.expansion.sources, b.expansion.sources)


def test_random_history_is_nonincreasing():
    pr = _problem("triangle")
    rep = scattering.random_mrc(pr, 1, 5, 1e-6, N_max=30, rng=np.random.default_rng(1))
    h = np.array(rep.history)
    assert np.all(np.diff(h) <= 1e-12)


def test_multipoint_matches_exact_circle_solution():
    pr = _problem("circle:1", k=1.0)
    rep = scattering.multipoint_mrc(pr, [[0.0, 0.0]], 12)
    c = oracle.CircleScatterer(1.0, 1.0, 0.0)
    far = np.stack([2 * np.cos(np.linspace(0, 6, 9)), 2 * np.sin(np.linspace(0, 6, 9))], axis=1)
    assert rep.r_min < 1e-9
    assert np.max(np.abs(rep.expansion.evaluate(far) - oracle.circle_scattered_field(c, far))) < 1e-9
    th = np.linspace(0, 2 * np.pi, 7)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    assert np.max(np.abs(rep.expansion.far_field(dirs) - oracle.circle_far_field(c, th))) < 1e-9


def test_far_field_matches_large_radius_asymptotics():
    pr = _problem("kite", k=2.0)
    rep = scattering.multipoint_mrc(pr, [[0.1, 0.2], [-0.3, -0.1]], 4)
    d = np.array([0.6, 0.8])
    R = 2e4
    u = rep.expansion.evaluate(R * d)[0]
    approx = np.exp(1j * 2.0 * R) / np.sqrt(R) * rep.expansion.far_field(d)[0]
    assert abs(u - approx) / abs(approx) < 1e-3


def test_3d_far_field_matches_large_radius_asymptotics():
    d0 = scattering.direction_3d(0.0, np.pi / 2)
    pr = scattering.ScatteringProblem(geometry.parse_shape("sphere:1"), 1.5, d0, 200)
    rep = scattering.multipoint_mrc(pr, [[0.1, 0.0, 0.2]], 3)
    d = np.array([0.0, 0.6, 0.8])
    R = 2e4
    u = rep.expansion.evaluate(R * d)[0]
    approx = np.exp(1j * 1.5 * R) / R * rep.expansion.far_field(d)[0]
    assert abs(u - approx) / abs(approx) < 1e-3


@pytest.mark.parametrize("dim", [2, 3])
def test_text_record_round_trip(dim):
    rng = np.random.default_rng(dim)
    L = 3
    nb = scattering.n_basis(dim, L)
    e = scattering.Expansion(dim, 1.25, L, rng.normal(size=(3, dim)), rng.normal(size=(3, nb)) + 1j)
    back = scattering.Expansion.from_text(e.to_text())
    assert back.k == e.k and back.L == e.L
    assert np.array_equal(back.sources, e.sources)
    assert np.array_equal(back.coeffs, e.coeffs)


def test_text_record_rejects_other_versions():
    e = scattering.Expansion(2, 1.0, 1)
    text = e.to_text().replace("v1", "v9", 1)
    with pytest.raises(ValueError):
        scattering.Expansion.from_text(text)


def test_interior_evaluation_and_bad_inputs():
    pr = _problem("circle:1")
    rep = scattering.multipoint_mrc(pr, [[0.0, 0.0]], 5)
    with pytest.raises(DomainError):
        scattering.eval_scattered(rep.expansion, [[0.5, 0.0]])
    with pytest.raises(DomainError):
        scattering.far_field(rep.expansion, [[2.0, 0.0]])
    with pytest.raises(ConfigurationError):
        scattering.multipoint_mrc(pr, [[2.0, 0.0]], 5)
    with pytest.raises(ConfigurationError):
        scattering.ScatteringProblem(geometry.parse_shape("circle:1"), -1.0, [1.0, 0.0], 10)
    with pytest.raises(ConfigurationError):
        scattering.ScatteringProblem(geometry.parse_shape("circle:1"), 1.0, [1.0, 1.0], 10)


def test_warm_start_rejects_exterior_sources():
    pr = _problem("kite")
    with pytest.raises(ConfigurationError):
        scattering.random_mrc(pr, 1, 5, 1e-4, N_max=2, initial_sources=[[5.0, 5.0]])


def test_optimal_mrc_circle_single_iteration():
    pr = _problem("circle:1")
    rep = scattering.optimal_mrc(pr, 5, 2e-3, N_max=5, rng=np.random.default_rng(0))
    assert rep.converged and rep.iterations == 1
    assert np.linalg.norm(rep.expansion.sources[0]) < 1e-2
    # far field is the sum of per-round increments
    dirs = np.array([[1.0, 0.0], [0.0, 1.0]])
    total = sum(inc.far_field(dirs) for inc in rep.far_field_increments)
    assert np.allclose(total, rep.expansion.far_field(dirs))
