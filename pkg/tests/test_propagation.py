import numpy as np
import pytest

from cfoas.config import SystemConfig, Topology
from cfoas.propagation import large_scale_matrix, path_loss, path_loss_branch, reference_loss

CFG = SystemConfig()


@pytest.mark.parametrize("args,expected,tol", [
    ((2000.0, 12.0, 1.7), 142.66, 0.01),
    ((1900.0, 15.0, 1.65), 140.7, 0.05),
])
def test_reference_loss(args, expected, tol):
    assert reference_loss(*args) == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize("h_ue", [0.0, 1.0, 3.3])
def test_reference_loss_unit_frequency(h_ue):
    assert reference_loss(1.0, 1.0, h_ue) == pytest.approx(45.5 + 0.7 * h_ue)


def test_path_loss_at_one_km():
    assert path_loss(1.0, CFG) == pytest.approx(-reference_loss(2000.0, 12.0, 1.7))
    assert path_loss(1.0, CFG) == pytest.approx(-142.66, abs=0.01)


def test_flat_below_d0():
    assert path_loss(0.005, CFG) == path_loss(0.01, CFG)
    assert path_loss(0.0, CFG) == path_loss(0.01, CFG)


@pytest.mark.parametrize("edge", [0.01, 0.05])
def test_continuity(edge):
    assert abs(path_loss(edge * (1 - 1e-13), CFG) - path_loss(edge * (1 + 1e-13), CFG)) < 1e-10


def test_non_increasing():
    d = np.linspace(0.0, 2.0, 20001)
    assert np.all(np.diff(path_loss(d, CFG)) <= 1e-12)


def test_branches():
    assert path_loss_branch(0.001, CFG).startswith("flat")
    assert path_loss_branch(0.02, CFG).startswith("middle")
    assert path_loss_branch(0.2, CFG).startswith("far")


def _topology(rng, m=30, k=4):
    return Topology(rng.uniform(-1, 1, (m, 2)), rng.uniform(-1, 1, (k, 2)))


def test_no_shadowing_exact(rng):
    topo = _topology(rng)
    ls = large_scale_matrix(topo, CFG.replace(shadow_std=0.0), rng)
    assert np.array_equal(ls.beta, 10.0 ** (path_loss(topo.distances(), CFG) / 10.0))


def test_beta_assembly_and_positive(rng):
    ls = large_scale_matrix(_topology(rng), CFG, rng)
    assert np.all(ls.beta > 0) and np.all(np.isfinite(ls.beta))
    np.testing.assert_allclose(ls.beta, 10 ** ((ls.pathloss_db + ls.shadow_db) / 10), rtol=1e-12)


def test_shadowing_std():
    topo = Topology(np.zeros((1000, 2)), np.full((100, 2), 0.5))
    ls = large_scale_matrix(topo, CFG, np.random.default_rng(1))
    assert ls.shadow_db.std() == pytest.approx(8.0, rel=0.01)


def test_monotone_far_field(rng):
    topo = Topology(np.array([[0.1, 0.0], [0.4, 0.0]]), np.zeros((1, 2)))
    beta = large_scale_matrix(topo, CFG.replace(shadow_std=0.0), rng).beta
    assert beta[0, 0] > beta[1, 0]


def test_deterministic_per_stream():
    topo = _topology(np.random.default_rng(0))
    a = large_scale_matrix(topo, CFG, np.random.default_rng(5)).beta
    b = large_scale_matrix(topo, CFG, np.random.default_rng(5)).beta
    assert np.array_equal(a, b)
