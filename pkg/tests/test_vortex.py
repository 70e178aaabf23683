import numpy as np
import pytest

from qlaturb.initial import GaussianCloudParams, VortexSpec, four_vortex_lattice, gaussian_vortex_state
from qlaturb.lattice import Grid
from qlaturb.vortex import (
    VortexSet,
    cluster_sizes,
    detect_vortices,
    phase_field,
    plaquette_winding,
    vortex_count_series,
    vortex_rows,
)


def test_phase_field_conventions():
    psi = np.full((4, 4), 2.0, dtype=complex)
    np.testing.assert_allclose(phase_field(psi), 0.0, atol=0)
    psi = np.full((4, 4), np.exp(1j * np.pi / 3))
    np.testing.assert_allclose(phase_field(psi), np.pi / 3, atol=1e-15)
    assert phase_field(np.array([-1.0 + 0j]))[0] == pytest.approx(np.pi)


def test_uniform_phase_no_detections():
    psi = np.exp(1j * 0.4) * np.ones((16, 16))
    vs = detect_vortices(psi)
    assert vs.count == 0
    assert vs.total_winding == 0


def test_single_pair_detected_with_signs():
    grid = Grid(64)
    cloud = GaussianCloudParams(h=1.0, a=0.04, w_g=0.0)
    psi = gaussian_vortex_state(grid, cloud,
                                [VortexSpec(16.5, 32.5, 1), VortexSpec(48.5, 32.5, -1)])
    vs = detect_vortices(psi, t=3)
    assert vs.t == 3
    assert vs.count == 2
    found = {(i, j): w for i, j, w in zip(vs.i, vs.j, vs.w)}
    assert found[(16, 32)] == 1
    assert found[(48, 32)] == -1


def test_phase_sweeps_two_pi_around_core():
    # raw plaquette sum before rounding is within 1e-6 of 2 pi w
    grid = Grid(64)
    cloud = GaussianCloudParams(h=1.0, a=0.04, w_g=0.0)
    psi = gaussian_vortex_state(grid, cloud,
                                [VortexSpec(16.5, 32.5, 1), VortexSpec(48.5, 32.5, -1)])
    th = phase_field(psi)

    def wrap(d):
        w = (d + np.pi) % (2 * np.pi) - np.pi
        w[w == -np.pi] = np.pi
        return w

    tx = np.roll(th, -1, 0)
    txy = np.roll(tx, -1, 1)
    ty = np.roll(th, -1, 1)
    total = wrap(tx - th) + wrap(txy - tx) + wrap(ty - txy) + wrap(th - ty)
    assert abs(total[16, 32] - 2 * np.pi) < 1e-6
    assert abs(total[48, 32] + 2 * np.pi) < 1e-6


def test_total_winding_is_always_zero():
    rng = np.random.default_rng(0)
    psi = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    w = plaquette_winding(psi)
    assert w.sum() == 0
    assert np.abs(w).sum() > 0  # a rough random field does carry windings


def test_translation_equivariance():
    grid = Grid(64)
    cloud = GaussianCloudParams(h=1.0, a=0.04, w_g=0.0)
    psi = gaussian_vortex_state(grid, cloud,
                                [VortexSpec(16.5, 32.5, 1), VortexSpec(48.5, 32.5, -1)])
    vs = detect_vortices(psi)
    shifted = np.roll(psi, (5, 11), axis=(0, 1))
    vs2 = detect_vortices(shifted)
    pos = sorted(((i + 5) % 64, (j + 11) % 64, w) for i, j, w in zip(vs.i, vs.j, vs.w))
    pos2 = sorted(zip(vs2.i, vs2.j, vs2.w))
    assert pos == [tuple(map(int, p)) for p in pos2]


def test_detections_ordered_and_rendered():
    grid = Grid(64)
    cloud = GaussianCloudParams(h=1.0, a=0.04, w_g=0.0)
    psi = gaussian_vortex_state(grid, cloud, four_vortex_lattice(grid, 16, 1))
    vs = detect_vortices(psi)
    order = list(zip(vs.i, vs.j))
    assert order == sorted(order)
    rows = list(vortex_rows(vs))
    assert len(rows) == vs.count
    assert all(len(r.split(",")) == 3 for r in rows)


def test_vortex_count_series():
    sets = [VortexSet(0), detect_vortices(np.ones((8, 8), complex), t=5)]
    rows = vortex_count_series(sets)
    assert rows == [(0, 0, 0), (5, 0, 0)]


def test_cluster_sizes_pairs_and_singletons():
    vs = VortexSet(0,
                   np.array([4, 5, 20, 40]),
                   np.array([4, 4, 20, 40]),
                   np.array([1, 1, -1, -1]))
    assert cluster_sizes(vs, L=64, radius=3) == [1, 1, 2]
    # periodic wrap: 63 and 0 are one apart
    vs2 = VortexSet(0, np.array([0, 63]), np.array([0, 0]), np.array([1, -1]))
    assert cluster_sizes(vs2, L=64, radius=2) == [2]
