import numpy as np
import pytest

from qlaturb.lattice import (
    CouplingParams,
    Grid,
    SpinorField,
    collide,
    evolve_u,
    interleave,
    load_state,
    potential_rotate,
    save_state,
    step,
    stream,
)


def structured_field(grid, seed=0, scale=1.0):
    """Random smooth wave function loaded as a properly structured spinor."""
    rng = np.random.default_rng(seed)
    noise = rng.normal(size=(grid.L, grid.L)) + 1j * rng.normal(size=(grid.L, grid.L))
    k = np.fft.fftfreq(grid.L)
    KX, KY = np.meshgrid(k, k, indexing="ij")
    psi = np.fft.ifft2(np.fft.fft2(noise) * np.exp(-200 * (KX**2 + KY**2)))
    psi *= scale / np.abs(psi).max()
    return SpinorField.from_wavefunction(grid, psi)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(3)
    with pytest.raises(ValueError):
        Grid(16, dx=0.0)
    g = Grid(16, dx=0.25)
    assert g.dt == 0.25 * 0.25
    assert g.box_size == 4.0


def test_collide_single_site():
    g = Grid(4)
    f = SpinorField(g, np.zeros((4, 4), complex), np.zeros((4, 4), complex))
    f.q0[0, 0] = 1.0
    collide(f)
    assert f.q0[0, 0] == pytest.approx(0.5 * (1 - 1j))
    assert f.q1[0, 0] == pytest.approx(0.5 * (1 + 1j))


def test_collide_squared_is_swap():
    g = Grid(4)
    a, b = 0.3, -0.8
    f = SpinorField(g, np.full((4, 4), a, complex), np.full((4, 4), 1j * b, complex))
    collide(collide(f))
    np.testing.assert_allclose(f.q0, 1j * b, atol=1e-15)
    np.testing.assert_allclose(f.q1, a, atol=1e-15)


def test_collide_fourth_power_is_identity():
    g = Grid(8)
    f = structured_field(g, seed=1)
    q0, q1 = f.q0.copy(), f.q1.copy()
    for _ in range(4):
        collide(f)
    np.testing.assert_allclose(f.q0, q0, atol=1e-15)
    np.testing.assert_allclose(f.q1, q1, atol=1e-15)


def test_stream_roundtrip_bit_exact():
    g = Grid(16)
    f = structured_field(g, seed=2)
    q0 = f.q0.copy()
    stream(f, axis=0, sign=1, component=0)
    stream(f, axis=0, sign=-1, component=0)
    assert np.array_equal(f.q0, q0)
    stream(f, axis=1, sign=-1, component=0)
    stream(f, axis=1, sign=1, component=0)
    assert np.array_equal(f.q0, q0)


def test_stream_moves_delta():
    g = Grid(8)
    f = SpinorField(g, np.zeros((8, 8), complex), np.zeros((8, 8), complex))
    f.q0[3, 5] = 1.0
    stream(f, axis=0, sign=1, component=0)
    assert f.q0[4, 5] == 1.0 and f.q0[3, 5] == 0.0
    assert np.count_nonzero(f.q0) == 1
    assert np.count_nonzero(f.q1) == 0


def test_stream_periodic_wrap():
    g = Grid(8)
    f = SpinorField(g, np.zeros((8, 8), complex), np.zeros((8, 8), complex))
    f.q0[7, 0] = 1.0
    stream(f, axis=0, sign=1, component=0)
    assert f.q0[0, 0] == 1.0


def test_stream_leaves_other_component():
    g = Grid(8)
    f = structured_field(g, seed=3)
    q1 = f.q1.copy()
    stream(f, axis=1, sign=1, component=0)
    assert np.array_equal(f.q1, q1)


def test_stream_rejects_bad_arguments():
    g = Grid(8)
    f = structured_field(g)
    for kwargs in ({"axis": 2, "sign": 1, "component": 0},
                   {"axis": 0, "sign": 2, "component": 0},
                   {"axis": 0, "sign": 1, "component": 3}):
        with pytest.raises(ValueError):
            stream(f, **kwargs)


def test_interleave_uniform_field_recovered():
    # shifts are trivial on a uniform field, so two interleaves apply C^4 = 1
    g = Grid(8)
    f = SpinorField.uniform(g, 0.7 + 0.2j)
    q0, q1 = f.q0.copy(), f.q1.copy()
    interleave(f, 0, 0)
    interleave(f, 0, 0)
    np.testing.assert_allclose(f.q0, q0, atol=1e-15)
    np.testing.assert_allclose(f.q1, q1, atol=1e-15)


def test_interleave_preserves_norm():
    g = Grid(32)
    f = structured_field(g, seed=4)
    n0 = f.norm()
    interleave(f, 0, 0)
    interleave(f, 1, 1)
    assert abs(f.norm() / n0 - 1) < 1e-13


def test_interleave_pair_matches_half_laplacian_phase():
    # one kinetic sweep rotates a plane wave at about half the -k^2 step rate
    L = 128
    g = Grid(L)
    k = 2 * np.pi * 2 / L
    x = np.arange(L)
    psi = np.exp(1j * k * x)[:, None] * np.ones((1, L))
    f = SpinorField.from_wavefunction(g, psi)
    evolve_u(f, 0)
    amp = (psi.conj() * f.psi).sum() / (np.abs(psi) ** 2).sum()
    phase = np.angle(amp)
    # the single sweep carries an O(k^3) error that the U1 U0 pair cancels
    assert abs(phase - (-0.5 * k * k)) < 2.0 * k**3


def test_evolve_u_preserves_structure():
    g = Grid(32)
    f = structured_field(g, seed=5)
    evolve_u(f, 0)
    evolve_u(f, 1)
    scale = np.abs(f.q0).max()
    assert np.abs(f.q0.imag).max() <= 1e-14 * scale
    assert np.abs(f.q1.real).max() <= 1e-14 * scale


def test_potential_rotate_zero_is_identity():
    g = Grid(16)
    f = structured_field(g, seed=6)
    q0, q1 = f.q0.copy(), f.q1.copy()
    potential_rotate(f, np.zeros((16, 16)), scale=0.5)
    assert np.array_equal(f.q0, q0)
    assert np.array_equal(f.q1, q1)


def test_potential_rotate_componentwise_formula():
    g = Grid(4, dx=0.5)
    a, b, v = 0.6, -0.4, 2.0
    f = SpinorField(g, np.full((4, 4), a, complex), np.full((4, 4), 1j * b, complex))
    potential_rotate(f, np.full((4, 4), v), scale=1.0)
    ang = v * g.dt
    np.testing.assert_allclose(f.q0, a * np.cos(ang) + b * np.sin(ang), atol=1e-15)
    np.testing.assert_allclose(f.q1, 1j * (-a * np.sin(ang) + b * np.cos(ang)), atol=1e-15)


def test_potential_rotate_keeps_site_density():
    g = Grid(32, dx=0.3)
    f = structured_field(g, seed=7)
    rho0 = np.abs(f.psi) ** 2
    rng = np.random.default_rng(8)
    potential_rotate(f, rng.uniform(0, 3, size=(32, 32)), scale=0.5)
    np.testing.assert_allclose(np.abs(f.psi) ** 2, rho0, rtol=0, atol=1e-13 * rho0.max())


def test_potential_rotate_rejects_nonfinite():
    g = Grid(8)
    f = structured_field(g, seed=9)
    V = np.zeros((8, 8))
    V[2, 6] = np.nan
    with pytest.raises(ValueError, match=r"\(2,6\)"):
        potential_rotate(f, V)


def test_step_uniform_is_global_phase():
    g = Grid(16, dx=0.2)
    c = 0.8
    f = SpinorField.uniform(g, c)
    params = CouplingParams(3.0)
    nsteps = 25
    for _ in range(nsteps):
        step(f, params)
    expected = c * np.exp(-1j * params.g * c * c * g.dt * nsteps)
    np.testing.assert_allclose(f.psi, expected, atol=1e-13)
    assert f.t == nsteps


def test_step_free_dispersion():
    # mode m=2 on 128^2 rotates at -k^2 per step to within 2%
    L = 128
    g = Grid(L)
    k = 2 * np.pi * 2 / L
    x = np.arange(L)
    psi = np.exp(1j * k * x)[:, None] * np.ones((1, L))
    f = SpinorField.from_wavefunction(g, psi)
    params = CouplingParams(0.0)
    nsteps = 60
    for _ in range(nsteps):
        step(f, params)
    amp = (psi.conj() * f.psi).sum() / (np.abs(psi) ** 2).sum()
    rate = np.angle(amp) / nsteps
    assert abs(rate / (-k * k) - 1) < 0.02
    # a small O(k^4) share leaks into the conjugate spinor combination
    assert abs(abs(amp) - 1) < 1e-6


def test_step_conservation_properties():
    g = Grid(32, dx=0.1)
    f = structured_field(g, seed=10)
    params = CouplingParams(1.5)
    n0, d0 = f.norm(), f.mean_density()
    for _ in range(200):
        step(f, params)
    scale = np.abs(f.q0).max()
    assert abs(f.norm() / n0 - 1) < 1e-13
    assert abs(f.mean_density() / d0 - 1) < 1e-13
    assert np.abs(f.q0.imag).max() <= 1e-13 * scale
    assert np.abs(f.q1.real).max() <= 1e-13 * scale


def test_state_roundtrip_bit_exact(tmp_path):
    g = Grid(16, dx=0.25)
    f = structured_field(g, seed=11)
    f.t = 42
    path = tmp_path / "state.qst"
    save_state(f, 2.5, path)
    loaded, g_loaded = load_state(path)
    assert g_loaded == 2.5
    assert loaded.t == 42
    assert loaded.grid == f.grid
    assert np.array_equal(loaded.q0, f.q0)
    assert np.array_equal(loaded.q1, f.q1)


def test_state_rejects_corrupted_header(tmp_path):
    g = Grid(8)
    f = structured_field(g, seed=12)
    path = tmp_path / "state.qst"
    save_state(f, 1.0, path)
    blob = path.read_bytes()
    path.write_bytes(b"garbage" + blob[7:])
    with pytest.raises(ValueError, match="header"):
        load_state(path)


def test_state_rejects_version_mismatch(tmp_path):
    path = tmp_path / "state.qst"
    payload = b"\x00" * (2 * 8 * 8 * 16)
    path.write_bytes(b'{"format_version": 99, "L": 8, "dx": 1.0, "g": 0.0, "t": 0}\n' + payload)
    with pytest.raises(ValueError, match="version"):
        load_state(path)


def test_state_rejects_truncated_payload(tmp_path):
    g = Grid(8)
    f = structured_field(g, seed=13)
    path = tmp_path / "state.qst"
    save_state(f, 1.0, path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-16])
    with pytest.raises(ValueError, match="payload"):
        load_state(path)
