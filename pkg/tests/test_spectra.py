import numpy as np
import pytest

from qlaturb.diagnostics import energies, hydro_fields
from qlaturb.lattice import Grid
from qlaturb.spectra import (
    SpectrumRecord,
    fit_powerlaw,
    helmholtz_split,
    spectral_density,
    spectrum_record,
    vortex_qfield,
)


def random_q(grid, seed=0):
    rng = np.random.default_rng(seed)
    def mk():
        noise = rng.normal(size=(grid.L, grid.L))
        k = np.fft.fftfreq(grid.L)
        KX, KY = np.meshgrid(k, k, indexing="ij")
        return np.fft.ifft2(np.fft.fft2(noise) * np.exp(-50 * (KX**2 + KY**2))).real
    return mk(), mk()


def _smooth_scalar(L, seed):
    """Band-limited random scalar; Nyquist lines zeroed so spectral
    derivatives of the real field are exact."""
    rng = np.random.default_rng(seed)
    spec = np.fft.fft2(rng.normal(size=(L, L)))
    spec *= np.exp(-60 * np.add.outer(np.fft.fftfreq(L)**2, np.fft.fftfreq(L)**2))
    spec[L // 2, :] = 0
    spec[:, L // 2] = 0
    return np.fft.ifft2(spec).real


def test_pure_gradient_has_no_transverse_part():
    grid = Grid(32)
    phi = _smooth_scalar(32, seed=1)
    KX, KY = grid.wavenumbers()
    ph = np.fft.fft2(phi)
    qx = np.fft.ifft2(1j * KX * ph).real
    qy = np.fft.ifft2(1j * KY * ph).real
    _, (ihx, ihy) = helmholtz_split(np.fft.fft2(qx), np.fft.fft2(qy))
    scale = np.abs(np.fft.fft2(qx)).max()
    assert np.abs(ihx).max() <= 1e-12 * scale
    assert np.abs(ihy).max() <= 1e-12 * scale


def test_pure_solenoidal_has_no_longitudinal_part():
    grid = Grid(32)
    chi = _smooth_scalar(32, seed=2)
    KX, KY = grid.wavenumbers()
    ch = np.fft.fft2(chi)
    qx = np.fft.ifft2(1j * KY * ch).real
    qy = -np.fft.ifft2(1j * KX * ch).real
    (chx, chy), _ = helmholtz_split(np.fft.fft2(qx), np.fft.fft2(qy))
    chx[0, 0] = 0  # mean flow is assigned to the compressible side by design
    chy[0, 0] = 0
    scale = max(np.abs(np.fft.fft2(qx)).max(), 1e-30)
    assert np.abs(chx).max() <= 1e-12 * scale
    assert np.abs(chy).max() <= 1e-12 * scale


def test_split_recomposes_exactly_and_is_orthogonal():
    grid = Grid(64)
    qx, qy = random_q(grid, seed=3)
    qhx, qhy = np.fft.fft2(qx), np.fft.fft2(qy)
    (chx, chy), (ihx, ihy) = helmholtz_split(qhx, qhy)
    scale = np.abs(qhx).max()
    assert np.abs(chx + ihx - qhx).max() <= 1e-13 * scale
    assert np.abs(chy + ihy - qhy).max() <= 1e-13 * scale
    cross = (chx * ihx.conj() + chy * ihy.conj()).sum()
    total = (np.abs(qhx) ** 2 + np.abs(qhy) ** 2).sum()
    assert abs(cross) <= 1e-10 * total


def test_energy_consistency_with_diagnostics():
    grid = Grid(64, dx=0.2)
    rng = np.random.default_rng(4)
    noise = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    k = np.fft.fftfreq(64)
    KX, KY = np.meshgrid(k, k, indexing="ij")
    psi = 1.0 + 0.2 * np.fft.ifft2(np.fft.fft2(noise) * np.exp(-300 * (KX**2 + KY**2)))
    rec = energies(psi, 0.9, grid)
    h = hydro_fields(psi, grid)
    sr = spectrum_record(h.qx, h.qy, grid)
    assert sr.energy_ic + sr.energy_c == pytest.approx(rec.E_K, rel=1e-10)
    assert sr.energy_ic == pytest.approx(rec.E_IC, rel=1e-10)
    assert sr.energy_c == pytest.approx(rec.E_C, rel=1e-10)


def test_single_mode_lands_in_its_shell():
    L = 64
    grid = Grid(L, dx=0.5)
    x = np.arange(L) * grid.dx
    k7 = 2 * np.pi * 7 / grid.box_size
    qx = np.cos(k7 * x)[None, :] * np.ones((L, 1))  # k = (0, 7) modes
    qy = np.zeros((L, L))
    k_bins, eps = spectral_density(np.fft.fft2(qx), np.fft.fft2(qy), grid)
    assert eps[7] > 0
    mask = np.ones_like(eps, dtype=bool)
    mask[7] = False
    assert np.abs(eps[mask]).max() <= 1e-12 * eps[7]


def test_bin_sum_matches_energy():
    grid = Grid(64, dx=0.3)
    qx, qy = random_q(grid, seed=5)
    qhx, qhy = np.fft.fft2(qx), np.fft.fft2(qy)
    k_bins, eps = spectral_density(qhx, qhy, grid)
    k_u = 2 * np.pi / grid.box_size
    direct = 0.5 * ((qx**2 + qy**2).sum() * grid.cell_area)
    assert eps.sum() * k_u == pytest.approx(direct, rel=1e-12)


def test_isotropy_under_quarter_turn():
    grid = Grid(64)
    qx, qy = random_q(grid, seed=6)
    # rotate the plane and the vector components by 90 degrees
    rx = -np.rot90(qy, k=1, axes=(0, 1))
    ry = np.rot90(qx, k=1, axes=(0, 1))
    _, e1 = spectral_density(np.fft.fft2(qx), np.fft.fft2(qy), grid)
    _, e2 = spectral_density(np.fft.fft2(rx), np.fft.fft2(ry), grid)
    np.testing.assert_allclose(e1, e2, rtol=0, atol=1e-12 * e1.max())


def test_fit_exact_power_law():
    k = np.arange(0, 80, dtype=float)
    eps = np.zeros_like(k)
    eps[1:] = 2.7 * k[1:] ** -3.0
    rec = SpectrumRecord(0, k, eps, eps.copy(), 1.0)
    fit = fit_powerlaw(rec, "ic", 5, 60)
    assert fit.alpha == pytest.approx(-3.0, abs=1e-10)
    assert fit.stderr < 1e-10
    assert fit.n_excluded == 0


def test_fit_with_multiplicative_noise():
    rng = np.random.default_rng(7)
    k = np.arange(0, 200, dtype=float)
    sigma = 0.05
    eps = np.zeros_like(k)
    eps[1:] = k[1:] ** -3.0 * np.exp(sigma * rng.normal(size=199))
    rec = SpectrumRecord(0, k, eps, eps.copy(), 1.0)
    fit = fit_powerlaw(rec, "ic", 10, 150)
    assert abs(fit.alpha + 3.0) <= 3 * fit.stderr


def test_fit_excludes_and_counts_empty_bins():
    k = np.arange(0, 40, dtype=float)
    eps = np.zeros_like(k)
    eps[1:] = k[1:] ** -2.0
    eps[7] = 0.0
    eps[9] = 0.0
    rec = SpectrumRecord(0, k, eps, eps.copy(), 1.0)
    fit = fit_powerlaw(rec, "ic", 2, 20)
    assert fit.n_excluded == 2
    assert fit.alpha == pytest.approx(-2.0, abs=1e-12)


def test_fit_rejections():
    k = np.arange(0, 10, dtype=float)
    eps = np.ones_like(k)
    rec = SpectrumRecord(0, k, eps, eps, 1.0)
    with pytest.raises(ValueError, match="usable bins"):
        fit_powerlaw(rec, "ic", 6, 8)
    with pytest.raises(ValueError, match="k_min < k_max"):
        fit_powerlaw(rec, "ic", 8, 6)
    with pytest.raises(ValueError, match="which"):
        fit_powerlaw(rec, "both", 1, 8)


def test_vortex_qfield_is_transverse():
    grid = Grid(128, dx=0.1)
    qx, qy = vortex_qfield(grid, core_scale=0.04, winding=1)
    rec = spectrum_record(qx, qy, grid)
    assert rec.energy_c <= 1e-12 * rec.energy_ic
    # circulation sense follows the winding
    qx2, _ = vortex_qfield(grid, core_scale=0.04, winding=-1)
    np.testing.assert_allclose(qx2, -qx, atol=1e-12)
