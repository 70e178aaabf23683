"""Helmholtz split of q = sqrt(rho) v, shell spectra, and power-law fits."""

from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass
class QField:
    """Density-weighted velocity components and their 2D transforms."""

    qx: np.ndarray
    qy: np.ndarray
    qhat_x: np.ndarray
    qhat_y: np.ndarray

    @classmethod
    def from_components(cls, qx, qy):
        return cls(qx, qy, np.fft.fft2(qx), np.fft.fft2(qy))


@dataclass
class SpectrumRecord:
    """Shell-binned spectral densities at one snapshot.

    k_bins are shell indices in units of k_u = 2 pi / (L dx); bin values are
    normalized so that sum(eps) * k_u recovers the corresponding energy.
    """

    t: int
    k_bins: np.ndarray
    eps_ic: np.ndarray
    eps_c: np.ndarray
    k_u: float

    @property
    def energy_ic(self):
        return float(self.eps_ic.sum() * self.k_u)

    @property
    def energy_c(self):
        return float(self.eps_c.sum() * self.k_u)


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares slope of log eps vs log k over a shell window."""

    k_min: float
    k_max: float
    which: str
    alpha: float
    stderr: float
    n_bins: int
    n_excluded: int


def _mode_numbers(L):
    m1 = np.fft.fftfreq(L, d=1.0 / L)  # integer-valued mode numbers
    return np.meshgrid(m1, m1, indexing="ij")


def helmholtz_split(qhat_x, qhat_y):
    """Split a transformed vector field into compressible and incompressible parts.

    q_c is the projection onto k, q_ic the remainder; the k = 0 mode (mean
    flow, no vorticity) is assigned wholly to the compressible part.  The
    parts recompose to the input exactly and k . q_ic = 0 for every k != 0.
    """
    L = qhat_x.shape[0]
    MX, MY = _mode_numbers(L)
    m2 = MX**2 + MY**2
    m2[0, 0] = 1.0
    coef = (MX * qhat_x + MY * qhat_y) / m2
    chx = coef * MX
    chy = coef * MY
    chx[0, 0] = qhat_x[0, 0]
    chy[0, 0] = qhat_y[0, 0]
    return (chx, chy), (qhat_x - chx, qhat_y - chy)


def spectral_density(qhat_x, qhat_y, grid):
    """Angle-integrated spectral density over unit-width shells.

    Shell j collects modes with |k| in [j - 1/2, j + 1/2) * k_u.  Each bin
    holds that shell's kinetic-energy contribution divided by k_u, so the
    bin sum times k_u equals the total energy of the component pair.
    """
    L = grid.L
    MX, MY = _mode_numbers(L)
    shells = np.floor(np.hypot(MX, MY) + 0.5).astype(np.int64).ravel()
    power = (np.abs(qhat_x) ** 2 + np.abs(qhat_y) ** 2).ravel()
    k_u = 2.0 * np.pi / grid.box_size
    nbins = int(shells.max()) + 1
    sums = np.bincount(shells, weights=power, minlength=nbins)
    eps = 0.5 * grid.cell_area / (L * L) * sums / k_u
    return np.arange(nbins, dtype=np.float64), eps


def spectrum_record(qx, qy, grid, t=0):
    """Helmholtz-split shell spectra of a q field snapshot."""
    qf = QField.from_components(qx, qy)
    (chx, chy), (ihx, ihy) = helmholtz_split(qf.qhat_x, qf.qhat_y)
    k_bins, eps_ic = spectral_density(ihx, ihy, grid)
    _, eps_c = spectral_density(chx, chy, grid)
    k_u = 2.0 * np.pi / grid.box_size
    return SpectrumRecord(t, k_bins, eps_ic, eps_c, k_u)


def fit_powerlaw(record, which, k_min, k_max):
    """Fit eps(k) ~ k^alpha over shells in [k_min, k_max] (units of k_u).

    Zero or non-finite bins inside the window are excluded and counted;
    fewer than 5 usable bins is an error.
    """
    if which not in ("ic", "c"):
        raise ValueError(f"which must be 'ic' or 'c', got {which!r}")
    if not k_min < k_max:
        raise ValueError(f"need k_min < k_max, got [{k_min}, {k_max}]")
    eps = record.eps_ic if which == "ic" else record.eps_c
    window = (record.k_bins >= k_min) & (record.k_bins <= k_max) & (record.k_bins > 0)
    usable = window & (eps > 0) & np.isfinite(eps)
    n_excluded = int(window.sum() - usable.sum())
    n_bins = int(usable.sum())
    if n_bins < 5:
        raise ValueError(
            f"power-law window [{k_min}, {k_max}] has {n_bins} usable bins, need >= 5"
        )
    res = stats.linregress(np.log(record.k_bins[usable]), np.log(eps[usable]))
    return PowerLawFit(k_min, k_max, which, float(res.slope), float(res.stderr),
                       n_bins, n_excluded)


def vortex_qfield(grid, core_scale, winding=1, center=None):
    """Density-weighted velocity of a single static vortex on the torus.

    Samples q = 2 n tanh(sqrt(a) r) / r_phys in the azimuthal direction and
    removes the longitudinal residue (sampling seam and mean flow) with the
    Helmholtz projector, leaving the exactly transverse periodic flow of an
    isolated vortex.  An odd-winding wave function cannot be periodic, so
    the velocity field is constructed directly rather than through psi.
    """
    L = grid.L
    if center is None:
        center = (L / 2.0 - 0.5, L / 2.0 - 0.5)
    x = np.arange(L, dtype=np.float64)
    X, Y = np.meshgrid(x, x, indexing="ij")
    ddx = X - center[0]
    ddy = Y - center[1]
    r = np.hypot(ddx, ddy)
    r = np.maximum(r, 1e-12)
    # v = 2 grad(theta) -> azimuthal speed 2 n / r_phys, with the tanh core
    speed = 2.0 * winding * np.tanh(np.sqrt(core_scale) * r) / (r * grid.dx)
    qx = -speed * ddy / r
    qy = speed * ddx / r
    qhx = np.fft.fft2(qx)
    qhy = np.fft.fft2(qy)
    # the unpaired Nyquist lines of an even grid have no well-defined
    # projection direction; drop that sampling junk before projecting
    for qh in (qhx, qhy):
        qh[L // 2, :] = 0.0
        qh[:, L // 2] = 0.0
    _, (ihx, ihy) = helmholtz_split(qhx, qhy)
    return np.fft.ifft2(ihx).real, np.fft.ifft2(ihy).real


SPECTRUM_HEADER = "k,eps_ic,eps_c"
FIT_HEADER = "t,k_min,k_max,which,alpha,stderr"


def spectrum_rows(record):
    for k, ic, c in zip(record.k_bins, record.eps_ic, record.eps_c):
        yield f"{k:.17g},{ic:.17g},{c:.17g}"


def fit_row(t, fit):
    return (f"{t},{fit.k_min:.17g},{fit.k_max:.17g},{fit.which},"
            f"{fit.alpha:.17g},{fit.stderr:.17g}")
