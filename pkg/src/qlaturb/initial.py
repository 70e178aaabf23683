"""Initial wave functions: vortices in a Gaussian cloud, bicubic random phase.

Two families are provided.  The first embeds quantized vortices with
prescribed windings in a Gaussian envelope; the second builds a uniform
density state whose phase is a C1-continuous periodic bicubic interpolant
of per-corner random data.
"""

from dataclasses import dataclass

import numpy as np

_CORNERS = ((0, 0), (1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class VortexSpec:
    """Vortex core position (continuum-valued, units of sites) and winding."""

    x: float
    y: float
    winding: int

    def __post_init__(self):
        if self.winding == 0:
            raise ValueError("vortex winding must be a nonzero integer")


@dataclass(frozen=True)
class GaussianCloudParams:
    """Envelope amplitude h, spatial rescaling a, Gaussian width parameter w_g."""

    h: float
    a: float
    w_g: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"cloud amplitude h must be > 0, got {self.h}")
        if not self.a > 0:
            raise ValueError(f"rescaling parameter a must be > 0, got {self.a}")
        if self.w_g < 0:
            raise ValueError(f"width parameter w_g must be >= 0, got {self.w_g}")


@dataclass(frozen=True)
class RandomPhaseParams:
    """Fragmentation level m (cells per dimension), RNG seed, uniform |psi|."""

    m: int
    seed: int
    amplitude: float = 1.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"fragmentation level must be >= 1, got {self.m}")
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")


def gaussian_vortex_state(grid, cloud, vortices):
    """Product of tanh-core vortex factors under a centered Gaussian envelope.

    psi = h exp(-a w_g r^2) prod_i tanh(sqrt(a)|r - r_i|) exp(i n_i Arg(r - r_i)),
    with r measured from the domain center.  Windings must sum to zero so the
    total circulation (and angular momentum) vanishes on the periodic domain.
    """
    total = sum(v.winding for v in vortices)
    if total != 0:
        raise ValueError(f"vortex windings must sum to zero, got {total}")
    L = grid.L
    for v in vortices:
        if not (0 <= v.x < L and 0 <= v.y < L):
            raise ValueError(f"vortex at ({v.x}, {v.y}) lies outside the {L}^2 domain")
    x = np.arange(L, dtype=np.float64)
    X, Y = np.meshgrid(x, x, indexing="ij")
    c = L / 2.0
    r2 = (X - c) ** 2 + (Y - c) ** 2
    psi = cloud.h * np.exp(-cloud.a * cloud.w_g * r2) + 0j
    sqrt_a = np.sqrt(cloud.a)
    for v in vortices:
        ddx = X - v.x
        ddy = Y - v.y
        r = np.hypot(ddx, ddy)
        psi *= np.tanh(sqrt_a * r) * np.exp(1j * v.winding * np.arctan2(ddy, ddx))
    return psi


def four_vortex_lattice(grid, spacing, winding):
    """Checkerboard of four vortices (+n, -n alternating) about the center.

    Neighboring cores sit `spacing` sites apart; positions carry a half-site
    offset so each core lands at a plaquette center, which keeps the winding
    detector unambiguous.
    """
    c = grid.L / 2.0
    off = spacing / 2.0
    n = abs(int(winding))
    if n == 0:
        raise ValueError("winding must be nonzero")
    return [
        VortexSpec(c - off + 0.5, c - off + 0.5, +n),
        VortexSpec(c - off + 0.5, c + off + 0.5, -n),
        VortexSpec(c + off + 0.5, c - off + 0.5, -n),
        VortexSpec(c + off + 0.5, c + off + 0.5, +n),
    ]


def _constraint_matrix():
    # rows: p, px, py, pxy at the four unit-square corners; cols: a_ij, idx 4i+j
    M = np.zeros((16, 16))
    for c, (xc, yc) in enumerate(_CORNERS):
        for i in range(4):
            for j in range(4):
                col = 4 * i + j
                xi = xc**i
                yj = yc**j
                dxi = i * xc ** (i - 1) if i > 0 else 0.0
                dyj = j * yc ** (j - 1) if j > 0 else 0.0
                M[c, col] = xi * yj
                M[4 + c, col] = dxi * yj
                M[8 + c, col] = xi * dyj
                M[12 + c, col] = dxi * dyj
    return M


_SOLVE = np.linalg.inv(_constraint_matrix())


def bicubic_cell_coefficients(corner_data):
    """Coefficients a_ij of p(x,y) = sum a_ij x^i y^j on the unit square.

    `corner_data` holds 16 reals: f, then df/dx, df/dy, d2f/dxdy, each at the
    corners (0,0), (1,0), (0,1), (1,1).  The interpolant matches all sixteen
    corner constraints; matched corner data on a shared edge makes the value
    and the cross-edge derivative continuous between neighboring cells.
    """
    data = np.asarray(corner_data, dtype=np.float64).reshape(16)
    return (_SOLVE @ data).reshape(4, 4)


def bicubic_eval(coeffs, x, y, dx=0, dy=0):
    """Evaluate the cell polynomial (or a derivative) at unit-square points."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros(np.broadcast(x, y).shape)
    for i in range(4):
        if dx and i == 0:
            continue
        for j in range(4):
            if dy and j == 0:
                continue
            cx = i * (x ** (i - 1)) if dx else x**i
            cy = j * (y ** (j - 1)) if dy else y**j
            out = out + coeffs[i, j] * cx * cy
    return out


def random_phase_cell_coefficients(grid, params):
    """Bicubic coefficient grid (m, m, 4, 4) for the random phase surface.

    Each distinct cell corner gets four PCG64 draws, uniform on [-pi, pi],
    used as the corner value and the unit-square derivatives (df/dx, df/dy,
    d2f/dxdy); in lattice coordinates the derivative draws are scaled by
    1/cell-size, keeping the phase change across one cell of order pi.
    Corner data is shared between the cells that touch a corner, with
    periodic wraparound, so the surface and its first derivatives are
    continuous across every edge and across the domain seam.
    """
    L, m = grid.L, params.m
    if L % m != 0:
        raise ValueError(f"fragmentation level m={m} must divide L={L}")
    rng = np.random.default_rng(params.seed)
    draws = rng.uniform(-np.pi, np.pi, size=(m, m, 4))

    # per-cell corner data in the row order expected by the 16x16 solve
    data = np.empty((m, m, 16))
    for c, (cx, cy) in enumerate(_CORNERS):
        corner = draws[(np.arange(m)[:, None] + cx) % m, (np.arange(m)[None, :] + cy) % m]
        data[:, :, c] = corner[:, :, 0]
        data[:, :, 4 + c] = corner[:, :, 1]
        data[:, :, 8 + c] = corner[:, :, 2]
        data[:, :, 12 + c] = corner[:, :, 3]

    return np.einsum("rc,abc->abr", _SOLVE, data).reshape(m, m, 4, 4)


def random_phase_field(grid, params):
    """Periodic C1 random phase surface theta(r) sampled at the lattice sites."""
    coeffs = random_phase_cell_coefficients(grid, params)
    cell = grid.L // params.m
    u = np.arange(cell, dtype=np.float64) / cell
    XP = np.stack([u**i for i in range(4)], axis=1)  # (cell, 4)
    theta = np.einsum("abij,pi,qj->apbq", coeffs, XP, XP)
    return theta.reshape(grid.L, grid.L)


def random_phase_state(grid, params):
    """Uniform-density wave function amplitude * exp(i theta) with bicubic theta."""
    theta = random_phase_field(grid, params)
    return params.amplitude * np.exp(1j * theta)
