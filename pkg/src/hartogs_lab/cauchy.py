"""Cauchy transform of grid data: a particular solution of dg/dzbar = beta.

``T beta(z) = (1/pi) * integral over V of beta(zeta) / (z - zeta) dA``.

beta is taken piecewise constant on cells. Full cells use the exact
cell-averaged kernel in one FFT convolution. Cells cut by the boundary are
split into quadtree pieces; their far field is a three-term multipole
expansion (also FFT convolutions), their near field the exact piece sum.
"""

import numpy as np
from scipy.signal import fftconvolve

from .errors import PreconditionError
from .kernels import cauchy_points, cell_integral, near_field_sum

NEAR_RADIUS = 4
MULTIPOLE_TERMS = 3


def _offsets(grid):
    nx, ny = grid.shape
    ox = grid.h * np.arange(-(nx - 1), nx)
    oy = grid.h * np.arange(-(ny - 1), ny)
    return np.meshgrid(ox, oy, indexing="ij")


def _convolve(src, kernel, shape):
    nx, ny = shape
    full = fftconvolve(src, kernel)
    return full[nx - 1:2 * nx - 1, ny - 1:2 * ny - 1]


def cauchy_particular(beta, grid, near_radius=NEAR_RADIUS):
    """Cauchy transform of ``beta`` restricted to the grid's region, at every cell centre."""
    beta = np.asarray(beta)
    if beta.shape != grid.shape:
        raise PreconditionError(f"beta has shape {beta.shape}, grid is {grid.shape}")
    beta = np.where(grid.support, beta, 0.0).astype(complex)
    if not np.all(np.isfinite(beta)):
        raise PreconditionError("beta must be bounded (finite) on the grid")
    if not np.any(beta):
        return np.zeros(grid.shape, dtype=complex)

    pieces = grid.pieces
    ci, cj = pieces.cell_i, pieces.cell_j
    full = (grid.coverage >= 1.0) & grid.mask
    cut_flag = np.zeros(grid.shape, dtype=bool)
    cut_flag[ci, cj] = True
    full &= ~cut_flag

    ox, oy = _offsets(grid)
    kavg = cell_integral(ox, oy, grid.h)
    out = _convolve(np.where(full, beta, 0.0), kavg, grid.shape)

    if ci.size == 0:
        return out

    cell_beta = beta[ci, cj]
    moments = _cut_moments(grid)
    offset = ox + 1j * oy
    centre = offset == 0
    safe = np.where(centre, 1.0, offset)
    for k in range(MULTIPOLE_TERMS):
        mk = moments[:, k]
        src = np.zeros(grid.shape, dtype=complex)
        src[ci, cj] = cell_beta * mk
        kern = np.where(centre, 0.0, 1.0 / (np.pi * safe ** (k + 1)))
        out += _convolve(src, kern, grid.shape)
        # remove this term from the near windows, replaced below by exact sums
        _subtract_near(out, grid, ci, cj, cell_beta * mk, k, near_radius)

    near_field_sum(pieces.piece_cell, pieces.px, pieces.py, pieces.size, pieces.frac,
                   ci, cj, cell_beta, grid.xs, grid.ys, near_radius, out)
    return out


def _cut_moments(grid):
    """Area moments int (zeta - c)^k dA, k < MULTIPOLE_TERMS, of each cut cell's covered part."""
    p = grid.pieces
    rel = (p.px - grid.xs[p.cell_i][p.piece_cell]) + 1j * (p.py - grid.ys[p.cell_j][p.piece_cell])
    area = p.frac * p.size ** 2
    out = np.empty((p.cell_i.size, MULTIPOLE_TERMS), dtype=complex)
    for k in range(MULTIPOLE_TERMS):
        v = area * rel ** k
        out[:, k] = (np.bincount(p.piece_cell, weights=v.real, minlength=p.cell_i.size)
                     + 1j * np.bincount(p.piece_cell, weights=v.imag, minlength=p.cell_i.size))
    return out


def cauchy_at_nodes(beta, grid, near_radius=NEAR_RADIUS, on_grid=None):
    """Cauchy transform of ``beta`` at the grid's quadrature nodes.

    Whole-cell nodes reuse the cell-centre values (``on_grid`` if already
    computed); cut-cell centroids are evaluated directly.
    """
    if on_grid is None:
        on_grid = cauchy_particular(beta, grid, near_radius)
    nodes = grid.nodes
    out = on_grid[nodes.cell_i, nodes.cell_j].astype(complex)
    if nodes.cut_index.size == 0:
        return out
    beta = np.where(grid.support, np.asarray(beta), 0.0).astype(complex)
    p = grid.pieces
    ci, cj = p.cell_i, p.cell_j
    cut_flag = np.zeros(grid.shape, dtype=bool)
    cut_flag[ci, cj] = True
    fi, fj = np.nonzero((grid.coverage >= 1.0) & grid.mask & ~cut_flag)
    order = np.argsort(p.piece_cell, kind="stable")
    offsets = np.searchsorted(p.piece_cell[order], np.arange(ci.size + 1))
    cut_beta = beta[ci, cj]
    tz = nodes.z[nodes.n_full:]
    vals = cauchy_points(tz.real, tz.imag, nodes.cell_i[nodes.n_full:], nodes.cell_j[nodes.n_full:],
                         grid.xs[fi], grid.ys[fj], beta[fi, fj], grid.h, grid.xs[ci], grid.ys[cj],
                         ci, cj, _cut_moments(grid) * cut_beta[:, None], offsets, p.px[order],
                         p.py[order], p.size[order], p.frac[order], cut_beta, near_radius)
    out[nodes.n_full:] = vals
    return out


def _subtract_near(out, grid, ci, cj, strength, k, radius):
    nx, ny = grid.shape
    span = np.arange(-radius, radius + 1)
    di, dj = np.meshgrid(span, span, indexing="ij")
    di, dj = di.ravel(), dj.ravel()
    keep = (di != 0) | (dj != 0)
    di, dj = di[keep], dj[keep]
    ti = ci[:, None] + di[None, :]
    tj = cj[:, None] + dj[None, :]
    ok = (ti >= 0) & (ti < nx) & (tj >= 0) & (tj < ny)
    delta = grid.h * (di + 1j * dj)
    vals = strength[:, None] / (np.pi * delta[None, :] ** (k + 1))
    np.add.at(out, (ti[ok], tj[ok]), -vals[ok])


def dbar(g, grid):
    """Centered-difference d/dzbar of a grid function; NaN off interior nodes."""
    g = np.asarray(g)
    out = np.full(grid.shape, np.nan, dtype=complex)
    gx = (g[2:, 1:-1] - g[:-2, 1:-1]) / (2 * grid.h)
    gy = (g[1:-1, 2:] - g[1:-1, :-2]) / (2 * grid.h)
    out[1:-1, 1:-1] = 0.5 * (gx + 1j * gy)
    out[~grid.interior()] = np.nan
    return out
