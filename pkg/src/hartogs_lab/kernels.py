"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The public names dispatch on :data:`hartogs_lab._accel.USE_NUMBA`; the
``*_numpy`` and ``*_numba`` twins stay importable so tests and the benchmark
can compare them directly.
"""

import math

import numpy as np

from . import _accel
from ._accel import njit

# pieces closer than this many of their own sizes use the exact square integral
_EXACT_RADIUS = 3.0


def _antiderivative(x, y):
    # F with F_xy = 1/(x + iy); x*atan(y/x) extends continuously by 0 at x = 0
    r2 = x * x + y * y
    lg = np.log(np.where(r2 > 0.0, r2, 1.0))
    safe_x = np.where(x != 0.0, x, 1.0)
    safe_y = np.where(y != 0.0, y, 1.0)
    ax = np.where(x != 0.0, x * np.arctan(y / safe_x), 0.0)
    ay = np.where(y != 0.0, y * np.arctan(x / safe_y), 0.0)
    re = 0.5 * y * lg - y + ax
    im = -(0.5 * x * lg - x + ay)
    return re + 1j * im


def cell_integral(dx, dy, sx, sy=None):
    """(1/pi) * integral of 1/(d - zeta) over the sx-by-sy rectangle centred at 0.

    ``d = dx + i dy`` is the target offset from the rectangle centre.
    Exact (closed form), including targets inside the rectangle.
    """
    if sy is None:
        sy = sx
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    x0, x1 = dx - 0.5 * sx, dx + 0.5 * sx
    y0, y1 = dy - 0.5 * sy, dy + 0.5 * sy
    val = (_antiderivative(x1, y1) - _antiderivative(x0, y1)
           - _antiderivative(x1, y0) + _antiderivative(x0, y0))
    return val / np.pi


@njit
def _antiderivative_scalar(x, y):
    r2 = x * x + y * y
    lg = math.log(r2) if r2 > 0.0 else 0.0
    ax = x * math.atan(y / x) if x != 0.0 else 0.0
    ay = y * math.atan(x / y) if y != 0.0 else 0.0
    return complex(0.5 * y * lg - y + ax, -(0.5 * x * lg - x + ay))


@njit
def _cell_integral_scalar(dx, dy, s):
    h = 0.5 * s
    v = (_antiderivative_scalar(dx + h, dy + h) - _antiderivative_scalar(dx - h, dy + h)
         - _antiderivative_scalar(dx + h, dy - h) + _antiderivative_scalar(dx - h, dy - h))
    return v / math.pi


# ---------------------------------------------------------------------------
# near-field Cauchy sums over cut-cell pieces


@njit
def _near_field_sum_numba(piece_cell, px, py, psize, pfrac, cell_i, cell_j, cell_beta,
                          xs, ys, radius, out):
    nx = xs.shape[0]
    ny = ys.shape[0]
    for p in range(px.shape[0]):
        c = piece_cell[p]
        b = cell_beta[c]
        if b == 0.0:
            continue
        ci = cell_i[c]
        cj = cell_j[c]
        s = psize[p]
        area = pfrac[p] * s * s
        lim2 = (_EXACT_RADIUS * s) ** 2
        for ti in range(max(0, ci - radius), min(nx, ci + radius + 1)):
            dx = xs[ti] - px[p]
            for tj in range(max(0, cj - radius), min(ny, cj + radius + 1)):
                dy = ys[tj] - py[p]
                r2 = dx * dx + dy * dy
                if r2 > lim2:
                    v = area / (math.pi * complex(dx, dy))
                else:
                    v = pfrac[p] * _cell_integral_scalar(dx, dy, s)
                out[ti, tj] += b * v
    return out


def _near_field_sum_numpy(piece_cell, px, py, psize, pfrac, cell_i, cell_j, cell_beta,
                          xs, ys, radius, out):
    nx, ny = xs.shape[0], ys.shape[0]
    order = np.argsort(piece_cell, kind="stable")
    bounds = np.searchsorted(piece_cell[order], np.arange(cell_i.shape[0] + 1))
    for c in range(cell_i.shape[0]):
        b = cell_beta[c]
        if b == 0.0:
            continue
        sel = order[bounds[c]:bounds[c + 1]]
        if sel.size == 0:
            continue
        i0, i1 = max(0, cell_i[c] - radius), min(nx, cell_i[c] + radius + 1)
        j0, j1 = max(0, cell_j[c] - radius), min(ny, cell_j[c] + radius + 1)
        tx, ty = np.meshgrid(xs[i0:i1], ys[j0:j1], indexing="ij")
        dx = tx[..., None] - px[sel]
        dy = ty[..., None] - py[sel]
        s = psize[sel]
        near = dx * dx + dy * dy <= (_EXACT_RADIUS * s) ** 2
        far_val = (pfrac[sel] * s * s) / (np.pi * np.where(near, 1.0, dx + 1j * dy))
        val = np.where(near, 0.0, far_val)
        if near.any():
            exact = pfrac[sel] * cell_integral(np.where(near, dx, 0.0), np.where(near, dy, 0.0), s)
            val = np.where(near, exact, val)
        out[i0:i1, j0:j1] += b * val.sum(axis=-1)
    return out


def near_field_sum(piece_cell, px, py, psize, pfrac, cell_i, cell_j, cell_beta, xs, ys, radius,
                   out=None):
    """Accumulate beta_c * (1/pi) * integral over each piece of 1/(t - zeta).

    Pieces are axis-aligned squares (centre ``px, py``, side ``psize``, area
    fraction ``pfrac``) belonging to cut cell ``piece_cell``; targets are the
    grid nodes within ``radius`` cells of the owning cell.
    """
    if out is None:
        out = np.zeros((xs.shape[0], ys.shape[0]), dtype=complex)
    args = (np.ascontiguousarray(piece_cell, dtype=np.int64), np.ascontiguousarray(px, dtype=float),
            np.ascontiguousarray(py, dtype=float), np.ascontiguousarray(psize, dtype=float),
            np.ascontiguousarray(pfrac, dtype=float), np.ascontiguousarray(cell_i, dtype=np.int64),
            np.ascontiguousarray(cell_j, dtype=np.int64), np.ascontiguousarray(cell_beta, dtype=complex),
            np.ascontiguousarray(xs, dtype=float), np.ascontiguousarray(ys, dtype=float), int(radius), out)
    if _accel.USE_NUMBA:
        return _near_field_sum_numba(*args)
    return _near_field_sum_numpy(*args)


# ---------------------------------------------------------------------------
# Gram matrices of separable families a(z) w^m over Hartogs-type domains


@njit
def _separable_gram_numba(zpart, modes, wz, rnodes, rweights, thetas, tweights, chunk=64):
    nz, nf = zpart.shape
    nr = rnodes.shape[1]
    nt = thetas.shape[0]
    gram = np.zeros((nf, nf), dtype=np.complex128)
    phase = np.empty((nt, nf), dtype=np.complex128)
    for it in range(nt):
        for p in range(nf):
            phase[it, p] = complex(math.cos(modes[p] * thetas[it]), math.sin(modes[p] * thetas[it]))
    block = np.empty((chunk * nr * nt, nf), dtype=np.complex128)
    wblock = np.empty((nf, chunk * nr * nt), dtype=np.complex128)
    for start in range(0, nz, chunk):
        stop = min(start + chunk, nz)
        k = 0
        for iz in range(start, stop):
            for ir in range(nr):
                lr = math.log(rnodes[iz, ir])
                wr = wz[iz] * rweights[iz, ir]
                for it in range(nt):
                    w = wr * tweights[it]
                    for p in range(nf):
                        v = zpart[iz, p] * math.exp(modes[p] * lr) * phase[it, p]
                        block[k, p] = v.conjugate()
                        wblock[p, k] = w * v
                    k += 1
        # rows past k are stale; restrict to the filled part
        gram += np.dot(np.ascontiguousarray(wblock[:, :k]), np.ascontiguousarray(block[:k]))
    return gram


def _separable_gram_numpy(zpart, modes, wz, rnodes, rweights, thetas, tweights, chunk=64):
    nz, nf = zpart.shape
    gram = np.zeros((nf, nf), dtype=complex)
    phase = np.exp(1j * np.outer(thetas, modes))  # (nt, nf)
    for start in range(0, nz, chunk):
        sl = slice(start, start + chunk)
        r = rnodes[sl]  # (c, nr)
        rp = r[..., None] ** modes  # (c, nr, nf)
        vals = zpart[sl][:, None, None, :] * rp[:, :, None, :] * phase[None, None, :, :]
        w = wz[sl][:, None, None] * rweights[sl][:, :, None] * tweights[None, None, :]
        phi = vals.reshape(-1, nf)
        gram += phi.T @ (w.reshape(-1, 1) * phi.conj())
    return gram


def separable_gram(zpart, modes, wz, rnodes, rweights, thetas, tweights):
    """G[p, q] = sum over (z, r, theta) nodes of w * f_p * conj(f_q).

    ``f_p(z, w) = zpart[:, p] * w**modes[p]`` with ``w = r e^{i theta}``; the
    radial nodes are per z-node so fibers may vary with z.
    """
    args = (np.ascontiguousarray(zpart, dtype=complex), np.ascontiguousarray(modes, dtype=np.int64),
            np.ascontiguousarray(wz, dtype=float), np.ascontiguousarray(rnodes, dtype=float),
            np.ascontiguousarray(rweights, dtype=float), np.ascontiguousarray(thetas, dtype=float),
            np.ascontiguousarray(tweights, dtype=float))
    if _accel.USE_NUMBA:
        return _separable_gram_numba(*args)
    return _separable_gram_numpy(*args)


# ---------------------------------------------------------------------------
# Cauchy transform at scattered target points


@njit
def _cauchy_points_numba(tx, ty, t_i, t_j, fx, fy, fbeta, h, cut_x, cut_y, cut_i, cut_j, cut_m,
                         offsets, px, py, psize, pfrac, cut_beta, radius):
    nt = tx.shape[0]
    out = np.zeros(nt, dtype=np.complex128)
    lim2 = (_EXACT_RADIUS * h) ** 2
    a = h * h
    for t in range(nt):
        x = tx[t]
        y = ty[t]
        acc = 0j
        for s in range(fx.shape[0]):
            dx = x - fx[s]
            dy = y - fy[s]
            if dx * dx + dy * dy > lim2:
                acc += fbeta[s] * a / (math.pi * complex(dx, dy))
            else:
                acc += fbeta[s] * _cell_integral_scalar(dx, dy, h)
        for c in range(cut_x.shape[0]):
            if abs(cut_i[c] - t_i[t]) <= radius and abs(cut_j[c] - t_j[t]) <= radius:
                b = cut_beta[c]
                for p in range(offsets[c], offsets[c + 1]):
                    dx = x - px[p]
                    dy = y - py[p]
                    s = psize[p]
                    if dx * dx + dy * dy > (_EXACT_RADIUS * s) ** 2:
                        acc += b * pfrac[p] * s * s / (math.pi * complex(dx, dy))
                    else:
                        acc += b * pfrac[p] * _cell_integral_scalar(dx, dy, s)
            else:
                u = complex(x - cut_x[c], y - cut_y[c])
                inv = 1.0 / u
                term = inv
                for k in range(cut_m.shape[1]):
                    acc += cut_m[c, k] * term / math.pi
                    term *= inv
        out[t] = acc
    return out


def _cauchy_points_numpy(tx, ty, t_i, t_j, fx, fy, fbeta, h, cut_x, cut_y, cut_i, cut_j, cut_m,
                         offsets, px, py, psize, pfrac, cut_beta, radius, chunk=32):
    nt = tx.shape[0]
    out = np.zeros(nt, dtype=complex)
    lim2 = (_EXACT_RADIUS * h) ** 2
    for start in range(0, nt, chunk):
        sl = slice(start, start + chunk)
        dx = tx[sl, None] - fx[None, :]
        dy = ty[sl, None] - fy[None, :]
        near = dx * dx + dy * dy <= lim2
        val = h * h / (math.pi * np.where(near, 1.0, dx + 1j * dy))
        if near.any():
            val[near] = cell_integral(dx[near], dy[near], h)
        out[sl] = val @ fbeta
        u = (tx[sl, None] - cut_x[None, :]) + 1j * (ty[sl, None] - cut_y[None, :])
        close = ((np.abs(cut_i[None, :] - t_i[sl, None]) <= radius)
                 & (np.abs(cut_j[None, :] - t_j[sl, None]) <= radius))
        inv = 1.0 / np.where(close, 1.0, u)
        mp = sum(cut_m[None, :, k] * inv ** (k + 1) for k in range(cut_m.shape[1])) / math.pi
        out[sl] += np.where(close, 0.0, mp).sum(axis=1)
    piece_owner = np.repeat(np.arange(cut_x.shape[0]), np.diff(offsets))
    pb = cut_beta[piece_owner]
    for t in range(nt):
        close = (np.abs(cut_i - t_i[t]) <= radius) & (np.abs(cut_j - t_j[t]) <= radius)
        sel = close[piece_owner]
        if not sel.any():
            continue
        dx = tx[t] - px[sel]
        dy = ty[t] - py[sel]
        s = psize[sel]
        near = dx * dx + dy * dy <= (_EXACT_RADIUS * s) ** 2
        val = pfrac[sel] * s * s / (math.pi * np.where(near, 1.0, dx + 1j * dy))
        if near.any():
            val[near] = pfrac[sel][near] * cell_integral(dx[near], dy[near], s[near])
        out[t] += np.sum(pb[sel] * val)
    return out


def cauchy_points(tx, ty, t_i, t_j, fx, fy, fbeta, h, cut_x, cut_y, cut_i, cut_j, cut_m, offsets,
                  px, py, psize, pfrac, cut_beta, radius):
    """Cauchy transform at targets (tx, ty) from full cells and cut-cell pieces.

    Full cells (centres fx, fy, side h, density fbeta) use the exact square
    integral within three cells and the monopole beyond. Cut cells within
    ``radius`` cells of the target's cell (t_i, t_j) are summed piece by piece
    (pieces of cut cell c are ``offsets[c]:offsets[c+1]``); farther cut cells
    use their multipole moments ``cut_m`` (already multiplied by beta).
    """
    f = np.ascontiguousarray
    args = (f(tx, float), f(ty, float), f(t_i, np.int64), f(t_j, np.int64), f(fx, float), f(fy, float),
            f(fbeta, complex), float(h), f(cut_x, float), f(cut_y, float), f(cut_i, np.int64),
            f(cut_j, np.int64), f(cut_m, complex), f(offsets, np.int64), f(px, float), f(py, float),
            f(psize, float), f(pfrac, float), f(cut_beta, complex), int(radius))
    if _accel.USE_NUMBA:
        return _cauchy_points_numba(*args)
    return _cauchy_points_numpy(*args)
