"""Annulus moments of |w|^{2n} and of the squared boundary distance times |w|^{2n}.

For the annulus ``A(a, b)`` with midpoint radius ``c = (a + b) / 2`` and
distance to the boundary ``d_ab(w) = min(|w| - a, b - |w|)``::

    int |w|^{2n} dV            = pi / (n + 1) * (b^{2n+2} - a^{2n+2})        (n != -1)
    int d_ab^2 |w|^{2n} dV     = pi (b^{2n+4} - a^{2n+4}) / ((n+1)(n+2)(2n+3))
                                 - pi c^{2n+2} (b^2 - a^2) / ((n+1)(2n+3))

Everything scaling like ``b^{2n}`` is carried in log space so |n| in the
hundreds does not overflow.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import PreconditionError
from .logspace import LogValue, log_diff_exp
from .quadrature import distance_moment_quad

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class Annulus:
    a: float
    b: float

    def __post_init__(self):
        if not (0 < self.a < self.b < math.inf):
            raise PreconditionError(f"annulus needs 0 < a < b < inf, got a={self.a}, b={self.b}")

    @property
    def c(self):
        return 0.5 * (self.a + self.b)

    def distance(self, r):
        r = np.asarray(r, dtype=float)
        return np.minimum(r - self.a, self.b - r)


def _as_annulus(A):
    if isinstance(A, Annulus):
        return A
    a, b = A
    return Annulus(float(a), float(b))


def _power_diff(a, b, p):
    """LogValue of b^p - a^p for b > a > 0."""
    if p == 0:
        return LogValue.zero()
    x, y = p * math.log(b), p * math.log(a)
    if x > y:
        return LogValue(log_diff_exp(x, y), 1)
    return LogValue(log_diff_exp(y, x), -1)


def radial_moment(A, n):
    """Integral of |w|^{2n} over the annulus, as a LogValue."""
    A = _as_annulus(A)
    n = int(n)
    if n == -1:
        return LogValue(math.log(2 * math.pi) + math.log(math.log(A.b / A.a)), 1)
    return LogValue.from_float(math.pi / (n + 1)) * _power_diff(A.a, A.b, 2 * n + 2)


def distance_moment(A, n):
    """Integral of d_ab(w)^2 |w|^{2n} over the annulus, as a LogValue."""
    A = _as_annulus(A)
    n = int(n)
    if n in (-1, -2):
        return LogValue.from_float(distance_moment_quad(A.a, A.b, n))
    first = LogValue.from_float(math.pi / ((n + 1) * (n + 2) * (2 * n + 3))) * _power_diff(A.a, A.b, 2 * n + 4)
    cpow = LogValue((2 * n + 2) * math.log(A.c), 1)
    second = LogValue.from_float(math.pi * (A.b ** 2 - A.a ** 2) / ((n + 1) * (2 * n + 3))) * cpow
    return first - second


def moment_ratio(A, n):
    """n^2 * distance_moment / radial_moment; tends to b^2 / 2 as |n| grows."""
    n = int(n)
    if n == 0:
        raise PreconditionError("moment_ratio needs n != 0")
    return float(LogValue.from_float(n * n) * distance_moment(A, n) / radial_moment(A, n))


def lemma1_constant(A, n_range):
    """Sup of :func:`moment_ratio` over ``n_range`` (zero excluded)."""
    ns = [int(n) for n in n_range]
    if not ns:
        raise PreconditionError("empty mode range")
    if 0 in ns:
        raise PreconditionError("mode range must exclude 0")
    return max(moment_ratio(A, n) for n in ns)


# ---------------------------------------------------------------------------
# elementwise log moments over arrays of fiber radii


def log_radial_moment(a, b, n):
    """log of the radial moment for arrays of radii ``a < b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = int(n)
    if n == -1:
        return math.log(2 * math.pi) + np.log(np.log(b) - np.log(a))
    p = 2 * n + 2
    x, y = p * np.log(b), p * np.log(a)
    return math.log(math.pi / abs(n + 1)) + log_diff_exp(np.maximum(x, y), np.minimum(x, y))


def _distance_moment_gauss(a, b, n):
    c = 0.5 * (a + b)
    half = 0.5 * (c - a)
    total = 0.0
    for lo, sgn in ((a, 1.0), (c, -1.0)):
        r = (lo + half)[..., None] + half[..., None] * _GAUSS_X
        d = (r - a[..., None]) if sgn > 0 else (b[..., None] - r)
        total = total + half * np.sum(_GAUSS_W * d * d * r ** (2 * n + 1), axis=-1)
    return 2 * math.pi * total


def log_distance_moment(a, b, n):
    """log of the distance moment for arrays of radii ``a < b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = int(n)
    if n in (-1, -2):
        return np.log(_distance_moment_gauss(np.atleast_1d(a), np.atleast_1d(b), n)).reshape(a.shape)
    p = 2 * n + 4
    x, y = p * np.log(b), p * np.log(a)
    k1 = math.pi / ((n + 1) * (n + 2) * (2 * n + 3))
    # sign of the first term is sign(k1) * sign(p)
    s1 = np.sign(k1) * np.sign(p)
    l1 = math.log(abs(k1)) + log_diff_exp(np.maximum(x, y), np.minimum(x, y))
    k2 = math.pi / ((n + 1) * (2 * n + 3))
    s2 = np.sign(k2)
    l2 = math.log(abs(k2)) + np.log(b * b - a * a) + (2 * n + 2) * np.log(0.5 * (a + b))
    # result = s1 e^{l1} - s2 e^{l2}, known positive
    if s1 > 0 and s2 < 0:
        return np.logaddexp(l1, l2)
    if s1 > 0:
        return log_diff_exp(l1, l2)
    return log_diff_exp(l2, l1)


# ---------------------------------------------------------------------------
# mode norms over a Hartogs domain


def _fiber_samples(d, grid, g):
    g = np.asarray(g)
    if g.ndim and g.shape != grid.shape:
        raise PreconditionError(f"grid function has shape {g.shape}, grid is {grid.shape}")
    g = np.broadcast_to(g, grid.shape)
    if np.any(d.base.levelset(grid.Z[grid.mask]) > 1e-12):
        raise PreconditionError("grid does not lie in the domain's base")
    sel = grid.support
    z = d.base.clamp(grid.Z[sel])
    r_in, r_out = d.radii(z)
    return g[sel], grid.weights[sel], r_in, r_out


def _log_mode_norm2(d, grid, g, n, log_moment):
    gv, w, r_in, r_out = _fiber_samples(d, grid, g)
    amp = np.abs(gv) ** 2 * w
    nz = amp > 0
    if not nz.any():
        return -math.inf
    return float(logsumexp(np.log(amp[nz]) + log_moment(r_in[nz], r_out[nz], n)))


def mode_l2_norm(d, grid, g, n):
    """Squared L2 norm of g(z) w^n over the Hartogs domain.

    Reduces fiberwise to the integral of |g|^2 times the radial moment of the
    physical fiber annulus; may return ``inf`` past double range.
    """
    lv = _log_mode_norm2(d, grid, g, n, log_radial_moment)
    return 0.0 if lv == -math.inf else float(np.exp(lv))


def sobolev_surrogate_ratio(d, grid, g, n):
    """||d_z * g w^n|| / ||g w^n|| with d_z the distance to the fiber boundary."""
    den = _log_mode_norm2(d, grid, g, n, log_radial_moment)
    if den == -math.inf:
        raise PreconditionError("zero denominator: g vanishes on the grid")
    num = _log_mode_norm2(d, grid, g, n, log_distance_moment)
    return float(np.exp(0.5 * (num - den)))
