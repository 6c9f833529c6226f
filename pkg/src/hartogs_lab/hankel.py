"""Hankel operators on Hartogs domains, one fiber mode at a time.

For a symbol psi with ``psi_zbar = beta`` and the fiber mode ``e_n = w^{-n}``
(case 1) or ``w^n`` (case 2), ``H_psi e_n = g_n(z) e_n`` where ``g_n`` is the
canonical solution of ``dg/dzbar = beta`` in ``L^2(V1, e^{-lambda_n})``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .bergman import (DEFAULT_DEGREE, GridFunction, _weights, canonical_solution, fiber_weight,
                      min_mode, nodal_values, particular_solution)
from .domain import make_grid
from .errors import PreconditionError
from .kernels import separable_gram
from .moments import _log_mode_norm2, log_distance_moment, log_radial_moment


# ---------------------------------------------------------------------------
# symbols


def smootherstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


@dataclass(frozen=True)
class SymbolSpec:
    """beta = psi_zbar, radial about ``center``: 1 for r <= inner*a, 0 for r >= outer*a."""

    center: complex = 0j
    a: float = 1.0
    inner: float = 0.6
    outer: float = 0.9
    amplitude: complex = 1.0
    name: str = "smooth-bump"

    def __post_init__(self):
        if not 0 <= self.inner < self.outer < 1:
            raise PreconditionError("bump radii must satisfy 0 <= inner < outer < 1 (support inside D(z0, a))")

    def beta(self, z):
        r = np.abs(np.asarray(z) - self.center) / self.a
        return self.amplitude * (1.0 - smootherstep((r - self.inner) / (self.outer - self.inner)))

    def on(self, grid):
        return self.beta(grid.Z)


def zero_symbol(center=0j, a=1.0):
    return SymbolSpec(center, a, amplitude=0.0, name="zero")


def default_symbol(d):
    return SymbolSpec(d.center, d.a1)


# ---------------------------------------------------------------------------
# modes


@dataclass
class ModeFunction:
    """g(z) w^mode with g on a grid."""

    g: GridFunction = field(repr=False)
    mode: int
    case_tag: int
    n: int

    @property
    def grid(self):
        return self.g.grid


def signed_mode(case_tag, n):
    return -int(n) if case_tag == 1 else int(n)


class HankelSweep:
    """Reuses the V1 grid and the Cauchy transform of beta across modes."""

    def __init__(self, d, symbol=None, resolution=128, degree=DEFAULT_DEGREE, grid=None):
        self.d = d
        self.symbol = symbol if symbol is not None else default_symbol(d)
        self.grid = grid if grid is not None else make_grid(d.v1_region(), resolution)
        self.degree = degree
        self.beta = self.symbol.on(self.grid)
        self.particular = particular_solution(self.beta, self.grid)

    def mode(self, n):
        n = int(n)
        if n < min_mode(self.d.case_tag):
            raise PreconditionError(f"case-{self.d.case_tag} modes need n >= {min_mode(self.d.case_tag)}")
        fw = fiber_weight(self.d, n, self.grid)
        g = canonical_solution(self.grid, fw, self.beta, self.degree, center=self.d.center,
                               particular=self.particular)
        return ModeFunction(g, signed_mode(self.d.case_tag, n), self.d.case_tag, n), fw

    def norm_ratio(self, n):
        mf, fw = self.mode(n)
        return _norm_ratio(mf.g, self.grid, fw)

    def probe_triple(self, n):
        """(q, s, t) for the unit mode e_n: ||H e_n||^2, ||beta e_n||, surrogate ||beta e_n||_{-1}."""
        ratio = self.norm_ratio(n)
        m = signed_mode(self.d.case_tag, n)
        one = _log_mode_norm2(self.d, self.grid, 1.0, m, log_radial_moment)
        lb = _log_mode_norm2(self.d, self.grid, self.beta, m, log_radial_moment)
        ld = _log_mode_norm2(self.d, self.grid, self.beta, m, log_distance_moment)
        if lb == -math.inf:
            return ratio ** 2, 0.0, 0.0
        return ratio ** 2, math.exp(0.5 * (lb - one)), math.exp(0.5 * (ld - one))


def _norm_ratio(g, grid, fw):
    w, _ = _weights(grid, fw)
    num = float(np.sum(w * np.abs(nodal_values(g, grid)) ** 2))
    return math.sqrt(num / float(np.sum(w)))


def hankel_mode(d, symbol=None, n=2, resolution=128, degree=DEFAULT_DEGREE):
    """H_psi e_n = g_n e_n with g_n the weighted canonical solution on V1."""
    return HankelSweep(d, symbol, resolution, degree).mode(n)[0]


def hankel_mode_norm_ratio(d, symbol=None, n=2, resolution=128, degree=DEFAULT_DEGREE):
    """||g_n||_{lambda_n} / ||1||_{lambda_n}: the relative size of H_psi on the mode e_n."""
    return HankelSweep(d, symbol, resolution, degree).norm_ratio(n)


def hankel_sequences(d, modes, symbol=None, resolution=128, degree=DEFAULT_DEGREE):
    """Per-mode norm ratios and probe triples, reusing one grid and Cauchy transform."""
    sweep = HankelSweep(d, symbol, resolution, degree)
    rows = []
    for n in modes:
        q, s, t = sweep.probe_triple(n)
        rows.append((int(n), math.sqrt(q), q, s, t))
    return rows


# ---------------------------------------------------------------------------
# 2D cross-check of the mode reduction


@dataclass
class ModeReductionReport:
    n: int
    mode: int
    degree: int
    cross_mode_max: float
    pairing_rel_err: float
    deviation: float
    norm_identity_err: float
    ok: bool


def _fiber_nodes(d, z, n_radial):
    x, w = np.polynomial.legendre.leggauss(n_radial)
    r_in, r_out = d.radii(d.base.clamp(z))
    mid, half = 0.5 * (r_in + r_out), 0.5 * (r_out - r_in)
    r = mid[:, None] + half[:, None] * x[None, :]
    # area element of the w-plane: r dr dtheta
    return r, half[:, None] * w[None, :] * r


def verify_mode_reduction(d, symbol=None, n=3, degree=6, mode_span=3, resolution=64, n_radial=24,
                          n_theta=16, tol=1e-4, pairing_tol=1e-8):
    """Compare the 1D weighted reduction of H_psi e_n with a direct 2D computation on the Hartogs domain.

    The 2D family is ``z^k w^m``, k <= degree, |m - mode| <= mode_span, plus
    ``g_n e_n`` and ``psi e_n``; its Gram matrix is assembled by quadrature
    over (z nodes) x (Gauss radial nodes per fiber) x (uniform angles).
    """
    if n_theta <= 2 * mode_span:
        raise PreconditionError("angular rule too coarse for the mode span")
    if len(np.atleast_1d(resolution)) != 1 or resolution > 256:
        raise PreconditionError("quadrature budget exceeded: resolution must be <= 256")
    sweep = HankelSweep(d, symbol, resolution, degree)
    grid = sweep.grid
    mf, fw = sweep.mode(n)
    mode = mf.mode
    nodes = grid.nodes
    zc = nodes.z - d.center
    ks = np.arange(degree + 1)
    ms = np.arange(mode - mode_span, mode + mode_span + 1)
    kk, mm = np.meshgrid(ks, ms, indexing="ij")
    kk, mm = kk.ravel(), mm.ravel()
    zpart = np.concatenate([zc[:, None] ** kk[None, :], mf.g.nodal[:, None],
                            sweep.particular.nodal[:, None]], axis=1)
    modes = np.concatenate([mm, [mode, mode]])
    rn, rw = _fiber_nodes(d, nodes.z, n_radial)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    tw = np.full(n_theta, 2 * np.pi / n_theta)
    gram = separable_gram(zpart, modes, nodes.w, rn, rw, th, tw)

    nf = kk.size
    ig, ipsi = nf, nf + 1
    diag = np.sqrt(np.abs(np.diag(gram)))
    # (i) cross-mode pairings of g_n e_n with z^k w^m, m != mode
    cross = np.abs(gram[ig, :nf]) / (diag[ig] * diag[:nf])
    cross_max = float(np.max(cross[mm != mode])) if np.any(mm != mode) else 0.0
    # (ii) same-mode pairings against the weighted 1D pairing
    w1, top = _weights(grid, fw)
    same = mm == mode
    one_d = (w1 * mf.g.nodal) @ np.conj(zc[:, None] ** kk[same][None, :]) * math.exp(top)
    two_d = gram[ig, :nf][same]
    pairing = float(np.max(np.abs(two_d - one_d)) / (diag[ig] * np.max(diag[:nf][same])))
    # (iii) (I - B)(psi e_n) on the truncated family versus g_n e_n from the degree-truncated 1D solve
    g_trunc = canonical_solution(grid, fw, sweep.beta, degree, center=d.center,
                                 particular=sweep.particular)
    zpart_t = zpart.copy()
    zpart_t[:, ig] = g_trunc.nodal
    gram_t = separable_gram(zpart_t, modes, nodes.w, rn, rw, th, tw)
    gff = gram_t[:nf, :nf]
    rhs = gram_t[ipsi, :nf]
    coef = scipy.linalg.lstsq(gff.T, rhs)[0]
    a = np.zeros(nf + 2, dtype=complex)
    a[:nf] = -coef
    a[ig] = -1.0
    a[ipsi] = 1.0
    dev2 = float(np.real(a @ gram_t @ np.conj(a)))
    deviation = math.sqrt(max(dev2, 0.0) / float(np.real(gram_t[ig, ig])))
    # norm identity: 2D ||g_n e_n||^2 against the 1D weighted integral
    one_norm = float(np.sum(w1 * np.abs(mf.g.nodal) ** 2)) * math.exp(top)
    norm_err = abs(float(np.real(gram[ig, ig])) - one_norm) / one_norm if one_norm > 0 else 0.0
    ok = cross_max <= pairing_tol and pairing <= pairing_tol and deviation <= tol and norm_err <= 1e-6
    return ModeReductionReport(int(n), int(mode), int(degree), cross_max, pairing, deviation, norm_err, ok)


# ---------------------------------------------------------------------------
# compactness-estimate probe


CONSISTENT = "consistent-with-compact"
VIOLATES = "violates-estimate"
INCONCLUSIVE = "inconclusive"
DEFAULT_EPSILONS = (0.5, 0.25, 0.1, 0.05, 0.025, 0.01)
GROWTH_FACTOR = 4.0
DECAY_FACTOR = 0.25


@dataclass
class CompactnessProbe:
    modes: list
    q: list
    s: list
    t: list
    epsilons: list
    c_eps: dict
    running: dict = field(repr=False)
    verdict: str = INCONCLUSIVE
    reason: str = ""


def compactness_probe(q, s, t, epsilons=DEFAULT_EPSILONS, modes=None):
    """Fit C_eps = max_n max(q_n - eps s_n, 0) / t_n and classify the trend.

    violates-estimate: for some eps the running requirement
    ``c_eps(n) = max(q_n - eps s_n, 0) / t_n`` is nondecreasing over the last
    half of the sequence and its last value exceeds 4x its first positive
    value. consistent-with-compact: the last q/s is at most 1/4 of the max.
    """
    q, s, t = (np.asarray(x, dtype=float) for x in (q, s, t))
    if not (q.shape == s.shape == t.shape) or q.ndim != 1:
        raise PreconditionError("q, s, t must be sequences of the same length")
    if q.size < 8:
        raise PreconditionError("the probe needs at least 8 modes")
    if np.any(s <= 0):
        raise PreconditionError("s_n must be positive")
    if np.any(q < 0) or np.any(t < 0):
        raise PreconditionError("q_n and t_n must be nonnegative")
    if modes is None:
        modes = list(range(1, q.size + 1))
    c_eps, running = {}, {}
    violated = []
    half = q.size // 2
    for eps in epsilons:
        num = np.maximum(q - eps * s, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.where(num > 0, num / np.where(t > 0, t, 1.0), 0.0)
        c = np.where((num > 0) & (t == 0), np.inf, c)
        running[eps] = c.tolist()
        c_eps[eps] = float(np.max(c))
        tail = c[half:]
        pos = c[c > 0]
        if pos.size and np.all(np.diff(tail) >= 0) and tail[-1] > GROWTH_FACTOR * pos[0]:
            violated.append(eps)
    ratio = q / s
    if violated:
        verdict = VIOLATES
        reason = (f"C_eps requirement grows monotonically (>{GROWTH_FACTOR:g}x) for eps in "
                  f"{sorted(violated)}")
    elif ratio[-1] <= DECAY_FACTOR * ratio.max():
        verdict = CONSISTENT
        reason = f"q/s decays: last {ratio[-1]:.4g} <= {DECAY_FACTOR:g} x max {ratio.max():.4g}"
    else:
        verdict = INCONCLUSIVE
        reason = f"no growth of C_eps and q/s last/max = {ratio[-1] / ratio.max():.4g}"
    return CompactnessProbe(list(modes), q.tolist(), s.tolist(), t.tolist(), list(epsilons), c_eps,
                            running, verdict, reason)


def probe_domain(d, modes, symbol=None, resolution=128, degree=DEFAULT_DEGREE, epsilons=DEFAULT_EPSILONS):
    rows = hankel_sequences(d, modes, symbol, resolution, degree)
    q = [r[2] for r in rows]
    s = [r[3] for r in rows]
    t = [r[4] for r in rows]
    return rows, compactness_probe(q, s, t, epsilons, [r[0] for r in rows])
