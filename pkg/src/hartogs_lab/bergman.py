"""Weighted Bergman spaces A^2(V, lambda) on planar grids and the canonical dbar solution.

Fiber weights reduce a mode ``g(z) w^n`` on the Hartogs domain to a one
variable problem: ``||g w^n||^2 = int |g|^2 e^{-lambda_n}`` with ``e^{-lambda_n}``
the radial moment of the (normalized) fiber annulus. Case 1 uses the mode
``w^{-n}``, case 2 the mode ``w^n``.

A^2(V, lambda) is discretized by monomials ``(z - z0)^k`` orthonormalized by a
pivoted QR factorization of the weighted Vandermonde matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .cauchy import cauchy_particular
from .errors import IllConditionedGramError, PreconditionError
from .logspace import LogValue, log_diff_exp
from .moments import log_radial_moment

DEFAULT_DEGREE = 24
CONDITION_CAP = 1e12

__all__ = [
    "FiberWeight", "fiber_weight", "min_mode", "weight_sandwich_check", "SandwichReport",
    "GridFunction", "particular_solution", "WeightedBasis", "weighted_gram", "cauchy_particular", "canonical_solution",
    "orthogonality_residual", "weighted_norm", "fiber_moment_log_weight", "one_norm_bound_check", "OneNormReport",
]


def min_mode(case_tag):
    return 2 if case_tag == 1 else 0


def _exponent(case_tag, n):
    # e^{-lambda_n} = pi/|p/2| * (e^{p phi} - e^{p alpha}) with p as below
    return 2 * n - 2 if case_tag == 1 else -(2 * n + 2)


@dataclass
class FiberWeight:
    """lambda_n sampled on a grid, kept as ``log_weight = log e^{-lambda_n} = -lambda_n``."""

    n: int
    case_tag: int
    grid: object = field(repr=False)
    log_weight: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    log_weight_nodes: np.ndarray = field(default=None, repr=False)

    @property
    def lam(self):
        return -self.log_weight

    def value(self, i, j):
        """e^{-lambda_n} at one node as a LogValue."""
        return LogValue(float(self.log_weight[i, j]), 1)

    def weight(self):
        """e^{-lambda_n} as floats (may overflow to inf for extreme n)."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_weight)


def _log_weight(phi, alpha, case_tag, n):
    p = _exponent(case_tag, n)
    # the active exponent dominates: e^{p phi} > e^{p alpha}
    return math.log(math.pi / abs(p / 2)) + log_diff_exp(p * phi, p * alpha)


def fiber_weight(d, n, grid, normalized=False):
    """FiberWeight of mode n for domain ``d`` on ``grid``.

    Physical fibers by default; ``normalized=True`` uses the rescaled fibers,
    which only shifts lambda_n by the constant ``p * log(fiber_scale)``.
    """
    n = int(n)
    if n < min_mode(d.case_tag):
        raise PreconditionError(
            f"case-{d.case_tag} weights need n >= {min_mode(d.case_tag)}, got n={n}")
    z = d.base.clamp(grid.Z)
    phi = d.phi(z, normalized=normalized)
    alpha = d.alpha(z, normalized=normalized)
    zn = d.base.clamp(grid.nodes.z)
    nodal = _log_weight(d.phi(zn, normalized=normalized), d.alpha(zn, normalized=normalized),
                        d.case_tag, n)
    return FiberWeight(n, d.case_tag, grid, _log_weight(phi, alpha, d.case_tag, n), phi, alpha, nodal)


def fiber_moment_log_weight(d, n, grid, normalized=False):
    """Same weight through the annulus radial moment; an independent consistency path."""
    z = d.base.clamp(grid.Z)
    r_in, r_out = d.radii(z, normalized=normalized)
    return log_radial_moment(r_in, r_out, -n if d.case_tag == 1 else n)


@dataclass
class SandwichReport:
    n0: int
    c: float
    ratio_max: float
    predicted_n0: int
    holds_upper: bool


def weight_sandwich_check(fw, c, n_max=None):
    """Smallest n0 with pi/(2k) e^{p phi} < e^{-lambda_n} < pi/k e^{p phi} on every node, n >= n0.

    Here ``p`` is the mode exponent and ``k = |p|/2``. ``c`` must bound the
    fiber ratio r_in / r_out on the grid.
    """
    if not 0 < c < 1:
        raise PreconditionError(f"c must lie in (0, 1), got {c}")
    sel = fw.grid.support
    phi, alpha = fw.phi[sel], fw.alpha[sel]
    ratio = np.exp(-phi + alpha) if fw.case_tag == 1 else np.exp(phi - alpha)
    q = float(ratio.max())
    if q > c * (1 + 1e-12):
        raise PreconditionError(f"c={c} not certified: max fiber ratio on the grid is {q:.6g}")
    nmin = min_mode(fw.case_tag)
    # c^{2k} <= 1/2 with k = |p|/2 settles the lower bound
    k_needed = math.log(2.0) / (-2.0 * math.log(c))
    shift = 1 if fw.case_tag == 1 else -1
    predicted = max(nmin, math.ceil(k_needed + shift - 1e-12))
    if n_max is None:
        n_max = predicted + 2
    n0, upper_ok = None, True
    for n in range(nmin, n_max + 1):
        p = _exponent(fw.case_tag, n)
        logw = _log_weight(phi, alpha, fw.case_tag, n)
        top = math.log(math.pi / abs(p / 2)) + p * phi
        lower = np.all(logw > top - math.log(2.0))
        upper = np.all(logw < top)
        upper_ok &= bool(upper)
        if lower and upper:
            if n0 is None:
                n0 = n
        else:
            n0 = None
    if n0 is None:
        n0 = n_max + 1
    return SandwichReport(n0, float(c), q, predicted, upper_ok)


# ---------------------------------------------------------------------------
# weighted monomial bases


@dataclass
class GridFunction:
    """Values at cell centres plus values at the grid's quadrature nodes."""

    grid: object = field(repr=False)
    values: np.ndarray = field(repr=False)
    nodal: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def nodal_values(g, grid):
    if isinstance(g, GridFunction):
        return g.nodal
    if np.ndim(g) == 0:
        return np.full(grid.nodes.z.shape, complex(g))
    return grid.sample(g).astype(complex)


def nodal_log_weight(grid, log_weight):
    """-lambda at the quadrature nodes from a scalar, a grid array or a FiberWeight."""
    if isinstance(log_weight, FiberWeight):
        return log_weight.log_weight_nodes
    if np.ndim(log_weight) == 0:
        return np.full(grid.nodes.z.shape, float(log_weight))
    return grid.sample(log_weight).astype(float)


def _weights(grid, log_weight):
    lw = nodal_log_weight(grid, log_weight)
    top = float(lw.max())
    return grid.nodes.w * np.exp(lw - top), top


@dataclass
class WeightedBasis:
    """Orthonormalized monomials ``(z - center)^k``, k = 0..degree, in the lambda-inner product."""

    grid: object = field(repr=False)
    degree: int
    center: complex
    gram: np.ndarray = field(repr=False)
    condition: float
    pivots: np.ndarray
    sqrt_w: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    col_scale: np.ndarray = field(repr=False)
    log_scale: float = 0.0

    def vandermonde(self, z):
        return (np.asarray(z) - self.center)[..., None] ** np.arange(self.degree + 1)

    def coefficients(self, g):
        """Monomial coefficients of the weighted projection of g (nodal values)."""
        rhs = self.q.conj().T @ (self.sqrt_w * np.asarray(g, dtype=complex))
        c = scipy.linalg.solve_triangular(self.r, rhs)
        out = np.zeros(self.degree + 1, dtype=complex)
        out[self.pivots] = c
        return out / self.col_scale

    def project(self, g):
        """P_lambda g as a GridFunction."""
        coef = self.coefficients(nodal_values(g, self.grid))
        return GridFunction(self.grid, self.vandermonde(self.grid.Z) @ coef,
                            self.vandermonde(self.grid.nodes.z) @ coef)


def weighted_gram(grid, log_weight, degree=DEFAULT_DEGREE, center=None, cap=CONDITION_CAP):
    """Gram of monomials in ``<f, g> = sum f conj(g) e^{-lambda} dA`` and its orthonormalizer.

    ``log_weight`` is ``-lambda`` (a scalar, a grid array or a FiberWeight).
    The weight is rescaled by its maximum before factorizing; ``gram`` is
    returned in the original scale when that is representable.
    """
    if degree < 0:
        raise PreconditionError("degree must be >= 0")
    if center is None:
        center = grid.region.center
    w, top = _weights(grid, log_weight)
    if not np.all(np.isfinite(w)) or not np.any(w > 0):
        raise PreconditionError("weight must be positive and finite on the grid")
    vand = (grid.nodes.z - center)[:, None] ** np.arange(degree + 1)
    sw = np.sqrt(w)
    a = sw[:, None] * vand
    col = np.linalg.norm(a, axis=0)
    if np.any(col == 0):
        raise IllConditionedGramError("a monomial has zero weighted norm; reduce the degree")
    a = a / col
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    sv = np.linalg.svd(r, compute_uv=False)
    cond = float((sv[0] / sv[-1]) ** 2) if sv[-1] > 0 else math.inf
    if not cond <= cap:
        raise IllConditionedGramError(
            f"equilibrated Gram condition {cond:.3e} exceeds {cap:.1e} at degree {degree}; "
            "reduce the degree")
    gram = (vand.T * w) @ vand.conj()
    with np.errstate(over="ignore"):
        scale = math.exp(top) if top < 700 else 1.0
    return WeightedBasis(grid, degree, complex(center), gram * scale, cond, piv, sw, q, r, col, top)


def particular_solution(beta, grid):
    """Cauchy transform of beta as a GridFunction (cell centres and quadrature nodes)."""
    from .cauchy import cauchy_at_nodes

    g0 = cauchy_particular(beta, grid)
    if not np.any(g0):
        return GridFunction(grid, g0, np.zeros(grid.nodes.z.shape, dtype=complex))
    return GridFunction(grid, g0, cauchy_at_nodes(beta, grid, on_grid=g0))


def canonical_solution(grid, log_weight, beta, degree=DEFAULT_DEGREE, center=None, basis=None,
                       particular=None):
    """Minimal-norm solution of dg/dzbar = beta in L^2(V, e^{-lambda}): (I - P_lambda) T beta.

    ``particular`` may carry a precomputed :func:`particular_solution` of beta.
    """
    g0 = particular if particular is not None else particular_solution(beta, grid)
    if not np.any(g0.nodal) and not np.any(g0.values):
        return g0
    if basis is None:
        basis = weighted_gram(grid, log_weight, degree, center)
    p = basis.project(g0)
    return GridFunction(grid, g0.values - p.values, g0.nodal - p.nodal)


def weighted_norm(g, grid, log_weight):
    w, top = _weights(grid, log_weight)
    return math.sqrt(float(np.sum(w * np.abs(nodal_values(g, grid)) ** 2))) * math.exp(0.5 * top)


def orthogonality_residual(g, grid, log_weight, degree=DEFAULT_DEGREE, center=None):
    """max_k |<g, z^k>| / (||g|| ||z^k||) in the lambda-inner product."""
    if center is None:
        center = grid.region.center
    w, _ = _weights(grid, log_weight)
    gv = nodal_values(g, grid)
    vand = (grid.nodes.z - center)[:, None] ** np.arange(degree + 1)
    gnorm = math.sqrt(float(np.sum(w * np.abs(gv) ** 2)))
    if gnorm == 0:
        return 0.0
    pair = np.abs((w * gv) @ vand.conj())
    norms = np.sqrt(np.sum(w[:, None] * np.abs(vand) ** 2, axis=0))
    return float(np.max(pair / (gnorm * norms)))


@dataclass
class OneNormReport:
    ns: list
    norms: list
    bounds: list
    margins: list
    ok: bool
    a1: float


def one_norm_bound_check(d, ns, grid=None, resolution=128):
    """Check ||1||_{L^2(V1, lambda_n)} <= pi a1 / sqrt(n - 1) for case-1 weights."""
    if d.case_tag != 1:
        raise PreconditionError("the one-norm bound is stated for case-1 weights")
    if grid is None:
        from .domain import make_grid
        grid = make_grid(d.v1_region(), resolution)
    norms, bounds, margins = [], [], []
    for n in ns:
        fw = fiber_weight(d, n, grid)
        # certification: e^{(2n-2)phi} - e^{(2n-2)alpha} <= 1, i.e. the weight <= pi/(n-1)
        if np.any(fw.log_weight_nodes > math.log(math.pi / (n - 1)) + 1e-12):
            raise PreconditionError(f"weight certification failed at n={n}")
        val = weighted_norm(1.0, grid, fw)
        bound = math.pi * d.a1 / math.sqrt(n - 1)
        norms.append(val)
        bounds.append(bound)
        margins.append(bound - val)
    return OneNormReport(list(ns), norms, bounds, margins, all(m > 0 for m in margins), d.a1)
