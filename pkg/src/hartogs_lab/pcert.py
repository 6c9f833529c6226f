"""Checks of bounded plurisubharmonic certificates on boundary strata.

The candidate is ``g(z, w) = M1 (|w|^2 e^{phi(z)} - 1) + b_M(z)`` with phi the
active profile exponent. A check passes when ``|g| <= 1`` on the samples and
the complex Hessian along unit complex-tangential directions is at least M.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import boundary_samples, make_grid, StratumSample
from .errors import PreconditionError

HESSIAN_STEP = 1e-2
GRADIENT_STEP = 1e-3


# ---------------------------------------------------------------------------
# b_M candidates


@dataclass(frozen=True)
class ZeroBump:
    name: str = "zero"

    def __call__(self, z):
        return np.zeros(np.shape(z))


@dataclass(frozen=True)
class SmoothstepBump:
    """``amp * (S(|z - c|^2 / R^2) - 1/2)`` with the ramp ``S(t) = 1 - (1 - t)^3`` on [0, 1], 1 beyond.

    Values lie in [-amp/2, amp/2]; the Laplacian near c is 12 amp / R^2.
    """

    center: complex = 0j
    radius: float = 1.0
    amp: float = 1.0
    name: str = "smoothstep-bump"

    def __call__(self, z):
        t = np.clip(np.abs(np.asarray(z) - self.center) ** 2 / self.radius ** 2, 0.0, 1.0)
        return self.amp * ((1.0 - (1.0 - t) ** 3) - 0.5)


@dataclass
class CertificateSpec:
    M: float
    M1: float
    b_M: object = field(default_factory=ZeroBump)

    def __post_init__(self):
        if not (self.M > 0 and self.M1 > 0):
            raise PreconditionError("M and M1 must be positive")


def make_certificate(M, M1, b_M=None, base=None, resolution=64):
    """CertificateSpec after checking |b_M| <= 1/2 on a grid over ``base``."""
    spec = CertificateSpec(float(M), float(M1), b_M if b_M is not None else ZeroBump())
    if base is not None:
        grid = make_grid(base, resolution)
        vals = np.abs(spec.b_M(grid.Z[grid.mask]))
        if np.max(vals) > 0.5 + 1e-12:
            raise PreconditionError(f"|b_M| reaches {np.max(vals):.4g} > 1/2 on the base")
    return spec


def certificate_function(spec, d, z, w):
    """M1 (|w|^2 e^{phi(z)} - 1) + b_M(z)."""
    z = np.asarray(z, dtype=complex)
    phi = d.active.value(z)
    if not np.all(np.isfinite(phi)):
        raise PreconditionError(f"phi is not evaluable at z={z}")
    return spec.M1 * (np.abs(w) ** 2 * np.exp(phi) - 1.0) + spec.b_M(z)


# ---------------------------------------------------------------------------
# derivatives


def _wirtinger(f, p, k, step=GRADIENT_STEP):
    """d f / d p_k (complex) at p by fourth-order differences of the real and imaginary parts."""
    def partial(direction):
        e = np.zeros(2, dtype=complex)
        e[k] = direction
        return (8.0 * (f(p + step * e) - f(p - step * e))
                - (f(p + 2 * step * e) - f(p - 2 * step * e))) / (12.0 * step)
    return 0.5 * (partial(1.0) - 1j * partial(1j))


def complex_hessian(f, p, W, step=HESSIAN_STEP):
    """Levi form sum f_{j kbar} W_j conj(W_k) as |W|^2 / 4 times the Laplacian of tau -> f(p + tau W/|W|)."""
    W = np.asarray(W, dtype=complex)
    nw = float(np.linalg.norm(W))
    u = W / nw
    lap = -60.0 * f(p)
    for d in (1.0, 1j):
        lap += 16.0 * (f(p + step * d * u) + f(p - step * d * u))
        lap -= f(p + 2 * step * d * u) + f(p - 2 * step * d * u)
    lap /= 12.0 * step * step
    return 0.25 * nw * nw * lap


def _defining_function(d, side):
    if side == "outer":
        return lambda p: abs(p[1]) - float(d.outer.radius(p[0]))
    return lambda p: float(d.inner.radius(p[0])) - abs(p[1])


def tangent_direction(d, z, w, side):
    """Unit W with d rho(W) = 0 from numerical Wirtinger derivatives of rho; phase fixed so W_z >= 0."""
    rho = _defining_function(d, side)
    p = np.array([z, w], dtype=complex)
    rz, rw = _wirtinger(rho, p, 0), _wirtinger(rho, p, 1)
    grad = math.hypot(abs(rz), abs(rw))
    W = np.array([rw, -rz], dtype=complex)
    # fix the free unit phase (W_z real >= 0) so the difference stencil turns with w -> e^{it} w
    lead = W[0] if abs(W[0]) > 1e-14 * grad else W[1]
    if lead != 0:
        W = W * (abs(lead) / lead)
    return (W / grad if grad > 0 else W), grad


# ---------------------------------------------------------------------------
# checks


@dataclass
class SampleHessian:
    z: complex
    w: complex
    side: str
    g: float
    hessian: float
    tangency: float


@dataclass
class PropertyPCheck:
    M: float
    M1: float
    b_name: str
    max_abs_g: float
    min_hessian: float
    passed: bool
    samples: list = field(repr=False)
    rejected: list = field(repr=False)


def _side(d, z, r, tol=1e-8):
    r_in, r_out = (float(x) for x in d.radii(z))
    scale = max(1.0, r_out)
    if abs(r - r_out) <= tol * scale:
        return "outer"
    if abs(r - r_in) <= tol * scale:
        return "inner"
    raise PreconditionError(f"sample (z={z}, |w|={r}) is not on the fiber boundary")


def tangential_hessian_check(d, spec, samples=None, side="both", grad_tol=1e-8, tol=1e-9,
                             step=HESSIAN_STEP, phase=0.0):
    """Min tangential complex Hessian and max |g| of the certificate over boundary samples.

    ``samples`` are (z, |w|) pairs or StratumSample objects; each is placed at
    ``w = |w| e^{i phase}``. Samples with a degenerate gradient are rejected.
    """
    if samples is None:
        samples = boundary_samples(d, side=side)
    f = lambda p: float(certificate_function(spec, d, p[0], p[1]))
    rows, rejected = [], []
    for smp in samples:
        if isinstance(smp, StratumSample):
            z, r = smp.z, smp.r
        else:
            z, r = smp
        z = complex(z)
        s = _side(d, z, float(r))
        w = float(r) * complex(math.cos(phase), math.sin(phase))
        W, grad = tangent_direction(d, z, w, s)
        if grad < grad_tol:
            rejected.append((z, r, "degenerate gradient"))
            continue
        rho = _defining_function(d, s)
        p = np.array([z, w], dtype=complex)
        tang = abs(_wirtinger(rho, p, 0) * W[0] + _wirtinger(rho, p, 1) * W[1])
        rows.append(SampleHessian(z, w, s, f(p), float(complex_hessian(f, p, W, step).real), tang))
    if not rows:
        raise PreconditionError("no usable samples")
    gmax = max(abs(r.g) for r in rows)
    hmin = min(r.hessian for r in rows)
    passed = gmax <= 1.0 + tol and hmin >= spec.M - tol
    name = getattr(spec.b_M, "name", type(spec.b_M).__name__)
    return PropertyPCheck(spec.M, spec.M1, name, gmax, hmin, passed, rows, rejected)


def sweep_m1(d, M, samples, b_M=None, m1_grid=None, step=HESSIAN_STEP):
    """Run the check over a log grid of M1; returns (all checks, first passing check or None)."""
    if m1_grid is None:
        m1_grid = np.logspace(-2, 2, 41)
    checks = []
    for m1 in m1_grid:
        spec = CertificateSpec(float(M), float(m1), b_M if b_M is not None else ZeroBump())
        checks.append(tangential_hessian_check(d, spec, samples, step=step))
    passing = [c for c in checks if c.passed]
    return checks, (passing[0] if passing else None)
