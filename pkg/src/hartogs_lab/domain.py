"""Hartogs domains over planar bases: regions, radial profiles, grids, strata.

A fiber radius is stored through its exponent: a profile value ``e(z)``
describes the circle ``|w| = exp(-e(z))``. With this convention the inner
profile of a case-1 domain is the function called phi in the boundary
representation ``|w| = e^{-phi(z)}``, and the outer profile is the cap alpha.
Case-2 domains swap the roles.
"""

import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, PreconditionError, ProfileCrossingError

# ---------------------------------------------------------------------------
# planar regions built from circle constraints


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    keep_inside: bool = True


@dataclass(frozen=True)
class Region:
    """Intersection of discs and disc complements.

    The level set ``max_i s_i (|z - c_i| - r_i)`` is negative inside and is a
    1-Lipschitz distance-like function, which the grid code relies on.
    """

    circles: tuple
    name: str = ""

    def __post_init__(self):
        if not self.circles:
            raise DomainError("region needs at least one circle constraint")
        if not any(c.keep_inside for c in self.circles):
            raise DomainError("region is unbounded (no enclosing circle)")
        for c in self.circles:
            if not c.radius > 0:
                raise DomainError(f"non-positive circle radius {c.radius}")

    def levelset(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, -np.inf)
        for c in self.circles:
            s = 1.0 if c.keep_inside else -1.0
            out = np.maximum(out, s * (np.abs(z - c.center) - c.radius))
        return out

    def contains(self, z, tol=0.0):
        return self.levelset(z) < tol

    def bbox(self):
        lo_x = lo_y = -np.inf
        hi_x = hi_y = np.inf
        for c in self.circles:
            if c.keep_inside:
                lo_x = max(lo_x, c.center.real - c.radius)
                hi_x = min(hi_x, c.center.real + c.radius)
                lo_y = max(lo_y, c.center.imag - c.radius)
                hi_y = min(hi_y, c.center.imag + c.radius)
        if not (hi_x > lo_x and hi_y > lo_y):
            raise DomainError(f"region {self.name or self.circles} is empty")
        return lo_x, hi_x, lo_y, hi_y

    @property
    def diameter(self):
        lo_x, hi_x, lo_y, hi_y = self.bbox()
        return math.hypot(hi_x - lo_x, hi_y - lo_y) / math.sqrt(2.0)

    @property
    def center(self):
        return next(c.center for c in self.circles if c.keep_inside)

    def exit_distance(self, z, direction, tmax):
        """Distance from interior points ``z`` along unit ``direction`` to the boundary, capped at tmax."""
        z = np.asarray(z, dtype=complex)
        d = complex(direction)
        out = np.full(z.shape, float(tmax))
        for c in self.circles:
            p = z - c.center
            b = p.real * d.real + p.imag * d.imag
            cc = np.abs(p) ** 2 - c.radius ** 2
            disc = b * b - cc
            root = np.sqrt(np.maximum(disc, 0.0))
            if c.keep_inside:
                t = -b + root
                hit = disc >= 0
            else:
                t = -b - root
                hit = (disc >= 0) & (t >= 0)
            out = np.where(hit, np.minimum(out, np.maximum(t, 0.0)), out)
        return out

    def clamp(self, z, inset=1e-12):
        """Move points outside the closure radially onto the nearest violated circle."""
        z = np.array(z, dtype=complex)
        for _ in range(3):
            for c in self.circles:
                p = z - c.center
                rad = np.abs(p)
                u = np.where(rad > 0, p / np.where(rad > 0, rad, 1.0), 1.0)
                if c.keep_inside:
                    bad = rad > c.radius
                    target = c.radius * (1.0 - inset)
                else:
                    bad = rad < c.radius
                    target = c.radius * (1.0 + inset)
                z = np.where(bad, c.center + target * u, z)
        return z


def disc(center=0j, radius=1.0):
    return Region((Circle(complex(center), float(radius), True),), name=f"disc({complex(center)},{radius})")


def annulus(center=0j, inner=0.5, outer=1.0):
    if not 0 < inner < outer:
        raise DomainError(f"annulus needs 0 < inner < outer, got {inner}, {outer}")
    c = complex(center)
    return Region((Circle(c, float(outer), True), Circle(c, float(inner), False)),
                  name=f"annulus({c},{inner},{outer})")


def intersect(*regions):
    circles = []
    for r in regions:
        for c in r.circles:
            if c not in circles:
                circles.append(c)
    return Region(tuple(circles), name=" & ".join(r.name for r in regions))


def parse_region(text):
    """Parse ``disc(x, y, r)`` or ``annulus(x, y, r_in, r_out)``."""
    name, args = _parse_call(text)
    if name == "disc" and len(args) == 3:
        return disc(complex(args[0], args[1]), args[2])
    if name == "annulus" and len(args) == 4:
        return annulus(complex(args[0], args[1]), args[2], args[3])
    raise DomainError(f"unrecognized region descriptor {text!r}")


def _parse_call(text):
    m = re.fullmatch(r"\s*([A-Za-z][\w-]*)\s*\((.*)\)\s*", text)
    if not m:
        raise DomainError(f"expected name(args...), got {text!r}")
    body = m.group(2).strip()
    args = [float(a) for a in body.split(",")] if body else []
    return m.group(1), args


# ---------------------------------------------------------------------------
# radial profiles


def _smooth_ramp(t, delta):
    """C^2 convex ramp: 0 for t <= 0, t - delta for t >= 2*delta; returns (s, s', s'')."""
    t = np.asarray(t, dtype=float)
    d2 = delta * delta
    s = np.zeros_like(t)
    s1 = np.zeros_like(t)
    s2 = np.zeros_like(t)
    a = (t > 0) & (t <= delta)
    s[a] = t[a] ** 3 / (6 * d2)
    s1[a] = t[a] ** 2 / (2 * d2)
    s2[a] = t[a] / d2
    b = (t > delta) & (t < 2 * delta)
    u = 2 * delta - t[b]
    s[b] = t[b] - delta + u ** 3 / (6 * d2)
    s1[b] = 1.0 - u ** 2 / (2 * d2)
    s2[b] = u / d2
    c = t >= 2 * delta
    s[c] = t[c] - delta
    s1[c] = 1.0
    return s, s1, s2


def _constant(p, u, r2):
    zero = np.zeros(u.shape)
    return np.full(u.shape, p[0]), zero.astype(complex), zero


def _quadratic(p, u, r2):
    c = p[0]
    return c * r2, c * np.conj(u), np.full(u.shape, 4.0 * c)


def _ellipsoid_cap(p, u, r2):
    a1, b1 = p
    q = a1 * a1 - r2
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.where(q > 0, math.log(a1) - math.log(b1) - 0.5 * np.log(np.where(q > 0, q, 1.0)), np.nan)
        dz = np.where(q > 0, np.conj(u) / (2.0 * q), np.nan)
        lap = np.where(q > 0, 2.0 / q + 2.0 * r2 / q ** 2, np.nan)
    return v, dz, lap


def _paraboloid_cap(p, u, r2):
    a1, b1 = p
    q = b1 * r2 + a1
    return -np.log(q), -b1 * np.conj(u) / q, -4.0 * a1 * b1 / q ** 2


def _mollified_plateau(p, u, r2):
    t0, delta = p[0], p[1]
    amp = p[2] if len(p) > 2 else 1.0
    s, s1, s2 = _smooth_ramp(r2 - t0, delta)
    return -amp * s, -amp * s1 * np.conj(u), -amp * (4.0 * s1 + 4.0 * r2 * s2)


# family name -> (required parameter names, optional parameter defaults, evaluator)
PROFILE_FAMILIES = {
    "constant": (("c",), {}, _constant),
    "quadratic-radial": (("c",), {}, _quadratic),
    "ellipsoid-cap": (("a1", "b1"), {}, _ellipsoid_cap),
    "paraboloid-cap": (("a1", "b1"), {}, _paraboloid_cap),
    "mollified-plateau": (("t0", "delta"), {"amplitude": 1.0}, _mollified_plateau),
}


@dataclass(frozen=True)
class RadialProfile:
    """Exponent ``e(z)`` of a fiber circle ``|w| = exp(-e(z))``.

    ``value``, ``dz`` (complex derivative d/dz) and ``laplacian`` are
    analytic; :meth:`numeric_laplacian` is the independent check.
    """

    family: str
    params: tuple
    center: complex = 0j

    def __post_init__(self):
        if self.family not in PROFILE_FAMILIES:
            raise DomainError(f"unknown profile family {self.family!r}; known: {sorted(PROFILE_FAMILIES)}")
        req, opt, _ = PROFILE_FAMILIES[self.family]
        if not len(req) <= len(self.params) <= len(req) + len(opt):
            raise DomainError(f"{self.family} takes parameters {req + tuple(opt)}, got {self.params}")
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        object.__setattr__(self, "center", complex(self.center))
        if self.family in ("ellipsoid-cap", "paraboloid-cap") and min(self.params) <= 0:
            raise DomainError(f"{self.family} needs positive a1, b1")
        if self.family == "mollified-plateau" and self.params[1] <= 0:
            raise DomainError("mollified-plateau needs delta > 0")

    def _eval(self, z):
        u = np.asarray(z, dtype=complex) - self.center
        return PROFILE_FAMILIES[self.family][2](self.params, u, np.abs(u) ** 2)

    def value(self, z):
        return self._eval(z)[0]

    def dz(self, z):
        return self._eval(z)[1]

    def laplacian(self, z):
        return self._eval(z)[2]

    def radius(self, z):
        return np.exp(-self.value(z))

    def numeric_laplacian(self, z, step=1e-3):
        """Fourth-order centered five-point-per-axis Laplacian of :meth:`value`."""
        z = np.asarray(z, dtype=complex)
        total = -60.0 * self.value(z)
        for d in (1.0, 1j):
            total = total + 16.0 * (self.value(z + step * d) + self.value(z - step * d))
            total = total - (self.value(z + 2 * step * d) + self.value(z - 2 * step * d))
        return total / (12.0 * step * step)

    def sign_class(self, z, step=1e-3, tol=1e-6):
        """Classify by sampled numerical Laplacian: harmonic, subharmonic, superharmonic or mixed."""
        lap = np.asarray(self.numeric_laplacian(z, step))
        if not np.all(np.isfinite(lap)):
            raise DomainError(f"{self.family} is not evaluable at every sample point")
        scale = tol * max(1.0, float(np.max(np.abs(lap))))
        lo, hi = lap.min(), lap.max()
        if lo >= -scale and hi <= scale:
            return "harmonic"
        if lo >= -scale:
            return "subharmonic"
        if hi <= scale:
            return "superharmonic"
        return "mixed"

    def __str__(self):
        return f"{self.family}({', '.join(f'{p:g}' for p in self.params)})"


def parse_profile(text, center=0j):
    name, args = _parse_call(text)
    return RadialProfile(name, tuple(args), center)


# ---------------------------------------------------------------------------
# planar grids


@dataclass
class CutPieces:
    """Quadtree decomposition of the cells cut by the region boundary.

    Each piece is a square (centre, side) inside the region up to the leaf
    level; leaves carry an area fraction estimated from the level set.
    """

    cell_i: np.ndarray
    cell_j: np.ndarray
    piece_cell: np.ndarray
    px: np.ndarray
    py: np.ndarray
    size: np.ndarray
    frac: np.ndarray


def cut_cell_pieces(region, xs, ys, h, cell_i, cell_j, depth=6):
    cx = xs[cell_i].astype(float)
    cy = ys[cell_j].astype(float)
    owner = np.arange(cell_i.size)
    size = h
    out_cell, out_x, out_y, out_s, out_f = [], [], [], [], []
    for level in range(depth + 1):
        ls = region.levelset(cx + 1j * cy)
        half_diag = size * math.sqrt(0.5)
        full = ls <= -half_diag
        cut = np.abs(ls) < half_diag
        out_cell.append(owner[full])
        out_x.append(cx[full])
        out_y.append(cy[full])
        out_s.append(np.full(full.sum(), size))
        out_f.append(np.ones(full.sum()))
        if level == depth:
            frac = np.clip(0.5 - ls[cut] / size, 0.0, 1.0)
            keep = frac > 0
            out_cell.append(owner[cut][keep])
            out_x.append(cx[cut][keep])
            out_y.append(cy[cut][keep])
            out_s.append(np.full(keep.sum(), size))
            out_f.append(frac[keep])
            break
        q = size / 4.0
        cx = np.concatenate([cx[cut] + dx for dx in (-q, q, -q, q)])
        cy = np.concatenate([cy[cut] + dy for dy in (-q, -q, q, q)])
        owner = np.tile(owner[cut], 4)
        size = size / 2.0
    return CutPieces(cell_i, cell_j, np.concatenate(out_cell), np.concatenate(out_x),
                     np.concatenate(out_y), np.concatenate(out_s), np.concatenate(out_f))


@dataclass(frozen=True)
class QuadratureNodes:
    """Quadrature nodes; the first ``n_full`` are whole cells, the rest cut cells (``cut_index`` into the pieces' cell list)."""

    z: np.ndarray
    w: np.ndarray
    cell_i: np.ndarray
    cell_j: np.ndarray
    n_full: int
    cut_index: np.ndarray


@dataclass
class PlanarGrid:
    """Cell-centred grid over a region's bounding box.

    ``mask`` marks cells whose centre lies in the region; ``coverage`` is the
    area fraction of each cell inside the region and is nonzero on a slightly
    larger set (cut cells with exterior centres), which quadrature uses.
    """

    region: Region
    h: float
    xs: np.ndarray
    ys: np.ndarray
    levelset: np.ndarray
    mask: np.ndarray
    coverage: np.ndarray
    pieces: CutPieces = field(repr=False)

    @property
    def shape(self):
        return self.levelset.shape

    @property
    def Z(self):
        return self.xs[:, None] + 1j * self.ys[None, :]

    @property
    def weights(self):
        """Quadrature weights (coverage-weighted cell areas)."""
        return self.coverage * self.h * self.h

    @property
    def support(self):
        return self.coverage > 0

    @property
    def mask_fraction(self):
        return float(self.mask.mean())

    def interior(self):
        """Mask nodes whose four neighbours are mask nodes too."""
        m = self.mask
        out = np.zeros_like(m)
        out[1:-1, 1:-1] = m[1:-1, 1:-1] & m[2:, 1:-1] & m[:-2, 1:-1] & m[1:-1, 2:] & m[1:-1, :-2]
        return out

    def laplacian(self, u):
        """Five-point Laplacian, valid on :meth:`interior` nodes (NaN elsewhere)."""
        out = np.full(u.shape, np.nan)
        out[1:-1, 1:-1] = (u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2]
                           - 4.0 * u[1:-1, 1:-1]) / self.h ** 2
        out[~self.interior()] = np.nan
        return out

    def integrate(self, f):
        return np.sum(np.where(self.support, f, 0.0) * self.weights)

    @cached_property
    def nodes(self):
        """Second-order quadrature: full cells at their centres, cut cells at the centroid of their covered part."""
        p = self.pieces
        ncut = p.cell_i.size
        area = p.frac * p.size ** 2
        cut_area = np.bincount(p.piece_cell, weights=area, minlength=ncut)
        safe = np.where(cut_area > 0, cut_area, 1.0)
        cx = np.bincount(p.piece_cell, weights=area * p.px, minlength=ncut) / safe
        cy = np.bincount(p.piece_cell, weights=area * p.py, minlength=ncut) / safe
        keep = cut_area > 0
        cut = np.zeros(self.shape, dtype=bool)
        cut[p.cell_i, p.cell_j] = True
        fi, fj = np.nonzero((self.coverage >= 1.0) & ~cut)
        z = np.concatenate([self.xs[fi] + 1j * self.ys[fj], (cx + 1j * cy)[keep]])
        w = np.concatenate([np.full(fi.size, self.h * self.h), cut_area[keep]])
        ii = np.concatenate([fi, p.cell_i[keep]])
        jj = np.concatenate([fj, p.cell_j[keep]])
        return QuadratureNodes(z, w, ii, jj, fi.size, np.nonzero(keep)[0])

    def sample(self, f):
        """Grid array at quadrature nodes (cut cells take their cell-centre value)."""
        f = np.broadcast_to(np.asarray(f), self.shape)
        return f[self.nodes.cell_i, self.nodes.cell_j]


def make_grid(region, resolution, depth=6):
    """Grid with ``resolution`` cells across the longer side of the region's bounding box."""
    if resolution < 8:
        raise DomainError(f"resolution must be >= 8, got {resolution}")
    lo_x, hi_x, lo_y, hi_y = region.bbox()
    h = max(hi_x - lo_x, hi_y - lo_y) / resolution
    nx = max(1, int(round((hi_x - lo_x) / h)))
    ny = max(1, int(round((hi_y - lo_y) / h)))
    xs = lo_x + h * (np.arange(nx) + 0.5)
    ys = lo_y + h * (np.arange(ny) + 0.5)
    ls = region.levelset(xs[:, None] + 1j * ys[None, :])
    mask = ls < 0
    if not mask.any():
        raise DomainError(f"region {region.name} contains no grid cell at resolution {resolution}")
    cut = np.abs(ls) < h * math.sqrt(0.5)
    coverage = (ls <= -h * math.sqrt(0.5)).astype(float)
    ci, cj = np.nonzero(cut)
    pieces = cut_cell_pieces(region, xs, ys, h, ci, cj, depth)
    area = np.bincount(pieces.piece_cell, weights=pieces.frac * pieces.size ** 2, minlength=ci.size)
    coverage[ci, cj] = np.clip(area / (h * h), 0.0, 1.0)
    return PlanarGrid(region, h, xs, ys, ls, mask, coverage, pieces)


# ---------------------------------------------------------------------------
# Hartogs domains


@dataclass(frozen=True)
class HartogsDomain:
    """Rotation-invariant domain ``{z in base, r_in(z) < |w| < r_out(z)}``.

    ``fiber_scale`` is the factor applied to w so that case-1 domains sit in
    ``|w| > 1`` and case-2 domains in ``|w| < 1``; physical fibers are
    reported unless ``normalized=True`` is requested.
    """

    base: Region
    inner: RadialProfile
    outer: RadialProfile
    case_tag: int
    fiber_scale: float = 1.0
    center: complex = 0j
    a1: float = 1.0
    name: str = ""

    @property
    def active(self):
        return self.inner if self.case_tag == 1 else self.outer

    @property
    def cap(self):
        return self.outer if self.case_tag == 1 else self.inner

    def radii(self, z, normalized=False):
        s = self.fiber_scale if normalized else 1.0
        return s * self.inner.radius(z), s * self.outer.radius(z)

    def phi(self, z, normalized=False):
        """Exponent of the active boundary piece."""
        v = self.active.value(z)
        return v - math.log(self.fiber_scale) if normalized else v

    def alpha(self, z, normalized=False):
        v = self.cap.value(z)
        return v - math.log(self.fiber_scale) if normalized else v

    def v1_region(self):
        """Base intersected with D(center, a1)."""
        if self.a1 >= _enclosing_radius(self.base, self.center):
            return self.base
        return intersect(self.base, disc(self.center, self.a1))


def _enclosing_radius(region, center):
    return min(abs(c.center - center) + c.radius for c in region.circles if c.keep_inside)


def make_domain(base, inner, outer, case_tag, center=None, a1=None, name="", check_resolution=64,
                margin=0.05):
    """Validate profiles on the base closure and normalize the fiber scale."""
    if case_tag not in (1, 2):
        raise DomainError(f"case_tag must be 1 or 2, got {case_tag}")
    grid = make_grid(base, check_resolution)
    zs = np.concatenate([grid.Z[grid.mask], [base.center if center is None else complex(center)]])
    for c in base.circles:
        theta = np.linspace(0.0, 2 * np.pi, 257)[:-1]
        ring = c.center + c.radius * np.exp(1j * theta)
        zs = np.concatenate([zs, ring[base.levelset(ring) <= 1e-12]])
    r_in, r_out = inner.radius(zs), outer.radius(zs)
    bad = ~(np.isfinite(r_in) & np.isfinite(r_out))
    if bad.any():
        raise DomainError(f"profile not evaluable at z={zs[bad][0]:.6g}")
    crossing = r_in >= r_out
    if crossing.any():
        z0 = zs[crossing][0]
        raise ProfileCrossingError(
            f"profile crossing: inner radius {r_in[crossing][0]:.6g} >= outer radius "
            f"{r_out[crossing][0]:.6g} at z={z0:.6g}")
    if case_tag == 1:
        lo = float(r_in.min())
        scale = 1.0 if lo > 1.0 else (1.0 + margin) / lo
    else:
        hi = float(r_out.max())
        scale = 1.0 if hi < 1.0 else (1.0 - margin) / hi
    if center is None:
        center = base.center
    if a1 is None:
        a1 = _enclosing_radius(base, center)
    return HartogsDomain(base, inner, outer, case_tag, scale, complex(center), float(a1), name)


def _check_in_base(d, z, tol=1e-12):
    z = np.asarray(z, dtype=complex)
    if np.any(d.base.levelset(z) > tol):
        raise DomainError(f"point outside the base closure: {z}")
    return z


def fiber_interval(d, z, normalized=False):
    """(r_in, r_out) of the fiber annulus over z."""
    z = _check_in_base(d, z)
    r_in, r_out = d.radii(z, normalized)
    if np.ndim(r_in) == 0:
        return float(r_in), float(r_out)
    return r_in, r_out


def fiber_distance(d, z, r, normalized=False, tol=1e-12):
    """Distance from |w| = r to the boundary of the fiber annulus over z."""
    r_in, r_out = fiber_interval(d, z, normalized)
    r = np.asarray(r, dtype=float)
    if np.any(r < r_in - tol) or np.any(r > r_out + tol):
        raise DomainError(f"|w|={r} outside fiber interval ({r_in}, {r_out})")
    out = np.maximum(np.minimum(r - r_in, r_out - r), 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# boundary strata


@dataclass(frozen=True)
class StratumSample:
    z: complex
    r: float
    rho_w: float
    stratum_index: int
    side: str


def boundary_samples(d, n_radii=6, n_angles=12, side="both", corner_margin=None):
    """Fiber-boundary points (z, |w|) over base points away from the base boundary.

    Base points closer than ``corner_margin`` (default 2% of the base
    diameter) to the base boundary are skipped; that is where piecewise-smooth
    domains have corners.
    """
    if corner_margin is None:
        corner_margin = 0.02 * d.base.diameter
    lo_x, hi_x, lo_y, hi_y = d.base.bbox()
    reach = 0.5 * max(hi_x - lo_x, hi_y - lo_y)
    zs = [d.center]
    for rr in np.linspace(0, reach, n_radii + 1)[1:]:
        for t in np.linspace(0, 2 * np.pi, n_angles, endpoint=False):
            zs.append(d.center + rr * np.exp(1j * t))
    zs = np.array(zs)
    zs = zs[d.base.levelset(zs) <= -corner_margin]
    r_in, r_out = d.radii(zs)
    out = []
    for z, a, b in zip(zs, r_in, r_out):
        if side in ("both", "inner"):
            out.append((complex(z), float(a)))
        if side in ("both", "outer"):
            out.append((complex(z), float(b)))
    return out


def _stratum_index(rho_w, k_max, tol):
    g = abs(rho_w)
    if g < tol:
        return 0
    k = max(1, math.ceil(1.0 / g - 1e-9))
    return k if k <= k_max else 0


def classify_strata(d, samples, k_max, rho=None, tol=1e-8, step=1e-4):
    """Assign each boundary sample its stratum index k (0 flags |rho_|w|| below tol or k > k_max).

    Without ``rho`` the signed fiber-radial distance of the nearest boundary
    piece is used, so rho_|w| = -1 on the inner and +1 on the outer circle.
    A user ``rho(z, r)`` is differentiated in r numerically (fourth order).
    """
    if k_max < 1:
        raise PreconditionError("k_max must be >= 1")
    machine_tol = tol
    out = []
    for z, r in samples:
        z = complex(z)
        r = float(r)
        if rho is None:
            r_in, r_out = d.radii(z)
            r_in, r_out = float(r_in), float(r_out)
            scale = max(1.0, r_out)
            if abs(r - r_out) <= tol * scale:
                rho_w, side = 1.0, "outer"
            elif abs(r - r_in) <= tol * scale:
                rho_w, side = -1.0, "inner"
            else:
                raise PreconditionError(f"sample (z={z}, |w|={r}) is not on the fiber boundary")
        else:
            val = rho(z, r)
            if abs(val) > max(tol, 1e-6):
                raise PreconditionError(f"sample (z={z}, |w|={r}) is not on rho = 0 (rho={val:.3g})")
            rho_w = (8.0 * (rho(z, r + step) - rho(z, r - step))
                     - (rho(z, r + 2 * step) - rho(z, r - 2 * step))) / (12.0 * step)
            side = "outer" if rho_w > 0 else ("inner" if rho_w < 0 else "degenerate")
        out.append(StratumSample(z, r, float(rho_w), _stratum_index(rho_w, k_max, machine_tol), side))
    return out
