"""Ground-state energies of the magnetic and electric Schroedinger forms attached to a mode.

For a mode n the effective exponent is ``sigma = (1 - n) phi`` (case 1) or
``sigma = (n + 1) phi`` (case 2); both have ``Laplacian(sigma) >= 0``.

* magnetic: ``inf int |u_z|^2 e^{2 sigma} / int |u|^2 e^{2 sigma}`` over Dirichlet
  functions, computed in the gauged variable ``v = u e^{sigma}`` as
  ``inf int |v_z - sigma_z v|^2 / int |v|^2``;
* electric: ``inf (int |grad v|^2 + int V |v|^2) / int |v|^2`` with ``V = Laplacian(sigma)``.

Both are discretized on the cell-centred grid with the Shortley-Weller
Laplacian, which places the Dirichlet condition at the exact boundary
crossing and is second-order accurate.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import j0, j1, jn_zeros

from .domain import disc, intersect, make_grid
from .errors import ConvergenceError, PreconditionError

J01 = float(jn_zeros(0, 1)[0])
RESIDUAL_TOL = 1e-8
MAX_ITER = 10_000

_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


# ---------------------------------------------------------------------------
# discretization


@dataclass
class MaskedOperatorGrid:
    """Unknown numbering and boundary arm lengths for a grid's mask."""

    grid: object = field(repr=False)
    index: np.ndarray = field(repr=False)
    ii: np.ndarray = field(repr=False)
    jj: np.ndarray = field(repr=False)
    neighbours: dict = field(repr=False)
    arms: dict = field(repr=False)

    @property
    def size(self):
        return self.ii.size

    @property
    def z(self):
        return self.grid.xs[self.ii] + 1j * self.grid.ys[self.jj]

    def to_grid(self, v, fill=0.0):
        out = np.full(self.grid.shape, fill, dtype=np.result_type(v, float))
        out[self.ii, self.jj] = v
        return out


def masked_operator_grid(grid):
    mask = grid.mask
    index = -np.ones(mask.shape, dtype=np.int64)
    ii, jj = np.nonzero(mask)
    index[ii, jj] = np.arange(ii.size)
    nx, ny = mask.shape
    z = grid.xs[ii] + 1j * grid.ys[jj]
    neighbours, arms = {}, {}
    for di, dj in _DIRS:
        ni, nj = ii + di, jj + dj
        ok = (ni >= 0) & (ni < nx) & (nj >= 0) & (nj < ny)
        nb = np.full(ii.size, -1, dtype=np.int64)
        nb[ok] = index[ni[ok], nj[ok]]
        arm = np.full(ii.size, grid.h)
        out = nb < 0
        if out.any():
            arm[out] = grid.region.exit_distance(z[out], complex(di, dj), grid.h)
            # a crossing too close to the node would make the stencil singular
            arm[out] = np.maximum(arm[out], 1e-3 * grid.h)
        neighbours[(di, dj)] = nb
        arms[(di, dj)] = arm
    return MaskedOperatorGrid(grid, index, ii, jj, neighbours, arms)


def shortley_weller(mg):
    """Sparse -Laplacian with Dirichlet data at the exact boundary crossings."""
    n = mg.size
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    k = np.arange(n)
    for plus, minus in (((1, 0), (-1, 0)), ((0, 1), (0, -1))):
        hp, hm = mg.arms[plus], mg.arms[minus]
        diag += 2.0 / (hp * hm)
        for nb, coef in ((mg.neighbours[plus], 2.0 / (hp * (hp + hm))),
                         (mg.neighbours[minus], 2.0 / (hm * (hp + hm)))):
            m = nb >= 0
            rows.append(k[m])
            cols.append(nb[m])
            vals.append(-coef[m])
    rows.append(k)
    cols.append(k)
    vals.append(diag)
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def centered_gradient(mg):
    """Sparse (D_x, D_y): second-order centred differences on the nonuniform stencil.

    Boundary crossings carry the Dirichlet value 0.
    """
    n = mg.size
    k = np.arange(n)
    out = []
    for plus, minus in (((1, 0), (-1, 0)), ((0, 1), (0, -1))):
        hp, hm = mg.arms[plus], mg.arms[minus]
        cp = hm / (hp * (hp + hm))
        cm = -hp / (hm * (hp + hm))
        c0 = (hp - hm) / (hp * hm)
        rows, cols, vals = [k], [k], [c0]
        for nb, coef in ((mg.neighbours[plus], cp), (mg.neighbours[minus], cm)):
            m = nb >= 0
            rows.append(k[m])
            cols.append(nb[m])
            vals.append(coef[m])
        out.append(sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                 shape=(n, n)))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# eigensolver


@dataclass
class GroundStateResult:
    value: float
    residual: float
    iterations: int
    h: float
    imag: float = 0.0
    vector: np.ndarray = field(default=None, repr=False)
    kind: str = ""


def inverse_iteration(a, tol=RESIDUAL_TOL, max_iter=MAX_ITER, shift=0.0):
    """Smallest-magnitude eigenpair of ``a - shift`` by inverse iteration on a sparse LU.

    Starts from the all-ones vector. Converged when
    ``||a v - theta v|| <= tol * |theta| ||v||`` with ``theta`` the Rayleigh
    quotient; raises ConvergenceError with the residual history otherwise.
    """
    n = a.shape[0]
    if n == 0:
        raise PreconditionError("empty Dirichlet mask")
    dtype = np.complex128 if np.iscomplexobj(a.data) else np.float64
    lu = spla.splu((a - shift * sp.identity(n, format="csr")).tocsc().astype(dtype))
    v = np.ones(n, dtype=dtype) / math.sqrt(n)
    history = []
    for it in range(1, max_iter + 1):
        v = lu.solve(v)
        v /= np.linalg.norm(v)
        av = a @ v
        theta = np.vdot(v, av)
        res = np.linalg.norm(av - theta * v) / max(abs(theta), 1e-300)
        history.append(float(res))
        if res <= tol:
            return theta, v, res, it
    raise ConvergenceError(f"inverse iteration did not reach residual {tol:g} in {max_iter} steps "
                           f"(last {history[-1]:.3e})", history)


# ---------------------------------------------------------------------------
# weight exponents and energies


@dataclass
class WeightExponent:
    """sigma with its complex derivative sigma_z and Laplacian on a grid."""

    n: int
    case_tag: int
    grid: object = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    sigma_z: np.ndarray = field(repr=False)
    lap_sigma: np.ndarray = field(repr=False)
    provenance: str = ""

    def shifted(self, c):
        return WeightExponent(self.n, self.case_tag, self.grid, self.sigma + c, self.sigma_z,
                              self.lap_sigma, self.provenance + f" + {c:g}")


def sigma_coefficient(case_tag, n):
    return (1 - n) if case_tag == 1 else (n + 1)


def weight_exponent(d, n, grid):
    """sigma = (1 - n) phi (case 1) or (n + 1) phi (case 2) for the active profile."""
    c = sigma_coefficient(d.case_tag, int(n))
    z = d.base.clamp(grid.Z)
    prof = d.active
    prov = f"case-{d.case_tag}: sigma = {c} * phi, phi = {prof}"
    return WeightExponent(int(n), d.case_tag, grid, c * prof.value(z), c * prof.dz(z),
                          c * prof.laplacian(z), prov)


def zero_exponent(grid):
    z = np.zeros(grid.shape)
    return WeightExponent(0, 0, grid, z, z.astype(complex), z, "sigma = 0")


def electric_operator(mg, potential):
    v = np.broadcast_to(np.asarray(potential, dtype=float), mg.grid.shape)[mg.ii, mg.jj]
    return shortley_weller(mg) + sp.diags(v)


def magnetic_operator(mg, w):
    """Discrete form of (d/dz - sigma_z)^* (d/dz - sigma_z) in the gauged variable.

    Expands to ``-Laplacian/4 + Laplacian(sigma)/4 + |sigma_z|^2 + (i/2)(sigma_x d_y - sigma_y d_x)``.
    """
    sz = w.sigma_z[mg.ii, mg.jj]
    sx, sy = 2.0 * sz.real, -2.0 * sz.imag
    dx, dy = centered_gradient(mg)
    pot = 0.25 * w.lap_sigma[mg.ii, mg.jj] + np.abs(sz) ** 2
    return (0.25 * shortley_weller(mg) + sp.diags(pot)
            + 0.5j * (sp.diags(sx) @ dy - sp.diags(sy) @ dx))


def _solve(a, grid, kind, tol, max_iter):
    theta, v, res, it = inverse_iteration(a, tol, max_iter)
    return GroundStateResult(float(np.real(theta)), float(res), it, grid.h, float(np.imag(theta)), v, kind)


def magnetic_ground_state(grid, w=None, tol=RESIDUAL_TOL, max_iter=MAX_ITER):
    """Lowest value of the gauged magnetic form on ``grid``'s mask; ``w=None`` means sigma = 0."""
    if w is None:
        w = zero_exponent(grid)
    mg = masked_operator_grid(grid)
    return _solve(magnetic_operator(mg, w), grid, "magnetic", tol, max_iter)


def electric_ground_state(grid, potential=0.0, tol=RESIDUAL_TOL, max_iter=MAX_ITER):
    """Lowest Dirichlet eigenvalue of -Laplacian + V on ``grid``'s mask.

    ``potential`` may be a scalar, a grid array, or a WeightExponent (V = its Laplacian).
    """
    if isinstance(potential, WeightExponent):
        potential = potential.lap_sigma
    v = np.asarray(potential, dtype=float)
    if not np.all(np.isfinite(v)):
        raise PreconditionError("potential must be finite on the grid")
    mg = masked_operator_grid(grid)
    return _solve(electric_operator(mg, v), grid, "electric", tol, max_iter)


# ---------------------------------------------------------------------------
# harmonic patches


def patch_eigenfunction(r0):
    """First Dirichlet eigenfunction of D(0, r0) with its radial derivative."""
    k = J01 / r0
    return (lambda r: j0(k * r)), (lambda r: -k * j1(k * r))


def harmonic_patch_bound(profile, center, r0, f=None, df=None, tol=1e-8, n_check=(64, 64)):
    """||grad f||^2 / ||f||^2 for a radial f supported in D(center, r0), after checking Laplacian(phi) = 0 there.

    ``profile`` is the active profile (sigma is a multiple of it for every n,
    so one check covers all modes). ``f`` and ``df`` are callables of the
    radius; default is the patch's first Dirichlet eigenfunction, giving
    ``j01^2 / r0^2``.
    """
    from scipy.integrate import quad

    if r0 <= 0:
        raise PreconditionError("patch radius must be positive")
    rr = np.linspace(0.0, r0, n_check[0])
    tt = np.linspace(0.0, 2 * np.pi, n_check[1], endpoint=False)
    zs = center + (rr[:, None] * np.exp(1j * tt[None, :])).ravel()
    lap = np.abs(profile.laplacian(zs))
    if np.max(lap) > tol:
        raise PreconditionError(f"Laplacian of the profile is {np.max(lap):.3e} on the patch, not zero")
    if f is None:
        f, df = patch_eigenfunction(r0)
    num = quad(lambda r: df(r) ** 2 * r, 0.0, r0, epsabs=0, epsrel=1e-12, limit=200)[0]
    den = quad(lambda r: f(r) ** 2 * r, 0.0, r0, epsabs=0, epsrel=1e-12, limit=200)[0]
    if den <= 0:
        raise PreconditionError("f vanishes on the patch")
    return num / den


def largest_harmonic_patch(profile, center, r_max, tol=1e-8, steps=200):
    """Largest r <= r_max with |Laplacian(phi)| <= tol on D(center, r), by sampling on circles."""
    tt = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
    best = 0.0
    for r in np.linspace(0.0, r_max, steps + 1):
        ring = center + r * np.exp(1j * tt)
        if np.max(np.abs(profile.laplacian(ring))) > tol:
            break
        best = r
    return best


# ---------------------------------------------------------------------------
# divergence diagnostics


DIVERGENT = "divergent"
BOUNDED = "bounded"
INCONCLUSIVE = "inconclusive"


@dataclass
class CompactnessReport:
    domain: str
    modes: list
    lambda_m: list
    lambda_e: list
    residual_m: list
    residual_e: list
    imag_m: list
    epsilon: list
    verdict: str
    reason: str
    patch_radius: float = 0.0
    patch_bound: float = math.inf
    h: float = 0.0
    sign_note: str = ""


def _quartile_growth(values):
    k = len(values)
    base = values[(k - 1) // 4]
    return values[-1] / base if base > 0 else math.inf


def _last_half_variation(values):
    tail = values[len(values) // 2:]
    tv = float(np.sum(np.abs(np.diff(tail))))
    return tv / abs(tail[-1]) if tail[-1] != 0 else math.inf


def classify(modes, lam_m, lam_e, patch_bound=math.inf, growth=4.0, flat=0.10):
    """Verdict for energy sequences over increasing modes, with the reason."""
    gm, ge = _quartile_growth(lam_m), _quartile_growth(lam_e)
    if gm >= growth and ge >= growth:
        return DIVERGENT, f"last/quartile growth {gm:.3g} (magnetic), {ge:.3g} (electric) >= {growth:g}"
    tvm, tve = _last_half_variation(lam_m), _last_half_variation(lam_e)
    if tvm <= flat and tve <= flat:
        return BOUNDED, f"last-half variation {tvm:.3g} (magnetic), {tve:.3g} (electric) <= {flat:g}"
    if math.isfinite(patch_bound) and max(lam_e) <= patch_bound:
        return BOUNDED, f"all electric energies <= harmonic-patch bound {patch_bound:.6g}"
    return INCONCLUSIVE, (f"growth {gm:.3g}/{ge:.3g}, last-half variation {tvm:.3g}/{tve:.3g}")


def _sweep_one(args):
    d, grid, n, tol, max_iter = args
    w = weight_exponent(d, n, grid)
    m = magnetic_ground_state(grid, w, tol, max_iter)
    e = electric_ground_state(grid, w, tol, max_iter)
    return m, e


def divergence_diagnostic(d, modes, resolution=128, region=None, tol=RESIDUAL_TOL, max_iter=MAX_ITER,
                          jobs=1, patch_tol=1e-8, patch_slack=0.02):
    """Energies over the modes on D(z0, a) and a divergent / bounded / inconclusive verdict.

    Divergent: the last value is at least 4x the first-quartile value for
    both energies. Bounded: the total variation over the last half is at
    most 10% of the last value, or a certified harmonic patch of radius
    r0 >= 4h bounds every electric energy by j01^2 / r0^2 (plus slack).
    """
    modes = [int(n) for n in modes]
    if len(modes) < 6:
        raise PreconditionError("divergence_diagnostic needs at least 6 modes")
    if any(b <= a for a, b in zip(modes, modes[1:])):
        raise PreconditionError("modes must be strictly increasing")
    if region is None:
        region = d.v1_region()
    grid = make_grid(region, resolution)
    tasks = [(d, grid, n, tol, max_iter) for n in modes]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(t) for t in tasks]
    lam_m = [m.value for m, _ in results]
    lam_e = [e.value for _, e in results]

    r_room = float(-np.max(region.levelset(np.array([d.center]))))
    r0 = largest_harmonic_patch(d.active, d.center, r_room, patch_tol)
    bound = math.inf
    if r0 >= 4 * grid.h:
        bound = harmonic_patch_bound(d.active, d.center, r0, tol=patch_tol) * (1 + patch_slack)
    verdict, reason = classify(modes, lam_m, lam_e, bound)
    eps = [1.0 / (2.0 * math.sqrt(v)) if v > 0 else math.inf for v in lam_m]
    note = ("sigma = (1-n) phi with phi superharmonic" if d.case_tag == 1
            else "sigma = (n+1) phi with phi subharmonic")
    return CompactnessReport(d.name, modes, lam_m, lam_e, [m.residual for m, _ in results],
                             [e.residual for _, e in results], [m.imag for m, _ in results], eps,
                             verdict, reason, r0, bound, grid.h, note)


def nested_disc_grid(center, radius, resolution, within=None):
    region = disc(center, radius)
    if within is not None:
        region = intersect(within, region)
    return make_grid(region, resolution)
