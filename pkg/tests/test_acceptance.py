"""Acceptance criteria 1-11, each at its stated tolerance and runtime budget.

Every test records one ``criterion k: PASS|FAIL ...`` line; the lines are
printed at the end of the pytest run (and inline with ``-s``).
"""

import math
import os
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hartogs_lab.bergman import (canonical_solution, fiber_moment_log_weight, fiber_weight, min_mode,
                                 orthogonality_residual, weight_sandwich_check)
from hartogs_lab.cli import main
from hartogs_lab.domain import RadialProfile, disc, make_domain, make_grid
from hartogs_lab.hankel import CONSISTENT, VIOLATES, HankelSweep, compactness_probe, verify_mode_reduction
from hartogs_lab.moments import Annulus, distance_moment, moment_ratio, radial_moment, sobolev_surrogate_ratio
from hartogs_lab.pcert import CertificateSpec, ZeroBump, sweep_m1, tangential_hessian_check
from hartogs_lab.quadrature import distance_moment_quad, radial_moment_quad
from hartogs_lab.spectral import (BOUNDED, DIVERGENT, J01, divergence_diagnostic, electric_ground_state,
                                  magnetic_ground_state, zero_exponent)
from hartogs_lab.zoo import zoo_domain

J2 = J01 ** 2


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def record(k, title, checks, elapsed, budget):
    """Log one line for criterion k; ``checks`` maps a label to (ok, detail)."""
    in_time = elapsed <= budget
    ok = in_time and all(v[0] for v in checks.values())
    failed = [name for name, (good, _) in checks.items() if not good]
    if not in_time:
        failed.append("runtime")
    detail = "; ".join(f"{name}: {d}" for name, (_, d) in checks.items())
    line = (f"criterion {k}: {'PASS' if ok else 'FAIL'} {title} [{elapsed:.1f} s of {budget:g} s] {detail}"
            + (f" -- failed: {', '.join(failed)}" if failed else ""))
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok, line


def test_criterion_1_lemma1_exactness():
    worst = 0.0
    with Clock() as c:
        for a, b in [(1, 2), (0.5, 3), (1, 1.1)]:
            A = Annulus(a, b)
            for n in range(-40, 41):
                worst = max(worst,
                            abs(float(radial_moment(A, n)) / radial_moment_quad(a, b, n) - 1),
                            abs(float(distance_moment(A, n)) / distance_moment_quad(a, b, n) - 1))
    ok, line = record(1, "closed-form moments vs quadrature oracle", {
        "max rel err": (worst <= 1e-8, f"{worst:.2e} <= 1e-8")}, c.elapsed, 10)
    assert ok, line


@pytest.mark.xfail(strict=True, reason="the n -> -inf limit of the moment ratio is a^2/2, not b^2/2; "
                                       "the stated target is unattainable at n = -200")
def test_criterion_2_lemma1_asymptotics():
    with Clock() as c:
        vals = {(ab, n): moment_ratio(Annulus(*ab), n) for ab in [(1, 2), (1, 3)] for n in (200, -200)}
    checks = {}
    for (ab, n), v in vals.items():
        target, tol = ab[1] ** 2 / 2, (0.04 if ab == (1, 2) else 0.09)
        checks[f"{ab} n={n}"] = (abs(v - target) <= tol, f"{v:.5f} vs {target} +- {tol}")
    ok, line = record(2, "moment ratio limits at n = +-200", checks, c.elapsed, 1)
    assert ok, line


def test_criterion_3_lemma2_surrogate():
    with Clock() as c:
        d = zoo_domain("Z1")
        grid = make_grid(d.base, 128)
        vals = {n: n * sobolev_surrogate_ratio(d, grid, 1.0, n) for n in range(2, 201)}
    sup = max(vals.values())
    r2 = math.sqrt(2)
    ok, line = record(3, "n * surrogate ratio on Z1 with g = 1", {
        "sup": (sup <= 1.1 * r2, f"{sup:.5f} <= {1.1 * r2:.5f}"),
        "n=200": (abs(vals[200] - r2) <= 0.05 * r2, f"{vals[200]:.5f} within 5% of {r2:.5f}"),
    }, c.elapsed, 5)
    assert ok, line


def test_criterion_4_canonical_solution():
    with Clock() as c:
        g = make_grid(disc(0j, 1.0), 256)
        z = g.Z
        s1 = canonical_solution(g, 0.0, np.ones(g.shape))
        s2 = canonical_solution(g, 0.0, z.copy())
        e1 = float(np.max(np.abs(np.asarray(s1) - np.conj(z))[g.mask]))
        e2 = float(np.max(np.abs(np.asarray(s2) - (np.abs(z) ** 2 - 0.5))[g.mask]))
        o1 = orthogonality_residual(s1, g, 0.0, degree=20)
        o2 = orthogonality_residual(s2, g, 0.0, degree=20)
    ok, line = record(4, "canonical solutions on the unit disc at resolution 256", {
        "beta=1": (e1 <= 1e-4, f"max err {e1:.2e}"),
        "beta=z": (e2 <= 1e-4, f"max err {e2:.2e}"),
        "orthogonality": (max(o1, o2) <= 1e-8, f"{max(o1, o2):.2e} <= 1e-8"),
    }, c.elapsed, 30)
    assert ok, line


def test_criterion_5_weight_consistency():
    worst, lap_ok, worst_lap = 0.0, True, math.inf
    with Clock() as c:
        for name in ("Z1", "Z2", "Z3", "Z4"):
            d = zoo_domain(name)
            grid = make_grid(d.v1_region(), 128)
            sel = grid.support
            for n in range(min_mode(d.case_tag), 65):
                fw = fiber_weight(d, n, grid)
                alt = fiber_moment_log_weight(d, n, grid)
                worst = max(worst, float(np.max(np.abs(np.expm1(fw.log_weight[sel] - alt[sel])))))
                m = float(np.nanmin(grid.laplacian(fw.lam))) * grid.h ** 2
                worst_lap = min(worst_lap, m)
                lap_ok &= m >= -1e-6
        d = zoo_domain("Z1")
        grid = make_grid(d.v1_region(), 128)
        n0 = weight_sandwich_check(fiber_weight(d, 2, grid), 0.5).n0
    ok, line = record(5, "fiber weights vs radial moments on Z1-Z4, n <= 64", {
        "consistency": (worst <= 1e-10, f"max rel err {worst:.2e}"),
        "subharmonic": (lap_ok, f"min h^2 Laplacian {worst_lap:.2e} >= -1e-6"),
        "sandwich n0": (n0 == 2, f"n0 = {n0}"),
    }, c.elapsed, 20)
    assert ok, line


def test_criterion_6_mode_reduction():
    with Clock() as c:
        d = zoo_domain("Z1")
        reps = [verify_mode_reduction(d, n=n, degree=6) for n in range(2, 7)]
    dev = max(r.deviation for r in reps)
    cross = max(r.cross_mode_max for r in reps)
    pair = max(r.pairing_rel_err for r in reps)
    ok, line = record(6, "1D vs 2D mode reduction on Z1, n = 2..6", {
        "deviation": (dev <= 1e-4, f"{dev:.2e} <= 1e-4"),
        "cross-mode": (cross <= 1e-12, f"{cross:.2e}"),
        "pairing": (pair <= 1e-8, f"{pair:.2e}"),
    }, c.elapsed, 60)
    assert ok, line


def test_criterion_7_spectral_baselines():
    with Clock() as c:
        g128 = make_grid(disc(0j, 1.0), 128)
        g256 = make_grid(disc(0j, 1.0), 256)
        e128 = electric_ground_state(g128).value
        e256 = electric_ground_state(g256).value
        ratio = abs(e128 - J2) / abs(e256 - J2)
        mag = magnetic_ground_state(g256, zero_exponent(g256)).value
        shift = max(abs(electric_ground_state(g128, cst).value - e128 - cst) for cst in (4.0, 28.0, -2.5))
    ok, line = record(7, "disc eigenvalues, convergence and shifts", {
        "electric h=1/128": (abs(e256 / J2 - 1) <= 0.01, f"{e256:.6f} vs {J2:.6f}"),
        "O(h^2) ratio": (3.5 <= ratio <= 4.5, f"{ratio:.3f}"),
        "magnetic": (abs(mag / (J2 / 4) - 1) <= 0.01, f"{mag:.6f} vs {J2 / 4:.6f}"),
        "shift": (shift <= 1e-8, f"{shift:.1e}"),
    }, c.elapsed, 90)
    assert ok, line


def test_criterion_8_divergence_diagnostics():
    ladder = [2, 3, 4, 6, 8, 11, 16, 23, 32, 45, 64]
    jobs = os.cpu_count() or 1
    with Clock() as c:
        z2 = divergence_diagnostic(zoo_domain("Z2"), ladder[:9], resolution=128, jobs=jobs)
        z1 = divergence_diagnostic(zoo_domain("Z1"), ladder, resolution=128, jobs=jobs)
        z3 = divergence_diagnostic(zoo_domain("Z3"), ladder, resolution=128, jobs=jobs)
    lam_e = dict(zip(z2.modes, z2.lambda_e))
    lam_m = dict(zip(z2.modes, z2.lambda_m))
    dev = max(abs(lam_e[n] / (J2 + 4 * (n - 1)) - 1) for n in (2, 4, 8, 16, 32))
    growth = lam_m[32] / lam_m[4]
    z3_max = max(z3.lambda_e)
    ok, line = record(8, "divergent Z2, bounded Z1 and Z3", {
        "Z2 electric": (dev <= 0.015, f"max rel dev {dev:.2e} from j01^2 + 4(n-1)"),
        "Z2 magnetic growth": (growth >= 4, f"lambda_m(32)/lambda_m(4) = {growth:.2f}"),
        "Z2 verdict": (z2.verdict == DIVERGENT, z2.verdict),
        "Z1 verdict": (z1.verdict == BOUNDED, z1.verdict),
        "Z3 verdict": (z3.verdict == BOUNDED, z3.verdict),
        "Z3 patch bound": (z3_max <= 4 * J2 + 0.5, f"max lambda_e {z3_max:.4f} <= {4 * J2 + 0.5:.4f}"),
    }, c.elapsed, 300)
    assert ok, line


def _probe(d, modes):
    sweep = HankelSweep(d, resolution=128)
    ratios, q, s, t = [], [], [], []
    for n in modes:
        qq, ss, tt = sweep.probe_triple(n)
        ratios.append(math.sqrt(qq))
        q.append(qq)
        s.append(ss)
        t.append(tt)
    return ratios, compactness_probe(q, s, t, modes=modes)


def test_criterion_9_hankel_diagnostics():
    modes = list(range(2, 65))
    with Clock() as c:
        r1, p1 = _probe(zoo_domain("Z1"), modes)
        r2, p2 = _probe(zoo_domain("Z2"), modes)
    decay = r2[modes.index(64)] / r2[modes.index(4)]
    ok, line = record(9, "Hankel mode ratios and compactness probe", {
        "Z1 ratio": (min(r1) >= 0.5, f"min {min(r1):.5f} >= 0.5"),
        "Z1 verdict": (p1.verdict == VIOLATES, p1.verdict),
        "Z2 decay": (decay <= 0.25, f"ratio(64)/ratio(4) = {decay:.4f}"),
        "Z2 verdict": (p2.verdict == CONSISTENT, p2.verdict),
    }, c.elapsed, 180)
    assert ok, line


def test_criterion_10_certificates():
    with Clock() as c:
        z1 = zoo_domain("Z1")
        fail = tangential_hessian_check(z1, CertificateSpec(1.0, 1.0, ZeroBump()), side="outer")
        cap = make_domain(disc(0j, 0.9), RadialProfile("constant", (-math.log(0.2),)),
                          RadialProfile("ellipsoid-cap", (1.0, 0.9)), 2)
        samples = [(z, float(cap.outer.radius(z))) for z in (0, 0.1, 0.1j, -0.2, 0.25 + 0.1j)]
        _, best = sweep_m1(cap, 0.5, samples)
    ok, line = record(10, "certificate checks", {
        "Z1 outer fails": (not fail.passed and fail.min_hessian <= 1e-6, f"min Hessian {fail.min_hessian:.2e}"),
        "ellipsoid cap passes": (best is not None, f"M1 = {best.M1:.4g}" if best else "no M1 passes"),
    }, c.elapsed, 30)
    assert ok, line


def test_criterion_11_zoo_suite(tmp_path):
    jobs = str(os.cpu_count() or 1)
    with Clock() as c:
        code = main(["run", "zoo-suite", "--jobs", jobs, "--out", str(tmp_path)])
    summary = (tmp_path / "zoo-suite.summary.txt").read_text().splitlines()
    ok, line = record(11, "zoo-suite end to end", {
        "exit code": (code == 0, str(code)),
        "verdicts": (code == 0, " | ".join(s for s in summary if s.startswith("Z"))),
    }, c.elapsed, 600)
    assert ok, line
