"""Command-line experiment runner.

    hartogs-lab run <config-file | experiment> [--jobs N] [--out DIR] [--modes A..B]
                    [--resolution R] [--annulus a,b] [--zoo Zk]

A config file is flat ``key = value`` text, for example::

    experiment = spectra
    domain = Z2
    modes = 2..64
    resolution = 128

Exit status: 0 on success, 1 on error, 2 when zoo-suite verdicts disagree
with the recorded expectations.
"""

import argparse
import configparser
import csv
import io
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .bergman import (fiber_moment_log_weight, fiber_weight, min_mode, one_norm_bound_check,
                      weight_sandwich_check)
from .domain import RadialProfile, disc, make_domain, make_grid, parse_profile, parse_region
from .errors import HartogsLabError
from .hankel import DEFAULT_EPSILONS, probe_domain
from .moments import (Annulus, distance_moment, mode_l2_norm, moment_ratio, radial_moment,
                      sobolev_surrogate_ratio)
from .pcert import CertificateSpec, SmoothstepBump, ZeroBump, sweep_m1
from .quadrature import distance_moment_quad, radial_moment_quad
from .spectral import divergence_diagnostic
from .domain import boundary_samples
from .zoo import zoo, zoo_entry

EXPERIMENTS = ("moments", "lemma2", "weights", "hankel", "spectra", "pcert", "zoo-suite")
SWEEP_KINDS = ("hankel", "spectra", "zoo-suite")
SPECTRAL_KINDS = ("spectra", "zoo-suite")

DEFAULTS = {
    "moments": {"annulus": "1,2", "modes": "-40..40"},
    "lemma2": {"domain": "Z1", "modes": "1..200", "resolution": "128"},
    "weights": {"domain": "Z1", "modes": "2..64", "resolution": "128"},
    "hankel": {"domain": "Z1", "modes": "2..64", "resolution": "128"},
    "spectra": {"domain": "Z2", "modes": "2..64", "resolution": "128"},
    "pcert": {"domain": "Z1", "resolution": "64", "pcert.M": "1.0", "pcert.b_M": "zero"},
    "zoo-suite": {"modes": "2..64", "resolution": "128"},
}


class ConfigError(HartogsLabError, ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def half_octave_ladder(lo, hi):
    """Integers round(lo * 2^{k/2}) up to hi, deduplicated, always ending at hi."""
    if lo < 1:
        raise ConfigError("a half-octave ladder needs a positive start")
    out, k = [], 0
    while True:
        v = int(round(lo * 2 ** (k / 2)))
        if v > hi:
            break
        if not out or v != out[-1]:
            out.append(v)
        k += 1
    if out[-1] != hi:
        out.append(hi)
    return out


def parse_modes(text, ladder=False):
    """``A..B`` (all integers, or a half-octave ladder for sweeps) or a comma list."""
    text = str(text).strip()
    if ".." in text:
        a, b = (int(x) for x in text.split(".."))
        if b < a:
            raise ConfigError(f"empty mode range {text!r}")
        return half_octave_ladder(a, b) if ladder else list(range(a, b + 1))
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad mode list {text!r}") from exc


@dataclass
class ExperimentConfig:
    experiment: str
    domain: str = ""
    inner: str = ""
    outer: str = ""
    base: str = "disc(0, 0, 1)"
    case: int = 1
    modes: list = field(default_factory=list)
    resolution: int = 128
    annulus: tuple = (1.0, 2.0)
    out: str = "."
    jobs: int = 1
    tolerances: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; known: {', '.join(EXPERIMENTS)}")
        if self.experiment in SPECTRAL_KINDS and self.resolution < 32:
            raise ConfigError("spectral experiments need resolution >= 32")
        if self.experiment in ("weights", "hankel", "spectra"):
            lo = min_mode(self.build_domain().case_tag)
            if self.modes and min(self.modes) < lo:
                raise ConfigError(f"modes must be >= {lo} for this domain's case")
        if self.experiment == "lemma2" and 0 in self.modes:
            raise ConfigError("lemma2 modes must exclude 0")
        return self

    def build_domain(self):
        if self.domain:
            return zoo_entry(self.domain).build()
        if not (self.inner and self.outer):
            raise ConfigError("give a zoo domain or both profile.inner and profile.outer")
        return make_domain(parse_region(self.base), parse_profile(self.inner), parse_profile(self.outer),
                           int(self.case), name="custom")


def read_config(path):
    with open(path) as fh:
        text = fh.read()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    parser.read_string("[experiment]\n" + text)
    return dict(parser["experiment"])


def build_config(values, overrides):
    kind = values.get("experiment", "").strip()
    merged = dict(DEFAULTS.get(kind, {}))
    if "profile.inner" in values or "profile.outer" in values:
        merged.pop("domain", None)
    merged.update(values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    known = {"experiment", "domain", "profile.inner", "profile.outer", "base", "case", "modes",
             "resolution", "annulus", "out", "jobs"}
    tolerances = {k.split(".", 1)[1]: float(v) for k, v in merged.items() if k.startswith("tolerances.")}
    extra = {k: v for k, v in merged.items() if k not in known and not k.startswith("tolerances.")}
    try:
        annulus = tuple(float(x) for x in str(merged.get("annulus", "1,2")).split(","))
        cfg = ExperimentConfig(
            experiment=kind,
            domain=str(merged.get("domain", "")).strip(),
            inner=str(merged.get("profile.inner", "")).strip(),
            outer=str(merged.get("profile.outer", "")).strip(),
            base=str(merged.get("base", "disc(0, 0, 1)")),
            case=int(merged.get("case", 1)),
            modes=parse_modes(merged.get("modes", "2..8"), ladder=kind in SWEEP_KINDS),
            resolution=int(merged.get("resolution", 128)),
            annulus=annulus,
            out=str(merged.get("out", ".")),
            jobs=int(merged.get("jobs", 1)),
            tolerances=tolerances,
            extra=extra,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, HartogsLabError):
            raise
        raise ConfigError(f"invalid configuration value: {exc}") from exc
    if len(cfg.annulus) != 2:
        raise ConfigError("annulus must be 'a,b'")
    return cfg.validate()


# ---------------------------------------------------------------------------
# output


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


@dataclass
class Report:
    name: str
    header: list
    rows: list
    summary: list
    exit_code: int = 0


def write_report(report, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.header)
    for row in report.rows:
        w.writerow([fmt(v) for v in row])
    csv_path = os.path.join(out_dir, f"{report.name}.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    sum_path = os.path.join(out_dir, f"{report.name}.summary.txt")
    with open(sum_path, "w") as fh:
        fh.write("\n".join(report.summary) + "\n")
    return csv_path, sum_path


# ---------------------------------------------------------------------------
# experiments


def run_moments(cfg):
    a, b = cfg.annulus
    A = Annulus(a, b)
    header = ["n", "moments.radial_moment.log_magnitude", "moments.radial_moment.sign",
              "moments.radial_moment.closed_form", "quadrature.radial_moment_quad", "moments.radial_moment.rel_err",
              "moments.distance_moment.log_magnitude", "moments.distance_moment.sign",
              "moments.distance_moment.closed_form", "quadrature.distance_moment_quad",
              "moments.distance_moment.rel_err", "moments.moment_ratio"]
    rows, worst = [], 0.0  # plain float for the summary
    for n in cfg.modes:
        r, d = radial_moment(A, n), distance_moment(A, n)
        rq, dq = radial_moment_quad(a, b, n), distance_moment_quad(a, b, n)
        er, ed = abs(float(r) / rq - 1), abs(float(d) / dq - 1)
        worst = max(worst, float(er), float(ed))
        rows.append([n, r.log_magnitude, r.sign, float(r), rq, er, d.log_magnitude, d.sign, float(d), dq, ed,
                     moment_ratio(A, n) if n != 0 else math.nan])
    summary = [
        f"moments on A({a:g}, {b:g}), n = {cfg.modes[0]}..{cfg.modes[-1]}",
        "radial_moment: integral of |w|^(2n) over the annulus (closed form, log space)",
        "distance_moment: integral of d_ab(w)^2 |w|^(2n) (closed form; quadrature for n = -1, -2)",
        "quadrature.*: independent adaptive Gauss-Legendre oracle",
        "moment_ratio: n^2 * distance_moment / radial_moment (limit b^2/2 as n -> +inf, a^2/2 as n -> -inf)",
        f"max relative error closed form vs oracle: {worst!r}",
    ]
    return Report("moments", header, rows, summary)


def run_lemma2(cfg):
    d = cfg.build_domain()
    grid = make_grid(d.base, cfg.resolution)
    header = ["n", "moments.mode_l2_norm", "moments.sobolev_surrogate_ratio", "moments.sobolev_surrogate_ratio.n_times_ratio"]
    rows = []
    for n in cfg.modes:
        ratio = sobolev_surrogate_ratio(d, grid, 1.0, n)
        rows.append([n, mode_l2_norm(d, grid, 1.0, n), ratio, abs(n) * ratio])
    sup = max(r[3] for r in rows)
    summary = [
        f"lemma2 surrogate on {d.name or 'custom'} with g = 1, h = {grid.h!r}",
        "mode_l2_norm: ||g w^n||^2 on the Hartogs domain (fiberwise radial moments)",
        "sobolev_surrogate_ratio: ||d_z g w^n|| / ||g w^n||, stand-in for the -1 norm ratio",
        f"sup n * ratio = {sup!r} (empirical constant C)",
    ]
    return Report("lemma2", header, rows, summary)


def run_weights(cfg):
    d = cfg.build_domain()
    grid = make_grid(d.v1_region(), cfg.resolution)
    header = ["n", "bergman.fiber_weight.min_log_weight", "bergman.fiber_weight.max_log_weight",
              "bergman.fiber_moment_log_weight.rel_err", "bergman.fiber_weight.min_laplacian_h2"]
    rows = []
    for n in cfg.modes:
        fw = fiber_weight(d, n, grid)
        alt = fiber_moment_log_weight(d, n, grid)
        sel = grid.support
        err = float(np.max(np.abs(np.expm1(fw.log_weight[sel] - alt[sel]))))
        lap = grid.laplacian(fw.lam)
        rows.append([n, float(fw.log_weight[sel].min()), float(fw.log_weight[sel].max()), err,
                     float(np.nanmin(lap) * grid.h ** 2)])
    summary = [f"fiber weights lambda_n on V1 of {d.name or 'custom'}, case {d.case_tag}, h = {grid.h!r}",
               "log_weight = -lambda_n = log of the fiber radial moment",
               "fiber_moment_log_weight.rel_err: closed form vs the moments.radial_moment path",
               "min_laplacian_h2: min discrete Laplacian of lambda_n times h^2 (subharmonicity)"]
    fw = fiber_weight(d, cfg.modes[0], grid)
    sel = grid.support
    q = float(np.max(np.exp(-fw.phi[sel] + fw.alpha[sel]) if d.case_tag == 1
                     else np.exp(fw.phi[sel] - fw.alpha[sel])))
    if q < 1:
        rep = weight_sandwich_check(fw, q)
        summary.append(f"weight_sandwich_check: c = {q!r}, n0 = {rep.n0}")
    if d.case_tag == 1:
        try:
            one = one_norm_bound_check(d, cfg.modes, grid)
            summary.append(f"one_norm_bound_check ||1|| <= pi a1 / sqrt(n-1): {'holds' if one.ok else 'fails'}, "
                           f"min margin {min(one.margins)!r}")
        except HartogsLabError as exc:
            summary.append(f"one_norm_bound_check not applicable: {exc}")
    return Report("weights", header, rows, summary)


def run_hankel(cfg):
    d = cfg.build_domain()
    rows, probe = probe_domain(d, cfg.modes, resolution=cfg.resolution)
    eps = list(DEFAULT_EPSILONS)
    header = (["n", "hankel.hankel_mode_norm_ratio", "hankel.compactness_probe.q",
               "hankel.compactness_probe.s", "hankel.compactness_probe.t"]
              + [f"hankel.compactness_probe.c_eps[{e!r}]" for e in eps])
    out = []
    for i, r in enumerate(rows):
        out.append(list(r[:1]) + [r[1], r[2], r[3], r[4]] + [probe.running[e][i] for e in eps])
    summary = [
        f"hankel modes on {d.name or 'custom'} (case {d.case_tag}), V1 = {d.v1_region().name}",
        "hankel_mode_norm_ratio: ||g_n||_{lambda_n} / ||1||_{lambda_n}, the size of H_psi on e_n",
        "q = ||H e_n||^2, s = ||beta e_n||, t = distance-weighted surrogate of ||beta e_n||_{-1} (unit e_n)",
        "c_eps[e]: running max(q - e s, 0) / t; its sup over n is C_eps",
        "C_eps: " + ", ".join(f"{e!r}: {probe.c_eps[e]!r}" for e in eps),
        f"verdict: {probe.verdict} ({probe.reason})",
    ]
    return Report("hankel", header, out, summary)


def run_spectra(cfg, d=None, name="spectra"):
    d = d if d is not None else cfg.build_domain()
    rep = divergence_diagnostic(d, cfg.modes, resolution=cfg.resolution, jobs=cfg.jobs,
                                tol=cfg.tolerances.get("residual", 1e-8))
    header = ["n", "spectral.magnetic_ground_state.lambda_m", "spectral.electric_ground_state.lambda_e",
              "spectral.magnetic_ground_state.residual", "spectral.electric_ground_state.residual",
              "spectral.magnetic_ground_state.imag", "spectral.divergence_diagnostic.epsilon"]
    rows = [[n, m, e, rm, re, im, ep] for n, m, e, rm, re, im, ep in
            zip(rep.modes, rep.lambda_m, rep.lambda_e, rep.residual_m, rep.residual_e, rep.imag_m, rep.epsilon)]
    summary = [
        f"ground-state energies on D(z0, a) for {d.name or 'custom'} (case {d.case_tag}), h = {rep.h!r}",
        "lambda_m: inf int |u_z|^2 e^{2 sigma} / int |u|^2 e^{2 sigma} (gauged form)",
        "lambda_e: lowest Dirichlet eigenvalue of -Laplacian + Laplacian(sigma)",
        f"sigma convention: {rep.sign_note}",
        "epsilon = 1 / (2 sqrt(lambda_m))",
        f"harmonic patch radius {rep.patch_radius!r}, bound {rep.patch_bound!r}",
        f"verdict: {rep.verdict} ({rep.reason})",
    ]
    return Report(name, header, rows, summary), rep


def run_pcert(cfg):
    d = cfg.build_domain()
    M = float(cfg.extra.get("pcert.M", 1.0))
    bname = cfg.extra.get("pcert.b_M", "zero")
    b = ZeroBump() if bname == "zero" else SmoothstepBump(d.center, float(cfg.extra.get("pcert.b_radius", 0.5)))
    side = cfg.extra.get("pcert.side", "both")
    samples = boundary_samples(d, side=side)
    checks, best = sweep_m1(d, M, samples, b)
    header = ["pcert.M1", "pcert.tangential_hessian_check.z_re", "pcert.tangential_hessian_check.z_im",
              "pcert.tangential_hessian_check.abs_w", "pcert.tangential_hessian_check.side",
              "pcert.certificate_function.g", "pcert.tangential_hessian_check.hessian",
              "pcert.tangential_hessian_check.passed"]
    rows = [[c.M1, smp.z.real, smp.z.imag, abs(smp.w), smp.side, smp.g, smp.hessian, c.passed]
            for c in checks for smp in c.samples]
    summary = [f"certificate M1 (|w|^2 e^phi - 1) + b_M on {d.name or 'custom'} ({side} samples, b_M = {bname})",
               f"target Hessian M = {M!r}, {len(samples)} samples",
               "one row per (M1, sample); passed refers to the whole sample set at that M1",
               f"min Hessian over M1: {min(c.min_hessian for c in checks)!r} .. {max(c.min_hessian for c in checks)!r}",
               f"first passing M1: {best.M1!r}" if best else "no M1 on the grid passes"]
    return Report("pcert", header, rows, summary)


def run_zoo_suite(cfg):
    rows, summary, mismatch = [], ["zoo suite: spectral divergence verdicts against recorded expectations"], False
    for entry in zoo():
        _, rep = run_spectra(cfg, entry.build(), name=f"spectra-{entry.name}")
        ok = rep.verdict == entry.expected
        mismatch |= not ok
        rows.append([entry.name, entry.label, entry.expected, rep.verdict, ok, rep.lambda_m[-1], rep.lambda_e[-1]])
        summary.append(f"{entry.name} {entry.label}: expected {entry.expected}, got {rep.verdict} ({rep.reason})")
    header = ["zoo.name", "zoo.label", "zoo.expected", "spectral.divergence_diagnostic.verdict", "zoo.match",
              "spectral.magnetic_ground_state.lambda_m_last", "spectral.electric_ground_state.lambda_e_last"]
    summary.append("all verdicts match" if not mismatch else "VERDICT MISMATCH")
    return Report("zoo-suite", header, rows, summary, 2 if mismatch else 0)


RUNNERS = {
    "moments": run_moments,
    "lemma2": run_lemma2,
    "weights": run_weights,
    "hankel": run_hankel,
    "spectra": lambda cfg: run_spectra(cfg)[0],
    "pcert": run_pcert,
    "zoo-suite": run_zoo_suite,
}


def run(cfg):
    """Run one experiment, write ``<experiment>.csv`` and its summary; returns (report, paths)."""
    t0 = time.perf_counter()
    report = RUNNERS[cfg.experiment](cfg)
    report.summary.append(f"backend: {_accel.backend_name()}; wall time {time.perf_counter() - t0:.2f} s")
    paths = write_report(report, cfg.out)
    return report, paths


def build_parser():
    p = argparse.ArgumentParser(prog="hartogs-lab", description="Mode-wise Hankel and spectral experiments on Hartogs domains.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment from a config file or by name")
    r.add_argument("target", help=f"config file or experiment name ({', '.join(EXPERIMENTS)})")
    r.add_argument("--jobs", type=int, default=None)
    r.add_argument("--out", default=None)
    r.add_argument("--modes", default=None, help="A..B or a comma list")
    r.add_argument("--n", dest="n_range", default=None, help="alias of --modes")
    r.add_argument("--resolution", type=int, default=None)
    r.add_argument("--annulus", default=None, help="a,b")
    r.add_argument("--zoo", default=None, help="zoo domain name (Z1..Z4)")
    return p


def _join_negative_ranges(argv):
    # argparse reads "-40..40" as an option; glue it to its flag
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--modes", "--n"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and ".." in nxt:
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_ranges(argv))
    try:
        if os.path.isfile(args.target):
            values = read_config(args.target)
        elif args.target in EXPERIMENTS:
            values = {"experiment": args.target}
        else:
            raise ConfigError(f"{args.target!r} is neither a config file nor a known experiment")
        overrides = {"jobs": args.jobs, "out": args.out, "modes": args.modes or args.n_range,
                     "resolution": args.resolution, "annulus": args.annulus, "domain": args.zoo}
        cfg = build_config(values, overrides)
        report, paths = run(cfg)
    except (HartogsLabError, OSError) as exc:
        print(f"hartogs-lab: error: {exc}", file=sys.stderr)
        return 1
    print("\n".join(report.summary))
    print(f"wrote {paths[0]}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
