import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hartogs_lab.domain import (RadialProfile, annulus, boundary_samples, classify_strata, disc,
                                fiber_distance, fiber_interval, intersect, make_domain, make_grid,
                                parse_profile, parse_region)
from hartogs_lab.errors import DomainError, PreconditionError, ProfileCrossingError
from hartogs_lab.zoo import zoo, zoo_domain

UNIT = disc(0j, 1.0)


def product():
    return make_domain(UNIT, RadialProfile("constant", (0.0,)), RadialProfile("constant", (-math.log(2),)), 1)


def test_product_domain_fibers():
    d = product()
    assert fiber_interval(d, 0.3 - 0.2j) == pytest.approx((1.0, 2.0), rel=1e-15)


def test_exponential_inner_profile_is_valid():
    d = make_domain(UNIT, RadialProfile("quadratic-radial", (-1.0,)), RadialProfile("constant", (-math.log(4),)), 1)
    assert fiber_interval(d, 1.0) == pytest.approx((math.e, 4.0), rel=1e-14)


def test_crossing_profiles_rejected():
    with pytest.raises(ProfileCrossingError, match="profile crossing"):
        make_domain(UNIT, RadialProfile("constant", (-math.log(2),)), RadialProfile("constant", (0.0,)), 1)


def test_z2_fibers():
    d = zoo_domain("Z2")
    assert fiber_interval(d, 0.0) == pytest.approx((1.0, 4.0))
    assert fiber_interval(d, 1j) == pytest.approx((2.718281828, 4.0), rel=1e-9)


def test_fiber_interval_outside_base():
    with pytest.raises(DomainError):
        fiber_interval(product(), 1.5)


@pytest.mark.parametrize("r, expected", [(1.5, 0.5), (1.1, 0.1), (2.0, 0.0)])
def test_fiber_distance_examples(r, expected):
    assert fiber_distance(product(), 0.0, r) == pytest.approx(expected, abs=1e-15)


def test_fiber_distance_outside_interval():
    with pytest.raises(DomainError):
        fiber_distance(product(), 0.0, 2.5)


@given(st.floats(1.0, 2.0), st.floats(1.0, 2.0), st.floats(0.0, 0.99), st.floats(0, 2 * math.pi))
def test_fiber_distance_is_1_lipschitz(r1, r2, rho, t):
    d = zoo_domain("Z2")
    z = rho * complex(math.cos(t), math.sin(t))
    r_in, r_out = fiber_interval(d, z)
    s1, s2 = r_in + (r_out - r_in) * (r1 - 1.0), r_in + (r_out - r_in) * (r2 - 1.0)
    assert abs(fiber_distance(d, z, s1) - fiber_distance(d, z, s2)) <= abs(s1 - s2) + 1e-12


def test_fiber_distance_vanishes_at_endpoints():
    d = zoo_domain("Z4")
    r_in, r_out = fiber_interval(d, 0.4)
    assert fiber_distance(d, 0.4, r_in) == 0.0
    assert fiber_distance(d, 0.4, r_out) == 0.0


def ellipsoid_rho(b1=3.0, a1=1.0, scale=1.0):
    return lambda z, r: scale * (abs(z) ** 2 / a1 ** 2 + r ** 2 / b1 ** 2 - 1.0)


def test_strata_ellipsoid_examples():
    d = product()
    s = classify_strata(d, [(1.0, 0.0), (0.0, 3.0)], k_max=10, rho=ellipsoid_rho())
    assert s[0].stratum_index == 0 and abs(s[0].rho_w) < 1e-10
    assert s[1].rho_w == pytest.approx(2 / 3, rel=1e-10)
    assert s[1].stratum_index == 2


def test_strata_scale_consistency():
    d = product()
    base = classify_strata(d, [(0.0, 3.0)], 10, rho=ellipsoid_rho())[0]
    scaled = classify_strata(d, [(0.0, 3.0)], 10, rho=ellipsoid_rho(scale=0.25))[0]
    assert scaled.rho_w == pytest.approx(0.25 * base.rho_w, rel=1e-10)
    # 1/k <= 1/6 gives k = 6
    assert scaled.stratum_index == 6


def test_profile_strata_are_first_stratum():
    d = product()
    samples = boundary_samples(d)
    strata = classify_strata(d, samples, k_max=3)
    assert {s.stratum_index for s in strata} == {1}
    outer = [s for s in strata if s.side == "outer"]
    assert outer and all(s.rho_w == 1.0 for s in outer)


def test_strata_errors():
    d = product()
    with pytest.raises(PreconditionError):
        classify_strata(d, [(0.0, 1.5)], k_max=3)
    with pytest.raises(PreconditionError):
        classify_strata(d, [(0.0, 2.0)], k_max=0)


def test_corner_margin_excludes_base_edge():
    d = product()
    zs = np.array([z for z, _ in boundary_samples(d)])
    assert np.all(np.abs(zs) <= 1.0 - 0.02 * 2.0 + 1e-12)


def test_unit_disc_grid():
    g = make_grid(UNIT, 128)
    assert g.h == pytest.approx(2 / 128)
    assert g.mask_fraction == pytest.approx(math.pi / 4, rel=0.02)
    assert g.weights.sum() == pytest.approx(math.pi, rel=1e-5)


def test_small_disc_spacing():
    assert make_grid(disc(0j, 0.5), 64).h == pytest.approx(1 / 64)


def test_empty_region_rejected():
    with pytest.raises(DomainError):
        make_grid(intersect(disc(0j, 1.0), disc(5 + 0j, 1.0)), 32)


def test_low_resolution_rejected():
    with pytest.raises(DomainError):
        make_grid(UNIT, 4)


def test_mask_matches_membership():
    g = make_grid(annulus(0.1 + 0.2j, 0.3, 0.8), 64)
    inside = g.region.contains(g.Z)
    assert np.array_equal(g.mask, inside)


def test_quadrature_nodes_integrate_polynomials():
    g = make_grid(UNIT, 128)
    nz = g.nodes
    # midpoint bias on full cells is pi h^2 / 6 for |z|^2; cut cells add far less
    err = np.sum(nz.w * np.abs(nz.z) ** 2) - math.pi / 2
    assert abs(err + math.pi * g.h ** 2 / 6) < 0.1 * g.h ** 2


@pytest.mark.parametrize("entry", zoo(), ids=lambda e: e.name)
def test_normalization(entry):
    d = entry.build()
    g = make_grid(d.base, 64)
    r_in, r_out = d.radii(d.base.clamp(g.Z[g.mask]), normalized=True)
    if d.case_tag == 1:
        assert r_in.min() > 1.0
    else:
        assert r_out.max() < 1.0


def test_ellipsoid_cap_formula():
    p = RadialProfile("ellipsoid-cap", (1.5, 0.7), 0.1j)
    z = 0.3 + 0.4j
    u2 = abs(z - 0.1j) ** 2
    assert p.value(z) == pytest.approx(math.log(1.5) - math.log(0.7) - 0.5 * math.log(1.5 ** 2 - u2), rel=1e-14)


def test_paraboloid_cap_formula():
    p = RadialProfile("paraboloid-cap", (0.1, 0.2))
    assert p.value(0.5) == pytest.approx(-math.log(0.2 * 0.25 + 0.1), rel=1e-14)


@pytest.mark.parametrize("text, cls", [
    ("constant(1.3)", "harmonic"),
    ("quadratic-radial(-1)", "superharmonic"),
    ("quadratic-radial(2)", "subharmonic"),
    ("paraboloid-cap(0.1, 0.2)", "superharmonic"),
    ("mollified-plateau(0.25, 0.05)", "superharmonic"),
])
def test_sign_classes(text, cls):
    p = parse_profile(text)
    g = make_grid(disc(0j, 0.95), 24)
    z = g.Z[g.mask]
    got = p.sign_class(z)
    assert got == cls or (cls == "superharmonic" and got == "harmonic" and text.startswith("constant"))


@pytest.mark.parametrize("text", ["quadratic-radial(-1)", "ellipsoid-cap(1.2, 0.9)", "paraboloid-cap(0.1, 0.2)",
                                  "mollified-plateau(0.25, 0.05)"])
def test_analytic_laplacian_matches_numeric(text):
    p = parse_profile(text)
    # off the ramp seams of the plateau family (|z|^2 = 0.25, 0.3, 0.35), where it is only C^2
    z = np.array([0.05, 0.3 + 0.2j, -0.53j, 0.62, 0.7 - 0.1j])
    np.testing.assert_allclose(p.laplacian(z), p.numeric_laplacian(z, 1e-3), atol=1e-5, rtol=1e-6)


def test_analytic_dz_matches_numeric():
    p = parse_profile("ellipsoid-cap(1.2, 0.9)")
    z, s = 0.3 + 0.2j, 1e-6
    fx = (p.value(z + s) - p.value(z - s)) / (2 * s)
    fy = (p.value(z + 1j * s) - p.value(z - 1j * s)) / (2 * s)
    assert p.dz(z) == pytest.approx(0.5 * (fx - 1j * fy), rel=1e-7)


def test_unknown_family_and_region():
    with pytest.raises(DomainError):
        parse_profile("cubic(1)")
    with pytest.raises(DomainError):
        parse_region("square(0, 0, 1)")


def test_clamp_projects_to_closure():
    z = np.array([0.5, 2.0, -3j])
    c = UNIT.clamp(z)
    assert np.all(np.abs(c) <= 1.0)
    assert c[0] == 0.5
