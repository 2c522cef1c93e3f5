"""Stolz domains, the disc-and-sector region, numerical-range boundaries,
and the power/resolvent diagnostics."""

import numpy as np
import pytest

from altproj import (
    NumericalContractError,
    OmegaRegion,
    StolzDomain,
    build_cyclic,
    containment_check,
    numrange_boundary,
    omega_contains,
    resolvent_diagnostic,
    ritt_power_diagnostic,
    stolz_contains,
    stolz_margin,
    theta0,
    theta_recursion,
    two_lines,
)


def test_theta_recursion_first_values():
    assert theta_recursion(1) == 0.0
    assert theta_recursion(2) == pytest.approx(np.pi / 6, abs=1e-12)
    assert theta_recursion(3) == pytest.approx(1.0386496167677106, abs=1e-12)


def test_theta_recursion_increases_toward_pi_half():
    vals = [theta_recursion(n) for n in range(1, 11)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < np.pi / 2
    with pytest.raises(ValueError):
        theta_recursion(0)


def test_theta0_reference_values():
    assert theta0(0.5, 2) == pytest.approx(1.122963929865964, abs=1e-12)
    # c = 1 degenerates the domain to the closed disc
    assert theta0(1.0, 3) == pytest.approx(np.pi / 2, abs=1e-12)
    with pytest.raises(ValueError):
        theta0(-0.1, 2)
    with pytest.raises(ValueError):
        theta0(0.5, 1)


def test_stolz_membership():
    d = StolzDomain(np.pi / 6)
    assert d.radius == pytest.approx(0.5, abs=1e-15)
    assert d.contains(0.0)
    assert d.contains(1.0)
    assert d.contains(0.99)
    assert d.contains(0.49j)
    assert not d.contains(0.51j)
    assert not d.contains(1.0 + 1e-6)
    assert d.contains(1.0 + 1e-6, slack=1e-5)
    with pytest.raises(ValueError):
        StolzDomain(-0.1)


def test_stolz_degenerate_segment():
    # theta = 0 collapses the hull to the segment [0, 1]
    assert stolz_contains(0.5, 0.0)
    assert not stolz_contains(0.5 + 1e-3j, 0.0)
    with pytest.raises(ValueError):
        stolz_contains(0.0, -0.1)


def test_stolz_margin_at_the_origin_is_the_radius():
    for theta in (0.3, 0.7, 1.2):
        assert stolz_margin(0.0, theta) == pytest.approx(np.sin(theta), abs=1e-12)
    assert stolz_margin(1.1, 0.5) < 0.0


def test_omega_region_membership():
    region = OmegaRegion(2)  # disc |z - 1/4| <= 3/4 cut by a pi/6 sector at 1
    assert region.thetaN == pytest.approx(np.pi / 6, abs=1e-12)
    assert region.contains(1.0)  # the vertex itself counts
    assert region.contains(0.0)
    assert region.contains(-0.5)  # on the disc boundary
    assert not region.contains(-0.51)
    assert omega_contains(-0.51, region, slack=0.02)
    assert region.contains(0.5 + 0.2j)
    assert not region.contains(0.5 + 0.4j)  # inside the disc, outside the sector
    with pytest.raises(ValueError):
        OmegaRegion(1)


def test_omega_margin_signs():
    region = OmegaRegion(2)
    assert region.margin(0.0) == pytest.approx(0.5, abs=1e-12)
    assert region.margin(1.0) == pytest.approx(0.0, abs=1e-12)
    assert region.margin(-0.6) < 0.0


def test_boundary_of_a_diagonal_contraction():
    nb = numrange_boundary(np.diag([0.9, 0.1]), 64)
    assert len(nb) == 64
    i0 = int(np.argmin(np.abs(nb.angles - 0.0)))
    ipi = int(np.argmin(np.abs(nb.angles - np.pi)))
    assert nb.support[i0] == pytest.approx(0.9, abs=1e-12)
    assert nb.support[ipi] == pytest.approx(-0.1, abs=1e-12)
    # Hermitian operator: the numerical range is the segment [0.1, 0.9]
    assert np.abs(nb.points.imag).max() <= 1e-9
    assert nb.points.real.min() >= 0.1 - 1e-9
    assert nb.points.real.max() <= 0.9 + 1e-9


def test_boundary_rejects_non_contractions():
    with pytest.raises(NumericalContractError):
        numrange_boundary(np.diag([1.2, 0.0]), 16)
    with pytest.raises(ValueError):
        numrange_boundary(np.diag([0.5, 0.0]), 4)


def test_containment_holds_for_a_cyclic_product():
    cp = build_cyclic(two_lines(np.pi / 4))
    rep = containment_check(cp, np.cos(np.pi / 4), 2, m=128)
    assert rep.all_contained
    assert bool(np.all(rep.in_omega)) and bool(np.all(rep.in_stolz))
    assert rep.margins.min() >= -1e-7


def test_containment_flags_a_violator():
    t = np.diag([-0.9, 0.0])  # well outside both regions near z = -0.9
    with pytest.raises(NumericalContractError):
        containment_check(t, 0.0, 2)
    rep = containment_check(t, 0.0, 2, strict=False)
    assert not rep.all_contained
    worst_z, worst_margin = rep.worst()
    assert worst_margin < -0.1
    assert worst_z.real < 0.0


def test_power_profile_of_a_scaled_identity():
    # T = I/2: n ||T^n (I - T)|| = n 2^{-(n+1)}, maximal (0.25) first at n = 1
    sup, n_star, profile = ritt_power_diagnostic(0.5 * np.eye(2), 30)
    ns = np.arange(1, 31)
    assert np.allclose(profile, ns * 0.5 ** (ns + 1), atol=1e-15)
    assert sup == pytest.approx(0.25, abs=1e-15)
    assert n_star == 1
    with pytest.raises(ValueError):
        ritt_power_diagnostic(0.5 * np.eye(2), 0)


def test_power_profile_of_an_orthogonal_product_is_zero():
    cp = build_cyclic(two_lines(np.pi / 2))  # T = P2 P1 = 0
    sup, _, profile = ritt_power_diagnostic(cp, 10)
    assert sup == 0.0
    assert np.allclose(profile, 0.0)


def test_resolvent_diagnostic_of_the_zero_operator():
    cp = build_cyclic(two_lines(np.pi / 2))
    val = resolvent_diagnostic(cp)
    # sup over the default grid is attained at lambda = -(1 + 2^-10)
    expected = (2.0 + 2.0**-10) / (1.0 + 2.0**-10)
    assert val == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        resolvent_diagnostic(cp, radii=[0.99])
