"""Numerical range, spectral regions, and resolvent/power diagnostics.

The numerical range W(T) = {<Tx, x> : ||x|| = 1} of a contraction is
convex and compact, so its boundary is recovered from support functions:
for each angle phi the largest eigenvalue of the Hermitian part of
e^{-i phi} T is the support value h(phi), and the top eigenvector yields
a boundary point.  Products of N orthogonal projections have W(T)
contained in Omega_N (a disc-and-sector region with angle theta_N from
an explicit recursion) intersected with a Stolz domain S_theta0, where
sin(theta0) is the contraction base computed from the Friedrichs number.

The power profile n ||T^n (I - T)|| and the sampled resolvent quantity
|lambda - 1| ||(lambda I - T)^{-1}|| are the two operational faces of the
Ritt property; both are reported as measured values on declared grids,
never asserted as universal constants.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalContractError
from .linalg import as_complex_matrix, eigh_sym, spectral_norm

__all__ = [
    "StolzDomain",
    "OmegaRegion",
    "NumericalRangeBoundary",
    "numrange_boundary",
    "theta_recursion",
    "theta0",
    "stolz_contains",
    "stolz_margin",
    "omega_contains",
    "ContainmentReport",
    "containment_check",
    "ritt_power_diagnostic",
    "resolvent_diagnostic",
]

_GRID = 720  # angles used by the support-function membership test


def theta_recursion(n: int) -> float:
    """Angle theta_N: theta_1 = 0 and
    theta_{k+1} = arctan(2 tan(theta_k)/(1 + 2^{-k}) + sqrt((1 - 2^{-k})/(1 + 2^{-k}))).
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    theta = 0.0
    for k in range(1, n):
        p = 2.0 ** (-k)
        theta = np.arctan(2.0 * np.tan(theta) / (1.0 + p) + np.sqrt((1.0 - p) / (1.0 + p)))
    return float(theta)


def theta0(c: float, n: int) -> float:
    """Stolz angle with sin(theta0) = (1 - 3(N-1)(1-c)/N^3)^{1/2}.

    c = 1 returns the pi/2 sentinel (the domain degenerates to the
    closed unit disc) so aligned instances still flow through reporting.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError("c must lie in [0, 1]")
    if n < 2:
        raise ValueError("need at least two subspaces")
    s = np.sqrt(np.clip(1.0 - 3.0 * (n - 1) * (1.0 - c) / n**3, 0.0, 1.0))
    return float(np.arcsin(s))


@dataclass(frozen=True)
class StolzDomain:
    """Convex hull of the disc of radius sin(theta) and the point 1."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi / 2:
            raise ValueError("theta must lie in [0, pi/2]")

    @property
    def radius(self) -> float:
        return float(np.sin(self.theta))

    def support(self, phi) -> np.ndarray:
        """h(phi) = max(sin theta, cos phi)."""
        return np.maximum(self.radius, np.cos(phi))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return stolz_contains(z, self.theta, slack)

    def margin(self, z: complex) -> float:
        return stolz_margin(z, self.theta)


def _triangle_margin(z: complex, r: float) -> float:
    """Signed distance of z to the triangle (1, t+, t-) of tangency points.

    Positive inside.  The tangent points of the lines through 1 touching
    the disc |w| = r are t = r^2 +- i r sqrt(1 - r^2).
    """
    h = r * np.sqrt(max(1.0 - r * r, 0.0))
    verts = [1.0 + 0.0j, complex(r * r, h), complex(r * r, -h)]
    pt = np.array([z.real, z.imag])
    vs = [np.array([v.real, v.imag]) for v in verts]
    centroid = sum(vs) / 3.0
    dists = []
    for a, b in ((0, 1), (1, 2), (2, 0)):
        edge = vs[b] - vs[a]
        length = np.linalg.norm(edge)
        if length < 1e-30:
            return -np.inf  # degenerate triangle; caller must use another test
        normal = np.array([-edge[1], edge[0]]) / length
        if np.dot(normal, centroid - vs[a]) < 0.0:
            normal = -normal
        dists.append(float(np.dot(normal, pt - vs[a])))
    return min(dists)


def stolz_contains(z: complex, theta: float, slack: float = 0.0) -> bool:
    """Membership of z in the Stolz domain S_theta, decided within slack.

    Combines the 720-point support-function grid with exact geometric
    tests (disc membership, or the triangle spanned by 1 and the two
    tangency points); together they decide membership with error below
    the slack.
    """
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    z = complex(z)
    r = float(np.sin(theta))
    phi = np.linspace(0.0, 2.0 * np.pi, _GRID, endpoint=False)
    grid_ok = bool(np.all(np.real(np.exp(-1j * phi) * z) <= np.maximum(r, np.cos(phi)) + slack))
    if r >= 1.0 - 1e-12:
        return grid_ok and abs(z) <= 1.0 + slack
    if abs(z) <= r + slack:
        return grid_ok
    if r <= 1e-12:
        analytic = abs(z.imag) <= slack and -slack <= z.real <= 1.0 + slack
    else:
        analytic = _triangle_margin(z, r) >= -slack
    return grid_ok and analytic


def stolz_margin(z: complex, theta: float) -> float:
    """Support-function margin min_phi (h(phi) - Re(e^{-i phi} z)).

    Positive well inside the domain, negative outside; accurate to the
    angular grid resolution (~1e-5), intended for reporting.
    """
    r = float(np.sin(theta))
    phi = np.linspace(0.0, 2.0 * np.pi, _GRID, endpoint=False)
    return float(np.min(np.maximum(r, np.cos(phi)) - np.real(np.exp(-1j * phi) * complex(z))))


@dataclass(frozen=True)
class OmegaRegion:
    """Region of eq-style membership: a disc around 2^{-N} cut by a sector at 1.

    lambda belongs iff |lambda - 2^{-N}| <= 1 - 2^{-N} and
    |arg(1 - lambda)| <= theta_N, with arg(0) taken as 0 so that
    lambda = 1 is a member.
    """

    N: int
    thetaN: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.thetaN is None:
            object.__setattr__(self, "thetaN", theta_recursion(self.N))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return omega_contains(z, self, slack)

    def margin(self, z: complex) -> float:
        """min of the disc slack and the sector slack (heterogeneous units)."""
        z = complex(z)
        p = 2.0 ** (-self.N)
        disc = (1.0 - p) - abs(z - p)
        w = 1.0 - z
        sector = self.thetaN - (0.0 if abs(w) <= 1e-12 else abs(np.angle(w)))
        return float(min(disc, sector))


def omega_contains(z: complex, region: OmegaRegion, slack: float = 0.0) -> bool:
    """Both defining inequalities of the region, each within slack."""
    z = complex(z)
    p = 2.0 ** (-region.N)
    if abs(z - p) > (1.0 - p) + slack:
        return False
    w = 1.0 - z
    arg = 0.0 if abs(w) <= 1e-12 else abs(np.angle(w))
    return arg <= region.thetaN + slack


@dataclass(frozen=True)
class NumericalRangeBoundary:
    """Support-function samples of the numerical range of a contraction."""

    angles: np.ndarray
    support: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        resid = np.abs(np.real(np.exp(-1j * self.angles) * self.points) - self.support)
        if resid.size and resid.max() > 1e-9:
            raise NumericalContractError("boundary point does not realize its support value")
        if self.points.size and np.abs(self.points).max() > 1.0 + 1e-9:
            raise NumericalContractError("numerical range leaves the closed unit disc")

    def __len__(self) -> int:
        return len(self.angles)


def numrange_boundary(t, m: int) -> NumericalRangeBoundary:
    """Boundary of W(T) at m equally spaced support angles.

    For each phi, h(phi) is the top eigenvalue of the Hermitian part of
    e^{-i phi} T and the boundary point is <Tx, x> at the corresponding
    top eigenvector, so Re(e^{-i phi} z(phi)) = h(phi) by construction.
    """
    if m < 8:
        raise ValueError("need at least 8 support angles")
    t = as_complex_matrix(getattr(t, "matrix", t))
    angles = 2.0 * np.pi * np.arange(m) / m
    support = np.empty(m)
    points = np.empty(m, dtype=np.complex128)
    for i, phi in enumerate(angles):
        w, v = eigh_sym(np.exp(-1j * phi) * t)
        support[i] = w[-1]
        x = v[:, -1]
        points[i] = x.conj() @ (t @ x)
    return NumericalRangeBoundary(angles=angles, support=support, points=points)


@dataclass(frozen=True)
class ContainmentReport:
    """Per-point verdicts for W(T) ⊆ Omega_N ∩ S_theta0."""

    boundary: NumericalRangeBoundary
    region: OmegaRegion
    stolz: StolzDomain
    in_omega: np.ndarray
    in_stolz: np.ndarray
    margins: np.ndarray
    slack: float

    @property
    def all_contained(self) -> bool:
        return bool(np.all(self.in_omega) and np.all(self.in_stolz))

    def worst(self):
        i = int(np.argmin(self.margins))
        return complex(self.boundary.points[i]), float(self.margins[i])


def containment_check(t, c: float, n: int, m: int = 256, slack: float = 1e-7,
                      strict: bool = True) -> ContainmentReport:
    """Check every sampled boundary point of W(T) against Omega_N ∩ S_theta0.

    theta0 is derived from the Friedrichs number c of the instance.  With
    ``strict`` a violation beyond the slack raises (such a violation would
    falsify the implementation, not the underlying containment).
    """
    boundary = numrange_boundary(t, m)
    region = OmegaRegion(n)
    dom = StolzDomain(theta0(c, n))
    in_omega = np.array([omega_contains(z, region, slack) for z in boundary.points])
    in_stolz = np.array([stolz_contains(z, dom.theta, slack) for z in boundary.points])
    margins = np.array([min(region.margin(z), stolz_margin(z, dom.theta))
                        for z in boundary.points])
    report = ContainmentReport(boundary=boundary, region=region, stolz=dom,
                               in_omega=in_omega, in_stolz=in_stolz,
                               margins=margins, slack=slack)
    if strict and not report.all_contained:
        z, margin = report.worst()
        raise NumericalContractError(
            f"numerical range point {z} escapes the containment region "
            f"(margin {margin:.3e}, slack {slack:.1e})"
        )
    return report


def _dense(t) -> np.ndarray:
    return as_complex_matrix(getattr(t, "matrix", t))


def ritt_power_diagnostic(t, n_max: int):
    """Profile n ||T^n (I - T)|| for n = 1..n_max.

    Returns (sup value, argmax n, full profile).  Boundedness of the
    profile is one operational face of the Ritt property.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    t = _dense(t)
    d = t.shape[0]
    defect = np.eye(d, dtype=np.complex128) - t
    profile = np.empty(n_max)
    power = np.eye(d, dtype=np.complex128)
    for n in range(1, n_max + 1):
        power = power @ t
        profile[n - 1] = n * spectral_norm(power @ defect)
    argmax = int(np.argmax(profile)) + 1
    return float(profile[argmax - 1]), argmax, profile


def resolvent_diagnostic(t, radii=None, angles_per_radius: int = 64) -> float:
    """Sampled lower estimate of sup |lambda - 1| ||(lambda I - T)^{-1}||.

    lambda runs over ``angles_per_radius`` equally spaced points on each
    circle |lambda| = r; the default radii 1 + 2^{-k}, k = 1..10, shrink
    geometrically toward the unit circle.  The angle grid includes pi
    when the count is even.  The supremum over all |lambda| > 1 cannot be
    sampled exhaustively, so this is a measured value on a declared grid.
    """
    t = _dense(t)
    if radii is None:
        radii = [1.0 + 2.0 ** (-k) for k in range(1, 11)]
    radii = list(radii)
    if any(r <= 1.0 for r in radii):
        raise ValueError("all radii must exceed 1")
    d = t.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    best = 0.0
    for r in radii:
        for phi in 2.0 * np.pi * np.arange(angles_per_radius) / angles_per_radius:
            lam = r * np.exp(1j * phi)
            sigma_min = np.linalg.svd(lam * eye - t, compute_uv=False)[-1]
            if sigma_min <= 0.0:
                raise NumericalContractError("singular resolvent at |lambda| > 1")
            best = max(best, abs(lam - 1.0) / sigma_min)
    return float(best)
