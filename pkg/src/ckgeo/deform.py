"""Non-standard sl(2) Poisson coalgebra and its curved-space geometry.

The deformed Poisson brackets

    {J3, J+} = 2 J+ cosh(z J-),   {J3, J-} = -2 sinh(z J-)/z,   {J-, J+} = 4 J3

are realized on n-particle phase space by J- = sum q_i^2 and, for J+ and J3,
site prefactors

    c_i = sinh(z q_i^2)/(z q_i^2) * exp(-z sum_{j<i} q_j^2) * exp(+z sum_{j>i} q_j^2)

iterating the coproduct; the bracket closure of this pattern for every n
is enforced by tests rather than assumed.  The Casimir
C = sinh(z J-)/z J+ - J3^2 built on the leading or trailing m sites supplies
the integrals of the geodesic motion.

Geometry: the kinetic Hamiltonian (1/2) J+ f(z J-) is the geodesic flow of a
positive-definite 3D metric with diagonal entries 2/(c_i f); its scalar
curvature is the closed form

    K(x) = z [ 6 f' cosh x + (4 f'' - 5 f - 5 f'^2/f) sinh x ],  x = z q^2,

non-constant in general.  A coordinate change to polar-type variables, done
here entirely in curvature-labelled trigonometry with kappa1 = z and
kappa2 = lambda2^2, rewrites the metric as 1/(Ck_z(r) g(r)) times the
constant-curvature polar metric, with g(r) = f(-ln Ck_z(r)); the choice
g = 1/Ck_z collapses the conformal factor and returns the constant-curvature
space, so a single parameter z acts as deformation, contraction and
curvature at once.

Conventions: the Cartesian metric carries the overall factor 2 of the
ds^2 = 2T dt^2 kinetic-energy normalization (its z -> 0 limit is
2 * identity, still flat); the polar kinetic Hamiltonian equals
(1/4) J+ f(z J-) under canonical transport of momenta.
The real coordinate change exists only for lambda2^2 > 0 -- a real Jacobian
cannot alter metric signature, so the Lorentzian family is reached by the
polar-side construction directly and `polar_change` raises on
lambda2^2 <= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import (
    ChartDomainError,
    ConformalSingularityError,
    DegenerateMetricError,
)
from .spaces import MetricField
from .trig import ck_arcsin, ck_cos, ck_sin

_SINGULARITY_RADIUS = 1e-6


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Smooth profile f with f(0) = 1; optional analytic derivatives.

    Missing derivatives fall back to 4th-order finite differences, which is
    enough for every tolerance in the verification suite.
    """

    name: str
    f: Callable[[float], float]
    df: Optional[Callable[[float], float]] = None
    d2f: Optional[Callable[[float], float]] = None

    def d1(self, x):
        if self.df is not None:
            return self.df(x)
        # step balances 4th-order truncation against stencil roundoff
        h = 5e-3 * max(1.0, float(np.max(np.abs(x))) if np.ndim(x) else abs(x))
        return (-self.f(x + 2 * h) + 8 * self.f(x + h) - 8 * self.f(x - h) + self.f(x - 2 * h)) / (12 * h)

    def d2(self, x):
        if self.d2f is not None:
            return self.d2f(x)
        h = 5e-3 * max(1.0, float(np.max(np.abs(x))) if np.ndim(x) else abs(x))
        return (-self.f(x + 2 * h) + 16 * self.f(x + h) - 30 * self.f(x)
                + 16 * self.f(x - h) - self.f(x - 2 * h)) / (12 * h * h)


PROFILES: Dict[str, Profile] = {
    "one": Profile("one", f=lambda x: np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0,
                   df=lambda x: 0.0 * np.asarray(x, dtype=float), d2f=lambda x: 0.0 * np.asarray(x, dtype=float)),
    # g = 1/Ck_z(r) is f(x) = e^x on the chart; "ck" is the alias used by the CLI
    "exp": Profile("exp", f=np.exp, df=np.exp, d2f=np.exp),
    "poly2": Profile("poly2", f=lambda x: 1.0 + 0.5 * np.asarray(x, dtype=float) ** 2,
                     df=lambda x: np.asarray(x, dtype=float), d2f=lambda x: np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0),
}
PROFILES["ck"] = Profile("ck", f=np.exp, df=np.exp, d2f=np.exp)


def get_profile(profile) -> Profile:
    if isinstance(profile, Profile):
        return profile
    if isinstance(profile, str):
        try:
            return PROFILES[profile]
        except KeyError:
            raise KeyError(f"unknown profile {profile!r}; known: {sorted(PROFILES)}") from None
    if callable(profile):
        return Profile(name=getattr(profile, "__name__", "custom"), f=profile)
    raise TypeError("profile must be a name, a Profile, or a callable")


@dataclass(frozen=True)
class DeformationParams:
    """Deformation strength z, signature coefficient lambda2^2, profile f."""

    z: float
    lambda2_sq: float = 1.0
    profile: Profile = field(default_factory=lambda: PROFILES["one"])

    def __post_init__(self):
        object.__setattr__(self, "profile", get_profile(self.profile))


@dataclass(frozen=True)
class PhasePoint:
    """Canonical coordinates; arrays may carry a leading batch shape."""

    q: np.ndarray
    p: np.ndarray

    def __init__(self, q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        if q.shape != p.shape:
            raise ValueError("q and p must have the same shape")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.shape[-1]


@dataclass(frozen=True)
class GeneratorTriple:
    j_minus: np.ndarray
    j_plus: np.ndarray
    j_three: np.ndarray


def sinhc(u):
    """sinh(u)/u with its removable singularity filled by series."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-6
    u_safe = np.where(small, 1.0, u)
    out = np.where(small, 1.0 + u * u / 6.0 + u**4 / 120.0, np.sinh(u_safe) / u_safe)
    return out if out.ndim else float(out)


def site_prefactors(z: float, q: np.ndarray) -> np.ndarray:
    """c_i of the n-site realization, vectorized over leading batch axes."""
    q = np.asarray(q, dtype=float)
    q2 = q * q
    total = q2.sum(axis=-1, keepdims=True)
    upto = np.cumsum(q2, axis=-1)            # sum_{j<=i}
    before = upto - q2                       # sum_{j<i}
    after = total - upto                     # sum_{j>i}
    return sinhc(z * q2) * np.exp(z * (after - before))


def realization(params: DeformationParams, n_sites: int, pt: PhasePoint) -> GeneratorTriple:
    """Values of (J-, J+, J3) on n-site phase space.

    At z = 0 this is (sum q^2, sum p^2, sum qp); for any n the prefactors
    follow the coproduct iteration of the one-site realization.
    """
    if n_sites < 1:
        raise ValueError("need n_sites >= 1")
    if pt.n != n_sites:
        raise ValueError(f"phase point has {pt.n} sites, expected {n_sites}")
    q, p = pt.q, pt.p
    c = site_prefactors(params.z, q)
    j_minus = (q * q).sum(axis=-1)
    j_plus = (c * p * p).sum(axis=-1)
    j_three = (c * q * p).sum(axis=-1)
    return GeneratorTriple(j_minus=j_minus, j_plus=j_plus, j_three=j_three)


def generator_functions(params: DeformationParams, n_sites: int):
    """The three generators as plain callables f(q, p) for bracket numerics."""
    z = params.z

    def j_minus(q, p):
        return (np.asarray(q) ** 2).sum(axis=-1)

    def j_plus(q, p):
        return (site_prefactors(z, q) * np.asarray(p) ** 2).sum(axis=-1)

    def j_three(q, p):
        return (site_prefactors(z, q) * np.asarray(q) * np.asarray(p)).sum(axis=-1)

    return {"-": j_minus, "+": j_plus, "3": j_three}


def canonical_poisson(fa: Callable, fb: Callable, pt: PhasePoint, step: float = 1e-5):
    """{fa, fb} = sum_i (dfa/dq_i dfb/dp_i - dfb/dq_i dfa/dp_i).

    Callables take (q, p) arrays; derivatives are 4th-order central
    differences with per-coordinate step max(step, step*|x_i|).  Works on a
    batch of phase points at once.
    """
    q, p = pt.q, pt.p
    n = pt.n

    def d4(f, arr, other, i, wrt_q):
        h = max(step, step * float(np.max(np.abs(arr[..., i]))) if arr.size else step)
        e = np.zeros(n)
        e[i] = h
        if wrt_q:
            vals = [f(arr + s * e, other) for s in (2, 1, -1, -2)]
        else:
            vals = [f(other, arr + s * e) for s in (2, 1, -1, -2)]
        return (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h)

    out = 0.0
    for i in range(n):
        dfa_q = d4(fa, q, p, i, True)
        dfb_p = d4(fb, p, q, i, False)
        dfb_q = d4(fb, q, p, i, True)
        dfa_p = d4(fa, p, q, i, False)
        out = out + dfa_q * dfb_p - dfb_q * dfa_p
    return out


def casimir(params: DeformationParams, n_sites: int, pt: PhasePoint):
    """Deformed Casimir sinh(z J-)/z J+ - J3^2 on the n-site realization."""
    gen = realization(params, n_sites, pt)
    shz = gen.j_minus * sinhc(params.z * gen.j_minus)    # sinh(z J-)/z
    return shz * gen.j_plus - gen.j_three**2


def subchain_casimir(params: DeformationParams, pt: PhasePoint, m: int,
                     side: str = "leading"):
    """Casimir of the leading or trailing m-site subchain of a longer chain.

    Both families Poisson-commute with every generator of the full chain
    (the trailing subchain keeps the site-ordering convention: reversing the
    order would break the exponential weights and is *not* conserved), so
    they supply the extra integrals behind maximal superintegrability.
    """
    if side not in ("leading", "trailing"):
        raise ValueError("side must be 'leading' or 'trailing'")
    if not 1 <= m <= pt.n:
        raise ValueError(f"subchain length m={m} outside 1..{pt.n}")
    if side == "leading":
        sub = PhasePoint(pt.q[..., :m], pt.p[..., :m])
    else:
        sub = PhasePoint(pt.q[..., pt.n - m:], pt.p[..., pt.n - m:])
    return casimir(params, m, sub)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def deformed_metric_cartesian(params: DeformationParams, n: int = 3) -> MetricField:
    """Diagonal metric of the kinetic flow, entries 2/(c_i f(z q^2)).

    Carries the overall factor 2 of the ds^2 = 2T dt^2 convention, so the
    z -> 0 limit is 2*identity (flat) and the closed-form curvatures below
    apply without rescaling.
    """
    prof = params.profile
    z = params.z

    def evaluate(q: np.ndarray) -> np.ndarray:
        c = site_prefactors(z, q)
        fval = prof.f(z * float((q * q).sum()))
        return np.diag(2.0 / (c * fval))

    def guard(q: np.ndarray) -> bool:
        fval = prof.f(z * float((q * q).sum()))
        return bool(np.isfinite(fval) and fval > 0)

    return MetricField(dimension=n, evaluate=evaluate, domain_guard=guard,
                       degenerate=False, name=f"deformed-cartesian(z={z},f={prof.name})")


def scalar_curvature_formula(params: DeformationParams, x) -> float:
    """Closed-form scalar curvature K(x) at x = z q^2.

    K = z [6 f'(x) cosh x + (4 f''(x) - 5 f(x) - 5 f'(x)^2/f(x)) sinh x];
    for f = 1 this is -5 z sinh x, and for f = e^x it collapses to the
    constant 6z.
    """
    prof = params.profile
    fx = prof.f(x)
    if np.any(np.asarray(fx) == 0):
        raise ZeroDivisionError("profile vanishes at x; curvature formula undefined")
    d1, d2 = prof.d1(x), prof.d2(x)
    return params.z * (6.0 * d1 * np.cosh(x) + (4.0 * d2 - 5.0 * fx - 5.0 * d1**2 / fx) * np.sinh(x))


def sectional_curvatures_cartesian(params: DeformationParams, q) -> Dict[str, float]:
    """Closed-form sectional curvatures for profile f = 1 at a point q.

    The three coordinate planes satisfy the sum rule
    K = 2 (K12 + K13 + K23) = -5 z sinh(z q^2); the finite-difference engine
    confirms each plane individually.
    """
    z = params.z
    q = np.asarray(q, dtype=float)
    q2 = q * q
    s = q2.sum()
    e = np.exp(-z * s) * z / 4.0
    k12 = e * (1.0 + np.exp(2 * z * q2[2]) - 2.0 * np.exp(2 * z * s))
    k13 = e * (2.0 - np.exp(2 * z * q2[2]) + np.exp(2 * z * (q2[1] + q2[2])) - 2.0 * np.exp(2 * z * s))
    k23 = e * (2.0 - np.exp(2 * z * (q2[1] + q2[2])) - np.exp(2 * z * s))
    return {"K12": float(k12), "K13": float(k13), "K23": float(k23),
            "K": float(2.0 * (k12 + k13 + k23))}


# ---------------------------------------------------------------------------
# coordinate change q <-> (r, theta, phi)
# ---------------------------------------------------------------------------

def _phi_exp_ratio(u):
    """(1 - e^{-u})/u with the removable singularity filled."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-8
    u_safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 - u / 2.0 + u * u / 6.0, -np.expm1(-u_safe) / u_safe)


def _require_positive_k2(params: DeformationParams, what: str):
    if params.lambda2_sq <= 0:
        raise ChartDomainError(
            f"{what} requires lambda2^2 > 0: a real change of coordinates cannot alter the "
            "metric signature, so the Lorentzian/degenerate families have no real q-chart")


def polar_change(params: DeformationParams, q) -> "GeodesicPolarCoords":
    """Forward map q -> (r, theta, phi), canonical branch (all angles principal).

    Solves, in curvature-labelled trigonometry with kappa1 = z and
    kappa2 = lambda2^2,

        Ck_z(r)^2 = e^{-2 z q^2},
        kappa2 Sk_{k2}(theta)^2 = (e^{2z(q1^2+q2^2)} - 1) / (e^{2z q^2} - 1),
        tan(phi)^2 = (e^{2z q1^2} - 1) / (e^{2z q1^2}(e^{2z q2^2} - 1)),

    which is smooth through z = 0 (there it reduces to spherical coordinates
    of radius sqrt(2)|q|).  Defined for lambda2^2 > 0 only.
    """
    from .spaces import GeodesicPolarCoords

    _require_positive_k2(params, "polar_change")
    z, k2 = params.z, params.lambda2_sq
    q = np.asarray(q, dtype=float)
    if q.shape != (3,):
        raise ValueError("polar_change expects a single 3-vector q")
    q2 = q * q
    s = q2.sum()
    if s == 0.0:
        return GeodesicPolarCoords(r=0.0, theta=0.0, phi=(0.0,))
    # radial: Sk_z(r)^2 = (1 - e^{-2 z S})/z = 2S * phi(2 z S), Ck_z(r) = e^{-zS} > 0
    sk_r = math.sqrt(2.0 * s * float(_phi_exp_ratio(2.0 * z * s)))
    r = float(ck_arcsin(z, sk_r))
    # angle theta: kappa2 Sk_{k2}(theta)^2 = (E1 E2 - 1)/(E1 E2 E3 - 1)
    s12 = q2[0] + q2[1]
    if z == 0.0:
        u2 = s12 / s
    else:
        u2 = np.expm1(2 * z * s12) / np.expm1(2 * z * s)
    theta = float(ck_arcsin(k2, math.sqrt(max(u2, 0.0) / k2)))
    # angle phi: tan^2 phi = (E1 - 1)/(E1 (E2 - 1))
    if z == 0.0:
        phi = math.atan2(abs(q[0]), abs(q[1]))
    else:
        num = math.sqrt(abs(np.expm1(2 * z * q2[0])))
        den = math.sqrt(math.exp(2 * z * q2[0]) * abs(np.expm1(2 * z * q2[1])))
        phi = math.atan2(num, den)
    return GeodesicPolarCoords(r=r, theta=theta, phi=(phi,))


def polar_change_inverse(params: DeformationParams, coords) -> np.ndarray:
    """Inverse map (r, theta, phi) -> q on the canonical branch q_i >= 0."""
    from .spaces import GeodesicPolarCoords

    _require_positive_k2(params, "polar_change_inverse")
    z, k2 = params.z, params.lambda2_sq
    if isinstance(coords, GeodesicPolarCoords):
        r, theta, phi = coords.r, coords.theta, coords.phi[0]
    else:
        r, theta, phi = (float(v) for v in np.asarray(coords, dtype=float))
    ck_r = float(ck_cos(z, r))
    if ck_r <= 0:
        raise ChartDomainError(f"Ck_z(r) <= 0 at r={r}; outside the chart")
    w = float(ck_sin(z, r)) ** 2 / ck_r**2
    b = k2 * float(ck_sin(k2, theta)) ** 2
    a1 = w * b * math.sin(phi) ** 2
    a12 = w * b
    a123 = w

    def q2_from(lo, hi):
        if z == 0.0:
            return (hi - lo) / 2.0
        num = np.log1p(z * hi) - np.log1p(z * lo)
        return float(num) / (2.0 * z)

    for a in (a1, a12, a123):
        if z != 0.0 and 1.0 + z * a <= 0:
            raise ChartDomainError("polar point maps outside the q-chart")
    q1s = q2_from(0.0, a1)
    q2s = q2_from(a1, a12)
    q3s = q2_from(a12, a123)
    vals = np.array([q1s, q2s, q3s])
    vals[vals < 0] = np.where(vals[vals < 0] > -1e-15, 0.0, vals[vals < 0])
    if np.any(vals < 0):
        raise ChartDomainError("negative squared coordinate; outside the canonical branch")
    return np.sqrt(vals)


def polar_jacobian(params: DeformationParams, q, step: float = 1e-6) -> np.ndarray:
    """J[a, i] = d x_a / d q_i of the forward map, 4th-order differences."""
    q = np.asarray(q, dtype=float)

    def fwd(qq):
        return polar_change(params, qq).as_array()

    jac = np.empty((3, 3))
    for i in range(3):
        h = max(step, step * abs(q[i]))
        e = np.zeros(3)
        e[i] = h
        jac[:, i] = (-fwd(q + 2 * e) + 8 * fwd(q + e) - 8 * fwd(q - e) + fwd(q - 2 * e)) / (12 * h)
    return jac


def transport_metric_to_polar(params: DeformationParams, q) -> Tuple[np.ndarray, np.ndarray]:
    """Pushforward of the Cartesian metric through the coordinate change.

    Returns (x, g_x) with g_x = J^{-T} g_q J^{-1}; on the chart this equals
    the conformal polar metric pointwise.
    """
    q = np.asarray(q, dtype=float)
    x = polar_change(params, q).as_array()
    jac = polar_jacobian(params, q)
    g_q = deformed_metric_cartesian(params)(q)
    jinv = np.linalg.inv(jac)
    return x, jinv.T @ g_q @ jinv


def transport_momentum(params: DeformationParams, q, p) -> Tuple[np.ndarray, np.ndarray]:
    """Canonical momentum transport: p_x = J^{-T} p_q at x = polar_change(q)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    x = polar_change(params, q).as_array()
    jac = polar_jacobian(params, q)
    return x, np.linalg.solve(jac.T, p)


def deformed_metric_polar(params: DeformationParams) -> MetricField:
    """Conformal polar metric 1/(Ck_z(r) g(r)) * ds^2_CK(kappa1=z, kappa2=l2^2).

    g(r) = f(-ln Ck_z(r)); degenerate (and so excluded from dynamics) when
    lambda2^2 = 0.  Raises at the conformal singularity Ck_z(r) = 0.
    """
    z, k2 = params.z, params.lambda2_sq
    prof = params.profile

    def conformal(r: float) -> float:
        ck_r = float(ck_cos(z, r))
        if ck_r <= 1e-12:
            raise ConformalSingularityError(f"Ck_z(r) = {ck_r:.3g} at r={r}")
        g = prof.f(-math.log(ck_r))
        val = ck_r * g
        if val <= 1e-12:
            raise ConformalSingularityError(f"Ck_z(r) g(r) = {val:.3g} at r={r}")
        return 1.0 / val

    def evaluate(x: np.ndarray) -> np.ndarray:
        r, theta = x[0], x[1]
        conf = conformal(r)
        shell = k2 * float(ck_sin(z, r)) ** 2
        return conf * np.diag([1.0, shell, shell * float(ck_sin(k2, theta)) ** 2])

    def guard(x: np.ndarray) -> bool:
        r, theta = x[0], x[1]
        if r < _SINGULARITY_RADIUS:
            return False
        if z > 0 and math.sqrt(z) * r >= 0.5 * math.pi - 1e-9:
            return False
        if abs(ck_sin(z, r)) <= _SINGULARITY_RADIUS:
            return False
        if k2 != 0 and abs(ck_sin(k2, theta)) <= _SINGULARITY_RADIUS:
            return False
        if k2 > 0 and not 0 < math.sqrt(k2) * theta < math.pi:
            return False
        if k2 < 0 and abs(theta) * math.sqrt(-k2) > 50.0:
            return False
        try:
            conformal(r)
        except ConformalSingularityError:
            return False
        return True

    return MetricField(dimension=3, evaluate=evaluate, domain_guard=guard,
                       degenerate=(k2 == 0),
                       name=f"deformed-polar(z={z},l2sq={k2},g={prof.name})")


def polar_sectional_closed(params: DeformationParams, r) -> Dict[str, float]:
    """Closed-form curvatures of the conformal metric with g = 1.

    K_{r,theta} = K_{r,phi} = -z^2 Sk_z(r)^2 / (2 Ck_z(r)), the angular plane
    carries half that, and K = 5 K_{1j}.
    """
    sk, ck = ck_sin(params.z, r), ck_cos(params.z, r)
    if np.any(np.asarray(ck) <= 0):
        raise ConformalSingularityError("Ck_z(r) <= 0: radius beyond the conformal chart")
    k1j = -0.5 * params.z**2 * sk * sk / ck
    return {"K1j": float(k1j), "K23": float(0.5 * k1j), "K": float(5.0 * k1j)}


def polar_scalar_closed(params: DeformationParams, r) -> float:
    """Scalar curvature of the conformal metric for any profile.

    Evaluates the Cartesian closed form at x = -ln Ck_z(r) (scalar curvature
    is invariant under the coordinate change).
    """
    ck_r = ck_cos(params.z, r)
    if np.any(np.asarray(ck_r) <= 0):
        raise ConformalSingularityError("Ck_z(r) <= 0")
    return scalar_curvature_formula(params, -np.log(ck_r))


# ---------------------------------------------------------------------------
# geodesic Hamiltonian and flow invariants
# ---------------------------------------------------------------------------

@dataclass
class GeodesicHamiltonian:
    """Kinetic Hamiltonian of the conformal polar metric, with analytic grad.

    H = 1/2 Ck_z(r) g(r) [p_r^2 + (p_theta^2 + p_phi^2/Sk_{k2}(theta)^2)
                                   / (k2 Sk_z(r)^2)]

    Equals (1/4) J+ f(z J-) under canonical transport from the Cartesian
    chart.  Vectorized over leading batch axes of (x, p).
    """

    params: DeformationParams

    def __post_init__(self):
        if self.params.lambda2_sq == 0:
            raise DegenerateMetricError(
                "lambda2^2 = 0 gives a degenerate metric: the kinetic term diverges and "
                "the flow is excluded from the dynamical picture")

    def _pieces(self, x):
        z, k2 = self.params.z, self.params.lambda2_sq
        r, theta = x[..., 0], x[..., 1]
        skr, ckr = ck_sin(z, r), ck_cos(z, r)
        skt, ckt = ck_sin(k2, theta), ck_cos(k2, theta)
        if np.any(np.asarray(ckr) <= 0):
            raise ConformalSingularityError(
                "Ck_z(r) <= 0: point beyond the conformal chart boundary")
        xr = -np.log(ckr)
        gf = self.params.profile.f(xr)
        return r, theta, skr, ckr, skt, ckt, xr, gf

    def __call__(self, x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        _, _, skr, ckr, skt, _, _, gf = self._pieces(x)
        k2 = self.params.lambda2_sq
        angular = p[..., 1] ** 2 + p[..., 2] ** 2 / skt**2
        val = 0.5 * ckr * gf * (p[..., 0] ** 2 + angular / (k2 * skr**2))
        return float(val) if val.ndim == 0 else val

    def grad(self, x, p):
        """(dH/dx, dH/dp), both shaped like x/p."""
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        z, k2 = self.params.z, self.params.lambda2_sq
        _, _, skr, ckr, skt, ckt, xr, gf = self._pieces(x)
        dgf = self.params.profile.d1(xr) * (z * skr / ckr)    # d g(r)/dr
        pr, pth, pph = p[..., 0], p[..., 1], p[..., 2]
        a = 1.0 / (k2 * skr**2)
        b = 1.0 / skt**2
        m2 = pth**2 + b * pph**2
        m = pr**2 + a * m2
        f_half = 0.5 * ckr * gf
        df_half = 0.5 * (-z * skr * gf + ckr * dgf)
        da = -2.0 * ckr / (k2 * skr**3)
        db = -2.0 * ckt / skt**3
        dq = np.stack([
            df_half * m + f_half * da * m2,
            f_half * a * db * pph**2,
            np.zeros_like(pph),
        ], axis=-1)
        dp = np.stack([
            2.0 * f_half * pr,
            2.0 * f_half * a * pth,
            2.0 * f_half * a * b * pph,
        ], axis=-1)
        return dq, dp


def geodesic_hamiltonian(params: DeformationParams) -> GeodesicHamiltonian:
    """Callable kinetic Hamiltonian on the polar chart (lambda2^2 != 0)."""
    return GeodesicHamiltonian(params)


def flow_invariants(params: DeformationParams) -> Dict[str, Callable]:
    """Conserved quantities of the geodesic flow as polar-chart callables.

    C2 = p_phi^2 is exactly the leading two-site Casimir under the coordinate
    change; C3 = (p_theta^2 + p_phi^2/Sk_{k2}(theta)^2)/k2 is the full
    three-site one.  Both are real closed forms valid for every signature.
    """
    k2 = params.lambda2_sq
    if k2 == 0:
        raise DegenerateMetricError("no flow invariants for the degenerate lambda2^2 = 0 metric")
    ham = geodesic_hamiltonian(params)

    def c2(x, p):
        return p[..., 2] ** 2

    def c3(x, p):
        x = np.asarray(x, dtype=float)
        skt = ck_sin(k2, x[..., 1])
        return (p[..., 1] ** 2 + p[..., 2] ** 2 / skt**2) / k2

    def p_phi(x, p):
        return p[..., 2]

    return {"H": ham, "C2": c2, "C3": c3, "p_phi": p_phi}


_DEFORMED_NAMES = {
    (1, 1): "deformed-spherical",
    (1, 0): "deformed-oscillating-NH",
    (1, -1): "deformed-anti-de-sitter",
    (0, 1): "euclidean",
    (0, 0): "galilean",
    (0, -1): "minkowskian",
    (-1, 1): "deformed-hyperbolic",
    (-1, 0): "deformed-expanding-NH",
    (-1, -1): "deformed-de-sitter",
}

_DEFORMED_SYMBOLS = {
    (1, 1): "S3_z", (1, 0): "NH+_z", (1, -1): "AdS_z",
    (0, 1): "E3", (0, 0): "G", (0, -1): "M",
    (-1, 1): "H3_z", (-1, 0): "NH-_z", (-1, -1): "dS_z",
}


def classify_deformed(params: DeformationParams) -> str:
    """Name of the deformed space from the signs of (z, lambda2^2).

    z = 0 rows are the flat non-deformed spaces.
    """
    key = (int(np.sign(params.z)), int(np.sign(params.lambda2_sq)))
    return _DEFORMED_NAMES[key]


def deformed_symbol(params: DeformationParams) -> str:
    key = (int(np.sign(params.z)), int(np.sign(params.lambda2_sq)))
    return _DEFORMED_SYMBOLS[key]
