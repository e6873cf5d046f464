"""Constant-curvature homogeneous spaces of the two-parameter family.

With kappa_3 = ... = kappa_N = +1 fixed, the rank-one space attached to the
first slot is an N-dimensional space of constant sectional curvature kappa_1
whose metric signature is set by kappa_2:

    (+,+) sphere          (0,+) euclidean       (-,+) hyperbolic
    (+,0) oscillating NH  (0,0) galilean        (-,0) expanding NH
    (+,-) anti-de sitter  (0,-) minkowskian     (-,-) de sitter

The space embeds into R^{N+1} on the quadric
x0^2 + k1 x1^2 + k1 k2 sum_{j>=2} xj^2 = 1, and in geodesic polar coordinates
(r, theta, phi_3..phi_N) carries the metric

    ds^2 = dr^2 + k2 Sk_{k1}(r)^2 [ dtheta^2
           + Sk_{k2}(theta)^2 sum_i (prod_{s<i} sin^2 phi_s) dphi_i^2 ].

Sectional curvature is kappa_1 along every coordinate 2-plane and the scalar
curvature is N(N-1) kappa_1; the k2 = 0 rows have a degenerate metric and
their curvatures are reported from these closed forms only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .errors import ChartDomainError, FlatCaseError
from .trig import ck_cos, ck_sin

# Coordinate singularities thinner than this radius are fenced off by the
# domain guards (polar axes at Sk(r) = 0 and Sk(theta) = 0).
_SINGULARITY_RADIUS = 1e-6

# Rapidity cap for the Lorentzian charts, in units of 1/sqrt(|kappa2|).
DEFAULT_RAPIDITY_CAP = 50.0


@dataclass(frozen=True)
class KappaPair:
    """Curvature kappa1 and signature/contraction coefficient kappa2."""

    kappa1: float
    kappa2: float


@dataclass(frozen=True)
class GeodesicPolarCoords:
    """Radial distance r, direction angle/rapidity theta, polar angles phi."""

    r: float
    theta: float
    phi: Tuple[float, ...] = ()

    @property
    def dimension(self) -> int:
        return 2 + len(self.phi)

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.theta, *self.phi], dtype=float)

    @staticmethod
    def from_array(x: Sequence[float]) -> "GeodesicPolarCoords":
        x = np.asarray(x, dtype=float)
        return GeodesicPolarCoords(r=float(x[0]), theta=float(x[1]), phi=tuple(float(v) for v in x[2:]))


@dataclass(frozen=True)
class AmbientPoint:
    """Point of the ambient linear space R^{N+1}."""

    x: np.ndarray

    def sphere_residual(self, kp: KappaPair) -> float:
        """|x0^2 + k1 x1^2 + k1 k2 sum_{j>=2} xj^2 - 1|."""
        x = self.x
        quad = x[0] ** 2 + kp.kappa1 * x[1] ** 2 + kp.kappa1 * kp.kappa2 * np.sum(x[2:] ** 2)
        return float(abs(quad - 1.0))


@dataclass
class MetricField:
    """A metric as a callable: point -> symmetric matrix, plus a chart guard.

    `degenerate` marks metrics that are singular by construction (kappa2 = 0
    rows); curvature routines refuse those and closed forms are used instead.
    """

    dimension: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    domain_guard: Callable[[np.ndarray], bool] = field(default=lambda x: True)
    degenerate: bool = False
    name: str = ""

    def __call__(self, point) -> np.ndarray:
        return self.evaluate(np.asarray(point, dtype=float))


def _check_chart(coords: GeodesicPolarCoords, kp: KappaPair,
                 rapidity_cap: float = DEFAULT_RAPIDITY_CAP) -> None:
    r, theta = coords.r, coords.theta
    if r < 0:
        raise ChartDomainError(f"radial coordinate must be >= 0, got {r}")
    if kp.kappa1 > 0 and np.sqrt(kp.kappa1) * r >= np.pi:
        raise ChartDomainError(f"sqrt(kappa1)*r = {np.sqrt(kp.kappa1) * r:.6g} >= pi")
    if kp.kappa2 > 0 and not 0 <= np.sqrt(kp.kappa2) * theta <= np.pi:
        raise ChartDomainError(f"sqrt(kappa2)*theta = {np.sqrt(kp.kappa2) * theta:.6g} outside [0, pi]")
    if kp.kappa2 < 0 and abs(theta) * np.sqrt(-kp.kappa2) > rapidity_cap:
        raise ChartDomainError(f"rapidity |theta| exceeds cap {rapidity_cap}")


def embed(coords: GeodesicPolarCoords, kp: KappaPair,
          rapidity_cap: float = DEFAULT_RAPIDITY_CAP) -> AmbientPoint:
    """Ambient coordinates of a chart point.

    x0 = Ck_{k1}(r); x1 = Sk_{k1}(r) Ck_{k2}(theta); the remaining entries
    split Sk_{k1}(r) Sk_{k2}(theta) by the usual nested sines, so the quadric
    constraint is satisfied identically.
    """
    _check_chart(coords, kp, rapidity_cap)
    n = coords.dimension
    k1, k2 = kp.kappa1, kp.kappa2
    x = np.empty(n + 1)
    x[0] = ck_cos(k1, coords.r)
    sk_r = ck_sin(k1, coords.r)
    x[1] = sk_r * ck_cos(k2, coords.theta)
    radial = sk_r * ck_sin(k2, coords.theta)
    if n == 2:
        x[2] = radial
        return AmbientPoint(x=x)
    acc = radial
    phi = coords.phi
    for i in range(2, n):
        # x_i carries sin(phi_3)...sin(phi_i) cos(phi_{i+1})
        x[i] = acc * np.cos(phi[i - 2])
        acc = acc * np.sin(phi[i - 2])
    x[n] = acc
    return AmbientPoint(x=x)


def metric_polar(kp: KappaPair, n: int = 3,
                 rapidity_cap: float = DEFAULT_RAPIDITY_CAP) -> MetricField:
    """Diagonal geodesic polar metric; degenerate (and flagged) when kappa2 = 0."""
    if n < 2:
        raise ValueError("need dimension n >= 2")
    k1, k2 = kp.kappa1, kp.kappa2

    def evaluate(x: np.ndarray) -> np.ndarray:
        r, theta = x[0], x[1]
        g = np.zeros((n, n))
        g[0, 0] = 1.0
        shell = k2 * ck_sin(k1, r) ** 2
        g[1, 1] = shell
        block = shell * ck_sin(k2, theta) ** 2
        for i in range(2, n):
            g[i, i] = block
            block = block * np.sin(x[i]) ** 2 if i + 1 < n else block
        return g

    def guard(x: np.ndarray) -> bool:
        coords = GeodesicPolarCoords.from_array(x)
        try:
            _check_chart(coords, kp, rapidity_cap)
        except ChartDomainError:
            return False
        if abs(ck_sin(k1, coords.r)) <= _SINGULARITY_RADIUS:
            return False
        if k2 != 0 and abs(ck_sin(k2, coords.theta)) <= _SINGULARITY_RADIUS:
            return False
        return True

    return MetricField(dimension=n, evaluate=evaluate, domain_guard=guard,
                       degenerate=(k2 == 0), name=f"ck-polar(k1={k1},k2={k2},n={n})")


def metric_ambient_pullback(kp: KappaPair, n: int = 3, step: float = 1e-4) -> MetricField:
    """Pullback of the rescaled ambient quadratic form through the embedding.

    ds^2 = (1/k1)(dx0^2 + k1 dx1^2 + k1 k2 sum_{j>=2} dxj^2) restricted to the
    quadric; the Jacobian of the embedding is taken by 4th-order central
    differences, so this is an independent route to the polar metric.
    """
    if kp.kappa1 == 0:
        raise FlatCaseError("ambient pullback divides by kappa1; use metric_polar at kappa1 = 0")
    k1, k2 = kp.kappa1, kp.kappa2
    ambient_diag = np.array([1.0 / k1] + [1.0] + [k2] * (n - 1))

    def embed_vec(x: np.ndarray) -> np.ndarray:
        return embed(GeodesicPolarCoords.from_array(x), kp).x

    def evaluate(x: np.ndarray) -> np.ndarray:
        jac = np.empty((n + 1, n))
        for i in range(n):
            h = max(step, step * abs(x[i]))
            e = np.zeros(n)
            e[i] = h
            jac[:, i] = (-embed_vec(x + 2 * e) + 8 * embed_vec(x + e)
                         - 8 * embed_vec(x - e) + embed_vec(x - 2 * e)) / (12 * h)
        return jac.T @ (ambient_diag[:, None] * jac)

    polar = metric_polar(kp, n)

    def guard(x: np.ndarray) -> bool:
        # the difference stencil must stay inside the embedding chart
        if not polar.domain_guard(x):
            return False
        margin = 3 * max(step, step * abs(x[0]))
        if x[0] < margin:
            return False
        if k1 > 0 and np.sqrt(k1) * (x[0] + margin) >= np.pi:
            return False
        if k2 > 0 and not margin <= np.sqrt(k2) * x[1] <= np.pi - margin:
            return False
        return True

    return MetricField(dimension=n, evaluate=evaluate, domain_guard=guard,
                       degenerate=(k2 == 0), name=f"ck-ambient(k1={k1},k2={k2},n={n})")


_SPACE_NAMES = {
    (1, 1): "spherical",
    (0, 1): "euclidean",
    (-1, 1): "hyperbolic",
    (1, 0): "oscillating-NH",
    (0, 0): "galilean",
    (-1, 0): "expanding-NH",
    (1, -1): "anti-de-sitter",
    (0, -1): "minkowskian",
    (-1, -1): "de-sitter",
}


def classify_space(kp: KappaPair) -> str:
    """One of the nine space names, keyed by the signs of (kappa1, kappa2)."""
    return _SPACE_NAMES[(int(np.sign(kp.kappa1)), int(np.sign(kp.kappa2)))]


def _radial_symbol(k1: int) -> str:
    return {1: "sin(r)", 0: "r", -1: "sinh(r)"}[k1]


def _angular_symbol(k2: int) -> str:
    return {1: "sin(theta)", -1: "sinh(theta)"}[k2]


def metric_diagonal_symbolic(kp: KappaPair) -> List[str]:
    """Symbolic diagonal of the 3D polar metric for sign-normalized kappa."""
    s1 = int(np.sign(kp.kappa1))
    s2 = int(np.sign(kp.kappa2))
    if s2 == 0:
        return ["1", "0", "0"]
    sign = "" if s2 > 0 else "-"
    rad = _radial_symbol(s1)
    ang = _angular_symbol(s2)
    return ["1", f"{sign}{rad}^2", f"{sign}{rad}^2*{ang}^2"]


@dataclass(frozen=True)
class SpaceCatalogRow:
    name: str
    kappa1: float
    kappa2: float
    metric_diagonal_symbolic: Tuple[str, ...]
    K_sectional: float
    K_scalar: float
    degenerate: bool

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "kappa1": self.kappa1,
            "kappa2": self.kappa2,
            "metric_diagonal_symbolic": list(self.metric_diagonal_symbolic),
            "K_sectional": self.K_sectional,
            "K_scalar": self.K_scalar,
            "degenerate": self.degenerate,
        }


def space_catalog(n: int = 3) -> List[SpaceCatalogRow]:
    """The nine sign pairs with their metrics and curvature constants."""
    rows = []
    for k1 in (1, 0, -1):
        for k2 in (1, 0, -1):
            kp = KappaPair(float(k1), float(k2))
            rows.append(SpaceCatalogRow(
                name=classify_space(kp),
                kappa1=float(k1),
                kappa2=float(k2),
                metric_diagonal_symbolic=tuple(metric_diagonal_symbolic(kp)),
                K_sectional=float(k1),
                K_scalar=float(n * (n - 1) * k1),
                degenerate=(k2 == 0),
            ))
    return rows


def random_chart_point(kp: KappaPair, rng: np.random.Generator, n: int = 3) -> GeodesicPolarCoords:
    """A generic point of the chart, away from coordinate singularities."""
    k1, k2 = kp.kappa1, kp.kappa2
    r_max = 0.9 * np.pi / np.sqrt(k1) if k1 > 0 else 2.0
    r = rng.uniform(0.15 * r_max, 0.85 * r_max)
    if k2 > 0:
        t_max = np.pi / np.sqrt(k2)
        theta = rng.uniform(0.15 * t_max, 0.85 * t_max)
    elif k2 < 0:
        theta = rng.uniform(0.2, 1.5) / np.sqrt(-k2)
    else:
        theta = rng.uniform(0.2, 1.5)
    phi = tuple(rng.uniform(0.3, np.pi - 0.3) for _ in range(n - 3)) + ((rng.uniform(0.3, 2 * np.pi - 0.3),) if n >= 3 else ())
    return GeodesicPolarCoords(r=float(r), theta=float(theta), phi=phi)
