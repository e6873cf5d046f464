"""Numeric differential geometry from metric callables.

Christoffel symbols come from 4th-order central differences of the metric;
the Riemann tensor uses the all-lower-index formula

    R_{iklm} = 1/2 (g_im,kl + g_kl,im - g_il,km - g_km,il)
               + g_np (G^n_kl G^p_im - G^n_km G^p_il)

with direct second-derivative stencils on g, which keeps the roundoff of
nested differentiation out of the result (~1e-9 absolute on unit-scale
metrics).  Sectional curvature of the coordinate 2-plane (i,j) is
R_ijij / (g_ii g_jj - g_ij^2), the scalar curvature g^{ik} g^{jl} R_{ijkl};
on the unit sphere these conventions give +1 and +n(n-1).

Geodesic (and any other Hamiltonian) flow is integrated with the implicit
midpoint rule, which is symplectic and handles the position-dependent mass
matrices of curved-space kinetic energies where leapfrog does not apply.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ChartDomainError,
    DegenerateMetricError,
    FixedPointDivergence,
    TrajectoryLeftDomain,
)
from .spaces import MetricField

# Step-size rules: first derivatives of the metric (Christoffel level) and
# the larger step used for curvature, where truncation is still ~1e-12 but
# roundoff amplification of the second-derivative stencils matters.
CHRISTOFFEL_STEP = 1e-5
CURVATURE_STEP = 1e-3

# Curvature refuses metrics with |det g| at or below this.
DEGENERACY_FLOOR = 1e-10

# Sectional curvature is reported as undefined when the plane denominator
# |g_ii g_jj - g_ij^2| falls below this.
NULL_PLANE_FLOOR = 1e-10


def _steps(point: np.ndarray, base: float) -> np.ndarray:
    return np.maximum(base, base * np.abs(point))


def _check_point(metric: MetricField, point: np.ndarray) -> np.ndarray:
    if metric.degenerate:
        raise DegenerateMetricError(f"metric {metric.name or ''} is degenerate by construction")
    if not metric.domain_guard(point):
        raise ChartDomainError(f"point {point} violates the metric's domain guard")
    g = metric(point)
    if abs(np.linalg.det(g)) <= DEGENERACY_FLOOR:
        raise DegenerateMetricError(f"|det g| <= {DEGENERACY_FLOOR} at {point}")
    return g


def _metric_d1(metric: MetricField, point: np.ndarray, h: np.ndarray) -> np.ndarray:
    """dg[i] = d_i g, 4th-order central stencil."""
    n = metric.dimension
    dg = np.empty((n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h[i]
        dg[i] = (-metric(point + 2 * e) + 8 * metric(point + e)
                 - 8 * metric(point - e) + metric(point - 2 * e)) / (12 * h[i])
    return dg


def _metric_d2(metric: MetricField, point: np.ndarray, h: np.ndarray) -> np.ndarray:
    """ddg[i, j] = d_i d_j g; diagonal by the 5-point stencil, mixed by nesting."""
    n = metric.dimension
    ddg = np.empty((n, n, n, n))
    g0 = metric(point)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h[i]
        ddg[i, i] = (-metric(point + 2 * e) + 16 * metric(point + e) - 30 * g0
                     + 16 * metric(point - e) - metric(point - 2 * e)) / (12 * h[i] ** 2)
    for i in range(n):
        for j in range(i + 1, n):
            ei = np.zeros(n)
            ei[i] = h[i]

            def d_j(base: np.ndarray) -> np.ndarray:
                ej = np.zeros(n)
                ej[j] = h[j]
                return (-metric(base + 2 * ej) + 8 * metric(base + ej)
                        - 8 * metric(base - ej) + metric(base - 2 * ej)) / (12 * h[j])

            mixed = (-d_j(point + 2 * ei) + 8 * d_j(point + ei)
                     - 8 * d_j(point - ei) + d_j(point - 2 * ei)) / (12 * h[i])
            ddg[i, j] = mixed
            ddg[j, i] = mixed
    return ddg


def christoffel(metric: MetricField, point, step: float = CHRISTOFFEL_STEP) -> np.ndarray:
    """Levi-Civita connection coefficients Gamma^k_ij at a point.

    Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij); symmetric in
    (i, j) by construction.  Step per coordinate: max(step, step*|x_i|).
    """
    point = np.asarray(point, dtype=float)
    g = _check_point(metric, point)
    ginv = np.linalg.inv(g)
    dg = _metric_d1(metric, point, _steps(point, step))
    # bracket_{l ij} = d_i g_jl + d_j g_il - d_l g_ij
    bracket = np.einsum('ijl->lij', dg) + np.einsum('jil->lij', dg) - dg
    return 0.5 * np.einsum('kl,lij->kij', ginv, bracket)


@dataclass
class CurvatureReport:
    """Sectional curvatures by coordinate plane, scalar curvature, method."""

    point: np.ndarray
    sectional: Dict[Tuple[int, int], Optional[float]]
    scalar: float
    method: str = "finite-difference"

    def to_json_dict(self) -> dict:
        return {
            "point": [float(v) for v in self.point],
            "sectional": {f"{i}{j}": (None if v is None else float(v))
                          for (i, j), v in sorted(self.sectional.items())},
            "scalar": float(self.scalar),
            "method": self.method,
        }


def riemann_tensor(metric: MetricField, point, step: float = CURVATURE_STEP) -> np.ndarray:
    """All-lower-index curvature tensor R_{iklm} at a point."""
    point = np.asarray(point, dtype=float)
    g = _check_point(metric, point)
    h = _steps(point, step)
    dg = _metric_d1(metric, point, h)
    ddg = _metric_d2(metric, point, h)
    ginv = np.linalg.inv(g)
    bracket = np.einsum('ijl->lij', dg) + np.einsum('jil->lij', dg) - dg
    gam = 0.5 * np.einsum('kl,lij->kij', ginv, bracket)
    # ddg[k, l, i, m] = d_k d_l g_im
    term = 0.5 * (np.einsum('klim->iklm', ddg) + np.einsum('imkl->iklm', ddg)
                  - np.einsum('kmil->iklm', ddg) - np.einsum('ilkm->iklm', ddg))
    gam_low = np.einsum('np,pim->nim', g, gam)
    term += np.einsum('nkl,nim->iklm', gam, gam_low) - np.einsum('nkm,nil->iklm', gam, gam_low)
    return term


def curvature(metric: MetricField, point, step: float = CURVATURE_STEP) -> CurvatureReport:
    """Sectional curvatures of coordinate 2-planes and the scalar curvature."""
    point = np.asarray(point, dtype=float)
    g = _check_point(metric, point)
    riem = riemann_tensor(metric, point, step)
    ginv = np.linalg.inv(g)
    sectional: Dict[Tuple[int, int], Optional[float]] = {}
    n = metric.dimension
    for i in range(n):
        for j in range(i + 1, n):
            den = g[i, i] * g[j, j] - g[i, j] ** 2
            sectional[(i, j)] = None if abs(den) < NULL_PLANE_FLOOR else float(riem[i, j, i, j] / den)
    scalar = float(np.einsum('ik,jl,ijkl->', ginv, ginv, riem))
    return CurvatureReport(point=point, sectional=sectional, scalar=scalar)


@dataclass
class FlowState:
    """Phase-space snapshot along an integrated trajectory."""

    coords: np.ndarray
    momenta: np.ndarray
    time: float
    hamiltonian_value: float


GradFn = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


def _fd_gradient(hamiltonian: Callable, coords: np.ndarray, momenta: np.ndarray,
                 step: float = 1e-6) -> Tuple[np.ndarray, np.ndarray]:
    def partial(args, idx, which):
        h = max(step, step * abs(args[idx]))
        e = np.zeros_like(args)
        e[idx] = h
        if which == "q":
            f = lambda a: hamiltonian(a, momenta)
        else:
            f = lambda a: hamiltonian(coords, a)
        return (-f(args + 2 * e) + 8 * f(args + e) - 8 * f(args - e) + f(args - 2 * e)) / (12 * h)

    dq = np.array([partial(coords, i, "q") for i in range(coords.size)])
    dp = np.array([partial(momenta, i, "p") for i in range(momenta.size)])
    return dq, dp


def geodesic_flow(
    hamiltonian: Callable[[np.ndarray, np.ndarray], float],
    initial: FlowState,
    dt: float,
    steps: int,
    grad: Optional[GradFn] = None,
    fixed_point_tol: float = 1e-13,
    max_fixed_point_iter: int = 50,
    domain_guard: Optional[Callable[[np.ndarray], bool]] = None,
    record_every: int = 1,
) -> List[FlowState]:
    """Integrate Hamilton's equations with the implicit midpoint rule.

    The (generally non-separable) vector field is evaluated at the midpoint
    and solved by fixed-point iteration to `fixed_point_tol` in the max norm;
    the rule is symplectic and time-reversible, so the recorded Hamiltonian
    values oscillate within an O(dt^2) band instead of drifting.

    The state arrays may carry any leading batch shape; convergence is then
    judged across the whole batch.  Raises `FixedPointDivergence` when the
    solver stalls and `TrajectoryLeftDomain` (carrying the states so far)
    when `domain_guard` rejects a step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if grad is None:
        grad = lambda q, p: _fd_gradient(hamiltonian, q, p)
    if domain_guard is not None and not domain_guard(initial.coords):
        raise ChartDomainError("initial state violates the domain guard")

    def vector_field(q, p):
        dq, dp = grad(q, p)
        return dp, -dq

    q = np.array(initial.coords, dtype=float)
    p = np.array(initial.momenta, dtype=float)
    t = initial.time
    out = [FlowState(coords=q.copy(), momenta=p.copy(), time=t,
                     hamiltonian_value=hamiltonian(q, p))]
    # gradients computed by finite differences stall the iteration at the
    # roundoff level ~dt * noise; accept such a stall, raise only when the
    # residual stays orders of magnitude above the tolerance (divergence)
    stall_tol = fixed_point_tol * 1e4
    for n in range(1, steps + 1):
        try:
            fq, fp = vector_field(q, p)
            q_new, p_new = q + dt * fq, p + dt * fp
            delta = np.inf
            for _ in range(max_fixed_point_iter):
                fq, fp = vector_field(0.5 * (q + q_new), 0.5 * (p + p_new))
                q_next, p_next = q + dt * fq, p + dt * fp
                delta = max(np.max(np.abs(q_next - q_new)), np.max(np.abs(p_next - p_new)))
                q_new, p_new = q_next, p_next
                if delta < fixed_point_tol:
                    break
        except ChartDomainError as exc:
            raise TrajectoryLeftDomain(
                f"flow evaluation left the chart at t={t:.6g}: {exc}", states=out) from exc
        if not delta < stall_tol:
            raise FixedPointDivergence(
                f"fixed point not reached after {max_fixed_point_iter} iterations at t={t:.6g} "
                f"(residual {delta:.3g})")
        q, p = q_new, p_new
        t = initial.time + n * dt
        if domain_guard is not None and not domain_guard(q):
            raise TrajectoryLeftDomain(
                f"trajectory left the chart at t={t:.6g}", states=out)
        if n % record_every == 0 or n == steps:
            out.append(FlowState(coords=q.copy(), momenta=p.copy(), time=t,
                                 hamiltonian_value=hamiltonian(q, p)))
    return out


def metric_hamiltonian(metric: MetricField) -> Callable[[np.ndarray, np.ndarray], float]:
    """Geodesic Hamiltonian H = 1/2 g^{ij}(q) p_i p_j of a metric field."""
    if metric.degenerate:
        raise DegenerateMetricError("geodesic Hamiltonian needs an invertible metric")

    def hamiltonian(q: np.ndarray, p: np.ndarray) -> float:
        ginv = np.linalg.inv(metric(q))
        return float(0.5 * p @ ginv @ p)

    return hamiltonian


def trajectory_csv(states: Sequence[FlowState],
                   invariants: Optional[Dict[str, Callable[[np.ndarray, np.ndarray], float]]] = None) -> str:
    """CSV export: t, q..., p..., H and one column per extra invariant."""
    if not states:
        return ""
    nq = states[0].coords.size
    header = (["t"] + [f"q{i+1}" for i in range(nq)] + [f"p{i+1}" for i in range(nq)] + ["H"]
              + list(invariants or {}))
    lines = [",".join(header)]
    for s in states:
        row = [repr(float(s.time))]
        row += [repr(float(v)) for v in np.atleast_1d(s.coords)]
        row += [repr(float(v)) for v in np.atleast_1d(s.momenta)]
        row.append(repr(float(s.hamiltonian_value)))
        for fn in (invariants or {}).values():
            row.append(repr(float(fn(s.coords, s.momenta))))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
