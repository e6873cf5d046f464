"""HTTP compute service wrapping the core package.

Every command of the engine is a POST endpoint taking a pydantic request and
returning a JSON report stamped with the schema version; trajectory and
table payloads can be requested as CSV.  All sampling is driven by the
request seed through numpy's PCG64 generator, so identical requests produce
byte-identical responses.

Endpoints: /v1/algebra /v1/table2 /v1/table3 /v1/curvature /v1/geodesic
/v1/contract (+ /v1/health).
"""

from __future__ import annotations

import itertools
import time
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field, model_validator

from . import algebra as alg
from . import deform, riemann, spaces
from .errors import (CKGeoError, ChartDomainError, DegenerateMetricError,
                     TrajectoryLeftDomain)

SCHEMA = "ckgeo/1"
PRNG_NAME = "numpy-default_rng(PCG64)"

app = FastAPI(title="ckgeo", version="0.1.0",
              description="Constant-curvature spaces, their coalgebra deformation, "
                          "and numeric curvature/flow verification.")


def _fail(status_code: int, message: str):
    raise HTTPException(status_code=status_code, detail=message)


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

class AlgebraRequest(BaseModel):
    n: int = Field(3, ge=1, le=8)
    kappa: Optional[List[float]] = None
    sweep_signs: bool = False
    include_brackets: bool = False

    @model_validator(mode="after")
    def _check(self):
        if not self.sweep_signs:
            if self.kappa is None:
                raise ValueError("kappa is required unless sweep_signs is set")
            if len(self.kappa) != self.n:
                raise ValueError(f"kappa must have exactly n={self.n} entries")
        return self


class AlgebraRow(BaseModel):
    kappa: List[float]
    name: str
    jacobi_residual: float
    representation_defect: float
    spaces: List[dict]
    brackets: Optional[dict] = None


class AlgebraResponse(BaseModel):
    schema_: str = Field(SCHEMA, alias="schema")
    command: str = "algebra"
    status: Literal["pass", "fail"]
    rows: List[AlgebraRow]

    model_config = {"populate_by_name": True}


def _isotropy_name(sig: alg.CKSignature, m: int) -> str:
    dec = alg.cartan_decompose(sig, m)
    left = (alg.classify_algebra(alg.CKSignature(dec.left_factor_kappa))
            if dec.left_factor_kappa else "so(1)")
    right = (alg.classify_algebra(alg.CKSignature(dec.right_factor_kappa))
             if dec.right_factor_kappa else "so(1)")
    return f"{left} (+) {right}"


def _algebra_row(sig: alg.CKSignature, include_brackets: bool) -> AlgebraRow:
    sc = alg.build_structure_constants(sig)
    rows = []
    for m in range(1, sig.n + 1):
        row = alg.space_report(sig, m).to_json_dict()
        row["isotropy"] = _isotropy_name(sig, m)
        rows.append(row)
    return AlgebraRow(
        kappa=[float(k) for k in sig.kappa],
        name=alg.classify_algebra(sig),
        jacobi_residual=alg.jacobi_residual(sc),
        representation_defect=float(alg.representation_defect(sig, sc)),
        spaces=rows,
        brackets=alg.structure_constants_json(sig, sc) if include_brackets else None,
    )


@app.post("/v1/algebra", response_model=AlgebraResponse, response_model_exclude_none=True)
def algebra_endpoint(req: AlgebraRequest) -> AlgebraResponse:
    if req.sweep_signs:
        sigs = [alg.CKSignature(list(signs))
                for signs in itertools.product((1, 0, -1), repeat=req.n)]
    else:
        sigs = [alg.CKSignature(req.kappa)]
    rows = [_algebra_row(s, req.include_brackets) for s in sigs]
    ok = all(r.jacobi_residual == 0.0 and r.representation_defect == 0.0 for r in rows)
    return AlgebraResponse(status="pass" if ok else "fail", rows=rows)


# ---------------------------------------------------------------------------
# table2
# ---------------------------------------------------------------------------

class Table2Request(BaseModel):
    points: int = Field(20, ge=1, le=500)
    seed: int = 0
    tol: float = Field(1e-5, gt=0)


class Table2Row(BaseModel):
    name: str
    kappa1: float
    kappa2: float
    metric_diagonal_symbolic: List[str]
    K_sectional: float
    K_scalar: float
    degenerate: bool
    max_sectional_error: Optional[float] = None
    max_scalar_error: Optional[float] = None
    verified: Optional[bool] = None


class Table2Response(BaseModel):
    schema_: str = Field(SCHEMA, alias="schema")
    command: str = "table2"
    status: Literal["pass", "fail"]
    seed: int
    prng: str = PRNG_NAME
    tol: float
    rows: List[Table2Row]

    model_config = {"populate_by_name": True}


def verify_table2_row(kp: spaces.KappaPair, points: int, rng: np.random.Generator) -> Tuple[float, float]:
    """Max |K_ij - kappa1| and |K - 6 kappa1| of the finite-difference report."""
    metric = spaces.metric_polar(kp, 3)
    worst_sect = worst_scal = 0.0
    for _ in range(points):
        pt = spaces.random_chart_point(kp, rng).as_array()
        rep = riemann.curvature(metric, pt)
        for val in rep.sectional.values():
            worst_sect = max(worst_sect, abs(val - kp.kappa1))
        worst_scal = max(worst_scal, abs(rep.scalar - 6.0 * kp.kappa1))
    return worst_sect, worst_scal


@app.post("/v1/table2", response_model=Table2Response, response_model_exclude_none=True)
def table2_endpoint(req: Table2Request) -> Table2Response:
    rng = np.random.default_rng(req.seed)
    rows: List[Table2Row] = []
    ok = True
    for cat in spaces.space_catalog(3):
        row = Table2Row(**cat.to_json_dict())
        if not cat.degenerate:
            kp = spaces.KappaPair(cat.kappa1, cat.kappa2)
            es, ek = verify_table2_row(kp, req.points, rng)
            row.max_sectional_error, row.max_scalar_error = es, ek
            row.verified = es < req.tol and ek < req.tol
            ok = ok and row.verified
        rows.append(row)
    return Table2Response(status="pass" if ok else "fail", seed=req.seed, tol=req.tol, rows=rows)


# ---------------------------------------------------------------------------
# table3
# ---------------------------------------------------------------------------

class Table3Request(BaseModel):
    radii: List[float] = Field(default_factory=lambda: [0.3, 0.7, 1.1])
    theta: float = 0.8
    phi: float = 0.6
    tol: float = Field(1e-5, gt=0)
    include_flat: bool = True


class Table3Point(BaseModel):
    r: float
    K1j: float
    K23: float
    K: float
    max_fd_error: Optional[float] = None


class Table3Row(BaseModel):
    name: str
    symbol: str
    z: float
    lambda2_sq: float
    degenerate: bool
    note: Optional[str] = None
    points: List[Table3Point] = Field(default_factory=list)
    verified: Optional[bool] = None


class Table3Response(BaseModel):
    schema_: str = Field(SCHEMA, alias="schema")
    command: str = "table3"
    status: Literal["pass", "fail"]
    tol: float
    rows: List[Table3Row]

    model_config = {"populate_by_name": True}


def verify_table3_point(params: deform.DeformationParams, r: float, theta: float,
                        phi: float) -> Tuple[dict, float]:
    """Closed-form curvatures at radius r and the worst FD deviation there."""
    closed = deform.polar_sectional_closed(params, r)
    metric = deform.deformed_metric_polar(params)
    rep = riemann.curvature(metric, [r, theta, phi])
    err = max(
        abs(rep.sectional[(0, 1)] - closed["K1j"]),
        abs(rep.sectional[(0, 2)] - closed["K1j"]),
        abs(rep.sectional[(1, 2)] - closed["K23"]),
        abs(rep.scalar - closed["K"]),
    )
    return closed, err


@app.post("/v1/table3", response_model=Table3Response, response_model_exclude_none=True)
def table3_endpoint(req: Table3Request) -> Table3Response:
    rows: List[Table3Row] = []
    ok = True
    for z in (1.0, -1.0):
        for l2 in (1.0, 0.0, -1.0):
            params = deform.DeformationParams(z=z, lambda2_sq=l2, profile="one")
            row = Table3Row(name=deform.classify_deformed(params),
                            symbol=deform.deformed_symbol(params),
                            z=z, lambda2_sq=l2, degenerate=(l2 == 0.0))
            for r in req.radii:
                try:
                    closed = deform.polar_sectional_closed(params, r)
                    point = Table3Point(r=r, **closed)
                    if l2 != 0.0:
                        _, err = verify_table3_point(params, r, req.theta, req.phi)
                        point.max_fd_error = err
                except ChartDomainError as exc:
                    _fail(400, f"radius {r} outside the chart of {deform.deformed_symbol(params)}: {exc}")
                row.points.append(point)
            if l2 != 0.0:
                row.verified = all(p.max_fd_error < req.tol for p in row.points)
                ok = ok and row.verified
            rows.append(row)
    if req.include_flat:
        for l2 in (1.0, 0.0, -1.0):
            params = deform.DeformationParams(z=0.0, lambda2_sq=l2, profile="one")
            rows.append(Table3Row(name=deform.classify_deformed(params),
                                  symbol=deform.deformed_symbol(params),
                                  z=0.0, lambda2_sq=l2, degenerate=(l2 == 0.0),
                                  note="flat/non-deformed, see table2"))
    return Table3Response(status="pass" if ok else "fail", tol=req.tol, rows=rows)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

class CurvatureRequest(BaseModel):
    space: Literal["ck-polar", "deformed-cartesian", "deformed-polar"] = "ck-polar"
    kappa1: float = 1.0
    kappa2: float = 1.0
    z: float = 1.0
    lambda2_sq: float = 1.0
    profile: str = "one"
    point: List[float]


class CurvatureResponse(BaseModel):
    schema_: str = Field(SCHEMA, alias="schema")
    command: str = "curvature"
    status: Literal["pass", "fail"]
    space: str
    report: dict
    closed_form_scalar: Optional[float] = None

    model_config = {"populate_by_name": True}


def _closed_form_report(point, sectional_vals, scalar) -> riemann.CurvatureReport:
    n = len(point)
    sectional = {}
    for i in range(n):
        for j in range(i + 1, n):
            sectional[(i, j)] = sectional_vals[(i, j)] if isinstance(sectional_vals, dict) \
                else sectional_vals
    return riemann.CurvatureReport(point=np.asarray(point, dtype=float),
                                   sectional=sectional, scalar=scalar, method="closed-form")


@app.post("/v1/curvature", response_model=CurvatureResponse, response_model_exclude_none=True)
def curvature_endpoint(req: CurvatureRequest) -> CurvatureResponse:
    closed = None
    try:
        if req.space == "ck-polar":
            if req.kappa2 == 0:
                # degenerate rows carry the closed-form constants only
                n = len(req.point)
                rep = _closed_form_report(req.point, req.kappa1, n * (n - 1) * req.kappa1)
                return CurvatureResponse(status="pass", space=req.space,
                                         report=rep.to_json_dict(),
                                         closed_form_scalar=rep.scalar)
            metric = spaces.metric_polar(spaces.KappaPair(req.kappa1, req.kappa2), len(req.point))
            closed = float(len(req.point) * (len(req.point) - 1) * req.kappa1)
        elif req.space == "deformed-cartesian":
            params = deform.DeformationParams(z=req.z, profile=req.profile)
            metric = deform.deformed_metric_cartesian(params)
            closed = float(deform.scalar_curvature_formula(
                params, req.z * float(np.sum(np.asarray(req.point) ** 2))))
        else:
            params = deform.DeformationParams(z=req.z, lambda2_sq=req.lambda2_sq, profile=req.profile)
            if req.lambda2_sq == 0:
                if params.profile.name != "one":
                    _fail(400, "closed-form sectionals for the degenerate rows are "
                               "available for the unit profile only")
                forms = deform.polar_sectional_closed(params, req.point[0])
                rep = _closed_form_report(req.point,
                                          {(0, 1): forms["K1j"], (0, 2): forms["K1j"],
                                           (1, 2): forms["K23"]}, forms["K"])
                return CurvatureResponse(status="pass", space=req.space,
                                         report=rep.to_json_dict(),
                                         closed_form_scalar=forms["K"])
            metric = deform.deformed_metric_polar(params)
            closed = float(deform.polar_scalar_closed(params, req.point[0]))
        rep = riemann.curvature(metric, req.point)
    except (ChartDomainError, DegenerateMetricError, KeyError) as exc:
        _fail(400, str(exc))
    return CurvatureResponse(status="pass", space=req.space,
                             report=rep.to_json_dict(), closed_form_scalar=closed)


# ---------------------------------------------------------------------------
# geodesic
# ---------------------------------------------------------------------------

class GeodesicRequest(BaseModel):
    z: float = 1.0
    lambda2_sq: float = 1.0
    profile: str = "one"
    q0: List[float] = Field(default_factory=lambda: [0.5, 1.2, 0.7])
    p0: List[float] = Field(default_factory=lambda: [0.05, -0.04, 0.06])
    dt: float = Field(1e-3, gt=0)
    steps: int = Field(10_000, ge=1, le=200_000)
    record_every: int = Field(10, ge=1)
    format: Literal["json", "csv"] = "json"


class GeodesicResponse(BaseModel):
    schema_: str = Field(SCHEMA, alias="schema")
    command: str = "geodesic"
    status: Literal["pass", "fail"]
    dt: float
    steps: int
    completed_steps: int
    note: Optional[str] = None
    max_drift: Dict[str, float]
    columns: List[str]
    samples: int
    trajectory: Optional[List[List[float]]] = None

    model_config = {"populate_by_name": True}


def drift_report(invariants: Dict[str, object], states) -> Dict[str, float]:
    """Relative drift of each invariant along recorded states."""
    drift: Dict[str, float] = {}
    for name, fn in invariants.items():
        vals = np.array([fn(s.coords, s.momenta) for s in states], dtype=float)
        ref = abs(vals[0])
        scale = ref if ref > 1e-12 else 1.0
        drift[name] = float(np.max(np.abs(vals - vals[0])) / scale)
    return drift


def run_geodesic(params: deform.DeformationParams, q0, p0, dt: float, steps: int,
                 record_every: int = 1):
    """Integrate the polar-chart kinetic flow and monitor its invariants.

    Returns (states, drift dict with relative drifts of H, C2, C3, p_phi).
    """
    ham = deform.geodesic_hamiltonian(params)
    invariants = deform.flow_invariants(params)
    metric = deform.deformed_metric_polar(params)
    states = riemann.geodesic_flow(
        ham, riemann.FlowState(coords=np.asarray(q0, dtype=float),
                               momenta=np.asarray(p0, dtype=float),
                               time=0.0, hamiltonian_value=0.0),
        dt=dt, steps=steps, grad=ham.grad, domain_guard=metric.domain_guard,
        record_every=record_every)
    return states, drift_report(invariants, states)


@app.post("/v1/geodesic", response_model=None)
def geodesic_endpoint(req: GeodesicRequest):
    if req.lambda2_sq == 0:
        _fail(400, "lambda2^2 = 0: degenerate metric, kinetic term diverges; "
                   "geodesic dynamics is undefined on the Newtonian rows")
    note = None
    try:
        params = deform.DeformationParams(z=req.z, lambda2_sq=req.lambda2_sq, profile=req.profile)
        states, drift = run_geodesic(params, req.q0, req.p0, req.dt, req.steps, req.record_every)
    except KeyError as exc:
        _fail(400, str(exc))
    except TrajectoryLeftDomain as exc:
        # report what was integrated up to the last valid state
        note = str(exc)
        states = exc.states
        drift = drift_report(deform.flow_invariants(params), states)
    except CKGeoError as exc:
        _fail(400, str(exc))
    invariants = deform.flow_invariants(params)
    extra = {k: v for k, v in invariants.items() if k in ("C2", "C3", "p_phi")}
    if req.format == "csv":
        return PlainTextResponse(riemann.trajectory_csv(states, extra), media_type="text/csv")
    columns = ["t", "q1", "q2", "q3", "p1", "p2", "p3", "H", "C2", "C3", "p_phi"]
    rows = []
    for s in states:
        rows.append([float(s.time), *map(float, s.coords), *map(float, s.momenta),
                     float(s.hamiltonian_value),
                     float(extra["C2"](s.coords, s.momenta)),
                     float(extra["C3"](s.coords, s.momenta)),
                     float(extra["p_phi"](s.coords, s.momenta))])
    completed = int(round((states[-1].time) / req.dt)) if states else 0
    return GeodesicResponse(status="pass" if note is None else "fail",
                            dt=req.dt, steps=req.steps, completed_steps=completed,
                            note=note, max_drift=drift,
                            columns=columns, samples=len(rows), trajectory=rows)


# ---------------------------------------------------------------------------
# contract
# ---------------------------------------------------------------------------

class ContractRequest(BaseModel):
    n: int = Field(3, ge=1, le=8)
    kappa: List[float]
    m: int = 1
    eps_values: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check(self):
        if len(self.kappa) != self.n:
            raise ValueError(f"kappa must have exactly n={self.n} entries")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"m must lie in 1..{self.n}")
        return self


class ContractResponse(BaseModel):
    schema_: str = Field(SCHEMA, alias="schema")
    command: str = "contract"
    status: Literal["pass", "fail"]
    m: int
    series: List[Dict[str, float]]
    monotone: bool
    limit_matches_kappa_zero: bool

    model_config = {"populate_by_name": True}


@app.post("/v1/contract", response_model=ContractResponse)
def contract_endpoint(req: ContractRequest) -> ContractResponse:
    sig = alg.CKSignature(req.kappa)
    sc = alg.build_structure_constants(sig)
    target = alg.build_structure_constants(sig.with_kappa_zero(req.m))
    eps_values = req.eps_values or [10.0 ** (-k / 2) for k in range(0, 13)]
    series = []
    for eps in eps_values:
        rescaled = alg.contract_gamma(sc, req.m, eps)
        series.append({"eps": float(eps), "distance": rescaled.distance(target)})
    distances = [row["distance"] for row in series]
    monotone = all(a >= b - 1e-300 for a, b in zip(distances, distances[1:]))
    limit_ok = alg.contract_gamma(sc, req.m, 0).equals(target)
    status = "pass" if (monotone and limit_ok) else "fail"
    return ContractResponse(status=status, m=req.m, series=series,
                            monotone=monotone, limit_matches_kappa_zero=limit_ok)


@app.get("/v1/health")
def health():
    return {"schema": SCHEMA, "status": "ok"}
