"""Command-line front end: a thin client of the compute service.

Every subcommand builds one request, routes it through the FastAPI app (in
process by default, or to a remote instance via --server) and prints the
response verbatim (JSON) or flattened to CSV.  Identical invocations with
the same seed produce byte-identical output.

Exit codes: 0 all verifications passed, 1 a verification failed,
2 usage/validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ckgeo",
        description="Constant-curvature spaces, their coalgebra deformation, and "
                    "numeric curvature/flow verification.")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    parser.add_argument("--output", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=0, help="PRNG seed for sampled checks")
    parser.add_argument("--tol", type=float, default=1e-5, help="verification tolerance")
    parser.add_argument("-o", "--outfile", default=None, help="write output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", help="build so_kappa(n+1), verify it, report its spaces")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--kappa", type=_floats, default=None, help="comma-separated kappa_1..kappa_n")
    p.add_argument("--sweep-signs", action="store_true", help="all 3^n sign assignments")
    p.add_argument("--include-brackets", action="store_true")

    p = sub.add_parser("table2", help="nine constant-curvature spaces with verified curvatures")
    p.add_argument("--points", type=int, default=20)

    p = sub.add_parser("table3", help="deformed spaces with closed-form vs numeric curvature")
    p.add_argument("--radii", type=_floats, default=[0.3, 0.7, 1.1])
    p.add_argument("--theta", type=float, default=0.8)
    p.add_argument("--phi", type=float, default=0.6)

    p = sub.add_parser("curvature", help="curvature report of a metric at a point")
    p.add_argument("--space", choices=("ck-polar", "deformed-cartesian", "deformed-polar"),
                   default="ck-polar")
    p.add_argument("--kappa1", type=float, default=1.0)
    p.add_argument("--kappa2", type=float, default=1.0)
    p.add_argument("--z", type=float, default=1.0)
    p.add_argument("--lambda2-sq", type=float, default=1.0)
    p.add_argument("--profile", default="one")
    p.add_argument("--point", type=_floats, default=[0.7, 0.9, 0.6])

    p = sub.add_parser("geodesic", help="integrate the deformed geodesic flow, monitor invariants")
    p.add_argument("--z", type=float, default=1.0)
    p.add_argument("--lambda2-sq", type=float, default=1.0)
    p.add_argument("--profile", default="one")
    p.add_argument("--q0", type=_floats, default=[0.5, 1.2, 0.7])
    p.add_argument("--p0", type=_floats, default=[0.05, -0.04, 0.06])
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--record-every", type=int, default=10)

    p = sub.add_parser("contract", help="basis-rescaling contraction distance sweep")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--kappa", type=_floats, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--eps", type=_floats, default=None, help="explicit epsilon values")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _request(args, path: str, payload: dict):
    """POST the payload, in-process unless --server was given."""
    import httpx

    if args.server:
        return httpx.post(args.server.rstrip("/") + path, json=payload, timeout=600.0)

    import asyncio

    from .service import app

    async def call():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://ckgeo") as client:
            return await client.post(path, json=payload, timeout=600.0)

    return asyncio.run(call())


def _emit(args, text: str) -> None:
    if args.outfile:
        with open(args.outfile, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _csv_line(values) -> str:
    return ",".join("" if v is None else (repr(v) if isinstance(v, float) else str(v)) for v in values)


def _to_csv(command: str, doc: dict) -> str:
    lines: List[str] = []
    if command == "algebra":
        lines.append("kappa,name,jacobi_residual,representation_defect,m,dimension,rank,curvature_coefficient")
        for row in doc["rows"]:
            kap = " ".join(repr(k) for k in row["kappa"])
            for sp in row["spaces"]:
                lines.append(_csv_line([kap, row["name"], row["jacobi_residual"],
                                        row["representation_defect"], sp["m"], sp["dimension"],
                                        sp["rank"], sp["curvature_coefficient"]]))
    elif command == "table2":
        lines.append("name,kappa1,kappa2,metric,K_sectional,K_scalar,max_sectional_error,max_scalar_error,verified")
        for row in doc["rows"]:
            metric = "dr^2 + [" + " ; ".join(row["metric_diagonal_symbolic"][1:]) + "]"
            lines.append(_csv_line([row["name"], row["kappa1"], row["kappa2"], metric,
                                    row["K_sectional"], row["K_scalar"],
                                    row.get("max_sectional_error"), row.get("max_scalar_error"),
                                    row.get("verified")]))
    elif command == "table3":
        lines.append("name,symbol,z,lambda2_sq,r,K1j,K23,K,max_fd_error,note")
        for row in doc["rows"]:
            if not row.get("points"):
                lines.append(_csv_line([row["name"], row["symbol"], row["z"], row["lambda2_sq"],
                                        None, None, None, None, None, row.get("note")]))
            for pt in row.get("points", []):
                lines.append(_csv_line([row["name"], row["symbol"], row["z"], row["lambda2_sq"],
                                        pt["r"], pt["K1j"], pt["K23"], pt["K"],
                                        pt.get("max_fd_error"), row.get("note")]))
    elif command == "curvature":
        rep = doc["report"]
        keys = sorted(rep["sectional"])
        lines.append("point,scalar,closed_form_scalar," + ",".join(f"K{k}" for k in keys))
        lines.append(_csv_line([" ".join(repr(v) for v in rep["point"]), rep["scalar"],
                                doc.get("closed_form_scalar")] + [rep["sectional"][k] for k in keys]))
    elif command == "contract":
        lines.append("eps,distance")
        for row in doc["series"]:
            lines.append(_csv_line([row["eps"], row["distance"]]))
    else:
        return json.dumps(doc)
    return "\n".join(lines) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    if args.command == "algebra":
        if not args.sweep_signs:
            if args.kappa is None:
                parser.error("algebra requires --kappa unless --sweep-signs is given")
            if len(args.kappa) != args.n:
                parser.error(f"--kappa must have exactly n={args.n} entries")
        payload = {"n": args.n, "kappa": args.kappa, "sweep_signs": args.sweep_signs,
                   "include_brackets": args.include_brackets}
        path = "/v1/algebra"
    elif args.command == "table2":
        payload = {"points": args.points, "seed": args.seed, "tol": args.tol}
        path = "/v1/table2"
    elif args.command == "table3":
        payload = {"radii": args.radii, "theta": args.theta, "phi": args.phi, "tol": args.tol}
        path = "/v1/table3"
    elif args.command == "curvature":
        payload = {"space": args.space, "kappa1": args.kappa1, "kappa2": args.kappa2,
                   "z": args.z, "lambda2_sq": args.lambda2_sq, "profile": args.profile,
                   "point": args.point}
        path = "/v1/curvature"
    elif args.command == "geodesic":
        payload = {"z": args.z, "lambda2_sq": args.lambda2_sq, "profile": args.profile,
                   "q0": args.q0, "p0": args.p0, "dt": args.dt, "steps": args.steps,
                   "record_every": args.record_every,
                   "format": "csv" if args.output == "csv" else "json"}
        path = "/v1/geodesic"
    elif args.command == "contract":
        if len(args.kappa) != args.n:
            parser.error(f"--kappa must have exactly n={args.n} entries")
        payload = {"n": args.n, "kappa": args.kappa, "m": args.m, "eps_values": args.eps}
        path = "/v1/contract"
    else:  # pragma: no cover - argparse enforces the choices
        parser.error(f"unknown command {args.command}")

    response = _request(args, path, payload)
    if response.status_code in (400, 422):
        try:
            detail = response.json().get("detail")
        except Exception:
            detail = response.text
        print(f"error: {detail}", file=sys.stderr)
        return EXIT_USAGE
    if response.status_code != 200:
        print(f"error: HTTP {response.status_code}: {response.text}", file=sys.stderr)
        return EXIT_VERIFICATION

    content_type = response.headers.get("content-type", "")
    if content_type.startswith("text/csv"):
        _emit(args, response.text)
        return EXIT_OK

    doc = response.json()
    if args.output == "csv":
        _emit(args, _to_csv(args.command, doc))
    else:
        _emit(args, response.text)
    return EXIT_OK if doc.get("status", "pass") == "pass" else EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
