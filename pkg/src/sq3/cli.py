"""Command-line client.

Without ``--server`` the requests go to an in-process copy of the service;
with it, to a running ``sq3 serve``.  Exit codes: 0 success or all rows
match, 1 a mismatch or failed check, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class Client:
    def __init__(self, server: str | None = None):
        if server:
            import httpx

            self._http = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._http = TestClient(app, raise_server_exceptions=False)

    def get(self, path: str, **params):
        return self._http.get(path, params=params)

    def post(self, path: str, body: dict):
        return self._http.post(path, json=body)


def _settings(args) -> tuple[str, float | None]:
    backend = args.backend or os.environ.get("SQ3_BACKEND") or "exact"
    eps = args.eps
    if eps is None and os.environ.get("SQ3_EPS"):
        eps = float(os.environ["SQ3_EPS"])
    if backend not in ("exact", "float"):
        raise SystemExit(f"sq3: unknown backend {backend!r}")
    return backend, eps


def _fmt_rad(x: float | None) -> str:
    if x is None:
        return "-"
    if x == 0:
        return "0"
    return f"{x:.12f} (pi/{math.pi / x:.4f})"


def _emit_rows(rows: list[dict], columns: list[str], fmt: str, out):
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([r.get(c, "") for c in columns])
    elif fmt == "md":
        out.write("| " + " | ".join(columns) + " |\n")
        out.write("|" + "---|" * len(columns) + "\n")
        for r in rows:
            out.write("| " + " | ".join(str(r.get(c, "")) for c in columns) + " |\n")
    else:
        widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in columns]
        out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")


def _error(resp) -> int:
    try:
        body = resp.json()
        detail = body.get("detail", body)
    except ValueError:
        detail = resp.text
    print(f"sq3: {detail}", file=sys.stderr)
    return EXIT_USAGE if resp.status_code in (400, 404, 422) else EXIT_MISMATCH


def _group_body(args) -> dict:
    backend, eps = _settings(args)
    body = {"spec": args.spec, "backend": backend}
    if eps is not None:
        body["eps"] = eps
    return body


def cmd_diameter(client: Client, args, out) -> int:
    resp = client.post("/diameter", _group_body(args))
    if resp.status_code != 200:
        return _error(resp)
    d = resp.json()
    for w in d["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
        return EXIT_OK
    bd = d["bound"]
    row = {
        "spec": d["spec"], "order": d["order"], "orbit": d["orbit_size"], "vertices": d["vertices"],
        "faces": " ".join(f"{k}:{v}" for k, v in d["face_sides"].items()),
        "cos2": bd["cos2"], "radians": f"{bd['radians']:.12f}", "exact": bd["exact"],
    }
    if args.format in ("csv", "md"):
        _emit_rows([row], list(row), args.format, out)
        return EXIT_OK
    out.write(f"group        {d['spec']}  (order {d['order']}, {d['backend']})\n")
    out.write(f"orbit of 1   {d['orbit_size']} points, stabilizer order {d['stabilizer_order']}\n")
    layers = ", ".join(f"{c:.6f}" for c in d["layer_cosines"][:8])
    more = " ..." if len(d["layer_cosines"]) > 8 else ""
    out.write(f"layer cos    {layers}{more}\n")
    if d["degeneracy"]:
        out.write(f"cell         {d['degeneracy']}\n")
    else:
        out.write(f"cell         {d['vertices']} vertices; faces {row['faces']}\n")
    sign = {1: "+", 0: "0", -1: "-"}[bd["cos_sign"]]
    out.write(f"cos^2        {bd['cos2']}  (sign {sign}{', exact' if bd['exact'] else ', float'})\n")
    out.write(f"bound        {_fmt_rad(bd['radians'])}\n")
    return EXIT_OK


def cmd_orbit(client: Client, args, out) -> int:
    resp = client.post("/orbit", _group_body(args))
    if resp.status_code != 200:
        return _error(resp)
    d = resp.json()
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
        return EXIT_OK
    rows = []
    for li, (layer, c) in enumerate(zip(d["layers"], d["layer_cosines"])):
        for p in layer:
            rows.append({"layer": li, "cos": f"{c:.12f}", "w": p[0], "x": p[1], "y": p[2], "z": p[3]})
    _emit_rows(rows, ["layer", "cos", "w", "x", "y", "z"], args.format, out)
    return EXIT_OK


def cmd_cell(client: Client, args, out) -> int:
    resp = client.post("/cell", _group_body(args))
    if resp.status_code != 200:
        return _error(resp)
    d = resp.json()
    for w in d["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
        return EXIT_OK
    cell = d["cell"]
    rows = []
    for i, v in enumerate(cell["vertices"]):
        rows.append({"vertex": i, **{c: f"{x:.12f}" for c, x in zip("wxyz", v["unit"])}})
    _emit_rows(rows, ["vertex", "w", "x", "y", "z"], args.format, out)
    if args.format == "text":
        stats = cell["statistics"]
        if stats:
            out.write(f"\n{stats['vertices']} vertices, {stats['edges']} edges, {stats['faces']} faces\n")
        out.write(f"bound {_fmt_rad(cell['bound']['radians'])}\n")
    return EXIT_OK


def cmd_table(client: Client, args, out) -> int:
    backend, _ = _settings(args)
    resp = client.get(f"/table/{args.which}", backend=backend)
    if resp.status_code != 200:
        return _error(resp)
    d = resp.json()
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
    else:
        rows = []
        for r in d["rows"]:
            rows.append({
                "family": r["family"], "expected": r["expected"],
                "expected_rad": f"{r['expected_radians']:.12f}",
                "computed_rad": "-" if r["computed_radians"] is None else f"{r['computed_radians']:.12f}",
                "exact": r["exact"], "status": r["status"], "note": r["note"],
            })
        _emit_rows(rows, ["family", "expected", "expected_rad", "computed_rad", "exact", "status", "note"],
                   args.format, out)
        if args.format == "text":
            out.write(f"\n{len(rows)} rows, {d['mismatches']} mismatches\n")
    return EXIT_MISMATCH if d["mismatches"] else EXIT_OK


def cmd_hypercube(client: Client, args, out) -> int:
    backend, _ = _settings(args)
    resp = client.get(f"/hypercube/{args.n}", backend=backend)
    if resp.status_code != 200:
        return _error(resp)
    d = resp.json()
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
    elif args.format in ("csv", "md"):
        _emit_rows([d], list(d), args.format, out)
    else:
        out.write(f"n={d['n']}  expected {d['expected']} = {d['expected_radians']:.12f}\n")
        out.write(f"computed {d['computed_radians']:.12f} via {d['method']}  [{d['status']}]\n")
    return EXIT_OK if d["status"] == "match" else EXIT_MISMATCH


def cmd_validate(client: Client, args, out) -> int:
    resp = client.post("/validate", _group_body(args))
    if resp.status_code != 200:
        return _error(resp)
    d = resp.json()
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
    else:
        rows = [{"check": c["name"], "ok": c["ok"], "detail": c["detail"]} for c in d["checks"]]
        if args.format == "text":
            out.write(f"{d['spec']}  {d['datum']}\n")
        _emit_rows(rows, ["check", "ok", "detail"], args.format, out)
    return EXIT_OK if d["valid"] else EXIT_MISMATCH


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("sq3.service:app", host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sq3", description="Diameter lower bounds for S^3/G, G finite in O(4).")
    p.add_argument("--server", help="base URL of a running sq3 service (default: in-process)")
    p.add_argument("--backend", choices=("exact", "float"), help="arithmetic (env SQ3_BACKEND, default exact)")
    p.add_argument("--eps", type=float, help="float tolerance (env SQ3_EPS, default 1e-9)")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    fmt.add_argument("--md", dest="format", action="store_const", const="md")
    p.set_defaults(format="text")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in (("diameter", "orbit, cell and diameter bound"), ("orbit", "orbit of 1 by layer"),
                           ("cell", "cell vertices"), ("validate", "check the Goursat datum and closure")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("spec", help='e.g. "duval:29" or "duval:11a(m=2,n=3)"')
    sp = sub.add_parser("table", help="recompute a summary table")
    from .tables import TABLES

    sp.add_argument("which", choices=TABLES)
    sp = sub.add_parser("hypercube", help="cubical tessellation of S^n")
    sp.add_argument("n", type=int)
    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    return p


COMMANDS = {
    "diameter": cmd_diameter,
    "orbit": cmd_orbit,
    "cell": cmd_cell,
    "table": cmd_table,
    "hypercube": cmd_hypercube,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None, out=None) -> int:
    parser = build_parser()
    # options are accepted before or after the subcommand
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_hoist_options(argv))
    out = out or sys.stdout
    if args.command == "serve":
        return cmd_serve(args)
    client = Client(args.server)
    return COMMANDS[args.command](client, args, out)


_GLOBAL_FLAGS = {"--json", "--csv", "--md"}
_GLOBAL_OPTS = {"--server", "--backend", "--eps"}


def _hoist_options(argv: list[str]) -> list[str]:
    front, rest = [], []
    i = 0
    while i < len(argv):
        a = argv[i]
        key = a.split("=", 1)[0]
        if a in _GLOBAL_FLAGS:
            front.append(a)
        elif key in _GLOBAL_OPTS:
            front.append(a)
            if "=" not in a and i + 1 < len(argv):
                front.append(argv[i + 1])
                i += 1
        else:
            rest.append(a)
        i += 1
    return front + rest


def run_capture(argv: list[str]) -> tuple[int, str]:
    """Run the CLI and return (exit code, stdout text)."""
    buf = io.StringIO()
    try:
        code = main(argv, buf)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
