"""Batch command line client for the verification service.

The CLI holds no numerics of its own: every subcommand posts a request
model to the HTTP service (in process by default, or a remote base URL
via --server) and formats the JSON that comes back.

Exit codes: 0 every check passed, 1 usage or malformed request, 2 a
mathematical margin failed its tolerance, 3 a numeric failure (or an
unreachable server).  The default Monte Carlo seed is LOGSOB_SEED when
that variable is set; an explicit --seed always wins.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import os
import sys

import httpx

from .schemas import VERIFY_TARGETS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_NUMERIC = 3

STATUS_EXIT = {"pass": EXIT_OK, "violation": EXIT_VIOLATION, "numeric-failure": EXIT_NUMERIC}

CSV_HEADER = ("suite", "case", "n", "label", "seed", "lhs", "rhs", "margin", "std_error", "pass")

FAMILIES = ("real", "complex", "quaternionic", "octonionic")


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad usage; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="logsob", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv", "text"), default="text")
        p.add_argument("--output", help="write the formatted result to a file")
        p.add_argument("--server", help="base URL of a running service; default runs in process")

    p = sub.add_parser("spectra", help="eigenvalue table and exact identity checks")
    p.add_argument("--case", choices=FAMILIES, default="complex")
    p.add_argument("--n", type=int)
    p.add_argument("--max-degree", type=int, default=10)
    p.add_argument("--nu", type=float, help="evaluate the intertwiner away from its distinguished parameter")
    common(p)

    p = sub.add_parser("verify", help="run one verification target")
    p.add_argument("target", choices=VERIFY_TARGETS)
    p.add_argument("--case", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--samples", type=int, default=20_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--grid", choices=("small", "full"), default="small")
    p.add_argument("--length", type=int, default=8)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--t", type=float)
    common(p)

    p = sub.add_parser("report", help="run every suite and consolidate the results")
    p.add_argument("--samples", type=int, default=8_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--cases", nargs="+", choices=FAMILIES)
    common(p)

    return parser


def _default_seed() -> int:
    raw = os.environ.get("LOGSOB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        sys.stderr.write(f"error: LOGSOB_SEED={raw!r} is not an integer\n")
        raise SystemExit(EXIT_USAGE) from None


async def _post_async(path: str, payload: dict, server: str | None):
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
            resp = await client.post(path, json=payload)
            return resp.status_code, resp.json()
    from .service import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://logsob") as client:
        resp = await client.post(path, json=payload)
        return resp.status_code, resp.json()


def _post(path: str, payload: dict, server: str | None):
    return asyncio.run(_post_async(path, payload, server))


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _detail_text(body) -> str:
    if isinstance(body, dict):
        detail = body.get("detail", body)
        if isinstance(detail, list):  # pydantic validation errors
            parts = []
            for item in detail:
                loc = ".".join(str(x) for x in item.get("loc", []) if x != "body")
                parts.append(f"{loc}: {item.get('msg', '')}".strip(": "))
            return "; ".join(parts)
        return str(detail)
    return str(body)


def _render_json(body: dict) -> str:
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_check_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(_csv_cell(row.get(col)) for col in CSV_HEADER)
    return buf.getvalue()


def _check_rows(body: dict) -> list[dict]:
    if "checks" in body:
        return list(body["checks"])
    rows = []
    for suite in body.get("suites", []):
        rows.extend(suite["checks"])
    return rows


def _render_check_text(body: dict) -> str:
    lines = []
    for row in _check_rows(body):
        flag = "PASS" if row["pass"] else "FAIL"
        where = row["case"] or row["suite"]
        lines.append(
            f"[{flag}] {row['suite']:<13} {where:<12} {row['label']:<28} "
            f"margin={row['margin']: .6e} se={row['std_error']:.2e}"
        )
    if "status" in body:
        lines.append(
            f"{body['target']}: {body['status']} "
            f"(min margin {body['margin_min']}, median {body['margin_median']})"
        )
    else:
        for suite in body.get("suites", []):
            lines.append(f"{suite['suite']}: {suite['status']}")
        lines.append("report: " + ("all pass" if body.get("all_pass") else "FAILURES"))
    return "\n".join(lines) + "\n"


def _render_spectra_csv(body: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ("case", "n", "label", "nu", "deltab", "margin", "eigenvalue_exact", "eigenvalue", "pole")
    )
    for row in body["rows"]:
        writer.writerow(
            (
                row["case"],
                row["n"],
                " ".join(str(x) for x in row["label"]),
                row["nu"],
                row["deltab"],
                row["margin"],
                _csv_cell(row["eigenvalue_exact"]),
                _csv_cell(row["eigenvalue"]),
                _csv_cell(row.get("pole")),
            )
        )
    return buf.getvalue()


def _render_spectra_text(body: dict) -> str:
    lines = [
        f"case={body['case']} n={body['n']} nu*={body['special_nu']} "
        f"max_degree={body['max_degree']}"
    ]
    lines.append(f"{'label':<10} {'deltab':>8} {'margin':>12} eigenvalue")
    for row in body["rows"]:
        label = ",".join(str(x) for x in row["label"])
        ev = row.get("pole") or row["eigenvalue_exact"] or ""
        lines.append(f"{label:<10} {row['deltab']:>8} {row['margin']:>12} {ev}")
    lines.append(
        "identities: "
        + ("pass" if body["identities_pass"] else "FAIL")
        + "; margins nonnegative: "
        + ("yes" if body["margins_nonnegative"] else "NO")
    )
    if body["degenerate"]:
        lines.append(f"degenerate: {body['degenerate_note']}")
    eq = " ".join(",".join(str(x) for x in lab) for lab in body["equality_labels"])
    lines.append(f"equality labels: {eq or '(none)'}")
    return "\n".join(lines) + "\n"


def _cmd_spectra(args) -> int:
    payload = {"case": args.case, "max_degree": args.max_degree}
    if args.n is not None:
        payload["n"] = args.n
    if args.nu is not None:
        payload["nu"] = args.nu
    code, body = _post("/spectra", payload, args.server)
    if code != 200:
        sys.stderr.write(f"error: {_detail_text(body)}\n")
        return EXIT_USAGE if code in (400, 404, 422) else EXIT_NUMERIC
    renderer = {
        "json": _render_json,
        "csv": _render_spectra_csv,
        "text": _render_spectra_text,
    }[args.format]
    _write(renderer(body), args.output)
    return EXIT_OK if body["all_pass"] else EXIT_VIOLATION


def _cmd_verify(args) -> int:
    payload = {
        "samples": args.samples,
        "seed": args.seed if args.seed is not None else _default_seed(),
        "trials": args.trials,
        "tolerance": args.tolerance,
        "grid": args.grid,
        "length": args.length,
        "max_degree": args.max_degree,
    }
    for key in ("case", "n", "k", "p", "q", "t"):
        value = getattr(args, key)
        if value is not None:
            payload[key] = value
    code, body = _post(f"/verify/{args.target}", payload, args.server)
    if code != 200:
        sys.stderr.write(f"error: {_detail_text(body)}\n")
        return EXIT_USAGE if code in (400, 404, 422) else EXIT_NUMERIC
    renderer = {
        "json": _render_json,
        "csv": lambda b: _render_check_csv(_check_rows(b)),
        "text": _render_check_text,
    }[args.format]
    _write(renderer(body), args.output)
    if body["status"] == "numeric-failure" and body.get("detail"):
        sys.stderr.write(f"numeric failure: {body['detail']}\n")
    return STATUS_EXIT[body["status"]]


def _cmd_report(args) -> int:
    payload = {
        "samples": args.samples,
        "seed": args.seed if args.seed is not None else _default_seed(),
        "trials": args.trials,
        "tolerance": args.tolerance,
    }
    if args.cases:
        payload["cases"] = args.cases
    code, body = _post("/report", payload, args.server)
    if code != 200:
        sys.stderr.write(f"error: {_detail_text(body)}\n")
        return EXIT_USAGE if code in (400, 404, 422) else EXIT_NUMERIC
    renderer = {
        "json": _render_json,
        "csv": lambda b: _render_check_csv(_check_rows(b)),
        "text": _render_check_text,
    }[args.format]
    _write(renderer(body), args.output)
    return body["exit_code"]


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "spectra":
            return _cmd_spectra(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_report(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except httpx.HTTPError as exc:
        sys.stderr.write(f"error: service request failed: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
