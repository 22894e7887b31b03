"""Command-line front end.

Subcommands: graph, se, sse, lpa, conj, bridge, com.  Every run emits one
report object (JSON with --output json, a stable text rendering otherwise)
and exits 0 on pass, 1 on fail, 2 on unknown-within-bounds, 3 on input
error.  Reports are byte-identical across runs for identical inputs and
flags; wall-clock timing is measured but only rendered with --timing.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from .fields import FieldError, field_from_name
from .graphs import GraphError, adjacency, iso_check, polymorphism_from_matrix, power, product
from . import lpa
from . import serialize as ser
from .shift_equiv import (
    SEWitness,
    search_elementary_sse,
    search_se,
    search_sse_chain,
    verify_elementary_sse,
    verify_se,
    verify_sse_chain,
)
from .bimodules import BimoduleError, hash_compose, verify_conjugacy, verify_pair_equivalence
from .bridge import BridgeError, left_act, verify_ck_on_bridge
from .com import ComError, chain_com, com_from_elementary_sse, com_report
from .lpa import LpaError
from .serialize import FormatError


class _InputError(Exception):
    pass


def _load_json(path: str, inputs: dict):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    inputs[path] = hashlib.sha256(data).hexdigest()
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise _InputError(f"malformed JSON in {path}: {exc}") from exc


def _resolve_field(args):
    name = os.environ.get("LPA_FIELD") or args.field
    return field_from_name(name)


_EXIT = {"pass": 0, "fail": 1, "unknown-within-bounds": 2, "error": 3}


def _render(report: dict, as_json: bool, include_timing: bool) -> str:
    doc = dict(report)
    if not include_timing:
        doc.pop("timing_ms", None)
    if as_json:
        return json.dumps(doc, sort_keys=True)
    lines = [f"command: {' '.join(doc['command'])}", f"verdict: {doc['verdict']}"]
    for path, digest in sorted(doc.get("inputs", {}).items()):
        lines.append(f"input: {path} sha256={digest}")
    if doc.get("message"):
        lines.append(f"message: {doc['message']}")
    for ce in doc.get("counterexamples", []):
        lines.append(f"counterexample: {json.dumps(ce, sort_keys=True)}")
    if doc.get("result") is not None:
        lines.append(f"result: {json.dumps(doc['result'], sort_keys=True)}")
    if "timing_ms" in doc:
        lines.append(f"timing_ms: {doc['timing_ms']}")
    return "\n".join(lines)


def _graph_handler(args, inputs, fld):
    if args.action == "adjacency":
        g = ser.graph_from_json(_load_json(args.graph, inputs))
        return "pass", [], ser.matrix_to_json(adjacency(g))
    if args.action == "from-matrix":
        m = ser.matrix_from_json(_load_json(args.matrix, inputs))
        return "pass", [], ser.graph_to_json(polymorphism_from_matrix(m))
    if args.action == "product":
        p = ser.graph_from_json(_load_json(args.p, inputs))
        q = ser.graph_from_json(_load_json(args.q, inputs))
        return "pass", [], ser.graph_to_json(product(p, q))
    if args.action == "power":
        g = ser.graph_from_json(_load_json(args.graph, inputs))
        return "pass", [], ser.graph_to_json(power(g, args.n))
    if args.action == "iso":
        p = ser.graph_from_json(_load_json(args.p, inputs))
        q = ser.graph_from_json(_load_json(args.q, inputs))
        if iso_check(p, q):
            return "pass", [], None
        ap, aq = adjacency(p), adjacency(q)
        bad = next(
            (v, w)
            for v in ap.rows
            for w in ap.cols
            if ap.entry(v, w) != aq.entry(v, w)
        )
        return (
            "fail",
            [{"entry": list(bad), "left": ap.entry(*bad), "right": aq.entry(*bad)}],
            None,
        )
    raise _InputError(f"unknown graph action {args.action!r}")


def _se_equation_counterexamples(a, b, w):
    out = []
    checks = [
        ("A^n = RS", a.matrix_power(w.lag), w.R @ w.S),
        ("B^n = SR", b.matrix_power(w.lag), w.S @ w.R),
        ("AR = RB", a @ w.R, w.R @ b),
        ("BS = SA", b @ w.S, w.S @ a),
    ]
    for label, lhs, rhs in checks:
        if lhs != rhs:
            bad = next(
                (v, x)
                for v in lhs.rows
                for x in lhs.cols
                if lhs.entry(v, x) != rhs.entry(v, x)
            )
            out.append(
                {
                    "equation": label,
                    "entry": list(bad),
                    "left": lhs.entry(*bad),
                    "right": rhs.entry(*bad),
                }
            )
    return out


def _se_handler(args, inputs, fld):
    a = ser.matrix_from_json(_load_json(args.A, inputs))
    b = ser.matrix_from_json(_load_json(args.B, inputs))
    if args.action == "verify":
        w = ser.se_witness_from_json(_load_json(args.witness, inputs))
        if verify_se(a, b, w):
            return "pass", [], None
        return "fail", _se_equation_counterexamples(a, b, w), None
    if args.action == "search":
        w = search_se(a, b, args.max_lag, args.max_entry, threads=args.threads)
        if w is None:
            return "unknown-within-bounds", [], None
        return "pass", [], ser.se_witness_to_json(w)
    raise _InputError(f"unknown se action {args.action!r}")


def _sse_handler(args, inputs, fld):
    a = ser.matrix_from_json(_load_json(args.A, inputs))
    b = ser.matrix_from_json(_load_json(args.B, inputs))
    if args.action == "verify":
        r = ser.matrix_from_json(_load_json(args.R, inputs))
        s = ser.matrix_from_json(_load_json(args.S, inputs))
        if verify_elementary_sse(a, b, r, s):
            return "pass", [], None
        ces = []
        for label, lhs, rhs in (("A = RS", a, r @ s), ("B = SR", b, s @ r)):
            if lhs != rhs:
                bad = next(
                    (v, x)
                    for v in lhs.rows
                    for x in lhs.cols
                    if lhs.entry(v, x) != rhs.entry(v, x)
                )
                ces.append(
                    {"equation": label, "entry": list(bad), "left": lhs.entry(*bad), "right": rhs.entry(*bad)}
                )
        return "fail", ces, None
    if args.action == "verify-chain":
        steps = ser.sse_chain_from_json(_load_json(args.chain, inputs))
        if verify_sse_chain(a, b, steps):
            return "pass", [], None
        return "fail", [{"chain": "an elementary step fails or the ends do not match"}], None
    if args.action == "search":
        if args.depth == 1:
            hit = search_elementary_sse(a, b, args.max_inner_dim, args.max_entry, threads=args.threads)
            if hit is None:
                return "unknown-within-bounds", [], None
            from .shift_equiv import SSEStep

            return "pass", [], ser.sse_chain_to_json((SSEStep(a, hit[0], hit[1]),))
        chain = search_sse_chain(a, b, args.max_inner_dim, args.max_entry, depth=args.depth)
        if chain is None:
            return "unknown-within-bounds", [], None
        return "pass", [], ser.sse_chain_to_json(chain)
    raise _InputError(f"unknown sse action {args.action!r}")


def _lpa_handler(args, inputs, fld):
    g = ser.graph_from_json(_load_json(args.graph, inputs))
    if args.action == "normalize":
        x = ser.element_from_json(g, _load_json(args.element, inputs), fld)
        return "pass", [], ser.element_to_json(x, fld)
    if args.action == "mul":
        x = ser.element_from_json(g, _load_json(args.left, inputs), fld)
        y = ser.element_from_json(g, _load_json(args.right, inputs), fld)
        return "pass", [], ser.element_to_json(lpa.multiply(x, y), fld)
    if args.action == "degree":
        x = ser.element_from_json(g, _load_json(args.element, inputs), fld)
        return "pass", [], {"degree": lpa.degree(x)}
    raise _InputError(f"unknown lpa action {args.action!r}")


def _conj_handler(args, inputs, fld):
    if args.action == "verify":
        pair = ser.pair_from_json(_load_json(args.pair, inputs), fld)
        if verify_conjugacy(pair):
            return "pass", [], None
        return "fail", [{"pair": "sigma is not an invertible block map of the required shape"}], None
    if args.action == "compose":
        p1 = ser.pair_from_json(_load_json(args.p1, inputs), fld)
        p2 = ser.pair_from_json(_load_json(args.p2, inputs), fld)
        return "pass", [], ser.pair_to_json(hash_compose(p1, p2), fld)
    if args.action == "equiv":
        p1 = ser.pair_from_json(_load_json(args.p1, inputs), fld)
        p2 = ser.pair_from_json(_load_json(args.p2, inputs), fld)
        phi = ser.block_map_from_json(_load_json(args.phi, inputs), p1.M, p2.M, fld)
        if verify_pair_equivalence(p1, p2, phi):
            return "pass", [], None
        return "fail", [{"phi": "does not intertwine the two sigmas or is not invertible"}], None
    raise _InputError(f"unknown conj action {args.action!r}")


def _bridge_handler(args, inputs, fld):
    pair = ser.pair_from_json(_load_json(args.pair, inputs), fld)
    if args.action == "build":
        y = ser.bridge_element_from_json(pair, _load_json(args.element, inputs), fld)
        return "pass", [], ser.bridge_element_to_json(y, fld)
    if args.action == "act":
        y = ser.bridge_element_from_json(pair, _load_json(args.element, inputs), fld)
        kind, _, name = args.generator.partition(":")
        if kind not in ("v", "e", "e*") or not name:
            raise _InputError(f"generator must look like v:<vertex>, e:<edge>, or e*:<edge>, got {args.generator!r}")
        out = left_act((kind, name), y)
        return "pass", [], ser.bridge_element_to_json(out, fld)
    if args.action == "verify-ck":
        degree_bound = args.degree_bound if args.degree_bound is not None else args.length_bound
        report = verify_ck_on_bridge(pair, degree_bound, args.length_bound)
        if report.passed:
            return "pass", [], {"checked_elements": report.checked_elements}
        return "fail", report.counterexamples, {"checked_elements": report.checked_elements}
    raise _InputError(f"unknown bridge action {args.action!r}")


def _com_handler(args, inputs, fld):
    if args.action == "verify":
        w = ser.com_witness_from_json(_load_json(args.witness, inputs), fld)
        ok, failures = com_report(w)
        if ok:
            return "pass", [], None
        return "fail", failures, None
    if args.action == "from-sse":
        e = ser.graph_from_json(_load_json(args.E, inputs))
        f = ser.graph_from_json(_load_json(args.F, inputs))
        r = ser.matrix_from_json(_load_json(args.R, inputs))
        s = ser.matrix_from_json(_load_json(args.S, inputs))
        w = com_from_elementary_sse(e, f, r, s, fld)
        return "pass", [], ser.com_witness_to_json(w, fld)
    if args.action == "chain":
        w1 = ser.com_witness_from_json(_load_json(args.w1, inputs), fld)
        w2 = ser.com_witness_from_json(_load_json(args.w2, inputs), fld)
        return "pass", [], ser.com_witness_to_json(chain_com(w1, w2, fld), fld)
    raise _InputError(f"unknown com action {args.action!r}")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["text", "json"], default="text")
    common.add_argument("--field", default="rational", help="rational or gfp:<p>; LPA_FIELD overrides")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    parser = argparse.ArgumentParser(prog="lpabridge")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", parents=[common])
    gs = g.add_subparsers(dest="action", required=True)
    p = gs.add_parser("adjacency", parents=[common])
    p.add_argument("--graph", required=True)
    p = gs.add_parser("from-matrix", parents=[common])
    p.add_argument("--matrix", required=True)
    p = gs.add_parser("product", parents=[common])
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p = gs.add_parser("power", parents=[common])
    p.add_argument("--graph", required=True)
    p.add_argument("-n", type=int, required=True)
    p = gs.add_parser("iso", parents=[common])
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    s = sub.add_parser("se", parents=[common])
    ss = s.add_subparsers(dest="action", required=True)
    p = ss.add_parser("verify", parents=[common])
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--witness", required=True)
    p = ss.add_parser("search", parents=[common])
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--max-lag", type=int, required=True)
    p.add_argument("--max-entry", type=int, required=True)

    s = sub.add_parser("sse", parents=[common])
    ss = s.add_subparsers(dest="action", required=True)
    p = ss.add_parser("verify", parents=[common])
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--R", required=True)
    p.add_argument("--S", required=True)
    p = ss.add_parser("verify-chain", parents=[common])
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--chain", required=True)
    p = ss.add_parser("search", parents=[common])
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--max-inner-dim", type=int, required=True)
    p.add_argument("--max-entry", type=int, required=True)
    p.add_argument("--depth", type=int, default=1)

    l = sub.add_parser("lpa", parents=[common])
    ls = l.add_subparsers(dest="action", required=True)
    p = ls.add_parser("normalize", parents=[common])
    p.add_argument("--graph", required=True)
    p.add_argument("--element", required=True)
    p = ls.add_parser("mul", parents=[common])
    p.add_argument("--graph", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p = ls.add_parser("degree", parents=[common])
    p.add_argument("--graph", required=True)
    p.add_argument("--element", required=True)

    c = sub.add_parser("conj", parents=[common])
    cs = c.add_subparsers(dest="action", required=True)
    p = cs.add_parser("verify", parents=[common])
    p.add_argument("--pair", required=True)
    p = cs.add_parser("compose", parents=[common])
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p = cs.add_parser("equiv", parents=[common])
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p.add_argument("--phi", required=True)

    b = sub.add_parser("bridge", parents=[common])
    bs = b.add_subparsers(dest="action", required=True)
    p = bs.add_parser("build", parents=[common])
    p.add_argument("--pair", required=True)
    p.add_argument("--element", required=True)
    p = bs.add_parser("act", parents=[common])
    p.add_argument("--pair", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--generator", required=True, help="v:<vertex>, e:<edge>, or e*:<edge>")
    p = bs.add_parser("verify-ck", parents=[common])
    p.add_argument("--pair", required=True)
    p.add_argument("--length-bound", type=int, required=True)
    p.add_argument("--degree-bound", type=int, default=None)

    m = sub.add_parser("com", parents=[common])
    ms = m.add_subparsers(dest="action", required=True)
    p = ms.add_parser("verify", parents=[common])
    p.add_argument("--witness", required=True)
    p = ms.add_parser("from-sse", parents=[common])
    p.add_argument("--E", required=True)
    p.add_argument("--F", required=True)
    p.add_argument("--R", required=True)
    p.add_argument("--S", required=True)
    p = ms.add_parser("chain", parents=[common])
    p.add_argument("--w1", required=True)
    p.add_argument("--w2", required=True)

    return parser


_HANDLERS = {
    "graph": _graph_handler,
    "se": _se_handler,
    "sse": _sse_handler,
    "lpa": _lpa_handler,
    "conj": _conj_handler,
    "bridge": _bridge_handler,
    "com": _com_handler,
}


def _run(argv) -> tuple[int, dict, argparse.Namespace]:
    parser = _build_parser()
    args = parser.parse_args(argv)
    inputs: dict = {}
    report = {"command": ["lpabridge"] + list(argv), "inputs": inputs, "counterexamples": []}
    start = time.monotonic()
    try:
        fld = _resolve_field(args)
        verdict, counterexamples, result = _HANDLERS[args.command](args, inputs, fld)
        report["verdict"] = verdict
        report["counterexamples"] = counterexamples
        report["result"] = result
    except (
        _InputError,
        FormatError,
        FieldError,
        GraphError,
        LpaError,
        BimoduleError,
        BridgeError,
        ComError,
    ) as exc:
        report["verdict"] = "error"
        report["message"] = str(exc)
    report["timing_ms"] = round((time.monotonic() - start) * 1000.0, 3)
    return _EXIT[report["verdict"]], report, args


def run(argv) -> tuple[int, dict]:
    """Parse and execute one command; return (exit code, report object)."""
    code, report, _ = _run(argv)
    return code, report


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        code, report, args = _run(argv)
    except SystemExit as exc:  # argparse errors are input errors
        return 3 if exc.code not in (0, None) else 0
    print(_render(report, args.output == "json", args.timing))
    return code


if __name__ == "__main__":
    sys.exit(main())
