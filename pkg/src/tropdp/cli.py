"""Command-line frontend.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error,
3 a scale, cap or width limit was hit.  Results go to stdout, diagnostics to
stderr.  Every randomized subcommand requires ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import compat, graphs, oracle, rects, repro
from .circuit import DEFAULT_CAP, Circuit, extract_polynomial
from .compile import FloydWarshallDag, compile_dst_pw, compile_held_karp, compile_is, compile_tsp_pw
from .errors import ScaleExceeded, VerificationFailure, WorkbenchError
from .poly import Polynomial, poly_equiv, separating_witness


class UsageError(Exception):
    pass


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _csv(rows: list[dict], fields: Sequence[str] | None = None) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(fields or rows[0]), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _read_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read JSON from {path}: {e}") from None


def _load_instance(path: str) -> tuple[graphs.GraphInstance, graphs.PathDecomposition | None]:
    data = _read_json(path)
    if "graph" in data:
        g = graphs.GraphInstance.from_dict(data["graph"])
        d = graphs.PathDecomposition.from_dict(data["decomposition"]) if data.get("decomposition") else None
        return g, d
    return graphs.GraphInstance.from_dict(data), None


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required here")


def _family_instance(args) -> tuple[graphs.GraphInstance, graphs.PathDecomposition]:
    fam = args.family
    if fam == "is":
        _require(args, "k")
        return graphs.gen_is_graph(args.k)
    if fam in graphs.GENERATORS:
        _require(args, "n", "k")
        return graphs.GENERATORS[fam](args.n, args.k)
    raise UsageError(f"--family must be one of is, {', '.join(graphs.GENERATORS)}")


# subcommands ----------------------------------------------------------------------


def cmd_gen(args) -> tuple[str, int]:
    g, d = _family_instance(args)
    if args.format == "dot":
        return g.to_dot(), 0
    if args.format == "csv":
        return _csv([{"tail": u, "head": v} for u, v in g.edges]), 0
    return _dump({"graph": g.to_dict(), "decomposition": d.to_dict()}), 0


def _compile(args) -> tuple[Circuit, dict | None]:
    target = args.target
    if target == "held-karp":
        if args.graph:
            g, _ = _load_instance(args.graph)
            return compile_held_karp(graph=g), None
        _require(args, "N")
        return compile_held_karp(args.N), None
    if target == "floyd-warshall":
        _require(args, "N", "source", "sink")
        return FloydWarshallDag(args.N).circuit(args.source, args.sink), None
    if args.graph:
        g, d = _load_instance(args.graph)
        if d is None:
            raise UsageError("--graph file has no decomposition")
    else:
        _require(args, "family")
        g, d = _family_instance(args)
    if target == "is":
        c, rep = compile_is(g, d, with_report=True)
    elif target in ("tsp", "dtsp"):
        c, rep = compile_tsp_pw(g, d, max_width=args.max_width or 5, with_report=True)
    elif target == "dst":
        c, rep = compile_dst_pw(g, d, max_width=args.max_width or 4, with_report=True)
    else:
        raise UsageError(f"unknown --target {target}")
    return c, rep.to_dict()


def cmd_compile(args) -> tuple[str, int]:
    c, rep = _compile(args)
    if args.stats:
        print(_dump(rep or {"gates": c.size()}), file=sys.stderr)
    if args.format == "dot":
        return c.to_dot(), 0
    return _dump(c.to_dict()), 0


def _load_circuit(path: str) -> Circuit:
    data = _read_json(path)
    try:
        return Circuit.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"--circuit {path}: not a circuit document ({type(e).__name__}: {e})") from None


def _parse_valuation(text: str) -> dict[str, int]:
    data = _read_json(text) if not text.lstrip().startswith("{") else json.loads(text)
    if not isinstance(data, dict) or not all(isinstance(v, int) for v in data.values()):
        raise UsageError("--valuation must map variable names to integers")
    return data


def cmd_eval(args) -> tuple[str, int]:
    c = _load_circuit(args.circuit)
    val = c.evaluate(_parse_valuation(args.valuation))
    if args.format == "csv":
        return f"value\n{val}", 0
    return _dump({"value": val}), 0


def cmd_extract(args) -> tuple[str, int]:
    p = extract_polynomial(_load_circuit(args.circuit), cap=args.cap)
    if args.format == "csv":
        return "monomial\n" + "\n".join(str(m) for m in p.sorted()), 0
    return _dump(p.to_dict()), 0


def cmd_equiv(args) -> tuple[str, int]:
    f = extract_polynomial(_load_circuit(args.circuit), cap=args.cap)
    if args.poly:
        g = Polynomial.from_dict(_read_json(args.poly))
    elif args.other:
        g = extract_polynomial(_load_circuit(args.other), cap=args.cap)
    else:
        raise UsageError("give --poly or --other")
    same = poly_equiv(f, g)
    out = {"equivalent": same}
    if not same:
        w = separating_witness(f, g)
        out["witness"] = str(w) if w is not None else None
    return _dump(out), 0 if same else 1


def cmd_decompose(args) -> tuple[str, int]:
    c = _load_circuit(args.circuit)
    if args.X:
        X = [x for x in args.X.split(";") if x]
    else:
        _require(args, "n", "k")
        X = rects.dtsp_xbar(args.n, args.k)
    rs = rects.decompose_balanced(c, X, cap=args.cap)
    chk = rects.check_decomposition(c, X, rs)
    rows = rects.rectangle_report_rows(rs, X)
    if args.format == "csv":
        return _csv(rows), 0 if chk.ok else 1
    body = chk.to_dict()
    body["rectangles_detail"] = [{"g": r.g.to_dict(), "h": r.h.to_dict(), "gate": r.gate} for r in rs]
    return _dump(body), 0 if chk.ok else 1


def cmd_matrix(args) -> tuple[str, int]:
    m = compat.build_matrix(args.k, args.variant)
    if args.format == "csv":
        labels = [str(p) for p in m.indices]
        lines = ["," + ",".join(labels)]
        for lab, row in zip(labels, m.to_lists()):
            lines.append(lab + "," + ",".join(map(str, row)))
        return "\n".join(lines), 0
    return _dump(m.to_dict()), 0


def cmd_cover(args) -> tuple[str, int]:
    m = compat.build_matrix(args.k, args.matrix)
    if args.mode == "exact":
        cov = compat.min_cover(m, args.budget)
    elif args.mode == "greedy":
        cov = compat.greedy_cover(m)
    else:
        _require(args, "seed")
        start = compat.max_rectangle(m)
        cov = compat.randomized_cover_from_rectangle(m, start, args.seed)
    if args.format == "csv":
        return _csv([{"rows": " ".join(map(str, r.rows)), "cols": " ".join(map(str, r.cols))} for r in cov.rectangles]), 0
    return compat.cover_to_json(m, cov), 0


def cmd_count(args) -> tuple[str, int]:
    val = graphs.count_formulas(args.family, args.n, args.k)
    out = {"family": args.family, "n": args.n, "k": args.k, "count": val}
    if args.enumerate:
        if args.family == "dtsp-cycles":
            g, _ = graphs.gen_dtsp_graph(args.n, args.k)
            out["enumerated"] = len(oracle.enumerate_ham_cycles(g))
        elif args.family == "dst-nice-cycles":
            out["enumerated"] = len(oracle.enumerate_nice_cycles(args.n, args.k))
        else:
            raise UsageError("--enumerate supports dtsp-cycles and dst-nice-cycles")
    code = 0 if out.get("enumerated", val) == val else 1
    if args.format == "csv":
        return _csv([out]), code
    if args.format == "text":
        return str(val), code
    return _dump(out), code


def cmd_sample(args) -> tuple[str, int]:
    _require(args, "seed")
    import random

    rng = random.Random(args.seed)
    cycles = [graphs.sample_nice_cycle(args.n, args.k, rng) for _ in range(args.samples)]
    if args.format == "csv":
        return _csv([{"sample": i, "cycle": " ".join(c)} for i, c in enumerate(cycles)]), 0
    return "\n".join(_dump(list(c)) for c in cycles), 0


def cmd_verify(args) -> tuple[str, int]:
    what = args.what
    if what == "decomposition":
        _require(args, "graph")
        g, d = _load_instance(args.graph)
        if args.decomposition:
            d = graphs.PathDecomposition.from_dict(_read_json(args.decomposition))
        if d is None:
            raise UsageError("no decomposition given (--decomposition or an instance file)")
        rep = graphs.verify_path_decomposition(g, d)
        return _dump(rep.to_dict()), 0 if rep.valid else 1
    if what == "cover":
        _require(args, "cover", "k")
        m = compat.build_matrix(args.k, args.matrix)
        data = _read_json(args.cover)
        rs = [compat.Rectangle.of(r["rows"], r["cols"]) for r in data["rectangles"]]
        ok, problems = compat.verify_cover(m, rs)
        return _dump({"valid": ok, "problems": problems[:20], "size": len(rs)}), 0 if ok else 1
    if what == "thinness":
        k = args.k or 2
        ex = rects.exhaustive_thin_check(k) if k == 2 else None
        out = {"k": k}
        if ex is not None:
            out["exhaustive"] = ex.to_dict()
        if args.samples:
            _require(args, "seed")
            out["sampled"] = rects.sample_thin_check(k, args.samples, args.seed).to_dict()
        bad = sum(part["violations"] for key, part in out.items() if key != "k")
        out["holds"] = bad == 0
        return _dump(out), 0 if bad == 0 else 1
    if what == "bounds":
        _require(args, "n", "k")
        ck = compat.min_cover(compat.build_matrix(args.k, "bipartite"), args.budget)
        if not ck.optimal:
            raise ScaleExceeded("SCALE_EXCEEDED", f"C_{args.k} not proven optimal within the budget")
        g, d = graphs.gen_dtsp_graph(args.n, args.k)
        c = compile_tsp_pw(g, d, max_width=args.max_width or 3 * args.k)
        rs = rects.decompose_balanced(c, rects.dtsp_xbar(args.n, args.k), cap=args.cap)
        reps = [rects.check_rectangle_bound_dtsp(r, args.n, args.k, ck.size) for r in rs]
        holds = all(r["holds"] for r in reps)
        if args.format == "csv":
            return _csv(reps, ["n", "k", "ck", "product_size", "bound", "slack", "holds"]), 0 if holds else 1
        return _dump({"holds": holds, "C_k": ck.size, "rectangles": reps}), 0 if holds else 1
    raise UsageError(f"unknown verify target {what}")


def cmd_repro(args) -> tuple[str, int]:
    ids = [int(x) for x in args.only.split(",")] if args.only else None
    results = repro.run_all(ids)
    for r in results:
        print(r.line(), file=sys.stderr)
    code = 0 if all(r.passed for r in results) else 1
    if args.format == "csv":
        rows = [{"id": r.id, "name": r.name, "passed": r.passed} for r in results]
        if args.timings:
            for row, r in zip(rows, results):
                row["seconds"] = round(r.seconds, 3)
        return _csv(rows), code
    body = repro.summary(results)
    if not args.timings:
        for row in body["criteria"]:
            row.pop("seconds")
    return _dump(body), code


def cmd_report(args) -> tuple[str, int]:
    _require(args, "seed")
    from .report import write_report

    out = args.out or "report"
    paths = write_report(out, args.seed, budget=args.budget)
    return "\n".join(str(p) for p in paths), 0


# parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropdp", description="Tropical circuit and rectangle-cover workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv")):
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--out", help="write primary output to this path instead of stdout")
        sp.add_argument("--seed", type=int, help="PRNG seed (required by randomized commands)")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="monomial slot cap for extraction")
        sp.add_argument("--budget", type=float, default=60.0, help="time budget in seconds for exact search")
        return sp

    sp = common(sub.add_parser("gen", help="generate a graph family with its path decomposition"), ("json", "dot", "csv"))
    sp.add_argument("--family", required=True, choices=["is", "dtsp", "tsp", "dst"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.set_defaults(func=cmd_gen)

    sp = common(sub.add_parser("compile", help="compile a DP to a tropical circuit"), ("json", "dot"))
    sp.add_argument("--target", required=True, choices=["is", "tsp", "dtsp", "dst", "held-karp", "floyd-warshall"])
    sp.add_argument("--graph", help="instance JSON (graph plus decomposition)")
    sp.add_argument("--family", choices=["is", "dtsp", "tsp", "dst"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--N", type=int, help="vertex count for held-karp / floyd-warshall")
    sp.add_argument("--source", type=int)
    sp.add_argument("--sink", type=int, help="target vertex for floyd-warshall")
    sp.add_argument("--max-width", type=int)
    sp.add_argument("--stats", action="store_true", help="also print the compilation report on stderr")
    sp.set_defaults(func=cmd_compile)

    sp = common(sub.add_parser("eval", help="evaluate a circuit on a valuation"))
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--valuation", required=True, help="JSON object or path to one")
    sp.set_defaults(func=cmd_eval)

    sp = common(sub.add_parser("extract", help="extract the polynomial of a circuit"))
    sp.add_argument("--circuit", required=True)
    sp.set_defaults(func=cmd_extract)

    sp = common(sub.add_parser("equiv", help="compare a circuit's polynomial with another"))
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--poly")
    sp.add_argument("--other")
    sp.set_defaults(func=cmd_equiv)

    sp = common(sub.add_parser("decompose", help="balanced rectangle decomposition of a circuit"))
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--X", help="semicolon-separated balance variables")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.set_defaults(func=cmd_decompose)

    sp = common(sub.add_parser("matrix", help="build a compatibility matrix"))
    sp.add_argument("--variant", choices=["bipartite", "clique"], default="bipartite")
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_matrix)

    sp = common(sub.add_parser("cover", help="rectangle cover of a compatibility matrix"))
    sp.add_argument("--matrix", choices=["bipartite", "clique"], default="bipartite")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", choices=["exact", "greedy", "randomized"], default="exact")
    sp.set_defaults(func=cmd_cover)

    sp = common(sub.add_parser("count", help="closed-form counts, optionally checked by enumeration"), ("json", "csv", "text"))
    sp.add_argument("--family", required=True, choices=list(graphs.FAMILIES))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--enumerate", action="store_true")
    sp.set_defaults(func=cmd_count)

    sp = common(sub.add_parser("sample", help="sample nice cycles of H_{n,k}"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--samples", type=int, default=1)
    sp.set_defaults(func=cmd_sample)

    sp = common(sub.add_parser("verify", help="check a certificate or a bound"))
    sp.add_argument("what", choices=["decomposition", "cover", "thinness", "bounds"])
    sp.add_argument("--graph")
    sp.add_argument("--decomposition")
    sp.add_argument("--cover")
    sp.add_argument("--matrix", choices=["bipartite", "clique"], default="bipartite")
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--max-width", type=int)
    sp.set_defaults(func=cmd_verify)

    sp = common(sub.add_parser("repro", help="run the acceptance checks and print a pass/fail table"))
    sp.add_argument("--only", help="comma-separated criterion ids")
    sp.add_argument("--timings", action="store_true", help="include wall-clock seconds in the output")
    sp.set_defaults(func=cmd_repro)

    sp = common(sub.add_parser("report", help="write CSV tables and PNG figures"))
    sp.set_defaults(func=cmd_report)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        text, code = args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except ScaleExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except VerificationFailure as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 1
    except WorkbenchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.command != "report" and args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
