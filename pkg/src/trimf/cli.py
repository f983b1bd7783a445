"""Command line entry point: `trimf <command> ...`.

Exit codes: 0 pass, 1 verification failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .ar import ARVertex, QuiverError, export_quiver, quiver
from .covers import (
    DomesticBundleId,
    InvalidBundle,
    domestic_cover,
    domestic_hull,
    domestic_stats,
    find_extension_data,
    orbit_names,
)
from .frame import (
    FrameError,
    build_frame,
    mf_domestic,
    mf_rank2_general,
    mf_rank2_symmetric,
    search_specialization,
)
from .gmf import (
    MatrixFactorization,
    UnsupportedCharacteristic,
    endomorphism_algebra,
    is_indecomposable,
    is_reduced,
    is_symmetric,
    verify,
)
from .lgroup import WeightTriple, normalize
from .poly import QQ, Field

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---- argument helpers ------------------------------------------------------------

def _weights(text: str) -> WeightTriple:
    try:
        return WeightTriple.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _field(text: str) -> Field:
    try:
        return Field.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _bundle(w: WeightTriple, text: str) -> DomesticBundleId:
    try:
        return DomesticBundleId.parse(w, text)
    except (InvalidBundle, ValueError) as e:
        valid = ", ".join(orbit_names(w)) if w.is_domestic() else "none"
        msg = str(e)
        if "valid names" not in msg:
            msg += f" (valid names for {w}: {valid})"
        raise UsageError(msg) from None


def _jobs(n: int | None) -> int:
    env = os.environ.get("TRIMF_JOBS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"TRIMF_JOBS must be an integer, got {env!r}") from None
    return max(1, n or 1)


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _mf_text(mf: MatrixFactorization) -> str:
    lines = [f"{mf.name or 'factorization'} over {mf.field.name}, weights {mf.w}, "
             f"size {mf.size}"]
    lines.append("rows: " + ", ".join(str(z) for z in mf.p0))
    lines.append("cols: " + ", ".join(str(y) for y in mf.p1))
    lines.append("u =")
    lines.append(mf.u.text())
    if mf.w.p1 != 2 or not is_symmetric(mf):
        lines.append("v =")
        lines.append(mf.v.text())
    return "\n".join(lines) + "\n"


def _emit_mf(args, mf: MatrixFactorization):
    if args.format == "text":
        _emit(args, _mf_text(mf))
    else:
        _emit(args, _dump(mf.to_json()))


# ---- commands --------------------------------------------------------------------

def _run_one(key: str, fields, data_dir):
    # worker side: the data directory must be visible before any resource is read
    if data_dir:
        os.environ["TRIMF_DATA_DIR"] = data_dir
    from .checks import run_check
    return run_check(key, fields).to_json()


def cmd_verify_paper(args) -> int:
    from .checks import CHECKS
    from .resources import digests, load_json
    if args.data_dir:
        if not os.path.isdir(args.data_dir):
            raise UsageError(f"--data-dir {args.data_dir!r} is not a directory")
        os.environ["TRIMF_DATA_DIR"] = args.data_dir
        load_json.cache_clear()
    fields = [f.strip() for f in args.fields.split(",") if f.strip()]
    for f in fields:
        _field(f)
    keys = [c.key for c in CHECKS]
    if args.only:
        want = [k.strip().upper() for k in args.only.split(",")]
        bad = [k for k in want if k not in keys]
        if bad:
            raise UsageError(f"unknown check(s) {', '.join(bad)}; valid: {', '.join(keys)}")
        keys = [k for k in keys if k in want]
    jobs = _jobs(args.jobs)
    t0 = time.perf_counter()
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(keys))) as ex:
            futs = [ex.submit(_run_one, k, fields, args.data_dir) for k in keys]
            for k, fut in zip(keys, futs):
                results.append(_guard(k, fut.result))
    else:
        for k in keys:
            results.append(_guard(k, lambda k=k: _run_one(k, fields, args.data_dir)))
    passed = all(r["passed"] for r in results)
    report = {"version": __version__, "fields": fields, "jobs": jobs, "passed": passed,
              "seconds": round(time.perf_counter() - t0, 3), "data": digests(),
              "checks": results}
    if args.format == "json":
        _emit(args, _dump(report))
        for r in results:
            print(_line(r), file=sys.stderr)
    else:
        _emit(args, "".join(_line(r) + "\n" for r in results)
              + f"{'PASS' if passed else 'FAIL'}: {sum(r['passed'] for r in results)}"
                f"/{len(results)} checks\n")
    return EXIT_PASS if passed else EXIT_FAIL


def _guard(key, call) -> dict:
    try:
        return call()
    except Exception as e:          # a broken data file must show up in the report
        return {"key": key, "title": "", "passed": False, "correct": False, "seconds": 0.0,
                "budget": None, "detail": f"error: {type(e).__name__}: {e}", "findings": [],
                "failures": [f"{type(e).__name__}: {e}"]}


def _line(r: dict) -> str:
    s = f"[{'PASS' if r['passed'] else 'FAIL'}] {r['key']} {r['title']}: {r['detail']} " \
        f"[{r['seconds']:.2f}s]"
    if r["failures"]:
        s += "\n    " + "\n    ".join(r["failures"][:5])
    return s


def cmd_mf(args) -> int:
    bid = _bundle(args.weights, args.bundle)
    mf = mf_domestic(bid, args.field, alternate=args.alternate, verbatim=args.verbatim)
    _emit_mf(args, mf)
    return EXIT_PASS if verify(mf).passed else EXIT_FAIL


def cmd_cover(args) -> int:
    bid = _bundle(args.weights, args.bundle)
    cov, hull = domestic_cover(bid), domestic_hull(bid)
    st = domestic_stats(bid)
    doc = {"weights": args.weights.to_json(), "bundle": str(bid), "rank": bid.rank,
           "cover": [str(s) for s in cov], "hull": [str(s) for s in hull],
           "stats": st.to_json(),
           "extension_data": [{"L": str(e.L), "x": str(e.x)} for e in find_extension_data(cov)]}
    if args.format == "text":
        _emit(args, f"{bid} rank {bid.rank}, degree {st.degree}, slope {st.slope}\n"
                    f"pc: {' + '.join(f'O({s})' for s in cov)}\n"
                    f"ih: {' + '.join(f'O({s})' for s in hull)}\n")
    else:
        _emit(args, _dump(doc))
    return EXIT_PASS


def cmd_frame(args) -> int:
    fr = build_frame(domestic_cover(_bundle(args.weights, args.bundle)), name=args.bundle)
    if args.format == "text":
        _emit(args, fr.text("u") + "\n")
    else:
        _emit(args, _dump(fr.to_json()))
    return EXIT_PASS


def _scalars(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise UsageError(f"--scalars must be comma-separated integers, got {text!r}") from None


def cmd_specialize(args) -> int:
    fr = build_frame(domestic_cover(_bundle(args.weights, args.bundle)), name=args.bundle)
    res = search_specialization(fr, _scalars(args.scalars), symmetric=args.symmetric or None,
                                limit=args.limit or None, field=args.field,
                                jobs=_jobs(args.jobs))
    doc = {"bundle": args.bundle, "weights": args.weights.to_json(), "found": len(res),
           "truncated": res.truncated, "nodes": res.nodes,
           "solutions": [{"factorization": mf.to_json(),
                          "indecomposable": _indec(mf)} for mf in res.solutions]}
    if args.format == "text":
        _emit(args, f"{len(res)} specialization(s), {res.nodes} nodes"
                    f"{', truncated' if res.truncated else ''}\n"
                    + "".join(f"--- {i}\n{mf.u.text()}\n" for i, mf in enumerate(res.solutions)))
    else:
        _emit(args, _dump(doc))
    return EXIT_PASS if res.solutions else EXIT_FAIL


def _indec(mf) -> bool | None:
    try:
        return is_indecomposable(mf)
    except UnsupportedCharacteristic:
        return None


def cmd_rank2(args) -> int:
    w = args.weights
    try:
        ls = [int(s) for s in args.x.split(",")]
        if len(ls) != 3:
            raise ValueError
    except ValueError:
        raise UsageError(f"--x wants l1,l2,l3, got {args.x!r}") from None
    x = normalize(w, (*ls, 0))
    try:
        mf = (mf_rank2_symmetric if args.symmetric else mf_rank2_general)(w, x, args.field)
    except (FrameError, InvalidBundle, ValueError) as e:
        raise UsageError(str(e)) from None
    _emit_mf(args, mf)
    return EXIT_PASS if verify(mf).passed else EXIT_FAIL


def _window_arg(text: str):
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return int(lo), int(hi)
        return int(text)
    except ValueError:
        raise UsageError(f"--window wants N or LO:HI, got {text!r}") from None


def cmd_quiver(args) -> int:
    try:
        q = quiver(args.weights)
        if args.vertex:
            v = ARVertex.from_json(args.vertex)
            mf, y = q.mf_for_vertex(v, args.field)
            doc = {"vertex": q._vertex_json(v), "label_shift": str(y),
                   "factorization": mf.to_json()}
            _emit(args, _dump(doc))
            return EXIT_PASS
        out = export_quiver(args.weights, _window_arg(args.window), args.format)
    except (QuiverError, InvalidBundle) as e:
        raise UsageError(str(e)) from None
    _emit(args, out if isinstance(out, str) else _dump(out))
    return EXIT_PASS


def _parse_error(path: str, e: json.JSONDecodeError) -> str:
    return f"{path}:{e.lineno}:{e.colno}: {e.msg}"


def cmd_check(args) -> int:
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(_parse_error(args.file, e)) from None
    if isinstance(obj, dict) and "factorization" in obj:
        obj = obj["factorization"]
    try:
        mf = MatrixFactorization.from_json(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{args.file}: not a factorization: {type(e).__name__}: {e}") from None
    rep = verify(mf)
    doc = {"file": args.file, "weights": mf.w.to_json(), "field": mf.field.name,
           "size": mf.size, "verification": rep.to_json(), "reduced": is_reduced(mf),
           "symmetric": is_symmetric(mf) if mf.w.p1 == 2 else None}
    if rep.passed:
        try:
            A = endomorphism_algebra(mf)
            doc["end_dim"] = A.dim
            doc["indecomposable"] = is_indecomposable(mf, A)
        except UnsupportedCharacteristic as e:
            doc["indecomposable"] = None
            doc["note"] = str(e)
            lifted = mf.to_field(QQ)
            if verify(lifted).passed:
                doc["indecomposable_over_Q"] = is_indecomposable(lifted)
                doc["note"] += "; verified over Q; coefficient matrix reduces mod p"
    if args.format == "text":
        lines = [f"{args.file}: {rep.summary()}", f"reduced: {doc['reduced']}",
                 f"symmetric: {doc['symmetric']}"]
        if "indecomposable" in doc:
            lines.append(f"indecomposable: {doc['indecomposable']}")
        if "note" in doc:
            lines.append("note: " + doc["note"])
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, _dump(doc))
    return EXIT_PASS if rep.passed else EXIT_FAIL


# ---- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trimf", description="Graded matrix factorizations of "
                                "x^a + y^b + z^c and vector bundles on weighted projective lines.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json", "text"), weights=True, field=True):
        if weights:
            sp.add_argument("--weights", type=_weights, required=True, metavar="A,B,C")
        if field:
            sp.add_argument("--field", type=_field, default=QQ, metavar="q|fP")
        sp.add_argument("--format", choices=fmt, default=fmt[0])
        sp.add_argument("--out", metavar="PATH")

    sp = sub.add_parser("verify-paper", help="run every acceptance check")
    sp.add_argument("--fields", default="q,f2,f3,f5,f7", help="fields for the C1 matrix check")
    sp.add_argument("--only", metavar="C1,C2,...", help="run a subset of the checks")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes (TRIMF_JOBS overrides)")
    sp.add_argument("--data-dir", metavar="DIR", help="read data files from DIR first")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--out", metavar="PATH")
    sp.set_defaults(run=cmd_verify_paper)

    sp = sub.add_parser("mf", help="matrix factorization of a domestic bundle")
    common(sp)
    sp.add_argument("--bundle", required=True, metavar="NAME[@tau=K][+X]")
    sp.add_argument("--alternate", action="store_true", help="the second matrix, where stored")
    sp.add_argument("--verbatim", action="store_true", help="skip recorded errata")
    sp.set_defaults(run=cmd_mf)

    sp = sub.add_parser("cover", help="projective cover, injective hull and stats")
    common(sp, field=False)
    sp.add_argument("--bundle", required=True)
    sp.set_defaults(run=cmd_cover)

    sp = sub.add_parser("frame", help="factorization frame of a bundle")
    common(sp, field=False)
    sp.add_argument("--bundle", required=True)
    sp.set_defaults(run=cmd_frame)

    sp = sub.add_parser("specialize", help="search scalar specializations of a frame")
    common(sp)
    sp.add_argument("--bundle", required=True)
    sp.add_argument("--scalars", default="0,1,-1")
    sp.add_argument("--symmetric", action="store_true")
    sp.add_argument("--limit", type=int, default=50, help="0 for no limit")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(run=cmd_specialize)

    sp = sub.add_parser("rank2", help="rank-2 factorization for an extension bundle")
    common(sp)
    sp.add_argument("--x", required=True, metavar="L1,L2,L3")
    sp.add_argument("--symmetric", action="store_true")
    sp.set_defaults(run=cmd_rank2)

    sp = sub.add_parser("quiver", help="export the AR quiver")
    common(sp, fmt=("json", "dot"))
    sp.add_argument("--window", default="8", metavar="N|LO:HI")
    sp.add_argument("--vertex", metavar="ORBIT:K", help="factorization at one vertex instead")
    sp.set_defaults(run=cmd_quiver)

    sp = sub.add_parser("check", help="verify a factorization file")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--out", metavar="PATH")
    sp.set_defaults(run=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_PASS
    try:
        return args.run(args)
    except (UsageError, InvalidBundle, FrameError, QuiverError) as e:
        print(f"trimf: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

