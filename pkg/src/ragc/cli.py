"""Command-line front end: compress, decompress, stats and bench.

Exit codes: 0 ok, 1 usage, 2 I/O, 3 corrupt input.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import statistics
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .container import (
    ALGO_NAMES,
    ENCODINGS,
    compress_grammar,
    decompress,
    encode_grammar,
    encodings_for,
    grammar_stats,
    stats,
)
from .constructors import ALGOS
from .errors import CorruptStreamError, InvariantError, RagcError, UsageError
from .pge import DEFAULT_EPSILON

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CORRUPT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _stats_line(s) -> str:
    return (
        f"{s.algo}/{s.encoding}: n={s.n} sigma={s.sigma} d={s.d} rules={s.rules_length} "
        f"tau={s.tau_len} size={s.size} bytes={s.encoded_bytes} ratio={s.ratio:.3f}%"
    )


def cmd_compress(args) -> int:
    data = Path(args.input).read_bytes()
    if args.encoding == "pairpge" and args.algo != "repair":
        raise UsageError(
            "pairpge needs pair rules and cannot be applied to MR-RePair or RL-MR-RePair; "
            "use --algo repair or another encoding"
        )
    g = compress_grammar(data, args.algo)
    blob = encode_grammar(g, args.algo, args.encoding, args.epsilon, len(data))
    out = args.output or args.input + ".ragc"
    Path(out).write_bytes(blob)
    print(_stats_line(grammar_stats(g, args.algo, args.encoding, len(data), blob)))
    return EXIT_OK


def cmd_decompress(args) -> int:
    blob = Path(args.input).read_bytes()
    data = decompress(blob)
    out = args.output
    if out is None:
        out = args.input[: -len(".ragc")] if args.input.endswith(".ragc") else args.input + ".out"
    Path(out).write_bytes(data)
    return EXIT_OK


def cmd_stats(args) -> int:
    s = stats(Path(args.input).read_bytes(), args.algo, args.encoding, args.epsilon)
    if args.json:
        print(json.dumps(s.as_dict()))
    else:
        print(_stats_line(s))
    return EXIT_OK


# -- bench ------------------------------------------------------------------------


def _timed(fn, reps: int):
    times, result = [], None
    for _ in range(reps):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return result, statistics.median(times)


def _external(data: bytes) -> dict:
    out = {}
    for tool in ("gzip", "bzip2"):
        if shutil.which(tool) is None:
            continue
        t0 = time.perf_counter()
        packed = subprocess.run([tool, "-9", "-c"], input=data, capture_output=True, check=True).stdout
        out[tool] = {
            "encoded_bytes": len(packed),
            "ratio": 100.0 * len(packed) / len(data) if data else 0.0,
            "seconds": time.perf_counter() - t0,
        }
    return out


def bench_file(path: str, algos: list[str], encodings: list[str], reps: int, epsilon: int, external: bool) -> dict:
    """All (algo, encoding) cells for one file; each cell is round-trip verified."""
    entry = {"file": path, "cells": [], "errors": []}
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        entry["errors"].append(f"read failed: {exc}")
        return entry
    entry["n"] = len(data)
    for algo in algos:
        try:
            g, t_construct = _timed(lambda: compress_grammar(data, algo), reps)
        except RagcError as exc:
            entry["errors"].append(f"{algo}: {exc}")
            continue
        for enc in encodings:
            if enc not in encodings_for(algo):
                continue
            try:
                blob, t_encode = _timed(lambda: encode_grammar(g, algo, enc, epsilon, len(data)), reps)
                if decompress(blob) != data:
                    raise InvariantError("round trip mismatch")
            except RagcError as exc:
                entry["errors"].append(f"{algo}/{enc}: {exc}")
                continue
            cell = grammar_stats(g, algo, enc, len(data), blob).as_dict()
            cell.update(construct_seconds=t_construct, encode_seconds=t_encode, verified=True)
            entry["cells"].append(cell)
    if external:
        entry["external"] = _external(data)
    return entry


def _table(report: dict) -> str:
    head = f"{'file':<24} {'algo':<7} {'encoding':<11} {'d':>9} {'rules':>10} {'tau':>9} {'size':>10} {'bytes':>11} {'ratio%':>8} {'build s':>8} {'enc s':>7}"
    lines = [head, "-" * len(head)]
    for entry in report["files"]:
        name = Path(entry["file"]).name[:24]
        for c in entry["cells"]:
            lines.append(
                f"{name:<24} {c['algo']:<7} {c['encoding']:<11} {c['d']:>9} {c['rules_length']:>10} "
                f"{c['tau_len']:>9} {c['size']:>10} {c['encoded_bytes']:>11} {c['ratio']:>8.3f} "
                f"{c['construct_seconds']:>8.3f} {c['encode_seconds']:>7.3f}"
            )
        for tool, e in entry.get("external", {}).items():
            lines.append(f"{name:<24} {tool:<7} {'-':<11} {'':>9} {'':>10} {'':>9} {'':>10} {e['encoded_bytes']:>11} {e['ratio']:>8.3f}")
        for err in entry["errors"]:
            lines.append(f"{name:<24} ERROR {err}")
    return "\n".join(lines)


def _split(value: str, allowed, kind: str) -> list[str]:
    items = [v.strip() for v in value.split(",") if v.strip()]
    for v in items:
        if v not in allowed:
            raise UsageError(f"unknown {kind} {v!r}; choose from {', '.join(allowed)}")
    return items


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise FileNotFoundError(f"corpus directory {corpus} not found")
    algos = _split(args.algos, ALGOS, "algorithm")
    encodings = _split(args.encodings, ENCODINGS, "encoding")
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    files = sorted(str(p) for p in corpus.iterdir() if p.is_file())
    workers = max(1, min(int(os.environ.get("RAGC_THREADS", "1") or 1), len(files) or 1))
    job = (algos, encodings, args.reps, args.epsilon, args.external)
    if workers == 1:
        entries = [bench_file(f, *job) for f in files]
    else:
        with ProcessPoolExecutor(workers) as pool:
            entries = list(pool.map(bench_file, files, *[[j] * len(files) for j in job]))
    report = {
        "algos": algos,
        "encodings": encodings,
        "reps": args.reps,
        "epsilon": args.epsilon,
        "note": "encoded sizes include the container header",
        "files": entries,
    }
    print(_table(report))
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ragc", description="Grammar compression with RePair, MR-RePair and RL-MR-RePair.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def codec_opts(sp, default_enc="poppt-pge"):
        sp.add_argument("--algo", choices=list(ALGO_NAMES.values()), default="rlmr")
        sp.add_argument("--encoding", choices=list(ENCODINGS), default=default_enc)
        sp.add_argument("--epsilon", type=int, default=DEFAULT_EPSILON, help="PGE block size")

    c = sub.add_parser("compress", help="write a .ragc container")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    codec_opts(c)
    c.set_defaults(func=cmd_compress)

    d = sub.add_parser("decompress", help="restore the original bytes")
    d.add_argument("input")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_decompress)

    s = sub.add_parser("stats", help="grammar statistics for a container or a raw file")
    s.add_argument("input")
    s.add_argument("--json", action="store_true")
    codec_opts(s)
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("bench", help="every algorithm x encoding over a corpus directory")
    b.add_argument("--corpus", required=True)
    b.add_argument("--algos", default=",".join(ALGOS))
    b.add_argument("--encodings", default=",".join(ENCODINGS))
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--epsilon", type=int, default=DEFAULT_EPSILON)
    b.add_argument("--report", help="write the JSON report here")
    b.add_argument("--external", action="store_true", help="also run gzip/bzip2 when installed")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ragc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorruptStreamError as exc:
        print(f"ragc: corrupt input: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except OSError as exc:
        print(f"ragc: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
