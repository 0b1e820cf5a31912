"""Command-line front end.

    trieig solve matrix.txt [-o spectrum.csv] [--method auto|dqds-only|oracle]
    trieig gen clement 100 -o clement100.txt
    trieig bench --families clement,test5 --sizes 50,100 -o bench.csv
    trieig bench clement 100

Matrix files: line 1 holds n, then one line ``a_i b_i c_i`` per row with
b_i the subdiagonal entry below a_i and c_i the one to its right (both 0 on
the last row). Spectrum files are CSV with header ``re,im``.

Exit codes: 0 success, 2 bad input (usage, parse error, bad parameters),
3 solver hit its transform budget, 4 oracle did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from typing import Optional, TextIO

import numpy as np

from .driver import MaxIterations, SolverOptions, solve
from .oracle import NoConvergence, ehrlich_aberth, newton_residuals
from .representation import Tridiagonal
from .testmat import FAMILIES, TEST5_CENTERS, BadParams, cluster_counts, generate

__all__ = [
    "MatrixFileError",
    "read_matrix",
    "write_matrix",
    "write_spectrum",
    "read_spectrum",
    "cmd_solve",
    "cmd_gen",
    "cmd_bench",
    "main",
]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MAXIT = 3
EXIT_NOCONV = 4

METHODS = ("auto", "dqds-only", "oracle")
BENCH_REPEATS = 3


class MatrixFileError(ValueError):
    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def _fmt(x: float) -> str:
    # 17 significant digits round-trip every double; +0.0 folds away -0
    return "%.17g" % (float(x) + 0.0)


def _parse_real(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MatrixFileError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise MatrixFileError(f"non-finite value {tok!r}", lineno)
    return v


def parse_matrix(text: str) -> Tridiagonal:
    lines = text.splitlines()
    # trailing blank lines are tolerated, nothing else is
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MatrixFileError("empty file", 1)
    head = lines[0].split()
    if len(head) != 1:
        raise MatrixFileError("expected a single integer n", 1)
    try:
        n = int(head[0])
    except ValueError:
        raise MatrixFileError(f"n is not an integer: {head[0]!r}", 1) from None
    if n < 1:
        raise MatrixFileError(f"n must be >= 1, got {n}", 1)
    if len(lines) - 1 != n:
        raise MatrixFileError(f"expected {n} data lines, found {len(lines) - 1}", len(lines))
    rows = np.empty((n, 3))
    for i, line in enumerate(lines[1:]):
        lineno = i + 2
        toks = line.split()
        if len(toks) != 3:
            raise MatrixFileError(f"expected 3 values, found {len(toks)}", lineno)
        rows[i] = [_parse_real(t, lineno) for t in toks]
    if rows[-1, 1] != 0 or rows[-1, 2] != 0:
        raise MatrixFileError("last row must have b = c = 0", n + 1)
    return Tridiagonal(rows[:, 0], rows[:-1, 1], rows[:-1, 2])


def read_matrix(path: str) -> Tridiagonal:
    if path == "-":
        return parse_matrix(sys.stdin.read())
    with open(path) as fh:
        return parse_matrix(fh.read())


def format_matrix(C: Tridiagonal) -> str:
    b = np.append(C.b, 0.0)
    c = np.append(C.c, 0.0)
    out = [str(C.n)]
    out += [f"{_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in zip(C.a, b, c)]
    return "\n".join(out) + "\n"


def write_matrix(C: Tridiagonal, fh: TextIO) -> None:
    fh.write(format_matrix(C))


def write_spectrum(eigenvalues, fh: TextIO) -> None:
    ev = np.asarray(eigenvalues, dtype=complex)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    fh.write("re,im\n")
    for z in ev:
        fh.write(f"{_fmt(z.real)},{_fmt(z.imag)}\n")


def read_spectrum(fh: TextIO) -> np.ndarray:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != ["re", "im"]:
        raise ValueError(f"expected header re,im, got {header}")
    return np.array([complex(float(r), float(i)) for r, i in reader], dtype=complex)


def _open_out(path: Optional[str]):
    return open(path, "w", newline="") if path and path != "-" else None


def _solver_options(args) -> SolverOptions:
    kw = {"use_tridqds": args.method != "dqds-only"}
    if args.tol is not None:
        kw["tol"] = args.tol
    if args.growth is not None:
        kw["growth_threshold"] = args.growth
    if args.maxit_factor is not None:
        kw["maxit_factor"] = args.maxit_factor
    return SolverOptions(**kw)


def cmd_solve(args) -> int:
    try:
        C = read_matrix(args.input)
        opts = _solver_options(args)
    except (OSError, ValueError) as exc:
        print(f"trieig solve: {exc}", file=sys.stderr)
        return EXIT_INPUT

    t0 = time.perf_counter()
    try:
        if args.method == "oracle":
            spec = ehrlich_aberth(C, strict=True)
            stats = dict(spec.stats)
        else:
            spec = solve(C, opts)
            stats = spec.stats.as_dict()
    except MaxIterations as exc:
        print(f"trieig solve: {exc}", file=sys.stderr)
        return EXIT_MAXIT
    except NoConvergence as exc:
        print(f"trieig solve: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except ValueError as exc:
        print(f"trieig solve: {exc}", file=sys.stderr)
        return EXIT_INPUT
    stats.update(method=args.method, n=C.n, seconds=time.perf_counter() - t0)

    fh = _open_out(args.output)
    try:
        write_spectrum(spec.eigenvalues, fh or sys.stdout)
    finally:
        if fh:
            fh.close()
    print(json.dumps(stats), file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        C = generate(args.family, args.n, *args.params)
    except BadParams as exc:
        print(f"trieig gen: {exc}", file=sys.stderr)
        return EXIT_INPUT
    fh = _open_out(args.output)
    try:
        write_matrix(C, fh or sys.stdout)
    finally:
        if fh:
            fh.close()
    return EXIT_OK


BENCH_FIELDS = [
    "family",
    "n",
    "method",
    "seconds",
    "transforms",
    "rejections",
    "max_newton_residual",
    "sweeps",
    "clusters",
    "status",
]


def _timed(fn, repeats: int):
    best, out = math.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_case(family: str, n: int, method: str, repeats: int = BENCH_REPEATS) -> dict:
    """One bench row. Failures end up in ``status``, they never propagate."""
    row = dict.fromkeys(BENCH_FIELDS, "")
    row.update(family=family, n=n, method=method)
    try:
        C = generate(family, n)
        if method == "oracle":
            secs, spec = _timed(lambda: ehrlich_aberth(C, strict=True), repeats)
            row["sweeps"] = spec.stats["iterations"]
        else:
            opts = SolverOptions(use_tridqds=method != "dqds-only")
            secs, spec = _timed(lambda: solve(C, opts), repeats)
            row["transforms"] = spec.stats.transforms
            row["rejections"] = spec.stats.rejections
        ev = spec.eigenvalues
        row["seconds"] = f"{secs:.6f}"
        row["max_newton_residual"] = "%.3e" % float(np.max(newton_residuals(C, ev)))
        if family == "test5":
            row["clusters"] = ";".join(str(k) for k in cluster_counts(ev, TEST5_CENTERS))
        row["status"] = "ok"
    except Exception as exc:  # recorded in the row, the run goes on
        row["status"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_bench(args) -> int:
    families = [f for f in args.families.split(",") if f]
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError as exc:
        print(f"trieig bench: bad --sizes: {exc}", file=sys.stderr)
        return EXIT_INPUT
    # positional form: bench clement test5 50 100
    pos_f = [t for t in args.cases if not t.lstrip("-").isdigit()]
    pos_n = [int(t) for t in args.cases if t.lstrip("-").isdigit()]
    families = pos_f or families
    sizes = pos_n or sizes
    unknown = sorted(set(families) - set(FAMILIES))
    if unknown:
        print(f"trieig bench: unknown families {unknown}", file=sys.stderr)
        return EXIT_INPUT
    methods = [m for m in args.methods.split(",") if m]
    if set(methods) - set(METHODS):
        print(f"trieig bench: methods must be from {METHODS}", file=sys.stderr)
        return EXIT_INPUT

    # compile the kernels before anything is timed
    solve(generate("clement", 8))

    fh = _open_out(args.output)
    try:
        w = csv.DictWriter(fh or sys.stdout, fieldnames=BENCH_FIELDS, lineterminator="\n")
        w.writeheader()
        for fam in families:
            for n in sizes:
                for m in methods:
                    row = bench_case(fam, n, m, args.repeats)
                    w.writerow(row)
                    if row["status"] != "ok":
                        log.warning("%s n=%d %s: %s", fam, n, m, row["status"])
    finally:
        if fh:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trieig", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="eigenvalues of a matrix file")
    s.add_argument("input", help="matrix file ('-' for stdin)")
    s.add_argument("-o", "--output", help="spectrum CSV (default stdout)")
    s.add_argument("--tol", type=float, help="deflation/splitting tolerance (default machine eps)")
    s.add_argument("--growth", type=float, help="element growth rejection threshold (default 1000)")
    s.add_argument("--maxit-factor", type=int, help="transform budget per unit of n (default 30)")
    s.add_argument("--method", choices=METHODS, default="auto")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="write a test matrix file")
    g.add_argument("family", choices=sorted(FAMILIES))
    g.add_argument("n", type=int)
    g.add_argument("params", nargs="*", type=float, help="bessel only: a b")
    g.add_argument("-o", "--output", help="matrix file (default stdout)")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="timing and accuracy table as CSV")
    b.add_argument("cases", nargs="*", help="families and sizes, e.g. 'clement test5 50 100'")
    b.add_argument("--families", default=",".join(sorted(FAMILIES)), help="comma separated")
    b.add_argument("--sizes", default="50", help="comma separated")
    b.add_argument("--methods", default="auto,oracle", help="comma separated subset of " + ",".join(METHODS))
    b.add_argument("--repeats", type=int, default=BENCH_REPEATS, help="timing repetitions, the minimum is kept")
    b.add_argument("-o", "--output", help="CSV file (default stdout)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
