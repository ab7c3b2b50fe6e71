"""Command line interface, tuple-file ingestion and delimited output."""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from nonconvex.constellation import (
    Constellation,
    ConstellationError,
    from_gaps,
    from_offsets,
    gap_histogram,
    is_admissible,
    is_counterexample,
    legacy_score,
    nonconvexity_score,
)
from nonconvex.pcoords import leading_term
from nonconvex.population import mertens_mu_threshold, sci, w_infinity_table
from nonconvex.primes import nth_prime, prime_gap_constellation, primes_between, primorial

DATA_ENV = "CONSTELLATION_DATA_DIR"
DEFAULT_DATASET = "eng459.tuples"


class TupleFileError(ValueError):
    pass


@dataclass
class TupleFile:
    path: str
    tuples: list[Constellation] = field(default_factory=list)
    admissible: list[bool] = field(default_factory=list)

    def __len__(self):
        return len(self.tuples)

    def __getitem__(self, i):
        return self.tuples[i]


def parse_tuple_text(text: str, path: str = "<text>") -> TupleFile:
    """One tuple per line; ``#`` comments; ``!gaps`` / ``!offsets`` switch modes."""
    out = TupleFile(path)
    mode = "offsets"
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("!"):
            if line not in ("!gaps", "!offsets"):
                raise TupleFileError(f"{path}:{lineno}: unknown directive {line!r}")
            mode = line[1:]
            continue
        try:
            values = [int(t) for t in line.replace(",", " ").split()]
            s = from_gaps(values) if mode == "gaps" else from_offsets(values)
        except (ValueError, ConstellationError) as exc:
            raise TupleFileError(f"{path}:{lineno}: {exc}") from None
        ok = is_admissible(s)
        if not ok:
            warnings.warn(f"{path}:{lineno}: tuple is not admissible", stacklevel=2)
        out.tuples.append(s)
        out.admissible.append(ok)
    return out


def parse_tuple_file(path: str | os.PathLike) -> TupleFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TupleFileError(f"cannot read {path}: {exc}") from None
    return parse_tuple_text(text, str(path))


def serialize_tuples(tuples: Iterable[Constellation]) -> str:
    return "".join(" ".join(map(str, s.offsets)) + "\n" for s in tuples)


def data_dir(explicit: str | None = None) -> Path:
    if explicit:
        return Path(explicit)
    if os.environ.get(DATA_ENV):
        return Path(os.environ[DATA_ENV])
    return Path(__file__).resolve().parents[2] / "data"


def resolve_path(name: str, explicit_dir: str | None = None) -> Path:
    p = Path(name)
    if p.exists():
        return p
    candidate = data_dir(explicit_dir) / p.name
    return candidate if candidate.exists() else p


def default_dataset(explicit_dir: str | None = None) -> Path:
    return data_dir(explicit_dir) / DEFAULT_DATASET


@dataclass(frozen=True)
class DeltaPhiSeries:
    """Piecewise-linear Phi(x) - x/mu; a unit rise at every offset past 0."""

    mu: float
    breakpoints: tuple[tuple[int, float], ...]

    def value(self, x: float) -> float:
        """Right-continuous value at x (after any rise at x)."""
        last_x, last_v = self.breakpoints[0]
        for bx, bv in self.breakpoints:
            if bx > x:
                return last_v - (x - last_x) / self.mu
            last_x, last_v = bx, bv
        return last_v - (x - last_x) / self.mu

    @property
    def rises(self) -> int:
        b = self.breakpoints
        return sum(1 for (x0, _), (x1, _) in zip(b, b[1:]) if x0 == x1)


def phi(s: Constellation, x: int) -> int:
    """Number of gaps of s that end at or before x."""
    return sum(1 for h in s.offsets[1:] if h <= x)


def delta_phi(s: Constellation, mu: float) -> DeltaPhiSeries:
    if mu <= 0:
        raise ValueError("mu must be positive")
    pts = [(0, 0.0)]
    for i, h in enumerate(s.offsets[1:], 1):
        pts.append((h, (i - 1) - h / mu))
        pts.append((h, i - h / mu))
    return DeltaPhiSeries(mu, tuple(pts))


def default_mu(J: int) -> float:
    """Mean gap of the first J primes counted from 0."""
    return nth_prime(J) / J


def emit_csv(header: Sequence[str], rows: Iterable[Sequence], path=None) -> str:
    """Write rows as CSV (to ``path`` when given) and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return text


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)


def series_rows(series: DeltaPhiSeries):
    return [(x, v) for x, v in series.breakpoints]


def _render(header, rows, fmt, out=None):
    rows = [[_fmt(v) for v in r] for r in rows]
    if fmt == "csv":
        text = emit_csv(header, rows)
    else:
        widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(header)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
        lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
        text = "\n".join(lines) + "\n"
    (out or sys.stdout).write(text)


def _term(c) -> str:
    m, p = leading_term(c)
    return f"{m}*{p}#"


def _load(args) -> TupleFile:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return parse_tuple_file(resolve_path(args.file, args.data_dir))


def _pick(args, tf: TupleFile) -> Constellation:
    if not 0 <= args.index < len(tf):
        raise IndexError(f"index {args.index} out of range (file has {len(tf)} tuples)")
    return tf[args.index]


def cmd_score(args):
    tf = _load(args)
    header = ["index", "length", "span", "score", "counterexample"]
    if args.legacy_score:
        header.append("legacy_score")
    rows = []
    for i, s in enumerate(tf.tuples):
        row = [i, s.length, s.span, nonconvexity_score(s), is_counterexample(s)]
        if args.legacy_score:
            row.append(legacy_score(s))
        rows.append(row)
    _render(header, rows, args.format)


def cmd_nu(args):
    s = _pick(args, _load(args))
    rows = [(q, s.nu(q), q - s.nu(q)) for q in primes_between(args.min_prime, args.max_prime)]
    _render(["prime", "nu", "admissible"], rows, args.format)


def cmd_evolve(args):
    from nonconvex.evolution import track_prefix

    s = _pick(args, _load(args))
    rows = []
    for r in track_prefix(s, args.max_stage, args.start_stage, args.budget):
        gamma = r.gamma0.anchored() if r.gamma0 is not None else ""
        rows.append([r.stage, r.count, "" if r.length is None else r.length, r.equals_target, gamma])
    _render(["stage", "count", "length", "equals_target", "gamma0"], rows, args.format)


def cmd_bfs(args):
    from nonconvex.search import bfs, load_checkpoint, save_checkpoint

    s = _pick(args, _load(args))
    frontier = None
    if args.checkpoint and Path(args.checkpoint).exists():
        frontier = load_checkpoint(args.checkpoint, s)
        print(f"# resumed at stage {frontier.stage}", file=sys.stderr)
    res = bfs(s, args.start, args.end, args.budget, args.threads, frontier=frontier)
    if args.checkpoint:
        save_checkpoint(res.frontier, args.checkpoint)
    rows = [(c.stage, c.admissible, c.count, sci(c.count, 4), c.materialized, c.truncated) for c in res.stages]
    _render(["stage", "admissible", "count", "count_sci", "materialized", "truncated"], rows, args.format)


def cmd_min_gamma(args):
    from nonconvex.search import min_gamma

    tf = _load(args)
    indices = range(len(tf)) if args.all else [args.index]
    rows = []
    best = None
    for i in indices:
        r = min_gamma(tf[i], args.end, args.budget, args.threads)
        m, p = leading_term(r.coords)
        rows.append([i, _term(r.coords), sci(m * primorial(p), 4), sci(r.value, 4), r.optimal, r.coords.to_text()])
        if best is None or r.value < best[1]:
            best = (i, r.value, r.coords)
    _render(["index", "leading", "leading_value", "gamma0", "optimal", "coords"], rows, args.format)
    if args.all and args.format == "text":
        print(f"global minimum: index {best[0]}, {_term(best[2])}, gamma0 ~ {sci(best[1], 4)}")


def cmd_winf(args):
    tf = _load(args)
    reports = w_infinity_table(tf.tuples)
    rows = [(i, *r.row(args.digits)) for i, r in enumerate(reports)]
    _render(["index", "factor1", "factor2", "w_infinity"], rows, args.format)
    if args.format == "text" and len(reports) > 1:
        ws = [r.w_infinity for r in reports]
        print(f"max/min = {float(max(ws) / min(ws)):.4g}")


def cmd_histogram(args):
    if args.primes:
        s = prime_gap_constellation(args.primes)
    else:
        s = _pick(args, _load(args))
    _render(["gap", "count"], gap_histogram(s).items(), args.format)


def cmd_deltaphi(args):
    s = _pick(args, _load(args))
    mu = args.mu if args.mu is not None else default_mu(s.length)
    series = delta_phi(s, mu)
    rows = series_rows(series)
    if args.out:
        emit_csv(["x", "delta_phi"], rows, args.out)
    else:
        _render(["x", "delta_phi"], rows, args.format)


def cmd_mertens(args):
    mant, exp = mertens_mu_threshold(args.mu)
    if args.format == "csv":
        _render(["mu", "p"], [(args.mu, f"{mant:.4f}E{exp}")], "csv")
    else:
        print(f"mean gap {args.mu:g} reached for p > {mant:.4f}E{exp}")


def _global_options(parser, suppress=False):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--data-dir", default=d, help=f"dataset directory (env {DATA_ENV})")
    parser.add_argument("--threads", type=int, default=d if suppress else 1)
    parser.add_argument("--format", choices=("text", "csv"), default=d if suppress else "text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonconvex", description="Narrow prime constellation toolkit")
    _global_options(parser)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("score", cmd_score, "length, span and nonconvexity score of every tuple")
    p.add_argument("file")
    p.add_argument("--legacy-score", action="store_true", help="also print k - pi(w)")

    p = add("nu", cmd_nu, "q - nu_q for one tuple")
    p.add_argument("file")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--max-prime", type=int, default=499)
    p.add_argument("--min-prime", type=int, default=2)

    p = add("evolve", cmd_evolve, "unique-prefix table across sieve stages")
    p.add_argument("file")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--max-stage", type=int, default=137)
    p.add_argument("--start-stage", type=int, default=11)
    p.add_argument("--budget", type=int, default=10_000_000)

    p = add("bfs", cmd_bfs, "breadth-first instance counts")
    p.add_argument("file")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--from", dest="start", type=int, default=11)
    p.add_argument("--to", dest="end", type=int, default=211)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--checkpoint")

    p = add("min-gamma", cmd_min_gamma, "smallest admissible instance")
    p.add_argument("file")
    p.add_argument("--to", dest="end", type=int, default=211)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--all", action="store_true")
    p.add_argument("--budget", type=int, default=10_000_000)

    p = add("winf", cmd_winf, "asymptotic relative populations")
    p.add_argument("file")
    p.add_argument("--digits", type=int, default=7)

    p = add("histogram", cmd_histogram, "gap histogram")
    p.add_argument("file", nargs="?")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--primes", type=int, help="use the first N prime gaps from 0 instead")

    p = add("deltaphi", cmd_deltaphi, "Delta-Phi breakpoint series")
    p.add_argument("file")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--mu", type=float)
    p.add_argument("--out", help="CSV output path")

    p = add("mertens", cmd_mertens, "p where the mean gap among survivors reaches mu")
    p.add_argument("--mu", type=float, required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "histogram" and not args.primes and not args.file:
        parser.error("histogram needs a file or --primes")
    try:
        args.func(args)
    except (ValueError, RuntimeError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
