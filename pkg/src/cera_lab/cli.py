"""``cera-lab`` command line: code tables, decode demos and metric sweeps."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import warnings
from pathlib import Path
from typing import Sequence

from .analytics import MetricsRow
from .code_core import format_word
from .hypergraph import build_hypergraph, decode, observe
from .optcera import MULTIPREAMBLE, OPTCERA, build_code, code_table
from .simulator import MODES, GridWarning, SweepSpec, sweep

log = logging.getLogger("cera_lab")

SCHEMES = (OPTCERA, MULTIPREAMBLE)


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"1..8"`` -> ``[1, ..., 8]``; a bare integer is a one-element range."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_schemes(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in SCHEMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown scheme(s) {bad}; choose from {SCHEMES}")
    return names


def read_config(path: str) -> dict[str, str]:
    """Read ``key=value`` lines; ``#`` starts a comment."""
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


# dest name -> converter for config-file values
_CONFIG_KEYS = {
    "scheme": parse_schemes,
    "n": int,
    "q": int,
    "k_range": parse_range,
    "a_range": parse_range,
    "K": parse_int_list,
    "R": int,
    "iters": int,
    "seed": int,
    "mode": str,
    "out": str,
    "gnuplot": str,
}


def format_csv(rows: Sequence[MetricsRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = MetricsRow.columns()
    writer.writerow(cols)
    for row in rows:
        writer.writerow(["" if getattr(row, c) is None else _cell(getattr(row, c)) for c in cols])
    return buf.getvalue()


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_gnuplot(rows: Sequence[MetricsRow]) -> str:
    """One data block per K, blocks separated by two blank lines (gnuplot ``index``)."""
    blocks = []
    for K in sorted({r.K for r in rows}):
        lines = [f"# K={K}", "# scheme M method P_S E_V eta"]
        for r in rows:
            if r.K == K:
                lines.append(f"{r.scheme} {r.M} {r.method} {r.P_S!r} {r.E_V!r} {r.eta!r}")
        blocks.append("\n".join(lines))
    return "\n\n\n".join(blocks) + "\n"


def cmd_code_table(args) -> int:
    try:
        text = code_table(args.n, args.q, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(text)
    return 0


def _demo_code(args):
    size = args.k if args.scheme == OPTCERA else args.a
    if size is None:
        raise UsageError(f"--{'k' if args.scheme == OPTCERA else 'a'} is required for {args.scheme}")
    try:
        return build_code(args.scheme, args.n, args.q, size)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_decode_demo(args) -> int:
    code = _demo_code(args)
    try:
        y = observe(code, args.indices)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    valid = decode(build_hypergraph(code), y)
    out = sys.stdout
    out.write(f"scheme {code.scheme} n={code.n} q={code.q} M={code.M}\n")
    sent = sorted(set(args.indices))
    out.write("transmitted: " + ", ".join(f"{t}:{format_word(code.words[t], code.q)}" for t in sent) + "\n")
    for i, ys in enumerate(y.per_subframe, 1):
        out.write(f"Y_{i} = {{{', '.join(str(s) for s in sorted(ys))}}}\n")
    out.write("valid: " + ", ".join(f"{t}:{format_word(code.words[t], code.q)}" for t in valid) + "\n")
    out.write(f"{len(sent)} transmitted, {len(valid)} valid\n")
    return 0


def cmd_sweep(args) -> int:
    size_params = {}
    for scheme in args.scheme:
        size_params[scheme] = args.k_range if scheme == OPTCERA else args.a_range
    try:
        spec = SweepSpec(
            size_params=size_params,
            K_values=args.K,
            n=args.n,
            q=args.q,
            R=args.R,
            iterations=args.iters,
            seed=args.seed,
            mode=args.mode,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GridWarning)
        rows = sweep(spec)
    notes = [str(w.message) for w in caught if issubclass(w.category, GridWarning)]
    for note in notes:
        log.warning("%s", note)

    text = format_csv(rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        _write(args.out, text)
        if notes:
            _write(args.out + ".warnings", "\n".join(notes) + "\n")
    if args.gnuplot:
        _write(args.gnuplot, format_gnuplot(rows))
    return 0


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cera-lab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code-table", help="list an (n,q,k)-OptCeRA code next to its q-ary indices")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.set_defaults(func=cmd_code_table)

    p = sub.add_parser("decode-demo", help="decode the superframe produced by given codeword indices")
    p.add_argument("--scheme", choices=SCHEMES, default=OPTCERA)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--k", type=int, default=None, help="OptCeRA size factor (M = k*q)")
    p.add_argument("--a", type=int, default=None, help="multipreamble preambles used (M = a^n)")
    p.add_argument("indices", type=int, nargs="+", help="transmitted codeword indices")
    p.set_defaults(func=cmd_decode_demo)

    p = sub.add_parser("sweep", help="analytical and/or simulated metrics over a grid, as CSV")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--scheme", type=parse_schemes, default=list(SCHEMES),
                   help="comma-separated subset of optcera,multipreamble")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=int, default=64)
    p.add_argument("--k-range", type=parse_range, default=parse_range("1..8"))
    p.add_argument("--a-range", type=parse_range, default=parse_range("8..23"))
    p.add_argument("--K", type=parse_int_list, default=[50, 100, 150, 200])
    p.add_argument("--R", type=int, default=100)
    p.add_argument("--iters", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="both")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--gnuplot", default=None, help="also write gnuplot data blocks here")
    p.set_defaults(func=cmd_sweep, _sweep_parser=p)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv, args):
    cfg = read_config(args.config)
    defaults = {}
    for key, raw in cfg.items():
        if key not in _CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}")
        try:
            defaults[key] = _CONFIG_KEYS[key](raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from exc
    args._sweep_parser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if getattr(args, "config", None):
            args = _apply_config(parser, argv, args)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cera-lab: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cera-lab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
