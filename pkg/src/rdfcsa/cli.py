"""Command-line front end.

Data goes to stdout as tab-separated lines, diagnostics to stderr.  Exit
codes: 0 success, 1 usage, 2 data error, 3 verification failure.
"""

import argparse
import json
import logging
import os
import shlex
import sys

from . import fileformat, report
from .core import BUILD_MODES, O, ROLE_NAMES, ROLES, S, BuildError, Rdfcsa
from .dictionary import READERS, IngestError, dict_build
from .join import KINDS, JoinError, JoinQuery, classify, evaluate
from .psi import T_PSI_CHOICES, PsiError
from .query import QueryError, TriplePattern, locate
from .testkit import DatasetSpec, InfeasibleSpec, gen_dataset

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3
ABSENT = 0   # id no role uses; patterns with it match nothing

log = logging.getLogger("rdfcsa")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(*fields, out=None):
    print("\t".join(str(f) for f in fields), file=out or sys.stdout)


def _load(path):
    return fileformat.read_index(path)


# -- build ------------------------------------------------------------------------


def _read_input(path, fmt):
    with open(path, encoding="utf-8") as fh:
        return dict_build(READERS[fmt](fh))


def cmd_build(args):
    if args.tpsi < 1:
        raise UsageError("--tpsi must be a positive integer")
    if args.tpsi not in T_PSI_CHOICES:
        print(f"warning: t_psi={args.tpsi} is not one of {list(T_PSI_CHOICES)}", file=sys.stderr)
    d, ts = _read_input(args.input, args.format)
    idx = Rdfcsa.build(ts, mode=args.mode, t_psi=args.tpsi)
    data = fileformat.pack(idx, d, directories=not args.no_directories)
    with open(args.output, "wb") as fh:
        fh.write(data)
    _emit("n", idx.n)
    _emit("n_s", idx.n_s)
    _emit("n_p", idx.n_p)
    _emit("n_o", idx.n_o)
    _emit("n_so", d.n_so)
    if ts.duplicates_removed:
        _emit("duplicates_removed", ts.duplicates_removed)
    _print_sizes(data, idx.n)
    return EXIT_OK


def _print_sizes(data, n):
    sizes = fileformat.section_sizes(data)
    for name in fileformat.SECTIONS:
        _emit("section", name, sizes[name])
    total = len(data)
    no_dict = total - sizes["dictionary"]
    _emit("total_bytes", total)
    _emit("raw_bytes", report.raw_bytes(n))
    _emit("ratio", f"{total / report.raw_bytes(n):.4f}")
    _emit("ratio_without_dictionary", f"{no_dict / report.raw_bytes(n):.4f}")


# -- patterns ---------------------------------------------------------------------


def _split(text):
    try:
        parts = shlex.split(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse pattern {text!r}: {exc}") from exc
    if len(parts) != 3:
        raise UsageError(f"pattern needs three components, got {len(parts)}: {text!r}")
    return parts


def _encode(token, role, d, ids_only):
    if token.startswith("?"):
        return None
    if ids_only or d is None:
        try:
            return int(token)
        except ValueError:
            raise UsageError(f"{token!r} is not an integer id") from None
    ident = d.encode(token, role)
    return ABSENT if ident is None else ident


def _render(value, role, d, ids_only):
    if ids_only or d is None or value is None:
        return value
    return d.decode(value, role)


def parse_pattern(text, d=None, ids_only=False):
    return TriplePattern(*(_encode(tok, r, d, ids_only) for r, tok in zip(ROLES, _split(text))))


# -- query ------------------------------------------------------------------------


def cmd_query(args):
    idx, d = _load(args.index)
    tp = parse_pattern(args.pattern, d, args.ids_only)
    try:
        rs = locate(idx, tp, args.strategy)
    except QueryError as exc:
        raise UsageError(str(exc)) from exc
    shown = 0
    for _, t in rs.rows():
        if args.limit is not None and shown >= args.limit:
            break
        _emit(*(_render(v, r, d, args.ids_only) for r, v in zip(ROLES, t)))
        shown += 1
    _emit("count", rs.count)
    return EXIT_OK


# -- join -------------------------------------------------------------------------

_SLOT_KIND = {(S, S): "ss", (O, S): "so", (O, O): "oo"}


def _join_kind(left, right, var):
    ls = [r for r, tok in zip(ROLES, left) if tok == var]
    rs = [r for r, tok in zip(ROLES, right) if tok == var]
    if len(ls) != 1 or len(rs) != 1:
        raise UsageError(f"{var} must appear exactly once in each pattern")
    kind = _SLOT_KIND.get((ls[0], rs[0]))
    if kind is None:
        raise UsageError(f"{var} in slots ({ROLE_NAMES[ls[0]]}, {ROLE_NAMES[rs[0]]}) "
                         "is not an ss, so or oo join; swap the patterns")
    return kind


def cmd_join(args):
    idx, d = _load(args.index)
    left, right = _split(args.left), _split(args.right)
    kind = _join_kind(left, right, args.var)
    if args.kind and args.kind != kind:
        raise UsageError(f"--kind {args.kind} does not match the {args.var} placement ({kind})")
    enc = lambda toks: TriplePattern(*(_encode(t, r, d, args.ids_only)  # noqa: E731
                                       for r, t in zip(ROLES, toks)))
    try:
        jq = JoinQuery(enc(left), enc(right), kind)
        so_limit = d.n_so if d is not None and not args.ids_only else None
        bindings, used = evaluate(idx, jq, args.strategy, so_limit=so_limit)
    except JoinError as exc:
        raise UsageError(str(exc)) from exc
    ls, _ = jq.slots
    lres, rres = jq.residual_roles("left"), jq.residual_roles("right")
    shown = 0
    for x, lv, rv in bindings:
        if args.limit is not None and shown >= args.limit:
            break
        fields = [_render(x, ls, d, args.ids_only)]
        fields += [_render(v, r, d, args.ids_only) for v, r in zip(lv, lres)]
        fields += [_render(v, r, d, args.ids_only) for v, r in zip(rv, rres)]
        _emit(*fields)
        shown += 1
    name, mirrored = classify(jq)
    _emit("class", (name or "-") + (" (mirrored)" if mirrored else ""))
    _emit("strategy", used)
    _emit("count", len(bindings))
    return EXIT_OK


# -- verify -----------------------------------------------------------------------


def run_checks(path):
    """[(name, ok, detail)] for the file at ``path``."""
    checks = []
    with open(path, "rb") as fh:
        buf = fh.read()
    try:
        fileformat.unpack_sections(buf, check=True)
        checks.append(("checksum", True, "crc32 matches"))
    except fileformat.ChecksumError as exc:
        checks.append(("checksum", False, str(exc)))
    except fileformat.IndexFormatError as exc:
        checks.append(("format", False, str(exc)))
        return checks
    try:
        idx, _ = fileformat.unpack(buf, check=False)
    except Exception as exc:  # arbitrary damage can surface as any decoding error
        checks.append(("format", False, str(exc)))
        return checks
    for name, fn in (("cyclic", _check_cyclic), ("monotone", _check_monotone),
                     ("count", _check_count)):
        try:
            checks.append((name, *fn(idx)))
        except Exception as exc:  # a corrupted stream can fail anywhere in decoding
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))
    return checks


def _check_cyclic(idx):
    bad = idx.check_cyclic()
    if bad:
        return False, f"{len(bad)} positions break the cycle, first i={bad[0]}"
    return True, f"all {idx.n} positions"


def _check_monotone(idx):
    bad = idx.check_monotone()
    if bad:
        role, l, r = bad[0]
        return False, f"{len(bad)} intervals, first Psi_{ROLE_NAMES[role].lower()}[{l}..{r}]"
    return True, "Psi increasing in every symbol interval"


def _check_count(idx):
    triples = idx.extract_all()
    if len(triples) != idx.n:
        return False, f"extracted {len(triples)} of {idx.n} triples"
    if any(a >= b for a, b in zip(triples, triples[1:])):
        return False, "extracted triples are not strictly SPO-ordered"
    return True, f"{idx.n} triples"


def cmd_verify(args):
    checks = run_checks(args.index)
    ok = all(c[1] for c in checks)
    if args.json:
        print(json.dumps({"ok": ok, "checks": [
            {"name": n, "ok": k, "detail": dt} for n, k, dt in checks]}, indent=2))
    else:
        for name, good, detail in checks:
            _emit(name, "ok" if good else "FAIL", detail)
    return EXIT_OK if ok else EXIT_VERIFY


# -- stats ------------------------------------------------------------------------


def collect_stats(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    idx, _ = fileformat.unpack(buf)
    sizes = fileformat.section_sizes(buf)
    segments = {}
    for role, (stored, plain) in report.segment_ratios(idx).items():
        seg = idx.segments[ROLE_NAMES.index(role)]
        segments[f"psi_{role.lower()}"] = {
            "mode": seg.mode, "bytes": stored, "plain_bytes": plain,
            "payload_bits": seg.payload_bits(), "ratio": stored / plain if plain else 1.0}
    raw = report.raw_bytes(idx.n)
    return {
        "n": idx.n, "n_s": idx.n_s, "n_p": idx.n_p, "n_o": idx.n_o,
        "mode": idx.mode, "t_psi": idx.t_psi,
        "sections": sizes, "total_bytes": len(buf), "raw_bytes": raw,
        "ratio": len(buf) / raw,
        "ratio_without_dictionary": (len(buf) - sizes["dictionary"]) / raw,
        "segments": segments,
    }


def cmd_stats(args):
    st = collect_stats(args.index)
    if args.json:
        print(json.dumps(st, indent=2))
    else:
        for key in ("n", "n_s", "n_p", "n_o", "mode", "t_psi"):
            _emit(key, st[key])
        for name, size in st["sections"].items():
            _emit("section", name, size)
        for key in ("total_bytes", "raw_bytes"):
            _emit(key, st[key])
        _emit("ratio", f"{st['ratio']:.4f}")
        _emit("ratio_without_dictionary", f"{st['ratio_without_dictionary']:.4f}")
        for name, seg in st["segments"].items():
            _emit("segment", name, seg["mode"], seg["bytes"], seg["plain_bytes"],
                  f"{seg['ratio']:.4f}")
    if args.figure:
        report.plot_sections(st["sections"], args.figure)
        print(f"wrote {args.figure}", file=sys.stderr)
    return EXIT_OK


# -- gen / report -----------------------------------------------------------------


def cmd_gen(args):
    spec = DatasetSpec(args.n, args.n_s, args.n_p, args.n_o, args.skew, args.seed)
    try:
        terms = gen_dataset(spec)
    except InfeasibleSpec as exc:
        raise UsageError(str(exc)) from exc
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        for t in terms:
            _emit(*t, out=out)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("values must be positive")
    return vals


def cmd_report(args):
    _, ts = _read_input(args.input, args.format)
    modes = args.modes.split(",")
    for m in modes:
        if m not in BUILD_MODES:
            raise UsageError(f"unknown mode {m!r}")
    rows = report.sweep(ts, args.tpsi, modes, queries=args.queries, seed=args.seed)
    os.makedirs(args.outdir, exist_ok=True)
    cols = list(rows[0])
    table = os.path.join(args.outdir, "report.tsv")
    with open(table, "w", encoding="utf-8") as fh:
        _emit(*cols, out=fh)
        for row in rows:
            _emit(*(_fmt(row[c]) for c in cols), out=fh)
    _emit(*cols)
    for row in rows:
        _emit(*(_fmt(row[c]) for c in cols))
    report.plot_space(rows, os.path.join(args.outdir, "space.png"))
    report.plot_times(rows, os.path.join(args.outdir, "query_time.png"))
    print(f"wrote {table}, space.png, query_time.png", file=sys.stderr)
    return EXIT_OK


def _fmt(v):
    return f"{v:.4f}" if isinstance(v, float) else v


# -- parser -----------------------------------------------------------------------


def make_parser():
    ap = _Parser(prog="rdfcsa", description="Compressed self-index for RDF triples.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="index a TSV or N-Triples file")
    b.add_argument("input")
    b.add_argument("output")
    b.add_argument("--mode", choices=BUILD_MODES, default="compressed")
    b.add_argument("--tpsi", type=int, default=32)
    b.add_argument("--format", choices=sorted(READERS), default="tsv")
    b.add_argument("--no-directories", action="store_true",
                   help="omit rank counters from the file; rebuilt on load")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="resolve one triple pattern")
    q.add_argument("index")
    q.add_argument("pattern", help="three components, each a term or ?")
    q.add_argument("--strategy", choices=("auto", "base", "forward", "backward"), default="auto")
    q.add_argument("--limit", type=int)
    q.add_argument("--ids-only", action="store_true")
    q.set_defaults(func=cmd_query)

    j = sub.add_parser("join", help="join two patterns on ?x")
    j.add_argument("index")
    j.add_argument("left")
    j.add_argument("right")
    j.add_argument("--kind", choices=KINDS)
    j.add_argument("--strategy", choices=("auto", "merge", "left", "right"), default="auto")
    j.add_argument("--var", default="?x")
    j.add_argument("--limit", type=int)
    j.add_argument("--ids-only", action="store_true")
    j.set_defaults(func=cmd_join)

    v = sub.add_parser("verify", help="check an index file")
    v.add_argument("index")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="section sizes and compression ratios")
    s.add_argument("index")
    s.add_argument("--json", action="store_true")
    s.add_argument("--figure", help="write a section-size bar chart (PNG)")
    s.set_defaults(func=cmd_stats)

    g = sub.add_parser("gen", help="emit a seeded synthetic dataset as TSV")
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--n-s", type=int, default=200)
    g.add_argument("--n-p", type=int, default=8)
    g.add_argument("--n-o", type=int, default=300)
    g.add_argument("--skew", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("report", help="sweep t_psi and modes; write TSV and figures")
    r.add_argument("input")
    r.add_argument("--outdir", default="report")
    r.add_argument("--format", choices=sorted(READERS), default="tsv")
    r.add_argument("--tpsi", type=_int_list, default=list(T_PSI_CHOICES))
    r.add_argument("--modes", default="compressed,hybrid")
    r.add_argument("--queries", type=int, default=200)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, BuildError, fileformat.IndexFormatError, PsiError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
