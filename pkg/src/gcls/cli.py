"""File formats and the ``gcls`` command-line front end.

Two text formats are defined here.  The native ``gcls`` format carries a
generalised clause-set: ``c`` comment lines, a ``p gcls <nvars> <nclauses>``
header, ``d <var> <size>`` domain declarations (undeclared variables default
to domain size 2), and clauses as whitespace-separated ``var:val`` tokens
terminated by a ``0`` token.  Clauses may span lines, and a repeated clause
line raises its multiplicity.  The DIMACS format carries the boolean image of
a translation, with the variable correspondence recorded in ``c gclsmap`` /
``c gclsnest`` comment lines.  Both emitters are parse-stable: emitting,
parsing and emitting again reproduces the bytes exactly.

The command surface (``analyze``, ``translate``, ``solve``, ``autarky``,
``lean-kernel``, ``mu1``, ``encode``) is thin plumbing over the library.
Exit codes: 0 success, 2 usage or input-format error, 3 refusal such as an
exceeded brute-force cap, and for ``solve`` 10 satisfiable / 20
unsatisfiable.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from .core import Clause, Literal, MultiClauseSet, VariableTable
from .encode import hypergraph_coloring, parse_hypergraph, vdw_instance
from .matching import (
    is_matching_lean,
    matching_lean_kernel,
    max_deficiency,
    surplus,
)
from .musat import classify_mu1, format_tree, recognize_mu1
from .satdec import (
    BruteForceCapExceeded,
    decide,
    find_nontrivial_autarky_bounded,
    lean_kernel_bounded,
)
from .structure import classify_hitting, conflict_matrix, hermitian_rank
from .translate import (
    TranslationResult,
    direct_strong,
    direct_weak,
    logarithmic,
    nested,
    reduced,
)

__all__ = [
    "DimacsFile",
    "emit_dimacs",
    "emit_gcls",
    "main",
    "parse_dimacs",
    "parse_gcls",
]


def _fail(line: int, column: int, message: str) -> None:
    raise ValueError(f"line {line}, column {column}: {message}")


def _tokens(raw: str) -> List[Tuple[int, str]]:
    """The (column, token) pairs of one line; columns are 1-based."""
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", raw)]


def _is_comment(raw: str) -> bool:
    stripped = raw.lstrip()
    return stripped.startswith("c") and (len(stripped) == 1
                                         or stripped[1].isspace())


def _parse_header(tokens: List[Tuple[int, str]], line: int,
                  kind: str) -> Tuple[int, int]:
    if len(tokens) != 4 or tokens[0][1] != "p" or tokens[1][1] != kind:
        _fail(line, tokens[0][0], f"bad header: expected 'p {kind} <n> <m>'")
    counts = []
    for column, token in tokens[2:]:
        if not token.isdigit():
            _fail(line, column, f"bad header: {token!r} is not a count")
        counts.append(int(token))
    return counts[0], counts[1]


# -- the gcls format ------------------------------------------------------------


def parse_gcls(text: str) -> MultiClauseSet:
    """Parse the native format into a multi-clause-set (multiplicity view).

    Diagnostics carry the 1-based line and column of the offending token:
    variables outside the header range, values outside the declared domain,
    clashing literals within one clause, bad or missing headers, and header
    counts that disagree with the file body all raise ValueError.
    """
    lines = text.splitlines()
    header: Optional[Tuple[int, int, int]] = None  # (line, nvars, nclauses)
    sizes: Dict[int, int] = {}

    def require_header(line: int, column: int) -> Tuple[int, int, int]:
        if header is None:
            _fail(line, column, "missing 'p gcls' header")
        return header

    for ln, raw in enumerate(lines, 1):
        tokens = _tokens(raw)
        if not tokens or _is_comment(raw):
            continue
        head_col, head = tokens[0]
        if head == "p":
            if header is not None:
                _fail(ln, head_col, "duplicate header")
            header = (ln, *_parse_header(tokens, ln, "gcls"))
        elif head == "d":
            _, nvars, _ = require_header(ln, head_col)
            if len(tokens) != 3 or not all(t.isdigit() for _, t in tokens[1:]):
                _fail(ln, head_col, "bad declaration: expected 'd <var> <size>'")
            (var_col, var_tok), (size_col, size_tok) = tokens[1], tokens[2]
            var, size = int(var_tok), int(size_tok)
            if not 1 <= var <= nvars:
                _fail(ln, var_col,
                      f"undeclared variable {var}: header allows 1..{nvars}")
            if size < 1:
                _fail(ln, size_col, "domain size must be at least 1")
            if sizes.setdefault(var, size) != size:
                _fail(ln, var_col,
                      f"variable {var} declared twice with different sizes")
        else:
            require_header(ln, head_col)

    if header is None:
        _fail(len(lines) + 1, 1, "missing 'p gcls' header")
    header_line, nvars, nclauses = header

    multiplicities: Dict[Clause, int] = {}
    count = 0
    current: Dict[int, int] = {}
    last = (header_line, 1)
    for ln, raw in enumerate(lines, 1):
        tokens = _tokens(raw)
        if not tokens or _is_comment(raw) or tokens[0][1] in ("p", "d"):
            continue
        for column, token in tokens:
            last = (ln, column)
            if token == "0":
                clause = Clause(Literal(v, e) for v, e in current.items())
                multiplicities[clause] = multiplicities.get(clause, 0) + 1
                count += 1
                current = {}
                continue
            match = re.fullmatch(r"(\d+):(\d+)", token)
            if match is None:
                _fail(ln, column,
                      f"bad token {token!r}: expected 'var:val' or '0'")
            var, val = int(match.group(1)), int(match.group(2))
            if not 1 <= var <= nvars:
                _fail(ln, column,
                      f"undeclared variable {var}: header allows 1..{nvars}")
            size = sizes.setdefault(var, 2)
            if val >= size:
                _fail(ln, column, f"value {val} out of range for variable "
                                  f"{var} (domain size {size})")
            if current.setdefault(var, val) != val:
                _fail(ln, column, f"clashing literals on variable {var}")
    if current:
        _fail(*last, "unterminated clause at end of input")
    if count != nclauses:
        _fail(header_line, 1, f"bad header counts: header announces "
                              f"{nclauses} clauses, file has {count}")
    return MultiClauseSet(VariableTable(sizes), multiplicities)


def emit_gcls(F: MultiClauseSet) -> str:
    """Canonical text for F: header, one declaration per table variable,
    one line per clause occurrence with literals ascending by variable."""
    variables = sorted(F.table.variables())
    lines = [f"p gcls {variables[-1] if variables else 0} "
             f"{sum(m for _, m in F.items())}"]
    lines.extend(f"d {v} {F.table.domain_size(v)}" for v in variables)
    for clause, mult in F.items():
        body = " ".join(f"{lit.var}:{lit.value}" for lit in sorted(clause))
        lines.extend([f"{body} 0" if body else "0"] * mult)
    return "\n".join(lines) + "\n"


# -- the DIMACS format ----------------------------------------------------------


class DimacsFile(NamedTuple):
    """A boolean CNF plus its comment lines, as stored on disk."""

    comments: Tuple[str, ...]
    cnf: MultiClauseSet


def _mapping_comments(translation: TranslationResult) -> Tuple[str, ...]:
    tag = ("gclsmap" if translation.scheme in ("direct-weak", "direct-strong")
           else "gclsnest")
    return tuple(f"c {tag} {b} {v} {j}"
                 for b, (v, j) in sorted(translation.var_map.items()))


def emit_dimacs(source: Union[TranslationResult, DimacsFile]) -> str:
    """DIMACS text: mapping comments, ``p cnf`` header, 0-terminated clauses.

    Literal b avoiding value 0 prints as the positive literal b, avoiding
    value 1 as -b.  A clause of multiplicity m produces m identical lines.
    """
    if isinstance(source, TranslationResult):
        source = DimacsFile(_mapping_comments(source), source.boolean_cnf)
    comments, cnf = source
    variables = sorted(cnf.table.variables())
    lines = list(comments)
    lines.append(f"p cnf {variables[-1] if variables else 0} "
                 f"{sum(m for _, m in cnf.items())}")
    for clause, mult in cnf.items():
        body = " ".join(str(lit.var) if lit.value == 0 else str(-lit.var)
                        for lit in sorted(clause))
        lines.extend([f"{body} 0" if body else "0"] * mult)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> DimacsFile:
    """Parse DIMACS CNF; comment lines are kept verbatim (sans newline).

    The table declares every variable 1..n from the header with domain 2,
    whether or not it occurs, so emitting the result reproduces the header.
    """
    lines = text.splitlines()
    comments: List[str] = []
    header: Optional[Tuple[int, int, int]] = None
    body: List[Tuple[int, List[Tuple[int, str]]]] = []
    for ln, raw in enumerate(lines, 1):
        tokens = _tokens(raw)
        if not tokens:
            continue
        if _is_comment(raw):
            comments.append(raw.rstrip("\r\n"))
        elif tokens[0][1] == "p":
            if header is not None:
                _fail(ln, tokens[0][0], "duplicate header")
            header = (ln, *_parse_header(tokens, ln, "cnf"))
        else:
            if header is None:
                _fail(ln, tokens[0][0], "missing 'p cnf' header")
            body.append((ln, tokens))
    if header is None:
        _fail(len(lines) + 1, 1, "missing 'p cnf' header")
    header_line, nvars, nclauses = header

    multiplicities: Dict[Clause, int] = {}
    count = 0
    current: Dict[int, int] = {}
    last = (header_line, 1)
    for ln, tokens in body:
        for column, token in tokens:
            last = (ln, column)
            if re.fullmatch(r"-?\d+", token) is None:
                _fail(ln, column, f"bad token {token!r}: expected an integer")
            lit = int(token)
            if lit == 0:
                clause = Clause(Literal(v, e) for v, e in current.items())
                multiplicities[clause] = multiplicities.get(clause, 0) + 1
                count += 1
                current = {}
                continue
            var, value = (lit, 0) if lit > 0 else (-lit, 1)
            if var > nvars:
                _fail(ln, column,
                      f"undeclared variable {var}: header allows 1..{nvars}")
            if current.setdefault(var, value) != value:
                _fail(ln, column, f"clashing literals on variable {var}")
    if current:
        _fail(*last, "unterminated clause at end of input")
    if count != nclauses:
        _fail(header_line, 1, f"bad header counts: header announces "
                              f"{nclauses} clauses, file has {count}")
    table = VariableTable({v: 2 for v in range(1, nvars + 1)})
    return DimacsFile(tuple(comments), MultiClauseSet(table, multiplicities))


# -- command implementations -----------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _load(path: str) -> MultiClauseSet:
    return parse_gcls(_read(path))


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def cmd_analyze(args: argparse.Namespace) -> int:
    F = _load(args.file)
    hitting = classify_hitting(F)
    lines = [
        f"n {F.n}",
        f"c {F.c}",
        f"ell {F.ell}",
        f"rd {F.rd}",
        f"delta {F.delta}",
        f"delta-star {max_deficiency(F).value}",
        f"surplus {surplus(F).value}",
        f"matching-lean {_yesno(is_matching_lean(F))}",
        f"hitting {_yesno(hitting.hitting)}",
        f"hitting-degree {hitting.hitting_degree or 0}",
        f"regular {'no' if hitting.regular is None else hitting.regular}",
        f"multihitting {_yesno(hitting.multihitting)}",
        f"multipartition-blocks "
        f"{hitting.multipartition.k if hitting.multipartition else 0}",
    ]
    if args.hermitian:
        inertia = hermitian_rank(conflict_matrix(F))
        lines.extend([
            f"n-plus {inertia.n_plus}",
            f"n-minus {inertia.n_minus}",
            f"h {inertia.h}",
            f"hdef {inertia.hdef}",
        ])
    _write(None, "\n".join(lines) + "\n")
    return 0


_SCHEMES = {
    "direct": direct_weak,
    "direct-strong": direct_strong,
    "nested": nested,
    "reduced": reduced,
    "log": logarithmic,
}


def _occurrence_order(F: MultiClauseSet) -> Dict[int, Tuple[int, ...]]:
    """Per variable, the domain ordered by descending occurrence count."""
    return {v: tuple(sorted(F.table.domain(v),
                            key=lambda e: (-F.count(Literal(v, e)), e)))
            for v in F.var_set()}


def cmd_translate(args: argparse.Namespace) -> int:
    F = _load(args.file)
    if args.order_by_occurrences:
        translation = nested(F, value_order=_occurrence_order(F))
    else:
        translation = _SCHEMES[args.scheme](F)
    _write(args.output, emit_dimacs(translation))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    result = decide(_load(args.file), method=args.method)
    if not result.satisfiable:
        _write(None, "s UNSATISFIABLE\n")
        return 20
    bindings = " ".join(f"{v}:{e}" for v, e in result.witness.items())
    _write(None, f"s SATISFIABLE\nv{' ' if bindings else ''}{bindings}\n")
    return 10


def cmd_autarky(args: argparse.Namespace) -> int:
    phi = find_nontrivial_autarky_bounded(_load(args.file))
    if phi is None:
        _write(None, "LEAN\n")
    else:
        bindings = " ".join(f"{v}:{e}" for v, e in phi.items())
        _write(None, f"AUTARKY\nv {bindings}\n")
    return 0


def cmd_lean_kernel(args: argparse.Namespace) -> int:
    F = _load(args.file)
    kernel = (matching_lean_kernel(F) if args.system == "matching"
              else lean_kernel_bounded(F))
    _write(args.output, emit_gcls(kernel))
    return 0


def cmd_mu1(args: argparse.Namespace) -> int:
    F = _load(args.file)
    verdict = recognize_mu1(F)
    if verdict.verdict != "mu1":
        reason = f"reason {verdict.reason}\n" if verdict.reason else ""
        _write(None, "NOT-MU1\n" + reason)
        return 0
    outcome = classify_mu1(F)
    text = f"MU1 {outcome.category}\n"
    if outcome.tree is not None:
        text += format_tree(outcome.tree) + "\n"
    _write(None, text)
    return 0


def cmd_encode_vdw(args: argparse.Namespace) -> int:
    _write(args.output, emit_gcls(vdw_instance(args.m, args.k, args.n)))
    return 0


def cmd_encode_coloring(args: argparse.Namespace) -> int:
    G = parse_hypergraph(_read(args.hypfile))
    _write(args.output, emit_gcls(hypergraph_coloring(G, args.k)))
    return 0


# -- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcls",
        description="Analyze, translate, solve and generate generalised "
                    "clause-sets.")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser(
        "analyze", help="measure and classify a clause-set")
    analyze.add_argument("--hermitian", action="store_true",
                         help="also report the conflict-matrix signature")
    analyze.add_argument("file")
    analyze.set_defaults(func=cmd_analyze)

    translate = commands.add_parser(
        "translate", help="translate to boolean CNF (DIMACS)")
    translate.add_argument("--scheme", required=True, choices=sorted(_SCHEMES))
    translate.add_argument("--order-by-occurrences", action="store_true",
                           help="nested scheme only: order each domain by "
                                "descending occurrence count")
    translate.add_argument("file")
    translate.add_argument("-o", "--output")
    translate.set_defaults(func=cmd_translate)

    solve = commands.add_parser("solve", help="decide satisfiability")
    solve.add_argument("--method", default="auto",
                       choices=("auto", "brute", "bounded", "fpt"))
    solve.add_argument("file")
    solve.set_defaults(func=cmd_solve)

    autarky = commands.add_parser(
        "autarky", help="find a non-trivial autarky or certify leanness")
    autarky.add_argument("file")
    autarky.set_defaults(func=cmd_autarky)

    kernel = commands.add_parser("lean-kernel", help="compute a lean kernel")
    kernel.add_argument("--system", default="matching",
                        choices=("matching", "general"))
    kernel.add_argument("file")
    kernel.add_argument("-o", "--output")
    kernel.set_defaults(func=cmd_lean_kernel)

    mu1 = commands.add_parser(
        "mu1", help="recognize and classify deficiency-1 minimal "
                    "unsatisfiability")
    mu1.add_argument("file")
    mu1.set_defaults(func=cmd_mu1)

    encode = commands.add_parser("encode", help="generate an instance")
    kinds = encode.add_subparsers(dest="kind", required=True)

    vdw = kinds.add_parser("vdw", help="colour 1..N avoiding monochromatic "
                                       "K-term arithmetic progressions")
    vdw.add_argument("m", type=int, help="number of colours")
    vdw.add_argument("k", type=int, help="progression length")
    vdw.add_argument("n", type=int, help="number of integers")
    vdw.add_argument("-o", "--output")
    vdw.set_defaults(func=cmd_encode_vdw)

    coloring = kinds.add_parser(
        "coloring", help="proper K-colouring of a hypergraph")
    coloring.add_argument("hypfile")
    coloring.add_argument("k", type=int, help="number of colours")
    coloring.add_argument("-o", "--output")
    coloring.set_defaults(func=cmd_encode_coloring)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "order_by_occurrences", False) and args.scheme != "nested":
        parser.error("--order-by-occurrences only applies to --scheme nested")
    try:
        return args.func(args)
    except BruteForceCapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
