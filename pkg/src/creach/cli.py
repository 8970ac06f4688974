"""File format, generators, and the command-line surface.

Exit codes: 0 completely reachable / success, 1 witness found (or an
extension blocked by one), 2 verification failure, 3 internal error,
64 usage error, 65 file or parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional, Sequence

from . import extension, oracle, witness
from .core import Automaton, InvalidInput, StateSet, Word, image, preimage


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# AutomatonFile format: "dfa <n> <k>" then k rows of n transition targets.

def parse_automaton(text: str) -> Automaton:
    n = k = None
    rows: List[List[int]] = []
    rows_done_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#"):
            continue
        fields = raw.split()
        if n is None:
            if len(fields) != 3 or fields[0] != "dfa":
                raise ParseError("expected header 'dfa <n> <k>'", lineno)
            try:
                n, k = int(fields[1]), int(fields[2])
            except ValueError:
                raise ParseError("header sizes must be integers", lineno)
            if n < 1 or k < 1:
                raise ParseError("header sizes must be positive", lineno)
            continue
        if len(rows) == k:
            raise ParseError(f"unexpected content after {k} rows", lineno)
        if len(fields) != n:
            raise ParseError(
                f"expected {n} entries in row, got {len(fields)}", lineno)
        try:
            row = [int(f) for f in fields]
        except ValueError:
            raise ParseError("row entries must be integers", lineno)
        for entry in row:
            if not 0 <= entry < n:
                raise ParseError(
                    f"entry {entry} out of range [0, {n})", lineno)
        rows.append(row)
        rows_done_line = lineno
    if n is None:
        raise ParseError("missing header 'dfa <n> <k>'", 1)
    if len(rows) != k:
        raise ParseError(
            f"expected {k} rows, got {len(rows)}", rows_done_line + 1)
    return Automaton(rows)


def serialize_automaton(A: Automaton) -> str:
    lines = [f"dfa {A.n} {A.k}"]
    for row in A.rows:
        lines.append(" ".join(str(q) for q in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Generators.

_SM64_MASK = (1 << 64) - 1


def _splitmix64(seed: int):
    state = seed & _SM64_MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _SM64_MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _SM64_MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _SM64_MASK
        yield z ^ (z >> 31)


FIG1_ROWS = ((0, 1, 2, 3, 4, 2), (1, 2, 3, 4, 5, 0))
FIG2_ROWS = ((10, 1, 2, 8, 4, 5, 10, 9, 3, 7, 6, 11),
             (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0))


def cerny(n: int) -> Automaton:
    """The n-state slowly synchronizing family: a merges 0 into 1, b cycles."""
    if n < 1:
        raise InvalidInput("cerny requires n >= 1")
    a = [1 % n] + list(range(1, n))
    b = [(i + 1) % n for i in range(n)]
    return Automaton([a, b])


def random_automaton(n: int, k: int, seed: int) -> Automaton:
    """Uniform transition table from splitmix64, letter-major fill order."""
    if n < 1 or k < 1:
        raise InvalidInput("random generation requires n >= 1 and k >= 1")
    rng = _splitmix64(seed)
    rows = [[next(rng) % n for _ in range(n)] for _ in range(k)]
    return Automaton(rows)


def generate(kind: str, params: Sequence[int] = (), seed: int = 0) -> Automaton:
    if kind == "fig1":
        return Automaton(FIG1_ROWS)
    if kind == "fig2":
        return Automaton(FIG2_ROWS)
    if kind == "cerny":
        if len(params) != 1:
            raise InvalidInput("cerny takes one parameter: n")
        return cerny(params[0])
    if kind == "random":
        if len(params) != 2:
            raise InvalidInput("random takes two parameters: n k")
        return random_automaton(params[0], params[1], seed)
    raise InvalidInput(f"unknown generator kind: {kind}")


# ---------------------------------------------------------------------------
# Presentation.

def format_word(w: Word, k: int) -> str:
    if k <= 26:
        return "".join(chr(ord("a") + a) for a in w)
    return ".".join(str(a) for a in w)


def format_set(S: StateSet) -> str:
    return "{" + ",".join(str(q) for q in S) + "}"


def parse_subset(spec: str, A: Automaton, allow_empty: bool = False) -> StateSet:
    spec = spec.strip()
    if not spec:
        if allow_empty:
            return StateSet(A.n)
        raise UsageError("subset must be non-empty")
    states = []
    for part in spec.split(","):
        try:
            q = int(part)
        except ValueError:
            raise UsageError(f"bad state index {part!r} in subset")
        if not 0 <= q < A.n:
            raise UsageError(f"state {q} out of range [0, {A.n})")
        if q in states:
            raise UsageError(f"duplicate state {q} in subset")
        states.append(q)
    return StateSet(A.n, states)


def _load(path: str) -> Automaton:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_automaton(fh.read())


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_check(args) -> int:
    A = _load(args.file)
    w = witness.find_witness(A)
    if w is None:
        print("completely-reachable")
        return 0
    print(f"witness: {format_set(w)}")
    return 1


def cmd_witnesses(args) -> int:
    A = _load(args.file)
    ws = witness.find_all_witnesses(A)
    for w in ws:
        print(format_set(w))
    return 1 if ws else 0


def cmd_extend(args) -> int:
    A = _load(args.file)
    S = parse_subset(args.set, A)
    if len(S) == A.n:
        raise UsageError("subset must be a proper subset for extend")
    if args.short:
        try:
            w = extension.find_short_properly_extending_word(A, S)
        except extension.NotCompletelyReachable as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    else:
        w = witness.find_properly_extending_word(A, S)
        if w is None:
            print("error: set is a witness candidate; "
                  "no properly extending word exists", file=sys.stderr)
            return 1
    print(format_word(w, A.k))
    print(format_set(preimage(A, S, w)))
    return 0


def cmd_reach(args) -> int:
    A = _load(args.file)
    S = parse_subset(args.set, A)
    try:
        w = extension.reach_word(A, S)
    except extension.NotCompletelyReachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(format_word(w, A.k))
    return 0


def cmd_reset(args) -> int:
    A = _load(args.file)
    try:
        w = extension.reset_word(A)
    except (extension.NotCompletelyReachable,
            extension.NotSynchronizing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(format_word(w, A.k))
    print(len(w))
    return 0


def cmd_oracle(args) -> int:
    A = _load(args.file)
    try:
        atlas = oracle.build_atlas(A)
    except oracle.CapacityError as exc:
        raise UsageError(str(exc))
    total = (1 << A.n) - 1
    print(f"states: {A.n}")
    print(f"letters: {A.k}")
    print(f"reachable-subsets: {len(atlas.reachable)}/{total}")
    cr = oracle.oracle_is_completely_reachable(atlas)
    print(f"completely-reachable: {'yes' if cr else 'no'}")
    threshold = oracle.oracle_reset_threshold(atlas)
    print(f"reset-threshold: {threshold if threshold is not None else 'none'}")
    if args.subset is not None:
        S = parse_subset(args.subset, A)
        w = atlas.word_to(S)
        if w is None:
            print("subset-reachable: no")
            print("shortest-reaching-word: none")
        else:
            print("subset-reachable: yes")
            print(f"shortest-reaching-word: {format_word(w, A.k)} "
                  f"(length {len(w)})")
        if 0 < len(S) < A.n:
            e = oracle.oracle_shortest_extending(A, S)
            if e is None:
                print("shortest-extending-word: none")
            else:
                print(f"shortest-extending-word: {format_word(e, A.k)} "
                      f"(length {len(e)})")
    return 0


def cmd_verify(args) -> int:
    A = _load(args.file)
    try:
        atlas = oracle.build_atlas(A)
    except oracle.CapacityError as exc:
        raise UsageError(str(exc))
    n = A.n
    failures = 0

    def report(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failures += 1

    cr_oracle = oracle.oracle_is_completely_reachable(atlas)
    found = witness.find_witness(A)
    report("reachability-decision", (found is None) == cr_oracle)

    ws = witness.find_all_witnesses(A)
    ows = oracle.oracle_witnesses(atlas)
    report("witness-sets", set(ws) == set(ows))

    if cr_oracle and n > 1:
        ok = True
        # the subset sweep is exponential; skip it beyond 12 states
        for m in range(1, (1 << n) - 1 if n <= 12 else 1):
            S = oracle.set_of(m, n)
            w = extension.find_short_properly_extending_word(A, S)
            bound = 2 * n - -(-n // (n - len(S)))
            P = preimage(A, S, w)
            if len(w) > bound or len(P) <= len(S) or image(A, P, w) != S:
                ok = False
                break
        report("short-extension-bounds", ok)

        ok = True
        for q in range(n):
            S = StateSet(n, [q])
            w = extension.reach_word(A, S)
            budget = math.ceil(extension.extension_length_budget(n, 1))
            if len(w) > budget or image(A, StateSet.full(n), w) != S:
                ok = False
                break
        report("singleton-reach-bounds", ok)

        threshold = oracle.oracle_reset_threshold(atlas)
        if threshold is not None and n >= 2:
            w = extension.reset_word(A)
            budget = (math.ceil(extension.extension_length_budget(n, 2)) + 1
                      if n >= 3 else n + 1)
            img = image(A, StateSet.full(n), w)
            report("reset-word",
                   len(img) == 1 and threshold <= len(w) <= budget)
    return 2 if failures else 0


def cmd_bounds(args) -> int:
    n, size = args.n, args.size
    if not 1 <= size <= n - 1:
        raise UsageError("--size must satisfy 1 <= size <= n-1")
    print(extension.max_nested_boxes_capped(n, n - size))
    print(f"{extension.extension_length_budget(n, size):.2f}")
    return 0


def cmd_gen(args) -> int:
    A = generate(args.kind, args.params, args.seed)
    sys.stdout.write(serialize_automaton(A))
    return 0


# ---------------------------------------------------------------------------
# Argument parsing and dispatch.

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> _Parser:
    parser = _Parser(prog="creach",
                     description="Complete reachability of DFAs: decision, "
                                 "witnesses, extending/reaching/reset words.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("check", help="decide complete reachability")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("witnesses", help="list all witnesses")
    p.add_argument("file")
    p.set_defaults(func=cmd_witnesses)

    p = sub.add_parser("extend", help="find a properly extending word")
    p.add_argument("file")
    p.add_argument("--set", required=True)
    p.add_argument("--short", action="store_true",
                   help="use the short-word search (bounded length)")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("reach", help="find a word reaching the set from Q")
    p.add_argument("file")
    p.add_argument("--set", required=True)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("reset", help="find a reset word")
    p.add_argument("file")
    p.set_defaults(func=cmd_reset)

    p = sub.add_parser("oracle", help="exhaustive ground truth (n <= 24)")
    p.add_argument("file")
    p.add_argument("--subset")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="cross-check algorithms vs the oracle")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="print length-bound formulas")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gen", help="generate an automaton file")
    p.add_argument("kind", choices=["cerny", "fig1", "fig2", "random"])
    p.add_argument("params", type=int, nargs="*")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise UsageError("a subcommand is required (see --help)")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 65
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 65
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    except (witness.AssumptionViolated,
            extension.NotCompletelyReachable,
            extension.NotSynchronizing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())
