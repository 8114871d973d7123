"""Command-line entry point: ``ahg {gadget,reduce,verify,utilities,demo}``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import gadgets, reductions
from .errors import AHGError, CapacityError
from .formats import (
    InstanceDocument,
    artifact_document,
    artifact_from_document,
    parse_instance,
    serialize_instance,
)
from .game import (
    ALL_MODELS,
    EXAMPLE1_NAMES,
    Coalition,
    CoalitionStructure,
    Degree,
    UtilityModel,
    UtilityValue,
    example1_game,
    to_numeric,
    utility,
    valuation,
)
from .stability import Status, Strategy, blocks, default_threads, verify_core, verify_strict_core

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
VERDICT_EXIT = {Status.STABLE: 0, Status.BLOCKED: 10, Status.STABLE_UP_TO_BOUND: 20}


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    q = x.denominator
    for p in (2, 5):
        while q % p == 0:
            q //= p
    if q != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = 0
    while (x * 10 ** digits).denominator != 1:
        digits += 1
    return f"{float(x):.{digits}f}" if digits < 15 else f"{x.numerator}/{x.denominator}"


def render_utility(u: UtilityValue, model: UtilityModel) -> str:
    """``12.5`` for EQ models, ``14w+8`` style for SF/AL models."""
    if model.degree is Degree.EQ:
        return format_rational(u.primary)
    sign = "-" if u.secondary < 0 else "+"
    return f"{format_rational(u.primary)}w{sign}{format_rational(abs(u.secondary))}"


def _read_doc(path: str) -> InstanceDocument:
    if path == "-":
        return parse_instance(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _id_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def cmd_gadget(args) -> int:
    if args.kind == "circulant":
        if args.k is None:
            raise SystemExit("gadget circulant needs -k")
        g, layout = gadgets.make_circulant(args.k, args.k_prime)
    else:
        if args.d is None:
            raise SystemExit(f"gadget {args.kind} needs -d")
        make = gadgets.make_dome if args.kind == "dome" else gadgets.make_pinched_dome
        g, layout = make(args.d, args.k_prime)
    doc = InstanceDocument(players=g.num_vertices, edges=g.edges, provenance={"gadget": layout.to_dict()})
    _emit(serialize_instance(doc, args.format), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    h = _read_doc(args.input).game().graph
    r = reductions.reduce(h, args.k, args.target)
    doc = artifact_document(r)
    _emit(serialize_instance(doc, args.format), args.out)
    print(
        f"{args.target}: {r.n} players, {len(r.gamma.blocks)} blocks, k_effective={r.k_effective}, "
        f"k'={r.k_prime}",
        file=sys.stderr,
    )
    return EXIT_OK


def _model_for(args, doc: InstanceDocument) -> UtilityModel:
    tag = args.model or doc.model
    if tag is None:
        raise SystemExit("no --model given and the document names none")
    return UtilityModel.parse(tag)


def cmd_verify(args) -> int:
    doc = _read_doc(args.input)
    game = doc.game()
    gamma = doc.coalition_structure() or CoalitionStructure.grand(game.n)
    model = _model_for(args, doc)
    threads = args.threads or default_threads()
    if args.strategy == "exhaustive":
        strategy = Strategy.exhaustive()
    elif args.strategy == "exhaustive-parallel":
        strategy = Strategy.exhaustive_parallel(threads, deterministic=args.deterministic)
    else:
        if args.candidates:
            candidates = _id_list(args.candidates)
        elif doc.provenance and "target" in doc.provenance:
            r = artifact_from_document(doc)
            candidates = sorted(set(r.distinguished_players) | set(r.mid_players))
        else:
            candidates = list(range(game.n))
        max_size = args.max_size if args.max_size is not None else len(candidates)
        strategy = Strategy.restricted(max_size, candidates, threads=threads if args.threads else 1,
                                       deterministic=args.deterministic)
    run = verify_strict_core if args.strict else verify_core
    verdict = run(game, gamma, model, strategy)
    kind = "strict core" if args.strict else "core"
    print(f"model: {model.tag}")
    print(f"{kind}: {verdict.status.value}")
    print(f"explored: {verdict.explored}")
    if verdict.certificate is not None:
        names = doc.names
        members = list(verdict.certificate.members)
        shown = [names[i] for i in members] if names else members
        print(f"certificate: {shown}")
    if verdict.bound is not None:
        print(f"bound: max_size={verdict.bound['max_size']} over {len(verdict.bound['candidate_players'])} players")
        if verdict.status is Status.STABLE_UP_TO_BOUND:
            print("note: bounded search only; this is evidence, not a proof of stability")
    return VERDICT_EXIT[verdict.status]


def cmd_utilities(args) -> int:
    doc = _read_doc(args.input)
    game = doc.game()
    names = doc.names or [str(i) for i in range(game.n)]
    if args.coalition:
        c = Coalition.of(_id_list(args.coalition))
        game.check_coalition(c)
        rows = [(i, c) for i in c]
    else:
        gamma = doc.coalition_structure() or CoalitionStructure.grand(game.n)
        rows = [(i, gamma.block_of(i)) for i in range(game.n)]
    header = ["player", "val"] + [m.tag for m in ALL_MODELS]
    table = []
    for i, block in rows:
        line = [names[i], str(valuation(game, i, block))]
        for m in ALL_MODELS:
            u = utility(game, i, block, m)
            text = render_utility(u, m)
            if args.w is not None and m.degree is not Degree.EQ:
                text += f" = {format_rational(to_numeric(u, m, args.w))}"
            line.append(text)
        table.append(line)
    print(_format_table(header, table))
    return EXIT_OK


def _format_table(header, rows) -> str:
    widths = [max(len(str(r[c])) for r in [header] + rows) for c in range(len(header))]
    out = []
    for r in [header] + rows:
        out.append("  ".join(str(cell).ljust(w) for cell, w in zip(r, widths)).rstrip())
    return "\n".join(out)


def demo_example1() -> str:
    game = example1_game()
    gamma = CoalitionStructure.grand(game.n)
    everyone = gamma.blocks[0]
    c = Coalition.of([0, 1, 2, 3])
    lines = ["Example 1: friendships a-b, a-c, b-c, b-d, c-d, d-e; n = 5, w >= 625", ""]

    lines.append("Grand coalition N:")
    header = [""] + list(EXAMPLE1_NAMES)
    rows = [["val"] + [str(valuation(game, i, everyone)) for i in range(game.n)]]
    for m in ALL_MODELS:
        rows.append([m.tag] + [render_utility(utility(game, i, everyone, m), m) for i in range(game.n)])
    lines.append(_format_table(header, rows))
    lines.append("")

    lines.append("Deviation C = {a, b, c, d} (✓: prefers C to N, ✗: prefers N):")
    header = [""] + [EXAMPLE1_NAMES[i] for i in c] + ["C blocks {N}?"]
    rows = [["val"] + [str(valuation(game, i, c)) for i in c] + [""]]
    for m in ALL_MODELS:
        cells = []
        for i in c:
            mark = "✓" if utility(game, i, c, m) > utility(game, i, everyone, m) else "✗"
            cells.append(f"{render_utility(utility(game, i, c, m), m)} {mark}")
        rows.append([m.tag] + cells + ["yes" if blocks(game, c, gamma, m) else "no"])
    lines.append(_format_table(header, rows))
    lines.append("")

    lines.append("Core stability of {N} (exhaustive over 31 coalitions):")
    for m in ALL_MODELS:
        v = verify_core(game, gamma, m)
        cert = ""
        if v.certificate is not None:
            cert = " certificate {" + ", ".join(EXAMPLE1_NAMES[i] for i in v.certificate) + "}"
        lines.append(f"  {m.tag}: {v.status.value}{cert}")
    return "\n".join(lines) + "\n"


def cmd_demo(args) -> int:
    sys.stdout.write(demo_example1())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ahg", description="Altruistic hedonic games: utilities, core checks, reductions.")
    sub = parser.add_subparsers(dest="command", required=True)
    models = [m.tag for m in ALL_MODELS]

    p = sub.add_parser("gadget", help="emit a circulant, dome or pinched-dome gadget")
    p.add_argument("kind", choices=["circulant", "dome", "pinched-dome"])
    p.add_argument("-k", type=int, help="clique size k (circulant: degree k-1)")
    p.add_argument("-d", type=int, help="number of fringe players (domes)")
    p.add_argument("--k-prime", type=int, required=True)
    p.add_argument("--format", choices=["full", "edgelist"], default="full")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("reduce", help="build the game and partition for a clique instance")
    p.add_argument("--input", required=True, help="source graph (document or edge list), '-' for stdin")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--target", choices=list(reductions.TARGETS), required=True)
    p.add_argument("--format", choices=["full", "edgelist"], default="full")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="check core or strict-core stability of a partition")
    p.add_argument("--input", required=True)
    p.add_argument("--model", choices=models)
    p.add_argument("--strategy", choices=["exhaustive", "exhaustive-parallel", "restricted"], default="exhaustive")
    p.add_argument("--max-size", type=int)
    p.add_argument("--candidates", help="comma-separated player ids for the restricted strategy")
    p.add_argument("--threads", type=int, help="worker count (default: $AHG_THREADS or CPU count)")
    p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                   help="return the first certificate in (size, lexicographic) order")
    p.add_argument("--strict", action="store_true", help="check strict core (weak blocking)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("utilities", help="valuation and all six utilities per player")
    p.add_argument("--input", required=True)
    p.add_argument("--coalition", help="comma-separated ids; default: each player's block")
    p.add_argument("--w", type=int, help="also show SF/AL utilities as numbers for this weight")
    p.set_defaults(func=cmd_utilities)

    p = sub.add_parser("demo", help="reproduce a worked example")
    p.add_argument("which", choices=["example1"])
    p.set_defaults(func=cmd_demo)
    return parser


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except SystemExit as exc:
        if isinstance(exc.code, int):
            return exc.code
        print(f"error: {exc.code}", file=sys.stderr)
        return EXIT_USAGE
    except (AHGError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(cli_main())
