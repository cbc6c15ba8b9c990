"""Command-line front end: ``operadcalc <command> [flags]``.

Exit codes: 0 success or passing suite, 1 failing suite, 2 usage error,
3 budget overrun (a partial report is still printed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import analysis as an
from . import classical as cl
from .divergence import cocycle_defect_sum, contract_sum, div_sum
from .freeder import (
    Context,
    ContextError,
    bracket_sum,
    necklace_of,
    prelie_sum,
    spine_factorize,
)
from .linear import FormalSum
from .trees import (
    BASEPOINT,
    GeneratorSet,
    TreeError,
    classify,
    graft,
    internal_edges,
    prune,
)

DEFAULT_BUDGET_MS = 600_000
DEFAULT_SEED = 0
BUDGET_ENV = "OPERADCALC_BUDGET_MS"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    """Bad command-line input."""


@dataclass
class CommandConfig:
    command: str
    labels: tuple[str, ...] = ("x", "y")
    gens: GeneratorSet = field(default_factory=GeneratorSet.binary)
    operad: str = "free"
    max_degree: int = 2
    rank: int = 2
    stab: int | None = None
    fmt: str = "text"
    seed: int = DEFAULT_SEED
    budget_ms: int = DEFAULT_BUDGET_MS
    timing: bool = True


@dataclass
class Output:
    """A command result: ordered fields, optional table rows and a status."""

    title: str
    fields: dict[str, Any] = field(default_factory=dict)
    rows: list[dict[str, Any]] = field(default_factory=list)
    code: int = EXIT_OK
    json_override: dict | None = None

    def render(self, fmt: str) -> str:
        if fmt == "json":
            payload = self.json_override if self.json_override is not None else {
                "schema": 1,
                "command": self.title,
                **self.fields,
                **({"rows": self.rows} if self.rows else {}),
            }
            return json.dumps(payload, sort_keys=True, indent=2)
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            if self.rows:
                keys = _row_columns(self.rows)
                writer.writerow(keys)
                for row in self.rows:
                    flat = _flatten(row)
                    writer.writerow([_cell(flat.get(k)) for k in keys])
            else:
                writer.writerow(["field", "value"])
                for k, v in self.fields.items():
                    writer.writerow([k, _cell(v)])
            return buf.getvalue().rstrip("\n")
        lines = [self.title]
        for k, v in self.fields.items():
            if isinstance(v, list):
                lines.append(f"{k}:")
                lines.extend(f"  {item}" for item in v)
            else:
                lines.append(f"{k}: {_cell(v)}")
        for row in self.rows:
            flat = _flatten(row)
            lines.append("  " + " ".join(f"{k}={_cell(v)}" for k, v in flat.items()))
        return "\n".join(lines)


def _flatten(row: dict) -> dict:
    out: dict[str, Any] = {}
    for k, v in row.items():
        if isinstance(v, dict):
            for k2, v2 in v.items():
                out[k2] = v2
        else:
            out[k] = v
    return out


def _row_columns(rows: list[dict]) -> list[str]:
    keys: list[str] = []
    for row in rows:
        for k in _flatten(row):
            if k not in keys:
                keys.append(k)
    return keys


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    return str(v)


# Argument parsing ------------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--set", default="x,y", help="comma-separated label set (default x,y)")
    p.add_argument("--gens", default="*:2", help='generators as "name:arity[,name:arity]"')
    p.add_argument("--operad", choices=("free", "lie", "ass", "com"), default="free")
    p.add_argument("--max-degree", type=_positive, default=2)
    p.add_argument("--rank", type=_positive, default=None)
    p.add_argument("--stab", type=_non_negative, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--budget-ms", type=_positive, default=None)
    p.add_argument("--no-timing", action="store_true", help="report elapsed_ms as null for reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="operadcalc",
        description="Exact calculus of derivations of free operad algebras and their divergence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tree", help="parse, classify, graft or prune a tree")
    _common(p)
    p.add_argument("--tree", required=True)
    p.add_argument("--graft", metavar="INDEX:TREE", help="graft TREE at the 1-based leaf INDEX")
    p.add_argument("--prune", metavar="PATH", help="prune the internal edge at a 0-based child path like 0.1, as listed by internal_edges")

    for name, helptext in (
        ("prelie", "preLie product of two derivations"),
        ("bracket", "Lie bracket of two derivations"),
        ("cocycle", "cocycle defect of two derivations, or random classical pairs"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--tree", action="append", default=[], help="tree or formal sum; give twice")
        if name == "cocycle":
            p.add_argument("--samples", type=_positive, default=200)

    for name, helptext in (("contract", "contraction to a pointed derivation"), ("div", "divergence")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--tree", required=True, help="tree or formal sum")

    p = sub.add_parser("classical", help="trace of a classical derivation")
    _common(p)
    p.add_argument("kind", choices=("satoh", "double", "com"))
    p.add_argument("--image", action="append", default=[], metavar="LETTER=EXPR",
                   help="image of a letter, e.g. x=[x,y] or x=xy-yx; repeatable")

    p = sub.add_parser("dims", help="dimension table of the graded spaces")
    _common(p)

    p = sub.add_parser("suite", help="run a verification suite")
    _common(p)
    p.add_argument("name", choices=an.SUITES)
    return parser


def _resolve_budget(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(BUDGET_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{BUDGET_ENV} must be an integer, got {env!r}")
        if value < 1:
            raise UsageError(f"{BUDGET_ENV} must be positive")
        return value
    return DEFAULT_BUDGET_MS


def config_from_args(ns: argparse.Namespace) -> CommandConfig:
    labels = tuple(sorted({s.strip() for s in ns.set.split(",") if s.strip()}))
    if not labels:
        raise UsageError("--set must name at least one label")
    gens = GeneratorSet.parse(ns.gens)
    Context.user(labels, gens)
    rank = ns.rank if ns.rank is not None else len(labels)
    return CommandConfig(
        command=ns.command,
        labels=labels,
        gens=gens,
        operad=ns.operad,
        max_degree=ns.max_degree,
        rank=rank,
        stab=ns.stab,
        fmt=ns.format,
        seed=ns.seed,
        budget_ms=_resolve_budget(ns.budget_ms),
        timing=not ns.no_timing,
    )


# Commands --------------------------------------------------------------------------------


def _parse_sum(ctx: Context, text: str) -> FormalSum:
    """A single tree, or a formal sum ``c*TREE + c*TREE``."""
    text = text.strip()
    if "<-" in text and not any(ch.isspace() for ch in text) and not _looks_weighted(text):
        return FormalSum.basis(ctx.parse(text))
    return FormalSum.from_text(text, ctx.parse)


def _looks_weighted(text: str) -> bool:
    head = text.split("*", 1)[0]
    return bool(head) and head.lstrip("-").replace("/", "").isdigit()


def cmd_tree(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
    ctx = Context.user(cfg.labels, cfg.gens).with_basepoint()
    t = ctx.parse(ns.tree)
    cls = classify(t)
    out = Output("tree")
    out.fields["tree"] = str(t)
    out.fields["degree"] = t.degree
    out.fields["internal_vertices"] = t.internal_count
    out.fields["leaves"] = list(t.leaves)
    out.fields["class"] = cls.kind.value
    if cls.spine is not None:
        out.fields["spine"] = cls.spine
    if cls.pointed:
        factors = spine_factorize(t)
        out.fields["factors"] = [str(f) for f in factors]
        out.fields["necklace"] = str(necklace_of(t))
    out.fields["internal_edges"] = [".".join(map(str, e)) for e in internal_edges(t)]
    if ns.graft:
        index, _, other = ns.graft.partition(":")
        if not index.isdigit() or not other:
            raise UsageError("--graft expects INDEX:TREE")
        out.fields["graft"] = str(graft(t, int(index), ctx.parse(other)))
    if ns.prune:
        try:
            path = tuple(int(p) for p in ns.prune.split("."))
        except ValueError:
            raise UsageError("--prune expects a path like 0.1")
        lower, upper = prune(t, path)
        out.fields["prune_lower"] = str(lower)
        out.fields["prune_upper"] = str(upper)
    return out


def _two_sums(cfg: CommandConfig, ns: argparse.Namespace) -> tuple[Context, FormalSum, FormalSum]:
    if len(ns.tree) != 2:
        raise UsageError(f"{cfg.command} needs exactly two --tree arguments")
    ctx = Context.user(cfg.labels, cfg.gens)
    return ctx, _parse_sum(ctx, ns.tree[0]), _parse_sum(ctx, ns.tree[1])


def cmd_binary(op: Callable[[FormalSum, FormalSum], FormalSum]) -> Callable:
    def run_op(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
        _, a, b = _two_sums(cfg, ns)
        out = Output(cfg.command)
        out.fields["result"] = op(a, b).to_text()
        return out

    return run_op


def cmd_contract(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
    ctx = Context.user(cfg.labels, cfg.gens)
    out = Output("contract")
    out.fields["basepoint"] = BASEPOINT
    out.fields["result"] = contract_sum(_parse_sum(ctx, ns.tree)).to_text()
    return out


def cmd_div(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
    ctx = Context.user(cfg.labels, cfg.gens)
    out = Output("div")
    out.fields["basepoint"] = BASEPOINT
    out.fields["result"] = div_sum(_parse_sum(ctx, ns.tree)).to_text()
    return out


def cmd_cocycle(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
    out = Output("cocycle")
    if cfg.operad == "free":
        _, a, b = _two_sums(cfg, ns)
        defect = cocycle_defect_sum(a, b)
        out.fields["defect"] = defect.to_text()
        out.code = EXIT_OK if not defect else EXIT_FAIL
        return out
    if ns.tree:
        raise UsageError("--tree is only meaningful with --operad free")
    alphabet = an.default_alphabet(cfg.rank)
    rng = random.Random(cfg.seed)
    failures = 0
    first = None
    for _ in range(ns.samples):
        d = an.random_classical_derivation(rng, cfg.operad, alphabet, rng.randint(0, cfg.max_degree))
        e = an.random_classical_derivation(rng, cfg.operad, alphabet, rng.randint(0, cfg.max_degree))
        defect = cl.classical_cocycle_defect(d, e)
        if defect:
            failures += 1
            first = first or f"{d} ; {e}"
    out.fields.update({"operad": cfg.operad, "rank": cfg.rank, "samples": ns.samples,
                       "seed": cfg.seed, "failures": failures})
    if first:
        out.fields["counterexample"] = first
    out.code = EXIT_OK if failures == 0 else EXIT_FAIL
    return out


_CLASSICAL_KIND = {"satoh": cl.LIE, "double": cl.ASS, "com": cl.COM}


def cmd_classical(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
    tag = _CLASSICAL_KIND[ns.kind]
    if not ns.image:
        raise UsageError("classical needs at least one --image LETTER=EXPR")
    images = {}
    for item in ns.image:
        letter, sep, expr = item.partition("=")
        if not sep or not letter.strip() or not expr.strip():
            raise UsageError(f"malformed --image {item!r}")
        images[letter.strip()] = expr.strip()
    d = cl.derivation_from_images(tag, cfg.labels, images)
    trace = cl.classical_div(d)
    model = an.classical_model(tag, cfg.labels)
    out = Output(f"classical {ns.kind}")
    out.fields["derivation"] = str(d)
    out.fields["trace"] = trace.to_text(model.format_key)
    return out


def cmd_dims(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
    budget = an.Budget(cfg.budget_ms)
    if cfg.operad == "free":
        model: an.Model = an.free_model(cfg.labels, cfg.gens)
    else:
        model = an.classical_model(cfg.operad, an.default_alphabet(cfg.rank))
    lie = an.generate_derlie(model, cfg.max_degree, budget)
    pl = an.generate_derpl(model, cfg.max_degree, budget) if cfg.operad == "free" else None
    im = an.imderlie(model, cfg.max_degree, budget)
    out = Output("dims")
    out.fields["operad"] = cfg.operad
    out.fields["labels"] = list(model.labels)
    for d in range(1, cfg.max_degree + 1):
        dims = {"der": lie.ambient_dims[d]}
        if pl is not None:
            dims["derpl"] = pl.rank(d)
        dims["derlie"] = lie.rank(d)
        dims["trace"] = im.ambient_dims[d]
        dims["imderlie"] = im.rank(d)
        out.rows.append({"degree": d, "dims": dims})
    return out


def cmd_suite(cfg: CommandConfig, ns: argparse.Namespace) -> Output:
    report = an.theorem_suite(
        ns.name,
        labels=cfg.labels,
        gens=cfg.gens,
        max_degree=cfg.max_degree,
        rank=cfg.rank,
        stab=cfg.stab,
        budget_ms=cfg.budget_ms,
    )
    return _suite_output(report, cfg)


def _suite_output(report: an.SuiteReport, cfg: CommandConfig, partial: bool = False) -> Output:
    if not cfg.timing:
        report.elapsed_ms = None
    payload = report.to_dict()
    if partial:
        payload["partial"] = True
    out = Output(f"suite {report.suite}", json_override=payload)
    out.fields["pass"] = report.passed and not partial
    for k, v in report.params.items():
        out.fields[k] = v
    if report.counterexample:
        out.fields["counterexample"] = report.counterexample
    for note in report.notes:
        out.fields.setdefault("notes", []).append(note)
    if partial:
        out.fields["partial"] = True
    out.fields["elapsed_ms"] = report.elapsed_ms
    out.rows = report.per_degree
    out.code = EXIT_OK if report.passed else EXIT_FAIL
    return out


COMMANDS = {
    "tree": cmd_tree,
    "prelie": cmd_binary(prelie_sum),
    "bracket": cmd_binary(bracket_sum),
    "contract": cmd_contract,
    "div": cmd_div,
    "cocycle": cmd_cocycle,
    "classical": cmd_classical,
    "dims": cmd_dims,
    "suite": cmd_suite,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(ns)
        out = COMMANDS[ns.command](cfg, ns)
    except an.BudgetExceeded as exc:
        print(f"error: {exc}", file=stderr)
        if exc.partial is not None:
            print(_suite_output(exc.partial, cfg, partial=True).render(cfg.fmt), file=stdout)
        return EXIT_BUDGET
    except (UsageError, TreeError, ContextError, cl.ClassicalError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        print(parser.format_usage().rstrip(), file=stderr)
        return EXIT_USAGE
    print(out.render(cfg.fmt), file=stdout)
    return out.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
