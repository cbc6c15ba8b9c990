"""Contraction, divergence and the cocycle check for free operads.

Contracting a tree with root ``z`` sums, over its ``z``-labelled leaves, the
tree with the root and that one leaf relabelled by the fresh basepoint
``+``.  The divergence is the contraction followed by the passage to
necklaces.
"""

from __future__ import annotations

from fractions import Fraction

from .freeder import (
    Context,
    ContextError,
    Derivation,
    PointedDerivation,
    TraceElement,
    act_sum,
    bracket_sum,
    trace_class_sum,
)
from .linear import FormalSum
from .trees import BASEPOINT, LabeledTree, Node


def _mark_leaves(node: Node, label: str, mark: str) -> list[Node]:
    """Copies of ``node`` with exactly one ``label`` leaf replaced by ``mark``."""
    if isinstance(node, str):
        return [mark] if node == label else []
    out: list[Node] = []
    for i in range(1, len(node)):
        for new in _mark_leaves(node[i], label, mark):
            out.append(node[:i] + (new,) + node[i + 1:])
    return out


def contract_tree(t: LabeledTree, basepoint: str = BASEPOINT) -> list[LabeledTree]:
    """The trees making up the contraction of a single tree."""
    return [LabeledTree(basepoint, n) for n in _mark_leaves(t.node, t.root, basepoint)]


def contract_sum(d: FormalSum, basepoint: str = BASEPOINT) -> FormalSum:
    acc: dict[LabeledTree, Fraction] = {}
    for t, c in d.items():
        if basepoint in t.labels():
            raise ContextError(f"tree {t} already uses the basepoint {basepoint!r}")
        for u in contract_tree(t, basepoint):
            total = acc.get(u, 0) + c
            if total:
                acc[u] = total
            else:
                del acc[u]
    return FormalSum._raw(acc)


def div_sum(d: FormalSum, basepoint: str = BASEPOINT) -> FormalSum:
    return trace_class_sum(contract_sum(d, basepoint))


def _plus_context(ctx: Context) -> Context:
    if BASEPOINT in ctx.labels:
        raise ContextError("the basepoint '+' must be fresh")
    return ctx.with_basepoint(BASEPOINT)


def contract(d: Derivation) -> PointedDerivation:
    """Pointed derivation over ``S`` plus the basepoint ``+``."""
    return PointedDerivation(_plus_context(d.ctx), BASEPOINT, contract_sum(d.value))


def div(d: Derivation) -> TraceElement:
    return TraceElement(_plus_context(d.ctx), BASEPOINT, div_sum(d.value))


def cocycle_defect_sum(d: FormalSum, e: FormalSum) -> FormalSum:
    """``div[d,e] - div(d).e + div(e).d`` on formal sums."""
    return (
        div_sum(bracket_sum(d, e))
        - act_sum(div_sum(d), e)
        + act_sum(div_sum(e), d)
    )


def cocycle_defect(d: Derivation, e: Derivation) -> TraceElement:
    if d.ctx != e.ctx:
        raise ContextError("context mismatch")
    return TraceElement(_plus_context(d.ctx), BASEPOINT, cocycle_defect_sum(d.value, e.value))


def restrict_positive(d: Derivation) -> Derivation:
    return d.positive()


def div_positive(d: Derivation) -> TraceElement:
    return div(restrict_positive(d))


def forget_basepoint_witness(necklace_rep: LabeledTree, new_label: str) -> LabeledTree:
    """Rename the basepoint of a pointed tree to ``new_label``.

    Seen as a derivation over the enlarged label set, the result contracts
    back to the original pointed tree.
    """
    return necklace_rep.relabel({necklace_rep.root: new_label})
