"""Derivations of free operad algebras on tree bases.

A derivation over a label set ``S`` is a formal sum of ``S``-labelled trees;
a tree with root ``x`` sends the generator ``x`` to the operad element given
by its body.  The preLie product grafts the second tree onto matching leaves
of the first.

Pointed derivations (trees whose root label occurs exactly once among the
leaves) form an associative algebra under grafting at the marked leaf.  That
algebra is free on special pointed trees, so its quotient by commutators has
a basis of necklaces: cyclic sequences of special pointed factors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linear import FormalSum
from .trees import (
    BASEPOINT,
    GeneratorSet,
    LabeledTree,
    TreeError,
    classify,
    degenerate,
    enumerate_trees,
    graft_matching_trees,
    make_tree,
    marked_leaf_path,
)

_STAB_RE = re.compile(r"^\+(\d+)$")


class ContextError(ValueError):
    """Operands live over different label sets or generator sets."""


@dataclass(frozen=True)
class Context:
    """A label set together with the generators of the free operad."""

    labels: tuple[str, ...]
    gens: GeneratorSet

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(sorted(set(self.labels))))

    @classmethod
    def user(cls, labels: Iterable[str], gens: GeneratorSet) -> "Context":
        """A context built from user input, where ``+``-labels are reserved."""
        labels = list(labels)
        for lab in labels:
            if lab.startswith("+"):
                raise ContextError(f"label {lab!r} is reserved")
            if not re.match(r"^[A-Za-z0-9_]+$", lab):
                raise ContextError(f"bad label {lab!r}")
        if len(set(labels)) != len(labels):
            raise ContextError("duplicate labels")
        return cls(tuple(labels), gens)

    def with_basepoint(self, basepoint: str = BASEPOINT) -> "Context":
        if basepoint in self.labels:
            raise ContextError(f"label {basepoint!r} already present")
        return Context(self.labels + (basepoint,), self.gens)

    def without(self, label: str) -> "Context":
        return Context(tuple(x for x in self.labels if x != label), self.gens)

    def stabilized(self, n: int) -> "Context":
        return Context(self.labels + tuple(fresh_labels(self.labels, n)), self.gens)

    def parse(self, text: str) -> LabeledTree:
        t = make_tree(self.gens, text)
        extra = t.labels() - set(self.labels)
        if extra:
            raise ContextError(f"labels {sorted(extra)} not in {list(self.labels)}")
        return t


def fresh_labels(existing: Sequence[str], n: int) -> list[str]:
    """The next ``n`` stabilization symbols ``+k`` not yet in ``existing``."""
    used = [int(m.group(1)) for m in map(_STAB_RE.match, existing) if m]
    start = max(used, default=0)
    return [f"+{start + i}" for i in range(1, n + 1)]


def _check_same(a: Context, b: Context) -> None:
    if a != b:
        raise ContextError(f"context mismatch: {a.labels} vs {b.labels}")


# Sum-level kernels ---------------------------------------------------------


def prelie_sum(a: FormalSum, b: FormalSum) -> FormalSum:
    """Bilinear extension of grafting at matching leaves."""
    acc: dict[LabeledTree, Fraction] = {}
    for t1, c1 in a.items():
        leaves = t1.leaves
        for t2, c2 in b.items():
            if t2.root not in leaves:
                continue
            c = c1 * c2
            for t in graft_matching_trees(t1, t2):
                total = acc.get(t, 0) + c
                if total:
                    acc[t] = total
                else:
                    del acc[t]
    return FormalSum._raw(acc)


def bracket_sum(a: FormalSum, b: FormalSum) -> FormalSum:
    return prelie_sum(a, b) - prelie_sum(b, a)


def homogeneous_part(a: FormalSum, degree: int) -> FormalSum:
    return a.filter(lambda t: t.degree == degree)


# Wrapped values ------------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    """A derivation of the free algebra on ``ctx.labels``."""

    ctx: Context
    value: FormalSum

    @classmethod
    def from_trees(cls, ctx: Context, trees: Iterable[LabeledTree | str | tuple]) -> "Derivation":
        """Build from trees, tree texts, or ``(coefficient, tree)`` pairs."""
        terms = []
        for item in trees:
            coeff, t = (item if isinstance(item, tuple) else (1, item))
            if isinstance(t, str):
                t = ctx.parse(t)
            elif not t.labels() <= set(ctx.labels):
                raise ContextError(f"tree {t} uses labels outside {ctx.labels}")
            terms.append((t, coeff))
        return cls(ctx, FormalSum(terms))

    @classmethod
    def zero(cls, ctx: Context) -> "Derivation":
        return cls(ctx, FormalSum.zero())

    @classmethod
    def identity(cls, ctx: Context) -> "Derivation":
        """Sum of the degenerate trees ``x<-x``."""
        return cls(ctx, FormalSum((degenerate(x), 1) for x in ctx.labels))

    def __add__(self, other: "Derivation") -> "Derivation":
        _check_same(self.ctx, other.ctx)
        return Derivation(self.ctx, self.value + other.value)

    def __sub__(self, other: "Derivation") -> "Derivation":
        _check_same(self.ctx, other.ctx)
        return Derivation(self.ctx, self.value - other.value)

    def __neg__(self) -> "Derivation":
        return Derivation(self.ctx, -self.value)

    def __mul__(self, c) -> "Derivation":
        return Derivation(self.ctx, self.value * c)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.value)

    def degrees(self) -> list[int]:
        return sorted({t.degree for t in self.value})

    def homogeneous(self, degree: int) -> "Derivation":
        return Derivation(self.ctx, homogeneous_part(self.value, degree))

    def positive(self) -> "Derivation":
        return Derivation(self.ctx, self.value.filter(lambda t: t.degree >= 1))

    def __str__(self) -> str:
        return self.value.to_text()


@dataclass(frozen=True)
class PointedDerivation:
    """A sum of pointed trees with root ``basepoint``."""

    ctx: Context
    basepoint: str
    value: FormalSum

    def __post_init__(self) -> None:
        for t in self.value:
            if t.root != self.basepoint or t.leaves.count(self.basepoint) != 1:
                raise TreeError(f"{t} is not pointed at {self.basepoint!r}")

    def __add__(self, other: "PointedDerivation") -> "PointedDerivation":
        self._check(other)
        return PointedDerivation(self.ctx, self.basepoint, self.value + other.value)

    def __sub__(self, other: "PointedDerivation") -> "PointedDerivation":
        self._check(other)
        return PointedDerivation(self.ctx, self.basepoint, self.value - other.value)

    def __mul__(self, c) -> "PointedDerivation":
        return PointedDerivation(self.ctx, self.basepoint, self.value * c)

    __rmul__ = __mul__

    def _check(self, other: "PointedDerivation") -> None:
        _check_same(self.ctx, other.ctx)
        if self.basepoint != other.basepoint:
            raise ContextError("basepoint mismatch")

    def forget_basepoint(self) -> Derivation:
        return Derivation(self.ctx, self.value)

    def __str__(self) -> str:
        return self.value.to_text()


class Necklace:
    """A cyclic sequence of special pointed factors, stored at its minimal rotation."""

    __slots__ = ("factors", "_hash", "_sort")

    def __init__(self, factors: Sequence[LabeledTree]):
        self.factors = minimal_rotation(tuple(factors))
        self._hash = hash(self.factors)
        self._sort = tuple(f.sort_key() for f in self.factors)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Necklace) and self.factors == other.factors

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self) -> tuple:
        return (len(self.factors), self._sort)

    def __lt__(self, other: "Necklace") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.factors)

    def weight(self) -> tuple:
        """Leaf labels other than the basepoint, as a sparse sorted multiset."""
        counts: dict[str, int] = {}
        for f in self.factors:
            for leaf in f.leaves:
                if leaf != f.root:
                    counts[leaf] = counts.get(leaf, 0) + 1
        return tuple(sorted(counts.items()))

    def representative(self, basepoint: str = BASEPOINT) -> LabeledTree:
        return product_of_factors(self.factors, basepoint)

    def __str__(self) -> str:
        return "(" + "|".join(str(f) for f in self.factors) + ")"

    def __repr__(self) -> str:
        return f"Necklace({self})"


def minimal_rotation(seq: tuple[LabeledTree, ...]) -> tuple[LabeledTree, ...]:
    if len(seq) <= 1:
        return seq
    keys = [t.sort_key() for t in seq]
    best = min(range(len(seq)), key=lambda i: keys[i:] + keys[:i])
    return seq[best:] + seq[:best]


def parse_necklace(ctx: Context, text: str) -> Necklace:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise TreeError(f"necklace must be parenthesised: {text!r}")
    inner = text[1:-1]
    if not inner:
        return Necklace(())
    parts = inner.split("|")
    return Necklace([make_tree(ctx.gens, p) for p in parts])


@dataclass(frozen=True)
class TraceElement:
    """An element of the commutator quotient of pointed derivations."""

    ctx: Context
    basepoint: str
    value: FormalSum

    def __add__(self, other: "TraceElement") -> "TraceElement":
        _check_same(self.ctx, other.ctx)
        return TraceElement(self.ctx, self.basepoint, self.value + other.value)

    def __sub__(self, other: "TraceElement") -> "TraceElement":
        _check_same(self.ctx, other.ctx)
        return TraceElement(self.ctx, self.basepoint, self.value - other.value)

    def __neg__(self) -> "TraceElement":
        return TraceElement(self.ctx, self.basepoint, -self.value)

    def __mul__(self, c) -> "TraceElement":
        return TraceElement(self.ctx, self.basepoint, self.value * c)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.value)

    def __str__(self) -> str:
        return self.value.to_text()


# Operations ----------------------------------------------------------------


def prelie(d: Derivation, e: Derivation) -> Derivation:
    _check_same(d.ctx, e.ctx)
    return Derivation(d.ctx, prelie_sum(d.value, e.value))


def bracket(d: Derivation, e: Derivation) -> Derivation:
    _check_same(d.ctx, e.ctx)
    return Derivation(d.ctx, bracket_sum(d.value, e.value))


def pointed_unit(ctx: Context, basepoint: str) -> PointedDerivation:
    if basepoint not in ctx.labels:
        raise ContextError(f"basepoint {basepoint!r} not in labels")
    return PointedDerivation(ctx, basepoint, FormalSum.basis(degenerate(basepoint)))


def pointed_product_sum(p: FormalSum, q: FormalSum) -> FormalSum:
    """Graft each tree of ``q`` at the unique root-labelled leaf of each tree of ``p``."""
    return prelie_sum(p, q)


def pointed_product(p: PointedDerivation, q: PointedDerivation) -> PointedDerivation:
    p._check(q)
    return PointedDerivation(p.ctx, p.basepoint, pointed_product_sum(p.value, q.value))


def spine_factorize(p: LabeledTree) -> list[LabeledTree]:
    """Cut a pointed tree along its spine into special pointed factors.

    The factors are listed from the root upwards, and grafting them in order
    at the marked leaf rebuilds ``p``.
    """
    path = marked_leaf_path(p)
    if path is None:
        raise TreeError(f"{p} is not pointed")
    z = p.root
    factors = []
    for node, i in path:
        factors.append(LabeledTree(z, node[: i + 1] + (z,) + node[i + 2:]))
    return factors


def product_of_factors(factors: Sequence[LabeledTree], basepoint: str) -> LabeledTree:
    """Inverse of :func:`spine_factorize`."""
    node: object = basepoint
    for f in reversed(factors):
        if f.root != basepoint:
            raise TreeError(f"factor {f} is not rooted at {basepoint!r}")
        (t,) = graft_matching_trees(f, LabeledTree(basepoint, node)) or (None,)
        if t is None:
            raise TreeError(f"factor {f} has no {basepoint!r} leaf")
        node = t.node
    return LabeledTree(basepoint, node)


def necklace_of(t: LabeledTree) -> Necklace:
    return Necklace(spine_factorize(t))


def trace_class_sum(p: FormalSum) -> FormalSum:
    acc: dict[Necklace, Fraction] = {}
    for t, c in p.items():
        n = necklace_of(t)
        total = acc.get(n, 0) + c
        if total:
            acc[n] = total
        else:
            del acc[n]
    return FormalSum._raw(acc)


def trace_class(p: PointedDerivation) -> TraceElement:
    return TraceElement(p.ctx, p.basepoint, trace_class_sum(p.value))


def act_sum(t: FormalSum, d: FormalSum, basepoint: str = BASEPOINT) -> FormalSum:
    """Right action of derivations on necklace sums.

    Each necklace is lifted to the product of its factors, the derivation
    is grafted onto the non-basepoint leaves, and the result is taken back to
    necklaces.
    """
    if any(tree.root == basepoint for tree in d):
        raise ContextError("acting derivation uses the basepoint label")
    lifted = FormalSum._raw({n.representative(basepoint): c for n, c in t.items()})
    return trace_class_sum(prelie_sum(lifted, d))


def act(t: TraceElement, d: Derivation) -> TraceElement:
    if not set(d.ctx.labels) <= set(t.ctx.labels) - {t.basepoint}:
        raise ContextError("derivation labels must avoid the basepoint")
    return TraceElement(t.ctx, t.basepoint, act_sum(t.value, d.value, t.basepoint))


def stabilize(d: Derivation, n: int) -> Derivation:
    """Image of ``d`` under adding ``n`` fresh generators (trees are unchanged)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return Derivation(d.ctx.stabilized(n), d.value)


def retract(d: Derivation, labels: Sequence[str]) -> Derivation:
    """Retraction onto a smaller label set: new generators map to zero.

    Trees whose root or leaves use a removed label are dropped.
    """
    keep = set(labels)
    if not keep <= set(d.ctx.labels):
        raise ContextError("retraction target must be a subset of the labels")
    return Derivation(
        Context(tuple(keep), d.ctx.gens),
        d.value.filter(lambda t: t.labels() <= keep),
    )


def pointed_basis(ctx: Context, basepoint: str, degree: int) -> list[LabeledTree]:
    """Pointed trees with root ``basepoint`` and the given number of internal vertices."""
    return [
        t
        for t in enumerate_trees(ctx.labels, ctx.gens, degree, root_filter=basepoint)
        if classify(t).pointed
    ]


def necklace_basis(ctx: Context, basepoint: str, degree: int) -> list[Necklace]:
    """Distinct necklaces of pointed trees of the given degree."""
    return sorted({necklace_of(t) for t in pointed_basis(ctx, basepoint, degree)})
