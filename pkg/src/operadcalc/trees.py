"""Labelled rooted planar trees over a set of operad generators.

A tree has a root label and a body.  The body is either a leaf (a label
string) or a tuple ``(generator, child_1, ..., child_k)`` whose length
matches the generator's arity.  Trees are immutable and hashable, so they
serve directly as basis elements of :class:`~operadcalc.linear.FormalSum`.

Text form::

    TREE := LABEL "<-" NODE
    NODE := LABEL | GEN "(" NODE ("," NODE)* ")"
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .linear import FormalSum

BASEPOINT = "+"
_NAME = r"[A-Za-z0-9_+]+"
_GEN_NAME = r"[A-Za-z0-9_+*]+"
_LABEL_RE = re.compile(rf"^{_NAME}$")
_GEN_RE = re.compile(rf"^{_GEN_NAME}$")
_TOKEN_RE = re.compile(rf"\s*(<-|\(|\)|,|{_GEN_NAME})")


class TreeError(ValueError):
    """Malformed tree text or an invalid tree operation."""


@dataclass(frozen=True, order=True)
class Generator:
    """An operad generator; ``index`` is its declaration position."""

    index: int
    name: str
    arity: int

    def __str__(self) -> str:
        return self.name


class GeneratorSet:
    """An ordered finite set of generators, each of arity at least 2."""

    def __init__(self, generators: Iterable[tuple[str, int]]):
        gens: list[Generator] = []
        seen: set[str] = set()
        for i, (name, arity) in enumerate(generators):
            if not _GEN_RE.match(name):
                raise TreeError(f"bad generator name {name!r}")
            if name in seen:
                raise TreeError(f"duplicate generator {name!r}")
            if int(arity) < 2:
                raise TreeError(f"generator {name!r} needs arity >= 2, got {arity}")
            seen.add(name)
            gens.append(Generator(i, name, int(arity)))
        if not gens:
            raise TreeError("at least one generator is required")
        self.generators: tuple[Generator, ...] = tuple(gens)
        self._by_name = {g.name: g for g in gens}

    @classmethod
    def parse(cls, text: str) -> "GeneratorSet":
        """Parse ``"name:arity[,name:arity]"``."""
        pairs = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, arity = part.rpartition(":")
            if not sep or not arity.strip().isdigit():
                raise TreeError(f"bad generator declaration {part!r}")
            pairs.append((name.strip(), int(arity)))
        return cls(pairs)

    @classmethod
    def binary(cls, name: str = "*") -> "GeneratorSet":
        return cls([(name, 2)])

    @property
    def is_binary(self) -> bool:
        return all(g.arity == 2 for g in self.generators)

    def __getitem__(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise TreeError(f"unknown generator {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GeneratorSet) and self.generators == other.generators

    def __hash__(self) -> int:
        return hash(self.generators)

    def __str__(self) -> str:
        return ",".join(f"{g.name}:{g.arity}" for g in self.generators)


Node = Union[str, tuple]


def _node_text(node: Node) -> str:
    if isinstance(node, str):
        return node
    return f"{node[0].name}(" + ",".join(_node_text(c) for c in node[1:]) + ")"


def _node_tokens(node: Node, out: list) -> None:
    if isinstance(node, str):
        out.append((1, 0, node))
    else:
        out.append((0, node[0].index, ""))
        for c in node[1:]:
            _node_tokens(c, out)


def _node_leaves(node: Node, out: list) -> None:
    if isinstance(node, str):
        out.append(node)
    else:
        for c in node[1:]:
            _node_leaves(c, out)


def _node_internal(node: Node) -> int:
    if isinstance(node, str):
        return 0
    return 1 + sum(_node_internal(c) for c in node[1:])


class LabeledTree:
    """A rooted planar tree with labelled root and leaves."""

    __slots__ = ("root", "node", "_hash", "_leaves", "_sort", "_internal")

    def __init__(self, root: str, node: Node):
        self.root = root
        self.node = node
        self._hash = hash((root, node))
        self._leaves: tuple[str, ...] | None = None
        self._sort: tuple | None = None
        self._internal: int | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return self._hash == other._hash and self.root == other.root and self.node == other.node

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self) -> tuple:
        if self._sort is None:
            toks: list = []
            _node_tokens(self.node, toks)
            self._sort = (self.root, tuple(toks))
        return self._sort

    def __lt__(self, other: "LabeledTree") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "LabeledTree") -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: "LabeledTree") -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: "LabeledTree") -> bool:
        return self.sort_key() >= other.sort_key()

    @property
    def leaves(self) -> tuple[str, ...]:
        if self._leaves is None:
            out: list[str] = []
            _node_leaves(self.node, out)
            self._leaves = tuple(out)
        return self._leaves

    @property
    def internal_count(self) -> int:
        if self._internal is None:
            self._internal = _node_internal(self.node)
        return self._internal

    @property
    def degree(self) -> int:
        """Number of leaves minus one (equals the internal count for binary trees)."""
        return len(self.leaves) - 1

    @property
    def is_degenerate(self) -> bool:
        return isinstance(self.node, str)

    def labels(self) -> set[str]:
        return {self.root, *self.leaves}

    def weight(self) -> "Weight":
        """Leaf label multiset minus the root label, as a sparse sorted tuple."""
        counts: dict[str, int] = {}
        for leaf in self.leaves:
            counts[leaf] = counts.get(leaf, 0) + 1
        counts[self.root] = counts.get(self.root, 0) - 1
        return tuple(sorted((k, v) for k, v in counts.items() if v))

    def with_root(self, root: str) -> "LabeledTree":
        return LabeledTree(root, self.node)

    def relabel(self, mapping: dict[str, str]) -> "LabeledTree":
        """Apply a label map to the root and to every leaf."""
        return LabeledTree(mapping.get(self.root, self.root), _relabel(self.node, mapping))

    def key(self) -> str:
        return canonical_key(self)

    def __str__(self) -> str:
        return canonical_key(self)

    def __repr__(self) -> str:
        return f"LabeledTree({canonical_key(self)!r})"


Weight = tuple


def _relabel(node: Node, mapping: dict[str, str]) -> Node:
    if isinstance(node, str):
        return mapping.get(node, node)
    return (node[0],) + tuple(_relabel(c, mapping) for c in node[1:])


def canonical_key(t: LabeledTree) -> str:
    """Whitespace-free text form; parsing it gives back ``t``."""
    return f"{t.root}<-{_node_text(t.node)}"


def _tokenize(text: str) -> list[str]:
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TreeError(f"unexpected character at position {pos} in {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def make_tree(gens: GeneratorSet, serialized: str) -> LabeledTree:
    """Parse tree text, checking generator names and arities."""
    tokens = _tokenize(serialized)
    if len(tokens) < 3 or tokens[1] != "<-":
        raise TreeError(f"expected LABEL<-NODE, got {serialized!r}")
    root = tokens[0]
    if not _LABEL_RE.match(root):
        raise TreeError(f"bad root label {root!r}")
    pos = 2

    def parse_node() -> Node:
        nonlocal pos
        if pos >= len(tokens):
            raise TreeError(f"unexpected end of input in {serialized!r}")
        tok = tokens[pos]
        pos += 1
        if pos < len(tokens) and tokens[pos] == "(":
            gen = gens[tok]
            pos += 1
            children = [parse_node()]
            while pos < len(tokens) and tokens[pos] == ",":
                pos += 1
                children.append(parse_node())
            if pos >= len(tokens) or tokens[pos] != ")":
                raise TreeError(f"missing ')' in {serialized!r}")
            pos += 1
            if len(children) != gen.arity:
                raise TreeError(
                    f"generator {gen.name!r} has arity {gen.arity}, got {len(children)} children"
                )
            return (gen, *children)
        if not _LABEL_RE.match(tok):
            raise TreeError(f"bad leaf label {tok!r}")
        return tok

    node = parse_node()
    if pos != len(tokens):
        raise TreeError(f"trailing input in {serialized!r}")
    return LabeledTree(root, node)


def degenerate(root: str, leaf: str | None = None) -> LabeledTree:
    """The tree with no internal vertex, ``root<-leaf``."""
    return LabeledTree(root, root if leaf is None else leaf)


# Grafting -----------------------------------------------------------------


def _count_leaves(node: Node) -> int:
    if isinstance(node, str):
        return 1
    return sum(_count_leaves(c) for c in node[1:])


def _replace_leaf(node: Node, index: int, sub: Node) -> Node:
    if isinstance(node, str):
        return sub
    children = list(node[1:])
    for i, c in enumerate(children):
        n = _count_leaves(c)
        if index < n:
            children[i] = _replace_leaf(c, index, sub)
            return (node[0], *children)
        index -= n
    raise TreeError("leaf index out of range")


def graft(t1: LabeledTree, leaf_index: int, t2: LabeledTree) -> LabeledTree:
    """Graft the root of ``t2`` onto leaf ``leaf_index`` (1-based) of ``t1``."""
    if not 1 <= leaf_index <= len(t1.leaves):
        raise TreeError(f"leaf index {leaf_index} out of range 1..{len(t1.leaves)}")
    return LabeledTree(t1.root, _replace_leaf(t1.node, leaf_index - 1, t2.node))


def _graft_all(node: Node, label: str, sub: Node) -> Iterator[Node]:
    if isinstance(node, str):
        if node == label:
            yield sub
        return
    for i in range(1, len(node)):
        for new in _graft_all(node[i], label, sub):
            yield node[:i] + (new,) + node[i + 1:]


@lru_cache(maxsize=1 << 18)
def graft_matching_trees(t1: LabeledTree, t2: LabeledTree) -> tuple[LabeledTree, ...]:
    """All graftings of ``t2`` at leaves of ``t1`` labelled ``root(t2)``, in leaf order."""
    if t2.root not in t1.leaves:
        return ()
    return tuple(LabeledTree(t1.root, n) for n in _graft_all(t1.node, t2.root, t2.node))


def graft_matching(t1: LabeledTree, t2: LabeledTree) -> FormalSum:
    """The preLie product of two basis trees as a formal sum."""
    return FormalSum((t, 1) for t in graft_matching_trees(t1, t2))


# Pruning ------------------------------------------------------------------


def internal_edges(t: LabeledTree) -> list[tuple[int, ...]]:
    """Edges joining two internal vertices, named by the child-index path to the lower vertex."""
    out: list[tuple[int, ...]] = []

    def walk(node: Node, path: tuple[int, ...]) -> None:
        if isinstance(node, str):
            return
        if path:
            out.append(path)
        for i, c in enumerate(node[1:]):
            walk(c, path + (i,))

    walk(t.node, ())
    return out


def _subtree(node: Node, path: Sequence[int]) -> Node:
    for i in path:
        if isinstance(node, str) or i >= len(node) - 1:
            raise TreeError(f"path {tuple(path)} does not name a vertex")
        node = node[i + 1]
    return node


def _replace_subtree(node: Node, path: Sequence[int], sub: Node) -> Node:
    if not path:
        return sub
    i = path[0]
    return node[: i + 1] + (_replace_subtree(node[i + 1], path[1:], sub),) + node[i + 2:]


def prune(t: LabeledTree, internal_edge: Sequence[int]) -> tuple[LabeledTree, LabeledTree]:
    """Cut ``t`` along an internal edge into a lower and an upper tree.

    The cut is labelled by the fresh symbol ``+``: the lower tree keeps the
    root and gains a ``+`` leaf, the upper tree has root ``+``.
    """
    if BASEPOINT in t.labels():
        raise TreeError("tree already uses the reserved label '+'")
    if t.internal_count < 2:
        raise TreeError("pruning needs at least two internal vertices")
    path = tuple(internal_edge)
    if not path:
        raise TreeError("the root has no incoming internal edge")
    sub = _subtree(t.node, path)
    if isinstance(sub, str):
        raise TreeError("edge ends at a leaf, not an internal vertex")
    lower = LabeledTree(t.root, _replace_subtree(t.node, path, BASEPOINT))
    upper = LabeledTree(BASEPOINT, sub)
    return lower, upper


# Classification -----------------------------------------------------------


class TreeKind(enum.Enum):
    DISJOINT = "Disjoint"
    POINTED_NOT_SPECIAL = "PointedNotSpecial"
    SPECIAL_POINTED = "SpecialPointed"
    OTHER = "Other"


@dataclass(frozen=True)
class TreeClass:
    """Classification of a tree; ``spine`` counts internal vertices on the
    path from the root to the unique root-labelled leaf (pointed trees only)."""

    kind: TreeKind
    spine: int | None = None

    @property
    def pointed(self) -> bool:
        return self.kind in (TreeKind.SPECIAL_POINTED, TreeKind.POINTED_NOT_SPECIAL)


def marked_leaf_path(t: LabeledTree, label: str | None = None) -> list[tuple[Node, int]] | None:
    """Internal vertices (with the child index taken) from the root down to
    the unique leaf labelled ``label`` (default: the root label)."""
    label = t.root if label is None else label
    if t.leaves.count(label) != 1:
        return None
    path: list[tuple[Node, int]] = []
    node = t.node
    while not isinstance(node, str):
        for i, c in enumerate(node[1:]):
            leaves: list[str] = []
            _node_leaves(c, leaves)
            if label in leaves:
                path.append((node, i))
                node = c
                break
    return path


def classify(t: LabeledTree) -> TreeClass:
    count = t.leaves.count(t.root)
    if count == 0:
        return TreeClass(TreeKind.DISJOINT)
    if count > 1:
        return TreeClass(TreeKind.OTHER)
    spine = len(marked_leaf_path(t))
    kind = TreeKind.SPECIAL_POINTED if spine <= 1 else TreeKind.POINTED_NOT_SPECIAL
    return TreeClass(kind, spine)


# Enumeration --------------------------------------------------------------


@lru_cache(maxsize=None)
def shapes_by_internal(gens: GeneratorSet, n_internal: int) -> tuple[Node, ...]:
    """Planar shapes with ``n_internal`` vertices; leaves are ``None``."""
    if n_internal == 0:
        return (None,)
    out: list[Node] = []
    for g in gens:
        for split in _compositions(n_internal - 1, g.arity):
            for kids in itertools.product(*(shapes_by_internal(gens, k) for k in split)):
                out.append((g, *kids))
    return tuple(out)


@lru_cache(maxsize=None)
def shapes_by_leaves(gens: GeneratorSet, n_leaves: int) -> tuple[Node, ...]:
    """Planar shapes with ``n_leaves`` leaves; leaves are ``None``."""
    if n_leaves == 1:
        return (None,)
    out: list[Node] = []
    for g in gens:
        if g.arity > n_leaves:
            continue
        for split in _compositions(n_leaves - g.arity, g.arity):
            for kids in itertools.product(*(shapes_by_leaves(gens, k + 1) for k in split)):
                out.append((g, *kids))
    return tuple(out)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def fill_shape(shape: Node, labels: Iterator[str]) -> Node:
    if shape is None:
        return next(labels)
    return (shape[0], *(fill_shape(c, labels) for c in shape[1:]))


def _shape_leaf_count(shape: Node) -> int:
    if shape is None:
        return 1
    return sum(_shape_leaf_count(c) for c in shape[1:])


def enumerate_trees(
    labels: Sequence[str],
    gens: GeneratorSet,
    n_internal: int,
    root_filter: str | None = None,
    class_filter: TreeKind | None = None,
) -> list[LabeledTree]:
    """Every tree with ``n_internal`` internal vertices, in canonical order."""
    if n_internal < 0:
        raise TreeError("n_internal must be non-negative")
    labels = sorted(set(labels))
    roots = [root_filter] if root_filter is not None else labels
    out: list[LabeledTree] = []
    for shape in shapes_by_internal(gens, n_internal):
        k = _shape_leaf_count(shape)
        for leaf_labels in itertools.product(labels, repeat=k):
            node = fill_shape(shape, iter(leaf_labels))
            for r in roots:
                t = LabeledTree(r, node)
                if class_filter is None or classify(t).kind == class_filter:
                    out.append(t)
    out.sort(key=LabeledTree.sort_key)
    return out


def trees_with_content(
    gens: GeneratorSet, root: str, leaf_content: dict[str, int]
) -> list[LabeledTree]:
    """All trees with the given root whose leaf-label multiset is ``leaf_content``."""
    letters: list[str] = []
    for k in sorted(leaf_content):
        letters.extend([k] * leaf_content[k])
    n = len(letters)
    if n == 0:
        return []
    arrangements = _distinct_permutations(tuple(letters))
    out = []
    for shape in shapes_by_leaves(gens, n):
        for arr in arrangements:
            out.append(LabeledTree(root, fill_shape(shape, iter(arr))))
    return out


@lru_cache(maxsize=4096)
def _distinct_permutations(letters: tuple[str, ...]) -> tuple[tuple[str, ...], ...]:
    return tuple(sorted(set(itertools.permutations(letters))))


def weight_component(
    labels: Sequence[str], gens: GeneratorSet, degree: int, weight: Weight
) -> list[LabeledTree]:
    """Trees of the given degree (leaves minus one) and weight, in canonical order.

    The weight of a tree is its leaf-label multiset minus its root label.
    """
    w = dict(weight)
    if sum(w.values()) != degree:
        return []
    out: list[LabeledTree] = []
    for r in labels:
        content = dict(w)
        content[r] = content.get(r, 0) + 1
        if any(v < 0 for v in content.values()):
            continue
        if any(k not in labels for k, v in content.items() if v):
            continue
        out.extend(trees_with_content(gens, r, {k: v for k, v in content.items() if v}))
    out.sort(key=LabeledTree.sort_key)
    return out


def weight_add(a: Weight, b: Weight, sign: int = 1) -> Weight:
    acc = dict(a)
    for k, v in b:
        acc[k] = acc.get(k, 0) + sign * v
    return tuple(sorted((k, v) for k, v in acc.items() if v))
