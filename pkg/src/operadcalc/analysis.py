"""Generated subalgebras, divergence kernels, torsion and theorem suites.

Every space here splits by degree and by *weight*: the leaf-label multiset of
a tree minus its root label, or the letter content of ``x -> m`` minus ``x``.
Products, brackets, divergence and the action all add weights, so each
computation only touches one weight component at a time.  Adding fresh
labels leaves existing basis elements unchanged, which makes FI torsion a
membership question in a larger model.

A *model* packages one family of derivation algebras (free operad trees, or
the Lie, Ass and Com realizations) behind a common interface used by the
generic routines in this module.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Sequence

from . import classical as cl
from .divergence import div_sum
from .freeder import (
    Context,
    Necklace,
    act_sum,
    bracket_sum,
    fresh_labels,
    necklace_of,
    pointed_basis,
    prelie_sum,
    product_of_factors,
    spine_factorize,
    trace_class_sum,
)
from .linear import FormalSum, Subspace, direct_sum, kernel
from .trees import (
    BASEPOINT,
    GeneratorSet,
    LabeledTree,
    TreeKind,
    enumerate_trees,
    trees_with_content,
    weight_add,
)

Weight = tuple


class BudgetExceeded(RuntimeError):
    """A computation ran past its time budget."""

    def __init__(self, message: str, partial: "SuiteReport | None" = None):
        super().__init__(message)
        self.partial = partial


class Budget:
    """Wall-clock budget checked cooperatively inside long loops."""

    def __init__(self, ms: int | None = None):
        self.ms = ms
        self.start = time.monotonic()

    def elapsed_ms(self) -> int:
        return int((time.monotonic() - self.start) * 1000)

    def check(self) -> None:
        if self.ms is not None and self.elapsed_ms() > self.ms:
            raise BudgetExceeded(f"budget of {self.ms} ms exceeded")


_UNLIMITED = Budget(None)


def _basis_vector(key: Any) -> FormalSum:
    return FormalSum.basis(key)


def split_by_weight(x: FormalSum, weight_of: Callable[[Any], Weight]) -> dict[Weight, FormalSum]:
    groups: dict[Weight, dict] = {}
    for k, c in x.items():
        groups.setdefault(weight_of(k), {})[k] = c
    return {w: FormalSum._raw(t) for w, t in groups.items()}


# Models -----------------------------------------------------------------------


class Model:
    """Common interface over derivation algebras graded by degree and weight."""

    name = "abstract"
    labels: tuple[str, ...]

    # --- to be provided by subclasses
    def _der_basis(self, degree: int, weight: Weight) -> list: ...
    def der_weight(self, key: Any) -> Weight: ...
    def der_degree(self, key: Any) -> int: ...
    def prelie(self, a: FormalSum, b: FormalSum) -> FormalSum: ...
    def bracket(self, a: FormalSum, b: FormalSum) -> FormalSum: ...
    def div(self, x: FormalSum) -> FormalSum: ...
    def act(self, t: FormalSum, e: FormalSum) -> FormalSum: ...
    def trace_weight(self, key: Any) -> Weight: ...
    def _trace_basis(self, degree: int, weight: Weight) -> list: ...
    def special_generators(self) -> list[FormalSum]: ...
    def stabilized(self, n: int) -> "Model": ...

    def __init__(self) -> None:
        self._der_cache: dict = {}
        self._trace_cache: dict = {}
        self._derlie: dict = {}
        self._derpl: dict = {}
        self._weights: dict = {}

    # --- shared
    def der_basis(self, degree: int, weight: Weight) -> list:
        key = (degree, weight)
        if key not in self._der_cache:
            self._der_cache[key] = self._der_basis(degree, weight)
        return self._der_cache[key]

    def trace_basis(self, degree: int, weight: Weight) -> list:
        key = (degree, weight)
        if key not in self._trace_cache:
            self._trace_cache[key] = self._trace_basis(degree, weight)
        return self._trace_cache[key]

    def weights(self, degree: int) -> list[Weight]:
        """Weights with a nonempty degree component (derivation side)."""
        if degree not in self._weights:
            found = set()
            for r in self.labels:
                for combo in itertools.combinations_with_replacement(self.labels, degree + 1):
                    counts: dict[str, int] = {}
                    for a in combo:
                        counts[a] = counts.get(a, 0) + 1
                    counts[r] = counts.get(r, 0) - 1
                    w = tuple(sorted((k, v) for k, v in counts.items() if v))
                    found.add(w)
            self._weights[degree] = sorted(w for w in found if self.der_basis(degree, w))
        return self._weights[degree]

    def trace_weights(self, degree: int) -> list[Weight]:
        out = []
        for combo in itertools.combinations_with_replacement(self.labels, degree):
            counts: dict[str, int] = {}
            for a in combo:
                counts[a] = counts.get(a, 0) + 1
            w = tuple(sorted(counts.items()))
            if self.trace_basis(degree, w):
                out.append(w)
        return out

    def der_dim(self, degree: int) -> int:
        return sum(len(self.der_basis(degree, w)) for w in self.weights(degree))

    def full_space(self, degree: int, weight: Weight) -> Subspace:
        return Subspace((_basis_vector(k) for k in self.der_basis(degree, weight)))

    def split(self, x: FormalSum) -> dict[tuple[int, Weight], FormalSum]:
        groups: dict[tuple[int, Weight], dict] = {}
        for k, c in x.items():
            groups.setdefault((self.der_degree(k), self.der_weight(k)), {})[k] = c
        return {g: FormalSum._raw(t) for g, t in groups.items()}

    def split_trace(self, t: FormalSum) -> dict[Weight, FormalSum]:
        return split_by_weight(t, self.trace_weight)


class FreeModel(Model):
    """Derivations of the free operad algebra on a label set."""

    name = "free"

    def __init__(self, labels: Sequence[str], gens: GeneratorSet):
        super().__init__()
        self.labels = tuple(sorted(set(labels)))
        self.gens = gens
        self.ctx = Context(self.labels, gens)

    def _der_basis(self, degree: int, weight: Weight) -> list:
        w = dict(weight)
        if sum(w.values()) != degree or any(k not in self.labels for k in w):
            return []
        out = []
        for r in self.labels:
            c = dict(w)
            c[r] = c.get(r, 0) + 1
            if any(v < 0 for v in c.values()):
                continue
            out.extend(trees_with_content(self.gens, r, {k: v for k, v in c.items() if v}))
        out.sort(key=LabeledTree.sort_key)
        return out

    def der_weight(self, key: LabeledTree) -> Weight:
        return key.weight()

    def der_degree(self, key: LabeledTree) -> int:
        return key.degree

    def prelie(self, a: FormalSum, b: FormalSum) -> FormalSum:
        return prelie_sum(a, b)

    def bracket(self, a: FormalSum, b: FormalSum) -> FormalSum:
        return bracket_sum(a, b)

    def div(self, x: FormalSum) -> FormalSum:
        return div_sum(x)

    def act(self, t: FormalSum, e: FormalSum) -> FormalSum:
        return act_sum(t, e)

    def trace_weight(self, key: Necklace) -> Weight:
        return key.weight()

    def _trace_basis(self, degree: int, weight: Weight) -> list:
        w = dict(weight)
        if sum(w.values()) != degree or any(v < 0 for v in w.values()):
            return []
        w[BASEPOINT] = 1
        trees = trees_with_content(self.gens, BASEPOINT, w)
        return sorted({necklace_of(t) for t in trees})

    def special_generators(self) -> list[FormalSum]:
        out = []
        for t in pointed_basis(self.ctx.with_basepoint(), BASEPOINT, 1):
            out.append(trace_class_sum(FormalSum.basis(t)))
        return out

    def stabilized(self, n: int) -> "FreeModel":
        if n == 0:
            return self
        return free_model(self.labels + tuple(fresh_labels(self.labels, n)), self.gens)

    def format_key(self, key: Any) -> str:
        return str(key)


@lru_cache(maxsize=64)
def free_model(labels: tuple[str, ...], gens: GeneratorSet) -> FreeModel:
    return FreeModel(labels, gens)


class ClassicalModel(Model):
    """Derivations of the free Lie, associative or commutative algebra."""

    def __init__(self, tag: str, alphabet: Sequence[str]):
        super().__init__()
        if tag not in cl.TAGS:
            raise ValueError(f"unknown tag {tag!r}")
        self.tag = tag
        self.name = tag
        self.labels = tuple(sorted(set(alphabet)))

    def _der_basis(self, degree: int, weight: Weight) -> list:
        return cl.derivation_basis(self.tag, self.labels, degree, weight)

    def der_weight(self, key: tuple) -> Weight:
        return cl.basis_weight(key)

    def der_degree(self, key: tuple) -> int:
        return len(key[1]) - 1

    def prelie(self, a: FormalSum, b: FormalSum) -> FormalSum:
        return cl.prelie_value(self.tag, a, b)

    def bracket(self, a: FormalSum, b: FormalSum) -> FormalSum:
        return cl.bracket_value(self.tag, a, b)

    def div(self, x: FormalSum) -> FormalSum:
        return cl.div_value(self.tag, x)

    def act(self, t: FormalSum, e: FormalSum) -> FormalSum:
        return cl.act_value(self.tag, t, e)

    def trace_weight(self, key: Any) -> Weight:
        return cl.trace_weight(self.tag, key)

    def _trace_basis(self, degree: int, weight: Weight) -> list:
        return cl.trace_basis(self.tag, self.labels, degree, weight)

    def special_generators(self) -> list[FormalSum]:
        if self.tag == cl.ASS:
            out = []
            for a in self.labels:
                out.append(FormalSum.basis(((a,), ())))
                out.append(FormalSum.basis(((), (a,))))
            return out
        return [FormalSum.basis((a,)) for a in self.labels]

    def stabilized(self, n: int) -> "ClassicalModel":
        if n == 0:
            return self
        return classical_model(self.tag, self.labels + tuple(fresh_labels(self.labels, n)))

    def format_key(self, key: Any) -> str:
        if isinstance(key, tuple) and len(key) == 2 and isinstance(key[0], str):
            mono = cl.lyndon_bracket_text(key[1]) if self.tag == cl.LIE else cl.format_word(key[1])
            return f"{key[0]}->{mono}"
        if self.tag == cl.ASS:
            return cl.format_pair(key)
        if self.tag == cl.LIE:
            return cl.format_cyclic(key)
        return cl.format_word(key)


@lru_cache(maxsize=64)
def classical_model(tag: str, alphabet: tuple[str, ...]) -> ClassicalModel:
    return ClassicalModel(tag, alphabet)


def default_alphabet(rank: int) -> tuple[str, ...]:
    letters = "xyzuvwabcdefgh"
    if rank > len(letters):
        raise ValueError("rank too large for the default alphabet")
    return tuple(letters[:rank])


# Generated subalgebras ---------------------------------------------------------


def _degree1_weights(model: Model) -> list[Weight]:
    return model.weights(1)


def derlie_component(model: Model, degree: int, weight: Weight, budget: Budget = _UNLIMITED) -> Subspace:
    """Weight component of the Lie subalgebra generated by degree one.

    Degree ``k`` is spanned by brackets of degree ``k-1`` elements with
    degree-one basis elements.
    """
    key = (degree, weight)
    cache = model._derlie
    if key in cache:
        return cache[key]
    target = len(model.der_basis(degree, weight))
    if degree < 1 or target == 0:
        s = Subspace()
    elif degree == 1:
        s = model.full_space(1, weight)
    else:
        s = Subspace()
        for u in _degree1_weights(model):
            if s.rank >= target:
                break
            v = weight_add(weight, u, -1)
            if not model.der_basis(degree - 1, v):
                continue
            lower = derlie_component(model, degree - 1, v, budget)
            if not lower.rank:
                continue
            for b in model.der_basis(1, u):
                bv = _basis_vector(b)
                for a in lower.basis():
                    budget.check()
                    s.add(model.bracket(a, bv))
                    if s.rank >= target:
                        break
                if s.rank >= target:
                    break
    cache[key] = s
    return s


def derpl_component(model: Model, degree: int, weight: Weight, budget: Budget = _UNLIMITED) -> Subspace:
    """Weight component of the preLie subalgebra generated by degree one."""
    key = (degree, weight)
    cache = model._derpl
    if key in cache:
        return cache[key]
    target = len(model.der_basis(degree, weight))
    if degree < 1 or target == 0:
        s = Subspace()
    elif degree == 1:
        s = model.full_space(1, weight)
    else:
        s = Subspace()
        done = False
        for i in range(1, degree):
            j = degree - i
            for w1 in model.weights(i):
                w2 = weight_add(weight, w1, -1)
                if not model.der_basis(j, w2):
                    continue
                left = derpl_component(model, i, w1, budget)
                right = derpl_component(model, j, w2, budget)
                for a in left.basis():
                    for b in right.basis():
                        budget.check()
                        s.add(model.prelie(a, b))
                        if s.rank >= target:
                            done = True
                            break
                    if done:
                        break
                if done:
                    break
            if done:
                break
    cache[key] = s
    return s


@dataclass
class GradedSubspace:
    """Degree-indexed subspaces, each a direct sum of weight components."""

    name: str
    parts: dict[int, Subspace] = field(default_factory=dict)
    ambient_dims: dict[int, int] = field(default_factory=dict)

    def __getitem__(self, degree: int) -> Subspace:
        return self.parts[degree]

    def rank(self, degree: int) -> int:
        return self.parts[degree].rank

    def degrees(self) -> list[int]:
        return sorted(self.parts)


def _graded(model: Model, name: str, max_degree: int, component: Callable, budget: Budget) -> GradedSubspace:
    g = GradedSubspace(name)
    for d in range(1, max_degree + 1):
        g.parts[d] = direct_sum(component(model, d, w, budget) for w in model.weights(d))
        g.ambient_dims[d] = model.der_dim(d)
    return g


def generate_derlie(model: Model, max_degree: int, budget: Budget = _UNLIMITED) -> GradedSubspace:
    return _graded(model, "derlie", max_degree, derlie_component, budget)


def generate_derpl(model: Model, max_degree: int, budget: Budget = _UNLIMITED) -> GradedSubspace:
    return _graded(model, "derpl", max_degree, derpl_component, budget)


# Distinguished subspaces ---------------------------------------------------------


def disjoint_subspace(model: FreeModel, z: str | None, degree: int) -> Subspace:
    """Span of disjoint trees (with root ``z``, or any root when ``z`` is None)."""
    trees = enumerate_trees(model.labels, model.gens, degree, root_filter=z, class_filter=TreeKind.DISJOINT)
    return Subspace(_basis_vector(t) for t in trees)


def special_pointed_trees(model: FreeModel, z: str | None, degree: int) -> list[LabeledTree]:
    roots = [z] if z is not None else list(model.labels)
    out = []
    for r in roots:
        out.extend(enumerate_trees(model.labels, model.gens, degree, root_filter=r, class_filter=TreeKind.SPECIAL_POINTED))
    return out


def special_pointed_subspace(model: FreeModel, z: str, degree: int) -> Subspace:
    """Module generated by degree-one pointed trees under derivations of the other labels.

    Built by acting on the degree-one special pointed trees with root ``z``
    by derivations on ``S`` minus ``z``, then closing under degree zero.
    """
    others = tuple(x for x in model.labels if x != z)
    gens1 = [t for t in pointed_basis(model.ctx, z, 1)]
    levels: dict[int, Subspace] = {1: Subspace(_basis_vector(t) for t in gens1)}
    deg0 = [LabeledTree(a, b) for a in others for b in others]
    for k in range(1, degree + 1):
        s = levels.get(k, Subspace())
        for j in range(1, k):
            acting = [
                t for t in enumerate_trees(others, model.gens, k - j)
            ] if others else []
            for p in levels[j].basis():
                for t in acting:
                    s.add(prelie_sum(p, _basis_vector(t)))
        _close_under(s, deg0, lambda v, e: prelie_sum(v, _basis_vector(e)))
        levels[k] = s
    return levels[degree]


def _close_under(s: Subspace, ops: Sequence, apply: Callable) -> None:
    frontier = s.basis()
    while frontier:
        new = []
        for v in frontier:
            for e in ops:
                w = apply(v, e)
                if w and s.add(w):
                    new.append(w)
        frontier = new


def imderlie_component(model: Model, degree: int, weight: Weight, budget: Budget = _UNLIMITED) -> Subspace:
    lie = derlie_component(model, degree, weight, budget)
    return Subspace(model.div(v) for v in lie.basis())


def imderlie(model: Model, max_degree: int, budget: Budget = _UNLIMITED) -> GradedSubspace:
    g = GradedSubspace("imderlie")
    for d in range(1, max_degree + 1):
        parts = [imderlie_component(model, d, w, budget) for w in model.weights(d)]
        g.parts[d] = _merge_spaces(parts)
        g.ambient_dims[d] = sum(len(model.trace_basis(d, w)) for w in model.trace_weights(d))
    return g


def _merge_spaces(parts: Iterable[Subspace]) -> Subspace:
    out = Subspace()
    for p in parts:
        out.extend(p.basis())
    return out


def imderliespec(model: Model, max_degree: int, budget: Budget = _UNLIMITED) -> GradedSubspace:
    """Trace image of the module generated by degree-one pointed derivations.

    The action commutes with passing to trace classes, so the module is
    generated directly on trace classes: degree ``k`` collects the action of
    degree ``k-j`` derivations on degree ``j``, then is closed under the
    degree-zero action.
    """
    levels: dict[int, Subspace] = {1: Subspace(model.special_generators())}
    deg0 = [k for w in model.weights(0) for k in model.der_basis(0, w)]
    for k in range(1, max_degree + 1):
        s = levels.get(k, Subspace())
        for j in range(1, k):
            acting = [b for w in model.weights(k - j) for b in model.der_basis(k - j, w)]
            for t in levels[j].basis():
                for b in acting:
                    budget.check()
                    s.add(model.act(t, _basis_vector(b)))
        _close_under(s, deg0, lambda v, e: model.act(v, _basis_vector(e)))
        levels[k] = s
    g = GradedSubspace("imderliespec")
    for d in range(1, max_degree + 1):
        g.parts[d] = levels[d]
        g.ambient_dims[d] = sum(len(model.trace_basis(d, w)) for w in model.trace_weights(d))
    return g


def _restrict(space: Subspace, weight_of: Callable, weight: Weight) -> Subspace:
    """The weight component of a subspace spanned by weight-homogeneous rows."""
    out = Subspace()
    for row in space.basis():
        part = row.filter(lambda k: weight_of(k) == weight)
        if part:
            out.add(part)
    return out


def kernel_div_component(model: Model, degree: int, weight: Weight, modulo: Subspace | None = None) -> Subspace:
    """Derivations of the given degree and weight whose divergence lies in ``modulo``."""
    domain = model.der_basis(degree, weight)
    mod = modulo.basis() if modulo is not None else []
    return kernel(domain, lambda b: model.div(_basis_vector(b)), mod)


def kernel_div(model: Model, degree: int) -> Subspace:
    return direct_sum(kernel_div_component(model, degree, w) for w in model.weights(degree))


def K_O(model: Model, degree: int, budget: Budget = _UNLIMITED) -> Subspace:
    """Kernel of the divergence restricted to the generated Lie subalgebra."""
    parts = []
    for w in model.weights(degree):
        lie = derlie_component(model, degree, w, budget)
        # kernel of div on the span of the rows of ``lie``
        rows = lie.basis()
        ker = kernel(list(range(len(rows))), lambda i: model.div(rows[i]))
        comb = Subspace()
        for v in ker.basis():
            acc = FormalSum.zero()
            for i, c in v.items():
                acc = acc + rows[i] * c
            comb.add(acc)
        parts.append(comb)
    return direct_sum(parts)


# Torsion -------------------------------------------------------------------------


@dataclass
class TorsionReport:
    """Smallest stabilization killing an element, or ``None`` if above ``max_n``."""

    element: str
    functor: str
    order: int | None
    max_n: int

    def within(self, bound: int) -> bool:
        return self.order is not None and self.order <= bound

    def to_dict(self) -> dict:
        return {"element": self.element, "functor": self.functor, "order": self.order, "max_n": self.max_n}


FUNCTORS = ("der/derlie", "kerdiv/KO", "coker_div", "trace/imderlie", "trace/imderliespec")


def _in_derlie(model: Model, x: FormalSum, budget: Budget) -> bool:
    for (d, w), part in model.split(x).items():
        if d < 1:
            return False
        if not derlie_component(model, d, w, budget).contains(part):
            return False
    return True


def _trace_degree(model: Model, key: Any) -> int:
    return sum(v for _, v in model.trace_weight(key))


def _in_trace_span(model: Model, t: FormalSum, which: str, budget: Budget) -> bool:
    groups: dict[tuple, dict] = {}
    for k, c in t.items():
        groups.setdefault((_trace_degree(model, k), model.trace_weight(k)), {})[k] = c
    special_image = None
    for (d, w), terms in groups.items():
        part = FormalSum._raw(terms)
        if which == "coker_div":
            space = Subspace(model.div(_basis_vector(b)) for b in model.der_basis(d, w))
        elif which == "trace/imderlie":
            space = imderlie_component(model, d, w, budget)
        else:
            if special_image is None:
                special_image = imderliespec(model, max(g[0] for g in groups), budget)
            space = special_image[d]
        if not space.contains(part):
            return False
    return True


def torsion_order(
    model: Model,
    x: FormalSum,
    functor: str = "der/derlie",
    max_n: int = 6,
    budget: Budget = _UNLIMITED,
    label: str | None = None,
) -> TorsionReport:
    """Smallest ``n <= max_n`` for which the class of ``x`` dies after adding ``n`` labels."""
    if functor not in FUNCTORS:
        raise ValueError(f"unknown functor tag {functor!r}; expected one of {FUNCTORS}")
    text = label if label is not None else x.to_text(getattr(model, "format_key", str))
    if not x:
        return TorsionReport(text, functor, 0, max_n)
    for n in range(max_n + 1):
        budget.check()
        big = model.stabilized(n)
        if functor in ("der/derlie", "kerdiv/KO"):
            dead = _in_derlie(big, x, budget)
        else:
            dead = _in_trace_span(big, x, functor, budget)
        if dead:
            return TorsionReport(text, functor, n, max_n)
    return TorsionReport(text, functor, None, max_n)


# Middle homology ------------------------------------------------------------------


@dataclass
class HomologyReport:
    degree: int
    der: int
    derlie: int
    kernel: int
    homology: int
    torsion: int | None
    tested_up_to: int
    ker_div: int | None = None
    k_o: int | None = None

    @property
    def consistent(self) -> bool:
        """With the imderlie target, the homology must equal Ker Div modulo K^O."""
        return self.ker_div is None or self.homology == self.ker_div - self.k_o

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def middle_homology(
    model: Model,
    degree: int,
    max_n: int,
    target: str = "imderlie",
    budget: Budget = _UNLIMITED,
) -> HomologyReport:
    """Homology of ``derlie -> Der -> trace/target`` in one degree and its torsion order.

    ``target`` selects the subspace the trace space is divided by:
    ``"imderlie"`` or ``"imderliespec"``.
    """
    if target == "imderlie":
        tgt_parts = {w: imderlie_component(model, degree, w, budget) for w in model.weights(degree)}

        def tgt(w: Weight) -> Subspace:
            return tgt_parts[w]
    elif target == "imderliespec":
        special_image = imderliespec(model, degree, budget)[degree]

        def tgt(w: Weight) -> Subspace:
            return _restrict(special_image, model.trace_weight, w)
    else:
        raise ValueError(f"unknown target {target!r}")
    der = lie = ker = hom = 0
    ker_div = k_o = 0
    reps: list[FormalSum] = []
    for w in model.weights(degree):
        budget.check()
        basis = model.der_basis(degree, w)
        der += len(basis)
        lie_w = derlie_component(model, degree, w, budget)
        lie += lie_w.rank
        k = kernel_div_component(model, degree, w, tgt(w))
        ker += k.rank
        quotient = lie_w.copy()
        for v in k.basis():
            if quotient.add(v):
                reps.append(v)
        hom += quotient.rank - lie_w.rank
        if target == "imderlie":
            # second route: Ker Div modulo its intersection with derlie
            ker_div += kernel_div_component(model, degree, w).rank
            k_o += lie_w.rank - tgt(w).rank
    order: int | None = 0
    if reps:
        order = None
        for n in range(max_n + 1):
            big = model.stabilized(n)
            if all(_in_derlie(big, v, budget) for v in reps):
                order = n
                break
    if target != "imderlie":
        ker_div = k_o = None
    return HomologyReport(degree, der, lie, ker, hom, order, max_n, ker_div, k_o)


# Pointed algebra checks --------------------------------------------------------------


def necklace_crosscheck(labels: Sequence[str], gens: GeneratorSet, degree: int) -> dict:
    """Compare necklace counts with the linear-algebra commutator quotient.

    Works over ``labels`` plus the basepoint, with pointed trees rooted at
    the basepoint.
    """
    ctx = Context(tuple(labels), gens).with_basepoint()
    basis = pointed_basis(ctx, BASEPOINT, degree)
    comm = Subspace()
    lower = {i: pointed_basis(ctx, BASEPOINT, i) for i in range(1, degree)}
    for i in range(1, degree):
        for p in lower[i]:
            for q in lower[degree - i]:
                pv, qv = _basis_vector(p), _basis_vector(q)
                comm.add(prelie_sum(pv, qv) - prelie_sum(qv, pv))
    necklaces = {necklace_of(t) for t in basis}
    return {
        "pointed": len(basis),
        "commutator_rank": comm.rank,
        "necklaces": len(necklaces),
        "agrees": len(necklaces) == len(basis) - comm.rank,
    }


def pointed_algebra_check(labels: Sequence[str], gens: GeneratorSet, max_internal: int) -> dict:
    """Associativity and unit laws of the pointed product on basis trees.

    Covers every triple of pointed trees sharing a root, each with at most
    ``max_internal`` internal vertices.
    """
    ctx = Context(tuple(labels), gens)
    triples = failures = 0
    for z in ctx.labels:
        unit = _basis_vector(LabeledTree(z, z))
        trees = [_basis_vector(t) for n in range(max_internal + 1) for t in pointed_basis(ctx, z, n)]
        products = {(i, j): prelie_sum(a, b) for i, a in enumerate(trees) for j, b in enumerate(trees)}
        for i, p in enumerate(trees):
            if prelie_sum(p, unit) != p or prelie_sum(unit, p) != p:
                failures += 1
            for j in range(len(trees)):
                for k, r in enumerate(trees):
                    triples += 1
                    if prelie_sum(products[(i, j)], r) != prelie_sum(p, products[(j, k)]):
                        failures += 1
    return {"triples": triples, "failures": failures}


def spine_bijection_check(labels: Sequence[str], gens: GeneratorSet, max_internal: int) -> dict:
    """Factorization and product are mutually inverse on pointed trees.

    Factor sequences are enumerated independently, as sequences of special
    pointed trees whose degrees add up to ``n``, so both composites are
    checked and the two sides are compared as sets.
    """
    ctx = Context(tuple(labels), gens)
    trees = failures = sequences = 0
    for z in ctx.labels:
        specials = {
            n: enumerate_trees(ctx.labels, gens, n, root_filter=z, class_filter=TreeKind.SPECIAL_POINTED)
            for n in range(1, max_internal + 1)
        }

        def factor_sequences(n: int) -> Iterable[tuple[LabeledTree, ...]]:
            if n == 0:
                yield ()
                return
            for first in range(1, n + 1):
                for head in specials[first]:
                    for rest in factor_sequences(n - first):
                        yield (head,) + rest

        for n in range(1, max_internal + 1):
            pointed = pointed_basis(ctx, z, n)
            for t in pointed:
                trees += 1
                if product_of_factors(spine_factorize(t), z) != t:
                    failures += 1
            seen = set()
            for seq in factor_sequences(n):
                sequences += 1
                t = product_of_factors(seq, z)
                seen.add(t)
                if tuple(spine_factorize(t)) != seq:
                    failures += 1
            if seen != set(pointed):
                failures += 1
    return {"trees": trees, "sequences": sequences, "failures": failures}


# Reports -------------------------------------------------------------------------------


@dataclass
class SuiteReport:
    suite: str
    params: dict
    per_degree: list[dict] = field(default_factory=list)
    counterexample: str | None = None
    elapsed_ms: int | None = 0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.counterexample is None and all(row["pass"] for row in self.per_degree)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "schema": 1,
            "suite": self.suite,
            "params": self.params,
            "per_degree": self.per_degree,
            "pass": self.passed,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.notes:
            out["notes"] = self.notes
        out["elapsed_ms"] = self.elapsed_ms
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _row(degree: int, dims: dict, ok: bool) -> dict:
    return {"degree": degree, "dims": dims, "pass": bool(ok)}


# Suites ---------------------------------------------------------------------------------


def _trees_upto(model: FreeModel, max_degree: int, min_degree: int = 0) -> dict[int, list[LabeledTree]]:
    return {d: enumerate_trees(model.labels, model.gens, d) for d in range(min_degree, max_degree + 1)}


def suite_prelie(model: FreeModel, max_degree: int, budget: Budget, report: SuiteReport) -> None:
    """Right symmetry of the associator over all triples of basis trees."""
    trees = [t for ts in _trees_upto(model, max_degree).values() for t in ts]
    vec = {t: _basis_vector(t) for t in trees}
    prods: dict[tuple, FormalSum] = {}

    prod = prelie_sum
    for t in trees:
        for u in trees:
            prods[(t, u)] = prod(vec[t], vec[u])
    counts: dict[int, int] = {}
    failure = None
    for d in trees:
        budget.check()
        for e in trees:
            de = prods[(d, e)]
            for f in trees:
                if e.sort_key() > f.sort_key():
                    continue
                assoc_ef = prod(de, vec[f]) - prod(vec[d], prods[(e, f)])
                assoc_fe = prod(prods[(d, f)], vec[e]) - prod(vec[d], prods[(f, e)])
                total = d.degree + e.degree + f.degree
                counts[total] = counts.get(total, 0) + 1
                if assoc_ef != assoc_fe and failure is None:
                    failure = f"({d}, {e}, {f})"
    report.counterexample = failure
    for total in sorted(counts):
        report.per_degree.append(_row(total, {"triples": counts[total]}, failure is None))


def suite_cocycle(model: FreeModel, max_degree: int, budget: Budget, report: SuiteReport) -> None:
    from .divergence import cocycle_defect_sum

    by_deg = _trees_upto(model, max_degree)
    counts: dict[int, int] = {}
    for i in by_deg:
        for j in by_deg:
            if i + j > max_degree:
                continue
            for a in by_deg[i]:
                budget.check()
                for b in by_deg[j]:
                    counts[i + j] = counts.get(i + j, 0) + 1
                    defect = cocycle_defect_sum(_basis_vector(a), _basis_vector(b))
                    if defect and report.counterexample is None:
                        report.counterexample = f"({a}, {b}) -> {defect.to_text()}"
    for total in sorted(counts):
        report.per_degree.append(_row(total, {"pairs": counts[total]}, report.counterexample is None))


def suite_derpl(model: FreeModel, max_degree: int, budget: Budget, report: SuiteReport) -> None:
    for d in range(1, max_degree + 1):
        der = pl = 0
        for w in model.weights(d):
            der += len(model.der_basis(d, w))
            pl += derpl_component(model, d, w, budget).rank
        report.per_degree.append(_row(d, {"der": der, "derpl": pl}, pl == der))
    if len(model.labels) == 1:
        report.notes.append("the isomorphism needs at least two labels; a proper inclusion is expected here")


def _torsion_rows(
    model: Model, elements: dict[int, list[tuple[str, FormalSum]]], bound: int, max_n: int,
    budget: Budget, report: SuiteReport, functor: str = "der/derlie",
) -> None:
    for d in sorted(elements):
        worst = 0
        count = 0
        ok = True
        for text, x in elements[d]:
            r = torsion_order(model, x, functor, max_n, budget, label=text)
            count += 1
            if r.order is None or r.order > bound:
                ok = False
                if report.counterexample is None:
                    report.counterexample = f"{text}: order {'>' + str(max_n) if r.order is None else r.order}"
            else:
                worst = max(worst, r.order)
        report.per_degree.append(_row(d, {"elements": count, "max_order": worst, "bound": bound}, ok))


def suite_disjoint1torsion(model: FreeModel, max_degree: int, budget: Budget, report: SuiteReport) -> None:
    elements = {}
    for d in range(1, max_degree + 1):
        elements[d] = [(str(t), _basis_vector(t)) for t in disjoint_subspace_trees(model, d)]
    _torsion_rows(model, elements, 1, 1, budget, report)


def disjoint_subspace_trees(model: FreeModel, degree: int) -> list[LabeledTree]:
    return enumerate_trees(model.labels, model.gens, degree, class_filter=TreeKind.DISJOINT)


def suite_special1torsion(model: FreeModel, max_degree: int, budget: Budget, report: SuiteReport) -> None:
    elements = {}
    for d in range(1, max_degree + 1):
        elements[d] = [(str(t), _basis_vector(t)) for t in special_pointed_trees(model, None, d)]
    _torsion_rows(model, elements, 1, 1, budget, report)


def suite_commutators2torsion(model: FreeModel, max_degree: int, budget: Budget, report: SuiteReport) -> None:
    elements: dict[int, list] = {d: [] for d in range(2, max_degree + 1)}
    for z in model.labels:
        pointed = {i: pointed_basis(model.ctx, z, i) for i in range(1, max_degree)}
        for i in range(1, max_degree):
            for j in range(i, max_degree - i + 1):
                for p in pointed[i]:
                    for q in pointed[j]:
                        if i == j and p.sort_key() >= q.sort_key():
                            continue
                        pv, qv = _basis_vector(p), _basis_vector(q)
                        c = prelie_sum(pv, qv) - prelie_sum(qv, pv)
                        if c:
                            elements[i + j].append((f"[{p},{q}]", c))
    _torsion_rows(model, {d: v for d, v in elements.items() if v}, 2, 2, budget, report)


def suite_main6torsion(model: FreeModel, max_degree: int, budget: Budget, report: SuiteReport, max_n: int = 6) -> None:
    for d in range(1, max_degree + 1):
        budget.check()
        # (i) the left map is an inclusion of subspaces
        injective = all(
            derlie_component(model, d, w, budget).rank <= len(model.der_basis(d, w))
            for w in model.weights(d)
        )
        # (ii) every trace basis element is hit after one stabilization
        big = model.stabilized(1)
        new = fresh_labels(model.labels, 1)[0]
        trace_keys = [k for w in model.trace_weights(d) for k in model.trace_basis(d, w)]
        image = Subspace()
        for w in model.weights(d):
            for b in model.der_basis(d, w):
                image.add(model.div(_basis_vector(b)))
        coker_before = len(trace_keys) - image.rank
        surjective_after = True
        for n in trace_keys:
            rep = n.representative(BASEPOINT)
            witness = rep.relabel({BASEPOINT: new})
            if big.div(_basis_vector(witness)) != _basis_vector(n):
                surjective_after = False
                if report.counterexample is None:
                    report.counterexample = f"no witness for {n}"
        # (iii) middle homology and its torsion order
        h = middle_homology(model, d, max_n, "imderlie", budget)
        ok = injective and surjective_after and h.consistent and h.torsion is not None and h.torsion <= 6
        if h.torsion is None and report.counterexample is None:
            report.counterexample = f"middle homology in degree {d} survives {max_n} stabilizations"
        report.per_degree.append(
            _row(
                d,
                {
                    "der": h.der,
                    "derlie": h.derlie,
                    "trace": len(trace_keys),
                    "coker_before": coker_before,
                    "coker_after_1": 0 if surjective_after else None,
                    "kernel": h.kernel,
                    "homology": h.homology,
                    "ker_div": h.ker_div,
                    "k_o": h.k_o,
                    "homology_torsion": h.torsion,
                    "bound": 6,
                },
                ok,
            )
        )


def suite_classical_homology(
    model: ClassicalModel, degrees: Iterable[int], target: str, bound: int,
    budget: Budget, report: SuiteReport, max_n: int | None = None,
) -> None:
    for d in degrees:
        h = middle_homology(model, d, bound if max_n is None else max_n, target, budget)
        ok = h.consistent and h.torsion is not None and h.torsion <= bound
        if not ok and report.counterexample is None:
            report.counterexample = f"middle homology in degree {d} survives {h.tested_up_to} stabilizations"
        dims = h.to_dict()
        dims.pop("degree")
        if dims["ker_div"] is None:
            del dims["ker_div"], dims["k_o"]
        dims["bound"] = bound
        report.per_degree.append(_row(d, dims, ok))


def suite_com_rational(model: ClassicalModel, max_degree: int, budget: Budget, report: SuiteReport) -> None:
    for d in range(1, max_degree + 1):
        der = lie = 0
        image = Subspace()
        for w in model.weights(d):
            der += len(model.der_basis(d, w))
            lie += derlie_component(model, d, w, budget).rank
            for b in model.der_basis(d, w):
                image.add(model.div(_basis_vector(b)))
        trace = len(list(itertools.combinations_with_replacement(model.labels, d)))
        ok = der == lie and image.rank == trace
        report.per_degree.append(
            _row(d, {"der": der, "derlie": lie, "trace": trace, "div_rank": image.rank}, ok)
        )


SUITES = (
    "prelie",
    "cocycle",
    "derpl",
    "disjoint1torsion",
    "special1torsion",
    "commutators2torsion",
    "main6torsion",
    "lie3torsion",
    "ass4torsion",
    "com_rational",
)


def theorem_suite(
    name: str,
    labels: Sequence[str] = ("x", "y"),
    gens: GeneratorSet | None = None,
    max_degree: int = 2,
    rank: int = 1,
    stab: int | None = None,
    budget_ms: int | None = None,
) -> SuiteReport:
    """Run a named verification suite and return its report.

    Free-operad suites use ``labels`` and ``gens``; the classical suites
    (``lie3torsion``, ``ass4torsion``, ``com_rational``) use ``rank``.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    gens = gens or GeneratorSet.binary()
    budget = Budget(budget_ms)
    classical = name in ("lie3torsion", "ass4torsion", "com_rational")
    params: dict[str, Any] = {"max_degree": max_degree}
    if classical:
        params["rank"] = rank
    else:
        params["set"] = list(labels)
        params["gens"] = str(gens)
    if stab is not None:
        params["stab"] = stab
    report = SuiteReport(name, params)
    try:
        if classical:
            alphabet = default_alphabet(rank)
            if name == "lie3torsion":
                m = classical_model(cl.LIE, alphabet)
                suite_classical_homology(m, range(2, max_degree + 1), "imderlie", 3, budget, report, stab)
            elif name == "ass4torsion":
                m = classical_model(cl.ASS, alphabet)
                suite_classical_homology(m, range(2, max_degree + 1), "imderliespec", 4, budget, report, stab)
            else:
                suite_com_rational(classical_model(cl.COM, alphabet), max_degree, budget, report)
        else:
            if not gens.is_binary and name not in ("prelie", "cocycle"):
                raise ValueError(f"suite {name!r} needs binary generators")
            m = free_model(tuple(sorted(labels)), gens)
            runner = {
                "prelie": suite_prelie,
                "cocycle": suite_cocycle,
                "derpl": suite_derpl,
                "disjoint1torsion": suite_disjoint1torsion,
                "special1torsion": suite_special1torsion,
                "commutators2torsion": suite_commutators2torsion,
            }.get(name)
            if runner is not None:
                runner(m, max_degree, budget, report)
            else:
                suite_main6torsion(m, max_degree, budget, report, 6 if stab is None else stab)
    except BudgetExceeded as exc:
        report.elapsed_ms = budget.elapsed_ms()
        exc.partial = report
        raise
    report.elapsed_ms = budget.elapsed_ms()
    return report


# Random sampling -------------------------------------------------------------------------


def random_classical_derivation(
    rng: random.Random, tag: str, alphabet: Sequence[str], degree: int, terms: int = 3
) -> cl.ClassicalDerivation:
    """A derivation with a few random basis terms and small integer coefficients."""
    basis = cl.derivation_basis(tag, alphabet, degree)
    value = FormalSum.zero()
    if basis:
        for _ in range(terms):
            value = value + FormalSum.basis(rng.choice(basis), rng.randint(-3, 3))
    return cl.ClassicalDerivation(tag, tuple(alphabet), value)
