"""Exact rational formal sums and subspaces.

A :class:`FormalSum` is a finite linear combination of hashable, orderable
basis elements with :class:`fractions.Fraction` coefficients.  A
:class:`Subspace` keeps a sparse reduced row echelon form of a span, which
supports membership, reduction to a normal form modulo the span, sums,
intersections and quotient dimensions.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Scalar = Fraction

_TERM_RE = re.compile(r"^(-?\d+(?:/\d+)?)\*(\S+)$")


def to_scalar(value: Any) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and fractions to an exact scalar."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not allowed")
    return Fraction(value)


def sort_key(basis_element: Any) -> Any:
    """Total order used for printing and pivot selection."""
    key = getattr(basis_element, "sort_key", None)
    if key is not None:
        return key()
    return basis_element


class FormalSum(Mapping):
    """A finite exact linear combination of basis elements.

    Zero coefficients are never stored, so two sums are equal exactly when
    their coefficient maps agree.  Instances are treated as immutable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Hashable, Any] | Iterable[tuple[Hashable, Any]] = ()):
        acc: dict[Hashable, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, coeff in items:
            c = to_scalar(coeff)
            if c:
                total = acc.get(key, 0) + c
                if total:
                    acc[key] = total
                else:
                    acc.pop(key, None)
        self._terms = acc

    @classmethod
    def _raw(cls, terms: dict) -> "FormalSum":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def basis(cls, key: Hashable, coeff: Any = 1) -> "FormalSum":
        """The sum ``coeff * key``."""
        c = to_scalar(coeff)
        return cls._raw({key: c} if c else {})

    @classmethod
    def zero(cls) -> "FormalSum":
        return cls._raw({})

    # Mapping protocol
    def __getitem__(self, key: Hashable) -> Fraction:
        return self._terms[key]

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, key: Hashable) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FormalSum):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # Arithmetic
    def __add__(self, other: "FormalSum") -> "FormalSum":
        if not isinstance(other, FormalSum):
            if other == 0:
                return self
            return NotImplemented
        acc = dict(self._terms)
        for key, c in other._terms.items():
            total = acc.get(key, 0) + c
            if total:
                acc[key] = total
            else:
                del acc[key]
        return FormalSum._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "FormalSum":
        return FormalSum._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __mul__(self, scalar: Any) -> "FormalSum":
        c = to_scalar(scalar)
        if not c:
            return FormalSum.zero()
        return FormalSum._raw({k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def map_basis(self, fn: Callable[[Hashable], "FormalSum"]) -> "FormalSum":
        """Extend ``fn`` (basis element to sum) linearly."""
        acc: dict[Hashable, Fraction] = {}
        for key, c in self._terms.items():
            for k2, c2 in fn(key)._terms.items():
                total = acc.get(k2, 0) + c * c2
                if total:
                    acc[k2] = total
                else:
                    del acc[k2]
        return FormalSum._raw(acc)

    def filter(self, predicate: Callable[[Hashable], bool]) -> "FormalSum":
        return FormalSum._raw({k: c for k, c in self._terms.items() if predicate(k)})

    def sorted_items(self) -> list[tuple[Hashable, Fraction]]:
        return sorted(self._terms.items(), key=lambda kc: sort_key(kc[0]))

    def to_text(self, fmt: Callable[[Hashable], str] = str) -> str:
        """Render as ``c1*KEY1 + c2*KEY2`` in canonical order (``0`` if empty)."""
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*{fmt(k)}" for k, c in self.sorted_items())

    @classmethod
    def from_text(cls, text: str, parse_key: Callable[[str], Hashable]) -> "FormalSum":
        """Inverse of :meth:`to_text`; keys must not contain whitespace."""
        text = text.strip()
        if text == "0":
            return cls.zero()
        acc = []
        for term in text.split(" + "):
            m = _TERM_RE.match(term.strip())
            if m is None:
                raise ValueError(f"malformed term {term!r}")
            acc.append((parse_key(m.group(2)), Fraction(m.group(1))))
        return cls(acc)

    def __repr__(self) -> str:
        return f"FormalSum({self.to_text()})"


def accumulate(pairs: Iterable[tuple[Hashable, Any]]) -> FormalSum:
    """Sum ``coeff * key`` over an iterable of pairs."""
    return FormalSum(pairs)


def add(a: FormalSum, b: FormalSum) -> FormalSum:
    return a + b


def scale(c: Any, a: FormalSum) -> FormalSum:
    return a * c


class Subspace:
    """Span of formal sums kept in sparse reduced row echelon form.

    Each row is normalised so that its pivot coefficient is 1 and no other
    row has a nonzero entry in that pivot column.  The pivot of a new row is
    its smallest (or, with ``pivot="max"``, largest) support element under
    ``order``.  Reducing a vector therefore takes a single pass over the
    pivots present in its support, and the reduced vector is a canonical
    representative of its class modulo the span.
    """

    def __init__(
        self,
        vectors: Iterable[FormalSum] = (),
        *,
        ambient: Sequence[Hashable] | None = None,
        order: Callable[[Hashable], Any] = sort_key,
        pivot: str = "min",
    ):
        if pivot not in ("min", "max"):
            raise ValueError("pivot must be 'min' or 'max'")
        self.ambient = list(ambient) if ambient is not None else None
        self._order = order
        self._pick = min if pivot == "min" else max
        self._rows: dict[Hashable, dict[Hashable, Fraction]] = {}
        self._column_rows: dict[Hashable, set[Hashable]] = {}
        for v in vectors:
            self.add(v)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def pivots(self) -> list[Hashable]:
        return sorted(self._rows, key=self._order)

    def basis(self) -> list[FormalSum]:
        """The echelon rows, ordered by pivot."""
        return [FormalSum._raw(dict(self._rows[p])) for p in self.pivots()]

    def _reduce_dict(self, v: Mapping[Hashable, Fraction]) -> dict[Hashable, Fraction]:
        out = dict(v)
        rows = self._rows
        for p in [k for k in v if k in rows]:
            c = out.get(p)
            if not c:
                continue
            for k, rc in rows[p].items():
                total = out.get(k, 0) - c * rc
                if total:
                    out[k] = total
                else:
                    out.pop(k, None)
        return out

    def reduce(self, v: FormalSum) -> FormalSum:
        """Canonical representative of ``v`` modulo the span."""
        return FormalSum._raw(self._reduce_dict(v._terms))

    def contains(self, v: FormalSum) -> bool:
        return not self._reduce_dict(v._terms)

    __contains__ = contains

    def add(self, v: FormalSum) -> bool:
        """Insert ``v``; return True when the rank grows."""
        r = self._reduce_dict(v._terms)
        if not r:
            return False
        p = self._pick(r, key=self._order)
        inv = 1 / r[p]
        if inv != 1:
            r = {k: c * inv for k, c in r.items()}
        # Clear the new pivot column from existing rows.
        for q in list(self._column_rows.get(p, ())):
            row = self._rows[q]
            c = row.get(p)
            if not c:
                continue
            for k, rc in r.items():
                total = row.get(k, 0) - c * rc
                if total:
                    if k not in row:
                        self._column_rows.setdefault(k, set()).add(q)
                    row[k] = total
                else:
                    del row[k]
                    self._column_rows[k].discard(q)
        self._rows[p] = r
        for k in r:
            self._column_rows.setdefault(k, set()).add(p)
        return True

    def extend(self, vectors: Iterable[FormalSum], *, stop_at: int | None = None) -> "Subspace":
        for v in vectors:
            self.add(v)
            if stop_at is not None and self.rank >= stop_at:
                break
        return self

    def copy(self) -> "Subspace":
        other = Subspace(ambient=self.ambient, order=self._order)
        other._pick = self._pick
        other._rows = {p: dict(r) for p, r in self._rows.items()}
        other._column_rows = {k: set(s) for k, s in self._column_rows.items()}
        return other

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.rank == other.rank and self.is_subspace_of(other)

    def __repr__(self) -> str:
        return f"Subspace(rank={self.rank})"


def span(vectors: Iterable[FormalSum], **kwargs: Any) -> Subspace:
    """Reduced echelon span of ``vectors``."""
    return Subspace(vectors, **kwargs)


def contains(s: Subspace, v: FormalSum) -> bool:
    return s.contains(v)


def quotient_dim(ambient: Sequence[Hashable], s: Subspace) -> int:
    """``len(ambient) - rank``; the span must lie inside the ambient basis."""
    allowed = set(ambient)
    for row in s.basis():
        if not set(row) <= allowed:
            raise ValueError("subspace is not contained in the ambient basis")
    return len(allowed) - s.rank


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    out = a.copy()
    out.extend(b.basis())
    return out


def intersection(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the kernel of ``(x, y) -> x - y`` on ``a + b``.

    Each vector of ``a`` is tagged with its own copy in a second block; after
    reducing the combined rows, rows whose first block vanishes carry
    intersection vectors in the second block.
    """
    def first(k: Hashable) -> tuple:
        return (0, k)

    def tagged_order(k: tuple) -> Any:
        return (k[0], sort_key(k[1]))

    combined = Subspace(order=tagged_order)
    for v in a.basis():
        combined.add(FormalSum._raw({**{(0, k): c for k, c in v.items()}, **{(1, k): c for k, c in v.items()}}))
    for v in b.basis():
        combined.add(FormalSum._raw({first(k): c for k, c in v.items()}))
    result = Subspace()
    for row in combined.basis():
        if all(k[0] == 1 for k in row):
            result.add(FormalSum._raw({k[1]: c for k, c in row.items()}))
    return result


def kernel(
    domain: Sequence[Hashable],
    image: Callable[[Hashable], FormalSum],
    modulo: Iterable[FormalSum] = (),
) -> Subspace:
    """Kernel of the linear map defined on ``domain`` basis elements.

    With ``modulo`` given, this is the preimage of the span of ``modulo``.
    """
    def tagged_order(k: tuple) -> Any:
        return (k[0], sort_key(k[1]))

    combined = Subspace(order=tagged_order)
    for u in modulo:
        combined.add(FormalSum._raw({(0, k): c for k, c in u.items()}))
    for b in domain:
        terms = {(0, k): c for k, c in image(b).items()}
        terms[(1, b)] = Fraction(1)
        combined.add(FormalSum._raw(terms))
    result = Subspace()
    for row in combined.basis():
        if all(k[0] == 1 for k in row):
            result.add(FormalSum._raw({k[1]: c for k, c in row.items()}))
    return result


def image_span(domain: Iterable[Hashable], image: Callable[[Hashable], FormalSum]) -> Subspace:
    return Subspace(image(b) for b in domain)


def direct_sum(parts: Iterable[Subspace]) -> Subspace:
    """Union of subspaces with pairwise disjoint supports."""
    out = Subspace()
    for part in parts:
        for p, row in part._rows.items():
            if p in out._rows:
                raise ValueError("supports overlap")
            out._rows[p] = dict(row)
            for k in row:
                out._column_rows.setdefault(k, set()).add(p)
    return out
