"""Lie, associative and commutative realizations.

Elements of the free associative algebra are formal sums of words (tuples of
letters).  Free Lie elements are stored in the Lyndon basis, commutative
polynomials as sorted tuples.  A derivation is a formal sum of pairs
``(letter, monomial)`` meaning ``letter -> monomial``.

Pointed derivations are identified as follows, with ``1`` the basepoint:

* Lie: the word ``v1...vn`` stands for ``[v1,[v2,...[vn,1]...]]``;
* Ass: the pair ``(a, b)`` stands for the word ``a 1 b``;
* Com: the monomial ``m`` stands for ``m 1``.

Their commutator quotients are cyclic words, pairs of words modulo
commutators (computed by linear algebra), and monomials respectively.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .linear import FormalSum, Subspace

Word = tuple
LIE, ASS, COM = "lie", "ass", "com"
TAGS = (LIE, ASS, COM)
_LETTER_RE = re.compile(r"^[A-Za-z0-9_+]+$")


class ClassicalError(ValueError):
    """Bad input for a classical realization."""


# Words -------------------------------------------------------------------


def format_word(w: Word) -> str:
    if not w:
        return "1"
    if all(len(a) == 1 for a in w):
        return "".join(w)
    return ".".join(w)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    if "." in text:
        return tuple(text.split("."))
    return tuple(text)


def format_cyclic(w: Word) -> str:
    return "~" + format_word(w)


def format_pair(p: tuple[Word, Word]) -> str:
    return f"{format_word(p[0])}|{format_word(p[1])}"


def parse_pair(text: str) -> tuple[Word, Word]:
    left, sep, right = text.partition("|")
    if not sep:
        raise ClassicalError(f"bimodule word needs '|': {text!r}")
    return (parse_word(left), parse_word(right))


def format_monomial(m: Word) -> str:
    return format_word(m)


def cyclic_class(w: Word) -> Word:
    """Minimal rotation of a word."""
    if len(w) <= 1:
        return tuple(w)
    return min(tuple(w[i:] + w[:i]) for i in range(len(w)))


def is_lyndon(w: Word) -> bool:
    return bool(w) and all(w < w[i:] + w[:i] for i in range(1, len(w)))


def content(w: Word) -> tuple:
    counts: dict[str, int] = {}
    for a in w:
        counts[a] = counts.get(a, 0) + 1
    return tuple(sorted(counts.items()))


@lru_cache(maxsize=None)
def words_with_content(letters: tuple) -> tuple[Word, ...]:
    """Distinct arrangements of a sorted letter tuple, in lexicographic order."""
    return tuple(sorted(set(itertools.permutations(letters))))


def _content_letters(weight: Mapping[str, int]) -> tuple:
    out: list[str] = []
    for k in sorted(weight):
        if weight[k] < 0:
            raise ClassicalError("negative content")
        out.extend([k] * weight[k])
    return tuple(out)


# Free Lie algebra ---------------------------------------------------------


def lyndon_words(alphabet: Sequence[str], degree: int) -> list[Word]:
    """Lyndon words of the given length in lexicographic order (Duval's algorithm)."""
    if degree < 1:
        raise ClassicalError("degree must be at least 1")
    letters = sorted(set(alphabet))
    k = len(letters)
    out: list[Word] = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m == degree:
            out.append(tuple(letters[i] for i in w))
        while len(w) < degree:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


def lyndon_basis(alphabet: Sequence[str], degree: int) -> list["LyndonMonomial"]:
    return [LyndonMonomial(w) for w in lyndon_words(alphabet, degree)]


def witt_dimension(rank: int, degree: int) -> int:
    """Dimension of the degree part of the free Lie algebra of the given rank."""
    total = 0
    for d in range(1, degree + 1):
        if degree % d == 0:
            total += _mobius(d) * rank ** (degree // d)
    return total // degree


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


@lru_cache(maxsize=None)
def standard_factorization(w: Word) -> tuple[Word, Word]:
    """Split a Lyndon word as ``u v`` with ``v`` its longest proper Lyndon suffix."""
    if len(w) < 2:
        raise ClassicalError("letters have no standard factorization")
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ClassicalError(f"{w} is not a Lyndon word")


@lru_cache(maxsize=None)
def _lyndon_expansion(w: Word) -> tuple[tuple[Word, Fraction], ...]:
    if len(w) == 1:
        return ((w, Fraction(1)),)
    u, v = standard_factorization(w)
    return tuple(commutator_words(lyndon_expand(u), lyndon_expand(v)).items())


def lyndon_expand(w: Word) -> FormalSum:
    """Tensor expansion of the standard bracketing of a Lyndon word."""
    return FormalSum._raw(dict(_lyndon_expansion(w)))


def lyndon_bracket_text(w: Word) -> str:
    if len(w) == 1:
        return w[0]
    u, v = standard_factorization(w)
    return f"[{lyndon_bracket_text(u)},{lyndon_bracket_text(v)}]"


@dataclass(frozen=True, order=True)
class LyndonMonomial:
    """A Lyndon word standing for its standard bracketing."""

    word: Word

    def __post_init__(self) -> None:
        if not is_lyndon(self.word):
            raise ClassicalError(f"{self.word} is not a Lyndon word")

    def expand(self) -> FormalSum:
        return lyndon_expand(self.word)

    def __str__(self) -> str:
        return lyndon_bracket_text(self.word)


def concat_words(a: FormalSum, b: FormalSum) -> FormalSum:
    acc: dict[Word, Fraction] = {}
    for u, cu in a.items():
        for v, cv in b.items():
            w = u + v
            total = acc.get(w, 0) + cu * cv
            if total:
                acc[w] = total
            else:
                del acc[w]
    return FormalSum._raw(acc)


def commutator_words(a: FormalSum, b: FormalSum) -> FormalSum:
    return concat_words(a, b) - concat_words(b, a)


def lie_from_words(x: FormalSum) -> FormalSum:
    """Rewrite a Lie polynomial given by its tensor expansion in the Lyndon basis.

    The smallest word (by length, then lexicographically) in the support of a
    Lie polynomial is Lyndon, and the standard bracketing of a Lyndon word
    ``w`` is ``w`` plus larger words; peeling off leading terms therefore
    recovers the coordinates.  A non-Lie input is detected and rejected.
    """
    rest = dict(x.items())
    out: dict[Word, Fraction] = {}
    while rest:
        w = min(rest, key=lambda u: (len(u), u))
        if not is_lyndon(w):
            raise ClassicalError(f"not a Lie element: leading word {format_word(w)}")
        c = rest[w]
        out[w] = c
        for u, cu in _lyndon_expansion(w):
            total = rest.get(u, 0) - c * cu
            if total:
                rest[u] = total
            else:
                rest.pop(u, None)
    return FormalSum._raw(out)


def lie_to_words(x: FormalSum) -> FormalSum:
    """Tensor expansion of a Lyndon-basis element."""
    return x.map_basis(lyndon_expand)


def is_lie_element(x: FormalSum) -> bool:
    try:
        lie_from_words(x)
    except ClassicalError:
        return False
    return True


def parse_bracket(text: str) -> FormalSum:
    """Tensor expansion of a bracket expression such as ``[x,[x,y]]``."""
    tokens = re.findall(r"\[|\]|,|[A-Za-z0-9_+]+|\S", text)
    pos = 0

    def expr() -> FormalSum:
        nonlocal pos
        if pos >= len(tokens):
            raise ClassicalError(f"unexpected end of {text!r}")
        tok = tokens[pos]
        pos += 1
        if tok == "[":
            left = expr()
            if pos >= len(tokens) or tokens[pos] != ",":
                raise ClassicalError(f"expected ',' in {text!r}")
            pos += 1
            right = expr()
            if pos >= len(tokens) or tokens[pos] != "]":
                raise ClassicalError(f"expected ']' in {text!r}")
            pos += 1
            return commutator_words(left, right)
        if not _LETTER_RE.match(tok):
            raise ClassicalError(f"bad token {tok!r} in {text!r}")
        return FormalSum.basis((tok,))

    result = expr()
    if pos != len(tokens):
        raise ClassicalError(f"trailing input in {text!r}")
    return result


def lie_normal_form(text: str) -> FormalSum:
    """Lyndon coordinates of a bracket expression."""
    return lie_from_words(parse_bracket(text))


# Bimodule words -----------------------------------------------------------


def bimodule_product(p: tuple[Word, Word], q: tuple[Word, Word]) -> tuple[Word, Word]:
    """``(a ⊗ b)(a' ⊗ b') = a a' ⊗ b' b``."""
    return (p[0] + q[0], q[1] + p[1])


def bimodule_multiply(x: FormalSum, y: FormalSum) -> FormalSum:
    acc: dict = {}
    for p, cp in x.items():
        for q, cq in y.items():
            r = bimodule_product(p, q)
            total = acc.get(r, 0) + cp * cq
            if total:
                acc[r] = total
            else:
                del acc[r]
    return FormalSum._raw(acc)


def tilde_delta(w: Word) -> FormalSum:
    """Algebra map sending each letter ``v`` to ``v⊗1 - 1⊗v``."""
    out = FormalSum.basis(((), ()))
    for v in w:
        out = bimodule_multiply(out, FormalSum({((v,), ()): 1, ((), (v,)): -1}))
    return out


class AssTraceReducer:
    """Normal forms modulo commutators of the bimodule algebra.

    Commutators preserve the letter content of each side, so the quotient is
    computed separately for every pair of contents.  Pivots are taken at the
    largest pair, so representatives are small pairs.
    """

    def __init__(self) -> None:
        self._spaces: dict[tuple, Subspace] = {}

    def _space(self, left: tuple, right: tuple) -> Subspace:
        key = (left, right)
        s = self._spaces.get(key)
        if s is None:
            s = Subspace(pivot="max")
            for a in words_with_content(left):
                for b in words_with_content(right):
                    for i in range(len(a) + 1):
                        for j in range(len(b) + 1):
                            x = (a[:i], b[j:])
                            y = (a[i:], b[:j])
                            s.add(
                                FormalSum({bimodule_product(x, y): 1})
                                - FormalSum({bimodule_product(y, x): 1})
                            )
            self._spaces[key] = s
        return s

    def reduce(self, x: FormalSum) -> FormalSum:
        groups: dict[tuple, dict] = {}
        for p, c in x.items():
            key = (tuple(sorted(p[0])), tuple(sorted(p[1])))
            groups.setdefault(key, {})[p] = c
        out = FormalSum.zero()
        for (left, right), terms in groups.items():
            out = out + self._space(left, right).reduce(FormalSum._raw(terms))
        return out

    def commutator_rank(self, left: tuple, right: tuple) -> int:
        return self._space(tuple(sorted(left)), tuple(sorted(right))).rank


ASS_REDUCER = AssTraceReducer()


# Derivations ----------------------------------------------------------------


def _merge(a: Word, b: Word) -> Word:
    return tuple(sorted(a + b))


@dataclass(frozen=True)
class ClassicalDerivation:
    """A derivation ``letter -> monomial`` sum for one of the three operads.

    Lie monomials are Lyndon words, Ass monomials are words and Com monomials
    are sorted tuples.
    """

    tag: str
    alphabet: tuple
    value: FormalSum

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise ClassicalError(f"unknown operad tag {self.tag!r}")
        object.__setattr__(self, "alphabet", tuple(sorted(set(self.alphabet))))

    def image(self, letter: str) -> FormalSum:
        return FormalSum._raw({m: c for (x, m), c in self.value.items() if x == letter})

    def word_image(self, letter: str) -> FormalSum:
        """Image of a letter as a sum of words (Lie elements expanded)."""
        img = self.image(letter)
        return lie_to_words(img) if self.tag == LIE else img

    def degrees(self) -> list[int]:
        return sorted({len(m) - 1 for (_, m) in self.value})

    def _same(self, other: "ClassicalDerivation") -> None:
        if self.tag != other.tag or self.alphabet != other.alphabet:
            raise ClassicalError("tag or alphabet mismatch")

    def __add__(self, other: "ClassicalDerivation") -> "ClassicalDerivation":
        self._same(other)
        return ClassicalDerivation(self.tag, self.alphabet, self.value + other.value)

    def __sub__(self, other: "ClassicalDerivation") -> "ClassicalDerivation":
        self._same(other)
        return ClassicalDerivation(self.tag, self.alphabet, self.value - other.value)

    def __mul__(self, c) -> "ClassicalDerivation":
        return ClassicalDerivation(self.tag, self.alphabet, self.value * c)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.value)

    def __str__(self) -> str:
        return format_derivation_value(self.tag, self.value)


def format_derivation_value(tag: str, value: FormalSum) -> str:
    if not value:
        return "0"
    parts = []
    for letter in sorted({x for x, _ in value}):
        img = FormalSum._raw({m: c for (x, m), c in value.items() if x == letter})
        fmt = (lambda m: lyndon_bracket_text(m)) if tag == LIE else format_word
        parts.append(f"{letter}->{img.to_text(fmt)}")
    return "; ".join(parts)


_POLY_TERM_RE = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([^\s+-]+)")


def parse_polynomial(text: str) -> FormalSum:
    """Parse ``"xy - yx + 2xx"`` into a word sum (single-character letters)."""
    text = text.strip()
    if text == "0":
        return FormalSum.zero()
    acc = []
    pos = 0
    while pos < len(text):
        m = _POLY_TERM_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ClassicalError(f"cannot parse polynomial {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        acc.append((parse_word(m.group(3)), sign * coeff))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return FormalSum(acc)


def derivation_from_images(
    tag: str, alphabet: Iterable[str], images: Mapping[str, FormalSum | str]
) -> ClassicalDerivation:
    """Build a derivation from per-letter images.

    Text images are bracket expressions for Lie and polynomials in
    juxtaposed letters for Ass and Com; formal sums are given in words.
    """
    alphabet = tuple(sorted(set(alphabet)))
    terms = []
    for letter, img in images.items():
        if letter not in alphabet:
            raise ClassicalError(f"letter {letter!r} not in the alphabet")
        if isinstance(img, str):
            words = parse_bracket(img) if tag == LIE and "[" in img else parse_polynomial(img)
        else:
            words = img
        for w in words:
            if not set(w) <= set(alphabet):
                raise ClassicalError(f"word {w} leaves the alphabet")
        if tag == LIE:
            monos = lie_from_words(words)
        elif tag == ASS:
            monos = words
        else:
            monos = FormalSum((tuple(sorted(w)), c) for w, c in words.items())
        terms.extend(((letter, m), c) for m, c in monos.items())
    return ClassicalDerivation(tag, alphabet, FormalSum(terms))


def elementary_derivation(tag: str, alphabet: Iterable[str], i: str, j: str) -> ClassicalDerivation:
    """Degree-zero derivation ``x_j -> x_i`` (the elementary matrix ``E_ij``)."""
    return ClassicalDerivation(tag, tuple(alphabet), FormalSum.basis((j, (i,))))


def leibniz_words(images: Callable[[str], FormalSum], x: FormalSum) -> FormalSum:
    """Apply a derivation of the tensor algebra, given on letters, to a word sum."""
    acc: dict[Word, Fraction] = {}
    for w, c in x.items():
        for k, a in enumerate(w):
            for u, cu in images(a).items():
                nw = w[:k] + u + w[k + 1:]
                total = acc.get(nw, 0) + c * cu
                if total:
                    acc[nw] = total
                else:
                    del acc[nw]
    return FormalSum._raw(acc)


def leibniz_monomials(images: Callable[[str], FormalSum], x: FormalSum) -> FormalSum:
    """Apply a derivation of the polynomial algebra to a sum of sorted monomials."""
    acc: dict[Word, Fraction] = {}
    for m, c in x.items():
        for k, a in enumerate(m):
            if k and m[k - 1] == a:
                continue
            mult = m.count(a)
            rest = m[:k] + m[k + 1:]
            for u, cu in images(a).items():
                nm = _merge(rest, u)
                total = acc.get(nm, 0) + c * cu * mult
                if total:
                    acc[nm] = total
                else:
                    del acc[nm]
    return FormalSum._raw(acc)


def _image_fn(tag: str, value: FormalSum) -> Callable[[str], FormalSum]:
    table: dict[str, dict] = {}
    for (x, m), c in value.items():
        if tag == LIE:
            for w, cw in lyndon_expand(m).items():
                slot = table.setdefault(x, {})
                total = slot.get(w, 0) + c * cw
                if total:
                    slot[w] = total
                else:
                    del slot[w]
        else:
            slot = table.setdefault(x, {})
            slot[m] = slot.get(m, 0) + c
    empty = FormalSum.zero()
    cache = {x: FormalSum(t) for x, t in table.items()}
    return lambda a: cache.get(a, empty)


def extend_value(tag: str, d: FormalSum, element: FormalSum) -> FormalSum:
    """Leibniz extension of the derivation ``d`` applied to an algebra element."""
    images = _image_fn(tag, d)
    if tag == ASS:
        return leibniz_words(images, element)
    if tag == COM:
        return leibniz_monomials(images, element)
    return lie_from_words(leibniz_words(images, lie_to_words(element)))


def extend_derivation(d: ClassicalDerivation, element: FormalSum | str) -> FormalSum:
    """Apply ``d`` to an element of its algebra (Lyndon, word or monomial sum)."""
    if isinstance(element, str):
        if d.tag == LIE:
            element = lie_normal_form(element)
        elif d.tag == ASS:
            element = parse_polynomial(element)
        else:
            element = FormalSum((tuple(sorted(w)), c) for w, c in parse_polynomial(element).items())
    return extend_value(d.tag, d.value, element)


def prelie_value(tag: str, d: FormalSum, e: FormalSum) -> FormalSum:
    """``(d ⊲ e)(x) = e(d(x))``: the operadic product, opposite to composition."""
    images = _image_fn(tag, e)
    acc: dict = {}
    by_letter: dict[str, dict] = {}
    for (x, m), c in d.items():
        by_letter.setdefault(x, {})[m] = c
    for x, monos in by_letter.items():
        src = FormalSum._raw(monos)
        if tag == ASS:
            out = leibniz_words(images, src)
        elif tag == COM:
            out = leibniz_monomials(images, src)
        else:
            out = lie_from_words(leibniz_words(images, lie_to_words(src)))
        for m, c in out.items():
            acc[(x, m)] = c
    return FormalSum._raw(acc)


def bracket_value(tag: str, d: FormalSum, e: FormalSum) -> FormalSum:
    return prelie_value(tag, d, e) - prelie_value(tag, e, d)


def classical_bracket(d: ClassicalDerivation, e: ClassicalDerivation) -> ClassicalDerivation:
    d._same(e)
    return ClassicalDerivation(d.tag, d.alphabet, bracket_value(d.tag, d.value, e.value))


def lie_to_ass(d: ClassicalDerivation) -> ClassicalDerivation:
    if d.tag != LIE:
        raise ClassicalError("lie_to_ass needs a Lie derivation")
    acc = FormalSum.zero()
    for (x, m), c in d.value.items():
        acc = acc + FormalSum._raw({(x, w): cw * c for w, cw in lyndon_expand(m).items()})
    return ClassicalDerivation(ASS, d.alphabet, acc)


def ass_to_com(d: ClassicalDerivation) -> ClassicalDerivation:
    if d.tag != ASS:
        raise ClassicalError("ass_to_com needs an Ass derivation")
    return ClassicalDerivation(
        COM, d.alphabet, FormalSum(((x, tuple(sorted(w))), c) for (x, w), c in d.value.items())
    )


def abelianize(x: FormalSum) -> FormalSum:
    """Words to sorted monomials."""
    return FormalSum((tuple(sorted(w)), c) for w, c in x.items())


# Divergences -----------------------------------------------------------------


def satoh_value(value: FormalSum) -> FormalSum:
    """Contract the last letter when it equals the slot letter, then rotate to normal form.

    Only the terms of ``[v1,[...,[vn,1]...]]`` expansions ending in the
    basepoint survive the identification with words, which is why only the
    final position contributes.
    """
    acc: dict[Word, Fraction] = {}
    for (x, m), c in value.items():
        for w, cw in lyndon_expand(m).items():
            if w[-1] == x:
                key = cyclic_class(w[:-1])
                total = acc.get(key, 0) + c * cw
                if total:
                    acc[key] = total
                else:
                    del acc[key]
    return FormalSum._raw(acc)


def satoh_trace(d: ClassicalDerivation) -> FormalSum:
    if d.tag != LIE:
        raise ClassicalError("satoh_trace needs a Lie derivation")
    return satoh_value(d.value)


def double_value(value: FormalSum, reducer: AssTraceReducer = ASS_REDUCER) -> FormalSum:
    acc: dict = {}
    for (x, w), c in value.items():
        for k, a in enumerate(w):
            if a == x:
                key = (w[:k], w[k + 1:])
                acc[key] = acc.get(key, 0) + c
    return reducer.reduce(FormalSum(acc))


def double_divergence(d: ClassicalDerivation) -> FormalSum:
    if d.tag != ASS:
        raise ClassicalError("double_divergence needs an Ass derivation")
    return double_value(d.value)


def com_value(value: FormalSum) -> FormalSum:
    acc: dict = {}
    for (x, m), c in value.items():
        n = m.count(x)
        if n:
            k = m.index(x)
            key = m[:k] + m[k + 1:]
            acc[key] = acc.get(key, 0) + c * n
    return FormalSum(acc)


def com_divergence(d: ClassicalDerivation) -> FormalSum:
    if d.tag != COM:
        raise ClassicalError("com_divergence needs a Com derivation")
    return com_value(d.value)


def div_value(tag: str, value: FormalSum) -> FormalSum:
    if tag == LIE:
        return satoh_value(value)
    if tag == ASS:
        return double_value(value)
    return com_value(value)


def classical_div(d: ClassicalDerivation) -> FormalSum:
    return div_value(d.tag, d.value)


def act_value(tag: str, t: FormalSum, e: FormalSum) -> FormalSum:
    """Right action of a derivation on trace classes of pointed derivations."""
    images = _image_fn(tag, e)
    if tag == LIE:
        moved = leibniz_words(images, t)
        return FormalSum((cyclic_class(w), c) for w, c in moved.items())
    if tag == ASS:
        acc = FormalSum.zero()
        for (a, b), c in t.items():
            left = leibniz_words(images, FormalSum.basis(a))
            right = leibniz_words(images, FormalSum.basis(b))
            acc = acc + FormalSum(((u, b), c * cu) for u, cu in left.items())
            acc = acc + FormalSum(((a, v), c * cv) for v, cv in right.items())
        return ASS_REDUCER.reduce(acc)
    return leibniz_monomials(images, t)


def classical_act(tag: str, t: FormalSum, e: ClassicalDerivation) -> FormalSum:
    if e.tag != tag:
        raise ClassicalError("tag mismatch")
    return act_value(tag, t, e.value)


def classical_cocycle_defect(d: ClassicalDerivation, e: ClassicalDerivation) -> FormalSum:
    d._same(e)
    tag = d.tag
    return (
        div_value(tag, bracket_value(tag, d.value, e.value))
        - act_value(tag, div_value(tag, d.value), e.value)
        + act_value(tag, div_value(tag, e.value), d.value)
    )


def lie_trace_to_ass(t: FormalSum) -> FormalSum:
    """Map on trace spaces induced by ``tilde_delta``."""
    acc = FormalSum.zero()
    for w, c in t.items():
        acc = acc + tilde_delta(w) * c
    return ASS_REDUCER.reduce(acc)


def ass_trace_to_com(t: FormalSum) -> FormalSum:
    """Map on trace spaces sending ``a|b`` to the monomial of ``a b``."""
    return FormalSum((tuple(sorted(a + b)), c) for (a, b), c in t.items())


# Bases -------------------------------------------------------------------------


def derivation_basis(tag: str, alphabet: Sequence[str], degree: int, weight: tuple | None = None) -> list:
    """Basis pairs ``(letter, monomial)`` of the given degree (and weight).

    The weight of ``x -> m`` is the letter content of ``m`` minus ``x``.
    """
    alphabet = tuple(sorted(set(alphabet)))
    out = []
    if weight is None:
        for x in alphabet:
            for mono in _monomials(tag, alphabet, degree + 1):
                out.append((x, mono))
        return out
    w = dict(weight)
    if sum(w.values()) != degree:
        return []
    for x in alphabet:
        c = dict(w)
        c[x] = c.get(x, 0) + 1
        if any(v < 0 for v in c.values()) or any(k not in alphabet for k, v in c.items() if v):
            continue
        letters = _content_letters({k: v for k, v in c.items() if v})
        for mono in _monomials_with_content(tag, letters):
            out.append((x, mono))
    return out


def _monomials(tag: str, alphabet: tuple, length: int) -> list[Word]:
    if tag == LIE:
        return lyndon_words(alphabet, length)
    if tag == ASS:
        return list(itertools.product(alphabet, repeat=length))
    return list(itertools.combinations_with_replacement(alphabet, length))


def _monomials_with_content(tag: str, letters: tuple) -> list[Word]:
    if not letters:
        return []
    if tag == COM:
        return [letters]
    words = words_with_content(letters)
    if tag == LIE:
        return [w for w in words if is_lyndon(w)]
    return list(words)


def basis_weight(pair: tuple) -> tuple:
    x, m = pair
    counts = dict(content(m))
    counts[x] = counts.get(x, 0) - 1
    return tuple(sorted((k, v) for k, v in counts.items() if v))


def trace_basis(tag: str, alphabet: Sequence[str], degree: int, weight: tuple | None = None) -> list:
    """Normal-form basis of the trace space of pointed derivations."""
    alphabet = tuple(sorted(set(alphabet)))
    if weight is None:
        contents = [tuple(c) for c in itertools.combinations_with_replacement(alphabet, degree)]
    else:
        if sum(v for _, v in weight) != degree or any(v < 0 for _, v in weight):
            return []
        contents = [_content_letters(dict(weight))]
    out: set = set()
    for letters in contents:
        if tag == COM:
            out.add(tuple(letters))
            continue
        for w in words_with_content(tuple(letters)):
            if tag == LIE:
                out.add(cyclic_class(w))
            else:
                for k in range(len(w) + 1):
                    for key in ASS_REDUCER.reduce(FormalSum.basis((w[:k], w[k:]))):
                        out.add(key)
    return sorted(out)


def trace_weight(tag: str, key) -> tuple:
    if tag == ASS:
        return content(key[0] + key[1])
    return content(key)


# Free operad oracle ------------------------------------------------------------


def evaluate_node(tag: str, node) -> FormalSum:
    """Evaluate a binary tree body with the Lie bracket, concatenation or commutative product."""
    if isinstance(node, str):
        return FormalSum.basis((node,))
    if len(node) != 3:
        raise ClassicalError("only binary trees can be evaluated")
    left = evaluate_node(tag, node[1])
    right = evaluate_node(tag, node[2])
    if tag == LIE:
        return commutator_words(left, right)
    prod = concat_words(left, right)
    if tag == COM:
        return abelianize(prod)
    return prod


def transport_derivation(tag: str, alphabet: Sequence[str], trees: FormalSum) -> ClassicalDerivation:
    """Image of a free-operad derivation under the surjection onto Lie, Ass or Com."""
    terms = []
    for t, c in trees.items():
        words = evaluate_node(tag, t.node)
        if tag == LIE:
            words = lie_from_words(words)
        for m, cm in words.items():
            terms.append(((t.root, m), c * cm))
    return ClassicalDerivation(tag, tuple(alphabet), FormalSum(terms))


def transport_trace(tag: str, necklaces: FormalSum, basepoint: str = "+") -> FormalSum:
    """Image of a free-operad trace element in the classical trace space.

    Each necklace is lifted to its product tree, the tree is evaluated with
    the basepoint as an extra letter, and the result is read through the
    identification of pointed derivations described in the module docstring.
    """
    acc = FormalSum.zero()
    for n, c in necklaces.items():
        rep = n.representative(basepoint)
        words = evaluate_node(tag, rep.node)
        if tag == LIE:
            part = FormalSum(
                (cyclic_class(w[:-1]), cw) for w, cw in words.items() if w[-1] == basepoint
            )
        elif tag == ASS:
            part = FormalSum(
                ((w[: w.index(basepoint)], w[w.index(basepoint) + 1:]), cw) for w, cw in words.items()
            )
            part = ASS_REDUCER.reduce(part)
        else:
            part = FormalSum(
                (tuple(a for a in w if a != basepoint), cw) for w, cw in words.items()
            )
        acc = acc + part * c
    return acc


def lift_to_tree_text(tag: str, pair: tuple, gen: str = "*") -> str:
    """A free-operad tree mapping onto a basis derivation ``(letter, monomial)``.

    Lie monomials lift along their standard bracketing, words along the
    left comb; commutative monomials lift like words.
    """
    x, m = pair

    def comb(w: Word) -> str:
        s = w[0]
        for a in w[1:]:
            s = f"{gen}({s},{a})"
        return s

    def bracketing(w: Word) -> str:
        if len(w) == 1:
            return w[0]
        u, v = standard_factorization(w)
        return f"{gen}({bracketing(u)},{bracketing(v)})"

    body = bracketing(m) if tag == LIE else comb(m)
    return f"{x}<-{body}"
