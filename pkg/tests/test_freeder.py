import itertools

import pytest
from hypothesis import given

from operadcalc.freeder import (
    Context,
    ContextError,
    Derivation,
    Necklace,
    PointedDerivation,
    act_sum,
    bracket,
    bracket_sum,
    fresh_labels,
    minimal_rotation,
    necklace_basis,
    necklace_of,
    parse_necklace,
    pointed_basis,
    pointed_product,
    pointed_unit,
    prelie,
    prelie_sum,
    product_of_factors,
    retract,
    spine_factorize,
    stabilize,
    trace_class_sum,
)
from operadcalc.linear import FormalSum
from operadcalc.trees import TreeError, make_tree

from strategies import BINARY, pointed_trees, sums

CTX = Context.user("xy", BINARY)
PCTX = CTX.with_basepoint()
ZCTX = Context.user("xyz", BINARY)


def D(*texts, ctx=CTX) -> Derivation:
    return Derivation.from_trees(ctx, texts)


def V(text: str) -> FormalSum:
    return FormalSum.basis(make_tree(BINARY, text))


def test_context_rejects_reserved_and_duplicate_labels():
    with pytest.raises(ContextError):
        Context.user(["x", "+"], BINARY)
    with pytest.raises(ContextError):
        Context.user(["x", "x"], BINARY)
    with pytest.raises(ContextError):
        CTX.parse("q<-*(x,y)")


def test_fresh_labels_continue_numbering():
    assert fresh_labels(["x"], 2) == ["+1", "+2"]
    assert fresh_labels(["x", "+1", "+2"], 1) == ["+3"]


def test_prelie_examples():
    assert prelie(D("x<-*(x,y)"), D("y<-*(y,y)")).value == V("x<-*(x,*(y,y))")
    assert prelie(D("x<-*(x,x)"), D("y<-*(y,y)")).value == 0
    one = Context.user("x", BINARY)
    X = D("x<-*(x,x)", ctx=one)
    assert prelie(X, X).value == V("x<-*(*(x,x),x)") + V("x<-*(x,*(x,x))")


def test_bracket_examples():
    d, e = D("x<-*(x,y)"), D("y<-*(y,y)")
    assert bracket(d, d).value == 0
    # e has no x-leaf, so only the grafting of e into d survives
    assert bracket(d, e).value == V("x<-*(x,*(y,y))")
    f = D("y<-*(x,y)")
    assert bracket(d, f).value == V("x<-*(x,*(x,y))") - V("y<-*(*(x,y),y)")


def test_context_mismatch():
    with pytest.raises(ContextError):
        prelie(D("x<-*(x,y)"), Derivation.from_trees(ZCTX, ["x<-*(x,z)"]))


@given(sums("xy", 3), sums("xy", 3), sums("xy", 3))
def test_right_symmetry(d, e, f):
    def assoc(a, b, c):
        return prelie_sum(prelie_sum(a, b), c) - prelie_sum(a, prelie_sum(b, c))

    assert assoc(d, e, f) == assoc(d, f, e)


@given(sums("xy", 3), sums("xy", 3), sums("xy", 3))
def test_jacobi(d, e, f):
    total = (
        bracket_sum(d, bracket_sum(e, f))
        + bracket_sum(e, bracket_sum(f, d))
        + bracket_sum(f, bracket_sum(d, e))
    )
    assert total == 0


@given(sums("xy", 4), sums("xy", 4))
def test_grading_additive(d, e):
    for a, _ in d.items():
        for b, _ in e.items():
            for t in prelie_sum(FormalSum.basis(a), FormalSum.basis(b)):
                assert t.degree == a.degree + b.degree


def test_degree_zero_closed_and_projection():
    deg0 = [t for t in itertools.product("xy", repeat=2)]
    d0 = [V(f"{r}<-{l}") for r, l in deg0]
    for a in d0:
        for b in d0:
            assert all(t.degree == 0 for t in prelie_sum(a, b))


def test_pointed_product_example_and_unit():
    p = PointedDerivation(ZCTX, "z", V("z<-*(z,x)"))
    q = PointedDerivation(ZCTX, "z", V("z<-*(y,z)"))
    assert pointed_product(p, q).value == V("z<-*(*(y,z),x)")
    u = pointed_unit(ZCTX, "z")
    assert pointed_product(p, u) == p and pointed_product(u, p) == p


def test_pointed_rejects_non_pointed():
    with pytest.raises(TreeError):
        PointedDerivation(ZCTX, "z", V("z<-*(z,z)"))


@given(pointed_trees("xyz", "z"), pointed_trees("xyz", "z"), pointed_trees("xyz", "z"))
def test_pointed_associative(p, q, r):
    P, Q, R = (FormalSum.basis(t) for t in (p, q, r))
    assert prelie_sum(prelie_sum(P, Q), R) == prelie_sum(P, prelie_sum(Q, R))


def test_spine_factorize_examples():
    t = make_tree(BINARY, "z<-*(*(y,z),x)")
    assert [str(f) for f in spine_factorize(t)] == ["z<-*(z,x)", "z<-*(y,z)"]
    s = make_tree(BINARY, "z<-*(z,*(x,y))")
    assert spine_factorize(s) == [s]
    assert spine_factorize(make_tree(BINARY, "z<-z")) == []


@given(pointed_trees("xyz", "z", max_leaves=6))
def test_factorization_round_trip(t):
    assert product_of_factors(spine_factorize(t), "z") == t


def test_necklace_text_and_rotation():
    t = make_tree(BINARY, "z<-*(*(y,z),x)")
    n = necklace_of(t)
    assert str(n) == "(z<-*(y,z)|z<-*(z,x))"
    assert parse_necklace(ZCTX, str(n)) == n
    assert str(Necklace(())) == "()"
    a, b, c = (make_tree(BINARY, k) for k in ("z<-*(x,z)", "z<-*(y,z)", "z<-*(z,x)"))
    assert minimal_rotation((c, a, b)) == (a, b, c)


@given(pointed_trees("xy+", "+"), pointed_trees("xy+", "+"))
def test_trace_cyclic(p, q):
    P, Q = FormalSum.basis(p), FormalSum.basis(q)
    assert trace_class_sum(prelie_sum(P, Q)) == trace_class_sum(prelie_sum(Q, P))
    assert trace_class_sum(prelie_sum(P, Q) - prelie_sum(Q, P)) == 0


def test_distinct_special_trees_are_independent():
    n1 = necklace_of(make_tree(BINARY, "+<-*(+,x)"))
    n2 = necklace_of(make_tree(BINARY, "+<-*(x,+)"))
    assert n1 != n2


def test_act_zero_and_grading():
    t = FormalSum.basis(necklace_of(make_tree(BINARY, "+<-*(+,x)")))
    assert act_sum(t, FormalSum.zero()) == 0
    e = V("x<-*(x,y)")
    out = act_sum(t, e)
    assert out and all(n.degree == 2 for n in out)


def test_act_representative_independence():
    a = make_tree(BINARY, "+<-*(+,x)")
    b = make_tree(BINARY, "+<-*(y,+)")
    ab = product_of_factors([a, b], "+")
    ba = product_of_factors([b, a], "+")
    e = V("x<-*(x,y)") + V("y<-*(x,x)")
    # lifting either rotation and grafting gives the same trace class
    assert trace_class_sum(prelie_sum(FormalSum.basis(ab), e)) == trace_class_sum(prelie_sum(FormalSum.basis(ba), e))


@given(sums("xy", 3), sums("xy", 3))
def test_act_is_lie_action(d, e):
    t = FormalSum.basis(necklace_of(make_tree(BINARY, "+<-*(*(+,x),y)"))) + FormalSum.basis(
        necklace_of(make_tree(BINARY, "+<-*(y,+)"))
    )
    lhs = act_sum(act_sum(t, d), e) - act_sum(act_sum(t, e), d)
    assert lhs == act_sum(t, bracket_sum(d, e))


def test_act_rejects_basepoint_derivation():
    t = FormalSum.basis(Necklace(()))
    with pytest.raises(ContextError):
        act_sum(t, V("+<-*(+,x)"))


@given(sums("xy", 3), sums("xy", 3))
def test_stabilize_natural(d, e):
    dd, ee = Derivation(CTX, d), Derivation(CTX, e)
    assert stabilize(prelie(dd, ee), 2) == prelie(stabilize(dd, 2), stabilize(ee, 2))
    assert stabilize(Derivation.zero(CTX), 3).value == 0


@given(sums("xy", 3))
def test_retract_after_stabilize(d):
    dd = Derivation(CTX, d)
    assert retract(stabilize(dd, 2), CTX.labels) == dd


def test_positive_part_and_identity():
    ident = Derivation.identity(CTX)
    assert ident.degrees() == [0]
    assert ident.positive().value == 0
    d = D("x<-*(x,y)", "y<-x")
    assert d.positive().value == V("x<-*(x,y)")


def test_pointed_basis_and_necklaces_counts():
    assert len(pointed_basis(PCTX, "+", 1)) == 4
    assert len(necklace_basis(PCTX, "+", 2)) == 18
