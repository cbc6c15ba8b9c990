import itertools

import pytest
from hypothesis import given

from operadcalc.divergence import (
    cocycle_defect,
    cocycle_defect_sum,
    contract,
    contract_sum,
    div,
    div_positive,
    div_sum,
    forget_basepoint_witness,
    restrict_positive,
)
from operadcalc.freeder import (
    Context,
    ContextError,
    Derivation,
    Necklace,
    necklace_basis,
    necklace_of,
    stabilize,
)
from operadcalc.linear import FormalSum
from operadcalc.trees import TreeKind, enumerate_trees, make_tree

from strategies import BINARY, pointed_trees, sums

CTX = Context.user("xy", BINARY)
ZCTX = Context.user("xyz", BINARY)


def V(text: str) -> FormalSum:
    return FormalSum.basis(make_tree(BINARY, text))


def N(text: str) -> FormalSum:
    return FormalSum.basis(necklace_of(make_tree(BINARY, text)))


def test_contract_examples():
    d = Derivation.from_trees(Context.user("z", BINARY), ["z<-*(z,z)"])
    assert contract(d).value == V("+<-*(+,z)") + V("+<-*(z,+)")
    assert contract_sum(V("z<-*(x,y)")) == 0
    assert contract(Derivation.identity(CTX)).value == V("+<-+") * 2


def test_div_examples():
    assert div_sum(V("z<-*(z,z)")) == N("+<-*(+,z)") + N("+<-*(z,+)")
    assert div_sum(V("z<-*(x,y)")) == 0
    assert div(Derivation.zero(CTX)).value == 0
    assert div(Derivation.identity(CTX)).value == FormalSum.basis(Necklace(()), 2)


def test_div_example_from_cli_docs():
    assert div_sum(V("x<-*(x,*(y,y))")) == N("+<-*(+,*(y,y))")


def test_contract_rejects_basepoint_in_use():
    with pytest.raises(ContextError):
        contract_sum(V("+<-*(+,x)"))


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_contraction_kills_disjoint_trees(degree):
    for t in enumerate_trees("xyz", BINARY, degree, class_filter=TreeKind.DISJOINT):
        assert contract_sum(FormalSum.basis(t)) == 0


def test_cocycle_degree_one_exhaustive():
    trees = enumerate_trees("xy", BINARY, 1)
    assert len(trees) == 8
    pairs = 0
    for a, b in itertools.product(trees, repeat=2):
        assert cocycle_defect_sum(FormalSum.basis(a), FormalSum.basis(b)) == 0
        pairs += 1
    assert pairs == 64


def test_cocycle_self_pair_vanishes():
    d = Derivation.from_trees(CTX, ["x<-*(x,*(y,x))", "y<-*(y,y)"])
    assert not cocycle_defect(d, d)


@given(sums("xy", 3, 3), sums("xy", 3, 3))
def test_cocycle_random_pairs(d, e):
    assert cocycle_defect_sum(d, e) == 0


def test_cocycle_random_degree_two_pair():
    d = V("x<-*(*(x,y),y)") - V("y<-*(x,*(y,x))")
    e = V("y<-*(*(y,y),x)") + V("x<-*(y,*(x,x))") * 3
    assert cocycle_defect_sum(d, e) == 0


def test_wrong_sign_convention_fails_somewhere():
    """The opposite relative sign of the action terms is not a cocycle."""
    from operadcalc.freeder import act_sum, bracket_sum

    trees = enumerate_trees("xy", BINARY, 1)
    broken = 0
    for a, b in itertools.product(trees, repeat=2):
        d, e = FormalSum.basis(a), FormalSum.basis(b)
        alt = div_sum(bracket_sum(d, e)) + act_sum(div_sum(d), e) - act_sum(div_sum(e), d)
        broken += bool(alt)
    assert broken > 0


def test_restrict_positive():
    d0 = Derivation.from_trees(CTX, ["x<-y"])
    assert restrict_positive(d0).value == 0
    d2 = Derivation.from_trees(CTX, ["x<-*(x,*(y,y))"])
    assert restrict_positive(d2) == d2
    mixed = Derivation.from_trees(CTX, ["x<-*(x,*(y,x))", "y<-x"])
    assert div_positive(mixed).value == div(restrict_positive(mixed)).value


@given(sums("xy", 4, 3))
def test_div_natural_under_stabilization(d):
    dd = Derivation(CTX, d)
    assert div(stabilize(dd, 2)).value == div(dd).value


@given(pointed_trees("xy", "z", 5))
def test_pointed_restriction(p):
    # forgetting the basepoint and contracting renames the basepoint to "+"
    assert contract_sum(FormalSum.basis(p)) == FormalSum.basis(p.relabel({"z": "+"}))


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_one_surjectivity_witness(degree):
    pctx = CTX.with_basepoint()
    for n in necklace_basis(pctx, "+", degree):
        witness = forget_basepoint_witness(n.representative("+"), "+1")
        assert div_sum(FormalSum.basis(witness)) == FormalSum.basis(n)
