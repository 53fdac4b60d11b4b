from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ricciflow import catalog
from ricciflow.algebra import LieAlgebra, change_basis
from ricciflow.nice import (
    CriterionNotApplicable,
    NiceVerdict,
    PositiveRoot,
    Weight,
    as_root,
    is_nice_basis,
    nice_via_roots,
    nikolayevsky_no_nice_type,
    pairing_explicit,
    pairing_nonzero,
    positive_roots,
    simple_derivation_nice_basis,
    weights,
)

from _support import random_suite


@pytest.mark.parametrize(
    "name, nice", [("heis3", True), ("L6_11", False), ("L6_13", True), ("s3", False), ("s4", True), ("sl2", True),
                   ("n4", False), ("milnor", True)]
)
def test_is_nice_basis_catalog(name, nice):
    assert is_nice_basis(catalog.get(name).algebra).nice is nice


def test_l6_11_witness():
    v = is_nice_basis(catalog.l6_11().algebra)
    assert v.witness == ((2, 3, 6), (2, 4, 6))
    assert v.to_dict()["witness"] == [[2, 3, 6], [2, 4, 6]]


def test_s3_witness_is_the_double_component():
    assert is_nice_basis(catalog.s3().algebra).witness == ((1, 3, 2), (1, 3, 3))


def test_verdict_invariant():
    with pytest.raises(ValueError):
        NiceVerdict(True, ((1, 2, 3), (1, 2, 4)))
    with pytest.raises(ValueError):
        NiceVerdict(False)


def test_tolerance_ignores_float_dust():
    L = LieAlgebra.from_brackets(3, {(1, 2, 3): 1.0, (1, 2, 1): 1e-14})
    assert is_nice_basis(L).nice
    assert not is_nice_basis(L, tol=1e-15).nice


@given(seed=st.integers(0, 10**6))
def test_nice_invariant_under_permutation_and_scaling(seed):
    rng = np.random.default_rng(seed)
    L = random_suite()[seed % 500]
    perm = np.eye(L.dim)[rng.permutation(L.dim)]
    scale = np.diag(np.exp(rng.uniform(-1, 1, L.dim)))
    assert is_nice_basis(change_basis(L, perm @ scale)).nice is is_nice_basis(L).nice


def test_weights():
    assert [w.vec for w in weights(catalog.heis3().algebra)] == [(-1, -1, 1)]
    assert weights(LieAlgebra(4)) == []
    ws = weights(catalog.l6_11().algebra)
    assert [w.ijk for w in ws] == [(1, 2, 4), (1, 4, 5), (1, 5, 6), (2, 3, 6), (2, 4, 6)]
    assert ws[0].vec == (-1, -1, 0, 1, 0, 0)


def test_weight_validation_and_degenerate_flag():
    assert Weight.of(3, 1, 2, 1).vec == (0, -1, 0)
    assert Weight.of(3, 1, 2, 1).degenerate and not Weight.of(3, 1, 2, 3).degenerate
    with pytest.raises(Exception):
        Weight.of(3, 2, 1, 3)


def test_positive_roots():
    roots = positive_roots(4)
    assert len(roots) == 6
    assert all(r.l > r.m for r in roots)
    assert PositiveRoot(3, 1, 3).vec == (-1, 0, 1)
    assert as_root((0, -1, 1)) == PositiveRoot(3, 2, 3)
    assert as_root((0, 1, -1)) is None
    assert as_root((1, 1, -2)) is None
    with pytest.raises(Exception):
        PositiveRoot(1, 2, 3)


def test_nice_via_roots_examples():
    assert nice_via_roots(catalog.heis3().algebra).nice
    v = nice_via_roots(catalog.l6_11().algebra)
    assert not v.nice
    assert v.witness == ((2, 3, 6), (2, 4, 6)) and v.root == (4, 3)


@pytest.mark.parametrize("name", ["s3", "s4", "sl2", "milnor"])
def test_nice_via_roots_refuses_outside_its_domain(name):
    with pytest.raises(CriterionNotApplicable):
        nice_via_roots(catalog.get(name).algebra)


def test_nice_via_roots_refuses_degenerate_weights():
    # Heisenberg in a skewed basis: still nilpotent, but [e1,e2] has an e1 component
    L = change_basis(catalog.heis3().algebra, np.array([[1.0, 0, 1], [0, 1, 0], [0, 0, 1]]))
    assert any(w.degenerate for w in weights(L))
    with pytest.raises(CriterionNotApplicable):
        nice_via_roots(L)


def test_nice_via_roots_agrees_on_suite():
    for L in random_suite()[:200]:
        assert nice_via_roots(L).nice is is_nice_basis(L).nice


@pytest.mark.parametrize(
    "root, w1, w2, expected",
    [
        ((3, 2), (1, 2, 4), (1, 3, 4), False),  # alpha_134 - alpha_124 = E22 - E33
        ((3, 2), (1, 3, 4), (1, 2, 4), True),
        ((4, 3), (1, 2, 3), (1, 2, 4), True),
        ((2, 1), (1, 3, 4), (1, 3, 4), False),
    ],
)
def test_pairing_examples_against_oracle(root, w1, w2, expected):
    r = PositiveRoot(*root, 4)
    a, b = Weight.of(4, *w1), Weight.of(4, *w2)
    assert pairing_nonzero(r, a, b) is expected
    assert (pairing_explicit(r, a, b) != 0) is expected


def _all_weights(n, degenerate):
    return [
        Weight.of(n, i, j, k)
        for i in range(1, n + 1) for j in range(i + 1, n + 1) for k in range(1, n + 1)
        if (k in (i, j)) == degenerate
    ]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_pairing_agrees_with_oracle_on_nondegenerate_weights(n):
    ws = _all_weights(n, degenerate=False)
    for root, w1, w2 in product(positive_roots(n), ws, ws):
        assert pairing_nonzero(root, w1, w2) is (abs(pairing_explicit(root, w1, w2)) > 1e-12)


def test_pairing_rule_misfires_on_degenerate_weights():
    # v_121 and v_133 have weights -E22 and -E11; their difference is a root,
    # yet pi(E_21) v_121 has no v_133 component
    r, w1, w2 = PositiveRoot(2, 1, 3), Weight.of(3, 1, 2, 1), Weight.of(3, 1, 3, 3)
    assert pairing_nonzero(r, w1, w2)
    assert pairing_explicit(r, w1, w2) == 0.0


@pytest.mark.parametrize("name", ["heis3", "L6_13", "n4"])
def test_simple_derivation_basis_is_nice(name):
    L = catalog.get(name).algebra
    A = simple_derivation_nice_basis(L)
    if A is None:
        assert name == "n4"
        return
    assert is_nice_basis(change_basis(L, A)).nice


def test_simple_derivation_abelian():
    assert simple_derivation_nice_basis(LieAlgebra(4)) is not None


def test_simple_derivation_negative_control():
    assert simple_derivation_nice_basis(catalog.l6_11().algebra) is None


def test_simple_derivation_requires_nilpotent():
    with pytest.raises(Exception):
        simple_derivation_nice_basis(catalog.sl2().algebra)


@pytest.mark.parametrize("p, q, expected", [(6, 7, True), (5, 6, False), (1, 2, False), (7, 8, True)])
def test_nikolayevsky_examples(p, q, expected):
    assert nikolayevsky_no_nice_type(p, q) is expected


def test_nikolayevsky_matches_rational_form():
    from fractions import Fraction

    for p in range(1, 25):
        for q in range(1, 25):
            lhs = Fraction(min(q * (q - 1), p * q), 2) + q * q + p * p - 1
            assert nikolayevsky_no_nice_type(p, q) is (lhs < Fraction(p * q * (q - 1), 2))


def test_nikolayevsky_rejects_nonpositive():
    with pytest.raises(Exception):
        nikolayevsky_no_nice_type(0, 3)


def test_nikolayevsky_lowest_cases():
    # inside q - 1 >= p >= 6 the smallest dimension is (6, 7); outside that family the
    # inequality already holds for the realizable 2-step types (5, 7) and (6, 6)
    family = [(p, q) for p in range(6, 40) for q in range(p + 1, 40)]
    assert all(nikolayevsky_no_nice_type(p, q) for p, q in family)
    assert min(family, key=sum) == (6, 7)
    realizable = [(p, q) for p in range(1, 13) for q in range(1, 13)
                  if p + q < 13 and q <= p * (p - 1) // 2 and nikolayevsky_no_nice_type(p, q)]
    assert realizable == [(5, 7), (6, 6)]
