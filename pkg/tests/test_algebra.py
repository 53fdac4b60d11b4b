import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricciflow import catalog
from ricciflow.algebra import (
    BasisChange,
    GlElement,
    InvalidInput,
    LieAlgebra,
    change_basis,
    derivation_algebra,
    inner_V,
    is_lie_algebra,
    is_solvable,
    is_unimodular,
    jacobi_defect,
    lower_central_series,
    pi_action,
    type_of,
    weight_vector,
)

from _support import expm_taylor, jacobi_defect_loop, random_orthogonal, random_suite

HEIS = catalog.heis3().algebra
L6_11 = catalog.l6_11().algebra


def test_from_brackets_sparse_storage():
    L = LieAlgebra.from_brackets(4, {(1, 3, 2): -2.0, (1, 2, 3): 1.0, (2, 4, 1): 0.0})
    assert L.entries == ((0, 1, 2, 1.0), (0, 2, 1, -2.0))
    assert L.dense[2, 0, 1] == 2.0 and L.dense[0, 2, 1] == -2.0
    np.testing.assert_array_equal(L.dense, -np.transpose(L.dense, (1, 0, 2)))


@pytest.mark.parametrize(
    "dim, entries",
    [
        (0, ()),
        (3, ((1, 0, 2, 1.0),)),
        (3, ((0, 1, 3, 1.0),)),
        (3, ((0, 1, 2, 1.0), (0, 1, 2, 2.0))),
    ],
)
def test_structural_validation(dim, entries):
    with pytest.raises(InvalidInput):
        LieAlgebra(dim, entries)


def test_dense_is_read_only():
    with pytest.raises(ValueError):
        HEIS.dense[0, 1, 2] = 5.0


@pytest.mark.parametrize(
    "L, expected",
    [
        (HEIS, 0.0),
        (L6_11, 0.0),
        (LieAlgebra.from_brackets(3, {(1, 2, 3): 1, (2, 3, 1): 1, (1, 3, 1): 1}), 1.0),
    ],
)
def test_jacobi_defect_examples(L, expected):
    assert jacobi_defect(L) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("seed", range(20))
def test_jacobi_defect_matches_loop(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 6))
    c = rng.standard_normal((n, n, n))
    L = LieAlgebra.from_dense(c - np.transpose(c, (1, 0, 2)))
    assert jacobi_defect(L) == pytest.approx(jacobi_defect_loop(L), rel=1e-12)


def test_change_basis_identity_and_singular():
    assert change_basis(L6_11, np.eye(6)).entries == L6_11.entries
    with pytest.raises(InvalidInput):
        change_basis(HEIS, np.diag([1.0, 0.0, 1.0]))
    with pytest.raises(InvalidInput):
        change_basis(HEIS, np.eye(4))


@given(a=st.lists(st.floats(0.1, 10.0), min_size=3, max_size=3))
def test_diagonal_action_on_heisenberg(a):
    L = change_basis(HEIS, np.diag(a))
    assert L.entries == ((0, 1, 2, 1.0 * a[2] / (a[0] * a[1])),)


def test_diagonal_fast_path_matches_dense_route():
    rng = np.random.default_rng(4)
    for L in random_suite()[:30]:
        d = np.exp(rng.uniform(-1, 1, L.dim))
        fast = change_basis(L, np.diag(d)).dense
        slow = np.einsum("kc,abc,ai,bj->ijk", np.diag(d), L.dense, np.diag(1 / d), np.diag(1 / d))
        np.testing.assert_allclose(fast, slow, rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_change_basis_is_functorial(seed):
    rng = np.random.default_rng(seed)
    L = random_suite()[seed]
    n = L.dim
    A = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    B = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    lhs = change_basis(change_basis(L, A), B).dense
    rhs = change_basis(L, B @ A).dense
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * max(1, np.abs(rhs).max()))


def test_l6_13_b_is_removable_by_diagonal_scaling():
    # b = 4 variant; scaling X3, X5, X6 by 1/b turns every constant into +-1
    b = 4.0
    L = catalog.l6_13(b).algebra
    scaled = change_basis(L, np.diag([1, 1, 1 / b, 1, 1 / b, 1 / b]))
    assert {abs(e[3]) for e in scaled.entries} == {1.0}
    assert scaled.entries == catalog.l6_13(1.0).algebra.entries


@pytest.mark.parametrize("inverse", [False, True])
def test_epsilon_rescaling_of_the_printed_basis_is_not_a_normalization(inverse):
    # basis {X1, X2, eps X3, X4/eps, eps X5, eps X6} with eps = |b|^(1/2), either direction
    eps = 2.0
    a = np.array([1, 1, eps, 1 / eps, eps, eps])
    scaled = change_basis(catalog.l6_13(4.0).algebra, np.diag(1 / a if inverse else a))
    assert not {abs(e[3]) for e in scaled.entries} <= {1.0}


@pytest.mark.parametrize("alpha", [np.eye(3), np.diag([1.0, 0.0, 0.0])])
def test_pi_action_weight_minus_one(alpha):
    np.testing.assert_array_equal(pi_action(alpha, HEIS), -HEIS.dense)


@given(a=st.lists(st.floats(-5, 5), min_size=6, max_size=6))
@settings(max_examples=50)
def test_pi_action_diagonal_is_weight_multiplication(a):
    out = pi_action(np.diag(a), L6_11)
    for i, j, k, v in L6_11.entries:
        assert out[i, j, k] == pytest.approx((a[k] - a[i] - a[j]) * v, abs=1e-12)
    mask = L6_11.dense == 0
    assert np.all(out[mask] == 0)


def test_pi_action_dimension_mismatch():
    with pytest.raises(InvalidInput):
        pi_action(np.eye(4), HEIS)


@pytest.mark.parametrize("r, s", [(2, 1), (1, 3), (3, 2), (2, 2)])
@pytest.mark.parametrize("name", ["heis3", "L6_11", "sl2", "n4"])
def test_pi_action_is_derivative_of_group_action(name, r, s):
    L = catalog.get(name).algebra
    alpha = GlElement.unit(L.dim, r, s).alpha
    h = 1e-5
    fd = (change_basis(L, expm_taylor(h * alpha)).dense - change_basis(L, expm_taylor(-h * alpha)).dense) / (2 * h)
    exact = pi_action(alpha, L)
    assert np.linalg.norm(fd - exact) <= 1e-4 * max(np.linalg.norm(exact), 1e-12) + 1e-9


@pytest.mark.parametrize("seed", range(20))
def test_pi_transpose_equivariance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    alpha = rng.standard_normal((n, n))
    mu, lam = (rng.standard_normal((n, n, n)) for _ in range(2))
    mu, lam = mu - mu.transpose(1, 0, 2), lam - lam.transpose(1, 0, 2)
    assert inner_V(pi_action(alpha, mu), lam) == pytest.approx(inner_V(mu, pi_action(alpha.T, lam)), abs=1e-9)


def test_inner_product_examples():
    assert inner_V(HEIS, HEIS) == 2.0
    assert inner_V(HEIS.dense, np.zeros((3, 3, 3))) == 0.0
    assert inner_V(weight_vector(3, 0, 1, 2), weight_vector(3, 0, 2, 1)) == 0.0
    with pytest.raises(InvalidInput):
        inner_V(HEIS, np.zeros((2, 2, 2)))


@pytest.mark.parametrize(
    "name, series, typ",
    [
        ("heis3", [3, 1, 0], (2, 1)),
        ("L6_11", [6, 3, 2, 1, 0], (3, 1, 1, 1)),
        ("L6_13", [6, 3, 2, 1, 0], (3, 1, 1, 1)),
        ("n4", [4, 2, 1, 0], (2, 1, 1)),
        ("sl2", [3], None),
    ],
)
def test_lower_central_series(name, series, typ):
    L = catalog.get(name).algebra
    assert lower_central_series(L) == series
    assert type_of(L) == typ


@pytest.mark.parametrize("n", [1, 2, 5])
def test_abelian_type(n):
    assert type_of(LieAlgebra(n)) == (n,)


@pytest.mark.parametrize("seed", range(15))
def test_type_and_jacobi_invariant_under_change_of_basis(seed):
    rng = np.random.default_rng(seed)
    L = random_suite()[seed]
    A = random_orthogonal(rng, L.dim) @ np.diag(np.exp(rng.uniform(-0.5, 0.5, L.dim)))
    M = change_basis(L, A)
    assert jacobi_defect(M) <= 1e-9
    assert type_of(M) == type_of(L)


@pytest.mark.parametrize(
    "name, solvable, unimodular",
    [("s3", True, False), ("s4", True, False), ("sl2", False, True), ("heis3", True, True), ("n4", True, True)],
)
def test_solvable_and_unimodular(name, solvable, unimodular):
    L = catalog.get(name).algebra
    assert is_solvable(L) is solvable
    assert is_unimodular(L) is unimodular


def test_nilpotent_suite_is_unimodular():
    assert all(is_unimodular(L) for L in random_suite()[:100])


def _derivation_defect(L, D):
    c = L.dense
    n = L.dim
    worst = 0.0
    for i in range(n):
        for j in range(n):
            lhs = D @ c[i, j]
            rhs = L.bracket(D[:, i], np.eye(n)[j]) + L.bracket(np.eye(n)[i], D[:, j])
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


@pytest.mark.parametrize(
    "name, dim", [("heis3", 6), ("sl2", 3), ("s4", 6), ("n4", 7), ("L6_11", 11), ("L6_13", 10)]
)
def test_derivation_algebra(name, dim):
    L = catalog.get(name).algebra
    der = derivation_algebra(L)
    assert len(der) == dim
    for D in der:
        assert _derivation_defect(L, D) <= 1e-9


def test_derivations_of_abelian_are_everything():
    assert len(derivation_algebra(LieAlgebra(3))) == 9


def _in_span(basis, M):
    A = np.array([b.ravel() for b in basis]).T
    x, *_ = np.linalg.lstsq(A, M.ravel(), rcond=None)
    return np.linalg.norm(A @ x - M.ravel()) <= 1e-9 * max(1, np.linalg.norm(M))


def test_known_derivations_are_in_the_kernel():
    assert _in_span(derivation_algebra(HEIS), np.diag([1.0, 1.0, 2.0]))
    sl2 = catalog.sl2().algebra
    der = derivation_algebra(sl2)
    for i in range(3):
        assert _in_span(der, sl2.ad(i))


def test_derivations_require_jacobi():
    with pytest.raises(InvalidInput):
        derivation_algebra(LieAlgebra.from_brackets(3, {(1, 2, 3): 1, (2, 3, 1): 1, (1, 3, 1): 1}))


# -- JSON ---------------------------------------------------------------------


finite = st.floats(allow_nan=False, allow_infinity=False).filter(lambda x: x != 0)


@given(values=st.lists(finite, min_size=1, max_size=6))
def test_json_round_trip_is_bit_exact(values):
    slots = [(1, 2, 3), (1, 3, 2), (2, 3, 1), (1, 2, 4), (3, 4, 1), (2, 4, 4)]
    L = LieAlgebra.from_brackets(4, dict(zip(slots, values)))
    back = LieAlgebra.from_json(L.to_json())
    assert back.entries == L.entries
    assert [e[3].hex() for e in back.entries] == [e[3].hex() for e in L.entries]


def test_json_format():
    assert json.loads(HEIS.to_json()) == {"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1.0}]}


@pytest.mark.parametrize(
    "doc, field",
    [
        ("[]", "JSON object"),
        ("{}", "'dim'"),
        ('{"dim": 0}', "'dim'"),
        ('{"dim": 3, "brackets": {}}', "'brackets'"),
        ('{"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 3}]}', "brackets[0]: missing field 'c'"),
        ('{"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 4, "c": 1}]}', "brackets[0].k"),
        ('{"dim": 3, "brackets": [{"i": 2, "j": 1, "k": 3, "c": 1}]}', "i < j"),
        ('{"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 3, "c": "x"}]}', "brackets[0].c"),
        ('{"dim": 3, "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1}, {"i": 1, "j": 2, "k": 3, "c": 2}]}',
         "brackets[1]: duplicate"),
        ("{not json", "not valid JSON"),
    ],
)
def test_json_diagnostics_name_the_field(doc, field):
    with pytest.raises(InvalidInput) as info:
        LieAlgebra.from_json(doc)
    assert field in str(info.value)


def test_basis_change_and_gl_element_flags():
    with pytest.raises(InvalidInput):
        BasisChange(np.zeros((2, 2)))
    with pytest.raises(InvalidInput):
        BasisChange(np.ones((2, 3)))
    e = GlElement.unit(3, 2, 1)
    assert e.alpha[1, 0] == 1.0 and e.alpha.sum() == 1.0
    assert not e.symmetric and not e.diagonal
    assert GlElement(np.diag([1.0, 2.0])).diagonal
    assert GlElement(np.ones((2, 2))).symmetric


def test_is_lie_algebra_on_catalog():
    assert all(is_lie_algebra(e.algebra) for e in catalog.entries())
