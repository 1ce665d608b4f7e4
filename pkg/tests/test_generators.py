"""Generator constructors, closed-form commutators, and lambda expansions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartankak.errors import (
    DimensionMismatchError,
    InvalidMatrixError,
    InvalidSubscriptError,
    UnsupportedLabelError,
)
from cartankak.generators import (
    Diag,
    Lambda,
    LambdaHat,
    OrthoDiag,
    commutator_numeric,
    commutator_symbolic,
    from_lambda_terms,
    generator_from_label,
    hs_inner,
    make_diag,
    make_lambda,
    make_lambda_hat,
    make_ortho_diag,
    make_tensor_word,
    to_lambda_basis,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def all_lambda_labels(n):
    labels = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            labels += [Lambda(i, j), LambdaHat(i, j), Diag(i, j)]
    return labels


class TestConstructors:
    def test_lambda_12_is_sigma1(self):
        np.testing.assert_allclose(make_lambda(1, 2, 2).matrix, SX)

    def test_lambdahat_12_is_gell_mann_mu2(self):
        mu2 = np.zeros((3, 3), dtype=complex)
        mu2[0, 1], mu2[1, 0] = -1j, 1j
        np.testing.assert_allclose(make_lambda_hat(1, 2, 3).matrix, mu2)

    def test_diag_12_is_sigma3(self):
        np.testing.assert_allclose(make_diag(1, 2, 2).matrix, SZ)

    def test_ortho_diag_3_is_mu8(self):
        mu8 = np.diag([1.0, 1.0, -2.0]) / np.sqrt(3.0)
        np.testing.assert_allclose(make_ortho_diag(3, 3).matrix, mu8, atol=1e-15)

    def test_subscript_normalization(self):
        assert make_lambda(2, 1, 4).label == Lambda(1, 2)
        with pytest.raises(InvalidSubscriptError):
            make_lambda(1, 1, 4)
        with pytest.raises(InvalidSubscriptError):
            make_lambda(1, 5, 4)
        with pytest.raises(InvalidSubscriptError):
            make_lambda_hat(2, 1, 4)
        with pytest.raises(InvalidSubscriptError):
            make_diag(3, 2, 4)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_generators_hermitian_traceless(self, n):
        for lab in all_lambda_labels(n):
            g = generator_from_label(lab, n)
            np.testing.assert_allclose(g.matrix, g.matrix.conj().T, atol=1e-15)
            assert abs(np.trace(g.matrix)) < 1e-12


class TestTensorWords:
    def test_sigma3_i_sigma1_expansion(self):
        w = make_tensor_word(["p3", "p0", "p1"])
        got = sorted((round(c, 12), str(l)) for c, l in to_lambda_basis(w.matrix))
        assert got == [
            (-1.0, "lambda(5,6)"),
            (-1.0, "lambda(7,8)"),
            (1.0, "lambda(1,2)"),
            (1.0, "lambda(3,4)"),
        ]

    def test_sigma3_sigma1_sigma1_expansion(self):
        w = make_tensor_word(["p3", "p1", "p1"])
        got = sorted((round(c, 12), str(l)) for c, l in to_lambda_basis(w.matrix))
        assert got == [
            (-1.0, "lambda(5,8)"),
            (-1.0, "lambda(6,7)"),
            (1.0, "lambda(1,4)"),
            (1.0, "lambda(2,3)"),
        ]

    def test_identity_word_rejected(self):
        with pytest.raises(InvalidMatrixError):
            make_tensor_word(["p0", "p0"])

    def test_empty_word_rejected(self):
        with pytest.raises(UnsupportedLabelError):
            make_tensor_word([])

    def test_unknown_site_rejected(self):
        with pytest.raises(UnsupportedLabelError):
            make_tensor_word(["p7"])

    def test_mixed_site_word(self):
        # mu4 x sigma3 on the 3x2 system connects dimensions (1,5) and (2,6).
        w = make_tensor_word(["g4", "p3"])
        assert w.dim == 6
        got = sorted((round(c, 12), str(l)) for c, l in to_lambda_basis(w.matrix))
        assert got == [(-1.0, "lambda(2,6)"), (1.0, "lambda(1,5)")]

    def test_prime_site_symbols(self):
        w = make_tensor_word(["l5(1,2)", "p3"])
        assert w.dim == 10

    def test_kron_matches_numpy(self):
        w = make_tensor_word(["p2", "g3"])
        np.testing.assert_allclose(
            w.matrix, np.kron(SY, np.diag([1.0, -1.0, 0.0])), atol=1e-15
        )


class TestCommutatorNumeric:
    def test_pauli_relation(self):
        s1 = make_lambda(1, 2, 2)
        s3 = make_diag(1, 2, 2)
        np.testing.assert_allclose(commutator_numeric(s1, s3), -2j * SY, atol=1e-15)

    def test_conjugate_pair_gives_diagonal(self):
        a = make_lambda(1, 2, 4)
        b = make_lambda_hat(1, 2, 4)
        np.testing.assert_allclose(
            commutator_numeric(a, b), 2j * make_diag(1, 2, 4).matrix, atol=1e-15
        )

    def test_disjoint_subscripts_commute(self):
        a = make_lambda(1, 2, 4)
        b = make_lambda(3, 4, 4)
        np.testing.assert_allclose(commutator_numeric(a, b), 0.0, atol=1e-15)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            commutator_numeric(make_lambda(1, 2, 2), make_lambda(1, 2, 3))


class TestCommutatorSymbolic:
    def test_lambda_with_its_diag(self):
        r = commutator_symbolic(Lambda(1, 2), Diag(1, 2))
        assert r.terms == ((-2j, LambdaHat(1, 2)),)

    def test_shared_subscript(self):
        r = commutator_symbolic(Lambda(1, 3), Lambda(3, 4))
        assert r.terms == ((1j, LambdaHat(1, 4)),)

    def test_disjoint_hats_vanish(self):
        assert commutator_symbolic(LambdaHat(1, 2), LambdaHat(3, 4)).is_zero

    def test_unsupported_label(self):
        with pytest.raises(UnsupportedLabelError):
            commutator_symbolic(OrthoDiag(3), Lambda(1, 2))

    def test_coefficients_purely_imaginary(self):
        for la in all_lambda_labels(4):
            for lb in all_lambda_labels(4):
                for coef, _ in commutator_symbolic(la, lb).terms:
                    assert abs(coef.real) < 1e-15

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_numeric_exhaustively(self, n):
        labels = all_lambda_labels(n)
        gens = {l: generator_from_label(l, n) for l in labels}
        for la in labels:
            for lb in labels:
                sym = commutator_symbolic(la, lb).matrix(n)
                num = commutator_numeric(gens[la], gens[lb])
                assert np.linalg.norm(sym - num) < 1e-12


class TestHSInner:
    def test_conjugate_pair_orthogonal(self):
        assert hs_inner(make_lambda(1, 2, 4), make_lambda_hat(1, 2, 4)) == 0.0

    def test_lambda_norm(self):
        # Oracle: the two-entry matrix squared has trace 2, by direct numpy.
        m = np.zeros((4, 4), dtype=complex)
        m[0, 1] = m[1, 0] = 1.0
        expected = float(np.real(np.trace(m @ m)))
        assert expected == 2.0
        assert hs_inner(make_lambda(1, 2, 4), make_lambda(1, 2, 4)) == expected

    def test_pauli_words_orthogonal(self):
        a = make_tensor_word(["p3", "p0"])
        b = make_tensor_word(["p0", "p3"])
        assert abs(hs_inner(a, b)) < 1e-15


class TestLambdaBasisExpansion:
    def test_zero_matrix(self):
        assert to_lambda_basis(np.zeros((3, 3))) == []

    def test_non_hermitian_rejected(self):
        with pytest.raises(InvalidMatrixError):
            to_lambda_basis(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_projection_oracle_random_hermitian(self):
        # Oracle: off-diagonal coefficients via trace projections, diagonal by
        # least squares over the d_1l matrices; independent of the closed form.
        rng = np.random.default_rng(7)
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = (z + z.conj().T) / 2.0
        m -= np.trace(m) / 4.0 * np.eye(4)
        expected = {}
        for i in range(1, 5):
            for j in range(i + 1, 5):
                lam = generator_from_label(Lambda(i, j), 4).matrix
                hat = generator_from_label(LambdaHat(i, j), 4).matrix
                expected[str(Lambda(i, j))] = np.real(np.trace(lam @ m)) / 2.0
                expected[str(LambdaHat(i, j))] = np.real(np.trace(hat @ m)) / 2.0
        diags = [generator_from_label(Diag(1, l), 4).matrix for l in range(2, 5)]
        a = np.array([np.real(np.diag(d)) for d in diags]).T
        sol, *_ = np.linalg.lstsq(a, np.real(np.diag(m)), rcond=None)
        for l, c in zip(range(2, 5), sol):
            expected[str(Diag(1, l))] = c
        got = {str(lab): c for c, lab in to_lambda_basis(m)}
        for key, val in got.items():
            assert abs(val - expected[key]) < 1e-12
        np.testing.assert_allclose(
            from_lambda_terms(to_lambda_basis(m), 4), m, atol=1e-12
        )

    @pytest.mark.parametrize("n", [2, 3, 6, 8])
    def test_round_trip_random(self, n):
        rng = np.random.default_rng(n)
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        m = (z + z.conj().T) / 2.0
        m -= np.trace(m) / n * np.eye(n)
        np.testing.assert_allclose(
            from_lambda_terms(to_lambda_basis(m), n), m, atol=1e-12
        )


@st.composite
def lambda_label_pairs(draw):
    n = draw(st.integers(min_value=2, max_value=8))
    kinds = [Lambda, LambdaHat, Diag]

    def one():
        i = draw(st.integers(min_value=1, max_value=n - 1))
        j = draw(st.integers(min_value=i + 1, max_value=n))
        return draw(st.sampled_from(kinds))(i, j)

    return n, one(), one()


class TestAlgebraProperties:
    @given(lambda_label_pairs())
    @settings(max_examples=200, deadline=None)
    def test_antisymmetry(self, data):
        n, la, lb = data
        ga, gb = generator_from_label(la, n), generator_from_label(lb, n)
        np.testing.assert_allclose(
            commutator_numeric(ga, gb), -commutator_numeric(gb, ga), atol=1e-14
        )

    @given(lambda_label_pairs())
    @settings(max_examples=200, deadline=None)
    def test_symbolic_agrees_with_numeric(self, data):
        n, la, lb = data
        ga, gb = generator_from_label(la, n), generator_from_label(lb, n)
        np.testing.assert_allclose(
            commutator_symbolic(la, lb).matrix(n),
            commutator_numeric(ga, gb),
            atol=1e-12,
        )

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_jacobi_identity_random_triples(self, n):
        rng = np.random.default_rng(17)
        labels = all_lambda_labels(n)
        for _ in range(50):
            a, b, c = (
                generator_from_label(labels[rng.integers(len(labels))], n).matrix
                for _ in range(3)
            )
            jac = (
                (a @ b - b @ a) @ c - c @ (a @ b - b @ a)
                + (b @ c - c @ b) @ a - a @ (b @ c - c @ b)
                + (c @ a - a @ c) @ b - b @ (c @ a - a @ c)
            )
            assert np.linalg.norm(jac) < 1e-10
