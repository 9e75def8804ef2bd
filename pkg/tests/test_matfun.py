"""
Unit tests for the Hermitian functional calculus.
"""

import math

import numpy as np
import pytest

from modules.errors import (
    CommutationError,
    DimensionError,
    DomainError,
    NumericError,
    PreconditionError,
    SingularityError,
)
from modules.functions import FunctionSpec
from modules.matfun import (
    HermitianMatrix,
    LoewnerVerdict,
    apply_function,
    check_commuting,
    commutator_norm,
    congruence,
    eigenvalues,
    hermitize,
    jacobi_eigh,
    joint_eigenvalues,
    loewner_leq,
    make_commuting_pair,
    matrix_from_exchange,
    psd_inv_sqrt,
    psd_inverse,
    psd_sqrt,
    spectral_decompose,
    spectral_norm,
    to_exchange,
)


@pytest.mark.unit
class TestHermitianMatrix:
    """Test construction and arithmetic"""

    def test_hermitizes_on_construction(self):
        A = HermitianMatrix([[1, 2], [0, 1]])
        np.testing.assert_allclose(A.entries, [[1, 1], [1, 1]])

    def test_hermitian_input_is_fixed_point(self):
        entries = np.array([[2, 1 - 1j], [1 + 1j, 3]])
        np.testing.assert_array_equal(hermitize(entries).entries, entries)

    def test_entries_are_read_only(self):
        A = HermitianMatrix.identity(2)
        with pytest.raises(ValueError):
            A.entries[0, 0] = 5

    @pytest.mark.parametrize('entries', [[[1, 2, 3]], [], [[[1]]]])
    def test_shape_rejected(self, entries):
        with pytest.raises(DimensionError):
            HermitianMatrix(entries)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            HermitianMatrix([[math.nan, 0], [0, 1]])

    def test_arithmetic(self):
        A = HermitianMatrix.diag([1, 2])
        B = HermitianMatrix.diag([3, 5])
        assert (A + B).allclose(HermitianMatrix.diag([4, 7]))
        assert (B - A).allclose(HermitianMatrix.diag([2, 3]))
        assert (2 * A).allclose(HermitianMatrix.diag([2, 4]))
        assert A.trace == 3.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            HermitianMatrix.identity(2) + HermitianMatrix.identity(3)


@pytest.mark.unit
class TestSpectralDecomposition:
    """Test eigensolvers and the functional calculus"""

    def test_reconstructs(self, random_pd):
        A = random_pd(4)
        assert spectral_decompose(A).reconstruct().allclose(A)

    def test_ascending(self, random_pd):
        values = spectral_decompose(random_pd(5)).eigenvalues
        assert np.all(np.diff(values) >= 0)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            spectral_decompose(HermitianMatrix.identity(2), method='qr')

    def test_jacobi_matches_eigh(self, rng):
        raw = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        A = hermitize(raw)
        jacobi = jacobi_eigh(A)
        np.testing.assert_allclose(jacobi.eigenvalues, eigenvalues(A), atol=1e-10)
        assert jacobi.reconstruct().allclose(A, rtol=1e-10)
        assert spectral_decompose(A, method='jacobi').reconstruct().allclose(A, rtol=1e-10)

    def test_jacobi_on_diagonal_input(self):
        result = jacobi_eigh(HermitianMatrix.diag([3, 1, 2]))
        np.testing.assert_allclose(result.eigenvalues, [1, 2, 3])

    def test_jacobi_sweep_cap(self):
        with pytest.raises(NumericError):
            jacobi_eigh(HermitianMatrix([[1, 2], [2, 1]]), max_sweeps=0)

    def test_apply_log(self, rotation):
        A = HermitianMatrix(rotation @ np.diag([1.0, math.e]) @ rotation.T)
        expected = HermitianMatrix(rotation @ np.diag([0.0, 1.0]) @ rotation.T)
        assert apply_function(FunctionSpec.log(), A).allclose(expected)

    def test_apply_outside_domain(self):
        with pytest.raises(DomainError):
            apply_function(FunctionSpec.log(), HermitianMatrix.diag([1.0, -1.0]))

    def test_psd_clamp(self):
        A = HermitianMatrix.diag([4.0, -1e-14])
        root = apply_function(FunctionSpec.power(0.5), A, psd_clamp=True)
        assert root.allclose(HermitianMatrix.diag([2.0, 0.0]))

    def test_psd_clamp_rejects_real_negatives(self):
        with pytest.raises(DomainError):
            apply_function(FunctionSpec.power(0.5), HermitianMatrix.diag([4.0, -0.1]), psd_clamp=True)


@pytest.mark.unit
class TestLoewnerOrder:
    """Test Loewner comparison and its tolerance"""

    def test_strict_failure(self):
        B = HermitianMatrix([[2, 2], [2, 2]])
        verdict = loewner_leq(HermitianMatrix.identity(2), B)
        assert verdict.residual_min_eigenvalue == pytest.approx(-1.0)
        assert not verdict.holds

    def test_identity_below_double(self):
        verdict = loewner_leq(HermitianMatrix.identity(3), 2 * HermitianMatrix.identity(3))
        assert verdict.holds
        assert verdict.gap == pytest.approx(1.0)

    def test_round_off_within_tolerance(self):
        verdict = LoewnerVerdict.from_residual(HermitianMatrix.diag([-1e-9, 1.0]), tolerance=1e-8)
        assert verdict.holds

    def test_to_dict(self):
        data = loewner_leq(HermitianMatrix.identity(2), HermitianMatrix.identity(2)).to_dict()
        assert data['kind'] == 'loewner'
        assert data['holds'] is True
        assert 'residual' not in data


@pytest.mark.unit
class TestPsdHelpers:
    """Test inverse, square root and congruence"""

    def test_inverse(self):
        assert psd_inverse(HermitianMatrix.diag([2, 4])).allclose(HermitianMatrix.diag([0.5, 0.25]))

    def test_inverse_of_random(self, random_pd):
        A = random_pd(4)
        product = A @ psd_inverse(A)
        np.testing.assert_allclose(product, np.eye(4), atol=1e-10)

    def test_inverse_singular(self):
        with pytest.raises(SingularityError):
            psd_inverse(HermitianMatrix.diag([1.0, 0.0]))

    def test_singularity_is_precondition(self):
        assert issubclass(SingularityError, PreconditionError)

    def test_sqrt(self):
        assert psd_sqrt(HermitianMatrix.diag([4, 9])).allclose(HermitianMatrix.diag([2, 3]))

    def test_sqrt_squares_back(self, random_pd):
        A = random_pd(3)
        root = psd_sqrt(A)
        np.testing.assert_allclose(root @ root, A.entries, atol=1e-10)

    def test_sqrt_rejects_negative(self):
        with pytest.raises(DomainError):
            psd_sqrt(HermitianMatrix.diag([1.0, -1.0]))

    def test_inv_sqrt(self):
        assert psd_inv_sqrt(HermitianMatrix.diag([4, 16])).allclose(HermitianMatrix.diag([0.5, 0.25]))

    def test_congruence(self):
        X = np.array([[0, 1], [1, 0]])
        assert congruence(X, HermitianMatrix.diag([1, 2])).allclose(HermitianMatrix.diag([2, 1]))

    def test_spectral_norm(self):
        assert spectral_norm(np.array([[0, 3], [0, 0]])) == pytest.approx(3.0)


@pytest.mark.unit
class TestCommutingPairs:
    """Test commuting-pair construction and simultaneous diagonalization"""

    def test_make_pair_commutes(self, rotation):
        A, B = make_commuting_pair(rotation, [1, 2], [3, 5])
        assert commutator_norm(A, B) < 1e-12
        np.testing.assert_allclose(eigenvalues(A), [1, 2])

    def test_make_pair_rejects_non_unitary(self):
        with pytest.raises(PreconditionError):
            make_commuting_pair(np.array([[1, 1], [0, 1]]), [1, 2], [3, 4])

    def test_make_pair_length_mismatch(self, rotation):
        with pytest.raises(DimensionError):
            make_commuting_pair(rotation, [1, 2, 3], [3, 4])

    def test_non_commuting(self):
        with pytest.raises(CommutationError):
            check_commuting(HermitianMatrix.diag([1, 2]), HermitianMatrix([[0, 1], [1, 0]]))

    def test_joint_eigenvalues(self, rotation):
        A, B = make_commuting_pair(rotation, [1, 2], [3, 5])
        a, b, U = joint_eigenvalues(A, B)
        assert sorted(zip(np.round(a, 10), np.round(b, 10))) == [(1.0, 3.0), (2.0, 5.0)]
        np.testing.assert_allclose((U * a) @ U.conj().T, A.entries, atol=1e-10)

    def test_joint_eigenvalues_with_degenerate_member(self):
        a, b, _ = joint_eigenvalues(HermitianMatrix.identity(2), HermitianMatrix.diag([1, 2]))
        np.testing.assert_allclose(a, [1, 1])
        np.testing.assert_allclose(sorted(b), [1, 2])


@pytest.mark.unit
class TestExchangeFormat:
    """Test the n/re/im matrix document"""

    def test_roundtrip(self):
        A = HermitianMatrix([[2, 1j], [-1j, 3]])
        assert matrix_from_exchange(to_exchange(A)).allclose(A)

    def test_imaginary_part_optional(self):
        A = matrix_from_exchange({'n': 2, 're': [[1, 0], [0, 2]]})
        assert A.allclose(HermitianMatrix.diag([1, 2]))

    def test_general_matrix(self):
        X = matrix_from_exchange({'n': 2, 're': [[1, 2], [3, 4]]}, hermitian=False)
        assert X[1, 0] == 3

    @pytest.mark.parametrize('document', [
        {'re': [[1]]},
        {'n': 2, 're': [[1, 0]]},
        {'n': 'two', 're': [[1]]},
    ])
    def test_malformed(self, document):
        with pytest.raises(DimensionError):
            matrix_from_exchange(document)
