"""
Tests for one-shot operation evaluation from JSON argument documents.
"""

import math

import numpy as np
import pytest

from modules.errors import CommutationError, ConfigError, DomainError, UnknownSuiteError
from modules.matfun import HermitianMatrix
from modules.operations import OPERATIONS, encode_result, evaluate_operation, list_operations

diag = HermitianMatrix.diag


@pytest.mark.unit
class TestRegistry:
    """Test the operation registry and error mapping"""

    def test_lists_every_operation(self):
        names = list_operations()
        assert names == sorted(OPERATIONS)
        for expected in ('q_log', 'ratio_bounds', 'convexity_check', 'loewner_leq', 'psd_inverse',
                         'exp_log_trace_gap', 'theorem6_residual', 'theorem10_residual_2',
                         'intermediate_57_residual', 'hansen_jensen_residual'):
            assert expected in names

    def test_unknown_operation(self):
        with pytest.raises(UnknownSuiteError):
            evaluate_operation('q_exp', {})

    def test_arguments_must_be_object(self):
        with pytest.raises(ConfigError):
            evaluate_operation('q_log', [1, 2])

    def test_missing_argument(self):
        with pytest.raises(ConfigError, match="'q'"):
            evaluate_operation('q_log', {'x': 2.0})

    def test_malformed_argument(self):
        with pytest.raises(ConfigError):
            evaluate_operation('q_log', {'x': 'two', 'q': 0.5})

    def test_domain_errors_pass_through(self):
        with pytest.raises(DomainError):
            evaluate_operation('q_log', {'x': -1.0, 'q': 0.5})


@pytest.mark.unit
class TestScalarOperations:
    """Test q-log and scalar inequality operations"""

    def test_q_log(self):
        result = evaluate_operation('q_log', {'x': 4.0, 'q': 0.5})
        assert result == {'op': 'q_log', 'result': pytest.approx(2.0), 'holds': None}

    def test_q_log_with_window(self):
        result = evaluate_operation('q_log', {'x': math.e, 'q': 1.0 + 5e-7, 'limit_window': 1e-6})
        assert result['result'] == pytest.approx(1.0, abs=1e-15)

    def test_q_log_product(self):
        result = evaluate_operation('q_log_product', {'x': 2.0, 'y': 3.0, 'q': 0.5})
        assert result['result'] == pytest.approx(2.898979, abs=1e-6)

    def test_ratio_bounds(self):
        result = evaluate_operation('ratio_bounds', {'g': 'power:2', 'a': [1, 2], 'b': [2, 1]})
        assert result['result'] == {'m_g': pytest.approx(0.25), 'M_g': pytest.approx(4.0)}

    def test_convexity_check(self):
        args = {'h_kind': 'xfx', 'f': 'q_log:3', 'interval': [0.1, 10]}
        assert evaluate_operation('convexity_check', args)['result'] is False

    def test_generalized_log_sum(self):
        result = evaluate_operation('generalized_log_sum_gap',
                                    {'f': 'log', 'g': 'identity', 'a': [1, 2], 'b': [2, 1]})
        assert result['holds'] is True
        assert result['result']['gap'] == pytest.approx(math.log(2.0))

    def test_q_log_sum_default_exponent(self):
        result = evaluate_operation('q_log_sum_gap', {'a': [1, 2], 'b': [2, 1], 'q': 3})
        assert result['result']['claim'] == '<='
        assert result['result']['gap'] == pytest.approx(1.0 / 12.0)

    def test_rational_example(self):
        result = evaluate_operation('rational_example_gap', {'a': [1, 2], 'b': [2, 1]})
        assert result['result']['gap'] == pytest.approx(2.0 / 9.0)

    def test_weighted_inverse_fails(self):
        result = evaluate_operation('scalar_weighted_inverse_gap',
                                    {'f': 'identity', 'a': [1, 100], 'b': [1, 1]})
        assert result['holds'] is False

    def test_function_as_object(self):
        args = {'f': {'family': 'tabulated', 'xs': [0, 1, 2], 'ys': [0, 1, 4]},
                'points': [0.5, 1.5], 'weights': [0.5, 0.5]}
        assert evaluate_operation('jensen_gap', args)['holds'] is True


@pytest.mark.unit
class TestMatrixOperations:
    """Test functional calculus and trace operations"""

    def test_psd_inverse(self, exchange):
        result = evaluate_operation('psd_inverse', {'A': exchange(diag([2, 4]))})
        np.testing.assert_allclose(result['result']['re'], [[0.5, 0.0], [0.0, 0.25]], atol=1e-15)

    def test_loewner_leq(self, exchange):
        args = {'A': exchange(diag([1, 1])), 'B': exchange(HermitianMatrix([[2, 2], [2, 2]]))}
        result = evaluate_operation('loewner_leq', args)
        assert result['holds'] is False
        assert result['result']['residual_min_eigenvalue'] == pytest.approx(-1.0)

    def test_spectral_decompose(self, exchange):
        result = evaluate_operation('spectral_decompose', {'A': exchange(diag([3, 1])), 'method': 'jacobi'})
        assert result['result']['eigenvalues'] == pytest.approx([1.0, 3.0])
        assert result['result']['unitary']['n'] == 2

    def test_hermitize_general_matrix(self):
        result = evaluate_operation('hermitize', {'M': {'n': 2, 're': [[1, 2], [0, 1]]}})
        assert result['result']['re'] == [[1.0, 1.0], [1.0, 1.0]]

    def test_make_commuting_pair(self, exchange, rotation):
        args = {'U': exchange(rotation), 'lambda_a': [1, 2], 'lambda_b': [3, 4]}
        first, second = evaluate_operation('make_commuting_pair', args)['result']
        assert first['n'] == second['n'] == 2

    def test_joint_eigenvalues_non_commuting(self, exchange):
        args = {'A': exchange(diag([1, 2])), 'B': exchange(HermitianMatrix([[0, 1], [1, 0]]))}
        with pytest.raises(CommutationError):
            evaluate_operation('joint_eigenvalues', args)

    def test_exp_log_trace(self, exchange):
        result = evaluate_operation('exp_log_trace_gap', {'A': exchange(diag([2, 1])), 'B': exchange(diag([1, 2]))})
        assert result['result']['gap'] == pytest.approx(math.log(2.0))

    def test_relative_entropy(self, exchange):
        result = evaluate_operation('quantum_relative_entropy',
                                    {'rho': exchange(diag([1, 0])), 'sigma': exchange(diag([0.5, 0.5]))})
        assert result['result'] == pytest.approx(math.log(2.0))


@pytest.mark.unit
class TestLoewnerOperations:
    """Test family-valued operations"""

    def test_theorem6(self, exchange, scalar_matrices):
        args = {'f': 'power:0.5', 'A_family': exchange(scalar_matrices([2, 3])),
                'B_family': exchange(scalar_matrices([1, 4]))}
        result = evaluate_operation('theorem6_residual', args)
        assert result['holds'] is True
        assert result['result']['residual_min_eigenvalue'] == pytest.approx(5 - math.sqrt(2) - math.sqrt(12))

    def test_theorem10_2_counterexample(self, exchange, scalar_matrices):
        args = {'f': 'power:0.5', 'A_family': exchange(scalar_matrices([1, 100])),
                'B_family': exchange(scalar_matrices([1, 1]))}
        assert evaluate_operation('theorem10_residual_2', args)['holds'] is False

    def test_hansen_jensen(self, exchange):
        args = {'f': {'family': 'power', 'param': 0.5},
                'contraction': exchange(0.5 * diag([1, 1])), 'X': exchange(diag([4, 9]))}
        result = evaluate_operation('hansen_jensen_residual', args)
        assert result['result']['details']['direction'] == 'monotone'
        assert result['result']['residual_min_eigenvalue'] == pytest.approx(0.5)

    def test_lemma9(self, exchange, scalar_matrices):
        args = {'X_family': exchange(scalar_matrices([1, 1])), 'A_family': exchange(scalar_matrices([1, 1]))}
        assert evaluate_operation('lemma9_residual', args)['holds'] is True

    def test_bad_operator_function(self, exchange, scalar_matrices):
        args = {'f': 'power:3', 'A_family': exchange(scalar_matrices([2])),
                'B_family': exchange(scalar_matrices([1]))}
        with pytest.raises(DomainError):
            evaluate_operation('theorem6_residual', args)


@pytest.mark.unit
class TestEncodeResult:
    """Test JSON encoding of results"""

    def test_tuple_and_numpy_scalars(self):
        assert encode_result((np.float64(1.5), np.array([1.0, 2.0]))) == [1.5, [1.0, 2.0]]

    def test_plain_values_unchanged(self):
        assert encode_result({'a': [1.0]}) == {'a': [1.0]}
