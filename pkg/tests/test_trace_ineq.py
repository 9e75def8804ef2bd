"""
Unit tests for the trace-form inequalities on commuting matrices.
"""

import math

import numpy as np
import pytest

from modules import trace_ineq
from modules.errors import CommutationError, DomainError, OracleMismatchError, PreconditionError
from modules.functions import FunctionSpec
from modules.matfun import HermitianMatrix, make_commuting_pair
from modules.scalar_ineq import InequalityVerdict
from modules.trace_ineq import (
    DensityMatrix,
    entropy_bound_gap,
    exp_log_trace_gap,
    q_trace_gap,
    quantum_relative_entropy,
    reverse_trace_gap,
    trace_log_sum_gap,
    von_neumann_entropy,
)

LOG = FunctionSpec.log()
IDENTITY = FunctionSpec.identity()
diag = HermitianMatrix.diag


@pytest.mark.unit
class TestTraceLogSum:
    """Test the trace log-sum inequality and its eigenvalue oracle"""

    def test_diagonal_hand_value(self):
        verdict = trace_log_sum_gap(LOG, IDENTITY, diag([1, 2]), diag([2, 1]))
        assert verdict.lhs == pytest.approx(math.log(2.0))
        assert verdict.gap == pytest.approx(math.log(2.0))
        assert verdict.details['oracle_lhs'] == pytest.approx(verdict.lhs)
        assert verdict.holds

    def test_rotated_pair_matches_diagonal(self, rotation):
        A, B = make_commuting_pair(rotation, [1, 2], [2, 1])
        verdict = trace_log_sum_gap(LOG, IDENTITY, A, B)
        assert verdict.lhs == pytest.approx(math.log(2.0))

    def test_power_g(self):
        verdict = trace_log_sum_gap(LOG, FunctionSpec.power(2), diag([1, 3, 2]), diag([2, 1, 4]))
        assert verdict.holds
        assert verdict.details['g'] == 'power:2'

    def test_non_commuting(self, rotation):
        B = HermitianMatrix(rotation @ np.diag([1.0, 3.0]) @ rotation.T)
        with pytest.raises(CommutationError):
            trace_log_sum_gap(LOG, IDENTITY, diag([1, 2]), B)

    def test_oracle_disagreement(self, monkeypatch):
        monkeypatch.setattr(trace_ineq, 'generalized_log_sum_gap',
                            lambda *args, **kwargs: InequalityVerdict.from_sides(5.0, 0.0))
        with pytest.raises(OracleMismatchError):
            trace_log_sum_gap(LOG, IDENTITY, diag([1, 2]), diag([2, 1]))


@pytest.mark.unit
class TestReverseAndQTrace:
    """Test the reverse trace form and the q-logarithmic trace form"""

    def test_reverse_hand_value(self):
        verdict = reverse_trace_gap(LOG, IDENTITY, diag([2, 1]), diag([1, 2]))
        assert verdict.claim == '<='
        assert verdict.lhs == pytest.approx(-math.log(2.0))
        assert verdict.gap == pytest.approx(math.log(2.0))

    def test_q_three(self):
        verdict = q_trace_gap(diag([1, 2]), diag([2, 1]), 3.0, 1.0)
        assert verdict.claim == '<='
        assert verdict.lhs == pytest.approx(-1.0 / 12.0)
        assert verdict.holds

    def test_q_half(self):
        verdict = q_trace_gap(diag([1, 2]), diag([2, 1]), 0.5, 1.0)
        assert verdict.lhs == pytest.approx(5 * math.sqrt(6.0) - 6 * math.sqrt(3.0))

    def test_q_needs_positive_b(self):
        with pytest.raises(PreconditionError):
            q_trace_gap(diag([1, 2]), diag([1, 0]), 0.5, 1.0)


@pytest.mark.unit
class TestExpLogTrace:
    """Test the relative-entropy trace inequality"""

    def test_equal_scalar_multiples(self):
        verdict = exp_log_trace_gap(diag([1, 1]), diag([2, 2]))
        assert verdict.lhs == pytest.approx(-2 * math.log(2.0))
        assert verdict.gap == pytest.approx(0.0, abs=1e-12)
        assert verdict.holds

    def test_crossed_pair(self):
        verdict = exp_log_trace_gap(diag([2, 1]), diag([1, 2]))
        assert verdict.gap == pytest.approx(math.log(2.0))
        assert verdict.details['matrix_lhs'] == pytest.approx(verdict.lhs)
        assert 'trace_exp_difference' in verdict.details

    def test_needs_positive_definite(self):
        with pytest.raises(PreconditionError):
            exp_log_trace_gap(diag([1, 0]), diag([1, 2]))


@pytest.mark.unit
class TestEntropies:
    """Test density matrices, relative entropy and von Neumann entropy"""

    def test_density_trace_checked(self):
        with pytest.raises(DomainError):
            DensityMatrix(diag([0.5, 0.6]))

    def test_density_negative_eigenvalue(self):
        with pytest.raises(DomainError):
            DensityMatrix(diag([1.5, -0.5]))

    def test_relative_entropy_pure_vs_mixed(self):
        assert quantum_relative_entropy(diag([1, 0]), diag([0.5, 0.5])) == pytest.approx(math.log(2.0))

    def test_relative_entropy_self_is_zero(self, rotation):
        rho = DensityMatrix.from_eigenvalues([0.3, 0.7], rotation)
        assert quantum_relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_relative_entropy_support_violation(self):
        with pytest.raises(DomainError):
            quantum_relative_entropy(diag([0.5, 0.5]), diag([1, 0]))

    def test_von_neumann_values(self):
        assert von_neumann_entropy(diag([0.25, 0.75])) == pytest.approx(0.562335, abs=1e-6)
        assert von_neumann_entropy(diag([1, 0])) == 0.0

    @pytest.mark.parametrize('n', [2, 3, 5])
    def test_maximally_mixed(self, n):
        assert von_neumann_entropy(np.eye(n) / n) == pytest.approx(math.log(n))

    def test_entropy_bound(self):
        verdict = entropy_bound_gap(diag([1, 3]))
        assert verdict.lhs == pytest.approx(3 * math.log(3.0))
        assert verdict.rhs == pytest.approx(4 * math.log(2.0))
        assert verdict.holds

    def test_entropy_bound_equality_at_identity(self):
        assert entropy_bound_gap(np.eye(3)).gap == pytest.approx(0.0, abs=1e-12)

    def test_entropy_bound_singular(self):
        verdict = entropy_bound_gap(diag([1, 0]))
        assert verdict.lhs == pytest.approx(0.0, abs=1e-15)
        assert verdict.rhs == pytest.approx(-math.log(2.0))
