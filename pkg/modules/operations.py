"""
One-shot evaluation of any public operation from a JSON argument document.

Matrices use the exchange format ({"n", "re", "im"}), families are lists
of matrices, sequences are lists of numbers and functions are given in
their compact text form ("q_log:0.5", "power:0.5") or as JSON objects.
"""

import logging
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from . import deformed_log, loewner_ineq, matfun, scalar_ineq, trace_ineq
from .deformed_log import QLogParams
from .errors import ConfigError, UnknownSuiteError, VerificationError
from .functions import FunctionSpec
from .loewner_ineq import MatrixFamily, OperatorFunctionSpec
from .matfun import (
    HermitianMatrix,
    LoewnerVerdict,
    SpectralDecomposition,
    matrix_from_exchange,
    to_exchange,
)
from .scalar_ineq import InequalityVerdict, RatioBounds, SequencePair

logger = logging.getLogger(__name__)

Handler = Callable[[Dict[str, Any]], Any]

OPERATIONS: Dict[str, Handler] = {}


def operation(name: str):
    """Decorator registering an argument-document handler"""
    def decorator(handler: Handler) -> Handler:
        OPERATIONS[name] = handler
        return handler
    return decorator


def _get(args: Dict[str, Any], key: str, default: Any = ...) -> Any:
    if key in args:
        return args[key]
    if default is ...:
        raise ConfigError(f"missing argument {key!r}")
    return default


def _number(args, key, default=...) -> Optional[float]:
    value = _get(args, key, default)
    return None if value is None else float(value)


def _params(args) -> QLogParams:
    window = args.get('limit_window')
    return QLogParams(_number(args, 'q')) if window is None else QLogParams(_number(args, 'q'), float(window))


def _pair(args) -> SequencePair:
    return SequencePair(tuple(_get(args, 'a')), tuple(_get(args, 'b')))


def _function(args, key='f') -> FunctionSpec:
    return FunctionSpec.from_dict(_get(args, key))


def _operator_function(args, key='f') -> OperatorFunctionSpec:
    return OperatorFunctionSpec.from_dict(_get(args, key))


def _matrix(args, key) -> HermitianMatrix:
    return matrix_from_exchange(_get(args, key))


def _square(args, key) -> np.ndarray:
    return matrix_from_exchange(_get(args, key), hermitian=False)


def _family(args, key) -> MatrixFamily:
    return MatrixFamily.of(matrix_from_exchange(doc) for doc in _get(args, key))


def encode_result(value: Any) -> Any:
    """JSON-ready form of an operation result"""
    if isinstance(value, (InequalityVerdict, LoewnerVerdict)):
        return value.to_dict()
    if isinstance(value, HermitianMatrix):
        return to_exchange(value)
    if isinstance(value, SpectralDecomposition):
        return {'eigenvalues': value.eigenvalues.tolist(), 'unitary': to_exchange(value.unitary)}
    if isinstance(value, RatioBounds):
        return {'m_g': value.lower, 'M_g': value.upper}
    if isinstance(value, np.ndarray):
        return to_exchange(value) if value.ndim == 2 else value.tolist()
    if isinstance(value, tuple):
        return [encode_result(item) for item in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


# q-logarithm

@operation('q_log')
def _q_log(args):
    return deformed_log.q_log(_number(args, 'x'), _params(args))


@operation('q_log_product')
def _q_log_product(args):
    return deformed_log.q_log_product(_number(args, 'x'), _number(args, 'y'), _params(args))


@operation('q_log_product_alt')
def _q_log_product_alt(args):
    return deformed_log.q_log_product_alt(_number(args, 'x'), _number(args, 'y'), _params(args))


@operation('q_log_quotient')
def _q_log_quotient(args):
    return deformed_log.q_log_quotient(_number(args, 'x'), _number(args, 'y'), _params(args))


@operation('q_log_reciprocal')
def _q_log_reciprocal(args):
    return deformed_log.q_log_reciprocal(_number(args, 'y'), _params(args))


@operation('q_log_power')
def _q_log_power(args):
    return deformed_log.q_log_power(_number(args, 'x'), _params(args))


# Scalar inequalities

@operation('ratio_bounds')
def _ratio_bounds(args):
    return scalar_ineq.ratio_bounds(_function(args, 'g'), _pair(args))


@operation('convexity_check')
def _convexity_check(args):
    interval = _get(args, 'interval')
    return scalar_ineq.convexity_check(
        _get(args, 'h_kind'), _function(args), (float(interval[0]), float(interval[1])),
        int(_get(args, 'grid_points', 101)), args.get('direction'),
    )


@operation('generalized_log_sum_gap')
def _generalized(args):
    return scalar_ineq.generalized_log_sum_gap(_function(args), _function(args, 'g'), _pair(args),
                                               _number(args, 'tol', None))


@operation('concave_log_sum_gap')
def _concave(args):
    return scalar_ineq.concave_log_sum_gap(_function(args), _function(args, 'g'), _pair(args),
                                           _number(args, 'tol', None))


@operation('reverse_log_sum_gap')
def _reverse(args):
    return scalar_ineq.reverse_log_sum_gap(_function(args), _function(args, 'g'), _pair(args),
                                           _number(args, 'tol', None))


@operation('rational_example_gap')
def _rational(args):
    return scalar_ineq.rational_example_gap(_pair(args), _number(args, 'tol', None))


@operation('q_log_sum_gap')
def _q_log_sum(args):
    return scalar_ineq.q_log_sum_gap(_pair(args), _number(args, 'q'), _number(args, 'r', 1.0),
                                     _number(args, 'tol', None))


@operation('jensen_gap')
def _jensen(args):
    return scalar_ineq.jensen_gap(_function(args), _get(args, 'points'), _get(args, 'weights'),
                                  _number(args, 'tol', None))


@operation('csiszar_gap')
def _csiszar(args):
    return scalar_ineq.csiszar_gap(_function(args), _pair(args), _number(args, 'tol', None))


@operation('standard_log_sum_gap')
def _standard(args):
    return scalar_ineq.standard_log_sum_gap(_pair(args), _number(args, 'tol', None))


@operation('scalar_inverse_mean_gap')
def _inverse_mean(args):
    return scalar_ineq.scalar_inverse_mean_gap(_function(args), _pair(args), _number(args, 'tol', None))


@operation('scalar_weighted_inverse_gap')
def _weighted_inverse(args):
    return scalar_ineq.scalar_weighted_inverse_gap(_function(args), _pair(args), _number(args, 'tol', None))


# Functional calculus

@operation('hermitize')
def _hermitize(args):
    return matfun.hermitize(_square(args, 'M'))


@operation('spectral_decompose')
def _spectral(args):
    return matfun.spectral_decompose(_matrix(args, 'A'), _get(args, 'method', 'eigh'))


@operation('jacobi_eigh')
def _jacobi(args):
    return matfun.jacobi_eigh(_matrix(args, 'A'))


@operation('apply_function')
def _apply(args):
    return matfun.apply_function(_function(args), _matrix(args, 'A'), bool(args.get('psd_clamp', False)))


@operation('loewner_leq')
def _loewner(args):
    return matfun.loewner_leq(_matrix(args, 'A'), _matrix(args, 'B'), _number(args, 'tol', None))


@operation('make_commuting_pair')
def _commuting_pair(args):
    return matfun.make_commuting_pair(_square(args, 'U'), _get(args, 'lambda_a'), _get(args, 'lambda_b'))


@operation('psd_inverse')
def _inverse(args):
    return matfun.psd_inverse(_matrix(args, 'A'), _number(args, 'floor', None))


@operation('psd_sqrt')
def _sqrt(args):
    return matfun.psd_sqrt(_matrix(args, 'A'))


@operation('psd_inv_sqrt')
def _inv_sqrt(args):
    return matfun.psd_inv_sqrt(_matrix(args, 'A'), _number(args, 'floor', None))


@operation('commutator_norm')
def _commutator(args):
    return matfun.commutator_norm(_matrix(args, 'A'), _matrix(args, 'B'))


@operation('joint_eigenvalues')
def _joint(args):
    a, b, _ = matfun.joint_eigenvalues(_matrix(args, 'A'), _matrix(args, 'B'))
    return {'a': a.tolist(), 'b': b.tolist()}


# Trace forms

@operation('trace_log_sum_gap')
def _trace_log_sum(args):
    return trace_ineq.trace_log_sum_gap(_function(args), _function(args, 'g'), _matrix(args, 'A'),
                                        _matrix(args, 'B'), _number(args, 'tol', None))


@operation('reverse_trace_gap')
def _reverse_trace(args):
    return trace_ineq.reverse_trace_gap(_function(args), _function(args, 'g'), _matrix(args, 'A'),
                                        _matrix(args, 'B'), _number(args, 'tol', None))


@operation('q_trace_gap')
def _q_trace(args):
    return trace_ineq.q_trace_gap(_matrix(args, 'A'), _matrix(args, 'B'), _number(args, 'q'),
                                  _number(args, 'r', 1.0), _number(args, 'tol', None))


@operation('exp_log_trace_gap')
def _exp_log(args):
    return trace_ineq.exp_log_trace_gap(_matrix(args, 'A'), _matrix(args, 'B'), _number(args, 'tol', None))


@operation('quantum_relative_entropy')
def _relative_entropy(args):
    return trace_ineq.quantum_relative_entropy(_matrix(args, 'rho'), _matrix(args, 'sigma'))


@operation('von_neumann_entropy')
def _entropy(args):
    return trace_ineq.von_neumann_entropy(_matrix(args, 'rho'))


@operation('entropy_bound_gap')
def _entropy_bound(args):
    return trace_ineq.entropy_bound_gap(_matrix(args, 'A'), _number(args, 'r', 1.0), _number(args, 'tol', None))


# Loewner order

@operation('perspective')
def _perspective(args):
    return loewner_ineq.perspective(_operator_function(args), _matrix(args, 'A'), _matrix(args, 'B'))


@operation('hansen_jensen_residual')
def _hansen(args):
    return loewner_ineq.hansen_jensen_residual(
        _operator_function(args), _square(args, 'contraction'), _matrix(args, 'X'),
        _get(args, 'direction', 'auto'), _number(args, 'tol', None),
    )


@operation('theorem6_residual')
def _theorem6(args):
    return loewner_ineq.theorem6_residual(_operator_function(args), _family(args, 'A_family'),
                                          _family(args, 'B_family'), _number(args, 'tol', None))


@operation('operator_shannon_residual')
def _shannon(args):
    return loewner_ineq.operator_shannon_residual(_family(args, 'A_family'), _family(args, 'B_family'),
                                                  _operator_function(args), _number(args, 'tol', None))


@operation('lemma9_residual')
def _lemma9(args):
    xs = [matrix_from_exchange(doc, hermitian=False) for doc in _get(args, 'X_family')]
    return loewner_ineq.lemma9_residual(xs, _family(args, 'A_family'), _number(args, 'tol', None))


@operation('theorem10_residual_1')
def _theorem10_1(args):
    return loewner_ineq.theorem10_residual_1(_operator_function(args), _family(args, 'A_family'),
                                             _family(args, 'B_family'), _number(args, 'tol', None))


@operation('theorem10_residual_2')
def _theorem10_2(args):
    return loewner_ineq.theorem10_residual_2(_operator_function(args), _family(args, 'A_family'),
                                             _family(args, 'B_family'), _number(args, 'tol', None))


@operation('theorem10_congruence_residual')
def _theorem10_congruence(args):
    return loewner_ineq.theorem10_congruence_residual(_operator_function(args), _family(args, 'A_family'),
                                                      _family(args, 'B_family'), _number(args, 'tol', None))


@operation('intermediate_57_residual')
def _intermediate(args):
    return loewner_ineq.intermediate_57_residual(
        _operator_function(args), _matrix(args, 'A_i'), _matrix(args, 'B_i'),
        _matrix(args, 'A'), _matrix(args, 'B'), _number(args, 'tol', None),
    )


def list_operations() -> List[str]:
    return sorted(OPERATIONS)


def evaluate_operation(name: str, args: Dict[str, Any]) -> Dict[str, Any]:
    """
    Evaluate a registered operation.

    Args:
        name: Operation name, e.g. "theorem6_residual"
        args: Argument document

    Returns:
        {"op": name, "result": encoded result, "holds": bool or None}
    """
    try:
        handler = OPERATIONS[name]
    except KeyError:
        raise UnknownSuiteError(f"unknown operation {name!r}") from None
    if not isinstance(args, dict):
        raise ConfigError("operation arguments must be a JSON object")
    try:
        result = handler(args)
    except VerificationError:
        raise
    except (TypeError, ValueError, KeyError) as e:
        raise ConfigError(f"invalid arguments for {name}: {e}") from e
    holds = getattr(result, 'holds', None)
    logger.debug("evaluated %s, holds=%s", name, holds)
    return {'op': name, 'result': encode_result(result), 'holds': holds}
