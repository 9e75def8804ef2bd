"""
Trace-form log-sum inequalities for commuting self-adjoint matrices.

Each check is evaluated twice: once through the matrix functional calculus
and once through the scalar module on the joint eigenvalues. The two paths
must agree to ORACLE_TOLERANCE, otherwise OracleMismatchError is raised.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from config import Config
from .errors import DomainError, OracleMismatchError, PreconditionError
from .functions import FunctionSpec
from .matfun import (
    HermitianMatrix,
    apply_function,
    eigenvalues,
    hermitize,
    joint_eigenvalues,
    psd_inverse,
)
from .scalar_ineq import (
    InequalityVerdict,
    SequencePair,
    generalized_log_sum_gap,
    q_log_sum_gap,
    reverse_log_sum_gap,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DensityMatrix:
    """Positive semidefinite Hermitian matrix with unit trace"""
    base: HermitianMatrix

    def __post_init__(self):
        values = eigenvalues(self.base)
        if values[0] < -Config.PSD_CLAMP * max(1.0, self.base.max_norm):
            raise DomainError(f"density matrix has negative eigenvalue {values[0]:.3e}")
        if abs(self.base.trace - 1.0) > Config.DENSITY_TRACE_TOLERANCE:
            raise DomainError(f"density matrix trace is {self.base.trace:.12g}, expected 1")

    @classmethod
    def from_eigenvalues(cls, values, unitary: Optional[np.ndarray] = None) -> 'DensityMatrix':
        values = np.asarray(values, dtype=float)
        u = np.eye(values.size) if unitary is None else np.asarray(unitary)
        return cls(HermitianMatrix((u * values) @ u.conj().T))

    @property
    def n(self) -> int:
        return self.base.n


DensityLike = Union[DensityMatrix, HermitianMatrix, np.ndarray]


def _as_density(rho: DensityLike) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(rho if isinstance(rho, HermitianMatrix) else hermitize(rho))


class _TimesSelf:
    """x -> x f(x) with the 0 f(0) = 0 extension, usable by apply_function"""

    def __init__(self, f: FunctionSpec):
        self.f = f

    @property
    def name(self) -> str:
        return f"x*{self.f.name}"

    def evaluate(self, values):
        return self.f.xfx(values)


def _trace_product(X: HermitianMatrix, Y: HermitianMatrix) -> float:
    return float(np.real(np.trace(X.entries @ Y.entries)))


def _agree(label: str, matrix_value: float, oracle_value: float) -> None:
    scale = max(1.0, abs(oracle_value))
    if abs(matrix_value - oracle_value) > Config.ORACLE_TOLERANCE * scale:
        raise OracleMismatchError(
            f"{label}: matrix path {matrix_value:.17g} disagrees with "
            f"eigenvalue oracle {oracle_value:.17g}"
        )


def _joint_pair(A, B) -> Tuple[HermitianMatrix, HermitianMatrix, SequencePair]:
    A = A if isinstance(A, HermitianMatrix) else hermitize(A)
    B = B if isinstance(B, HermitianMatrix) else hermitize(B)
    a, b, _ = joint_eigenvalues(A, B)
    return A, B, SequencePair(tuple(a), tuple(b))


def _ratio_matrix(numerator: HermitianMatrix, denominator: HermitianMatrix) -> HermitianMatrix:
    # numerator and denominator commute, so the product is Hermitian up to round-off
    return hermitize(numerator.entries @ psd_inverse(denominator, floor=0.0).entries)


def _finish(verdict: InequalityVerdict, oracle: InequalityVerdict,
            pair: SequencePair) -> InequalityVerdict:
    _agree('lhs', verdict.lhs, oracle.lhs)
    _agree('rhs', verdict.rhs, oracle.rhs)
    verdict.details.update({
        'oracle_lhs': oracle.lhs,
        'oracle_rhs': oracle.rhs,
        'joint_a': list(pair.a),
        'joint_b': list(pair.b),
    })
    return verdict


def trace_log_sum_gap(f: FunctionSpec, g: FunctionSpec, A, B,
                      tolerance: Optional[float] = None) -> InequalityVerdict:
    """
    trace[g(A) f(g(A) g(B)^-1)] >= trace[g(A)] f(trace g(A) / trace g(B)).

    Args:
        f: Function with x*f(x) convex on the ratio interval
        g: Function positive on the spectrum of B
        A: Hermitian matrix commuting with B
        B: Hermitian matrix

    Returns:
        InequalityVerdict with the matrix-path sides and the oracle in details
    """
    A, B, pair = _joint_pair(A, B)
    oracle = generalized_log_sum_gap(f, g, pair, tolerance)

    gA = apply_function(g, A)
    gB = apply_function(g, B)
    ratio = _ratio_matrix(gA, gB)
    ratios = np.asarray(g.evaluate(np.array(pair.a))) / np.asarray(g.evaluate(np.array(pair.b)))
    if f.contains(ratios) and np.all(ratios != 0):
        lhs = _trace_product(gA, apply_function(f, ratio))
    else:
        # zero ratios: trace[g(B) h(P)] with h(x) = x f(x)
        lhs = _trace_product(gB, apply_function(_TimesSelf(f), ratio,
                                                  psd_clamp=bool(np.all(ratios >= 0))))
    rhs = gB.trace * float(f.xfx(gA.trace / gB.trace))
    verdict = InequalityVerdict.from_sides(lhs, rhs, '>=', tolerance, {'f': f.name, 'g': g.name})
    return _finish(verdict, oracle, pair)


def reverse_trace_gap(f: FunctionSpec, g: FunctionSpec, A, B,
                      tolerance: Optional[float] = None) -> InequalityVerdict:
    """trace[g(A) f(g(B) g(A)^-1)] <= trace[g(A)] f(trace g(B) / trace g(A))"""
    A, B, pair = _joint_pair(A, B)
    oracle = reverse_log_sum_gap(f, g, pair, tolerance)

    gA = apply_function(g, A)
    gB = apply_function(g, B)
    lhs = _trace_product(gA, apply_function(f, _ratio_matrix(gB, gA)))
    rhs = gA.trace * float(f.evaluate(gB.trace / gA.trace))
    verdict = InequalityVerdict.from_sides(lhs, rhs, '<=', tolerance, {'f': f.name, 'g': g.name})
    return _finish(verdict, oracle, pair)


def q_trace_gap(A, B, q: float, r: float,
                tolerance: Optional[float] = None) -> InequalityVerdict:
    """
    (trace B^r)^(1-q) trace[A^r ln_q(A^r B^-r)] against
    trace(A^r) [ln_q trace(A^r) - ln_q trace(B^r)], '>=' for q < 2.
    """
    A, B, pair = _joint_pair(A, B)
    if min(pair.b) <= 0:
        raise PreconditionError("B must be positive definite")
    oracle = q_log_sum_gap(pair, q, r, tolerance)

    power = FunctionSpec.power(r)
    q_log = FunctionSpec.q_log(q)
    Ar = apply_function(power, A)
    Br = apply_function(power, B)
    deformation = 0.0 if abs(q - 1.0) <= Config.Q_LIMIT_WINDOW else 1.0 - q
    lhs = Br.trace ** deformation * _trace_product(Ar, apply_function(q_log, _ratio_matrix(Ar, Br)))
    logs = q_log.evaluate(np.array([Ar.trace, Br.trace]))
    rhs = Ar.trace * float(logs[0] - logs[1])
    verdict = InequalityVerdict.from_sides(lhs, rhs, oracle.claim, tolerance, {'q': q, 'r': r})
    return _finish(verdict, oracle, pair)


def exp_log_trace_gap(A, B, tolerance: Optional[float] = None) -> InequalityVerdict:
    """
    trace(A log A) - trace(A log B) >= trace(A) log(trace A / trace B)
    for commuting positive definite A and B.

    The left side is taken on the joint eigenvalues and cross-checked
    against the functional calculus. The difference of trace(exp(A log A))
    and trace(exp(A log B)) is reported in details as a diagnostic only.
    """
    A, B, pair = _joint_pair(A, B)
    a, b = pair.arrays()
    if a.min() <= 0 or b.min() <= 0:
        raise PreconditionError("A and B must be positive definite")

    lhs = float(np.sum(a * np.log(a)) - np.sum(a * np.log(b)))
    rhs = float(a.sum()) * math.log(float(a.sum()) / float(b.sum()))

    log = FunctionSpec.log()
    log_a = apply_function(log, A)
    log_b = apply_function(log, B)
    matrix_lhs = _trace_product(A, log_a) - _trace_product(A, log_b)
    scale = max(1.0, abs(lhs))
    if abs(matrix_lhs - lhs) > 1e-8 * scale:
        raise OracleMismatchError(f"trace(A log A) - trace(A log B) = {matrix_lhs:.17g}, eigenbasis gives {lhs:.17g}")

    details = {'matrix_lhs': matrix_lhs, 'joint_a': list(pair.a), 'joint_b': list(pair.b)}
    try:
        exp = FunctionSpec.exp()
        first = apply_function(exp, hermitize(A.entries @ log_a.entries)).trace
        second = apply_function(exp, hermitize(A.entries @ log_b.entries)).trace
        details['trace_exp_difference'] = first - second
    except DomainError:
        details['trace_exp_difference'] = None
    return InequalityVerdict.from_sides(lhs, rhs, '>=', tolerance, details)


def quantum_relative_entropy(rho: DensityLike, sigma: DensityLike) -> float:
    """
    D(rho || sigma) = trace[rho (log rho - log sigma)] for commuting states.

    Eigenvalues of rho below SUPPORT_FLOOR count as exact zeros; sigma
    vanishing where rho has weight raises DomainError.
    """
    rho = _as_density(rho)
    sigma = _as_density(sigma)
    p, s, _ = joint_eigenvalues(rho.base, sigma.base)
    support = p > Config.SUPPORT_FLOOR
    if np.any(s[support] <= Config.SUPPORT_FLOOR):
        raise DomainError("support of rho is not contained in the support of sigma; D is +infinity")
    p = p[support]
    s = s[support]
    return float(np.sum(p * (np.log(p) - np.log(s))))


def von_neumann_entropy(rho: DensityLike) -> float:
    """-sum lambda_i ln lambda_i over the spectrum of rho"""
    rho = _as_density(rho)
    values = eigenvalues(rho.base)
    values = values[values > Config.SUPPORT_FLOOR]
    return float(-np.sum(values * np.log(values)))


def entropy_bound_gap(A, r: float = 1.0,
                      tolerance: Optional[float] = None) -> InequalityVerdict:
    """trace[A^r log A^r] >= trace(A^r) [log trace(A^r) - log n] for PSD A"""
    A = A if isinstance(A, HermitianMatrix) else hermitize(A)
    Ar = apply_function(FunctionSpec.power(r), A, psd_clamp=r > 0)
    total = Ar.trace
    if total <= 0:
        raise PreconditionError("trace(A^r) must be positive")
    lhs = apply_function(_TimesSelf(FunctionSpec.log()), Ar, psd_clamp=True).trace
    rhs = total * (math.log(total) - math.log(A.n))
    return InequalityVerdict.from_sides(lhs, rhs, '>=', tolerance, {'r': r})
