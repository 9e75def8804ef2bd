"""
Hermitian matrix functional calculus.

f(A) = U diag(f(lambda_i)) U^H through a spectral decomposition, Loewner
order comparison, PSD-safe inverses and square roots, commuting-pair
construction and simultaneous diagonalization of commuting pairs.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from config import Config
from .errors import (
    CommutationError,
    DimensionError,
    DomainError,
    NumericError,
    PreconditionError,
    SingularityError,
)
from .functions import SpectralFunction

logger = logging.getLogger(__name__)

# Irrational mixing weights for diagonalizing A + c B
_MIXING_WEIGHTS = (0.6180339887498949, 1.4142135623730951, 0.3183098861837907)


class HermitianMatrix:
    """Dense self-adjoint matrix; entries are hermitized on construction and read-only"""

    __slots__ = ('_entries',)

    def __init__(self, entries: Any, hermitize: bool = True):
        matrix = np.array(entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise DimensionError(f"expected a non-empty square matrix, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise DomainError("matrix entries must be finite")
        if hermitize:
            matrix = (matrix + matrix.conj().T) / 2.0
        matrix.setflags(write=False)
        self._entries = matrix

    @classmethod
    def identity(cls, n: int) -> 'HermitianMatrix':
        return cls(np.eye(n))

    @classmethod
    def diag(cls, values: Sequence[float]) -> 'HermitianMatrix':
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self._entries)))

    @property
    def max_norm(self) -> float:
        return float(np.max(np.abs(self._entries)))

    def __add__(self, other: 'HermitianMatrix') -> 'HermitianMatrix':
        _same_dim(self, other)
        return HermitianMatrix(self._entries + other.entries)

    def __sub__(self, other: 'HermitianMatrix') -> 'HermitianMatrix':
        _same_dim(self, other)
        return HermitianMatrix(self._entries - other.entries)

    def __mul__(self, scalar: float) -> 'HermitianMatrix':
        return HermitianMatrix(self._entries * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> 'HermitianMatrix':
        return HermitianMatrix(-self._entries)

    def __matmul__(self, other: Any) -> np.ndarray:
        other = other.entries if isinstance(other, HermitianMatrix) else np.asarray(other)
        return self._entries @ other

    def __repr__(self) -> str:
        return f"HermitianMatrix(n={self.n}, max_norm={self.max_norm:.6g})"

    def allclose(self, other: 'HermitianMatrix', rtol: float = 1e-10) -> bool:
        """Entry-wise agreement relative to the larger max-norm"""
        scale = max(1.0, self.max_norm, other.max_norm)
        return float(np.max(np.abs(self._entries - other.entries))) <= rtol * scale


MatrixLike = Union[HermitianMatrix, np.ndarray]


@dataclass
class SpectralDecomposition:
    """Unitary U and ascending eigenvalues with A = U diag(eigenvalues) U^H"""
    unitary: np.ndarray
    eigenvalues: np.ndarray

    def reconstruct(self, values: Optional[np.ndarray] = None) -> HermitianMatrix:
        values = self.eigenvalues if values is None else np.asarray(values)
        u = self.unitary
        return HermitianMatrix((u * values) @ u.conj().T)


@dataclass
class LoewnerVerdict:
    """
    Verdict on a residual R = rhs - lhs of a claimed Loewner inequality.

    holds iff the smallest eigenvalue of R is at least
    -tolerance * max(1, max-norm of R).
    """
    residual_min_eigenvalue: float
    residual_norm: float
    tolerance: float
    holds: bool
    details: Dict[str, Any] = field(default_factory=dict)
    residual: Optional[HermitianMatrix] = field(default=None, repr=False)

    @classmethod
    def from_residual(cls, residual: HermitianMatrix, tolerance: Optional[float] = None,
                      details: Optional[Dict[str, Any]] = None) -> 'LoewnerVerdict':
        tolerance = Config.LOEWNER_TOLERANCE if tolerance is None else tolerance
        min_eig = float(eigenvalues(residual)[0])
        norm = residual.max_norm
        holds = min_eig >= -tolerance * max(1.0, norm)
        return cls(min_eig, norm, tolerance, holds, details or {}, residual)

    @property
    def gap(self) -> float:
        return self.residual_min_eigenvalue

    @property
    def margin(self) -> float:
        return self.residual_min_eigenvalue / max(1.0, self.residual_norm)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': 'loewner',
            'residual_min_eigenvalue': self.residual_min_eigenvalue,
            'residual_norm': self.residual_norm,
            'tolerance': self.tolerance,
            'holds': self.holds,
            'details': self.details,
        }


def _same_dim(a: HermitianMatrix, b: HermitianMatrix) -> None:
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")


def _as_hermitian(matrix: MatrixLike) -> HermitianMatrix:
    return matrix if isinstance(matrix, HermitianMatrix) else hermitize(matrix)


def as_square(matrix: Any) -> np.ndarray:
    """General square complex matrix, validated"""
    if isinstance(matrix, HermitianMatrix):
        return matrix.entries
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix entries must be finite")
    return m


def hermitize(matrix: Any) -> HermitianMatrix:
    """(M + M^H)/2; exact fixed point on Hermitian input"""
    return HermitianMatrix(as_square(matrix))


def jacobi_eigh(matrix: MatrixLike, max_sweeps: Optional[int] = None,
                tolerance: Optional[float] = None) -> SpectralDecomposition:
    """
    Cyclic complex Jacobi eigensolver.

    Each 2x2 rotation first removes the phase of a_pq and then applies the
    real symmetric Jacobi rotation, so A <- G^H A G stays Hermitian.

    Args:
        matrix: Hermitian matrix
        max_sweeps: Sweep cap, Config.JACOBI_MAX_SWEEPS by default
        tolerance: Off-diagonal Frobenius norm target relative to ||A||_F

    Returns:
        SpectralDecomposition with ascending eigenvalues

    Raises:
        NumericError: if the sweep cap is reached before convergence
    """
    max_sweeps = Config.JACOBI_MAX_SWEEPS if max_sweeps is None else max_sweeps
    tolerance = Config.JACOBI_TOLERANCE if tolerance is None else tolerance
    a = np.array(_as_hermitian(matrix).entries, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))

    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tolerance * scale or scale == 0.0:
            break
        if sweep == max_sweeps:
            raise NumericError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(n={n}, off-diagonal norm {off:.3e}, matrix norm {scale:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = a[p, q]
                magnitude = abs(beta)
                if magnitude == 0.0:
                    continue
                phase = beta / magnitude
                tau = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
                t = 1.0 if tau == 0.0 else np.sign(tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = [p, q]
                a[:, cols] = a[:, cols] @ g
                a[cols, :] = g.conj().T @ a[cols, :]
                a[p, q] = a[q, p] = 0.0
                v[:, cols] = v[:, cols] @ g

    values = np.real(np.diag(a))
    order = np.argsort(values, kind='stable')
    return SpectralDecomposition(v[:, order], values[order])


def spectral_decompose(matrix: MatrixLike, method: str = 'eigh') -> SpectralDecomposition:
    """
    Eigendecomposition A = U diag(lambda) U^H with ascending eigenvalues.

    Args:
        matrix: Hermitian matrix
        method: 'eigh' (LAPACK through scipy) or 'jacobi'

    Returns:
        SpectralDecomposition
    """
    A = _as_hermitian(matrix)
    if method == 'jacobi':
        return jacobi_eigh(A)
    if method != 'eigh':
        raise ValueError(f"unknown eigensolver: {method}")
    try:
        values, vectors = scipy.linalg.eigh(A.entries)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericError(
            f"eigendecomposition failed for n={A.n}, max-norm {A.max_norm:.3e}: {e}"
        ) from e
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise NumericError(f"eigendecomposition produced non-finite values (n={A.n})")
    return SpectralDecomposition(np.asarray(vectors, dtype=complex), np.asarray(values, dtype=float))


def eigenvalues(matrix: MatrixLike) -> np.ndarray:
    """Ascending eigenvalues only"""
    A = _as_hermitian(matrix)
    try:
        return scipy.linalg.eigvalsh(A.entries)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"eigenvalue computation failed for n={A.n}: {e}") from e


def _clamp_spectrum(values: np.ndarray, label: str = 'matrix') -> np.ndarray:
    threshold = Config.PSD_CLAMP * max(1.0, float(np.max(np.abs(values))))
    if values.min() < -threshold:
        raise DomainError(f"{label} has negative eigenvalue {values.min():.6e} beyond the clamp")
    return np.where(values < 0, 0.0, values)


def apply_function(f: SpectralFunction, matrix: MatrixLike, psd_clamp: bool = False,
                   method: str = 'eigh') -> HermitianMatrix:
    """
    f(A) = U diag(f(lambda_i)) U^H.

    Args:
        f: Anything with evaluate() over an eigenvalue array
        matrix: Hermitian argument
        psd_clamp: Set round-off negative eigenvalues (>= -PSD_CLAMP * norm) to 0
        method: Eigensolver passed to spectral_decompose

    Returns:
        The hermitized matrix function
    """
    decomposition = spectral_decompose(matrix, method)
    values = decomposition.eigenvalues
    if psd_clamp:
        values = _clamp_spectrum(values)
    return decomposition.reconstruct(f.evaluate(values))


def loewner_leq(A: MatrixLike, B: MatrixLike, tol: Optional[float] = None,
                details: Optional[Dict[str, Any]] = None) -> LoewnerVerdict:
    """Verdict on A <= B, i.e. on B - A being positive semidefinite"""
    A = _as_hermitian(A)
    B = _as_hermitian(B)
    _same_dim(A, B)
    return LoewnerVerdict.from_residual(B - A, tol, details)


def is_unitary(U: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = Config.UNITARY_TOLERANCE if tol is None else tol
    n = U.shape[0]
    return float(np.max(np.abs(U.conj().T @ U - np.eye(n)))) <= tol


def make_commuting_pair(U: Any, lambda_a: Sequence[float],
                        lambda_b: Sequence[float]) -> Tuple[HermitianMatrix, HermitianMatrix]:
    """(U diag(lambda_a) U^H, U diag(lambda_b) U^H) for a unitary U"""
    U = as_square(U)
    la = np.asarray(lambda_a, dtype=float)
    lb = np.asarray(lambda_b, dtype=float)
    if la.shape != (U.shape[0],) or lb.shape != (U.shape[0],):
        raise DimensionError(f"eigenvalue lists must have length {U.shape[0]}")
    if not is_unitary(U):
        raise PreconditionError("U is not unitary within tolerance")
    decomposition_a = SpectralDecomposition(U, la)
    decomposition_b = SpectralDecomposition(U, lb)
    return decomposition_a.reconstruct(), decomposition_b.reconstruct()


def spectral_norm(matrix: Any) -> float:
    """Largest singular value"""
    return float(scipy.linalg.norm(as_square(matrix), 2))


def psd_inverse(matrix: MatrixLike, floor: Optional[float] = None) -> HermitianMatrix:
    """
    Inverse of a positive definite matrix through its spectrum.

    The default floor is INVERSE_FLOOR * ||A||; eigenvalues below it raise
    SingularityError.
    """
    decomposition = spectral_decompose(matrix)
    values = decomposition.eigenvalues
    floor = _floor(values) if floor is None else floor
    if values[0] < floor:
        raise SingularityError(f"min eigenvalue {values[0]:.6e} is below the floor {floor:.3e}")
    return decomposition.reconstruct(1.0 / values)


def _floor(values: np.ndarray) -> float:
    return Config.INVERSE_FLOOR * max(float(np.max(np.abs(values))), np.finfo(float).tiny)


def psd_sqrt(matrix: MatrixLike) -> HermitianMatrix:
    """Unique PSD square root; round-off negatives are clamped to 0"""
    decomposition = spectral_decompose(matrix)
    values = _clamp_spectrum(decomposition.eigenvalues)
    return decomposition.reconstruct(np.sqrt(values))


def psd_inv_sqrt(matrix: MatrixLike, floor: Optional[float] = None) -> HermitianMatrix:
    """A^(-1/2) for positive definite A"""
    decomposition = spectral_decompose(matrix)
    values = decomposition.eigenvalues
    floor = _floor(values) if floor is None else floor
    if values[0] < floor:
        raise SingularityError(f"min eigenvalue {values[0]:.6e} is below the floor {floor:.3e}")
    return decomposition.reconstruct(1.0 / np.sqrt(values))


def congruence(X: Any, M: MatrixLike) -> HermitianMatrix:
    """X^H M X, hermitized"""
    X = as_square(X)
    M = _as_hermitian(M)
    return HermitianMatrix(X.conj().T @ M.entries @ X)


def sandwich(S: MatrixLike, M: MatrixLike) -> HermitianMatrix:
    """S M S for Hermitian S"""
    S = _as_hermitian(S)
    return congruence(S.entries, M)


def commutator_norm(A: MatrixLike, B: MatrixLike) -> float:
    """Max-norm of AB - BA"""
    A = _as_hermitian(A)
    B = _as_hermitian(B)
    _same_dim(A, B)
    product = A.entries @ B.entries
    return float(np.max(np.abs(product - B.entries @ A.entries)))


def check_commuting(A: MatrixLike, B: MatrixLike, tol: Optional[float] = None) -> float:
    """
    Require ||AB - BA|| <= tol * ||A|| * ||B|| in max-norm.

    Returns:
        The commutator norm

    Raises:
        CommutationError: if the pair does not commute
    """
    tol = Config.COMMUTATION_TOLERANCE if tol is None else tol
    A = _as_hermitian(A)
    B = _as_hermitian(B)
    norm = commutator_norm(A, B)
    if norm > tol * A.max_norm * B.max_norm:
        raise CommutationError(
            f"matrices do not commute: ||AB - BA|| = {norm:.3e} "
            f"exceeds {tol:.1e} * {A.max_norm:.3e} * {B.max_norm:.3e}"
        )
    return norm


def joint_eigenvalues(A: MatrixLike, B: MatrixLike,
                      tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Simultaneous diagonalization of a commuting Hermitian pair.

    Diagonalizes A + c B for an irrational multiple c and reads both
    spectra off the shared eigenbasis. If an accidental degeneracy leaves
    either matrix non-diagonal, the next mixing weight is tried.

    Returns:
        (a, b, U) with A = U diag(a) U^H and B = U diag(b) U^H
    """
    tol = Config.COMMUTATION_TOLERANCE if tol is None else tol
    A = _as_hermitian(A)
    B = _as_hermitian(B)
    check_commuting(A, B, tol)
    ratio = A.max_norm / B.max_norm if B.max_norm > 0 else 0.0
    worst = float('inf')
    for weight in _MIXING_WEIGHTS:
        mixed = HermitianMatrix(A.entries + weight * ratio * B.entries)
        U = spectral_decompose(mixed).unitary
        in_a = U.conj().T @ A.entries @ U
        in_b = U.conj().T @ B.entries @ U
        off_a = float(np.max(np.abs(in_a - np.diag(np.diag(in_a)))))
        off_b = float(np.max(np.abs(in_b - np.diag(np.diag(in_b)))))
        worst = max(off_a / max(1.0, A.max_norm), off_b / max(1.0, B.max_norm))
        if worst <= tol:
            return np.real(np.diag(in_a)), np.real(np.diag(in_b)), U
        logger.debug("joint diagonalization residual %.3e with weight %g, retrying", worst, weight)
    raise NumericError(f"simultaneous diagonalization failed, residual {worst:.3e}")


def to_exchange(matrix: Any) -> Dict[str, Any]:
    """Matrix exchange document with fields n, re, im"""
    m = as_square(matrix)
    return {
        'n': int(m.shape[0]),
        're': np.real(m).tolist(),
        'im': np.imag(m).tolist(),
    }


def matrix_from_exchange(document: Dict[str, Any], hermitian: bool = True) -> Any:
    """
    Parse a matrix exchange document.

    Args:
        document: Mapping with n, re and optional im (defaults to zeros)
        hermitian: Return a HermitianMatrix rather than a raw array

    Returns:
        HermitianMatrix or square complex ndarray
    """
    try:
        n = int(document['n'])
        re = np.asarray(document['re'], dtype=float)
        im = np.asarray(document.get('im', np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise DimensionError(f"malformed matrix document: {e}") from e
    if re.shape != (n, n) or im.shape != (n, n):
        raise DimensionError(f"matrix document declares n={n} but has shapes {re.shape}, {im.shape}")
    matrix = re + 1j * im
    return HermitianMatrix(matrix) if hermitian else as_square(matrix)
