"""
Loewner-order inequalities for non-commuting positive definite families.

Every check builds the residual rhs - lhs of the claimed inequality and
returns a LoewnerVerdict on its positive semidefiniteness.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from .errors import DimensionError, DomainError, PreconditionError
from .matfun import (
    HermitianMatrix,
    LoewnerVerdict,
    apply_function,
    as_square,
    congruence,
    eigenvalues,
    hermitize,
    is_unitary,
    loewner_leq,
    psd_inv_sqrt,
    psd_inverse,
    psd_sqrt,
    sandwich,
    spectral_norm,
)

logger = logging.getLogger(__name__)

OPERATOR_MONOTONE = 'operator_monotone'
OPERATOR_CONCAVE = 'operator_concave'
OPERATOR_CONVEX = 'operator_convex'

OPERATOR_FAMILIES = ('power', 'log', 'shifted_log', 'tabulated')

CONTRACTION_SLACK = 1e-12


def catalog_flags(family: str, param: Optional[float]) -> FrozenSet[str]:
    """Operator classes known for a family on its natural domain"""
    if family in ('log', 'shifted_log'):
        return frozenset({OPERATOR_MONOTONE, OPERATOR_CONCAVE})
    if family == 'power':
        if 0 < param <= 1:
            flags = {OPERATOR_MONOTONE, OPERATOR_CONCAVE}
            if param == 1:
                flags.add(OPERATOR_CONVEX)
            return frozenset(flags)
        if 1 <= param <= 2 or -1 <= param < 0:
            return frozenset({OPERATOR_CONVEX})
    return frozenset()


@dataclass(frozen=True)
class OperatorFunctionSpec:
    """
    Function with catalogued operator monotonicity, concavity or convexity.

    power(r) is t^r, log is log(t), shifted_log(c) is log(c + t) and
    tabulated interpolates a grid. offset is added to every value and keeps
    all class flags. Declared flags must be a subset of the catalog.
    """
    family: str
    param: Optional[float] = None
    offset: float = 0.0
    class_flags: Optional[FrozenSet[str]] = None
    xs: Tuple[float, ...] = ()
    ys: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in OPERATOR_FAMILIES:
            raise DomainError(f"Unknown operator function family: {self.family}")
        if self.family == 'power':
            if self.param is None or not math.isfinite(self.param) or not (-1 <= self.param <= 2) \
                    or self.param == 0:
                raise DomainError(f"power exponent must lie in [-1, 0) or (0, 2], got {self.param}")
        if self.family == 'shifted_log' and (self.param is None or not self.param > 0):
            raise DomainError(f"shifted_log needs c > 0, got {self.param}")
        if self.family == 'tabulated':
            xs = np.asarray(self.xs, dtype=float)
            if xs.size < 2 or xs.shape != np.shape(self.ys) or np.any(np.diff(xs) <= 0):
                raise DomainError("tabulated function needs a strictly increasing grid of >= 2 points")
        if not math.isfinite(self.offset):
            raise DomainError("offset must be finite")
        catalog = catalog_flags(self.family, self.param)
        if self.class_flags is None:
            object.__setattr__(self, 'class_flags', catalog)
        else:
            declared = frozenset(self.class_flags)
            if not declared <= catalog:
                raise DomainError(
                    f"{self.name} cannot be declared {sorted(declared - catalog)}; "
                    f"catalog gives {sorted(catalog)}"
                )
            object.__setattr__(self, 'class_flags', declared)

    @classmethod
    def power(cls, r: float, offset: float = 0.0) -> 'OperatorFunctionSpec':
        return cls('power', float(r), float(offset))

    @classmethod
    def log(cls, offset: float = 0.0) -> 'OperatorFunctionSpec':
        return cls('log', offset=float(offset))

    @classmethod
    def shifted_log(cls, c: float, offset: float = 0.0) -> 'OperatorFunctionSpec':
        return cls('shifted_log', float(c), float(offset))

    @classmethod
    def tabulated(cls, xs: Sequence[float], ys: Sequence[float]) -> 'OperatorFunctionSpec':
        return cls('tabulated', xs=tuple(map(float, xs)), ys=tuple(map(float, ys)))

    @classmethod
    def parse(cls, text: str) -> 'OperatorFunctionSpec':
        """Parse "family[:param[:offset]]", e.g. "power:0.5:-1" or "log" """
        parts = text.strip().split(':')
        family = parts[0]
        try:
            numbers = [float(p) for p in parts[1:]]
        except ValueError as e:
            raise DomainError(f"Invalid operator function {text!r}") from e
        if family == 'log':
            return cls.log(*numbers[:1])
        if family in ('power', 'shifted_log') and numbers:
            return cls(family, numbers[0], numbers[1] if len(numbers) > 1 else 0.0)
        raise DomainError(f"Invalid operator function {text!r}")

    @classmethod
    def from_dict(cls, data: Any) -> 'OperatorFunctionSpec':
        if isinstance(data, str):
            return cls.parse(data)
        flags = data.get('class_flags')
        return cls(
            data['family'],
            data.get('param'),
            float(data.get('offset', 0.0)),
            frozenset(flags) if flags is not None else None,
            tuple(data.get('xs', ())),
            tuple(data.get('ys', ())),
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'family': self.family, 'class_flags': sorted(self.class_flags)}
        if self.param is not None:
            data['param'] = self.param
        if self.offset:
            data['offset'] = self.offset
        if self.family == 'tabulated':
            data['xs'] = list(self.xs)
            data['ys'] = list(self.ys)
        return data

    @property
    def name(self) -> str:
        base = self.family if self.param is None else f"{self.family}:{self.param:g}"
        return f"{base}{self.offset:+g}" if self.offset else base

    def _violation(self, t: np.ndarray) -> Optional[str]:
        if self.family == 'power':
            if self.param > 0 and np.any(t < 0):
                return f"{self.name} needs t >= 0, got {t.min():.6e}"
            if self.param < 0 and np.any(t <= 0):
                return f"{self.name} needs t > 0, got {t.min():.6e}"
        elif self.family == 'log' and np.any(t <= 0):
            return f"log needs t > 0, got {t.min():.6e}"
        elif self.family == 'shifted_log' and np.any(t <= -self.param):
            return f"{self.name} needs t > {-self.param:g}, got {t.min():.6e}"
        elif self.family == 'tabulated' and (np.any(t < self.xs[0]) or np.any(t > self.xs[-1])):
            return f"{self.name} is tabulated on [{self.xs[0]}, {self.xs[-1]}]"
        return None

    def evaluate(self, values: Any) -> np.ndarray:
        t = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError(f"{self.name} arguments must be finite")
        problem = self._violation(t)
        if problem:
            raise DomainError(problem)
        if self.family == 'power':
            result = np.power(t, self.param)
        elif self.family == 'log':
            result = np.log(t)
        elif self.family == 'shifted_log':
            result = np.log(self.param + t)
        else:
            result = np.interp(t, self.xs, self.ys)
        return result + self.offset

    def value_at(self, t: float) -> float:
        return float(self.evaluate(np.array(float(t))))

    @property
    def defined_at_zero(self) -> bool:
        if self.family == 'power':
            return self.param > 0
        if self.family == 'shifted_log':
            return True
        if self.family == 'tabulated':
            return self.xs[0] <= 0 <= self.xs[-1]
        return False

    def require(self, flag: str) -> None:
        if flag not in self.class_flags:
            raise PreconditionError(f"{self.name} is not catalogued as {flag}")


@dataclass(frozen=True)
class MatrixFamily:
    """m >= 1 Hermitian matrices of a common dimension n"""
    members: Tuple[HermitianMatrix, ...]

    def __post_init__(self):
        members = tuple(
            m if isinstance(m, HermitianMatrix) else hermitize(m) for m in self.members
        )
        if not members:
            raise DimensionError("a matrix family needs at least one member")
        dims = {m.n for m in members}
        if len(dims) != 1:
            raise DimensionError(f"family members have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, 'members', members)

    @classmethod
    def of(cls, matrices: Iterable[Any]) -> 'MatrixFamily':
        return cls(tuple(matrices))

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return self.members[0].n

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def total(self) -> HermitianMatrix:
        return HermitianMatrix(sum(member.entries for member in self.members))

    def require_pd(self, label: str = 'A') -> None:
        for i, member in enumerate(self.members):
            lowest = float(eigenvalues(member)[0])
            if lowest <= Config.INVERSE_FLOOR * max(1.0, member.max_norm):
                raise PreconditionError(
                    f"{label}_{i + 1} is not positive definite (min eigenvalue {lowest:.3e})"
                )


def _as_family(family: Any) -> MatrixFamily:
    return family if isinstance(family, MatrixFamily) else MatrixFamily.of(family)


def _paired(A_family: Any, B_family: Any) -> Tuple[MatrixFamily, MatrixFamily]:
    A_family = _as_family(A_family)
    B_family = _as_family(B_family)
    if A_family.m != B_family.m or A_family.n != B_family.n:
        raise DimensionError(
            f"families differ: {A_family.m}x{A_family.n} vs {B_family.m}x{B_family.n}"
        )
    A_family.require_pd('A')
    B_family.require_pd('B')
    return A_family, B_family


def perspective(f: OperatorFunctionSpec, A: HermitianMatrix, B: HermitianMatrix) -> HermitianMatrix:
    """A^(1/2) f(A^(-1/2) B A^(-1/2)) A^(1/2)"""
    inner = sandwich(psd_inv_sqrt(A), B)
    return sandwich(psd_sqrt(A), apply_function(f, inner, psd_clamp=f.defined_at_zero))


def require_expansive(total: HermitianMatrix, m: int, tolerance: Optional[float] = None) -> None:
    """Require sum A_i >= m I"""
    verdict = loewner_leq(HermitianMatrix.identity(total.n) * m, total, tolerance)
    if not verdict.holds:
        raise PreconditionError(
            f"expansivity fails: min eigenvalue of A - {m}I is {verdict.residual_min_eigenvalue:.6e}"
        )


def hansen_jensen_residual(f: OperatorFunctionSpec, contraction: Any, X: Any,
                           direction: str = 'auto',
                           tolerance: Optional[float] = None) -> LoewnerVerdict:
    """
    Jensen-type operator inequality under a contraction C.

    Monotone direction: C^H f(X) C <= f(C^H X C), for operator monotone f
    on [0, inf) with f(0) >= 0. Convex direction: f(C^H X C) <= C^H f(X) C,
    for operator convex f with f(0) <= 0. Both reduce to an identity when
    C is unitary, so f(0) only matters for strict contractions.

    Args:
        f: Operator function
        contraction: Square matrix with operator norm <= 1
        X: Hermitian matrix with spectrum in f's domain
        direction: 'monotone', 'convex' or 'auto' (monotone when catalogued)
        tolerance: Loewner tolerance

    Returns:
        LoewnerVerdict on the residual
    """
    C = as_square(contraction)
    X = X if isinstance(X, HermitianMatrix) else hermitize(X)
    if C.shape[0] != X.n:
        raise DimensionError(f"contraction is {C.shape[0]}x{C.shape[0]} but X is {X.n}x{X.n}")
    norm = spectral_norm(C)
    if norm > 1.0 + CONTRACTION_SLACK:
        raise PreconditionError(f"operator norm {norm:.15g} exceeds 1")

    if direction == 'auto':
        if OPERATOR_MONOTONE in f.class_flags:
            direction = 'monotone'
        elif OPERATOR_CONVEX in f.class_flags:
            direction = 'convex'
        else:
            raise PreconditionError(f"{f.name} is neither operator monotone nor operator convex")
    if direction not in ('monotone', 'convex'):
        raise ValueError(f"unknown direction {direction!r}")
    f.require(OPERATOR_MONOTONE if direction == 'monotone' else OPERATOR_CONVEX)

    strict = not is_unitary(C)
    if strict:
        if not f.defined_at_zero:
            raise PreconditionError(f"{f.name} must be defined at 0 for a strict contraction")
        at_zero = f.value_at(0.0)
        if direction == 'monotone' and at_zero < 0:
            raise PreconditionError(f"{f.name}(0) = {at_zero:g} must be >= 0")
        if direction == 'convex' and at_zero > 0:
            raise PreconditionError(f"{f.name}(0) = {at_zero:g} must be <= 0")

    clamp = f.defined_at_zero
    outer = congruence(C, apply_function(f, X, psd_clamp=clamp))
    inner = apply_function(f, congruence(C, X), psd_clamp=clamp)
    residual = inner - outer if direction == 'monotone' else outer - inner
    return LoewnerVerdict.from_residual(
        residual, tolerance, {'direction': direction, 'contraction_norm': norm, 'f': f.name}
    )


def theorem6_residual(f: OperatorFunctionSpec, A_family: Any, B_family: Any,
                      tolerance: Optional[float] = None,
                      require_expansive_sum: bool = True) -> LoewnerVerdict:
    """
    sum_i A_i^(1/2) f(A_i^(-1/2) B_i A_i^(-1/2)) A_i^(1/2)
        <= A^(1/2) f(A^(-1/2) B A^(-1/2)) A^(1/2)
    with A = sum A_i >= m I, B = sum B_i and f operator concave.

    details records the largest relative distance between each summand
    and f(B_i), and the verdict on sum f(B_i) against the same right side.
    """
    A_family, B_family = _paired(A_family, B_family)
    f.require(OPERATOR_CONCAVE)
    A = A_family.total()
    B = B_family.total()
    if require_expansive_sum:
        require_expansive(A, A_family.m, tolerance)

    summands = [perspective(f, Ai, Bi) for Ai, Bi in zip(A_family, B_family)]
    lhs = HermitianMatrix(sum(s.entries for s in summands))
    rhs = perspective(f, A, B)

    discrepancy = 0.0
    images: List[HermitianMatrix] = []
    for summand, Bi in zip(summands, B_family):
        image = apply_function(f, Bi)
        images.append(image)
        gap = float(np.max(np.abs(summand.entries - image.entries)))
        discrepancy = max(discrepancy, gap / max(1.0, image.max_norm))
    alternative = loewner_leq(HermitianMatrix(sum(i.entries for i in images)), rhs, tolerance)

    details = {
        'f': f.name,
        'm': A_family.m,
        'identity_discrepancy': discrepancy,
        'identity_holds': discrepancy <= 1e-8,
        'sum_f_B_min_eigenvalue': alternative.residual_min_eigenvalue,
        'sum_f_B_holds': alternative.holds,
    }
    if discrepancy > 1e-8:
        logger.debug("summand differs from f(B_i) by %.3e (relative)", discrepancy)
    return LoewnerVerdict.from_residual(rhs - lhs, tolerance, details)


def operator_shannon_residual(A_family: Any, B_family: Any, f: OperatorFunctionSpec,
                              tolerance: Optional[float] = None) -> LoewnerVerdict:
    """sum_i A_i^(1/2) f(A_i^(-1/2) B_i A_i^(-1/2)) A_i^(1/2) <= 0 when sum A_i = sum B_i and f(1) = 0"""
    A_family, B_family = _paired(A_family, B_family)
    f.require(OPERATOR_CONCAVE)
    at_one = f.value_at(1.0)
    if abs(at_one) > Config.IDENTITY_TOLERANCE:
        raise PreconditionError(f"{f.name}(1) = {at_one:.3e}, expected 0")
    A = A_family.total()
    B = B_family.total()
    mismatch = float(np.max(np.abs(A.entries - B.entries)))
    if mismatch > Config.LOEWNER_TOLERANCE * max(1.0, A.max_norm):
        raise PreconditionError(f"sum A_i and sum B_i differ by {mismatch:.3e}")
    require_expansive(A, A_family.m, tolerance)

    total = HermitianMatrix(sum(perspective(f, Ai, Bi).entries for Ai, Bi in zip(A_family, B_family)))
    return LoewnerVerdict.from_residual(-total, tolerance, {'f': f.name, 'sum_mismatch': mismatch})


def lemma9_residual(X_family: Sequence[Any], A_family: Any,
                    tolerance: Optional[float] = None) -> LoewnerVerdict:
    """sum X_i^H A_i^-1 X_i >= (sum X_i)^H (sum A_i)^-1 (sum X_i)"""
    A_family = _as_family(A_family)
    xs = [as_square(X) for X in X_family]
    if len(xs) != A_family.m:
        raise DimensionError(f"{len(xs)} X matrices for {A_family.m} A matrices")
    if any(X.shape[0] != A_family.n for X in xs):
        raise DimensionError(f"X matrices must be {A_family.n}x{A_family.n}")
    A_family.require_pd('A')

    lhs = HermitianMatrix(sum(congruence(X, psd_inverse(Ai)).entries for X, Ai in zip(xs, A_family)))
    total_x = sum(xs)
    rhs = congruence(total_x, psd_inverse(A_family.total()))
    return LoewnerVerdict.from_residual(lhs - rhs, tolerance, {'m': A_family.m})


def _monotone_inverse_image(f: OperatorFunctionSpec, A: HermitianMatrix,
                            B: HermitianMatrix) -> HermitianMatrix:
    """B^(1/2) [f(B^(1/2) A^-1 B^(1/2))]^-1 B^(1/2)"""
    root_b = psd_sqrt(B)
    image = apply_function(f, sandwich(root_b, psd_inverse(A)))
    return sandwich(root_b, psd_inverse(image))


def _theorem10_setup(f: OperatorFunctionSpec, A_family: Any, B_family: Any):
    A_family, B_family = _paired(A_family, B_family)
    f.require(OPERATOR_MONOTONE)
    A = A_family.total()
    B = B_family.total()
    return A_family, B_family, A, B, _monotone_inverse_image(f, A, B)


def theorem10_residual_1(f: OperatorFunctionSpec, A_family: Any, B_family: Any,
                         tolerance: Optional[float] = None) -> LoewnerVerdict:
    """
    (1/m) S [sum f(B_i^(1/2) A_i^-1 B_i^(1/2))]^-1 S <= B^(1/2) [f(B^(1/2) A^-1 B^(1/2))]^-1 B^(1/2)
    with S = sum B_i^(1/2), for operator monotone f positive on every spectrum.
    """
    A_family, B_family, A, B, rhs = _theorem10_setup(f, A_family, B_family)
    roots = [psd_sqrt(Bi) for Bi in B_family]
    images = [apply_function(f, sandwich(root, psd_inverse(Ai))) for root, Ai in zip(roots, A_family)]
    total_image = HermitianMatrix(sum(image.entries for image in images))
    S = HermitianMatrix(sum(root.entries for root in roots))
    lhs = sandwich(S, psd_inverse(total_image)) * (1.0 / A_family.m)
    return LoewnerVerdict.from_residual(rhs - lhs, tolerance, {'f': f.name, 'm': A_family.m})


def theorem10_residual_2(f: OperatorFunctionSpec, A_family: Any, B_family: Any,
                         tolerance: Optional[float] = None) -> LoewnerVerdict:
    """
    sum A_i^(1/2) Y_i A_i^(1/2) <= (1/m) T Y T with T = sum A_i^(1/2),
    Y_i = B_i^(1/2) [f(B_i^(1/2) A_i^-1 B_i^(1/2))]^-1 B_i^(1/2) and Y the
    same expression in A and B.

    This form fails already for 1x1 families, e.g. a = (1, 100),
    b = (1, 1), f = sqrt; theorem10_congruence_residual is the form that
    follows from intermediate_57_residual.
    """
    A_family, B_family, A, B, Y = _theorem10_setup(f, A_family, B_family)
    roots = [psd_sqrt(Ai) for Ai in A_family]
    lhs = HermitianMatrix(sum(
        sandwich(root, _monotone_inverse_image(f, Ai, Bi)).entries
        for root, Ai, Bi in zip(roots, A_family, B_family)
    ))
    T = HermitianMatrix(sum(root.entries for root in roots))
    rhs = sandwich(T, Y) * (1.0 / A_family.m)
    return LoewnerVerdict.from_residual(rhs - lhs, tolerance, {'f': f.name, 'm': A_family.m})


def theorem10_congruence_residual(f: OperatorFunctionSpec, A_family: Any, B_family: Any,
                                  tolerance: Optional[float] = None) -> LoewnerVerdict:
    """sum A_i^(1/2) Y_i A_i^(1/2) <= sum A_i^(1/2) Y A_i^(1/2)"""
    A_family, B_family, A, B, Y = _theorem10_setup(f, A_family, B_family)
    residual = np.zeros((A.n, A.n), dtype=complex)
    for Ai, Bi in zip(A_family, B_family):
        root = psd_sqrt(Ai)
        residual += sandwich(root, Y - _monotone_inverse_image(f, Ai, Bi)).entries
    return LoewnerVerdict.from_residual(HermitianMatrix(residual), tolerance,
                                        {'f': f.name, 'm': A_family.m})


def intermediate_57_residual(f: OperatorFunctionSpec, A_i: Any, B_i: Any, A: Any, B: Any,
                             tolerance: Optional[float] = None) -> LoewnerVerdict:
    """
    B_i^(1/2) [f(B_i^(1/2) A_i^-1 B_i^(1/2))]^-1 B_i^(1/2)
        <= B^(1/2) [f(B^(1/2) A^-1 B^(1/2))]^-1 B^(1/2)
    for A_i <= A and B_i <= B.
    """
    f.require(OPERATOR_MONOTONE)
    A_i, B_i, A, B = (m if isinstance(m, HermitianMatrix) else hermitize(m) for m in (A_i, B_i, A, B))
    MatrixFamily((A_i, A)).require_pd('A')
    MatrixFamily((B_i, B)).require_pd('B')
    for small, large, label in ((A_i, A, 'A'), (B_i, B, 'B')):
        order = loewner_leq(small, large, tolerance)
        if not order.holds:
            raise PreconditionError(
                f"{label}_i <= {label} fails (min eigenvalue {order.residual_min_eigenvalue:.3e})"
            )
    lhs = _monotone_inverse_image(f, A_i, B_i)
    rhs = _monotone_inverse_image(f, A, B)
    return LoewnerVerdict.from_residual(rhs - lhs, tolerance, {'f': f.name})
