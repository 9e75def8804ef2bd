"""
q-deformed logarithm and its algebraic identities.

ln_q(x) = (x^(1-q) - 1) / (1 - q), with the natural logarithm substituted
inside a small window around q = 1.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from config import Config
from .errors import DomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class QLogParams:
    """Deformation parameter q and the half-width of the q = 1 limit window"""
    q: float
    limit_window: float = Config.Q_LIMIT_WINDOW

    def __post_init__(self):
        if not math.isfinite(self.q):
            raise DomainError(f"q must be finite, got {self.q}")
        if not (0 < self.limit_window <= Config.Q_LIMIT_WINDOW_MAX):
            raise DomainError(
                f"limit_window must lie in (0, {Config.Q_LIMIT_WINDOW_MAX}], got {self.limit_window}"
            )

    @property
    def is_natural(self) -> bool:
        """True when the natural-log limit is used"""
        return abs(self.q - 1.0) <= self.limit_window

    @property
    def deformation(self) -> float:
        """Exponent 1 - q, or 0 inside the limit window"""
        return 0.0 if self.is_natural else 1.0 - self.q


def _positive(name: str, x) -> float:
    value = float(x)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    if value <= 0:
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def _finite(value: float) -> float:
    if not math.isfinite(value):
        raise DomainError("q-logarithm result is not finite")
    return value


def q_log(x: float, params: QLogParams) -> float:
    """
    Evaluate the q-logarithm of a positive real.

    Args:
        x: Positive argument
        params: Deformation parameters

    Returns:
        ln_q(x), or ln(x) inside the limit window
    """
    x = _positive('x', x)
    if params.is_natural:
        return math.log(x)
    k = params.deformation
    try:
        return _finite(math.expm1(k * math.log(x)) / k)
    except OverflowError as e:
        raise DomainError(f"q-logarithm overflows for x={x}, q={params.q}") from e


def q_log_array(values: ArrayLike, params: QLogParams) -> np.ndarray:
    """Vectorized q_log over an array of positive reals"""
    x = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("q-logarithm arguments must be finite")
    if np.any(x <= 0):
        raise DomainError(f"q-logarithm arguments must be positive, min is {x.min()}")
    if params.is_natural:
        return np.log(x)
    k = params.deformation
    with np.errstate(over='ignore'):
        result = np.expm1(k * np.log(x)) / k
    if not np.all(np.isfinite(result)):
        raise DomainError(f"q-logarithm overflows for q={params.q}")
    return result


def _power(x: float, k: float) -> float:
    return math.exp(k * math.log(x))


def q_log_product(x: float, y: float, params: QLogParams) -> float:
    """Right-hand side of ln_q(xy) = ln_q(x) + ln_q(y) + (1-q) ln_q(x) ln_q(y)"""
    lx = q_log(x, params)
    ly = q_log(y, params)
    return _finite(lx + ly + params.deformation * lx * ly)


def q_log_product_alt(x: float, y: float, params: QLogParams) -> float:
    """Right-hand side of ln_q(xy) = x^(1-q) ln_q(y) + ln_q(x)"""
    x = _positive('x', x)
    return _finite(_power(x, params.deformation) * q_log(y, params) + q_log(x, params))


def q_log_quotient(x: float, y: float, params: QLogParams) -> float:
    """Right-hand side of the quotient rule ln_q(x/y) = (ln_q(x) - ln_q(y)) / y^(1-q)"""
    lx = q_log(x, params)
    ly = q_log(y, params)
    return _finite((lx - ly) / _power(y, params.deformation))


def q_log_reciprocal(y: float, params: QLogParams) -> float:
    """Right-hand side of ln_q(1/y) = -ln_q(y) / y^(1-q)"""
    ly = q_log(y, params)
    return _finite(-ly / _power(y, params.deformation))


def q_log_power(x: float, params: QLogParams) -> float:
    """1 + (1-q) ln_q(x), which equals x^(1-q)"""
    return _finite(1.0 + params.deformation * q_log(x, params))
