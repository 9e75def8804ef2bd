"""
Scalar generalized log-sum inequalities.

Every check returns an InequalityVerdict carrying both sides, the signed
gap and the tolerance it was judged against. Hypotheses of the inequality
(positivity of g(b_i), convexity of x*f(x) on the ratio interval) are
verified first and reported as PreconditionError when they fail.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from config import Config
from .deformed_log import QLogParams, q_log_array
from .errors import DimensionError, DomainError, PreconditionError
from .functions import FunctionSpec, SpectralFunction

logger = logging.getLogger(__name__)

H_KINDS = ('xfx', 'xf1overx', 'f')

_IDENTITY = FunctionSpec.identity()


@dataclass(frozen=True)
class SequencePair:
    """Two equal-length finite real sequences a and b"""
    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        if len(a) < 1 or len(a) != len(b):
            raise DimensionError(f"sequences must have equal length >= 1, got {len(a)} and {len(b)}")
        if not all(math.isfinite(v) for v in a + b):
            raise DomainError("sequence entries must be finite")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)

    @property
    def n(self) -> int:
        return len(self.a)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array(self.a), np.array(self.b)

    def to_dict(self) -> Dict[str, Any]:
        return {'a': list(self.a), 'b': list(self.b)}


@dataclass(frozen=True)
class RatioBounds:
    """Smallest and largest ratio g(a_i)/g(b_i)"""
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def as_interval(self) -> Tuple[float, float]:
        return self.lower, self.upper


@dataclass
class InequalityVerdict:
    """
    Outcome of a scalar or trace-form inequality check.

    gap is lhs - rhs for '>=' claims and rhs - lhs for '<=' claims, so a
    non-negative gap always means the claim holds.
    """
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    holds: bool
    claim: str = '>='
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.lhs), abs(self.rhs))

    @classmethod
    def from_sides(cls, lhs: float, rhs: float, claim: str = '>=',
                   tolerance: Optional[float] = None,
                   details: Optional[Dict[str, Any]] = None) -> 'InequalityVerdict':
        if claim not in ('>=', '<='):
            raise ValueError(f"claim must be '>=' or '<=', got {claim!r}")
        tolerance = Config.RELATIVE_TOLERANCE if tolerance is None else tolerance
        lhs = float(lhs)
        rhs = float(rhs)
        gap = lhs - rhs if claim == '>=' else rhs - lhs
        scale = max(1.0, abs(lhs), abs(rhs))
        return cls(lhs, rhs, gap, tolerance, gap >= -tolerance * scale, claim, details or {})

    @property
    def margin(self) -> float:
        """Gap in units of the tolerance scale; negative means violated"""
        return self.gap / self.scale

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': 'scalar',
            'lhs': self.lhs,
            'rhs': self.rhs,
            'gap': self.gap,
            'claim': self.claim,
            'tolerance': self.tolerance,
            'holds': self.holds,
            'details': self.details,
        }


def _positive_images(g: SpectralFunction, values: Sequence[float], label: str) -> np.ndarray:
    images = np.asarray(g.evaluate(np.asarray(values, dtype=float)), dtype=float)
    if np.any(images <= 0):
        bad = int(np.argmin(images))
        raise PreconditionError(f"{g.name}({label}_{bad}) = {images[bad]:.17g} must be positive")
    return images


def ratio_bounds(g: FunctionSpec, pair: SequencePair) -> RatioBounds:
    """
    Range of the ratios g(a_i)/g(b_i).

    Args:
        g: Function applied to both sequences
        pair: The sequences a and b

    Returns:
        RatioBounds with the min and max ratio
    """
    gb = _positive_images(g, pair.b, 'b')
    ga = np.asarray(g.evaluate(np.array(pair.a)), dtype=float)
    ratios = ga / gb
    return RatioBounds(float(ratios.min()), float(ratios.max()))


def convexity_check(h_kind: str, f: FunctionSpec, interval: Tuple[float, float],
                    grid_points: int = Config.CONVEXITY_GRID_POINTS,
                    direction: Optional[str] = None) -> bool:
    """
    Check convexity or concavity of h on a uniform grid via second differences.

    Args:
        h_kind: 'xfx' for x*f(x), 'xf1overx' for x*f(1/x), 'f' for f itself
        f: The function inside h
        interval: Closed interval (lo, hi) to sample
        grid_points: Number of grid nodes, at least 3
        direction: 'convex' or 'concave'; defaults to concave for xf1overx
            and convex otherwise

    Returns:
        True when every interior second difference has the required sign
    """
    if h_kind not in H_KINDS:
        raise ValueError(f"h_kind must be one of {H_KINDS}, got {h_kind!r}")
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    direction = direction or ('concave' if h_kind == 'xf1overx' else 'convex')
    lo, hi = float(interval[0]), float(interval[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise DomainError(f"invalid interval ({lo}, {hi})")
    if lo == hi:
        # a single point is trivially both convex and concave
        return True

    xs = np.linspace(lo, hi, grid_points)
    if h_kind == 'xfx':
        h = f.xfx(xs)
    elif h_kind == 'xf1overx':
        if lo <= 0:
            raise DomainError(f"x*f(1/x) needs a positive interval, got ({lo}, {hi})")
        h = xs * f.evaluate(1.0 / xs)
    else:
        h = f.evaluate(xs)

    second = h[:-2] - 2.0 * h[1:-1] + h[2:]
    slack = Config.CONVEXITY_SLACK * max(1.0, float(np.max(np.abs(h))))
    if direction == 'convex':
        ok = bool(np.all(second >= -slack))
    else:
        ok = bool(np.all(second <= slack))
    if not ok:
        logger.debug("%s of %s is not %s on [%g, %g]", h_kind, f.name, direction, lo, hi)
    return ok


def _require_shape(h_kind: str, f: FunctionSpec, bounds: RatioBounds, direction: str) -> None:
    if not convexity_check(h_kind, f, bounds.as_interval(), direction=direction):
        raise PreconditionError(
            f"{h_kind} of {f.name} is not {direction} on [{bounds.lower:.6g}, {bounds.upper:.6g}]"
        )


def _log_sum_sides(f: FunctionSpec, g: FunctionSpec, pair: SequencePair):
    gb = _positive_images(g, pair.b, 'b')
    ga = np.asarray(g.evaluate(np.array(pair.a)), dtype=float)
    ratios = ga / gb
    # g(a_i) f(g(a_i)/g(b_i)) = g(b_i) h(ratio_i) with h(x) = x f(x)
    lhs = float(np.sum(gb * f.xfx(ratios)))
    total_a = float(ga.sum())
    total_b = float(gb.sum())
    rhs = total_b * float(f.xfx(total_a / total_b))
    bounds = RatioBounds(float(ratios.min()), float(ratios.max()))
    return lhs, rhs, bounds


def generalized_log_sum_gap(f: FunctionSpec, g: FunctionSpec, pair: SequencePair,
                            tolerance: Optional[float] = None,
                            check_shape: bool = True) -> InequalityVerdict:
    """
    sum g(a_i) f(g(a_i)/g(b_i)) >= (sum g(a_i)) f(sum g(a_i) / sum g(b_i))
    when x*f(x) is convex on the ratio interval.
    """
    bounds = ratio_bounds(g, pair)
    if check_shape:
        _require_shape('xfx', f, bounds, 'convex')
    lhs, rhs, bounds = _log_sum_sides(f, g, pair)
    return InequalityVerdict.from_sides(
        lhs, rhs, '>=', tolerance,
        {'m_g': bounds.lower, 'M_g': bounds.upper, 'f': f.name, 'g': g.name},
    )


def concave_log_sum_gap(f: FunctionSpec, g: FunctionSpec, pair: SequencePair,
                        tolerance: Optional[float] = None) -> InequalityVerdict:
    """The reversed inequality when x*f(x) is concave on the ratio interval"""
    bounds = ratio_bounds(g, pair)
    _require_shape('xfx', f, bounds, 'concave')
    lhs, rhs, bounds = _log_sum_sides(f, g, pair)
    return InequalityVerdict.from_sides(
        lhs, rhs, '<=', tolerance,
        {'m_g': bounds.lower, 'M_g': bounds.upper, 'f': f.name, 'g': g.name},
    )


def reverse_log_sum_gap(f: FunctionSpec, g: FunctionSpec, pair: SequencePair,
                        tolerance: Optional[float] = None,
                        check_shape: bool = True) -> InequalityVerdict:
    """
    sum g(a_i) f(g(b_i)/g(a_i)) <= (sum g(a_i)) f(sum g(b_i) / sum g(a_i))
    when x*f(1/x) is concave on the ratio interval.

    Args:
        f: Function whose x*f(1/x) must be concave
        g: Function applied to both sequences, positive on both
        pair: The sequences a and b
        tolerance: Relative tolerance, Config.RELATIVE_TOLERANCE by default
        check_shape: Verify concavity on the grid before evaluating

    Returns:
        InequalityVerdict with gap = rhs - lhs
    """
    ga = _positive_images(g, pair.a, 'a')
    gb = _positive_images(g, pair.b, 'b')
    rho = ga / gb
    bounds = RatioBounds(float(rho.min()), float(rho.max()))
    if check_shape:
        _require_shape('xf1overx', f, bounds, 'concave')
    lhs = float(np.sum(ga * f.evaluate(gb / ga)))
    total_a = float(ga.sum())
    total_b = float(gb.sum())
    rhs = total_a * float(f.evaluate(total_b / total_a))
    return InequalityVerdict.from_sides(
        lhs, rhs, '<=', tolerance,
        {'m_g': bounds.lower, 'M_g': bounds.upper, 'f': f.name, 'g': g.name},
    )


RATIONAL_RATIO_FLOOR = 1.0 / math.sqrt(6.0)
RATIONAL_ENTRY_FLOOR = math.sqrt(2.0 / 3.0)


def rational_example_gap(pair: SequencePair,
                         tolerance: Optional[float] = None) -> InequalityVerdict:
    """
    sum a_i^2 b_i / (2 a_i^2 + b_i^2) <= A^2 B / (2 A^2 + B^2).

    x*f(1/x) for f(x) = x/(x^2 + 2) is concave exactly for x >= 1/sqrt(6),
    so every ratio a_i/b_i must reach that floor.
    """
    a, b = pair.arrays()
    if np.any(a <= 0) or np.any(b <= 0):
        raise PreconditionError("rational example needs positive a_i and b_i")
    ratios = a / b
    if ratios.min() < RATIONAL_RATIO_FLOOR:
        raise PreconditionError(
            f"ratio a_i/b_i = {ratios.min():.6g} is below 1/sqrt(6); "
            "x*f(1/x) is not concave there"
        )
    verdict = reverse_log_sum_gap(FunctionSpec.rational(), _IDENTITY, pair, tolerance)
    verdict.details['entries_above_sqrt_two_thirds'] = bool(
        np.all(a > RATIONAL_ENTRY_FLOOR) and np.all(b > RATIONAL_ENTRY_FLOOR)
    )
    return verdict


def _powered(values: Sequence[float], r: float, label: str) -> np.ndarray:
    powered = FunctionSpec.power(r).evaluate(np.asarray(values, dtype=float))
    if np.any(powered <= 0):
        raise PreconditionError(f"{label}_i^r must be positive for r={r}")
    return powered


def q_log_sum_gap(pair: SequencePair, q: float, r: float,
                  tolerance: Optional[float] = None) -> InequalityVerdict:
    """
    q-logarithmic log-sum inequality with g = power(r).

    (sum b_i^r)^(1-q) sum a_i^r ln_q(a_i^r/b_i^r) compared with
    (sum a_i^r)(ln_q(sum a_i^r) - ln_q(sum b_i^r)); the claim is '>=' for
    q < 2 and '<=' for q > 2.
    """
    if not math.isfinite(q) or q == 2.0:
        raise PreconditionError(f"q must be finite and differ from 2, got {q}")
    if r == 0 or not math.isfinite(r):
        raise PreconditionError(f"r must be a finite nonzero real, got {r}")
    params = QLogParams(q)
    ar = _powered(pair.a, r, 'a')
    br = _powered(pair.b, r, 'b')
    total_a = float(ar.sum())
    total_b = float(br.sum())

    lhs = total_b ** params.deformation * float(np.sum(ar * q_log_array(ar / br, params)))
    logs = q_log_array(np.array([total_a, total_b]), params)
    rhs = total_a * float(logs[0] - logs[1])
    claim = '>=' if q < 2 else '<='
    return InequalityVerdict.from_sides(lhs, rhs, claim, tolerance, {'q': q, 'r': r})


def jensen_gap(f: FunctionSpec, points: Sequence[float], weights: Sequence[float],
               tolerance: Optional[float] = None) -> InequalityVerdict:
    """sum w_i f(x_i) >= f(sum w_i x_i) for convex f and probability weights"""
    x = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float)
    if x.ndim != 1 or x.shape != w.shape or x.size == 0:
        raise DimensionError("points and weights must be non-empty and of equal length")
    if np.any(w < 0) or abs(float(w.sum()) - 1.0) > Config.IDENTITY_TOLERANCE * x.size:
        raise PreconditionError("weights must be non-negative and sum to 1")
    if not convexity_check('f', f, (float(x.min()), float(x.max()))):
        raise PreconditionError(f"{f.name} is not convex on the points' hull")
    lhs = float(np.dot(w, f.evaluate(x)))
    rhs = float(f.evaluate(float(np.dot(w, x))))
    return InequalityVerdict.from_sides(lhs, rhs, '>=', tolerance, {'f': f.name})


def csiszar_gap(f: FunctionSpec, pair: SequencePair,
                tolerance: Optional[float] = None) -> InequalityVerdict:
    """f-divergence form: sum b_i f(a_i/b_i) >= B f(A/B) for convex f and b_i > 0"""
    a, b = pair.arrays()
    if np.any(b <= 0):
        raise PreconditionError("csiszar form needs positive b_i")
    ratios = a / b
    if not convexity_check('f', f, (float(ratios.min()), float(ratios.max()))):
        raise PreconditionError(f"{f.name} is not convex on the ratio interval")
    lhs = float(np.sum(b * f.evaluate(ratios)))
    rhs = float(b.sum()) * float(f.evaluate(float(a.sum()) / float(b.sum())))
    return InequalityVerdict.from_sides(lhs, rhs, '>=', tolerance, {'f': f.name})


def standard_log_sum_gap(pair: SequencePair,
                         tolerance: Optional[float] = None) -> InequalityVerdict:
    """sum a_i log(a_i/b_i) >= A log(A/B) with 0 log 0 = 0"""
    a, b = pair.arrays()
    if np.any(a < 0) or np.any(b <= 0):
        raise PreconditionError("standard log-sum needs a_i >= 0 and b_i > 0")
    support = a > 0
    lhs = float(np.sum(a[support] * (np.log(a[support]) - np.log(b[support]))))
    total_a = float(a.sum())
    total_b = float(b.sum())
    rhs = total_a * math.log(total_a / total_b) if total_a > 0 else 0.0
    return InequalityVerdict.from_sides(lhs, rhs, '>=', tolerance)


def _positive_f_images(f: SpectralFunction, values: np.ndarray) -> np.ndarray:
    images = np.asarray(f.evaluate(values), dtype=float)
    if np.any(images <= 0):
        raise PreconditionError(f"{f.name} must be positive on every ratio to be inverted")
    return images


def _positive_sequences(pair: SequencePair) -> Tuple[np.ndarray, np.ndarray]:
    a, b = pair.arrays()
    if np.any(a <= 0) or np.any(b <= 0):
        raise PreconditionError("a_i and b_i must be positive")
    return a, b


def scalar_inverse_mean_gap(f: SpectralFunction, pair: SequencePair,
                            tolerance: Optional[float] = None) -> InequalityVerdict:
    """(1/m)(sum sqrt b_i)^2 [sum f(b_i/a_i)]^-1 <= B / f(B/A)"""
    a, b = _positive_sequences(pair)
    m = pair.n
    inner = _positive_f_images(f, b / a)
    total_a = float(a.sum())
    total_b = float(b.sum())
    lhs = float(np.sqrt(b).sum()) ** 2 / (m * float(inner.sum()))
    rhs = total_b / float(_positive_f_images(f, np.array(total_b / total_a))[()])
    return InequalityVerdict.from_sides(lhs, rhs, '<=', tolerance, {'f': f.name})


def scalar_weighted_inverse_gap(f: SpectralFunction, pair: SequencePair,
                                tolerance: Optional[float] = None) -> InequalityVerdict:
    """sum a_i b_i / f(b_i/a_i) <= (1/m)(sum sqrt a_i)^2 B / f(B/A)"""
    a, b = _positive_sequences(pair)
    m = pair.n
    inner = _positive_f_images(f, b / a)
    total_a = float(a.sum())
    total_b = float(b.sum())
    lhs = float(np.sum(a * b / inner))
    outer = float(_positive_f_images(f, np.array(total_b / total_a))[()])
    rhs = float(np.sqrt(a).sum()) ** 2 * total_b / (m * outer)
    return InequalityVerdict.from_sides(lhs, rhs, '<=', tolerance, {'f': f.name})
