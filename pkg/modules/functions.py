"""
Closed descriptions of the scalar function families used by the checks.

A FunctionSpec evaluates element-wise on numpy arrays, enforces its domain
and knows whether x*f(x) extends continuously by 0 at x = 0. The same
object drives scalar sums and the matrix functional calculus.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Protocol, Sequence, Tuple

import numpy as np

from .deformed_log import QLogParams, q_log_array
from .errors import DomainError

RATIONAL = 'rational_x_over_x2_plus_2'

FAMILIES = ('log', 'q_log', 'power', RATIONAL, 'identity', 'exp', 'tabulated', 'composite')

DECLARED_CLASSES = ('xfx_convex', 'xf1overx_concave', 'operator_monotone', 'operator_concave')

_ALIASES = {
    'ln': 'log',
    'qlog': 'q_log',
    'rational': RATIONAL,
    'id': 'identity',
}


class SpectralFunction(Protocol):
    """Anything the functional calculus can apply to an eigenvalue array"""

    @property
    def name(self) -> str: ...

    def evaluate(self, values: Any) -> np.ndarray: ...


@dataclass(frozen=True)
class FunctionSpec:
    """A scalar function family with its parameters and optional declared class"""
    family: str
    param: Optional[float] = None
    declared_class: Optional[str] = None
    xs: Tuple[float, ...] = ()
    ys: Tuple[float, ...] = ()
    parts: Tuple['FunctionSpec', ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"Unknown function family: {self.family}")
        if self.family in ('q_log', 'power'):
            if self.param is None or not math.isfinite(self.param):
                raise DomainError(f"{self.family} needs a finite parameter")
            if self.family == 'power' and self.param == 0:
                raise DomainError("power exponent must be nonzero")
        if self.declared_class is not None and self.declared_class not in DECLARED_CLASSES:
            raise DomainError(f"Unknown declared class: {self.declared_class}")
        if self.family == 'tabulated':
            xs = np.asarray(self.xs, dtype=float)
            ys = np.asarray(self.ys, dtype=float)
            if xs.size < 2 or xs.shape != ys.shape:
                raise DomainError("tabulated function needs matching grids of at least 2 points")
            if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
                raise DomainError("tabulated grid values must be finite")
            if np.any(np.diff(xs) <= 0):
                raise DomainError("tabulated abscissae must be strictly increasing")
        if self.family == 'composite' and len(self.parts) != 2:
            raise DomainError("composite function needs (outer, inner)")

    # Constructors

    @classmethod
    def log(cls, declared_class: Optional[str] = None) -> 'FunctionSpec':
        return cls('log', declared_class=declared_class)

    @classmethod
    def q_log(cls, q: float, declared_class: Optional[str] = None) -> 'FunctionSpec':
        return cls('q_log', float(q), declared_class=declared_class)

    @classmethod
    def power(cls, r: float, declared_class: Optional[str] = None) -> 'FunctionSpec':
        return cls('power', float(r), declared_class=declared_class)

    @classmethod
    def rational(cls, declared_class: Optional[str] = None) -> 'FunctionSpec':
        return cls(RATIONAL, declared_class=declared_class)

    @classmethod
    def identity(cls) -> 'FunctionSpec':
        return cls('identity')

    @classmethod
    def exp(cls) -> 'FunctionSpec':
        return cls('exp')

    @classmethod
    def tabulated(cls, xs: Sequence[float], ys: Sequence[float],
                  declared_class: Optional[str] = None) -> 'FunctionSpec':
        return cls('tabulated', xs=tuple(float(v) for v in xs),
                   ys=tuple(float(v) for v in ys), declared_class=declared_class)

    @classmethod
    def compose(cls, outer: 'FunctionSpec', inner: 'FunctionSpec') -> 'FunctionSpec':
        """outer after inner"""
        return cls('composite', parts=(outer, inner))

    @classmethod
    def parse(cls, text: str) -> 'FunctionSpec':
        """
        Parse the compact textual form used on the command line and in JSON.

        Examples: "log", "q_log:0.5", "power:2", "rational", "exp"
        """
        family, _, arg = text.strip().partition(':')
        family = _ALIASES.get(family, family)
        if family in ('q_log', 'power'):
            if not arg:
                raise DomainError(f"{family} needs a parameter, e.g. {family}:0.5")
            try:
                return cls(family, float(arg))
            except ValueError as e:
                raise DomainError(f"Invalid parameter in {text!r}") from e
        if family in ('tabulated', 'composite'):
            raise DomainError(f"{family} functions must be given as JSON objects")
        return cls(family)

    @classmethod
    def from_dict(cls, data: Any) -> 'FunctionSpec':
        """Build from a string or a JSON object"""
        if isinstance(data, str):
            return cls.parse(data)
        family = _ALIASES.get(data.get('family', ''), data.get('family', ''))
        if family == 'composite':
            outer, inner = data['parts']
            return cls.compose(cls.from_dict(outer), cls.from_dict(inner))
        return cls(
            family,
            data.get('param'),
            declared_class=data.get('declared_class'),
            xs=tuple(data.get('xs', ())),
            ys=tuple(data.get('ys', ())),
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'family': self.family}
        if self.param is not None:
            data['param'] = self.param
        if self.declared_class is not None:
            data['declared_class'] = self.declared_class
        if self.family == 'tabulated':
            data['xs'] = list(self.xs)
            data['ys'] = list(self.ys)
        if self.family == 'composite':
            data['parts'] = [part.to_dict() for part in self.parts]
        return data

    @property
    def name(self) -> str:
        if self.family in ('q_log', 'power'):
            return f"{self.family}:{self.param:g}"
        if self.family == 'tabulated':
            return f"tabulated[{len(self.xs)}]"
        if self.family == 'composite':
            return f"{self.parts[0].name}∘{self.parts[1].name}"
        return self.family

    # Evaluation

    @property
    def _integer_power(self) -> bool:
        return self.family == 'power' and float(self.param).is_integer()

    def domain_violation(self, x: np.ndarray) -> Optional[str]:
        """Describe the first domain violation in x, or None"""
        family = self.family
        if family in ('log', 'q_log', RATIONAL):
            if np.any(x <= 0):
                return f"{self.name} requires positive arguments, got {x.min():.17g}"
        elif family == 'power':
            r = self.param
            if self._integer_power:
                if r < 0 and np.any(x == 0):
                    return f"{self.name} is undefined at 0"
            elif r > 0 and np.any(x < 0):
                return f"{self.name} rejects negative bases, got {x.min():.17g}"
            elif r < 0 and np.any(x <= 0):
                return f"{self.name} requires positive arguments, got {x.min():.17g}"
        elif family == 'tabulated':
            if np.any(x < self.xs[0]) or np.any(x > self.xs[-1]):
                return f"{self.name} is tabulated on [{self.xs[0]}, {self.xs[-1]}]"
        elif family == 'composite':
            return self.parts[1].domain_violation(x)
        return None

    def evaluate(self, values: Any) -> np.ndarray:
        """Evaluate element-wise, raising DomainError outside the domain"""
        x = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(x)):
            raise DomainError(f"{self.name} arguments must be finite")
        problem = self.domain_violation(x)
        if problem:
            raise DomainError(problem)
        family = self.family
        with np.errstate(over='ignore'):
            if family == 'log':
                result = np.log(x)
            elif family == 'q_log':
                result = q_log_array(x, QLogParams(self.param))
            elif family == 'power':
                result = np.power(x, self.param)
            elif family == RATIONAL:
                result = x / (x * x + 2.0)
            elif family == 'identity':
                result = x.copy()
            elif family == 'exp':
                result = np.exp(x)
            elif family == 'tabulated':
                result = np.interp(x, self.xs, self.ys)
            else:
                outer, inner = self.parts
                result = outer.evaluate(inner.evaluate(x))
        if not np.all(np.isfinite(result)):
            raise DomainError(f"{self.name} overflows on the given arguments")
        return result

    def __call__(self, values: Any):
        result = self.evaluate(values)
        return float(result) if np.ndim(result) == 0 else result

    def contains(self, values: Any) -> bool:
        x = np.asarray(values, dtype=float)
        return bool(np.all(np.isfinite(x))) and self.domain_violation(x) is None

    @property
    def vanishes_at_zero(self) -> bool:
        """Whether x*f(x) tends to 0 as x -> 0+, giving the 0*f(0) = 0 convention"""
        family = self.family
        if family == 'log':
            return True
        if family == 'q_log':
            return self.param < 2
        if family == 'power':
            return self.param > -1
        return family in (RATIONAL, 'identity', 'exp')

    def xfx(self, values: Any) -> np.ndarray:
        """x * f(x) with the continuous extension at x = 0 where it exists"""
        x = np.atleast_1d(np.asarray(values, dtype=float))
        result = np.zeros_like(x)
        at_zero = (x == 0) & self.vanishes_at_zero
        rest = ~at_zero
        if np.any(rest):
            result[rest] = x[rest] * self.evaluate(x[rest])
        return result.reshape(np.shape(values))
