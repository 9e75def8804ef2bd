"""
Seeded random instance generation.

Every instance is a pure function of a 64-bit trial seed, which itself is
derived from (seed, trial index, attempt) through numpy's SeedSequence.
Trials can therefore run in any order or in parallel and still reproduce.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from config import Config
from .errors import ConfigError
from .matfun import HermitianMatrix, make_commuting_pair, psd_inv_sqrt, psd_sqrt, sandwich, to_exchange
from .scalar_ineq import SequencePair

GENERATOR_KINDS = (
    'sequence',
    'equality_sequence',
    'q_triple',
    'commuting',
    'density',
    'commuting_density',
    'pd_family',
    'expansive_family',
    'contractive_family',
    'shannon_family',
    'contraction',
    'lemma9',
    'nested',
)


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate: kind, sizes, eigenvalue range and structure"""
    kind: str
    dim: int = 3
    family_size: int = 2
    spectrum_range: Tuple[float, float] = Config.DEFAULT_SPECTRUM_RANGE
    structure: str = 'general'

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ConfigError(f"unknown generator kind {self.kind!r}")
        if not 1 <= self.dim <= Config.MAX_DIM:
            raise ConfigError(f"dim must lie in [1, {Config.MAX_DIM}], got {self.dim}")
        if not 1 <= self.family_size <= Config.MAX_FAMILY_SIZE:
            raise ConfigError(f"family size must lie in [1, {Config.MAX_FAMILY_SIZE}], got {self.family_size}")
        lo, hi = self.spectrum_range
        if not 0 < lo <= hi:
            raise ConfigError(f"spectrum range must satisfy 0 < lo <= hi, got {self.spectrum_range}")
        if self.structure not in ('general', 'commuting'):
            raise ConfigError(f"structure must be 'general' or 'commuting', got {self.structure!r}")


@dataclass
class Instance:
    """A generated instance with the trial seed that reproduces it"""
    kind: str
    trial_seed: int
    data: Dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.data[key]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'trial_seed': self.trial_seed,
            'data': {key: _export(value) for key, value in self.data.items()},
        }


def _export(value: Any) -> Any:
    if isinstance(value, SequencePair):
        return value.to_dict()
    if isinstance(value, HermitianMatrix) or (isinstance(value, np.ndarray) and value.ndim == 2):
        return to_exchange(value)
    if isinstance(value, (list, tuple)):
        return [_export(item) for item in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def trial_seed(seed: int, index: int, attempt: int = 0) -> int:
    """64-bit seed of one trial attempt"""
    sequence = np.random.SeedSequence([int(seed), int(index), int(attempt)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix"""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0 * n)


def random_pd(rng: np.random.Generator, n: int, spectrum: Tuple[float, float],
              unitary: np.ndarray = None) -> HermitianMatrix:
    """V diag(uniform spectrum) V^H with Haar V unless one is given"""
    v = haar_unitary(rng, n) if unitary is None else unitary
    values = rng.uniform(spectrum[0], spectrum[1], n)
    return HermitianMatrix((v * values) @ v.conj().T)


def random_expansive(rng: np.random.Generator, n: int) -> HermitianMatrix:
    """I + Q Q^H, so every eigenvalue is at least 1"""
    q = ginibre(rng, n) * rng.uniform(0.5, 2.0)
    return HermitianMatrix(np.eye(n) + q @ q.conj().T)


def random_density(rng: np.random.Generator, n: int, unitary: np.ndarray = None) -> HermitianMatrix:
    v = haar_unitary(rng, n) if unitary is None else unitary
    values = rng.dirichlet(np.ones(n))
    return HermitianMatrix((v * values) @ v.conj().T)


def _sequence(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    n = int(rng.integers(1, spec.dim + 1))
    lo, hi = spec.spectrum_range
    return {'pair': SequencePair(tuple(rng.uniform(lo, hi, n)), tuple(rng.uniform(lo, hi, n)))}


def _equality_sequence(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    n = int(rng.integers(1, spec.dim + 1))
    lo, hi = spec.spectrum_range
    b = rng.uniform(lo, hi, n)
    c = float(rng.uniform(0.1, 10.0))
    return {'pair': SequencePair(tuple(c * b), tuple(b)), 'c': c}


def _q_triple(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    lo, hi = spec.spectrum_range
    q = float(rng.uniform(-2.0, 4.0))
    if abs(q - 1.0) <= Config.Q_LIMIT_WINDOW_MAX:
        q = 1.0
    x, y = rng.uniform(lo, hi, 2)
    return {'x': float(x), 'y': float(y), 'q': q}


def _commuting(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    n = spec.dim
    lo, hi = spec.spectrum_range
    A, B = make_commuting_pair(haar_unitary(rng, n), rng.uniform(lo, hi, n), rng.uniform(lo, hi, n))
    return {'A': A, 'B': B}


def _density(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    return {'rho': random_density(rng, spec.dim)}


def _commuting_density(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    u = haar_unitary(rng, spec.dim)
    return {'rho': random_density(rng, spec.dim, u), 'sigma': random_density(rng, spec.dim, u)}


def _family(rng: np.random.Generator, spec: GeneratorSpec, maker) -> List[HermitianMatrix]:
    shared = haar_unitary(rng, spec.dim) if spec.structure == 'commuting' else None
    return [maker(shared) for _ in range(spec.family_size)]


def _pd_family(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    make = lambda u: random_pd(rng, spec.dim, spec.spectrum_range, u)
    return {'A': _family(rng, spec, make), 'B': _family(rng, spec, make)}


def _expansive_family(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    if spec.structure == 'commuting':
        u = haar_unitary(rng, spec.dim)
        A = [random_pd(rng, spec.dim, (1.0, 1.0 + spec.spectrum_range[1]), u)
             for _ in range(spec.family_size)]
        B = [random_pd(rng, spec.dim, spec.spectrum_range, u) for _ in range(spec.family_size)]
    else:
        A = [random_expansive(rng, spec.dim) for _ in range(spec.family_size)]
        B = [random_pd(rng, spec.dim, spec.spectrum_range) for _ in range(spec.family_size)]
    return {'A': A, 'B': B}


def _contractive_family(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    contractive = (0.05, 1.0)
    make_a = lambda u: random_pd(rng, spec.dim, contractive, u)
    make_b = lambda u: random_pd(rng, spec.dim, spec.spectrum_range, u)
    if spec.structure == 'commuting':
        u = haar_unitary(rng, spec.dim)
        return {
            'A': [make_a(u) for _ in range(spec.family_size)],
            'B': [make_b(u) for _ in range(spec.family_size)],
        }
    return {'A': _family(rng, spec, make_a), 'B': _family(rng, spec, make_b)}


def _shannon_family(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    """Expansive A_i and B_i = A^(1/2) W_i A^(1/2) with PD weights W_i summing to I"""
    n, m = spec.dim, spec.family_size
    A = [random_expansive(rng, n) for _ in range(m)]
    total = HermitianMatrix(sum(a.entries for a in A))
    parts = [random_pd(rng, n, spec.spectrum_range) for _ in range(m)]
    norm = psd_inv_sqrt(HermitianMatrix(sum(p.entries for p in parts)))
    root = psd_sqrt(total)
    B = [sandwich(root, sandwich(norm, p)) for p in parts]
    # absorb the round-off so the two sums agree to machine precision
    drift = total.entries - sum(b.entries for b in B)
    B[-1] = HermitianMatrix(B[-1].entries + drift)
    return {'A': A, 'B': B}


def _contraction(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    n = spec.dim
    z = ginibre(rng, n)
    scale = float(rng.uniform(0.1, 1.0))
    C = z * (scale / np.linalg.norm(z, 2))
    return {'C': C, 'X': random_pd(rng, n, (0.0, spec.spectrum_range[1]))}


def _lemma9(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    n, m = spec.dim, spec.family_size
    X = [ginibre(rng, n) * np.sqrt(2.0 * n) for _ in range(m)]
    A = [random_pd(rng, n, spec.spectrum_range) for _ in range(m)]
    return {'X': X, 'A': A}


def _nested(rng: np.random.Generator, spec: GeneratorSpec) -> Dict[str, Any]:
    n = spec.dim
    lo, hi = spec.spectrum_range
    A_i = random_pd(rng, n, spec.spectrum_range)
    B_i = random_pd(rng, n, spec.spectrum_range)
    A = A_i + random_pd(rng, n, (0.0, hi))
    B = B_i + random_pd(rng, n, (lo, hi))
    return {'A_i': A_i, 'B_i': B_i, 'A': A, 'B': B}


_BUILDERS = {
    'sequence': _sequence,
    'equality_sequence': _equality_sequence,
    'q_triple': _q_triple,
    'commuting': _commuting,
    'density': _density,
    'commuting_density': _commuting_density,
    'pd_family': _pd_family,
    'expansive_family': _expansive_family,
    'contractive_family': _contractive_family,
    'shannon_family': _shannon_family,
    'contraction': _contraction,
    'lemma9': _lemma9,
    'nested': _nested,
}


def instance_from_trial_seed(spec: GeneratorSpec, seed: int) -> Instance:
    """Rebuild an instance from its 64-bit trial seed"""
    rng = np.random.default_rng(int(seed))
    return Instance(spec.kind, int(seed), _BUILDERS[spec.kind](rng, spec))


def random_instance(spec: GeneratorSpec, seed: int, index: int, attempt: int = 0) -> Instance:
    """
    Generate the instance of trial `index` (retry `attempt`) under `seed`.

    Args:
        spec: Generator specification
        seed: Run seed
        index: Trial counter
        attempt: Regeneration counter after a precondition failure

    Returns:
        Instance fully determined by (spec, seed, index, attempt)
    """
    return instance_from_trial_seed(spec, trial_seed(seed, index, attempt))
