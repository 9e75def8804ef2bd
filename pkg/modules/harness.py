"""
Batch property suites, counterexample search and trial replay.

A suite couples a generator kind with an evaluator that turns one instance
into one or more verdicts. Trials are independent: each one draws its
instance from a seed derived from (seed, trial index, attempt), so results
do not depend on execution order or on the number of workers.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import Config
from .deformed_log import (
    QLogParams,
    q_log,
    q_log_power,
    q_log_product,
    q_log_product_alt,
    q_log_quotient,
    q_log_reciprocal,
)
from .errors import ConfigError, PreconditionError, UnknownSuiteError
from .functions import FunctionSpec
from .generators import GeneratorSpec, Instance, instance_from_trial_seed, random_instance
from .loewner_ineq import (
    OperatorFunctionSpec,
    hansen_jensen_residual,
    intermediate_57_residual,
    lemma9_residual,
    operator_shannon_residual,
    theorem6_residual,
    theorem10_congruence_residual,
    theorem10_residual_1,
    theorem10_residual_2,
)
from .matfun import LoewnerVerdict, jacobi_eigh
from .scalar_ineq import (
    InequalityVerdict,
    SequencePair,
    concave_log_sum_gap,
    convexity_check,
    csiszar_gap,
    generalized_log_sum_gap,
    jensen_gap,
    q_log_sum_gap,
    rational_example_gap,
    ratio_bounds,
    reverse_log_sum_gap,
    scalar_inverse_mean_gap,
    scalar_weighted_inverse_gap,
    standard_log_sum_gap,
)
from .trace_ineq import (
    entropy_bound_gap,
    exp_log_trace_gap,
    q_trace_gap,
    quantum_relative_entropy,
    reverse_trace_gap,
    trace_log_sum_gap,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)

Verdict = Union[InequalityVerdict, LoewnerVerdict]
Evaluator = Callable[[Instance, Any, Optional[float]], List[Verdict]]

SEED_LIMIT = 2 ** 64
Q_DIRECTION_VALUES = (0.0, 0.5, 1.5, 2.5, 3.0)
Q_EXPONENTS = (1.0, 2.0)
SEARCH_MODES = ('contractive',)


@dataclass(frozen=True)
class Suite:
    """A registered property check"""
    name: str
    generator: str
    evaluate: Evaluator
    description: str
    default_function: Optional[str] = None
    operator_function: bool = False
    spectrum_range: Optional[Tuple[float, float]] = None
    expects_violations: bool = False

    def parse_function(self, text: Optional[Any]):
        text = text if text is not None else self.default_function
        if text is None:
            return None
        if self.operator_function:
            return OperatorFunctionSpec.from_dict(text)
        return FunctionSpec.from_dict(text)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'generator': self.generator,
            'description': self.description,
            'default_function': self.default_function,
            'expects_violations': self.expects_violations,
        }


SUITES: Dict[str, Suite] = {}


def register(name: str, generator: str, description: str, **options):
    """Decorator adding an evaluator to the suite registry"""
    def decorator(evaluate: Evaluator) -> Evaluator:
        SUITES[name] = Suite(name, generator, evaluate, description, **options)
        return evaluate
    return decorator


def get_suite(name: str) -> Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise UnknownSuiteError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}") from None


def _equality(lhs: float, rhs: float, tolerance: float, details: Dict[str, Any]) -> List[Verdict]:
    """Both one-sided verdicts; together they bound |lhs - rhs| by tolerance * scale"""
    return [
        InequalityVerdict.from_sides(lhs, rhs, '>=', tolerance, dict(details)),
        InequalityVerdict.from_sides(lhs, rhs, '<=', tolerance, dict(details)),
    ]


# Scalar suites

@register('ratio_bounds', 'sequence', "m_g <= sum g(a) / sum g(b) <= M_g", default_function='identity')
def _ratio_bounds(instance, g, tolerance):
    pair = instance['pair']
    bounds = ratio_bounds(g, pair)
    ga = g.evaluate(np.array(pair.a))
    gb = g.evaluate(np.array(pair.b))
    mean = float(ga.sum() / gb.sum())
    return [
        InequalityVerdict.from_sides(mean, bounds.lower, '>=', tolerance),
        InequalityVerdict.from_sides(mean, bounds.upper, '<=', tolerance),
    ]


@register('convexity_check', 'sequence', "x f(x) passes the grid convexity check on the ratio interval",
          default_function='log')
def _convexity(instance, f, tolerance):
    pair = instance['pair']
    bounds = ratio_bounds(FunctionSpec.identity(), pair)
    ok = convexity_check('xfx', f, bounds.as_interval())
    return [InequalityVerdict.from_sides(float(ok), 1.0, '>=', 0.0,
                                         {'interval': list(bounds.as_interval())})]


@register('scalar_log_sum', 'sequence', "generalized log-sum inequality, x f(x) convex",
          default_function='log')
def _scalar_log_sum(instance, f, tolerance):
    return [generalized_log_sum_gap(f, FunctionSpec.identity(), instance['pair'], tolerance)]


@register('scalar_log_sum_power', 'sequence', "generalized log-sum inequality with g = t^2",
          default_function='log')
def _scalar_log_sum_power(instance, f, tolerance):
    return [generalized_log_sum_gap(f, FunctionSpec.power(2), instance['pair'], tolerance)]


@register('scalar_log_sum_equality', 'equality_sequence', "a_i = c b_i gives equality",
          default_function='log')
def _scalar_equality(instance, f, tolerance):
    verdict = generalized_log_sum_gap(f, FunctionSpec.identity(), instance['pair'], tolerance)
    return _equality(verdict.lhs, verdict.rhs, verdict.tolerance, {'c': instance['c']})


@register('concave_log_sum', 'sequence', "reversed log-sum inequality, x f(x) concave",
          default_function='q_log:3')
def _concave_log_sum(instance, f, tolerance):
    return [concave_log_sum_gap(f, FunctionSpec.identity(), instance['pair'], tolerance)]


@register('reverse_log_sum', 'sequence', "log-sum inequality with x f(1/x) concave",
          default_function='log')
def _reverse_log_sum(instance, f, tolerance):
    return [reverse_log_sum_gap(f, FunctionSpec.identity(), instance['pair'], tolerance)]


@register('rational_example', 'sequence', "rational x/(x^2+2) instance of the reverse inequality",
          spectrum_range=(0.5, 1.2))
def _rational(instance, f, tolerance):
    return [rational_example_gap(instance['pair'], tolerance)]


@register('q_log_sum', 'sequence', "q-log log-sum inequality, direction flips at q = 2")
def _q_log_sum(instance, f, tolerance):
    return [
        q_log_sum_gap(instance['pair'], q, r, tolerance)
        for q in Q_DIRECTION_VALUES for r in Q_EXPONENTS
    ]


@register('jensen', 'sequence', "weighted Jensen inequality for convex f", default_function='power:2')
def _jensen(instance, f, tolerance):
    pair = instance['pair']
    weights = np.array(pair.b) / sum(pair.b)
    weights[-1] = 1.0 - weights[:-1].sum()
    return [jensen_gap(f, pair.a, np.clip(weights, 0.0, None), tolerance)]


@register('csiszar', 'sequence', "f-divergence form of the log-sum inequality", default_function='power:2')
def _csiszar(instance, f, tolerance):
    return [csiszar_gap(f, instance['pair'], tolerance)]


@register('standard_log_sum', 'sequence', "classical log-sum inequality, cross-checked")
def _standard(instance, f, tolerance):
    pair = instance['pair']
    standard = standard_log_sum_gap(pair, tolerance)
    general = generalized_log_sum_gap(FunctionSpec.log(), FunctionSpec.identity(), pair, tolerance)
    agreement = _equality(general.lhs, standard.lhs, Config.IDENTITY_TOLERANCE * 10, {'side': 'lhs'})
    return [standard] + agreement


@register('scalar_inverse_mean', 'sequence', "scalar form of the first inverse-mean inequality",
          default_function='power:0.5')
def _inverse_mean(instance, f, tolerance):
    return [scalar_inverse_mean_gap(f, instance['pair'], tolerance)]


@register('scalar_weighted_inverse', 'sequence', "scalar form of the weighted inverse-mean claim",
          default_function='power:0.5', expects_violations=True)
def _weighted_inverse(instance, f, tolerance):
    return [scalar_weighted_inverse_gap(f, instance['pair'], tolerance)]


@register('q_log_identities', 'q_triple', "product, quotient, reciprocal and power rules of ln_q")
def _q_log_identities(instance, f, tolerance):
    tolerance = Config.IDENTITY_TOLERANCE if tolerance is None else tolerance
    x, y = instance['x'], instance['y']
    params = QLogParams(instance['q'])
    k = params.deformation
    lx, ly = q_log(x, params), q_log(y, params)
    # round-off grows with the size of the terms being combined
    spread = max(1.0, abs(lx), abs(ly), abs(k * lx * ly), abs(ly) * x ** k,
                 (abs(lx) + abs(ly)) / y ** k, x ** k)
    checks = {
        'product': (q_log(x * y, params), q_log_product(x, y, params)),
        'product_alt': (q_log(x * y, params), q_log_product_alt(x, y, params)),
        'quotient': (q_log(x / y, params), q_log_quotient(x, y, params)),
        'reciprocal': (q_log(1.0 / y, params), q_log_reciprocal(y, params)),
        'power': (math.exp(k * math.log(x)), q_log_power(x, params)),
    }
    verdicts: List[Verdict] = []
    for name, (direct, rule) in checks.items():
        scale = max(spread, abs(direct), abs(rule))
        verdicts.extend(_equality(direct / scale, rule / scale, tolerance, {'identity': name}))
    return verdicts


# Trace-form suites

@register('trace_log_sum', 'commuting', "trace form for commuting pairs", default_function='log')
def _trace_log_sum(instance, f, tolerance):
    return [trace_log_sum_gap(f, FunctionSpec.identity(), instance['A'], instance['B'], tolerance)]


@register('q_trace', 'commuting', "q-log trace form, direction flips at q = 2")
def _q_trace(instance, f, tolerance):
    return [q_trace_gap(instance['A'], instance['B'], q, 1.0, tolerance) for q in Q_DIRECTION_VALUES]


@register('reverse_trace', 'commuting', "reverse trace form, x f(1/x) concave", default_function='log')
def _reverse_trace(instance, f, tolerance):
    return [reverse_trace_gap(f, FunctionSpec.identity(), instance['A'], instance['B'], tolerance)]


@register('exp_log_trace', 'commuting', "trace(A log A) - trace(A log B) >= trace(A) log(trace A / trace B)")
def _exp_log_trace(instance, f, tolerance):
    return [exp_log_trace_gap(instance['A'], instance['B'], tolerance)]


@register('quantum_relative_entropy', 'commuting_density', "D(rho||sigma) >= 0 and D(rho||rho) = 0")
def _relative_entropy(instance, f, tolerance):
    rho, sigma = instance['rho'], instance['sigma']
    tolerance = Config.RELATIVE_TOLERANCE if tolerance is None else tolerance
    value = quantum_relative_entropy(rho, sigma)
    self_value = quantum_relative_entropy(rho, rho)
    return [InequalityVerdict.from_sides(value, 0.0, '>=', tolerance)] + \
        _equality(self_value, 0.0, Config.DENSITY_TRACE_TOLERANCE, {'case': 'rho == sigma'})


@register('von_neumann_entropy', 'density', "0 <= S(rho) <= ln n")
def _entropy(instance, f, tolerance):
    rho = instance['rho']
    value = von_neumann_entropy(rho)
    return [
        InequalityVerdict.from_sides(value, 0.0, '>=', tolerance),
        InequalityVerdict.from_sides(value, math.log(rho.n), '<=', tolerance),
    ]


@register('entropy_bound', 'commuting', "trace[A log A] >= trace(A) [log trace(A) - log n]")
def _entropy_bound(instance, f, tolerance):
    return [entropy_bound_gap(instance['A'], 1.0, tolerance), entropy_bound_gap(instance['A'], 2.0, tolerance)]


# Loewner suites

@register('hansen_jensen', 'contraction', "C^H f(X) C <= f(C^H X C) for operator monotone f",
          default_function='power:0.5', operator_function=True)
def _hansen(instance, f, tolerance):
    return [hansen_jensen_residual(f, instance['C'], instance['X'], tolerance=tolerance)]


@register('theorem6', 'expansive_family', "sum of perspectives is dominated by the perspective of the sums",
          default_function='power:0.5', operator_function=True)
def _theorem6(instance, f, tolerance):
    return [theorem6_residual(f, instance['A'], instance['B'], tolerance)]


@register('operator_shannon', 'shannon_family', "operator Shannon inequality", default_function='log',
          operator_function=True)
def _shannon(instance, f, tolerance):
    return [operator_shannon_residual(instance['A'], instance['B'], f, tolerance)]


@register('lemma9', 'lemma9', "sum X_i^H A_i^-1 X_i >= X^H A^-1 X")
def _lemma9(instance, f, tolerance):
    return [lemma9_residual(instance['X'], instance['A'], tolerance)]


@register('theorem10_1', 'pd_family', "inverse-mean inequality for operator monotone f",
          default_function='power:0.5', operator_function=True)
def _theorem10_1(instance, f, tolerance):
    return [theorem10_residual_1(f, instance['A'], instance['B'], tolerance)]


@register('theorem10_2', 'pd_family', "weighted inverse-mean claim (known to fail)",
          default_function='power:0.5', operator_function=True, expects_violations=True)
def _theorem10_2(instance, f, tolerance):
    return [theorem10_residual_2(f, instance['A'], instance['B'], tolerance)]


@register('theorem10_congruence', 'pd_family', "congruence-summed form of the inverse-mean monotonicity",
          default_function='power:0.5', operator_function=True)
def _theorem10_congruence(instance, f, tolerance):
    return [theorem10_congruence_residual(f, instance['A'], instance['B'], tolerance)]


@register('intermediate_57', 'nested', "B^(1/2) f(B^(1/2) A^-1 B^(1/2))^-1 B^(1/2) is monotone in (A, B)",
          default_function='power:0.5', operator_function=True)
def _intermediate(instance, f, tolerance):
    return [intermediate_57_residual(f, instance['A_i'], instance['B_i'], instance['A'], instance['B'],
                                     tolerance)]


@dataclass
class TrialConfig:
    """Configuration of one suite run"""
    suite: str
    trials: int = Config.DEFAULT_TRIALS
    seed: int = Config.DEFAULT_SEED
    dim: int = 3
    family_size: int = 2
    tolerance: Optional[float] = None
    spectrum_range: Optional[Tuple[float, float]] = None
    structure: str = 'general'
    function: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be positive, got {self.trials}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        if not 1 <= self.dim <= Config.MAX_DIM:
            raise ConfigError(f"dim must lie in [1, {Config.MAX_DIM}], got {self.dim}")
        if not 1 <= self.family_size <= Config.MAX_FAMILY_SIZE:
            raise ConfigError(f"family size must lie in [1, {Config.MAX_FAMILY_SIZE}], got {self.family_size}")
        if self.spectrum_range is not None:
            self.spectrum_range = (float(self.spectrum_range[0]), float(self.spectrum_range[1]))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrialConfig':
        known = {name for name in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration fields: {', '.join(sorted(unknown))}")
        if 'suite' not in data:
            raise ConfigError("configuration needs a suite")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    def generator_spec(self, suite: Suite, kind: Optional[str] = None) -> GeneratorSpec:
        spectrum = self.spectrum_range or suite.spectrum_range or Config.DEFAULT_SPECTRUM_RANGE
        return GeneratorSpec(kind or suite.generator, self.dim, self.family_size, spectrum, self.structure)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop('workers')
        if self.spectrum_range is not None:
            data['spectrum_range'] = list(self.spectrum_range)
        return data


@dataclass
class SuiteReport:
    """Aggregated outcome of a suite run or search"""
    suite: str
    config: Dict[str, Any]
    trials: int
    violations: int
    worst_gap: Optional[float]
    worst_case_seed: Optional[int]
    worst_case_trial: Optional[int]
    generation_failures: int = 0
    findings: List[Dict[str, Any]] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass
class TrialOutcome:
    index: int
    trial_seed: int
    regenerations: int
    gap: float
    holds: bool
    verdicts: List[Dict[str, Any]] = field(default_factory=list)
    instance: Optional[Dict[str, Any]] = None


def _evaluate_instance(suite: Suite, instance: Instance, function: Any,
                       tolerance: Optional[float]) -> List[Verdict]:
    verdicts = suite.evaluate(instance, function, tolerance)
    if not verdicts:
        raise ConfigError(f"suite {suite.name} produced no verdicts")
    return verdicts


def _run_trial(suite_name: str, spec: GeneratorSpec, function_text: Optional[Any],
               tolerance: Optional[float], seed: int, index: int) -> TrialOutcome:
    suite = get_suite(suite_name)
    function = suite.parse_function(function_text)
    for attempt in range(Config.MAX_REGENERATIONS + 1):
        instance = random_instance(spec, seed, index, attempt)
        try:
            verdicts = _evaluate_instance(suite, instance, function, tolerance)
        except PreconditionError as e:
            logger.debug("trial %d attempt %d regenerated: %s", index, attempt, e)
            continue
        worst = min(verdicts, key=lambda v: v.gap)
        holds = all(v.holds for v in verdicts)
        outcome = TrialOutcome(index, instance.trial_seed, attempt, float(worst.gap), holds)
        if not holds:
            outcome.verdicts = [v.to_dict() for v in verdicts]
            outcome.instance = instance.to_dict()
        return outcome
    raise ConfigError(
        f"trial {index}: no instance satisfied the preconditions of {suite_name} "
        f"after {Config.MAX_REGENERATIONS} regenerations"
    )


def _run_trials(suite_name: str, spec: GeneratorSpec, config: TrialConfig) -> List[TrialOutcome]:
    args = (suite_name, spec, config.function, config.tolerance, config.seed)
    if config.workers == 1:
        return [_run_trial(*args, index) for index in range(config.trials)]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(_run_trial, *args, index) for index in range(config.trials)]
        return [future.result() for future in futures]


def _aggregate(name: str, config: TrialConfig, outcomes: Sequence[TrialOutcome]) -> SuiteReport:
    worst: Optional[TrialOutcome] = None
    violations = 0
    findings: List[Dict[str, Any]] = []
    for outcome in sorted(outcomes, key=lambda o: o.index):
        if worst is None or outcome.gap < worst.gap:
            worst = outcome
        if not outcome.holds:
            violations += 1
            if len(findings) < Config.MAX_REPORTED_FINDINGS:
                findings.append({
                    'trial': outcome.index,
                    'trial_seed': outcome.trial_seed,
                    'gap': outcome.gap,
                    'verdicts': outcome.verdicts,
                    'instance': outcome.instance,
                })
    return SuiteReport(
        suite=name,
        config=config.to_dict(),
        trials=len(outcomes),
        violations=violations,
        worst_gap=worst.gap if worst else None,
        worst_case_seed=worst.trial_seed if worst else None,
        worst_case_trial=worst.index if worst else None,
        generation_failures=sum(o.regenerations for o in outcomes),
        findings=findings,
    )


def run_suite(config: TrialConfig) -> SuiteReport:
    """
    Run `config.trials` random instances of a registered suite.

    Args:
        config: Trial configuration naming the suite

    Returns:
        SuiteReport; byte-identical across runs with the same config apart
        from wall_time
    """
    suite = get_suite(config.suite)
    spec = config.generator_spec(suite)
    suite.parse_function(config.function)
    logger.info("Running suite %s: %d trials, seed %d", suite.name, config.trials, config.seed)
    start = time.perf_counter()
    outcomes = _run_trials(suite.name, spec, config)
    report = _aggregate(suite.name, config, outcomes)
    report.extras['expects_violations'] = suite.expects_violations
    report.wall_time = time.perf_counter() - start
    logger.info("Suite %s finished: %d violations, worst gap %s",
                suite.name, report.violations, report.worst_gap)
    return report


def _search_trial(spec: GeneratorSpec, function: OperatorFunctionSpec, tolerance: Optional[float],
                  seed: int, index: int) -> Tuple[TrialOutcome, bool]:
    instance = random_instance(spec, seed, index)
    verdict = theorem6_residual(function, instance['A'], instance['B'], tolerance,
                                require_expansive_sum=False)
    outcome = TrialOutcome(index, instance.trial_seed, 0, verdict.gap, verdict.holds)
    if verdict.holds:
        return outcome, False
    # second, independent eigensolver on the same residual
    rechecked = float(jacobi_eigh(verdict.residual).eigenvalues[0])
    confirmed = rechecked < -Config.COUNTEREXAMPLE_THRESHOLD
    if confirmed:
        outcome.verdicts = [dict(verdict.to_dict(), jacobi_min_eigenvalue=rechecked)]
        outcome.instance = instance.to_dict()
    else:
        outcome.holds = True
    return outcome, True


def counterexample_search(config: TrialConfig, mode: str = 'contractive') -> SuiteReport:
    """
    Evaluate the summed perspective inequality on contractive families,
    without the expansivity hypothesis, and collect confirmed candidates.

    A candidate needs a residual eigenvalue below -tolerance * scale and,
    after recomputation with the Jacobi solver, below
    -COUNTEREXAMPLE_THRESHOLD. Candidates that fail the recheck count as
    `rejected` in extras and hold, but worst_gap and worst_case_seed still
    follow the raw residual eigenvalue before the recheck. The report
    makes no claim either way.
    """
    if mode not in SEARCH_MODES:
        raise ConfigError(f"search mode must be one of {SEARCH_MODES}, got {mode!r}")
    suite = get_suite('theorem6')
    function = suite.parse_function(config.function)
    spec = config.generator_spec(suite, kind='contractive_family')
    logger.info("Counterexample search: %d contractive trials, seed %d", config.trials, config.seed)
    start = time.perf_counter()

    outcomes: List[TrialOutcome] = []
    candidates = 0
    for index in range(config.trials):
        outcome, flagged = _search_trial(spec, function, config.tolerance, config.seed, index)
        candidates += flagged
        if not outcome.holds:
            logger.info("Confirmed candidate at trial %d (seed %d), residual %.3e",
                        index, outcome.trial_seed, outcome.gap)
        outcomes.append(outcome)

    report = _aggregate('search_' + mode, config, outcomes)
    report.extras.update({'mode': mode, 'candidates': candidates, 'confirmed': report.violations,
                          'rejected': candidates - report.violations, 'function': function.name})
    report.wall_time = time.perf_counter() - start
    return report


def replay_trial(config: TrialConfig, trial_seed: int) -> Tuple[Instance, List[Verdict]]:
    """Rebuild and re-evaluate the instance behind a reported trial seed"""
    suite = get_suite(config.suite)
    spec = config.generator_spec(suite)
    instance = instance_from_trial_seed(spec, trial_seed)
    return instance, _evaluate_instance(suite, instance, suite.parse_function(config.function),
                                        config.tolerance)
