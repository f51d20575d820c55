"""Average-fidelity formulas and their Monte Carlo reproduction.

Closed forms, exact moment-integral derivations of the same quantities,
and seeded Monte Carlo estimators for four input scenarios:

  pure              Haar-random N-dimensional states
  entangled         Haar-random states on system x auxiliary (N x R)
  mixed             density matrices induced by tracing those out
  state_estimation  best classical guess from one cut outcome

Estimator shards draw from independent RNG streams, per-shot fidelities go
through the actual projection pipeline rather than the norm_const * p
shortcut, and all reductions use exactly rounded summation so the result
is independent of thread count and shard order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .fidelity import bures_fidelity
from .haar import MomentSpec, exact_moment_fraction, sample_states
from .linalg import BipartitePureState, PureState, partial_trace
from .povm import CutPovm, sample_outcome
from .rng import stream

MODES = ("pure", "entangled", "mixed", "state_estimation")
DEFAULT_SHARDS = 16


@dataclass(frozen=True)
class ExperimentConfig:
    """One estimator run: scenario dimensions, sample budget and seeding.

    ``r`` is the auxiliary dimension (1 means plain pure states).  The
    shard count fixes how samples split across RNG streams; together with
    the seed it pins the estimate bit for bit.
    """

    n: int
    m: int
    r: int = 1
    mode: str = "pure"
    samples: int = 1
    seed: int = 0
    method: str = "montecarlo"
    shards: int = DEFAULT_SHARDS

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise ValueError("need 1 <= m <= n")
        if self.r < 1:
            raise ValueError("auxiliary dimension must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.method not in ("montecarlo", "analytic", "exact_moments"):
            raise ValueError("unknown method")
        if self.shards < 1:
            raise ValueError("need at least one shard")


@dataclass(frozen=True)
class FidelityEstimate:
    """Monte Carlo mean with its standard error and analytic reference."""

    mean: float
    stderr: float
    samples: int
    seed: int
    analytic_target: float | None = None
    z_score: float | None = None
    bures_max_deviation: float | None = None

    def __post_init__(self):
        if self.stderr < 0.0:
            raise ValueError("standard error must be nonnegative")
        if not 0.0 <= self.mean <= 1.0 + 3.0 * self.stderr:
            raise ValueError(f"mean {self.mean} outside [0, 1 + 3*stderr]")


# --- closed forms (exact rational, floated at the boundary) ---


def entangled_fidelity_fraction(n: int, m: int, r: int) -> Fraction:
    return Fraction(m * r + 1, n * r + 1)


def state_estimation_fraction(n: int, m: int) -> Fraction:
    return Fraction(m + 1, m * (n + 1))


def _check_dims(n: int, m: int, r: int = 1):
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    if r < 1:
        raise ValueError("auxiliary dimension must be >= 1")


def analytic_pure(n: int, m: int) -> float:
    """Average fidelity of the cut protocol on Haar pure states: (M+1)/(N+1)."""
    _check_dims(n, m)
    return float(Fraction(m + 1, n + 1))


def analytic_entangled(n: int, m: int, r: int) -> float:
    """Entangled-input average fidelity (MR+1)/(NR+1); r=1 reduces to pure."""
    _check_dims(n, m, r)
    return float(entangled_fidelity_fraction(n, m, r))


def analytic_n_to_1(n: int, r: int) -> float:
    """Fidelity of cutting all the way to one level: (R+1)/(NR+1)."""
    _check_dims(n, 1, r)
    return float(Fraction(r + 1, n * r + 1))


def analytic_state_estimation(n: int, m: int) -> float:
    """Best-guess estimation fidelity from one cut outcome: (1 + 1/M)/(N+1)."""
    _check_dims(n, m)
    return float(state_estimation_fraction(n, m))


def horodecki_bound(n: int, m: int) -> float:
    """Optimal-teleportation bound (N f_s + 1)/(N + 1) with singlet fraction M/N.

    Must agree with ``analytic_pure`` identically; computed independently
    from the singlet fraction and asserted here.
    """
    _check_dims(n, m)
    singlet_fraction = Fraction(m, n)
    bound = (n * singlet_fraction + 1) / (n + 1)
    if bound != Fraction(m + 1, n + 1):
        raise AssertionError("singlet-fraction bound disagrees with closed form")
    return float(bound)


def relation_check(n: int, m: int, r: int = 1) -> float:
    """Residual of F(N->M) = (M-1)/(N-1) + (N-M)/(N-1) * F(N->1), exactly."""
    if n == 1:
        raise ValueError("relation needs n >= 2")
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    _check_dims(n, m, r)
    lhs = entangled_fidelity_fraction(n, m, r)
    rhs = Fraction(m - 1, n - 1) + Fraction(n - m, n - 1) * Fraction(r + 1, n * r + 1)
    return float(abs(lhs - rhs))


def composition_check(n: int, k: int, m: int, r: int = 1) -> float:
    """Residual of the stepwise identity F(N->M) = F(N->K) * F(K->M)."""
    if not 1 <= m <= k <= n:
        raise ValueError("need 1 <= m <= k <= n")
    _check_dims(n, m, r)
    direct = entangled_fidelity_fraction(n, m, r)
    stepped = entangled_fidelity_fraction(n, k, r) * entangled_fidelity_fraction(k, m, r)
    return float(abs(direct - stepped))


def _moment(dim: int, leading: tuple[int, ...]) -> Fraction:
    exps = leading + (0,) * (dim - len(leading))
    return exact_moment_fraction(MomentSpec(dim, exps))


def exact_pure_via_moments(n: int, m: int) -> float:
    """Pure-state average fidelity derived through the amplitude moments.

    An independent route to the closed form: the subset-average reduces to
    N * E[|c_1|^4] plus combinatorial prefactors.
    """
    _check_dims(n, m)
    if n == 1:
        return 1.0
    value = Fraction(m - 1, n - 1) + Fraction(n - m, n - 1) * n * _moment(n, (2,))
    return float(value)


def exact_entangled_via_moments(n: int, m: int, r: int) -> float:
    """Entangled average fidelity from fourth and cross moments on N*R."""
    _check_dims(n, m, r)
    if n == 1:
        return 1.0
    nr = n * r
    reduced = nr * (_moment(nr, (2,)) + (r - 1) * _moment(nr, (1, 1)))
    value = Fraction(m - 1, n - 1) + Fraction(n - m, n - 1) * reduced
    return float(value)


# --- Monte Carlo estimators ---


def _shard_sizes(samples: int, shards: int) -> list[int]:
    shards = min(shards, samples)
    base, extra = divmod(samples, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def _pure_shard(config: ExperimentConfig, count: int, shard: int):
    rng = stream(config.seed, shard)
    povm = CutPovm(config.n, config.m)
    rows = sample_states(config.n, count, rng)
    fs = [
        sample_outcome(povm, PureState._trusted(config.n, rows[i]), rng).shot_fidelity
        for i in range(count)
    ]
    return math.fsum(fs), math.fsum(f * f for f in fs), None


def _entangled_shard(config: ExperimentConfig, count: int, shard: int, verify_bures: bool):
    rng = stream(config.seed, shard)
    povm = CutPovm(config.n, config.m)
    rows = sample_states(config.n * config.r, count, rng)
    fs = []
    max_dev = 0.0
    for i in range(count):
        state = BipartitePureState._trusted(config.n, config.r, rows[i])
        outcome = sample_outcome(povm, state, rng)
        fs.append(outcome.shot_fidelity)
        if verify_bures:
            rho = partial_trace(state, over="aux")
            rho_cut = partial_trace(outcome.post_state, over="aux")
            dev = abs(outcome.shot_fidelity - bures_fidelity(rho, rho_cut))
            max_dev = max(max_dev, dev)
    return math.fsum(fs), math.fsum(f * f for f in fs), max_dev if verify_bures else None


def _estimation_shard(config: ExperimentConfig, count: int, shard: int, guess: str):
    rng = stream(config.seed, shard)
    povm = CutPovm(config.n, config.m)
    rows = sample_states(config.n, count, rng)
    pick = 0 if guess == "smallest" else -1
    fs = []
    for i in range(count):
        state = PureState._trusted(config.n, rows[i])
        outcome = sample_outcome(povm, state, rng)
        fs.append(abs(state.amps[outcome.subset.indices[pick]]) ** 2)
    return math.fsum(fs), math.fsum(f * f for f in fs), None


def _reduce(parts, config: ExperimentConfig, target: float) -> FidelityEstimate:
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    count = config.samples
    mean = total / count
    if count > 1:
        variance = max(0.0, (total_sq - count * mean * mean) / (count - 1))
        stderr = math.sqrt(variance / count)
    else:
        stderr = 0.0
    if stderr > 0.0:
        z = (mean - target) / stderr
    else:
        z = 0.0 if mean == target else math.inf
    devs = [p[2] for p in parts if p[2] is not None]
    return FidelityEstimate(
        mean=mean,
        stderr=stderr,
        samples=count,
        seed=config.seed,
        analytic_target=target,
        z_score=z,
        bures_max_deviation=max(devs) if devs else None,
    )


def _run_shards(kernel, config: ExperimentConfig, threads: int):
    sizes = _shard_sizes(config.samples, config.shards)
    jobs = list(enumerate(sizes))
    if threads <= 1:
        return [kernel(config, size, shard) for shard, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(kernel, config, size, shard) for shard, size in jobs]
    # Collect in shard order; fsum reductions make any order equivalent.
    return [f.result() for f in futures]


def mc_pure(config: ExperimentConfig, threads: int = 1) -> FidelityEstimate:
    """Estimate the pure-state average fidelity by sampling cut outcomes."""
    if config.mode != "pure":
        raise ValueError("config mode must be 'pure'")
    parts = _run_shards(_pure_shard, config, threads)
    return _reduce(parts, config, analytic_pure(config.n, config.m))


def mc_entangled(config: ExperimentConfig, threads: int = 1) -> FidelityEstimate:
    """Estimate the entangled-input average fidelity on system x auxiliary."""
    if config.mode != "entangled":
        raise ValueError("config mode must be 'entangled'")
    kernel = lambda cfg, count, shard: _entangled_shard(cfg, count, shard, False)
    parts = _run_shards(kernel, config, threads)
    return _reduce(parts, config, analytic_entangled(config.n, config.m, config.r))


def mc_mixed(
    config: ExperimentConfig, threads: int = 1, verify_bures: bool = False
) -> FidelityEstimate:
    """Estimate the mixed-state average fidelity via random purifications.

    Inputs are Haar states on N x R whose partial trace induces the
    density-matrix distribution; the per-shot fidelity equals the one of
    the entangled scenario because the purification maximum sits at the
    identity.  With ``verify_bures`` every shot is recomputed through the
    matrix square-root formula on the reduced states and the worst
    disagreement is reported.
    """
    if config.mode != "mixed":
        raise ValueError("config mode must be 'mixed'")
    kernel = lambda cfg, count, shard: _entangled_shard(cfg, count, shard, verify_bures)
    parts = _run_shards(kernel, config, threads)
    return _reduce(parts, config, analytic_entangled(config.n, config.m, config.r))


def mc_state_estimation(
    config: ExperimentConfig, threads: int = 1, guess: str = "smallest"
) -> FidelityEstimate:
    """Estimate the best-guess fidelity: guess one basis state of the outcome.

    The guess is the smallest subset index by default; isotropy makes any
    fixed choice equivalent, which the ``guess='largest'`` variant checks.
    """
    if config.mode != "state_estimation":
        raise ValueError("config mode must be 'state_estimation'")
    if guess not in ("smallest", "largest"):
        raise ValueError("guess must be 'smallest' or 'largest'")
    kernel = lambda cfg, count, shard: _estimation_shard(cfg, count, shard, guess)
    parts = _run_shards(kernel, config, threads)
    return _reduce(parts, config, analytic_state_estimation(config.n, config.m))


def run_experiment(
    config: ExperimentConfig, threads: int = 1, verify_bures: bool = False
) -> FidelityEstimate:
    """Dispatch an estimator run by mode."""
    if config.mode == "pure":
        return mc_pure(config, threads)
    if config.mode == "entangled":
        return mc_entangled(config, threads)
    if config.mode == "mixed":
        return mc_mixed(config, threads, verify_bures)
    return mc_state_estimation(config, threads)
