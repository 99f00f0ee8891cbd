"""Finite-shot simulation of the measurement procedure and sample complexity.

The estimator follows the three-step recipe: photon counts of each input
without interference give ``F`` and ``G`` through the Stirling
decomposition; correlators on the phase grid give the cross term by Fourier
analysis; the two are combined into ``d'``.  Every configuration (each
non-interfered input and each grid point) receives the same number of shots.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fock import TruncatedState
from .fourier import cross_term_weights, grid_pmfs, plan_grid
from .interferometer import DetectorPmf, PhasePair, local_pmf
from .stirling import number_moment_decomposition
from .witness import MinorSpec, WitnessResult, _as_spec

RNG_ALGORITHM = "numpy.random.Generator(Philox)"
INT63 = 2**63
FIG6A_EPS_CAP = 0.025
FIG6_CONFIDENCE_DELTA = 0.1


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator; ``seed`` may be an int or a ``SeedSequence``."""
    return np.random.Generator(np.random.Philox(seed))


def spawn_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


@dataclass(frozen=True)
class ShotRecord:
    """Counts over detector outcomes ``(j, k)`` from ``shots`` draws."""

    phases: PhasePair | None
    shots: int
    counts: np.ndarray
    rng_seed: int | None = None
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if int(counts.sum()) != self.shots:
            raise ValueError("counts must sum to the number of shots")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def mean(self, table: np.ndarray) -> float:
        """Empirical mean of an observable given as a table over outcomes."""
        return float((self.counts * table).sum() / self.shots)

    def empirical_pmf(self) -> np.ndarray:
        return self.counts / self.shots


def simulate_shots(pmf: DetectorPmf, shots: int, seed=None, rng: np.random.Generator | None = None) -> ShotRecord:
    """Draw ``shots`` i.i.d. detector outcomes; deterministic for a fixed seed."""
    if int(shots) != shots or shots < 1:
        raise ValueError("shots must be a positive integer")
    if rng is None:
        rng = make_rng(seed)
    probs = pmf.table.ravel()
    probs = probs / probs.sum()
    counts = rng.multinomial(int(shots), probs).reshape(pmf.table.shape)
    seed_value = seed if isinstance(seed, (int, np.integer)) else None
    return ShotRecord(pmf.phases, int(shots), counts, seed_value)


# ----------------------------------------------------------------------------
# sample-complexity bounds


@dataclass(frozen=True)
class ComplexityQuery:
    """Accuracy ``ε`` and failure probability ``δ`` for an ``m₀`` bound.

    ``bound_type`` is ``"chebyshev"`` (needs ``variance``) or
    ``"hoeffding"`` (needs ``N`` or ``value_range``).
    """

    epsilon: float
    delta: float
    bound_type: str = "chebyshev"
    variance: float | None = None
    N: int | None = None
    value_range: tuple | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("ε must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("δ must lie in (0, 1)")
        if self.bound_type not in ("chebyshev", "hoeffding"):
            raise ValueError("bound_type must be 'chebyshev' or 'hoeffding'")
        if self.bound_type == "chebyshev" and (self.variance is None or self.variance < 0):
            raise ValueError("a Chebyshev bound needs a non-negative variance")
        if self.bound_type == "hoeffding" and self.N is None and self.value_range is None:
            raise ValueError("a Hoeffding bound needs N or a value range")

    def m0(self) -> int:
        if self.bound_type == "chebyshev":
            return m0_chebyshev(self.variance, self.epsilon, self.delta)
        if self.N is not None:
            return m0_hoeffding(self.N, self.epsilon, self.delta)
        return m0_hoeffding_range(self.value_range, self.epsilon, self.delta)


def _ceil_guarded(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))


def _check_eps_delta(epsilon: float, delta: float) -> None:
    if not epsilon > 0:
        raise ValueError("ε must be positive")
    if not 0 < delta < 1:
        raise ValueError("δ must lie in (0, 1)")


def m0_chebyshev(variance: float, epsilon: float, delta: float) -> int:
    """``⌈Var/(δ ε²)⌉``, floored at one shot."""
    _check_eps_delta(epsilon, delta)
    if variance < 0:
        raise ValueError("variance must be non-negative")
    return max(1, _ceil_guarded(variance / (delta * epsilon**2)))


def m0_hoeffding(N: int, epsilon: float, delta: float) -> int:
    """``⌈(2N+1)² N^{4N} ln(2/δ) / (2ε²)⌉`` for the NOON minor of order ``N``.

    Raises ``OverflowError`` if the result exceeds ``2⁶³``.
    """
    _check_eps_delta(epsilon, delta)
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    log_m = (2 * math.log(2 * N + 1) + 4 * N * math.log(N) - math.log(2 * epsilon**2)
             + math.log(math.log(2 / delta)))
    if log_m >= math.log(INT63):
        raise OverflowError(f"m0 for N={N} exceeds 2^63")
    value = (2 * N + 1) ** 2 * float(N ** (4 * N)) / (2 * epsilon**2) * math.log(2 / delta)
    return max(1, _ceil_guarded(value))


def m0_hoeffding_range(value_range: tuple, epsilon: float, delta: float) -> int:
    """``⌈(b − a)² ln(2/δ) / (2ε²)⌉`` for outcomes in ``[a, b]``."""
    _check_eps_delta(epsilon, delta)
    a, b = value_range
    if b < a:
        raise ValueError("range must satisfy a ≤ b")
    value = (b - a) ** 2 / (2 * epsilon**2) * math.log(2 / delta)
    if value >= INT63:
        raise OverflowError("m0 exceeds 2^63")
    return max(1, _ceil_guarded(value))


# ----------------------------------------------------------------------------
# the three-step estimator


def _moment_table(shape: tuple[int, int], mono_a: int, mono_b: int) -> np.ndarray:
    """Outcome table of ``a†ᵐaᵐ b†ⁿbⁿ`` assembled from powers via Stirling numbers."""
    coeffs = number_moment_decomposition(mono_a, mono_b)
    j = np.arange(shape[0], dtype=float)
    k = np.arange(shape[1], dtype=float)
    pa = np.array([j**e for e in range(mono_a + 1)])
    pb = np.array([k**e for e in range(mono_b + 1)])
    return pa.T @ coeffs.astype(float) @ pb


@dataclass
class MinorExperiment:
    """Exact detection statistics for every configuration of a ``d'`` estimate."""

    spec: MinorSpec
    shape: tuple
    local: tuple
    grid: list
    f_table: np.ndarray = field(repr=False)
    g_table: np.ndarray = field(repr=False)
    o_table: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    @classmethod
    def prepare(cls, state1: TruncatedState, state2: TruncatedState, spec, oversample: int = 1,
                eta_local: float = 1.0, eta_grid: float = 1.0) -> "MinorExperiment":
        spec = _as_spec(spec)
        m_p, n_p, sign = spec.fourier_orders()
        shape = plan_grid(m_p, n_p, oversample)
        local = (local_pmf(state1, eta_local), local_pmf(state2, eta_local))
        grid = grid_pmfs(state1, state2, shape, eta_grid)
        lshape = tuple(max(a, b) for a, b in zip(local[0].table.shape, local[1].table.shape))
        f_table = _moment_table(lshape, spec.m, spec.n)
        g_table = _moment_table(lshape, spec.p, spec.q)
        oshape = grid[0][0].table.shape
        o_table = np.outer(np.arange(oshape[0], dtype=float) ** m_p, np.arange(oshape[1], dtype=float) ** n_p)
        weights = cross_term_weights(shape, m_p, n_p, sign)
        meta = {"grid": list(shape), "fourier_orders": [m_p, n_p, sign], "oversample": oversample,
                "eta_local": eta_local, "eta_grid": eta_grid,
                "cutoffs": [state1.cutoff, state2.cutoff], "configurations": 2 + shape[0] * shape[1]}
        return cls(spec, shape, local, grid, f_table, g_table, o_table, weights, meta)

    def _local_tables(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        shape = self.local[i].table.shape
        return self.f_table[: shape[0], : shape[1]], self.g_table[: shape[0], : shape[1]]

    def _local_exact(self, i: int) -> tuple[float, float]:
        f, g = self._local_tables(i)
        p = self.local[i].table
        return float((p * f).sum()), float((p * g).sum())

    def exact(self) -> WitnessResult:
        """Noiseless Fourier-pipeline value (infinite-shot limit)."""
        F1, G1 = self._local_exact(0)
        F2, G2 = self._local_exact(1)
        first = 0.5 * (F1 * G1 + F2 * G2)
        corr = np.array([[(p.table * self.o_table).sum() for p in row] for row in self.grid])
        second = float((self.weights * corr).sum())
        meta = dict(self.metadata, spec=str(self.spec))
        return WitnessResult(first - second, first, second, float("nan"), "fourier-extracted", True, meta)

    def single_shot_variance(self) -> dict:
        """Per-shot variance of each part; ``Var(d̂') ≈ total / shots``."""
        parts = []
        for i in range(2):
            f, g = self._local_tables(i)
            F, G = self._local_exact(i)
            lin = G * f + F * g
            p = self.local[i].table
            parts.append(float((p * lin**2).sum() - (p * lin).sum() ** 2))
        cross = 0.0
        for u, row in enumerate(self.grid):
            for v, pmf in enumerate(row):
                mean = (pmf.table * self.o_table).sum()
                var = (pmf.table * self.o_table**2).sum() - mean**2
                cross += self.weights[u, v] ** 2 * max(var, 0.0)
        first = 0.25 * (parts[0] + parts[1])
        return {"first": first, "second": float(cross), "total": first + float(cross)}

    def sample(self, shots: int, seed=None) -> WitnessResult:
        """One shot-noise realisation with ``shots`` per configuration."""
        if int(shots) != shots or shots < 1:
            raise ValueError("shots must be a positive integer")
        rng = make_rng(seed)
        prods, prod_vars = [], []
        for i in range(2):
            rec = simulate_shots(self.local[i], shots, rng=rng)
            f, g = self._local_tables(i)
            w = rec.counts / shots
            F, G = float((w * f).sum()), float((w * g).sum())
            lin = G * f + F * g
            prods.append(F * G)
            prod_vars.append(float((w * lin**2).sum() - (w * lin).sum() ** 2) / shots)
        second, var_second = 0.0, 0.0
        for u, row in enumerate(self.grid):
            for v, pmf in enumerate(row):
                rec = simulate_shots(pmf, shots, rng=rng)
                w = rec.counts / shots
                mean = float((w * self.o_table).sum())
                var = float((w * self.o_table**2).sum()) - mean**2
                second += self.weights[u, v] * mean
                var_second += self.weights[u, v] ** 2 * max(var, 0.0) / shots
        first = 0.5 * (prods[0] + prods[1])
        var_first = 0.25 * (prod_vars[0] + prod_vars[1])
        meta = dict(self.metadata, spec=str(self.spec), shots_per_configuration=int(shots),
                    total_shots=int(shots) * self.metadata["configurations"],
                    seed=seed if isinstance(seed, (int, np.integer)) else None,
                    rng_algorithm=RNG_ALGORITHM, se_first=math.sqrt(var_first),
                    se_second=math.sqrt(var_second), se_value=math.sqrt(var_first + var_second))
        return WitnessResult(first - second, first, second, float("nan"), "shot-estimated", True, meta)


def estimate_minor(state1: TruncatedState, state2: TruncatedState, spec, shots: int | None,
                   seed: int | None = None, oversample: int = 1) -> WitnessResult:
    """Three-step estimate of ``d'``; ``shots=None`` uses the exact pmfs."""
    exp = MinorExperiment.prepare(state1, state2, spec, oversample)
    if shots is None:
        return exp.exact()
    return exp.sample(shots, seed)


def minor_variance(state1: TruncatedState, state2: TruncatedState, spec, oversample: int = 1) -> float:
    """Per-shot variance of the ``d'`` estimator, for Chebyshev bounds."""
    return MinorExperiment.prepare(state1, state2, spec, oversample).single_shot_variance()["total"]


@dataclass(frozen=True)
class CoverageResult:
    """Repeated-trial check of ``|Y − E[Y]| ≤ ε``."""

    epsilon: float
    shots: int
    target: float
    estimates: np.ndarray
    seed: int

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.estimates - self.target)

    @property
    def coverage(self) -> float:
        return float(np.mean(self.errors <= self.epsilon))

    def quantiles(self, qs=(0.05, 0.5, 0.95)) -> dict:
        return {str(q): float(np.quantile(self.estimates, q)) for q in qs}


def coverage_experiment(exp: MinorExperiment, shots: int, trials: int, epsilon: float, seed: int,
                        threads: int = 1) -> CoverageResult:
    """Run ``trials`` independent estimates with per-trial spawned seeds."""
    seeds = spawn_seeds(seed, trials)
    target = exp.exact().value

    def one(ss):
        return exp.sample(shots, ss).value

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, seeds))
    else:
        values = [one(s) for s in seeds]
    return CoverageResult(epsilon, int(shots), target, np.array(values), seed)


# ----------------------------------------------------------------------------
# presets for the shot-budget figure


def fig6a_epsilon(d_value: float, cap: float = FIG6A_EPS_CAP) -> float:
    """Error margin ``min(0.025, |d₁₁₀₀|)``."""
    return min(cap, abs(d_value))


def fig6a_point(alpha: float, delta: float = FIG6_CONFIDENCE_DELTA) -> dict:
    """Chebyshev ``m₀`` for the replica ``d₁₁₀₀`` of the odd cat ``|Ψ(α, α)⟩``."""
    from .states import Cat, build

    state = build(Cat(alpha, alpha))
    exp = MinorExperiment.prepare(state, state, MinorSpec(1, 1, 0, 0))
    d = exp.exact().value
    var = exp.single_shot_variance()["total"]
    eps = fig6a_epsilon(d)
    return {"alpha": alpha, "d1100": d, "epsilon": eps, "variance": var,
            "m0": m0_chebyshev(var, eps, delta) if eps > 0 else None}


def fig6b_sigma(N: int, reading: str = "observable") -> float:
    """The ``σ`` unit of the NOON accuracy preset (balanced NOON, replica inputs).

    The figure quotes accuracies in units of ``σ`` without defining it.
    ``reading="observable"`` (default) takes the single-shot standard
    deviation of the measured ``(c₁†c₁)^N (d₁†d₁)^N``, averaged over the phase
    grid; ``reading="estimator"`` takes the per-shot spread of the ``d₀₀NN``
    estimator after Fourier weighting.
    """
    from .states import NOON, build

    state = build(NOON(N, 1 / math.sqrt(2)))
    exp = MinorExperiment.prepare(state, state, MinorSpec(0, 0, N, N))
    if reading == "estimator":
        return math.sqrt(exp.single_shot_variance()["total"])
    if reading != "observable":
        raise ValueError("reading must be 'observable' or 'estimator'")
    sds = []
    for row in exp.grid:
        for pmf in row:
            mean = (pmf.table * exp.o_table).sum()
            sds.append(math.sqrt(max((pmf.table * exp.o_table**2).sum() - mean**2, 0.0)))
    return float(np.mean(sds))


def fig6b_point(N: int, k_sigma: float, delta: float = FIG6_CONFIDENCE_DELTA,
                reading: str = "observable") -> dict:
    """Hoeffding ``m₀`` for the NOON minor at accuracy ``k·σ``."""
    sigma = fig6b_sigma(N, reading)
    eps = k_sigma * sigma
    return {"N": N, "k_sigma": k_sigma, "sigma": sigma, "sigma_reading": reading,
            "epsilon": eps, "m0": m0_hoeffding(N, eps, delta)}


def mean_coverage(pmf: DetectorPmf, table: np.ndarray, shots: int, trials: int, epsilon: float,
                  seed: int) -> CoverageResult:
    """Coverage of the empirical mean of one observable (the Hoeffding setting)."""
    table = np.asarray(table, dtype=float)[: pmf.table.shape[0], : pmf.table.shape[1]]
    target = float((pmf.table * table).sum())
    values = [simulate_shots(pmf, shots, rng=make_rng(ss)).mean(table) for ss in spawn_seeds(seed, trials)]
    return CoverageResult(epsilon, int(shots), target, np.array(values), seed)
