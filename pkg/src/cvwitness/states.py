"""Constructors for the entangled state families and the coherent reference.

Every constructor picks its own Fock cutoff: it builds the state on a
generous cutoff, then trims to the smallest ``D`` whose moment-weighted
tail ``Σ_{n≥D} (1+n)^g P(n)`` is below the tail bound.  The chosen cutoff
and the truncation rule are recorded in ``state.metadata``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import CutoffError, UnsupportedError
from .fock import (DEFAULT_GUARD_ORDER, DEFAULT_TAIL_BOUND, TruncatedState,
                   trim_cutoff)
from .gaussian import Beamsplit, Rotate, Squeeze, apply_gaussian_op

MAX_CUTOFF = 600
BUILD_DEFECT = 1e-13


@dataclass(frozen=True)
class TMSV:
    """Two-mode squeezed vacuum ``√(1−λ²) Σ λⁿ |n, n⟩``, optionally displaced."""

    lam: float
    displacement: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not -1.0 < self.lam < 1.0:
            raise ValueError(f"TMSV needs λ in (-1, 1), got {self.lam}")


@dataclass(frozen=True)
class Cat:
    """``N(α, β)(|α, β⟩ + e^{iθ}|−α, −β⟩)``; ``θ = π`` is the odd cat."""

    alpha: complex
    beta: complex
    theta: float = math.pi
    dephasing: float = 0.0

    def __post_init__(self):
        _check_p(self.dephasing)
        if abs(self.alpha) == 0 and abs(self.beta) == 0 and math.cos(self.theta) == -1:
            raise ValueError("odd cat with α = β = 0 is not normalisable")

    @property
    def delta(self) -> float:
        """``Δ = 2(|α|² + |β|²)``."""
        return 2.0 * (abs(self.alpha) ** 2 + abs(self.beta) ** 2)

    def normalization(self, p: float | None = None) -> float:
        """``N(α, β, p) = [2 + 2(1−p) cos θ e^{−Δ}]^{−1/2}``."""
        p = self.dephasing if p is None else p
        return (2.0 + 2.0 * (1.0 - p) * math.cos(self.theta) * math.exp(-self.delta)) ** -0.5


@dataclass(frozen=True)
class NOON:
    """``α|N, 0⟩ + β|0, N⟩`` with ``|α|² + |β|² = 1``."""

    N: int
    alpha: complex
    beta: complex | None = None
    dephasing: float = 0.0

    def __post_init__(self):
        _check_p(self.dephasing)
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"NOON needs an integer N ≥ 1, got {self.N}")
        if self.beta is None:
            if abs(self.alpha) > 1:
                raise ValueError("|α| must not exceed 1")
            object.__setattr__(self, "beta", math.sqrt(max(0.0, 1.0 - abs(self.alpha) ** 2)))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"NOON amplitudes must satisfy |α|²+|β|²=1 (got {norm!r})")


@dataclass(frozen=True)
class CoherentProduct:
    """Product coherent state ``|γ, δ⟩``; the default reference state."""

    gamma: complex
    delta: complex


@dataclass(frozen=True)
class PMTransform:
    """Rotation and squeezing of the non-local pair ``(r₊, s₋)``.

    ``phi`` rotates the ``(r₊, s₋)`` plane.  ``xi ≥ 1`` rescales
    ``r± → ξ r±`` and ``s∓ → s∓/ξ`` when ``squeeze_axis == "r"``, or the
    inverse when ``squeeze_axis == "s"``.
    """

    phi: float = 0.0
    xi: float = 1.0
    squeeze_axis: str = "r"

    def __post_init__(self):
        if self.xi < 1.0:
            raise ValueError("squeeze factor ξ must be ≥ 1")
        if self.squeeze_axis not in ("r", "s"):
            raise ValueError("squeeze_axis must be 'r' or 's'")

    def is_identity(self) -> bool:
        return self.phi % (2 * math.pi) == 0 and self.xi == 1.0


@dataclass(frozen=True)
class HermiteGaussian:
    """First-order Hermite–Gaussian two-mode wavefunction with widths ``σ±``."""

    sigma_plus: float
    sigma_minus: float
    transform: PMTransform = field(default_factory=PMTransform)

    def __post_init__(self):
        if self.sigma_plus <= 0 or self.sigma_minus <= 0:
            raise ValueError("σ₊ and σ₋ must be positive")


StateFamily = Union[TMSV, Cat, NOON, CoherentProduct, HermiteGaussian]


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing p must lie in [0, 1], got {p}")


def coherent_amplitudes(gamma: complex, cutoff: int) -> np.ndarray:
    """Fock amplitudes ``e^{−|γ|²/2} γⁿ/√n!`` for ``n ≤ cutoff``."""
    out = np.empty(cutoff + 1, dtype=complex)
    out[0] = math.exp(-abs(gamma) ** 2 / 2)
    for n in range(1, cutoff + 1):
        out[n] = out[n - 1] * gamma / math.sqrt(n)
    return out


def _normalized(psi: np.ndarray) -> np.ndarray:
    return psi / np.linalg.norm(psi)


def _auto_cutoff(builder: Callable[[int], TruncatedState], start: int, tail_bound: float,
                 guard_order: int, max_cutoff: int) -> TruncatedState:
    cutoff = max(int(start), 4)
    while True:
        try:
            state = builder(cutoff)
            if state.metadata.get("norm_defect", 0.0) > BUILD_DEFECT:
                raise CutoffError("intermediate truncation lost too much norm")
            return trim_cutoff(state, tail_bound, guard_order)
        except CutoffError:
            if cutoff >= max_cutoff:
                raise
            cutoff = min(max_cutoff, int(cutoff * 1.5) + 1)


def _mean_guess(nbar: float) -> int:
    return int(6 * nbar + 12 * math.sqrt(nbar + 1) + 10)


def build(family: StateFamily, tail_bound: float = DEFAULT_TAIL_BOUND,
          guard_order: int = DEFAULT_GUARD_ORDER, max_cutoff: int = MAX_CUTOFF) -> TruncatedState:
    """Construct a family member in the Fock basis with an automatic cutoff."""
    kw = dict(tail_bound=tail_bound, guard_order=guard_order, max_cutoff=max_cutoff)
    if isinstance(family, (NOON, Cat)) and family.dephasing > 0:
        return apply_dephasing(family, family.dephasing, **kw)
    if isinstance(family, TMSV):
        state = _build_tmsv(family, **kw)
    elif isinstance(family, CoherentProduct):
        state = _build_coherent(family, **kw)
    elif isinstance(family, Cat):
        state = apply_dephasing(family, 0.0, **kw)
    elif isinstance(family, NOON):
        state = apply_dephasing(family, 0.0, **kw)
    elif isinstance(family, HermiteGaussian):
        state = _build_hermite_gaussian(family, **kw)
    else:
        raise TypeError(f"unknown state family {family!r}")
    return state


def _tag(state: TruncatedState, family) -> TruncatedState:
    return state.replace_metadata(family=type(family).__name__, params=_params(family))


def _params(family) -> dict:
    out = {}
    for name, value in vars(family).items():
        if isinstance(value, PMTransform):
            value = {"phi": value.phi, "xi": value.xi, "squeeze_axis": value.squeeze_axis}
        elif isinstance(value, complex):
            value = [value.real, value.imag]
        elif isinstance(value, tuple):
            value = [[complex(v).real, complex(v).imag] for v in value]
        out[name] = value
    return out


def _build_coherent(family: CoherentProduct, tail_bound, guard_order, max_cutoff) -> TruncatedState:
    def builder(cutoff):
        psi = np.outer(coherent_amplitudes(family.gamma, cutoff), coherent_amplitudes(family.delta, cutoff))
        return TruncatedState.pure(_normalized(psi), tail_bound=tail_bound)

    nbar = max(abs(family.gamma), abs(family.delta)) ** 2
    state = _auto_cutoff(builder, _mean_guess(nbar), tail_bound, guard_order, max_cutoff)
    return _tag(state, family)


def _build_tmsv(family: TMSV, tail_bound, guard_order, max_cutoff) -> TruncatedState:
    lam = family.lam
    da, db = (complex(x) for x in family.displacement)

    def builder(cutoff):
        psi = np.diag(lam ** np.arange(cutoff + 1)).astype(complex)
        state = TruncatedState.pure(_normalized(psi), tail_bound=tail_bound)
        from .gaussian import Displace

        if da != 0:
            state = apply_gaussian_op(state, Displace("a", da), check_tail=False)
        if db != 0:
            state = apply_gaussian_op(state, Displace("b", db), check_tail=False)
        return state

    nbar = lam**2 / (1 - lam**2) + max(abs(da), abs(db)) ** 2
    start = max(_mean_guess(nbar), int(math.log(1e-18) / (2 * math.log(abs(lam)))) if lam else 4)
    state = _auto_cutoff(builder, start, tail_bound, guard_order, max_cutoff)
    return _tag(state, family)


def _build_hermite_gaussian(family: HermiteGaussian, tail_bound, guard_order, max_cutoff) -> TruncatedState:
    r_plus = -math.log(family.sigma_plus)
    r_minus = -math.log(family.sigma_minus)
    tr = family.transform

    def builder(cutoff):
        psi = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        psi[1, 0] = 1.0
        state = TruncatedState.pure(psi, tail_bound=tail_bound)
        ops = [Squeeze("a", r_plus), Squeeze("b", r_minus),
               # a = (a₊ + a₋)/√2, b = (a₊ − a₋)/√2
               Beamsplit(0.5, math.pi), Rotate("b", math.pi)]
        if tr.phi:
            # a → e^{iφ} a, b → e^{−iφ} b rotates the (r₊, s₋) plane by φ
            ops += [Rotate("a", -tr.phi), Rotate("b", tr.phi)]
        if tr.xi != 1.0:
            r = -math.log(tr.xi) if tr.squeeze_axis == "r" else math.log(tr.xi)
            ops += [Squeeze("a", r), Squeeze("b", r)]
        for op in ops:
            state = apply_gaussian_op(state, op, check_tail=False)
        return state

    spread = max(abs(r_plus), abs(r_minus)) + abs(math.log(tr.xi))
    nbar = 3 * math.sinh(spread) ** 2 + 1.5
    state = _auto_cutoff(builder, _mean_guess(nbar), tail_bound, guard_order, max_cutoff)
    return _tag(state, family)


def apply_dephasing(family: StateFamily, p: float, tail_bound: float = DEFAULT_TAIL_BOUND,
                    guard_order: int = DEFAULT_GUARD_ORDER, max_cutoff: int = MAX_CUTOFF) -> TruncatedState:
    """Scale the coherence terms of a NOON or cat state by ``1 − p``.

    The result is stored as a rank-2 mixture: for NOON,
    ``(1 − p/2)|ψ₊⟩⟨ψ₊| + (p/2)|ψ₋⟩⟨ψ₋|`` with ``ψ± = α|N,0⟩ ± β|0,N⟩``;
    for cats, the analogous split over ``|α,β⟩ ± e^{iθ}|−α,−β⟩``.
    """
    _check_p(p)
    if isinstance(family, NOON):
        state = _noon_mixture(family, p)
    elif isinstance(family, Cat):
        state = _cat_mixture(family, p, tail_bound, guard_order, max_cutoff)
    else:
        raise UnsupportedError(f"dephasing is defined for NOON and cat states, not {type(family).__name__}")
    state = _tag(state, family)
    return state.replace_metadata(dephasing=p)


def _noon_mixture(family: NOON, p: float) -> TruncatedState:
    N = int(family.N)
    comps = []
    for sign, weight in ((1.0, 1.0 - p / 2), (-1.0, p / 2)):
        if weight == 0.0:
            continue
        psi = np.zeros((N + 1, N + 1), dtype=complex)
        psi[N, 0] += family.alpha
        psi[0, N] += sign * family.beta
        comps.append((weight, psi))
    return TruncatedState(N, tuple(comps), exact_support=True, metadata={"cutoff": N})


def _cat_mixture(family: Cat, p: float, tail_bound, guard_order, max_cutoff) -> TruncatedState:
    c = 1.0 - p
    overlap = math.cos(family.theta) * math.exp(-family.delta)
    raw = {1.0: (1 + c) * (1 + overlap), -1.0: (1 - c) * (1 - overlap)}
    total = sum(raw.values())
    phase = np.exp(1j * family.theta)

    def builder(cutoff):
        plus = np.outer(coherent_amplitudes(family.alpha, cutoff), coherent_amplitudes(family.beta, cutoff))
        minus = np.outer(coherent_amplitudes(-family.alpha, cutoff), coherent_amplitudes(-family.beta, cutoff))
        comps = []
        for sign, w in raw.items():
            if w / total < 1e-15:
                continue
            vec = plus + sign * phase * minus
            comps.append((w / total, _normalized(vec)))
        return TruncatedState(cutoff, tuple(comps), tail_bound=tail_bound)

    nbar = max(abs(family.alpha), abs(family.beta)) ** 2
    state = _auto_cutoff(builder, _mean_guess(nbar), tail_bound, guard_order, max_cutoff)
    return state.replace_metadata(normalization=family.normalization(p))


def pm_symplectic(transform: PMTransform) -> np.ndarray:
    """Heisenberg map of ``transform`` on ``(x1, p1, x2, p2)``."""
    c, s = math.cos(transform.phi), math.sin(transform.phi)
    # x1 → c x1 − s p1, p1 → s x1 + c p1 ; x2 → c x2 + s p2, p2 → −s x2 + c p2
    rot = np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, c, s], [0, 0, -s, c]])
    k = transform.xi if transform.squeeze_axis == "r" else 1.0 / transform.xi
    sq = np.diag([k, 1 / k, k, 1 / k])
    return sq @ rot


def covariance_matrix(family: HermiteGaussian) -> np.ndarray:
    """Wigner covariance of ``(x1, p1, x2, p2)`` for a Hermite–Gaussian state."""
    if not isinstance(family, HermiteGaussian):
        raise UnsupportedError("covariance_matrix is defined for Hermite–Gaussian states")
    sp2, sm2 = family.sigma_plus**2, family.sigma_minus**2
    # (X₊, P₊, X₋, P₋): squeezed single photon ⊗ squeezed vacuum
    cov_pm = np.diag([1.5 * sp2, 1.5 / sp2, 0.5 * sm2, 0.5 / sm2])
    h = 1 / math.sqrt(2)
    to_local = np.array([[h, 0, h, 0], [0, h, 0, h], [h, 0, -h, 0], [0, h, 0, -h]])
    cov = to_local @ cov_pm @ to_local.T
    s = pm_symplectic(family.transform)
    return s @ cov @ s.T
