"""Two balanced beamsplitters with variable phases and PNR detection.

The apparatus maps ``c₁ = (a₁ e^{iφ} + a₂)/√2`` and
``d₁ = (b₁ e^{iφ'} + b₂)/√2`` (the second outputs carry a minus sign) and
counts photons in ``c₁`` and ``d₁``.  The four-mode output is evaluated one
photon-number sector ``(N_a, N_b)`` at a time, so only ``(D+1)×(D+1)``
blocks are ever held in memory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .fock import TruncatedState, photon_pmf
from .gaussian import passive_sector_maps

TWO_PI = 2.0 * math.pi
PMF_TOL = 1e-10

# 50:50 splitter, outputs (c₁, c₂) = U0 @ (a₁ e^{iφ}, a₂)
_U0 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
_U0_KEY = tuple(np.round(_U0.astype(complex).ravel(), 15))


@dataclass(frozen=True)
class PhasePair:
    """Interferometer phases ``(φ, φ')``, stored reduced mod 2π."""

    phi: float
    phi_prime: float

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "phi_prime", float(self.phi_prime) % TWO_PI)


@dataclass(frozen=True)
class DetectorPmf:
    """Joint distribution ``table[j, k]`` of counts at detectors D_c and D_d."""

    table: np.ndarray
    phases: PhasePair | None = None
    eta: tuple = (1.0, 1.0)
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=float)
        if table.ndim != 2:
            raise ValueError("detector pmf must be a 2-D table")
        if table.min() < -PMF_TOL:
            raise ValueError("detector pmf has negative entries")
        total = table.sum()
        if abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"detector pmf sums to {total!r}")
        table = np.clip(table, 0.0, None)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        return self.table.sum(axis=1), self.table.sum(axis=0)


def _sector_blocks(state1: TruncatedState, state2: TruncatedState, phases: PhasePair):
    """Yield ``(weight, N_a, N_b, block)`` with ``block[c₁, d₁]`` the output amplitudes."""
    d1, d2 = state1.cutoff, state2.cutoff
    maps = passive_sector_maps(_U0_KEY, d1, d2)
    ph_a = np.exp(1j * phases.phi * np.arange(d1 + 1))
    ph_b = np.exp(1j * phases.phi_prime * np.arange(d1 + 1))
    for w1, psi1 in state1.components:
        shifted = psi1 * ph_a[:, None] * ph_b[None, :]
        for w2, psi2 in state2.components:
            weight = w1 * w2
            if weight == 0.0:
                continue
            # flipped psi2 so that psi2[Na - j, Nb - k] is a contiguous slice
            flip2 = psi2[::-1, ::-1]
            for n_a, (ja, ta) in enumerate(maps):
                na_cols = ta.shape[1]
                rows1 = shifted[ja:ja + na_cols]
                # row j of psi2 needed at index Na - j
                a_lo = d2 - (n_a - ja)
                rows2 = flip2[a_lo:a_lo + na_cols]
                for n_b, (jb, tb) in enumerate(maps):
                    nb_cols = tb.shape[1]
                    b_lo = d2 - (n_b - jb)
                    block = rows1[:, jb:jb + nb_cols] * rows2[:, b_lo:b_lo + nb_cols]
                    if not block.any():
                        continue
                    yield weight, n_a, n_b, ta @ block @ tb.T


def interfere(state1: TruncatedState, state2: TruncatedState, phases: PhasePair) -> DetectorPmf:
    """Detection statistics at ``c₁`` and ``d₁`` for input ``ρ₁ ⊗ ρ₂``.

    Modes ``c₂`` and ``d₂`` are traced out.  Inputs may have different
    cutoffs; the output table covers ``0 .. D₁ + D₂`` per detector.
    """
    if not isinstance(phases, PhasePair):
        phases = PhasePair(*phases)
    size = state1.cutoff + state2.cutoff + 1
    table = np.zeros((size, size))
    for weight, n_a, n_b, out in _sector_blocks(state1, state2, phases):
        table[: n_a + 1, : n_b + 1] += weight * np.abs(out) ** 2
    meta = {"cutoffs": (state1.cutoff, state2.cutoff)}
    return DetectorPmf(table, phases, (1.0, 1.0), meta)


def output_number_distribution(state1: TruncatedState, state2: TruncatedState,
                               phases: PhasePair) -> np.ndarray:
    """Distribution of the total photon number over all four output modes."""
    if not isinstance(phases, PhasePair):
        phases = PhasePair(*phases)
    out = np.zeros(2 * (state1.cutoff + state2.cutoff) + 1)
    for weight, n_a, n_b, block in _sector_blocks(state1, state2, phases):
        out[n_a + n_b] += weight * float(np.vdot(block, block).real)
    return out


def input_number_distribution(state1: TruncatedState, state2: TruncatedState) -> np.ndarray:
    """Distribution of the total photon number of ``ρ₁ ⊗ ρ₂``."""
    def total(state):
        pmf = photon_pmf(state)
        dist = np.zeros(2 * state.cutoff + 1)
        for j in range(state.dim):
            dist[j:j + state.dim] += pmf[j]
        return dist

    return np.convolve(total(state1), total(state2))


def correlator(pmf: DetectorPmf, m_prime: int, n_prime: int) -> float:
    """``⟨(c₁†c₁)^{m'} (d₁†d₁)^{n'}⟩ = Σ j^{m'} k^{n'} P(j, k)``."""
    if m_prime < 0 or n_prime < 0 or m_prime + n_prime < 1:
        raise ValueError("correlator orders must be non-negative with m' + n' ≥ 1")
    j = np.arange(pmf.table.shape[0], dtype=float) ** m_prime
    k = np.arange(pmf.table.shape[1], dtype=float) ** n_prime
    return float(j @ pmf.table @ k)


def thinning_matrix(size: int, eta: float) -> np.ndarray:
    """``B[j', j] = Bin(j'; j, η)`` for ``j, j' < size``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"efficiency must lie in [0, 1], got {eta}")
    n = np.arange(size)
    return binom.pmf(n[:, None], n[None, :], eta)


def apply_loss(pmf: DetectorPmf, eta_c: float, eta_d: float | None = None) -> DetectorPmf:
    """Binomial thinning of each detector margin (vacuum ancillas, no dark counts)."""
    eta_d = eta_c if eta_d is None else eta_d
    bc = thinning_matrix(pmf.table.shape[0], eta_c)
    bd = thinning_matrix(pmf.table.shape[1], eta_d)
    table = bc @ pmf.table @ bd.T
    eta = (pmf.eta[0] * eta_c, pmf.eta[1] * eta_d)
    return DetectorPmf(table, pmf.phases, eta, dict(pmf.metadata))


def local_pmf(state: TruncatedState, eta: float = 1.0) -> DetectorPmf:
    """Photon counts of a state measured without interference."""
    out = DetectorPmf(photon_pmf(state))
    return out if eta == 1.0 else apply_loss(out, eta, eta)
