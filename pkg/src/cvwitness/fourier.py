"""Moment products from phase-scanned photon-number correlators.

``⟨(c₁†c₁)^{m'}(d₁†d₁)^{n'}⟩(φ, φ')`` is a trigonometric polynomial of degree
``(m', n')``.  Its coefficient at ``e^{i(m'φ + n'φ')}`` is
``2^{-(m'+n')} ⟨a₁^{m'} b₁^{n'}⟩₁ ⟨a₂†^{m'} b₂†^{n'}⟩₂`` and the one at
``e^{i(m'φ − n'φ')}`` is ``2^{-(m'+n')} ⟨a₁^{m'} b₁†^{n'}⟩₁ ⟨a₂†^{m'} b₂^{n'}⟩₂``.
Sampling on a ``(2m'+1) × (2n'+1)`` grid recovers both exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError
from .fock import TruncatedState
from .interferometer import DetectorPmf, PhasePair, apply_loss, correlator, interfere

ALIAS_TOL = 1e-9


@dataclass(frozen=True)
class CorrelatorGrid:
    """Correlator values at ``φ_u = 2πu/U``, ``φ'_v = 2πv/V``."""

    m_prime: int
    n_prime: int
    grid: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        if grid.ndim != 2:
            raise ValueError("correlator grid must be 2-D")
        u, v = grid.shape
        if u < 2 * self.m_prime + 1 or v < 2 * self.n_prime + 1:
            raise ValueError(f"grid {grid.shape} is below the Nyquist minimum "
                             f"({2 * self.m_prime + 1}, {2 * self.n_prime + 1})")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    @property
    def order(self) -> int:
        return self.m_prime + self.n_prime


def plan_grid(m_prime: int, n_prime: int, oversample: int = 1) -> tuple[int, int]:
    """Grid size ``(U, V)``; the minimum is ``(2m'+1, 2n'+1)``."""
    if m_prime < 0 or n_prime < 0 or m_prime + n_prime == 0:
        raise ValueError("need m', n' ≥ 0 and not both zero")
    if oversample < 1:
        raise ValueError("oversample must be ≥ 1")
    return (oversample * (2 * m_prime + 1) if m_prime else 1,
            oversample * (2 * n_prime + 1) if n_prime else 1)


def grid_phases(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    u, v = shape
    return 2 * np.pi * np.arange(u) / u, 2 * np.pi * np.arange(v) / v


def grid_pmfs(state1: TruncatedState, state2: TruncatedState, shape: tuple[int, int],
              eta: float | tuple = 1.0) -> list[list[DetectorPmf]]:
    """Detector pmfs at every grid point, optionally after loss ``η``."""
    eta_c, eta_d = (eta, eta) if np.isscalar(eta) else eta
    phis, phis_prime = grid_phases(shape)
    rows = []
    for phi in phis:
        row = []
        for phi_p in phis_prime:
            pmf = interfere(state1, state2, PhasePair(phi, phi_p))
            if eta_c != 1.0 or eta_d != 1.0:
                pmf = apply_loss(pmf, eta_c, eta_d)
            row.append(pmf)
        rows.append(row)
    return rows


def sample_correlator_grid(state1: TruncatedState, state2: TruncatedState, m_prime: int,
                           n_prime: int, oversample: int = 1, eta: float | tuple = 1.0) -> CorrelatorGrid:
    """Noiseless correlators on the planned phase grid."""
    shape = plan_grid(m_prime, n_prime, oversample)
    pmfs = grid_pmfs(state1, state2, shape, eta)
    grid = np.array([[correlator(p, m_prime, n_prime) for p in row] for row in pmfs])
    return CorrelatorGrid(m_prime, n_prime, grid, {"eta": eta, "oversample": oversample})


def spectrum(grid: CorrelatorGrid) -> np.ndarray:
    """Fourier coefficients ``c[j, k]`` of ``e^{i(jφ + kφ')}`` (indices mod U, V).

    Debug view: coefficients other than the top ones mix many moments.
    """
    u, v = grid.shape
    return np.fft.fft2(grid.grid) / (u * v)


def extract_top_coefficients(grid: CorrelatorGrid, check_aliasing: bool = True) -> dict:
    """Top-frequency moment products with the ``2^{-(m'+n')}`` prefactor undone.

    Returns
    -------
    dict
        ``{"plus": C₊, "minus": C₋}`` with
        ``C₊ = ⟨a₁^{m'}b₁^{n'}⟩₁⟨a₂†^{m'}b₂†^{n'}⟩₂`` and
        ``C₋ = ⟨a₁^{m'}b₁†^{n'}⟩₁⟨a₂†^{m'}b₂^{n'}⟩₂``.

    Raises
    ------
    AliasingError
        On an oversampled grid, if power beyond ``(m', n')`` exceeds 1e-9
        relative to the grid scale.
    """
    m, n = grid.m_prime, grid.n_prime
    u, v = grid.shape
    coeffs = spectrum(grid)
    if check_aliasing:
        ju = np.minimum(np.arange(u), u - np.arange(u))
        kv = np.minimum(np.arange(v), v - np.arange(v))
        outside = (ju[:, None] > m) | (kv[None, :] > n)
        if outside.any():
            scale = max(1.0, float(np.abs(grid.grid).max()))
            resid = float(np.abs(coeffs[outside]).max())
            if resid > ALIAS_TOL * scale:
                raise AliasingError(f"residual spectral power {resid:.2e} beyond ({m}, {n})")
    factor = 2.0 ** (m + n)
    plus = complex(coeffs[m % u, n % v]) * factor
    minus = complex(coeffs[m % u, (-n) % v]) * factor
    return {"plus": plus, "minus": minus}


def cross_term_weights(shape: tuple[int, int], m_prime: int, n_prime: int,
                       sign: int) -> np.ndarray:
    """Weights ``w_uv`` with ``Re C = Σ w_uv · grid[u, v]``."""
    phis, phis_prime = grid_phases(shape)
    u, v = shape
    theta = m_prime * phis[:, None] + sign * n_prime * phis_prime[None, :]
    return (2.0 ** (m_prime + n_prime)) * np.cos(theta) / (u * v)
