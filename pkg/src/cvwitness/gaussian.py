"""Gaussian unitaries on truncated two-mode states.

Single-mode squeezing and displacement are built as matrix exponentials of
the truncated generator on an enlarged working space, then projected back to
the output cutoff.  Passive two-mode operations (beamsplitters) are applied
exactly, sector by sector in total photon number, by pushing creation
operators through the mode transformation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm, schur

from .errors import CutoffError
from .fock import TruncatedState

RENORM_TOL = 1e-8
DEFECT_LIMIT = 1e-6

_MODES = {"a": 0, "b": 1, 0: 0, 1: 1}


def _mode_axis(mode) -> int:
    try:
        return _MODES[mode]
    except KeyError:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}") from None


@dataclass(frozen=True)
class Squeeze:
    """``S(ξ) = exp(½(ξ* a² − ξ a†²))``; real ``ξ > 0`` squeezes ``x`` by ``e^{-ξ}``."""

    mode: str
    xi: complex


@dataclass(frozen=True)
class Rotate:
    """``exp(−iθ a†a)``: the Fock amplitude of ``|n⟩`` picks up ``e^{−inθ}``."""

    mode: str
    theta: float


@dataclass(frozen=True)
class Displace:
    """``D(α) = exp(α a† − α* a)``."""

    mode: str
    alpha: complex


@dataclass(frozen=True)
class Beamsplit:
    """Passive mixing of modes a and b.

    Output operators are ``u @ (a, b)`` with
    ``u = [[√t, −e^{−iφ}√(1−t)], [e^{iφ}√(1−t), √t]]``.
    """

    transmissivity: float
    phase: float = 0.0

    def matrix(self) -> np.ndarray:
        t = self.transmissivity
        if not 0.0 <= t <= 1.0:
            raise ValueError("transmissivity must lie in [0, 1]")
        r = math.sqrt(1.0 - t)
        e = np.exp(1j * self.phase)
        return np.array([[math.sqrt(t), -np.conj(e) * r], [e * r, math.sqrt(t)]], dtype=complex)


GaussianOp = Union[Squeeze, Rotate, Displace, Beamsplit]


def _annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


@lru_cache(maxsize=128)
def _single_mode_unitary(kind: str, param: complex, dim: int) -> np.ndarray:
    a = _annihilation(dim)
    ad = a.conj().T
    if kind == "squeeze":
        gen = 0.5 * (np.conj(param) * a @ a - param * ad @ ad)
    elif kind == "displace":
        gen = param * ad - np.conj(param) * a
    else:  # pragma: no cover - guarded by caller
        raise ValueError(kind)
    u = expm(gen)
    u.setflags(write=False)
    return u


def _resize(psi: np.ndarray, rows: int, cols: int) -> np.ndarray:
    out = np.zeros((rows, cols), dtype=complex)
    r, c = min(rows, psi.shape[0]), min(cols, psi.shape[1])
    out[:r, :c] = psi[:r, :c]
    return out


def _generator(u: np.ndarray) -> np.ndarray:
    """Hermitian ``G`` with ``u = exp(iG)`` (Schur form, so exact for unitary ``u``)."""
    t, z = schur(u, output="complex")
    return z @ np.diag(np.angle(np.diag(t))) @ z.conj().T


@lru_cache(maxsize=8)
def passive_sector_maps(u_key: tuple, cut1: int, cut2: int) -> tuple:
    """Fock representation of a two-mode passive transformation.

    For every total photon number ``N ≤ cut1 + cut2`` returns
    ``(j_lo, T_N)`` where column ``i`` of ``T_N`` is the image of the input
    ``|j_lo + i, N − j_lo − i⟩`` expanded over outputs ``|c, N − c⟩``
    (row ``c``).  ``u_key`` is the flattened 2×2 unitary with output
    operators ``u @ input operators``.

    Each sector is ``exp(i Ĝ_N)`` with ``Ĝ_N`` the tridiagonal restriction
    of ``Σ G_ij c_i† c_j``; diagonalising it keeps ``T_N`` unitary to
    rounding at any ``N``, unlike a ladder recursion.
    """
    u = np.array(u_key, dtype=complex).reshape(2, 2)
    g = _generator(u)
    g01 = g[0, 1]
    phase = np.exp(1j * np.angle(g01)) if abs(g01) > 0 else 1.0
    sectors = []
    for total in range(cut1 + cut2 + 1):
        c = np.arange(total + 1)
        diag = g[0, 0].real * c + g[1, 1].real * (total - c)
        off = abs(g01) * np.sqrt((c[:-1] + 1.0) * (total - c[:-1]))
        if total == 0:
            full = np.ones((1, 1), dtype=complex)
        else:
            w, v = eigh_tridiagonal(diag, off)
            # undo the diagonal gauge that made the off-diagonal real
            d = phase ** c
            full = (d[:, None] * v) @ (np.exp(1j * w)[:, None] * v.T) * np.conj(d)[None, :]
        j_lo = max(0, total - cut2)
        j_hi = min(total, cut1)
        mat = np.ascontiguousarray(full[:, j_lo:j_hi + 1])
        mat.setflags(write=False)
        sectors.append((j_lo, mat))
    return tuple(sectors)


def apply_passive(psi: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Exact image of a two-mode amplitude array; output cutoff is ``D1 + D2``."""
    cut1, cut2 = psi.shape[0] - 1, psi.shape[1] - 1
    key = tuple(np.round(np.asarray(u, dtype=complex).ravel(), 15))
    sectors = passive_sector_maps(key, cut1, cut2)
    out_cut = cut1 + cut2
    out = np.zeros((out_cut + 1, out_cut + 1), dtype=complex)
    for total, (j_lo, mat) in enumerate(sectors):
        j = np.arange(j_lo, j_lo + mat.shape[1])
        vec = psi[j, total - j]
        if not np.any(vec):
            continue
        image = mat @ vec
        c = np.arange(total + 1)
        out[c, total - c] += image
    return out


def _apply_component(psi: np.ndarray, op: GaussianOp, cutoff: int, work: int) -> tuple[np.ndarray, float]:
    dim = cutoff + 1
    if isinstance(op, Rotate):
        axis = _mode_axis(op.mode)
        phase = np.exp(-1j * op.theta * np.arange(psi.shape[axis]))
        out = psi * (phase[:, None] if axis == 0 else phase[None, :])
        full = out
    elif isinstance(op, (Squeeze, Displace)):
        axis = _mode_axis(op.mode)
        kind = "squeeze" if isinstance(op, Squeeze) else "displace"
        param = complex(op.xi if kind == "squeeze" else op.alpha)
        u = _single_mode_unitary(kind, param, work + 1)
        if axis == 0:
            full = u @ _resize(psi, work + 1, psi.shape[1])
        else:
            full = _resize(psi, psi.shape[0], work + 1) @ u.T
    elif isinstance(op, Beamsplit):
        full = apply_passive(psi, op.matrix())
    else:
        raise TypeError(f"unknown Gaussian operation {op!r}")
    out = _resize(full, dim, dim)
    kept = float(np.vdot(out, out).real)
    return out, 1.0 - kept


def apply_gaussian_op(state: TruncatedState, op: GaussianOp, cutoff: int | None = None,
                      check_tail: bool = True) -> TruncatedState:
    """Apply a Gaussian unitary to every mixture component.

    The output is truncated to ``cutoff`` (default: the input cutoff) and
    renormalised; the largest norm defect is recorded in
    ``metadata["norm_defect"]``.

    Raises
    ------
    CutoffError
        If the discarded norm exceeds 1e-6, or the output tail mass exceeds
        the state's bound.
    """
    cutoff = state.cutoff if cutoff is None else cutoff
    work = max(2 * cutoff, state.cutoff) + 20
    comps = []
    worst = 0.0
    for w, psi in state.components:
        out, defect = _apply_component(psi, op, cutoff, work)
        if defect > DEFECT_LIMIT:
            raise CutoffError(f"norm defect {defect:.2e} after {op!r} at cutoff {cutoff}")
        worst = max(worst, defect)
        out /= math.sqrt(1.0 - defect)
        comps.append((w, out))
    meta = dict(state.metadata)
    meta["norm_defect"] = max(worst, meta.get("norm_defect", 0.0))
    if worst > RENORM_TOL:
        meta["renormalized"] = True
    exact = state.exact_support and worst <= 1e-12 and isinstance(op, (Rotate, Beamsplit))
    result = TruncatedState(cutoff, tuple(comps), exact_support=exact,
                            tail_bound=state.tail_bound, metadata=meta)
    if check_tail:
        result.check_tail()
    return result
