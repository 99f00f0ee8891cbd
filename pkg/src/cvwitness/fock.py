"""Two-mode bosonic states in a truncated Fock basis.

A state is a finite mixture of pure two-mode vectors.  Each pure component
is stored as a ``(D+1, D+1)`` complex array ``psi[j, k]`` holding the
amplitude of ``|j⟩_a ⊗ |k⟩_b``; flattening it row-major gives the
``(D+1)²`` vector indexed by the Fock pair.

Moments are evaluated as ``⟨a^n b^k ψ | a^m b^l ψ⟩``, so only lowering
operators are ever applied and no amplitude leaves the truncated space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CutoffError

WEIGHT_TOL = 1e-12
NORM_TOL = 1e-10
DEFAULT_TAIL_BOUND = 1e-10
DEFAULT_GUARD_ORDER = 6


@dataclass(frozen=True)
class ModeMonomial:
    """Exponents of the normal-ordered operator ``a†^n a^m b†^k b^l``."""

    n: int
    m: int
    k: int
    l: int

    def __post_init__(self):
        for name in ("n", "m", "k", "l"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 0:
                raise ValueError(f"exponent {name} must be a non-negative integer, got {value!r}")

    @property
    def order(self) -> int:
        return self.n + self.m + self.k + self.l

    def adjoint(self) -> "ModeMonomial":
        return ModeMonomial(self.m, self.n, self.l, self.k)

    def is_diagonal(self) -> bool:
        return self.n == self.m and self.k == self.l


@dataclass(frozen=True)
class TruncatedState:
    """Mixture ``Σ_i w_i |ψ_i⟩⟨ψ_i|`` over a Fock cutoff ``D`` per mode.

    Parameters
    ----------
    cutoff : int
        Highest photon number kept in each mode.
    components : sequence of (weight, amplitudes)
        ``amplitudes`` may be a ``(D+1, D+1)`` array or a flat vector of
        length ``(D+1)**2``.
    exact_support : bool
        True when the state genuinely lives inside the truncated space (NOON
        states, random finite-dimensional states).  Tail-mass checks are
        skipped for such states.
    tail_bound : float
        Largest tolerated probability of occupying level ``D``.
    """

    cutoff: int
    components: tuple
    exact_support: bool = False
    tail_bound: float = DEFAULT_TAIL_BOUND
    metadata: dict = field(default_factory=dict, compare=False)
    mode_labels: tuple = ("a", "b")

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        dim = self.cutoff + 1
        comps = []
        for weight, amps in self.components:
            arr = np.array(amps, dtype=complex)
            if arr.ndim == 1:
                if arr.size != dim * dim:
                    raise ValueError(f"amplitude vector has length {arr.size}, expected {dim * dim}")
                arr = arr.reshape(dim, dim)
            if arr.shape != (dim, dim):
                raise ValueError(f"amplitude array has shape {arr.shape}, expected {(dim, dim)}")
            norm = np.vdot(arr, arr).real
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"component not normalised (|ψ|² = {norm!r})")
            weight = float(weight)
            if weight < -WEIGHT_TOL:
                raise ValueError("mixture weights must be non-negative")
            arr.setflags(write=False)
            comps.append((max(weight, 0.0), arr))
        if not comps:
            raise ValueError("a state needs at least one component")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"mixture weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def pure(cls, amplitudes, **kwargs) -> "TruncatedState":
        arr = np.asarray(amplitudes, dtype=complex)
        dim = int(round(math.sqrt(arr.size))) if arr.ndim == 1 else arr.shape[0]
        return cls(dim - 1, ((1.0, arr),), **kwargs)

    @classmethod
    def mixture(cls, weighted_states: Iterable[tuple[float, "TruncatedState"]], **kwargs) -> "TruncatedState":
        """Flatten a convex combination of states into one mixture."""
        items = list(weighted_states)
        cutoff = max(s.cutoff for _, s in items)
        comps = []
        for w, s in items:
            s = s.with_cutoff(cutoff)
            comps.extend((w * wi, psi) for wi, psi in s.components)
        exact = all(s.exact_support for _, s in items)
        return cls(cutoff, tuple(comps), exact_support=exact, **kwargs)

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    def is_pure(self) -> bool:
        return len(self.components) == 1

    def tail_mass(self) -> float:
        """Probability that either mode occupies the top level ``D``."""
        total = 0.0
        for w, psi in self.components:
            p = np.abs(psi) ** 2
            total += w * (p[-1, :].sum() + p[:, -1].sum() - p[-1, -1])
        return float(total)

    def check_tail(self, bound: float | None = None) -> None:
        if self.exact_support:
            return
        bound = self.tail_bound if bound is None else bound
        tail = self.tail_mass()
        if tail > bound:
            raise CutoffError(f"tail mass {tail:.3e} at level D={self.cutoff} exceeds {bound:.1e}")

    def with_cutoff(self, cutoff: int, renormalize: bool = True) -> "TruncatedState":
        """Zero-pad (or truncate) every component to a new cutoff."""
        if cutoff == self.cutoff:
            return self
        dim = cutoff + 1
        keep = min(dim, self.dim)
        comps = []
        for w, psi in self.components:
            out = np.zeros((dim, dim), dtype=complex)
            out[:keep, :keep] = psi[:keep, :keep]
            norm = np.linalg.norm(out)
            if norm == 0.0:
                raise CutoffError("truncation removed the entire component")
            if renormalize:
                out /= norm
            comps.append((w, out))
        return TruncatedState(cutoff, tuple(comps), exact_support=self.exact_support,
                              tail_bound=self.tail_bound, metadata=dict(self.metadata))

    def replace_metadata(self, **updates) -> "TruncatedState":
        meta = dict(self.metadata)
        meta.update(updates)
        return TruncatedState(self.cutoff, self.components, exact_support=self.exact_support,
                              tail_bound=self.tail_bound, metadata=meta)

    def density_matrix(self) -> np.ndarray:
        """Dense ``(D+1)² × (D+1)²`` matrix; meant for small test states only."""
        rho = np.zeros((self.dim**2, self.dim**2), dtype=complex)
        for w, psi in self.components:
            v = psi.reshape(-1)
            rho += w * np.outer(v, v.conj())
        return rho


@lru_cache(maxsize=256)
def _lowering_factors(dim: int, power: int) -> np.ndarray:
    """``sqrt(j!/(j-power)!)`` for ``j = power .. dim-1``."""
    j = np.arange(power, dim)
    logs = np.array([0.5 * (math.lgamma(x + 1) - math.lgamma(x - power + 1)) for x in j])
    out = np.exp(logs)
    out.setflags(write=False)
    return out


def lower(psi: np.ndarray, power: int, axis: int) -> np.ndarray:
    """Apply ``a^power`` (axis 0) or ``b^power`` (axis 1) to an amplitude array."""
    if power == 0:
        return psi
    dim = psi.shape[axis]
    out = np.zeros_like(psi)
    if power >= dim:
        return out
    fac = _lowering_factors(dim, power)
    if axis == 0:
        out[: dim - power, :] = fac[:, None] * psi[power:, :]
    else:
        out[:, : dim - power] = psi[:, power:] * fac[None, :]
    return out


def _as_monomial(mono) -> ModeMonomial:
    if isinstance(mono, ModeMonomial):
        return mono
    return ModeMonomial(*mono)


def pure_expectation(psi: np.ndarray, mono: ModeMonomial) -> complex:
    left = lower(lower(psi, mono.n, 0), mono.k, 1)
    right = lower(lower(psi, mono.m, 0), mono.l, 1)
    return complex(np.vdot(left, right))


def expectation(state: TruncatedState, mono: ModeMonomial | Sequence[int], check: bool = True) -> complex:
    """⟨a†^n a^m b†^k b^l⟩ averaged over the mixture.

    Raises
    ------
    CutoffError
        If ``check`` is set and the state's tail mass exceeds its bound.
    """
    mono = _as_monomial(mono)
    if check:
        state.check_tail()
    return sum(w * pure_expectation(psi, mono) for w, psi in state.components)


def photon_pmf(state: TruncatedState) -> np.ndarray:
    """Joint photon-number distribution ``P[j, k]`` of the two modes."""
    pmf = np.zeros((state.dim, state.dim))
    for w, psi in state.components:
        pmf += w * np.abs(psi) ** 2
    return pmf


def partial_transpose_indices(indices: Sequence[int]) -> tuple[int, ...]:
    """Index bookkeeping for the partial transpose ``b → b†``.

    ``⟨… b†^s b^r b†^k b^l⟩^PT = ⟨… b†^l b^k b†^r b^s⟩``.  Accepts the four
    mode-b exponents ``(s, r, k, l)`` or the full eight-tuple
    ``(q, p, n, m, s, r, k, l)``; mode-a exponents are untouched.
    """
    idx = tuple(int(i) for i in indices)
    if len(idx) == 4:
        s, r, k, l = idx
        return (l, k, r, s)
    if len(idx) == 8:
        return idx[:4] + partial_transpose_indices(idx[4:])
    raise ValueError("expected 4 or 8 exponents")


def quadrature_covariance(state: TruncatedState, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Means and symmetrised covariance of ``(x1, p1, x2, p2)``.

    Uses ``a = (x1 + i p1)/√2`` and ``b = (x2 + i p2)/√2``; vacuum has unit
    covariance ``diag(½, ½, ½, ½)``.
    """
    E = lambda *e: expectation(state, e, check=check)  # noqa: E731
    a, b = E(0, 1, 0, 0), E(0, 0, 0, 1)
    aa, ad_a = E(0, 2, 0, 0), E(1, 1, 0, 0)
    bb, bd_b = E(0, 0, 0, 2), E(0, 0, 1, 1)
    ab, ad_b = E(0, 1, 0, 1), E(1, 0, 0, 1)

    # Symmetrised second moments in terms of normally ordered ones.
    mean = np.array([math.sqrt(2) * a.real, math.sqrt(2) * a.imag,
                     math.sqrt(2) * b.real, math.sqrt(2) * b.imag])
    x1x1 = (2 * aa.real + 2 * ad_a.real + 1) / 2
    p1p1 = (-2 * aa.real + 2 * ad_a.real + 1) / 2
    x1p1 = aa.imag
    x2x2 = (2 * bb.real + 2 * bd_b.real + 1) / 2
    p2p2 = (-2 * bb.real + 2 * bd_b.real + 1) / 2
    x2p2 = bb.imag
    # x1 x2 = (a + a†)(b + b†)/2 etc.
    x1x2 = (ab + ad_b).real
    p1p2 = (-ab + ad_b).real
    x1p2 = (ab + ad_b).imag
    p1x2 = (ab - ad_b).imag
    second = np.array([
        [x1x1, x1p1, x1x2, x1p2],
        [x1p1, p1p1, p1x2, p1p2],
        [x1x2, p1x2, x2x2, x2p2],
        [x1p2, p1p2, x2p2, p2p2],
    ])
    return mean, second - np.outer(mean, mean)


def level_tail(pmf_a: np.ndarray, pmf_b: np.ndarray, guard_order: int) -> np.ndarray:
    """``T[D] = Σ_{n ≥ D} (1+n)^g (P_a(n) + P_b(n))`` for every candidate ``D``."""
    n = np.arange(len(pmf_a))
    weighted = (1.0 + n) ** guard_order * (pmf_a + pmf_b)
    return np.cumsum(weighted[::-1])[::-1]


def trim_cutoff(state: TruncatedState, bound: float | None = None,
                guard_order: int = DEFAULT_GUARD_ORDER) -> TruncatedState:
    """Smallest cutoff whose moment-weighted tail stays below ``bound``.

    Raises ``CutoffError`` if even the current cutoff is insufficient.
    """
    bound = state.tail_bound if bound is None else bound
    if state.exact_support:
        meta = dict(state.metadata)
        meta.update(cutoff=state.cutoff, tail_mass=0.0, truncation_rule="exact support")
        return state.replace_metadata(**meta)
    pmf = photon_pmf(state)
    tail = level_tail(pmf.sum(axis=1), pmf.sum(axis=0), guard_order)
    ok = np.nonzero(tail < bound)[0]
    if ok.size == 0 or ok[0] >= state.cutoff:
        raise CutoffError(f"weighted tail {tail[-1]:.3e} at D={state.cutoff} exceeds {bound:.1e}")
    new_cutoff = max(int(ok[0]), 1)
    trimmed = state.with_cutoff(new_cutoff)
    meta = dict(state.metadata)
    meta.update(cutoff=new_cutoff, tail_mass=trimmed.tail_mass(), tail_bound=bound,
                guard_order=guard_order, truncation_rule="moment-weighted tail")
    return TruncatedState(new_cutoff, trimmed.components, exact_support=state.exact_support,
                          tail_bound=state.tail_bound, metadata=meta)
