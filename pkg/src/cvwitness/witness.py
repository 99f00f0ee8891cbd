"""Second-order separability minors and comparison criteria.

For a minor spec ``(m, n, p, q)`` write

* ``F = ⟨a†ᵐ aᵐ b†ⁿ bⁿ⟩`` and ``G = ⟨a†ᵖ aᵖ b†ᵠ bᵠ⟩``,
* ``X = ⟨a†ᵐ aᵖ b†ᵠ bⁿ⟩``.

Then ``d = F G − |X|²`` and, for two uncorrelated inputs,
``d' = ½(F₁G₁ + F₂G₂) − Re(X₁ X̄₂) = ½(d₁ + d₂ + |X₁ − X₂|²)``.
The two-input form is written in the ``n = p = 0`` convention in the
literature; relabelling ``a ↔ a†`` on either mode maps every valid spec onto
that case, so the same assembly is used for all four zero patterns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecError, UnsupportedError
from .fock import ModeMonomial, TruncatedState, expectation
from .states import NOON, TMSV, Cat, CoherentProduct, HermiteGaussian, StateFamily

PROVENANCES = ("analytic", "fock-numeric", "fourier-extracted", "shot-estimated")


@dataclass(frozen=True)
class MinorSpec:
    """Minor indices ``(m, n, p, q)``; exactly one of ``{m, p}`` and one of ``{n, q}`` is non-zero."""

    m: int
    n: int
    p: int
    q: int

    def __post_init__(self):
        idx = (self.m, self.n, self.p, self.q)
        if any(int(i) != i or i < 0 for i in idx):
            raise SpecError(f"minor indices must be non-negative integers, got {idx}")
        bad_a = (self.m == 0) == (self.p == 0)
        bad_b = (self.n == 0) == (self.q == 0)
        if bad_a or bad_b:
            hint = ""
            if self.m == self.p == 0 and self.n == self.q and self.n > 0:
                hint = f"; the NOON minor d_00NN is spec (0,0,{self.n},{self.n})"
            raise SpecError(f"spec {idx} needs exactly one non-zero entry in {{m,p}} "
                            f"and in {{n,q}}{hint}")

    @classmethod
    def parse(cls, text: str) -> "MinorSpec":
        try:
            values = [int(t) for t in str(text).replace(" ", "").split(",")]
        except ValueError:
            raise SpecError(f"cannot parse minor spec {text!r}; expected m,n,p,q") from None
        if len(values) != 4:
            raise SpecError(f"minor spec {text!r} must have four entries")
        return cls(*values)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.m, self.n, self.p, self.q)

    def __str__(self) -> str:
        return ",".join(str(i) for i in self.as_tuple())

    @property
    def order(self) -> int:
        return self.m + self.n + self.p + self.q

    @property
    def first(self) -> ModeMonomial:
        return ModeMonomial(self.m, self.m, self.n, self.n)

    @property
    def second(self) -> ModeMonomial:
        return ModeMonomial(self.p, self.p, self.q, self.q)

    @property
    def cross(self) -> ModeMonomial:
        return ModeMonomial(self.m, self.p, self.q, self.n)

    def fourier_orders(self) -> tuple[int, int, int]:
        """``(m', n', sign)``: ``Re(X₁X̄₂)`` is ``Re C₊`` for sign +1, ``Re C₋`` for −1."""
        a_dag = self.m > 0
        b_dag = self.q > 0
        return max(self.m, self.p), max(self.n, self.q), (1 if a_dag == b_dag else -1)


@dataclass(frozen=True)
class Moments:
    """``(F, G, X)`` for one state and spec."""

    F: float
    G: float
    X: complex

    @property
    def minor(self) -> float:
        return self.F * self.G - abs(self.X) ** 2


@dataclass(frozen=True)
class WitnessResult:
    """A minor value with its summands, provenance and run metadata.

    ``value == first − second``; ``epsilon`` is ``|X₁ − X₂|²`` (zero for
    single-state minors), so that ``value == ½(d₁ + d₂ + epsilon)`` for
    two-input minors.
    """

    value: float
    first: float
    second: float
    epsilon: float = 0.0
    provenance: str = "fock-numeric"
    sound: bool = True
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if abs(self.value - (self.first - self.second)) > 1e-12 * max(1.0, abs(self.first), abs(self.second)):
            raise ValueError("value is inconsistent with its components")

    @property
    def witnessed(self) -> bool:
        return self.sound and self.value < 0

    @property
    def components(self) -> tuple[float, float, float]:
        return (self.first, self.second, self.epsilon)

    def to_dict(self) -> dict:
        return {"value": self.value, "first": self.first, "second": self.second,
                "epsilon": self.epsilon, "provenance": self.provenance, "sound": self.sound,
                "witnessed": self.witnessed, "metadata": self.metadata}


def _as_spec(spec) -> MinorSpec:
    if isinstance(spec, MinorSpec):
        return spec
    if isinstance(spec, str):
        return MinorSpec.parse(spec)
    return MinorSpec(*spec)


def state_moments(state: TruncatedState, spec: MinorSpec) -> Moments:
    """Fock-space evaluation of ``(F, G, X)``."""
    spec = _as_spec(spec)
    F = expectation(state, spec.first).real
    G = expectation(state, spec.second).real
    X = expectation(state, spec.cross)
    return Moments(F, G, X)


def assemble(mom1: Moments, mom2: Moments, provenance: str, metadata: dict | None = None) -> WitnessResult:
    """``d' = ½(F₁G₁ + F₂G₂) − Re(X₁X̄₂)``; reduces to ``d`` for identical inputs."""
    first = 0.5 * (mom1.F * mom1.G + mom2.F * mom2.G)
    second = (mom1.X * np.conj(mom2.X)).real
    eps = abs(mom1.X - mom2.X) ** 2
    return WitnessResult(first - second, first, second, eps, provenance, True, dict(metadata or {}))


def _state_meta(state: TruncatedState) -> dict:
    keep = ("family", "params", "cutoff", "tail_mass", "truncation_rule", "dephasing", "norm_defect")
    return {k: state.metadata[k] for k in keep if k in state.metadata}


def minor_d(state: TruncatedState, spec) -> WitnessResult:
    """Single-state minor ``d_{mnpq} = F G − |X|²``."""
    spec = _as_spec(spec)
    mom = state_moments(state, spec)
    meta = {"spec": str(spec), "state": _state_meta(state), "kind": "d"}
    return assemble(mom, mom, "fock-numeric", meta)


def minor_dprime(state1: TruncatedState, state2: TruncatedState, spec) -> WitnessResult:
    """Two-input minor ``d'_{mnpq}``; negative values flag entanglement of an input."""
    spec = _as_spec(spec)
    mom1 = state_moments(state1, spec)
    mom2 = mom1 if state2 is state1 else state_moments(state2, spec)
    meta = {"spec": str(spec), "state1": _state_meta(state1), "state2": _state_meta(state2), "kind": "dprime"}
    return assemble(mom1, mom2, "fock-numeric", meta)


def lossy_from_moments(mom: Moments, spec: MinorSpec, eta1: float, eta2: float,
                       provenance: str = "fock-numeric", metadata: dict | None = None) -> WitnessResult:
    for eta in (eta1, eta2):
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"efficiencies must lie in [0, 1], got {eta}")
    k = spec.order
    first = eta1**k * mom.F * mom.G
    second = (eta2 / 2.0) ** k * abs(mom.X) ** 2
    meta = dict(metadata or {})
    meta.update(eta1=eta1, eta2=eta2, kind="d_lossy")
    return WitnessResult(first - second, first, second, 0.0, provenance, eta1 >= eta2 / 2.0, meta)


def minor_d_lossy(state: TruncatedState, spec, eta1: float, eta2: float) -> WitnessResult:
    """``η₁^K F G − (η₂/2)^K |X|²`` with ``K = m+n+p+q``; sound iff ``η₁ ≥ η₂/2``."""
    spec = _as_spec(spec)
    mom = state_moments(state, spec)
    return lossy_from_moments(mom, spec, eta1, eta2, metadata={"spec": str(spec), "state": _state_meta(state)})


# ----------------------------------------------------------------------------
# closed forms


def coherent_moment(gamma: complex, delta: complex, mono: ModeMonomial) -> complex:
    g, d = complex(gamma), complex(delta)
    return (g.conjugate() ** mono.n) * g**mono.m * (d.conjugate() ** mono.k) * d**mono.l


def cat_moment(family: Cat, mono: ModeMonomial) -> complex:
    """``⟨a†ⁱ aʲ b†ᵏ bˡ⟩`` of a (possibly dephased) two-mode cat state."""
    i, j, k, l = mono.n, mono.m, mono.k, mono.l
    mu = coherent_moment(family.alpha, family.beta, mono)
    c = 1.0 - family.dephasing
    e = math.exp(-family.delta)
    th = family.theta
    bracket = (1 + (-1) ** (i + j + k + l)
               + c * e * (np.exp(1j * th) * (-1) ** (j + l) + np.exp(-1j * th) * (-1) ** (i + k)))
    return complex(mu * family.normalization() ** 2 * bracket)


def cat_case_table(family: Cat, spec) -> tuple[float, float]:
    """``(F, |X|²)`` from the parity case tables for a pure cat (``G`` is the ``F`` of ``(p, q)``)."""
    spec = _as_spec(spec)
    if family.dephasing:
        raise UnsupportedError("the parity case table covers undephased cats")
    a2, b2 = abs(family.alpha) ** 2, abs(family.beta) ** 2
    ce = math.cos(family.theta) * math.exp(-family.delta)
    ratio = (1 - ce) / (1 + ce)
    sim = lambda x, y: (x - y) % 2 == 0  # noqa: E731
    F = a2**spec.m * b2**spec.n * (1.0 if sim(spec.m, spec.n) else ratio)
    m, n, p, q = spec.as_tuple()
    if sim(m, q) and sim(n, p):
        factor = 1.0
    elif not sim(m, q) and not sim(n, p):
        factor = ratio**2
    else:
        factor = (math.sin(family.theta) * math.exp(-family.delta) / (1 + ce)) ** 2
    return F, a2 ** (m + p) * b2 ** (n + q) * factor


def cat_dprime_coth(alpha: float, gamma: float, m: int, n: int) -> float:
    """Closed form for the odd cat ``|Ψ(α, α)⟩`` against the reference ``|γ, γ⟩``.

    ``½[|α|^{2m+2n} + |γ|^{2m+2n} − 2 Re((αγ*)^m (α*γ)^n) coth(Δ/2)]``,
    ``Δ = 4|α|²``.  It equals the ``(m, n, 0, 0)`` two-input minor
    when ``m`` and ``n`` are both odd.
    """
    a, g = complex(alpha), complex(gamma)
    delta = 4 * abs(a) ** 2
    cross = ((a * g.conjugate()) ** m * (a.conjugate() * g) ** n).real
    return 0.5 * (abs(a) ** (2 * m + 2 * n) + abs(g) ** (2 * m + 2 * n) - 2 * cross / math.tanh(delta / 2))


def _hg_mode_moments(sigma: float, photon: bool) -> tuple[float, float, float]:
    """``(⟨A†A⟩, ⟨A²⟩, ⟨A†²A²⟩)`` of ``S(r)|1⟩`` or ``S(r)|0⟩`` with ``r = −ln σ``."""
    r = -math.log(sigma)
    c, s = math.cosh(r), math.sinh(r)
    if photon:
        return c * c + 2 * s * s, -3 * c * s, 9 * c * c * s * s + 6 * s**4
    return s * s, -c * s, 2 * s**4 + c * c * s * s


def hermite_gaussian_moments(family: HermiteGaussian, spec) -> Moments:
    """Closed-form ``(F, G, X)`` for specs ``(1,0,0,1)`` and ``(1,1,0,0)``.

    With ``a = (A + B)/√2`` and ``b = ±(A − B)/√2`` for the squeezed photon
    ``A`` and squeezed vacuum ``B``; rotations of the ``(r₊, s₋)`` plane are
    local phase rotations and leave both minors unchanged.
    """
    spec = _as_spec(spec)
    if family.transform.xi != 1.0:
        raise UnsupportedError("closed forms cover Hermite–Gaussian states without ± squeezing")
    nA, mA, qA = _hg_mode_moments(family.sigma_plus, True)
    nB, mB, qB = _hg_mode_moments(family.sigma_minus, False)
    phi = family.transform.phi
    if spec.as_tuple() == (1, 0, 0, 1):
        n = 0.5 * (nA + nB)
        # ⟨ab⟩ picks up e^{iφ}e^{−iφ} = 1 under the ± rotation
        return Moments(n, n, complex(0.5 * (mA - mB)))
    if spec.as_tuple() == (1, 1, 0, 0):
        F = 0.25 * (qA + qB - 2 * mA * mB)
        # ⟨a†b⟩ = ½(nA − nB) e^{−2iφ}: the modulus is rotation-free
        return Moments(F, 1.0, complex(0.5 * (nA - nB) * np.exp(-2j * phi)))
    raise UnsupportedError(f"no Hermite–Gaussian closed form for spec {spec}")


def family_moments(family: StateFamily, spec) -> Moments:
    """Closed-form ``(F, G, X)`` for a supported family/spec pair."""
    spec = _as_spec(spec)
    if isinstance(family, CoherentProduct):
        g, d = family.gamma, family.delta
        return Moments(coherent_moment(g, d, spec.first).real, coherent_moment(g, d, spec.second).real,
                       coherent_moment(g, d, spec.cross))
    if isinstance(family, TMSV):
        if spec.as_tuple() != (1, 0, 0, 1):
            raise UnsupportedError("TMSV closed form covers spec (1,0,0,1)")
        lam = family.lam
        nbar = lam**2 / (1 - lam**2)
        s = lam / (1 - lam**2)
        al, be = (complex(x) for x in family.displacement)
        return Moments(nbar + abs(al) ** 2, nbar + abs(be) ** 2, s + (al * be).conjugate())
    if isinstance(family, Cat):
        return Moments(cat_moment(family, spec.first).real, cat_moment(family, spec.second).real,
                       cat_moment(family, spec.cross))
    if isinstance(family, NOON):
        N = int(family.N)
        if spec.as_tuple() != (0, 0, N, N):
            raise UnsupportedError(f"NOON closed form covers spec (0,0,{N},{N})")
        x = family.alpha * np.conj(family.beta) * math.factorial(N) * (1 - family.dephasing)
        return Moments(1.0, 0.0, complex(x))
    if isinstance(family, HermiteGaussian):
        return hermite_gaussian_moments(family, spec)
    raise UnsupportedError(f"no closed form for {type(family).__name__}")


def analytic_minor(family: StateFamily, spec, reference: tuple | None = None) -> WitnessResult:
    """Closed-form ``d`` (no reference) or ``d'`` against ``|γ, δ⟩``."""
    spec = _as_spec(spec)
    mom = family_moments(family, spec)
    meta = {"spec": str(spec), "family": type(family).__name__}
    if reference is None:
        meta["kind"] = "d"
        return assemble(mom, mom, "analytic", meta)
    ref = family_moments(CoherentProduct(*reference), spec)
    meta.update(kind="dprime", reference=[_cplx(reference[0]), _cplx(reference[1])])
    return assemble(mom, ref, "analytic", meta)


def _cplx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# ----------------------------------------------------------------------------
# optimal coherent reference


@dataclass(frozen=True)
class ReferenceChoice:
    """Coherent reference ``|γ, δ⟩`` with ``X_ref = X_state``.

    Only the combination entering ``X`` is fixed; the canonical member has
    ``γ`` real and non-negative, ``|γ| = |δ|`` and the principal root phase.
    """

    gamma: complex
    delta: complex
    target: complex
    metadata: dict = field(default_factory=dict, compare=False)

    def state(self, **kwargs) -> TruncatedState:
        from .states import build

        return build(CoherentProduct(self.gamma, self.delta), **kwargs)


def reference_for_target(target: complex, spec) -> ReferenceChoice:
    spec = _as_spec(spec)
    ka, kb = max(spec.m, spec.p), max(spec.n, spec.q)
    a_dag, b_dag = spec.m > 0, spec.q > 0
    target = complex(target)
    constraint = (f"{'γ*' if a_dag else 'γ'}^{ka} · {'δ*' if b_dag else 'δ'}^{kb} = X_state")
    if abs(target) < 1e-300:
        return ReferenceChoice(0j, 0j, target, {"constraint": constraint, "no_solution": True,
                                                "note": "X_state = 0; any reference with γδ = 0 is optimal",
                                                "degenerate": True})
    mag = abs(target) ** (1.0 / (ka + kb))
    if kb == 0:
        # only γ enters; the phase goes there and δ is free
        root = mag * np.exp(1j * np.angle(target) / ka)
        gamma, delta = complex(np.conj(root) if a_dag else root), complex(mag)
    else:
        gamma = complex(mag)
        # g(δ)^kb = e^{i arg T}, with g(δ) = δ* or δ
        root = mag * np.exp(1j * np.angle(target) / kb)
        delta = complex(np.conj(root) if b_dag else root)
    meta = {"constraint": constraint, "no_solution": False, "degenerate": True,
            "canonical": "γ real ≥ 0, |γ| = |δ|, principal root"}
    return ReferenceChoice(gamma, delta, target, meta)


def optimal_reference(state, spec) -> ReferenceChoice:
    """Coherent reference with ``X_ref = X_state``, which gives ``d' = ½ d``."""
    spec = _as_spec(spec)
    if isinstance(state, TruncatedState):
        target = expectation(state, spec.cross)
    else:
        target = family_moments(state, spec).X
    return reference_for_target(target, spec)


# ----------------------------------------------------------------------------
# Gaussian comparison criteria


def _pm_vectors(branch: str, angle: float) -> tuple[np.ndarray, np.ndarray]:
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    c, s = math.cos(angle), math.sin(angle)
    r1 = np.array([c, s, 0, 0])
    r2 = np.array([0, 0, c, s])
    s1 = np.array([-s, c, 0, 0])
    s2 = np.array([0, 0, -s, c])
    sign = 1.0 if branch == "+" else -1.0
    # branch '+' pairs r₊ with s₋, branch '-' pairs r₋ with s₊
    return r1 + sign * r2, s1 - sign * s2


def pm_variances(cov: np.ndarray, branch: str = "+", angle: float = 0.0) -> tuple[float, float, float]:
    """``(σ²_r, σ²_s, σ_rs)`` of the non-local pair selected by ``branch``."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (4, 4):
        raise ValueError("covariance must be 4×4 over (x1, p1, x2, p2)")
    r, s = _pm_vectors(branch, angle)
    return float(r @ cov @ r), float(s @ cov @ s), float(r @ cov @ s)


def mgvt(cov: np.ndarray, branch: str = "+", angle: float = 0.0) -> float:
    """Product ``σ²_{r±} σ²_{s∓}``; values below 1 flag entanglement."""
    vr, vs, _ = pm_variances(cov, branch, angle)
    return vr * vs


def second_moment_criterion(cov: np.ndarray, branch: str = "+", angle: float = 0.0) -> float:
    """``(σ²_r + 1)(σ²_s + 1) − σ²_{rs} − 4``; negative values flag entanglement."""
    vr, vs, crs = pm_variances(cov, branch, angle)
    return (vr + 1) * (vs + 1) - crs**2 - 4
