"""Independent reference implementations used as test oracles.

Everything here works with dense operators on the truncated space, so it
shares no code path with the amplitude-array routines under test.
"""
import math

import numpy as np


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def mode_ops(dim):
    a1 = annihilation(dim)
    eye = np.eye(dim)
    return np.kron(a1, eye), np.kron(eye, a1)


def monomial_operator(dim, n, m, k, l):
    """Dense ``a†^n a^m b†^k b^l``."""
    a, b = mode_ops(dim)
    mp = np.linalg.matrix_power
    return mp(a.conj().T, n) @ mp(a, m) @ mp(b.conj().T, k) @ mp(b, l)


def dense_expectation(rho, n, m, k, l):
    dim = int(round(math.sqrt(rho.shape[0])))
    return complex(np.trace(rho @ monomial_operator(dim, n, m, k, l)))


def dense_minor(rho, m, n, p, q):
    F = dense_expectation(rho, m, m, n, n).real
    G = dense_expectation(rho, p, p, q, q).real
    X = dense_expectation(rho, m, p, q, n)
    return F * G - abs(X) ** 2


def coherent_vector(gamma, dim):
    n = np.arange(dim)
    logf = np.array([math.lgamma(k + 1) for k in n])
    return np.exp(-abs(gamma) ** 2 / 2 - 0.5 * logf) * complex(gamma) ** n


def stirling2_brute(n, k):
    """Surjections from an n-set onto a k-set, divided by k!."""
    total = sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1))
    return total // math.factorial(k)


def tmsv_d1001(lam):
    return -lam**2 / (1 - lam**2)


def noon_d00nn(N, alpha, beta):
    return -abs(alpha * beta) ** 2 * math.factorial(N) ** 2


def cat_dprime_direct(alpha, gamma, m, n):
    """``d'_{mn00}`` of the odd cat ``|Ψ(α,α)⟩`` against ``|γ,γ⟩`` from the
    ``(−1)^{i+j+k+l}`` parity structure, computed term by term.

    For ``θ = π`` and ``α = β`` real, ``⟨a†^i a^j b†^k b^l⟩ =
    μ N² [1 + (−1)^s − e^{−Δ}((−1)^{j+l} + (−1)^{i+k})]`` with
    ``μ = α^s``, ``s = i+j+k+l`` and ``N² = 1/(2(1 − e^{−Δ}))``.
    """
    delta = 4 * alpha**2
    e = math.exp(-delta)
    norm2 = 1.0 / (2 * (1 - e))

    def mom(i, j, k, l):
        s = i + j + k + l
        return alpha**s * norm2 * (1 + (-1) ** s - e * ((-1) ** (j + l) + (-1) ** (i + k)))

    F1 = mom(m, m, n, n)
    X1 = mom(m, 0, 0, n)
    F2 = gamma ** (2 * m + 2 * n)
    X2 = gamma ** (m + n)
    return 0.5 * (F1 * 1 + F2 * 1) - X1 * X2


def hg_appendix_moments(sp, sm):
    """Second/fourth moments of the Hermite–Gaussian state, from its
    wavefunction ``∝ (x₁+x₂)·exp(−(x₁+x₂)²/(4σ₊²) − (x₁−x₂)²/(4σ₋²))``.

    With ``u = (x₁+x₂)/√2 ~`` first excited level of width ``σ₊`` and
    ``v = (x₁−x₂)/√2`` ground level of width ``σ₋``:
    ``⟨u²⟩ = 3σ₊²/2``, ``⟨v²⟩ = σ₋²/2`` and so on.  Returned as a dict of
    the ⟨x₁²⟩-type moments.
    """
    u2, v2 = 1.5 * sp**2, 0.5 * sm**2
    pu2, pv2 = 1.5 / sp**2, 0.5 / sm**2
    return {"x1x1": (u2 + v2) / 2, "x2x2": (u2 + v2) / 2, "x1x2": (u2 - v2) / 2,
            "p1p1": (pu2 + pv2) / 2, "p2p2": (pu2 + pv2) / 2, "p1p2": (pu2 - pv2) / 2}
