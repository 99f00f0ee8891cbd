import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from cvwitness.errors import SpecError, UnsupportedError
from cvwitness.fock import TruncatedState, expectation, quadrature_covariance
from cvwitness.gaussian import Rotate, apply_gaussian_op
from cvwitness.states import (NOON, TMSV, Cat, CoherentProduct, HermiteGaussian, PMTransform, apply_dephasing,
                              build, covariance_matrix)
from cvwitness.witness import (MinorSpec, WitnessResult, analytic_minor, cat_dprime_coth, family_moments, mgvt,
                               minor_d, minor_d_lossy, minor_dprime, optimal_reference, pm_variances,
                               reference_for_target, second_moment_criterion)
from conftest import random_state
from oracles import dense_minor, noon_d00nn, tmsv_d1001


def valid_specs(max_order=4):
    out = []
    for idx in itertools.product(range(max_order + 1), repeat=4):
        if 0 < sum(idx) <= max_order:
            try:
                out.append(MinorSpec(*idx))
            except SpecError:
                pass
    return out


SPECS4 = valid_specs(4)


class TestMinorSpec:
    @pytest.mark.parametrize("idx", [(1, 0, 0, 1), (1, 1, 0, 0), (0, 0, 3, 3), (2, 0, 0, 1)])
    def test_valid(self, idx):
        assert MinorSpec(*idx).as_tuple() == idx

    @pytest.mark.parametrize("idx", [(1, 0, 0, 0), (1, 1, 1, 0), (0, 0, 0, 0), (-1, 0, 0, 1)])
    def test_invalid(self, idx):
        with pytest.raises(SpecError):
            MinorSpec(*idx)

    def test_noon_hint(self):
        with pytest.raises(SpecError, match=r"\(0,0,3,3\)"):
            MinorSpec(0, 3, 0, 3)

    def test_parse(self):
        assert MinorSpec.parse("1, 0,0,1") == MinorSpec(1, 0, 0, 1)
        with pytest.raises(SpecError):
            MinorSpec.parse("1,0,0")
        assert str(MinorSpec(0, 0, 2, 2)) == "0,0,2,2"


class TestMinorD:
    @pytest.mark.parametrize("spec", SPECS4[::3])
    def test_coherent_saturates(self, spec):
        s = build(CoherentProduct(0.7 - 0.2j, 0.4 + 0.5j))
        assert abs(minor_d(s, spec).value) < 1e-10

    def test_tmsv(self):
        assert minor_d(build(TMSV(0.5)), (1, 0, 0, 1)).value == pytest.approx(-1 / 3, abs=1e-10)

    def test_noon(self):
        s = build(NOON(2, 1 / math.sqrt(2), 1 / math.sqrt(2)))
        assert minor_d(s, (0, 0, 2, 2)).value == pytest.approx(-1.0, abs=1e-12)

    @given(st.integers(0, 2**31), st.sampled_from(SPECS4))
    def test_matches_dense_oracle(self, seed, spec):
        s = random_state(np.random.default_rng(seed), 4, 2)
        assert abs(minor_d(s, spec).value - dense_minor(s.density_matrix(), *spec.as_tuple())) < 1e-9

    def test_result_components(self):
        r = minor_d(build(TMSV(0.3)), (1, 0, 0, 1))
        assert r.value == pytest.approx(r.first - r.second, abs=1e-15)
        assert r.provenance == "fock-numeric" and r.witnessed
        with pytest.raises(ValueError):
            WitnessResult(1.0, 3.0, 1.0)
        with pytest.raises(ValueError):
            WitnessResult(1.0, 2.0, 1.0, provenance="guess")

    @given(st.integers(0, 2**31), st.sampled_from(SPECS4), st.floats(0, 6.3), st.floats(0, 6.3))
    def test_rotation_invariance(self, seed, spec, th, th2):
        s = random_state(np.random.default_rng(seed), 4, 2)
        r = apply_gaussian_op(apply_gaussian_op(s, Rotate("a", th)), Rotate("b", th2))
        assert abs(minor_d(s, spec).value - minor_d(r, spec).value) < 1e-9


class TestSoundness:
    @given(st.integers(0, 2**31), st.integers(1, 3), st.sampled_from(SPECS4))
    def test_separable_d(self, seed, rank, spec):
        s = random_state(np.random.default_rng(seed), 4, rank, product=True)
        assert minor_d(s, spec).value >= -1e-9

    @given(st.integers(0, 2**31), st.sampled_from(SPECS4))
    def test_separable_dprime(self, seed, spec):
        rng = np.random.default_rng(seed)
        s1 = random_state(rng, 4, 2, product=True)
        s2 = random_state(rng, 3, 1, product=True)
        assert minor_dprime(s1, s2, spec).value >= -1e-9

    @given(st.integers(0, 2**31), st.sampled_from(SPECS4), st.floats(0.05, 1.0), st.floats(0.0, 1.0))
    def test_separable_lossy_when_sound(self, seed, spec, eta1, frac):
        eta2 = min(1.0, 2 * eta1 * frac)
        s = random_state(np.random.default_rng(seed), 4, 2, product=True)
        r = minor_d_lossy(s, spec, eta1, eta2)
        assert r.sound and r.value >= -1e-9


class TestMinorDprime:
    def test_replica(self):
        s = build(TMSV(0.5))
        assert minor_dprime(s, s, (1, 0, 0, 1)).value == minor_d(s, (1, 0, 0, 1)).value
        assert minor_dprime(s, s, (1, 0, 0, 1)).value == pytest.approx(-1 / 3, abs=1e-10)

    @pytest.mark.parametrize("lam", [-0.9, -0.5, 0.1, 0.5, 0.9])
    def test_optimal_reference_halves(self, lam):
        s = build(TMSV(lam))
        ref = optimal_reference(s, (1, 0, 0, 1))
        assert abs(ref.gamma * ref.delta - lam / (1 - lam**2)) < 1e-9
        r = minor_dprime(s, ref.state(), (1, 0, 0, 1))
        assert r.value == pytest.approx(tmsv_d1001(lam) / 2, abs=1e-8)

    def test_two_coherent_states(self):
        a, b = build(CoherentProduct(0.3, 1.0)), build(CoherentProduct(-0.5j, 0.2))
        for spec in SPECS4[::4]:
            r = minor_dprime(a, b, spec)
            assert r.value >= -1e-10
            assert r.value == pytest.approx(0.5 * r.epsilon, abs=1e-9)

    def test_monotone_in_abs_lambda(self):
        lams = np.linspace(0.05, 0.9, 12)
        for sign in (1, -1):
            vals = []
            for lam in sign * lams:
                s = build(TMSV(lam))
                vals.append(minor_dprime(s, optimal_reference(s, (1, 0, 0, 1)).state(), (1, 0, 0, 1)).value)
            assert np.all(np.diff(vals) < 0)

    @pytest.mark.parametrize("spec", [(1, 0, 0, 1), (1, 1, 0, 0), (2, 1, 0, 0), (0, 1, 2, 0)])
    def test_epsilon_decomposition(self, spec):
        s1, s2 = build(TMSV(0.4)), build(Cat(0.8, 0.5))
        r = minor_dprime(s1, s2, spec)
        d1, d2 = minor_d(s1, spec).value, minor_d(s2, spec).value
        assert r.value == pytest.approx(0.5 * (d1 + d2 + r.epsilon), abs=1e-10)


class TestLossy:
    def test_no_loss_is_d(self):
        s = build(TMSV(0.5))
        r = minor_d_lossy(s, (1, 0, 0, 1), 1.0, 1.0)
        d = minor_d(s, (1, 0, 0, 1))
        # ½-prefactor structure of the two-setup measurement: (η₂/2)^K
        assert r.first == pytest.approx(d.first)
        assert r.second == pytest.approx(d.second / 2**2)

    def test_soundness_flag(self):
        s = build(CoherentProduct(0.4, 0.4))
        assert not minor_d_lossy(s, (1, 0, 0, 1), 0.3, 0.9).sound
        assert minor_d_lossy(s, (1, 0, 0, 1), 0.5, 0.9).value >= 0

    @pytest.mark.parametrize("state,spec", [(NOON(2, 1 / math.sqrt(2)), (0, 0, 2, 2)),
                                            (Cat(1.0, 1.0), (1, 1, 0, 0))])
    def test_monotone_in_eta(self, state, spec):
        s = build(state)
        d = minor_d(s, spec)
        k = MinorSpec(*spec).order
        etas = np.linspace(0.05, 1.0, 20)
        # equal efficiencies: η^K (FG − |X|²/2^K), a single sign times a monotone factor
        vals = np.array([minor_d_lossy(s, spec, e, e).value for e in etas])
        steps = np.diff(vals)
        assert np.all(steps > 0) or np.all(steps < 0)
        assert vals[-1] == pytest.approx(d.first - d.second / 2**k)
        # on the soundness boundary η₁ = η₂/2 the violation shrinks with η
        edge = np.array([minor_d_lossy(s, spec, e / 2, e).value for e in etas])
        assert np.all(edge < 0) and np.all(np.diff(edge) < 0)


class TestAnalytic:
    @pytest.mark.parametrize("alpha", [0.3, 0.7, 1.2])
    def test_cat_coth_at_equal_amplitudes(self, alpha):
        r = analytic_minor(Cat(alpha, alpha), (1, 1, 0, 0), (alpha, alpha))
        assert r.value == pytest.approx(cat_dprime_coth(alpha, alpha, 1, 1), abs=1e-10)
        assert r.value < 0

    @given(st.floats(0.01, 0.9), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
    def test_displaced_tmsv_condition(self, lam, ar, ai, br, bi):
        a, b = complex(ar, ai), complex(br, bi)
        d = analytic_minor(TMSV(lam, (a, b)), (1, 0, 0, 1)).value
        assume(abs(d) > 1e-9)
        assert (d < 0) == (lam * (abs(a) ** 2 + abs(b) ** 2 - 1) < 2 * (a * b).real)

    @given(st.floats(-0.9, 0.9), st.floats(-1, 1), st.floats(-1, 1))
    def test_displaced_tmsv_general_sign(self, lam, ar, br):
        d = analytic_minor(TMSV(lam, (ar, br)), (1, 0, 0, 1)).value
        lhs = lam**2 * (ar**2 + br**2 - 1)
        rhs = 2 * lam * ar * br
        assume(abs(lhs - rhs) > 1e-9)
        assert (d < 0) == (lhs < rhs)

    def test_hermite_gaussian_unit_widths(self):
        hg = HermiteGaussian(1.0, 1.0)
        assert analytic_minor(hg, (1, 1, 0, 0)).value == pytest.approx(-0.25, abs=1e-12)
        assert analytic_minor(hg, (1, 0, 0, 1)).value == pytest.approx(0.25, abs=1e-12)
        # σ± = 1 is a single photon shared by the two modes
        s = build(hg)
        assert expectation(s, (1, 1, 0, 0)).real == pytest.approx(0.5, abs=1e-10)
        assert abs(expectation(s, (1, 1, 1, 1))) < 1e-10

    CASES = ([(TMSV(lam), (1, 0, 0, 1)) for lam in (-0.7, 0.2, 0.6)]
             + [(TMSV(0.4, (0.3, -0.2j)), (1, 0, 0, 1))]
             + [(Cat(a, b, th), spec) for a, b, th in [(0.5, 0.5, math.pi), (1.0, 0.7, 0.5), (1.3, 1.3, 0.0)]
                for spec in [(1, 1, 0, 0), (1, 0, 0, 1), (2, 1, 0, 0), (3, 1, 0, 0), (0, 1, 2, 0)]]
             + [(Cat(0.9, 0.9, dephasing=0.4), (1, 1, 0, 0))]
             + [(NOON(N, 0.6, 0.8j, dephasing=p), (0, 0, N, N)) for N in (1, 3) for p in (0.0, 0.3)]
             + [(HermiteGaussian(sp, sm), spec) for sp, sm in [(1.0, 1.0), (0.6, 1.4), (1.5, 0.7)]
                for spec in [(1, 1, 0, 0), (1, 0, 0, 1)]]
             + [(HermiteGaussian(0.8, 1.2, PMTransform(phi=0.7)), (1, 1, 0, 0))])

    @pytest.mark.parametrize("family,spec", CASES, ids=lambda x: type(x).__name__ if not isinstance(x, tuple) else str(x))
    def test_analytic_matches_numeric(self, family, spec):
        a = analytic_minor(family, spec)
        n = minor_d(build(family), spec)
        assert a.provenance == "analytic"
        assert abs(a.value - n.value) < 1e-8 * max(1.0, abs(a.value))

    def test_unsupported(self):
        with pytest.raises(UnsupportedError):
            family_moments(TMSV(0.3), (1, 1, 0, 0))
        with pytest.raises(UnsupportedError):
            family_moments(HermiteGaussian(1, 1, PMTransform(xi=2.0)), (1, 1, 0, 0))

    def test_noon_theory(self):
        for N in range(1, 6):
            r = analytic_minor(NOON(N, 0.6, 0.8), (0, 0, N, N))
            assert r.value == pytest.approx(noon_d00nn(N, 0.6, 0.8), rel=1e-12)


class TestOptimalReference:
    def test_tmsv(self):
        ref = optimal_reference(TMSV(0.5), (1, 0, 0, 1))
        assert ref.gamma * ref.delta == pytest.approx(2 / 3)
        assert abs(ref.gamma) == pytest.approx(abs(ref.delta))

    def test_vacuum(self):
        ref = optimal_reference(build(TMSV(0.0)), (1, 0, 0, 1))
        assert ref.gamma == 0 and ref.delta == 0 and ref.metadata["no_solution"]

    def test_noon(self):
        ref = optimal_reference(NOON(2, 1 / math.sqrt(2)), (0, 0, 2, 2))
        assert (ref.gamma * np.conj(ref.delta)) ** 2 == pytest.approx(1.0)
        assert ref.gamma * np.conj(ref.delta) == pytest.approx(1.0)

    @given(st.floats(0.1, 3), st.floats(-3, 3), st.sampled_from(SPECS4))
    def test_reference_reproduces_target(self, mag, phase, spec):
        target = mag * np.exp(1j * phase)
        ref = reference_for_target(target, spec)
        X = family_moments(CoherentProduct(ref.gamma, ref.delta), spec).X
        assert abs(X - target) < 1e-9 * max(1, mag)

    @pytest.mark.parametrize("family,spec", [(Cat(1.0, 1.0), (1, 1, 0, 0)), (NOON(3, 0.6, 0.8), (0, 0, 3, 3)),
                                             (HermiteGaussian(0.7, 1.2), (1, 1, 0, 0))])
    def test_optimal_gives_half_d(self, family, spec):
        s = build(family)
        ref = optimal_reference(s, spec)
        r = minor_dprime(s, ref.state(), spec)
        assert r.value == pytest.approx(0.5 * minor_d(s, spec).value, abs=1e-8)


class TestGaussianCriteria:
    def test_vacuum(self):
        cov = 0.5 * np.eye(4)
        for b in "+-":
            assert mgvt(cov, b) == pytest.approx(1.0)
            assert second_moment_criterion(cov, b) == pytest.approx(0.0)

    def test_tmsv_flags(self):
        _, cov = quadrature_covariance(build(TMSV(0.5)))
        assert min(mgvt(cov, b) for b in "+-") < 1
        assert min(second_moment_criterion(cov, b) for b in "+-") < 0

    def test_hermite_gaussian_oracle(self):
        # σ₊=σ₋=1: Var(r₊)=Var(x₁+x₂)=3σ₊², Var(s₋)=Var(p₁−p₂)=1/σ₋²
        vr, vs, _ = pm_variances(covariance_matrix(HermiteGaussian(1.0, 1.0)), "+")
        assert vr == pytest.approx(3.0) and vs == pytest.approx(1.0)
        assert mgvt(covariance_matrix(HermiteGaussian(1.0, 1.0)), "+") == pytest.approx(3.0)

    def test_second_moment_negative_somewhere(self):
        vals = [min(second_moment_criterion(covariance_matrix(HermiteGaussian(sp, sm)), b) for b in "+-")
                for sp in np.linspace(0.2, 2, 10) for sm in np.linspace(0.2, 2, 10)]
        assert min(vals) < 0

    @pytest.mark.parametrize("sp,sm", [(0.5, 1.5), (1.0, 1.0), (1.6, 0.4)])
    def test_rotation(self, sp, sm):
        base = HermiteGaussian(sp, sm)
        rot = HermiteGaussian(sp, sm, PMTransform(phi=math.pi / 4))
        c0, c1 = covariance_matrix(base), covariance_matrix(rot)
        for b in "+-":
            assert second_moment_criterion(c0, b) == pytest.approx(second_moment_criterion(c1, b), abs=1e-9)
        assert abs(mgvt(c0, "+") - mgvt(c1, "+")) > 1e-3
        assert analytic_minor(base, (1, 1, 0, 0)).value == pytest.approx(
            minor_d(build(rot), (1, 1, 0, 0)).value, abs=1e-9)
