import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cvwitness.fock import TruncatedState

settings.register_profile("ci", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def random_pure(rng, cutoff, product=False):
    dim = cutoff + 1
    if product:
        u = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi = np.outer(u, v)
    else:
        psi = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return psi / np.linalg.norm(psi)


def random_state(rng, cutoff, rank=1, product=False):
    w = rng.dirichlet(np.ones(rank))
    comps = tuple((float(x), random_pure(rng, cutoff, product)) for x in w)
    w_sum = sum(x for x, _ in comps)
    comps = tuple((x / w_sum, p) for x, p in comps)
    return TruncatedState(cutoff, comps, exact_support=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion -> list of (part, ok, detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, list] = {}


@pytest.fixture
def record():
    def _record(criterion, part, ok, detail=""):
        ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p[1] for p in parts)
        failed = [f"{name} ({detail})" for name, good, detail in parts if not good]
        body = "; ".join(failed) if failed else "; ".join(f"{n}: {d}" for n, _, d in parts)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'} - {body}")
