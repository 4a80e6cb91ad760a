import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from test_discord import measure_a, sphere_min

from qcohere import channels, qcore, states
from qcohere import min_measures as mm

seeds = st.integers(min_value=0, max_value=2 ** 31 - 1)
PHI = qcore.proj(states.BELL_PHI_PLUS)


def schmidt_state(lam):
    psi = np.zeros(4)
    psi[0], psi[3] = math.sqrt(lam[0]), math.sqrt(lam[1])
    return qcore.proj(psi)


def sphere_max(f):
    return -sphere_min(lambda n: -f(n))


def test_hs_min_examples():
    assert abs(mm.hs_min(PHI).value - 0.5) < 1e-12
    assert abs(mm.hs_min(states.werner(0.8, 2)).value - (2 * 0.8 - 1) ** 2 / 18) < 1e-12
    assert abs(mm.hs_min_werner(0.8, 2) - (2 * 0.8 - 1) ** 2 / 18) < 1e-15
    rho = schmidt_state((0.7, 0.3))
    assert abs(mm.hs_min(rho).value - (1 - 0.7 ** 2 - 0.3 ** 2)) < 1e-12
    assert abs(mm.hs_min_pure([0.7, 0.3]) - 0.42) < 1e-12


def test_trace_min_examples():
    assert abs(mm.trace_min(states.werner(0.8, 2)).value - mm.trace_min_werner(0.8, 2)) < 1e-12
    assert abs(mm.trace_min(states.isotropic(0.9, 2)).value - 2 * abs(4 * 0.9 - 1) / 6) < 1e-12
    assert abs(mm.trace_min(schmidt_state((0.7, 0.3))).value - 2 * math.sqrt(0.21)) < 1e-12
    assert abs(mm.trace_min_pure([0.7, 0.3]) - 2 * math.sqrt(0.21)) < 1e-12
    assert abs(mm.trace_min(states.bell_diagonal((0.5, 0.3, 0.1))).value - 0.5) < 1e-12


def test_bures_min():
    assert abs(mm.bures_min_bell((1, -1, 1)).value - mm.bures_min(PHI).value) < 1e-7
    for p in ((0.5, 0.3, 0.1), (0.6, -0.18, 0.3), (-0.2, 0.4, 0.1)):
        rho = states.bell_diagonal(p)
        # every projective measurement on A leaves a Bell-diagonal marginal invariant
        fmin = sphere_min(lambda n: qcore.fidelity(rho, measure_a(rho, n)))
        assert abs(mm.bures_min_bell(p).value - mm.bures_min(rho).value) < 1e-5
        assert abs(mm.bures_min_bell(p).extras["F_min"] - fmin) < 1e-6


def test_rel_entropy_min():
    assert abs(mm.rel_entropy_min(PHI).value - 1) < 1e-9
    for p in ((0.6, -0.18, 0.3), (0.5, 0.3, 0.1)):
        rho = states.bell_diagonal(p)
        s_rho = qcore.von_neumann_entropy(rho)
        oracle = sphere_max(lambda n: qcore.von_neumann_entropy(measure_a(rho, n)) - s_rho)
        assert abs(mm.rel_entropy_min(rho).value - oracle) < 1e-6
        assert abs(mm.rel_entropy_min_bell(p) - oracle) < 1e-6
    rho = states.random_density(4, seed=1)
    lo, hi = mm.rel_entropy_min_bounds(rho, (2, 2))
    assert lo - 1e-9 <= mm.rel_entropy_min(rho).value <= hi + 1e-9


def test_skew_and_uin():
    rho = schmidt_state((0.7, 0.3))
    assert abs(mm.skew_min(rho).value - mm.hs_min(rho).value) < 1e-9
    assert abs(mm.skew_min(states.werner(0.5, 2)).value - 0.5 * ((2 - 0.5) / 3 - math.sqrt(0.75 / 3))) < 1e-12
    assert abs(mm.skew_min_werner(0.5, 2) - 0.5 * ((2 - 0.5) / 3 - math.sqrt(0.75 / 3))) < 1e-15
    iso = states.isotropic(0.5, 2)
    s = qcore.matrix_sqrt(iso)

    def skew(n):
        K = np.kron(qcore.sigma_dot(n), np.eye(2))
        c = s @ K - K @ s
        return -0.5 * np.real(np.trace(c @ c))

    assert abs(mm.uin(iso).value - sphere_max(skew)) < 1e-5
    r = states.random_density(4, seed=1)
    assert mm.skew_min(r).value <= mm.skew_min_upper_bound(r) + 1e-9


def test_hs_upper_bound_and_two_sided():
    r = states.random_density(4, seed=1)
    assert mm.hs_min(r).value <= mm.hs_min_upper_bound(r) + 1e-12
    rho = schmidt_state((0.7, 0.3))
    assert abs(mm.hs_min_two_sided(rho).value - mm.hs_min(rho).value) < 1e-6


@pytest.mark.parametrize("seed", range(6))
def test_optimum_at_marginal_eigenbasis(seed):
    rho = states.random_density(4, seed=seed)
    c = mm.LocallyInvariantConstraint.of(rho, (2, 2))
    assert not c.degenerate
    n = qcore.bloch_vector(qcore.proj(c.eigvecs[:, 0]))
    assert abs(mm.hs_min_at(rho, n) - mm.hs_min(rho).value) < 1e-9
    assert abs(mm.trace_min_at(rho, n) - mm.trace_min(rho).value) < 1e-9
    assert abs(mm.skew_min_at(rho, n) - mm.skew_min(rho).value) < 1e-9
    # the optimal measurement leaves the marginal invariant
    ra = qcore.partial_trace(rho, (2, 2), keep="A")
    pa = qcore.partial_trace(measure_a(rho, n), (2, 2), keep="A")
    assert np.allclose(ra, pa, atol=1e-8)


MINS = {
    "hs": lambda r: mm.hs_min(r).value,
    "trace": lambda r: mm.trace_min(r).value,
    "skew": lambda r: mm.skew_min(r).value,
    "uin": lambda r: mm.uin(r).value,
    "rel_entropy": lambda r: mm.rel_entropy_min(r).value,
}


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_vanish_on_products(seed):
    ra = states.random_density(2, seed=seed)
    prod = np.kron(ra, states.random_density(2, seed=seed + 1))
    for name, fn in MINS.items():
        assert abs(fn(prod)) < 1e-6, name


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_local_unitary_invariance(seed):
    rho = states.random_density(4, seed=seed)
    U = np.kron(qcore.random_unitary(2, seed=seed + 1), qcore.random_unitary(2, seed=seed + 2))
    moved = U @ rho @ U.conj().T
    for name, fn in MINS.items():
        assert abs(fn(rho) - fn(moved)) < 1e-6, name


@settings(max_examples=15, deadline=None)
@given(seeds, st.sampled_from(["amplitude_damping", "depolarizing", "phase_flip"]), st.floats(0.0, 1.0))
def test_trace_min_contractive_on_b(seed, kind, p):
    rho = states.random_density(4, seed=seed)
    out = channels.apply(channels.standard_channel(kind, p), rho, "B", (2, 2))
    assert mm.trace_min(out).value <= mm.trace_min(rho).value + 1e-8


def test_hs_min_ancilla_counterexample():
    rho = states.random_density(4, seed=3)
    anc = states.random_density(2, seed=4)
    big = np.kron(rho, anc)
    got = mm.hs_min(big, (2, 4)).value
    assert abs(got - mm.hs_min(rho).value * qcore.purity(anc)) < 1e-9
