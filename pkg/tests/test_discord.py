import math

import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st

from qcohere import channels, discord, qcore, states
from qcohere.exceptions import ParamOutOfRange

seeds = st.integers(min_value=0, max_value=2 ** 31 - 1)
PHI = qcore.proj(states.BELL_PHI_PLUS)


def measure_a(rho, n, db=2):
    """Independent Pi^A(rho) for a qubit measurement along n."""
    out = np.zeros_like(rho)
    for sign in (1, -1):
        P = np.kron((np.eye(2) + sign * qcore.sigma_dot(n)) / 2, np.eye(db))
        out = out + P @ rho @ P
    return out


def sphere_min(f, n_theta=30, n_phi=60):
    """Coarse grid plus Nelder-Mead over the Bloch sphere; test-only oracle."""
    best = None
    for th in np.linspace(0, np.pi, n_theta):
        for ph in np.linspace(0, 2 * np.pi, n_phi, endpoint=False):
            v = f(qcore.unit_vector(th, ph))
            if best is None or v < best[0]:
                best = (v, th, ph)
    res = scipy.optimize.minimize(lambda a: f(qcore.unit_vector(*a)), best[1:], method="Nelder-Mead",
                                  options={"xatol": 1e-10, "fatol": 1e-14})
    return min(best[0], res.fun)


def random_cq_state(seed, db=2):
    rng = np.random.default_rng(seed)
    n = qcore.unit_vector(np.arccos(rng.uniform(-1, 1)), rng.uniform(0, 2 * np.pi))
    out = np.zeros((2 * db, 2 * db), dtype=complex)
    p = rng.dirichlet([1, 1])
    for k, sign in enumerate((1, -1)):
        P = (np.eye(2) + sign * qcore.sigma_dot(n)) / 2
        out += p[k] * np.kron(P, states.random_density(db, seed=int(rng.integers(2 ** 31))))
    return out


# ---------------------------------------------------------------------------
# examples
# ---------------------------------------------------------------------------

def test_entropic_discord_examples():
    assert abs(discord.entropic_discord_2q(PHI).value - 1) < 1e-8
    assert abs(discord.entropic_discord_2q(states.werner(-1, 2)).value - 1) < 1e-8
    rho = states.bell_diagonal((0.6, -0.18, 0.3))
    assert abs(discord.entropic_discord_2q(rho).value - discord.entropic_discord_bell((0.6, -0.18, 0.3))) < 1e-8
    auto = discord.entropic_discord_2q(rho, method="auto")
    assert auto.method == "analytic"


def test_entropic_discord_side_b():
    rho = states.random_density(4, seed=21)
    swapped = qcore.swap_subsystems(rho, (2, 2))
    assert abs(discord.entropic_discord_2q(rho, side="B").value - discord.entropic_discord_2q(swapped).value) < 1e-8


def test_hs_discord_examples():
    for x in np.linspace(-1, 1, 9):
        assert abs(discord.hs_discord(states.werner(x, 2)).value - (2 * x - 1) ** 2 / 18) < 1e-12
    rho = states.bell_diagonal((0.5, 0.3, 0.1))
    assert abs(discord.hs_discord(rho).value - discord.hs_sweep(rho).value) < 1e-6
    r6 = states.random_density(6, seed=1)
    assert abs(discord.hs_discord_qubit_qutrit(r6) - discord.hs_sweep(r6, (2, 3)).value) < 1e-6
    r9 = states.random_density(9, seed=1)
    assert discord.hs_discord_lower_bound(r9, (3, 3)) <= discord.hs_discord(r9, (3, 3)).value + 1e-9


def test_trace_discord_examples():
    rho = states.bell_diagonal((0.6, -0.18, 0.3))
    assert abs(discord.trace_discord(rho).value - 0.3) < 1e-12
    x = states.x_state(states.XStateParams((0.35, 0.15, 0.15, 0.35), 0.1, 0.05))
    assert abs(discord.trace_discord_x(x) - discord.trace_sweep(x).value) < 1e-5
    assert discord.intermediate([0.8, -0.4, 0.2]) == 0.4


def test_geometric_classical_total_trace():
    ct, tt, ctt = discord.geometric_classical_total_trace(states.bell_diagonal((0.6, -0.18, 0.3)))
    assert abs(ct - 0.6) < 1e-12 and abs(tt - 0.6) < 1e-12
    ct, tt, ctt = discord.geometric_classical_total_trace(PHI)
    assert abs(ctt - (math.sqrt(2) - 1)) < 1e-12


def test_bures_examples():
    psi = np.sqrt(0.7) * np.kron([1, 0], [1, 0]) + np.sqrt(0.3) * np.kron([0, 1], [0, 1])
    res = discord.bures_discord(qcore.proj(psi))
    assert abs(res.extras["F_max"] - 0.7) < 1e-10
    rho = states.bell_diagonal((0.6, -0.18, 0.3))
    assert abs(discord.bures_discord(rho).value - discord.bures_discord(rho, method="numeric").value) < 1e-5


def test_hellinger_and_lqu_examples():
    psi = states.random_pure(4, seed=3)
    rho_a = qcore.partial_trace(qcore.proj(psi), (2, 2), keep="A")
    assert abs(discord.lqu(qcore.proj(psi)).value - 2 * (1 - qcore.purity(rho_a))) < 1e-9
    assert abs(discord.lqu(PHI).value - 2 * discord.hellinger_discord(PHI).value) < 1e-12
    for x in (-0.5, 0.2, 0.9):
        w = states.werner(x, 2)
        assert abs(discord.q_a(w).value - discord.q_a_werner(x, 2)) < 1e-10
    assert abs(discord.q_a_werner(0.5, 2) - (2 - 0.5 - math.sqrt(3 * 0.75)) / 6) < 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_hellinger_against_sweep(seed):
    rho = states.random_x_state(seed=seed) if seed % 2 else states.bell_diagonal(states.random_bell_params(seed=seed))
    s = qcore.matrix_sqrt(rho)
    oracle = sphere_min(lambda n: qcore.hs_norm(s - measure_a(s, n)) ** 2)
    assert abs(discord.hellinger_discord(rho).value - oracle) < 1e-5
    assert abs(discord.hellinger_discord(rho, method="general").value - oracle) < 1e-5


def test_rel_entropy_discord_bell():
    res = discord.rel_entropy_discord_bell((1, -1, 1))
    assert abs(res.D_R - 1) < 1e-12
    p = states.BellDiagonalParams(0.5, 0.3, 0.1)
    rho = states.bell_diagonal(p)
    k = int(np.argmax(np.abs(p.c)))
    n = np.eye(3)[k]
    chi = measure_a(rho, n)
    chi = qcore.swap_subsystems(measure_a(qcore.swap_subsystems(chi, (2, 2)), n), (2, 2))
    expected = qcore.von_neumann_entropy(chi) - qcore.von_neumann_entropy(rho)
    assert abs(discord.rel_entropy_discord_bell(p).D_R - expected) < 1e-10


def test_deficits():
    assert abs(discord.one_way_deficit(PHI).value - 1) < 1e-8
    assert abs(discord.zero_way_deficit(PHI).value - 1) < 1e-8
    rho = states.bell_diagonal((0.5, 0.3, 0.1))
    res = discord.one_way_deficit(rho)
    at = qcore.von_neumann_entropy(measure_a(rho, res.witness["n"])) - qcore.von_neumann_entropy(rho)
    assert abs(res.value - at) < 1e-6


def test_negativity_of_quantumness():
    assert abs(discord.negativity_of_quantumness(states.werner(1, 2)).value - 1 / 6) < 1e-9
    assert abs(discord.q_n_werner(1, 2) - 1 / 6) < 1e-15
    p = (0.5, -0.3, 0.1)
    assert abs(discord.negativity_of_quantumness(states.bell_diagonal(p)).value - 0.3 / 2) < 1e-9


def test_noncommutativity():
    dn, dn2 = discord.noncommutativity_discord(PHI)
    pn, pn2 = discord.noncommutativity_pure([math.sqrt(0.5), math.sqrt(0.5)])
    assert abs(dn - pn) < 1e-12 and abs(dn2 - pn2) < 1e-12
    psi = np.sqrt(0.8) * np.kron([1, 0], [1, 0]) + np.sqrt(0.2) * np.kron([0, 1], [0, 1])
    assert np.allclose(discord.noncommutativity_discord(qcore.proj(psi)),
                       discord.noncommutativity_pure([math.sqrt(0.8), math.sqrt(0.2)]), atol=1e-12)
    rho = states.random_density(4, seed=17)
    assert (discord.noncommutativity_discord(rho)[0] > 1e-8) == (discord.trace_discord(rho).value > 1e-8)
    # the blocks act on B, so the measure vanishes when B is classical
    qc = 0.4 * np.kron(states.random_density(2, seed=1), np.diag([1.0, 0.0])) + \
        0.6 * np.kron(states.random_density(2, seed=2), np.diag([0.0, 1.0]))
    assert max(discord.noncommutativity_discord(qc)) < 1e-12
    assert discord.noncommutativity_discord(random_cq_state(3))[0] > 1e-3


def test_q_discord():
    w = states.werner(0.8, 2)
    assert abs(discord.q_discord(w, 2).value - discord.hs_discord(w).value) < 1e-8
    rho = states.bell_diagonal((0.5, 0.3, 0.1))
    # Tsallis entropies are in natural units
    assert abs(discord.q_discord(rho, 1.0001).value - discord.one_way_deficit(rho).value * math.log(2)) < 1e-3
    with pytest.raises(ParamOutOfRange):
        discord.q_discord(rho, 1.0)


def test_negativity_helper():
    assert abs(discord.negativity(PHI) - 0.5) < 1e-12


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

ALL = {
    "entropic": lambda r: discord.entropic_discord_2q(r).value,
    "hs": lambda r: discord.hs_discord(r).value,
    "trace": lambda r: discord.trace_discord(r).value,
    "bures": lambda r: discord.bures_discord(r).value,
    "hellinger": lambda r: discord.hellinger_discord(r).value,
    "lqu": lambda r: discord.lqu(r).value,
    "one_way": lambda r: discord.one_way_deficit(r).value,
}


@pytest.mark.parametrize("seed", range(4))
def test_zero_on_product_and_cq(seed):
    prod = np.kron(states.random_density(2, seed=seed), states.random_density(2, seed=seed + 50))
    cq = random_cq_state(seed)
    for name, fn in ALL.items():
        assert abs(fn(prod)) < 1e-6, name
        assert abs(fn(cq)) < 1e-6, name


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_local_unitary_invariance(seed):
    rho = states.random_density(4, seed=seed)
    U = np.kron(qcore.random_unitary(2, seed=seed + 1), qcore.random_unitary(2, seed=seed + 2))
    moved = U @ rho @ U.conj().T
    for name, fn in ALL.items():
        assert abs(fn(rho) - fn(moved)) < 1e-6, name


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_bell_and_x_analytic_vs_sweep(seed):
    p = states.random_bell_params(seed=seed)
    rho = states.bell_diagonal(p)
    assert abs(discord.trace_discord(rho).value - discord.trace_sweep(rho).value) < 1e-5
    assert abs(discord.hs_discord(rho).value - discord.hs_sweep(rho).value) < 1e-5
    assert abs(discord.bures_discord(rho).value - discord.bures_discord(rho, method="numeric").value) < 1e-5
    assert abs(discord.hellinger_discord(rho).value - discord.hellinger_discord(rho, method="general").value) < 1e-5


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from(["amplitude_damping", "depolarizing", "phase_damping", "bit_flip"]),
       st.floats(0.0, 1.0))
def test_contractive_on_unmeasured_side(seed, kind, p):
    rho = states.random_density(4, seed=seed)
    out = channels.apply(channels.standard_channel(kind, p), rho, "B", (2, 2))
    assert discord.trace_discord(out).value <= discord.trace_discord(rho).value + 1e-8
    assert discord.bures_discord(out).value <= discord.bures_discord(rho).value + 1e-8


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_trace_discord_bounds_negativity(seed):
    rho = states.random_density(4, rank=2, seed=seed)
    assert discord.trace_discord(rho).value >= discord.negativity(rho) - 1e-8
