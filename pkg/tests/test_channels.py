import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcohere import channels, coherence, qcore, states
from qcohere.exceptions import (
    NoSolution,
    NotApplicable,
    NotPSD,
    ParamOutOfRange,
    ValidationError,
)

seeds = st.integers(min_value=0, max_value=2 ** 31 - 1)
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
PAULI_KINDS = ["bit_flip", "phase_flip", "bit_phase_flip", "depolarizing"]


def is_diagonal(m, tol=1e-10):
    return np.max(np.abs(m - np.diag(np.diag(m)))) <= tol


def test_standard_channel_examples():
    rho = states.random_density(2, seed=4)
    assert np.allclose(channels.standard_channel("phase_damping", 1.0)(rho), rho, atol=1e-14)
    dep = channels.standard_channel("depolarizing", 0.7)
    assert np.allclose(dep(np.eye(2) / 2), np.eye(2) / 2, atol=1e-14)
    ad = channels.standard_channel("amplitude_damping", 1.0)
    for s in range(5):
        assert np.allclose(ad(states.random_density(2, seed=s)), np.diag([1, 0]), atol=1e-14)
    with pytest.raises(ParamOutOfRange):
        channels.standard_channel("bit_flip", 1.2)
    with pytest.raises(ValidationError):
        channels.standard_channel("teleport", 0.1)


@pytest.mark.parametrize("kind", channels.STANDARD_KINDS)
def test_completeness(kind):
    ch = channels.standard_channel(kind, 0.37)
    s = sum(k.conj().T @ k for k in ch.kraus_ops)
    assert np.allclose(s, np.eye(2), atol=1e-12)


def test_invalid_kraus_set():
    with pytest.raises(ValidationError):
        channels.KrausChannel([np.diag([1.0, 0.5])])


def test_transfer_matrix_examples():
    assert np.allclose(channels.transfer_matrix(channels.identity_channel(3)).T, np.eye(9), atol=1e-12)
    p = 0.3
    T = channels.transfer_matrix(channels.standard_channel("phase_flip", p)).T
    # gell_mann(2) lists the off-diagonal pair first, so the ordering is (I, x, y, z)
    assert np.allclose(T, np.diag([1, 1 - 2 * p, 1 - 2 * p, 1]), atol=1e-12)


def test_apply_on_subsystem_matches_tensor():
    rho = states.random_density(2, seed=1)
    sigma = states.random_density(3, seed=2)
    bf = channels.standard_channel("bit_flip", 0.25)
    big = np.kron(rho, sigma)
    got = channels.apply(bf, big, "A", (2, 3))
    want = bf.tensor(channels.identity_channel(3))(big)
    assert np.allclose(got, want, atol=1e-13)
    assert np.allclose(got, np.kron(bf(rho), sigma), atol=1e-13)


def test_apply_each_three_qubits():
    rho = states.random_density(8, seed=5)
    pf = channels.standard_channel("phase_flip", 0.2)
    full = pf.tensor(pf).tensor(pf)
    assert np.allclose(channels.apply_each(pf, rho, 3), full(rho), atol=1e-12)


@pytest.mark.parametrize("kind", channels.STANDARD_KINDS)
def test_transfer_consistency(kind, rng):
    ch = channels.standard_channel(kind, rng.uniform())
    T = channels.transfer_matrix(ch)
    for s in range(100):
        rho = states.random_density(2, seed=s)
        out = ch(rho)
        assert abs(np.trace(out) - 1) < 1e-10
        assert np.allclose(channels.from_coordinates(T.evolve(channels.coordinates(rho))), out, atol=1e-9)


def test_transfer_consistency_qutrit():
    ch = channels.KrausChannel([qcore.random_unitary(3, seed=8)]).compose(channels.dephasing_channel(3, 0.4))
    T = channels.transfer_matrix(ch)
    for s in range(50):
        rho = states.random_density(3, seed=s)
        assert np.allclose(T.evolve(channels.coordinates(rho)), channels.coordinates(ch(rho)), atol=1e-9)


def test_classify_examples():
    c = channels.classify(channels.standard_channel("phase_flip", 0.3))
    assert c.unital and c.strictly_incoherent and c.incoherent
    assert not c.coherence_breaking
    c = channels.classify(channels.dephasing_channel(3))
    assert c.coherence_breaking and c.semiclassical and c.incoherent
    assert len(c.cbc_witness) == 3
    c = channels.classify(channels.standard_channel("amplitude_damping", 0.5))
    assert c.incoherent and not c.unital
    c = channels.classify(channels.unitary_channel(H))
    assert c.unital and not c.incoherent and not c.coherence_breaking


def test_cbc_witness_reproduces_channel():
    # measure-and-prepare map onto the incoherent basis
    ops = [np.outer([1, 0], H[:, 0].conj()), np.outer([0, 1], H[:, 1].conj())]
    ch = channels.KrausChannel(ops)
    c = channels.classify(ch)
    assert c.coherence_breaking
    rho = states.random_density(2, seed=3)
    rebuilt = sum(np.trace(rho @ F) * np.diag(np.eye(2)[i]) for i, F in enumerate(c.cbc_witness))
    assert np.allclose(rebuilt, ch(rho), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_classification_soundness(seed):
    rng = np.random.default_rng(seed)
    kind = rng.choice(channels.STANDARD_KINDS)
    ch = channels.standard_channel(str(kind), rng.uniform())
    c = channels.classify(ch)
    if c.strictly_incoherent:
        assert c.incoherent
    if c.coherence_breaking:
        assert c.incoherent
    if c.incoherent:
        for _ in range(100):
            assert is_diagonal(ch(np.diag(rng.dirichlet(np.ones(2)))))


def test_discord_freezing_predicate():
    assert channels.discord_freezing_condition((0.6, -0.18, 0.3))
    assert not channels.discord_freezing_condition((0.5, -0.5, 0.5))
    with pytest.raises(NotPSD):
        channels.discord_freezing_condition((0.5, 0.5, 0.5))
    assert not channels.discord_freezing_condition((0.0, 0.0, 0.3))
    lo, hi = channels.discord_freezing_window((0.6, -0.18, 0.3))
    assert abs(lo - 0.5) < 1e-15 and hi == 1.0


def test_coherence_freezing_predicates():
    assert channels.coherence_freezing_condition((0.6, -0.18, 0.3), 2)
    assert channels.coherence_freezing_condition((0.6, 0.18, 0.3), 4)
    with pytest.raises(ParamOutOfRange):
        channels.coherence_freezing_condition((0.6, -0.18, 0.3), 3)
    assert channels.l1_freezing_condition_general(channels.transfer_matrix(channels.identity_channel(2)))
    pf = channels.standard_channel("phase_flip", 0.3)
    assert not channels.l1_freezing_condition_general(channels.transfer_matrix(pf))
    rho = qcore.proj(states.maximally_coherent(2))
    assert coherence.c_l1(pf(rho)).value < coherence.c_l1(rho).value - 0.5


def test_l1_freezing_general_unitary_phase():
    # a diagonal unitary rotates each coherence pair orthogonally
    U = np.diag(np.exp(1j * np.array([0.0, 0.4, 1.3])))
    T = channels.transfer_matrix(channels.unitary_channel(U))
    assert channels.l1_freezing_condition_general(T)
    rho = states.random_density(3, seed=2)
    assert abs(coherence.c_l1(U @ rho @ U.conj().T).value - coherence.c_l1(rho).value) < 1e-12


def test_two_qubit_l1_freezing_predicate():
    rho = states.bell_diagonal((0.6, -0.18, 0.3))
    assert channels.l1_freezing_condition_two_qubit(rho)
    assert not channels.l1_freezing_condition_two_qubit(states.random_density(4, seed=1))


def test_universal_freezing_two_sided_bit_flip(rng):
    found = 0
    while found < 20:
        c1, c3 = rng.uniform(-1, 1, 2)
        p = (c1, -c1 * c3, c3)
        if not states.BellDiagonalParams(*p).is_valid():
            continue
        assert channels.coherence_freezing_condition(p, 2)
        found += 1
        rho = states.bell_diagonal(p)
        ref = {name: f(rho).value for name, f in (("l1", coherence.c_l1), ("re", coherence.c_rel_entropy),
                                                   ("tr", coherence.c_trace))}
        for q in np.linspace(0, 1, 7):
            out = channels.apply_each(channels.standard_channel("bit_flip", q), rho, 2)
            assert abs(coherence.c_l1(out).value - ref["l1"]) < 1e-6
            assert abs(coherence.c_rel_entropy(out).value - ref["re"]) < 1e-6
            assert abs(coherence.c_trace(out).value - ref["tr"]) < 1e-6


def test_bell_diagonal_n():
    assert np.allclose(channels.bell_diagonal_n((0.5, 0.3, 0.1), 2), states.bell_diagonal((0.5, 0.3, 0.1)))
    rho = channels.bell_diagonal_n((0.4, 0.16, -0.4), 4)
    assert abs(np.trace(rho) - 1) < 1e-12


@pytest.mark.parametrize("kind,q", [("phase_flip", lambda p: 1 - 2 * p), ("depolarizing", lambda p: 1 - p),
                                    ("bit_flip", lambda p: 1 - 2 * p)])
def test_factorization_examples(kind, q):
    p = 0.35
    rep = channels.factorization_check(channels.standard_channel(kind, p), family=(1, 2) if kind != "bit_flip" else (2,))
    assert abs(rep.q - q(p)) < 1e-12
    assert rep.max_rel_deviation < 1e-9
    assert rep.samples == 100


def test_factorization_identity_and_failure():
    rep = channels.factorization_check(channels.identity_channel(2))
    assert abs(rep.q - 1) < 1e-12 and rep.max_rel_deviation < 1e-12
    with pytest.raises(NotApplicable):
        channels.factorization_check(channels.unitary_channel(qcore.random_unitary(2, seed=5)))
    with pytest.raises(NotApplicable):
        # bit flip damps y but not x, so the pair has no common eigenvalue
        channels.factorization_check(channels.standard_channel("bit_flip", 0.2), family=(1, 2))


def test_factorization_direct_phase_flip(rng):
    p = 0.2
    ch = channels.standard_channel("phase_flip", p)
    for _ in range(100):
        r = rng.normal(size=3)
        r[2] *= 0.3
        r *= rng.uniform(0, 1) / np.linalg.norm(r)
        rho = 0.5 * (np.eye(2) + sum(ri * s for ri, s in zip(r, qcore.PAULIS)))
        c = coherence.c_l1(rho).value
        assert abs(coherence.c_l1(ch(rho)).value - (1 - 2 * p) * c) <= 1e-12 * max(c, 1)


def test_coherence_breaking_index():
    assert channels.coherence_breaking_index(channels.dephasing_channel(2)) == 1
    assert channels.coherence_breaking_index(channels.identity_channel(2), cap=8) is channels.UNBOUNDED
    M = np.array([[0.0, 0.5, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.5]])
    ch = channels.from_qubit_affine(M)
    assert not channels.classify(ch).coherence_breaking
    assert channels.coherence_breaking_index(ch) == 2
    assert str(channels.UNBOUNDED) == "Unbounded"


def test_cohering_power_examples():
    assert abs(channels.cohering_power(channels.unitary_channel(H)) - 1) < 1e-15
    assert channels.cohering_power(channels.identity_channel(3)) == 0.0
    HH = channels.unitary_channel(np.kron(H, H))
    assert abs(channels.cohering_power(HH) - 3) < 1e-12
    assert abs(channels.cohering_power(channels.unitary_channel(H), "rel_entropy") - 1) < 1e-12
    with pytest.raises(ParamOutOfRange):
        channels.cohering_power(channels.identity_channel(2), "l2")


@pytest.mark.parametrize("seed", range(4))
def test_cohering_and_decohering_qubit_unitary(seed):
    U = qcore.random_unitary(2, seed=seed)
    ch = channels.unitary_channel(U)
    cp = channels.cohering_power(ch)
    a2 = abs(U[0, 0]) ** 2
    # U|0> has l1 coherence 2|a||b|; the worst maximally coherent input keeps ||a|^2 - |b|^2|
    assert abs(cp - 2 * np.sqrt(a2 * (1 - a2))) < 1e-12
    assert abs(channels.decohering_power(ch) - (1 - abs(2 * a2 - 1))) < 1e-6


def test_cohering_equals_decohering_for_unbiased_qubit_unitary():
    for phi in (0.0, 0.7, 2.1):
        U = np.array([[1, np.exp(1j * phi)], [-np.exp(-1j * phi), 1]]) / np.sqrt(2)
        ch = channels.unitary_channel(U)
        assert abs(channels.decohering_power(ch) - channels.cohering_power(ch)) < 1e-6
    # a rotation by pi/8 about y is a counterexample to equality in general
    t = np.pi / 8
    ch = channels.unitary_channel(np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]))
    assert abs(channels.cohering_power(ch) - np.sin(2 * t)) < 1e-12
    assert abs(channels.decohering_power(ch) - (1 - np.cos(2 * t))) < 1e-6


def test_decohering_power_dephasing():
    assert abs(channels.decohering_power(channels.dephasing_channel(3)) - 2) < 1e-9
    assert abs(channels.decohering_power(channels.identity_channel(3))) < 1e-9


def test_average_cohering_power():
    assert abs(channels.average_cohering_power_unitary(H) - 1 / 6) < 1e-15
    P = np.eye(3)[[2, 0, 1]] * np.exp(1j * np.array([0.1, 0.2, 0.3]))
    assert abs(channels.average_cohering_power_unitary(P)) < 1e-15
    F = np.exp(2j * np.pi * np.outer(range(4), range(4)) / 4) / 2
    assert abs(channels.average_cohering_power_unitary(F) - 3 / 20) < 1e-14
    U = qcore.random_unitary(3, seed=7)
    assert channels.average_cohering_power_unitary(U) < 2 / 12
    assert abs(channels.average_cohering_power_unital(channels.unitary_channel(U))
               - channels.average_cohering_power_unitary(U)) < 1e-12


def test_average_cohering_power_monte_carlo():
    U = qcore.random_unitary(3, seed=21)
    vals = []
    for s in range(10_000):
        psi = states.random_pure(3, seed=s)
        out = U @ np.diag(np.abs(psi) ** 2) @ U.conj().T
        vals.append(np.sum(np.abs(out) ** 2) - np.sum(np.abs(np.diag(out)) ** 2))
    vals = np.array(vals)
    se = vals.std(ddof=1) / np.sqrt(vals.size)
    assert abs(vals.mean() - channels.average_cohering_power_unitary(U)) < 3 * se


def test_ssio_max_coherence():
    for d in (2, 3, 4):
        value, p = channels.ssio_max_coherence(qcore.proj(states.maximally_coherent(d)))
        assert abs(value - (d - 1)) < 1e-12 and abs(p - 1) < 1e-12
    value, p = channels.ssio_max_coherence(np.diag([0.5, 0.3, 0.2]))
    assert abs(value) < 1e-12
    from qcohere.exceptions import SingularDiagonal
    with pytest.raises(SingularDiagonal):
        channels.ssio_max_coherence(np.diag([1.0, 0.0]))


def test_ssio_qubit_against_random_filters(rng):
    rho = np.array([[0.7, 0.3], [0.3, 0.3]])
    value, p = channels.ssio_max_coherence(rho)
    dg = np.diag(rho)
    A = rho / np.sqrt(np.outer(dg, dg))
    assert abs(value - (np.linalg.eigvalsh(A)[-1] - 1)) < 1e-12
    K = channels.ssio_optimal_kraus(rho)
    out = K @ rho @ K.T
    assert abs(np.trace(out) - p) < 1e-12
    assert abs(coherence.c_l1(out / np.trace(out)).value - value) < 1e-12
    best = 0.0
    for _ in range(10_000):
        a, b = rng.uniform(0, 1, 2)
        K = np.diag([a, b]) if rng.uniform() < 0.5 else np.array([[0, a], [b, 0]])
        out = K @ rho @ K.conj().T
        if np.trace(out).real > 1e-12:
            best = max(best, coherence.c_l1(out / np.trace(out)).value)
    assert best <= value + 1e-12
    assert best > value - 1e-3


def test_energy_bounded_max_coherence():
    Hq = np.diag([0.0, 1.0])
    assert channels.energy_bounded_max_coherence(Hq, 0.3, 0.0) == 0.0
    assert abs(channels.energy_bounded_max_coherence(Hq, 1e-3, 0.5) - 1.0) < 1e-9
    with pytest.raises(NoSolution):
        channels.energy_bounded_max_coherence(Hq, 1e-3, 0.6)
    T, dE = 0.7, 0.1
    bound = channels.energy_bounded_max_coherence(Hq, T, dE)
    e0 = channels._mean_energy(np.array([0.0, 1.0]), T)
    # invert the qubit thermal energy e = 1/(1+exp(1/T')) directly
    t_prime = 1.0 / np.log(1.0 / (e0 + dE) - 1.0)
    want = qcore.von_neumann_entropy(channels.thermal_state(Hq, t_prime)) - qcore.von_neumann_entropy(
        channels.thermal_state(Hq, T))
    assert abs(bound - want) < 1e-9


def test_channel_json_roundtrip():
    ch = channels.standard_channel("generalized_amplitude_damping", 0.4, n_th=0.2)
    back = channels.KrausChannel.from_json(ch.to_json())
    assert back.label == ch.label
    for a, b in zip(ch.kraus_ops, back.kraus_ops):
        assert np.array_equal(a, b)


def test_from_choi_and_composition():
    ch = channels.standard_channel("amplitude_damping", 0.3)
    re = channels.from_choi(ch.choi(), 2, 2)
    rho = states.random_density(2, seed=6)
    assert np.allclose(re(rho), ch(rho), atol=1e-12)
    twice = ch.compose(ch)
    assert np.allclose(twice(rho), ch(ch(rho)), atol=1e-12)
    assert twice.kraus_rank() == 2
