import math

import numpy as np
import pytest

from qcohere import coherence, discord, qcore, states
from qcohere import relativistic as rel
from qcohere.exceptions import (
    DimensionMismatch,
    ParamOutOfRange,
    TruncationInsufficient,
)

PHI = qcore.proj(states.BELL_PHI_PLUS)
# negativity of the fermionic state at cos^2 r = 1/2 from its partial-transpose block
FERMIONIC_LIMIT_NEGATIVITY = 0.25


def test_unruh_params():
    up = rel.UnruhParams(1.0, 2.0)
    assert abs(math.cos(up.r_fermionic) - (math.exp(-math.pi) + 1) ** -0.5) < 1e-15
    assert abs(math.cosh(up.r_bosonic) - (1 - math.exp(-math.pi)) ** -0.5) < 1e-14
    inf = rel.UnruhParams(1.0, math.inf)
    assert abs(math.cos(inf.r_fermionic) ** 2 - 0.5) < 1e-15
    with pytest.raises(ParamOutOfRange):
        _ = inf.r_bosonic
    with pytest.raises(ParamOutOfRange):
        rel.UnruhParams(1.0, 0.0)
    for kind, r in (("fermionic", 0.4), ("bosonic", 1.3)):
        assert abs(rel.UnruhParams.from_r(r, kind).r(kind) - r) < 1e-12
    # only the ratio omega/a matters
    assert abs(rel.UnruhParams(2.0, 3.0).r_fermionic - rel.UnruhParams(4.0, 6.0).r_fermionic) < 1e-15


def test_small_r_recovers_bell_state():
    assert np.allclose(rel.fermionic_degraded_bell(rel.UnruhParams(1.0, 1e-3)), PHI, atol=1e-10)
    assert np.allclose(rel.fermionic_degraded_bell(0.0), PHI, atol=1e-15)
    rho = rel.bosonic_degraded_bell(0.0, rel.TruncationConfig(4))
    embed = np.zeros(12)
    embed[0] = embed[6 + 1] = 1 / math.sqrt(2)
    assert np.allclose(rho, qcore.proj(embed), atol=1e-10)


@pytest.mark.parametrize("r", [0.0, 0.2, 0.5, math.pi / 4])
def test_fermionic_states_are_valid(r):
    rho = rel.fermionic_degraded_bell(r)
    qcore.validate_density(rho)
    c, s = math.cos(r), math.sin(r)
    # direct construction of the traced state
    want = 0.5 * (c * c * qcore.proj([1, 0, 0, 0]) + s * s * qcore.proj([0, 1, 0, 0])
                  + qcore.proj([0, 0, 0, 1]))
    want[0, 3] = want[3, 0] = 0.5 * c
    assert np.allclose(rho, want, atol=1e-14)


def test_fermionic_limit():
    rho = rel.fermionic_degraded_bell(rel.UnruhParams(1.0, math.inf))
    neg = discord.negativity(rho)
    assert abs(neg - FERMIONIC_LIMIT_NEGATIVITY) < 1e-12
    assert neg > 0.05
    assert coherence.c_l1(rho).value > 0.5


def test_fermionic_negativity_monotone():
    rows = rel.degradation_curve("fermionic", "negativity", np.logspace(-2, 3, 64))
    vals = np.array([row["value"] for row in rows])
    assert np.all(np.diff(vals) <= 1e-12)
    assert abs(vals[0] - 0.5) < 1e-9
    assert FERMIONIC_LIMIT_NEGATIVITY < vals[-1] < 0.5
    assert all(row["n_max"] is None and row["measure"] == "negativity" for row in rows)


def test_fermionic_coherence_curve():
    rows = rel.degradation_curve("fermionic", "c_l1", [1e-3, 1.0, 1e6])
    assert abs(rows[0]["value"] - 1) < 1e-10
    assert rows[-1]["value"] > 0
    rows = rel.degradation_curve("fermionic", "trace_discord", [1e-3, 10.0])
    assert rows[1]["value"] < rows[0]["value"]


def test_bosonic_tail_example():
    assert rel.bosonic_deficit(1.0, 20) > 1e-8
    assert abs(rel.bosonic_deficit(1.0, 20) - 5.8e-5) < 1e-6
    with pytest.raises(TruncationInsufficient):
        rel.bosonic_degraded_bell(1.0, rel.TruncationConfig(20))
    tc = rel.TruncationConfig.for_r(1.0)
    assert tc.n_max == 37
    assert rel.bosonic_deficit(1.0, 37) <= 1e-8 < rel.bosonic_deficit(1.0, 36)
    assert rel.TruncationConfig.for_r(2.0).n_max == 284


def test_bosonic_deficit_matches_direct_sum():
    r, n_max = 0.8, 12
    t, ch = math.tanh(r), math.cosh(r)
    kept = sum(t ** (2 * n) / ch ** 2 for n in range(n_max + 1))
    kept += sum((n + 1) * t ** (2 * n) / ch ** 4 for n in range(n_max + 1))
    assert abs(rel.bosonic_deficit(r, n_max) - (1 - 0.5 * kept)) < 1e-14


def test_truncation_config_validation():
    with pytest.raises(ParamOutOfRange):
        rel.TruncationConfig(3)
    with pytest.raises(ParamOutOfRange):
        rel.TruncationConfig(10, 0.0)


@pytest.mark.parametrize("r", [0.3, 0.9, 1.5])
def test_bosonic_dense_and_block_agree(r):
    tc = rel.TruncationConfig.for_r(r)
    rho = rel.bosonic_degraded_bell(r, tc)
    qcore.validate_density(rho)
    D = tc.n_max + 2
    m = rel.bosonic_measures(r, tc)
    assert abs(m["negativity"] - discord.negativity(rho, (2, D))) < 1e-12
    assert abs(m["c_l1"] - coherence.c_l1(rho).value) < 1e-12
    assert abs(m["c_rel_entropy"] - coherence.c_rel_entropy(rho).value) < 1e-10


def test_bosonic_negativity_decreases():
    rs = np.linspace(0, 2.5, 26)
    negs = [rel.bosonic_measures(r)["negativity"] for r in rs]
    assert np.all(np.diff(negs) < 0)
    small = rel.bosonic_measures(2.0, rel.TruncationConfig.for_r(2.0))["negativity"]
    assert small <= rel.bosonic_measures(1.0)["negativity"]


def test_bosonic_curve_endpoint():
    rows = rel.degradation_curve("bosonic", "negativity", [0.1, 10.0, 3000.0])
    assert rows[-1]["value"] <= 1e-3
    assert rows[0]["value"] > rows[1]["value"] > rows[2]["value"]
    assert all(rel.bosonic_deficit(row["r"], row["n_max"]) <= 1e-8 for row in rows)
    with pytest.raises(DimensionMismatch):
        rel.degradation_curve("bosonic", "trace_discord", [1.0])


def test_curve_errors():
    with pytest.raises(ParamOutOfRange):
        rel.degradation_curve("fermionic", "negativity", [])
    with pytest.raises(ParamOutOfRange):
        rel.degradation_curve("fermionic", "concurrence", [1.0])
    with pytest.raises(ParamOutOfRange):
        rel.fermionic_degraded_bell(1.0)
