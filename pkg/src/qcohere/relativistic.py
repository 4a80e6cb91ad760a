"""Unruh degradation of a shared Bell state (single-mode approximation).

Alice keeps an inertial qubit; Rob's half of ``(|00> + |11>)/sqrt(2)`` is
seen by a uniformly accelerated observer. Rob's Minkowski mode splits into
Rindler regions I and II, region II is traced out and the remaining
two-party state is analysed.

The only physical parameter is the ratio ``omega/a`` (units with
``hbar = c = k_B = 1``), entering through ``e^{-2 pi omega/a}``:

* fermions: ``cos r = (e^{-2 pi omega/a} + 1)^{-1/2}``, so ``cos^2 r`` runs
  from 1 (``a -> 0``) down to 1/2 (``a -> inf``);
* bosons: ``cosh r = (1 - e^{-2 pi omega/a})^{-1/2}``, unbounded as ``a -> inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import coherence, discord, qcore
from .exceptions import DimensionMismatch, ParamOutOfRange, TruncationInsufficient

DEFAULT_TAIL = 1e-8
MIN_LEVELS = 4
CURVE_MEASURES = ("negativity", "c_l1", "c_rel_entropy", "trace_discord")


@dataclass(frozen=True)
class UnruhParams:
    """Mode frequency and acceleration; ``acceleration = inf`` is the infinite-acceleration limit."""

    omega: float = 1.0
    acceleration: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ParamOutOfRange("omega must be positive")
        if not self.acceleration > 0:
            raise ParamOutOfRange("acceleration must be positive")

    @property
    def boltzmann(self) -> float:
        """``e^{-2 pi omega/a}``."""
        if math.isinf(self.acceleration):
            return 1.0
        return math.exp(-2.0 * math.pi * self.omega / self.acceleration)

    @property
    def r_fermionic(self) -> float:
        return math.acos((self.boltzmann + 1.0) ** -0.5)

    @property
    def r_bosonic(self) -> float:
        q = self.boltzmann
        if q >= 1.0:
            raise ParamOutOfRange("bosonic squeezing diverges at infinite acceleration")
        return math.acosh((1.0 - q) ** -0.5)

    def r(self, kind: str) -> float:
        return self.r_fermionic if kind == "fermionic" else self.r_bosonic

    @classmethod
    def from_r(cls, r: float, kind: str, omega: float = 1.0) -> UnruhParams:
        """Invert the ``r(a)`` relation; ``r = 0`` maps to a vanishing (tiny) acceleration."""
        if kind == "fermionic":
            if not 0.0 <= r <= math.pi / 4 + 1e-15:
                raise ParamOutOfRange("fermionic r must lie in [0, pi/4]")
            q = 1.0 / math.cos(r) ** 2 - 1.0
        elif kind == "bosonic":
            if r < 0:
                raise ParamOutOfRange("bosonic r must be nonnegative")
            q = math.tanh(r) ** 2
        else:
            raise ParamOutOfRange("kind must be 'fermionic' or 'bosonic'")
        if q >= 1.0 - 1e-15:
            return cls(omega, math.inf)
        if q <= 0.0:
            return cls(omega, 1e-300)
        return cls(omega, -2.0 * math.pi * omega / math.log(q))


def _r_of(up, kind):
    if isinstance(up, UnruhParams):
        return up.r(kind)
    r = float(up)
    if r < 0:
        raise ParamOutOfRange("r must be nonnegative")
    if kind == "fermionic" and r > math.pi / 4 + 1e-15:
        raise ParamOutOfRange("fermionic r must lie in [0, pi/4]")
    return r


def fermionic_degraded_bell(up) -> np.ndarray:
    """Two-qubit state after the fermionic mode map on Rob's side and the trace over region II.

    ``|0>_M -> cos r |0>_I|0>_II + sin r |1>_I|1>_II`` and ``|1>_M -> |1>_I|0>_II``.

    Parameters
    ----------
    up : UnruhParams or float
        Parameters, or ``r`` directly.
    """
    r = _r_of(up, "fermionic")
    c, s = math.cos(r), math.sin(r)
    # three-mode pure state on A (x) I (x) II, then trace II
    psi = np.zeros(8, dtype=complex)
    psi[0b000] += c / math.sqrt(2)
    psi[0b011] += s / math.sqrt(2)
    psi[0b110] += 1 / math.sqrt(2)
    rho = qcore.partial_trace(qcore.proj(psi), (4, 2), keep="A")
    return qcore.validate_density(rho)


@dataclass(frozen=True)
class TruncationConfig:
    """Fock cutoff for Rob's region-I mode (levels ``0 .. n_max + 1``) and the allowed trace deficit."""

    n_max: int
    tail_bound: float = DEFAULT_TAIL

    def __post_init__(self):
        if self.n_max < MIN_LEVELS:
            raise ParamOutOfRange(f"n_max must be at least {MIN_LEVELS}")
        if not self.tail_bound > 0:
            raise ParamOutOfRange("tail_bound must be positive")

    @classmethod
    def for_r(cls, r: float, tail_bound: float = DEFAULT_TAIL, cap: int = 5_000_000) -> TruncationConfig:
        """Smallest ``n_max`` whose exact trace deficit at ``r`` is below ``tail_bound``.

        The deficit decreases monotonically in ``n_max`` for large ``n_max``,
        so the cutoff is bracketed by doubling and then bisected.
        """
        hi = MIN_LEVELS
        while bosonic_deficit(r, hi) > tail_bound:
            hi *= 2
            if hi > cap:
                raise TruncationInsufficient(f"no cutoff below {cap} reaches deficit {tail_bound} at r = {r}")
        lo = max(MIN_LEVELS, hi // 2)
        if bosonic_deficit(r, lo) <= tail_bound:
            return cls(lo, tail_bound)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bosonic_deficit(r, mid) <= tail_bound:
                hi = mid
            else:
                lo = mid
        return cls(hi, tail_bound)


def bosonic_deficit(r: float, n_max: int) -> float:
    """Probability weight of the Bell-type state lost by cutting Rob's mode above level ``n_max + 1``.

    ``(1/2)[tanh^{2(n_max+1)} r + sum_{n > n_max} (n+1) tanh^{2n} r / cosh^4 r]``.
    """
    x = math.tanh(r) ** 2
    m = n_max + 1
    if x == 0.0:
        return 0.0
    tail0 = x ** m
    # sum_{n >= m} (n+1) x^n (1-x)^2 = x^m [(m+1)(1-x) + x]
    tail1 = x ** m * ((m + 1) * (1.0 - x) + x)
    return 0.5 * (tail0 + tail1)


def bosonic_degraded_bell(up, tc: TruncationConfig | None = None) -> np.ndarray:
    """Qubit (x) ``(n_max + 2)``-level state after the two-mode squeezing map on Rob's side.

    ``|0>_M -> (1/cosh r) sum_n tanh^n r |n>_I|n>_II`` and
    ``|1>_M -> (1/cosh^2 r) sum_n sqrt(n+1) tanh^n r |n+1>_I|n>_II``; region
    II is traced and the result renormalized after truncation.

    Raises
    ------
    TruncationInsufficient
        If the trace deficit at ``tc.n_max`` exceeds ``tc.tail_bound``.
    """
    r = _r_of(up, "bosonic")
    if tc is None:
        tc = TruncationConfig.for_r(r)
    deficit = bosonic_deficit(r, tc.n_max)
    if deficit > tc.tail_bound:
        raise TruncationInsufficient(f"deficit {deficit:.3g} at n_max = {tc.n_max} exceeds {tc.tail_bound:.3g}")
    D = tc.n_max + 2
    t, ch = math.tanh(r), math.cosh(r)
    n = np.arange(tc.n_max + 1)
    w = t ** (2 * n) / ch ** 2
    rho = np.zeros((2 * D, 2 * D))
    i0 = n             # |0>_A |n>_R
    i1 = D + n + 1     # |1>_A |n+1>_R
    rho[i0, i0] = 0.5 * w
    rho[i1, i1] = 0.5 * w * (n + 1) / ch ** 2
    off = 0.5 * w * np.sqrt(n + 1) / ch
    rho[i0, i1] = off
    rho[i1, i0] = off
    rho = rho / np.trace(rho)
    return qcore.validate_density(rho.astype(complex))


def _bosonic_blocks(r: float, n_max: int):
    """Entries of the normalized bosonic state on the pairs ``(|0,n>, |1,n+1>)``, ``n = 0..n_max``.

    Returns ``(a, b, o)``: the two diagonal entries and the coupling of each pair.
    Each pair block is rank one (``o^2 = a b``).
    """
    t, ch = math.tanh(r), math.cosh(r)
    n = np.arange(n_max + 1)
    with np.errstate(under="ignore"):
        w = np.exp(2 * n * math.log(t)) / ch ** 2 if t > 0 else (n == 0).astype(float) / ch ** 2
    a = 0.5 * w
    b = 0.5 * w * (n + 1) / ch ** 2
    o = 0.5 * w * np.sqrt(n + 1) / ch
    total = np.sum(a) + np.sum(b)
    return a / total, b / total, o / total


def bosonic_measures(up, tc: TruncationConfig | None = None) -> dict:
    """Negativity, ``C_l1`` and ``C_r`` of the bosonic degraded state from its block structure.

    Agrees with evaluating the dense matrix of :func:`bosonic_degraded_bell`,
    but costs ``O(n_max)``, so large squeezing (thousands of levels) stays cheap.
    """
    r = _r_of(up, "bosonic")
    if tc is None:
        tc = TruncationConfig.for_r(r)
    deficit = bosonic_deficit(r, tc.n_max)
    if deficit > tc.tail_bound:
        raise TruncationInsufficient(f"deficit {deficit:.3g} at n_max = {tc.n_max} exceeds {tc.tail_bound:.3g}")
    a, b, o = _bosonic_blocks(r, tc.n_max)
    c_l1 = 2.0 * float(np.sum(o))
    # rank-one pair blocks: the spectrum is {a_n + b_n}
    c_r = qcore.shannon_entropy(np.concatenate([a, b])) - qcore.shannon_entropy(a + b)
    # partial transpose on A couples |0,n+1> (weight a_{n+1}) with |1,n> (weight b_{n-1}) through o_n
    A = np.append(a[1:], 0.0)
    B = np.concatenate([[0.0], b[:-1]])
    lam = 0.5 * (A + B) - np.sqrt(0.25 * (A - B) ** 2 + o ** 2)
    neg = float(np.sum(-lam[lam < 0]))
    return {"negativity": neg, "c_l1": c_l1, "c_rel_entropy": float(c_r), "n_max": tc.n_max,
            "deficit": deficit}


def _state(kind, up, tail_bound):
    if kind == "fermionic":
        return fermionic_degraded_bell(up), None
    if kind == "bosonic":
        r = _r_of(up, "bosonic")
        tc = TruncationConfig.for_r(r, tail_bound)
        return bosonic_degraded_bell(r, tc), tc.n_max
    raise ParamOutOfRange("kind must be 'fermionic' or 'bosonic'")


def _evaluate(measure, rho):
    D = rho.shape[0] // 2
    if measure == "negativity":
        return discord.negativity(rho, (2, D))
    if measure == "c_l1":
        return coherence.c_l1(rho).value
    if measure == "c_rel_entropy":
        return coherence.c_rel_entropy(rho).value
    if measure == "trace_discord":
        if rho.shape != (4, 4):
            raise DimensionMismatch("trace discord is available for the two-qubit (fermionic) case only")
        return discord.trace_discord(rho).value
    raise ParamOutOfRange(f"measure must be one of {CURVE_MEASURES}")


def degradation_curve(kind: str, measure: str, grid, omega: float = 1.0,
                      tail_bound: float = DEFAULT_TAIL) -> list:
    """Measure of the degraded Bell state over a grid of accelerations.

    Returns
    -------
    list of dict
        Rows with keys ``acceleration``, ``r``, ``measure``, ``value`` and
        ``n_max`` (``None`` for fermions), in grid order.
    """
    accs = [float(a) for a in grid]
    if not accs:
        raise ParamOutOfRange("empty acceleration grid")
    if measure not in CURVE_MEASURES:
        raise ParamOutOfRange(f"measure must be one of {CURVE_MEASURES}")
    rows = []
    for a in accs:
        up = UnruhParams(omega, a)
        if kind == "bosonic":
            if measure == "trace_discord":
                raise DimensionMismatch("trace discord is available for the two-qubit (fermionic) case only")
            r = up.r_bosonic
            m = bosonic_measures(r, TruncationConfig.for_r(r, tail_bound))
            value, n_max = m[measure], m["n_max"]
        else:
            rho, n_max = _state(kind, up, tail_bound)
            value = _evaluate(measure, rho)
        rows.append({"acceleration": a, "r": up.r(kind), "measure": measure, "value": float(value),
                     "n_max": n_max})
    return rows
