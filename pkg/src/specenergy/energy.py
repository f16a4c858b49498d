"""Weighted infinite-order energy functionals.

The central object is the truncated functional

    E(t) = sum_{n=0}^{N} a_n (t - t0)^n ||u(t)||^2 at order n*theta + base,

where `base` is the critical index of the model (or 0 for plain L^2 ladders)
and the weights a_n come from one of the recursion rules below, always with
a_0 = 1.  Truncation keeps the non-increasing property because the dropped
telescoping remainder has a sign.

Weight rules:

    linear_heat       a_n = 2^n / n!              (telescoping recursion n*a_n = 2*a_{n-1})
    burgers_sobolev   a_n (n + (3/4) C_n^{8/3} (caux/a_1) q^{8/3}) = (3/4) a_{n-1},
                      a_1 solved implicitly from the n = 1 equation,
                      q = initial-data norm at order -1/2
    burgers_l2        a_n = a_{n-1} / (2 C_n^4 (1 + D0)^4)
    general_l2        a_n = 1 / (C_n D0^n)
    empirical         calibrated per order against a stored trajectory

The fractional-Leibniz constants C_n are inputs, not derived: no sharp torus
values exist.  Default C_n = K*(1+n)^p with K = 2, p = 1/2, overridable, and
calibrate_weights provides fully empirical alternatives.

Rule evaluation stays in exact rational arithmetic whenever every input is
rational, so the closed-form/recursion examples are reproduced exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .spectral import SpectralField, sobolev_norm

__all__ = [
    "WeightSequence",
    "EnergyTrace",
    "EnergyValue",
    "MonotonicityReport",
    "DecayFit",
    "SmallnessError",
    "kato_ponce_constants",
    "weights_linear",
    "weights_burgers_sobolev",
    "weights_burgers_l2",
    "weights_general",
    "energy_eval",
    "ladder_orders",
    "monotonicity_report",
    "decay_fit",
    "calibrate_weights",
    "measured_decay_constant",
]

# Relative per-increment slack: absorbs time-integration error without
# masking genuine violations, which are orders of magnitude larger.
MONOTONE_TOL = 1e-10


class SmallnessError(ValueError):
    """The implicit first-order weight equation has no positive solution."""


@dataclass(frozen=True)
class WeightSequence:
    """Weights a_0..a_N with the rule and parameters that generated them."""

    rule: str
    values: tuple
    params: dict

    def __post_init__(self):
        if len(self.values) == 0 or self.values[0] != 1:
            raise ValueError("weight sequences are normalized to a_0 = 1")

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def as_floats(self) -> np.ndarray:
        return np.array([float(a) for a in self.values])

    def as_dict(self) -> dict:
        def plain(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, (tuple, list)):
                return [plain(x) for x in v]
            if isinstance(v, dict):
                return {k: plain(x) for k, x in v.items()}
            return v

        return {
            "rule": self.rule,
            "params": plain(self.params),
            "values": [float(a) for a in self.values],
        }


def kato_ponce_constants(n_max: int, scale: float = 2.0, power: float = 0.5) -> tuple:
    """Default fractional-Leibniz constant sequence C_1..C_{n_max}."""
    return tuple(scale * (1.0 + n) ** power for n in range(1, n_max + 1))


def _exact_or_float(x):
    if isinstance(x, Rational):
        return Fraction(x)
    return float(x)


def _normalize_constants(C, n_max: int):
    if C is None:
        return kato_ponce_constants(n_max)
    C = tuple(_exact_or_float(c) for c in C)
    if len(C) < n_max:
        raise ValueError(f"need {n_max} constants C_1..C_{n_max}, got {len(C)}")
    for c in C:
        if not c > 0:
            raise ValueError("constants must be positive")
    return C[:n_max]


def weights_linear(n_max: int) -> WeightSequence:
    """Telescoping weights a_n = 2^n/n! of the exact-dissipation ladder."""
    if n_max < 0:
        raise ValueError("order must be nonnegative")
    values = [Fraction(2**n, math.factorial(n)) for n in range(n_max + 1)]
    return WeightSequence("linear_heat", tuple(values), {})


def weights_burgers_sobolev(n_max: int, C=None, caux=1.0, u0_norm=0.0) -> WeightSequence:
    """Recursion closing the critical-norm ladder for the 1D advective model.

    Solves the n = 1 equation implicitly: a_1 = 3/4 - (3/4)*caux*C_1^{8/3}*
    u0_norm^{8/3}, which must be positive, then recurses with that a_1 fixed.
    """
    C = _normalize_constants(C, n_max)
    caux = _exact_or_float(caux)
    u0_norm = _exact_or_float(u0_norm)
    if u0_norm < 0 or caux < 0:
        raise ValueError("caux and u0_norm must be nonnegative")

    exact = u0_norm == 0 and isinstance(caux, Fraction) and all(
        isinstance(c, Fraction) for c in C
    )
    if exact:
        q = Fraction(0)
        three_q = Fraction(0)
    else:
        q = float(u0_norm) ** (8.0 / 3.0)
        three_q = 0.75 * float(caux) * q

    values = [Fraction(1) if exact else 1]
    if n_max >= 1:
        if exact:
            a1 = Fraction(3, 4)
        else:
            a1 = 0.75 - three_q * float(C[0]) ** (8.0 / 3.0)
        if not a1 > 0:
            threshold = (1.0 / float(caux)) ** (3.0 / 8.0) / float(C[0]) if caux else math.inf
            raise SmallnessError(
                f"initial norm {float(u0_norm)} violates the smallness "
                f"threshold {threshold:.6g} (first weight would be {float(a1):.3g})"
            )
        values.append(a1)
        for n in range(2, n_max + 1):
            if exact:
                denom = Fraction(n)
            else:
                denom = n + three_q * float(C[n - 1]) ** (8.0 / 3.0) / float(a1)
            values.append(Fraction(3, 4) * values[-1] / denom if exact
                          else 0.75 * values[-1] / denom)
    return WeightSequence(
        "burgers_sobolev", tuple(values),
        {"C": C, "caux": caux, "u0_norm": u0_norm},
    )


def weights_burgers_l2(n_max: int, C=None, D0=0.0) -> WeightSequence:
    """a_n = a_{n-1} / (2 C_n^4 (1 + D0)^4) with a_0 = 1."""
    C = _normalize_constants(C, n_max)
    D0 = _exact_or_float(D0)
    if D0 < 0:
        raise ValueError("decay constant must be nonnegative")
    exact = isinstance(D0, Fraction) and all(isinstance(c, Fraction) for c in C)
    values = [Fraction(1) if exact else 1]
    for n in range(1, n_max + 1):
        denom = 2 * C[n - 1] ** 4 * (1 + D0) ** 4
        values.append(values[-1] / denom)
    return WeightSequence("burgers_l2", tuple(values), {"C": C, "D0": D0})


def weights_general(n_max: int, C=None, D0=1.0) -> WeightSequence:
    """a_n = 1 / (C_n D0^n) with a_0 = 1; requires D0 > 0."""
    C = _normalize_constants(C, n_max)
    D0 = _exact_or_float(D0)
    if not D0 > 0:
        raise ValueError("decay constant must be positive")
    exact = isinstance(D0, Fraction) and all(isinstance(c, Fraction) for c in C)
    values = [Fraction(1) if exact else 1]
    for n in range(1, n_max + 1):
        values.append(1 / (C[n - 1] * D0**n))
    return WeightSequence("general_l2", tuple(values), {"C": C, "D0": D0})


# ---------------------------------------------------------------------------
# evaluation

def ladder_orders(theta: float, base: float, n_max: int) -> np.ndarray:
    """Sobolev orders n*theta + base for n = 0..n_max."""
    return base + theta * np.arange(n_max + 1)


@dataclass(frozen=True)
class EnergyValue:
    terms: np.ndarray
    total: float
    tail_fraction: float


def energy_eval(
    field: SpectralField,
    t: float,
    theta: float,
    base: float,
    weights: WeightSequence,
    t0: float = 0.0,
) -> EnergyValue:
    """Evaluate the truncated functional at one state.

    terms[n] = a_n (t - t0)^n ||field||^2 at order n*theta + base; total is
    their sum; tail_fraction = terms[-1]/total indicates truncation adequacy.
    The elapsed time t - t0 must be nonnegative.
    """
    tau = t - t0
    if tau < 0:
        raise ValueError(f"elapsed time must be nonnegative, got {tau}")
    n_max = weights.n_max
    ladder = np.array([
        sobolev_norm(field, float(s)) for s in ladder_orders(theta, base, n_max)
    ])
    terms = _terms_from_ladder(np.array([tau]), ladder[np.newaxis, :], weights)[0]
    total = float(terms.sum())
    tail = float(terms[-1] / total) if total > 0 else 0.0
    return EnergyValue(terms, total, tail)


def _terms_from_ladder(tau: np.ndarray, ladder: np.ndarray, weights: WeightSequence) -> np.ndarray:
    alphas = weights.as_floats()
    n = np.arange(weights.n_max + 1)
    # tau**0 = 1 even at tau = 0
    powers = np.power.outer(tau, n)
    return alphas[np.newaxis, :] * powers * ladder**2


@dataclass(frozen=True)
class EnergyTrace:
    """Per-time ladder norms and functional terms along a trajectory."""

    times: np.ndarray
    ladder: np.ndarray        # shape (len(times), n_max + 1)
    terms: np.ndarray
    totals: np.ndarray
    theta: float
    base: float
    weights: WeightSequence
    t0: float = 0.0

    @staticmethod
    def from_ladder(times, ladder, weights: WeightSequence, theta: float,
                    base: float, t0: float = 0.0) -> "EnergyTrace":
        times = np.asarray(times, dtype=float)
        ladder = np.asarray(ladder, dtype=float)
        if ladder.ndim != 2 or ladder.shape[0] != times.size:
            raise ValueError("ladder must have one row per observation time")
        if ladder.shape[1] < weights.n_max + 1:
            raise ValueError(
                f"ladder has {ladder.shape[1]} orders, weights need "
                f"{weights.n_max + 1}"
            )
        ladder = ladder[:, : weights.n_max + 1]
        tau = times - t0
        if np.any(tau < -1e-15):
            raise ValueError("observation times precede the functional offset")
        tau = np.maximum(tau, 0.0)
        terms = _terms_from_ladder(tau, ladder, weights)
        return EnergyTrace(
            times=times, ladder=ladder, terms=terms,
            totals=terms.sum(axis=1), theta=theta, base=base,
            weights=weights, t0=t0,
        )

    @staticmethod
    def from_fields(times, fields, weights: WeightSequence, theta: float,
                    base: float, t0: float = 0.0) -> "EnergyTrace":
        orders = ladder_orders(theta, base, weights.n_max)
        ladder = np.array([
            [sobolev_norm(f, float(s)) for s in orders] for f in fields
        ])
        return EnergyTrace.from_ladder(times, ladder, weights, theta, base, t0)


@dataclass(frozen=True)
class MonotonicityReport:
    max_relative_increase: float
    first_violation_time: float | None
    tolerance: float


def monotonicity_report(trace: EnergyTrace, tolerance: float = MONOTONE_TOL) -> MonotonicityReport:
    """Scan consecutive totals for increases relative to the running value."""
    totals = np.asarray(trace.totals, dtype=float)
    if totals.size == 0:
        raise ValueError("empty trace")
    floor = max(float(totals.max()), 1e-300) * np.finfo(float).eps
    max_inc = 0.0
    violation_time = None
    for i in range(totals.size - 1):
        rel = (totals[i + 1] - totals[i]) / max(totals[i], floor)
        if rel > max_inc:
            max_inc = rel
        if violation_time is None and rel > tolerance:
            violation_time = float(trace.times[i + 1])
    return MonotonicityReport(float(max_inc), violation_time, tolerance)


@dataclass(frozen=True)
class DecayFit:
    order: int
    fitted_exponent: float
    bound_margin: float


def decay_fit(trace: EnergyTrace, n: int, window_decades: float = 1.0) -> DecayFit:
    """Fit the observed decay rate of one ladder norm and check its bound.

    fitted_exponent is the least-squares slope of log(ladder_n^2) versus
    log(t) over the trailing window [t_max/10^w, t_max]; bound_margin is
    max_t a_n (t - t0)^n ||u(t)||^2 / ||u(0)||^2 at the ladder base order,
    so margin <= 1 means the decay bound holds on the trace.
    """
    if not 0 <= n <= trace.weights.n_max:
        raise ValueError(f"order {n} outside the weight range")
    times = np.asarray(trace.times, dtype=float)
    tau = times - trace.t0
    positive = tau > 0
    if positive.sum() < 5:
        raise ValueError("need at least 5 observation times after the offset")
    t_pos = tau[positive]
    if t_pos.max() / t_pos.min() < 10.0:
        raise ValueError("observation times must span at least a decade")
    window = t_pos >= t_pos.max() / 10.0**window_decades
    sel = np.zeros_like(positive)
    sel[positive] = window
    sel &= trace.ladder[:, n] > 0
    if sel.sum() < 5:
        raise ValueError("fewer than 5 usable points in the trailing window")
    slope = np.polyfit(np.log(tau[sel]), np.log(trace.ladder[sel, n] ** 2), 1)[0]

    base_sq = float(trace.ladder[0, 0] ** 2)
    if base_sq == 0:
        margin = 0.0
    else:
        margin = float(np.max(trace.terms[:, n]) / base_sq)
    return DecayFit(n, float(slope), margin)


# ---------------------------------------------------------------------------
# empirical calibration

_CAL_CAP = 2.0**60


def calibrate_weights(
    run_closure,
    n_max: int,
    search_budget: int = 4000,
    tolerance: float = MONOTONE_TOL,
) -> WeightSequence:
    """Greedy per-order search for the largest monotonicity-preserving weights.

    run_closure() replays a stored trajectory as (times, ladder) with ladder
    of shape (len(times), >= n_max + 1).  Given a_0..a_{n-1}, binary search
    (doubling bracket, then 30 bisection steps) finds the largest a_n that
    keeps the partial-sum functional non-increasing on the trajectory within
    the tolerance.  Deterministic.  params['flags'] records orders where the
    doubling phase hit the cap (unbounded weight, e.g. a zero trajectory) or
    where no meaningfully positive weight exists; params['budget_exhausted']
    is set when the evaluation budget ran out, with best-so-far returned.
    """
    times, ladder = run_closure()
    times = np.asarray(times, dtype=float)
    ladder = np.asarray(ladder, dtype=float)
    if ladder.ndim != 2 or ladder.shape[1] < n_max + 1:
        raise ValueError(f"ladder must provide at least {n_max + 1} orders")

    powers = np.power.outer(times, np.arange(n_max + 1))
    weighted_sq = powers * ladder[:, : n_max + 1] ** 2  # t^n * L_n(t)^2
    floor = max(float(np.max(weighted_sq[:, 0])), 1e-300) * np.finfo(float).eps

    evaluations = 0
    exhausted = False
    flags: dict[int, str] = {}
    # search against half the tolerance so the saturated result re-verifies
    # under the full tolerance despite summation-order noise
    search_tol = 0.5 * tolerance

    def monotone(totals: np.ndarray) -> bool:
        prev = totals[:-1]
        return bool(np.all(totals[1:] - prev <= search_tol * np.maximum(prev, floor)))

    partial = weighted_sq[:, 0].copy()  # a_0 = 1
    values = [1.0]
    for n in range(1, n_max + 1):
        column = weighted_sq[:, n]

        def feasible(alpha: float) -> bool:
            nonlocal evaluations
            evaluations += 1
            return monotone(partial + alpha * column)

        if exhausted or evaluations >= search_budget:
            exhausted = True
            values.append(0.0)
            continue
        lo, hi = 0.0, 1.0
        # doubling phase: bracket the feasibility boundary
        while feasible(hi):
            lo = hi
            hi *= 2.0
            if hi > _CAL_CAP:
                lo = _CAL_CAP
                flags[n] = "unbounded"
                break
            if evaluations >= search_budget:
                exhausted = True
                break
        if n not in flags and not exhausted:
            for _ in range(30):
                if evaluations >= search_budget:
                    exhausted = True
                    break
                mid = 0.5 * (lo + hi)
                if feasible(mid):
                    lo = mid
                else:
                    hi = mid
        if lo < 1e-9 and n not in flags:
            flags[n] = "vanishing"
        values.append(lo)
        partial = partial + lo * column

    params = {
        "tolerance": tolerance,
        "flags": {str(k): v for k, v in flags.items()},
        "budget_exhausted": exhausted,
        "evaluations": evaluations,
    }
    return WeightSequence("empirical", tuple(values), params)


def measured_decay_constant(times, norms, exponent: float, t0: float = 0.0) -> float:
    """sup over t > t0 of (t - t0)^exponent * norm(t); the empirical decay
    constant entering the L^2-based weight rules."""
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    tau = times - t0
    mask = tau > 0
    if not np.any(mask):
        raise ValueError("no observation times after the offset")
    return float(np.max(tau[mask] ** exponent * norms[mask]))
