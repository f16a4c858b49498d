"""Stiff time integration with the linear part treated exactly.

Fourth-order exponential time differencing Runge-Kutta (ETDRK4): the linear
symbol is diagonal in Fourier space, so the integrating factor is exact and
all discretization error sits in the nonlinear term.  The phi-function
coefficients switch to a 6-term Taylor series for |z| < 1e-2 to avoid
cancellation; this keeps steps bit-reproducible.

For the chemotaxis models the spec's mean_density shifts the linear symbol to
-|k|^(2*theta) + m, the exact linearization of the drift term produced by the
separately carried constant mode; the k = 0 coefficient of the state itself
always multiplies by exactly 1, so it is bit-identical across steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .models import ModelSpec, bilinear_apply, project_subspace
from .spectral import Grid, SpectralField, l2_norm, sobolev_norm

__all__ = [
    "RunState",
    "BlowUpError",
    "step_etdrk4",
    "integrate",
    "cfl_suggest",
    "LadderRecorder",
]

BLOWUP_NORM = 1e12
CFL_SAFETY = 0.5


class BlowUpError(RuntimeError):
    """Raised when the state leaves the finite regime; carries the time and
    the offending norm (expected behavior for supercritical chemotaxis)."""

    def __init__(self, t: float, norm_value: float):
        self.t = t
        self.norm_value = norm_value
        super().__init__(f"solution blew up at t = {t:.6g} (norm {norm_value:.3e})")


@dataclass(frozen=True)
class RunState:
    spec: ModelSpec
    field: SpectralField
    t: float
    dt: float
    step_count: int = 0


# ---------------------------------------------------------------------------
# phi functions: phi_j(z) = (e^z - sum_{m<j} z^m/m!) / z^j, evaluated with a
# Taylor series near zero.

_SERIES_RADIUS = 1e-2
_SERIES_TERMS = 6


def _phi(j: int, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small]
    acc = np.zeros_like(zs)
    for m in reversed(range(_SERIES_TERMS)):
        acc = acc * zs + 1.0 / math.factorial(m + j)
    out[small] = acc
    zl = z[~small]
    ez = np.exp(zl)
    if j == 1:
        out[~small] = (ez - 1.0) / zl
    elif j == 2:
        out[~small] = (ez - 1.0 - zl) / zl**2
    elif j == 3:
        out[~small] = (ez - 1.0 - zl - 0.5 * zl**2) / zl**3
    else:
        raise ValueError(f"phi_{j} not implemented")
    return out


@dataclass(frozen=True)
class _Etdrk4Plan:
    exp_full: np.ndarray
    exp_half: np.ndarray
    q: np.ndarray       # (dt/2) phi1(z/2)
    f1: np.ndarray      # dt (phi1 - 3 phi2 + 4 phi3)
    f2: np.ndarray      # dt (phi2 - 2 phi3)
    f3: np.ndarray      # dt (4 phi3 - phi2)


@lru_cache(maxsize=128)
def _make_plan(spec: ModelSpec, grid: Grid, dt: float) -> _Etdrk4Plan:
    ell = -grid.k_squared ** float(spec.theta) + spec.mean_density
    z = dt * ell
    phi1 = _phi(1, z)
    phi2 = _phi(2, z)
    phi3 = _phi(3, z)
    return _Etdrk4Plan(
        exp_full=np.exp(z),
        exp_half=np.exp(0.5 * z),
        q=0.5 * dt * _phi(1, 0.5 * z),
        f1=dt * (phi1 - 3.0 * phi2 + 4.0 * phi3),
        f2=dt * (phi2 - 2.0 * phi3),
        f3=dt * (4.0 * phi3 - phi2),
    )


def _nonlinear(spec: ModelSpec, grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    if not spec.nonlinear:
        return np.zeros_like(coeffs)
    f = SpectralField(grid, coeffs, mean_zero=True)
    return bilinear_apply(spec, f, f).coeffs


def step_etdrk4(state: RunState, dt: float | None = None) -> RunState:
    """One ETDRK4 step; the output is projected and dealiased."""
    if dt is None:
        dt = state.dt
    if not dt > 0:
        raise ValueError(f"step size must be positive, got {dt}")
    spec, grid = state.spec, state.field.grid
    plan = _make_plan(spec, grid, float(dt))
    c0 = state.field.coeffs

    n0 = _nonlinear(spec, grid, c0)
    a = plan.exp_half * c0 + plan.q * n0
    na = _nonlinear(spec, grid, a)
    b = plan.exp_half * c0 + plan.q * na
    nb = _nonlinear(spec, grid, b)
    c = plan.exp_half * a + plan.q * (2.0 * nb - n0)
    nc = _nonlinear(spec, grid, c)
    c1 = plan.exp_full * c0 + plan.f1 * n0 + 2.0 * plan.f2 * (na + nb) + plan.f3 * nc

    c1 = c1 * grid.dealias_mask
    out = SpectralField(grid, c1, state.field.mean_zero)
    out = project_subspace(spec, out) if spec.nonlinear else out
    t_new = state.t + dt

    if not np.all(np.isfinite(out.coeffs)):
        raise BlowUpError(t_new, math.inf)
    norm = l2_norm(out)
    if norm > BLOWUP_NORM:
        raise BlowUpError(t_new, norm)
    return RunState(spec, out, t_new, dt, state.step_count + 1)


def cfl_suggest(state: RunState) -> float:
    """Advective step bound 0.5 * min(dx) / max|Tu|; the linear part is
    integrated exactly and does not constrain the step."""
    from .spectral import apply_multiplier, to_physical

    spec = state.spec
    if not spec.nonlinear:
        return math.inf
    velocity = apply_multiplier(state.field, spec.T)
    vmax = float(np.max(np.abs(to_physical(velocity))))
    if vmax == 0.0:
        return math.inf
    return CFL_SAFETY * min(state.field.grid.spacings) / vmax


def integrate(
    state: RunState,
    t_end: float,
    obs_times=(),
    observers=(),
    adaptive: bool = False,
    cfl_safety: bool = False,
    growth_factor: float = 1.1,
) -> RunState:
    """March to t_end, landing exactly on every observation time.

    Observers are callables invoked with the current RunState at each entry
    of obs_times (including the start time when listed).  The adaptive policy
    halves dt whenever the nonlinearity-to-state norm ratio grows by more
    than growth_factor between accepted steps; with cfl_safety the step also
    never exceeds cfl_suggest.  Both policies are deterministic given the
    trajectory.
    """
    if not t_end > state.t:
        raise ValueError(f"t_end = {t_end} must exceed current time {state.t}")
    obs = sorted(float(t) for t in obs_times)
    pending = [t for t in obs if t >= state.t - 1e-12]

    def emit(s: RunState):
        for fn in observers:
            fn(s)

    while pending and pending[0] <= state.t + 1e-12 * max(1.0, abs(state.t)):
        emit(state)
        pending.pop(0)

    dt = state.dt
    prev_ratio = None
    while state.t < t_end - 1e-12 * max(1.0, t_end):
        step_dt = dt
        if adaptive and state.spec.nonlinear:
            b = bilinear_apply(state.spec, state.field, state.field)
            denom = l2_norm(state.field)
            ratio = l2_norm(b) / denom if denom > 0 else 0.0
            if prev_ratio is not None and prev_ratio > 0 and ratio > growth_factor * prev_ratio:
                dt = 0.5 * dt
                step_dt = dt
            prev_ratio = ratio
        if cfl_safety:
            step_dt = min(step_dt, cfl_suggest(state))
        target = pending[0] if pending else t_end
        step_dt = min(step_dt, target - state.t, t_end - state.t)
        state = step_etdrk4(state, step_dt)
        while pending and pending[0] <= state.t + 1e-12 * max(1.0, state.t):
            emit(replace(state, t=pending[0]))
            pending.pop(0)
    return state


class LadderRecorder:
    """Observer collecting the Sobolev-norm ladder used by the energy module.

    Rows are [t, ||u||_L2, ladder_0..ladder_n (orders base + n*theta),
    extra orders...].
    """

    def __init__(self, theta: float, base: float, n_max: int, extra_orders=()):
        self.theta = float(theta)
        self.base = float(base)
        self.n_max = int(n_max)
        self.extra_orders = tuple(float(s) for s in extra_orders)
        self.times: list[float] = []
        self.l2: list[float] = []
        self.rows: list[list[float]] = []
        self.extra: list[list[float]] = []

    def __call__(self, state: RunState):
        f = state.field
        self.times.append(state.t)
        self.l2.append(l2_norm(f))
        self.rows.append([
            sobolev_norm(f, self.base + n * self.theta)
            for n in range(self.n_max + 1)
        ])
        self.extra.append([sobolev_norm(f, s) for s in self.extra_orders])

    @property
    def ladder(self) -> np.ndarray:
        return np.asarray(self.rows, dtype=float)

    @property
    def times_array(self) -> np.ndarray:
        return np.asarray(self.times, dtype=float)

    @property
    def extra_array(self) -> np.ndarray:
        return np.asarray(self.extra, dtype=float).reshape(
            len(self.times), len(self.extra_orders)
        )
