"""The abstract quadratic model u_t + (-Lap)^theta u = sign * R(Su (x) Tv).

R, S, T are homogeneous Fourier multipliers of degrees b_R, b_S, b_T.  The
critical regularity index

    critical_index = b_R + b_S + b_T + d/2 - 2*theta

is the norm level at which dissipation balances the quadratic term.  Degrees
and theta are kept as exact rationals so index tables and admissibility
verdicts are table-exact.

Registered instantiations (all written in the canonical dissipative form, the
sign of the nonlinearity recorded on the spec):

    burgers   u_t + (-Lap) u   = -d/dx (u^2)                           d=1
    ns2d/3d   u_t + (-Lap) u   = -Leray div(u (x) u)                   d=2,3
    sqg       e_t + (-Lap)^th e = -div(e * v),  v = riesz_perp(e)      d=2
    ks2d/3d   r_t + (-Lap) r   = +div(r * grad(Lap^-1) r)              d=2,3
    linear    u_t + (-Lap)^th u = 0 (nonlinearity disabled)

For the chemotaxis models the constant mode (total mass) is carried
separately on the spec as mean_density and never lives in the state: the
drift operator annihilates constants, and the mass term m*r it would
otherwise produce is an exact linear shift handled by the time integrator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .spectral import (
    Grid,
    MultiplierSymbol,
    SpectralField,
    compose_symbols,
    divergence_symbol,
    gradient_symbol,
    grad_inv_laplacian_symbol,
    halfwave_symbol,
    identity_symbol,
    leray_symbol,
    partial_derivative,
    riesz_perp_symbol,
    riesz_symbol,
    tensor_divergence_symbol,
    _physical_to_truncated,
)

__all__ = [
    "ModelSpec",
    "AdmissibilityReport",
    "ExponentWitness",
    "ExponentInfeasible",
    "make_model",
    "model_names",
    "model_from_config",
    "critical_index",
    "check_admissibility",
    "admissible_exponents",
    "bilinear_apply",
    "project_subspace",
]

MODEL_NAMES = ("burgers", "ns2d", "ns3d", "sqg", "ks2d", "ks3d", "linear")

SQG_THETA_MIN = Fraction(2, 3)
SQG_THETA_MAX = Fraction(1)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Immutable description of one instantiation of the quadratic class."""

    name: str
    d: int
    theta: Fraction
    R: MultiplierSymbol
    S: MultiplierSymbol
    T: MultiplierSymbol
    sign: float
    projector: MultiplierSymbol | None
    skew_symmetric: bool
    components: int
    mean_density: float = 0.0

    @property
    def critical_index(self) -> Fraction:
        return (
            self.R.degree + self.S.degree + self.T.degree
            + Fraction(self.d, 2) - 2 * self.theta
        )

    @property
    def nonlinear(self) -> bool:
        return self.sign != 0.0

    def degrees(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.R.degree, self.S.degree, self.T.degree


def critical_index(spec: ModelSpec) -> Fraction:
    """b_R + b_S + b_T + d/2 - 2*theta, exactly."""
    return spec.critical_index


def model_names() -> tuple[str, ...]:
    return MODEL_NAMES


def make_model(name: str, theta=None, *, mean_density: float = 0.0, d: int | None = None) -> ModelSpec:
    """Build a registered model by name.

    theta is accepted only for sqg (2/3 <= theta <= 1; pass a Fraction or a
    string like "3/4" for exact arithmetic) and for the linear model; the
    other models fix theta = 1.  mean_density applies to the chemotaxis
    models only.
    """
    if name not in MODEL_NAMES:
        raise ValueError(f"unknown model {name!r}; choose from {MODEL_NAMES}")
    if name == "linear":
        th = _as_fraction(theta) if theta is not None else Fraction(1)
        dim = d if d is not None else 1
        ident = identity_symbol(1)
        return ModelSpec(
            name="linear", d=dim, theta=th,
            R=ident, S=ident, T=ident,
            sign=0.0, projector=identity_symbol(1),
            skew_symmetric=True, components=1,
        )
    if name != "sqg" and theta is not None and _as_fraction(theta) != 1:
        raise ValueError(f"{name} fixes theta = 1")
    if mean_density != 0.0 and name not in ("ks2d", "ks3d"):
        raise ValueError("mean_density applies to the chemotaxis models only")

    if name == "burgers":
        return ModelSpec(
            name="burgers", d=1, theta=Fraction(1),
            R=partial_derivative(0), S=identity_symbol(1), T=identity_symbol(1),
            sign=-1.0, projector=identity_symbol(1),
            skew_symmetric=True, components=1,
        )
    if name in ("ns2d", "ns3d"):
        dim = 2 if name == "ns2d" else 3
        R = compose_symbols(leray_symbol(dim), tensor_divergence_symbol(dim))
        return ModelSpec(
            name=name, d=dim, theta=Fraction(1),
            R=R, S=identity_symbol(dim), T=identity_symbol(dim),
            sign=-1.0, projector=leray_symbol(dim),
            skew_symmetric=True, components=dim,
        )
    if name == "sqg":
        th = _as_fraction(theta) if theta is not None else Fraction(3, 4)
        if not SQG_THETA_MIN <= th <= SQG_THETA_MAX:
            raise ValueError(
                f"sqg dissipation order must lie in [2/3, 1], got {th}"
            )
        return _sqg_spec(th)
    # ks2d / ks3d
    dim = 2 if name == "ks2d" else 3
    return ModelSpec(
        name=name, d=dim, theta=Fraction(1),
        R=divergence_symbol(dim), S=identity_symbol(1),
        T=grad_inv_laplacian_symbol(dim),
        sign=+1.0, projector=identity_symbol(1),
        skew_symmetric=False, components=1,
        mean_density=float(mean_density),
    )


def _sqg_spec(th: Fraction) -> ModelSpec:
    return ModelSpec(
        name="sqg", d=2, theta=th,
        R=divergence_symbol(2), S=identity_symbol(1), T=riesz_perp_symbol(),
        sign=-1.0, projector=identity_symbol(1),
        skew_symmetric=True, components=1,
    )


def model_for_diagnostics(name: str, theta=None) -> ModelSpec:
    """Like make_model but without validity-range checks on theta, so the
    admissibility table can be evaluated for out-of-range parameters."""
    if name == "sqg" and theta is not None:
        return _sqg_spec(_as_fraction(theta))
    if name == "linear":
        return make_model(name, theta)
    if theta is not None and name in ("burgers", "ns2d", "ns3d", "ks2d", "ks3d"):
        base = make_model(name)
        return ModelSpec(
            name=base.name, d=base.d, theta=_as_fraction(theta),
            R=base.R, S=base.S, T=base.T, sign=base.sign,
            projector=base.projector, skew_symmetric=base.skew_symmetric,
            components=base.components,
        )
    return make_model(name, theta)


# ---------------------------------------------------------------------------
# custom models from a small symbol vocabulary

_ATOM_DOC = "identity[:m] | partial:axis | grad | div | riesz:axis | riesz_perp | scale:s | leray | grad_inv_lap | tensor_div"


def _symbol_atom(token: str, d: int) -> MultiplierSymbol:
    head, _, arg = token.partition(":")
    if head == "identity":
        return identity_symbol(int(arg) if arg else 1)
    if head == "partial":
        return partial_derivative(int(arg))
    if head == "grad":
        return gradient_symbol(d)
    if head == "div":
        return divergence_symbol(d)
    if head == "riesz":
        return riesz_symbol(int(arg), d)
    if head == "riesz_perp":
        return riesz_perp_symbol()
    if head == "scale":
        return halfwave_symbol(Fraction(arg))
    if head == "leray":
        return leray_symbol(d)
    if head == "grad_inv_lap":
        return grad_inv_laplacian_symbol(d)
    if head == "tensor_div":
        return tensor_divergence_symbol(d)
    raise ValueError(f"unknown symbol atom {token!r}; vocabulary: {_ATOM_DOC}")


def _symbol_expr(expr, d: int) -> MultiplierSymbol:
    """An expression is an atom string or a list composed left-to-right
    (outermost first)."""
    if isinstance(expr, str):
        return _symbol_atom(expr, d)
    parts = [_symbol_expr(e, d) for e in expr]
    out = parts[-1]
    for sym in reversed(parts[:-1]):
        out = compose_symbols(sym, out)
    return out


def model_from_config(cfg: dict) -> ModelSpec:
    """Build a custom model from a config mapping with keys
    name, d, theta, R, S, T, sign, projector ('leray' | 'mean' | null),
    skew_symmetric, components."""
    d = int(cfg["d"])
    theta = _as_fraction(cfg["theta"])
    R = _symbol_expr(cfg["R"], d)
    S = _symbol_expr(cfg["S"], d)
    T = _symbol_expr(cfg["T"], d)
    components = int(cfg.get("components", S.in_components))
    if S.in_components != components or T.in_components != components:
        raise ValueError("S and T must consume the state's component count")
    if R.in_components != S.out_components * T.out_components:
        raise ValueError(
            f"R consumes {R.in_components} components but the tensor product "
            f"supplies {S.out_components * T.out_components}"
        )
    proj_kind = cfg.get("projector", "mean")
    if proj_kind == "leray":
        projector = leray_symbol(d)
    elif proj_kind in ("mean", None):
        projector = identity_symbol(components)
    else:
        raise ValueError(f"unknown projector {proj_kind!r}")
    return ModelSpec(
        name=str(cfg.get("name", "custom")), d=d, theta=theta,
        R=R, S=S, T=T,
        sign=float(cfg.get("sign", -1.0)),
        projector=projector,
        skew_symmetric=bool(cfg.get("skew_symmetric", False)),
        components=components,
    )


# ---------------------------------------------------------------------------
# admissibility

@dataclass(frozen=True)
class AdmissibilityReport:
    """Numeric bounds and verdicts of the dissipation-dominance conditions."""

    lower_terms: tuple[Fraction, ...]
    upper_terms: tuple[Fraction, ...]
    lower_bound: Fraction
    upper_bound: Fraction
    admissible: bool
    mild_lower: Fraction
    mild_upper: Fraction
    mild_admissible: bool
    theta: Fraction
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "theta": str(self.theta),
            "lower_terms": [str(x) for x in self.lower_terms],
            "upper_terms": [str(x) for x in self.upper_terms],
            "lower_bound": str(self.lower_bound),
            "upper_bound": str(self.upper_bound),
            "admissible": self.admissible,
            "mild_lower": str(self.mild_lower),
            "mild_upper": str(self.mild_upper),
            "mild_admissible": self.mild_admissible,
            "notes": list(self.notes),
        }


_SQG_NOTE = (
    "sqg uses the operator assignment R=div, S=I, T=riesz_perp (degree sum 1, "
    "lower bound 2/3); the alternative assignment R=I, S=grad, T=riesz gives "
    "the same critical index but lower bound 1/2."
)


def check_admissibility(spec: ModelSpec) -> AdmissibilityReport:
    """Evaluate the two-sided dissipation-dominance system on theta.

    Lower bound: theta > max of the four competing nonlinearity scalings;
    upper bound: theta < min of the two technical caps.  The mild-solution
    construction has its own separate two-sided bound
    (b_R + max(b_S, b_T))/2 < theta < b_R + (b_S + b_T)/2 + d/2.
    """
    bR, bS, bT = spec.degrees()
    half_d = Fraction(spec.d, 2)
    lower_terms = (
        Fraction(2, 3) * bR + Fraction(bS + bT, 3),
        Fraction(1, 2) * bR + Fraction(1, 2) * max(bS, bT),
        Fraction(1, 2) * max(bS, bT),
        Fraction(1, 4) * (bR + bS + bT + half_d),
    )
    upper_terms = (
        bR + min(bS, bT) + spec.d,
        bR + Fraction(bS + bT, 2) + half_d,
    )
    lower = max(lower_terms)
    upper = min(upper_terms)
    th = spec.theta
    mild_lower = Fraction(1, 2) * (bR + max(bS, bT))
    mild_upper = bR + Fraction(bS + bT, 2) + half_d
    notes = (_SQG_NOTE,) if spec.name == "sqg" else ()
    return AdmissibilityReport(
        lower_terms=lower_terms,
        upper_terms=upper_terms,
        lower_bound=lower,
        upper_bound=upper,
        admissible=lower < th < upper,
        mild_lower=mild_lower,
        mild_upper=mild_upper,
        mild_admissible=mild_lower < th < mild_upper,
        theta=th,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# exponent witness

@dataclass(frozen=True)
class ExponentWitness:
    """One feasible point of the exponent system used by the norm estimates.

    All entries are exact rationals; midpoints of the feasible intervals are
    taken in the fixed elimination order delta0, delta0p, gamma so the
    witness is deterministic.
    """

    delta0: Fraction
    zeta0: Fraction
    delta0p: Fraction
    zeta0p: Fraction
    gamma: Fraction
    zeta: Fraction

    def as_dict(self) -> dict:
        return {
            "delta0": str(self.delta0),
            "zeta0": str(self.zeta0),
            "delta0p": str(self.delta0p),
            "zeta0p": str(self.zeta0p),
            "gamma": str(self.gamma),
            "zeta": str(self.zeta),
        }


class ExponentInfeasible(ValueError):
    """Raised when the exponent system has no solution; carries a structured
    certificate naming the violated inequality."""

    def __init__(self, certificate: dict):
        self.certificate = certificate
        super().__init__(certificate.get("detail", "exponent system infeasible"))


def _interval(name: str, lows: dict, highs: dict) -> Fraction:
    lo_name, lo = max(lows.items(), key=lambda kv: kv[1])
    hi_name, hi = min(highs.items(), key=lambda kv: kv[1])
    if not lo < hi:
        raise ExponentInfeasible({
            "violated": name,
            "detail": (
                f"{name} interval empty: requires {lo_name} = {lo} "
                f"< {name} < {hi_name} = {hi}"
            ),
            "lower": str(lo),
            "upper": str(hi),
        })
    return (lo + hi) / 2


def admissible_exponents(spec: ModelSpec) -> ExponentWitness:
    """Solve the linear exponent system by interval elimination.

    Chooses the midpoint of each feasible interval in the order delta0,
    delta0p, gamma.  Raises ExponentInfeasible with a certificate naming the
    first empty interval (or the failed admissibility bound).
    """
    adm = check_admissibility(spec)
    if not adm.admissible:
        raise ExponentInfeasible({
            "violated": "dissipation_lower_bound" if spec.theta <= adm.lower_bound
            else "dissipation_upper_bound",
            "detail": (
                f"admissibility fails: need {adm.lower_bound} < theta < "
                f"{adm.upper_bound}, got theta = {spec.theta}"
            ),
            "lower": str(adm.lower_bound),
            "upper": str(adm.upper_bound),
        })
    bR, bS, bT = spec.degrees()
    th = spec.theta
    bc = spec.critical_index
    half_d = Fraction(spec.d, 2)

    delta0 = _interval(
        "delta0",
        {"0": Fraction(0), "bc - bT": bc - bT, "d/2 - 2th + bR + bS": half_d - 2 * th + bR + bS},
        {"d/2": half_d, "2th - bT": 2 * th - bT, "d/2 - bc + bR + bS": half_d - bc + bR + bS},
    )
    zeta0 = half_d - delta0
    delta0p = _interval(
        "delta0p",
        {"0": Fraction(0), "bc - bS": bc - bS, "d/2 - 2th + bR + bT": half_d - 2 * th + bR + bT},
        {"d/2": half_d, "2th - bS": 2 * th - bS, "d/2 - bc + bR + bT": half_d - bc + bR + bT},
    )
    zeta0p = half_d - delta0p

    zeta_min = max(
        Fraction(0),
        (bR + bS + zeta0) / th - 1,
        (bR + bT + zeta0p) / th - 1,
    )
    gamma_candidates = {
        "delta0 + bT": delta0 + bT,
        "delta0p + bS": delta0p + bS,
        "bc + th*(1 - zeta_min)": bc + th * (1 - zeta_min),
    }
    hi_name, gamma_hi = min(gamma_candidates.items(), key=lambda kv: kv[1])
    if not bc < gamma_hi:
        raise ExponentInfeasible({
            "violated": "gamma",
            "detail": (
                f"gamma interval empty: requires critical index {bc} "
                f"< gamma < {hi_name} = {gamma_hi}"
            ),
            "lower": str(bc),
            "upper": str(gamma_hi),
        })
    gamma = (bc + gamma_hi) / 2
    zeta = 1 - (gamma - bc) / th
    return ExponentWitness(delta0, zeta0, delta0p, zeta0p, gamma, zeta)


def witness_violations(spec: ModelSpec, w: ExponentWitness) -> list[str]:
    """Independent re-check of every inequality the witness must satisfy."""
    bR, bS, bT = spec.degrees()
    th = spec.theta
    bc = spec.critical_index
    half_d = Fraction(spec.d, 2)
    checks = [
        ("delta0 + zeta0 = d/2", w.delta0 + w.zeta0 == half_d),
        ("delta0p + zeta0p = d/2", w.delta0p + w.zeta0p == half_d),
        ("bc < delta0 + bT", bc < w.delta0 + bT),
        ("delta0 + bT < 2th", w.delta0 + bT < 2 * th),
        ("bc < bR + bS + zeta0", bc < bR + bS + w.zeta0),
        ("bR + bS + zeta0 < 2th", bR + bS + w.zeta0 < 2 * th),
        ("0 < delta0 < d/2", Fraction(0) < w.delta0 < half_d),
        ("bc < delta0p + bS", bc < w.delta0p + bS),
        ("delta0p + bS < 2th", w.delta0p + bS < 2 * th),
        ("bc < bR + bT + zeta0p", bc < bR + bT + w.zeta0p),
        ("bR + bT + zeta0p < 2th", bR + bT + w.zeta0p < 2 * th),
        ("0 < delta0p < d/2", Fraction(0) < w.delta0p < half_d),
        ("bc <= gamma", bc <= w.gamma),
        ("gamma < min(delta0 + bT, delta0p + bS)",
         w.gamma < min(w.delta0 + bT, w.delta0p + bS)),
        ("zeta = 1 - (gamma - bc)/th", w.zeta == 1 - (w.gamma - bc) / th),
        ("zeta > 0", w.zeta > 0),
        ("zeta > (bR + bS + zeta0)/th - 1", w.zeta > (bR + bS + w.zeta0) / th - 1),
        ("zeta > (bR + bT + zeta0p)/th - 1", w.zeta > (bR + bT + w.zeta0p) / th - 1),
    ]
    return [label for label, ok in checks if not ok]


# ---------------------------------------------------------------------------
# the bilinear form

@lru_cache(maxsize=64)
def _bound_arrays(spec: ModelSpec, grid: Grid):
    """Symbol arrays for one (spec, grid) pair; specs hash by identity."""
    return (
        spec.S.on_grid(grid),
        spec.T.on_grid(grid),
        spec.R.on_grid(grid),
        spec.projector.on_grid(grid) if spec.projector is not None else None,
    )


def bilinear_apply(spec: ModelSpec, u: SpectralField, v: SpectralField) -> SpectralField:
    """sign * projector(R(Su (x) Tv)) with the tensor product dealiased.

    The outer product is flattened in C order, index (i, j) -> i*m_T + j,
    which is the contraction convention the registered R symbols use.
    """
    if u.grid != v.grid:
        raise ValueError("fields live on different grids")
    if u.components != spec.components or v.components != spec.components:
        raise ValueError(
            f"model {spec.name!r} acts on {spec.components}-component fields"
        )
    if not spec.nonlinear:
        shape = (spec.components,) + u.grid.shape
        return SpectralField(u.grid, np.zeros(shape, np.complex128), mean_zero=True)
    if min(spec.S.degree, spec.T.degree) < 0:
        if not (u.has_zero_mean() and v.has_zero_mean()):
            raise ValueError(
                "negative-degree factor operator requires mean-zero inputs"
            )
    grid = u.grid
    S_arr, T_arr, R_arr, P_arr = _bound_arrays(spec, grid)
    mask = grid.dealias_mask
    axes = tuple(range(1, grid.dimension + 1))
    npoints = float(np.prod(grid.modes))

    su = np.einsum("oi...,i...->o...", S_arr, u.coeffs * mask)
    tv = np.einsum("oi...,i...->o...", T_arr, v.coeffs * mask)
    su_phys = np.fft.ifftn(su * npoints, axes=axes).real
    tv_phys = np.fft.ifftn(tv * npoints, axes=axes).real
    # flattened outer product: component (i, j) = (Su)_i (Tv)_j
    prod = (su_phys[:, None] * tv_phys[None, :]).reshape(
        (su_phys.shape[0] * tv_phys.shape[0],) + grid.shape
    )
    prod_hat = _physical_to_truncated(grid, prod)
    out = spec.sign * np.einsum("oi...,i...->o...", R_arr, prod_hat)
    if P_arr is not None:
        out = np.einsum("oi...,i...->o...", P_arr, out)
    return SpectralField(grid, out, mean_zero=True)


def project_subspace(spec: ModelSpec, f: SpectralField) -> SpectralField:
    """Model subspace projection: Leray for the velocity models, mean
    removal for the scalar ones.  Idempotent on the lattice."""
    if spec.projector is None:
        return f
    if spec.projector.in_components != f.components:
        raise ValueError(
            f"projector expects {spec.projector.in_components} components, "
            f"field has {f.components}"
        )
    out = np.einsum("oi...,i...->o...", spec.projector.on_grid(f.grid), f.coeffs)
    return SpectralField(f.grid, out, mean_zero=True)
