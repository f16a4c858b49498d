"""Configuration-driven experiment runner.

A run directory is self-describing and is the source of truth:

    config.json     canonicalized copy of the effective configuration
    trace.csv       observation table (schema below)
    weights.json    the weight sequence used for the functional
    verdicts.json   derived verdicts + sha256 of trace.csv
    metadata.json   timestamps, runtime, package version
    plots/*.svg     energy functional and ladder-decay plots

trace.csv schema (one row per observation time):

    t, norm_l2, norm_base, ladder_0..ladder_N, energy_total,
    term_0..term_N [, norm_{order} ...]

where ladder_n is the Sobolev norm at order base + n*theta, term_n the
functional term a_n (t-t0)^n ladder_n^2, and trailing columns hold any extra
recorded norms.  Values are written with repr() so identical configurations
(including the seed) produce bit-identical traces.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import time as _time
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_simpson

from . import config as cfgmod
from .energy import (
    EnergyTrace,
    WeightSequence,
    calibrate_weights,
    decay_fit,
    measured_decay_constant,
    monotonicity_report,
    weights_burgers_l2,
    weights_burgers_sobolev,
    weights_general,
    weights_linear,
)
from .mild import picard_solve
from .models import (
    ExponentInfeasible,
    ModelSpec,
    admissible_exponents,
    bilinear_apply,
    check_admissibility,
    model_for_diagnostics,
    model_from_config,
)
from .spectral import fractional_laplacian, inner_product, sobolev_norm
from .stepper import BlowUpError, LadderRecorder, RunState, integrate

__all__ = [
    "AdmissibilityError",
    "NotARunError",
    "ChecksumError",
    "RunRecord",
    "run",
    "report",
    "check",
    "calibrate_run",
    "mild_run",
]


class AdmissibilityError(ValueError):
    """The model fails its dissipation-dominance bounds and no override was
    requested."""


class NotARunError(FileNotFoundError):
    pass


class ChecksumError(RuntimeError):
    pass


@dataclass
class RunRecord:
    config_hash: str
    status: str
    out_dir: Path
    verdicts: dict
    paths: dict = dataclass_field(default_factory=dict)


# ---------------------------------------------------------------------------
# trace persistence

def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace(path: Path, times, l2, trace: EnergyTrace,
                extra_orders=(), extra=None) -> None:
    n_max = trace.weights.n_max
    header = (
        ["t", "norm_l2", "norm_base"]
        + [f"ladder_{n}" for n in range(n_max + 1)]
        + ["energy_total"]
        + [f"term_{n}" for n in range(n_max + 1)]
        + [f"norm_{s:g}" for s in extra_orders]
    )
    lines = [",".join(header)]
    for i, t in enumerate(times):
        row = [t, l2[i], trace.ladder[i, 0]]
        row += list(trace.ladder[i])
        row.append(trace.totals[i])
        row += list(trace.terms[i])
        if extra is not None and len(extra_orders):
            row += list(extra[i])
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def read_trace(path: Path) -> dict:
    text = path.read_text().strip().split("\n")
    header = text[0].split(",")
    data = np.array([[float(x) for x in line.split(",")] for line in text[1:]])
    cols = {name: data[:, i] for i, name in enumerate(header)}
    ladder_cols = [h for h in header if h.startswith("ladder_")]
    term_cols = [h for h in header if h.startswith("term_")]
    return {
        "header": header,
        "times": cols["t"],
        "norm_l2": cols["norm_l2"],
        "ladder": np.column_stack([cols[h] for h in ladder_cols]),
        "terms": np.column_stack([cols[h] for h in term_cols]),
        "energy_total": cols["energy_total"],
        "columns": cols,
    }


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# auxiliary observers

class _EnergyIdentityRecorder:
    """Records ||u||^2 and the dissipation ||u||^2 at order theta so the
    discrete energy identity can be integrated afterwards."""

    def __init__(self, theta: float):
        self.theta = theta
        self.times: list[float] = []
        self.l2sq: list[float] = []
        self.diss: list[float] = []

    def __call__(self, state):
        self.times.append(state.t)
        self.l2sq.append(sobolev_norm(state.field, 0.0) ** 2)
        self.diss.append(sobolev_norm(state.field, self.theta) ** 2)


class _GronwallRecorder:
    """Records the trilinear ratio bounding the negative-order norm growth."""

    def __init__(self, spec: ModelSpec, beta: float):
        self.spec = spec
        self.beta = beta
        self.times: list[float] = []
        self.neg_norm: list[float] = []
        self.l2: list[float] = []
        self.diss: list[float] = []
        self.ratio: list[float] = []

    def __call__(self, state):
        u = state.field
        beta = self.beta
        b = bilinear_apply(self.spec, u, u)
        pairing = abs(inner_product(b, fractional_laplacian(u, -beta)))
        d1 = sobolev_norm(u, -beta)
        d2 = sobolev_norm(u, 1.0)
        d3 = sobolev_norm(u, 1.0 - beta)
        denom = d1 * d2 * d3
        self.times.append(state.t)
        self.neg_norm.append(d1)
        self.l2.append(sobolev_norm(u, 0.0))
        self.diss.append(d2**2)
        self.ratio.append(pairing / denom if denom > 0 else 0.0)


# ---------------------------------------------------------------------------
# weight construction

def _build_weights(cfg: dict, spec: ModelSpec, base: float, rec: LadderRecorder,
                   gamma_info: dict) -> tuple[WeightSequence, dict]:
    energy_cfg = cfg["energy"]
    rule = energy_cfg["rule"]
    n_max = int(energy_cfg["n_max"])
    params = dict(energy_cfg.get("params") or {})
    notes: dict = {}
    times = rec.times_array
    theta = float(spec.theta)

    if rule == "linear_heat":
        return weights_linear(n_max), notes
    if rule == "burgers_sobolev":
        u0_norm = params.get("u0_norm")
        if u0_norm is None:
            u0_norm = float(rec.ladder[0, 0])
            notes["u0_norm_measured"] = u0_norm
        return weights_burgers_sobolev(
            n_max, C=params.get("C"), caux=params.get("caux", 1.0),
            u0_norm=u0_norm,
        ), notes
    if rule == "burgers_l2":
        d0 = params.get("D0")
        if d0 is None:
            d0 = measured_decay_constant(times, rec.l2, -base / (2.0 * theta))
            notes["D0_measured"] = d0
        return weights_burgers_l2(n_max, C=params.get("C"), D0=d0), notes
    if rule == "general_l2":
        d0 = params.get("D0")
        if d0 is None:
            gamma = gamma_info.get("gamma")
            if gamma is not None and gamma_info.get("gamma_column") is not None:
                exponent = (gamma - base) / (2.0 * theta)
                d0 = measured_decay_constant(
                    times, gamma_info["gamma_column"], exponent
                )
            else:
                d0 = measured_decay_constant(times, rec.l2, 0.0)
            if not d0 > 0:
                d0 = 1.0
                notes["D0_fallback"] = True
            notes["D0_measured"] = d0
        return weights_general(n_max, C=params.get("C"), D0=d0), notes
    if rule == "empirical":
        seq = calibrate_weights(lambda: (times, rec.ladder), n_max)
        return seq, notes
    raise ValueError(f"unknown weight rule {rule!r}")


# ---------------------------------------------------------------------------
# the run pipeline

def run(cfg_source, out_dir, overrides: dict | None = None) -> RunRecord:
    """Execute one configured experiment and persist the run directory."""
    t_start = _time.perf_counter()
    raw = cfgmod.load_config(cfg_source)
    if overrides:
        raw = cfgmod._merge(raw, overrides)
        cfgmod.validate_config(raw)
    cfg = raw
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    spec = cfgmod.build_model(cfg)
    adm = check_admissibility(spec)
    adm_failure_recorded = False
    if spec.nonlinear and not adm.admissible:
        if not cfg["options"].get("override_admissibility", False):
            raise AdmissibilityError(
                f"model {spec.name!r} fails admissibility "
                f"(need {adm.lower_bound} < theta < {adm.upper_bound}, "
                f"theta = {spec.theta}); pass --override-admissibility to run anyway"
            )
        adm_failure_recorded = True

    try:
        witness = admissible_exponents(spec) if spec.nonlinear else None
        witness_dict = witness.as_dict() if witness else None
        gamma = float(witness.gamma) if witness else None
    except ExponentInfeasible as exc:
        witness, witness_dict, gamma = None, {"infeasible": exc.certificate}, None

    grid = cfgmod.build_grid(cfg, spec)
    rng = np.random.default_rng(int(cfg["options"]["seed"]))
    u0 = cfgmod.build_initial_field(cfg, spec, grid, rng)

    base = cfg["energy"].get("base_order")
    base = float(spec.critical_index) if base is None else float(base)
    theta = float(spec.theta)
    n_max = int(cfg["energy"]["n_max"])

    extra_orders = [float(s) for s in cfg["options"].get("extra_norm_orders", [])]
    if gamma is not None and gamma not in extra_orders:
        extra_orders.append(gamma)
    recorder = LadderRecorder(theta, base, n_max, extra_orders)
    observers: list = [recorder]
    identity_rec = None
    gronwall_rec = None
    if cfg["options"].get("energy_identity"):
        identity_rec = _EnergyIdentityRecorder(theta)
        observers.append(identity_rec)
    gr_order = cfg["options"].get("gronwall_order")
    if gr_order:
        gronwall_rec = _GronwallRecorder(spec, float(gr_order))
        observers.append(gronwall_rec)

    obs_times = cfgmod.observation_times(cfg)
    state = RunState(spec, u0, 0.0, float(cfg["time"]["dt"]))
    status = "ok"
    blowup_time = None
    try:
        integrate(
            state, float(cfg["time"]["t_end"]),
            obs_times=obs_times, observers=observers,
            adaptive=bool(cfg["options"].get("adaptive", False)),
            cfl_safety=bool(cfg["options"].get("cfl_safety", False)),
        )
    except BlowUpError as exc:
        status = "blown_up"
        blowup_time = exc.t

    verdicts: dict = {
        "schema_version": cfgmod.SCHEMA_VERSION,
        "status": status,
        "blowup_time": blowup_time,
        "model": {
            "name": spec.name,
            "theta": str(spec.theta),
            "critical_index": str(spec.critical_index),
            "mean_density": spec.mean_density,
            "admissibility": adm.as_dict(),
            "admissibility_override_used": adm_failure_recorded,
            "exponent_witness": witness_dict,
        },
        "energy": {
            "rule": cfg["energy"]["rule"],
            "n_max": n_max,
            "base_order": base,
            "theta": theta,
            "t0": 0.0,
        },
    }

    times = recorder.times_array
    weights = None
    if times.size >= 2:
        gamma_col = None
        if gamma is not None:
            gamma_col = recorder.extra_array[:, extra_orders.index(gamma)]
        weights, weight_notes = _build_weights(
            cfg, spec, base, recorder, {"gamma": gamma, "gamma_column": gamma_col}
        )
        verdicts["energy"]["weight_notes"] = weight_notes

        t0 = 0.0
        t0_threshold = cfg["energy"].get("t0_threshold")
        if t0_threshold is not None:
            below = np.nonzero(recorder.ladder[:, 0] < float(t0_threshold))[0]
            if below.size:
                t0 = float(times[below[0]])
            else:
                verdicts["energy"]["t0_threshold_never_reached"] = True
        verdicts["energy"]["t0"] = t0

        sel = times >= t0
        trace = EnergyTrace.from_ladder(
            times[sel], recorder.ladder[sel], weights, theta, base, t0
        )
        mono = monotonicity_report(trace)
        verdicts["monotonicity"] = {
            "max_relative_increase": mono.max_relative_increase,
            "first_violation_time": mono.first_violation_time,
            "monotone": mono.first_violation_time is None,
            "tolerance": mono.tolerance,
        }
        verdicts["energy"]["tail_fraction_max"] = float(
            np.max(trace.terms[:, -1] / np.maximum(trace.totals, 1e-300))
        )

        decay: dict = {}
        for n in cfg["options"].get("decay_orders", []):
            n = int(n)
            if n > weights.n_max:
                continue
            try:
                fit = decay_fit(trace, n)
            except ValueError as exc:
                decay[str(n)] = {"error": str(exc)}
                continue
            decay[str(n)] = {
                "fitted_exponent": fit.fitted_exponent,
                "bound_margin": fit.bound_margin,
            }
        verdicts["decay"] = decay

        d0: dict = {}
        if base <= 0:
            d0["l2"] = {
                "exponent": -base / (2.0 * theta),
                "value": measured_decay_constant(times, recorder.l2, -base / (2.0 * theta)),
            }
        if gamma is not None:
            d0["gamma"] = {
                "gamma": gamma,
                "exponent": (gamma - base) / (2.0 * theta),
                "value": measured_decay_constant(
                    times, gamma_col, (gamma - base) / (2.0 * theta)
                ),
            }
        verdicts["empirical_d0"] = d0

        if cfg["options"].get("calibrate"):
            calibrated = calibrate_weights(
                lambda: (times[sel], recorder.ladder[sel]), n_max
            )
            (out_dir / "weights_calibrated.json").write_text(
                json.dumps(calibrated.as_dict(), indent=2)
            )
            cal_trace = EnergyTrace.from_ladder(
                times[sel], recorder.ladder[sel], calibrated, theta, base, t0
            )
            cal_mono = monotonicity_report(cal_trace)
            verdicts["calibration"] = {
                "values": [float(v) for v in calibrated.values],
                "flags": calibrated.params["flags"],
                "max_relative_increase": cal_mono.max_relative_increase,
            }

    if identity_rec is not None and len(identity_rec.times) >= 3:
        tt = np.asarray(identity_rec.times)
        l2sq = np.asarray(identity_rec.l2sq)
        diss = np.asarray(identity_rec.diss)
        integral = cumulative_simpson(diss, x=tt, initial=0.0)
        defect = np.abs(l2sq + 2.0 * integral - l2sq[0]) / l2sq[0]
        verdicts["energy_identity"] = {
            "max_relative_defect": float(np.max(defect)),
            "dissipated_fraction": float(2.0 * integral[-1] / l2sq[0]),
        }

    if gronwall_rec is not None and len(gronwall_rec.times) >= 3:
        # Measured pointwise trilinear constant c_b turns, via Young and the
        # dissipation balance 2*int ||grad u||^2 <= ||u0||^2, into
        #   ||u(t)||_{-beta} <= exp((c_b^2/4) int_0^t ||grad u||^2 ds) ||u0||_{-beta}
        #                    <= exp((c_b^2/8) ||u0||^2) ||u0||_{-beta}.
        beta = gronwall_rec.beta
        tt = np.asarray(gronwall_rec.times)
        neg = np.asarray(gronwall_rec.neg_norm)
        diss = np.asarray(gronwall_rec.diss)
        c_b = float(np.max(gronwall_rec.ratio))
        integral = cumulative_simpson(diss, x=tt, initial=0.0)
        running_bound = np.exp(0.25 * c_b**2 * integral) * neg[0]
        c_meas = c_b**2 / 8.0
        l2_initial = float(gronwall_rec.l2[0])
        global_bound = float(np.exp(c_meas * l2_initial**2) * neg[0])
        verdicts["gronwall"] = {
            "beta": beta,
            "bilinear_constant": c_b,
            "C": c_meas,
            "initial_l2": l2_initial,
            "sup_neg_norm": float(np.max(neg)),
            "initial_neg_norm": float(neg[0]),
            "global_bound": global_bound,
            "global_bound_ok": bool(np.max(neg) <= global_bound * (1.0 + 1e-9)),
            "running_bound_ok": bool(np.all(neg <= running_bound * (1.0 + 1e-9))),
        }

    if cfg["options"].get("mild") and status == "ok":
        pic = picard_solve(
            u0, spec, float(cfg["options"].get("mild_t_end", 0.1)),
            gamma=gamma,
        )
        verdicts["mild"] = pic.as_dict()
        (out_dir / "mild_report.json").write_text(
            json.dumps(pic.as_dict(), indent=2)
        )

    # persist
    canonical = cfgmod.canonical_json(cfg)
    (out_dir / "config.json").write_text(canonical)
    config_hash = hashlib.sha256(canonical.encode()).hexdigest()
    verdicts["config_hash"] = config_hash

    paths = {"config": out_dir / "config.json"}
    if weights is not None:
        (out_dir / "weights.json").write_text(json.dumps(weights.as_dict(), indent=2))
        paths["weights"] = out_dir / "weights.json"
        trace_path = out_dir / "trace.csv"
        write_trace(
            trace_path, times[sel], np.asarray(recorder.l2)[sel], trace,
            extra_orders, recorder.extra_array[sel],
        )
        verdicts["trace_sha256"] = _sha256(trace_path)
        paths["trace"] = trace_path
        try:
            _emit_plots(out_dir, trace, cfg)
            paths["plots"] = out_dir / "plots"
        except Exception as exc:  # plotting must never fail a run
            verdicts["plot_error"] = str(exc)

    (out_dir / "verdicts.json").write_text(json.dumps(verdicts, indent=2))
    (out_dir / "metadata.json").write_text(json.dumps({
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "runtime_seconds": _time.perf_counter() - t_start,
        "package": "specenergy",
        "config_hash": config_hash,
    }, indent=2))
    return RunRecord(config_hash, status, out_dir, verdicts, paths)


# ---------------------------------------------------------------------------
# report / check / calibrate / mild entry points

_RECOMPUTE_TOL = 1e-9


def report(run_dir) -> dict:
    """Regenerate verdicts from the stored trace and compare with the run's
    verdicts.json; re-emit plots.  The trace checksum must match."""
    run_dir = Path(run_dir)
    needed = ["config.json", "verdicts.json", "trace.csv", "weights.json"]
    missing = [n for n in needed if not (run_dir / n).exists()]
    if missing:
        raise NotARunError(
            f"{run_dir} is not a run directory (missing {', '.join(missing)})"
        )
    verdicts = json.loads((run_dir / "verdicts.json").read_text())
    cfg = json.loads((run_dir / "config.json").read_text())
    actual = _sha256(run_dir / "trace.csv")
    if actual != verdicts.get("trace_sha256"):
        raise ChecksumError(
            f"trace.csv checksum mismatch: stored {verdicts.get('trace_sha256')}, "
            f"actual {actual}"
        )
    weights_rec = json.loads((run_dir / "weights.json").read_text())
    weights = WeightSequence(
        weights_rec["rule"], tuple(weights_rec["values"]),
        weights_rec.get("params", {}),
    )
    tr = read_trace(run_dir / "trace.csv")
    e = verdicts["energy"]
    trace = EnergyTrace.from_ladder(
        tr["times"], tr["ladder"], weights, e["theta"], e["base_order"], e["t0"]
    )
    mono = monotonicity_report(trace)
    recomputed = {
        "monotonicity": {
            "max_relative_increase": mono.max_relative_increase,
            "first_violation_time": mono.first_violation_time,
            "monotone": mono.first_violation_time is None,
        },
        "decay": {},
    }
    for key in verdicts.get("decay", {}):
        if "error" in verdicts["decay"][key]:
            continue
        fit = decay_fit(trace, int(key))
        recomputed["decay"][key] = {
            "fitted_exponent": fit.fitted_exponent,
            "bound_margin": fit.bound_margin,
        }

    mismatches = []
    stored_mono = verdicts.get("monotonicity", {})
    if stored_mono:
        if abs(stored_mono["max_relative_increase"]
               - recomputed["monotonicity"]["max_relative_increase"]) > _RECOMPUTE_TOL:
            mismatches.append("monotonicity.max_relative_increase")
        if stored_mono.get("monotone") != recomputed["monotonicity"]["monotone"]:
            mismatches.append("monotonicity.monotone")
    for key, fit in recomputed["decay"].items():
        stored = verdicts["decay"].get(key, {})
        for fld in ("fitted_exponent", "bound_margin"):
            ref = stored.get(fld)
            if ref is None or abs(ref - fit[fld]) > _RECOMPUTE_TOL * max(1.0, abs(ref)):
                mismatches.append(f"decay.{key}.{fld}")

    try:
        _emit_plots(run_dir, trace, cfg)
    except Exception:
        pass
    return {
        "run_dir": str(run_dir),
        "status": verdicts.get("status"),
        "verdicts": verdicts,
        "recomputed": recomputed,
        "matches": not mismatches,
        "mismatches": mismatches,
    }


def check(target) -> dict:
    """Admissibility + critical index + exponent witness for a model name or
    a JSON spec file."""
    spec = _spec_from_target(target)
    adm = check_admissibility(spec)
    out = {
        "model": spec.name,
        "d": spec.d,
        "theta": str(spec.theta),
        "critical_index": str(spec.critical_index),
        "critical_index_float": float(spec.critical_index),
        "admissibility": adm.as_dict(),
        "ok": bool(adm.admissible),
    }
    try:
        out["exponent_witness"] = admissible_exponents(spec).as_dict()
    except ExponentInfeasible as exc:
        out["exponent_witness"] = {"infeasible": exc.certificate}
    return out


def _spec_from_target(target) -> ModelSpec:
    if isinstance(target, ModelSpec):
        return target
    text = str(target)
    path = Path(text)
    if path.exists():
        data = json.loads(path.read_text())
        if "R" in data:
            return model_from_config(data)
        cfg = cfgmod.load_config(data)
        return cfgmod.build_model(cfg)
    name, _, theta = text.partition(":")
    return model_for_diagnostics(name, theta=theta or None)


def calibrate_run(run_dir, n_max: int | None = None) -> WeightSequence:
    """Calibrate empirical weights against a stored run's ladder trace."""
    run_dir = Path(run_dir)
    if not (run_dir / "trace.csv").exists():
        raise NotARunError(f"{run_dir} has no trace.csv")
    tr = read_trace(run_dir / "trace.csv")
    if n_max is None:
        n_max = tr["ladder"].shape[1] - 1
    seq = calibrate_weights(lambda: (tr["times"], tr["ladder"]), n_max)
    (run_dir / "weights_calibrated.json").write_text(
        json.dumps(seq.as_dict(), indent=2)
    )
    return seq


def mild_run(cfg_source, out_path=None, overrides: dict | None = None) -> dict:
    """Run only the Picard construction for a configured model/data pair."""
    cfg = cfgmod.load_config(cfg_source)
    if overrides:
        cfg = cfgmod._merge(cfg, overrides)
        cfgmod.validate_config(cfg)
    spec = cfgmod.build_model(cfg)
    grid = cfgmod.build_grid(cfg, spec)
    rng = np.random.default_rng(int(cfg["options"]["seed"]))
    u0 = cfgmod.build_initial_field(cfg, spec, grid, rng)
    result = picard_solve(u0, spec, float(cfg["options"].get("mild_t_end", 0.1)))
    payload = result.as_dict()
    if out_path is not None:
        Path(out_path).write_text(json.dumps(payload, indent=2))
    return payload


# ---------------------------------------------------------------------------
# plots

def _emit_plots(out_dir: Path, trace: EnergyTrace, cfg: dict) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plots = Path(out_dir) / "plots"
    plots.mkdir(exist_ok=True)
    times = trace.times
    positive = times > trace.t0

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(times, trace.totals, "k-", lw=1.5, label="E(t)")
    ax1.set_xlabel("t")
    ax1.set_ylabel("weighted energy")
    if np.all(trace.totals > 0) and np.any(positive):
        ax1.set_yscale("log")
    ax1.legend()
    ax2.stackplot(times, trace.terms.T)
    ax2.set_xlabel("t")
    ax2.set_ylabel("per-order terms")
    fig.tight_layout()
    fig.savefig(plots / "energy.svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4.5))
    alphas = trace.weights.as_floats()
    base_sq = trace.ladder[0, 0] ** 2
    tau = times - trace.t0
    orders = cfg.get("options", {}).get("decay_orders", [1, 2]) or [1, 2]
    for n in orders:
        n = int(n)
        if n > trace.weights.n_max:
            continue
        mask = positive & (trace.ladder[:, n] > 0)
        if not np.any(mask):
            continue
        ax.loglog(tau[mask], trace.ladder[mask, n] ** 2, label=f"order {n}")
        if alphas[n] > 0 and base_sq > 0:
            ax.loglog(tau[mask], base_sq / (alphas[n] * tau[mask] ** n),
                      "--", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("squared ladder norm (dashed: decay bound)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(plots / "ladder.svg")
    plt.close(fig)
