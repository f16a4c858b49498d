"""specenergy: a pseudo-spectral laboratory for dissipative PDEs with
quadratic nonlinearities on the periodic torus.

The package simulates the model class u_t + (-Lap)^theta u = R(Su (x) Tu)
(Burgers, Navier-Stokes, surface quasi-geostrophic, Keller-Segel), evaluates
weighted infinite-order energy functionals along trajectories, verifies their
monotonicity and the resulting decay of higher Sobolev norms, and constructs
mild solutions by Picard iteration for cross-validation.
"""

from .spectral import (
    Grid,
    SpectralField,
    MultiplierSymbol,
    to_spectral,
    to_physical,
    apply_multiplier,
    fractional_laplacian,
    semigroup_apply,
    sobolev_norm,
    l2_norm,
    inner_product,
    dealias_product,
    dealias_truncate,
    interpolation_check,
    operator_gain,
)
from .models import (
    ModelSpec,
    AdmissibilityReport,
    ExponentWitness,
    ExponentInfeasible,
    make_model,
    model_names,
    critical_index,
    check_admissibility,
    admissible_exponents,
    bilinear_apply,
    project_subspace,
)
from .energy import (
    WeightSequence,
    EnergyTrace,
    weights_linear,
    weights_burgers_sobolev,
    weights_burgers_l2,
    weights_general,
    energy_eval,
    monotonicity_report,
    decay_fit,
    calibrate_weights,
    SmallnessError,
)
from .stepper import (
    RunState,
    BlowUpError,
    step_etdrk4,
    integrate,
    cfl_suggest,
    LadderRecorder,
)
from .mild import (
    Trajectory,
    mild_norm,
    time_mesh,
    semigroup_trajectory,
    duhamel_apply,
    picard_solve,
)
from .oracles import heat_oracle, cole_hopf

__version__ = "0.1.0"
