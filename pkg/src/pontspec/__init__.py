"""Spectra, scattering and effective potentials of point-interaction Hamiltonians."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    MissingLevelError,
    PontspecError,
    PreconditionError,
    SingularMatrixError,
)
from .special import (
    OMEGA,
    BesselImOrder,
    BetaConstants,
    LambertEval,
    bessel_k_imag_order,
    beta_constants,
    expm1_complex,
    lambert_w0,
    lambert_w0_array,
)
from .gamma import (
    CenterConfig,
    gamma_local,
    gamma_nonlocal,
    green_function,
    resolvent_coefficient_sum,
    sqrt_minus,
)
from .local import (
    CollapseSample,
    LocalScattering,
    LocalSpectrum,
    collapse_diagnostic,
    local_eigenvalues,
    local_scattering_length,
    symmetric_pair_eigenvalues,
)
from .shooting import (
    LevelResult,
    RadialPotential,
    ShootRecord,
    find_levels,
    shoot,
)
from .twocenter import (
    EffectiveEigenvalue,
    ScatteringRecord,
    alpha_boundary,
    epsilon0,
    epsilon0_curve,
    epsilon1,
    epsilon1_curve,
    g_functions,
    generalized_eigenfunction,
    scattering_amplitude,
    scattering_length_theta,
)
from .efimov import (
    AuxiliaryPotential,
    EfimovSpectrum,
    LemmaBoundsRecord,
    PiecewisePotential,
    analytic_levels,
    asymptotic_levels,
    lemma_bounds_check,
    numeric_levels,
)
from .bo import (
    BOConfig,
    BOSpectrum,
    InstabilityRow,
    bo_levels,
    effective_potential,
    local_bo_instability_demo,
)

__version__ = "0.1.0"
