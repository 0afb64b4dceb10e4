"""fluidalg: finite-dimensional fluid algebras and their Euler dynamics.

An algebra is a triple of arrays on R^n -- an alternating trilinear form,
a symmetric nondegenerate linking form, and a positive definite metric.
The package evaluates the forms, the curl operator they induce, the Euler
evolution ODE with its conserved energy and helicity, vorticity transport,
the induced bracket and its Jacobi defect, and ships structure-preserving
integrators, concrete instances (rigid body, spectral flat torus, seeded
random algebras), a diagnostics suite, and a CLI.
"""

from .core import (
    AlgebraDataError,
    AlgebraFormatError,
    AlgebraValidationError,
    ConditioningWarning,
    FluidAlgebra,
    TripleForm,
    ValidationReport,
    curl,
    energy,
    g_dual_norm,
    g_norm,
    helicity,
    inverse_curl,
    linking,
    load_algebra,
    make_rng,
    metric_inner,
    save_algebra,
    triple,
    validate,
)
from .diagnostics import DiagnosticsReport, IDENTITY_NAMES, run_identity_suite
from .dynamics import (
    RhsEvaluation,
    circulation_defect,
    euler_rhs,
    euler_rhs_info,
    induced_bracket,
    jacobiator,
    transport,
    vorticity_rhs,
)
from .instances import (
    GenerationError,
    LieAlgebraInput,
    TorusBasis,
    TorusMode,
    TorusSizeError,
    beltrami_state,
    build_torus_algebra,
    from_lie_algebra,
    random_algebra,
    rigid_body,
    so3,
)
from .integrators import (
    IntegrationResult,
    IntegratorSpec,
    NumericalFailure,
    ProjectionError,
    ProjectionSettings,
    TraceRecord,
    co_evolve_probe,
    integrate,
    project_to_invariants,
    rk4_step,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraDataError",
    "AlgebraFormatError",
    "AlgebraValidationError",
    "ConditioningWarning",
    "DiagnosticsReport",
    "FluidAlgebra",
    "GenerationError",
    "IDENTITY_NAMES",
    "IntegrationResult",
    "IntegratorSpec",
    "LieAlgebraInput",
    "NumericalFailure",
    "ProjectionError",
    "ProjectionSettings",
    "RhsEvaluation",
    "TorusBasis",
    "TorusMode",
    "TorusSizeError",
    "TraceRecord",
    "TripleForm",
    "ValidationReport",
    "beltrami_state",
    "build_torus_algebra",
    "circulation_defect",
    "co_evolve_probe",
    "curl",
    "energy",
    "euler_rhs",
    "euler_rhs_info",
    "from_lie_algebra",
    "g_dual_norm",
    "g_norm",
    "helicity",
    "induced_bracket",
    "integrate",
    "inverse_curl",
    "jacobiator",
    "linking",
    "load_algebra",
    "make_rng",
    "metric_inner",
    "project_to_invariants",
    "random_algebra",
    "rigid_body",
    "rk4_step",
    "run_identity_suite",
    "save_algebra",
    "so3",
    "transport",
    "triple",
    "validate",
    "vorticity_rhs",
    "__version__",
]
