"""Semiclassical quantization of rational polygon billiards.

The pipeline, in dependency order: exact cyclotomic arithmetic (`cyclo`),
rational-vector linear algebra (`ratlinalg`), validated polygon geometry
(`exactgeom`, ready-made shapes in `shapes`), unfolding into the elementary
pattern with its periods (`unfold`), period-lattice relations and double
rationality (`lattice`), momentum quantization and spectra (`quantize`),
sign prescriptions and plane-wave eigenfunctions (`swf`), the independent
finite-difference oracle (`oracle`), and the command-line front end (`cli`).
"""

from __future__ import annotations

from .errors import (
    BilliardError,
    CannotBalance,
    ClosureViolation,
    ConvergenceFailure,
    DegenerateCombination,
    DegeneratePair,
    MomentumMismatch,
    NonIntegerGenus,
    NonpositiveLength,
    NotDoublyRational,
    NotInLattice,
    NotPeriodicSkeleton,
    OrbitExplosion,
    OutOfRange,
    RankMismatch,
    SelfIntersection,
    SingularSystem,
    SymmetryNotAutomorphism,
    TooCoarse,
    UnquantizedMomentum,
)
from .exactgeom import (
    Polygon,
    RationalAngle,
    load_polygon,
    polygon_from_spec,
    rationalize_angles,
    solve_closure,
    validate_polygon,
)
from .lattice import (
    PeriodLattice,
    period_lattice,
    rationalize_relations,
    reduce_period,
)
from .oracle import (
    compare_spectra,
    deform_domain,
    fd_eigenvalues,
    perturbation_study,
    rasterize,
    richardson_order,
    verify_deformation,
)
from .quantize import (
    momentum_aperiodic,
    momentum_periodic,
    periodic_skeleton_check,
    quantum_momentum,
    spectrum,
    spectrum_csv,
    wavelength_report,
)
from .shapes import (
    broken_parallelogram,
    equilateral,
    isosceles_pi5,
    l_shape,
    parallelogram_pi3,
    rectangle,
    right_triangle_rationalized,
    square,
)
from .swf import (
    compile_swf,
    enumerate_prescriptions,
    evaluate,
    grid_csv,
    grid_pgm,
    l2_norm,
    real_combinations,
    symmetry_probe,
    verify_boundary,
    verify_helmholtz,
)
from .unfold import EPP, Period, build_epp, channel_exists, find_pocs, genus, period_basis

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "BilliardError",
    "CannotBalance",
    "ClosureViolation",
    "ConvergenceFailure",
    "DegenerateCombination",
    "DegeneratePair",
    "MomentumMismatch",
    "NonIntegerGenus",
    "NonpositiveLength",
    "NotDoublyRational",
    "NotInLattice",
    "NotPeriodicSkeleton",
    "OrbitExplosion",
    "OutOfRange",
    "RankMismatch",
    "SelfIntersection",
    "SingularSystem",
    "SymmetryNotAutomorphism",
    "TooCoarse",
    "UnquantizedMomentum",
    # geometry
    "Polygon",
    "RationalAngle",
    "load_polygon",
    "polygon_from_spec",
    "rationalize_angles",
    "solve_closure",
    "validate_polygon",
    "broken_parallelogram",
    "equilateral",
    "isosceles_pi5",
    "l_shape",
    "parallelogram_pi3",
    "rectangle",
    "right_triangle_rationalized",
    "square",
    # unfolding and periods
    "EPP",
    "Period",
    "build_epp",
    "channel_exists",
    "find_pocs",
    "genus",
    "period_basis",
    "PeriodLattice",
    "period_lattice",
    "rationalize_relations",
    "reduce_period",
    # quantization
    "momentum_aperiodic",
    "momentum_periodic",
    "periodic_skeleton_check",
    "quantum_momentum",
    "spectrum",
    "spectrum_csv",
    "wavelength_report",
    # wave functions
    "compile_swf",
    "enumerate_prescriptions",
    "evaluate",
    "grid_csv",
    "grid_pgm",
    "l2_norm",
    "real_combinations",
    "symmetry_probe",
    "verify_boundary",
    "verify_helmholtz",
    # oracle
    "compare_spectra",
    "deform_domain",
    "fd_eigenvalues",
    "perturbation_study",
    "rasterize",
    "richardson_order",
    "verify_deformation",
]
