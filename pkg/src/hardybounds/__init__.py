"""Numerical bounds for weighted extremal problems in Hardy spaces of the disk.

Modules
-------
disk
    Möbius factors, the weight ``1 - |z|``, Blaschke products.
hardy
    ``H^p`` norms by boundary quadrature, the pointwise growth bound, kernels.
pointsets
    Finite samples from named point families, with JSON round-trip.
search
    ``g(E, eps, R, q)``: exact enumeration and a certified search.
solver
    ``D_2(E, eps, R)`` through the Szegő-kernel cone program.
study
    Sandwich studies, scaling fits and reports.
"""

from .disk import (
    DiskPoint,
    ZeroConfiguration,
    blaschke_factor,
    blaschke_product,
    product_log_modulus,
    product_modulus,
    pseudo_hyperbolic,
    weight_q,
)
from .errors import (
    CertificateError,
    ConditioningError,
    DomainError,
    SandwichViolation,
    ValidationError,
)
from .hardy import (
    BoundaryEvaluator,
    blaschke,
    check_pointwise_bound,
    constant,
    hp_norm,
    kernel_expansion,
    normalized_kernel,
    pointwise_bound,
    polynomial,
    szego_kernel,
)
from .pointsets import (
    PointSample,
    blaschke_sum,
    generate_sample,
    load_sample,
    non_blaschke_family,
    save_sample,
)
from .search import (
    CertifiedBound,
    ExtremalProblem,
    brute_force_g,
    feasibility_margin,
    revalidate,
    search_g,
    single_zero_best,
    sup_on_disk,
)
from .solver import (
    KernelCertificate,
    lower_bound_dp_from_blaschke,
    solve_dp_over_disk,
    solve_extremal_at_point,
    validate_certificate,
)
from .study import (
    StudyRow,
    fit_scaling,
    run_sandwich_study,
    verify_report,
)

__version__ = "0.1.0"
