"""Vector-valued reproducing kernels, relative reproducing sections and l^p semi-inner products."""

from .core import DEFAULT_TOL, DimensionError, Tolerance, approx_eq, hermitian_part_distance
from .kernels import (
    BaseKernel,
    KernelSpec,
    KernelSpecError,
    NonHermitianKernelError,
    OperatorKernel,
    build_kernel,
    check_psd,
    gram,
    section_apply,
)
from .relative import (
    DifferenceConstraint,
    RelativeElement,
    RelativeSection,
    cocycle_defect,
    containment_residual,
    expand,
    fit_differences,
    is_feasible,
    relative_adjoint,
    relative_apply,
    relative_gram,
)
from .rkhs import (
    KernelMismatchError,
    RkhsElement,
    SingularSystemError,
    evaluate,
    fit_values,
    inner_product,
    norm,
)
from .sip_banach import (
    BanachFunctionSample,
    BanachFunctionSpace,
    SipSpace,
    dual_norm_check,
    duality_map,
    lp_norm,
    point_evaluation_norm,
    relative_evaluation,
    sip,
    sip_axiom_report,
)

__version__ = "0.1.0"
