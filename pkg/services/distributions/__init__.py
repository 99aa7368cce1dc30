from services.distributions.classify import (
    build_report,
    character_of,
    classification_of,
    classify,
    field_stats,
    integral_mean_curvature,
)
from services.distributions.operations import (
    at_point,
    contact_volume,
    extrinsic_curvature,
    frobenius_residual,
    mean_curvature,
    normal_field,
    second_fundamental_form,
    tangent_frame,
)
from services.distributions.plane_field import (
    PlaneFieldSample,
    evaluate,
    form_jets,
    frame_jets,
    kernel_frame,
    normal_jets,
)
from services.distributions.types import Distribution, KernelForm, Span
