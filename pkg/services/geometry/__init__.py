from services.geometry.charts import (
    Chart,
    GridSpec,
    SingularLocus,
    axis_nodes,
    midpoint_grid,
    parse_grid,
    random_points,
    sample_grid,
)
from services.geometry.connection import (
    christoffel,
    christoffel_symbols,
    covariant_derivative,
    covariant_derivative_batch,
    divergence,
    divergence_batch,
    metric_at,
    safe_inverse,
)
from services.geometry.fields import (
    MetricField,
    MetricSource,
    OneFormField,
    VectorFieldExpr,
    leading_minors,
    spd_mask,
)
from services.geometry.forms import EPSILON, d_oneform, exterior_derivative, two_form, wedge3
from services.geometry.quadrature import integrate_scalar, quadrature_grid, volume_element
