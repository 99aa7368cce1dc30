from services.models.base import Model
from services.models.catalog import (
    CONTACT_EXAMPLES,
    FOLIATION_EXAMPLES,
    MODELS,
    PERIODIC_EXAMPLES,
    get_model,
    product_example,
    torus_chart,
)
from services.models.collar import collar_chart, collar_model
from services.models.documents import chart_from_document, model_from_document, model_to_document
from services.models.metric_path import (
    ExpressionMetricPath,
    MetricPath,
    RankOnePath,
    rank_one_path,
    straight_line_path,
    verify_metric_path,
)
from services.models.open_book import assemble_open_book_demo, check_atlas, check_overlap, open_book_document
from services.models.product import (
    SurfaceMetric,
    TwistSpec,
    dehn_twist_pullback,
    product_fibration,
    surface_chart,
    with_fiber,
)
from services.models.reeb import (
    closed_form_B_reeb,
    compare_closed_form,
    reeb_profile,
    reeb_solid_torus,
    solid_torus_chart,
)
from services.models.scan import contact_deformation_scan, parse_s_range
from services.models.transfer import TransferredMetric, transfer_metric
