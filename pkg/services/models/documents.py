"""
Conversion between chart/model JSON documents and runtime models.
"""

from __future__ import annotations

import logging
from typing import Dict

from core.domain import DistributionKind
from core.errors import ConfigError
from schemas.chart import ChartDocument, DistributionDocument, LocusDocument, ModelDocument
from services.distributions import KernelForm, Span
from services.geometry import Chart, MetricField, OneFormField, SingularLocus, VectorFieldExpr
from services.models.base import Model

logger = logging.getLogger(__name__)


def chart_from_document(doc: ChartDocument) -> Chart:
    return Chart(
        name=doc.name,
        coord_names=tuple(doc.coords),
        domain=tuple(tuple(d) for d in doc.domain),
        periodic=tuple(doc.periodic),
        singular_loci=tuple(SingularLocus(**locus.model_dump()) for locus in doc.singular_loci),
    )


def model_from_document(doc: ChartDocument) -> Model:
    chart = chart_from_document(doc)
    forms = {name: OneFormField.from_strings(chart, c) for name, c in doc.forms.items()}
    vectors = {name: VectorFieldExpr.from_strings(chart, c) for name, c in doc.vectors.items()}

    distributions: Dict[str, object] = {}
    for name, dist in doc.distributions.items():
        if dist.kind == DistributionKind.kernel:
            distributions[name] = KernelForm(alpha=forms[dist.form], sign=dist.sign)
        else:
            distributions[name] = Span(S=vectors[dist.S], T=vectors[dist.T], sign=dist.sign)
    referenced = {d.form for d in doc.distributions.values() if d.form}
    if not distributions:
        # a bare chart file: every form defines a kernel distribution of the same name
        distributions = {name: KernelForm(alpha=form) for name, form in forms.items()}
        referenced = set(forms)
    if not distributions:
        raise ConfigError(f"{doc.name}: no distribution or form to work with")

    default = getattr(doc, "default_distribution", None)
    if default is None:
        default = "foliation" if "foliation" in distributions else next(iter(distributions))
    if default not in distributions:
        raise ConfigError(f"{doc.name}: default distribution {default!r} is not defined")

    frames = {name: (vectors[a], vectors[b]) for name, (a, b) in doc.frames.items()}
    named_frames = dict(getattr(doc, "named_frames", {}))
    for dist, frame in named_frames.items():
        if frame not in frames:
            raise ConfigError(f"{doc.name}: distribution {dist!r} names unknown frame {frame!r}")

    return Model(
        model_id=getattr(doc, "model_id", doc.name),
        chart=chart,
        metric=MetricField.from_strings(chart, doc.metric),
        distributions=distributions,
        frames=frames,
        named_frames=named_frames,
        forms={name: form for name, form in forms.items() if name not in referenced},
        parameters=dict(getattr(doc, "parameters", {})),
        default_distribution=default,
    )


def model_to_document(model: Model) -> ModelDocument:
    chart = model.chart
    forms = {name: form.texts() for name, form in model.forms.items()}
    vectors: Dict[str, list] = {}
    distributions: Dict[str, DistributionDocument] = {}
    for name, dist in model.distributions.items():
        if isinstance(dist, KernelForm):
            key = name if name not in forms else f"{name}.alpha"
            forms[key] = dist.alpha.texts()
            distributions[name] = DistributionDocument(kind=DistributionKind.kernel, form=key, sign=dist.sign)
        else:
            vectors[f"{name}.S"] = dist.S.texts()
            vectors[f"{name}.T"] = dist.T.texts()
            distributions[name] = DistributionDocument(
                kind=DistributionKind.span, S=f"{name}.S", T=f"{name}.T", sign=dist.sign
            )
    frames = {}
    for name, (X, Y) in model.frames.items():
        vectors[f"{name}.1"] = X.texts()
        vectors[f"{name}.2"] = Y.texts()
        frames[name] = (f"{name}.1", f"{name}.2")

    return ModelDocument(
        name=chart.name,
        coords=chart.coord_names,
        domain=chart.domain,
        periodic=chart.periodic,
        singular_loci=[LocusDocument(**locus.model_dump()) for locus in chart.singular_loci],
        metric=model.metric.texts(),
        forms=forms,
        vectors=vectors,
        distributions=distributions,
        frames=frames,
        model_id=model.model_id,
        parameters=model.parameters,
        named_frames=model.named_frames,
        default_distribution=model.default_distribution,
    )
