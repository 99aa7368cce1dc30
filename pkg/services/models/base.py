from typing import Dict, Tuple, Union

from pydantic import BaseModel, ConfigDict

from services.distributions import KernelForm, Span
from services.geometry import Chart, MetricField, OneFormField, VectorFieldExpr


class Model(BaseModel):
    """A chart with a metric, named distributions, frames and auxiliary 1-forms."""

    model_id: str
    chart: Chart
    metric: MetricField
    distributions: Dict[str, Union[KernelForm, Span]]
    frames: Dict[str, Tuple[VectorFieldExpr, VectorFieldExpr]] = {}
    # distribution name -> frame name used when reporting B for it
    named_frames: Dict[str, str] = {}
    # extra forms such as deformation directions; kernel forms are reachable by distribution name
    forms: Dict[str, OneFormField] = {}
    parameters: Dict[str, float] = {}
    default_distribution: str = "foliation"

    model_config = ConfigDict(frozen=True)

    @property
    def foliation(self) -> Union[KernelForm, Span]:
        return self.distributions[self.default_distribution]

    def frame_for(self, distribution: str):
        name = self.named_frames.get(distribution)
        return self.frames[name] if name else None

    def form(self, name: str) -> OneFormField:
        if name in self.forms:
            return self.forms[name]
        dist = self.distributions.get(name)
        if isinstance(dist, KernelForm):
            return dist.alpha
        raise KeyError(name)
