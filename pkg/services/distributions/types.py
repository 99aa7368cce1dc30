from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, field_validator

from core.domain import DistributionKind
from services.geometry import OneFormField, VectorFieldExpr


def _unit_sign(v: int) -> int:
    if v not in (1, -1):
        raise ValueError("co-orientation sign must be +1 or -1")
    return v


class KernelForm(BaseModel):
    """xi = ker(alpha); ``sign`` is the co-orientation, the normal points along sign * alpha^sharp."""

    kind: Literal[DistributionKind.kernel] = DistributionKind.kernel
    alpha: OneFormField
    sign: int = 1

    model_config = ConfigDict(frozen=True)

    @field_validator("sign")
    @classmethod
    def check_sign(cls, v: int) -> int:
        return _unit_sign(v)

    @property
    def chart(self):
        return self.alpha.chart

    def flipped(self) -> "KernelForm":
        return self.model_copy(update={"sign": -self.sign})


class Span(BaseModel):
    """xi = span(S, T); the normal points along sign * (S x T) raised by the metric."""

    kind: Literal[DistributionKind.span] = DistributionKind.span
    S: VectorFieldExpr
    T: VectorFieldExpr
    sign: int = 1

    model_config = ConfigDict(frozen=True)

    @field_validator("sign")
    @classmethod
    def check_sign(cls, v: int) -> int:
        return _unit_sign(v)

    @property
    def chart(self):
        return self.S.chart

    def flipped(self) -> "Span":
        return self.model_copy(update={"sign": -self.sign})


Distribution = Union[KernelForm, Span]
