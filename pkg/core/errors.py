"""
Error hierarchy shared by every service. Each error knows how to serialize
itself so the CLI and the suite runner can embed it into JSON reports.
"""

from __future__ import annotations

from typing import Any, Dict, Iterable, Optional, Sequence


def _point(point: Optional[Sequence[float]]) -> Optional[list]:
    if point is None:
        return None
    return [float(x) for x in point]


class PlaneFieldError(Exception):
    def __init__(self, detail: str, **context: Any) -> None:
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        return {"type": type(self).__name__, "detail": self.detail, **self.context}


class ExpressionSyntaxError(PlaneFieldError):
    def __init__(self, position: int, expected: Iterable[str], found: str = "") -> None:
        expected = sorted(set(expected))
        super().__init__(
            f"syntax error at position {position}: expected one of {', '.join(expected)}"
            + (f", found {found!r}" if found else ""),
            position=position,
            expected=expected,
        )
        self.position = position
        self.expected = expected


class UnknownIdentifier(PlaneFieldError):
    def __init__(self, name: str, position: int) -> None:
        super().__init__(f"unknown identifier {name!r} at position {position}", name=name, position=position)
        self.name = name
        self.position = position


class ArityError(PlaneFieldError):
    def __init__(self, name: str, expected: int, got: int, position: int) -> None:
        super().__init__(
            f"{name}() takes {expected} argument(s), got {got} (position {position})",
            name=name,
            expected=expected,
            got=got,
            position=position,
        )
        self.name = name


class DomainError(PlaneFieldError):
    def __init__(self, function: str, argument: Any) -> None:
        super().__init__(f"{function}: argument {argument!r} outside its domain", function=function, argument=argument)
        self.function = function
        self.argument = argument


class NotSPD(PlaneFieldError):
    def __init__(self, point: Optional[Sequence[float]], minor: int) -> None:
        super().__init__(
            f"metric not positive definite at {_point(point)} (leading minor {minor})",
            point=_point(point),
            minor=minor,
        )
        self.point = _point(point)
        self.minor = minor


class SingularSample(PlaneFieldError):
    def __init__(self, point: Optional[Sequence[float]], coordinate: str, value: float) -> None:
        super().__init__(
            f"sample {_point(point)} hits singular locus {coordinate} = {value}",
            point=_point(point),
            coordinate=coordinate,
            value=value,
        )


class DegenerateDistribution(PlaneFieldError):
    def __init__(self, point: Optional[Sequence[float]], reason: str) -> None:
        super().__init__(f"degenerate distribution at {_point(point)}: {reason}", point=_point(point), reason=reason)
        self.point = _point(point)


class NotTransverse(PlaneFieldError):
    def __init__(self, point: Optional[Sequence[float]], angle: float) -> None:
        super().__init__(
            f"normal not transverse to target distribution at {_point(point)} (angle {angle:.3e})",
            point=_point(point),
            angle=float(angle),
        )
        self.point = _point(point)
        self.angle = float(angle)


class NonSPDPath(PlaneFieldError):
    def __init__(self, t: float, point: Optional[Sequence[float]], depth: int) -> None:
        super().__init__(
            f"metric path leaves the SPD cone at t={t} p={_point(point)} after {depth} subdivisions",
            t=float(t),
            point=_point(point),
            depth=depth,
        )


class OverlapMismatch(PlaneFieldError):
    def __init__(self, overlap: str, mismatch: float, tol: float) -> None:
        super().__init__(
            f"overlap {overlap}: mismatch {mismatch:.3e} exceeds {tol:.1e}",
            overlap=overlap,
            mismatch=float(mismatch),
            tol=float(tol),
        )


class ConfigError(PlaneFieldError):
    pass


class EigenCrossingWarning(UserWarning):
    pass
