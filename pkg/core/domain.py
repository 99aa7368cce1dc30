import enum


class Classification(str, enum.Enum):
    elliptic = "elliptic"
    parabolic = "parabolic"
    hyperbolic = "hyperbolic"
    mixed = "mixed"


class Character(str, enum.Enum):
    foliation = "foliation"
    contact = "contact"
    neither = "neither"


class DistributionKind(str, enum.Enum):
    kernel = "kernel"
    span = "span"


class ExpectationKind(str, enum.Enum):
    bound = "bound"
    classification = "classification"
    equality = "equality"


class OutputFormat(str, enum.Enum):
    json = "json"
    csv = "csv"
