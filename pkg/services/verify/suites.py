"""
Built-in suites. Each one bundles the checks behind a single geometric claim;
``resolve_suite("builtin:<name>")`` returns a fresh SuiteSpec.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from core.domain import Classification, ExpectationKind
from core.errors import ConfigError
from repositories.document_repository import DocumentRepository
from schemas.suite import CheckSpec, Expectation, SuiteSpec
from services.models import CONTACT_EXAMPLES, FOLIATION_EXAMPLES, PERIODIC_EXAMPLES

BUILTIN_PREFIX = "builtin:"

# squared distance from the disk center, so the bump has no sqrt kink
BUMP = "(1 - smoothstep(0.04, 0.16, (u - 0.5)^2 + (v - 0.5)^2))"


def _bound(bound: float = None, minimum: float = None) -> Expectation:
    return Expectation(kind=ExpectationKind.bound, bound=bound, minimum=minimum)


def _is(classification: Classification, negate: bool = False) -> Expectation:
    return Expectation(kind=ExpectationKind.classification, classification=classification, negate=negate)


def random_spd_pairs(count: int = 20, seed: int = 0) -> List[Tuple[List[str], List[str]]]:
    """
    Constant SPD G and H = G + w M with w a bump on the unit square and M a
    random SPD matrix, so G and H agree outside a disk and H - G has rank two.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        L = np.array([[1.0 + rng.random(), 0.0], [rng.uniform(-0.5, 0.5), 1.0 + rng.random()]])
        G = L @ L.T
        angle = rng.uniform(0.0, math.pi)
        R = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
        M = R @ np.diag(rng.uniform(0.2, 1.0, size=2)) @ R.T
        g = [repr(float(G[0, 0])), repr(float(G[0, 1])), repr(float(G[1, 1]))]
        h = [f"{g[i]} + {BUMP} * {float(m)!r}" for i, m in enumerate((M[0, 0], M[0, 1], M[1, 1]))]
        pairs.append((g, h))
    return pairs


def metric_path_interface() -> SuiteSpec:
    square = {"u": [0.0, 1.0], "v": [0.0, 1.0], "periodic": [False, False]}
    checks = []
    for i, (g, h) in enumerate(random_spd_pairs()):
        checks.append(
            CheckSpec(
                name=f"rank-one path {i} is parabolic",
                target="page",
                operation="metric_path",
                params={**square, "G": g, "H": h},
                expectation=_bound(),
            )
        )
    g, h = random_spd_pairs(1, seed=1)[0]
    checks += [
        CheckSpec(
            name="straight-line interpolation is flagged",
            target="page",
            operation="metric_path",
            params={**square, "G": g, "H": h, "kind": "straight", "measure": "max_abs_det_dt"},
            expectation=_bound(minimum=1e-3),
        ),
        CheckSpec(
            name="diagonal stretch needs one stage",
            target="page",
            operation="metric_path",
            params={**square, "H": ["1 + 3 * " + BUMP, "0", "1"], "measure": "stages"},
            expectation=Expectation(kind=ExpectationKind.equality, value=1),
            tolerance=0.5,
        ),
        CheckSpec(
            name="path to a twist pullback is parabolic",
            target="page",
            operation="metric_path",
            grid=(24, 16, 9),
            params={"u": [1.0, 2.0], "twist": {"a": 1.25, "b": 1.75, "k": 1}},
            expectation=_bound(),
        ),
        CheckSpec(
            name="path to a twist pullback ends on the pullback",
            target="page",
            operation="metric_path",
            grid=(24, 16, 9),
            params={"u": [1.0, 2.0], "twist": {"a": 1.25, "b": 1.75, "k": 1}, "measure": "endpoint_error"},
            tolerance=1e-9,
            expectation=_bound(),
        ),
    ]
    return SuiteSpec(name="metric-path-interface", description="rank-one metric paths keep the slice foliation parabolic", checks=checks)


def reeb_parabolic() -> SuiteSpec:
    return SuiteSpec(
        name="reeb-parabolic",
        description="the Reeb solid torus carries a parabolic foliation",
        checks=[
            CheckSpec(name="classifies parabolic", target="reeb", operation="classify", grid=(64, 16, 16), expectation=_is(Classification.parabolic)),
            CheckSpec(name="extrinsic curvature vanishes", target="reeb", operation="max_abs_K", grid=(64, 16, 16), expectation=_bound()),
            CheckSpec(name="matches the closed form", target="reeb", operation="closed_form_reeb", tolerance=1e-9, expectation=_bound()),
            CheckSpec(
                name="disks and tori are totally geodesic",
                target="reeb",
                operation="max_B_norm",
                grid=(32, 8, 8),
                tolerance=1e-10,
                params={"regions": {"r": [[0.01, 0.30], [0.70, 1.0]]}},
                expectation=_bound(),
            ),
            CheckSpec(name="frame invariance", target="reeb", operation="frame_invariance", tolerance=1e-9, expectation=_bound()),
        ],
    )


def collar_open_book() -> SuiteSpec:
    return SuiteSpec(
        name="collar-open-book",
        description="collar foliation and the glued open book demo",
        checks=[
            CheckSpec(name="collar classifies parabolic", target="collar", operation="classify", expectation=_is(Classification.parabolic)),
            CheckSpec(name="parallel direction has zero B-row", target="collar", operation="collar_t_row", tolerance=1e-10, expectation=_bound()),
            CheckSpec(name="collar form is integrable", target="collar", operation="frobenius", tolerance=1e-10, expectation=_bound()),
            CheckSpec(name="overlaps agree", target="open-book", operation="atlas_mismatch", tolerance=1e-9, expectation=_bound()),
            CheckSpec(name="every chart parabolic", target="open-book", operation="atlas_parabolic", expectation=_is(Classification.parabolic)),
        ],
    )


def product_fibration_suite() -> SuiteSpec:
    return SuiteSpec(
        name="product-fibration",
        description="slices of a product metric are totally geodesic; twists preserve area",
        checks=[
            CheckSpec(name="classifies parabolic", target="product", operation="classify", expectation=_is(Classification.parabolic)),
            CheckSpec(name="slices are totally geodesic", target="product", operation="max_B_norm", tolerance=1e-10, expectation=_bound()),
            CheckSpec(name="frame invariance", target="product", operation="frame_invariance", tolerance=1e-9, expectation=_bound()),
            CheckSpec(
                name="twist pullback preserves the determinant",
                target="page",
                operation="twist_det_defect",
                tolerance=1e-10,
                params={"u": [1.0, 2.0], "G": ["2 + sin(v)", "0.3", "1 + 0.5 * u"], "twist": {"a": 1.25, "b": 1.75, "k": 1}},
                expectation=_bound(),
            ),
        ],
    )


def mean_curvature_divergence() -> SuiteSpec:
    checks = []
    for name in ("torus-graph", "torus-saddle", "torus-wave"):
        checks.append(CheckSpec(name=f"H = div(-n) on {name}", target=name, operation="divergence_defect", tolerance=1e-9, expectation=_bound()))
        checks.append(CheckSpec(name=f"H integrates to zero on {name}", target=name, operation="integral_H", grid=(64, 64, 64), tolerance=1e-6, expectation=_bound()))
    checks.append(CheckSpec(name="frame invariance on torus-saddle", target="torus-saddle", operation="frame_invariance", tolerance=1e-9, expectation=_bound()))
    return SuiteSpec(name="mean-curvature-divergence", description="mean curvature is a divergence, so it integrates to zero on closed manifolds", checks=checks)


def no_elliptic_periodic() -> SuiteSpec:
    checks = [
        CheckSpec(name=f"{name} is not elliptic", target=name, operation="classify", expectation=_is(Classification.elliptic, negate=True))
        for name in PERIODIC_EXAMPLES
    ]
    checks.append(CheckSpec(name="spheres in an open chart are elliptic", target="sphere", operation="classify", expectation=_is(Classification.elliptic)))
    for name in ("torus-graph", "torus-saddle", "torus-wave"):
        checks.append(
            CheckSpec(name=f"H integrates to zero on {name}", target=name, operation="integral_H", grid=(32, 32, 8), tolerance=1e-6, expectation=_bound())
        )
    return SuiteSpec(name="no-elliptic-periodic", description="no elliptic plane field on a closed example, open charts excepted", checks=checks)


def metric_transfer_report() -> SuiteSpec:
    return SuiteSpec(
        name="metric-transfer-report",
        description="moving a parabolic plane field's geometry onto a transverse one",
        checks=[
            CheckSpec(
                name="tilted planes stay parabolic",
                target="torus-tilted",
                operation="transfer",
                grid=(8, 8, 8),
                params={"xi": "foliation", "eta": "tilted"},
                expectation=_bound(),
            ),
            CheckSpec(
                name="second fundamental forms correspond",
                target="torus-tilted",
                operation="transfer",
                grid=(8, 8, 8),
                params={"xi": "foliation", "eta": "tilted", "measure": "max_residual"},
                expectation=_bound(),
            ),
            CheckSpec(
                name="curved leaves transfer onto themselves",
                target="sphere",
                operation="transfer",
                grid=(8, 8, 8),
                tolerance=1e-9,
                params={"xi": "foliation", "eta": "foliation", "measure": "max_residual"},
                expectation=_bound(),
            ),
            CheckSpec(
                name="reeb foliation moves onto tilted planes",
                target="reeb",
                operation="transfer",
                grid=(16, 4, 4),
                params={"xi": "foliation", "eta": {"beta": "dphi", "s": 0.05}, "measure": "max_abs_K_source"},
                expectation=_bound(),
            ),
            CheckSpec(
                name="tilted reeb planes stay transverse",
                target="reeb",
                operation="transfer",
                grid=(16, 4, 4),
                params={"xi": "foliation", "eta": {"beta": "dphi", "s": 0.05}, "measure": "min_angle"},
                expectation=_bound(minimum=1e-3),
            ),
        ],
    )


def contact_deformation_scan_suite() -> SuiteSpec:
    s_values = [-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5]
    return SuiteSpec(
        name="contact-deformation-scan",
        description="perturbing a foliation form towards a contact form",
        checks=[
            CheckSpec(
                name="rotating perturbation is contact for s != 0",
                target="torus-scan",
                operation="scan",
                grid=(8, 8, 8),
                params={"alpha": "foliation", "beta": "rotating", "s": s_values},
                expectation=_bound(minimum=1e-3),
            ),
            CheckSpec(
                name="normals converge as s -> 0",
                target="torus-scan",
                operation="scan",
                grid=(8, 8, 8),
                params={"alpha": "foliation", "beta": "rotating", "s": s_values, "measure": "deviation_at_smallest"},
                expectation=_bound(bound=0.11),
            ),
            CheckSpec(
                name="reeb perturbation is contact only where f' > 0",
                target="reeb",
                operation="scan",
                grid=(32, 4, 4),
                params={"alpha": "foliation", "beta": "dphi", "s": [0.0, 0.25, 0.5], "measure": "contact_min"},
                expectation=_bound(minimum=-1e-12),
            ),
            CheckSpec(
                name="zero perturbation stays integrable",
                target="torus-scan",
                operation="scan",
                grid=(8, 8, 8),
                params={"alpha": "foliation", "beta": "foliation", "s": s_values, "measure": "contact_abs_max"},
                tolerance=1e-12,
                expectation=_bound(),
            ),
        ],
    )


def contact_foliation_dichotomy() -> SuiteSpec:
    checks = [
        CheckSpec(name="standard contact volume min", target="standard-contact", operation="contact_volume", tolerance=1e-12, params={"stat": "min"}, expectation=Expectation(kind=ExpectationKind.equality, value=2.0)),
        CheckSpec(name="standard contact volume max", target="standard-contact", operation="contact_volume", tolerance=1e-12, params={"stat": "max"}, expectation=Expectation(kind=ExpectationKind.equality, value=2.0)),
        CheckSpec(
            name="standard contact is far from integrable near the origin",
            target="standard-contact",
            operation="frobenius",
            grid=(5, 5, 5),
            params={"stat": "abs_min", "ranges": {"x": [-0.1, 0.1], "y": [-0.1, 0.1], "z": [-0.1, 0.1]}},
            expectation=_bound(minimum=0.4),
        ),
    ]
    for name in FOLIATION_EXAMPLES:
        checks.append(CheckSpec(name=f"{name} is integrable", target=name, operation="frobenius", grid=(8, 8, 8), tolerance=1e-10, expectation=_bound()))
        checks.append(CheckSpec(name=f"{name} has no contact volume", target=name, operation="contact_volume", grid=(8, 8, 8), tolerance=1e-12, params={"stat": "abs_max"}, expectation=_bound()))
    for name in CONTACT_EXAMPLES:
        checks.append(CheckSpec(name=f"{name} is contact", target=name, operation="contact_volume", grid=(8, 8, 8), params={"stat": "abs_min"}, expectation=_bound(minimum=0.1)))
    return SuiteSpec(name="contact-foliation-dichotomy", description="shipped forms are either integrable or contact", checks=checks)


BUILTIN_SUITES: Dict[str, Callable[[], SuiteSpec]] = {
    "metric-path-interface": metric_path_interface,
    "reeb-parabolic": reeb_parabolic,
    "collar-open-book": collar_open_book,
    "product-fibration": product_fibration_suite,
    "mean-curvature-divergence": mean_curvature_divergence,
    "no-elliptic-periodic": no_elliptic_periodic,
    "metric-transfer-report": metric_transfer_report,
    "contact-deformation-scan": contact_deformation_scan_suite,
    "contact-foliation-dichotomy": contact_foliation_dichotomy,
}

# numbered names accepted wherever a builtin name is
ALIASES: Dict[str, str] = {
    "lemma-4-1-interface": "metric-path-interface",
    "lemma-4-2": "reeb-parabolic",
    "section-4-3": "collar-open-book",
    "prop-4-3": "product-fibration",
    "lemma-5-1": "mean-curvature-divergence",
    "cor-5-2": "no-elliptic-periodic",
    "lemma-5-5-report": "metric-transfer-report",
    "lemma-5-6-scan": "contact-deformation-scan",
}
ALIASES.update({f"paper-{alias}": name for alias, name in list(ALIASES.items())})


def resolve_suite(name: str, repository: DocumentRepository = None) -> SuiteSpec:
    """``builtin:<name>`` or a bare builtin name selects a shipped suite; anything else is a file path."""
    key = name[len(BUILTIN_PREFIX):] if name.startswith(BUILTIN_PREFIX) else name
    key = ALIASES.get(key, key)
    if key in BUILTIN_SUITES:
        return BUILTIN_SUITES[key]()
    if name.startswith(BUILTIN_PREFIX):
        raise ConfigError(f"unknown builtin suite {key!r}; known: {', '.join([*BUILTIN_SUITES, *ALIASES])}")
    return (repository or DocumentRepository()).load_suite(name)
