"""Ranked-score subnetworks evaluated in closed form.

Manufacturing process quality, device benefits and rework quality all
follow the same idiom: ranked parents feed a truncated-normal node whose
mean is the weighted mean of the parents' interval midpoints.  Where a
downstream consumer needs an adequacy score (benefits, rework), the
truncated normal is translated through a >= 0.5 threshold indicator, the
hidden-node translation the risk network also uses for acceptability.
"""

from __future__ import annotations

import numpy as np

from riskbn.bn import FIVE_POINT
from riskbn.errors import ScenarioSchemaError
from riskbn.inference.summary import PosteriorSummary
from riskbn.nptlang.dists import continuous_family, tnormal_prob_geq
from riskbn.riskmodel.types import (
    BenefitsInfo,
    ManufacturerInfo,
    RANKED_LABELS,
    ReworkInfo,
)

SCORE_VARIANCE = 0.01
GOOD_BOOL = 0.9
BAD_BOOL = 0.1
ADEQUACY_THRESHOLD = 0.5
REWORK_MAX_REDUCTION = 0.8

#: Prior pseudo-demands carried by a manufacturer-informed P1 prior.
P1_PRIOR_WEIGHT = 10.0


def ranked_midpoint(label: str) -> float:
    if label not in RANKED_LABELS:
        raise ScenarioSchemaError(
            f"ranked label must be one of {RANKED_LABELS}, got {label!r}"
        )
    return FIVE_POINT.midpoints[RANKED_LABELS.index(label)]


def _tnormal_summary(name: str, mu: float, grid_bins: int = 256) -> PosteriorSummary:
    edges = np.linspace(0.0, 1.0, grid_bins + 1)
    dist = continuous_family("tnormal", (mu, SCORE_VARIANCE, 0.0, 1.0), edges)
    return PosteriorSummary.from_bins(name, edges, dist.masses, dist.bin_values)


def process_quality(info: ManufacturerInfo | None) -> PosteriorSummary:
    """Posterior of the manufacturing process quality score on [0, 1].

    Present fields enter a weighted mean of midpoints (booleans map to
    0.9 clean / 0.1 flagged); with no evidence the score keeps its
    symmetric prior around 0.5.
    """
    contributions: list[float] = []
    if info is not None:
        if info.reputation is not None:
            contributions.append(ranked_midpoint(info.reputation))
        if info.customer_satisfaction is not None:
            contributions.append(ranked_midpoint(info.customer_satisfaction))
        for flag in (info.product_defects, info.process_additives, info.process_drifts):
            if flag is not None:
                contributions.append(BAD_BOOL if flag else GOOD_BOOL)
    if not contributions:
        edges = np.linspace(0.0, 1.0, 257)
        dist = continuous_family("uniform", (0.0, 1.0), edges)
        return PosteriorSummary.from_bins(
            "process_quality", edges, dist.masses, dist.bin_values
        )
    mu = float(np.mean(contributions))
    return _tnormal_summary("process_quality", mu)


def adequacy_score(midpoints: list[float]) -> float:
    """P(score >= 0.5) for the truncated-normal over the given midpoints."""
    mu = float(np.mean(midpoints))
    return tnormal_prob_geq(mu, SCORE_VARIANCE, 0.0, 1.0, ADEQUACY_THRESHOLD)


def benefit_score(benefits: BenefitsInfo) -> float:
    """Mean of the hidden ranked node translating benefit adequacy."""
    return adequacy_score(
        [
            ranked_midpoint(benefits.patient_population),
            ranked_midpoint(benefits.device_performance),
            ranked_midpoint(benefits.clinical_outcome),
        ]
    )


def rework_factor(rework: ReworkInfo | None) -> float:
    """Residual-risk multiplier applied to the hazard probability.

    f = 1 - 0.8 r with r the rework adequacy score, so a very-high
    quality/effort rework cuts risk to roughly a fifth.
    """
    if rework is None:
        return 1.0
    r = adequacy_score(
        [
            ranked_midpoint(rework.rework_quality),
            ranked_midpoint(rework.rework_effort),
        ]
    )
    return 1.0 - REWORK_MAX_REDUCTION * r


def p1_prior_params(quality_mean: float | None) -> tuple[float, float]:
    """Beta prior for the hazard probability per demand.

    Flat Beta(1, 1) without manufacturer information.  With a process
    quality score q, the prior mean is 10^(-2 - 2q) (so q = 1 gives 1e-4
    and q = 0 gives 1e-2, spanning the generic decade bands) carried
    with 10 pseudo-demands of weight.
    """
    if quality_mean is None:
        return 1.0, 1.0
    q = min(max(quality_mean, 0.0), 1.0)
    mean = 10.0 ** (-2.0 - 2.0 * q)
    alpha = P1_PRIOR_WEIGHT * mean
    return alpha, P1_PRIOR_WEIGHT - alpha
