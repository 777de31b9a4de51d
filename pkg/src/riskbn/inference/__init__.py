"""Discretized inference engine and verification oracles."""

from riskbn.inference.compiler import CompiledNetwork, compile_network
from riskbn.inference.engine import posterior
from riskbn.inference.evidence import (
    CountObservation,
    Evidence,
    StateObservation,
    ValueObservation,
)
from riskbn.inference.exact import discretize_to_network, enumerate_exact
from riskbn.inference.grids import Grid, GridPolicy, GridSpec
from riskbn.inference.refine import RefineReport, refine
from riskbn.inference.sampler import sample
from riskbn.inference.summary import PosteriorSummary

__all__ = [
    "CompiledNetwork",
    "CountObservation",
    "Evidence",
    "Grid",
    "GridPolicy",
    "GridSpec",
    "PosteriorSummary",
    "RefineReport",
    "StateObservation",
    "ValueObservation",
    "compile_network",
    "discretize_to_network",
    "enumerate_exact",
    "posterior",
    "refine",
    "sample",
]
