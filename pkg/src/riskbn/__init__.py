"""Hybrid Bayesian network engine with a medical-device risk assessment model on top.

The package is organised in layers:

``riskbn.bn``
    Network data model: node kinds, ranked scales, edges, NPT attachment,
    structural validation and text serialization.
``riskbn.nptlang``
    The NPT expression language (distributions, weighted means, comparative
    IF, partitioned expressions): parser and evaluators.
``riskbn.inference``
    Discretized compilation, exact factor elimination, posterior queries,
    likelihood-weighted sampling oracle, brute-force enumeration and
    posterior-guided grid refinement.
``riskbn.riskmodel``
    The device risk model: P1/P2 estimation, per-severity risk and
    acceptability, overall residual risk, rework what-if, benefit-risk and
    multi-hazard combination.
``riskbn.scenario``
    Scenario file format (``.mdra``), report rendering and the CLI.
``riskbn.service``
    HTTP service exposing sessions, reports, overrides and posteriors.
"""

__version__ = "0.1.0"
