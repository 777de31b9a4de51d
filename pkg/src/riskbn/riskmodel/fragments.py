"""Configurable ranked fragments merged into an existing risk network.

Two attachment points exist:

* ``process`` fragments (e.g. software development process quality)
  inform the hazard-probability prior: their score tightens the Beta
  prior on the testing-route node via the same decade map the
  manufacturer quality uses;
* ``device_use`` fragments revise the field-estimated hazard probability
  for an individual user through a monotone multiplier that is neutral
  at a medium usage score.
"""

from __future__ import annotations

import numpy as np

from riskbn.bn import Continuous, Network
from riskbn.errors import InvalidAttachmentPointError
from riskbn.nptlang import parse
from riskbn.nptlang.dists import tnormal_mean
from riskbn.riskmodel.scores import SCORE_VARIANCE, p1_prior_params, ranked_midpoint
from riskbn.riskmodel.template import (
    DEVICE_USE_MODIFIER,
    _merge_fragment_nodes,
    _num,
)
from riskbn.riskmodel.types import FragmentSpec


def fragment_score_mean(frag: FragmentSpec) -> float:
    mids = [ranked_midpoint(lbl) for lbl in frag.parents.values()]
    return tnormal_mean(float(np.mean(mids)), SCORE_VARIANCE, 0.0, 1.0)


def attach_fragment(net: Network, frag: FragmentSpec) -> Network:
    """Merge a fragment's nodes into ``net`` and wire its output.

    Process fragments replace the prior of ``p1_test``; device-use
    fragments interpose an individual hazard-probability node between
    ``p1_field`` and its consumers.
    """
    if not frag.parents:
        return net
    out = net.copy()

    if frag.kind == "process":
        if "p1_test" not in out.kinds:
            raise InvalidAttachmentPointError(
                "process fragments inform the testing-route prior; the "
                "network has no p1_test node"
            )
        _merge_fragment_nodes(out, frag)
        alpha, beta = p1_prior_params(fragment_score_mean(frag))
        out.set_npt("p1_test", parse(f"Beta({_num(alpha)}, {_num(beta)})"))
        return out

    if frag.kind == "device_use":
        if "p1_field" not in out.kinds:
            raise InvalidAttachmentPointError(
                "device-use fragments revise field-estimated hazard "
                "probability; the network has no p1_field node"
            )
        score = _merge_fragment_nodes(out, frag)
        node = "p1_field_individual"
        if node in out.kinds:
            raise InvalidAttachmentPointError(
                "the network already has an individual field node"
            )
        out.add_node(node, Continuous(0.0, 1.0))
        out.add_edge("p1_field", node)
        out.add_edge(score, node)
        out.set_npt(
            node, parse(f"p1_field * {DEVICE_USE_MODIFIER.format(score=score)}")
        )
        # rewire consumers of p1_field (other than the count node and the
        # new individual node) onto the individual estimate
        for child in list(out.kinds):
            if child in (node, "field_count"):
                continue
            if "p1_field" in out.parents(child):
                expr = out.npts.get(child)
                if expr is None:
                    continue
                import re

                from riskbn.nptlang import expr_to_text

                text = re.sub(r"\bp1_field\b", node, expr_to_text(expr))
                out.remove_edge("p1_field", child)
                out.add_edge(node, child)
                out.set_npt(child, parse(text))
        return out

    raise InvalidAttachmentPointError(f"unknown fragment kind {frag.kind!r}")
