"""Scoring map hypotheses against the observation history.

Likelihood of a completion given the history:

    l = (1 - beta/area) * (1 - gamma/area)

with ``beta`` the number of cells known in both lattices that disagree and
``gamma`` the number of cells the completion leaves unknown.  The posterior
is the exact normalization of these likelihoods under a uniform prior.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Sequence

from .gridworld import REWARD, UNKNOWN, ObservedMap
from .grammar import MapHypothesis


class BeliefCollapse(Exception):
    """Every hypothesis contradicts the observations (all likelihoods zero)."""


@dataclass(frozen=True)
class MatchReport:
    beta: int  # known-vs-known mismatched cells
    gamma: int  # cells the hypothesis leaves unknown
    area: int


@dataclass
class Posterior:
    hypotheses: List[MapHypothesis]  # posterior set, descending probability
    map_index: int  # index of the maximum-posteriori hypothesis

    @property
    def map_hypothesis(self) -> MapHypothesis:
        return self.hypotheses[self.map_index]


def match(hypothesis: MapHypothesis, observed: ObservedMap) -> MatchReport:
    """Count mismatched and unpredicted cells; collected rewards count as rewards."""
    if (hypothesis.width, hypothesis.height) != (observed.width, observed.height):
        raise ValueError("hypothesis / observation dimension mismatch")
    beta = 0
    gamma = 0
    w = observed.width
    collected = observed.collected
    for i, hc in enumerate(hypothesis.cells):
        if hc == UNKNOWN:
            gamma += 1
            continue
        oc = observed.cells[i]
        if oc == UNKNOWN:
            continue
        if (i % w, i // w) in collected:
            oc = REWARD
        if oc != hc:
            beta += 1
    return MatchReport(beta, gamma, observed.width * observed.height)


def likelihood(report: MatchReport) -> float:
    a = report.area
    return (1.0 - report.beta / a) * (1.0 - report.gamma / a)


def posterior(hypotheses: Sequence[MapHypothesis], observed: ObservedMap) -> Posterior:
    """Exact posterior under a uniform prior; zero-likelihood hypotheses dropped."""
    if not hypotheses:
        raise ValueError("empty hypothesis list")
    scored = []
    for h in hypotheses:
        l = likelihood(match(h, observed))
        if l > 0.0:
            scored.append((l, h))
    if not scored:
        raise BeliefCollapse("all hypotheses have zero likelihood")
    total = sum(l for l, _ in scored)
    out = [replace(h, posterior=l / total) for l, h in scored]
    out.sort(key=lambda h: (-h.posterior, -h.weight, bytes(h.cells)))
    return Posterior(out, 0)


def dump_posterior(hypotheses: Sequence[MapHypothesis], observed: ObservedMap) -> str:
    """Delimited debug table: weight, beta, gamma, likelihood, posterior."""
    post = posterior(hypotheses, observed)
    by_cells = {h.cells: h.posterior for h in post.hypotheses}
    lines = ["weight\tbeta\tgamma\tlikelihood\tposterior"]
    for h in hypotheses:
        r = match(h, observed)
        lines.append(
            f"{float(h.weight):.12g}\t{r.beta}\t{r.gamma}\t{likelihood(r):.12g}\t"
            f"{by_cells.get(h.cells, 0.0):.12g}"
        )
    return "\n".join(lines) + "\n"
