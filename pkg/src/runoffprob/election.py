"""Composition of the rank kernels into full election probabilities.

A candidate is elected by winning outright in the first round or by
reaching the runoff and winning it.  Following the source method, the
runoff branch multiplies three posterior probabilities: no outright
winner, the pair being the top two, and the head-to-head win from that
pair's second-round posterior.  The factors are not independent events
under the joint posterior; the product form is kept deliberately as the
method under study.

Head-to-head posteriors exist only for polled scenarios.  Pairs without
one either count a coin-flip runoff (fallback "half") or contribute
nothing (fallback "skip"); either way they are listed in the report.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .model import DirichletPosterior
from .numerics import DEFAULT_QUADRATURE, QuadratureError, QuadratureSpec
from .rank import prob_beats, prob_majority, prob_pair_top2

FALLBACK_MODES = ("half", "skip")
PARTITION_TOL = 1e-6


def pair_key(a: str, b: str) -> tuple[str, str]:
    """Canonical unordered-pair key: sorted label pair."""
    if a == b:
        raise ValueError("a pair needs two distinct candidates")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ScenarioTable:
    """Second-round posteriors indexed by unordered candidate-label pair."""

    entries: Mapping[tuple[str, str], DirichletPosterior] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, post in self.entries.items():
            if key != pair_key(*key):
                raise ValueError(f"scenario key {key!r} is not in canonical order")
            if len(post.layout) != 3:
                raise ValueError("a scenario posterior needs exactly 3 categories")
            for label in key:
                if post.layout.index_of(label) == post.layout.blank_index:
                    raise ValueError(f"{label!r} is the blank category of its scenario")

    @classmethod
    def of(cls, posteriors) -> "ScenarioTable":
        """Build from second-round posteriors, keyed by their candidates."""
        entries = {}
        for post in posteriors:
            key = pair_key(*post.layout.candidate_labels)
            if key in entries:
                raise ValueError(f"duplicate scenario for pair {key!r}")
            entries[key] = post
        return cls(entries)

    def get(self, a: str, b: str) -> Optional[DirichletPosterior]:
        return self.entries.get(pair_key(a, b))


@dataclass(frozen=True)
class ElectionReport:
    """Per-date election probabilities (the content of the time-series plots)."""

    date: Optional[dt.date]
    pollster: Optional[str]
    p_majority: Mapping[str, float]
    p_no_first_round_winner: float
    p_top2: Mapping[tuple[str, str], float]
    p_elected: Mapping[str, float]
    missing_scenarios: tuple[tuple[str, str], ...]
    fallback: str
    failures: tuple[str, ...] = ()


def _check_pollsters(post1: DirichletPosterior, scenarios: ScenarioTable) -> None:
    for key, post2 in scenarios.entries.items():
        if (
            post1.pollster is not None
            and post2.pollster is not None
            and post1.pollster != post2.pollster
        ):
            raise ValueError(
                f"scenario {key!r} comes from pollster {post2.pollster!r}, "
                f"the first-round posterior from {post1.pollster!r}; "
                "one report must not mix pollsters"
            )


def _check_fallback(fallback: str) -> None:
    if fallback not in FALLBACK_MODES:
        raise ValueError(f"fallback must be one of {FALLBACK_MODES}, got {fallback!r}")


def _runoff_win(
    scenarios: ScenarioTable,
    label_i: str,
    label_j: str,
    spec: QuadratureSpec,
    fallback: str,
) -> tuple[float, bool]:
    """P(i beats j in the runoff) and whether a fallback was used."""
    post2 = scenarios.get(label_i, label_j)
    if post2 is None:
        return (0.5, True) if fallback == "half" else (0.0, True)
    q = prob_beats(post2, post2.layout.index_of(label_i), post2.layout.index_of(label_j), spec)
    return q, False


def p_no_first_round_winner(
    post: DirichletPosterior, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """1 minus the summed outright-win probabilities (disjoint events)."""
    total = sum(prob_majority(post, i, spec) for i in post.layout.candidate_indices)
    if total > 1.0 + PARTITION_TOL:
        raise QuadratureError("outright-win probabilities sum beyond 1", 1.0 - total, 0.0)
    return min(1.0, max(0.0, 1.0 - total))


def p_elected(
    post1: DirichletPosterior,
    scenarios: ScenarioTable,
    i: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    fallback: str = "half",
) -> float:
    """Probability that candidate i is elected at the end of the process."""
    _check_fallback(fallback)
    _check_pollsters(post1, scenarios)
    layout = post1.layout
    label_i = layout.labels[i]
    p_none = p_no_first_round_winner(post1, spec)
    runoff = 0.0
    for j in layout.candidate_indices:
        if j == i:
            continue
        top2 = prob_pair_top2(post1, i, j, spec)
        q, _ = _runoff_win(scenarios, label_i, layout.labels[j], spec, fallback)
        runoff += top2 * q
    return prob_majority(post1, i, spec) + p_none * runoff


def full_report(
    post1: DirichletPosterior,
    scenarios: ScenarioTable,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    fallback: str = "half",
    date: Optional[dt.date] = None,
) -> ElectionReport:
    """Every probability for one poll date.

    Individual pair/candidate integrals that fail to converge are recorded
    in ``failures`` and reported as NaN; the remaining entries are still
    computed.
    """
    _check_fallback(fallback)
    _check_pollsters(post1, scenarios)
    layout = post1.layout
    candidates = layout.candidate_indices
    failures: list[str] = []

    majority: dict[str, float] = {}
    for i in candidates:
        label = layout.labels[i]
        try:
            majority[label] = prob_majority(post1, i, spec)
        except QuadratureError as exc:
            majority[label] = math.nan
            failures.append(f"majority[{label}]: {exc}")

    total_majority = sum(majority.values())
    if math.isnan(total_majority):
        p_none = math.nan
    else:
        if total_majority > 1.0 + PARTITION_TOL:
            raise QuadratureError(
                "outright-win probabilities sum beyond 1", 1.0 - total_majority, 0.0
            )
        p_none = min(1.0, max(0.0, 1.0 - total_majority))

    top2: dict[tuple[str, str], float] = {}
    for a_pos, i in enumerate(candidates):
        for j in candidates[a_pos + 1 :]:
            key = pair_key(layout.labels[i], layout.labels[j])
            try:
                top2[key] = prob_pair_top2(post1, i, j, spec)
            except QuadratureError as exc:
                top2[key] = math.nan
                failures.append(f"top2[{key}]: {exc}")

    if not failures:
        top2_sum = sum(top2.values())
        if abs(top2_sum - 1.0) > PARTITION_TOL:
            raise QuadratureError("top-2 pair probabilities do not partition to 1", top2_sum, 0.0)

    missing: set[tuple[str, str]] = set()
    elected: dict[str, float] = {}
    for i in candidates:
        label_i = layout.labels[i]
        runoff = 0.0
        for j in candidates:
            if j == i:
                continue
            label_j = layout.labels[j]
            try:
                q, used_fallback = _runoff_win(scenarios, label_i, label_j, spec, fallback)
            except QuadratureError as exc:
                q, used_fallback = math.nan, False
                failures.append(f"beats[{label_i} vs {label_j}]: {exc}")
            if used_fallback:
                missing.add(pair_key(label_i, label_j))
            runoff += top2[pair_key(label_i, label_j)] * q
        elected[label_i] = majority[label_i] + p_none * runoff

    return ElectionReport(
        date=date,
        pollster=post1.pollster,
        p_majority=majority,
        p_no_first_round_winner=p_none,
        p_top2=top2,
        p_elected=elected,
        missing_scenarios=tuple(sorted(missing)),
        fallback=fallback,
        failures=tuple(failures),
    )
