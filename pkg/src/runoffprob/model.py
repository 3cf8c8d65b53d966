"""Dirichlet-multinomial posterior model for poll contingency tables.

Counts over the categories (candidates plus one blank-vote slot) are
multinomial; the conjugate Dirichlet posterior simply adds counts to the
parameter vector.  Successive polls from the same pollster are chained by
scaling the previous posterior down before folding in the new counts,
which keeps the point estimate while letting fresh data dominate.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .numerics import DomainError, GammaMarginal

PRIOR_KINDS = {"uniform": 1.0, "jeffreys": 0.5}


class Round(str, Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class CategoryLayout:
    """Ordered categories of the contingency table, one of them blank."""

    labels: tuple[str, ...]
    blank_index: int

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate category labels")
        if not 0 <= self.blank_index < len(self.labels):
            raise ValueError("blank_index out of range")
        if len(self.labels) < 3:
            raise ValueError("need at least 2 candidates plus a blank category")

    @classmethod
    def from_labels(cls, labels: Iterable[str], blank_label: str = "blank") -> "CategoryLayout":
        labels = tuple(labels)
        if labels.count(blank_label) != 1:
            raise ValueError(f"expected exactly one {blank_label!r} category in {labels!r}")
        return cls(labels, labels.index(blank_label))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def blank_label(self) -> str:
        return self.labels[self.blank_index]

    @property
    def candidate_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.labels)) if i != self.blank_index)

    @property
    def candidate_labels(self) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in self.candidate_indices)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown category label {label!r}") from None


def scenario_layout(a: str, b: str, blank_label: str = "blank") -> CategoryLayout:
    """Three-category layout for a head-to-head scenario between a and b."""
    if a == b:
        raise ValueError("scenario needs two distinct candidates")
    if blank_label in (a, b):
        raise ValueError("blank cannot enter a scenario")
    first, second = sorted((a, b))
    return CategoryLayout.from_labels((first, second, blank_label), blank_label)


@dataclass(frozen=True)
class PollObservation:
    """One poll's count vector, aligned with a CategoryLayout.

    Counts exclude the undecided respondents, so they may sum to less than
    the reported number of interviews.
    """

    pollster: str
    date: dt.date
    round: Round
    scenario: Optional[tuple[str, str]]
    counts: tuple[int, ...]
    sample_size_reported: int
    layout: CategoryLayout

    def __post_init__(self) -> None:
        if len(self.counts) != len(self.layout):
            raise ValueError("counts length does not match layout")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        if self.sample_size_reported <= 0:
            raise ValueError("sample_size_reported must be positive")
        if sum(self.counts) > self.sample_size_reported:
            raise ValueError("counts exceed the reported sample size")
        if (self.round is Round.SECOND) != (self.scenario is not None):
            raise ValueError("scenario required iff round is 'second'")
        if self.scenario is not None:
            a, b = self.scenario
            for label in (a, b):
                if self.layout.index_of(label) == self.layout.blank_index:
                    raise ValueError("blank cannot be a scenario candidate")
            if a == b:
                raise ValueError("scenario candidates must differ")

    @property
    def poll_id(self) -> str:
        return f"{self.pollster}/{self.date.isoformat()}"


@dataclass(frozen=True)
class DirichletPosterior:
    """Dirichlet parameter vector over a category layout."""

    layout: CategoryLayout
    alpha: tuple[float, ...]
    provenance: tuple[str, ...] = field(default=())
    pollster: Optional[str] = None

    def __post_init__(self) -> None:
        if len(self.alpha) != len(self.layout):
            raise ValueError("alpha length does not match layout")
        if any(not (a > 0 and np.isfinite(a)) for a in self.alpha):
            raise ValueError("all alpha must be positive and finite")

    @property
    def concentration(self) -> float:
        return float(sum(self.alpha))


def noninformative_prior(
    layout: CategoryLayout,
    kind: str = "uniform",
    pollster: Optional[str] = None,
) -> DirichletPosterior:
    """Flat prior: all alpha = 1 (uniform) or 1/2 (jeffreys)."""
    try:
        a = PRIOR_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown prior kind {kind!r}, expected one of {sorted(PRIOR_KINDS)}") from None
    return DirichletPosterior(
        layout=layout,
        alpha=(a,) * len(layout),
        provenance=(f"prior:{kind}",),
        pollster=pollster,
    )


def update(prior: DirichletPosterior, obs: PollObservation) -> DirichletPosterior:
    """Conjugate update: add the observed counts to the parameter vector."""
    if obs.layout != prior.layout:
        raise ValueError("observation layout does not match the posterior layout")
    if prior.pollster is not None and obs.pollster != prior.pollster:
        raise ValueError(
            f"cannot fold a {obs.pollster!r} poll into a {prior.pollster!r} chain"
        )
    return DirichletPosterior(
        layout=prior.layout,
        alpha=tuple(a + c for a, c in zip(prior.alpha, obs.counts)),
        provenance=prior.provenance + (obs.poll_id,),
        pollster=prior.pollster if prior.pollster is not None else obs.pollster,
    )


def scale_forward(post: DirichletPosterior, w: float) -> DirichletPosterior:
    """Shrink the concentration by w in (0, 1], keeping the mean.

    This turns the previous poll's posterior into the next poll's prior.
    """
    if not (0.0 < w <= 1.0):
        raise DomainError(f"scale factor must lie in (0, 1], got {w!r}")
    return DirichletPosterior(
        layout=post.layout,
        alpha=tuple(w * a for a in post.alpha),
        provenance=post.provenance,
        pollster=post.pollster,
    )


def posterior_mean(post: DirichletPosterior) -> np.ndarray:
    """Mean vote share per category: alpha / sum(alpha)."""
    alpha = np.asarray(post.alpha, dtype=float)
    return alpha / alpha.sum()


def gamma_representation(post: DirichletPosterior, rate: float = 1.0) -> tuple[GammaMarginal, ...]:
    """Independent Gamma(alpha_i, rate) marginals whose normalization
    reproduces the Dirichlet; the common rate cancels in rank events."""
    return tuple(GammaMarginal(shape=a, rate=rate) for a in post.alpha)
