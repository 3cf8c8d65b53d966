"""Monte Carlo cross-checks for the quadrature kernels.

Each rank event is re-estimated as the proportion of posterior draws that
satisfy it, sampling straight from the Gamma representation (the common
rate cancels in every comparison, so draws use rate 1).  Streams come
from numpy's PCG64 generator, seeded explicitly; draws are produced in
fixed-size blocks whose sub-streams are derived from the seed and block
index, so estimates do not depend on how blocks are scheduled and repeat
bit-for-bit for a given (seed, n_draws).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .model import DirichletPosterior
from .numerics import DomainError

BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class OracleEstimate:
    estimate: float
    std_error: float
    n_draws: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_draws <= 0:
            raise ValueError("n_draws must be positive")


def sample_gamma(shape: float, rate: float, rng: np.random.Generator, size=None):
    """Gamma(shape, rate) variates from an explicit generator state."""
    if not (math.isfinite(shape) and shape > 0):
        raise DomainError(f"shape must be positive, got {shape!r}")
    if not (math.isfinite(rate) and rate > 0):
        raise DomainError(f"rate must be positive, got {rate!r}")
    draws = rng.standard_gamma(shape, size=size) / rate
    return float(draws) if size is None else draws


def _blocks(seed: int, n_draws: int) -> Iterator[tuple[np.random.Generator, int]]:
    """Per-block generators: block b's stream depends only on (seed, b)."""
    n_blocks = -(-n_draws // BLOCK_SIZE)
    for b, child in enumerate(np.random.SeedSequence(seed).spawn(n_blocks)):
        m = min(BLOCK_SIZE, n_draws - b * BLOCK_SIZE)
        yield np.random.default_rng(child), m


def _estimate(hits: int, n_draws: int, seed: int) -> OracleEstimate:
    p = hits / n_draws
    return OracleEstimate(
        estimate=p,
        std_error=math.sqrt(p * (1.0 - p) / n_draws),
        n_draws=n_draws,
        seed=seed,
    )


def _candidate_shapes(post: DirichletPosterior) -> tuple[np.ndarray, list[int]]:
    cand = list(post.layout.candidate_indices)
    return np.array([post.alpha[k] for k in cand], dtype=float), cand


def mc_pair_top2(
    post: DirichletPosterior, i: int, j: int, n_draws: int, seed: int
) -> OracleEstimate:
    """Share of draws where min(gamma_i, gamma_j) tops the candidate field."""
    shapes, cand = _candidate_shapes(post)
    pos_i, pos_j = cand.index(i), cand.index(j)
    rest = [t for t in range(len(cand)) if t not in (pos_i, pos_j)]
    hits = 0
    for rng, m in _blocks(seed, n_draws):
        draws = rng.standard_gamma(shapes, size=(m, len(cand)))
        pair_min = np.minimum(draws[:, pos_i], draws[:, pos_j])
        field_max = draws[:, rest].max(axis=1) if rest else np.zeros(m)
        hits += int(np.count_nonzero(pair_min > field_max))
    return _estimate(hits, n_draws, seed)


def mc_majority(post: DirichletPosterior, i: int, n_draws: int, seed: int) -> OracleEstimate:
    """Share of draws where gamma_i exceeds the other candidates' sum."""
    shapes, cand = _candidate_shapes(post)
    pos_i = cand.index(i)
    rest = [t for t in range(len(cand)) if t != pos_i]
    hits = 0
    for rng, m in _blocks(seed, n_draws):
        draws = rng.standard_gamma(shapes, size=(m, len(cand)))
        hits += int(np.count_nonzero(draws[:, pos_i] > draws[:, rest].sum(axis=1)))
    return _estimate(hits, n_draws, seed)


def mc_beats(post2: DirichletPosterior, i: int, j: int, n_draws: int, seed: int) -> OracleEstimate:
    """Share of draws where gamma_i exceeds gamma_j."""
    shapes, cand = _candidate_shapes(post2)
    pos_i, pos_j = cand.index(i), cand.index(j)
    hits = 0
    for rng, m in _blocks(seed, n_draws):
        draws = rng.standard_gamma(shapes, size=(m, len(cand)))
        hits += int(np.count_nonzero(draws[:, pos_i] > draws[:, pos_j]))
    return _estimate(hits, n_draws, seed)


def zscore(quadrature_value: float, est: OracleEstimate) -> float:
    """Standardized quadrature-vs-oracle discrepancy.

    With zero observed variance (all draws on one side) the binomial
    standard error degenerates; the two routes are then called consistent
    when the quadrature value sits within 10/n_draws of the sample
    proportion, which covers everything a run of that size could resolve.
    """
    if est.std_error > 0.0:
        return (quadrature_value - est.estimate) / est.std_error
    return 0.0 if abs(quadrature_value - est.estimate) <= 10.0 / est.n_draws else math.inf
