"""Rank-event probabilities as single one-dimensional integrals.

Dividing the independent Gamma marginals by their sum gives the Dirichlet
vector, and the sum is positive, so every ordering event among vote
shares equals the same event among the raw Gamma variables.  Three events
cover the runoff analysis, each with a closed-form integrand:

* pair {i, j} holds the two largest candidate shares:
  integrate F_max(u) * f_min(u) du, where f_min is the density of
  min(gamma_i, gamma_j) and F_max the CDF of the running field's maximum;
* candidate i exceeds half the non-blank share (outright first-round win):
  integrate F_sum(u) * f_i(u) du, with F_sum the CDF of the summed
  remaining candidates' Gammas (a Gamma itself);
* candidate i beats j head-to-head: integrate F_j(u) * f_i(u) du.

Products of many CDFs underflow for poll-sized parameters, so integrands
are assembled in log space.  Supports are truncated where every involved
marginal has under 1e-12 tail mass; the integrand is below 1e-11 outside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DirichletPosterior, gamma_representation
from .numerics import (
    DEFAULT_QUADRATURE,
    DomainError,
    GammaMarginal,
    QuadratureError,
    QuadratureSpec,
    gamma_cdf,
    gamma_log_pdf,
    gamma_quantile,
    gamma_sf,
    integrate,
)

TAIL_MASS = 1e-12
CLAMP_TOL = 1e-6


@dataclass(frozen=True)
class PairVsField:
    """The two marginals whose minimum must beat the maximum of the rest.

    ``field`` holds every other candidate's marginal (blank excluded); it
    may be empty for a two-candidate race, making the field CDF constant 1.
    """

    pair: tuple[GammaMarginal, GammaMarginal]
    field: tuple[GammaMarginal, ...]


def _positive(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("u must be positive and finite")
    return arr


def log_pdf_min(asm: PairVsField, u) -> float | np.ndarray:
    """Log density of the smaller of the two pair marginals at u.

    Evaluated as log-sum-exp of pdf_i * sf_j + pdf_j * sf_i; -inf where
    both terms vanish.
    """
    arr = _positive(u)
    g1, g2 = asm.pair
    with np.errstate(divide="ignore"):
        t1 = gamma_log_pdf(g1, arr) + np.log(gamma_sf(g2, arr))
        t2 = gamma_log_pdf(g2, arr) + np.log(gamma_sf(g1, arr))
    out = np.logaddexp(t1, t2)
    return float(out) if np.ndim(u) == 0 else out


def log_cdf_max(asm: PairVsField, u) -> float | np.ndarray:
    """Log CDF of the field maximum at u: sum of log CDFs, 0 if no field."""
    arr = _positive(u)
    out = np.zeros_like(arr)
    with np.errstate(divide="ignore"):
        for g in asm.field:
            out = out + np.log(gamma_cdf(g, arr))
    return float(out) if np.ndim(u) == 0 else out


def _support(marginals: tuple[GammaMarginal, ...]) -> tuple[float, float]:
    lo = min(gamma_quantile(g, TAIL_MASS) for g in marginals)
    hi = max(gamma_quantile(g, 1.0 - TAIL_MASS) for g in marginals)
    return lo, hi


def _clamped(value: float, what: str, err: float) -> float:
    if value < -CLAMP_TOL or value > 1.0 + CLAMP_TOL:
        raise QuadratureError(f"{what} left [0, 1] by more than {CLAMP_TOL}", value, err)
    return min(1.0, max(0.0, value))


def _candidate_index(post: DirichletPosterior, i: int, role: str) -> None:
    if i not in post.layout.candidate_indices:
        raise DomainError(f"{role}={i!r} is not a candidate index of the layout")


def prob_pair_top2(
    post: DirichletPosterior,
    i: int,
    j: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    rate: float = 1.0,
) -> float:
    """Probability that candidates i and j hold the two largest shares."""
    _candidate_index(post, i, "i")
    _candidate_index(post, j, "j")
    if i == j:
        raise DomainError("pair needs two distinct candidates")
    marginals = gamma_representation(post, rate)
    asm = PairVsField(
        pair=(marginals[i], marginals[j]),
        field=tuple(marginals[k] for k in post.layout.candidate_indices if k not in (i, j)),
    )
    lo, hi = _support(asm.pair + asm.field)

    def integrand(u: np.ndarray) -> np.ndarray:
        return np.exp(log_pdf_min(asm, u) + log_cdf_max(asm, u))

    value, err = integrate(integrand, lo, hi, spec)
    return _clamped(value, f"prob_pair_top2({i},{j})", err)


def prob_majority(
    post: DirichletPosterior,
    i: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    rate: float = 1.0,
) -> float:
    """Probability that candidate i takes more than half the non-blank share."""
    _candidate_index(post, i, "i")
    marginals = gamma_representation(post, rate)
    g_i = marginals[i]
    rest_shape = sum(post.alpha[k] for k in post.layout.candidate_indices if k != i)
    g_sum = GammaMarginal(shape=rest_shape, rate=rate)
    lo, hi = _support((g_i, g_sum))

    def integrand(u: np.ndarray) -> np.ndarray:
        return gamma_cdf(g_sum, u) * np.exp(gamma_log_pdf(g_i, u))

    value, err = integrate(integrand, lo, hi, spec)
    return _clamped(value, f"prob_majority({i})", err)


def prob_beats(
    post2: DirichletPosterior,
    i: int,
    j: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    rate: float = 1.0,
) -> float:
    """Probability that candidate i outpolls candidate j head-to-head."""
    _candidate_index(post2, i, "i")
    _candidate_index(post2, j, "j")
    if i == j:
        raise DomainError("need two distinct candidates")
    marginals = gamma_representation(post2, rate)
    g_i, g_j = marginals[i], marginals[j]
    lo, hi = _support((g_i, g_j))

    def integrand(u: np.ndarray) -> np.ndarray:
        return gamma_cdf(g_j, u) * np.exp(gamma_log_pdf(g_i, u))

    value, err = integrate(integrand, lo, hi, spec)
    return _clamped(value, f"prob_beats({i},{j})", err)
