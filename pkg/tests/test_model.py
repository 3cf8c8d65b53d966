import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from runoffprob import (
    CategoryLayout,
    DirichletPosterior,
    DomainError,
    PollObservation,
    Round,
    gamma_representation,
    noninformative_prior,
    posterior_mean,
    scale_forward,
    scenario_layout,
    update,
)
from conftest import make_layout, make_posterior

alphas_strategy = st.lists(
    st.floats(min_value=0.01, max_value=5000.0), min_size=3, max_size=14
)


def obs_for(layout, counts, pollster="acme", date=dt.date(2018, 9, 1)):
    return PollObservation(
        pollster=pollster,
        date=date,
        round=Round.FIRST,
        scenario=None,
        counts=tuple(counts),
        sample_size_reported=max(1, sum(counts) + 5),
        layout=layout,
    )


class TestCategoryLayout:
    def test_from_labels(self):
        layout = CategoryLayout.from_labels(("a", "b", "blank"))
        assert layout.blank_index == 2
        assert layout.candidate_indices == (0, 1)
        assert layout.candidate_labels == ("a", "b")

    def test_rejects_bad_layouts(self):
        with pytest.raises(ValueError):
            CategoryLayout.from_labels(("a", "blank"))  # one candidate
        with pytest.raises(ValueError):
            CategoryLayout.from_labels(("a", "a", "blank"))
        with pytest.raises(ValueError):
            CategoryLayout.from_labels(("a", "b", "c"))  # no blank
        with pytest.raises(ValueError):
            CategoryLayout.from_labels(("blank", "b", "blank"))

    def test_scenario_layout_sorted(self):
        layout = scenario_layout("c9", "c5")
        assert layout.labels == ("c5", "c9", "blank")
        with pytest.raises(ValueError):
            scenario_layout("c5", "c5")
        with pytest.raises(ValueError):
            scenario_layout("c5", "blank")

    def test_fourteen_category_layout(self):
        layout = make_layout(13)
        assert len(layout) == 14
        assert len(layout.candidate_indices) == 13


class TestPollObservation:
    def test_validation(self):
        layout = make_layout(2)
        with pytest.raises(ValueError):
            obs_for(layout, (1, 2))  # wrong length
        with pytest.raises(ValueError):
            obs_for(layout, (1, -2, 0))
        with pytest.raises(ValueError):
            PollObservation("acme", dt.date(2018, 9, 1), Round.FIRST, None,
                            (10, 10, 10), 20, layout)  # counts exceed n
        with pytest.raises(ValueError):
            PollObservation("acme", dt.date(2018, 9, 1), Round.SECOND, None,
                            (1, 1, 1), 10, layout)  # scenario missing

    def test_scenario_round(self):
        layout = scenario_layout("c1", "c2")
        obs = PollObservation("acme", dt.date(2018, 10, 1), Round.SECOND,
                              ("c1", "c2"), (400, 300, 50), 800, layout)
        assert obs.poll_id == "acme/2018-10-01"


class TestNoninformativePrior:
    def test_uniform(self):
        prior = noninformative_prior(make_layout(13), "uniform")
        assert prior.alpha == (1.0,) * 14
        np.testing.assert_allclose(posterior_mean(prior), np.full(14, 1 / 14), rtol=1e-14)

    def test_jeffreys(self):
        prior = noninformative_prior(make_layout(2), "jeffreys")
        assert prior.alpha == (0.5, 0.5, 0.5)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            noninformative_prior(make_layout(2), "haldane")


class TestUpdate:
    def test_componentwise_addition(self):
        layout = make_layout(2)
        prior = DirichletPosterior(layout, (1.0, 1.0, 1.0))
        post = update(prior, obs_for(layout, (4, 3, 2)))
        assert post.alpha == (5.0, 4.0, 3.0)
        assert post.provenance[-1] == "acme/2018-09-01"

    def test_zero_counts_identity(self):
        layout = make_layout(13)
        prior = noninformative_prior(layout)
        post = update(prior, obs_for(layout, (0,) * 14))
        assert post.alpha == prior.alpha

    def test_fractional_prior(self):
        layout = make_layout(2)
        prior = DirichletPosterior(layout, (0.5, 0.5, 0.5))
        post = update(prior, obs_for(layout, (100, 50, 0)))
        assert post.alpha == (100.5, 50.5, 0.5)

    def test_layout_mismatch(self):
        prior = noninformative_prior(make_layout(2))
        with pytest.raises(ValueError):
            update(prior, obs_for(make_layout(3), (1, 1, 1, 1)))

    def test_pollster_mismatch(self):
        layout = make_layout(2)
        prior = noninformative_prior(layout, pollster="acme")
        with pytest.raises(ValueError):
            update(prior, obs_for(layout, (1, 1, 1), pollster="other"))

    @given(
        counts=st.lists(st.tuples(st.integers(0, 500), st.integers(0, 500),
                                  st.integers(0, 500)), min_size=2, max_size=2)
    )
    @settings(max_examples=50, deadline=None)
    def test_split_associativity(self, counts):
        layout = make_layout(2)
        prior = noninformative_prior(layout)
        (c1, c2) = counts
        merged = tuple(a + b for a, b in zip(c1, c2))
        stepwise = update(update(prior, obs_for(layout, c1)),
                          obs_for(layout, c2, date=dt.date(2018, 9, 2)))
        oneshot = update(prior, obs_for(layout, merged))
        assert stepwise.alpha == oneshot.alpha


class TestScaleForward:
    def test_scalar_multiply(self):
        post = make_posterior((10.0, 30.0), blank_alpha=60.0)
        scaled = scale_forward(post, 0.1)
        np.testing.assert_allclose(scaled.alpha, (1.0, 3.0, 6.0), rtol=1e-15)

    def test_identity(self):
        post = make_posterior((3.0, 7.0), blank_alpha=2.0)
        assert scale_forward(post, 1.0).alpha == post.alpha

    def test_mean_invariant_poll_scale(self):
        post = make_posterior((2000.0, 1000.0), blank_alpha=1.0)
        scaled = scale_forward(post, 0.05)
        np.testing.assert_allclose(scaled.alpha[:2], (100.0, 50.0), rtol=1e-12)
        np.testing.assert_allclose(posterior_mean(scaled), posterior_mean(post), rtol=1e-13)

    @given(alphas=alphas_strategy, w=st.floats(min_value=1e-6, max_value=1.0))
    @settings(max_examples=100, deadline=None)
    def test_mean_preserved(self, alphas, w):
        post = make_posterior(alphas[:-1], blank_alpha=alphas[-1])
        scaled = scale_forward(post, w)
        before, after = posterior_mean(post), posterior_mean(scaled)
        np.testing.assert_allclose(after, before, rtol=1e-13, atol=0)
        assert int(np.argmax(after)) == int(np.argmax(before))
        assert scaled.concentration == pytest.approx(w * post.concentration, rel=1e-14)

    def test_domain(self):
        post = make_posterior((1.0, 1.0))
        for w in (0.0, -0.5, 1.5, math.nan):
            with pytest.raises(DomainError):
                scale_forward(post, w)


class TestPosteriorMean:
    @pytest.mark.parametrize(
        "alpha,expected",
        [
            ((1.0, 1.0, 1.0, 1.0), (0.25, 0.25, 0.25, 0.25)),
            ((3.0, 1.0, 1.0), (0.6, 0.2, 0.2)),
            ((5.0, 4.0, 3.0), (5 / 12, 4 / 12, 3 / 12)),
        ],
    )
    def test_values(self, alpha, expected):
        post = make_posterior(alpha[:-1], blank_alpha=alpha[-1])
        np.testing.assert_allclose(posterior_mean(post), expected, rtol=1e-14)

    @given(alphas=alphas_strategy)
    @settings(max_examples=100, deadline=None)
    def test_sums_to_one(self, alphas):
        post = make_posterior(alphas[:-1], blank_alpha=alphas[-1])
        assert posterior_mean(post).sum() == pytest.approx(1.0, abs=1e-12)


class TestGammaRepresentation:
    def test_shapes_and_rate(self):
        post = make_posterior((2.0, 3.0), blank_alpha=1.0)
        marginals = gamma_representation(post)
        assert [g.shape for g in marginals] == [2.0, 3.0, 1.0]
        assert all(g.rate == 1.0 for g in marginals)
        marginals = gamma_representation(post, rate=7.0)
        assert all(g.rate == 7.0 for g in marginals)

    def test_normalized_draws_match_dirichlet_moments(self):
        # empirical check of the representation on a small integer case
        rng = np.random.default_rng(7)
        alpha = np.array([2.0, 3.0, 1.0])
        draws = rng.standard_gamma(alpha, size=(200_000, 3))
        theta = draws / draws.sum(axis=1, keepdims=True)
        expected = alpha / alpha.sum()
        np.testing.assert_allclose(theta.mean(axis=0), expected, atol=3e-3)
        var_expected = expected * (1 - expected) / (alpha.sum() + 1)
        np.testing.assert_allclose(theta.var(axis=0), var_expected, atol=3e-3)


class TestDirichletPosterior:
    def test_validation(self):
        layout = make_layout(2)
        with pytest.raises(ValueError):
            DirichletPosterior(layout, (1.0, 1.0))
        with pytest.raises(ValueError):
            DirichletPosterior(layout, (1.0, 0.0, 1.0))
        with pytest.raises(ValueError):
            DirichletPosterior(layout, (1.0, math.inf, 1.0))
