import math

import pytest

from runoffprob import (
    DirichletPosterior,
    QuadratureError,
    QuadratureSpec,
    ScenarioTable,
    full_report,
    p_elected,
    p_no_first_round_winner,
    pair_key,
    prob_majority,
    scenario_layout,
)
from conftest import make_posterior


def symmetric_scenarios(labels, weight=50.0, pollster=None):
    posts = []
    for a_pos, a in enumerate(labels):
        for b in labels[a_pos + 1 :]:
            posts.append(
                DirichletPosterior(
                    scenario_layout(a, b), (weight, weight, 5.0), pollster=pollster
                )
            )
    return ScenarioTable.of(posts)


class TestScenarioTable:
    def test_of_and_get(self):
        table = symmetric_scenarios(("c1", "c2", "c3"))
        assert len(table.entries) == 3
        assert table.get("c2", "c1") is table.get("c1", "c2")
        assert table.get("c1", "c9") is None

    def test_duplicate_rejected(self):
        post = DirichletPosterior(scenario_layout("c1", "c2"), (1.0, 1.0, 1.0))
        with pytest.raises(ValueError):
            ScenarioTable.of([post, post])

    def test_key_canonical_order(self):
        post = DirichletPosterior(scenario_layout("c1", "c2"), (1.0, 1.0, 1.0))
        with pytest.raises(ValueError):
            ScenarioTable({("c2", "c1"): post})

    def test_needs_three_categories(self):
        bad = make_posterior((1.0, 1.0, 1.0), blank_alpha=1.0)
        with pytest.raises(ValueError):
            ScenarioTable({pair_key("c1", "c2"): bad})


class TestNoFirstRoundWinner:
    def test_diffuse_field_has_no_winner(self):
        post = make_posterior((2.0,) * 13, blank_alpha=2.0)
        assert p_no_first_round_winner(post) == pytest.approx(1.0, abs=1e-4)

    def test_landslide(self):
        post = make_posterior((1900.0, 100.0), blank_alpha=10.0)
        assert prob_majority(post, 0) == pytest.approx(1.0, abs=1e-9)
        assert p_no_first_round_winner(post) == pytest.approx(0.0, abs=1e-9)


class TestPElected:
    def test_two_candidates_full_symmetry(self):
        post = make_posterior((30.0, 30.0), blank_alpha=5.0)
        table = symmetric_scenarios(("c1", "c2"))
        assert p_elected(post, table, 0) == pytest.approx(0.5, abs=1e-8)
        assert p_elected(post, table, 1) == pytest.approx(0.5, abs=1e-8)

    @pytest.mark.parametrize("m", [3, 4])
    def test_exchangeable_candidates(self, m):
        post = make_posterior((4.0,) * m, blank_alpha=2.0)
        table = symmetric_scenarios(tuple(f"c{i}" for i in range(1, m + 1)))
        for i in range(m):
            assert p_elected(post, table, i) == pytest.approx(1 / m, abs=1e-6)

    def test_fallback_half_on_empty_table(self):
        post = make_posterior((4.0, 4.0, 4.0), blank_alpha=2.0)
        empty = ScenarioTable()
        sym = symmetric_scenarios(("c1", "c2", "c3"))
        assert p_elected(post, empty, 0, fallback="half") == pytest.approx(
            p_elected(post, sym, 0), abs=1e-8
        )

    def test_fallback_skip_never_exceeds_half(self):
        post = make_posterior((9.0, 5.0, 3.0), blank_alpha=2.0)
        empty = ScenarioTable()
        for i in range(3):
            skip = p_elected(post, empty, i, fallback="skip")
            half = p_elected(post, empty, i, fallback="half")
            assert skip <= half + 1e-12

    def test_bad_fallback(self):
        post = make_posterior((1.0, 1.0), blank_alpha=1.0)
        with pytest.raises(ValueError):
            p_elected(post, ScenarioTable(), 0, fallback="coinflip")

    def test_mixed_pollsters_rejected(self):
        post = make_posterior((5.0, 5.0), blank_alpha=1.0, pollster="acme")
        table = symmetric_scenarios(("c1", "c2"), pollster="other")
        with pytest.raises(ValueError):
            p_elected(post, table, 0)

    def test_runoff_strength_beats_first_round_lead(self):
        # c1 leads the first round but loses every polled head-to-head
        post = make_posterior((900.0, 700.0, 300.0), blank_alpha=100.0)
        favored = DirichletPosterior(scenario_layout("c1", "c2"), (900.0, 1100.0, 80.0))
        table = ScenarioTable.of([favored])
        assert p_elected(post, table, 1) > p_elected(post, table, 0)


class TestFullReport:
    def test_symmetric_toy(self):
        post = make_posterior((4.0, 4.0, 4.0, 4.0), blank_alpha=2.0, pollster="acme")
        table = symmetric_scenarios(("c1", "c2", "c3", "c4"), pollster="acme")
        rep = full_report(post, table, fallback="half")
        assert rep.pollster == "acme"
        assert sum(rep.p_top2.values()) == pytest.approx(1.0, abs=1e-6)
        for v in rep.p_elected.values():
            assert v == pytest.approx(0.25, abs=1e-6)
        assert rep.missing_scenarios == ()
        assert rep.failures == ()
        assert rep.p_no_first_round_winner == pytest.approx(
            1.0 - sum(rep.p_majority.values()), abs=1e-12
        )

    def test_elected_partition_with_symmetric_scenarios(self):
        post = make_posterior((40.0, 25.0, 13.0, 8.0), blank_alpha=9.0)
        table = symmetric_scenarios(("c1", "c2", "c3", "c4"))
        rep = full_report(post, table)
        assert sum(rep.p_elected.values()) == pytest.approx(1.0, abs=1e-6)

    def test_missing_scenarios_listed(self):
        post = make_posterior((9.0, 5.0, 3.0), blank_alpha=2.0)
        only = ScenarioTable.of(
            [DirichletPosterior(scenario_layout("c1", "c2"), (9.0, 5.0, 1.0))]
        )
        rep = full_report(post, only, fallback="half")
        assert rep.missing_scenarios == (("c1", "c3"), ("c2", "c3"))

    def test_concentrated_pair_dominates(self):
        shares = (700.0, 500.0, 260.0, 180.0, 120.0)
        post = make_posterior(shares, blank_alpha=160.0)
        rep = full_report(post, ScenarioTable())
        assert rep.p_top2[("c1", "c2")] >= 0.999

    def test_per_pair_failures_do_not_abort(self):
        post = make_posterior((40.0, 25.0, 13.0), blank_alpha=9.0)
        starved = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=1)
        rep = full_report(post, symmetric_scenarios(("c1", "c2", "c3")), starved)
        assert rep.failures  # something must have failed at one subdivision
        assert any(math.isnan(v) for v in rep.p_top2.values()) or any(
            math.isnan(v) for v in rep.p_elected.values()
        )

    def test_monotone_in_own_support(self):
        values = []
        for own in (5.0, 10.0, 20.0, 40.0, 80.0):
            post = make_posterior((own, 10.0, 10.0), blank_alpha=5.0)
            values.append(prob_majority(post, 0))
        for lo, hi in zip(values, values[1:]):
            assert hi >= lo - 1e-10
