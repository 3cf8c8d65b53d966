import pytest

from runoffprob import CategoryLayout, DirichletPosterior, QuadratureSpec


def make_layout(n_candidates: int) -> CategoryLayout:
    labels = tuple(f"c{i}" for i in range(1, n_candidates + 1)) + ("blank",)
    return CategoryLayout.from_labels(labels)


def make_posterior(cand_alpha, blank_alpha=1.0, pollster=None) -> DirichletPosterior:
    layout = make_layout(len(cand_alpha))
    return DirichletPosterior(
        layout=layout,
        alpha=tuple(float(a) for a in cand_alpha) + (float(blank_alpha),),
        pollster=pollster,
    )


@pytest.fixture
def tight_spec() -> QuadratureSpec:
    return QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=400)
