"""Property classification and Bayesian inversion.

The fuzzy-coin posteriors below were computed by hand: uniform prior 1/4
per state, posterior(v) proportional to f_lambda(v) * prior(lambda).
"""

import random
from fractions import Fraction

import pytest

from ontolab import (
    Dist,
    Epistemic,
    Ontic,
    PriorNotFullSupport,
    Property,
    bayes_invert,
    classify,
    hs_equivalence,
    supports_overlap,
)
from ontolab import InvariantViolation
from ontolab.cli.zoo import fuzzy_coin_property

from conftest import rand_property


def two_point_property():
    return Property(
        ("l1", "l2"),
        ("u", "v"),
        {"l1": Dist.delta("u"), "l2": Dist.delta("v")},
    )


class TestProperty:
    def test_value_dists_must_cover_every_state(self):
        with pytest.raises(InvariantViolation):
            Property(("l1", "l2"), ("u",), {"l1": Dist.delta("u")})

    def test_values_must_carry_the_supports(self):
        with pytest.raises(InvariantViolation):
            Property(("l1",), ("u",), {"l1": Dist.delta("w")})


class TestClassify:
    def test_delta_everywhere_is_ontic(self):
        c = classify(two_point_property())
        assert isinstance(c, Ontic)
        assert c.assignment == {"l1": "u", "l2": "v"}

    def test_single_uncertain_state_is_epistemic(self):
        p = Property(
            ("l1", "l2"),
            ("u", "v"),
            {"l1": Dist.delta("u"), "l2": Dist.uniform(["u", "v"])},
        )
        c = classify(p)
        assert isinstance(c, Epistemic)
        assert c.state == "l2"
        assert {c.value_a, c.value_b} == {"u", "v"}

    def test_fuzzy_coin_is_epistemic(self):
        c = classify(fuzzy_coin_property())
        assert isinstance(c, Epistemic)
        assert c.state == "GW"


class TestBayesInvert:
    def test_fuzzy_coin_uniform_prior_posteriors(self):
        fam = bayes_invert(fuzzy_coin_property())
        heads = fam.posteriors["heads"]
        tails = fam.posteriors["tails"]
        assert heads == Dist(
            {"GG": Fraction(1, 2), "GW": Fraction(3, 8), "WG": Fraction(1, 8)}
        )
        assert tails == Dist(
            {"GW": Fraction(1, 8), "WG": Fraction(3, 8), "WW": Fraction(1, 2)}
        )

    def test_prior_must_have_full_support(self):
        with pytest.raises(PriorNotFullSupport):
            bayes_invert(two_point_property(), Dist.delta("l1"))

    def test_zero_mass_value_absent_from_family(self):
        p = Property(
            ("l1",), ("u", "v"), {"l1": Dist.delta("u")}
        )
        fam = bayes_invert(p)
        assert set(fam.posteriors) == {"u"}

    def test_nonuniform_prior(self):
        p = two_point_property()
        prior = Dist({"l1": Fraction(1, 3), "l2": Fraction(2, 3)})
        fam = bayes_invert(p, prior)
        assert fam.posteriors["u"] == Dist.delta("l1")
        assert fam.posteriors["v"] == Dist.delta("l2")


class TestSupportsOverlap:
    def test_disjoint_for_ontic(self):
        assert supports_overlap(bayes_invert(two_point_property())) is None

    def test_overlap_names_values_and_state(self):
        overlap = supports_overlap(bayes_invert(fuzzy_coin_property()))
        assert overlap is not None
        va, vb, lam = overlap
        assert {va, vb} == {"heads", "tails"}
        assert lam in {"GW", "WG"}


def test_classification_matches_posterior_overlap(rng):
    """Classification agrees with the support-overlap criterion on random
    properties, and the overlap does not depend on the chosen prior."""
    for _ in range(300):
        p = rand_property(rng)
        assert hs_equivalence(p)
        # a random full-support prior must give the same verdict
        num = [rng.randint(1, 5) for _ in p.ontic_space]
        prior = Dist(
            {s: Fraction(n, sum(num)) for s, n in zip(p.ontic_space, num)}
        )
        assert hs_equivalence(p, prior)
        ontic = isinstance(classify(p), Ontic)
        assert (supports_overlap(bayes_invert(p, prior)) is None) == ontic
