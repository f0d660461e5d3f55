"""Preparation scenarios: signalling, independence, the overlap model, and
the measurement-side translation."""

from fractions import Fraction

import pytest

from ontolab import (
    BadRegion,
    DependenceWitness,
    Dist,
    InvariantViolation,
    OUTSIDE,
    OVERLAP,
    PBRParams,
    PrepSignallingWitness,
    PreparationModel,
    PreparationScenario,
    QOutOfRange,
    as_measurement_model,
    factorizes,
    is_no_preparation_signalling,
    is_parameter_independent,
    is_preparation_independent,
    overlap_event_probability,
    pbr_counterexample,
    product_preparation_model,
)

F = Fraction


def coin_sites():
    return PreparationScenario(
        ("left", "right"),
        {"left": ("h", "t"), "right": ("h", "t")},
        {"left": ("0", "1"), "right": ("0", "1")},
    )


def product_coin_model():
    biased = Dist({"0": F(1, 3), "1": F(2, 3)})
    fair = Dist.uniform(["0", "1"])
    return product_preparation_model(
        {"left": {"h": biased, "t": fair}, "right": {"h": fair, "t": biased}},
        {"left": ("0", "1"), "right": ("0", "1")},
    )


class TestScenario:
    def test_joint_preparations_in_product_order(self):
        sc = coin_sites()
        assert list(sc.joint_preparations()) == [
            ("h", "h"),
            ("h", "t"),
            ("t", "h"),
            ("t", "t"),
        ]

    def test_duplicate_sites_rejected(self):
        with pytest.raises(InvariantViolation):
            PreparationScenario(
                ("s", "s"), {"s": ("p",)}, {"s": ("0",)}
            )

    def test_sites_must_have_preparations_and_spaces(self):
        with pytest.raises(InvariantViolation):
            PreparationScenario(("a", "b"), {"a": ("p",)}, {"a": ("0",), "b": ("0",)})


class TestPreparationModel:
    def test_tables_must_cover_every_joint_preparation(self):
        sc = coin_sites()
        with pytest.raises(InvariantViolation):
            PreparationModel(sc, {("h", "h"): Dist.delta(("0", "0"))})

    def test_stray_joint_state_rejected(self):
        sc = coin_sites()
        tables = {jp: Dist.delta(("0", "9")) for jp in sc.joint_preparations()}
        with pytest.raises(InvariantViolation):
            PreparationModel(sc, tables)

    def test_site_marginal(self):
        m = product_coin_model()
        assert m.site_marginal(("h", "h"), "left") == Dist(
            {"0": F(1, 3), "1": F(2, 3)}
        )


class TestChecks:
    def test_product_model_is_independent(self):
        m = product_coin_model()
        assert is_no_preparation_signalling(m)
        assert is_preparation_independent(m)

    def test_signalling_caught_first_with_witness(self):
        sc = coin_sites()
        tables = {jp: Dist.delta(("0", "0")) for jp in sc.joint_preparations()}
        # left marginal flips when the *right* choice changes: signalling
        tables[("h", "t")] = Dist.delta(("1", "0"))
        m = PreparationModel(sc, tables)
        res = is_no_preparation_signalling(m)
        assert not res
        w = res.witness
        assert isinstance(w, PrepSignallingWitness)
        assert w.site == "left"
        pi = is_preparation_independent(m)
        assert not pi
        assert isinstance(pi.witness, PrepSignallingWitness)

    def test_correlated_but_nonsignalling_fails_independence(self):
        sc = coin_sites()
        correlated = Dist({("0", "0"): F(1, 2), ("1", "1"): F(1, 2)})
        m = PreparationModel(sc, {jp: correlated for jp in sc.joint_preparations()})
        assert is_no_preparation_signalling(m)
        res = is_preparation_independent(m)
        assert not res
        w = res.witness
        assert isinstance(w, DependenceWitness)
        assert w.actual == F(1, 2)
        assert w.product == F(1, 4)


class TestOverlapCounterexample:
    def test_q_range(self):
        with pytest.raises(QOutOfRange):
            PBRParams(F(0))
        with pytest.raises(QOutOfRange):
            PBRParams(F(3, 4))
        assert PBRParams(F(1, 2)).q == F(1, 2)

    def test_quarter_tables_frozen(self):
        m = pbr_counterexample(PBRParams(F(1, 4)))
        for jp in m.scenario.joint_preparations():
            t = m.table(jp)
            assert t.weight((OVERLAP, OVERLAP)) == 0
            assert t.weight((OVERLAP, OUTSIDE)) == F(1, 4)
            assert t.weight((OUTSIDE, OVERLAP)) == F(1, 4)
            assert t.weight((OUTSIDE, OUTSIDE)) == F(1, 2)

    def test_verdicts(self):
        m = pbr_counterexample(PBRParams(F(1, 4)))
        assert is_no_preparation_signalling(m)
        res = is_preparation_independent(m)
        assert not res
        w = res.witness
        assert w.joint_state == (OVERLAP, OVERLAP)
        assert w.actual == 0
        assert w.product == F(1, 16)

    def test_witness_product_is_q_squared(self):
        for q in (F(1, 3), F(1, 2), F(2, 5)):
            w = is_preparation_independent(pbr_counterexample(PBRParams(q))).witness
            assert w.product == q * q

    def test_half_q_edge_case(self):
        m = pbr_counterexample(PBRParams(F(1, 2)))
        t = m.table(("psi0", "psi1"))
        assert t.weight((OUTSIDE, OUTSIDE)) == 0
        assert is_no_preparation_signalling(m)
        assert not is_preparation_independent(m)


class TestOverlapEvent:
    def test_overlap_event_is_zero(self):
        m = pbr_counterexample(PBRParams(F(1, 4)))
        probs = overlap_event_probability(
            m, {s: (OVERLAP,) for s in m.scenario.sites}
        )
        assert set(probs.values()) == {F(0)}

    def test_region_containing_outside_counts_mass(self):
        m = pbr_counterexample(PBRParams(F(1, 4)))
        probs = overlap_event_probability(
            m,
            {"system1": (OVERLAP, OUTSIDE), "system2": (OUTSIDE,)},
        )
        assert set(probs.values()) == {F(3, 4)}

    def test_bad_regions(self):
        m = pbr_counterexample(PBRParams(F(1, 4)))
        with pytest.raises(BadRegion):
            overlap_event_probability(m, {"system1": (OVERLAP,)})
        with pytest.raises(BadRegion):
            overlap_event_probability(
                m, {"system1": (), "system2": (OVERLAP,)}
            )
        with pytest.raises(BadRegion):
            overlap_event_probability(
                m, {"system1": ("elsewhere",), "system2": (OVERLAP,)}
            )


class TestMeasurementTranslation:
    """The translated model must mirror the preparation verdicts: parameter
    independence plays no-preparation-signalling, factorization plays
    preparation independence."""

    def test_product_model_translates_clean(self):
        h = as_measurement_model(product_coin_model())
        assert is_parameter_independent(h)
        assert factorizes(h)

    def test_overlap_model_translates_to_correlated(self):
        h = as_measurement_model(pbr_counterexample(PBRParams(F(1, 4))))
        assert is_parameter_independent(h)
        res = factorizes(h)
        assert not res
        assert res.witness.actual == 0
        assert res.witness.product == F(1, 16)

    def test_random_product_models_always_factorize(self, rng):
        from conftest import rand_rational_dist

        for _ in range(20):
            site_models = {
                site: {
                    p: rand_rational_dist(rng, ("0", "1", "2"))
                    for p in ("x", "y")
                }
                for site in ("s1", "s2")
            }
            m = product_preparation_model(site_models)
            assert is_preparation_independent(m)
            h = as_measurement_model(m)
            assert is_parameter_independent(h)
            assert factorizes(h)
