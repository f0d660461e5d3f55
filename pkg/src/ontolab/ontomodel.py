"""Finite ontological models over measurement scenarios.

An ontological model fixes a finite ontic space, a distribution over it
per preparation, and a response distribution per ontic state and maximal
context. Response tables are keyed by (state, context) only, so the same
state responds identically no matter which preparation produced it.

Two structural facts drive everything here. A model is local exactly when
it is deterministic and parameter independent, and that holds exactly when
every single-measurement observable property it defines is ontic. Local
models admit a canonical form whose ontic states are global outcome
assignments; the rewrite preserves operational probabilities exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from .probcore import (
    Check,
    Dist,
    EmpiricalModel,
    InvariantViolation,
    JointOutcome,
    MeasurementScenario,
    OntolabError,
    PASS,
    _ordered,
    is_delta,
    marginalize,
)
from .properties import Epistemic, Ontic, Property, classify


class UnknownPreparation(OntolabError):
    """Preparation label not declared by the model."""


class MarginalIllDefined(OntolabError):
    """A single-measurement response marginal differs between contexts."""

    def __init__(self, measurement, state, context_a, context_b, marginal_a, marginal_b):
        self.measurement = measurement
        self.state = state
        self.context_a = context_a
        self.context_b = context_b
        self.marginal_a = marginal_a
        self.marginal_b = marginal_b
        super().__init__(
            f"marginal of {measurement!r} at state {state!r} differs between "
            f"contexts {context_a} and {context_b}"
        )


class NotLocal(OntolabError):
    """Canonical form requested for a model that is not local."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"model is not local: {witness!r}")


@dataclass(frozen=True)
class NondeterministicWitness:
    """A state and context whose response is not a point mass."""

    state: Any
    context: tuple
    response: Dist


@dataclass(frozen=True)
class ParameterDependenceWitness:
    """A measurement whose response marginal at some state depends on the context."""

    measurement: Any
    state: Any
    context_a: tuple
    context_b: tuple
    marginal_a: Dist
    marginal_b: Dist


@dataclass(frozen=True)
class FactorizationWitness:
    """A response cell that differs from the product of its own marginals."""

    state: Any
    context: tuple
    event: JointOutcome
    actual: Fraction
    product: Fraction


@dataclass(frozen=True)
class OntologicalModel:
    """Scenario, preparations, ontic space, and (state, context) responses."""

    scenario: MeasurementScenario
    preparations: tuple
    ontic_space: tuple
    prep_dists: Mapping[Any, Dist]
    responses: Mapping[tuple, Dist]

    def __post_init__(self):
        preps = tuple(_ordered(self.preparations))
        states = tuple(_ordered(self.ontic_space))
        if not preps:
            raise InvariantViolation("model declares no preparations")
        if not states:
            raise InvariantViolation("model has an empty ontic space")
        if len(set(preps)) != len(preps) or len(set(states)) != len(states):
            raise InvariantViolation("duplicate preparation or ontic labels")
        if set(self.prep_dists) != set(preps):
            raise InvariantViolation("prep_dists must be total on the preparations")
        for p, d in self.prep_dists.items():
            stray = d.support - set(states)
            if stray:
                raise InvariantViolation(f"preparation {p!r} weights unknown states {sorted(stray)}")
        responses = {}
        for key, d in self.responses.items():
            lam, ctx = key
            responses[(lam, tuple(_ordered(ctx)))] = d
        expected = {(lam, ctx) for lam in states for ctx in self.scenario.cover}
        if set(responses) != expected:
            missing = expected - set(responses)
            extra = set(responses) - expected
            raise InvariantViolation(
                f"responses must cover every (state, context) pair exactly "
                f"(missing {sorted(missing)[:3]}, extra {sorted(extra)[:3]})"
            )
        for (lam, ctx), d in responses.items():
            allowed = set(self.scenario.events(ctx))
            bad = d.support - allowed
            if bad:
                raise InvariantViolation(
                    f"response at ({lam!r}, {ctx}) has events outside the carrier: {sorted(bad)[:3]}"
                )
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "ontic_space", states)
        object.__setattr__(self, "prep_dists", {p: self.prep_dists[p] for p in preps})
        object.__setattr__(
            self, "responses", {k: responses[k] for k in _ordered(responses)}
        )

    def response(self, state: Any, context: Sequence) -> Dist:
        return self.responses[(state, tuple(_ordered(context)))]


def operational_probabilities(h: OntologicalModel, preparation: Any) -> EmpiricalModel:
    """Average the responses over the preparation's state distribution."""
    if preparation not in h.prep_dists:
        raise UnknownPreparation(f"unknown preparation {preparation!r}")
    mu = h.prep_dists[preparation]
    tables = {
        ctx: Dist.mix([(mu.weight(lam), h.response(lam, ctx)) for lam in mu.support])
        for ctx in h.scenario.cover
    }
    return EmpiricalModel(h.scenario, tables)


def is_deterministic(h: OntologicalModel) -> Check:
    """Every response must be a point mass."""
    for lam in h.ontic_space:
        for ctx in h.scenario.cover:
            d = h.response(lam, ctx)
            if is_delta(d) is None:
                return Check(False, NondeterministicWitness(lam, ctx, d))
    return PASS


def is_parameter_independent(h: OntologicalModel) -> Check:
    """Single-measurement response marginals must not depend on the context."""
    for lam in h.ontic_space:
        for m in h.scenario.measurements:
            ctxs = h.scenario.contexts_with(m)
            base = marginalize(h.response(lam, ctxs[0]), (m,))
            for ctx in ctxs[1:]:
                other = marginalize(h.response(lam, ctx), (m,))
                if other != base:
                    return Check(
                        False,
                        ParameterDependenceWitness(m, lam, ctxs[0], ctx, base, other),
                    )
    return PASS


def is_local(h: OntologicalModel) -> Check:
    """Deterministic and parameter independent; the first failure is the reason."""
    det = is_deterministic(h)
    if not det:
        return det
    return is_parameter_independent(h)


def factorizes(h: OntologicalModel) -> Check:
    """Each response must equal the product of its own single-measurement marginals.

    Checked cell by cell over the full event set of each context, so a zero
    stored by absence still participates.
    """
    for lam in h.ontic_space:
        for ctx in h.scenario.cover:
            d = h.response(lam, ctx)
            margs = {m: marginalize(d, (m,)) for m in ctx}
            for event in h.scenario.events(ctx):
                product = Fraction(1)
                for m in ctx:
                    product *= margs[m].weight(event.restrict((m,)))
                actual = d.weight(event)
                if actual != product:
                    return Check(False, FactorizationWitness(lam, ctx, event, actual, product))
    return PASS


def observable_property(h: OntologicalModel, measurement: Any) -> Property:
    """The property "outcome of this measurement" over the model's ontic space.

    Well defined only when the measurement's response marginal agrees
    across contexts at every state; otherwise MarginalIllDefined is raised.
    """
    if measurement not in h.scenario.measurements:
        raise InvariantViolation(f"unknown measurement {measurement!r}")
    ctxs = h.scenario.contexts_with(measurement)
    dists = {}
    for lam in h.ontic_space:
        base = marginalize(h.response(lam, ctxs[0]), (measurement,))
        for ctx in ctxs[1:]:
            other = marginalize(h.response(lam, ctx), (measurement,))
            if other != base:
                raise MarginalIllDefined(measurement, lam, ctxs[0], ctx, base, other)
        dists[lam] = base.map_elements(lambda ev: ev.outcome(measurement))
    return Property(h.ontic_space, h.scenario.outcomes[measurement], dists)


ONTIC = "ontic"
EPISTEMIC = "epistemic"
UNDEFINED = "undefined"


def onticity_report(h: OntologicalModel) -> dict:
    """Per-measurement status of the observable property: ontic, epistemic,
    or undefined when the marginal depends on the context."""
    report = {}
    for m in h.scenario.measurements:
        try:
            p = observable_property(h, m)
        except MarginalIllDefined:
            report[m] = UNDEFINED
            continue
        report[m] = ONTIC if isinstance(classify(p), Ontic) else EPISTEMIC
    return report


@dataclass(frozen=True)
class CanonicalLocalModel:
    """Local model in canonical form: one weight map over global assignments
    per preparation; responses are implied deltas."""

    scenario: MeasurementScenario
    weights: Mapping[Any, Dist]

    def __post_init__(self):
        full = set(self.scenario.measurements)
        for p, d in self.weights.items():
            for omega in d.support:
                if not isinstance(omega, JointOutcome) or set(omega.context) != full:
                    raise InvariantViolation(
                        f"weight for {p!r} is not over total assignments: {omega!r}"
                    )
                for m in omega.context:
                    if omega.outcome(m) not in self.scenario.outcomes[m]:
                        raise InvariantViolation(f"assignment {omega!r} uses an unknown outcome")
        object.__setattr__(self, "weights", {p: self.weights[p] for p in _ordered(self.weights)})

    def as_ontological_model(self) -> OntologicalModel:
        """Re-express with assignments as ontic states and delta responses."""
        states = set()
        for d in self.weights.values():
            states |= d.support
        states = tuple(_ordered(states))
        responses = {
            (omega, ctx): Dist.delta(omega.restrict(ctx))
            for omega in states
            for ctx in self.scenario.cover
        }
        return OntologicalModel(
            self.scenario, tuple(self.weights), states, dict(self.weights), responses
        )


def canonicalize(h: OntologicalModel) -> CanonicalLocalModel:
    """Push each preparation's state distribution onto global assignments.

    Requires locality; each ontic state maps to the global assignment its
    deterministic responses define. Operational probabilities are preserved
    exactly.
    """
    loc = is_local(h)
    if not loc:
        raise NotLocal(loc.witness)
    assignment_of = {}
    for lam in h.ontic_space:
        pairs = []
        for m in h.scenario.measurements:
            ctx = h.scenario.contexts_with(m)[0]
            ev = is_delta(marginalize(h.response(lam, ctx), (m,)))
            pairs.append((m, ev.outcome(m)))
        assignment_of[lam] = JointOutcome(tuple(pairs))
    weights = {
        p: d.map_elements(lambda lam: assignment_of[lam]) for p, d in h.prep_dists.items()
    }
    return CanonicalLocalModel(h.scenario, weights)
