"""Multi-site preparation scenarios and preparation independence.

The translation table is: sites choose preparations the way parties choose
measurements, joint preparations play the role of contexts, and ontic
states play the role of outcomes. No-preparation-signalling mirrors the
no-signalling of empirical models, and preparation independence mirrors
the factorization of responses. `as_measurement_model` makes the
translation literal so the mirrored checks can be compared verdict for
verdict.

`pbr_counterexample` builds the overlap-region model that is exactly
no-preparation-signalling yet fails independence for every overlap weight
q in (0, 1/2]: the two ontic overlap regions never occur jointly although
the product of the site marginals says they should.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Optional, Sequence

from .probcore import (
    Check,
    Dist,
    InvariantViolation,
    JointOutcome,
    MeasurementScenario,
    OntolabError,
    PASS,
    _ordered,
)
from .ontomodel import OntologicalModel


class QOutOfRange(OntolabError):
    """Overlap weight must lie in (0, 1/2]."""


class BadRegion(OntolabError):
    """A site region is empty, unknown, or not a subset of the site's states."""


@dataclass(frozen=True)
class PreparationScenario:
    """Sites with their preparation choices and per-site ontic spaces.

    Site order is meaningful: joint preparations and joint states are
    tuples aligned with it. The cover is always the full product of
    per-site choices.
    """

    sites: tuple
    preparations: Mapping[Any, tuple]
    ontic_spaces: Mapping[Any, tuple]

    def __post_init__(self):
        sites = tuple(self.sites)
        if not sites or len(set(sites)) != len(sites):
            raise InvariantViolation("sites must be non-empty and distinct")
        preps = {}
        spaces = {}
        for s in sites:
            if s not in self.preparations or not self.preparations[s]:
                raise InvariantViolation(f"site {s!r} has no preparations")
            if s not in self.ontic_spaces or not self.ontic_spaces[s]:
                raise InvariantViolation(f"site {s!r} has no ontic states")
            preps[s] = tuple(self.preparations[s])
            spaces[s] = tuple(self.ontic_spaces[s])
            if len(set(preps[s])) != len(preps[s]) or len(set(spaces[s])) != len(spaces[s]):
                raise InvariantViolation(f"duplicate labels at site {s!r}")
        if set(self.preparations) != set(sites) or set(self.ontic_spaces) != set(sites):
            raise InvariantViolation("per-site maps must cover exactly the declared sites")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "ontic_spaces", spaces)

    def joint_preparations(self) -> list:
        """All choices of one preparation per site, in product order."""
        return list(itertools.product(*(self.preparations[s] for s in self.sites)))

    def joint_states(self) -> list:
        return list(itertools.product(*(self.ontic_spaces[s] for s in self.sites)))

    def site_index(self, site: Any) -> int:
        try:
            return self.sites.index(site)
        except ValueError:
            raise InvariantViolation(f"unknown site {site!r}") from None


@dataclass(frozen=True)
class PrepSignallingWitness:
    """A site whose marginal depends on another site's preparation choice."""

    site: Any
    preparation: Any
    joint_a: tuple
    joint_b: tuple
    marginal_a: Dist
    marginal_b: Dist


@dataclass(frozen=True)
class DependenceWitness:
    """A joint-state cell differing from the product of the site marginals."""

    joint_preparation: tuple
    joint_state: tuple
    actual: Fraction
    product: Fraction


@dataclass(frozen=True)
class PreparationModel:
    """One distribution over joint ontic states per joint preparation."""

    scenario: PreparationScenario
    tables: Mapping[tuple, Dist]

    def __post_init__(self):
        tables = {tuple(jp): d for jp, d in self.tables.items()}
        expected = set(map(tuple, self.scenario.joint_preparations()))
        if set(tables) != expected:
            raise InvariantViolation("tables must cover exactly the joint preparations")
        carrier = set(self.scenario.joint_states())
        for jp, d in tables.items():
            stray = d.support - carrier
            if stray:
                raise InvariantViolation(f"table for {jp} weights unknown joint states: {sorted(stray)[:3]}")
        object.__setattr__(self, "tables", {jp: tables[jp] for jp in sorted(tables)})

    def table(self, joint_preparation: Sequence) -> Dist:
        return self.tables[tuple(joint_preparation)]

    def site_marginal(self, joint_preparation: Sequence, site: Any) -> Dist:
        i = self.scenario.site_index(site)
        return self.table(joint_preparation).map_elements(lambda js: js[i])


def is_no_preparation_signalling(m: PreparationModel) -> Check:
    """Each site's marginal may depend only on that site's own choice."""
    sc = m.scenario
    for site in sc.sites:
        i = sc.site_index(site)
        for prep in sc.preparations[site]:
            matching = [jp for jp in sc.joint_preparations() if jp[i] == prep]
            base = m.site_marginal(matching[0], site)
            for jp in matching[1:]:
                other = m.site_marginal(jp, site)
                if other != base:
                    return Check(
                        False,
                        PrepSignallingWitness(site, prep, matching[0], jp, base, other),
                    )
    return PASS


def is_preparation_independent(m: PreparationModel) -> Check:
    """Joint tables must factor into the product of their own site marginals.

    No-preparation-signalling is required first; its witness is surfaced
    when it fails. The factorization itself is compared cell by cell over
    the full joint-state carrier.
    """
    nps = is_no_preparation_signalling(m)
    if not nps:
        return nps
    sc = m.scenario
    for jp in sc.joint_preparations():
        marginals = [m.site_marginal(jp, s) for s in sc.sites]
        table = m.table(jp)
        for js in sc.joint_states():
            product = Fraction(1)
            for lam, marg in zip(js, marginals):
                product *= marg.weight(lam)
            actual = table.weight(js)
            if actual != product:
                return Check(False, DependenceWitness(tuple(jp), tuple(js), actual, product))
    return PASS


@dataclass(frozen=True)
class PBRParams:
    """Overlap weight for the two-site overlap-region counter-example."""

    q: Fraction

    def __post_init__(self):
        q = Fraction(self.q)
        if not (0 < q <= Fraction(1, 2)):
            raise QOutOfRange(f"q must lie in (0, 1/2], got {q}")
        object.__setattr__(self, "q", q)


OVERLAP = "overlap"
OUTSIDE = "outside"


def pbr_counterexample(params: PBRParams) -> PreparationModel:
    """Two sites, two preparations each, identical joint tables.

    Every joint preparation puts weight 0 on both sites landing in the
    overlap region, q on each mixed cell, and 1 - 2q on both landing
    outside. Site marginals give the overlap region weight q, so the
    product predicts q^2 > 0 for the doubly-overlap cell, and independence
    fails while no-preparation-signalling holds.
    """
    q = params.q
    scenario = PreparationScenario(
        ("system1", "system2"),
        {"system1": ("psi0", "psi1"), "system2": ("psi0", "psi1")},
        {"system1": (OVERLAP, OUTSIDE), "system2": (OVERLAP, OUTSIDE)},
    )
    cells = {
        (OVERLAP, OUTSIDE): q,
        (OUTSIDE, OVERLAP): q,
        (OUTSIDE, OUTSIDE): 1 - 2 * q,
    }
    table = Dist({js: w for js, w in cells.items() if w > 0})
    tables = {jp: table for jp in scenario.joint_preparations()}
    return PreparationModel(scenario, tables)


def overlap_event_probability(m: PreparationModel, regions: Mapping[Any, Iterable]) -> dict:
    """Probability that every site's state lands in its region, per joint
    preparation."""
    sc = m.scenario
    if set(regions) != set(sc.sites):
        raise BadRegion(f"regions must be given for exactly the sites {list(sc.sites)}")
    region_sets = {}
    for site, region in regions.items():
        rs = set(region)
        if not rs:
            raise BadRegion(f"empty region for site {site!r}")
        stray = rs - set(sc.ontic_spaces[site])
        if stray:
            raise BadRegion(f"region for {site!r} contains unknown states {sorted(stray)}")
        region_sets[site] = rs
    out = {}
    for jp in sc.joint_preparations():
        total = Fraction(0)
        for js, w in m.table(jp).items():
            if all(js[i] in region_sets[s] for i, s in enumerate(sc.sites)):
                total += w
        out[tuple(jp)] = total
    return out


def product_preparation_model(
    site_models: Mapping[Any, Mapping[Any, Dist]],
    ontic_spaces: Optional[Mapping[Any, Sequence]] = None,
) -> PreparationModel:
    """Assemble the independent product of per-site preparation models.

    Ontic spaces default to the union of the supports seen at each site.
    The result is preparation independent by construction.
    """
    if not site_models:
        raise InvariantViolation("no sites given")
    sites = tuple(site_models)
    preps = {s: tuple(site_models[s]) for s in sites}
    if ontic_spaces is None:
        spaces = {}
        for s in sites:
            seen: set = set()
            for d in site_models[s].values():
                seen |= d.support
            spaces[s] = tuple(_ordered(seen))
    else:
        spaces = {s: tuple(ontic_spaces[s]) for s in sites}
    scenario = PreparationScenario(sites, preps, spaces)
    tables = {}
    for jp in scenario.joint_preparations():
        dists = [site_models[s][p] for s, p in zip(sites, jp)]
        cells = {}
        for combo in itertools.product(*(list(d.items()) for d in dists)):
            js = tuple(lam for lam, _ in combo)
            w = Fraction(1)
            for _, wi in combo:
                w *= wi
            cells[js] = w
        tables[jp] = Dist(cells)
    return PreparationModel(scenario, tables)


def as_measurement_model(m: PreparationModel) -> OntologicalModel:
    """Literal translation into measurement-scenario form.

    Each (site, preparation) pair becomes a measurement whose outcomes are
    the site's ontic states; joint preparations become contexts; the
    tables become the responses of a single dummy ontic state. Signalling
    and factorization checks then mirror their preparation counterparts.
    """
    sc = m.scenario
    label = {}
    outcomes = {}
    for s in sc.sites:
        for p in sc.preparations[s]:
            name = f"{s}:{p}"
            label[(s, p)] = name
            outcomes[name] = tuple(sc.ontic_spaces[s])
    cover = []
    for jp in sc.joint_preparations():
        cover.append(tuple(label[(s, p)] for s, p in zip(sc.sites, jp)))
    scenario = MeasurementScenario.make(outcomes, cover)
    responses = {}
    for jp in sc.joint_preparations():
        ctx_labels = {label[(s, p)]: i for i, (s, p) in enumerate(zip(sc.sites, jp))}
        event_of = lambda js, cl=ctx_labels: JointOutcome(
            tuple((name, js[i]) for name, i in cl.items())
        )
        ctx = tuple(sorted(ctx_labels))
        responses[("*", ctx)] = m.table(jp).map_elements(event_of)
    return OntologicalModel(
        scenario, ("p",), ("*",), {"p": Dist.delta("*")}, responses
    )
