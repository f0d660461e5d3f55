"""Exact probability substrate for finite operational models.

Weights are `fractions.Fraction`, so every comparison in this package is
an exact equality, never a tolerance test. Distributions drop zero-weight
elements on construction; absence of an element always means exactly zero.

Values are immutable once built and all operations are pure functions, so
everything defined here can be shared freely across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

Rational = Fraction


class OntolabError(Exception):
    """Base class for all errors raised by this package."""


class InvariantViolation(OntolabError):
    """A value failed one of its structural invariants."""


class NegativeWeight(InvariantViolation):
    """A probability weight was negative."""


class SumNotOne(InvariantViolation):
    """Weights of a distribution do not sum to one.

    Carries the offending total and the exact deficit ``1 - total``.
    """

    def __init__(self, total: Fraction | int):
        self.total = Fraction(total)
        self.deficit = 1 - self.total
        super().__init__(f"weights sum to {self.total}, deficit {self.deficit}")


class NotASubcontext(OntolabError):
    """Requested restriction target is not a non-empty sub-context."""


def _ordered(items: Iterable) -> list:
    # Deterministic iteration wherever the elements admit an order.
    try:
        return sorted(items)
    except TypeError:
        return list(items)


@dataclass(frozen=True)
class Dist:
    """Finite probability distribution with exact rational weights.

    The stored mapping contains only strictly positive weights, summing to
    exactly 1; looking up an absent element returns exact zero. The carrier
    is implicit: any element not stored has weight zero.
    """

    weights: Mapping[Any, Fraction]

    def __post_init__(self):
        cleaned: dict = {}
        total = Fraction(0)
        for x, w in self.weights.items():
            w = Fraction(w)
            if w < 0:
                raise NegativeWeight(f"weight {w} of {x!r} is negative")
            if w > 0:
                cleaned[x] = w
            total += w
        if total != 1:
            raise SumNotOne(total)
        object.__setattr__(self, "weights", {x: cleaned[x] for x in _ordered(cleaned)})

    def weight(self, x: Any) -> Fraction:
        return self.weights.get(x, Fraction(0))

    @property
    def support(self) -> frozenset:
        return frozenset(self.weights)

    def items(self) -> Iterator[tuple[Any, Fraction]]:
        return iter(self.weights.items())

    def map_elements(self, fn) -> "Dist":
        """Push the distribution forward along ``fn``, summing collisions."""
        out: dict = {}
        for x, w in self.weights.items():
            y = fn(x)
            out[y] = out.get(y, Fraction(0)) + w
        return Dist(out)

    @staticmethod
    def delta(x: Any) -> "Dist":
        return Dist({x: Fraction(1)})

    @staticmethod
    def uniform(elements: Iterable) -> "Dist":
        elems = list(elements)
        if len(set(elems)) != len(elems):
            raise InvariantViolation("uniform carrier contains duplicates")
        if not elems:
            raise InvariantViolation("uniform carrier is empty")
        w = Fraction(1, len(elems))
        return Dist({x: w for x in elems})

    @staticmethod
    def from_counts(counts: Mapping[Any, Fraction | int]) -> "Dist":
        """Normalise non-negative weights by their sum."""
        total = sum(Fraction(w) for w in counts.values())
        if total <= 0:
            raise SumNotOne(total)
        return Dist({x: Fraction(w) / total for x, w in counts.items()})

    @staticmethod
    def mix(components: Iterable[tuple[Fraction | int, "Dist"]]) -> "Dist":
        """Convex combination; coefficients must be non-negative and sum to 1."""
        acc: dict = {}
        for c, d in components:
            c = Fraction(c)
            if c < 0:
                raise NegativeWeight(f"mixture coefficient {c} is negative")
            if c == 0:
                continue
            for x, w in d.weights.items():
                acc[x] = acc.get(x, Fraction(0)) + c * w
        return Dist(acc)


def make_dist(weights: Mapping[Any, Fraction | int]) -> Dist:
    """Validate a weight map into a distribution.

    Raises NegativeWeight on any negative entry and SumNotOne (with the
    exact deficit) when the total is not 1.
    """
    return Dist(dict(weights))


def is_delta(d: Dist) -> Optional[Any]:
    """Return the certain element of a point mass, else None."""
    if len(d.weights) == 1:
        return next(iter(d.weights))
    return None


def product_dist(d1: Dist, d2: Dist) -> Dist:
    """Independent product on the pair carrier."""
    return Dist(
        {
            (x, y): w1 * w2
            for x, w1 in d1.items()
            for y, w2 in d2.items()
        }
    )


@dataclass(frozen=True, order=True)
class JointOutcome:
    """Assignment of one outcome to each measurement of a context.

    Stored as pairs sorted by measurement label, which makes joint
    outcomes hashable, orderable, and safe as distribution elements.
    """

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted(tuple(p) for p in self.pairs))
        if not pairs:
            raise InvariantViolation("joint outcome over empty context")
        ms = [m for m, _ in pairs]
        if len(set(ms)) != len(ms):
            raise InvariantViolation(f"duplicate measurement in {pairs}")
        object.__setattr__(self, "pairs", pairs)

    @staticmethod
    def of(context: Sequence, outcomes: Sequence) -> "JointOutcome":
        if len(context) != len(outcomes):
            raise InvariantViolation("context and outcome tuple lengths differ")
        return JointOutcome(tuple(zip(context, outcomes)))

    @staticmethod
    def from_mapping(assignment: Mapping) -> "JointOutcome":
        return JointOutcome(tuple(assignment.items()))

    @property
    def context(self) -> tuple:
        return tuple(m for m, _ in self.pairs)

    @property
    def outcomes(self) -> tuple:
        """Outcomes in the order of the (sorted) context."""
        return tuple(o for _, o in self.pairs)

    def outcome(self, measurement: Any) -> Any:
        for m, o in self.pairs:
            if m == measurement:
                return o
        raise NotASubcontext(f"{measurement!r} not in context {self.context}")

    def restrict(self, sub: Sequence) -> "JointOutcome":
        """Keep only the measurements in ``sub``; they must all be present."""
        sub_set = set(sub)
        if not sub_set:
            raise NotASubcontext("empty sub-context")
        missing = sub_set - set(self.context)
        if missing:
            raise NotASubcontext(f"{sorted(missing)} not in context {self.context}")
        return JointOutcome(tuple((m, o) for m, o in self.pairs if m in sub_set))


def marginalize(d: Dist, sub: Sequence) -> Dist:
    """Marginal of a joint-outcome distribution on a non-empty sub-context.

    Compositional: restricting to s then to s' equals restricting to s'
    directly, for s' a subset of s.
    """
    sub = tuple(sub)
    return d.map_elements(lambda event: event.restrict(sub))


@dataclass(frozen=True)
class MeasurementScenario:
    """Finite measurements, their outcome sets, and a cover of maximal contexts.

    Contexts are stored as sorted tuples and the cover is sorted, so equal
    scenarios compare equal regardless of the order they were written in.
    Outcome sets keep their declared order; it fixes enumeration order
    everywhere downstream.
    """

    measurements: tuple
    outcomes: Mapping[Any, tuple]
    cover: tuple

    def __post_init__(self):
        ms = tuple(_ordered(self.measurements))
        if len(set(ms)) != len(ms):
            raise InvariantViolation("duplicate measurement labels")
        if not ms:
            raise InvariantViolation("scenario has no measurements")
        outs = {}
        for m in ms:
            if m not in self.outcomes:
                raise InvariantViolation(f"no outcome set for measurement {m!r}")
            os_ = tuple(self.outcomes[m])
            if not os_:
                raise InvariantViolation(f"empty outcome set for {m!r}")
            if len(set(os_)) != len(os_):
                raise InvariantViolation(f"duplicate outcomes for {m!r}")
            outs[m] = os_
        if set(self.outcomes) != set(ms):
            extra = set(self.outcomes) - set(ms)
            raise InvariantViolation(f"outcome sets for unknown measurements {sorted(extra)}")
        cover = []
        for ctx in self.cover:
            ctx = tuple(_ordered(ctx))
            if not ctx:
                raise InvariantViolation("empty context in cover")
            unknown = set(ctx) - set(ms)
            if unknown:
                raise InvariantViolation(f"context {ctx} uses unknown measurements {sorted(unknown)}")
            if len(set(ctx)) != len(ctx):
                raise InvariantViolation(f"context {ctx} repeats a measurement")
            cover.append(ctx)
        cover = tuple(_ordered(set(cover)))
        if not cover:
            raise InvariantViolation("cover is empty")
        covered = set().union(*(set(c) for c in cover))
        if covered != set(ms):
            raise InvariantViolation(f"measurements {sorted(set(ms) - covered)} appear in no context")
        for c1 in cover:
            for c2 in cover:
                if c1 != c2 and set(c1) < set(c2):
                    raise InvariantViolation(f"context {c1} is strictly contained in {c2}")
        object.__setattr__(self, "measurements", ms)
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "cover", cover)

    @staticmethod
    def make(outcomes: Mapping[Any, Sequence], cover: Iterable[Iterable]) -> "MeasurementScenario":
        return MeasurementScenario(tuple(outcomes), {m: tuple(v) for m, v in outcomes.items()}, tuple(tuple(c) for c in cover))

    def events(self, context: Sequence) -> list:
        """All joint outcomes of a context, in lexicographic order."""
        ctx = tuple(_ordered(context))
        pools = []
        for m in ctx:
            if m not in self.outcomes:
                raise InvariantViolation(f"unknown measurement {m!r}")
            pools.append(self.outcomes[m])
        return [JointOutcome.of(ctx, combo) for combo in itertools.product(*pools)]

    def contexts_with(self, measurement: Any) -> tuple:
        return tuple(c for c in self.cover if measurement in c)

    def assignment_space_size(self) -> int:
        n = 1
        for m in self.measurements:
            n *= len(self.outcomes[m])
        return n


@dataclass(frozen=True)
class Check:
    """Outcome of a verification: truthy on pass, witness attached on failure."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


PASS = Check(True)


@dataclass(frozen=True)
class SignallingWitness:
    """One measurement whose marginal differs between two contexts."""

    measurement: Any
    context_a: tuple
    context_b: tuple
    marginal_a: Dist
    marginal_b: Dist


@dataclass(frozen=True)
class EmpiricalModel:
    """One outcome distribution per maximal context of a scenario."""

    scenario: MeasurementScenario
    tables: Mapping[tuple, Dist]

    def __post_init__(self):
        tables = {tuple(_ordered(c)): d for c, d in self.tables.items()}
        if set(tables) != set(self.scenario.cover):
            missing = set(self.scenario.cover) - set(tables)
            extra = set(tables) - set(self.scenario.cover)
            raise InvariantViolation(
                f"tables do not match the cover (missing {sorted(missing)}, extra {sorted(extra)})"
            )
        for ctx, d in tables.items():
            allowed = set(self.scenario.events(ctx))
            bad = d.support - allowed
            if bad:
                raise InvariantViolation(f"table for {ctx} has events outside the carrier: {sorted(bad)[:3]}")
        object.__setattr__(self, "tables", {c: tables[c] for c in self.scenario.cover})

    def table(self, context: Sequence) -> Dist:
        return self.tables[tuple(_ordered(context))]


def check_no_signalling(e: EmpiricalModel) -> Check:
    """Marginals of each measurement must agree across every context containing it.

    Comparisons are exact; the witness names the measurement, the two
    contexts, and both differing marginals.
    """
    for m in e.scenario.measurements:
        ctxs = e.scenario.contexts_with(m)
        base = marginalize(e.tables[ctxs[0]], (m,))
        for ctx in ctxs[1:]:
            other = marginalize(e.tables[ctx], (m,))
            if other != base:
                return Check(False, SignallingWitness(m, ctxs[0], ctx, base, other))
    return PASS


def mix_empirical(components: Sequence[tuple[Fraction | int, EmpiricalModel]]) -> EmpiricalModel:
    """Context-wise convex mixture of models over one shared scenario."""
    if not components:
        raise InvariantViolation("empty mixture")
    scenario = components[0][1].scenario
    for _, e in components:
        if e.scenario != scenario:
            raise InvariantViolation("mixture components live on different scenarios")
    tables = {
        ctx: Dist.mix([(c, e.tables[ctx]) for c, e in components])
        for ctx in scenario.cover
    }
    return EmpiricalModel(scenario, tables)
