"""Command-line surface.

Every subcommand builds a Report: a list of named checks with verdicts,
timings, and full witness detail, printed as aligned text or JSON
(`--json`). Exit codes are a function of the verdicts alone: 0 when
everything passes (or the model is local), 3 for a non-local decision,
4 for a failed check with a witness, 2 for any input problem.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field, fields, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from ..probcore import (
    Dist,
    EmpiricalModel,
    JointOutcome,
    OntolabError,
    check_no_signalling,
)
from ..properties import Epistemic, Ontic, bayes_invert, classify, hs_equivalence, supports_overlap
from ..ontomodel import (
    CanonicalLocalModel,
    ONTIC,
    OntologicalModel,
    canonicalize,
    factorizes,
    is_deterministic,
    is_local,
    is_parameter_independent,
    onticity_report,
    operational_probabilities,
)
from ..localdecide import (
    DEFAULT_ASSIGNMENT_CAP,
    LocalWitness,
    NonlocalityCertificate,
    SignedWeights,
    decide_local,
    verify_certificate,
    verify_witness,
)
from ..prepscen import (
    OVERLAP,
    PBRParams,
    PreparationModel,
    is_no_preparation_signalling,
    is_preparation_independent,
    overlap_event_probability,
    pbr_counterexample,
)
from ..quantum import (
    EpistemicValues,
    Ket,
    OnticValue,
    minus_state,
    observable_epistemicity,
    pauli_x,
    pauli_z,
    plus_state,
    qubit0,
    qubit1,
    steering_demo,
)
from . import zoo
from .modelio import (
    DemoConfig,
    ModelFile,
    canonical_to_obj,
    demo_config_to_obj,
    empirical_to_obj,
    model_file_for,
    ontological_to_obj,
    parse_model_file,
    preparation_to_obj,
    property_to_obj,
    rational_to_str,
    serialize_model_file,
)
from ..properties import Property


# ---------------------------------------------------------------- reports


@dataclass
class Verdict:
    check: str
    outcome: str
    ok: bool
    millis: float
    detail: str = ""
    artifact: Any = None
    decision: bool = False


@dataclass
class Report:
    verdicts: list = field(default_factory=list)

    def add(self, *args, **kwargs) -> Verdict:
        v = Verdict(*args, **kwargs)
        self.verdicts.append(v)
        return v

    @property
    def exit_code(self) -> int:
        if any(v.decision and not v.ok for v in self.verdicts):
            return 3
        if any(not v.ok for v in self.verdicts):
            return 4
        return 0


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


# ----------------------------------------------------- artifact rendering


def frac(x) -> str:
    return rational_to_str(Fraction(x))


def _ctx_text(ctx) -> str:
    return "(" + ", ".join(str(m) for m in ctx) + ")"


def event_text(ev: JointOutcome) -> str:
    return "(" + ", ".join(f"{m}={o}" for m, o in ev.pairs) + ")"


def assignment_text(omega: JointOutcome) -> str:
    return " ".join(f"{m}={o}" for m, o in omega.pairs)


def dist_text(d: Dist) -> str:
    parts = []
    for x, w in d.items():
        key = event_text(x) if isinstance(x, JointOutcome) else str(x)
        parts.append(f"{key}: {frac(w)}")
    return "{" + ", ".join(parts) + "}"


def _ket_text(k: Ket) -> str:
    return "(" + ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in k.amplitudes) + ")"


def describe(obj) -> str:
    """Full text form of a witness or artifact: every cell, every context,
    exact rationals. Possibly multi-line."""
    if obj is None:
        return ""
    if isinstance(obj, LocalWitness):
        lines = ["weights over global assignments:"]
        for omega, w in obj.dist.items():
            lines.append(f"  {assignment_text(omega)}  ->  {frac(w)}")
        return "\n".join(lines)
    if isinstance(obj, NonlocalityCertificate):
        lines = ["violated inequality (sum of coefficient * probability):"]
        for ev, c in obj.coefficients.items():
            lines.append(f"  {frac(c):>6} * P{event_text(ev)}")
        lines.append(
            f"model value {frac(obj.model_value)} exceeds the local bound {frac(obj.local_bound)}"
        )
        return "\n".join(lines)
    if isinstance(obj, SignedWeights):
        lines = ["signed weights over global assignments:"]
        for omega, w in obj.weights.items():
            lines.append(f"  {assignment_text(omega)}  ->  {frac(w)}")
        return "\n".join(lines)
    if isinstance(obj, CanonicalLocalModel):
        lines = []
        for p, d in obj.weights.items():
            lines.append(f"preparation {p}:")
            for omega, w in d.items():
                lines.append(f"  {assignment_text(omega)}  ->  {frac(w)}")
        return "\n".join(lines)
    if isinstance(obj, PreparationModel):
        lines = []
        for jp in obj.scenario.joint_preparations():
            lines.append(f"joint preparation ({', '.join(jp)}):")
            table = obj.table(jp)
            for js in obj.scenario.joint_states():
                lines.append(f"  ({', '.join(js)}): {frac(table.weight(tuple(js)))}")
        return "\n".join(lines)
    if isinstance(obj, EmpiricalModel):
        lines = []
        for ctx in obj.scenario.cover:
            lines.append(f"context {_ctx_text(ctx)}: {dist_text(obj.tables[ctx])}")
        return "\n".join(lines)
    if isinstance(obj, Ontic):
        cells = ", ".join(f"{lam} -> {v}" for lam, v in obj.assignment.items())
        return f"every state fixes a value: {cells}"
    if isinstance(obj, Epistemic):
        return (
            f"state {obj.state} is compatible with both "
            f"{obj.value_a!r} and {obj.value_b!r}"
        )
    if isinstance(obj, OnticValue):
        return f"value {obj.eigenvalue:+g} is certain"
    if isinstance(obj, EpistemicValues):
        m_a, m_b = obj.masses
        return (
            f"values {obj.eigenvalue_a:+g} and {obj.eigenvalue_b:+g} both carried, "
            f"masses {frac(m_a)} and {frac(m_b)}"
        )
    if isinstance(obj, Dist):
        return dist_text(obj)
    if isinstance(obj, Mapping):
        return "\n".join(f"{k}: {describe(v) if not isinstance(v, str) else v}" for k, v in obj.items())
    if isinstance(obj, Fraction):
        return frac(obj)
    if is_dataclass(obj):
        parts = []
        for f in fields(obj):
            val = getattr(obj, f.name)
            if isinstance(val, Dist):
                text = dist_text(val)
            elif isinstance(val, JointOutcome):
                text = event_text(val)
            elif isinstance(val, Fraction):
                text = frac(val)
            elif isinstance(val, tuple):
                text = _ctx_text(val)
            else:
                text = str(val)
            parts.append(f"{f.name} {text}")
        return ", ".join(parts)
    return str(obj)


def jsonable(obj):
    """Lossless JSON form: rationals as strings, complex numbers as
    [re, im] pairs, joint outcomes with their contexts spelled out."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Fraction):
        return rational_to_str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, JointOutcome):
        return {"context": list(obj.context), "outcomes": list(obj.outcomes)}
    if isinstance(obj, Dist):
        items = list(obj.items())
        if items and isinstance(items[0][0], JointOutcome):
            ctx = items[0][0].context
            return {
                "context": list(ctx),
                "table": {",".join(ev.outcomes): rational_to_str(w) for ev, w in items},
            }
        return {str(x): rational_to_str(w) for x, w in items}
    if isinstance(obj, EmpiricalModel):
        return empirical_to_obj(obj)
    if isinstance(obj, OntologicalModel):
        return ontological_to_obj(obj)
    if isinstance(obj, PreparationModel):
        return preparation_to_obj(obj)
    if isinstance(obj, Property):
        return property_to_obj(obj)
    if isinstance(obj, CanonicalLocalModel):
        return canonical_to_obj(obj)
    if isinstance(obj, DemoConfig):
        return demo_config_to_obj(obj)
    if isinstance(obj, NonlocalityCertificate):
        return {
            "coefficients": [
                {
                    "context": list(ev.context),
                    "event": ",".join(ev.outcomes),
                    "coefficient": rational_to_str(c),
                }
                for ev, c in obj.coefficients.items()
            ],
            "model_value": rational_to_str(obj.model_value),
            "local_bound": rational_to_str(obj.local_bound),
        }
    if isinstance(obj, LocalWitness):
        return {"weights": jsonable(obj.dist)}
    if isinstance(obj, SignedWeights):
        items = sorted(obj.weights.items())
        return {
            "context": list(items[0][0].context),
            "weights": {",".join(ev.outcomes): rational_to_str(w) for ev, w in items},
        }
    if isinstance(obj, Ket):
        return [[float(z.real), float(z.imag)] for z in obj.amplitudes]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 1:
            return [[float(z.real), float(z.imag)] for z in obj]
        return [jsonable(row) for row in obj]
    if is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [jsonable(x) for x in obj]
    return str(obj)


def emit(report: Report, args) -> int:
    verdicts = sorted(report.verdicts, key=lambda v: v.check)
    if args.json:
        doc = {
            "exit_code": report.exit_code,
            "verdicts": [
                {
                    "check": v.check,
                    "outcome": v.outcome,
                    "ok": v.ok,
                    "millis": round(v.millis, 3),
                    "detail": v.detail,
                    **({"artifact": jsonable(v.artifact)} if v.artifact is not None else {}),
                }
                for v in verdicts
            ],
        }
        print(json.dumps(doc, indent=2))
        return report.exit_code
    width = max(len(v.check) for v in verdicts)
    outcome_width = max(len(v.outcome) for v in verdicts)
    for v in verdicts:
        print(f"{v.check.ljust(width)}  {v.outcome.ljust(outcome_width)} {v.millis:9.1f} ms")
        if v.detail:
            lines = v.detail.splitlines()
            if args.brief:
                first = lines[0]
                if len(first) > 96 or len(lines) > 1:
                    first = first[:96].rstrip() + " ..."
                lines = [first]
            for line in lines:
                print(f"    {line}")
    print(f"exit {report.exit_code}")
    return report.exit_code


# --------------------------------------------------------------- loading


def _load(spec_arg: str) -> ModelFile:
    if spec_arg.startswith("zoo:"):
        return zoo.load_model(spec_arg[len("zoo:"):])
    try:
        text = Path(spec_arg).read_text()
    except OSError as e:
        raise OntolabError(f"cannot read {spec_arg}: {e.strerror or e}") from e
    return parse_model_file(text)


def _payload(mf: ModelFile, kind: str):
    if mf.kind != kind:
        raise OntolabError(f"expected a model of kind {kind!r}, got {mf.kind!r}")
    return mf.payload


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise OntolabError(f"cannot parse {what} {text!r}: {e}") from e


# -------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    mf = _load(args.model)
    ms = _ms(t0)
    payload = mf.payload
    if isinstance(payload, EmpiricalModel):
        stats = (
            f"{len(payload.scenario.measurements)} measurements, "
            f"{len(payload.scenario.cover)} contexts"
        )
    elif isinstance(payload, OntologicalModel):
        stats = (
            f"{len(payload.ontic_space)} ontic states, "
            f"{len(payload.preparations)} preparations, "
            f"{len(payload.scenario.cover)} contexts"
        )
    elif isinstance(payload, PreparationModel):
        sc = payload.scenario
        stats = f"{len(sc.sites)} sites, {len(list(sc.joint_preparations()))} joint preparations"
    elif isinstance(payload, Property):
        stats = f"{len(payload.ontic_space)} ontic states, {len(payload.values)} values"
    else:
        stats = f"demo {payload.demo}"
    report = Report()
    report.add("model", "valid", True, ms, detail=f"kind {mf.kind}: {stats}")
    return emit(report, args)


def cmd_check_ns(args) -> int:
    e = _payload(_load(args.model), "empirical")
    report = Report()
    t0 = time.perf_counter()
    res = check_no_signalling(e)
    report.add(
        "no-signalling",
        "pass" if res else "fail",
        bool(res),
        _ms(t0),
        detail="" if res else describe(res.witness),
        artifact=None if res else res.witness,
    )
    return emit(report, args)


def cmd_decide_local(args) -> int:
    e = _payload(_load(args.model), "empirical")
    report = Report()

    t0 = time.perf_counter()
    ns = check_no_signalling(e)
    report.add(
        "no-signalling",
        "pass" if ns else "fail",
        bool(ns),
        _ms(t0),
        detail="" if ns else describe(ns.witness),
        artifact=None if ns else ns.witness,
    )

    t0 = time.perf_counter()
    result = decide_local(e, cap=args.cap)
    ms = _ms(t0)
    local = isinstance(result, LocalWitness)
    report.add(
        "decision",
        "local" if local else "non-local",
        local,
        ms,
        detail=describe(result),
        artifact=result,
        decision=True,
    )

    t0 = time.perf_counter()
    verified = verify_witness(e, result) if local else verify_certificate(e, result)
    report.add(
        "verification",
        "pass" if verified else "fail",
        verified,
        _ms(t0),
        detail="replayed by direct enumeration, independent of the solver",
    )
    return emit(report, args)


def cmd_classify_property(args) -> int:
    p = _payload(_load(args.model), "property")
    report = Report()

    t0 = time.perf_counter()
    c = classify(p)
    ontic = isinstance(c, Ontic)
    report.add(
        "classification",
        "ontic" if ontic else "epistemic",
        ontic,
        _ms(t0),
        detail=describe(c),
        artifact=c,
    )

    t0 = time.perf_counter()
    agree = hs_equivalence(p)
    overlap = supports_overlap(bayes_invert(p))
    if overlap is None:
        overlap_text = "posterior supports are pairwise disjoint"
    else:
        va, vb, lam = overlap
        overlap_text = f"posteriors of {va!r} and {vb!r} share state {lam}"
    report.add(
        "support-overlap",
        "consistent" if agree else "inconsistent",
        agree,
        _ms(t0),
        detail=overlap_text,
    )
    return emit(report, args)


def cmd_onto_report(args) -> int:
    h = _payload(_load(args.model), "ontological")
    report = Report()
    for name, checker in (
        ("deterministic", is_deterministic),
        ("parameter-independence", is_parameter_independent),
        ("factorization", factorizes),
        ("local", is_local),
    ):
        t0 = time.perf_counter()
        res = checker(h)
        report.add(
            name,
            "pass" if res else "fail",
            bool(res),
            _ms(t0),
            detail="" if res else describe(res.witness),
            artifact=None if res else res.witness,
        )

    t0 = time.perf_counter()
    status = onticity_report(h)
    ms = _ms(t0)
    counts: dict = {}
    for s in status.values():
        counts[s] = counts.get(s, 0) + 1
    summary = ", ".join(f"{n} {s}" for s, n in sorted(counts.items()))
    report.add(
        "property-status",
        summary,
        all(s == ONTIC for s in status.values()),
        ms,
        detail="\n".join(f"{m}: {s}" for m, s in status.items()),
        artifact=status,
    )
    return emit(report, args)


def cmd_canonicalize(args) -> int:
    h = _payload(_load(args.model), "ontological")
    report = Report()

    t0 = time.perf_counter()
    loc = is_local(h)
    report.add(
        "local",
        "pass" if loc else "fail",
        bool(loc),
        _ms(t0),
        detail="" if loc else describe(loc.witness),
        artifact=None if loc else loc.witness,
    )
    if not loc:
        return emit(report, args)

    t0 = time.perf_counter()
    c = canonicalize(h)
    report.add("canonical-form", "emitted", True, _ms(t0), detail=describe(c), artifact=c)

    t0 = time.perf_counter()
    back = c.as_ontological_model()
    preserved = all(
        operational_probabilities(h, p) == operational_probabilities(back, p)
        for p in h.preparations
    )
    report.add(
        "operational-check",
        "pass" if preserved else "fail",
        preserved,
        _ms(t0),
        detail="operational probabilities preserved exactly for every preparation"
        if preserved
        else "operational probabilities changed",
    )
    return emit(report, args)


def cmd_prep_check(args) -> int:
    m = _payload(_load(args.model), "preparation")
    report = Report()
    for name, checker in (
        ("no-preparation-signalling", is_no_preparation_signalling),
        ("preparation-independence", is_preparation_independent),
    ):
        t0 = time.perf_counter()
        res = checker(m)
        report.add(
            name,
            "pass" if res else "fail",
            bool(res),
            _ms(t0),
            detail="" if res else describe(res.witness),
            artifact=None if res else res.witness,
        )
    return emit(report, args)


def cmd_pbr(args) -> int:
    q = _parse_fraction(args.q, "q")
    t0 = time.perf_counter()
    m = pbr_counterexample(PBRParams(q))
    build_ms = _ms(t0)
    report = Report()
    report.add("model-tables", "emitted", True, build_ms, detail=describe(m), artifact=m)

    t0 = time.perf_counter()
    nps = is_no_preparation_signalling(m)
    report.add(
        "no-preparation-signalling",
        "pass" if nps else "fail",
        bool(nps),
        _ms(t0),
        detail="" if nps else describe(nps.witness),
        artifact=None if nps else nps.witness,
    )

    t0 = time.perf_counter()
    pi = is_preparation_independent(m)
    report.add(
        "preparation-independence",
        "pass" if pi else "fail",
        bool(pi),
        _ms(t0),
        detail="" if pi else describe(pi.witness),
        artifact=None if pi else pi.witness,
    )

    t0 = time.perf_counter()
    probs = overlap_event_probability(
        m, {site: (OVERLAP,) for site in m.scenario.sites}
    )
    values = sorted(set(probs.values()))
    outcome = frac(values[0]) if len(values) == 1 else "varies"
    report.add(
        "overlap-event",
        outcome,
        True,
        _ms(t0),
        detail="\n".join(
            f"({', '.join(jp)}): {frac(w)}" for jp, w in sorted(probs.items())
        ),
        artifact=probs,
    )
    return emit(report, args)


def cmd_demo(args) -> int:
    if args.which == "epr":
        return _demo_epr(args)
    if args.which == "steering":
        return _demo_steering(args)
    return _demo_chsh(args)


def _demo_epr(args) -> int:
    report = Report()
    plus = plus_state()
    for name, observable in (("observable-x", pauli_x()), ("observable-z", pauli_z())):
        t0 = time.perf_counter()
        res = observable_epistemicity(plus, observable)
        ontic = isinstance(res, OnticValue)
        report.add(
            name,
            "ontic" if ontic else "epistemic",
            ontic,
            _ms(t0),
            detail=describe(res),
            artifact=res,
        )
    return emit(report, args)


def _demo_steering(args) -> int:
    report = Report()
    basis = args.basis
    other = "x" if basis == "z" else "z"

    t0 = time.perf_counter()
    ensemble = steering_demo(basis)
    ms = _ms(t0)
    lines = [
        f"probability {p:.12g}: state {_ket_text(k)}" for p, k in ensemble
    ]
    report.add(
        "ensemble",
        f"{len(ensemble)} states",
        True,
        ms,
        detail=f"measurement basis {basis}\n" + "\n".join(lines),
        artifact=[{"probability": p, "state": jsonable(k)} for p, k in ensemble],
    )

    targets = [qubit0(), qubit1()] if basis == "z" else [plus_state(), minus_state()]
    t0 = time.perf_counter()
    fidelities = [
        float(abs(t.amplitudes.conj() @ k.amplitudes) ** 2)
        for t, (_, k) in zip(targets, ensemble)
    ]
    ok = all(f >= 1 - 1e-12 for f in fidelities)
    report.add(
        "fidelity",
        "pass" if ok else "fail",
        ok,
        _ms(t0),
        detail="per-state fidelity to the target basis: "
        + ", ".join(f"{f:.15f}" for f in fidelities),
        artifact=fidelities,
    )

    t0 = time.perf_counter()

    def reduced(ens):
        rho = np.zeros((2, 2), dtype=complex)
        for p, k in ens:
            rho += p * np.outer(k.amplitudes, k.amplitudes.conj())
        return rho

    rho_here = reduced(ensemble)
    rho_other = reduced(steering_demo(other))
    drift = float(np.max(np.abs(rho_here - rho_other)))
    ok = drift <= 1e-12
    report.add(
        "reduced-state",
        "basis-independent" if ok else "fail",
        ok,
        _ms(t0),
        detail=(
            f"largest entry difference between the {basis}- and {other}-basis "
            f"reduced matrices: {drift:.3e}"
        ),
        artifact=rho_here,
    )
    return emit(report, args)


def _demo_chsh(args) -> int:
    report = Report()
    t0 = time.perf_counter()
    h = zoo.chsh_psi_complete(args.max_denominator)
    e = operational_probabilities(h, "entangled-pair")
    build_ms = _ms(t0)

    t0 = time.perf_counter()
    s = chsh_value(e)
    target = 2 * math.sqrt(2)
    ok = abs(float(s) - target) < 1e-4
    report.add(
        "chsh-value",
        f"{float(s):.5f}",
        ok,
        build_ms + _ms(t0),
        detail=f"exact value {frac(s)}; 2*sqrt(2) is about {target:.5f}",
        artifact=s,
    )

    t0 = time.perf_counter()
    pi = is_parameter_independent(h)
    report.add(
        "parameter-independence",
        "pass" if pi else "fail",
        bool(pi),
        _ms(t0),
        detail="" if pi else describe(pi.witness),
        artifact=None if pi else pi.witness,
    )

    t0 = time.perf_counter()
    result = decide_local(e)
    local = isinstance(result, LocalWitness)
    report.add(
        "decision",
        "local" if local else "non-local",
        local,
        _ms(t0),
        detail=describe(result),
        artifact=result,
        decision=True,
    )
    return emit(report, args)


def chsh_value(e: EmpiricalModel) -> Fraction:
    """E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1) over the (2,2,2) tables,
    with E the agree-minus-disagree correlator."""
    def correlator(ctx) -> Fraction:
        table = e.tables[tuple(sorted(ctx))]
        total = Fraction(0)
        for ev, w in table.items():
            a, b = ev.outcomes
            total += w if a == b else -w
        return total

    return (
        correlator(("a0", "b0"))
        + correlator(("a0", "b1"))
        + correlator(("a1", "b0"))
        - correlator(("a1", "b1"))
    )


def cmd_zoo(args) -> int:
    if args.action == "list":
        entries = [zoo.get_entry(name) for name in zoo.zoo_names()]
        if args.json:
            print(
                json.dumps(
                    [
                        {
                            "name": en.name,
                            "kind": en.kind,
                            "summary": en.summary,
                            "expected": dict(en.expected),
                        }
                        for en in entries
                    ],
                    indent=2,
                )
            )
            return 0
        width = max(len(en.name) for en in entries)
        for en in entries:
            print(f"{en.name.ljust(width)}  {en.kind.ljust(12)}  {en.summary}")
            if en.expected and not args.brief:
                expect = ", ".join(f"{k}: {v}" for k, v in sorted(en.expected.items()))
                print(f"{' ' * width}  expected -> {expect}")
        return 0
    if not args.name:
        raise OntolabError("zoo export needs an entry name")
    q = _parse_fraction(args.q, "q") if args.q is not None else None
    mf = zoo.load_model(args.name, q=q, max_denominator=args.max_denominator)
    sys.stdout.write(serialize_model_file(mf))
    return 0


# ----------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontolab",
        description="Exact analysis of finite ontological models: property "
        "classification, locality decisions with certificates, preparation "
        "independence, and small quantum demonstrations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, func, model_arg=True):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("--json", action="store_true", help="machine-readable report")
        sp.add_argument("--brief", action="store_true", help="truncate witness detail")
        if model_arg:
            sp.add_argument("model", help="model file path, or zoo:<name>")
        return sp

    add("validate", "parse a model file and check its invariants", cmd_validate)
    add("check-ns", "no-signalling check on an empirical model", cmd_check_ns)
    sp = add("decide-local", "local realizability, with witness or certificate", cmd_decide_local)
    sp.add_argument(
        "--cap",
        type=int,
        default=DEFAULT_ASSIGNMENT_CAP,
        help="refuse scenarios with more global assignments than this",
    )
    add("classify-property", "ontic or epistemic, with the inversion cross-check", cmd_classify_property)
    add("onto-report", "all model checks plus per-measurement property status", cmd_onto_report)
    add("canonicalize", "rewrite a local model over global assignments", cmd_canonicalize)
    add("prep-check", "preparation signalling and independence checks", cmd_prep_check)

    sp = add("pbr", "two-site overlap counter-example at a given q", cmd_pbr, model_arg=False)
    sp.add_argument("--q", default="1/4", help="overlap weight in (0, 1/2], e.g. 1/4")

    sp = add("demo", "quantum demonstrations", cmd_demo, model_arg=False)
    sp.add_argument("which", choices=("epr", "steering", "chsh"), help="which demonstration")
    sp.add_argument("--basis", choices=("z", "x"), default="z", help="steering basis")
    sp.add_argument(
        "--max-denominator",
        type=int,
        default=10**6,
        dest="max_denominator",
        help="denominator cap when snapping quantum probabilities to rationals",
    )

    sp = add("zoo", "list built-in models, or export one as JSON", cmd_zoo, model_arg=False)
    sp.add_argument("action", nargs="?", choices=("list", "export"), default="list")
    sp.add_argument("name", nargs="?", help="entry name for export")
    sp.add_argument("--q", default=None, help="overlap weight for the pbr-q entry")
    sp.add_argument(
        "--max-denominator",
        type=int,
        default=None,
        dest="max_denominator",
        help="denominator cap for the quantum entries",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except OntolabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
