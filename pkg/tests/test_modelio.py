"""Model files: round-trips, error grading, and rational parsing."""

import json
from fractions import Fraction

import pytest

from ontolab import InvariantViolation, PBRParams, pbr_counterexample
from ontolab.cli.modelio import (
    DemoConfig,
    FORMAT_VERSION,
    KIND_EMPIRICAL,
    ModelFile,
    ModelSyntaxError,
    SchemaError,
    model_file_for,
    parse_model_file,
    parse_rational,
    rational_to_str,
    serialize_model_file,
)
from ontolab.cli.zoo import fuzzy_coin_property, hardy_model, pr_box

F = Fraction


def small_ontological():
    from conftest import rand_bell_model
    import random

    return rand_bell_model(random.Random(7), "local")


def roundtrip(payload):
    return parse_model_file(serialize_model_file(model_file_for(payload))).payload


class TestRoundTrip:
    def test_empirical(self):
        e = pr_box()
        assert roundtrip(e) == e

    def test_empirical_with_zero_cells(self):
        e = hardy_model()
        assert roundtrip(e) == e

    def test_ontological(self):
        h = small_ontological()
        assert roundtrip(h) == h

    def test_preparation(self):
        m = pbr_counterexample(PBRParams(F(1, 4)))
        assert roundtrip(m) == m

    def test_property(self):
        p = fuzzy_coin_property()
        assert roundtrip(p) == p

    def test_demo_config(self):
        c = DemoConfig("steering", "x", 500)
        assert roundtrip(c) == c

    def test_serialized_form_is_stable(self):
        text = serialize_model_file(model_file_for(pr_box()))
        again = serialize_model_file(parse_model_file(text))
        assert text == again

    def test_kind_tag_matches_payload(self):
        mf = model_file_for(pr_box())
        assert mf.kind == KIND_EMPIRICAL
        assert mf.format_version == FORMAT_VERSION
        with pytest.raises(InvariantViolation):
            ModelFile("property", pr_box())


class TestParseRational:
    @pytest.mark.parametrize(
        "text,value",
        [("3/4", F(3, 4)), ("7", F(7)), ("-2/4", F(-1, 2)), ("0", F(0))],
    )
    def test_accepted(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("text", ["1/0", "1.5", "+1/2", "1 / 2", "", "a", None, 3])
    def test_rejected(self, text):
        with pytest.raises(SchemaError):
            parse_rational(text)

    def test_to_str_drops_unit_denominator(self):
        assert rational_to_str(F(4, 2)) == "2"
        assert rational_to_str(F(-1, 3)) == "-1/3"


def doc_for(payload):
    return json.loads(serialize_model_file(model_file_for(payload)))


class TestErrorGrading:
    def test_bad_json_carries_line_and_column(self):
        with pytest.raises(ModelSyntaxError) as e:
            parse_model_file('{"format_version": 1,\n  "kind": }')
        assert e.value.line == 2
        assert e.value.col > 0

    def test_wrong_format_version(self):
        doc = doc_for(pr_box())
        doc["format_version"] = 99
        with pytest.raises(SchemaError) as e:
            parse_model_file(json.dumps(doc))
        assert e.value.path == "document/format_version"

    def test_unknown_kind(self):
        doc = doc_for(pr_box())
        doc["kind"] = "mystery"
        with pytest.raises(SchemaError) as e:
            parse_model_file(json.dumps(doc))
        assert e.value.path == "document/kind"

    def test_missing_payload(self):
        with pytest.raises(SchemaError) as e:
            parse_model_file('{"format_version": 1, "kind": "empirical"}')
        assert e.value.path == "document"

    def test_missing_scenario_key(self):
        doc = doc_for(pr_box())
        del doc["payload"]["scenario"]
        with pytest.raises(SchemaError):
            parse_model_file(json.dumps(doc))

    def test_non_rational_weight(self):
        doc = doc_for(pr_box())
        table = next(iter(doc["payload"]["tables"].values()))
        key = next(iter(table))
        table[key] = "0.5"
        with pytest.raises(SchemaError) as e:
            parse_model_file(json.dumps(doc))
        assert "payload/tables" in e.value.path

    def test_comma_in_label(self):
        doc = doc_for(pr_box())
        doc["payload"]["scenario"]["measurements"][0] = "a,0"
        with pytest.raises(SchemaError):
            parse_model_file(json.dumps(doc))

    def test_empty_label(self):
        doc = doc_for(pr_box())
        doc["payload"]["scenario"]["measurements"][0] = ""
        with pytest.raises(SchemaError):
            parse_model_file(json.dumps(doc))

    def test_event_arity_mismatch(self):
        doc = doc_for(pr_box())
        table = next(iter(doc["payload"]["tables"].values()))
        table["0"] = table.pop(next(iter(table)))
        with pytest.raises(SchemaError) as e:
            parse_model_file(json.dumps(doc))
        assert "does not match context" in str(e.value)

    def test_duplicate_context_keys(self):
        doc = doc_for(pr_box())
        tables = doc["payload"]["tables"]
        first = next(iter(tables))
        a, b = first.split(",")
        tables[f"{b},{a}"] = tables[first]
        with pytest.raises(SchemaError) as e:
            parse_model_file(json.dumps(doc))
        assert "duplicate context" in str(e.value)

    def test_weights_not_summing_to_one(self):
        doc = doc_for(pr_box())
        table = next(iter(doc["payload"]["tables"].values()))
        keys = list(table)
        table[keys[0]] = "2/3"
        table[keys[1]] = "1/2"
        for k in keys[2:]:
            del table[k]
        with pytest.raises(InvariantViolation) as e:
            parse_model_file(json.dumps(doc))
        assert "-1/6" in str(e.value)

    def test_property_with_bad_value_dist(self):
        doc = doc_for(fuzzy_coin_property())
        state = next(iter(doc["payload"]["f"]))
        doc["payload"]["f"][state] = {"heads": "1/3"}
        with pytest.raises(InvariantViolation):
            parse_model_file(json.dumps(doc))

    def test_top_level_must_be_an_object(self):
        with pytest.raises(SchemaError):
            parse_model_file("[1, 2]")


class TestDemoConfig:
    def test_defaults(self):
        c = DemoConfig("chsh")
        assert c.basis == "z"
        assert c.max_denominator == 10**6

    def test_unknown_demo(self):
        with pytest.raises(InvariantViolation):
            DemoConfig("teleport")

    def test_bad_basis(self):
        with pytest.raises(InvariantViolation):
            DemoConfig("steering", basis="y")

    def test_bad_denominator(self):
        with pytest.raises(InvariantViolation):
            DemoConfig("chsh", max_denominator=0)

    def test_parse_applies_defaults(self):
        mf = parse_model_file(
            '{"format_version": 1, "kind": "quantum-demo-config",'
            ' "payload": {"demo": "epr"}}'
        )
        assert mf.payload == DemoConfig("epr")
