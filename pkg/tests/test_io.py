import copy
import json
import math
from importlib import resources

import pytest

from normbound.errors import SchemaError, ValidationError
from normbound.io import (
    corpus_from_doc,
    dumps,
    load_json,
    model_from_doc,
    model_to_doc,
    sequence_from_doc,
    to_csv,
)
from normbound.martingale_lab import adapted_sign_model, enumerate_exact, skewed_variance_model

DATA = resources.files("normbound") / "data"


def test_bundled_models_load():
    for f in (DATA / "models").iterdir():
        m = model_from_doc(json.loads(f.read_text()))
        assert m.steps


@pytest.mark.parametrize("model", [adapted_sign_model(5), skewed_variance_model(4)])
def test_model_round_trip(model):
    doc = json.loads(dumps(model_to_doc(model)))
    back = model_from_doc(doc)
    assert model_to_doc(back) == model_to_doc(model)
    a, b = enumerate_exact(model), enumerate_exact(back)
    assert list(a.s_values) == list(b.s_values) and list(a.s_probs) == list(b.s_probs)


def _doc():
    return json.loads((DATA / "models" / "adapted_sign_4.json").read_text())


def test_schema_path_for_bad_type():
    doc = _doc()
    doc["steps"][2]["probs"] = "half"
    with pytest.raises(SchemaError) as e:
        model_from_doc(doc)
    assert e.value.path == "$.steps[2].probs"


def test_schema_tag_required():
    doc = _doc()
    doc["schema"] = "normbound/0"
    with pytest.raises(SchemaError) as e:
        model_from_doc(doc)
    assert e.value.path == "$.schema"


def test_semantic_error_path():
    doc = _doc()
    doc["steps"][1]["branches"][0]["probs"] = [0.5, 0.6]
    with pytest.raises(ValidationError) as e:
        model_from_doc(doc)
    assert e.value.path.startswith("$.steps[1].branches[0]")


def test_iid_with_branches_rejected():
    doc = _doc()
    doc["steps"][1]["type"] = "iid"
    with pytest.raises(SchemaError):
        model_from_doc(doc)


def test_corpus_loads_and_tokens():
    entries = corpus_from_doc(json.loads((DATA / "corpus" / "lipschitz_corpus.json").read_text()))
    assert len(entries) >= 4
    assert {g for _, g, _ in entries} == {"sum", "abs-sum", "max", "norm1-of-sums"}
    assert all(len(v) <= 12 and all(len(x.support) <= 3 for x in v) for _, _, v in entries)
    bad = {"schema": "normbound/1", "entries": [{"g": "sum", "variables": [{"support": ["a"], "probs": [1]}]}]}
    with pytest.raises(SchemaError) as e:
        corpus_from_doc(bad)
    assert e.value.path == "$.entries[0].variables[0]"


def test_sequence():
    doc = json.loads((DATA / "sequence_example.json").read_text())
    scales, forms, exc = sequence_from_doc(doc)
    assert scales == [1.25, 1.25] and forms == ["variance"] * 2 and exc == [0.01, 0.02]
    assert sequence_from_doc({"schema": "normbound/1", "steps": [{"C": -1, "D": 3}]})[0] == [2.0]
    with pytest.raises(SchemaError):
        sequence_from_doc({"schema": "normbound/1", "steps": [{"C": -1, "D": 3, "var": 1}]})
    with pytest.raises(SchemaError) as e:
        sequence_from_doc({"schema": "normbound/1", "steps": [{"s": 1}, {"D": 0, "var": 1}]})
    assert e.value.path == "$.steps[1].D"


def test_dumps_precision_and_specials():
    x = 0.1 + 0.2
    text = dumps({"a": x, "b": [math.inf, -math.inf], "c": math.nan, "d": True, "e": None})
    back = json.loads(text)
    assert back["a"] == x and back["b"] == ["inf", "-inf"] and back["c"] == "nan"


def test_csv():
    text = to_csv([{"x": 1 / 3, "ok": True}, {"x": 2.0}], ["x", "ok"])
    lines = text.splitlines()
    assert lines[0] == "x,ok" and float(lines[1].split(",")[0]) == 1 / 3 and lines[2] == "2,"


def test_load_json_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(SchemaError):
        load_json(p)
    with pytest.raises(SchemaError):
        load_json(tmp_path / "missing.json")
