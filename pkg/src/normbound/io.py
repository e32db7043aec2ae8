"""File formats: model, corpus and sequence documents, plus JSON/CSV output.

Every document carries ``"schema": "normbound/1"``. Structural checks use
JSON Schema; semantic checks (probabilities, brackets, means) are done by the
model and variable constructors and reported with JSON paths.
"""
import csv
import io as _io
import json
import math

import jsonschema

from .errors import DomainError, SchemaError
from .lipschitz import DiscreteVariable
from .martingale_lab.models import Branch, MartingaleModel, Step

__all__ = [
    "SCHEMA_TAG",
    "MODEL_SCHEMA",
    "CORPUS_SCHEMA",
    "SEQUENCE_SCHEMA",
    "load_json",
    "model_from_doc",
    "model_to_doc",
    "corpus_from_doc",
    "sequence_from_doc",
    "dumps",
    "to_csv",
]

SCHEMA_TAG = "normbound/1"

_num = {"type": "number"}
_nums = {"type": "array", "items": _num, "minItems": 1}

_law = {
    "support": _nums,
    "probs": _nums,
    "C": _num,
    "D": _num,
    "var": {"type": "number", "minimum": 0},
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["schema", "kind", "steps"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "name": {"type": "string"},
        "kind": {"enum": ["martingale", "supermartingale"]},
        "initial": _num,
        "steps": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["type", "support", "probs"],
                "properties": dict(
                    _law,
                    type={"enum": ["iid", "adapted"]},
                    s={"type": "number", "exclusiveMinimum": 0},
                    s_hat={"type": "number", "exclusiveMinimum": 0},
                    branches={
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["history", "support", "probs"],
                            "properties": dict(
                                _law, history={"type": "array", "items": {"type": "integer", "minimum": 0}}
                            ),
                            "additionalProperties": False,
                        },
                    },
                ),
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

_point = {
    "oneOf": [
        _num,
        {"type": "string"},
        {"type": "array", "items": _num, "minItems": 1},
    ]
}

CORPUS_SCHEMA = {
    "type": "object",
    "required": ["schema", "entries"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "entries": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["g", "variables"],
                "properties": {
                    "name": {"type": "string"},
                    "g": {"enum": ["sum", "abs-sum", "max", "norm1-of-sums"]},
                    "variables": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["support", "probs"],
                            "properties": {
                                "support": {"type": "array", "items": _point, "minItems": 1},
                                "probs": _nums,
                                "values": {"type": "object", "additionalProperties": _point},
                                "repeat": {"type": "integer", "minimum": 1},
                            },
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

SEQUENCE_SCHEMA = {
    "type": "object",
    "required": ["schema", "steps"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "x": _num,
        "steps": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "oneOf": [
                    {"required": ["D", "var"], "not": {"anyOf": [{"required": ["C"]}, {"required": ["s"]}]}},
                    {"required": ["C", "D"], "not": {"anyOf": [{"required": ["var"]}, {"required": ["s"]}]}},
                    {"required": ["s"], "not": {"anyOf": [{"required": ["C"]}, {"required": ["D"]}]}},
                ],
                "properties": {"C": _num, "D": _num, "var": {"type": "number", "minimum": 0}, "s": _num},
                "additionalProperties": False,
            },
        },
        "exceedances": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
    },
    "additionalProperties": False,
}


def _json_path(parts):
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def check_schema(doc, schema):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message, _json_path(exc.absolute_path)) from None


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------- models


def _branch(d):
    return Branch(
        support=tuple(float(v) for v in d["support"]),
        probs=tuple(float(v) for v in d["probs"]),
        C=d.get("C"),
        D=d.get("D"),
        var=d.get("var"),
    )


def model_from_doc(doc, validate=True):
    check_schema(doc, MODEL_SCHEMA)
    steps = []
    for i, sd in enumerate(doc["steps"]):
        if sd["type"] == "iid" and sd.get("branches"):
            raise SchemaError("iid steps cannot carry branches", f"$.steps[{i}].branches")
        branches = tuple((tuple(b["history"]), _branch(b)) for b in sd.get("branches", ()))
        steps.append(Step(default=_branch(sd), branches=branches, s=sd.get("s"), s_hat=sd.get("s_hat")))
    model = MartingaleModel(
        steps=steps,
        kind=doc["kind"],
        initial=float(doc.get("initial", 0.0)),
        name=doc.get("name", ""),
    )
    if validate:
        model.validate()
    return model


def _law_doc(br):
    out = {"support": list(br.support), "probs": list(br.probs)}
    for key in ("C", "D", "var"):
        val = getattr(br, key)
        if val is not None:
            out[key] = val
    return out


def model_to_doc(model):
    steps = []
    for st in model.steps:
        sd = {"type": "adapted" if st.branches else "iid"}
        sd.update(_law_doc(st.default))
        sd["s" if st.s is not None else "s_hat"] = st.scale
        if st.branches:
            sd["branches"] = [dict(history=list(k), **_law_doc(b)) for k, b in st.branches]
        steps.append(sd)
    return {
        "schema": SCHEMA_TAG,
        "name": model.name,
        "kind": model.kind,
        "initial": model.initial,
        "steps": steps,
    }


# ---------------------------------------------------------------- corpus


def corpus_from_doc(doc):
    """List of ``(name, g, [DiscreteVariable, ...])``."""
    check_schema(doc, CORPUS_SCHEMA)
    out = []
    for e, entry in enumerate(doc["entries"]):
        variables = []
        for v, vd in enumerate(entry["variables"]):
            path = f"$.entries[{e}].variables[{v}]"
            support = tuple(tuple(p) if isinstance(p, list) else p for p in vd["support"])
            try:
                var = DiscreteVariable(support, tuple(vd["probs"]), vd.get("values"))
                var.embedding()
            except DomainError as exc:
                raise SchemaError(str(exc), path) from None
            variables.extend([var] * vd.get("repeat", 1))
        out.append((entry.get("name", f"entry{e}"), entry["g"], variables))
    return out


# ---------------------------------------------------------------- sequences


def sequence_from_doc(doc):
    """Per-step scales from a sequence document.

    Returns ``(scales, forms, exceedances)``; a step ``{D, var}`` gives
    ``s_hat = (D + var/D)/2``, ``{C, D}`` gives ``(D - C)/2`` and ``{s}`` is taken as is.
    """
    check_schema(doc, SEQUENCE_SCHEMA)
    scales, forms = [], []
    for i, st in enumerate(doc["steps"]):
        path = f"$.steps[{i}]"
        if "var" in st:
            if not st["D"] > 0:
                raise SchemaError("D must be positive", path + ".D")
            scales.append(0.5 * (st["D"] + st["var"] / st["D"]))
            forms.append("variance")
        elif "C" in st:
            if not st["D"] > st["C"]:
                raise SchemaError("need D > C", path)
            scales.append(0.5 * (st["D"] - st["C"]))
            forms.append("bracket")
        else:
            if not st["s"] > 0:
                raise SchemaError("s must be positive", path + ".s")
            scales.append(float(st["s"]))
            forms.append("scale")
    return scales, forms, list(doc.get("exceedances", []))


# ---------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if hasattr(v, "item"):  # numpy scalar
        return _fmt(v.item())
    if hasattr(v, "tolist"):
        return _fmt(v.tolist())
    raise TypeError(f"cannot serialise {type(v).__name__}")


def dumps(obj):
    """JSON text with every float written to 17 significant digits."""
    return _fmt(obj)


def to_csv(rows, columns):
    """CSV with a fixed column order; floats use 17 significant digits."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = row.get(c)
            if isinstance(v, float):
                out.append(format(v, ".17g"))
            elif hasattr(v, "item"):
                v = v.item()
                out.append(format(v, ".17g") if isinstance(v, float) else v)
            else:
                out.append("" if v is None else v)
        w.writerow(out)
    return buf.getvalue()

