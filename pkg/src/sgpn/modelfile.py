"""JSON model files: parsing, schema checks and canonical export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from jsonschema import Draft202012Validator

from .errors import ModelParseError
from .game import REWARD_KEYS, RewardTable
from .net import ACTIONS, TAGS, NetDefinition, Place, Transition, require_valid

SCHEMA_VERSION = 1

_number = {"type": "number"}
_prob = {"type": "number", "minimum": 0, "maximum": 1}

MODEL_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "players", "places", "transitions", "arcs", "initial_marking"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "players": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "places": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "description"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "description": {"type": "string"},
                    "tag": {"enum": list(TAGS)},
                },
            },
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "owner", "description"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "owner": {"type": "string"},
                    "routing_prob": _prob,
                    "rate": {"type": "number", "exclusiveMinimum": 0},
                    "rewards": {"type": "array", "items": _number},
                    "description": {"type": "string"},
                    "action": {"enum": list(ACTIONS)},
                },
            },
        },
        "arcs": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "to"],
                "properties": {"from": {"type": "string"}, "to": {"type": "string"}},
            },
        },
        "initial_marking": {
            "oneOf": [
                {"type": "array", "items": {"type": "string"}},
                {
                    "type": "object",
                    "additionalProperties": {"type": "integer", "minimum": 0},
                },
            ]
        },
        "rewards_table": {
            "type": "object",
            "additionalProperties": False,
            "required": list(REWARD_KEYS),
            "properties": {k: _number for k in REWARD_KEYS},
        },
        "discount": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "provenance": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}

_validator = Draft202012Validator(MODEL_SCHEMA)


@dataclass(frozen=True)
class ModelDocument:
    net: NetDefinition
    rewards: Optional[RewardTable] = None
    discount: Optional[float] = None
    provenance: dict[str, str] = field(default_factory=dict)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_model(document: Union[str, bytes, dict]) -> ModelDocument:
    """Parse a model from JSON text or an already-decoded mapping.

    Raises :class:`ModelParseError` for syntax or schema problems and
    :class:`NetValidationError` when the net breaks a structural rule.
    """
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    else:
        data = document
    errors = sorted(_validator.iter_errors(data), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        msgs = [f"{_path(e.absolute_path)}: {e.message}" for e in errors]
        raise ModelParseError("; ".join(msgs))

    players = tuple(data["players"])
    zero = [0.0] * len(players)
    places = tuple(Place(p["id"], p["description"], p.get("tag", "plain")) for p in data["places"])
    transitions = tuple(
        Transition(
            id=t["id"],
            owner=t["owner"],
            routing_prob=float(t.get("routing_prob", 1.0)),
            rate=float(t.get("rate", 1.0)),
            rewards=tuple(float(x) for x in t.get("rewards", zero)),
            description=t["description"],
            action=t.get("action"),
        )
        for t in data["transitions"]
    )
    arcs = tuple((a["from"], a["to"]) for a in data["arcs"])
    im = data["initial_marking"]
    if isinstance(im, list):
        counts: dict[str, int] = {}
        for pid in im:
            counts[pid] = counts.get(pid, 0) + 1
        initial = tuple(counts.items())
    else:
        initial = tuple((k, int(v)) for k, v in im.items() if v)
    net = NetDefinition(places, transitions, arcs, initial, players, data.get("name", ""))
    require_valid(net)

    rewards = None
    if "rewards_table" in data:
        rewards = RewardTable(**{k: float(data["rewards_table"][k]) for k in REWARD_KEYS})
    discount = float(data["discount"]) if "discount" in data else None
    return ModelDocument(net, rewards, discount, dict(data.get("provenance", {})))


def load_model_file(path: Union[str, Path]) -> ModelDocument:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def export_model(doc: ModelDocument) -> dict:
    net = doc.net
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": net.name,
        "players": list(net.players),
        "places": [{"id": p.id, "description": p.description, "tag": p.tag} for p in net.places],
        "transitions": [],
        "arcs": [{"from": a, "to": b} for a, b in net.arcs],
    }
    for t in net.transitions:
        item = {
            "id": t.id,
            "owner": t.owner,
            "routing_prob": t.routing_prob,
            "rate": t.rate,
            "rewards": list(t.rewards),
            "description": t.description,
        }
        if t.action is not None:
            item["action"] = t.action
        out["transitions"].append(item)
    if all(n == 1 for _, n in net.initial):
        out["initial_marking"] = [p for p, _ in net.initial]
    else:
        out["initial_marking"] = {p: n for p, n in net.initial}
    if doc.rewards is not None:
        out["rewards_table"] = doc.rewards.as_dict()
    if doc.discount is not None:
        out["discount"] = doc.discount
    if doc.provenance:
        out["provenance"] = dict(doc.provenance)
    return out


def dumps(doc: ModelDocument) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(export_model(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
