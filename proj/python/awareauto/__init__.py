"""Python access to the awareauto core.

Rules, expressions and traces are plain dicts in the same JSON shapes the
CLI and HTTP service use.
"""

import json
import os
from pathlib import Path

from . import _core
from ._core import DeploymentError, Error, ParseError, SchemaError, format_rate

__all__ = [
    "DeploymentError", "Error", "ParseError", "SchemaError",
    "data_dir", "describe", "evaluate", "format_rate", "normalize", "reformat_rule_text",
    "roundtrip_action", "roundtrip_trigger", "simulate", "validate",
]


def data_dir() -> Path:
    return Path(os.environ.get("AWAREAUTO_DATA_DIR") or _core.default_data_dir())


def _catalog(catalog):
    return str(catalog or data_dir() / "catalog" / "living_room.json")


def describe(expression: dict) -> str:
    """The expression as one sentence, without the context block."""
    return _core.describe(json.dumps(expression))


def normalize(expression: dict, snapshot: dict | None = None) -> str:
    return _core.normalize(json.dumps(expression), json.dumps(snapshot) if snapshot else "")


def reformat_rule_text(document: str) -> str:
    return _core.reformat_rule_text(document)


def roundtrip_trigger(tuple_text: str) -> str:
    return _core.display_trigger(tuple_text)


def roundtrip_action(tuple_text: str) -> str:
    return _core.display_action(tuple_text)


def validate(rule: dict, catalog=None) -> dict:
    return json.loads(_core.validate(_catalog(catalog), json.dumps(rule)))


def simulate(rules, events, until=None, catalog=None) -> list:
    return json.loads(_core.simulate(_catalog(catalog), json.dumps(rules), json.dumps(events), until))


def evaluate(corpus=None, catalog=None, prompts=None, fixtures=None) -> dict:
    root = data_dir()
    return json.loads(_core.evaluate(
        str(corpus or root / "corpus" / "bundled.json"),
        _catalog(catalog),
        str(prompts or root / "prompts"),
        str(fixtures or root / "fixtures"),
    ))
