"""Catalog of named complex models shipped as JSON data files."""

from __future__ import annotations

from importlib import resources

from .errors import UnknownName
from .model import BifilteredComplex
from .serialize import complex_from_dict

import json


def _data_dir():
    return resources.files("splicerank") / "data"


def corpus_names() -> list[str]:
    names = [
        entry.name[: -len(".json")]
        for entry in _data_dir().iterdir()
        if entry.name.endswith(".json")
    ]
    return sorted(names)


def corpus(name: str) -> BifilteredComplex:
    """Load a named corpus entry; raises UnknownName for anything else."""
    entry = _data_dir() / f"{name}.json"
    if not entry.is_file():
        raise UnknownName(f"no corpus entry {name!r}; known: {', '.join(corpus_names())}")
    return complex_from_dict(json.loads(entry.read_text(encoding="utf-8")))
