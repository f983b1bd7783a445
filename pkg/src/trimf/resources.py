"""Shipped data files.  TRIMF_DATA_DIR, when set, is searched first."""
from __future__ import annotations

import hashlib
import json
import os
from functools import cache
from importlib import resources
from pathlib import Path


def _override(name: str) -> Path | None:
    d = os.environ.get("TRIMF_DATA_DIR")
    if d and (Path(d) / name).is_file():
        return Path(d) / name
    return None


def read_text(name: str) -> str:
    p = _override(name)
    if p is not None:
        return p.read_text()
    return resources.files("trimf.data").joinpath(name).read_text()


@cache
def load_json(name: str) -> dict:
    return json.loads(read_text(name))


def names() -> list[str]:
    return sorted(p.name for p in resources.files("trimf.data").iterdir()
                  if p.name.endswith(".json"))


def digests() -> dict[str, str]:
    """sha256 of every data file as actually read (overrides included)."""
    return {n: hashlib.sha256(read_text(n).encode()).hexdigest() for n in names()}
