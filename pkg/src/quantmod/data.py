"""Fixture loading.

A fixture name resolves to a JSON file shipped in ``quantmod/fixtures``;
anything containing a path separator or ending in ``.json`` is read from disk.
``abelian-<n>`` is generated on the fly for any n.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .counterexample import CounterexampleData
from .lie import LieAlgebra, abelian
from .poly import MultiVector, as_rational


class UnknownFixture(LookupError):
    pass


_ABELIAN = re.compile(r"^abelian-(\d+)$")


def _looks_like_path(ref: str) -> bool:
    return ref.endswith(".json") or "/" in ref or "\\" in ref


def shipped_fixtures() -> list[str]:
    root = resources.files("quantmod") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_fixture(ref: str) -> dict:
    if _looks_like_path(ref):
        p = Path(ref)
        if not p.is_file():
            raise UnknownFixture(f"no such fixture file: {ref}")
        return json.loads(p.read_text())
    m = _ABELIAN.match(ref)
    if m:
        return {"name": ref, "dim": int(m.group(1)), "brackets": []}
    res = resources.files("quantmod") / "fixtures" / f"{ref}.json"
    if not res.is_file():
        known = ", ".join(shipped_fixtures() + ["abelian-<n>"])
        raise UnknownFixture(f"unknown fixture {ref!r} (known: {known})")
    return json.loads(res.read_text())


def is_counterexample(raw: dict) -> bool:
    return "g" in raw and "h" in raw


def is_poisson(raw: dict) -> bool:
    return "pi" in raw


@dataclass
class PoissonFixture:
    """A bare polynomial bivector, e.g. a control case for the obstruction."""

    name: str
    pi: MultiVector
    expected_verdict: str | None = None

    def to_dict(self):
        d = {"name": self.name, "pi": self.pi.to_dict()}
        if self.expected_verdict:
            d["expected_verdict"] = self.expected_verdict
        return d


def lie_from_raw(raw, name=None) -> LieAlgebra:
    if isinstance(raw, str):
        return load_lie(raw)
    if is_counterexample(raw) or is_poisson(raw):
        raise UnknownFixture(f"{name or raw.get('name')} is not a Lie algebra fixture")
    m = _ABELIAN.match(raw.get("name") or "")
    if m and not raw.get("brackets"):
        return abelian(int(m.group(1)))
    return LieAlgebra.from_dict(raw, name=name)


def load_lie(ref: str) -> LieAlgebra:
    raw = read_fixture(ref)
    return lie_from_raw(raw, name=raw.get("name") or Path(ref).stem)


def counterexample_from_raw(raw: dict, name=None) -> CounterexampleData:
    g = lie_from_raw(raw["g"])
    h = lie_from_raw(raw["h"])
    C = {}
    for a, b, v in raw.get("C", []):
        C[(int(a), int(b))] = C.get((int(a), int(b)), 0) + as_rational(v)
    return CounterexampleData(g, h, C, name=name or raw.get("name"),
                              expected_verdict=raw.get("expected_verdict"))


def load_counterexample(ref: str) -> CounterexampleData:
    raw = read_fixture(ref)
    if not is_counterexample(raw):
        raise UnknownFixture(f"{ref} is not a counterexample fixture")
    return counterexample_from_raw(raw, name=raw.get("name") or Path(ref).stem)


def load(ref: str):
    """A LieAlgebra, CounterexampleData or PoissonFixture, depending on the file."""
    raw = read_fixture(ref)
    name = raw.get("name") or Path(ref).stem
    if is_counterexample(raw):
        return counterexample_from_raw(raw, name=name)
    if is_poisson(raw):
        return PoissonFixture(name, MultiVector.from_dict(raw["pi"]), raw.get("expected_verdict"))
    return lie_from_raw(raw, name=name)
