"""Shipped pairs (quotient action, crepant resolution) for the main-theorem check.

Entries live as JSON files in the package ``data`` directory, listed by
``index.json``; adding an example needs no code change.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .ering import ERat, erat_eq, erat_parse
from .orbifold import AbelianAction, TheoremReport, action_from_json, verify_main_theorem
from .stringy import SncModel, model_from_json


@dataclass
class CatalogueEntry:
    name: str
    action: AbelianAction
    resolution: SncModel
    expected: ERat
    notes: str = ""


def catalogue_dir() -> Path:
    return Path(str(resources.files(__package__) / "data"))


def load_catalogue(directory: str | Path | None = None) -> list[CatalogueEntry]:
    root = Path(directory) if directory is not None else catalogue_dir()
    index = json.loads((root / "index.json").read_text())
    entries = []
    for item in index["entries"]:
        action = action_from_json(json.loads((root / item["action"]).read_text()))
        resolution = model_from_json(json.loads((root / item["resolution"]).read_text()))
        entries.append(
            CatalogueEntry(
                item["name"], action, resolution, erat_parse(item["expected"]), item.get("notes", "")
            )
        )
    return entries


@dataclass
class EntryResult:
    entry: CatalogueEntry
    report: TheoremReport

    @property
    def matches_expected(self) -> bool:
        return erat_eq(self.report.stringy, self.entry.expected) and erat_eq(
            self.report.orbifold, self.entry.expected
        )

    @property
    def passed(self) -> bool:
        return self.report.equal and self.matches_expected

    def to_dict(self) -> dict[str, Any]:
        out = self.report.to_dict()
        out.update(
            name=self.entry.name,
            expected=str(self.entry.expected),
            matches_expected=self.matches_expected,
            passed=self.passed,
        )
        return out


def run_catalogue(directory: str | Path | None = None) -> list[EntryResult]:
    return [
        EntryResult(e, verify_main_theorem(e.action, e.resolution))
        for e in load_catalogue(directory)
    ]
