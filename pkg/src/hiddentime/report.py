"""Verification reports and their JSON / CSV encodings."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

SCHEMA_VERSION = 1


@dataclass
class Check:
    name: str
    inputs: dict
    value: float
    tolerance: float
    passed: bool


@dataclass
class Report:
    command: str
    seed: int
    version: str
    entries: list[Check] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION
    # extra plot-ready rows (simulate only)
    rows: list[dict] = field(default_factory=list)

    def add(self, name: str, inputs: dict, value: float, tolerance: float, passed: bool) -> Check:
        check = Check(name, inputs, float(value), float(tolerance), bool(passed))
        self.entries.append(check)
        return check

    @property
    def summary(self) -> dict:
        passed = sum(1 for e in self.entries if e.passed)
        return {"total": len(self.entries), "passed": passed, "failed": len(self.entries) - passed}

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "summary": self.summary,
            "entries": [asdict(e) for e in self.entries],
            "rows": self.rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        report = cls(
            command=data["command"],
            seed=int(data["seed"]),
            version=data["version"],
            entries=[Check(**e) for e in data["entries"]],
            schema_version=int(data["schema_version"]),
            rows=list(data.get("rows", [])),
        )
        if report.summary != data["summary"]:
            raise ValueError("summary counts do not match entries")
        return report

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.rows:
            columns = list(self.rows[0])
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(columns)
            for row in self.rows:
                writer.writerow([_cell(row[c]) for c in columns])
        else:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["name", "value", "tolerance", "pass"])
            for e in self.entries:
                writer.writerow([e.name, _cell(e.value), _cell(e.tolerance), _cell(e.passed)])
        return buf.getvalue()


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)
