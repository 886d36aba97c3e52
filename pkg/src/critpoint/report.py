"""Machine-readable experiment reports: report.json + series.csv.

Reports are deterministic given the configuration, except for the
wall-clock section, which is excluded from series.csv precisely so the CSV
is byte-identical across reruns.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    threshold: float | str
    observed: float | str
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "threshold": self.threshold, "observed": self.observed,
                "detail": self.detail}


@dataclass
class Report:
    experiment: str
    config: dict
    rows: list = field(default_factory=list)   # (n, stat_name, value)
    verdicts: list = field(default_factory=list)
    wall_clock: dict = field(default_factory=dict)

    def add_row(self, n: int, stat: str, value) -> None:
        self.rows.append((int(n), str(stat), float(value)))

    def add_verdict(self, name, passed, threshold, observed, detail="") -> None:
        self.verdicts.append(Verdict(name, bool(passed), threshold, observed, detail))

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def stat(self, n: int, name: str) -> float:
        for rn, rs, rv in self.rows:
            if rn == n and rs == name:
                return rv
        raise KeyError(f"no stat {name!r} at n={n}")

    def stats(self, name: str) -> dict:
        return {rn: rv for rn, rs, rv in self.rows if rs == name}

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "experiment": self.experiment,
            "config": self.config,
            "rows": [{"n": n, "stat": s, "value": v} for n, s, v in self.rows],
            "verdicts": [v.to_json() for v in self.verdicts],
            "passed": self.passed,
            "wall_clock": self.wall_clock,
        }

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["experiment", "n", "stat_name", "value"])
        for n, s, v in self.rows:
            w.writerow([self.experiment, n, s, repr(v)])
        return buf.getvalue()

    def write(self, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.json"), "w") as f:
            json.dump(self.to_json(), f, indent=2, sort_keys=True)
            f.write("\n")
        with open(os.path.join(out_dir, "series.csv"), "w", newline="") as f:
            f.write(self.series_csv())
