"""Audit bookkeeping: one record per checked inequality, CSV/JSON reporting.

Records carry the two sides of the inequality, the signed margin (rhs side of
"lhs >= rhs" conventions is up to each audit; margin > 0 means satisfied), and
a self-describing statement string so reports can be read standalone.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

CSV_COLUMNS = [
    "audit",
    "beta",
    "lambda",
    "epsilon",
    "lhs",
    "rhs",
    "margin",
    "pass",
    "statement",
    "notes",
]

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
ADVISORY = "advisory"


def fmt(x) -> str:
    """Deterministic scalar formatting for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


@dataclass
class AuditRecord:
    audit: str
    statement: str
    lhs: float
    rhs: float
    margin: float
    status: str
    params: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def passed(self):
        if self.status == PASS:
            return True
        if self.status == FAIL:
            return False
        return None

    def row(self) -> list[str]:
        p = self.params
        return [
            self.audit,
            fmt(p.get("beta")),
            fmt(p.get("lam")),
            fmt(p.get("eps")),
            fmt(self.lhs),
            fmt(self.rhs),
            fmt(self.margin),
            self.status,
            self.statement,
            self.notes,
        ]


def passed_record(audit, statement, lhs, rhs, margin, ok, params=None, notes=""):
    return AuditRecord(
        audit=audit,
        statement=statement,
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(margin),
        status=PASS if ok else FAIL,
        params=dict(params or {}),
        notes=notes,
    )


def skipped_record(audit, statement, reason, params=None):
    return AuditRecord(
        audit=audit,
        statement=statement,
        lhs=float("nan"),
        rhs=float("nan"),
        margin=float("nan"),
        status=SKIPPED,
        params=dict(params or {}),
        notes=reason,
    )


def write_csv(records, path, header_comment=None) -> None:
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write("# %s\n" % header_comment)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.row())


def summarize(records) -> dict:
    counts = {PASS: 0, FAIL: 0, SKIPPED: 0, ADVISORY: 0}
    for rec in records:
        counts[rec.status] = counts.get(rec.status, 0) + 1
    return {
        "total": len(records),
        "counts": counts,
        "all_passed": counts[FAIL] == 0,
        "worst_margin": min(
            (rec.margin for rec in records if rec.status in (PASS, FAIL)),
            default=float("nan"),
        ),
    }


def write_json_summary(records, path, extra=None) -> None:
    payload = {"summary": summarize(records), "records": []}
    for rec in records:
        payload["records"].append(
            {
                "audit": rec.audit,
                "statement": rec.statement,
                "lhs": rec.lhs,
                "rhs": rec.rhs,
                "margin": rec.margin,
                "status": rec.status,
                "params": {k: v for k, v in sorted(rec.params.items())},
                "notes": rec.notes,
            }
        )
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
