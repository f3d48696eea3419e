"""Verification reports and their canonical JSON/CSV serialization.

Serialization is deterministic: keys are sorted, lists keep computation
order, and the wall-clock time is only written when it was requested.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

SCHEMA_VERSION = 1
FORMATS = ("json", "csv")

CSV_COLUMNS = (
    "mode",
    "s",
    "blocks",
    "characteristic",
    "checks",
    "status",
    "ambient",
    "mu_ideal",
    "annihilator",
    "generated_ideal",
    "minimal_count",
    "failed",
    "error",
)


class ReportFormatError(ValueError):
    """Raised when a report document cannot be read back."""


@dataclass
class VerificationReport:
    """Everything computed for one configuration.

    `config` holds mode, s, blocks, characteristic and the checks run;
    `dims` named dimensions; `graded` the annihilator dimension per degree;
    `equalities` named booleans; `witnesses` elements exhibiting failed
    inclusions.
    """

    config: Dict[str, Any]
    dims: Dict[str, int] = field(default_factory=dict)
    graded: List[int] = field(default_factory=list)
    equalities: Dict[str, bool] = field(default_factory=dict)
    minimal: Optional[Dict[str, Any]] = None
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    ledger: Optional[Dict[str, Any]] = None
    runtime_ms: Optional[int] = None
    error: Optional[Dict[str, str]] = None

    @property
    def passed(self) -> bool:
        """No error and every equality holds."""
        return self.error is None and all(self.equalities.values())

    @property
    def status(self) -> str:
        """`pass`, `fail` or `error`."""
        if self.error is not None:
            return "error"
        return "pass" if self.passed else "fail"

    @property
    def failed(self) -> List[str]:
        """Names of the equalities that do not hold."""
        return [name for name, ok in self.equalities.items() if not ok]

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        """Fold another check's results for the same configuration into this one."""
        checks = list(self.config.get("checks", []))
        checks.extend(c for c in other.config.get("checks", []) if c not in checks)
        self.config = {**self.config, **other.config, "checks": checks}
        self.dims.update(other.dims)
        self.graded = other.graded or self.graded
        self.equalities.update(other.equalities)
        if other.minimal is not None:
            self.minimal = {**(self.minimal or {}), **other.minimal}
        self.witnesses.extend(other.witnesses)
        self.ledger = other.ledger or self.ledger
        self.error = other.error or self.error
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Plain data in the report schema."""
        data: Dict[str, Any] = {
            "config": self.config,
            "dims": {**self.dims, "graded": self.graded},
            "equalities": self.equalities,
            "witnesses": self.witnesses,
        }
        if self.minimal is not None:
            data["minimal"] = self.minimal
        if self.ledger is not None:
            data["ledger"] = self.ledger
        if self.runtime_ms is not None:
            data["runtime_ms"] = self.runtime_ms
        if self.error is not None:
            data["error"] = self.error
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        """Inverse of `to_dict`."""
        try:
            dims = dict(data["dims"])
            graded = dims.pop("graded", [])
            return cls(
                config=data["config"],
                dims=dims,
                graded=graded,
                equalities=data.get("equalities", {}),
                minimal=data.get("minimal"),
                witnesses=data.get("witnesses", []),
                ledger=data.get("ledger"),
                runtime_ms=data.get("runtime_ms"),
                error=data.get("error"),
            )
        except (KeyError, TypeError) as exc:
            raise ReportFormatError(f"malformed report: {exc}") from exc


def summary_row(report: VerificationReport) -> Dict[str, str]:
    """One flat row per configuration, used by CSV and the summary table."""
    config = report.config
    dims = report.dims
    generated = dims.get("generated_ideal", dims.get("gs_ideal"))
    blocks = config.get("blocks")
    return {
        "mode": str(config.get("mode", "")),
        "s": str(config.get("s", "")),
        "blocks": ",".join(map(str, blocks)) if blocks else "",
        "characteristic": str(config.get("characteristic", "")),
        "checks": ";".join(config.get("checks", [])),
        "status": report.status,
        "ambient": _text(dims.get("ambient")),
        "mu_ideal": _text(dims.get("mu_ideal")),
        "annihilator": _text(dims.get("annihilator")),
        "generated_ideal": _text(generated),
        "minimal_count": _text(report.minimal["count"] if report.minimal else None),
        "failed": ";".join(report.failed),
        "error": report.error["message"] if report.error else "",
    }


def _text(value: Optional[int]) -> str:
    return "" if value is None else str(value)


def _dump(document: Dict[str, Any]) -> bytes:
    return (json.dumps(document, sort_keys=True, indent=2) + "\n").encode()


def _csv(reports: Sequence[VerificationReport]) -> bytes:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(summary_row(report))
    return buffer.getvalue().encode()


def _check_format(fmt: str) -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r}, expected one of {FORMATS}")


def serialize_report(report: VerificationReport, fmt: str = "json") -> bytes:
    """Canonical bytes for a single report."""
    _check_format(fmt)
    if fmt == "csv":
        return _csv([report])
    return _dump({"schema_version": SCHEMA_VERSION, **report.to_dict()})


def serialize_reports(reports: Sequence[VerificationReport], fmt: str = "json") -> bytes:
    """Canonical bytes for a sweep: all reports plus the summary rows."""
    _check_format(fmt)
    if fmt == "csv":
        return _csv(reports)
    return _dump({
        "schema_version": SCHEMA_VERSION,
        "reports": [r.to_dict() for r in reports],
        "summary": [summary_row(r) for r in reports],
    })


def _load(data: bytes) -> Dict[str, Any]:
    try:
        document = json.loads(data)
    except ValueError as exc:
        raise ReportFormatError(f"not a JSON report: {exc}") from exc
    if not isinstance(document, dict):
        raise ReportFormatError("report document must be an object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ReportFormatError(f"unsupported schema version {version!r}")
    return document


def load_report(data: bytes) -> VerificationReport:
    """Parse bytes written by `serialize_report` back into a report."""
    document = _load(data)
    document.pop("schema_version")
    return VerificationReport.from_dict(document)


def load_reports(data: bytes) -> List[VerificationReport]:
    """Parse bytes written by `serialize_reports`."""
    document = _load(data)
    if "reports" not in document:
        raise ReportFormatError("sweep document has no reports")
    return [VerificationReport.from_dict(r) for r in document["reports"]]
