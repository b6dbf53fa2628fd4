"""Flat output rows for sweep results, with CSV and JSON round-tripping."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, fields

from .errors import InvalidParameterError
from .simulator import ScenarioConfig, SweepResult

CSV_COLUMNS = (
    "mode",
    "n",
    "alpha_analytic",
    "beta_analytic",
    "te_analytic",
    "alpha_empirical",
    "beta_empirical",
    "te_empirical",
    "se_alpha",
    "se_beta",
    "gamma",
    "seed",
)


def format_number(value: float | None) -> str:
    """Nine significant digits; ``None`` becomes an empty field."""
    if value is None:
        return ""
    return f"{float(value):.9g}"


def _parse_number(text: str) -> float | None:
    return None if text == "" else float(text)


@dataclass(frozen=True)
class OutputRecord:
    mode: str
    n: int
    alpha_analytic: float | None
    beta_analytic: float | None
    te_analytic: float | None
    alpha_empirical: float
    beta_empirical: float
    te_empirical: float
    se_alpha: float
    se_beta: float
    gamma: float | None
    seed: int

    def to_row(self) -> dict[str, str]:
        row = {}
        for f in fields(self):
            value = getattr(self, f.name)
            row[f.name] = str(value) if f.name in ("mode", "n", "seed") else format_number(value)
        return row

    @classmethod
    def from_row(cls, row: dict[str, str]) -> OutputRecord:
        try:
            values = {
                name: row[name] if name == "mode" else int(row[name]) if name in ("n", "seed") else _parse_number(row[name])
                for name in CSV_COLUMNS
            }
        except (KeyError, ValueError) as exc:
            raise InvalidParameterError(f"malformed output row: {exc}") from None
        return cls(**values)

    def rounded(self) -> OutputRecord:
        """The record as it reads back after serialization."""
        return OutputRecord.from_row(self.to_row())


def records_from_sweep(result: SweepResult) -> list[OutputRecord]:
    config = result.config
    out = []
    for rec in result.records:
        analytic = rec.analytic
        out.append(
            OutputRecord(
                mode=config.mode.value,
                n=rec.n,
                alpha_analytic=None if analytic is None else analytic.alpha,
                beta_analytic=None if analytic is None else analytic.beta,
                te_analytic=None if analytic is None else analytic.total_error,
                alpha_empirical=rec.alpha_empirical,
                beta_empirical=rec.beta_empirical,
                te_empirical=rec.te_empirical,
                se_alpha=rec.se_alpha,
                se_beta=rec.se_beta,
                gamma=rec.gamma,
                seed=config.seed,
            )
        )
    return out


def to_csv(records: list[OutputRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.to_row())
    return buf.getvalue()


def from_csv(text: str) -> list[OutputRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise InvalidParameterError("CSV header does not match the output schema")
    return [OutputRecord.from_row(row) for row in reader]


def config_echo(config: ScenarioConfig, extra: dict | None = None) -> dict:
    """JSON-safe description of a config, stable across runs."""

    def plain(value):
        if dataclasses.is_dataclass(value):
            return {f.name: plain(getattr(value, f.name)) for f in fields(value)}
        if hasattr(value, "value") and not isinstance(value, (int, float)):
            return value.value
        if isinstance(value, (list, tuple)):
            return [plain(v) for v in value]
        return value

    echo = plain(config)
    if extra:
        echo.update(extra)
    return echo


def to_json(records: list[OutputRecord], echo: dict) -> str:
    rows = [
        {k: (v if k in ("mode", "n", "seed") else _parse_number(v)) for k, v in rec.to_row().items()}
        for rec in records
    ]
    return json.dumps({"config": echo, "rows": rows}, indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> tuple[dict, list[OutputRecord]]:
    doc = json.loads(text)
    rows = [
        OutputRecord.from_row({k: "" if v is None else str(v) for k, v in row.items()}) for row in doc["rows"]
    ]
    return doc["config"], rows
