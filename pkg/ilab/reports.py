# ilab/reports.py
# Reportes de experimentos: resultados con tolerancia y procedencia, JSON + CSV, escritura atómica

import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from . import config

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1  # incrementa si cambias estructura
TIMING_FIELDS = ("runtime_ms", "created")
PROVENANCES = ("closed-form", "solver", "sampled", "analytic", "search")

STATUS_PASS = "PASS"
STATUS_FAIL = "FAIL"
STATUS_FAILED_CERTIFICATION = "FAILED-CERTIFICATION"

EXIT_CODES = {STATUS_PASS: 0, STATUS_FAIL: 2, STATUS_FAILED_CERTIFICATION: 3}
EXIT_CONFIG_ERROR = 4


def jsonable(value: Any) -> Any:
    """Convierte numpy e infinitos a tipos JSON estándar ('inf', '-inf', 'nan' como texto)."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return value


def from_jsonable(value: Any) -> Any:
    """Inversa de ``jsonable`` para los textos 'inf', '-inf' y 'nan'."""
    if isinstance(value, dict):
        return {k: from_jsonable(v) for k, v in value.items()}
    if isinstance(value, list):
        return [from_jsonable(v) for v in value]
    if isinstance(value, str) and value in ("inf", "-inf", "nan"):
        return float(value)
    return value


@dataclass
class Result:
    value: Any
    tol: Optional[float] = None
    provenance: str = "sampled"
    passed: Optional[bool] = None
    eps: Optional[float] = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance='{self.provenance}' debe ser uno de {list(PROVENANCES)}")

    def as_dict(self) -> Dict[str, Any]:
        out = {"value": jsonable(self.value), "tol": jsonable(self.tol), "provenance": self.provenance}
        if self.passed is not None:
            out["pass"] = bool(self.passed)
        if self.eps is not None:
            out["eps"] = jsonable(self.eps)
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Result":
        return cls(from_jsonable(data["value"]), from_jsonable(data.get("tol")), data["provenance"],
                   data.get("pass"), from_jsonable(data.get("eps")))


@dataclass
class Report:
    experiment: str
    config: Dict[str, Any]
    results: Dict[str, Result] = field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    passed: bool = False
    status: str = STATUS_FAIL
    runtime_ms: float = 0.0
    created: str = ""
    error: Optional[str] = None
    schema_version: int = SCHEMA_VERSION

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def as_dict(self) -> Dict[str, Any]:
        out = {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "config": jsonable(self.config),
            "results": {k: r.as_dict() for k, r in self.results.items()},
            "tables": jsonable(self.tables),
            "pass": bool(self.passed),
            "status": self.status,
            "runtime_ms": round(float(self.runtime_ms), 3),
            "created": self.created,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    def body(self) -> Dict[str, Any]:
        """as_dict sin los campos de tiempo: idéntico para (config, seed) idénticos."""
        out = self.as_dict()
        for key in TIMING_FIELDS:
            out.pop(key, None)
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Report":
        """Reconstruye un Report desde su JSON; los textos 'inf', '-inf' y 'nan' vuelven a float."""
        return cls(
            experiment=data["experiment"],
            config=from_jsonable(data["config"]),
            results={k: Result.from_dict(r) for k, r in data.get("results", {}).items()},
            tables=from_jsonable(data.get("tables", {})),
            passed=bool(data["pass"]),
            status=data["status"],
            runtime_ms=float(data.get("runtime_ms", 0.0)),
            created=data.get("created", ""),
            error=data.get("error"),
            schema_version=int(data.get("schema_version", SCHEMA_VERSION)),
        )


def to_json(report: Report) -> str:
    return json.dumps(report.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_frame(report: Report) -> pd.DataFrame:
    """Formato largo: table, row, column, value. Los resultados escalares van en la tabla 'results'."""
    rows = []
    for name, result in report.results.items():
        for column, value in result.as_dict().items():
            rows.append({"table": "results", "row": name, "column": column, "value": value})
    for table, entries in report.tables.items():
        for i, entry in enumerate(entries):
            for column, value in jsonable(entry).items():
                rows.append({"table": table, "row": i, "column": column, "value": value})
    return pd.DataFrame(rows, columns=["table", "row", "column", "value"])


def to_csv(report: Report) -> str:
    return report_frame(report).to_csv(index=False)


def write_atomic(path: str, text: str) -> str:
    """Escribe en un temporal del mismo directorio y lo renombra sobre ``path``."""
    path = os.path.abspath(path)
    directory = os.path.dirname(path)
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ilab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def default_report_path(experiment: str, fmt: str = "json", output_dir: Optional[str] = None) -> str:
    return os.path.join(output_dir or config.OUTPUT_DIR, f"{experiment}.{fmt}")


def write_report(report: Report, path: Optional[str] = None, fmt: str = "json") -> str:
    """Escribe el reporte en ``fmt`` (json o csv); devuelve la ruta final."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"fmt='{fmt}' debe ser json o csv")
    path = path or default_report_path(report.experiment, fmt)
    text = to_json(report) if fmt == "json" else to_csv(report)
    final = write_atomic(path, text)
    logger.info("[REPORT] %s escrito en %s", report.experiment, final)
    return final


def load_report(path: str) -> Dict[str, Any]:
    """JSON tal cual; ``read_report`` devuelve el Report reconstruido."""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def read_report(path: str) -> Report:
    return Report.from_dict(load_report(path))


def print_summary(report: Report) -> None:
    """Resumen legible junto al reporte de máquina."""
    print("=" * 80)
    print("=== RESULTADOS ===")
    print(f"Experimento: {report.experiment}   estado: {report.status}   ({report.runtime_ms:.0f} ms)")
    print("=" * 80)
    for name, result in report.results.items():
        mark = "" if result.passed is None else ("✓" if result.passed else "✗")
        value = result.value
        shown = f"{value:.6g}" if isinstance(value, float) else str(value)
        tol = "" if result.tol is None else f"  tol={result.tol:g}"
        print(f"  {mark:1} {name:<32} {shown:>14}{tol}  [{result.provenance}]")
    for table, rows in report.tables.items():
        print(f"\n  Tabla '{table}': {len(rows)} filas")
    if report.error:
        print(f"\n  ❌ {report.error}")
    print("=" * 80)
