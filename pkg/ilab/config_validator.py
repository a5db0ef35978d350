# ilab/config_validator.py
# Validador de configuración de experimentos
# Combina defaults de config.yaml, archivo --config y overrides --set, y valida rangos

import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

import yaml

from . import config
from .errors import ConfigError, UnknownExperimentError

INF = math.inf


@dataclass(frozen=True)
class FieldSpec:
    kind: str                       # int, float, exponent, bool, choice, weights
    lo: float = -INF
    hi: float = INF
    lo_open: bool = False
    hi_open: bool = False
    choices: Tuple[str, ...] = ()

    def interval(self) -> str:
        lo = "-∞" if self.lo == -INF else _fmt(self.lo)
        hi = "∞" if self.hi == INF else _fmt(self.hi)
        return f"{'(' if self.lo_open else '['}{lo}, {hi}{')' if self.hi_open else ']'}"

    def contains(self, v: float) -> bool:
        above = v > self.lo if self.lo_open else v >= self.lo
        below = v < self.hi if self.hi_open else v <= self.hi
        return above and below


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


_TOL = FieldSpec("float", 0.0, INF, lo_open=True)
_EXPONENT = FieldSpec("exponent", 1.0, INF)
_FINITE_EXPONENT = FieldSpec("exponent", 1.0, INF, hi_open=True)
_OPEN_UNIT = FieldSpec("float", 0.0, 1.0, lo_open=True, hi_open=True)
_UNIT = FieldSpec("float", 0.0, 1.0)

# Rangos comunes; los experimentos pueden restringirlos en EXPERIMENT_FIELDS
FIELD_SPECS: Dict[str, FieldSpec] = {
    "seed": FieldSpec("int", 0, 2 ** 32 - 1),
    "samples": FieldSpec("int", 1, 1_000_000),
    "solver_samples": FieldSpec("int", 1, 100_000),
    "eps": FieldSpec("float", 0.0, 1e-2, lo_open=True),
    "dim": FieldSpec("int", 1, 4096),
    "theta": _OPEN_UNIT,
    "eta": _OPEN_UNIT,
    "theta0": _UNIT,
    "theta1": _UNIT,
    "p": _EXPONENT,
    "p0": _EXPONENT,
    "p1": _EXPONENT,
    "q": _EXPONENT,
    "q0": _EXPONENT,
    "q1": _EXPONENT,
    "general_q0": _EXPONENT,
    "general_q1": _EXPONENT,
    "weights_count": FieldSpec("int", 1, 100),
    "weight_spread": FieldSpec("float", 0.0, 10.0),
    "weights": FieldSpec("weights"),
    "blocks": FieldSpec("int", 1, 8),
    "block_width": FieldSpec("int", 1, 64),
    "identical": FieldSpec("bool"),
    "space": FieldSpec("choice", choices=("Lp", "WeightedLp", "Lorentz", "Tsirelson2")),
    "n_max": FieldSpec("int", 1, 64),
}

EXPERIMENT_FIELDS: Dict[str, Dict[str, FieldSpec]] = {
    "lorentz-decomposition": {"p0": _FINITE_EXPONENT, "p1": _FINITE_EXPONENT},
    "amalgam-equality": {"p": FieldSpec("exponent", 1.0, INF, lo_open=True, hi_open=True)},
    "aparam-table": {"p": _EXPONENT},
    "scale-predicates": {"p": FieldSpec("exponent", 1.0, INF, lo_open=True, hi_open=True),
                         "q0": _EXPONENT, "q1": _EXPONENT},
}

OPTIONAL_FIELDS: Dict[str, Tuple[str, ...]] = {
    "weighted-trivial": ("weights",),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: Mapping[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.params[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.params.get(key, default)

    @property
    def seed(self) -> int:
        return int(self.params["seed"])

    @property
    def samples(self) -> int:
        return int(self.params["samples"])

    @property
    def solver_samples(self) -> int:
        return int(self.params["solver_samples"])

    @property
    def eps(self) -> float:
        return float(self.params["eps"])

    def as_dict(self) -> Dict[str, Any]:
        return {"experiment": self.experiment, **dict(self.params)}


def _field_spec(experiment: str, name: str) -> FieldSpec:
    return EXPERIMENT_FIELDS.get(experiment, {}).get(name) or FIELD_SPECS[name]


def _coerce(name: str, value: Any, spec: FieldSpec) -> Any:
    """Convierte y valida un valor; lanza ConfigError con el rango permitido."""
    if spec.kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{name} debe ser boolean", field=name)
        return value
    if spec.kind == "choice":
        if value not in spec.choices:
            raise ConfigError(f"{name} debe ser uno de {list(spec.choices)}", field=name)
        return value
    if spec.kind == "weights":
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigError(f"{name} debe ser una lista no vacía de pesos positivos", field=name)
        out = []
        for i, w in enumerate(value):
            try:
                w = float(w)
            except (ValueError, TypeError):
                raise ConfigError(f"{name}[{i}] debe ser numérico", field=name) from None
            if not (w > 0 and math.isfinite(w)):
                raise ConfigError(f"{name}[{i}]={w} debe ser > 0 y finito", field=name)
            out.append(w)
        return out

    if isinstance(value, bool):
        raise ConfigError(f"{name} debe ser numérico", field=name)
    if spec.kind == "exponent" and isinstance(value, str) and value.strip().lower() in ("inf", "∞", "infinity"):
        value = INF
    if spec.kind == "int":
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(f"{name} debe ser entero", field=name)
    else:
        try:
            value = float(value)
        except (ValueError, TypeError):
            raise ConfigError(f"{name} debe ser numérico", field=name) from None
        if math.isnan(value):
            raise ConfigError(f"{name} debe ser numérico", field=name)
    if not spec.contains(value):
        shown = "∞" if value == INF else value
        raise ConfigError(f"{name}={shown} fuera de rango {spec.interval()}", field=name)
    return value


def _parse_yaml(raw_text: str) -> Dict[str, Any]:
    try:
        data = yaml.safe_load(raw_text) if raw_text and raw_text.strip() else {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        problem = getattr(e, "problem", None) or str(e)
        if mark is not None:
            raise ConfigError(
                f"Error de sintaxis en línea {mark.line + 1}, columna {mark.column + 1}: {problem}",
                line=mark.line + 1, column=mark.column + 1,
            ) from e
        raise ConfigError(f"Error de sintaxis: {problem}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("La configuración debe ser un mapeo 'clave: valor'")
    return data


def parse_overrides(items: Optional[Iterable[str]]) -> Dict[str, Any]:
    """Convierte ``key=value`` (valor como escalar YAML) en un diccionario."""
    out: Dict[str, Any] = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"--set espera key=value, recibido '{item}'", field="--set")
        try:
            out[key] = yaml.safe_load(raw) if raw.strip() else ""
        except yaml.YAMLError:
            out[key] = raw
    return out


def _cross_checks(name: str, params: Dict[str, Any]) -> None:
    if name == "lorentz-decomposition" and params["p0"] == params["p1"]:
        raise ConfigError(f"p1={params['p1']} debe ser distinto de p0 (κ no es extraíble)", field="p1")
    if name == "reiteration" and params["theta0"] == params["theta1"]:
        raise ConfigError(f"theta1={params['theta1']} debe ser distinto de theta0", field="theta1")
    if name == "weighted-trivial" and "weights" in params and len(params["weights"]) != params["dim"]:
        raise ConfigError(
            f"weights tiene {len(params['weights'])} entradas y dim={params['dim']}", field="weights"
        )
    if name == "aparam-table" and params["space"] == "Tsirelson2" and params["n_max"] < 2:
        raise ConfigError(f"n_max={params['n_max']} fuera de rango [2, 64] para Tsirelson2", field="n_max")
    if name == "aparam-table" and params["space"] == "Lorentz" and params["p"] == INF:
        raise ConfigError("p=∞ fuera de rango [1, ∞) para Lorentz", field="p")


def build_config(raw_text: str = "", experiment: Optional[str] = None,
                 overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Versión que lanza ConfigError; ``validate_config`` la envuelve en una tupla."""
    data = _parse_yaml(raw_text)
    file_name = data.pop("experiment", None)
    name = experiment or file_name
    if not name:
        raise ConfigError("Falta el nombre del experimento", field="experiment")
    if name not in config.EXPERIMENT_DEFAULTS:
        raise UnknownExperimentError(
            f"experiment='{name}' no registrado; disponibles: {sorted(config.EXPERIMENT_DEFAULTS)}",
            field="experiment",
        )

    params = config.experiment_defaults(name)
    allowed = set(params) | set(OPTIONAL_FIELDS.get(name, ()))
    merged = {**data, **dict(overrides or {})}
    for key in merged:
        if key not in allowed:
            raise ConfigError(f"Campo desconocido '{key}' para {name}; válidos: {sorted(allowed)}", field=key)
    params.update(merged)

    for key in list(params):
        if key.startswith("tol_"):
            params[key] = _coerce(key, params[key], _TOL)
        else:
            params[key] = _coerce(key, params[key], _field_spec(name, key))
    _cross_checks(name, params)
    return ExperimentConfig(name, params)


def validate_config(raw_text: str = "", experiment: Optional[str] = None,
                    overrides: Optional[Mapping[str, Any]] = None) -> Tuple[bool, Optional[ExperimentConfig], str]:
    """
    Valida el texto de configuración (YAML plano) combinado con defaults y overrides.

    Returns:
        (is_valid, config, error_message)
    """
    try:
        return True, build_config(raw_text, experiment, overrides), ""
    except ConfigError as e:
        return False, None, str(e)


def get_validated_config(raw_text: str = "", experiment: Optional[str] = None,
                         overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Obtiene configuración validada o falla con mensaje claro.
    """
    try:
        return build_config(raw_text, experiment, overrides)
    except ConfigError as e:
        raise type(e)(f"Configuración inválida: {e}", field=e.field, line=e.line, column=e.column) from e


def print_config_summary(cfg: ExperimentConfig) -> None:
    """Imprime resumen de configuración activa para diagnóstico"""
    print("=== CONFIGURACIÓN ACTIVA ===")
    print(f"Experimento: {cfg.experiment}")
    print(f"Semilla: {cfg.seed}, muestras={cfg.samples}, muestras con solver={cfg.solver_samples}, eps={cfg.eps:g}")
    common = {"seed", "samples", "solver_samples", "eps"}
    for key in sorted(k for k in cfg.params if k not in common):
        value = cfg.params[key]
        shown = "∞" if value == INF else value
        print(f"  {key}: {shown}")
    print(f"Hilos: {config.threads()}")
    print("=" * 30)


if __name__ == "__main__":
    # Test del validador con los defaults de cada experimento
    for name in sorted(config.EXPERIMENT_DEFAULTS):
        try:
            cfg = get_validated_config(experiment=name)
            print_config_summary(cfg)
            print("✓ Configuración válida")
        except ConfigError as e:
            print(f"❌ {e}")
