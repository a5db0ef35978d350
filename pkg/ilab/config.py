"""
Configuración del laboratorio.
Defaults del módulo con opción de sobrescribir parámetros desde config.yaml
(raíz del repositorio, o la ruta indicada en ILAB_CONFIG).
"""

import copy
import logging
import math
import os

import yaml

logger = logging.getLogger(__name__)

SEED = 0
OUTPUT_DIR = "results"
THREADS = 1
EPS = 1e-6
MAX_SWEEPS = 100_000
DUAL_BUDGET = 500
DUAL_RESTARTS = 16
SAMPLES = 2000
SOLVER_SAMPLES = 48
DIM = 64
APARAM_BUDGET = 100
APARAM_MAX_WIDTH = 4

INF = math.inf

EXPERIMENT_DEFAULTS = {
    "lp-family": {
        "p0": 1.0, "p1": INF, "theta": 0.5, "dim": 16,
        "tol_norm": 1e-4, "tol_derivation": 0.05,
    },
    "weighted-trivial": {
        "p": 2.0, "theta": 0.5, "dim": 32, "weights_count": 5, "weight_spread": 1.0,
        "tol_gap": 1e-3, "tol_norm": 1e-4,
    },
    "lorentz-decomposition": {
        "p0": 2.0, "q0": 2.0, "p1": 4.0, "q1": 4.0, "theta": 0.5, "dim": 12,
        "general_q0": 3.0, "general_q1": 2.0,
        "tol_derivation": 0.05, "tol_derivation_general": 0.1,
    },
    "fragmented-kp": {
        "blocks": 6, "tol_diagonal": 0.1,
    },
    "weak-hilbert": {
        "blocks": 5, "tol_norm": 1e-3, "tol_gap": 0.05,
    },
    "amalgam-equality": {
        "p": 4.0, "blocks": 4, "block_width": 4, "identical": False,
        "tol_norm": 1e-3, "tol_derivation": 0.1,
    },
    "reiteration": {
        "p0": 1.0, "p1": INF, "theta0": 0.25, "theta1": 0.75, "eta": 0.5, "dim": 32,
        "tol_derivation": 0.1,
    },
    "aparam-table": {
        "space": "Lp", "p": 2.0, "q": 4.0, "n_max": 8, "weight_spread": 1.0,
        "tol_aparam": 1e-6,
    },
    "scale-predicates": {
        "p": 1.5, "q0": 2.0, "q1": 4.0, "n_max": 16, "weight_spread": 1.0,
        "tol_exponent": 0.05,
    },
}

# Cargar overrides desde config.yaml si existe
_CONFIG_PATH = os.environ.get(
    "ILAB_CONFIG", os.path.join(os.path.dirname(os.path.dirname(__file__)), "config.yaml")
)


def _load_overrides():
    if not os.path.exists(_CONFIG_PATH):
        return {}
    with open(_CONFIG_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


_OVERRIDES = _load_overrides()


def _apply_override(section, name, default):
    values = _OVERRIDES.get(section, {}) or {}
    if name in values:
        return type(default)(values[name])
    return default


SEED = _apply_override("general", "seed", SEED)
OUTPUT_DIR = _apply_override("general", "output_dir", OUTPUT_DIR)
THREADS = _apply_override("general", "threads", THREADS)
EPS = _apply_override("solver", "eps", EPS)
MAX_SWEEPS = _apply_override("solver", "max_sweeps", MAX_SWEEPS)
DUAL_BUDGET = _apply_override("dual", "budget", DUAL_BUDGET)
DUAL_RESTARTS = _apply_override("dual", "restarts", DUAL_RESTARTS)
SAMPLES = _apply_override("sampling", "samples", SAMPLES)
SOLVER_SAMPLES = _apply_override("sampling", "solver_samples", SOLVER_SAMPLES)
DIM = _apply_override("sampling", "dim", DIM)
APARAM_BUDGET = _apply_override("aparam", "budget", APARAM_BUDGET)
APARAM_MAX_WIDTH = _apply_override("aparam", "max_width", APARAM_MAX_WIDTH)

for _name, _section in (_OVERRIDES.get("experiments", {}) or {}).items():
    if _name in EXPERIMENT_DEFAULTS and isinstance(_section, dict):
        for _key, _value in _section.items():
            if _key in EXPERIMENT_DEFAULTS[_name]:
                EXPERIMENT_DEFAULTS[_name][_key] = _value


def experiment_defaults(name):
    """Parámetros por defecto de un experimento más los comunes (seed, samples, eps...)."""
    params = {
        "seed": SEED,
        "samples": SAMPLES,
        "solver_samples": SOLVER_SAMPLES,
        "eps": EPS,
    }
    params.update(copy.deepcopy(EXPERIMENT_DEFAULTS[name]))
    return params


def threads():
    """Hilos de diagnóstico: ILAB_THREADS si está definida, si no general.threads (mínimo 1)."""
    raw = os.environ.get("ILAB_THREADS", "").strip()
    if not raw:
        return max(1, THREADS)
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ILAB_THREADS=%r no es un entero; se usa 1 hilo", raw)
        return 1
