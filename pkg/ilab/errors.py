# ilab/errors.py
# Jerarquía de excepciones del laboratorio: errores de forma, de solver y de configuración

from typing import Optional


class IlabError(Exception):
    """Base de todos los errores propios del laboratorio."""


class DimensionMismatchError(IlabError, ValueError):
    """El vector no cabe en el espacio (dimensión, bloque o soporte fuera de rango)."""


class ShapeMismatchError(IlabError, ValueError):
    """Pesos, particiones o listas internas con forma incompatible."""


class SolverConvergenceError(IlabError, RuntimeError):
    """
    El solver no certificó la factorización dentro del límite de barridos.

    Se propaga hasta el CLI, que marca el reporte como FAILED-CERTIFICATION
    en lugar de imprimir un valor sin certificar.
    """

    def __init__(self, message: str, sweeps: int = 0, residual: float = float("nan"), eps: float = float("nan")):
        super().__init__(message)
        self.sweeps = sweeps
        self.residual = residual
        self.eps = eps


class ConfigError(IlabError, ValueError):
    """Configuración inválida; `field` nombra el primer campo problemático."""

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.field = field
        self.line = line
        self.column = column


class UnknownExperimentError(ConfigError):
    """Nombre de experimento no registrado."""
