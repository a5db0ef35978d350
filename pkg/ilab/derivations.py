# ilab/derivations.py
# Derivaciones (centralizadores) de escalas de interpolación y cuasi-norma del espacio derivado

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

from .errors import ShapeMismatchError
from .interpolate import DEFAULT_EPS, CoupleSpec, interpolated_exponent, numerical_derivation
from .spaces import (
    INF, Amalgam, Convexified, Lorentz, Lp, Partition, SpaceSpec,
    as_vector, norm, restrict,
)

logger = logging.getLogger(__name__)

# Orientación: todas las fórmulas cerradas siguen Ω(x) = x·log(a1/a0), la misma que
# numerical_derivation. Con ella la escala ℓp tiene derivación (p/p0 − p/p1)·𝒦.


def _inv(p: float) -> float:
    return 0.0 if p == INF else 1.0 / p


# ══════════════════════════════════════════════════════════════════════════════
# TIPOS DE DERIVACIÓN
# ══════════════════════════════════════════════════════════════════════════════

class Derivation(ABC):
    """Aplicación homogénea evaluable sobre vectores: ``omega(x)``."""

    @property
    def diagonal(self) -> Optional[np.ndarray]:
        """Multiplicador f si la derivación es exactamente x ↦ f·x; None en otro caso."""
        return None

    @property
    def label(self) -> str:
        return type(self).__name__

    @abstractmethod
    def apply(self, x: np.ndarray) -> np.ndarray:
        ...

    def __call__(self, x) -> np.ndarray:
        return self.apply(as_vector(x))


@dataclass(frozen=True)
class KaltonPeck(Derivation):
    coeff: float = 1.0
    space: SpaceSpec = Lp(2)

    @property
    def label(self) -> str:
        return f"{self.coeff:g}·K[{self.space.label}]"

    def apply(self, x: np.ndarray) -> np.ndarray:
        return kalton_peck(x, self.space, self.coeff)


@dataclass(frozen=True)
class LinearDiagonal(Derivation):
    f: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(float(v) for v in np.ravel(self.f)))

    @cached_property
    def diagonal(self) -> np.ndarray:
        return np.asarray(self.f)

    @property
    def label(self) -> str:
        return f"LinearDiagonal(dim={len(self.f)})"

    def apply(self, x: np.ndarray) -> np.ndarray:
        f = self.diagonal
        if x.size > f.size and np.any(x[f.size:]):
            raise ShapeMismatchError(f"LinearDiagonal de dimensión {f.size} aplicado a soporte mayor")
        out = np.zeros_like(x)
        n = min(x.size, f.size)
        out[:n] = f[:n] * x[:n]
        return out


@dataclass(frozen=True)
class Scaled(Derivation):
    base: Derivation
    coeff: float

    @property
    def diagonal(self) -> Optional[np.ndarray]:
        f = self.base.diagonal
        return None if f is None else self.coeff * f

    @property
    def label(self) -> str:
        return f"{self.coeff:g}·{self.base.label}"

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.coeff == 0.0:
            return np.zeros_like(x)
        return self.coeff * self.base.apply(x)


@dataclass(frozen=True)
class Numerical(Derivation):
    couple: CoupleSpec
    eps: float = DEFAULT_EPS

    @property
    def label(self) -> str:
        return f"Numerical{self.couple.label}"

    def apply(self, x: np.ndarray) -> np.ndarray:
        return numerical_derivation(self.couple, x, self.eps)


@dataclass(frozen=True)
class Fragmented(Derivation):
    """Pegado de fragmentos: x ↦ Σ_n 1_{A_n} Ω(1_{A_n} x)."""
    base: Derivation
    partition: Partition

    @property
    def label(self) -> str:
        return f"Fragmented({self.base.label}, {len(self.partition)} bloques)"

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for block in self.partition:
            out += fragment_derivation(self.base, block, x)
        return out


@dataclass(frozen=True)
class Blockwise(Derivation):
    """Escala fragmentada con una derivación propia por bloque: x ↦ Σ_n 1_{A_n} Ω_n(1_{A_n} x)."""
    pieces: Tuple[Derivation, ...]
    partition: Partition

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if len(self.pieces) != len(self.partition):
            raise ShapeMismatchError(
                f"Blockwise: {len(self.pieces)} derivaciones para {len(self.partition)} bloques"
            )

    @property
    def label(self) -> str:
        return f"Blockwise({len(self.pieces)} bloques)"

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for omega, block in zip(self.pieces, self.partition):
            out += fragment_derivation(omega, block, x)
        return out


@dataclass(frozen=True)
class AmalgamPhi(Derivation):
    p0: float
    p1: float
    theta: float
    partition: Partition
    inner: Tuple[Derivation, ...]
    inner_spaces: Tuple[SpaceSpec, ...]
    outer: SpaceSpec = Lp(1)

    def __post_init__(self):
        object.__setattr__(self, "inner", tuple(self.inner))
        object.__setattr__(self, "inner_spaces", tuple(self.inner_spaces))

    @property
    def label(self) -> str:
        return f"AmalgamPhi(p0={self.p0:g}, p1={self.p1:g}, θ={self.theta:g})"

    def apply(self, x: np.ndarray) -> np.ndarray:
        return amalgam_phi(x, self.partition, self.p0, self.p1, self.theta,
                           self.inner, self.inner_spaces, self.outer)


@dataclass(frozen=True)
class KaltonMapNumeric(Derivation):
    p0: float
    p1: float
    q: float
    theta: float
    eps: float = DEFAULT_EPS

    @property
    def label(self) -> str:
        return f"kappa(p0={self.p0:g}, p1={self.p1:g}, q={self.q:g})"

    def apply(self, x: np.ndarray) -> np.ndarray:
        return kalton_map_numeric(x, self.p0, self.p1, self.q, self.theta, self.eps)


@dataclass(frozen=True)
class LorentzComposite(Derivation):
    p0: float
    q0: float
    p1: float
    q1: float
    theta: float
    kappa: Optional[Derivation] = None

    @property
    def label(self) -> str:
        return f"LorentzComposite(({self.p0:g},{self.q0:g}), ({self.p1:g},{self.q1:g}), θ={self.theta:g})"

    def apply(self, x: np.ndarray) -> np.ndarray:
        return lorentz_derivation(x, self.p0, self.q0, self.p1, self.q1, self.theta, self.kappa)


# ══════════════════════════════════════════════════════════════════════════════
# FÓRMULAS CERRADAS
# ══════════════════════════════════════════════════════════════════════════════

def kalton_peck(x, space: SpaceSpec = Lp(2), coeff: float = 1.0) -> np.ndarray:
    """𝒦(x) = coeff·x·log(‖x‖/|x|) en el soporte; 0 fuera de él y para x = 0."""
    x = as_vector(x)
    a = np.abs(x)
    if not a.any():
        return np.zeros_like(x)
    nx = norm(space, x)
    return coeff * np.sign(x) * (xlogy(a, nx) - xlogy(a, a))


def lp_scale_coefficient(p0: float, p1: float, theta: float) -> float:
    p = interpolated_exponent(p0, p1, theta)
    if p == INF:
        return 0.0
    return p * (_inv(p0) - _inv(p1))


def lp_scale_derivation(p0: float, p1: float, theta: float) -> KaltonPeck:
    """Derivación de (ℓ_p0, ℓ_p1)_θ: (p/p0 − p/p1)·𝒦 sobre ℓ_p."""
    return KaltonPeck(lp_scale_coefficient(p0, p1, theta), Lp(interpolated_exponent(p0, p1, theta)))


def weighted_derivation(w0, w1, p: float) -> LinearDiagonal:
    """Derivación lineal de (ℓp(ω0), ℓp(ω1)): x ↦ −(1/p)·x·log(ω1/ω0)."""
    w0 = np.asarray(w0, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    return LinearDiagonal(tuple(-np.log(w1 / w0) / p))


def amalgam_phi(a, partition: Partition, p0: float, p1: float, theta: float,
                inner: Sequence[Derivation], inner_spaces: Sequence[SpaceSpec],
                outer: SpaceSpec = Lp(1)) -> np.ndarray:
    """
    Φ_θ(a) = (p/p1 − p/p0) Σ_n a_n log(‖a_n‖/‖a‖) e_n + Σ_n Ω_θ(a_n) e_n

    con ‖a_n‖ en el espacio interno interpolado, ‖a‖ en λ_p(X_θ) y cada Ω_θ aplicado en
    las coordenadas locales de su bloque. Los bloques nulos aportan 0.
    """
    a = as_vector(a)
    if len(inner) != len(partition) or len(inner_spaces) != len(partition):
        raise ShapeMismatchError(
            f"Φ_θ: {len(inner)} derivaciones y {len(inner_spaces)} espacios para {len(partition)} bloques"
        )
    p = interpolated_exponent(p0, p1, theta)
    if p == INF:
        raise ValueError("Φ_θ requiere p finito")
    amalgam = Amalgam(Convexified(outer, p), tuple(inner_spaces), partition)
    try:
        amalgam.check(a)
    except ValueError as exc:
        raise ShapeMismatchError(f"Φ_θ: disposición de bloques incompatible ({exc})") from exc

    padded = np.zeros(max(a.size, partition.size))
    padded[:a.size] = a
    out = np.zeros_like(padded)
    total = amalgam.evaluate(padded)
    if total == 0.0:
        return out[:a.size]
    coeff = p * _inv(p1) - p * _inv(p0)
    for omega, X, block in zip(inner, inner_spaces, partition):
        idx = np.asarray(block)
        an = padded[idx]
        nn = X.evaluate(an)
        if nn == 0.0:
            continue
        out[idx] += coeff * an * math.log(nn / total) + omega(an)
    return out[:a.size]


def fragment_derivation(base: Derivation, A: Sequence[int], x) -> np.ndarray:
    """Ω_A(x) = 1_A Ω(1_A x)."""
    x = as_vector(x)
    xa = restrict(x, A)
    if not xa.any():
        return np.zeros_like(x)
    return restrict(base.apply(xa), A)


def kalton_map_numeric(x, p0: float, p1: float, q: float, theta: float,
                       eps: float = DEFAULT_EPS) -> np.ndarray:
    """
    κ extraído de la pareja (ℓ_{p0,q}, ℓ_{p1,q}): Ω_num / (−(1/p0 − 1/p1)).
    Sólo tiene sentido salvo aplicaciones acotadas.
    """
    if p0 == p1:
        raise ValueError("kalton_map_numeric requiere p0 != p1")
    couple = CoupleSpec(Lorentz(p0, q), Lorentz(p1, q), theta)
    return numerical_derivation(couple, x, eps) / (-(_inv(p0) - _inv(p1)))


def lorentz_coefficients(p0: float, q0: float, p1: float, q1: float, theta: float) -> Tuple[float, float]:
    """(coeficiente de 𝒦, coeficiente de κ) de la derivación de (ℓ_{p0,q0}, ℓ_{p1,q1})_θ."""
    p = interpolated_exponent(p0, p1, theta)
    q = interpolated_exponent(q0, q1, theta)
    dq = _inv(q0) - _inv(q1)
    k_coeff = 0.0 if dq == 0.0 else q * dq
    kappa_coeff = (0.0 if dq == 0.0 else (q / p) * dq) - (_inv(p0) - _inv(p1))
    return k_coeff, kappa_coeff


def lorentz_derivation(x, p0: float, q0: float, p1: float, q1: float, theta: float,
                       kappa_source: Optional[Derivation] = None) -> np.ndarray:
    """q(1/q0 − 1/q1)·𝒦_{ℓ_{p,q}}(x) + (q/p(1/q0 − 1/q1) − (1/p0 − 1/p1))·κ(x)."""
    x = as_vector(x)
    p = interpolated_exponent(p0, p1, theta)
    q = interpolated_exponent(q0, q1, theta)
    k_coeff, kappa_coeff = lorentz_coefficients(p0, q0, p1, q1, theta)
    out = np.zeros_like(x)
    if k_coeff != 0.0:
        out += kalton_peck(x, Lorentz(p, q), k_coeff)
    if kappa_coeff != 0.0:
        if kappa_source is None:
            raise ValueError("lorentz_derivation necesita kappa_source: el coeficiente de κ no se anula")
        out += kappa_coeff * kappa_source(x)
    return out


def lorentz_kappa_source(p0: float, p1: float, q0: float, q1: float, theta: float,
                         eps: float = DEFAULT_EPS) -> KaltonMapNumeric:
    """κ para la escala de Lorentz: pareja con q fijo igual al q interpolado."""
    if p0 == p1:
        raise ValueError("κ no es extraíble con p0 == p1")
    return KaltonMapNumeric(p0, p1, interpolated_exponent(q0, q1, theta), theta, eps)


# ══════════════════════════════════════════════════════════════════════════════
# ESPACIO DERIVADO
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class DerivedVector:
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        y, z = as_vector(self.y), as_vector(self.z)
        if y.shape != z.shape:
            raise ShapeMismatchError(f"DerivedVector: y{y.shape} y z{z.shape} con formas distintas")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def __add__(self, other: "DerivedVector") -> "DerivedVector":
        return DerivedVector(self.y + other.y, self.z + other.z)

    def scaled(self, c: float) -> "DerivedVector":
        return DerivedVector(c * self.y, c * self.z)


def derived_norm(omega: Derivation, v: DerivedVector, space: SpaceSpec) -> float:
    """‖(y, z)‖ = ‖y − Ω(z)‖ + ‖z‖ en el espacio X_θ dado."""
    return norm(space, v.y - omega(v.z)) + norm(space, v.z)
