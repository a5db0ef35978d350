# ilab/spaces.py
# Núcleos de norma para espacios de sucesiones de dimensión finita:
# ℓp, ℓp con pesos, Lorentz, Tsirelson, convexificaciones, amalgamas, bloques y duales.
"""
Modelo de datos de vectores y espacios.

Convenciones:
    - Un vector es un ``numpy.ndarray`` 1-D de float64. La posición ``i`` (base 0)
      guarda la coordenada ``i+1`` de la sucesión; los conjuntos de índices de la API
      son tuplas de enteros en base 0.
    - Todas las normas son 1-incondicionales: sólo dependen de ``|x|``.
    - Ninguna función modifica sus argumentos; ``as_vector`` devuelve copias de sólo lectura.
    - ``norming(a)`` da un funcional normante de a ≥ 0 (subgradiente de la norma) y
      ``dual_bound(b)`` una cota superior de la norma dual; ambos devuelven None cuando
      el tipo de espacio no tiene fórmula.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatchError, ShapeMismatchError

logger = logging.getLogger(__name__)

INF = math.inf


# ══════════════════════════════════════════════════════════════════════════════
# VECTORES E ÍNDICES
# ══════════════════════════════════════════════════════════════════════════════

def as_vector(x) -> np.ndarray:
    """Copia ``x`` como vector float64 validado (1-D, dim ≥ 1, entradas finitas), de sólo lectura."""
    arr = np.array(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"Se esperaba un vector 1-D, recibido ndim={arr.ndim}")
    if arr.size == 0:
        raise ValueError("El vector debe tener dimensión ≥ 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("El vector contiene entradas no finitas")
    arr.flags.writeable = False
    return arr


def support(x) -> np.ndarray:
    """Índices (base 0) de las coordenadas no nulas; el cero se compara de forma exacta."""
    return np.flatnonzero(np.asarray(x))


def index_array(A: Iterable[int]) -> np.ndarray:
    idx = np.unique(np.asarray(list(A), dtype=int))
    if idx.size and idx[0] < 0:
        raise ValueError(f"Índices negativos no permitidos: {idx[idx < 0].tolist()}")
    return idx


def restrict(x, A: Iterable[int]) -> np.ndarray:
    """Devuelve 1_A·x. Los índices de A fuera de la dimensión de x se ignoran."""
    x = as_vector(x)
    idx = index_array(A)
    idx = idx[idx < x.size]
    out = np.zeros_like(x)
    out[idx] = x[idx]
    return out


def basis_vector(i: int, dim: int) -> np.ndarray:
    e = np.zeros(dim)
    e[i] = 1.0
    return e


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _check_exponent(name: str, value: float, allow_inf: bool = True) -> None:
    if math.isnan(value) or value < 1 or (value == INF and not allow_inf):
        rango = "[1, ∞]" if allow_inf else "[1, ∞)"
        raise ValueError(f"{name}={value} fuera de rango {rango}")


def _pad(x: np.ndarray, dim: int) -> np.ndarray:
    if x.size >= dim:
        return x
    out = np.zeros(dim)
    out[:x.size] = x
    return out


def _lp_norm(x: np.ndarray, p: float) -> float:
    a = np.abs(x)
    m = a.max() if a.size else 0.0
    if m == 0.0:
        return 0.0
    if p == INF:
        return float(m)
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def _lp_norming(a: np.ndarray, p: float) -> np.ndarray:
    b = np.zeros_like(a)
    if p == 1:
        b[:] = 1.0
    elif p == INF:
        b[int(np.argmax(a))] = 1.0
    else:
        b = (a / _lp_norm(a, p)) ** (p - 1.0)
    return b


# ══════════════════════════════════════════════════════════════════════════════
# PARTICIONES
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Partition:
    """
    Lista ordenada de bloques disjuntos A_1 < A_2 < ... (índices base 0).

    ``complete`` indica que los bloques cubren un segmento inicial 0..N-1.
    """
    blocks: Tuple[Tuple[int, ...], ...]
    complete: bool = False

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in sorted(set(b))) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ShapeMismatchError("La partición necesita al menos un bloque")
        prev = -1
        for k, b in enumerate(blocks):
            if not b:
                raise ShapeMismatchError(f"Bloque {k} vacío")
            if b[0] <= prev:
                raise ShapeMismatchError(f"Bloque {k} no es posterior al bloque {k - 1}")
            prev = b[-1]
        if self.complete and sum(len(b) for b in blocks) != blocks[-1][-1] + 1:
            raise ShapeMismatchError("Partición marcada completa pero no cubre un segmento inicial")

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        return iter(self.blocks)

    def __getitem__(self, k: int) -> Tuple[int, ...]:
        return self.blocks[k]

    @property
    def size(self) -> int:
        """Dimensión ambiente mínima que contiene todos los bloques."""
        return self.blocks[-1][-1] + 1

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def union(self) -> np.ndarray:
        return np.concatenate([np.asarray(b) for b in self.blocks])


def dyadic_block(n: int) -> Tuple[int, ...]:
    """A_n = {2^(n-1), ..., 2^n - 1} en base 1, devuelto en base 0."""
    if n < 1:
        raise ValueError(f"n={n} fuera de rango [1, ∞)")
    return tuple(range(2 ** (n - 1) - 1, 2 ** n - 1))


def dyadic_partition(n_blocks: int, first: int = 1) -> Partition:
    """Bloques diádicos A_first, ..., A_(first+n_blocks-1)."""
    if n_blocks < 1:
        raise ValueError(f"n_blocks={n_blocks} fuera de rango [1, ∞)")
    blocks = tuple(dyadic_block(n) for n in range(first, first + n_blocks))
    return Partition(blocks, complete=(first == 1))


def uniform_partition(n_blocks: int, width: int, offset: int = 0) -> Partition:
    if n_blocks < 1 or width < 1:
        raise ValueError(f"n_blocks={n_blocks}, width={width} deben ser ≥ 1")
    blocks = tuple(tuple(range(offset + k * width, offset + (k + 1) * width)) for k in range(n_blocks))
    return Partition(blocks, complete=(offset == 0))


# ══════════════════════════════════════════════════════════════════════════════
# ESPACIOS
# ══════════════════════════════════════════════════════════════════════════════

class SpaceSpec(ABC):
    """Descripción inmutable de una norma. Cada tipo implementa ``evaluate``."""

    @property
    def max_dim(self) -> Optional[int]:
        return None

    @property
    def label(self) -> str:
        return type(self).__name__

    def check(self, x: np.ndarray) -> None:
        bound = self.max_dim
        if bound is not None and x.size > bound and np.any(x[bound:]):
            raise DimensionMismatchError(
                f"{self.label}: vector con soporte fuera de la dimensión {bound} (dim={x.size})"
            )

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> float:
        """Norma sin validación; ``x`` ya es un vector válido para este espacio."""

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        """
        Funcional normante de ``a`` ≥ 0 no nulo: b ≥ 0 con ⟨a, b⟩ = ‖a‖ y ‖b‖_* ≤ 1,
        es decir, un subgradiente de la norma en ``a``. None si no hay fórmula.
        """
        return None

    def dual_bound(self, b: np.ndarray) -> Optional[float]:
        """Cota superior de ‖b‖_* (exacta en las formas cerradas); None si no se conoce."""
        if not np.any(b):
            return 0.0
        closed = _dual_closed_form(self, np.abs(b))
        return None if closed is None else float(closed[0])


@dataclass(frozen=True)
class Lp(SpaceSpec):
    p: float

    def __post_init__(self):
        _check_exponent("p", self.p)

    @property
    def label(self) -> str:
        return f"Lp({_fmt(self.p)})"

    def evaluate(self, x: np.ndarray) -> float:
        return _lp_norm(x, self.p)

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        return _lp_norming(a, self.p)


@dataclass(frozen=True)
class WeightedLp(SpaceSpec):
    """ℓp(ω): ‖y‖ = (Σ |y_i|^p ω_i)^(1/p); para p = ∞ se usa sup |y_i| ω_i."""
    p: float
    weight: Tuple[float, ...]

    def __post_init__(self):
        _check_exponent("p", self.p)
        w = tuple(float(v) for v in np.ravel(self.weight))
        if not w:
            raise ShapeMismatchError("El peso necesita al menos una entrada")
        if not all(math.isfinite(v) and v > 0 for v in w):
            raise ValueError("Los pesos deben ser estrictamente positivos y finitos")
        object.__setattr__(self, "weight", w)

    @cached_property
    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weight)

    @property
    def max_dim(self) -> Optional[int]:
        return len(self.weight)

    @property
    def label(self) -> str:
        return f"WeightedLp({_fmt(self.p)}, dim={len(self.weight)})"

    def evaluate(self, x: np.ndarray) -> float:
        w = self.weights_array[:x.size]
        a = np.abs(x[:w.size])
        if self.p == INF:
            return float(np.max(a * w))
        return _lp_norm(a * w ** (1.0 / self.p), self.p)

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        w = self.weights_array[:a.size]
        b = np.zeros_like(a)
        if self.p == INF:
            j = int(np.argmax(a[:w.size] * w))
            b[j] = w[j]
            return b
        scale = w ** (1.0 / self.p)
        b[:w.size] = scale * _lp_norming(a[:w.size] * scale, self.p)
        return b


@dataclass(frozen=True)
class Lorentz(SpaceSpec):
    """
    ℓ_{p,q} con la constante exterior p/q:
        ‖x‖ = (p/q) (Σ x*(n)^q (n^{q/p} − (n−1)^{q/p}))^{1/q},   ‖x‖_{p,∞} = sup n^{1/p} x*(n).
    Con esta normalización ‖e_1‖_{p,q} = p/q.
    """
    p: float
    q: float

    def __post_init__(self):
        _check_exponent("p", self.p, allow_inf=False)
        _check_exponent("q", self.q)

    @property
    def label(self) -> str:
        return f"Lorentz({_fmt(self.p)},{_fmt(self.q)})"

    def evaluate(self, x: np.ndarray) -> float:
        a = np.sort(np.abs(x))[::-1]
        if a[0] == 0.0:
            return 0.0
        n = np.arange(1, a.size + 1, dtype=float)
        if self.q == INF:
            return float(np.max(n ** (1.0 / self.p) * a))
        r = self.q / self.p
        w = n ** r - (n - 1.0) ** r
        m = a[0]
        return float((self.p / self.q) * m * np.sum((a / m) ** self.q * w) ** (1.0 / self.q))

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        # gradiente con el orden decreciente fijado; en los empates es un gradiente lateral
        order = np.argsort(-a, kind="stable")
        u = a[order]
        n = np.arange(1, a.size + 1, dtype=float)
        b = np.zeros_like(a)
        if self.q == INF:
            j = int(np.argmax(n ** (1.0 / self.p) * u))
            b[order[j]] = (j + 1.0) ** (1.0 / self.p)
            return b
        r = self.q / self.p
        w = n ** r - (n - 1.0) ** r
        u = u / u[0]
        total = np.sum(u ** self.q * w)
        b[order] = (self.p / self.q) * total ** (1.0 / self.q - 1.0) * u ** (self.q - 1.0) * w
        return b


@dataclass(frozen=True)
class TsirelsonT(SpaceSpec):
    tol: float = 1e-12

    @property
    def label(self) -> str:
        return "TsirelsonT"

    def evaluate(self, x: np.ndarray) -> float:
        return tsirelson_norm(x, self.tol)

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        return _tsirelson_norming(a, squared=False)


@dataclass(frozen=True)
class Tsirelson2(SpaceSpec):
    """2-convexificación de Tsirelson: ‖x‖ = ‖x²‖_T^{1/2}."""
    tol: float = 1e-12

    @property
    def label(self) -> str:
        return "Tsirelson2"

    def evaluate(self, x: np.ndarray) -> float:
        return math.sqrt(tsirelson_norm(x * x, self.tol))

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        return _tsirelson_norming(a, squared=True)


@dataclass(frozen=True)
class Convexified(SpaceSpec):
    """p-convexificación λ_p: ‖x‖ = ‖|x|^p‖_λ^{1/p}."""
    base: SpaceSpec
    p: float

    def __post_init__(self):
        _check_exponent("p", self.p, allow_inf=False)

    @property
    def max_dim(self) -> Optional[int]:
        return self.base.max_dim

    @property
    def label(self) -> str:
        return f"Convexified({self.base.label},{_fmt(self.p)})"

    def evaluate(self, x: np.ndarray) -> float:
        a = np.abs(x)
        m = a.max()
        if m == 0.0:
            return 0.0
        return float(m * self.base.evaluate((a / m) ** self.p) ** (1.0 / self.p))

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        # regla de la cadena: ‖a‖ = ‖u‖_λ^{1/p} con u = (a/m)^p salvo el factor m
        m = a.max()
        u = (a / m) ** self.p
        inner = self.base.norming(u)
        if inner is None:
            return None
        value = self.base.evaluate(u)
        return value ** (1.0 / self.p - 1.0) * inner * (a / m) ** (self.p - 1.0)


@dataclass(frozen=True)
class Amalgam(SpaceSpec):
    """λ(X_n): ‖(x_n)‖ = ‖Σ ‖x_n‖_{X_n} e_n‖_λ, cada x_n en coordenadas locales de su bloque."""
    outer: SpaceSpec
    inner: Tuple[SpaceSpec, ...]
    partition: Partition

    def __post_init__(self):
        inner = tuple(self.inner)
        object.__setattr__(self, "inner", inner)
        if len(inner) != len(self.partition):
            raise ShapeMismatchError(
                f"Amalgam: {len(inner)} espacios internos para {len(self.partition)} bloques"
            )
        bound = self.outer.max_dim
        if bound is not None and bound < len(self.partition):
            raise ShapeMismatchError(f"Amalgam: espacio exterior de dimensión {bound} < {len(self.partition)} bloques")
        for X, block in zip(inner, self.partition):
            if X.max_dim is not None and X.max_dim < len(block):
                raise ShapeMismatchError(f"Amalgam: {X.label} no admite un bloque de tamaño {len(block)}")

    @property
    def max_dim(self) -> Optional[int]:
        return self.partition.size

    @property
    def label(self) -> str:
        return f"Amalgam({self.outer.label}, {len(self.inner)} bloques)"

    @cached_property
    def block_indices(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.asarray(b) for b in self.partition)

    def check(self, x: np.ndarray) -> None:
        super().check(x)
        mask = np.ones(x.size, dtype=bool)
        covered = self.partition.union()
        mask[covered[covered < x.size]] = False
        if np.any(x[mask]):
            raise DimensionMismatchError(f"{self.label}: soporte fuera de los bloques de la partición")

    def block_norms(self, x: np.ndarray) -> np.ndarray:
        xx = _pad(x, self.partition.size)
        return np.array([X.evaluate(xx[idx]) for X, idx in zip(self.inner, self.block_indices)])

    def evaluate(self, x: np.ndarray) -> float:
        return self.outer.evaluate(self.block_norms(x))

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        aa = _pad(a, self.partition.size)
        beta = self.block_norms(aa)
        outer = self.outer.norming(beta)
        if outer is None:
            return None
        b = np.zeros_like(aa)
        for k, (X, idx) in enumerate(zip(self.inner, self.block_indices)):
            if beta[k] == 0.0:
                continue
            inner = X.norming(aa[idx])
            if inner is None:
                return None
            b[idx] = outer[k] * inner
        return b[:a.size]

    def dual_bound(self, b: np.ndarray) -> Optional[float]:
        # el dual de λ(X_n) es λ*(X_n*)
        bb = _pad(np.abs(b), self.partition.size)
        inner = [X.dual_bound(bb[idx]) for X, idx in zip(self.inner, self.block_indices)]
        if any(v is None for v in inner):
            return None
        return self.outer.dual_bound(np.asarray(inner, dtype=float))


@dataclass(frozen=True)
class Restricted(SpaceSpec):
    """L(A): ‖x‖_{L(A)} = ‖1_A x‖_L para x con soporte en A."""
    base: SpaceSpec
    block: Tuple[int, ...]

    def __post_init__(self):
        block = tuple(int(i) for i in index_array(self.block))
        if not block:
            raise ShapeMismatchError("Restricted: bloque vacío")
        object.__setattr__(self, "block", block)

    @cached_property
    def block_array(self) -> np.ndarray:
        return np.asarray(self.block)

    @property
    def max_dim(self) -> Optional[int]:
        return self.base.max_dim

    @property
    def label(self) -> str:
        return f"Restricted({self.base.label}, [{self.block[0] + 1}..{self.block[-1] + 1}])"

    def check(self, x: np.ndarray) -> None:
        super().check(x)
        outside = np.setdiff1d(support(x), self.block_array)
        if outside.size:
            raise DimensionMismatchError(
                f"{self.label}: soporte fuera del bloque en índices {(outside + 1).tolist()[:8]}"
            )

    def evaluate(self, x: np.ndarray) -> float:
        return self.base.evaluate(self._on_block(x))

    def _on_block(self, x: np.ndarray) -> np.ndarray:
        xx = np.zeros_like(x)
        idx = self.block_array[self.block_array < x.size]
        xx[idx] = x[idx]
        return xx

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        inner = self.base.norming(self._on_block(a))
        return None if inner is None else self._on_block(inner)

    def dual_bound(self, b: np.ndarray) -> Optional[float]:
        if not np.any(b):
            return 0.0
        closed = _dual_closed_form(self, np.abs(b))
        if closed is not None:
            return float(closed[0])
        return self.base.dual_bound(self._on_block(np.abs(b)))


@dataclass(frozen=True)
class DualOf(SpaceSpec):
    """Norma dual respecto del emparejamiento canónico ⟨x, y⟩ = Σ x_i y_i."""
    base: SpaceSpec
    budget: int = 500
    restarts: int = 16
    seed: int = 0

    @property
    def max_dim(self) -> Optional[int]:
        return self.base.max_dim

    @property
    def label(self) -> str:
        return f"DualOf({self.base.label})"

    def check(self, x: np.ndarray) -> None:
        self.base.check(x)

    def evaluate(self, x: np.ndarray) -> float:
        return _dual(self.base, x, self.budget, self.seed, self.restarts).value

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        # testigo del supremo: ‖w‖_base = 1 y ⟨a, w⟩ = ‖a‖_*
        return np.abs(_dual(self.base, a, self.budget, self.seed, self.restarts).witness)

    def dual_bound(self, b: np.ndarray) -> Optional[float]:
        # el bidual nunca supera la norma de partida; sólo vale si evaluate es exacta
        a = np.abs(b)
        if not a.any():
            return 0.0
        if _dual_closed_form(self.base, a) is None:
            return None
        return float(self.base.evaluate(a))


def _fmt(v: float) -> str:
    return "inf" if v == INF else f"{v:g}"


def norm(space: SpaceSpec, x) -> float:
    """Norma de ``x`` en ``space``; valida dimensión y soporte antes de evaluar."""
    x = as_vector(x)
    space.check(x)
    return float(space.evaluate(x))


# ══════════════════════════════════════════════════════════════════════════════
# TSIRELSON
# ══════════════════════════════════════════════════════════════════════════════

def tsirelson_norm(x, tol: float = 1e-12) -> float:
    """
    Norma de Tsirelson por iteración de punto fijo

        ν_{k+1}(x) = max(‖x‖_∞, ½ sup Σ_j ν_k(E_j x)),   n ≤ E_1 < ... < E_n,

    con familias de intervalos resueltas por programación dinámica sobre los puntos
    del soporte. Si el número de puntos del soporte no supera el menor índice (base 1)
    del soporte, los singletons son admisibles y la norma es max(‖x‖_∞, ½‖x‖_1).
    """
    if not tol > 0:
        raise ValueError(f"tol={tol} debe ser > 0")
    x = np.asarray(x, dtype=float)
    idx = np.flatnonzero(x)
    if idx.size == 0:
        return 0.0
    v = np.abs(x[idx])
    positions = idx + 1
    if idx.size <= positions[0]:
        return float(max(v.max(), 0.5 * v.sum()))
    return _tsirelson_dp(v, positions, tol)


def _tsirelson_dp(v: np.ndarray, positions: np.ndarray, tol: float) -> float:
    m = v.size
    upper = np.triu(np.ones((m, m), dtype=bool))
    base = np.full((m, m), -INF)
    for i in range(m):
        base[i, i:] = np.maximum.accumulate(v[i:])
    nu = base.copy()
    for it in range(m + 2):
        best = _best_families(nu, positions)
        new = np.where(upper, np.maximum(base, 0.5 * best), -INF)
        delta = float(np.max(np.abs(new[upper] - nu[upper])))
        nu = new
        if delta <= tol:
            logger.debug("[TSIRELSON] punto fijo en %d iteraciones (m=%d)", it + 1, m)
            break
    return float(nu[0, m - 1])


def _best_families(nu: np.ndarray, positions: np.ndarray) -> np.ndarray:
    # tables[s][k, b]: mejor suma con ≤ k+1 intervalos contiguos que cubren s..s+b
    m = positions.size
    tables = []
    for s in range(m):
        L = m - s
        local = nu[s:, s:]
        P = np.empty((L, L))
        P[0] = local[0]
        for k in range(1, L):
            cand = P[k - 1, :-1][:, None] + local[1:, :]
            P[k] = np.maximum(P[k - 1], cand.max(axis=0))
        tables.append(P)

    best = np.full((m, m), -INF)
    for a in range(m):
        row = np.full(m, -INF)
        for n in range(1, m + 1):
            s = max(a, int(np.searchsorted(positions, n, side="left")))
            if s >= m:
                break
            k = min(n, m - s) - 1
            row[s:] = np.maximum(row[s:], tables[s][k])
        best[a] = row
    return best


def tsirelson_block_shortcut(block: Sequence[int]) -> bool:
    """True si todo vector con soporte en ``block`` admite la familia de singletons."""
    block = index_array(block)
    return bool(block.size) and block.size <= block[0] + 1


def _tsirelson_norming(a: np.ndarray, squared: bool) -> Optional[np.ndarray]:
    # sólo con singletons admisibles: max(‖a‖∞, ½‖a‖₁) o, convexificada, max(‖a‖∞, ‖a‖₂/√2)
    idx = np.flatnonzero(a)
    if idx.size == 0 or idx.size > idx[0] + 1:
        return None
    v = a[idx]
    top = idx[int(np.argmax(v))]
    b = np.zeros_like(a)
    if squared:
        l2 = float(np.sqrt(np.sum(v * v)))
        if v.max() >= l2 / math.sqrt(2.0):
            b[top] = 1.0
        else:
            b[idx] = v / (math.sqrt(2.0) * l2)
    elif v.max() >= 0.5 * v.sum():
        b[top] = 1.0
    else:
        b[idx] = 0.5
    return b


# ══════════════════════════════════════════════════════════════════════════════
# NORMA DUAL
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class DualResult:
    value: float
    witness: np.ndarray
    exact: bool
    evaluations: int = 0


def dual_norm(space: SpaceSpec, y, budget: int = 500, seed: int = 0, restarts: int = 16) -> DualResult:
    """
    max ⟨x, y⟩ sobre ‖x‖_space ≤ 1.

    Los casos con fórmula cerrada (ℓp, ℓp(ω), Lorentz(p,1), Lorentz(p,p), bloques de Tsirelson con
    singletons admisibles) son exactos. El resto usa ascenso multiplicativo por
    coordenadas sobre el ortante positivo con reinicios aleatorios; el valor es una
    cota inferior certificada por el testigo.
    """
    if budget < 0 or restarts < 1:
        raise ValueError(f"budget={budget} debe ser ≥ 0 y restarts={restarts} ≥ 1")
    y = as_vector(y)
    space.check(y)
    return _dual(space, y, budget, seed, restarts)


def _dual(space: SpaceSpec, y: np.ndarray, budget: int, seed: int, restarts: int) -> DualResult:
    a = np.abs(y)
    if not a.any():
        return DualResult(0.0, np.zeros_like(a), True)
    sign = np.sign(y)
    closed = _dual_closed_form(space, a)
    if closed is not None:
        value, w = closed
        return DualResult(float(value), sign * w, True)
    return _dual_ascent(space, a, sign, budget, seed, restarts)


def _dual_closed_form(space: SpaceSpec, a: np.ndarray):
    if isinstance(space, Lp):
        return _lp_dual(a, space.p)
    if isinstance(space, WeightedLp):
        w = space.weights_array[:a.size]
        scale = w ** (1.0 / space.p) if space.p != INF else w
        value, u = _lp_dual(a[:w.size] / scale, space.p)
        return value, _pad(u / scale, a.size)
    if isinstance(space, Lorentz) and space.q == space.p:
        return _lp_dual(a, space.p)
    if isinstance(space, Lorentz) and space.q == 1:
        order = np.argsort(-a, kind="stable")
        k = np.arange(1, a.size + 1, dtype=float)
        ratios = np.cumsum(a[order]) / (space.p * k ** (1.0 / space.p))
        best = int(np.argmax(ratios))
        w = np.zeros_like(a)
        w[order[:best + 1]] = 1.0 / (space.p * (best + 1) ** (1.0 / space.p))
        return float(ratios[best]), w
    if isinstance(space, Restricted):
        if isinstance(space.base, (TsirelsonT, Tsirelson2)) and tsirelson_block_shortcut(space.block):
            if isinstance(space.base, TsirelsonT):
                return _box_budget_support(a, 2.0)
            return _box_ball_support(a, math.sqrt(2.0))
        return _dual_closed_form(space.base, a)
    return None


def _lp_dual(a: np.ndarray, p: float):
    q = conjugate_exponent(p)
    value = _lp_norm(a, q)
    w = np.zeros_like(a)
    if p == 1:
        w[int(np.argmax(a))] = 1.0
    elif p == INF:
        w[a > 0] = 1.0
    else:
        w = (a / value) ** (q - 1.0)
    return value, w


def _box_budget_support(a: np.ndarray, budget: float):
    # sup ⟨x, a⟩ con 0 ≤ x ≤ 1 y Σ x ≤ budget (budget entero)
    order = np.argsort(-a, kind="stable")
    k = int(min(budget, a.size))
    w = np.zeros_like(a)
    w[order[:k]] = 1.0
    return float(a[order[:k]].sum()), w


def _box_ball_support(a: np.ndarray, r: float):
    # sup ⟨x, a⟩ con 0 ≤ x ≤ 1 y ‖x‖_2 ≤ r; por KKT x = min(1, λa)
    order = np.argsort(-a, kind="stable")
    s = a[order]
    tail = np.cumsum((s ** 2)[::-1])[::-1]
    head = np.concatenate([[0.0], np.cumsum(s)])
    r2 = r * r
    scale = max(s[0], math.sqrt(tail[0]) / r)
    best_val = float(tail[0] / scale)
    best_x = s / scale
    for k in range(0, min(s.size, int(math.floor(r2 + 1e-12))) + 1):
        if k == s.size or tail[k] == 0.0:
            if k <= r2 + 1e-12:
                val = float(head[k])
                x = np.concatenate([np.ones(k), np.zeros(s.size - k)])
            else:
                continue
        else:
            lam = math.sqrt(max(r2 - k, 0.0) / tail[k])
            if (k > 0 and lam * s[k - 1] < 1.0 - 1e-12) or lam * s[k] > 1.0 + 1e-12:
                continue
            val = float(head[k] + lam * tail[k])
            x = np.concatenate([np.ones(k), np.minimum(1.0, lam * s[k:])])
        if val > best_val:
            best_val, best_x = val, x
    w = np.zeros_like(a)
    w[order] = best_x
    return best_val, w


def _dual_ascent(space: SpaceSpec, a: np.ndarray, sign: np.ndarray,
                 budget: int, seed: int, restarts: int) -> DualResult:
    supp = np.flatnonzero(a)
    ay = a[supp]
    rng = np.random.default_rng(seed)
    evaluations = 0

    def ratio(z: np.ndarray) -> float:
        nonlocal evaluations
        full = np.zeros_like(a)
        full[supp] = z
        evaluations += 1
        return float(ay @ z) / space.evaluate(full)

    starts = [ay.copy(), np.ones(supp.size)]
    spike = np.full(supp.size, 1e-3)
    spike[int(np.argmax(ay))] = 1.0
    starts.append(spike)
    while len(starts) < restarts:
        starts.append(np.exp(rng.uniform(-3.0, 0.0, size=supp.size)))

    best_val, best_z = -INF, None
    for z in starts[:restarts]:
        val = ratio(z)
        step = 1.0
        for _ in range(budget):
            improved = False
            for i in range(supp.size):
                for factor in (math.exp(step), math.exp(-step)):
                    trial = z.copy()
                    trial[i] *= factor
                    v = ratio(trial)
                    if v > val:
                        z, val, improved = trial, v, True
                        break
            if not improved:
                # movimientos por niveles: escalar juntas las j mayores coordenadas (empates)
                order = np.argsort(-z, kind="stable")
                for j in range(1, supp.size):
                    for factor in (math.exp(step), math.exp(-step)):
                        trial = z.copy()
                        trial[order[:j]] *= factor
                        v = ratio(trial)
                        if v > val:
                            z, val, improved = trial, v, True
                            break
                    if improved:
                        break
            if not improved:
                step *= 0.5
                if step < 1e-10:
                    break
        if val > best_val:
            best_val, best_z = val, z

    full = np.zeros_like(a)
    full[supp] = best_z
    full /= space.evaluate(full)
    witness = sign * full
    value = float(np.abs(witness) @ a)
    logger.debug("[DUAL] %s: cota inferior %.6g tras %d evaluaciones", space.label, value, evaluations)
    return DualResult(value, witness, False, evaluations)
