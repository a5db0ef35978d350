# ilab/interpolate.py
# Normas de interpolación compleja vía producto de Calderón y factorización de Lozanovskii
"""
Interpolación de parejas de retículos de sucesiones.

OBJETIVO GENERAL:
    Calcular la norma del espacio interpolado X_θ = X_0^{1−θ} X_1^θ resolviendo el
    problema de factorización de Lozanovskii y extraer de la factorización casi óptima
    la derivación Ω_θ(x) = x·log(a_1/a_0).

Comportamiento esperado:
    - Reparametrizamos a_0 = |x|e^{θs}, a_1 = |x|e^{−(1−θ)s}; la restricción
      |x| = a_0^{1−θ}a_1^θ se cumple de forma exacta y el objetivo
      G(s) = (1−θ)log‖a_0‖_{X_0} + θ log‖a_1‖_{X_1} es convexo y sin restricciones.
    - G es invariante por traslaciones constantes de s; tras minimizar trasladamos s
      para que ‖a_0‖_{X_0} = ‖a_1‖_{X_1}, la normalización con la que x·log(a_1/a_0)
      es la derivación.
    - El descenso por coordenadas con backtracking se alterna con muestreo de
      gradientes (combinación convexa de norma mínima, búsqueda de Armijo y radio
      decreciente) porque varias normas del laboratorio no son diferenciables.
    - Cada factorización lleva un certificado: brecha de dualidad cuando ambos
      extremos acotan su norma dual, estacionariedad muestreada en otro caso.
    - Sin certificado dentro del límite de rondas se levanta SolverConvergenceError.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import nnls

from .errors import ShapeMismatchError, SolverConvergenceError
from .spaces import (
    INF, Amalgam, Convexified, Lp, Restricted, SpaceSpec, WeightedLp,
    as_vector, support,
)

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-6
MAX_SWEEPS = 100_000
STEP_TOL = 1e-7
MAX_STEP = 64.0
FD_STEP = 1e-7
SAMPLING_RADIUS = 1e-2
SAMPLING_SHRINK = 0.1
SAMPLING_MAX_ITER = 400
ARMIJO = 1e-4
SIMPLEX_WEIGHT = 1e3
CERT_ROUNDS = 3


# ══════════════════════════════════════════════════════════════════════════════
# TIPOS
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class CoupleSpec:
    X0: SpaceSpec
    X1: SpaceSpec
    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta={self.theta} fuera de rango (0, 1)")

    def at(self, theta: float) -> "CoupleSpec":
        return CoupleSpec(self.X0, self.X1, theta)

    def check(self, x: np.ndarray) -> None:
        self.X0.check(x)
        self.X1.check(x)

    @property
    def max_dim(self) -> Optional[int]:
        bounds = [b for b in (self.X0.max_dim, self.X1.max_dim) if b is not None]
        return min(bounds) if bounds else None

    @property
    def label(self) -> str:
        return f"({self.X0.label}, {self.X1.label})_{self.theta:g}"


@dataclass(frozen=True, eq=False)
class Factorization:
    """
    Factorización |x| = a0^{1−θ} a1^θ con ‖a0‖_{X0} = ‖a1‖_{X1} = bound.

    ``certificate`` es "exact", "duality" o "stationarity"; con "duality",
    ``lower_bound`` ≤ ‖x‖_θ ≤ bound y ``residual`` es la brecha relativa.
    """
    a0: np.ndarray
    a1: np.ndarray
    s: np.ndarray
    bound: float
    eps: float
    residual: float = 0.0
    sweeps: int = 0
    certificate: str = "exact"
    lower_bound: Optional[float] = None


def interpolated_exponent(p0: float, p1: float, theta: float) -> float:
    """1/p = (1−θ)/p0 + θ/p1, con 1/∞ = 0."""
    inv = (1.0 - theta) / p0 + theta / p1
    return INF if inv == 0.0 else 1.0 / inv


# ══════════════════════════════════════════════════════════════════════════════
# SOLVER DE LOZANOVSKII
# ══════════════════════════════════════════════════════════════════════════════

class LozanovskiiProblem:
    """
    Problema de Lozanovskii de x para una pareja, sobre el soporte de x.

    Invocado con s devuelve G(s); ``gradient`` da ∇G = θ(1−θ)(μ0 − μ1), donde μ_j son
    las pendientes logarítmicas de ‖a_j‖ (partes del funcional normante, suman 1), y
    ``lower_bound`` la cota dual de ‖x‖_θ construida con pesos μ ≥ 0.
    """

    def __init__(self, couple: CoupleSpec, x):
        x = as_vector(x)
        self.couple = couple
        self.theta = couple.theta
        self.template = x
        self.supp = support(x)
        self.ax = np.abs(x[self.supp])

    @property
    def size(self) -> int:
        return int(self.supp.size)

    def factors(self, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        a0 = np.zeros(self.template.size)
        a1 = np.zeros(self.template.size)
        a0[self.supp] = self.ax * np.exp(self.theta * s)
        a1[self.supp] = self.ax * np.exp(-(1.0 - self.theta) * s)
        return a0, a1

    def __call__(self, s: np.ndarray) -> float:
        a0, a1 = self.factors(s)
        theta = self.theta
        return (1.0 - theta) * math.log(self.couple.X0.evaluate(a0)) \
            + theta * math.log(self.couple.X1.evaluate(a1))

    def slopes(self, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        a0, a1 = self.factors(s)
        return _log_slopes(self.couple.X0, a0, self.supp), _log_slopes(self.couple.X1, a1, self.supp)

    def gradient(self, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        mu0, mu1 = self.slopes(s)
        return self.theta * (1.0 - self.theta) * (mu0 - mu1), mu0, mu1

    def lower_bound(self, s: np.ndarray, candidates: Sequence[np.ndarray]) -> Optional[float]:
        """
        max_μ Σμ / (‖μ/a0‖*^{1−θ} ‖μ/a1‖*^θ) sobre los candidatos; None si algún
        extremo no tiene cota superior de su norma dual.
        """
        a0, a1 = self.factors(s)
        theta = self.theta
        best = 0.0
        for mu in candidates:
            mu = np.maximum(np.asarray(mu, dtype=float), 0.0)
            total = float(mu.sum())
            if not total > 0.0:
                continue
            v0 = np.zeros_like(a0)
            v1 = np.zeros_like(a1)
            v0[self.supp] = mu / a0[self.supp]
            v1[self.supp] = mu / a1[self.supp]
            d0 = self.couple.X0.dual_bound(v0)
            d1 = self.couple.X1.dual_bound(v1)
            if d0 is None or d1 is None:
                return None
            if d0 > 0.0 and d1 > 0.0:
                best = max(best, total / (d0 ** (1.0 - theta) * d1 ** theta))
        return best


def _log_slopes(space: SpaceSpec, a: np.ndarray, supp: np.ndarray) -> np.ndarray:
    # μ_i = ∂log‖a‖/∂log a_i; diferencias centrales si el espacio no tiene funcional normante
    b = space.norming(a)
    if b is not None:
        w = a * np.asarray(b, dtype=float)
        total = float(w.sum())
        if total > 0.0 and np.all(np.isfinite(w)):
            return w[supp] / total
    mu = np.empty(supp.size)
    for n, i in enumerate(supp):
        up = a.copy()
        down = a.copy()
        up[i] *= math.exp(FD_STEP)
        down[i] *= math.exp(-FD_STEP)
        mu[n] = (math.log(space.evaluate(up)) - math.log(space.evaluate(down))) / (2.0 * FD_STEP)
    return mu


def lozanovskii_objective(couple: CoupleSpec, x) -> LozanovskiiProblem:
    """G(s) sobre el soporte de x (s tiene una entrada por coordenada no nula)."""
    return LozanovskiiProblem(couple, x)


def lozanovskii_factor(couple: CoupleSpec, x, eps: float = DEFAULT_EPS,
                       max_sweeps: int = MAX_SWEEPS) -> Factorization:
    """
    Factorización casi óptima de Lozanovskii de x para la pareja dada.

    Para parejas iguales devuelve s = 0 sin iterar. En el resto alterna descenso por
    coordenadas y muestreo de gradientes hasta que el certificado se cumple:

    - ``duality``: si ambos extremos acotan su norma dual, la brecha relativa entre
      G(s) y la mejor cota dual es ≤ eps (la cota es rigurosa).
    - ``stationarity``: en otro caso, la combinación convexa de norma mínima de los
      gradientes muestreados a radio eps·1e-2 cumple ‖μ̄0 − μ̄1‖₁ ≤ sqrt(eps).

    Si tras CERT_ROUNDS rondas no se certifica, levanta SolverConvergenceError.
    """
    if not eps > 0:
        raise ValueError(f"eps={eps} debe ser > 0")
    x = as_vector(x)
    couple.check(x)
    supp = support(x)
    if supp.size == 0:
        raise ValueError("x = 0 no admite factorización de Lozanovskii")

    if couple.X0 == couple.X1:
        a = np.abs(x)
        bound = couple.X0.evaluate(a)
        return Factorization(a, a.copy(), np.zeros(x.size), bound, eps, lower_bound=bound)

    problem = LozanovskiiProblem(couple, x)
    rng = np.random.default_rng(0)
    s, g, sweeps = _minimize(problem, np.zeros(problem.size), eps, max_sweeps)
    kind, residual, ok, lower = _certify(problem, s, g, eps, rng)
    rounds = 0
    while not ok and rounds < CERT_ROUNDS:
        rounds += 1
        s, g, iterations = _gradient_sampling(problem, s, g, eps, rng)
        s, g, more = _minimize(problem, s, eps, max_sweeps, step=1e-3)
        sweeps += iterations + more
        kind, residual, ok, lower = _certify(problem, s, g, eps, rng)
    if not ok:
        raise SolverConvergenceError(
            f"Certificado {kind} sin cumplir en {couple.label}: residuo {residual:.3e} (eps={eps:g})",
            sweeps=sweeps, residual=residual, eps=eps,
        )

    theta = couple.theta
    a0, a1 = problem.factors(s)
    n0 = couple.X0.evaluate(a0)
    n1 = couple.X1.evaluate(a1)
    shift = math.log(n1 / n0)
    s = s + shift
    a0 *= math.exp(theta * shift)
    a1 *= math.exp(-(1.0 - theta) * shift)
    bound = n0 ** (1.0 - theta) * n1 ** theta

    s_full = np.zeros_like(x)
    s_full[supp] = s
    logger.debug("[SOLVER] %s: cota %.10g en %d barridos (certificado %s, residuo %.2e)",
                 couple.label, bound, sweeps, kind, residual)
    return Factorization(a0, a1, s_full, float(bound), eps, residual, sweeps, kind, lower)


def _minimize(problem: LozanovskiiProblem, s: np.ndarray, eps: float, max_sweeps: int,
              step: float = 1.0):
    g = problem(s)
    steps = np.full(s.size, step)
    for sweep in range(1, max_sweeps + 1):
        g_start = g
        for j in range(s.size):
            s, g, steps[j] = _coordinate_step(problem, s, g, j, steps[j])
        if g_start - g < eps / 4 and steps.max() < STEP_TOL:
            return s, g, sweep
    raise SolverConvergenceError(
        f"Sin convergencia tras {max_sweeps} barridos (eps={eps})", sweeps=max_sweeps, eps=eps
    )


def _coordinate_step(G, s: np.ndarray, g: float, j: int, h: float):
    for direction in (1.0, -1.0):
        t = s.copy()
        t[j] += direction * h
        gt = G(t)
        if gt < g:
            while h < MAX_STEP:
                t2 = s.copy()
                t2[j] += direction * 2.0 * h
                g2 = G(t2)
                if g2 >= gt:
                    break
                h, t, gt = 2.0 * h, t2, g2
            return t, gt, h
    return s, g, 0.5 * h


def _sample_bundle(problem: LozanovskiiProblem, s: np.ndarray, radius: float,
                   rng: np.random.Generator, m: int):
    """Gradientes en s y en m puntos uniformes de la bola de radio ``radius``."""
    k = s.size
    directions = rng.standard_normal((m, k))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=(m, 1)) ** (1.0 / k)
    points = [s] + list(s + radii * directions)
    grads, mus0, mus1 = [], [], []
    for point in points:
        grad, mu0, mu1 = problem.gradient(point)
        grads.append(grad)
        mus0.append(mu0)
        mus1.append(mu1)
    grads = np.array(grads)
    lam = _min_norm_weights(grads)
    return lam @ grads, lam @ np.array(mus0), lam @ np.array(mus1), (mus0[0], mus1[0])


def _min_norm_weights(grads: np.ndarray) -> np.ndarray:
    # min ‖Σλ_i g_i‖ con λ ≥ 0; la fila penalizada impone Σλ = 1
    m, k = grads.shape
    A = np.vstack([grads.T, np.full((1, m), SIMPLEX_WEIGHT)])
    rhs = np.zeros(k + 1)
    rhs[-1] = SIMPLEX_WEIGHT
    lam, _ = nnls(A, rhs)
    total = lam.sum()
    return lam / total if total > 0.0 else np.full(m, 1.0 / m)


def _gradient_sampling(problem: LozanovskiiProblem, s: np.ndarray, g: float, eps: float,
                       rng: np.random.Generator):
    radius = SAMPLING_RADIUS
    iterations = 0
    while radius > eps * 1e-2 and iterations < SAMPLING_MAX_ITER:
        iterations += 1
        d, _, _, _ = _sample_bundle(problem, s, radius, rng, problem.size + 1)
        norm = float(np.linalg.norm(d))
        if norm <= radius:
            radius *= SAMPLING_SHRINK
            continue
        t = 1.0
        accepted = False
        while t > 1e-10:
            trial = s - t * d
            gt = problem(trial)
            if gt <= g - ARMIJO * t * norm ** 2:
                accepted = True
                break
            t *= 0.5
        if accepted:
            s, g = trial, gt
        else:
            radius *= SAMPLING_SHRINK
    return s, g, iterations


def _certify(problem: LozanovskiiProblem, s: np.ndarray, g: float, eps: float,
             rng: np.random.Generator):
    """Devuelve (tipo, residuo, cumple, cota inferior o None)."""
    _, mu0_bar, mu1_bar, (mu0, mu1) = _sample_bundle(
        problem, s, eps * 1e-2, rng, 2 * (problem.size + 1))
    candidates = [mu0, mu1, mu0_bar, mu1_bar]
    for P, Q in ((mu0, mu1), (mu0_bar, mu1_bar)):
        P = np.maximum(P, 0.0)
        Q = np.maximum(Q, 0.0)
        candidates += [0.5 * (P + Q), np.minimum(P, Q), np.sqrt(P * Q)]
    lower = problem.lower_bound(s, candidates)
    if lower is not None:
        gap = math.expm1(g - math.log(lower)) if lower > 0.0 else INF
        gap = max(gap, 0.0)
        return "duality", gap, gap <= eps, lower
    residual = float(np.abs(mu0_bar - mu1_bar).sum())
    return "stationarity", residual, residual <= math.sqrt(eps), None


# ══════════════════════════════════════════════════════════════════════════════
# NORMA DE CALDERÓN Y DERIVACIÓN NUMÉRICA
# ══════════════════════════════════════════════════════════════════════════════

def calderon_norm(couple: CoupleSpec, x, eps: float = DEFAULT_EPS) -> float:
    x = as_vector(x)
    if not np.any(x):
        couple.check(x)
        return 0.0
    return lozanovskii_factor(couple, x, eps).bound


def numerical_derivation(couple: CoupleSpec, x, eps: float = DEFAULT_EPS) -> np.ndarray:
    """
    Ω_θ(x) = x·log(a1/a0) = −x·s a partir de la factorización normalizada.

    Definida salvo un término acotado por O(eps)·‖x‖: compárese sólo con
    ``diagnostics.bounded_equivalence``. Para x = 0 devuelve 0.
    """
    x = as_vector(x)
    if not np.any(x):
        return np.zeros_like(x)
    fac = lozanovskii_factor(couple, x, eps)
    return -x * fac.s


# ══════════════════════════════════════════════════════════════════════════════
# ESPACIOS INTERPOLADOS Y FORMAS CERRADAS
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Interpolated(SpaceSpec):
    """X_θ como espacio: forma cerrada cuando existe, solver de Calderón en otro caso."""
    couple: CoupleSpec
    eps: float = DEFAULT_EPS

    @property
    def max_dim(self) -> Optional[int]:
        return self.couple.max_dim

    @property
    def label(self) -> str:
        return f"Interpolated{self.couple.label}"

    def check(self, x: np.ndarray) -> None:
        self.couple.check(x)

    @cached_property
    def resolved(self) -> Optional[SpaceSpec]:
        return closed_form_space(self.couple)

    def evaluate(self, x: np.ndarray) -> float:
        exact = self.resolved
        if exact is not None:
            return exact.evaluate(x)
        if not np.any(x):
            return 0.0
        return lozanovskii_factor(self.couple, x, self.eps).bound

    def norming(self, a: np.ndarray) -> Optional[np.ndarray]:
        exact = self.resolved
        return exact.norming(a) if exact is not None else None

    def dual_bound(self, b: np.ndarray) -> Optional[float]:
        exact = self.resolved
        return exact.dual_bound(b) if exact is not None else None


def closed_form_space(couple: CoupleSpec) -> Optional[SpaceSpec]:
    """
    Espacio exacto isométrico a X_θ cuando se conoce:
    parejas iguales, ℓp, ℓp(ω) con igual p, convexificaciones de un mismo λ,
    bloques restringidos y amalgamas sobre una misma partición.
    """
    X0, X1, theta = couple.X0, couple.X1, couple.theta
    if X0 == X1:
        return X0
    if isinstance(X0, Lp) and isinstance(X1, Lp):
        return Lp(interpolated_exponent(X0.p, X1.p, theta))
    if isinstance(X0, WeightedLp) and isinstance(X1, WeightedLp) and X0.p == X1.p \
            and len(X0.weight) == len(X1.weight):
        w = X0.weights_array ** (1.0 - theta) * X1.weights_array ** theta
        return WeightedLp(X0.p, tuple(w))
    if isinstance(X0, Convexified) and isinstance(X1, Convexified) and X0.base == X1.base:
        return Convexified(X0.base, interpolated_exponent(X0.p, X1.p, theta))
    if isinstance(X0, Restricted) and isinstance(X1, Restricted) and X0.block == X1.block:
        inner = closed_form_space(CoupleSpec(X0.base, X1.base, theta))
        return Restricted(inner, X0.block) if inner is not None else None
    if isinstance(X0, Amalgam) and isinstance(X1, Amalgam) and X0.partition == X1.partition:
        if closed_form_space(CoupleSpec(X0.outer, X1.outer, theta)) is None:
            return None
        return amalgam_interpolated(couple)
    return None


def amalgam_interpolated(couple: CoupleSpec) -> Amalgam:
    """Amalgama (λ0^{1−θ}λ1^θ)((X0_n, X1_n)_θ), isométrica a la interpolada de las amalgamas."""
    X0, X1 = couple.X0, couple.X1
    if not (isinstance(X0, Amalgam) and isinstance(X1, Amalgam)):
        raise ShapeMismatchError("amalgam_interpolated requiere una pareja de amalgamas")
    if X0.partition != X1.partition:
        raise ShapeMismatchError("Las amalgamas deben compartir partición")
    outer_couple = CoupleSpec(X0.outer, X1.outer, couple.theta)
    outer = closed_form_space(outer_couple) or Interpolated(outer_couple)
    inner = tuple(
        closed_form_space(CoupleSpec(a, b, couple.theta)) or Interpolated(CoupleSpec(a, b, couple.theta))
        for a, b in zip(X0.inner, X1.inner)
    )
    return Amalgam(outer, inner, X0.partition)


def restrict_couple(couple: CoupleSpec, A: Sequence[int]) -> CoupleSpec:
    """Fragmentación de una pareja: (L0(A), L1(A))."""
    return CoupleSpec(Restricted(couple.X0, tuple(A)), Restricted(couple.X1, tuple(A)), couple.theta)


def weighted_couple_for(f, p: float, theta: float) -> CoupleSpec:
    """
    Pareja de pesos cuya derivación en θ es x ↦ f·x y cuyo espacio interpolado es ℓp:
    ω0 = e^{pθf}, ω1 = e^{−p(1−θ)f}.
    """
    f = as_vector(f)
    w0 = np.exp(p * theta * f)
    w1 = np.exp(-p * (1.0 - theta) * f)
    return CoupleSpec(WeightedLp(p, tuple(w0)), WeightedLp(p, tuple(w1)), theta)


def interpolation_inequality(a, b, p0: float, p1: float, theta: float,
                             lam: SpaceSpec = Lp(1)) -> Tuple[float, float]:
    """
    Desigualdad de interpolación para λ 1-incondicional (K = 1):
    ‖|a|^{1−θ}|b|^θ‖_{λ_p} ≤ ‖a‖_{λ_p0}^{1−θ} ‖b‖_{λ_p1}^θ. Devuelve (lhs, rhs).
    """
    a = np.abs(as_vector(a))
    b = np.abs(as_vector(b))
    if a.size != b.size:
        raise ShapeMismatchError(f"a y b con dimensiones distintas ({a.size} != {b.size})")
    p = interpolated_exponent(p0, p1, theta)
    lhs = Convexified(lam, p).evaluate(a ** (1.0 - theta) * b ** theta)
    rhs = Convexified(lam, p0).evaluate(a) ** (1.0 - theta) * Convexified(lam, p1).evaluate(b) ** theta
    return float(lhs), float(rhs)


# ══════════════════════════════════════════════════════════════════════════════
# REITERACIÓN
# ══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ReiterationResult:
    theta0: float
    theta1: float
    eta: float
    theta: float
    distance: float
    samples: int
    seed: int
    eps: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def space_at(base: CoupleSpec, t: float) -> SpaceSpec:
    """X_t de la escala; t = 0 y t = 1 devuelven los extremos."""
    if t == 0.0:
        return base.X0
    if t == 1.0:
        return base.X1
    couple = base.at(t)
    return closed_form_space(couple) or Interpolated(couple)


def reiteration_check(base: CoupleSpec, theta0: float, theta1: float, eta: float,
                      dim: int, samples: int = 48, seed: int = 0,
                      eps: float = DEFAULT_EPS) -> ReiterationResult:
    """
    Compara la derivación numérica de (X_θ0, X_θ1)_η con (θ1−θ0)·Ω_θ,
    θ = (1−η)θ0 + ηθ1, mediante equivalencia acotada sobre la muestra.
    """
    from .derivations import Numerical, Scaled
    from .diagnostics import bounded_equivalence

    for name, t in (("theta0", theta0), ("theta1", theta1)):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"{name}={t} fuera de rango [0, 1]")
    theta = (1.0 - eta) * theta0 + eta * theta1
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta={theta} fuera de rango (0, 1)")
    reiterated = CoupleSpec(space_at(base, theta0), space_at(base, theta1), eta)
    omega_re = Numerical(reiterated, eps)
    expected = Scaled(Numerical(base.at(theta), eps), theta1 - theta0)
    distance = bounded_equivalence(omega_re, expected, space_at(base, theta), dim, samples, seed)
    logger.info("[REITERATION] θ0=%g θ1=%g η=%g → distancia %.4g", theta0, theta1, eta, distance)
    return ReiterationResult(theta0, theta1, eta, theta, distance, samples, seed, eps)


__all__ = [
    "CoupleSpec", "Factorization", "Interpolated", "LozanovskiiProblem", "ReiterationResult",
    "amalgam_interpolated", "calderon_norm", "closed_form_space", "interpolated_exponent",
    "interpolation_inequality", "lozanovskii_factor", "lozanovskii_objective",
    "numerical_derivation", "reiteration_check", "restrict_couple", "space_at",
    "weighted_couple_for",
]
