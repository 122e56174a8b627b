"""Wilton's function, the transfer-type operator T, and orbit partial sums.

Wilton's function is the alternating series W(x) = sum_k (-1)^k gamma_k(x)
with gamma_k = beta_{k-1} log(1/alpha_k); it satisfies the functional
equation W(x) = log(1/x) - x W(alpha(x)).  The operator is
(T f)(x) = x f(alpha(x)), iterated through the beta-product formula
(T^n f)(x) = beta_{n-1}(x) f(alpha_n(x)) so one orbit serves every n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cf_dynamics import (
    DEFAULT_CONFIG,
    EffectiveRationalError,
    NonConvergenceError,
    ToleranceConfig,
    orbit_arrays,
)


@dataclass(frozen=True)
class WiltonEval:
    point: float
    value: float
    terms_used: int
    tail_bound: float
    truncated_rational: bool = False


@dataclass(frozen=True)
class PartialSumEval:
    point: float
    n: int
    L_value: float
    D_value: float


def ell(x: float) -> float:
    """log(1/x) on (0, 1)."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"ell needs x in (0, 1), got {x}")
    return -math.log(x)


def apply_T(
    f: Callable[[float], float], x: float, n: int, cfg: ToleranceConfig = DEFAULT_CONFIG
) -> float:
    """(T^n f)(x) = beta_{n-1}(x) * f(alpha_n(x)); T^0 is the identity."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        if not 0.0 < x < 1.0:
            raise ValueError(f"apply_T needs x in (0, 1), got {x}")
        return f(x)
    alphas, betas, _, truncated = orbit_arrays(x, n, cfg.rational_guard)
    if truncated or len(alphas) <= n:
        raise EffectiveRationalError(f"orbit of {x} ended before depth {n}")
    return betas[n] * f(alphas[n])


def _alternating_stop(gammas: np.ndarray, tol: float) -> int | None:
    """Smallest k >= 1 with gamma_k < tol, gamma_{k+1} <= min(tol, gamma_k).

    Summing terms 0..k-1 then leaves the classical alternating-series
    enclosure once the terms decay; requiring two consecutive sub-tolerance
    terms guards against an isolated small term before a spike.
    """
    n = len(gammas)
    for k in range(1, n - 1):
        if gammas[k] < tol and gammas[k + 1] <= tol and gammas[k + 1] <= gammas[k]:
            return k
    return None


def wilton(x: float, cfg: ToleranceConfig = DEFAULT_CONFIG) -> WiltonEval:
    """Evaluate Wilton's function by its alternating orbit series.

    The tail bound is the sum of the first two omitted terms, valid in the
    monotone-decay regime the stopping rule enforces.  Orbits that hit the
    rational guard return the partial sum with truncated_rational set; a
    budget overrun raises NonConvergenceError.
    """
    tol = cfg.abs_tol
    alphas, betas, gammas, truncated = orbit_arrays(x, cfg.max_terms, cfg.rational_guard)
    k = _alternating_stop(gammas, tol)
    if k is not None:
        signs = np.where(np.arange(k) % 2 == 0, 1.0, -1.0)
        value = float(signs @ gammas[:k])
        return WiltonEval(
            point=x,
            value=value,
            terms_used=k,
            tail_bound=float(gammas[k] + gammas[k + 1]),
        )
    if truncated:
        m = len(gammas)
        signs = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
        value = float(signs @ gammas)
        # Next term is beta_m * log(1/alpha_{m+1}) with alpha below the guard.
        tail = float(betas[m] * (-math.log(cfg.rational_guard)) * 2.0)
        return WiltonEval(
            point=x, value=value, terms_used=m, tail_bound=tail, truncated_rational=True
        )
    raise NonConvergenceError(
        f"Wilton series at {x} still above {tol} after {cfg.max_terms} terms"
    )


def partial_sums(x: float, n: int, cfg: ToleranceConfig = DEFAULT_CONFIG) -> PartialSumEval:
    """L(x, n) = sum_{v=0}^{n} (-1)^v (T^v l)(x) and D(x, n) = L - l(x).

    (T^v l)(x) is exactly gamma_v(x), so L is the n-th partial sum of the
    Wilton series.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cfg.max_terms:
        raise ValueError(f"n {n} exceeds max_terms {cfg.max_terms}")
    alphas, _, gammas, truncated = orbit_arrays(x, n, cfg.rational_guard)
    if truncated or len(gammas) <= n:
        raise EffectiveRationalError(f"orbit of {x} ended before depth {n}")
    signs = np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)
    L = float(signs @ gammas[: n + 1])
    return PartialSumEval(point=x, n=n, L_value=L, D_value=L - ell(x))


def wilton_batch(
    xs: np.ndarray, cfg: ToleranceConfig = DEFAULT_CONFIG
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized Wilton evaluation.

    Returns (values, tail_bounds, terms_used, ok).  ok is False where the
    orbit hit the rational guard or the term budget before the stopping
    rule fired; such entries hold the partial sum accumulated so far.
    Iterates are produced by the same float operations as gauss_map, so
    residuals of the functional equation cancel structurally down to the
    tail bounds.
    """
    x = np.asarray(xs, dtype=np.float64)
    n = x.shape[0]
    guard = cfg.rational_guard
    tol = cfg.abs_tol

    alpha = x.copy()
    beta = np.ones(n)
    value = np.zeros(n)
    tail = np.zeros(n)
    terms = np.zeros(n, dtype=np.int64)
    ok = np.ones(n, dtype=bool)
    active = (x > guard) & (x < 1.0)
    ok &= active

    # prev_g buffers gamma_k while gamma_{k+1} decides whether to stop.
    prev_g = np.where(active, beta * (-np.log(np.where(active, alpha, 0.5))), 0.0)
    sign = 1.0
    k = 0
    while active.any() and k < cfg.max_terms:
        beta = np.where(active, beta * alpha, beta)
        z = 1.0 / np.where(active, alpha, 0.5)
        alpha_next = z - np.floor(z)
        hit_guard = active & (alpha_next <= guard)
        ok &= ~hit_guard
        active &= ~hit_guard

        g_next = np.where(
            active, beta * (-np.log(np.where(active, alpha_next, 0.5))), 0.0
        )
        stop = active & (k >= 1) & (prev_g < tol) & (g_next <= tol) & (g_next <= prev_g)
        tail = np.where(stop, prev_g + g_next, tail)
        terms = np.where(stop, k, terms)

        keep = active & ~stop
        value = np.where(keep, value + sign * prev_g, value)
        prev_g = np.where(keep, g_next, prev_g)
        alpha = np.where(keep, alpha_next, alpha)
        active = keep
        sign = -sign
        k += 1

    ok &= ~active  # budget exhausted
    return value, tail, terms, ok


def iterate_l2_means(
    xs: np.ndarray, n_max: int, guard: float = DEFAULT_CONFIG.rational_guard
) -> np.ndarray:
    """Monte Carlo means of (T^n l)^2 over the sample, n = 0..n_max.

    Common samples across n keep successive ratios stable; points whose
    orbit hits the guard are dropped from every n.
    """
    from .cf_dynamics import orbit_gamma_matrix

    gam, valid = orbit_gamma_matrix(xs, n_max, guard)
    g = gam[:, valid]
    return np.mean(g * g, axis=1)
