"""Equilibrium states with excess supply.

Covers the simplex parametrization of every solution of the binding/slack
system, the minimum-excess quadratic program, price construction for full
and partial clearing, and the excess-supply level R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qp
from .core import (
    POSITIVE_TOL,
    Technology,
    _vector,
    is_indecomposable,
)
from .errors import (
    DecomposableError,
    DecomposableMinorError,
    HypothesisViolatedError,
    ModelError,
    NoConvergenceError,
    PipelineError,
    ZeroColumnError,
    ZeroValueError,
)

BINDING_TOL = 1e-8          # |b_i - (A z)_i| <= BINDING_TOL * max(1, b_i)
CLEARING_TOL = 1e-8
MULTIPLIER_TOL = 1e-10
FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAXITER = 10 ** 6


@dataclass(frozen=True)
class AlphaPoint:
    """Simplex point with its induced scaled solution z = a(alpha) * alpha * d."""

    alpha: np.ndarray
    scale: float
    z: np.ndarray


@dataclass(frozen=True)
class EquilibriumState:
    """Fully described equilibrium with excess supply.

    ``mode`` records how prices were built: "support" for the binding-set
    fixed point (prices vanish on slack rows, generalized prices carry input
    costs there), "generalized" for the real-consumption fixed point used
    when the quadratic-programming solution is not supported on its binding
    rows (prices need not vanish on slack rows in that case).
    """

    z: np.ndarray
    binding: tuple[int, ...]
    slack: tuple[int, ...]
    p: np.ndarray
    b_bar: np.ndarray
    p_u: np.ndarray
    excess_level: float
    mode: str


def min_ratios(t: Technology, b) -> np.ndarray:
    """d_i = min over rows k with a_ki > 0 of b_k / a_ki."""
    b = _vector(b, "supply vector")
    if b.shape[0] != t.n:
        raise ValueError("supply vector length does not match sector count")
    if np.any(b <= 0.0):
        raise ValueError("supply vector must be strictly positive")
    d = np.empty(t.n)
    for i in range(t.n):
        col = t.a[:, i]
        positive = col > 0.0
        if not np.any(positive):
            raise ZeroColumnError(f"column {i} of the direct-cost matrix is zero")
        d[i] = float(np.min(b[positive] / col[positive]))
    return d


def solution_from_alpha(t: Technology, b, alpha) -> AlphaPoint:
    """Scaled solution induced by a simplex point.

    The scale a(alpha) = min_k b_k / [A (alpha * d)]_k is at least one and
    the induced z satisfies A z <= b with equality on the argmin rows.
    """
    b = _vector(b, "supply vector")
    alpha = _vector(alpha, "simplex point")
    if alpha.shape[0] != t.n:
        raise ValueError("simplex point length does not match sector count")
    if np.any(alpha < -1e-12) or abs(float(np.sum(alpha)) - 1.0) > 1e-9:
        raise ValueError("alpha must be non-negative and sum to one")
    alpha = np.maximum(alpha, 0.0)
    d = min_ratios(t, b)
    weighted = alpha * d
    denom = t.a @ weighted
    positive = denom > 0.0
    if not np.any(positive):
        raise ZeroColumnError("A (alpha * d) vanishes; alpha has no support on the economy")
    scale = float(np.min(b[positive] / denom[positive]))
    return AlphaPoint(alpha=alpha, scale=scale, z=scale * weighted)


def alpha_objective(t: Technology, b, alpha) -> float:
    """Squared unsold-supply objective at the solution induced by alpha."""
    point = solution_from_alpha(t, b, alpha)
    residual = _vector(b) - t.a @ point.z
    return float(np.sum(residual ** 2))


def min_excess_qp(t: Technology, b) -> np.ndarray:
    """Solution of min ||b - A z||^2 over {z >= 0, A z <= b}.

    The active-set result is verified feasible and KKT-certified before
    being returned.
    """
    b = _vector(b, "supply vector")
    if b.shape[0] != t.n:
        raise ValueError("supply vector length does not match sector count")
    if np.any(b <= 0.0):
        raise ValueError("supply vector must be strictly positive")
    if not is_indecomposable(t):
        raise DecomposableError("minimum-excess program requires an indecomposable matrix")
    result = qp.solve_min_excess(t.a, b)
    z = result.z
    if np.min(z) < -1e-12 or float(np.max(t.a @ z - b)) > 1e-9 * max(1.0, float(np.max(b))):
        raise HypothesisViolatedError("active-set result violates feasibility")
    return z


def binding_rows(t: Technology, b, z, tol: float = BINDING_TOL) -> tuple[int, ...]:
    """Rows where A z meets b within the documented tolerance."""
    b = _vector(b)
    image = t.a @ _vector(z)
    return tuple(int(i) for i in np.flatnonzero(np.abs(b - image) <= tol * np.maximum(1.0, np.abs(b))))


def _simplex_power_iteration(m: np.ndarray) -> np.ndarray:
    """Fixed point of p -> (p + M p) / sum(p + M p) on the simplex."""
    k = m.shape[0]
    p = np.full(k, 1.0 / k)
    for _ in range(FIXED_POINT_MAXITER):
        q = p + m @ p
        q /= q.sum()
        if np.max(np.abs(q - p)) < FIXED_POINT_TOL:
            return q
        p = q
    raise NoConvergenceError("price fixed-point iteration hit the cap")


def prices_on_support(t: Technology, b, z, binding) -> np.ndarray:
    """Equilibrium prices supported on the binding rows.

    ``z`` must solve the binding system restricted to the binding index set
    (strictly positive there, slack elsewhere); prices are the fixed point
    of the weighted simplex map on the binding block, extended by zero, and
    the fixed-point multiplier is checked against one.
    """
    b = _vector(b, "supply vector")
    z = _vector(z, "solution vector")
    idx = sorted(int(i) for i in binding)
    if not idx:
        raise HypothesisViolatedError("binding set is empty")
    if any(i < 0 or i >= t.n for i in idx):
        raise ValueError("binding set contains out-of-range indices")
    rest = [i for i in range(t.n) if i not in idx]
    minor = t.a[np.ix_(idx, idx)]
    if not is_indecomposable(minor):
        raise DecomposableMinorError("binding-set minor is decomposable")

    scale = np.maximum(1.0, np.abs(b))
    z_masked = np.zeros(t.n)
    z_masked[idx] = z[idx]
    image = t.a @ z_masked
    if np.any(np.abs(image[idx] - b[idx]) > BINDING_TOL * scale[idx]):
        raise HypothesisViolatedError("z does not solve the binding equations on the binding set")
    if rest and np.any(image[rest] >= b[rest]):
        raise HypothesisViolatedError("z is not strictly slack outside the binding set")
    if np.any(z[idx] <= POSITIVE_TOL * max(1.0, float(np.max(z)))):
        raise HypothesisViolatedError("z must be strictly positive on the binding set")

    y = z[idx] / b[idx]
    m = y[:, None] * minor.T
    p_block = _simplex_power_iteration(m)
    multiplier = float(np.sum(m @ p_block))
    if abs(multiplier - 1.0) > MULTIPLIER_TOL:
        raise HypothesisViolatedError(
            f"fixed-point multiplier {multiplier:.3e} differs from one beyond tolerance"
        )
    p = np.zeros(t.n)
    p[idx] = p_block
    return p


def prices_from_consumption(t: Technology, z) -> np.ndarray:
    """Prices clearing the real-consumption vector b_bar = A z.

    Existence is guaranteed for a strictly positive matrix (or a positive
    indecomposable matrix with strictly positive z); the construction is
    attempted for any non-negative data and verified a posteriori.
    """
    z = _vector(z, "consumption weights")
    if z.shape[0] != t.n:
        raise ValueError("vector length does not match sector count")
    if np.any(z < 0.0) or not np.any(z > 0.0):
        raise HypothesisViolatedError("z must be non-negative and nonzero")
    b_bar = t.a @ z
    supported = z > 0.0
    if np.any(b_bar[supported] <= 0.0):
        raise HypothesisViolatedError("real consumption vanishes on a supported sector")
    weights = np.where(supported, z / np.where(b_bar > 0.0, b_bar, 1.0), 0.0)
    m = weights[:, None] * t.a.T
    p = _simplex_power_iteration(m)
    multiplier = float(np.sum(m @ p))
    if abs(multiplier - 1.0) > MULTIPLIER_TOL:
        raise HypothesisViolatedError(
            f"fixed-point multiplier {multiplier:.3e} differs from one beyond tolerance"
        )
    # reconstruction and clearing checks
    denom = t.a.T @ p
    scale = max(1.0, float(np.max(np.abs(z))))
    recon_gap = 0.0
    for i in range(t.n):
        if denom[i] > 0.0:
            recon_gap = max(recon_gap, abs(b_bar[i] * p[i] / denom[i] - z[i]))
        elif z[i] > 0.0:
            raise HypothesisViolatedError("input cost vanishes on a supported sector")
    if recon_gap > CLEARING_TOL * scale:
        raise HypothesisViolatedError("price reconstruction of z failed beyond tolerance")
    residual = clearing_residual_for(t, b_bar, p)
    if float(np.max(np.abs(residual))) > CLEARING_TOL * max(1.0, float(np.max(np.abs(b_bar)))):
        raise HypothesisViolatedError("consumption clearing equations fail at the fixed point")
    return p


def clearing_residual_for(t: Technology, b_bar: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Residual of sum_i a_ki b_bar_i p_i / <A_i, p> - b_bar_k (zero-price rows drop out)."""
    denom = t.a.T @ p
    terms = np.zeros(t.n)
    for i in range(t.n):
        value = b_bar[i] * p[i]
        if value != 0.0:
            terms[i] = value / denom[i] if denom[i] > 0.0 else np.inf
    return t.a @ terms - b_bar


def no_equilibrium_certificate(t: Technology, b, z, binding, slack) -> bool:
    """True when this z admits no corresponding equilibrium prices.

    A solution carrying positive weight on a slack row cannot be reproduced
    from any price vector on the simplex, so markets cannot clear around it.
    """
    b = _vector(b, "supply vector")
    z = _vector(z, "solution vector")
    idx = sorted(int(i) for i in binding)
    rest = sorted(int(j) for j in slack)
    image = t.a @ z
    scale = np.maximum(1.0, np.abs(b))
    if np.any(np.abs(image[idx] - b[idx]) > BINDING_TOL * scale[idx]):
        raise HypothesisViolatedError("z does not bind on the stated binding set")
    if rest and np.any(image[rest] >= b[rest]):
        raise HypothesisViolatedError("z is not strictly slack on the stated slack set")
    if not rest:
        return False
    threshold = POSITIVE_TOL * max(1.0, float(np.max(np.abs(z))))
    return bool(np.any(z[rest] > threshold))


def excess_supply(b, b_bar, p_u) -> float:
    """Value share of unsold supply: R = <b - b_bar, p_u> / <b, p_u>."""
    b = _vector(b, "supply vector")
    b_bar = _vector(b_bar, "real consumption vector")
    p_u = _vector(p_u, "price vector")
    if np.any(p_u < 0.0):
        raise ValueError("prices must be non-negative")
    if np.any(b_bar > b + 1e-9 * np.maximum(1.0, np.abs(b))):
        raise ValueError("real consumption exceeds supply")
    total = float(b @ p_u)
    if total <= 0.0:
        raise ZeroValueError("the value of supply <b, p_u> vanishes")
    level = float((b - b_bar) @ p_u) / total
    return max(level, 0.0)


def _support_compatible(t: Technology, b, z, idx: list[int], rest: list[int]) -> bool:
    scale = np.maximum(1.0, np.abs(b))
    z_masked = np.zeros(t.n)
    z_masked[idx] = z[idx]
    image = t.a @ z_masked
    if np.any(np.abs(image[idx] - b[idx]) > BINDING_TOL * scale[idx]):
        return False
    if rest and np.any(image[rest] >= b[rest]):
        return False
    if np.any(z[idx] <= POSITIVE_TOL * max(1.0, float(np.max(z)))):
        return False
    return is_indecomposable(t.a[np.ix_(idx, idx)])


def assemble_equilibrium(t: Technology, b) -> EquilibriumState:
    """Minimum-excess equilibrium state for supply b.

    Runs the quadratic program, derives the binding set, builds prices on
    the binding support when the solution allows it (falling back to the
    real-consumption fixed point otherwise), fills generalized prices with
    input costs on slack rows, and evaluates the excess-supply level.
    """
    b = _vector(b, "supply vector")
    try:
        z0 = min_excess_qp(t, b)
    except ModelError as exc:
        raise PipelineError("min-excess-qp", exc) from exc

    idx = list(binding_rows(t, b, z0))
    rest = [i for i in range(t.n) if i not in idx]
    if not idx:
        raise PipelineError(
            "binding-set", HypothesisViolatedError("no binding rows at the program optimum")
        )

    if _support_compatible(t, b, z0, idx, rest):
        z_used = np.zeros(t.n)
        z_used[idx] = z0[idx]
        try:
            p = prices_on_support(t, b, z_used, idx)
        except ModelError as exc:
            raise PipelineError("prices-on-support", exc) from exc
        p_u = p.copy()
        for j in rest:
            cost = float(t.a[idx, j] @ p[idx])
            p_u[j] = cost if cost > 0.0 else 1.0
        mode = "support"
    else:
        z_used = z0
        try:
            p = prices_from_consumption(t, z0)
        except ModelError as exc:
            raise PipelineError("prices-from-consumption", exc) from exc
        p_u = p
        mode = "generalized"

    b_bar = t.a @ z_used
    try:
        level = excess_supply(b, np.minimum(b_bar, b), p_u)
    except ModelError as exc:
        raise PipelineError("excess-supply", exc) from exc
    return EquilibriumState(
        z=z_used,
        binding=tuple(idx),
        slack=tuple(rest),
        p=p,
        b_bar=b_bar,
        p_u=p_u,
        excess_level=level,
        mode=mode,
    )
