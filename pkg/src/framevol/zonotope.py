"""Zonotope volume of cube projections and the first-order machinery around it.

The volume of the zonotope sum_i [0, v_i] generated by a frame is the sum
of the absolute k x k minors over all ascending k-subsets of generators.
On top of that this module provides the sign vectors sigma_S(i), the
first-order optimality residual |<sigma_S(i), d_S(j)> - <v_i, v_j>|, the
hyperplane projection volumes of the necessary condition, the McMullen
duality check against the complement frame, and the classical upper
bounds for tight frames.
"""

from __future__ import annotations

from math import comb, fsum, gamma, pi, sqrt
from typing import NamedTuple

import numpy as np

from .exterior import Form, _dets, _owner_first_minors, _subset_array, subset_minors
from .frames import Frame, _require_tight, complement_frame, is_tight

# Minors below this fraction of the largest minor count as exact zeros for
# sign purposes; maximizers have all minors bounded away from zero, so the
# threshold only matters far from optima.
ZERO_MINOR_REL = 1e-12


class DegenerateFrameError(ValueError):
    """The frame has zero zonotope volume (or a zero direction was requested)."""


class SignVector(NamedTuple):
    owner: int
    form: Form
    volume: float


class McMullenCheck(NamedTuple):
    volume: float
    dual_volume: float
    gap: float


class BoundPair(NamedTuple):
    binomial: float
    ball: float


class VolumeReport(NamedTuple):
    n: int
    k: int
    volume: float
    dual_volume: float | None
    bounds: BoundPair
    minors: tuple[float, ...] | None


def _abs_minor_sum(vectors: np.ndarray) -> float:
    """Shephard sum over all ascending subsets of size vectors.shape[1]."""
    n, k = vectors.shape
    if k == 0:
        return 1.0
    return fsum(np.abs(_dets(vectors[_subset_array(n, k)])))


def volume(frame: Frame) -> float:
    """Zonotope volume sum_L |d_S(L)| over ascending k-subsets L."""
    return _abs_minor_sum(frame.vectors)


def _sign_matrix(minors: np.ndarray) -> np.ndarray:
    """Minor signs with near-zero minors (relative threshold) snapped to 0."""
    scale = np.max(np.abs(minors)) if minors.size else 0.0
    signs = np.sign(minors)
    if scale > 0.0:
        signs[np.abs(minors) < ZERO_MINOR_REL * scale] = 0.0
    return signs


def sign_vector(frame: Frame, i: int) -> SignVector:
    """sigma_S(i): coordinate at L is sign(det(v_i, v_L)) / F(S), zero on zero minors."""
    if not 1 <= i <= frame.n:
        raise ValueError(f"owner index {i} out of [1, {frame.n}]")
    total = volume(frame)
    if total <= 0.0:
        raise DegenerateFrameError("zonotope volume is zero")
    minors = _owner_first_minors(frame.vectors)
    coeffs = _sign_matrix(minors)[i - 1] / total
    return SignVector(owner=i, form=Form(frame.n, frame.k - 1, coeffs), volume=total)


def first_order_residual(frame: Frame) -> float:
    """max_{i,j} |<sigma_S(i), d_S(j)> - <v_i, v_j>|; zero at local maximizers."""
    _require_tight(frame)
    vectors = frame.vectors
    minors = _owner_first_minors(vectors)
    total = fsum(np.abs(d) for d in subset_minors(frame))
    if total <= 0.0:
        raise DegenerateFrameError("zonotope volume is zero")
    sigma = _sign_matrix(minors) / total
    return float(np.max(np.abs(sigma @ minors.T - vectors @ vectors.T)))


def _householder_complement_basis(direction: np.ndarray) -> np.ndarray:
    """Orthonormal basis of direction^perp: trailing columns of a Householder map."""
    k = direction.shape[0]
    unit = direction / np.linalg.norm(direction)
    sign = 1.0 if unit[0] >= 0.0 else -1.0
    w = unit.copy()
    w[0] += sign
    reflector = np.eye(k) - (2.0 / (w @ w)) * np.outer(w, w)
    return reflector[:, 1:]


def hyperplane_projection_volume(frame: Frame, i: int) -> float:
    """(k-1)-volume of the zonotope projected onto v_i^perp inside R^k.

    Computed by the Shephard sum at level k-1 in a deterministic
    (Householder) orthonormal basis of v_i^perp; at first-order-critical
    frames it equals |v_i| F(S).
    """
    if not 1 <= i <= frame.n:
        raise ValueError(f"index {i} out of [1, {frame.n}]")
    direction = frame.vectors[i - 1]
    norm = float(np.linalg.norm(direction))
    if norm <= 0.0:
        raise DegenerateFrameError(f"vector {i} is zero; no projection direction")
    if frame.k == 1:
        return 1.0  # projection onto the zero subspace is a point
    basis = _householder_complement_basis(direction)
    return _abs_minor_sum(frame.vectors @ basis)


def mcmullen_check(frame: Frame) -> McMullenCheck:
    """Volumes of a tight frame and its complement frame, which must agree."""
    _require_tight(frame)
    primal = volume(frame)
    dual = volume(complement_frame(frame))
    return McMullenCheck(primal, dual, abs(primal - dual))


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit ball in R^dim."""
    if dim < 0:
        raise ValueError("dimension must be nonnegative")
    return pi ** (dim / 2.0) / gamma(dim / 2.0 + 1.0)


def bounds(n: int, k: int) -> BoundPair:
    """Upper bounds sqrt(C(n, k)) and the ball-ratio bound for cube projections."""
    if not n >= k >= 1:
        raise ValueError(f"need n >= k >= 1, got n={n}, k={k}")
    binomial = sqrt(comb(n, k))
    ball = (
        unit_ball_volume(k - 1) ** k
        / unit_ball_volume(k) ** (k - 1)
        * (n / k) ** (k / 2.0)
    )
    return BoundPair(binomial, ball)


def volume_report(frame: Frame, include_minors: bool = False) -> VolumeReport:
    """Volume, dual volume (when n > k), bounds, and optionally the raw minors."""
    primal = volume(frame)
    dual = None
    if frame.n > frame.k and is_tight(frame).ok:
        dual = mcmullen_check(frame).dual_volume
    minors = None
    if include_minors:
        minors = tuple(float(abs(d)) for d in subset_minors(frame))
    return VolumeReport(
        n=frame.n,
        k=frame.k,
        volume=primal,
        dual_volume=dual,
        bounds=bounds(frame.n, frame.k),
        minors=minors,
    )
