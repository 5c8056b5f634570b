"""Frames and tight frames in R^k.

A frame is an ordered set of n spanning vectors of R^k, stored as the rows
of an (n, k) array.  A tight frame additionally satisfies
sum_i v_i v_i^T = I_k; equivalently its k x n matrix is a sub-matrix of an
orthogonal matrix of order n.  This module provides the frame operator,
whitening to a tight frame, the Gram projection, lifting to an orthonormal
basis of R^n, complement frames, the frame metric, seeded random tight
frames, and a JSON document format.
"""

from __future__ import annotations

import json
from math import sqrt
from typing import NamedTuple

import numpy as np

DEFAULT_TIGHT_TOL = 1e-9

# Relative eigenvalue floor below which the frame operator is treated as
# numerically singular instead of amplifying noise through A^(-1/2).
_EIG_FLOOR = 1e-14

_RANDOM_RETRIES = 8


class InvalidFrameError(ValueError):
    """The vectors do not form a frame (wrong shape or not spanning R^k)."""


class NotTightError(ValueError):
    """A tight frame was required but the tightness residual is too large."""


class EmptyComplementError(ValueError):
    """Complement requested for a frame with n == k."""


class TightnessCheck(NamedTuple):
    ok: bool
    residual: float


class Frame:
    """Ordered set of n vectors spanning R^k (rows of an immutable (n, k) array)."""

    __slots__ = ("vectors",)

    def __init__(self, vectors) -> None:
        arr = np.array(vectors, dtype=float)
        if arr.ndim != 2:
            raise InvalidFrameError(f"expected an (n, k) array of row vectors, got ndim={arr.ndim}")
        n, k = arr.shape
        if not n >= k >= 1:
            raise InvalidFrameError(f"need n >= k >= 1, got n={n}, k={k}")
        if not np.all(np.isfinite(arr)):
            raise InvalidFrameError("vectors must be finite")
        if np.linalg.matrix_rank(arr) < k:
            raise InvalidFrameError("vectors do not span R^k")
        arr.flags.writeable = False
        self.vectors = arr

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def k(self) -> int:
        return self.vectors.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        """The k x n matrix (v_1, ..., v_n) with the vectors as columns."""
        return self.vectors.T

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, k={self.k})"


class TightFrame(Frame):
    """Frame with sum_i v_i v_i^T = I_k within ``tol`` in Frobenius norm."""

    __slots__ = ()

    def __init__(self, vectors, tol: float = DEFAULT_TIGHT_TOL) -> None:
        super().__init__(vectors)
        residual = float(np.linalg.norm(self.vectors.T @ self.vectors - np.eye(self.k)))
        if residual > tol:
            raise NotTightError(f"tightness residual {residual:.3e} exceeds {tol:.1e}")


def frame_operator(frame: Frame) -> np.ndarray:
    """A_S = sum_i v_i v_i^T, a symmetric positive definite k x k matrix."""
    a = frame.vectors.T @ frame.vectors
    return 0.5 * (a + a.T)


def is_tight(frame: Frame, tol: float = DEFAULT_TIGHT_TOL) -> TightnessCheck:
    """Frobenius residual ||A_S - I_k|| and its comparison against ``tol``."""
    residual = float(np.linalg.norm(frame_operator(frame) - np.eye(frame.k)))
    return TightnessCheck(residual <= tol, residual)


def _require_tight(frame: Frame, tol: float = DEFAULT_TIGHT_TOL) -> None:
    if not isinstance(frame, TightFrame):
        check = is_tight(frame, tol)
        if not check.ok:
            raise NotTightError(f"tight frame required, residual {check.residual:.3e}")


def whiten(frame: Frame) -> tuple[np.ndarray, TightFrame]:
    """Whitening operator B_S = A_S^(-1/2) and the tight frame {B_S v_i}.

    B_S is the inverse symmetric square root of the frame operator, so
    B_S A_S B_S = I_k and the returned frame is tight.
    """
    a = frame_operator(frame)
    w, q = np.linalg.eigh(a)
    if w[0] <= _EIG_FLOOR * w[-1]:
        raise InvalidFrameError("frame operator is numerically singular")
    b = (q / np.sqrt(w)) @ q.T
    b = 0.5 * (b + b.T)
    return b, TightFrame(frame.vectors @ b)


def gram_projection(frame: Frame, tol: float = DEFAULT_TIGHT_TOL) -> np.ndarray:
    """Gram matrix P[i, j] = <v_i, v_j> of a tight frame.

    For tight frames this is the matrix of the orthogonal projection of R^n
    onto the row space of the frame matrix: symmetric, idempotent, trace k.
    """
    _require_tight(frame, tol)
    return frame.vectors @ frame.vectors.T


def lift_to_basis(frame: Frame) -> np.ndarray:
    """Complete a tight frame's k x n matrix to an n x n orthogonal matrix.

    The first k rows are the frame matrix unchanged (bit for bit), so the
    columns f_1, ..., f_n are an orthonormal basis of R^n whose projections
    onto the first k coordinates recover the frame vectors exactly.  The
    remaining rows are built by Gram-Schmidt against the standard basis with
    largest-residual pivoting, which fixes the (non-unique) completion
    deterministically.
    """
    _require_tight(frame)
    n, k = frame.n, frame.k
    u = np.zeros((n, n))
    u[:k] = frame.matrix
    for m in range(k, n):
        residuals = np.eye(n) - u[:m].T @ u[:m]
        j = int(np.argmax(np.linalg.norm(residuals, axis=0)))
        v = residuals[:, j]
        v = v - u[:m].T @ (u[:m] @ v)  # second pass keeps the completion orthonormal
        u[m] = v / np.linalg.norm(v)
    return u


def complement_frame(frame: Frame) -> TightFrame:
    """Tight frame of n vectors in R^(n-k) whose Gram projection is I_n - P^S.

    These are the columns of the completion rows of :func:`lift_to_basis`;
    the orthogonal gauge of the completion is fixed by the same
    deterministic pivoting.
    """
    if frame.n == frame.k:
        raise EmptyComplementError("complement of a basis (n == k) is empty")
    u = lift_to_basis(frame)
    return TightFrame(u[frame.k:].T)


def frame_distance(first: Frame, second: Frame) -> float:
    """sqrt(sum_i |v_i - w_i|^2) for frames of identical shape."""
    if first.vectors.shape != second.vectors.shape:
        raise ValueError(
            f"shape mismatch: {first.vectors.shape} vs {second.vectors.shape}"
        )
    return float(np.linalg.norm(first.vectors - second.vectors))


def random_tight_frame(n: int, k: int, seed: int | np.random.Generator) -> TightFrame:
    """Seed-deterministic tight frame: whitened columns of a Gaussian k x n matrix."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(_RANDOM_RETRIES):
        sample = rng.standard_normal((k, n))
        if np.linalg.matrix_rank(sample) == k:
            return whiten(Frame(sample.T))[1]
    raise InvalidFrameError(f"failed to sample a spanning {k} x {n} frame")


def frame_document(frame: Frame) -> dict:
    """The frame as a JSON-ready document {"n", "k", "vectors"} (row-major)."""
    return {
        "n": frame.n,
        "k": frame.k,
        "vectors": [[float(x) for x in row] for row in frame.vectors],
    }


def frame_to_json(frame: Frame) -> str:
    """Serialize to the frame JSON document; floats round-trip exactly."""
    return json.dumps(frame_document(frame))


def frame_from_json(text: str) -> Frame:
    """Parse a frame JSON document (inverse of :func:`frame_to_json`)."""
    doc = json.loads(text)
    try:
        n, k, vectors = int(doc["n"]), int(doc["k"]), doc["vectors"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed frame document: {exc}") from exc
    arr = np.asarray(vectors, dtype=float)
    if arr.shape != (n, k):
        raise ValueError(f"frame document claims shape ({n}, {k}), vectors are {arr.shape}")
    return Frame(arr)


def mercedes_frame() -> TightFrame:
    """The three-vector tight frame in R^2 at mutual angles of 120 degrees."""
    scale = sqrt(2.0 / 3.0)
    return TightFrame(
        scale
        * np.array(
            [
                [1.0, 0.0],
                [-0.5, sqrt(3.0) / 2.0],
                [-0.5, -sqrt(3.0) / 2.0],
            ]
        )
    )
