"""Pointwise multilinear algebra for almost Hermitian structures.

Conventions used throughout the package:

* tensors are dense numpy arrays; a rank-2 covariant tensor T stores
  T[a, b] = T(e_a, e_b) in the chart basis;
* an endomorphism (one index up) J stores J[l, k] = (J e_k)^l, so plain
  matrix-vector multiplication applies J;
* lowering an endomorphism uses T(X, Y) = g(T X, Y);
* the complex trace of a 2-tensor is sum_i T(F_i, J F_i) over any
  g-orthonormal frame {F_i}, which matches omega(X, Y) = g(JX, Y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UP = "u"
DOWN = "d"

_ZERO_GUARD = 1e-300


class TensorError(ValueError):
    """Raised on malformed tensor inputs (bad slot, wrong rank, non-SPD metric)."""


@dataclass(frozen=True)
class TensorValue:
    """A multilinear array at a point with per-slot variance markers."""

    entries: np.ndarray
    variance: tuple[str, ...]

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "variance", tuple(self.variance))
        if entries.ndim != len(self.variance):
            raise TensorError(
                f"variance length {len(self.variance)} != rank {entries.ndim}"
            )
        if entries.ndim > 0:
            dims = set(entries.shape)
            if len(dims) != 1:
                raise TensorError(f"non-cubic entries shape {entries.shape}")
            if entries.shape[0] % 2 != 0:
                raise TensorError("dimension must be even")
        for v in self.variance:
            if v not in (UP, DOWN):
                raise TensorError(f"bad variance marker {v!r}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0] if self.entries.ndim else 0

    @property
    def rank(self) -> int:
        return self.entries.ndim


@dataclass(frozen=True)
class PropertyFlags:
    """Thresholded structure flags of a rank-2 covariant tensor."""

    symmetric: bool
    skew: bool
    type11: bool
    type0220: bool
    residuals: tuple[float, float, float, float]


def check_spd(g: np.ndarray) -> None:
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise TensorError("metric must be a square matrix")
    if np.linalg.norm(g - g.T) > 1e-10 * max(1.0, np.linalg.norm(g)):
        raise TensorError("metric is not symmetric")
    if np.linalg.eigvalsh(g).min() <= 0:
        raise TensorError("metric is not positive definite")


def rel_norm(residual: np.ndarray, reference: np.ndarray) -> float:
    return float(
        np.linalg.norm(residual) / max(np.linalg.norm(reference), _ZERO_GUARD)
    )


# ---------------------------------------------------------------------------
# raw-array helpers (rank-2 covariant unless noted)


def sym2(T: np.ndarray) -> np.ndarray:
    return 0.5 * (T + T.T)


def skew2(T: np.ndarray) -> np.ndarray:
    return 0.5 * (T - T.T)


def part11(T: np.ndarray, J: np.ndarray) -> np.ndarray:
    """J-invariant part: (1/2)(T(X,Y) + T(JX,JY))."""
    return 0.5 * (T + J.T @ T @ J)


def part0220(T: np.ndarray, J: np.ndarray) -> np.ndarray:
    """J-anti-invariant part: (1/2)(T(X,Y) - T(JX,JY))."""
    return 0.5 * (T - J.T @ T @ J)


def compose_J(T: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Lowered composition (TJ)(X, Y) = T(JX, Y)."""
    return J.T @ T


def lower_endo(Tm: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Endomorphism Tm[l,k] to covariant T(X,Y) = g(T X, Y)."""
    return Tm.T @ g


def raise_endo(T: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Covariant T(X,Y) = g(T X, Y) back to endomorphism entries."""
    return np.linalg.inv(g) @ T.T


def omega_of(g: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Fundamental 2-form omega(X, Y) = g(JX, Y)."""
    return J.T @ g


# ---------------------------------------------------------------------------
# TensorValue operations


def raise_lower(T: TensorValue, g: np.ndarray, slot: int, direction: str) -> TensorValue:
    """Flip the variance of one slot by contracting with g or its inverse."""
    if not 0 <= slot < T.rank:
        raise TensorError(f"slot {slot} out of range for rank {T.rank}")
    if direction not in (UP, DOWN):
        raise TensorError(f"bad direction {direction!r}")
    check_spd(g)
    if T.variance[slot] == direction:
        return T
    metric = np.linalg.inv(g) if direction == UP else np.asarray(g, dtype=float)
    entries = np.tensordot(metric, T.entries, axes=([1], [slot]))
    entries = np.moveaxis(entries, 0, slot)
    variance = list(T.variance)
    variance[slot] = direction
    return TensorValue(entries, tuple(variance))


def _covariant_pair(T: TensorValue, g: np.ndarray, slot_a: int, slot_b: int) -> TensorValue:
    if slot_a == slot_b:
        raise TensorError("trace slots must differ")
    if T.rank < 2:
        raise TensorError("trace needs rank >= 2")
    for s in (slot_a, slot_b):
        if not 0 <= s < T.rank:
            raise TensorError(f"slot {s} out of range")
        T = raise_lower(T, g, s, DOWN)
    return T


def trace(T: TensorValue, g: np.ndarray, slot_a: int, slot_b: int) -> TensorValue:
    """Real trace over two covariant slots, sum_i T(..., F_i, ..., F_i, ...)."""
    T = _covariant_pair(T, g, slot_a, slot_b)
    gi = np.linalg.inv(g)
    entries = np.tensordot(T.entries, gi, axes=([slot_a, slot_b], [0, 1]))
    variance = tuple(v for i, v in enumerate(T.variance) if i not in (slot_a, slot_b))
    return TensorValue(entries, variance)


def complex_trace(
    T: TensorValue, g: np.ndarray, J: np.ndarray, slot_a: int, slot_b: int
) -> TensorValue:
    """Complex trace sum_i T(..., F_i, ..., J F_i, ...) over a g-orthonormal frame."""
    T = _covariant_pair(T, g, slot_a, slot_b)
    gi = np.linalg.inv(g)
    # insert J into slot_b, then real-trace the pair
    entries = np.tensordot(T.entries, np.asarray(J, dtype=float), axes=([slot_b], [0]))
    entries = np.moveaxis(entries, -1, slot_b)
    entries = np.tensordot(entries, gi, axes=([slot_a, slot_b], [0, 1]))
    variance = tuple(v for i, v in enumerate(T.variance) if i not in (slot_a, slot_b))
    return TensorValue(entries, variance)


def _require_rank2_cov(T: TensorValue) -> np.ndarray:
    if T.rank != 2 or T.variance != (DOWN, DOWN):
        raise TensorError("expected a rank-2 covariant tensor")
    return T.entries


def split_J(T: TensorValue, J: np.ndarray) -> tuple[TensorValue, TensorValue]:
    """Split into (1,1) and (0,2)+(2,0) parts under the J action."""
    arr = _require_rank2_cov(T)
    return (
        TensorValue(part11(arr, J), (DOWN, DOWN)),
        TensorValue(part0220(arr, J), (DOWN, DOWN)),
    )


def split_sym(T: TensorValue) -> tuple[TensorValue, TensorValue]:
    """Split into symmetric and skew parts."""
    arr = _require_rank2_cov(T)
    return TensorValue(sym2(arr), (DOWN, DOWN)), TensorValue(skew2(arr), (DOWN, DOWN))


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Deterministic g-orthonormal frame, columns F_i with g(F_i, F_j) = delta_ij.

    Gram-Schmidt on the coordinate basis in index order; realized through the
    Cholesky factor, which produces the same triangular frame.
    """
    check_spd(g)
    L = np.linalg.cholesky(np.asarray(g, dtype=float))
    return np.linalg.inv(L).T


def classify_2tensor(
    T: np.ndarray | TensorValue, g: np.ndarray, J: np.ndarray, tol: float = 1e-9
) -> PropertyFlags:
    """Relative residuals of T against its sym/skew/(1,1)/(0,2)+(2,0) parts."""
    arr = _require_rank2_cov(T) if isinstance(T, TensorValue) else np.asarray(T, dtype=float)
    ref = arr
    residuals = (
        rel_norm(arr - sym2(arr), ref),
        rel_norm(arr - skew2(arr), ref),
        rel_norm(arr - part11(arr, J), ref),
        rel_norm(arr - part0220(arr, J), ref),
    )
    return PropertyFlags(
        symmetric=residuals[0] < tol,
        skew=residuals[1] < tol,
        type11=residuals[2] < tol,
        type0220=residuals[3] < tol,
        residuals=residuals,
    )


# ---------------------------------------------------------------------------
# pointwise (g, J) pairs


class PointStructure:
    """A compatible pair (g, J) at a point, with omega(X,Y) = g(JX, Y)."""

    def __init__(self, g: np.ndarray, J: np.ndarray, tol: float = 1e-9):
        g = np.asarray(g, dtype=float)
        J = np.asarray(J, dtype=float)
        check_spd(g)
        n = g.shape[0]
        if n % 2 != 0:
            raise TensorError("dimension must be even")
        if rel_norm(J @ J + np.eye(n), np.eye(n)) > tol:
            raise TensorError("J*J != -Id")
        if rel_norm(J.T @ g @ J - g, g) > tol:
            raise TensorError("(g, J) not compatible")
        self.g = g
        self.J = J
        self.omega = omega_of(g, J)

    @property
    def dim(self) -> int:
        return self.g.shape[0]
