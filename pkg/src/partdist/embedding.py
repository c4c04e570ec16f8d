"""Metric multidimensional scaling by stress majorization.

The embedding starts from classical MDS (eigendecomposition of the
double-centered squared-distance matrix), which is deterministic, then
refines with SMACOF iterations.  Majorization guarantees the squared
stress never increases; if floating-point rounding ever would produce
an increase at convergence, the previous iterate is kept and iteration
stops, so the reported stress history is monotone by construction.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .ensemble import DistanceMatrix
from .errors import InvalidArgumentError

__all__ = ["EmbeddingCoords", "mds", "classical_mds", "save_coords_csv"]


@dataclass(frozen=True)
class EmbeddingCoords:
    """n-by-d coordinates (centroid at the origin) and the final stress."""

    points: np.ndarray
    final_stress: float
    stress_history: tuple[float, ...]


def _as_array(D) -> np.ndarray:
    if isinstance(D, DistanceMatrix):
        return D.values
    arr = np.asarray(D, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidArgumentError("distance matrix must be square")
    if not np.allclose(arr, arr.T, atol=1e-12):
        raise InvalidArgumentError("distance matrix must be symmetric")
    if np.any(np.diag(arr) != 0):
        raise InvalidArgumentError("distance matrix diagonal must be zero")
    if np.any(arr < 0):
        raise InvalidArgumentError("distance matrix entries must be nonnegative")
    return arr


def classical_mds(D, dim: int) -> np.ndarray:
    """Torgerson's classical scaling: top eigenvectors of -0.5*J*D^2*J."""
    arr = _as_array(D)
    n = arr.shape[0]
    centering = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * centering @ (arr**2) @ centering
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = evals[order][:dim]
    evecs = evecs[:, order][:, :dim]
    coords = evecs * np.sqrt(np.clip(evals, 0.0, None))
    if coords.shape[1] < dim:
        coords = np.hstack([coords, np.zeros((n, dim - coords.shape[1]))])
    return coords


def _stress(D: np.ndarray, X: np.ndarray) -> tuple[float, np.ndarray]:
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    resid = np.triu(D - dist, 1)
    return float((resid**2).sum()), dist


def mds(
    D,
    dim: int = 2,
    seed: int = 0,
    max_iters: int = 300,
    eps: float = 1e-6,
) -> EmbeddingCoords:
    """Embed a distance matrix into R^dim minimizing squared stress.

    ``seed`` is accepted for interface stability but unused: the
    classical-MDS initializer makes the whole computation deterministic.
    """
    if dim < 1:
        raise InvalidArgumentError("dim must be >= 1")
    if max_iters < 0:
        raise InvalidArgumentError("max_iters must be >= 0")
    arr = _as_array(D)
    n = arr.shape[0]
    if n == 1:
        pts = np.zeros((1, dim))
        return EmbeddingCoords(points=pts, final_stress=0.0, stress_history=(0.0,))

    X = classical_mds(arr, dim)
    X = X - X.mean(axis=0)
    stress, dist = _stress(arr, X)
    history = [stress]

    for _ in range(max_iters):
        if stress == 0.0:
            break
        # Guttman transform: X <- (1/n) B(X) X with B built from the
        # ratio of target to current distances (zero where coincident).
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dist > 0, arr / np.where(dist > 0, dist, 1.0), 0.0)
        b = -ratio
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        X_next = (b @ X) / n
        X_next = X_next - X_next.mean(axis=0)
        stress_next, dist_next = _stress(arr, X_next)
        if stress_next > stress:
            break  # numerical floor reached; keep the monotone iterate
        relative_drop = (stress - stress_next) / stress
        X, dist = X_next, dist_next
        stress = stress_next
        history.append(stress)
        if stress == 0.0 or relative_drop < eps:
            break

    # Cosmetic: align principal axes and fix signs for reproducibility.
    if n > dim:
        _, _, vt = np.linalg.svd(X, full_matrices=False)
        X = X @ vt.T
    for col in range(X.shape[1]):
        extreme = np.argmax(np.abs(X[:, col]))
        if X[extreme, col] < 0:
            X[:, col] = -X[:, col]
    return EmbeddingCoords(points=X, final_stress=stress, stress_history=tuple(history))


def save_coords_csv(coords: EmbeddingCoords, path) -> None:
    """Write embedding coordinates with header id,x,y[,z...]."""
    dims = coords.points.shape[1]
    names = ["x", "y", "z"] + [f"c{i}" for i in range(3, dims)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + names[:dims])
        for i, row in enumerate(coords.points):
            writer.writerow([i] + [repr(float(v)) for v in row])
