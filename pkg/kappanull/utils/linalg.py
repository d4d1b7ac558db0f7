"""
Small dense linear-algebra helpers
Rank and kernel decisions by singular-value thresholding at rtol * sigma_max
"""
from typing import NamedTuple, Optional

import numpy as np
from scipy import linalg


class KernelSplit(NamedTuple):
    """Result of a thresholded SVD"""
    basis: np.ndarray          # (n, k) orthonormal kernel basis
    singular_values: np.ndarray
    rank: int
    sigma_max: float
    residual: float            # largest kernel singular value / threshold scale


def kernel_basis(matrix: np.ndarray, rtol: float, scale: Optional[float] = None) -> KernelSplit:
    """
    Orthonormal kernel basis of a (rows, n) matrix

    A singular value counts as zero when it is <= rtol * scale, where scale
    defaults to sigma_max. When sigma_max is 0 the whole space is the kernel.

    Args:
        matrix: Operator matrix acting on column vectors of length n
        rtol: Relative threshold
        scale: Reference magnitude for the threshold (must be >= sigma_max)

    Returns:
        KernelSplit
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[1]
    if matrix.size == 0:
        return KernelSplit(np.eye(n), np.zeros(0), 0, 0.0, 0.0)

    _, s, vh = linalg.svd(matrix, full_matrices=True)
    sigma_max = float(s[0]) if s.size else 0.0
    if sigma_max == 0.0:
        return KernelSplit(np.eye(n), s, 0, 0.0, 0.0)

    reference = sigma_max if scale is None else max(float(scale), sigma_max)
    rank = int(np.sum(s > rtol * reference))
    # Pad: a wide matrix has fewer singular values than columns
    padded = np.zeros(n)
    padded[: s.size] = s
    kernel_sv = padded[rank:]
    residual = float(kernel_sv.max() / reference) if kernel_sv.size else 0.0
    return KernelSplit(vh[rank:].T.copy(), s, rank, sigma_max, residual)


def column_span(vectors: np.ndarray, rtol: float) -> np.ndarray:
    """
    Orthonormal basis (columns) of the span of the given columns

    Args:
        vectors: (n, k) matrix whose columns span the subspace
        rtol: Relative rank threshold

    Returns:
        (n, r) matrix with orthonormal columns
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    u, s, _ = linalg.svd(vectors, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((vectors.shape[0], 0))
    rank = int(np.sum(s > rtol * s[0]))
    return u[:, :rank]


def metric_roots(gram: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Symmetric square root of an SPD Gram matrix and its inverse

    Args:
        gram: Symmetric positive definite matrix

    Returns:
        (gram^{1/2}, gram^{-1/2})
    """
    w, v = linalg.eigh(gram)
    root = (v * np.sqrt(w)) @ v.T
    inv_root = (v / np.sqrt(w)) @ v.T
    return root, inv_root


def max_principal_angle(a: np.ndarray, b: np.ndarray, gram: np.ndarray | None = None) -> float:
    """
    Largest principal angle between two column spans

    Subspaces of different dimension are at angle pi/2. With a Gram matrix
    the angles are measured in that inner product.

    Args:
        a: (n, p) basis
        b: (n, q) basis
        gram: Optional inner product

    Returns:
        Angle in radians
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[1] != b.shape[1]:
        return float(np.pi / 2)
    if a.shape[1] == 0:
        return 0.0
    if gram is not None:
        root, _ = metric_roots(np.asarray(gram, dtype=float))
        a, b = root @ a, root @ b
    return float(np.max(linalg.subspace_angles(a, b)))
