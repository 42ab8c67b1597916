"""
Linear algebra helpers
Symmetric square roots, symmetrization and reproducible random matrices
"""
import hashlib

import numpy as np

from gausscert.exceptions import ConditioningError

# Eigenvalues in [-CLAMP_TOLERANCE * max, 0) are rounding noise
CLAMP_TOLERANCE = 1e-10


def symmetrize(matrix):
    """Return (A + A^T) / 2 as a float array"""
    matrix = np.asarray(matrix, dtype=float)
    return (matrix + matrix.T) / 2.0


def clamped_eigh(matrix, name='matrix'):
    """
    Symmetric eigendecomposition with negative rounding noise clamped to zero

    Args:
        matrix (ndarray): Symmetric matrix
        name (str): Label used in the conditioning error

    Returns:
        tuple: (eigenvalues, eigenvectors), eigenvalues ascending and >= 0

    Raises:
        ConditioningError: If an eigenvalue is more negative than the tolerance
    """
    eigvals, eigvecs = np.linalg.eigh(symmetrize(matrix))
    scale = max(float(np.max(np.abs(eigvals))), np.finfo(float).tiny) if eigvals.size else 1.0
    if eigvals.size and eigvals[0] < -CLAMP_TOLERANCE * scale:
        raise ConditioningError(
            f'{name} is not positive semidefinite (eigenvalue {eigvals[0]:.3e})',
            block=name
        )
    return np.clip(eigvals, 0.0, None), eigvecs


def psd_sqrt(matrix, name='matrix'):
    """Principal square root of a positive semidefinite matrix"""
    eigvals, eigvecs = clamped_eigh(matrix, name)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def nuclear_norm(matrix):
    """Sum of singular values; equals Tr((A^T A)^{1/2})"""
    return float(np.sum(np.linalg.svd(matrix, compute_uv=False)))


def random_orthogonal(n, rng):
    """
    Haar-distributed orthogonal matrix from QR of a Gaussian matrix

    Args:
        n (int): Dimension
        rng (numpy.random.Generator): Random generator

    Returns:
        ndarray: n x n orthogonal matrix
    """
    gaussian = rng.standard_normal((n, n))
    q, r = np.linalg.qr(gaussian)
    return q * np.sign(np.diag(r))


def stable_seed(*parts):
    """64-bit seed derived from a stable hash of the given parts"""
    text = ':'.join(str(part) for part in parts)
    digest = hashlib.blake2b(text.encode('utf-8'), digest_size=8).digest()
    return int.from_bytes(digest, 'big')
