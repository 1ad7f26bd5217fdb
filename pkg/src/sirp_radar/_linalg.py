"""Dense Hermitian helpers used throughout the package.

Everything runs through one eigendecomposition-based code path so that
full-rank and rank-deficient (snapshot-starved) covariances are handled
identically: eigenvalues below a relative cutoff are treated as exact zeros.
"""

import numpy as np

_EPS = float(np.finfo(np.float64).eps)


def _eig_clipped(mat, rank_factor):
    w, u = np.linalg.eigh(mat)
    cut = rank_factor * _EPS * max(float(w[-1]), 0.0)
    w = np.where(w > cut, w, 0.0)
    return w, u


def hermitian_pinv(mat, rank_factor):
    """Moore-Penrose pseudoinverse of a Hermitian PSD matrix.

    rank_factor scales the machine-epsilon eigenvalue cutoff; pass
    max(matrix dim, snapshot count) so the tolerance tracks problem size.
    """
    w, u = _eig_clipped(mat, rank_factor)
    inv_w = np.where(w > 0.0, 1.0 / np.where(w > 0.0, w, 1.0), 0.0)
    return (u * inv_w) @ u.conj().T


def whitening_root(mat, rank_factor):
    """Hermitian square root of the pseudoinverse: W with W @ mat @ W ~= projector."""
    w, u = _eig_clipped(mat, rank_factor)
    inv_r = np.where(w > 0.0, 1.0 / np.sqrt(np.where(w > 0.0, w, 1.0)), 0.0)
    return (u * inv_r) @ u.conj().T


def hermitian_sqrt(mat):
    """Hermitian PSD square root (negative roundoff eigenvalues clipped to zero)."""
    w, u = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (u * np.sqrt(w)) @ u.conj().T
