"""Real embeddings of complex matrices and dense kernel computation.

Everything downstream works on real vectors and matrices obtained from
complex ones through two embeddings: ``underline`` turns an m x n complex
matrix into a real vector of length 2mn, ``overline`` into a real 2m x 2n
matrix that multiplies like the original.
"""

import numpy as np


def vec(m):
    """Stack the columns of a matrix into one vector (column-major)."""
    return np.asarray(m).ravel(order="F")


def unvec(v, rows, cols):
    """Inverse of :func:`vec` for a known target shape."""
    return np.asarray(v).reshape((rows, cols), order="F")


def underline(p):
    """Map a complex m x n matrix to a real vector of length 2mn.

    The real and imaginary parts are stacked row-blockwise (Re above Im)
    and the resulting 2m x n matrix is vectorized column-major.
    """
    p = np.asarray(p, dtype=complex)
    if p.ndim != 2:
        p = np.atleast_2d(p)
    return vec(np.vstack([p.real, p.imag]))


def matrix_from_underline(v, rows, cols):
    """Recover the complex ``rows x cols`` matrix whose embedding is ``v``."""
    stacked = unvec(v, 2 * rows, cols)
    return stacked[:rows] + 1j * stacked[rows:]


def overline(a):
    """Map a complex m x n matrix to the real 2m x 2n block matrix

        [[Re a, -Im a],
         [Im a,  Re a]]

    which represents multiplication by ``a`` on underlined vectors.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        a = np.atleast_2d(a)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def kron(a, b):
    """Kronecker (tensor) product of two real matrices."""
    return np.kron(np.asarray(a), np.asarray(b))


def null_space(m, rel_tol=1e-9):
    """Orthonormal basis of the numerical kernel of a real matrix.

    Singular directions whose singular value falls below
    ``rel_tol * sigma_max`` count as kernel. For the zero matrix the
    full identity basis is returned.

    Args:
        m: real matrix, shape (r, n).
        rel_tol: relative singular-value threshold, must be positive.

    Returns:
        Array of shape (n, k) with orthonormal columns spanning the kernel.
    """
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    m = np.atleast_2d(np.asarray(m, dtype=float))
    n = m.shape[1]
    if m.size == 0:
        return np.eye(n)
    s = np.linalg.svd(m, compute_uv=False)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s >= rel_tol * smax))
    return vh[rank:].T.copy()
