"""The bilinear ambiguity form and its matrix representation.

For a K x K real matrix B and a code with coefficient matrices C_k, the
block

    gamma_k(B) = (1/K) sum_{i,j} B[j,i] C_k C_i^H C_j  -  sum_l B[l,k] C_l

vanishes for every k exactly when B transports the code structure: B
belongs to the channel ambiguity space of a channel H precisely when the
stacked blocks annihilate H. Assembling the map B -> stacked blocks as an
explicit real matrix turns every ambiguity-space question into a kernel
computation.
"""

from dataclasses import dataclass, field

import numpy as np

from .embed import underline


def gamma_k(code, B, k):
    """Evaluate the k-th ambiguity block (0-based k) by the defining sums."""
    if not 0 <= k < code.K:
        raise IndexError(f"block index {k} out of range for K={code.K}")
    B = np.asarray(B, dtype=float)
    if B.shape != (code.K, code.K):
        raise ValueError(f"B has shape {B.shape}, expected ({code.K}, {code.K})")
    C = code.C
    acc = np.zeros((code.L, code.N), dtype=complex)
    for i in range(code.K):
        for j in range(code.K):
            acc += B[j, i] * (C[k] @ C[i].conj().T @ C[j])
    acc /= code.K
    for l in range(code.K):
        acc -= B[l, k] * C[l]
    return acc


def gamma(code, B):
    """Stack gamma_k(B) for k = 0..K-1 into one LK x N complex matrix."""
    return np.vstack([gamma_k(code, B, k) for k in range(code.K)])


def unit_gammas(code):
    """Ambiguity blocks of all K^2 unit matrices, in vec(B) column order.

    Entry p of the returned (K^2, LK, N) array is the stacked gamma of
    E_{rs} with r = p % K, s = p // K (column-major positions of vec).
    For the unit matrix the sums collapse to

        gamma_k(E_rs) = (1/K) C_k (C_s^H C_r) - [s == k] C_r.
    """
    K, L, N = code.K, code.L, code.N
    C = np.stack(code.C)                        # (K, L, N)
    CH = C.conj().transpose(0, 2, 1)            # (K, N, L)
    out = np.empty((K * K, L * K, N), dtype=complex)
    for p in range(K * K):
        r, s = p % K, p // K
        d_sr = CH[s] @ C[r]                     # (N, N)
        blocks = (C @ d_sr) / K                 # (K, L, N)
        blocks[s] -= C[r]
        out[p] = blocks.reshape(L * K, N)
    return out


@dataclass(frozen=True)
class GammaOperator:
    """Real matrix representation of the linear map B -> ambiguity blocks.

    ``G`` has shape (2*L*K*N, K^2); column p (vec(B) order) is the
    concatenation over k of underline(gamma_k(E_rs)). Its kernel,
    reshaped back to K x K matrices, is the channel-independent
    ambiguity space of the code.
    """

    code: object
    G: np.ndarray = field(repr=False)


def gamma_operator(code):
    """Assemble the matrix of B -> stacked real embeddings of gamma blocks."""
    K, L, N = code.K, code.L, code.N
    G = np.empty((2 * L * K * N, K * K))
    for p, stacked in enumerate(unit_gammas(code)):
        blocks = stacked.reshape(K, L, N)
        G[:, p] = np.concatenate([underline(b) for b in blocks])
    G.setflags(write=False)
    return GammaOperator(code, G)


def channel_kernel_matrix(code, H0):
    """Matrix of the map B -> underline(gamma(B) @ H0), acting on vec(B).

    Shape (2*L*K*M, K^2). Its kernel, reshaped to K x K matrices, is the
    ambiguity space of the channel realization H0.
    """
    H0 = np.asarray(H0, dtype=complex)
    M = H0.shape[1]
    K, L = code.K, code.L
    gam = unit_gammas(code)                     # (K^2, LK, N)
    prods = gam @ H0                            # (K^2, LK, M)
    out = np.empty((2 * L * K * M, K * K))
    for p in range(K * K):
        out[:, p] = underline(prods[p])
    return out
