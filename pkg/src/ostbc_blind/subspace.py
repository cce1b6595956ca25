"""Ambiguity subspaces, their channel lift, and Hurwitz-Radon structure.

Two spaces are computed per code: the channel-independent invariant space
(kernel of the full ambiguity map) and, for a concrete channel
realization, the generally larger channel space (kernel of the map
composed with the channel matrix). Both consist of matrices that are
orthogonal up to a positive constant, always contain the identity, and
carry a basis {I} + Hurwitz-Radon family.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .embed import null_space, vec
from .gamma import channel_kernel_matrix, gamma_operator


class SubspaceError(RuntimeError):
    """A computed subspace violates a structural guarantee."""


class AmbiguityStructureError(RuntimeError):
    """A subspace element breaks the orthogonal-up-to-constant structure."""


def rho(n):
    """Hurwitz-Radon function: n = 2^(4d+c) * odd maps to 2^c + 8d."""
    if n < 1:
        raise ValueError(f"rho is defined for positive integers, got {n}")
    a = 0
    while n % 2 == 0:
        n //= 2
        a += 1
    d, c = divmod(a, 4)
    return 2 ** c + 8 * d


@dataclass(frozen=True)
class AmbiguitySubspace:
    """Orthonormal basis of an ambiguity space of K x K matrices.

    The basis is orthonormal under the Frobenius inner product, with the
    normalized identity I/sqrt(K) always first; the signs of the other
    elements are fixed so their first significant entry (row-major scan)
    is positive.
    """

    code: object
    kind: str                      # "invariant" or "channel"
    M: object                      # receive antennas for kind="channel", else None
    dim: int
    basis: tuple = field(repr=False)   # K x K real matrices
    tol: float
    channel: object = None         # ChannelRealization for kind="channel"
    seed: object = None            # seed the channel was drawn from, if any

    @property
    def identifiable(self):
        """True when the space is trivial (spanned by the identity alone)."""
        return self.dim == 1


def _fix_sign(b, rel=1e-8):
    flat = b.ravel(order="C")
    cutoff = rel * np.max(np.abs(flat))
    for entry in flat:
        if abs(entry) > cutoff:
            return b if entry > 0 else -b
    return b


def _identity_first_basis(kernel, K):
    """Rotate a kernel basis so I/sqrt(K) leads, rest Frobenius-orthonormal."""
    dim = kernel.shape[1]
    u0 = vec(np.eye(K)) / np.sqrt(K)
    resid = np.linalg.norm(u0 - kernel @ (kernel.T @ u0))
    if resid > 1e-10:
        raise SubspaceError(
            f"identity not contained in the computed span (residual {resid:.3e})")
    taken = [u0]
    for col in kernel.T:
        w = col.copy()
        for _ in range(2):
            for b in taken:
                w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-6:
            taken.append(w / nrm)
        if len(taken) == dim:
            break
    if len(taken) != dim:
        raise SubspaceError("orthonormalization lost kernel directions")
    mats = [taken[0].reshape((K, K), order="F")]
    mats += [_fix_sign(w.reshape((K, K), order="F")) for w in taken[1:]]
    return tuple(m for m in mats)


def _kernel_subspace(op, code, tol, kind, M=None, channel=None, seed=None):
    kernel = null_space(op, tol)
    basis = _identity_first_basis(kernel, code.K)
    smax = np.linalg.svd(op, compute_uv=False)[0] if op.size else 0.0
    for b in basis:
        residual = np.linalg.norm(op @ vec(b))
        if residual > tol * max(smax, 1.0):
            raise SubspaceError(
                f"basis element leaves kernel residual {residual:.3e} "
                f"above tol*scale {tol * max(smax, 1.0):.3e}")
    for b in basis:
        b.setflags(write=False)
    return AmbiguitySubspace(code, kind, M, kernel.shape[1], basis, tol,
                             channel=channel, seed=seed)


def compute_bstar(code, tol=1e-9):
    """Channel-independent ambiguity space of a code.

    Kernel of the assembled ambiguity operator, reshaped to K x K
    matrices and normalized identity-first. Its dimension is 1 exactly
    when the code is identifiable from second-order statistics.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return _kernel_subspace(gamma_operator(code).G, code, tol, "invariant")


def compute_bspace(code, channel, tol=1e-9, seed=None):
    """Ambiguity space of a concrete channel realization.

    Kernel of B -> underline(gamma(B) @ H0). Always contains the
    channel-independent space; equals it with probability one once the
    receive-antenna count reaches the code's critical value.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if channel.H0.shape[0] != code.N:
        raise ValueError(
            f"channel has {channel.H0.shape[0]} transmit antennas, "
            f"code {code.name!r} expects {code.N}")
    if np.linalg.norm(channel.h0) == 0.0:
        raise ValueError("zero channel matrix is rejected")
    op = channel_kernel_matrix(code, channel.H0)
    return _kernel_subspace(op, code, tol, "channel",
                            M=channel.M, channel=channel, seed=seed)


def lift_to_channel(rc, h0, B):
    """Map an ambiguity matrix to its channel vector.

    Computes Phi^T ((B^T (x) I) / K) Phi h0 without forming the Kronecker
    product. For B in the ambiguity space of h0 the lifted vector h
    satisfies A(h) = A(h0) B; restricted to that space the map is an
    isometry up to the factor |h0|/sqrt(K).
    """
    h0 = np.asarray(h0, dtype=float)
    if h0.shape != (rc.channel_len,):
        raise ValueError(f"channel vector has shape {h0.shape}, "
                         f"expected ({rc.channel_len},)")
    B = np.asarray(B, dtype=float)
    K = rc.code.K
    if B.shape != (K, K):
        raise ValueError(f"B has shape {B.shape}, expected ({K}, {K})")
    y = (rc.Phi_stacked @ h0).reshape(K, rc.block_rows)   # rows Phi_k h0
    mixed = B.T @ y
    phi = np.stack(rc.Phi)                                # (K, 2ML, 2MN)
    return np.einsum("kab,ka->b", phi, mixed) / K


@dataclass(frozen=True)
class HurwitzRadonBasis:
    """Identity plus an anticommuting family of skew square roots of -I."""

    identity: np.ndarray
    family: tuple
    max_skew_residual: float
    max_involution_residual: float
    max_anticommute_residual: float

    @property
    def family_size(self):
        return len(self.family)


def hr_basis(sub):
    """Extract the {identity} + Hurwitz-Radon basis from an ambiguity space.

    Gram-Schmidt within the span under the Frobenius inner product,
    seeded with the identity; every later element is rescaled to an
    orthogonal matrix. Raises :class:`AmbiguityStructureError` when a
    rescaled element is not orthogonal-up-to-constant within 1e-8, which
    signals a numerically corrupted subspace.
    """
    K = sub.code.K
    u0 = vec(np.eye(K)) / np.sqrt(K)
    cols = [vec(b) for b in sub.basis]
    span = np.column_stack(cols)
    resid = np.linalg.norm(u0 - span @ (span.T @ u0))
    if resid > 1e-8:
        raise AmbiguityStructureError(
            f"identity not in subspace span (residual {resid:.3e})")
    taken = [u0]
    for col in cols:
        w = col.copy()
        for _ in range(2):
            for b in taken:
                w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-6:
            taken.append(w / nrm)
    family = []
    for w in taken[1:]:
        b = w.reshape((K, K), order="F")
        c = np.trace(b.T @ b) / K
        dev = np.linalg.norm(b.T @ b - c * np.eye(K))
        if dev > 1e-8 * max(c, 1e-300):
            raise AmbiguityStructureError(
                f"subspace element is not orthogonal up to a constant: "
                f"deviation {dev:.3e} at scale {c:.3e}")
        family.append(_fix_sign(b / np.sqrt(c)))
    if len(family) > rho(K) - 1:
        raise AmbiguityStructureError(
            f"family of {len(family)} exceeds the Hurwitz-Radon bound {rho(K) - 1}")
    skew = 0.0
    invol = 0.0
    anti = 0.0
    eye = np.eye(K)
    for i, a in enumerate(family):
        skew = max(skew, np.linalg.norm(a.T + a))
        invol = max(invol, np.linalg.norm(a @ a + eye))
        for b in family[i + 1:]:
            anti = max(anti, np.linalg.norm(a @ b + b @ a))
    return HurwitzRadonBasis(eye, tuple(family), float(skew), float(invol),
                             float(anti))


def check_pure_rotation(B, tol=1e-8):
    """Test whether B is a rotation up to a positive constant.

    Returns ``(c, is_rotation)`` with c = tr(B^T B)/K; the flag is true
    iff |B^T B - c I| <= tol * c and det(B) > 0.
    """
    B = np.asarray(B, dtype=float)
    if np.linalg.norm(B) == 0.0:
        raise ValueError("zero matrix is rejected")
    K = B.shape[0]
    c = float(np.trace(B.T @ B) / K)
    dev = np.linalg.norm(B.T @ B - c * np.eye(K))
    return c, bool(dev <= tol * c and np.linalg.det(B) > 0)


def principal_angles(basis_a, basis_b):
    """Principal angles (radians) between the spans of two matrix bases."""
    qa = np.column_stack([vec(b) for b in basis_a])
    qb = np.column_stack([vec(b) for b in basis_b])
    return subspace_angles(qa, qb)


def spans_match(basis_a, basis_b, angle_tol=1e-8):
    """True when both bases span the same space within an angular tolerance."""
    if len(basis_a) != len(basis_b):
        return False
    return float(np.max(principal_angles(basis_a, basis_b))) <= angle_tol


def subspace_report(sub, hr=None):
    """JSON-ready report for a computed ambiguity subspace."""
    if hr is None:
        hr = hr_basis(sub)
    return {
        "code": sub.code.name,
        "kind": sub.kind,
        "M": sub.M,
        "seed": sub.seed,
        "dim": sub.dim,
        "tol": sub.tol,
        "basis": [[float(x) for x in b.ravel(order="C")] for b in sub.basis],
        "hr": {
            "family_size": hr.family_size,
            "max_skew_residual": hr.max_skew_residual,
            "max_anticommute_residual": hr.max_anticommute_residual,
        },
    }
