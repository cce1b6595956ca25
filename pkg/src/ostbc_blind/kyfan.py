"""Trace maximization of Q^T P Q over matrices with orthonormal columns.

For symmetric P and Q running over m x q matrices with orthonormal
columns, the maximum of tr{Q^T P Q} is the sum of the q largest
eigenvalues, and the maximizers are exactly the Q whose column space
contains every eigenspace strictly above the q-th eigenvalue and lies
inside the span of eigenvectors at or above it. This module evaluates
the maximum, tests the maximizer characterization, and stress-tests the
bound with random samples.
"""

from dataclasses import dataclass, field

import numpy as np


class KyFanError(RuntimeError):
    """A sampled or constructed matrix violated the trace bound/structure."""


@dataclass(frozen=True)
class SpectrumSpec:
    """Eigendecomposition of a symmetric matrix with boundary indices.

    ``q_minus`` counts eigenvalues strictly above the q-th one and
    ``q_plus`` counts those equal to it or above (ties resolved with the
    degeneracy tolerance), so ``0 <= q_minus < q <= q_plus <= m``.
    """

    P: np.ndarray = field(repr=False)
    q: int
    eigenvalues: np.ndarray = field(repr=False)   # descending
    eigenvectors: np.ndarray = field(repr=False)  # columns match eigenvalues
    q_minus: int
    q_plus: int
    degeneracy_tol: float

    @property
    def m(self):
        return self.P.shape[0]

    @classmethod
    def from_matrix(cls, P, q, degeneracy_rtol=1e-8):
        P = np.asarray(P, dtype=float)
        m = P.shape[0]
        if P.shape != (m, m):
            raise ValueError(f"P must be square, got shape {P.shape}")
        scale = np.linalg.norm(P)
        if np.linalg.norm(P - P.T) > 1e-12 * max(scale, 1.0):
            raise ValueError("P must be symmetric")
        if not 1 <= q <= m:
            raise ValueError(f"q must lie in [1, {m}], got {q}")
        lam, V = np.linalg.eigh((P + P.T) / 2)
        lam, V = lam[::-1].copy(), V[:, ::-1].copy()
        tol = degeneracy_rtol * (np.max(np.abs(lam)) if m else 0.0)
        lam_q = lam[q - 1]
        q_minus = int(np.sum(lam > lam_q + tol))
        q_plus = int(np.sum(lam >= lam_q - tol))
        return cls(P, q, lam, V, q_minus, q_plus, float(tol))


def kyfan_value(spec):
    """Maximum of tr{Q^T P Q} over m x q matrices with orthonormal columns."""
    lam = spec.eigenvalues
    return float(np.sum(lam[:spec.q_minus])
                 + lam[spec.q - 1] * (spec.q - spec.q_minus))


def kyfan_membership(spec, Q, tol=1e-8):
    """Test whether Q's column space has the maximizer structure.

    True iff the column space contains the span of eigenvectors strictly
    above the boundary eigenvalue and is contained in the span of those
    at or above it, both within projection residual ``tol``.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (spec.m, spec.q):
        raise ValueError(f"Q has shape {Q.shape}, expected ({spec.m}, {spec.q})")
    if np.linalg.norm(Q.T @ Q - np.eye(spec.q)) > tol:
        raise ValueError("Q does not have orthonormal columns")
    V = spec.eigenvectors
    above = V[:, :spec.q_minus]
    at_or_above = V[:, :spec.q_plus]
    if above.shape[1]:
        res_contains = np.linalg.norm(above - Q @ (Q.T @ above), 2)
        if res_contains > tol:
            return False
    res_within = np.linalg.norm(Q - at_or_above @ (at_or_above.T @ Q), 2)
    return bool(res_within <= tol)


def random_stiefel(rng, m, q, n=None):
    """Orthonormalized Gaussian matrices: one (m, q) draw or a stack (n, m, q)."""
    shape = (m, q) if n is None else (n, m, q)
    g = rng.standard_normal(shape)
    Q, r = np.linalg.qr(g)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d = np.where(d == 0, 1.0, d)
    return Q * d[..., None, :]


def construct_maximizer(spec, rng=None, rotate=False):
    """Build a maximizer from the eigenvector characterization.

    Takes all eigenvectors strictly above the boundary plus a
    (q - q_minus)-dimensional slice of the boundary eigenspace; with
    ``rng`` the slice and the optional right rotation are randomized.
    """
    V = spec.eigenvectors
    fixed = V[:, :spec.q_minus]
    boundary = V[:, spec.q_minus:spec.q_plus]
    width = spec.q - spec.q_minus
    if rng is None:
        slice_w = np.eye(boundary.shape[1])[:, :width]
    else:
        slice_w = random_stiefel(rng, boundary.shape[1], width)
    Q = np.column_stack([fixed, boundary @ slice_w])
    if rotate:
        if rng is None:
            raise ValueError("rotation requires an rng")
        B = random_stiefel(rng, spec.q, spec.q)
        Q = Q @ B
    return Q


@dataclass(frozen=True)
class KyFanSampleReport:
    """Outcome of a randomized check of the trace bound."""

    m: int
    q: int
    samples: int
    seed: int
    value: float
    bound: float
    max_trace: float
    n_near: int
    passed: bool


def kyfan_sample_check(spec, samples, seed, near_tol=1e-9, membership_tol=1e-8):
    """Sample random orthonormal-column matrices against the trace bound.

    Draws ``samples`` matrices, checks that no trace exceeds
    value + 1e-12 |P|, and that every sample within ``near_tol`` of the
    maximum passes the membership test. Violations raise
    :class:`KyFanError`; the returned report carries the summary.
    """
    if samples < 1:
        raise ValueError(f"sample count must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    batch = random_stiefel(rng, spec.m, spec.q, samples)
    traces = np.einsum("nac,ab,nbc->n", batch, spec.P, batch, optimize=True)
    value = kyfan_value(spec)
    bound = value + 1e-12 * np.linalg.norm(spec.P)
    max_trace = float(np.max(traces))
    if max_trace > bound:
        raise KyFanError(
            f"sampled trace {max_trace:.15e} exceeds bound {bound:.15e}")
    near = np.flatnonzero(traces >= value - near_tol)
    for idx in near:
        if not kyfan_membership(spec, batch[idx], membership_tol):
            raise KyFanError(
                f"sample {idx} is within {near_tol} of the maximum but fails "
                f"the maximizer characterization")
    return KyFanSampleReport(spec.m, spec.q, samples, seed, value, float(bound),
                             max_trace, int(near.size), True)
