"""Orthogonal space-time block codes: registry, validation, encoding.

A code is a family of K complex L x N coefficient matrices C_k whose
pairwise combinations satisfy

    C_k^H C_k = I_N                         (unit self-product)
    C_i^H C_j + C_j^H C_i = 0   for i != j  (anti-commuting pairs)

so that the encoded block X(s) = sum_k s_k C_k obeys
X(s)^H X(s) = |s|^2 I_N for every real symbol vector s.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .embed import overline, underline


class CodeValidationError(ValueError):
    """Raised when a code fails the orthogonality constraints."""


class CodeFormatError(ValueError):
    """Raised when a code definition file cannot be parsed."""


@dataclass(frozen=True)
class ValidationReport:
    """Deviation report for the two orthogonality constraint families."""

    name: str
    max_unit_error: float   # worst |C_k^H C_k - I|
    max_pair_error: float   # worst |C_i^H C_j + C_j^H C_i|, i != j
    tol: float

    @property
    def passed(self):
        return self.max_unit_error <= self.tol and self.max_pair_error <= self.tol


@dataclass(frozen=True)
class OstbCode:
    """An orthogonal space-time block code over N antennas and L slots.

    ``C`` holds the K complex L x N coefficient matrices. Construction
    checks shapes only; orthogonality is checked by :func:`validate_code`
    and enforced by the registry and loader.
    """

    name: str
    N: int
    L: int
    K: int
    C: tuple = field(repr=False)

    def __post_init__(self):
        if self.K != len(self.C):
            raise CodeFormatError(
                f"code {self.name!r} declares K={self.K} but has {len(self.C)} matrices")
        mats = []
        for k, c in enumerate(self.C):
            c = np.asarray(c, dtype=complex)
            if c.shape != (self.L, self.N):
                raise CodeFormatError(
                    f"code {self.name!r}: matrix {k} has shape {c.shape}, "
                    f"expected ({self.L}, {self.N})")
            c.setflags(write=False)
            mats.append(c)
        object.__setattr__(self, "C", tuple(mats))


def _alamouti_matrices():
    i2 = np.eye(2)
    omega2 = np.diag([1.0, -1.0])
    omega4 = np.array([[0.0, 1.0], [1.0, 0.0]])
    c3 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return (i2 + 0j, 1j * omega2, c3 + 0j, 1j * omega4)


def _builtin_registry():
    alam = _alamouti_matrices()
    return {
        "alamouti": OstbCode("alamouti", 2, 2, 4, alam),
        "alamouti-k3": OstbCode("alamouti-k3", 2, 2, 3, alam[:3]),
        "alamouti-k2": OstbCode("alamouti-k2", 2, 2, 2, alam[:2]),
        "scalar": OstbCode("scalar", 1, 1, 1, (np.array([[1.0 + 0j]]),)),
        "real2": OstbCode("real2", 2, 2, 2,
                          (np.eye(2) + 0j,
                           np.array([[0.0, 1.0], [-1.0, 0.0]]) + 0j)),
    }


BUILTIN_CODE_NAMES = ("alamouti", "alamouti-k3", "alamouti-k2", "scalar", "real2")


def builtin_code(name):
    """Return a named builtin code; raises KeyError for unknown names."""
    registry = _builtin_registry()
    if name not in registry:
        raise KeyError(
            f"unknown code {name!r}; builtin codes: {', '.join(BUILTIN_CODE_NAMES)}")
    code = registry[name]
    report = validate_code(code, 1e-12)
    if not report.passed:
        raise CodeValidationError(f"builtin code {name!r} failed validation: {report}")
    return code


def validate_code(code, tol):
    """Measure the worst constraint deviations of a code.

    Returns a :class:`ValidationReport`; it passes iff both the unit
    self-products and the anti-commuting pair sums deviate by at most
    ``tol`` in Frobenius norm.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    eye = np.eye(code.N)
    unit_err = 0.0
    pair_err = 0.0
    for i, ci in enumerate(code.C):
        unit_err = max(unit_err, np.linalg.norm(ci.conj().T @ ci - eye, 2))
        for cj in code.C[i + 1:]:
            cross = ci.conj().T @ cj + cj.conj().T @ ci
            pair_err = max(pair_err, np.linalg.norm(cross, 2))
    return ValidationReport(code.name, float(unit_err), float(pair_err), tol)


def encode(code, s):
    """Encode a length-K real symbol vector into the L x N block sum(s_k C_k)."""
    s = np.asarray(s, dtype=float)
    if s.shape != (code.K,):
        raise ValueError(f"symbol vector has shape {s.shape}, expected ({code.K},)")
    return np.tensordot(s, np.stack(code.C), axes=(0, 0))


@dataclass(frozen=True)
class ChannelRealization:
    """A channel matrix together with its real vector embedding."""

    M: int
    H0: np.ndarray          # complex (N, M)
    h0: np.ndarray          # real (2*M*N,), equals underline(H0)

    @classmethod
    def from_matrix(cls, H0):
        H0 = np.asarray(H0, dtype=complex)
        if H0.ndim != 2:
            raise ValueError("channel matrix must be 2-dimensional")
        h0 = underline(H0)
        if np.linalg.norm(h0) == 0.0:
            raise ValueError("zero channel matrix is rejected")
        H0 = H0.copy()
        H0.setflags(write=False)
        h0.setflags(write=False)
        return cls(H0.shape[1], H0, h0)


@dataclass(frozen=True)
class RealifiedCode:
    """A code paired with a receive-antenna count, in real coordinates.

    ``Phi[k]`` is the real 2ML x 2MN matrix I_M (x) overline(C_k); the
    stacked form ``Phi_stacked`` puts all K of them on top of each other.
    They inherit the code's orthogonality:

        Phi_k^T Phi_k = I_{2MN},  Phi_i^T Phi_j + Phi_j^T Phi_i = 0 (i != j)
    """

    code: OstbCode
    M: int
    Phi: tuple = field(repr=False)           # K matrices, each (2ML, 2MN)
    Phi_stacked: np.ndarray = field(repr=False)  # (2MLK, 2MN)

    @property
    def block_rows(self):
        """Rows of one received block in real coordinates (2ML)."""
        return 2 * self.M * self.code.L

    @property
    def channel_len(self):
        """Length of the real channel vector (2MN)."""
        return 2 * self.M * self.code.N


def realify(code, M):
    """Build the real operators Phi_k = I_M (x) overline(C_k) for M antennas."""
    if M < 1:
        raise ValueError(f"receive-antenna count must be >= 1, got {M}")
    eye_m = np.eye(M)
    phis = tuple(np.kron(eye_m, overline(c)) for c in code.C)
    for p in phis:
        p.setflags(write=False)
    stacked = np.vstack(phis)
    stacked.setflags(write=False)
    return RealifiedCode(code, M, phis, stacked)


def build_A(rc, h):
    """Column-stack the K vectors Phi_k h into a 2ML x K matrix.

    For any h the result has orthogonal columns of squared norm |h|^2.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (rc.channel_len,):
        raise ValueError(f"channel vector has shape {h.shape}, "
                         f"expected ({rc.channel_len},)")
    return np.column_stack([p @ h for p in rc.Phi])


def code_to_dict(code):
    """Serialize a code to the JSON definition structure."""
    return {
        "name": code.name,
        "N": code.N,
        "L": code.L,
        "K": code.K,
        "C": [[[[float(e.real), float(e.imag)] for e in row] for row in c]
              for c in code.C],
    }


def code_from_dict(payload):
    """Build a code from the JSON definition structure (shape checks only)."""
    try:
        name = str(payload["name"])
        n, l, k = int(payload["N"]), int(payload["L"]), int(payload["K"])
        raw = payload["C"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeFormatError(f"malformed code definition: {exc}") from exc
    if not isinstance(raw, list):
        raise CodeFormatError("field 'C' must be a list of matrices")
    mats = []
    for idx, mat in enumerate(raw):
        try:
            arr = np.array([[complex(float(e[0]), float(e[1])) for e in row]
                            for row in mat], dtype=complex)
        except (TypeError, ValueError, IndexError) as exc:
            raise CodeFormatError(f"matrix {idx} is not numeric: {exc}") from exc
        if arr.ndim != 2:
            raise CodeFormatError(f"matrix {idx} is not two-dimensional")
        mats.append(arr)
    return OstbCode(name, n, l, k, tuple(mats))


def load_code(path, validate=True, tol=1e-12):
    """Load a code from a JSON definition file.

    With ``validate=True`` (default) the orthogonality constraints are
    checked and a failing code raises :class:`CodeValidationError`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CodeFormatError(f"cannot parse {path}: {exc}") from exc
    code = code_from_dict(payload)
    if validate:
        report = validate_code(code, tol)
        if not report.passed:
            raise CodeValidationError(
                f"code {code.name!r} from {path} failed validation: "
                f"unit error {report.max_unit_error:.3e}, "
                f"pair error {report.max_pair_error:.3e}")
    return code
