"""Dense complex linear algebra and quantum primitives.

Everything here operates on plain ``numpy`` arrays of ``complex128``.  States
and operators never exceed a few qubits (16x16), so dense storage and exact
double precision are used throughout.  Qubit ordering convention: the leftmost
symbol of a ket is the most significant bit of the basis index, e.g.
``|10>`` is basis index 2.

All values are immutable after construction; stored arrays are marked
read-only and every function is pure.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolationError

# Construction tolerances (max elementwise unless stated otherwise).
HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-10          # lowest admissible eigenvalue of a density operator
STATE_NORM_ATOL = 1e-12


def _as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InvariantViolationError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise InvariantViolationError(f"{name} contains non-finite entries")
    return a


def _require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    if m.shape[0] != m.shape[1]:
        raise InvariantViolationError(f"{name} must be square, got shape {m.shape}")
    return m


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def kron(*matrices) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors), left to right."""
    if not matrices:
        raise InvariantViolationError("kron needs at least one factor")
    out = np.asarray(matrices[0], dtype=complex)
    for m in matrices[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string, e.g. ``ket("10")``."""
    if not bits or any(b not in "01" for b in bits):
        raise InvariantViolationError(f"invalid bit string {bits!r}")
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def as_state_vector(v) -> np.ndarray:
    """Validate and return a normalized state vector (copy, read-only)."""
    a = np.asarray(v, dtype=complex).reshape(-1).copy()
    dim = a.size
    if dim < 1 or dim & (dim - 1):
        raise InvariantViolationError(f"state dimension {dim} is not a power of 2")
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > STATE_NORM_ATOL:
        raise InvariantViolationError(f"state vector norm {norm!r} deviates from 1")
    return _readonly(a)


def pure_fidelity(u, v) -> float:
    """|<u|v>|^2 for two pure states."""
    return float(abs(np.vdot(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))) ** 2)


def hermitian_eigenvalues(m, hermiticity_atol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, in descending order.

    Raises if the input deviates from Hermiticity by more than
    ``hermiticity_atol`` (max elementwise).
    """
    a = _require_square(_as_complex_matrix(m))
    if np.abs(a - a.conj().T).max() > hermiticity_atol:
        raise InvariantViolationError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(a)[::-1].copy()


def trace_norm(m) -> float:
    """Sum of singular values; for Hermitian input, the sum of |eigenvalues|."""
    a = _require_square(_as_complex_matrix(m))
    return float(np.linalg.svd(a, compute_uv=False).sum())


# --- constants -------------------------------------------------------------

I2 = _readonly(np.eye(2, dtype=complex))
X = _readonly(np.array([[0, 1], [1, 0]], dtype=complex))
Y = _readonly(np.array([[0, -1j], [1j, 0]], dtype=complex))
Z = _readonly(np.array([[1, 0], [0, -1]], dtype=complex))
SWAP = _readonly(np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex))

_S2 = 1.0 / np.sqrt(2.0)
PHI_PLUS = _readonly(np.array([_S2, 0, 0, _S2], dtype=complex))
PHI_MINUS = _readonly(np.array([_S2, 0, 0, -_S2], dtype=complex))
PSI_PLUS = _readonly(np.array([0, _S2, _S2, 0], dtype=complex))
PSI_MINUS = _readonly(np.array([0, _S2, -_S2, 0], dtype=complex))

BELL_VECTORS: Mapping[str, np.ndarray] = {
    "phi+": PHI_PLUS,
    "phi-": PHI_MINUS,
    "psi+": PSI_PLUS,
    "psi-": PSI_MINUS,
}

KET_0 = _readonly(np.array([1, 0], dtype=complex))
KET_1 = _readonly(np.array([0, 1], dtype=complex))


def constants() -> dict:
    """Named gate/state table: Paulis, SWAP, Bell vectors, basis kets."""
    table = {"I": I2, "X": X, "Y": Y, "Z": Z, "SWAP": SWAP,
             "ket0": KET_0, "ket1": KET_1}
    table.update(BELL_VECTORS)
    return table


# --- density operators and register layouts --------------------------------

class DensityOperator:
    """Hermitian, positive-semidefinite, trace-one operator on n qubits.

    Invariants are checked at construction: Hermiticity within 1e-12 (max
    elementwise), trace within 1e-12 of 1, and lowest eigenvalue >= -1e-10.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        a = _require_square(_as_complex_matrix(matrix, "density matrix"), "density matrix")
        dim = a.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise InvariantViolationError(f"density dimension {dim} is not a power of 2")
        herm_err = np.abs(a - a.conj().T).max()
        if herm_err > HERMITICITY_ATOL:
            raise InvariantViolationError(
                f"density matrix not Hermitian: max |rho - rho^dag| = {herm_err:.3e}")
        tr = a.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvariantViolationError(f"density matrix trace {tr!r} deviates from 1")
        lowest = float(np.linalg.eigvalsh(a).min()) if dim > 1 else float(a[0, 0].real)
        if lowest < -PSD_ATOL:
            raise InvariantViolationError(
                f"density matrix not positive semidefinite: min eigenvalue {lowest:.3e}")
        self._matrix = _readonly(a.copy())

    @classmethod
    def from_state_vector(cls, v) -> "DensityOperator":
        a = as_state_vector(v)
        return cls(np.outer(a, a.conj()))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityOperator":
        d = 2 ** n_qubits
        return cls(np.eye(d, dtype=complex) / d)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


CR = "CR"
CTC = "CTC"


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered qubit labels, each assigned to the chronology-respecting (CR)
    or CTC part of the register."""

    labels: tuple
    ctc: frozenset = field(default_factory=frozenset)

    def __init__(self, labels: Iterable[str], ctc: Iterable[str] = ()):
        labels = tuple(labels)
        ctc = frozenset(ctc)
        if not labels:
            raise InvariantViolationError("layout needs at least one qubit label")
        if len(set(labels)) != len(labels):
            raise InvariantViolationError(f"duplicate qubit labels in {labels}")
        unknown = ctc - set(labels)
        if unknown:
            raise InvariantViolationError(f"CTC labels {sorted(unknown)} not in layout")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ctc", ctc)

    @property
    def partition(self) -> dict:
        return {lbl: (CTC if lbl in self.ctc else CR) for lbl in self.labels}

    @property
    def cr_labels(self) -> tuple:
        return tuple(lbl for lbl in self.labels if lbl not in self.ctc)

    @property
    def ctc_labels(self) -> tuple:
        return tuple(lbl for lbl in self.labels if lbl in self.ctc)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return 2 ** len(self.labels)

    def positions(self, labels: Iterable[str]) -> tuple:
        index = {lbl: i for i, lbl in enumerate(self.labels)}
        out = []
        for lbl in labels:
            if lbl not in index:
                raise InvariantViolationError(f"unknown qubit label {lbl!r}")
            out.append(index[lbl])
        return tuple(out)


def _partial_trace_matrix(mat: np.ndarray, n_qubits: int, keep_positions) -> np.ndarray:
    keep = sorted(keep_positions)
    traced = [p for p in range(n_qubits) if p not in keep]
    t = mat.reshape([2] * (2 * n_qubits))
    n = n_qubits
    for p in sorted(traced, reverse=True):
        t = np.trace(t, axis1=p, axis2=p + n)
        n -= 1
    d = 2 ** len(keep)
    return t.reshape(d, d)


def partial_trace(rho: DensityOperator, layout: RegisterLayout, keep) -> DensityOperator:
    """Trace out all qubits not selected by ``keep``.

    ``keep`` may be an iterable of qubit labels, or one of the strings
    ``"CR"`` / ``"CTC"`` to keep a whole partition.  The kept qubits stay in
    layout order.  Tracing out everything returns the 1x1 operator ``[[1]]``.
    """
    if layout.dim != rho.dim:
        raise InvariantViolationError(
            f"layout dimension {layout.dim} does not match operator dimension {rho.dim}")
    if isinstance(keep, str):
        if keep == CR:
            keep_labels = layout.cr_labels
        elif keep == CTC:
            keep_labels = layout.ctc_labels
        else:
            keep_labels = (keep,)
    else:
        keep_labels = tuple(keep)
    positions = layout.positions(keep_labels)
    if len(set(positions)) != len(positions):
        raise InvariantViolationError(f"repeated labels in selector {keep_labels}")
    reduced = _partial_trace_matrix(rho.matrix, layout.n_qubits, positions)
    return DensityOperator(reduced)
