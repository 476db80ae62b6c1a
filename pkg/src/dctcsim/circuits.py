"""Construction of the interaction unitaries.

The discrimination circuit tells four non-orthogonal single-qubit states
apart with two CTC qubits.  It first swaps the two-qubit CR register with
the two-qubit CTC register, then applies one of four controlled blocks
U_00..U_11 to the CTC register, selected by the computational value of the
CR register.  Each block maps its designated candidate state (x) |0> to the
matching basis state |xy>, up to a global phase:

    U_00 = [[a, b], [-b, a]] (x) I
    U_01 = (X (x) X) . ([[b, a], [a, -b]] (x) I)
    U_10 = (X (x) I) . ([[b, a], [-a, b]] (x) I)
    U_11 = [[a, b], [b, -a]] (x) X

with real amplitudes a, b and "." composing right to left (the rotation acts
first, the Pauli layer second).  Real amplitudes are required; the blocks are
not unitary otherwise.
"""

import numbers
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateAmplitudesError, InvariantViolationError
from .qmath import (
    BELL_VECTORS,
    I2,
    RegisterLayout,
    X,
    _as_complex_matrix,
    _readonly,
    _require_square,
    kron,
)

UNITARITY_ATOL = 1e-10
NORMALIZATION_ATOL = 1e-12
DEGENERACY_ATOL = 1e-6    # |alpha - beta| at or below this counts as degenerate

BLOCK_CODES = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class AmplitudePair:
    """Real amplitude pair (alpha, beta) with alpha^2 + beta^2 = 1.

    The discrimination protocol requires 0 < alpha != beta < 1; construction
    rejects near-degenerate pairs unless ``allow_degenerate`` is set, which
    is meant for fixed-point-space exploration only.
    """

    alpha: float
    beta: float
    allow_degenerate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if isinstance(value, complex) or not isinstance(value, numbers.Real):
                raise InvariantViolationError(f"{name} must be a real number")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        if not (0.0 < self.alpha < 1.0 and 0.0 < self.beta < 1.0):
            raise InvariantViolationError(
                f"amplitudes must lie strictly between 0 and 1, got "
                f"({self.alpha}, {self.beta})")
        if abs(self.alpha ** 2 + self.beta ** 2 - 1.0) > NORMALIZATION_ATOL:
            raise InvariantViolationError(
                f"alpha^2 + beta^2 = {self.alpha ** 2 + self.beta ** 2!r} deviates from 1")
        if self.is_degenerate and not self.allow_degenerate:
            raise DegenerateAmplitudesError(
                f"|alpha - beta| = {abs(self.alpha - self.beta):.3e} <= "
                f"{DEGENERACY_ATOL}; the protocol needs alpha != beta")

    @classmethod
    def from_alpha(cls, alpha: float, allow_degenerate: bool = False) -> "AmplitudePair":
        if isinstance(alpha, complex) or not isinstance(alpha, numbers.Real):
            raise InvariantViolationError("alpha must be a real number")
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise InvariantViolationError(f"alpha must lie strictly between 0 and 1, got {alpha}")
        return cls(alpha, float(np.sqrt(1.0 - alpha * alpha)), allow_degenerate)

    @property
    def is_degenerate(self) -> bool:
        return abs(self.alpha - self.beta) <= DEGENERACY_ATOL


class UnitaryOperator:
    """Square complex matrix with U^dag U = I within 1e-10 (max elementwise)."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        a = _require_square(_as_complex_matrix(matrix, "unitary"), "unitary")
        defect = np.abs(a.conj().T @ a - np.eye(a.shape[0])).max()
        if defect > UNITARITY_ATOL:
            raise InvariantViolationError(
                f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}")
        self._matrix = _readonly(a.copy())

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self):
        return f"UnitaryOperator(dim={self.dim})"


def _normalize_code(code) -> tuple:
    if isinstance(code, str):
        if len(code) == 2 and all(c in "01" for c in code):
            return (int(code[0]), int(code[1]))
        raise InvariantViolationError(f"invalid block code {code!r}")
    code = tuple(code)
    if code not in BLOCK_CODES:
        raise InvariantViolationError(f"invalid block code {code!r}")
    return code


def block_unitary(code, amps: AmplitudePair) -> UnitaryOperator:
    """One of the four 4x4 controlled blocks, selected by a two-bit code."""
    a, b = amps.alpha, amps.beta
    code = _normalize_code(code)
    if code == (0, 0):
        mat = kron([[a, b], [-b, a]], I2)
    elif code == (0, 1):
        mat = kron(X, X) @ kron([[b, a], [a, -b]], I2)
    elif code == (1, 0):
        mat = kron(X, I2) @ kron([[b, a], [-a, b]], I2)
    else:
        mat = kron([[a, b], [b, -a]], X)
    return UnitaryOperator(mat)


def candidate_states(amps: AmplitudePair) -> dict:
    """The four non-orthogonal states the circuit distinguishes, keyed by the
    two-bit outcome that identifies each of them."""
    a, b = amps.alpha, amps.beta
    return {
        (0, 0): np.array([a, b], dtype=complex),      # a|0> + b|1>
        (0, 1): np.array([a, -b], dtype=complex),     # a|0> - b|1>
        (1, 0): np.array([b, a], dtype=complex),      # a|1> + b|0>
        (1, 1): np.array([-b, a], dtype=complex),     # a|1> - b|0>
    }


def register_swap(block_qubits: int) -> UnitaryOperator:
    """Unitary exchanging two adjacent registers of ``block_qubits`` qubits each."""
    if block_qubits < 1:
        raise InvariantViolationError("block_qubits must be >= 1")
    d = 2 ** block_qubits
    S = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d * d):
        hi, lo = divmod(i, d)
        S[lo * d + hi, i] = 1.0
    return UnitaryOperator(S)


def bhw_interaction(amps: AmplitudePair) -> UnitaryOperator:
    """Full 16x16 interaction on (CR1, CR2, CTC1, CTC2): swap the registers,
    then dispatch U_xy on the CTC register controlled by the CR value |xy>."""
    controlled = np.zeros((16, 16), dtype=complex)
    for idx, code in enumerate(BLOCK_CODES):
        projector = np.zeros((4, 4), dtype=complex)
        projector[idx, idx] = 1.0
        controlled += kron(projector, block_unitary(code, amps).matrix)
    return UnitaryOperator(controlled @ register_swap(2).matrix)


def bhw_layout() -> RegisterLayout:
    """Register layout matching :func:`bhw_interaction`."""
    return RegisterLayout(("cr1", "cr2", "ctc1", "ctc2"), ctc=("ctc1", "ctc2"))


def bell_projectors() -> dict:
    """Rank-2 projectors |B><B| (x) I onto each Bell state of qubits 1,2 of a
    three-qubit register; the four projectors sum to the identity."""
    return {
        name: _readonly(kron(np.outer(vec, vec.conj()), I2))
        for name, vec in BELL_VECTORS.items()
    }
