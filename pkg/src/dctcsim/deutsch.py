"""Deutsch fixed-point solver for closed-timelike-curve interactions.

A CTC register interacting with a chronology-respecting (CR) register through
a unitary U must come out of the loop in the same state it entered: the CTC
state sigma is a fixed point of the channel

    Phi(sigma) = Tr_CR( U (rho_CR (x) sigma) U^dag ).

Phi is linear and completely positive trace preserving in sigma for a fixed
CR input, so a fixed point always exists; it need not be unique.  The solver
iterates Phi from the maximally mixed state and accepts either the plain
iterate or its Cesaro average, whichever first meets the residual tolerance
in trace norm.  The eigenvalue-1 multiplicity of the vectorized channel (a
d^2 x d^2 matrix) is reported as ``fp_space_dim`` so degeneracy is visible.
"""

from dataclasses import dataclass

import numpy as np

from .circuits import UnitaryOperator
from .errors import FixedPointConvergenceError, InvariantViolationError
from .qmath import DensityOperator, RegisterLayout, kron, trace_norm


@dataclass(frozen=True)
class SolverConfig:
    """Iteration budget and tolerances for the fixed-point search."""

    tolerance: float = 1e-12          # trace-norm residual ||Phi(s) - s||_1
    max_iterations: int = 1_000_000
    eigen_tolerance: float = 1e-9     # |lambda - 1| window for fp_space_dim

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InvariantViolationError("tolerance must be positive")
        if self.max_iterations < 1:
            raise InvariantViolationError("max_iterations must be >= 1")
        if not self.eigen_tolerance > 0:
            raise InvariantViolationError("eigen_tolerance must be positive")


@dataclass(frozen=True)
class FixedPointResult:
    """Converged CTC state plus solver diagnostics."""

    fixed_point: DensityOperator
    residual: float
    iterations: int
    fp_space_dim: int
    unique: bool

    def __post_init__(self):
        if self.residual < 0:
            raise InvariantViolationError("residual must be non-negative")
        if self.unique != (self.fp_space_dim == 1):
            raise InvariantViolationError("unique flag must mirror fp_space_dim == 1")


def _interaction_dims(U: UnitaryOperator, rho_cr: DensityOperator,
                      layout: RegisterLayout) -> tuple:
    cr, ctc = layout.cr_labels, layout.ctc_labels
    if not ctc:
        raise InvariantViolationError("layout has no CTC qubits")
    if layout.labels != cr + ctc:
        raise InvariantViolationError(
            "CR labels must precede CTC labels in layout order; got "
            f"{layout.labels} with CTC {sorted(layout.ctc)}")
    d_cr, d_ctc = 2 ** len(cr), 2 ** len(ctc)
    if rho_cr.dim != d_cr:
        raise InvariantViolationError(
            f"CR state has dimension {rho_cr.dim}, layout expects {d_cr}")
    if U.dim != d_cr * d_ctc:
        raise InvariantViolationError(
            f"interaction has dimension {U.dim}, layout expects {d_cr * d_ctc}")
    return d_cr, d_ctc


def _phi(U_mat: np.ndarray, rho_mat: np.ndarray, d_cr: int, d_ctc: int):
    """One application of Phi as a closure over fixed U and rho_CR."""
    Udag = U_mat.conj().T

    def apply(sigma_mat: np.ndarray) -> np.ndarray:
        big = U_mat @ kron(rho_mat, sigma_mat) @ Udag
        return np.einsum("atau->tu", big.reshape(d_cr, d_ctc, d_cr, d_ctc))

    return apply


def ctc_map(U: UnitaryOperator, rho_cr: DensityOperator, sigma: DensityOperator,
            layout: RegisterLayout) -> DensityOperator:
    """Evaluate Phi(sigma) = Tr_CR(U (rho_CR (x) sigma) U^dag)."""
    d_cr, d_ctc = _interaction_dims(U, rho_cr, layout)
    if sigma.dim != d_ctc:
        raise InvariantViolationError(
            f"CTC state has dimension {sigma.dim}, layout expects {d_ctc}")
    return DensityOperator(_phi(U.matrix, rho_cr.matrix, d_cr, d_ctc)(sigma.matrix))


def superoperator_matrix(U: UnitaryOperator, rho_cr: DensityOperator,
                         layout: RegisterLayout) -> np.ndarray:
    """Matrix of sigma -> Phi(sigma) acting on row-major vectorized sigma."""
    d_cr, d_ctc = _interaction_dims(U, rho_cr, layout)
    apply = _phi(U.matrix, rho_cr.matrix, d_cr, d_ctc)
    d = d_ctc
    S = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            S[:, i * d + j] = apply(unit).reshape(-1)
    return S


def fixed_point_space_dim(U: UnitaryOperator, rho_cr: DensityOperator,
                          layout: RegisterLayout, eigen_tolerance: float = 1e-9) -> int:
    """Multiplicity of eigenvalue 1 of the vectorized channel, within tolerance."""
    eigenvalues = np.linalg.eigvals(superoperator_matrix(U, rho_cr, layout))
    return int(np.sum(np.abs(eigenvalues - 1.0) <= eigen_tolerance))


def solve_fixed_point(U: UnitaryOperator, rho_cr: DensityOperator,
                      layout: RegisterLayout,
                      config: SolverConfig | None = None) -> FixedPointResult:
    """Find sigma with ||Phi(sigma) - sigma||_1 below tolerance.

    Starts from the maximally mixed state and tracks both the plain iterate
    and the running Cesaro average (1/N) sum_n Phi^n; the Cesaro average
    converges to a fixed point for every CPTP map, the plain iterate usually
    gets there faster.  When the fixed-point space is degenerate this
    procedure is still deterministic: it lands on the eigenvalue-1 component
    of the maximally mixed state.
    """
    config = config or SolverConfig()
    d_cr, d_ctc = _interaction_dims(U, rho_cr, layout)
    apply = _phi(U.matrix, rho_cr.matrix, d_cr, d_ctc)

    d = d_ctc
    sigma = np.eye(d, dtype=complex) / d
    running_sum = np.zeros((d, d), dtype=complex)
    best = np.inf
    solution = None
    iterations = 0

    for n in range(1, config.max_iterations + 1):
        image = apply(sigma)
        residual = trace_norm(image - sigma)
        best = min(best, residual)
        if residual < config.tolerance:
            solution, iterations = (sigma, residual), n
            break
        running_sum += sigma
        cesaro = running_sum / n
        cesaro_residual = trace_norm(apply(cesaro) - cesaro)
        best = min(best, cesaro_residual)
        if cesaro_residual < config.tolerance:
            solution, iterations = (cesaro, cesaro_residual), n
            break
        sigma = image

    if solution is None:
        raise FixedPointConvergenceError(best, config.max_iterations, config.tolerance)

    fixed_mat, residual = solution
    dim1 = fixed_point_space_dim(U, rho_cr, layout, config.eigen_tolerance)
    return FixedPointResult(
        fixed_point=DensityOperator(fixed_mat),
        residual=residual,
        iterations=iterations,
        fp_space_dim=dim1,
        unique=dim1 == 1,
    )


def apply_dctc(U: UnitaryOperator, rho_cr: DensityOperator, layout: RegisterLayout,
               config: SolverConfig | None = None) -> tuple:
    """Run the full CTC interaction: solve for the self-consistent CTC state
    sigma*, then return the CR output Tr_CTC(U (rho_CR (x) sigma*) U^dag)
    together with the solver diagnostics."""
    d_cr, d_ctc = _interaction_dims(U, rho_cr, layout)
    result = solve_fixed_point(U, rho_cr, layout, config)
    big = U.matrix @ kron(rho_cr.matrix, result.fixed_point.matrix) @ U.matrix.conj().T
    cr_out = np.einsum("atbt->ab", big.reshape(d_cr, d_ctc, d_cr, d_ctc))
    return DensityOperator(cr_out), result
