"""End-to-end protocols: teleportation with Pauli correction, CTC-assisted
Bell-state discrimination, and the Smolin-state distillation experiment.

The discrimination strategy: Alice teleports a known state psi = a|0> + b|1>
to Bob through the shared (unknown) Bell pair and tells him her Bell
measurement outcome.  Bob applies the standard correction for that outcome,
so his qubit ends up carrying the residual Pauli error that identifies the
shared pair: psi, Z psi, X psi or XZ psi.  Feeding that qubit (with a fresh
|0> ancilla) through the CTC interaction maps the four non-orthogonal
possibilities onto the four computational CR outcomes b1 b2.

The CTC stage is simulated branch-wise: the self-consistency map is
nonlinear in the CR input, so convex mixtures cannot be pushed through the
solver; each pure branch is solved on its own.  An improper-mixture run
(tracing out the distant parties first) is available as an experimental
variant with no correctness claim; it illustrates how the nonlinearity
breaks when the branch identity is discarded.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .circuits import AmplitudePair, bell_projectors, bhw_interaction, bhw_layout
from .deutsch import FixedPointResult, SolverConfig, apply_dctc
from .entanglement import (
    BipartiteCut,
    is_ppt,
    log_negativity,
    smolin_cuts,
    smolin_layout,
    smolin_state,
)
from .errors import DegenerateAmplitudesError, InvariantViolationError
from .qmath import (
    BELL_VECTORS,
    DensityOperator,
    I2,
    KET_0,
    RegisterLayout,
    X,
    Y,
    Z,
    _partial_trace_matrix,
    as_state_vector,
    kron,
    pure_fidelity,
)

PHASE_ATOL = 1e-12


class BellLabel(enum.Enum):
    """The four maximally entangled two-qubit states."""

    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @classmethod
    def from_string(cls, name: str) -> "BellLabel":
        for label in cls:
            if label.value == name:
                return label
        raise InvariantViolationError(f"unknown Bell label {name!r}")

    @classmethod
    def from_b1b2(cls, b1: int, b2: int) -> "BellLabel":
        return _BELL_FROM_BITS[(b1, b2)]

    @property
    def b1b2(self) -> tuple:
        """The CR measurement outcome that identifies this shared pair."""
        return _BITS_FROM_BELL[self]

    def state_vector(self) -> np.ndarray:
        return BELL_VECTORS[self.value]


# CR outcome b1 b2 <-> conclusive Bell state.
_BELL_FROM_BITS = {
    (0, 0): BellLabel.PHI_PLUS,
    (0, 1): BellLabel.PHI_MINUS,
    (1, 0): BellLabel.PSI_PLUS,
    (1, 1): BellLabel.PSI_MINUS,
}
_BITS_FROM_BELL = {label: bits for bits, label in _BELL_FROM_BITS.items()}

# Residual Pauli error Bob's corrected qubit carries for each shared pair.
_RESIDUAL = {
    BellLabel.PHI_PLUS: I2,
    BellLabel.PHI_MINUS: Z,
    BellLabel.PSI_PLUS: X,
    BellLabel.PSI_MINUS: X @ Z,
}

# Alice's measurement outcome encoded as (phase bit, flip bit), and Bob's
# conditional correction: 00 -> I, 01 -> X, 10 -> Z, 11 -> Y.
ALICE_OUTCOME_BITS = {
    BellLabel.PHI_PLUS: (0, 0),
    BellLabel.PSI_PLUS: (0, 1),
    BellLabel.PHI_MINUS: (1, 0),
    BellLabel.PSI_MINUS: (1, 1),
}
_OUTCOME_FROM_BITS = {bits: label for label, bits in ALICE_OUTCOME_BITS.items()}
CORRECTIONS = {(0, 0): I2, (0, 1): X, (1, 0): Z, (1, 1): Y}


def pauli_residual(bell: BellLabel) -> np.ndarray:
    """Operator E with Bob's post-correction qubit equal to E psi (up to a
    global phase) when the shared pair is ``bell``."""
    return _RESIDUAL[bell]


def _prepared_state(amps: AmplitudePair) -> np.ndarray:
    return np.array([amps.alpha, amps.beta], dtype=complex)


def _resolve_outcome(alice_outcome) -> BellLabel:
    if isinstance(alice_outcome, BellLabel):
        return alice_outcome
    bits = tuple(alice_outcome)
    if bits not in _OUTCOME_FROM_BITS:
        raise InvariantViolationError(f"invalid Alice outcome {alice_outcome!r}")
    return _OUTCOME_FROM_BITS[bits]


def _bob_state(bell: BellLabel, amps: AmplitudePair, outcome: BellLabel) -> tuple:
    """Project Alice's Bell measurement outcome out of psi (x) |bell> and
    return (Bob's corrected qubit, outcome probability)."""
    full = kron(_prepared_state(amps), bell.state_vector())
    bob = outcome.state_vector().conj() @ full.reshape(4, 2)
    probability = float(np.linalg.norm(bob) ** 2)
    bob = bob / np.linalg.norm(bob)
    corrected = CORRECTIONS[ALICE_OUTCOME_BITS[outcome]] @ bob
    return corrected, probability


def alice_outcome_distribution(bell: BellLabel, amps: AmplitudePair) -> dict:
    """Probability of each of Alice's four Bell outcomes (1/4 each)."""
    full = kron(_prepared_state(amps), bell.state_vector())
    return {
        outcome: float(np.linalg.norm(outcome.state_vector().conj() @ full.reshape(4, 2)) ** 2)
        for outcome in BellLabel
    }


def teleport_and_correct(bell: BellLabel, amps: AmplitudePair,
                         alice_outcome="exhaustive") -> np.ndarray:
    """Bob's qubit after teleportation of psi and his conditional correction.

    ``alice_outcome`` may be a specific outcome (a :class:`BellLabel` or a
    two-bit tuple) or ``"exhaustive"``, which verifies that all four outcomes
    give the same physical state (up to a global phase) and returns the
    outcome-(0,0) representative.
    """
    if alice_outcome == "exhaustive":
        states = [_bob_state(bell, amps, outcome)[0] for outcome in BellLabel]
        reference = states[0]
        for state in states[1:]:
            if abs(abs(np.vdot(reference, state)) - 1.0) > PHASE_ATOL:
                raise InvariantViolationError(
                    "teleportation outcomes disagree beyond a global phase")
        return as_state_vector(reference)
    outcome = _resolve_outcome(alice_outcome)
    return as_state_vector(_bob_state(bell, amps, outcome)[0])


@dataclass(frozen=True, eq=False)
class DiscriminationRecord:
    """Everything observed in one discrimination run."""

    input_bell: BellLabel
    alice_outcome: tuple
    bob_state: np.ndarray
    b1b2: tuple
    identified: BellLabel
    outcome_probability: float
    fixed_point: FixedPointResult

    def __post_init__(self):
        if not 0.0 <= self.outcome_probability <= 1.0 + 1e-12:
            raise InvariantViolationError(
                f"outcome probability {self.outcome_probability} outside [0, 1]")
        if self.identified is not _BELL_FROM_BITS[self.b1b2]:
            raise InvariantViolationError("identified label inconsistent with b1 b2")


def discriminate_bell(bell: BellLabel, amps: AmplitudePair,
                      config: SolverConfig | None = None,
                      seed=None, alice_outcome=None) -> DiscriminationRecord:
    """Run the full discrimination protocol for one shared Bell pair.

    Alice's outcome is drawn from seeded randomness unless ``alice_outcome``
    pins it.  The CR register is read out at its most probable computational
    value; the probability of that value is reported, not assumed.
    """
    if amps.is_degenerate:
        raise DegenerateAmplitudesError(
            "discrimination requires alpha != beta; the four candidate states "
            "coalesce pairwise at alpha = beta")
    if alice_outcome is None:
        rng = np.random.default_rng(seed)
        distribution = alice_outcome_distribution(bell, amps)
        outcomes = list(BellLabel)
        weights = np.array([distribution[o] for o in outcomes])
        outcome = outcomes[rng.choice(len(outcomes), p=weights / weights.sum())]
    else:
        outcome = _resolve_outcome(alice_outcome)

    bob = teleport_and_correct(bell, amps, outcome)
    rho_cr = DensityOperator.from_state_vector(kron(bob, KET_0))
    cr_out, fixed = apply_dctc(bhw_interaction(amps), rho_cr, bhw_layout(), config)

    probabilities = np.real(np.diag(cr_out.matrix))
    modal = int(np.argmax(probabilities))
    b1b2 = (modal >> 1, modal & 1)
    return DiscriminationRecord(
        input_bell=bell,
        alice_outcome=ALICE_OUTCOME_BITS[outcome],
        bob_state=bob,
        b1b2=b1b2,
        identified=BellLabel.from_b1b2(*b1b2),
        outcome_probability=float(probabilities[modal]),
        fixed_point=fixed,
    )


@dataclass(frozen=True)
class BranchOutcome:
    """One branch of the Smolin mixture after discrimination on AB."""

    branch: BellLabel
    probability: float
    record: DiscriminationRecord
    message: BellLabel
    cd_fidelity: float
    cd_log_negativity: float


@dataclass(frozen=True)
class DistillationReport:
    branches: tuple
    baseline_log_negativity: dict
    baseline_ppt: dict
    all_identified: bool


def distill_smolin(amps: AmplitudePair, config: SolverConfig | None = None,
                   seed=None) -> DistillationReport:
    """Branch-wise Smolin distillation: in each equally likely branch the AB
    and CD pairs share the same Bell identity, Alice and Bob discriminate
    theirs through the CTC circuit and broadcast the label, leaving Charlie
    and Dan with a known Bell pair (one ebit).  The report carries the
    pre-protocol baseline: log-negativity 0 and PPT across all three
    balanced cuts of the Smolin state."""
    rng = np.random.default_rng(seed)
    cd_layout = RegisterLayout(("C", "D"))
    cd_cut = BipartiteCut(("C",), ("D",))

    branches = []
    for branch in BellLabel:
        record = discriminate_bell(branch, amps, config, seed=rng)
        cd_state = branch.state_vector()
        message = record.identified
        branches.append(BranchOutcome(
            branch=branch,
            probability=0.25,
            record=record,
            message=message,
            cd_fidelity=pure_fidelity(message.state_vector(), cd_state),
            cd_log_negativity=log_negativity(
                DensityOperator.from_state_vector(cd_state), cd_layout, cd_cut),
        ))

    rho = smolin_state()
    layout = smolin_layout()
    baseline_en = {name: log_negativity(rho, layout, cut)
                   for name, cut in smolin_cuts().items()}
    baseline_ppt = {name: is_ppt(rho, layout, cut)
                    for name, cut in smolin_cuts().items()}
    return DistillationReport(
        branches=tuple(branches),
        baseline_log_negativity=baseline_en,
        baseline_ppt=baseline_ppt,
        all_identified=all(b.message is b.branch for b in branches),
    )


@dataclass(frozen=True)
class ImproperMixtureRecord:
    """Result of pushing the unconditioned AB marginal through the CTC stage.

    Experimental, no correctness claim: discarding the branch identity hands
    the solver the maximally mixed Bob qubit, and the CR readout carries no
    information about the original pair.
    """

    alice_outcome: tuple
    bob_state: DensityOperator
    cr_distribution: tuple
    modal_b1b2: tuple
    modal_probability: float
    fixed_point: FixedPointResult


def run_improper_mixture(amps: AmplitudePair, config: SolverConfig | None = None,
                         seed=None) -> ImproperMixtureRecord:
    if amps.is_degenerate:
        raise DegenerateAmplitudesError("improper-mixture run still requires alpha != beta")
    rng = np.random.default_rng(seed)
    rho_ab = _partial_trace_matrix(smolin_state().matrix, 4, (0, 1))

    psi = _prepared_state(amps)
    rho3 = kron(np.outer(psi, psi.conj()), rho_ab)
    projectors = bell_projectors()
    labels = list(BellLabel)
    weights = np.array([np.trace(projectors[o.value] @ rho3).real for o in labels])
    outcome = labels[rng.choice(len(labels), p=weights / weights.sum())]

    P = projectors[outcome.value]
    conditioned = P @ rho3 @ P
    conditioned /= np.trace(conditioned).real
    bob = _partial_trace_matrix(conditioned, 3, (2,))
    correction = CORRECTIONS[ALICE_OUTCOME_BITS[outcome]]
    bob = DensityOperator(correction @ bob @ correction.conj().T)

    rho_cr = DensityOperator(kron(bob.matrix, np.outer(KET_0, KET_0)))
    cr_out, fixed = apply_dctc(bhw_interaction(amps), rho_cr, bhw_layout(), config)
    distribution = tuple(float(p) for p in np.real(np.diag(cr_out.matrix)))
    modal = int(np.argmax(distribution))
    return ImproperMixtureRecord(
        alice_outcome=ALICE_OUTCOME_BITS[outcome],
        bob_state=bob,
        cr_distribution=distribution,
        modal_b1b2=(modal >> 1, modal & 1),
        modal_probability=distribution[modal],
        fixed_point=fixed,
    )
