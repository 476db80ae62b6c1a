"""Experiment runner.

Each subcommand runs one named experiment and emits a result document as a
human-readable table, JSON, or CSV.  Identical parameters (including the
seed) produce byte-identical JSON.  Floating-point values are quantized to
15 significant digits when the document is built, so serialization
round-trips exactly.

Exit codes: 0 success, 2 usage error, 3 solver non-convergence,
4 invariant violation during the run.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .circuits import AmplitudePair, bhw_interaction, bhw_layout, candidate_states
from .deutsch import SolverConfig, apply_dctc
from .entanglement import (
    BipartiteCut,
    distillable_upper_bound,
    is_ppt,
    log_negativity,
    partial_transpose,
    smolin_cuts,
    smolin_layout,
    smolin_state,
)
from .errors import (
    DegenerateAmplitudesError,
    FixedPointConvergenceError,
    InvariantViolationError,
)
from .protocols import (
    BellLabel,
    discriminate_bell,
    distill_smolin,
    run_improper_mixture,
)
from .qmath import DensityOperator, KET_0, RegisterLayout, kron

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INVARIANT = 4

EXPERIMENTS = ("fixed-point", "discriminate", "table1", "smolin", "measures")


def _round15(value: float) -> float:
    return float(f"{value:.15g}")


def _clean(value):
    """Quantize floats and reject non-finite numbers while building rows."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise InvariantViolationError(f"non-finite value {value!r} in result document")
        return _round15(float(value))
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return str(value)


@dataclass(frozen=True)
class ResultDocument:
    experiment: str
    parameters: dict
    rows: list
    diagnostics: dict

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "rows": self.rows,
            "diagnostics": self.diagnostics,
        }


def make_document(experiment: str, parameters: dict, rows: list,
                  diagnostics: dict) -> ResultDocument:
    return ResultDocument(experiment, _clean(parameters), _clean(rows), _clean(diagnostics))


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def serialize(doc: ResultDocument, output_format: str) -> str:
    if output_format == "json":
        return json.dumps(doc.as_dict(), indent=2, sort_keys=True) + "\n"
    if output_format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if doc.rows:
            header = list(doc.rows[0].keys())
            writer.writerow(header)
            for row in doc.rows:
                writer.writerow([_cell(row[key]) for key in header])
        return buffer.getvalue()
    if output_format == "table":
        lines = [f"experiment: {doc.experiment}"]
        lines.append("  ".join(f"{k}={_cell(v)}" for k, v in doc.parameters.items()))
        if doc.rows:
            header = list(doc.rows[0].keys())
            cells = [[_cell(row[key]) for key in header] for row in doc.rows]
            widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
            lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
            for row_cells in cells:
                lines.append("  ".join(c.ljust(w) for c, w in zip(row_cells, widths)))
        for key, value in doc.diagnostics.items():
            lines.append(f"{key} = {_cell(value) if not isinstance(value, dict) else value}")
        return "\n".join(lines) + "\n"
    raise InvariantViolationError(f"unknown output format {output_format!r}")


def _state_str(vec) -> str:
    terms = []
    for idx, amp in enumerate(np.asarray(vec).reshape(-1)):
        if abs(amp) < 1e-14:
            continue
        value = f"{amp.real:.15g}" if abs(amp.imag) < 1e-14 else f"({amp.real:.15g}{amp.imag:+.15g}j)"
        terms.append(f"{value}|{idx:0{int(np.log2(len(vec)))}b}>")
    return " + ".join(terms) if terms else "0"


def _bits_str(bits) -> str:
    return "".join(str(b) for b in bits)


def _base_parameters(args, amps: AmplitudePair) -> dict:
    return {
        "name": args.experiment,
        "alpha": amps.alpha,
        "beta": amps.beta,
        "tolerance": args.tolerance,
        "max_iterations": args.max_iterations,
        "seed": args.seed,
        "allow_degenerate": args.allow_degenerate,
    }


def _discrimination_row(record) -> dict:
    return {
        "input_bell": record.input_bell.value,
        "alice_outcome": _bits_str(record.alice_outcome),
        "b1": record.b1b2[0],
        "b2": record.b1b2[1],
        "identified": record.identified.value,
        "correct": record.identified is record.input_bell,
        "outcome_probability": record.outcome_probability,
        "bob_state": _state_str(record.bob_state),
        "fp_residual": record.fixed_point.residual,
        "fp_iterations": record.fixed_point.iterations,
        "fp_space_dim": record.fixed_point.fp_space_dim,
        "fp_unique": record.fixed_point.unique,
    }


def run_fixed_point(args, amps, config):
    interaction = bhw_interaction(amps)
    layout = bhw_layout()
    rows = []
    for code, state in candidate_states(amps).items():
        rho_cr = DensityOperator.from_state_vector(kron(state, KET_0))
        cr_out, result = apply_dctc(interaction, rho_cr, layout, config)
        probabilities = np.real(np.diag(cr_out.matrix))
        modal = int(np.argmax(probabilities))
        rows.append({
            "code": _bits_str(code),
            "input_state": _state_str(state),
            "residual": result.residual,
            "iterations": result.iterations,
            "fp_space_dim": result.fp_space_dim,
            "unique": result.unique,
            "modal_outcome": f"{modal:02b}",
            "modal_probability": float(probabilities[modal]),
        })
    diagnostics = {
        "degenerate": amps.is_degenerate,
        "max_residual": max(row["residual"] for row in rows),
    }
    return rows, diagnostics, []


def run_discriminate(args, amps, config):
    rng = np.random.default_rng(args.seed)
    if args.bell == "random":
        bell = list(BellLabel)[rng.integers(4)]
    else:
        bell = BellLabel.from_string(args.bell)
    record = discriminate_bell(bell, amps, config, seed=rng)
    rows = [_discrimination_row(record)]
    violations = [] if record.identified is bell else [
        f"identified {record.identified.value}, referee prepared {bell.value}"]
    return rows, {"referee_bell": bell.value}, violations


def run_table1(args, amps, config):
    rng = np.random.default_rng(args.seed)
    rows = []
    violations = []
    for bell in BellLabel:
        record = discriminate_bell(bell, amps, config, seed=rng)
        rows.append(_discrimination_row(record))
        if record.identified is not bell:
            violations.append(f"row {bell.value}: identified {record.identified.value}")
    diagnostics = {
        "all_correct": not violations,
        "min_outcome_probability": min(row["outcome_probability"] for row in rows),
        "max_fp_residual": max(row["fp_residual"] for row in rows),
    }
    return rows, diagnostics, violations


def run_smolin(args, amps, config):
    if args.improper_mixture:
        record = run_improper_mixture(amps, config, seed=args.seed)
        rows = [{
            "alice_outcome": _bits_str(record.alice_outcome),
            "p00": record.cr_distribution[0],
            "p01": record.cr_distribution[1],
            "p10": record.cr_distribution[2],
            "p11": record.cr_distribution[3],
            "modal_outcome": _bits_str(record.modal_b1b2),
            "modal_probability": record.modal_probability,
            "fp_residual": record.fixed_point.residual,
            "fp_space_dim": record.fixed_point.fp_space_dim,
        }]
        diagnostics = {
            "note": "experimental improper-mixture run; no correctness claim",
            "bob_purity": float(np.real(np.trace(
                record.bob_state.matrix @ record.bob_state.matrix))),
        }
        return rows, diagnostics, []

    report = distill_smolin(amps, config, seed=args.seed)
    rows = []
    violations = []
    for branch in report.branches:
        rows.append({
            "branch": branch.branch.value,
            "probability": branch.probability,
            "message": branch.message.value,
            "correct": branch.message is branch.branch,
            "alice_outcome": _bits_str(branch.record.alice_outcome),
            "outcome_probability": branch.record.outcome_probability,
            "cd_fidelity": branch.cd_fidelity,
            "cd_log_negativity": branch.cd_log_negativity,
            "fp_residual": branch.record.fixed_point.residual,
            "fp_space_dim": branch.record.fixed_point.fp_space_dim,
        })
        if branch.message is not branch.branch:
            violations.append(f"branch {branch.branch.value} misidentified")
    diagnostics = {
        "all_identified": report.all_identified,
        "baseline_log_negativity": report.baseline_log_negativity,
        "baseline_ppt": report.baseline_ppt,
    }
    return rows, diagnostics, violations


def run_measures(args, amps, config):
    rows = []
    rho = smolin_state()
    layout = smolin_layout()
    for name, cut in smolin_cuts().items():
        pt_eigenvalues = np.linalg.eigvalsh(partial_transpose(rho, layout, cut))
        rows.append({
            "state": "smolin",
            "cut": name,
            "log_negativity": log_negativity(rho, layout, cut),
            "distillable_upper_bound": distillable_upper_bound(rho, layout, cut),
            "ppt": is_ppt(rho, layout, cut),
            "min_pt_eigenvalue": float(pt_eigenvalues.min()),
        })
    bell = DensityOperator.from_state_vector(BellLabel.PHI_PLUS.state_vector())
    bell_layout = RegisterLayout(("A", "B"))
    bell_cut = BipartiteCut(("A",), ("B",))
    pt_eigenvalues = np.linalg.eigvalsh(partial_transpose(bell, bell_layout, bell_cut))
    rows.append({
        "state": "bell:phi+",
        "cut": "A:B",
        "log_negativity": log_negativity(bell, bell_layout, bell_cut),
        "distillable_upper_bound": distillable_upper_bound(bell, bell_layout, bell_cut),
        "ppt": is_ppt(bell, bell_layout, bell_cut),
        "min_pt_eigenvalue": float(pt_eigenvalues.min()),
    })
    return rows, {}, []


_RUNNERS = {
    "fixed-point": run_fixed_point,
    "discriminate": run_discriminate,
    "table1": run_table1,
    "smolin": run_smolin,
    "measures": run_measures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=0.6,
                        help="amplitude of |0> in Alice's prepared state (beta is derived)")
    common.add_argument("--tolerance", type=float, default=1e-12,
                        help="trace-norm residual for the fixed-point solver")
    common.add_argument("--max-iterations", type=int, default=1_000_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output-format", choices=("table", "json", "csv"),
                        default="table")
    common.add_argument("--output", default=None, help="write to this path instead of stdout")
    common.add_argument("--allow-degenerate", action="store_true",
                        help="permit alpha = beta (fixed-point exploration only)")

    parser = argparse.ArgumentParser(
        prog="dctc-sim",
        description="Simulate closed-timelike-curve circuits: fixed points, "
                    "Bell-state discrimination, and Smolin-state experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    sub.add_parser("fixed-point", parents=[common],
                   help="fixed-point diagnostics for the four candidate inputs")
    p_disc = sub.add_parser("discriminate", parents=[common],
                            help="one referee round of Bell discrimination")
    p_disc.add_argument("--bell", choices=("phi+", "phi-", "psi+", "psi-", "random"),
                        default="random")
    sub.add_parser("table1", parents=[common],
                   help="discrimination table for all four Bell inputs")
    p_smolin = sub.add_parser("smolin", parents=[common],
                              help="branch-wise Smolin distillation experiment")
    p_smolin.add_argument("--improper-mixture", action="store_true",
                          help="experimental: push the unconditioned marginal through")
    sub.add_parser("measures", parents=[common],
                   help="log-negativity and PPT status for the Smolin cuts and a Bell pair")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        amps = AmplitudePair.from_alpha(args.alpha, allow_degenerate=args.allow_degenerate)
        config = SolverConfig(tolerance=args.tolerance, max_iterations=args.max_iterations)
    except (DegenerateAmplitudesError, InvariantViolationError) as exc:
        parser.error(str(exc))  # exits with status 2

    try:
        rows, diagnostics, violations = _RUNNERS[args.experiment](args, amps, config)
        document = make_document(args.experiment, _base_parameters(args, amps),
                                 rows, diagnostics)
        text = serialize(document, args.output_format)
    except FixedPointConvergenceError as exc:
        print(f"solver failed to converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except DegenerateAmplitudesError as exc:
        print(f"degenerate amplitudes: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)

    if violations:
        for violation in violations:
            print(f"invariant violation: {violation}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
