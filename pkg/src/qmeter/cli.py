"""``qmeter`` command line: analyse a scenario file.

Exit codes: 0 success, 1 validation or domain error, 2 parse/usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import report as rpt
from .apparatus import CouplingFamily, shift_sweep
from .determinism import (decompose, real_matrix_family_check, symmetrized_covariance,
                          variance, weak_value, weak_values, zero_error_residuals)
from .error_analysis import optimal_assignment, ozawa_error
from .errors import DomainError, ParseError, QMeterError
from .measurement import outcome_probabilities
from .quasiprob import estimate_from_quasiprob, joint_quasiprob, negativity
from .sampler import sample_outcomes
from .scenario import Coupling, Scenario, parse_scenario

COMMANDS = ("validate", "probs", "error", "optimize", "certify", "decompose",
            "quasiprob", "weakmeas", "sample")


@dataclass(frozen=True)
class Profile:
    norm: float
    deterministic: float
    classical: float
    variance_gate: float


PROFILES = {
    "default": Profile(norm=1e-6, deterministic=1e-8, classical=1e-10, variance_gate=1e-10),
    "strict": Profile(norm=1e-9, deterministic=1e-10, classical=1e-12, variance_gate=1e-12),
}


@dataclass(frozen=True)
class Flags:
    n: int = 10000
    seed: int = 0
    phi_grid: tuple[float, ...] = (0.2, 0.1, 0.05)
    b_psi: float | None = None
    profile: str = "default"
    complex_table: bool = False
    color: bool = False


def _assignment(sc: Scenario):
    if sc.assignment is not None:
        return sc.assignment, "scenario"
    return optimal_assignment(sc.state, sc.povm(), sc.observable)[0], "optimal"


def cmd_validate(sc: Scenario, flags: Flags):
    povm = sc.povm()
    text = (f"scenario valid: dim {sc.dim}, measurement {sc.kind} with {len(povm)} outcomes "
            f"({', '.join(povm.labels)})")
    return text, {"valid": True, "dim": sc.dim, "measurement": sc.kind, "labels": povm.labels}


def cmd_probs(sc: Scenario, flags: Flags):
    probs = outcome_probabilities(sc.povm(), sc.state)
    text = rpt.table(["outcome", "P(m)"], probs, flags.color)
    return text, {"probabilities": [{"label": lab, "p": p} for lab, p in probs]}


def _error_rows(rep, optimal: bool):
    rows, out = [], []
    for o in rep.outcomes:
        value = o.optimal if optimal else o.value
        err = o.min_error if optimal else o.error
        rows.append([o.label, o.probability, value, err])
        out.append({"label": o.label, "p": o.probability, "value": value, "error": err,
                    "optimal": o.optimal, "min_error": o.min_error})
    return rows, out


def cmd_error(sc: Scenario, flags: Flags):
    if sc.assignment is None:
        raise DomainError("error: scenario has no assignment")
    rep = ozawa_error(sc.state, sc.povm(), sc.observable, sc.assignment)
    rows, out = _error_rows(rep, optimal=False)
    text = (rpt.table(["outcome", "P(m)", "value", "eps2_m"], rows, flags.color)
            + f"\ntotal Ozawa error: {rpt.fmt(rep.total)}"
            + f"\nminimum achievable: {rpt.fmt(rep.min_total)}")
    return text, {"outcomes": out, "total": rep.total, "min_total": rep.min_total}


def cmd_optimize(sc: Scenario, flags: Flags):
    _, rep = optimal_assignment(sc.state, sc.povm(), sc.observable)
    rows, out = _error_rows(rep, optimal=True)
    text = (rpt.table(["outcome", "P(m)", "A_opt", "min eps2_m"], rows, flags.color)
            + f"\nmin total error: {rpt.fmt(rep.min_total)}")
    return text, {"outcomes": out, "min_total": rep.min_total}


def _verdict(ok: bool, yes: str, no: str, color: bool) -> str:
    return rpt.style(yes, "green", color=color) if ok else rpt.style(no, "red", color=color)


def cmd_certify(sc: Scenario, flags: Flags):
    prof = PROFILES[flags.profile]
    basis = sc.basis()
    assign, source = _assignment(sc)
    cert = zero_error_residuals(sc.state, basis, sc.observable, assign, tol=prof.deterministic)
    wvs = weak_values(sc.state, basis, sc.observable)
    family = real_matrix_family_check(basis, sc.observable, sc.state)
    rows = [[lab, assign[lab], r, abs(r), None if w is None else w.value]
            for (lab, r), w in zip(cert.residuals, wvs)]
    text = "\n".join([
        rpt.table(["outcome", "value", "residual", "|residual|", "weak value"], rows, flags.color),
        f"assignment: {source}",
        f"sum |r_m|^2: {rpt.fmt(cert.squared_sum)}",
        f"real matrix family: {'yes' if family else 'no'}",
        "verdict: " + _verdict(cert.deterministic, "deterministic", "not deterministic", flags.color),
    ])
    return text, {
        "assignment_source": source,
        "residuals": [{"label": lab, "residual": r, "magnitude": abs(r),
                       "weak_value": None if w is None else w.value,
                       "postselect_probability": None if w is None else w.postselect_probability}
                      for (lab, r), w in zip(cert.residuals, wvs)],
        "squared_sum": cert.squared_sum,
        "max_residual": cert.max_residual,
        "real_matrix_family": family,
        "deterministic": cert.deterministic,
        "tolerance": cert.tol,
    }


def cmd_decompose(sc: Scenario, flags: Flags):
    prof = PROFILES[flags.profile]
    basis = sc.basis()
    assign, source = _assignment(sc)
    b_psi = sc.b_psi if flags.b_psi is None else flags.b_psi
    dec = decompose(sc.observable, basis, assign, sc.state, b_psi)
    lines = [f"assignment: {source}", f"b_psi: {rpt.fmt(dec.b_psi)}",
             "M (diagonal in measurement basis):",
             rpt.table(["outcome", "M eigenvalue"],
                       [[lab, assign[lab] - b_psi] for lab in basis.labels], flags.color),
             f"eigen residual ||(A - M)psi - b_psi psi||: {rpt.fmt(dec.eigen_residual)}"]
    out = {"assignment_source": source, "b_psi": dec.b_psi, "M": dec.M.matrix, "B": dec.B.matrix,
           "eigen_residual": dec.eigen_residual}
    if dec.eigen_residual < prof.variance_gate:
        var_a = variance(sc.observable, sc.state)
        var_m = variance(dec.M, sc.state)
        cov = symmetrized_covariance(sc.observable, dec.M, sc.state)
        lines += [f"Var(A): {rpt.fmt(var_a)}", f"Var(M): {rpt.fmt(var_m)}",
                  f"Cov_sym(A, M): {rpt.fmt(cov)}"]
        out.update({"var_A": var_a, "var_M": var_m, "cov_AM": cov})
    return "\n".join(lines), out


def cmd_quasiprob(sc: Scenario, flags: Flags):
    prof = PROFILES[flags.profile]
    table = joint_quasiprob(sc.state, sc.povm(), sc.observable)
    neg = negativity(table, tol=prof.classical)
    est = estimate_from_quasiprob(table)
    entries = table.complex_entries if flags.complex_table else table.entries
    rows = [[a, rank, *row] for a, rank, row in zip(table.values, table.ranks, entries)]
    text = "\n".join([
        rpt.table(["eigenvalue", "rank", *table.labels], rows, flags.color),
        rpt.table(["outcome", "P(m)", "estimate"],
                  [[lab, p, est[lab]] for lab, p in zip(table.labels, table.column_marginals())],
                  flags.color),
        f"min entry: {rpt.fmt(neg.min_entry)}",
        f"negative mass: {rpt.fmt(neg.negative_mass)}",
        "verdict: " + _verdict(neg.classical, "classical-representable", "non-classical", flags.color),
    ])
    out = {"eigenvalues": table.values, "ranks": table.ranks, "labels": table.labels,
           "entries": table.entries, "estimate": est.as_dict(),
           "min_entry": neg.min_entry, "negative_mass": neg.negative_mass,
           "classical": neg.classical}
    if flags.complex_table:
        out["complex_entries"] = table.complex_entries
    return text, out


def cmd_weakmeas(sc: Scenario, flags: Flags):
    if isinstance(sc.measurement, Coupling):
        family, post = sc.measurement.family, sc.measurement.postselect
    else:
        family, post = CouplingFamily(sc.observable, flags.phi_grid[0]), sc.basis()
    rows, out = [], []
    for lab, f in zip(post.labels, post.vectors):
        try:
            wv = weak_value(sc.state, f, family.observable, lab)
            sweep = shift_sweep(family, sc.state, f, flags.phi_grid)
        except DomainError as exc:
            out.append({"label": lab, "skipped": str(exc)})
            rows.append([lab, None, None, None, None])
            continue
        devs = [abs(s - wv.value.real) for _, s in sweep]
        ratios = [d0 / d1 if d1 > 0 else None for d0, d1 in zip(devs, devs[1:])]
        for (phi, s), d in zip(sweep, devs):
            rows.append([lab, phi, s, wv.value.real, d])
        out.append({"label": lab, "weak_value": wv.value,
                    "postselect_probability": wv.postselect_probability,
                    "sweep": [{"phi": phi, "shift_over_phi": s, "deviation": d}
                              for (phi, s), d in zip(sweep, devs)],
                    "halving_ratios": ratios})
    text = rpt.table(["postselect", "phi", "shift/phi", "Re weak value", "deviation"], rows, flags.color)
    return text, {"postselections": out}


def cmd_sample(sc: Scenario, flags: Flags):
    rep = sample_outcomes(sc.povm(), sc.state, flags.n, flags.seed)
    rows = list(zip(rep.labels, rep.counts, rep.frequencies, rep.probabilities, rep.bounds,
                    ["yes" if ok else "NO" for ok in rep.within_bounds]))
    text = (rpt.table(["outcome", "count", "frequency", "P(m)", "3 sigma", "within"], rows, flags.color)
            + f"\nn = {rep.n}, seed = {rep.seed}, generator Philox-4x64-10")
    return text, {"n": rep.n, "seed": rep.seed, "generator": "philox4x64-10",
                  "outcomes": [{"label": lab, "count": c, "frequency": f, "p": p, "bound": b,
                                "within_3sigma": ok}
                               for lab, c, f, p, b, ok in zip(rep.labels, rep.counts, rep.frequencies,
                                                              rep.probabilities, rep.bounds,
                                                              rep.within_bounds)]}


_DISPATCH = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(command: str, scenario: Scenario, flags: Flags = Flags()) -> tuple[str, dict]:
    """Execute one command; returns the text table and the JSON-ready report."""
    text, body = _DISPATCH[command](scenario, flags)
    return text, {"command": command, "profile": flags.profile, **body}


def _phi_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid phi grid {text!r}") from None
    if not grid or any(g == 0 for g in grid):
        raise argparse.ArgumentTypeError("phi grid entries must be nonzero")
    return grid


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("n must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmeter", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scenario", type=Path, help="scenario JSON file")
    p.add_argument("--json", type=Path, metavar="OUT", help="also write a machine-readable report")
    p.add_argument("--n", type=_positive, default=10000, help="number of samples (sample)")
    p.add_argument("--seed", type=_seed, default=0, help="sampler seed (sample)")
    p.add_argument("--phi-grid", type=_phi_grid, default=(0.2, 0.1, 0.05),
                   help="comma-separated coupling strengths (weakmeas)")
    p.add_argument("--b-psi", type=float, default=None, help="offset for decompose")
    p.add_argument("--tolerance-profile", choices=sorted(PROFILES), default="default")
    p.add_argument("--complex", action="store_true", help="show the complex quasiprobability table")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = Flags(n=args.n, seed=args.seed, phi_grid=args.phi_grid, b_psi=args.b_psi,
                  profile=args.tolerance_profile, complex_table=args.complex,
                  color=rpt.use_color())
    try:
        try:
            text = args.scenario.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ParseError(f"cannot read {args.scenario}: {exc}") from exc
        scenario = parse_scenario(text, norm_tol=PROFILES[flags.profile].norm)
        out_text, report = run(args.command, scenario, flags)
    except QMeterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(out_text)
    if args.json is not None:
        args.json.write_text(rpt.dumps(report), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
