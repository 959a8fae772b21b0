"""Command line interface: ``bieberbach {classify,spectrum,eta,verify}``.

Every command writes one document, as JSON or as CSV.  In CSV the scalar
metadata sits in leading ``# key=<json>`` lines followed by the table, so both
formats carry the same data.  Exit codes: 0 success, 1 failed verification,
2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .classifier import (EXPECTED_COUNTS, SPACES, StructureRecord, enumerate_all,
                         enumerate_structures, record_for, table_mismatches)
from .exact import format_fraction
from .group_action import (InadmissibleError, cyclic_shift, regular_rep_conjugator,
                           sigma_plus_solve, tau_for_sigma, verify_action)
from .nc_torus import HALF, SpinStructure
from .operators import Report
from .spectra import (Multiset, enumerate_by_source, eta_closed_form, eta_numeric_oracle,
                      projector_spectrum, reliable_cutoff, sorted_items, verify_projector)
from .spectral_triple import (TAU_I, LatticeWindow, Tau, TripleParams, real_structure,
                              verify_triple_axioms)

SCHEMA_VERSION = 1
MUTATIONS = ("flip-J-sign", "wrong-tau", "wrong-epsilon1", "flip-beta")
ORACLE_TOLERANCE = 1e-6

# Column types for reading CSV back; anything else stays a string.
_COLUMN_TYPES = {
    "sign": int, "multiplicity": int, "sigma": int, "kappa": int,
    "passed": lambda s: s == "True", "seconds": float,
    "eta_numeric": float, "oracle_delta": float,
}


class UsageError(Exception):
    """Invalid command line input (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    space: Optional[str] = None
    all_spaces: bool = False
    eps: tuple = (HALF, Fraction(0), Fraction(0))
    sigma: Optional[int] = None
    kappa: int = 1
    tau_branch: Optional[int] = None
    window: int = 6
    lambda_sq_max: Optional[Fraction] = None
    r_squared: Fraction = Fraction(1)
    fmt: str = "json"
    out: Optional[str] = None
    mutate: Optional[str] = None
    unsafe_cutoff: bool = False
    timing: bool = True

    def record(self) -> StructureRecord:
        if self.space is None:
            raise UsageError("--space is required")
        tau = None
        if self.tau_branch is not None:
            if self.space != "B2":
                raise UsageError(f"τ is fixed by σ for {self.space}; --tau-branch applies to B2 only")
            tau = TAU_I if self.tau_branch > 0 else TAU_I.conjugate()
        return record_for(self.space, *self.eps, sigma=self.sigma, kappa=self.kappa,
                          tau=tau, r_squared=self.r_squared)


# --- documents ------------------------------------------------------------------------

def document(command: str, meta: dict, rows: list[dict]) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "meta": meta, "rows": rows}


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    for key in ("schema_version", "command"):
        buf.write(f"# {key}={json.dumps(doc[key], ensure_ascii=False)}\n")
    for key, value in doc["meta"].items():
        buf.write(f"# meta.{key}={json.dumps(value, ensure_ascii=False)}\n")
    rows = doc["rows"]
    columns = list(rows[0]) if rows else []
    buf.write(f"# columns={json.dumps(columns)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if columns:
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def from_csv(text: str) -> dict:
    """Inverse of :func:`to_csv`."""
    doc: dict = {"meta": {}}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            if key.startswith("meta."):
                doc["meta"][key[5:]] = json.loads(value)
            else:
                doc[key] = json.loads(value)
        else:
            body.append(line)
    columns = doc.pop("columns")
    reader = csv.reader(body[1:]) if columns else []
    doc["rows"] = [{c: _COLUMN_TYPES.get(c, str)(v) for c, v in zip(columns, cells)}
                   for cells in reader]
    return {k: doc[k] for k in ("schema_version", "command", "meta", "rows")}


def render(doc: dict, fmt: str) -> str:
    return to_json(doc) if fmt == "json" else to_csv(doc)


# --- classify -------------------------------------------------------------------------

def cmd_classify(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.all_spaces == (cfg.space is not None):
        raise UsageError("classify needs exactly one of --space or --all")
    records = enumerate_all(cfg.r_squared) if cfg.all_spaces else \
        enumerate_structures(cfg.space, cfg.r_squared)
    counts = {s: sum(r.space == s for r in records) for s in SPACES}
    expected = {s: EXPECTED_COUNTS[s] for s in SPACES if cfg.all_spaces or s == cfg.space}
    problems = table_mismatches(records)
    problems += [f"{s}: {counts[s]} records, expected {n}" for s, n in expected.items()
                 if counts[s] != n and not any(p.startswith(f"{s}:") for p in problems)]
    meta = {"counts": {s: counts[s] for s in expected}, "total": len(records),
            "matches_expected": not problems, "problems": problems}
    return document("classify", meta, [r.to_row() for r in records]), 0 if not problems else 1


# --- spectrum -------------------------------------------------------------------------

def _cutoff(cfg: RunConfig, params: TripleParams) -> Fraction:
    if cfg.window < 2:
        raise UsageError("--window must be at least 2")
    safe = reliable_cutoff(params, cfg.window)
    if cfg.lambda_sq_max is None:
        return safe
    if cfg.lambda_sq_max <= 0:
        raise UsageError("--lambda-sq-max must be positive")
    if cfg.lambda_sq_max > safe and not cfg.unsafe_cutoff:
        raise UsageError(f"--lambda-sq-max {format_fraction(cfg.lambda_sq_max)} exceeds the reliable "
                         f"cutoff {format_fraction(safe)} for window {cfg.window}; "
                         "pass --unsafe-cutoff to override")
    return cfg.lambda_sq_max


def _eigen_rows(spectrum: Multiset, source: Optional[str] = None) -> list[dict]:
    rows = []
    for ev, m in sorted_items(spectrum):
        if m <= 0:
            continue
        row = {"sign": ev.sign, "lambda_squared": format_fraction(ev.lambda_sq), "multiplicity": m}
        if source is not None:
            row["source"] = source
        rows.append(row)
    return rows


def cmd_spectrum(cfg: RunConfig) -> tuple[dict, int]:
    record = cfg.record()
    cutoff = _cutoff(cfg, record.params)
    window = LatticeWindow(cfg.window, 0, record.spin, symmetry=record.N)
    computed = projector_spectrum(window, record.action, record.params, cutoff)
    by_source = enumerate_by_source(record.spectrum, cutoff)
    predicted: Multiset = sum(by_source.values(), Multiset())
    agree = computed == predicted
    rows = []
    for source in sorted(by_source):
        rows += _eigen_rows(by_source[source], source)
    rows.sort(key=lambda r: (Fraction(r["lambda_squared"]), -r["sign"], r["source"]))
    meta = {"record": record.to_row(), "window": cfg.window,
            "lambda_sq_max": format_fraction(cutoff), "agree": agree,
            "count": sum(predicted.values()),
            "projector_only": _eigen_rows(computed - predicted),
            "predicted_only": _eigen_rows(predicted - computed)}
    return document("spectrum", meta, rows), 0 if agree else 1


# --- eta ------------------------------------------------------------------------------

def cmd_eta(cfg: RunConfig) -> tuple[dict, int]:
    record = cfg.record()
    rows = []
    for c in record.spectrum.sp1_components():
        exact = eta_closed_form(c)
        numeric = eta_numeric_oracle(c)
        rows.append({"component": c.label(), "eta": format_fraction(exact),
                     "eta_numeric": numeric, "oracle_delta": abs(numeric - float(exact))})
    delta = max((r["oracle_delta"] for r in rows), default=0.0)
    meta = {"record": record.to_row(), "eta": format_fraction(record.eta),
            "eta_numeric": sum(r["eta_numeric"] for r in rows), "oracle_delta": delta}
    return document("eta", meta, rows), 0 if delta < ORACLE_TOLERANCE else 1


# --- verify ---------------------------------------------------------------------------

def _mutated_action(record: StructureRecord, mutate: Optional[str]):
    """The (action, params) to check, with the seeded mutation applied where it is relevant."""
    action, params = record.action, record.params
    if mutate == "wrong-tau" and record.N == 4:
        tau = Tau.from_turn(Fraction(1, 6))
        return action.mutated(tau=tau), params.with_(tau=tau)
    if mutate == "wrong-epsilon1" and record.N == 2:
        spin = SpinStructure(0, record.spin.eps2, record.spin.eps3)
        return action.mutated(spin=spin), params.with_(spin=spin)
    if mutate == "flip-beta" and record.N == 3:
        return action.mutated(beta_plus=action.beta_plus.conjugate()), params
    return action, params


def _sigma_plus_table() -> dict[tuple, bool]:
    out = {}
    for N in (2, 3, 4, 6):
        tau = tau_for_sigma(N, 1) or TAU_I
        for e2 in (Fraction(0), HALF):
            for e3 in (Fraction(0), HALF):
                out[(N, e2, e3)] = bool(sigma_plus_solve(N, e2, e3, tau))
    return out


EXPECTED_SIGMA_PLUS = {
    (N, e2, e3): N == 2 or (e2 == e3 == 0) or (N == 4 and e2 == e3)
    for N in (2, 3, 4, 6) for e2 in (Fraction(0), HALF) for e3 in (Fraction(0), HALF)
}


def run_verification(window: int, mutate: Optional[str] = None, r_squared=1) -> Report:
    """Every module-level verifier, collected into one report."""
    if mutate is not None and mutate not in MUTATIONS:
        raise UsageError(f"unknown mutation {mutate!r}")
    margin = 2
    if window <= margin:
        raise UsageError(f"margin insufficient: window {window} must exceed the margin {margin}")
    report = Report("verify")
    J = real_structure(mutate)

    def timed(name: str, fn):
        t0 = time.perf_counter()
        ok, detail = fn()
        report.add(name, ok, detail, time.perf_counter() - t0)

    timed("classify: counts (8,2,4,2)", lambda: (
        {s: len(enumerate_structures(s)) for s in SPACES} == EXPECTED_COUNTS, ""))
    records = enumerate_all(r_squared)
    timed("classify: eta table", lambda: (not table_mismatches(records),
                                         "; ".join(table_mismatches(records))))

    tau_generic = Tau(Fraction(1, 3), Fraction(2), 1)
    for spin in SpinStructure.all():
        params = TripleParams(tau=tau_generic, spin=spin, r_squared=r_squared)
        sub = verify_triple_axioms(LatticeWindow(window, margin, spin), params, J=J)
        report.extend(sub, prefix=f"triple {spin}: ")

    for record in records:
        action, params = _mutated_action(record, mutate)
        label = f"{record.space} {record.spin} σ={record.sigma} κ={record.kappa}"
        win = LatticeWindow(window, 1, action.spin)
        report.extend(verify_action(win, action, params, J=J), prefix=f"action {label}: ")
        # P is exact on the whole lattice; a radius-1 interior keeps this group fast
        report.extend(verify_projector(LatticeWindow(window, window - 1, record.spin),
                                       record.action, record.params), prefix=f"projector {label}: ")
        t0 = time.perf_counter()
        cutoff = reliable_cutoff(record.params, window)
        sym = LatticeWindow(window, 0, record.spin, symmetry=record.N)
        got = projector_spectrum(sym, record.action, record.params, cutoff)
        want = sum(enumerate_by_source(record.spectrum, cutoff).values(), Multiset())
        report.add(f"spectrum {label}: projector = predicted", got == want,
                   "" if got == want else f"{len(got - want)} extra, {len(want - got)} missing",
                   time.perf_counter() - t0)
        partner = record.partner()
        report.add(f"eta {label}: partner negates", partner.eta == -record.eta,
                   f"{record.eta} vs {partner.eta}")
        for c in record.spectrum.sp1_components():
            delta = abs(eta_numeric_oracle(c) - float(eta_closed_form(c)))
            report.add(f"eta {label}: oracle {c.label()}", delta < ORACLE_TOLERANCE, f"delta={delta:.2e}")

    for N in (2, 3, 4, 6):
        def conj_check(N=N):
            U, C = regular_rep_conjugator(N), cyclic_shift(N)
            ok = np.array_equal(U @ C @ U.T, np.linalg.matrix_power(C, N - 1)) and \
                np.array_equal(U, U.T) and np.array_equal(U @ U, np.eye(N, dtype=U.dtype))
            return ok, ""
        timed(f"conjugator N={N}: U C U^-1 = C^-1", conj_check)

    timed("sigma_+ admissibility table", lambda: (_sigma_plus_table() == EXPECTED_SIGMA_PLUS, ""))
    return report


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    report = run_verification(cfg.window, cfg.mutate, cfg.r_squared)
    rows = []
    for c in report.checks:
        row = {"check": c.name, "passed": c.passed, "detail": c.detail}
        if cfg.timing:
            row["seconds"] = round(c.seconds, 6)
        rows.append(row)
    first = report.first_failure()
    meta = {"window": cfg.window, "mutate": cfg.mutate, "checks": len(report.checks),
            "passed": sum(c.passed for c in report.checks), "ok": report.ok,
            "first_failure": first.name if first else None}
    return document("verify", meta, rows), 0 if report.ok else 1


# --- argument parsing -----------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact fraction: {text!r}") from None


def _sign(text: str) -> int:
    if text not in ("1", "+1", "-1"):
        raise argparse.ArgumentTypeError("expected +1 or -1")
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bieberbach", description=(
        "Flat real spectral triples over noncommutative Bieberbach manifolds: "
        "classification, exact Dirac spectra and eta invariants."))
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, window_default):
        p.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--r-squared", type=_fraction, default=Fraction(1), help="R² as p/q")
        p.add_argument("--window", type=int, default=window_default, help="window bound M")

    def structure(p):
        p.add_argument("--space", choices=tuple(SPACES), required=True)
        p.add_argument("--epsilon1", type=_fraction, default=HALF)
        p.add_argument("--epsilon2", type=_fraction, default=Fraction(0))
        p.add_argument("--epsilon3", type=_fraction, default=Fraction(0))
        p.add_argument("--sigma", type=_sign, help="Dirac branch (default: canonical)")
        p.add_argument("--kappa", type=_sign, default=1)
        p.add_argument("--tau-branch", type=_sign, help="B2 only: τ = i (+1) or -i (-1)")

    p = sub.add_parser("classify", help="list all structures with β₊, ζ, τ and η")
    common(p, 6)
    p.add_argument("--space", choices=tuple(SPACES))
    p.add_argument("--all", action="store_true", dest="all_spaces")

    p = sub.add_parser("spectrum", help="projector spectrum against the closed form")
    common(p, 6)
    structure(p)
    p.add_argument("--lambda-sq-max", type=_fraction, help="cutoff on λ² (default: reliable cutoff)")
    p.add_argument("--unsafe-cutoff", action="store_true", help="allow cutoffs above the reliable one")

    p = sub.add_parser("eta", help="exact eta invariant and the numeric oracle")
    common(p, 6)
    structure(p)

    p = sub.add_parser("verify", help="run every exact check")
    common(p, 4)
    p.add_argument("--mutate", choices=MUTATIONS, help="seed a defect (test hook)")
    p.add_argument("--no-timing", action="store_false", dest="timing",
                   help="omit per-check timings so the output is reproducible")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(args, name, default)  # noqa: E731
    if get("r_squared") is not None and args.r_squared <= 0:
        raise UsageError("--r-squared must be positive")
    return RunConfig(
        command=args.command, space=get("space"), all_spaces=get("all_spaces", False),
        eps=(get("epsilon1", HALF), get("epsilon2", Fraction(0)), get("epsilon3", Fraction(0))),
        sigma=get("sigma"), kappa=get("kappa", 1), tau_branch=get("tau_branch"),
        window=args.window, lambda_sq_max=get("lambda_sq_max"), r_squared=args.r_squared,
        fmt=args.fmt, out=get("out"), mutate=get("mutate"),
        unsafe_cutoff=get("unsafe_cutoff", False), timing=get("timing", True))


COMMANDS = {"classify": cmd_classify, "spectrum": cmd_spectrum, "eta": cmd_eta, "verify": cmd_verify}


def run(cfg: RunConfig) -> tuple[dict, int]:
    return COMMANDS[cfg.command](cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        doc, code = run(cfg)
    except (UsageError, InadmissibleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(doc, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == 1:
        meta = doc["meta"]
        reason = (meta.get("first_failure") or "; ".join(meta.get("problems", []))
                  or ("multisets differ" if meta.get("agree") is False else "oracle delta too large"))
        print(f"verification failed: {reason}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
