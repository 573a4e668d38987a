"""Command-line interface: ``analyze``, ``payoff``, ``scan`` and ``reproduce``.

Game spec files are JSON documents::

    {
      "payoffs": {"alpha": 2, "beta": 1, "gamma": 0},
      "state": {"moduli2": [0.3125, 0.3125, 0.0625, 0.3125]},
      "profile": {"p": 1, "q": 1}
    }

``state`` may instead hold ``"amplitudes": [[re, im], ...]`` (four pairs).
Reports print a human-readable part, then :data:`MARKER`, then JSON that
embeds the spec verbatim, so a report file is itself a valid spec input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    GamePayoffs,
    InitialState,
    StrategyProfile,
    bilinear_coefficients,
    make_initial_state,
    payoffs_closed_form,
    payoffs_trace,
)
from .equilibria import NE_TOL, corner_payoff_matrix, dilemma_analysis, enumerate_equilibria
from .exceptions import InvalidPayoffsError, QuantumGameError
from .explorer import format_number, reproduce, scan_simplex, write_scan

MARKER = "#--- machine-readable ---"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REPRODUCTION = 3
EXIT_INTERNAL = 4

MODULI_SUM_TOL = 1e-9


class SpecError(Exception):
    """Malformed game spec; ``field`` names the offending top-level key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InternalConsistencyError(Exception):
    pass


@dataclass(frozen=True)
class GameSpec:
    payoffs: GamePayoffs
    amplitudes: Optional[tuple[complex, complex, complex, complex]] = None
    moduli2: Optional[tuple[float, float, float, float]] = None
    profile: Optional[StrategyProfile] = None

    def __post_init__(self) -> None:
        if (self.amplitudes is None) == (self.moduli2 is None):
            raise SpecError("state", "give exactly one of 'amplitudes' or 'moduli2'")

    def state(self) -> InitialState:
        try:
            if self.moduli2 is not None:
                return InitialState.from_moduli2(self.moduli2)
            return make_initial_state(*self.amplitudes)
        except QuantumGameError as exc:
            raise SpecError("state", str(exc)) from exc

    def to_dict(self) -> dict:
        out: dict = {
            "payoffs": {
                "alpha": self.payoffs.alpha,
                "beta": self.payoffs.beta,
                "gamma": self.payoffs.gamma,
            }
        }
        if self.moduli2 is not None:
            out["state"] = {"moduli2": list(self.moduli2)}
        else:
            out["state"] = {"amplitudes": [[z.real, z.imag] for z in self.amplitudes]}
        if self.profile is not None:
            out["profile"] = {"p": self.profile.p, "q": self.profile.q}
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "GameSpec":
        if not isinstance(doc, dict):
            raise SpecError("spec", "top level must be an object")
        return cls(
            payoffs=_parse_payoffs(doc.get("payoffs")),
            profile=_parse_profile(doc.get("profile")),
            **_parse_state(doc.get("state")),
        )


def _real(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(field, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SpecError(field, f"expected a finite number, got {value!r}")
    return float(value)


def _parse_payoffs(doc) -> GamePayoffs:
    if not isinstance(doc, dict) or set(doc) != {"alpha", "beta", "gamma"}:
        raise SpecError("payoffs", "expected an object with keys alpha, beta, gamma")
    return GamePayoffs(*(_real(doc[k], "payoffs") for k in ("alpha", "beta", "gamma")),
                       relaxed=True)


def _parse_state(doc) -> dict:
    if not isinstance(doc, dict) or len(doc) != 1 or not set(doc) <= {"amplitudes", "moduli2"}:
        raise SpecError("state", "expected exactly one of 'amplitudes' or 'moduli2'")
    if "moduli2" in doc:
        values = doc["moduli2"]
        if not isinstance(values, list) or len(values) != 4:
            raise SpecError("state", "'moduli2' must list four numbers")
        moduli = tuple(_real(v, "state") for v in values)
        if any(m < 0 for m in moduli):
            raise SpecError("state", "'moduli2' entries must be nonnegative")
        if abs(sum(moduli) - 1.0) > MODULI_SUM_TOL:
            raise SpecError("state", f"'moduli2' sums to {sum(moduli)!r}, expected 1")
        return {"moduli2": moduli}
    values = doc["amplitudes"]
    if not isinstance(values, list) or len(values) != 4:
        raise SpecError("state", "'amplitudes' must list four [re, im] pairs")
    amps = []
    for pair in values:
        if not isinstance(pair, list) or len(pair) != 2:
            raise SpecError("state", f"amplitude {pair!r} is not a [re, im] pair")
        amps.append(complex(_real(pair[0], "state"), _real(pair[1], "state")))
    return {"amplitudes": tuple(amps)}


def _parse_profile(doc) -> Optional[StrategyProfile]:
    if doc is None:
        return None
    if not isinstance(doc, dict) or set(doc) != {"p", "q"}:
        raise SpecError("profile", "expected an object with keys p and q")
    try:
        return StrategyProfile(_real(doc["p"], "profile"), _real(doc["q"], "profile"))
    except QuantumGameError as exc:
        raise SpecError("profile", str(exc)) from exc


def parse_spec_text(text: str) -> GameSpec:
    """Parse a spec document, or the spec embedded in a report."""
    if MARKER in text:
        body = text.split(MARKER, 1)[1]
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            raise SpecError("spec", f"invalid JSON after report marker: {exc}") from exc
        if not isinstance(doc, dict) or "spec" not in doc:
            raise SpecError("spec", "report carries no embedded spec")
        return GameSpec.from_dict(doc["spec"])
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("spec", f"invalid JSON: {exc}") from exc
    return GameSpec.from_dict(doc)


def load_spec(path: str) -> GameSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError("spec", f"cannot read {path}: {exc.strerror}") from exc
    return parse_spec_text(text)


def _num(x: float) -> float:
    return float(format_number(x))


def _regime(state: InitialState) -> str:
    m = state.moduli2
    if any(abs(v - 1.0) <= 1e-12 for v in m):
        return "classical limit"
    if m[1] <= 1e-12 and m[2] <= 1e-12:
        return "Marinatto-Weber family (b = c = 0)"
    return "general entangled state"


def _pair(pair) -> str:
    return f"({format_number(pair.alice)}, {format_number(pair.bob)})"


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def analyze_report(spec: GameSpec) -> str:
    state = spec.state()
    payoffs = spec.payoffs
    if not payoffs.canonical:
        raise SpecError("payoffs", "analysis requires alpha > beta > gamma")
    matrix = corner_payoff_matrix(state, payoffs)
    equilibria = enumerate_equilibria(state, payoffs)
    coeffs = bilinear_coefficients(state, payoffs)
    verdict = dilemma_analysis(state, payoffs)
    regime = _regime(state)

    lines = [
        "quantum Battle of the Sexes analysis",
        f"regime: {regime}",
        "moduli squared: " + " ".join(format_number(v) for v in state.moduli2),
        "payoffs: " + " ".join(format_number(v) for v in payoffs.as_tuple()),
        "",
        "corner payoffs (alice, bob)",
        f"{'':8}{'q=1':>28}{'q=0':>28}",
        f"{'p=1':8}{_pair(matrix[0][0]):>28}{_pair(matrix[0][1]):>28}",
        f"{'p=0':8}{_pair(matrix[1][0]):>28}{_pair(matrix[1][1]):>28}",
        "",
        "nash equilibria",
    ]
    for eq in equilibria:
        where = f"({format_number(eq.profile.p)}, {format_number(eq.profile.q)})"
        if eq.interval is not None:
            lo, hi = eq.interval
            where += f" {eq.free_axis} in [{format_number(lo)}, {format_number(hi)}]"
        strict = "strict" if eq.strict else "weak"
        lines.append(f"  {eq.kind.value:<15} {where:<40} {strict:<7} payoffs {_pair(eq.payoffs)}")
    lines += ["", "bilinear coefficients"]
    lines += [f"  {k:<12} {format_number(v)}" for k, v in coeffs.as_dict().items()]
    lines += [
        "",
        "dilemma",
        f"  (0,0) is NE: {verdict.corner_00_is_ne}",
        f"  (1,1) is NE: {verdict.corner_11_is_ne}",
        f"  equal corner payoffs: {verdict.equal_corner_payoffs}",
        f"  maximin alice: {verdict.maximin_choice_alice.value}",
        f"  maximin bob: {verdict.maximin_choice_bob.value}",
        f"  resolved: {verdict.resolved}",
        f"  unique solution: {verdict.selected_corner or '-'}",
    ]
    doc = {
        "command": "analyze",
        "spec": spec.to_dict(),
        "regime": regime,
        "corner_payoffs": {
            f"{p}{q}": [_num(matrix[i][j].alice), _num(matrix[i][j].bob)]
            for i, p in enumerate((1, 0))
            for j, q in enumerate((1, 0))
        },
        "equilibria": [
            {
                "kind": eq.kind.value,
                "p": _num(eq.profile.p),
                "q": _num(eq.profile.q),
                "strict": eq.strict,
                "free_axis": eq.free_axis,
                "interval": None if eq.interval is None else [_num(v) for v in eq.interval],
                "payoffs": [_num(eq.payoffs.alice), _num(eq.payoffs.bob)],
            }
            for eq in equilibria
        ],
        "coefficients": {k: _num(v) for k, v in coeffs.as_dict().items()},
        "verdict": {
            "corner_00_is_ne": verdict.corner_00_is_ne,
            "corner_11_is_ne": verdict.corner_11_is_ne,
            "equal_corner_payoffs": verdict.equal_corner_payoffs,
            "maximin_choice_alice": verdict.maximin_choice_alice.value,
            "maximin_choice_bob": verdict.maximin_choice_bob.value,
            "resolved": verdict.resolved,
            "unique_solution": verdict.selected_corner,
        },
    }
    return "\n".join(lines) + "\n" + MARKER + "\n" + _dump(doc) + "\n"


def payoff_line(spec: GameSpec) -> str:
    """Trace-path payoffs at the spec's profile, checked against the closed form."""
    if spec.profile is None:
        raise SpecError("profile", "the payoff command needs a profile")
    state = spec.state()
    traced = payoffs_trace(state, spec.payoffs, spec.profile)
    closed = payoffs_closed_form(state, spec.payoffs, spec.profile)
    if max(abs(traced.alice - closed.alice), abs(traced.bob - closed.bob)) > NE_TOL:
        raise InternalConsistencyError(
            f"trace payoffs {traced} disagree with closed form {closed}"
        )
    return f"{format_number(traced.alice)} {format_number(traced.bob)}\n"


def reproduce_report(payoffs: GamePayoffs) -> tuple[str, bool]:
    report = reproduce(payoffs)
    lines = ["reproduction at payoffs " + " ".join(format_number(v) for v in payoffs.as_tuple())]
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(f"{status}  {check.name}: expected {_render(check.expected)}, "
                     f"got {_render(check.observed)}")
    lines.append(" ".join(f"{k} = {format_number(v)}" for k, v in report.primed.items()))
    lines.append(f"{len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    doc = {
        "command": "reproduce",
        "payoffs": {"alpha": payoffs.alpha, "beta": payoffs.beta, "gamma": payoffs.gamma},
        "passed": report.passed,
        "primed": {k: _num(v) for k, v in report.primed.items()},
        "checks": [{"name": c.name, "passed": c.passed} for c in report.checks],
        "failures": [c.name for c in report.failures],
    }
    return "\n".join(lines) + "\n" + MARKER + "\n" + _dump(doc) + "\n", report.passed


def _render(value) -> str:
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(_render(v) for v in value) + ")"
    return str(value)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantum-bos",
        description="Equilibria and dilemma analysis of the quantized Battle of the Sexes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="full equilibrium and dilemma report for a spec")
    analyze.add_argument("specfile")

    payoff = sub.add_parser("payoff", help="expected payoffs at the spec's profile")
    payoff.add_argument("specfile")

    scan = sub.add_parser("scan", help="sweep the squared-moduli simplex and write CSV")
    scan.add_argument("--alpha", type=float, required=True)
    scan.add_argument("--beta", type=float, required=True)
    scan.add_argument("--gamma", type=float, required=True)
    scan.add_argument("--resolution", type=_positive_int, default=16)
    scan.add_argument("--out", required=True)
    scan.add_argument("--jobs", type=_positive_int, default=1, help="worker processes (output order is fixed)")

    rep = sub.add_parser("reproduce", help="check the reference results")
    rep.add_argument("--alpha", type=float, default=2.0)
    rep.add_argument("--beta", type=float, default=1.0)
    rep.add_argument("--gamma", type=float, default=0.0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "analyze":
            out.write(analyze_report(load_spec(args.specfile)))
        elif args.command == "payoff":
            out.write(payoff_line(load_spec(args.specfile)))
        elif args.command == "scan":
            payoffs = GamePayoffs(args.alpha, args.beta, args.gamma)
            try:
                fh = open(args.out, "w", encoding="utf-8", newline="")
            except OSError as exc:
                raise SpecError("out", f"cannot write {args.out}: {exc.strerror}") from exc
            with fh:
                counts = write_scan(scan_simplex(payoffs, args.resolution, n_jobs=args.jobs), fh)
            out.write(
                f"total={counts['total']} resolved={counts['resolved']} "
                f"resolved_11={counts['resolved_11']} resolved_00={counts['resolved_00']}\n"
            )
        elif args.command == "reproduce":
            text, passed = reproduce_report(GamePayoffs(args.alpha, args.beta, args.gamma))
            out.write(text)
            if not passed:
                print("reproduction failed", file=sys.stderr)
                return EXIT_REPRODUCTION
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidPayoffsError as exc:
        print(f"error: payoffs: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QuantumGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
