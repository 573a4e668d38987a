"""Lattice sweeps over the squared-moduli simplex and the reference reproduction run."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .core import CORNERS, GamePayoffs, InitialState, make_initial_state
from .equilibria import corner_payoff_matrix, dilemma_analysis, is_corner_nash
from .exceptions import InvalidPayoffsError

SUM_TOL = 1e-9
CHECK_TOL = 1e-12

RESOLVING_11_MODULI = (5 / 16, 5 / 16, 1 / 16, 5 / 16)
RESOLVING_00_MODULI = (5 / 16, 1 / 16, 5 / 16, 5 / 16)
BELL_AMPLITUDES = (1 / math.sqrt(2), 0.0, 0.0, 1 / math.sqrt(2))
PRODUCT_AMPLITUDES = (1.0, 0.0, 0.0, 0.0)

SCAN_COLUMNS = (
    "a2", "b2", "c2", "d2",
    "ne_00", "ne_11", "equal_corner_payoffs", "resolved", "selected_corner",
    "alice_11", "bob_11", "alice_10", "bob_10", "alice_01", "bob_01",
)


def format_number(x: float) -> str:
    """Decimal rendering with 12 significant digits; rounding dust prints as 0."""
    if abs(x) < 5e-13:
        return "0"
    return format(x, ".12g")


@dataclass(frozen=True)
class ScanRecord:
    lattice: tuple[int, int, int, int]
    moduli2: tuple[float, float, float, float]
    ne_corner_00: bool
    ne_corner_11: bool
    equal_corner_payoffs: bool
    resolved: bool
    selected_corner: Optional[str]
    # ($_A, $_B) at (1,1), (1,0), (0,1)
    corner_payoffs: tuple[float, float, float, float, float, float] = field(repr=False)

    def __post_init__(self) -> None:
        if abs(sum(self.moduli2) - 1.0) > SUM_TOL:
            raise ValueError(f"moduli sum to {sum(self.moduli2)!r}, expected 1")
        if self.resolved and not (
            self.ne_corner_00 and self.ne_corner_11 and self.equal_corner_payoffs
        ):
            raise ValueError("a resolved record needs both corner equilibria with equal payoffs")

    def to_row(self) -> list[str]:
        return (
            [format_number(m) for m in self.moduli2]
            + [str(int(flag)) for flag in (
                self.ne_corner_00, self.ne_corner_11, self.equal_corner_payoffs, self.resolved)]
            + [self.selected_corner or "-"]
            + [format_number(v) for v in self.corner_payoffs]
        )


def simplex_lattice(resolution: int) -> Iterator[tuple[int, int, int, int]]:
    """All ``(i, j, k, l)`` with ``i + j + k + l == resolution``, lexicographically."""
    n = resolution
    for i in range(n + 1):
        for j in range(n - i + 1):
            for k in range(n - i - j + 1):
                yield (i, j, k, n - i - j - k)


def lattice_size(resolution: int) -> int:
    return math.comb(resolution + 3, 3)


def analyze_point(payoffs: GamePayoffs, lattice: tuple[int, int, int, int]) -> ScanRecord:
    n = sum(lattice)
    moduli2 = tuple(x / n for x in lattice)
    state = make_initial_state(*(math.sqrt(m) for m in moduli2))
    verdict = dilemma_analysis(state, payoffs)
    (m11, m10), (m01, _) = verdict.corner_payoffs
    return ScanRecord(
        lattice=lattice,
        moduli2=moduli2,
        ne_corner_00=verdict.corner_00_is_ne,
        ne_corner_11=verdict.corner_11_is_ne,
        equal_corner_payoffs=verdict.equal_corner_payoffs,
        resolved=verdict.resolved,
        selected_corner=verdict.selected_corner,
        corner_payoffs=(m11.alice, m11.bob, m10.alice, m10.bob, m01.alice, m01.bob),
    )


def _analyze_chunk(args):
    payoffs, points = args
    return [analyze_point(payoffs, point) for point in points]


def _chunks(items: Iterable, size: int) -> Iterator[list]:
    chunk = []
    for item in items:
        chunk.append(item)
        if len(chunk) == size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def scan_simplex(
    payoffs: GamePayoffs, resolution: int, n_jobs: int = 1, chunk_size: int = 2048
) -> Iterator[ScanRecord]:
    """Stream one :class:`ScanRecord` per lattice point of the moduli simplex.

    Amplitudes are taken real and nonnegative; phases never affect payoffs.
    With ``n_jobs > 1`` chunks are evaluated in worker processes, and records
    are still yielded in lattice order.
    """
    if not payoffs.canonical:
        raise InvalidPayoffsError("scan requires alpha > beta > gamma")
    if isinstance(resolution, bool) or not isinstance(resolution, int) or resolution < 1:
        raise ValueError(f"resolution must be a positive integer, got {resolution!r}")
    if n_jobs <= 1:
        for point in simplex_lattice(resolution):
            yield analyze_point(payoffs, point)
        return
    tasks = ((payoffs, chunk) for chunk in _chunks(simplex_lattice(resolution), chunk_size))
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        for records in pool.map(_analyze_chunk, tasks):
            yield from records


def find_resolving_states(payoffs: GamePayoffs, resolution: int) -> list[ScanRecord]:
    """Resolved lattice points, those selecting ``(1,1)`` first, then ``(0,0)``.

    Within each group records keep lexicographic moduli order.
    """
    records = [r for r in scan_simplex(payoffs, resolution) if r.resolved]
    return [r for r in records if r.selected_corner == "11"] + [
        r for r in records if r.selected_corner == "00"
    ]


def write_scan(records: Iterable[ScanRecord], stream) -> dict[str, int]:
    """Write records as comma-separated rows and return summary counts."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    counts = {"total": 0, "resolved": 0, "resolved_11": 0, "resolved_00": 0}
    for record in records:
        writer.writerow(record.to_row())
        counts["total"] += 1
        if record.resolved:
            counts["resolved"] += 1
            counts[f"resolved_{record.selected_corner}"] += 1
    return counts


def scan_to_text(payoffs: GamePayoffs, resolution: int) -> str:
    buffer = io.StringIO()
    write_scan(scan_simplex(payoffs, resolution), buffer)
    return buffer.getvalue()


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    observed: object
    passed: bool


@dataclass
class ReproductionReport:
    payoffs: GamePayoffs
    checks: list[Check]
    primed: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= CHECK_TOL


def _matrix_checks(label, matrix, expected) -> list[Check]:
    checks = []
    for row, p in zip(range(2), (1, 0)):
        for col, q in zip(range(2), (1, 0)):
            got, want = matrix[row][col], expected[row][col]
            checks.append(Check(
                f"{label} payoffs at ({p},{q})",
                tuple(want),
                (got.alice, got.bob),
                _close(got.alice, want[0]) and _close(got.bob, want[1]),
            ))
    return checks


def reproduce(payoffs: GamePayoffs) -> ReproductionReport:
    """Re-derive the reference corner matrices, equilibria and verdicts.

    The expected values are the symbolic closed forms instantiated at
    ``payoffs``; every numeric comparison uses tolerance 1e-12.
    """
    if not payoffs.canonical:
        raise InvalidPayoffsError("reproduction requires alpha > beta > gamma")
    alpha, beta, gamma = payoffs.as_tuple()
    resolving_11 = InitialState.from_moduli2(RESOLVING_11_MODULI)
    resolving_00 = InitialState.from_moduli2(RESOLVING_00_MODULI)
    bell = make_initial_state(*BELL_AMPLITUDES)
    product = make_initial_state(*PRODUCT_AMPLITUDES)

    a_p = (5 * alpha + 5 * beta + 6 * gamma) / 16
    b_p = (5 * alpha + beta + 10 * gamma) / 16
    g_p = (alpha + 5 * beta + 10 * gamma) / 16
    checks = []

    matrix = corner_payoff_matrix(resolving_11, payoffs)
    checks += _matrix_checks("asymmetric state", matrix,
                             [[(a_p, a_p), (b_p, g_p)], [(g_p, b_p), (a_p, a_p)]])
    observed = (matrix[0][0].alice, matrix[0][1].alice, matrix[1][0].alice)
    checks.append(Check("ordering alpha' > beta' > gamma'", "strict decrease", observed,
                        observed[0] > observed[1] > observed[2]))

    half = (alpha + beta) / 2
    checks += _matrix_checks("maximally entangled state", corner_payoff_matrix(bell, payoffs),
                             [[(half, half), (gamma, gamma)], [(gamma, gamma), (half, half)]])
    checks += _matrix_checks("product state", corner_payoff_matrix(product, payoffs),
                             [[(alpha, beta), (gamma, gamma)], [(gamma, gamma), (beta, alpha)]])

    for corner, expected in zip(CORNERS, (True, False, False, True)):
        got = is_corner_nash(resolving_11, payoffs, corner).is_nash
        checks.append(Check(f"asymmetric state corner ({int(corner.p)},{int(corner.q)}) is NE",
                            expected, got, got == expected))

    for label, state, want in (
        ("asymmetric state", resolving_11, "11"),
        ("dual state", resolving_00, "00"),
        ("maximally entangled state", bell, None),
    ):
        verdict = dilemma_analysis(state, payoffs)
        got = verdict.selected_corner
        checks.append(Check(f"{label} dilemma verdict", want or "unresolved",
                            got or "unresolved", got == want))

    return ReproductionReport(payoffs, checks, {"alpha'": a_p, "beta'": b_p, "gamma'": g_p})


__all__ = [
    "BELL_AMPLITUDES",
    "PRODUCT_AMPLITUDES",
    "RESOLVING_00_MODULI",
    "RESOLVING_11_MODULI",
    "SCAN_COLUMNS",
    "Check",
    "ReproductionReport",
    "ScanRecord",
    "analyze_point",
    "find_resolving_states",
    "format_number",
    "lattice_size",
    "reproduce",
    "scan_simplex",
    "scan_to_text",
    "simplex_lattice",
    "write_scan",
]
