"""Nash equilibria of the bilinear quantum game and the dilemma verdict.

Both payoff functions are affine in the player's own probability, so each best
response is decided by the sign of a single gradient: ``q * Omega + K_A`` for
Alice and ``p * Omega + K_B`` for Bob. The equilibrium set is the intersection
of the two best-response graphs, each of which is a union of axis-aligned
boxes (points, segments, or the whole square) in the ``(p, q)`` plane.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    FLIP,
    IDENTITY,
    BilinearCoefficients,
    GamePayoffs,
    InitialState,
    PayoffPair,
    Player,
    StrategyProfile,
    _conjugate,
    bilinear_coefficients,
    evaluate_bilinear,
    initial_density,
    payoff_operator,
    payoffs_closed_form,
)
from .exceptions import InvalidPayoffsError

NE_TOL = 1e-9
_BOX_EPS = 1e-12


class BestResponse(str, enum.Enum):
    ONLY_0 = "only 0"
    ONLY_1 = "only 1"
    ALL = "all of [0,1]"


class EquilibriumKind(str, enum.Enum):
    CORNER = "corner"
    EDGE_SEGMENT = "edge-segment"
    INTERIOR_POINT = "interior-point"
    # whole square; only when both players are indifferent everywhere
    REGION = "region"


class MaximinChoice(str, enum.Enum):
    P0 = "p0"
    P1 = "p1"
    INDIFFERENT = "indifferent"


class CornerCheck(NamedTuple):
    """Outcome of the pure-profile Nash test.

    A slack is the payoff a player would lose by switching to the other pure
    strategy; the corner is an equilibrium when neither slack is below ``-tol``.
    """

    is_nash: bool
    slack_alice: float
    slack_bob: float

    @property
    def strict(self) -> bool:
        return self.slack_alice > NE_TOL and self.slack_bob > NE_TOL


class Box(NamedTuple):
    p_lo: float
    p_hi: float
    q_lo: float
    q_hi: float

    def contains(self, other: "Box", eps: float = _BOX_EPS) -> bool:
        return (
            self.p_lo - eps <= other.p_lo
            and other.p_hi <= self.p_hi + eps
            and self.q_lo - eps <= other.q_lo
            and other.q_hi <= self.q_hi + eps
        )

    def intersect(self, other: "Box") -> Optional["Box"]:
        p_lo, p_hi = max(self.p_lo, other.p_lo), min(self.p_hi, other.p_hi)
        q_lo, q_hi = max(self.q_lo, other.q_lo), min(self.q_hi, other.q_hi)
        if p_lo > p_hi + _BOX_EPS or q_lo > q_hi + _BOX_EPS:
            return None
        return Box(p_lo, max(p_lo, p_hi), q_lo, max(q_lo, q_hi))

    @property
    def p_fixed(self) -> bool:
        return self.p_hi - self.p_lo <= _BOX_EPS

    @property
    def q_fixed(self) -> bool:
        return self.q_hi - self.q_lo <= _BOX_EPS

    def distance(self, p: float, q: float) -> float:
        """Max-norm distance from ``(p, q)`` to the box."""
        dp = max(self.p_lo - p, 0.0, p - self.p_hi)
        dq = max(self.q_lo - q, 0.0, q - self.q_hi)
        return max(dp, dq)


@dataclass(frozen=True)
class Equilibrium:
    """One connected piece of the Nash equilibrium set.

    ``profile`` is the lower end of the piece; for segments ``free_axis``
    names the coordinate that ranges over ``interval``. ``payoffs`` are taken
    at ``profile``.
    """

    profile: StrategyProfile
    kind: EquilibriumKind
    strict: bool
    payoffs: PayoffPair
    interval: Optional[tuple[float, float]] = None
    free_axis: Optional[str] = None

    @property
    def box(self) -> Box:
        p, q = self.profile.p, self.profile.q
        if self.kind is EquilibriumKind.REGION:
            return Box(0.0, 1.0, 0.0, 1.0)
        if self.free_axis == "p":
            return Box(self.interval[0], self.interval[1], q, q)
        if self.free_axis == "q":
            return Box(p, p, self.interval[0], self.interval[1])
        return Box(p, p, q, q)

    def anchors(self) -> list[tuple[float, float]]:
        """Representative points: the profile itself plus segment endpoints."""
        b = self.box
        return sorted({(b.p_lo, b.q_lo), (b.p_hi, b.q_hi), (b.p_lo, b.q_hi), (b.p_hi, b.q_lo)})


@dataclass(frozen=True)
class DilemmaVerdict:
    corner_00_is_ne: bool
    corner_11_is_ne: bool
    equal_corner_payoffs: bool
    maximin_choice_alice: MaximinChoice
    maximin_choice_bob: MaximinChoice
    unique_solution: Optional[StrategyProfile]
    corner_payoffs: tuple[tuple[PayoffPair, PayoffPair], tuple[PayoffPair, PayoffPair]]

    @property
    def resolved(self) -> bool:
        return self.unique_solution is not None

    @property
    def selected_corner(self) -> Optional[str]:
        if self.unique_solution is None:
            return None
        return f"{int(self.unique_solution.p)}{int(self.unique_solution.q)}"


def corner_payoff_matrix(
    state: InitialState, payoffs: GamePayoffs
) -> tuple[tuple[PayoffPair, PayoffPair], tuple[PayoffPair, PayoffPair]]:
    """Pure-profile payoffs; rows are ``p = 1, 0`` and columns ``q = 1, 0``."""
    return tuple(
        tuple(payoffs_closed_form(state, payoffs, StrategyProfile(p, q)) for q in (1, 0))
        for p in (1, 0)
    )


def _corner_check(coeffs: BilinearCoefficients, p: int, q: int, tol: float) -> CornerCheck:
    grad_a = coeffs.alice_gradient(q)
    grad_b = coeffs.bob_gradient(p)
    slack_a = grad_a if p == 1 else -grad_a
    slack_b = grad_b if q == 1 else -grad_b
    return CornerCheck(slack_a >= -tol and slack_b >= -tol, slack_a, slack_b)


def is_corner_nash(
    state: InitialState,
    payoffs: GamePayoffs,
    corner: StrategyProfile | tuple[int, int],
    tol: float = NE_TOL,
) -> CornerCheck:
    """Test whether a pure profile is a Nash equilibrium.

    For ``(0, 0)`` this reduces to ``K_A <= tol`` and ``K_B <= tol``; for
    ``(1, 1)`` to ``Omega + K_A >= -tol`` and ``Omega + K_B >= -tol``.
    """
    p, q = corner.as_tuple() if isinstance(corner, StrategyProfile) else corner
    if p not in (0, 1) or q not in (0, 1):
        raise ValueError(f"corner must be a pure profile, got {(p, q)}")
    return _corner_check(bilinear_coefficients(state, payoffs), int(p), int(q), tol)


def _classify(gradient: float, tol: float) -> BestResponse:
    if gradient > tol:
        return BestResponse.ONLY_1
    if gradient < -tol:
        return BestResponse.ONLY_0
    return BestResponse.ALL


def best_response(
    player: Player | str,
    state: InitialState,
    payoffs: GamePayoffs,
    opponent_prob: float,
    tol: float = NE_TOL,
) -> BestResponse:
    if not 0.0 <= opponent_prob <= 1.0:
        raise ValueError(f"opponent probability must lie in [0, 1], got {opponent_prob!r}")
    coeffs = bilinear_coefficients(state, payoffs)
    if Player(player) is Player.ALICE:
        return _classify(coeffs.alice_gradient(opponent_prob), tol)
    return _classify(coeffs.bob_gradient(opponent_prob), tol)


def _response_pieces(at0: float, at1: float, tol: float) -> list[tuple[float, float, float, float]]:
    """Best-response graph of an affine gradient as ``(own_lo, own_hi, opp_lo, opp_hi)`` boxes.

    ``at0`` and ``at1`` are the gradient at opponent probability 0 and 1.
    """
    if abs(at0) <= tol and abs(at1) <= tol:
        return [(0.0, 1.0, 0.0, 1.0)]
    if abs(at0) <= tol:
        root = 0.0
    elif abs(at1) <= tol:
        root = 1.0
    elif (at0 > 0) != (at1 > 0):
        root = at0 / (at0 - at1)
    else:
        own = 1.0 if at0 > 0 else 0.0
        return [(own, own, 0.0, 1.0)]
    pieces = [(0.0, 1.0, root, root)]
    if root > 0.0:
        own = 1.0 if at0 > 0 else 0.0
        pieces.append((own, own, 0.0, root))
    if root < 1.0:
        own = 1.0 if at1 > 0 else 0.0
        pieces.append((own, own, root, 1.0))
    return pieces


def _merge(boxes: list[Box]) -> list[Box]:
    boxes = list(dict.fromkeys(boxes))
    changed = True
    while changed:
        changed = False
        for i, first in enumerate(boxes):
            for j, second in enumerate(boxes):
                if i == j:
                    continue
                merged = None
                if second.contains(first):
                    merged = second
                elif first.p_fixed and second.p_fixed and abs(first.p_lo - second.p_lo) <= _BOX_EPS:
                    if first.q_lo <= second.q_hi + _BOX_EPS and second.q_lo <= first.q_hi + _BOX_EPS:
                        merged = Box(first.p_lo, first.p_lo, min(first.q_lo, second.q_lo),
                                     max(first.q_hi, second.q_hi))
                elif first.q_fixed and second.q_fixed and abs(first.q_lo - second.q_lo) <= _BOX_EPS:
                    if first.p_lo <= second.p_hi + _BOX_EPS and second.p_lo <= first.p_hi + _BOX_EPS:
                        merged = Box(min(first.p_lo, second.p_lo), max(first.p_hi, second.p_hi),
                                     first.q_lo, first.q_lo)
                if merged is not None:
                    boxes = [b for k, b in enumerate(boxes) if k not in (i, j)] + [merged]
                    changed = True
                    break
            if changed:
                break
    return sorted(boxes)


def _is_pure(x: float) -> bool:
    return x == 0.0 or x == 1.0


def equilibrium_boxes(coeffs: BilinearCoefficients, tol: float = NE_TOL) -> list[Box]:
    """Maximal boxes whose union is the Nash equilibrium set."""
    alice = [
        Box(own_lo, own_hi, opp_lo, opp_hi)
        for own_lo, own_hi, opp_lo, opp_hi in _response_pieces(
            coeffs.alice_gradient(0.0), coeffs.alice_gradient(1.0), tol
        )
    ]
    bob = [
        Box(opp_lo, opp_hi, own_lo, own_hi)
        for own_lo, own_hi, opp_lo, opp_hi in _response_pieces(
            coeffs.bob_gradient(0.0), coeffs.bob_gradient(1.0), tol
        )
    ]
    found = [box for a in alice for b in bob if (box := a.intersect(b)) is not None]
    return _merge(found)


def enumerate_equilibria(
    state: InitialState, payoffs: GamePayoffs, tol: float = NE_TOL
) -> list[Equilibrium]:
    """Every Nash equilibrium over the unit square, each piece listed once.

    Pure corners come first (ordered ``(0,0), (0,1), (1,0), (1,1)``), then
    mixed points and continua.
    """
    coeffs = bilinear_coefficients(state, payoffs)
    result = []
    for box in equilibrium_boxes(coeffs, tol):
        profile = StrategyProfile(box.p_lo, box.q_lo)
        value = evaluate_bilinear(coeffs, box.p_lo, box.q_lo)
        if box.p_fixed and box.q_fixed:
            if _is_pure(box.p_lo) and _is_pure(box.q_lo):
                check = _corner_check(coeffs, int(box.p_lo), int(box.q_lo), tol)
                result.append(Equilibrium(profile, EquilibriumKind.CORNER, check.strict, value))
            else:
                result.append(Equilibrium(profile, EquilibriumKind.INTERIOR_POINT, False, value))
        elif box.p_fixed:
            result.append(Equilibrium(profile, EquilibriumKind.EDGE_SEGMENT, False, value,
                                      (box.q_lo, box.q_hi), "q"))
        elif box.q_fixed:
            result.append(Equilibrium(profile, EquilibriumKind.EDGE_SEGMENT, False, value,
                                      (box.p_lo, box.p_hi), "p"))
        else:
            result.append(Equilibrium(profile, EquilibriumKind.REGION, False, value,
                                      (0.0, 1.0), "pq"))
    order = {EquilibriumKind.CORNER: 0, EquilibriumKind.INTERIOR_POINT: 1,
             EquilibriumKind.EDGE_SEGMENT: 2, EquilibriumKind.REGION: 3}
    return sorted(result, key=lambda e: (order[e.kind], e.profile.p, e.profile.q))


def grid_payoff_tables(
    state: InitialState, payoffs: GamePayoffs, resolution: int
) -> tuple[np.ndarray, np.ndarray]:
    """Payoff tables on the uniform grid, ``table[i, j]`` at ``(p_i, q_j)``.

    Built from traces of the four conjugated initial states, so it shares
    nothing with the coefficient formulas.
    """
    rho = initial_density(state).entries
    grid = np.linspace(0.0, 1.0, resolution + 1)
    p = grid[:, None]
    q = grid[None, :]
    weights = {
        (0, 0): p * q,
        (0, 1): p * (1 - q),
        (1, 0): (1 - p) * q,
        (1, 1): (1 - p) * (1 - q),
    }
    ops = (IDENTITY, FLIP)
    tables = []
    for player in (Player.ALICE, Player.BOB):
        observable = payoff_operator(player, payoffs)
        table = np.zeros((resolution + 1, resolution + 1))
        for (ia, ib), w in weights.items():
            value = np.trace(observable @ _conjugate(rho, ops[ia], ops[ib])).real
            table = table + w * value
        tables.append(table)
    return tables[0], tables[1]


def grid_nash_mask(alice: np.ndarray, bob: np.ndarray, tol: float = NE_TOL) -> np.ndarray:
    """Boolean mask of grid profiles where no grid deviation gains more than ``tol``."""
    gain_alice = alice.max(axis=0, keepdims=True) - alice
    gain_bob = bob.max(axis=1, keepdims=True) - bob
    return (gain_alice <= tol) & (gain_bob <= tol)


def verify_equilibria_grid(
    state: InitialState, payoffs: GamePayoffs, resolution: int, tol: float = NE_TOL
) -> bool:
    """Cross-check :func:`enumerate_equilibria` against a brute-force grid search.

    Every grid profile that is a Nash equilibrium against all grid deviations
    must lie within one grid step of an enumerated piece. Conversely each
    enumerated piece needs a grid profile within one step that is an
    approximate equilibrium; mixed equilibria usually sit off-grid, so there
    the allowed gain grows with the step as ``3 * span * h`` where ``span`` is
    the spread of grid payoffs.
    """
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    h = 1.0 / resolution
    grid = np.linspace(0.0, 1.0, resolution + 1)
    alice, bob = grid_payoff_tables(state, payoffs, resolution)
    exact = grid_nash_mask(alice, bob, tol)
    span = max(np.ptp(alice), np.ptp(bob))
    approx = grid_nash_mask(alice, bob, tol + 3.0 * span * h)

    equilibria = enumerate_equilibria(state, payoffs, tol)
    boxes = [e.box for e in equilibria]
    reach = h + _BOX_EPS

    for i, j in zip(*np.nonzero(exact)):
        if not any(box.distance(grid[i], grid[j]) <= reach for box in boxes):
            return False

    approx_points = [(grid[i], grid[j]) for i, j in zip(*np.nonzero(approx))]
    for eq in equilibria:
        for p, q in eq.anchors():
            if not any(max(abs(p - gp), abs(q - gq)) <= reach for gp, gq in approx_points):
                return False
    return True


def _maximin(own_rows: list[tuple[float, float]], tol: float) -> MaximinChoice:
    """Pick between pure strategy 1 and 0 by comparing their worst-case payoffs."""
    worst_1 = min(own_rows[0])
    worst_0 = min(own_rows[1])
    if worst_1 > worst_0 + tol:
        return MaximinChoice.P1
    if worst_0 > worst_1 + tol:
        return MaximinChoice.P0
    return MaximinChoice.INDIFFERENT


def dilemma_analysis(
    state: InitialState, payoffs: GamePayoffs, tol: float = NE_TOL
) -> DilemmaVerdict:
    """Decide whether the coordination dilemma has a unique focal solution.

    Both coordination corners must be equilibria with identical payoff pairs,
    and each player's security-level choice over the pure corner game must
    point at the same corner.
    """
    if not payoffs.canonical:
        raise InvalidPayoffsError("dilemma analysis requires alpha > beta > gamma")
    matrix = corner_payoff_matrix(state, payoffs)
    (m11, m10), (m01, m00) = matrix
    coeffs = bilinear_coefficients(state, payoffs)
    ne_00 = _corner_check(coeffs, 0, 0, tol).is_nash
    ne_11 = _corner_check(coeffs, 1, 1, tol).is_nash
    equal = abs(m11.alice - m00.alice) <= tol and abs(m11.bob - m00.bob) <= tol

    alice_choice = _maximin([(m11.alice, m10.alice), (m01.alice, m00.alice)], tol)
    bob_choice = _maximin([(m11.bob, m01.bob), (m10.bob, m00.bob)], tol)

    solution = None
    if ne_00 and ne_11 and equal and alice_choice == bob_choice:
        if alice_choice is MaximinChoice.P1:
            solution = StrategyProfile(1, 1)
        elif alice_choice is MaximinChoice.P0:
            solution = StrategyProfile(0, 0)
    return DilemmaVerdict(
        corner_00_is_ne=ne_00,
        corner_11_is_ne=ne_11,
        equal_corner_payoffs=equal,
        maximin_choice_alice=alice_choice,
        maximin_choice_bob=bob_choice,
        unique_solution=solution,
        corner_payoffs=matrix,
    )
