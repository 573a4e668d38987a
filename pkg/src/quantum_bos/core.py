"""States, payoffs and the identity/flip channel of the quantized Battle of the Sexes.

Basis order throughout is ``(|OO>, |OT>, |TO>, |TT>)`` with Alice in the first
tensor slot. ``O`` is Opera, ``T`` is TV. A player using the identity with
probability 1 keeps the arbiter's choice; the flip ``C`` swaps ``O`` and ``T``.

Payoffs are computed two ways. :func:`payoffs_trace` builds the final density
matrix and takes ``Tr[P rho_f]`` with no shortcuts; :func:`payoffs_closed_form`
evaluates the bilinear polynomial in ``(p, q)`` from
:func:`bilinear_coefficients`. The two must agree to rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import (
    InvalidDensityMatrixError,
    InvalidPayoffsError,
    InvalidProfileError,
    InvalidStateError,
)
from .linalg import has_unit_trace, is_hermitian, is_psd

BASIS_LABELS = ("OO", "OT", "TO", "TT")

NORM_TOL = 1e-12
RENORMALIZE_LIMIT = 1e-6

IDENTITY = np.eye(2, dtype=complex)
FLIP = np.array([[0, 1], [1, 0]], dtype=complex)


class Player(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class GamePayoffs:
    """Payoff triple of the classical game.

    ``alpha`` is the preferred coordination payoff, ``beta`` the other
    coordination payoff and ``gamma`` the mismatch payoff. Unless ``relaxed``
    is set, ``alpha > beta > gamma`` is enforced.
    """

    alpha: float
    beta: float
    gamma: float
    relaxed: bool = False

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidPayoffsError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not self.relaxed and not self.canonical:
            raise InvalidPayoffsError(
                "payoffs must satisfy alpha > beta > gamma, got "
                f"({self.alpha}, {self.beta}, {self.gamma})"
            )

    @property
    def canonical(self) -> bool:
        return self.alpha > self.beta > self.gamma

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    def rescaled(self, scale: float, shift: float = 0.0) -> "GamePayoffs":
        """Affine image ``scale * x + shift`` of every payoff (``scale > 0``)."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        return GamePayoffs(
            scale * self.alpha + shift,
            scale * self.beta + shift,
            scale * self.gamma + shift,
            relaxed=self.relaxed,
        )


@dataclass(frozen=True)
class InitialState:
    """Two-qubit state ``a|OO> + b|OT> + c|TO> + d|TT>`` of unit norm.

    Use :func:`make_initial_state` to build one from raw amplitudes; the
    constructor itself only accepts vectors already normalized to 1e-12.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    renormalized: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm2 = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"amplitudes have squared norm {norm2!r}, expected 1")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)

    @property
    def moduli2(self) -> np.ndarray:
        """Squared moduli ``(|a|^2, |b|^2, |c|^2, |d|^2)``."""
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def from_moduli2(cls, moduli2) -> "InitialState":
        """Real nonnegative amplitudes with the given squared moduli."""
        m = np.asarray(moduli2, dtype=float)
        if m.shape != (4,):
            raise InvalidStateError(f"expected four squared moduli, got shape {m.shape}")
        if np.any(m < 0):
            raise InvalidStateError("squared moduli must be nonnegative")
        return make_initial_state(*np.sqrt(m))

    def with_phases(self, phases) -> "InitialState":
        """Multiply each amplitude by ``exp(i * phase)``."""
        factors = np.exp(1j * np.asarray(phases, dtype=float))
        return InitialState(*(self.amplitudes * factors), renormalized=self.renormalized)

    def swap_players(self) -> "InitialState":
        """Exchange the tensor slots, i.e. swap the ``|OT>`` and ``|TO>`` amplitudes."""
        return InitialState(self.a, self.c, self.b, self.d, renormalized=self.renormalized)


def make_initial_state(a: complex, b: complex, c: complex, d: complex) -> InitialState:
    """Validate raw amplitudes into an :class:`InitialState`.

    Norms within 1e-6 of one are silently rescaled and the result is flagged
    ``renormalized``; anything further off is treated as a data error.
    """
    amps = np.array([a, b, c, d], dtype=complex)
    if not np.all(np.isfinite(amps)):
        raise InvalidStateError("amplitudes must be finite")
    norm2 = float(np.sum(np.abs(amps) ** 2))
    if norm2 == 0.0:
        raise InvalidStateError("amplitude vector has zero norm")
    deviation = abs(math.sqrt(norm2) - 1.0)
    if deviation > RENORMALIZE_LIMIT:
        raise InvalidStateError(
            f"amplitude norm {math.sqrt(norm2)!r} deviates from 1 by more than {RENORMALIZE_LIMIT}"
        )
    renormalized = False
    if abs(norm2 - 1.0) > NORM_TOL:
        amps = amps / math.sqrt(norm2)
        renormalized = True
    return InitialState(*amps, renormalized=renormalized)


@dataclass(frozen=True)
class StrategyProfile:
    """Probabilities ``p`` (Alice) and ``q`` (Bob) of playing the identity."""

    p: float
    q: float

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise InvalidProfileError(f"{name} must lie in [0, 1], got {value!r}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[float, float]:
        return (self.p, self.q)


CORNERS = (
    StrategyProfile(1, 1),
    StrategyProfile(1, 0),
    StrategyProfile(0, 1),
    StrategyProfile(0, 0),
)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated 4x4 density operator on the ``(OO, OT, TO, TT)`` basis."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise InvalidDensityMatrixError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not is_hermitian(m):
            raise InvalidDensityMatrixError("matrix is not Hermitian")
        if not has_unit_trace(m):
            raise InvalidDensityMatrixError(f"trace is {np.trace(m)!r}, expected 1")
        if not is_psd(m):
            raise InvalidDensityMatrixError("matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def entry(self, row: str, col: str) -> complex:
        """Matrix element addressed by basis labels, e.g. ``entry("OO", "TT")``."""
        return complex(self.entries[BASIS_LABELS.index(row), BASIS_LABELS.index(col)])


class PayoffPair(NamedTuple):
    alice: float
    bob: float


@dataclass(frozen=True)
class BilinearCoefficients:
    """Scalars making both payoff functions bilinear in ``(p, q)``.

    ``$_A(p, q) = p (q * omega_cap + k_alice) + q * l_alice + theta_alice`` and
    ``$_B(p, q) = q (p * omega_cap + k_bob) + p * l_bob + theta_bob``.
    """

    zeta: float
    omega_cap: float
    phi: float
    lambda_: float
    k_alice: float
    l_alice: float
    theta_alice: float
    k_bob: float
    l_bob: float
    theta_bob: float

    def alice_gradient(self, q: float) -> float:
        """Gain to Alice per unit increase of ``p`` when Bob plays ``q``."""
        return q * self.omega_cap + self.k_alice

    def bob_gradient(self, p: float) -> float:
        """Gain to Bob per unit increase of ``q`` when Alice plays ``p``."""
        return p * self.omega_cap + self.k_bob

    def as_dict(self) -> dict[str, float]:
        return {
            "zeta": self.zeta,
            "omega": self.omega_cap,
            "phi": self.phi,
            "lambda": self.lambda_,
            "k_alice": self.k_alice,
            "l_alice": self.l_alice,
            "theta_alice": self.theta_alice,
            "k_bob": self.k_bob,
            "l_bob": self.l_bob,
            "theta_bob": self.theta_bob,
        }


def initial_density(state: InitialState) -> DensityMatrix:
    """Return ``|psi><psi|`` for the initial state."""
    psi = state.amplitudes
    return DensityMatrix(np.outer(psi, psi.conj()))


_TWO_QUBIT = {
    (id(a), id(b)): np.kron(a, b) for a in (IDENTITY, FLIP) for b in (IDENTITY, FLIP)
}


def _conjugate(rho: np.ndarray, alice_op: np.ndarray, bob_op: np.ndarray) -> np.ndarray:
    u = _TWO_QUBIT.get((id(alice_op), id(bob_op)))
    if u is None:
        u = np.kron(alice_op, bob_op)
    return u @ rho @ u.conj().T


def mw_channel(rho_in: DensityMatrix, profile: StrategyProfile) -> DensityMatrix:
    """Apply the mixed identity/flip strategies of both players to ``rho_in``."""
    rho = rho_in.entries
    p, q = profile.p, profile.q
    rho_f = (
        p * q * _conjugate(rho, IDENTITY, IDENTITY)
        + p * (1 - q) * _conjugate(rho, IDENTITY, FLIP)
        + q * (1 - p) * _conjugate(rho, FLIP, IDENTITY)
        + (1 - p) * (1 - q) * _conjugate(rho, FLIP, FLIP)
    )
    return DensityMatrix(rho_f)


def final_density_closed_form(state: InitialState, profile: StrategyProfile) -> np.ndarray:
    """Explicit entry-by-entry expression of the final density matrix for a pure state.

    Written in terms of the interference terms ``epsilon``, ``zeta``, ``omega``
    and ``xi``. Each entry is ``pq * X + r00 + p (r10 - r00) + q (r01 - r00)``
    where ``r..`` are elements of the doubly, Bob-only and Alice-only flipped
    initial state.
    """
    a, b, c, d = state.amplitudes
    p, q = profile.p, profile.q
    pq = p * q

    def x(s, t):
        return s * np.conj(t)

    a2, b2, c2, d2 = (abs(v) ** 2 for v in (a, b, c, d))
    eps = x(a, b) - x(b, a) - x(c, d) + x(d, c)
    zeta = a2 - b2 - c2 + d2
    omega = x(a, c) - x(b, d) - x(c, a) + x(d, b)
    xi = x(a, d) - x(b, c) - x(c, b) + x(d, a)

    return np.array(
        [
            [
                pq * zeta + d2 + p * (b2 - d2) + q * (c2 - d2),
                pq * eps + x(d, c) + p * (x(b, a) - x(d, c)) + q * (x(c, d) - x(d, c)),
                pq * omega + x(d, b) + p * (x(b, d) - x(d, b)) + q * (x(c, a) - x(d, b)),
                pq * xi + x(d, a) + p * (x(b, c) - x(d, a)) + q * (x(c, b) - x(d, a)),
            ],
            [
                -pq * eps + x(c, d) + p * (x(a, b) - x(c, d)) + q * (x(d, c) - x(c, d)),
                -pq * zeta + c2 + p * (a2 - c2) + q * (d2 - c2),
                -pq * xi + x(c, b) + p * (x(a, d) - x(c, b)) + q * (x(d, a) - x(c, b)),
                -pq * omega + x(c, a) + p * (x(a, c) - x(c, a)) + q * (x(d, b) - x(c, a)),
            ],
            [
                -pq * omega + x(b, d) + p * (x(d, b) - x(b, d)) + q * (x(a, c) - x(b, d)),
                -pq * xi + x(b, c) + p * (x(d, a) - x(b, c)) + q * (x(a, d) - x(b, c)),
                -pq * zeta + b2 + p * (d2 - b2) + q * (a2 - b2),
                -pq * eps + x(b, a) + p * (x(d, c) - x(b, a)) + q * (x(a, b) - x(b, a)),
            ],
            [
                pq * xi + x(a, d) + p * (x(c, b) - x(a, d)) + q * (x(b, c) - x(a, d)),
                pq * omega + x(a, c) + p * (x(c, a) - x(a, c)) + q * (x(b, d) - x(a, c)),
                pq * eps + x(a, b) + p * (x(c, d) - x(a, b)) + q * (x(b, a) - x(a, b)),
                pq * zeta + a2 + p * (c2 - a2) + q * (b2 - a2),
            ],
        ],
        dtype=complex,
    )


def payoff_operator(player: Player | str, payoffs: GamePayoffs) -> np.ndarray:
    """Diagonal payoff observable of ``player`` as a 4x4 real matrix."""
    player = Player(player)
    alpha, beta, gamma = payoffs.as_tuple()
    if player is Player.ALICE:
        return np.diag([alpha, gamma, gamma, beta])
    return np.diag([beta, gamma, gamma, alpha])


def payoffs_trace(
    state: InitialState, payoffs: GamePayoffs, profile: StrategyProfile
) -> PayoffPair:
    """Expected payoffs as ``Tr[P rho_f]`` from the full channel output."""
    rho_f = mw_channel(initial_density(state), profile).entries
    alice = np.trace(payoff_operator(Player.ALICE, payoffs) @ rho_f)
    bob = np.trace(payoff_operator(Player.BOB, payoffs) @ rho_f)
    return PayoffPair(float(alice.real), float(bob.real))


def bilinear_coefficients(state: InitialState, payoffs: GamePayoffs) -> BilinearCoefficients:
    a2, b2, c2, d2 = (float(v) for v in state.moduli2)
    alpha, beta, gamma = payoffs.as_tuple()
    zeta = a2 - b2 - c2 + d2
    phi = alpha - gamma
    lam = beta - gamma
    return BilinearCoefficients(
        zeta=zeta,
        omega_cap=(alpha + beta - 2 * gamma) * zeta,
        phi=phi,
        lambda_=lam,
        k_alice=-lam * a2 + phi * b2 + lam * c2 - phi * d2,
        l_alice=-lam * a2 + lam * b2 + phi * c2 - phi * d2,
        theta_alice=alpha * d2 + gamma * c2 + gamma * b2 + beta * a2,
        k_bob=-phi * a2 + phi * b2 + lam * c2 - lam * d2,
        l_bob=-phi * a2 + lam * b2 + phi * c2 - lam * d2,
        theta_bob=beta * d2 + gamma * c2 + gamma * b2 + alpha * a2,
    )


def evaluate_bilinear(coeffs: BilinearCoefficients, p: float, q: float) -> PayoffPair:
    alice = p * (q * coeffs.omega_cap + coeffs.k_alice) + q * coeffs.l_alice + coeffs.theta_alice
    bob = q * (p * coeffs.omega_cap + coeffs.k_bob) + p * coeffs.l_bob + coeffs.theta_bob
    return PayoffPair(alice, bob)


def payoffs_closed_form(
    state: InitialState, payoffs: GamePayoffs, profile: StrategyProfile
) -> PayoffPair:
    return evaluate_bilinear(bilinear_coefficients(state, payoffs), profile.p, profile.q)
