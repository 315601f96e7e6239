"""Three-level Lambda system: rotating-frame Hamiltonian and master equation.

Levels are ordered |1>, |2> (ground/spin pair), |3> (shared excited state).
Both optical transitions 1-3 and 2-3 shift together with a group's detuning,
which keeps the 1-2 spin transition homogeneous across the ensemble.

Unit conventions used throughout the package:

* times in microseconds,
* Rabi frequencies quoted as Omega/2pi in MHz,
* decay rates and detunings in kHz,
* everything converted to angular rad/us internally (factor 2pi).

A drive quoted at ``rabi`` MHz enters the Hamiltonian with coupling
``-pi * rabi`` rad/us, i.e. half the angular Rabi frequency, so a resonant
pulse of area ``integral(Omega_ang dt) = pi`` fully inverts its transition
and population transfer follows ``sin^2(area / 2)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError

TWO_PI = 2.0 * np.pi
KHZ = TWO_PI * 1e-3  # kHz (ordinary) -> rad/us (angular)
MHZ = TWO_PI         # MHz (ordinary) -> rad/us (angular)

RATE_NAMES = ("gamma13", "gamma23", "gamma12", "Gamma31", "Gamma32", "Gamma12")


class Transition(enum.Enum):
    """Optical transition a field couples to."""

    OPT13 = "opt13"
    OPT23 = "opt23"


@dataclass(frozen=True)
class DriveField:
    """One rectangular drive tone.

    Attributes:
        transition: which optical transition is driven.
        rabi: Rabi frequency Omega/2pi in MHz, >= 0.
        phase: carrier phase in rad; all pulses default to mutual coherence.
    """

    transition: Transition
    rabi: float
    phase: float = 0.0

    def __post_init__(self):
        if self.rabi < 0:
            raise ConfigurationError(f"drive rabi must be >= 0, got {self.rabi}")


@dataclass(frozen=True)
class SystemParams:
    """Relaxation rates of the Lambda system, all in kHz.

    ``gamma13``, ``gamma23`` and ``gamma12`` damp the corresponding
    coherences.  ``Gamma31`` and ``Gamma32`` move population out of |3> into
    |1> and |2>; ``Gamma12`` exchanges population between |1> and |2>
    symmetrically.  Only non-negativity is enforced: coherence and population
    rates are independent knobs.
    """

    gamma13: float = 0.0
    gamma23: float = 0.0
    gamma12: float = 0.0
    Gamma31: float = 0.0
    Gamma32: float = 0.0
    Gamma12: float = 0.0

    def __post_init__(self):
        for name in RATE_NAMES:
            value = getattr(self, name)
            if not value >= 0:
                raise ConfigurationError(f"{name} must be >= 0, got {value}")

    @cached_property
    def damping(self) -> np.ndarray:
        """Real (3, 3) matrix of per-element coherence damping rates, rad/us."""
        damp = np.zeros((3, 3))
        damp[0, 2] = damp[2, 0] = self.gamma13 * KHZ
        damp[1, 2] = damp[2, 1] = self.gamma23 * KHZ
        damp[0, 1] = damp[1, 0] = self.gamma12 * KHZ
        return damp

    @cached_property
    def flows(self) -> tuple[float, float, float]:
        """Population flow rates (Gamma31, Gamma32, Gamma12) in rad/us."""
        return (self.Gamma31 * KHZ, self.Gamma32 * KHZ, self.Gamma12 * KHZ)


def ground_state(count: int | None = None) -> np.ndarray:
    """Density matrix (stack) with all population in |1>."""
    if count is None:
        rho = np.zeros((3, 3), dtype=complex)
        rho[0, 0] = 1.0
    else:
        rho = np.zeros((count, 3, 3), dtype=complex)
        rho[:, 0, 0] = 1.0
    return rho


def hamiltonian(delta, drives: tuple[DriveField, ...] | list[DriveField] = ()) -> np.ndarray:
    """Rotating-frame Hamiltonian H/hbar in rad/us.

    Args:
        delta: optical detuning in kHz, applied identically to both optical
            transitions (scalar, or an array of group detunings for a
            stacked ``(..., 3, 3)`` result).
        drives: active fields, at most one per transition.

    The diagonal is ``(0, 0, -2pi * delta * 1e-3)`` and each drive
    contributes ``H[i3] = -pi * rabi * exp(i * phase)`` with the conjugate
    at ``H[3i]``, so the result is exactly Hermitian.
    """
    delta = np.asarray(delta, dtype=float)
    h = np.zeros(delta.shape + (3, 3), dtype=complex)
    h[..., 2, 2] = -delta * KHZ
    seen = set()
    for drive in drives:
        if drive.transition in seen:
            raise ConfigurationError(
                f"duplicate simultaneous drives on transition {drive.transition.value}"
            )
        seen.add(drive.transition)
        coupling = -np.pi * drive.rabi * np.exp(1j * drive.phase)
        row = 0 if drive.transition is Transition.OPT13 else 1
        h[..., row, 2] = coupling
        h[..., 2, row] = np.conj(coupling)
    return h


def liouville_rhs(rho: np.ndarray, h: np.ndarray, params: SystemParams) -> np.ndarray:
    """Time derivative of the density matrix, in 1/us.

    ``d(rho)/dt = -i [H, rho] + relaxation`` where relaxation comprises the
    population flows |3> -> |1> at Gamma31, |3> -> |2> at Gamma32,
    |1> <-> |2> at Gamma12, and damping ``-gamma_ij * rho_ij`` on each
    off-diagonal element.  The result is Hermitian and traceless for
    Hermitian inputs.  Works on stacked ``(..., 3, 3)`` arrays.
    """
    out = -1j * (h @ rho - rho @ h)
    out -= params.damping * rho
    g31, g32, g12 = params.flows
    r11 = rho[..., 0, 0]
    r22 = rho[..., 1, 1]
    r33 = rho[..., 2, 2]
    out[..., 0, 0] += g31 * r33 + g12 * (r22 - r11)
    out[..., 1, 1] += g32 * r33 + g12 * (r11 - r22)
    out[..., 2, 2] -= (g31 + g32) * r33
    return out


@dataclass(frozen=True)
class StateDiagnostics:
    """Invariant residuals of one density matrix."""

    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float

    TRACE_TOL = 1e-9
    HERM_TOL = 1e-12
    EIG_TOL = -1e-8

    def ok(self) -> bool:
        return (
            self.trace_error <= self.TRACE_TOL
            and self.hermiticity_error <= self.HERM_TOL
            and self.min_eigenvalue >= self.EIG_TOL
        )


def validate_state(rho: np.ndarray) -> StateDiagnostics:
    """Report trace, Hermiticity and positivity residuals; never mutates."""
    trace_error = abs(np.trace(rho) - 1.0)
    hermiticity_error = float(np.abs(rho - rho.conj().T).max())
    sym = 0.5 * (rho + rho.conj().T)
    min_eigenvalue = float(np.linalg.eigvalsh(sym)[0])
    return StateDiagnostics(float(trace_error), hermiticity_error, min_eigenvalue)
