"""Fixed-step RK4 propagation plus a decay-free exact-propagator oracle.

Drives are piecewise constant, so intervals are integrated with a constant
Hamiltonian and uniform steps.  Every step is followed by re-symmetrization
``rho <- (rho + rho^dagger) / 2`` to stop Hermiticity drift from
accumulating over ~1e5 steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, IntegrationError
from .system import DriveField, SystemParams, hamiltonian, liouville_rhs

#: a pulse step must resolve the fastest Rabi period at least this finely
RABI_PERIOD_STEPS = 50
#: per-step trace tolerance; beyond this the step size is unusable
STEP_TRACE_TOL = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-size limits (us) for drive-on and drive-off intervals."""

    dt_pulse: float = 5e-4
    dt_free: float = 0.01
    method: str = "rk4"

    def __post_init__(self):
        if not 0 < self.dt_pulse <= self.dt_free:
            raise ConfigurationError(
                f"need 0 < dt_pulse <= dt_free, got {self.dt_pulse}, {self.dt_free}"
            )
        if self.method.lower() != "rk4":
            raise ConfigurationError(f"unsupported method {self.method!r}")


def check_drive_resolution(cfg: IntegratorConfig, drives) -> None:
    """Enforce dt_pulse <= (Rabi period) / RABI_PERIOD_STEPS at run time."""
    fastest = max((d.rabi for d in drives), default=0.0)
    if fastest > 0 and cfg.dt_pulse > 1.0 / (fastest * RABI_PERIOD_STEPS):
        raise ConfigurationError(
            f"dt_pulse={cfg.dt_pulse} us too coarse for a {fastest} MHz drive; "
            f"need <= {1.0 / (fastest * RABI_PERIOD_STEPS):.2e} us"
        )


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))


def _check_traces(rho: np.ndarray) -> None:
    traces = np.einsum("...ii", rho)
    err = float(np.abs(traces - 1.0).max())
    if not err <= STEP_TRACE_TOL:
        raise IntegrationError(f"trace error {err:.3e} exceeds {STEP_TRACE_TOL}")
    if not np.isfinite(rho).all():
        raise IntegrationError("non-finite density matrix entries")


def step_rk4(rho: np.ndarray, h: np.ndarray, params: SystemParams, dt: float) -> np.ndarray:
    """One classical RK4 step with constant H; re-symmetrized on exit.

    Works on single ``(3, 3)`` states or stacks ``(..., 3, 3)``.  Raises
    IntegrationError when the step leaves a trace error above 1e-6.
    """
    if dt <= 0:
        raise ConfigurationError(f"dt must be > 0, got {dt}")
    k1 = liouville_rhs(rho, h, params)
    k2 = liouville_rhs(rho + (0.5 * dt) * k1, h, params)
    k3 = liouville_rhs(rho + (0.5 * dt) * k2, h, params)
    k4 = liouville_rhs(rho + dt * k3, h, params)
    out = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out = _hermitize(out)
    _check_traces(out)
    return out


def advance(rho, h, params, duration, dt_max):
    """March ``duration`` with uniform RK4 steps no longer than ``dt_max``."""
    if duration <= 0:
        return rho
    n = max(1, int(np.ceil(duration / dt_max - 1e-12)))
    dt = duration / n
    for _ in range(n):
        rho = step_rk4(rho, h, params, dt)
    return rho


@dataclass(frozen=True)
class Trajectory:
    """Sampled states at strictly increasing times."""

    times: np.ndarray   # (k,) us
    states: np.ndarray  # (k, ..., 3, 3)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def coherence13(self) -> np.ndarray:
        """rho_13 sample series (for Bloch-vector views)."""
        return self.states[..., 0, 2]


def evolve_interval(
    rho: np.ndarray,
    delta,
    drives,
    params: SystemParams,
    duration: float,
    cfg: IntegratorConfig,
    t0: float = 0.0,
    record_dt: float | None = None,
) -> Trajectory:
    """Propagate through one interval of constant drives.

    Args:
        rho: initial state, ``(3, 3)`` or stacked.
        delta: detuning in kHz (scalar or per-group array matching the stack).
        drives: DriveField list, constant over the interval.
        params: relaxation rates.
        duration: interval length in us, >= 0.
        cfg: step-size limits; dt_pulse applies when any drive is on.
        t0: time of the first sample.
        record_dt: sample cadence; None records only the endpoints.

    Returns a Trajectory whose last time is exactly ``t0 + duration``.
    """
    if duration < 0:
        raise ConfigurationError(f"duration must be >= 0, got {duration}")
    drives = tuple(drives)
    if drives:
        check_drive_resolution(cfg, drives)
    if duration == 0:
        return Trajectory(np.array([t0]), np.asarray(rho, dtype=complex)[None, ...].copy())

    h = hamiltonian(delta, drives)
    dt_max = cfg.dt_pulse if drives else cfg.dt_free
    if record_dt is None:
        marks = np.array([duration])
    else:
        if record_dt <= 0:
            raise ConfigurationError("record_dt must be > 0")
        marks = np.arange(record_dt, duration - 1e-12, record_dt)
        marks = np.append(marks, duration)

    rho = np.asarray(rho, dtype=complex)
    times = [t0]
    states = [rho.copy()]
    elapsed = 0.0
    for mark in marks:
        rho = advance(rho, h, params, mark - elapsed, dt_max)
        elapsed = mark
        times.append(t0 + mark)
        states.append(rho.copy())
    return Trajectory(np.asarray(times), np.asarray(states))


def exact_unitary(rho: np.ndarray, h: np.ndarray, duration: float) -> np.ndarray:
    """Decay-free oracle: ``U rho U^dagger`` with ``U = exp(-i H t)``.

    Computed by Hermitian eigendecomposition, independent of the RK4 path.
    """
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * duration)
    u = (v * phases[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return u @ rho @ np.conj(np.swapaxes(u, -1, -2))
