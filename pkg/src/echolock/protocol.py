"""Pulse sequencing: data (D), rephasing (R), lock (B1) and unlock (B2).

Pulse timestamps are the pulse CENTERS.  With rectangular pulses the echo
timing law ``T_E = T_B2 + (T_R - T_D) - (T_B1 - T_R)`` holds to within a
small fraction of the data-pulse width only when the T labels mark pulse
centers; leading-edge labels shift the echo by roughly the rephasing-pulse
width, which is resolvable at the timing tolerances used here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError
from .system import DriveField, Transition

LABEL_TRANSITIONS = {
    "D": Transition.OPT13,
    "R": Transition.OPT13,
    "B1": Transition.OPT23,
    "B2": Transition.OPT23,
}
LABEL_ORDER = ("D", "R", "B1", "B2")

#: padding added after the last interesting time when no explicit window end
WINDOW_PAD = 3.0


def area_to_duration(area: float, rabi: float) -> float:
    """Duration (us) of a rectangular pulse of ``area`` (pi units) at ``rabi`` MHz.

    The pulse area is ``integral(Omega_ang dt)``, so
    ``duration = area * pi / (2pi * rabi) = area / (2 * rabi)``.
    """
    if area < 0:
        raise ConfigurationError(f"area must be >= 0, got {area}")
    if area == 0:
        return 0.0
    if rabi <= 0:
        raise ConfigurationError(f"cannot realize area {area}pi with rabi {rabi} MHz")
    return area / (2.0 * rabi)


@dataclass(frozen=True)
class PulseEvent:
    """One rectangular pulse.

    Attributes:
        label: D, R, B1, B2 or a custom name.
        t_center: center of the pulse (us).
        rabi: Rabi frequency Omega/2pi (MHz).
        area: pulse area in pi units, exclusive with ``duration``.
        duration: explicit duration (us), exclusive with ``area``.
        transition: inferred from the label when omitted.
        phase: carrier phase (rad).
    """

    label: str
    t_center: float
    rabi: float
    area: float | None = None
    duration: float | None = None
    transition: Transition | None = None
    phase: float = 0.0

    def __post_init__(self):
        if (self.area is None) == (self.duration is None):
            raise ConfigurationError(
                f"pulse {self.label}: exactly one of area/duration must be given"
            )
        if self.rabi < 0:
            raise ConfigurationError(f"pulse {self.label}: rabi must be >= 0")
        if self.duration is not None and self.duration < 0:
            raise ConfigurationError(f"pulse {self.label}: duration must be >= 0")
        expected = LABEL_TRANSITIONS.get(self.label)
        if self.transition is None:
            if expected is None:
                raise ConfigurationError(
                    f"pulse {self.label}: transition required for custom labels"
                )
            object.__setattr__(self, "transition", expected)
        elif expected is not None and self.transition is not expected:
            raise ConfigurationError(
                f"pulse {self.label} must drive {expected.value}, got {self.transition.value}"
            )
        if self.area is not None:
            area_to_duration(self.area, self.rabi)  # validates the pair

    @property
    def width(self) -> float:
        if self.duration is not None:
            return self.duration
        return area_to_duration(self.area, self.rabi)

    @property
    def t_start(self) -> float:
        return self.t_center - 0.5 * self.width

    @property
    def t_end(self) -> float:
        return self.t_center + 0.5 * self.width

    def drive(self) -> DriveField:
        return DriveField(self.transition, self.rabi, self.phase)


class EchoClass(enum.Enum):
    FULL_ECHO = "full"
    NULL_ECHO = "null"
    INVERTED_ECHO = "inverted"
    NON_REPHASING = "non-rephasing"


def _multiple_of_pi(phi: float, tol: float) -> int | None:
    n = round(phi)
    return int(n) if abs(phi - n) <= tol else None


def classify_areas(
    phi_r: float, phi_b1: float, phi_b2: float, tol: float = 1e-9
) -> EchoClass:
    """Classify a (R, B1, B2) area combination; areas in pi units.

    Rules:
      * R or B1 not an odd multiple of pi  -> NON_REPHASING
      * (B1 + B2) mod 4pi == 0             -> FULL_ECHO
      * (B1 + B2) mod 4pi == 2pi           -> INVERTED_ECHO
      * B1 + B2 an odd multiple of pi      -> NULL_ECHO

    Raises ConfigurationError for area sums that are not integer multiples
    of pi: those fall outside the rule set and are only rounded to the
    nearest rule in the CLI's advisory output, never silently here.
    """
    for name, phi in (("R", phi_r), ("B1", phi_b1), ("B2", phi_b2)):
        if phi < 0:
            raise ConfigurationError(f"{name} area must be >= 0, got {phi}pi")
    n_r = _multiple_of_pi(phi_r, tol)
    n_b1 = _multiple_of_pi(phi_b1, tol)
    if n_r is None or n_r % 2 == 0 or n_b1 is None or n_b1 % 2 == 0:
        return EchoClass.NON_REPHASING
    n_sum = _multiple_of_pi(phi_b1 + phi_b2, tol)
    if n_sum is None:
        raise ConfigurationError(
            f"B1 + B2 = {phi_b1 + phi_b2}pi is not an integer multiple of pi"
        )
    if n_sum % 2 == 1:
        return EchoClass.NULL_ECHO
    return EchoClass.FULL_ECHO if n_sum % 4 == 0 else EchoClass.INVERTED_ECHO


def predict_echo_time(t_d: float, t_r: float, t_b1: float, t_b2: float) -> float:
    """Phase-locked echo time: ``T_B2 + (T_R - T_D) - (T_B1 - T_R)``."""
    if not (t_d < t_r <= t_b1 < t_b2):
        raise ConfigurationError(
            f"need T_D < T_R <= T_B1 < T_B2, got {(t_d, t_r, t_b1, t_b2)}"
        )
    return t_b2 + (t_r - t_d) - (t_b1 - t_r)


def predict_conventional_echo_time(t_d: float, t_r: float) -> float:
    """Two-pulse echo time ``2 T_R - T_D``."""
    if not t_d < t_r:
        raise ConfigurationError(f"need T_D < T_R, got {(t_d, t_r)}")
    return 2.0 * t_r - t_d


@dataclass(frozen=True)
class PulseSequence:
    """Validated, time-ordered pulses plus the simulation window end (us)."""

    events: tuple[PulseEvent, ...]
    window_end: float
    warnings: tuple[str, ...] = ()

    def pulse(self, label: str) -> PulseEvent | None:
        for event in self.events:
            if event.label == label:
                return event
        return None

    def has(self, *labels: str) -> bool:
        present = {event.label for event in self.events}
        return all(label in present for label in labels)

    def pulse_intervals(self) -> list[tuple[float, float]]:
        return [(event.t_start, event.t_end) for event in self.events]


def build_sequence(events, window_end: float | None = None) -> PulseSequence:
    """Sort, validate and window a pulse list.

    Errors on overlapping pulses (touching edges are allowed), duplicate
    labels, or D/R/B1/B2 out of canonical order.  When B1 would start at or
    after the conventional echo time ``2 T_R - T_D`` the sequence is still
    valid but carries a late-lock warning: the rephasing completes before
    the lock engages, so only a conventional echo is expected.
    """
    ordered = tuple(sorted(events, key=lambda e: e.t_center))
    if not ordered:
        raise ConfigurationError("sequence needs at least one pulse")
    labels = [event.label for event in ordered]
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"duplicate pulse labels in {labels}")
    for a, b in zip(ordered, ordered[1:]):
        if b.t_center <= a.t_center:
            raise ConfigurationError(
                f"pulse centers must be strictly increasing ({a.label}, {b.label})"
            )
        if b.t_start < a.t_end - 1e-9:
            raise ConfigurationError(
                f"pulses {a.label} and {b.label} overlap "
                f"([{a.t_start:.4f}, {a.t_end:.4f}] vs [{b.t_start:.4f}, {b.t_end:.4f}])"
            )
        if a.t_start < 0:
            raise ConfigurationError(f"pulse {a.label} starts before t=0")
    canonical = [label for label in labels if label in LABEL_ORDER]
    if canonical != sorted(canonical, key=LABEL_ORDER.index):
        raise ConfigurationError(f"pulse order must follow D < R < B1 < B2, got {labels}")

    warnings = []
    by_label = {event.label: event for event in ordered}
    t_conv = None
    if "D" in by_label and "R" in by_label:
        t_conv = predict_conventional_echo_time(
            by_label["D"].t_center, by_label["R"].t_center
        )
        if "B1" in by_label and by_label["B1"].t_start >= t_conv:
            warnings.append(
                f"late lock: B1 starts at {by_label['B1'].t_start:.3f} us, at or after "
                f"the conventional echo at {t_conv:.3f} us; rephasing completes first"
            )

    if window_end is None:
        window_end = ordered[-1].t_end + WINDOW_PAD
        if {"D", "R", "B1", "B2"} <= set(labels):
            window_end = max(
                window_end,
                predict_echo_time(
                    by_label["D"].t_center,
                    by_label["R"].t_center,
                    by_label["B1"].t_center,
                    by_label["B2"].t_center,
                )
                + WINDOW_PAD,
            )
        elif t_conv is not None:
            window_end = max(window_end, t_conv + WINDOW_PAD)
    if window_end < ordered[-1].t_end:
        raise ConfigurationError(
            f"window_end {window_end} precedes the last pulse end {ordered[-1].t_end}"
        )
    return PulseSequence(ordered, float(window_end), tuple(warnings))


def scale_area(event: PulseEvent, factor: float) -> PulseEvent:
    """Copy of ``event`` with its area scaled; duration-specified pulses rescale too."""
    if event.area is not None:
        return replace(event, area=event.area * factor)
    return replace(event, duration=event.duration * factor)
