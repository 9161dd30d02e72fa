"""False-data-injection attack model for the communicated AGC channels.

An attack falsifies exactly one of the three measured channels.  Every
waveform decomposes as ``falsified = true * scale(t) + add(t)``, which is
what the simulator consumes; :func:`attack_offset` is the scalar reference
form of the same map.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Channel",
    "AttackKind",
    "AttackSpec",
    "Scenario",
    "attack_offset",
    "attack_coefficients",
    "apply_to_channels",
]


class Channel(enum.Enum):
    F1 = "f1"
    F2 = "f2"
    PTIE = "ptie"

    @property
    def index(self) -> int:
        """Position in the (f1, f2, ptie) channel ordering."""
        return ("f1", "f2", "ptie").index(self.value)


class AttackKind(enum.Enum):
    STEP = "step"
    RAMP = "ramp"
    PULSE = "pulse"
    SCALING = "scaling"
    COMBINED = "combined"


# Which optional fields each kind uses: (duration, magnitude, ramp_rate,
# scale_factor).  Unused fields must be left as None.
_FIELD_USE = {
    AttackKind.STEP: (False, True, False, False),
    AttackKind.RAMP: (True, False, True, False),
    AttackKind.PULSE: (True, True, False, False),
    AttackKind.SCALING: (True, False, False, True),
    AttackKind.COMBINED: (True, False, True, True),
}


@dataclass(frozen=True)
class AttackSpec:
    """One falsification waveform on one channel.

    Waveforms (v = true value, t0 = start_time, d = duration):

    * ``step``:     v + magnitude for t >= t0 (no duration).
    * ``ramp``:     v + ramp_rate*(t-t0) on [t0, t0+d); the final offset
      ramp_rate*d persists for t >= t0+d.
    * ``pulse``:    v + magnitude on [t0, t0+d), v elsewhere.
    * ``scaling``:  v*(1+scale_factor) on [t0, t0+d), v elsewhere.
    * ``combined``: scaling and ramp together on [t0, t0+d); after the
      window only the held ramp offset ramp_rate*d remains.
    """

    kind: AttackKind
    target: Channel
    start_time: float
    duration: float | None = None
    magnitude: float | None = None
    ramp_rate: float | None = None
    scale_factor: float | None = None

    def __post_init__(self):
        if not isinstance(self.kind, AttackKind):
            object.__setattr__(self, "kind", AttackKind(self.kind))
        if not isinstance(self.target, Channel):
            object.__setattr__(self, "target", Channel(self.target))
        if self.start_time < 0:
            raise ValueError("start_time must be >= 0")
        needs = _FIELD_USE[self.kind]
        fields = ("duration", "magnitude", "ramp_rate", "scale_factor")
        for used, name in zip(needs, fields):
            val = getattr(self, name)
            if used and val is None:
                raise ValueError(f"{self.kind.value} attack requires {name}")
            if not used and val is not None:
                raise ValueError(f"{self.kind.value} attack does not take {name}")
        if self.duration is not None and self.duration <= 0:
            raise ValueError("duration must be > 0")

    def to_dict(self):
        d = {"kind": self.kind.value, "target": self.target.value,
             "start_time": self.start_time}
        for name in ("duration", "magnitude", "ramp_rate", "scale_factor"):
            val = getattr(self, name)
            if val is not None:
                d[name] = val
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(kind=AttackKind(d["kind"]), target=Channel(d["target"]),
                   start_time=d["start_time"], duration=d.get("duration"),
                   magnitude=d.get("magnitude"), ramp_rate=d.get("ramp_rate"),
                   scale_factor=d.get("scale_factor"))


def _coeffs_scalar(spec: AttackSpec, t: float) -> tuple[float, float]:
    """(scale, add) at time t so that falsified = v*scale + add."""
    t0 = spec.start_time
    if t < t0:
        return 1.0, 0.0
    kind = spec.kind
    if kind is AttackKind.STEP:
        return 1.0, spec.magnitude
    end = t0 + spec.duration
    inside = t < end
    if kind is AttackKind.PULSE:
        return 1.0, spec.magnitude if inside else 0.0
    if kind is AttackKind.SCALING:
        return (1.0 + spec.scale_factor, 0.0) if inside else (1.0, 0.0)
    if kind is AttackKind.RAMP:
        off = spec.ramp_rate * ((t - t0) if inside else spec.duration)
        return 1.0, off
    # combined: scaling only inside the window, ramp offset held after
    if inside:
        return 1.0 + spec.scale_factor, spec.ramp_rate * (t - t0)
    return 1.0, spec.ramp_rate * spec.duration


def attack_offset(spec: AttackSpec, t: float, true_value: float) -> float:
    """Falsified measurement for one channel sample at time t."""
    scale, add = _coeffs_scalar(spec, t)
    return true_value * scale + add


def attack_coefficients(spec: AttackSpec, times: np.ndarray):
    """Vectorized (scale, add) arrays over a time grid.

    Satisfies attack_offset(spec, t, v) == v*scale + add elementwise.
    """
    t = np.asarray(times, dtype=float)
    scale = np.ones_like(t)
    add = np.zeros_like(t)
    t0 = spec.start_time
    kind = spec.kind
    after_start = t >= t0
    if kind is AttackKind.STEP:
        add[after_start] = spec.magnitude
        return scale, add
    inside = after_start & (t < t0 + spec.duration)
    after_end = t >= t0 + spec.duration
    if kind is AttackKind.PULSE:
        add[inside] = spec.magnitude
    elif kind is AttackKind.SCALING:
        scale[inside] = 1.0 + spec.scale_factor
    elif kind is AttackKind.RAMP:
        add[inside] = spec.ramp_rate * (t[inside] - t0)
        add[after_end] = spec.ramp_rate * spec.duration
    else:  # combined
        scale[inside] = 1.0 + spec.scale_factor
        add[inside] = spec.ramp_rate * (t[inside] - t0)
        add[after_end] = spec.ramp_rate * spec.duration
    return scale, add


def apply_to_channels(spec: AttackSpec | None, times, f1, f2, ptie):
    """Falsify the targeted channel of an already-recorded clean stream.

    Returns new (f1, f2, ptie) arrays; the two untouched channels are
    returned as copies so callers may mutate the result freely.
    """
    out = [np.array(f1, dtype=float), np.array(f2, dtype=float),
           np.array(ptie, dtype=float)]
    if spec is not None:
        scale, add = attack_coefficients(spec, times)
        i = spec.target.index
        out[i] = out[i] * scale + add
    return tuple(out)


@dataclass(frozen=True)
class Scenario:
    """Everything that varies between two simulation runs.

    Every run has one load step (the normal operating disturbance); an
    attack is optional.  ``label`` is the classification target: 0 for no
    attack, otherwise 1 + the index of the falsified channel
    (1 = delta_f1, 2 = delta_f2, 3 = delta_Ptie).
    """

    load_area: int
    load_magnitude: float
    load_time: float
    attack: AttackSpec | None = None

    def __post_init__(self):
        if self.load_area not in (1, 2):
            raise ValueError("load_area must be 1 or 2")
        if self.load_time < 0:
            raise ValueError("load_time must be >= 0")

    @property
    def label(self) -> int:
        if self.attack is None:
            return 0
        return 1 + self.attack.target.index

    def to_dict(self):
        d = {"load_area": self.load_area,
             "load_magnitude": self.load_magnitude,
             "load_time": self.load_time,
             "attack": None if self.attack is None else self.attack.to_dict()}
        return d

    @classmethod
    def from_dict(cls, d):
        attack = d.get("attack")
        return cls(load_area=d["load_area"],
                   load_magnitude=d["load_magnitude"],
                   load_time=d["load_time"],
                   attack=None if attack is None else AttackSpec.from_dict(attack))


LABEL_NAMES = ("none", "f1", "f2", "ptie")
