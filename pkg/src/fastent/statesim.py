"""Spatial-qutrit state synthesis from a beam profile and slit transmissions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlin import DIM, PureState, pair_to_slit

SLITS = tuple(range(-4, 5))


class DegenerateStateError(ValueError):
    pass


@dataclass(frozen=True)
class SlitAperture:
    """Geometry of the 9-slit mask in micrometres (metadata only)."""

    slit_count: int = 9
    half_width_um: float = 52.0
    period_um: float = 208.0

    def __post_init__(self) -> None:
        if self.slit_count != 9:
            raise ValueError("the aperture always has 9 slits")
        if self.half_width_um <= 0 or self.period_um <= 0:
            raise ValueError("slit geometry must be positive")


@dataclass(frozen=True)
class BeamProfile:
    """Real, non-negative field amplitude sampled at the slit centres.

    ``waist`` and ``offset`` are in units of the slit period.
    """

    kind: str = "uniform"
    waist: float = 4.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown beam kind {self.kind!r}")
        if self.kind == "gaussian" and self.waist <= 0:
            raise ValueError("gaussian waist must be positive")

    @classmethod
    def parse(cls, text: str) -> "BeamProfile":
        """Parse ``uniform`` or ``gaussian:w,offset`` (offset optional)."""
        if text == "uniform":
            return cls()
        if text.startswith("gaussian"):
            _, _, params = text.partition(":")
            vals = [float(x) for x in params.split(",") if x.strip()] if params else []
            if len(vals) > 2:
                raise ValueError(f"gaussian takes at most two parameters, got {text!r}")
            waist = vals[0] if vals else 4.0
            offset = vals[1] if len(vals) > 1 else 0.0
            return cls("gaussian", waist, offset)
        raise ValueError(f"cannot parse beam profile {text!r}")

    def amplitude(self, l: int | np.ndarray) -> np.ndarray:
        l = np.asarray(l, dtype=float)
        if self.kind == "uniform":
            return np.ones_like(l)
        return np.exp(-((l - self.offset) ** 2) / self.waist**2)

    def to_json(self) -> dict:
        return {"kind": self.kind, "waist": self.waist, "offset": self.offset}


@dataclass(frozen=True)
class ModulationPattern:
    """Slit transmissions t in [0, 1], listed in slit order l = -4..4."""

    transmissions: tuple[float, ...]

    def __post_init__(self) -> None:
        t = tuple(float(x) for x in self.transmissions)
        if len(t) != DIM:
            raise ValueError(f"need {DIM} transmissions, got {len(t)}")
        if any(not 0.0 <= x <= 1.0 for x in t):
            raise ValueError(f"transmissions must lie in [0, 1]: {t}")
        if not any(x > 0 for x in t):
            raise ValueError("at least one slit must transmit")
        object.__setattr__(self, "transmissions", t)

    @classmethod
    def parse(cls, text: str) -> "ModulationPattern":
        return cls(tuple(float(x) for x in text.split(",")))

    def transmission(self, i: int, j: int) -> float:
        return self.transmissions[pair_to_slit(i, j) + 4]


def generate_state(beam: BeamProfile, mod: ModulationPattern) -> PureState:
    """alpha'_ij proportional to sqrt(t_ij) times the beam amplitude at slit l(i, j)."""
    t = np.asarray(mod.transmissions)
    # slit order l = -4..4 coincides with logical order 3i + j
    amp = np.sqrt(t) * beam.amplitude(np.asarray(SLITS))
    norm = np.linalg.norm(amp)
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateStateError("beam and transmissions leave no light through any slit")
    return PureState(amp.astype(complex) / norm)


@dataclass(frozen=True)
class Preset:
    name: str
    beam: BeamProfile
    modulation: ModulationPattern

    def state(self) -> PureState:
        return generate_state(self.beam, self.modulation)


def _diag(t00: float, t11: float, t22: float, off: float = 0.0) -> ModulationPattern:
    t = [off] * DIM
    t[0], t[4], t[8] = t00, t11, t22
    return ModulationPattern(tuple(t))


# Schmidt-diagonal presets: light only on slits l = -4, 0, 4 (|00>, |11>, |22>),
# transmissions tuned so the I-concurrence sits near 1.20, 0.45 and 0.27.
PRESETS = {
    1: Preset("strongly entangled", BeamProfile(), _diag(1.0, 1.0, 0.28)),
    2: Preset("moderately entangled", BeamProfile(), _diag(1.0, 0.095, 0.05)),
    3: Preset("weakly entangled", BeamProfile(), _diag(1.0, 0.052, 0.026)),
}


def canonical_states() -> tuple[PureState, PureState, PureState]:
    return tuple(PRESETS[k].state() for k in (1, 2, 3))
