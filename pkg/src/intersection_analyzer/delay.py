"""Control-delay estimation for undersaturated signalized approaches.

The model:

    d = 6.23 + 0.5 * C * (1 - g/C)^2 / (1 - X * g/C) - 15.35 * R_p

with cycle length C, allocated green g, volume-to-capacity ratio X and
platoon ratio R_p (share of traffic arriving on green divided by the green
share of the cycle).  The correction term can push the value negative, in
which case the estimate clamps to zero and says so.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import (
    EmptyInput,
    InvariantViolation,
    NoMajorApproaches,
    SaturatedRegime,
    ZeroPTG,
)
from .model import ApproachConfig

BASE_DELAY_S = 6.23
PLATOON_COEFFICIENT = 15.35
# X*g/C at or beyond this is treated as the saturated regime.
SATURATION_GUARD = 1e-9


@dataclass(frozen=True)
class DelayInputs:
    """Inputs to the control-delay model.

    ``platoon_ratio`` is normally >= 0 (1.0 means random arrivals) but may
    be negative when back-solved from recorded delays, so no sign check is
    applied.  The underlying arrival profile (``pvg``: fraction of traffic
    arriving on green, ``ptg``: green fraction of the cycle) may be carried
    alongside, in which case it must agree with the ratio.
    """

    cycle_length: float
    green_time: float
    vc_ratio: float
    platoon_ratio: float = 1.0
    pvg: float | None = None
    ptg: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.cycle_length) or self.cycle_length <= 0:
            raise InvariantViolation(f"cycle_length must be > 0, got {self.cycle_length}")
        if not 0 < self.green_time <= self.cycle_length:
            raise InvariantViolation(
                f"green_time must lie in (0, cycle_length], got {self.green_time}")
        if not math.isfinite(self.vc_ratio) or self.vc_ratio < 0:
            raise InvariantViolation(f"vc_ratio must be >= 0 and finite, got {self.vc_ratio}")
        if not math.isfinite(self.platoon_ratio):
            raise InvariantViolation("platoon_ratio must be finite")
        if (self.pvg is None) != (self.ptg is None):
            raise InvariantViolation("pvg and ptg must be supplied together")
        if self.pvg is not None:
            if self.ptg <= 0:
                raise InvariantViolation(f"ptg must be > 0, got {self.ptg}")
            implied = self.pvg / self.ptg
            if abs(self.platoon_ratio - implied) > 1e-9:
                raise InvariantViolation(
                    f"platoon_ratio {self.platoon_ratio} disagrees with "
                    f"pvg/ptg = {implied}")

    @classmethod
    def from_arrival_profile(cls, cycle_length: float, green_time: float,
                             vc_ratio: float, pvg: float, ptg: float) -> "DelayInputs":
        return cls(cycle_length, green_time, vc_ratio,
                   platoon_ratio=platoon_ratio(pvg, ptg), pvg=pvg, ptg=ptg)


@dataclass(frozen=True)
class DelayEstimate:
    seconds: float
    clamped: bool = False


class DelayPolicy(Enum):
    ALL_APPROACHES = "all"
    MAJOR_ONLY = "major"


def platoon_ratio(pvg: float, ptg: float) -> float:
    """Platoon ratio from the fraction of traffic arriving on green (PVG)
    and the green fraction of the cycle (PTG)."""
    if not 0.0 <= pvg <= 1.0:
        raise ValueError(f"pvg must lie in [0, 1], got {pvg}")
    if not 0.0 <= ptg <= 1.0:
        raise ValueError(f"ptg must lie in [0, 1], got {ptg}")
    if ptg == 0.0:
        raise ZeroPTG("ptg is zero; platoon ratio undefined")
    return pvg / ptg


def control_delay(inputs: DelayInputs) -> DelayEstimate:
    """Evaluate the delay model at full precision, clamping negatives to 0."""
    green_ratio = inputs.green_time / inputs.cycle_length
    load = inputs.vc_ratio * green_ratio
    if load >= 1.0 - SATURATION_GUARD:
        raise SaturatedRegime(
            f"X*g/C = {load:.9f}: the model covers undersaturated operation only")
    uniform = 0.5 * inputs.cycle_length * (1.0 - green_ratio) ** 2 / (1.0 - load)
    seconds = BASE_DELAY_S + uniform - PLATOON_COEFFICIENT * inputs.platoon_ratio
    if seconds < 0.0:
        return DelayEstimate(0.0, clamped=True)
    return DelayEstimate(seconds, clamped=False)


def platoon_ratio_from_delay(
    cycle_length: float,
    green_time: float,
    vc_ratio: float,
    observed_delay: float,
) -> float:
    """Invert the delay model for R_p given an observed (unclamped) delay."""
    probe = DelayInputs(cycle_length, green_time, vc_ratio, platoon_ratio=0.0)
    at_zero = control_delay(probe)
    return (at_zero.seconds - observed_delay) / PLATOON_COEFFICIENT


def intersection_delay(
    per_approach: Mapping[str, float],
    policy: DelayPolicy,
    configs: Mapping[str, ApproachConfig],
) -> float:
    """Unweighted mean delay over the approaches selected by the policy."""
    if not per_approach:
        raise EmptyInput("no per-approach delays given")
    if policy is DelayPolicy.MAJOR_ONLY:
        selected = [a for a in per_approach if configs[a].is_major]
        if not selected:
            raise NoMajorApproaches("no approach is flagged as major")
    else:
        selected = list(per_approach)
    return statistics.fmean(per_approach[a] for a in selected)
