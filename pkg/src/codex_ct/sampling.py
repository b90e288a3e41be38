"""Exposure codes and interlaced view-sampling plans.

A fly-scan acquisition chops each view into K micro-exposures; a binary
code switches the flux on or off per chop.  View angles stride by K
micro-steps, so with gcd(K, N_theta) = 1 the first N_theta views visit
every micro-angle exactly once before repeating.  All uniqueness logic
here runs on exact integer step indices; radians are derived values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

RASKAR52_ASSET = "raskar52.txt"


@dataclass(frozen=True)
class ExposureCode:
    """Binary on/off pattern over the K chops of one view."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ValueError("code must have at least one chop")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("code bits must be 0 or 1")
        if not any(self.bits):
            raise ValueError("all-zero code admits no photons and cannot be normalized")

    @property
    def length(self) -> int:
        return len(self.bits)

    @property
    def cbar(self) -> int:
        """Number of open chops; normalizer of the coded sum."""
        return sum(self.bits)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.float64)

    @property
    def on_chops(self) -> np.ndarray:
        """Indices k with bit 1, ascending."""
        return np.flatnonzero(np.asarray(self.bits))


def build_code(kind: str, length: int, custom_bits=None) -> ExposureCode:
    """Construct an exposure code of the given length.

    kind 'snapshot' opens only the first chop, 'boxcar' opens every chop,
    'custom' takes the bits verbatim from custom_bits.
    """
    if length < 1:
        raise ValueError(f"code length must be >= 1, got {length}")
    if kind == "snapshot":
        return ExposureCode((1,) + (0,) * (length - 1))
    if kind == "boxcar":
        return ExposureCode((1,) * length)
    if kind == "custom":
        if custom_bits is None:
            raise ValueError("custom code requires custom_bits")
        bits = tuple(int(b) for b in custom_bits)
        if len(bits) != length:
            raise ValueError(f"custom_bits has length {len(bits)}, expected {length}")
        return ExposureCode(bits)
    raise ValueError(f"unknown code kind {kind!r}")


def raskar_code(length: int = 52) -> ExposureCode:
    """The 52-chop fluttered-shutter code, concatenated for longer lengths.

    length must be a positive multiple of 52.
    """
    if length < 52 or length % 52 != 0:
        raise ValueError(f"fluttered code length must be a positive multiple of 52, got {length}")
    base = _load_asset_codes()[0]
    reps = length // 52
    return ExposureCode(base.bits * reps)


def _load_asset_codes() -> list[ExposureCode]:
    text = resources.files("codex_ct").joinpath("data", RASKAR52_ASSET).read_text()
    return _parse_code_text(text)


def _parse_code_text(text: str) -> list[ExposureCode]:
    codes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if set(line) - {"0", "1"}:
            raise ValueError(f"line {lineno}: code files may contain only '0'/'1' characters")
        codes.append(ExposureCode(tuple(int(c) for c in line)))
    if not codes:
        raise ValueError("code file contains no codes")
    return codes


def read_code_file(path) -> list[ExposureCode]:
    """Read codes from a text file, one '0'/'1' string per line."""
    return _parse_code_text(Path(path).read_text())


def write_code_file(path, codes) -> None:
    lines = ["".join(str(b) for b in code.bits) for code in codes]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class SamplingPlan:
    """Interlaced view-sampling plan.

    N_theta = m*K - n micro-projection angles span [0, pi); view i starts
    at micro-step (i*K) mod N_theta.  unique_angle is set when
    gcd(K, N_theta) = 1 and M_theta <= N_theta, in which case no view
    angle repeats modulo pi.
    """

    K: int
    m: int
    n: int
    N_theta: int
    M_theta: int
    unique_angle: bool

    @property
    def micro_step_rad(self) -> float:
        return math.pi / self.N_theta

    @property
    def blur_angle_rad(self) -> float:
        return self.K * math.pi / self.N_theta

    @property
    def blur_angle_deg(self) -> float:
        return self.K * 180.0 / self.N_theta

    @property
    def span_rad(self) -> float:
        return (self.M_theta - 1) * self.K * math.pi / self.N_theta

    @property
    def micro_angles_rad(self) -> np.ndarray:
        """The N_theta unique micro-projection angles in [0, pi)."""
        return np.arange(self.N_theta) * (math.pi / self.N_theta)

    @property
    def view_angles_rad(self) -> np.ndarray:
        """Physical start angle of each view, pi*i*K/N_theta (not reduced)."""
        return np.arange(self.M_theta) * (self.K * math.pi / self.N_theta)

    @property
    def view_start_steps(self) -> np.ndarray:
        """Integer micro-step index of each view start, (i*K) mod N_theta."""
        return (np.arange(self.M_theta, dtype=np.int64) * self.K) % self.N_theta

    @property
    def nominal_view_angles_rad(self) -> np.ndarray:
        """Start angle of each view reduced to [0, pi): pi*((i*K) mod N)/N."""
        return self.view_start_steps * (math.pi / self.N_theta)


def make_sampling_plan(K: int, m: int, n: int, M_theta: int) -> SamplingPlan:
    """Build a plan with N_theta = m*K - n micro-angles and M_theta views."""
    if K < 1 or m < 1 or n < 1:
        raise ValueError("K, m, n must be positive integers")
    if M_theta < 1:
        raise ValueError("M_theta must be >= 1")
    N_theta = m * K - n
    if N_theta < 1:
        raise ValueError(f"m*K - n = {N_theta} must be positive")
    unique = math.gcd(K, N_theta) == 1 and M_theta <= N_theta
    return SamplingPlan(K=K, m=m, n=n, N_theta=N_theta, M_theta=M_theta, unique_angle=unique)


def check_unique_angles(plan: SamplingPlan):
    """Check that the M_theta view angles are pairwise distinct modulo pi.

    Exact integer arithmetic on (i*K) mod N_theta.  Returns
    (True, None) or (False, (i, j)) with (i, j) the collision with the
    smallest second index.
    """
    steps = plan.view_start_steps
    first_seen = np.full(plan.N_theta, -1, dtype=np.int64)
    order = np.arange(plan.M_theta - 1, -1, -1)
    first_seen[steps[order]] = order  # later writes win, so this keeps the earliest index
    hits = np.flatnonzero(first_seen[steps] != np.arange(plan.M_theta))
    if hits.size == 0:
        return True, None
    j = int(hits[0])
    return False, (int(first_seen[steps[j]]), j)


def micro_index(plan: SamplingPlan, view_index: int, chop_index: int) -> int:
    """Micro-angle index sampled by chop k of view i: (i*K + k) mod N_theta."""
    if not 0 <= view_index < plan.M_theta:
        raise ValueError(f"view_index {view_index} outside [0, {plan.M_theta})")
    if not 0 <= chop_index < plan.K:
        raise ValueError(f"chop_index {chop_index} outside [0, {plan.K})")
    return (view_index * plan.K + chop_index) % plan.N_theta
