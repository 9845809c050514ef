"""Atomic data for the 88Sr six-level model.

Levels are labelled |1> = 5s2 1S0, |2> = 5s5p 1P1 (461 nm cooling),
|3> = 5s5p 3P2 (metastable dark state), |4> = 5s5d 3D3 (496 nm repump),
|5> = 5s5p 3P1, |6> = 5s6s 3S1 (688 nm pump).

Everything downstream works in angular frequencies (rad/s).  Data files
store ordinary frequencies in Hz and the loader multiplies by 2*pi,
matching the usual "Gamma = 2pi x ... MHz" bookkeeping.

Besides the level constants this module holds the effective-rate
arithmetic for indirect decay chains (a two-step cascade is rate-limited
like resistors in series, parallel branches add) and the saturation
intensity / saturation parameter relations for Gaussian beams.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, Mapping

TWO_PI = 2.0 * math.pi

#: Decay rates are plain floats in rad/s; kept as an alias for signatures.
DecayRate = float


class AtomicDataError(ValueError):
    """Raised for unphysical rates or malformed constants files."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants used throughout (SI, CODATA 2018).

    ``mu_b`` is the Bohr magneton expressed as an angular frequency per
    gauss (rad/s/G), i.e. mu_B/hbar in magnetic-field units convenient
    for MOT formulas: 2*pi x 1.399624 MHz/G.
    """

    h: float = 6.62607015e-34
    hbar: float = 6.62607015e-34 / TWO_PI
    c: float = 2.99792458e8
    mu_b: float = TWO_PI * 1.399624e6


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class SrConstants:
    """Decay rates (rad/s) and transition wavelengths (m) of the model.

    ``gamma_ij`` is the decay rate from |j> to |i> (for the driven
    transitions 1-2, 3-4, 5-6 it is the transition linewidth).  The
    indirect rates gamma_23, gamma_25, gamma_45 are effective multi-step
    rates; ``cascade`` keeps the underlying per-step rates so the chain
    arithmetic stays reproducible (see :func:`combined_rates`).
    """

    gamma_12: DecayRate
    gamma_34: DecayRate
    gamma_56: DecayRate
    gamma_36: DecayRate
    gamma_15: DecayRate
    gamma_23: DecayRate
    gamma_25: DecayRate
    gamma_45: DecayRate
    lambda_12: float
    lambda_34: float
    lambda_56: float
    lambda_15: float = 689.0e-9
    cascade: Mapping[str, float] | None = None

    def validate(self) -> "SrConstants":
        """Consistency guard on loaded data; returns self.

        The blue transition must dwarf its leak channels (ratio > 1e4)
        and the green transition its 4->5 leak (ratio > 1e2); anything
        else means a corrupted or mis-scaled constants file.
        """
        for name in ("gamma_12", "gamma_34", "gamma_56", "gamma_36",
                     "gamma_15", "gamma_23", "gamma_25", "gamma_45"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise AtomicDataError(f"{name} must be finite and >= 0, got {value!r}")
        for name in ("lambda_12", "lambda_34", "lambda_56", "lambda_15"):
            value = getattr(self, name)
            if not 0.0 < value < 1e-3:
                raise AtomicDataError(f"{name} must be a wavelength in meters, got {value!r}")
        if self.gamma_12 <= 1e4 * max(self.gamma_23, self.gamma_25):
            raise AtomicDataError("gamma_12 is not >> gamma_23, gamma_25; data looks corrupted")
        if self.gamma_34 <= 1e2 * self.gamma_45:
            raise AtomicDataError("gamma_34 is not >> gamma_45; data looks corrupted")
        return self


_REQUIRED_KEYS = {
    "gamma_12_hz", "gamma_34_hz", "gamma_56_hz", "gamma_36_hz",
    "gamma_15_hz", "gamma_23_hz", "gamma_25_hz", "gamma_45_hz",
    "lambda_12_m", "lambda_34_m", "lambda_56_m",
}
_OPTIONAL_KEYS = {"lambda_15_m", "cascade_hz", "_notes"}


def load_constants(path=None, validate: bool = True) -> SrConstants:
    """Load level constants from a JSON file (bundled 88Sr data by default).

    Frequencies in the file are ordinary Hz and are converted to angular
    rates here; wavelengths stay in meters.

    Parameters
    ----------
    path : str or Path, optional
        Constants file; ``None`` selects the packaged ``sr88.json``.
    validate : bool
        Apply the :meth:`SrConstants.validate` consistency guard.
    """
    if path is None:
        raw = resources.files("srmot.data").joinpath("sr88.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise AtomicDataError(f"constants file is not valid JSON: {exc}") from exc

    unknown = set(data) - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise AtomicDataError(f"unknown keys in constants file: {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(data)
    if missing:
        raise AtomicDataError(f"constants file is missing keys: {sorted(missing)}")

    cascade = data.get("cascade_hz")
    if cascade is not None:
        cascade = {key: TWO_PI * float(value) for key, value in cascade.items()}

    constants = SrConstants(
        gamma_12=TWO_PI * float(data["gamma_12_hz"]),
        gamma_34=TWO_PI * float(data["gamma_34_hz"]),
        gamma_56=TWO_PI * float(data["gamma_56_hz"]),
        gamma_36=TWO_PI * float(data["gamma_36_hz"]),
        gamma_15=TWO_PI * float(data["gamma_15_hz"]),
        gamma_23=TWO_PI * float(data["gamma_23_hz"]),
        gamma_25=TWO_PI * float(data["gamma_25_hz"]),
        gamma_45=TWO_PI * float(data["gamma_45_hz"]),
        lambda_12=float(data["lambda_12_m"]),
        lambda_34=float(data["lambda_34_m"]),
        lambda_56=float(data["lambda_56_m"]),
        lambda_15=float(data.get("lambda_15_m", 689.0e-9)),
        cascade=cascade,
    )
    return constants.validate() if validate else constants


def with_overrides(constants: SrConstants, **overrides) -> SrConstants:
    """Return a copy of ``constants`` with the given fields replaced."""
    return replace(constants, **overrides).validate()


# ---------------------------------------------------------------------------
# effective-rate arithmetic for multi-step decay chains
# ---------------------------------------------------------------------------

def parallel_combine(rates: Iterable[DecayRate]) -> DecayRate:
    """Rate-limit a sequential decay chain: (sum_i 1/Gamma_i)^-1.

    A chain j -> k -> i proceeds at the reciprocal-sum rate of its steps,
    so the result never exceeds the slowest step.

    Raises
    ------
    AtomicDataError
        If the list is empty or any rate is not strictly positive (the
        reciprocal combination is undefined as a finite rate).
    """
    rates = list(rates)
    if not rates:
        raise AtomicDataError("parallel_combine needs at least one rate")
    for value in rates:
        if not math.isfinite(value) or value <= 0.0:
            raise AtomicDataError(f"parallel_combine needs strictly positive rates, got {value!r}")
    return 1.0 / math.fsum(1.0 / value for value in rates)


def branch_sum(rates: Iterable[DecayRate]) -> DecayRate:
    """Total rate of independent decay branches: sum_i Gamma_i."""
    rates = list(rates)
    if not rates:
        raise AtomicDataError("branch_sum needs at least one rate")
    for value in rates:
        if not math.isfinite(value) or value < 0.0:
            raise AtomicDataError(f"branch_sum needs nonnegative rates, got {value!r}")
    return math.fsum(rates)


def combined_rates(cascade: Mapping[str, float]) -> dict[str, DecayRate]:
    """Effective inter-subsystem rates from the per-step cascade data.

    Composes the decay chains of the level scheme:

    * ``gamma_25``: 1P1 -> 1D2 -> 3P1 (two-step chain),
    * ``gamma_23``: 1P1 -> 1D2 -> 3P2,
    * ``gamma_45``: 3D3 -> 5s6p 3P2 trunk, then four parallel two-step
      branches through 1D2, 3S1, 5s4d 3D2 and 5s4d 3D1 into 3P1,
    * ``gamma_15``: the direct 3P1 -> 1S0 rate.

    Keys of ``cascade`` follow ``UPPER__LOWER`` naming; values in rad/s.
    """
    c = cascade
    gamma_25 = parallel_combine([c["1P1__1D2"], c["1D2__3P1"]])
    gamma_23 = parallel_combine([c["1P1__1D2"], c["1D2__3P2"]])
    branches = branch_sum([
        parallel_combine([c["6P2__1D2"], c["1D2__3P1"]]),
        parallel_combine([c["6P2__3S1"], c["3S1__3P1"]]),
        parallel_combine([c["6P2__4D2"], c["4D2__3P1"]]),
        parallel_combine([c["6P2__4D1"], c["4D1__3P1"]]),
    ])
    gamma_45 = parallel_combine([c["3D3__6P2"], branches])
    gamma_15 = c["3P1__1S0"]
    return {"gamma_25": gamma_25, "gamma_23": gamma_23,
            "gamma_45": gamma_45, "gamma_15": gamma_15}


# ---------------------------------------------------------------------------
# saturation relations for Gaussian beams
# ---------------------------------------------------------------------------

def saturation_intensity(gamma: DecayRate, wavelength: float) -> float:
    """Two-level saturation intensity 2 pi^2 c hbar Gamma / (3 lambda^3), W/m^2.

    Valid between stretched Zeeman sublevels with unit Clebsch-Gordan
    coefficient.
    """
    if not gamma > 0.0 or not wavelength > 0.0:
        raise AtomicDataError("saturation_intensity needs gamma > 0 and wavelength > 0")
    return (2.0 * math.pi ** 2 * CONSTANTS.c * CONSTANTS.hbar * gamma
            / (3.0 * wavelength ** 3))


def beam_intensity(power: float, waist: float) -> float:
    """Peak intensity 2P/(pi w0^2) of a Gaussian beam, W/m^2."""
    if power < 0.0:
        raise AtomicDataError("beam_intensity needs power >= 0")
    if not waist > 0.0:
        raise AtomicDataError("beam_intensity needs waist > 0")
    return 2.0 * power / (math.pi * waist ** 2)


def saturation_parameter(power: float, waist: float, gamma: DecayRate,
                         wavelength: float) -> float:
    """Dimensionless s = I/I_sat for a beam of given power and waist."""
    return beam_intensity(power, waist) / saturation_intensity(gamma, wavelength)


def rabi_from_saturation(s: float, gamma: DecayRate) -> float:
    """Angular Rabi frequency from the saturation parameter.

    Uses s = 2 Omega^2 / Gamma^2 with the main transition linewidth only
    (leak rates out of the excited level are neglected in the
    conversion), so Omega = Gamma sqrt(s/2).
    """
    if s < 0.0:
        raise AtomicDataError("saturation parameter must be >= 0")
    if not gamma > 0.0:
        raise AtomicDataError("rabi_from_saturation needs gamma > 0")
    return gamma * math.sqrt(0.5 * s)


def saturation_from_rabi(omega: float, gamma: DecayRate) -> float:
    """Inverse of :func:`rabi_from_saturation`: s = 2 Omega^2 / Gamma^2."""
    if not gamma > 0.0:
        raise AtomicDataError("saturation_from_rabi needs gamma > 0")
    return 2.0 * omega ** 2 / gamma ** 2
