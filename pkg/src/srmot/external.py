"""External degrees of freedom: 1-D MOT forces, trap depth, load/loss models.

A pair of counterpropagating red-detuned beams plus a magnetic quadrupole
gradient produces the standard position/velocity dependent scattering
force.  Integrating it across the beam overlap gives a trapping
potential with a closed arctan form, a depth maximum at a predictable
detuning/gradient pair, and two heuristic couplings into the internal
rate model:

* the loading rate follows a Gaussian in the gradient, centered on the
  blue MOT's optimum,
* the green-red loss rate dips to a floor where the green beams actually
  form a trap and saturates away from it; the two green beam layouts
  ("gmot": six beams forming a full MOT, "grp": four planar repump
  beams) differ only by their floor/amplitude parameters.

Gradients are G/cm at every interface and converted to G/m internally;
``mu`` is carried as an angular frequency per gauss so no further hbar
appears in the Zeeman terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .atomic import CONSTANTS
from .bloch import DriveParams, SystemParams
from .hybrid import hybrid_steady_state

G_PER_CM = 100.0  # gauss per centimeter -> gauss per meter


class ExternalModelError(ValueError):
    """Raised for unphysical beam or rate parameters."""


@dataclass(frozen=True)
class MotBeam:
    """One retroreflected MOT beam pair driving a single transition.

    ``gamma`` and ``delta`` are angular (rad/s), ``wavelength`` and the
    beam radius ``w`` are meters, ``s`` is the resonant saturation
    parameter and ``mu`` the differential magnetic moment as angular
    frequency per gauss (identical for the blue and green transitions
    between stretched Zeeman states).
    """

    gamma: float
    wavelength: float
    s: float
    delta: float
    w: float
    mu: float = CONSTANTS.mu_b

    def __post_init__(self):
        if not self.gamma > 0.0 or not self.wavelength > 0.0:
            raise ExternalModelError("gamma and wavelength must be positive")
        if self.s < 0.0 or not self.w > 0.0 or not self.mu > 0.0:
            raise ExternalModelError("need s >= 0, w > 0, mu > 0")
        if not math.isfinite(self.delta):
            raise ExternalModelError("delta must be finite")

    @property
    def k(self) -> float:
        """Wavenumber 2 pi / lambda (1/m)."""
        return 2.0 * math.pi / self.wavelength

    def with_(self, **changes) -> "MotBeam":
        return replace(self, **changes)


@dataclass(frozen=True)
class ExternalRates:
    """Heuristic load/loss parameters for one green-beam configuration."""

    config: str
    r_load0: float = 1.0e8
    db_blue: float = 100.0   # Gaussian loading width, G/cm
    gamma_free: float = 1.0
    gamma_trap: float = 200.0
    db_grrd: float = 100.0   # loss-dip width, G/cm

    def __post_init__(self):
        if self.config not in ("gmot", "grp"):
            raise ExternalModelError(f"config must be 'gmot' or 'grp', got {self.config!r}")
        if not self.db_blue > 0.0 or not self.db_grrd > 0.0:
            raise ExternalModelError("Gaussian widths must be positive")
        for name in ("r_load0", "gamma_free", "gamma_trap"):
            if getattr(self, name) < 0.0:
                raise ExternalModelError(f"{name} must be >= 0")

    @classmethod
    def defaults(cls, config: str, **overrides) -> "ExternalRates":
        """Default loss parameters: gmot (200, 1) s^-1, grp (1000, 300) s^-1."""
        base = {"gmot": dict(gamma_trap=200.0, gamma_free=1.0),
                "grp": dict(gamma_trap=1000.0, gamma_free=300.0)}
        if config not in base:
            raise ExternalModelError(f"config must be 'gmot' or 'grp', got {config!r}")
        kwargs = base[config] | overrides
        return cls(config=config, **kwargs)


# ---------------------------------------------------------------------------
# forces and potentials
# ---------------------------------------------------------------------------

def beam_forces(v, z, beam: MotBeam, b_grad: float):
    """Scattering forces (F+, F-) of the two counterpropagating beams, N.

    F± = ± (hbar k Gamma / 2) s theta(z+w) theta(w-z)
         / (1 + s + 4 ((Delta ± k v ∓ mu B' z)/Gamma)^2)

    The Heaviside cutoff (inclusive at |z| = w) models atoms drifting
    out sideways once they leave the transverse beam overlap.
    """
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=float)
    b = b_grad * G_PER_CM
    prefactor = CONSTANTS.hbar * beam.k * beam.gamma / 2.0 * beam.s
    inside = (z >= -beam.w) & (z <= beam.w)
    zeeman = beam.mu * b * z
    f_plus = prefactor * inside / (
        1.0 + beam.s + 4.0 * ((beam.delta + beam.k * v - zeeman) / beam.gamma) ** 2)
    f_minus = -prefactor * inside / (
        1.0 + beam.s + 4.0 * ((beam.delta - beam.k * v + zeeman) / beam.gamma) ** 2)
    if f_plus.ndim == 0:
        return float(f_plus), float(f_minus)
    return f_plus, f_minus


def mot_force(v, z, beam: MotBeam, b_grad: float):
    """Total 1-D MOT force F+(v,z) + F-(v,z), N."""
    f_plus, f_minus = beam_forces(v, z, beam, b_grad)
    return f_plus + f_minus


def mot_potential(z, beam: MotBeam, b_grad: float):
    """Trapping potential from integrating the v = 0 force along z, J.

    Closed form over the beam overlap; zero below the lower beam edge
    and again beyond the upper edge (the force integrates to zero over
    the full symmetric interval).  A vanishing gradient gives zero net
    force everywhere, so the B' = 0 branch returns 0.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    if b_grad == 0.0:
        out = np.zeros_like(z, dtype=float)
        return float(out) if scalar else out
    b = b_grad * G_PER_CM
    g = beam.gamma * math.sqrt(1.0 + beam.s)
    c0 = (CONSTANTS.hbar * beam.k * beam.gamma ** 2 * beam.s
          / (4.0 * beam.mu * b * math.sqrt(1.0 + beam.s)))
    edge = beam.w * beam.mu * b
    zc = np.minimum(z, beam.w) * beam.mu * b
    value = c0 * (
        np.arctan(2.0 * (beam.delta + edge) / g)
        - np.arctan(2.0 * (beam.delta + zc) / g)
        + np.arctan(2.0 * (beam.delta - edge) / g)
        - np.arctan(2.0 * (beam.delta - zc) / g)
    )
    value = np.where(z <= -beam.w, 0.0, value)
    return float(value) if scalar else value


def trap_depth(beam: MotBeam, b_grad: float) -> float:
    """Potential barrier V(0) a zero-velocity atom must overcome, J.

    Four-term arctan combination, identical to ``mot_potential(0)``;
    the sign set and the sqrt(1+s) broadening factor are fixed by direct
    quadrature of the force.  Positive for red detuning inside the
    trapping regime and vanishing as B' grows without bound.
    """
    if not b_grad > 0.0:
        raise ExternalModelError("trap_depth needs b_grad > 0 (expression divides by B')")
    b = b_grad * G_PER_CM
    g = beam.gamma * math.sqrt(1.0 + beam.s)
    c0 = (CONSTANTS.hbar * beam.k * beam.gamma ** 2 * beam.s
          / (4.0 * beam.mu * b * math.sqrt(1.0 + beam.s)))
    a = beam.w * beam.mu * b
    return float(c0 * (math.atan(2.0 * (beam.delta + a) / g)
                       + math.atan(2.0 * (beam.delta - a) / g)
                       - 2.0 * math.atan(2.0 * beam.delta / g)))


def optimal_detuning(beam: MotBeam, b_grad: float) -> float:
    """Detuning maximizing the trap depth at fixed gradient, rad/s.

    Delta_m = -sqrt((w mu B')^2 / 3 + (1+s) Gamma^2 / 12); approaches
    -(w mu B')/sqrt(3) for large gradients.
    """
    if b_grad < 0.0:
        raise ExternalModelError("optimal_detuning needs b_grad >= 0")
    b = b_grad * G_PER_CM
    return -math.sqrt((beam.w * beam.mu * b) ** 2 / 3.0
                      + (1.0 + beam.s) * beam.gamma ** 2 / 12.0)


def optimal_gradient(beam: MotBeam) -> float:
    """Gradient maximizing the trap depth at the beam's detuning, G/cm.

    B'_m = -sqrt(3) Delta / (mu w); defined for red detuning only.
    """
    if beam.delta >= 0.0:
        raise ExternalModelError("optimal_gradient needs red detuning (delta < 0)")
    return -math.sqrt(3.0) * beam.delta / (beam.mu * beam.w) / G_PER_CM


def _matched_gradient(delta: float, beam: MotBeam) -> float:
    """Eq.-of-motion optimum -sqrt(3) delta / (mu w) in G/cm, any sign."""
    return -math.sqrt(3.0) * delta / (beam.mu * beam.w) / G_PER_CM


def loading_rate(b_grad: float, beam_blue: MotBeam, rates: ExternalRates) -> float:
    """Gaussian loading-rate model centered on the blue MOT optimum, atoms/s.

    R(B') = R0 exp(-(B' - B'_m,blue)^2 / dB'^2) with the peak exactly at
    :func:`optimal_gradient` of the blue beam.
    """
    center = optimal_gradient(beam_blue)
    return rates.r_load0 * math.exp(-((b_grad - center) / rates.db_blue) ** 2)


def greenred_loss_rate(delta34: float, b_grad: float, beam_green: MotBeam,
                       rates: ExternalRates) -> float:
    """Loss rate of the green-red subsystem, 1/s.

    Gamma = Gamma_free + Gamma_trap (1 - exp(-(B' - B'_m,green)^2 / dB'^2)),
    dipping to the floor where the gradient matches the green-beam
    optimum for the given detuning and saturating to
    Gamma_free + Gamma_trap far from it.
    """
    center = _matched_gradient(delta34, beam_green)
    dip = math.exp(-((b_grad - center) / rates.db_grrd) ** 2)
    return rates.gamma_free + rates.gamma_trap * (1.0 - dip)


# ---------------------------------------------------------------------------
# composed fluorescence map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapResult:
    """Steady-state maps over a (delta34, b_grad) grid.

    ``n22``/``n44`` are excited-state atom numbers, ``rho22``/``rho44``
    the corresponding raw fractions; failed cells hold NaN with the
    error message recorded at the same position.
    """

    delta34: np.ndarray        # rad/s, shape (nd,)
    b_grad: np.ndarray         # G/cm, shape (nb,)
    n22: np.ndarray            # shape (nd, nb)
    n44: np.ndarray
    rho22: np.ndarray
    rho44: np.ndarray
    errors: list = field(default_factory=list)  # (i, j, message)


def map_cell(delta34: float, b_grad: float, params: SystemParams,
             beam_blue: MotBeam, beam_green: MotBeam,
             rates: ExternalRates) -> tuple[float, float, float, float]:
    """One grid point of the fluorescence map: (n22, n44, rho22, rho44).

    The loading and loss models set r_load and gamma_grrd, the green
    drive takes the cell's detuning, and the hybrid model supplies the
    steady state.  Pure function of its arguments; cells are
    independent and may run in any order or process.
    """
    load = loading_rate(b_grad, beam_blue, rates)
    loss = greenred_loss_rate(delta34, b_grad, beam_green, rates)
    cell_params = params.with_(
        green=DriveParams(omega=params.green.omega, delta=delta34),
        gamma_grrd=loss, r_load=load)
    result = hybrid_steady_state(cell_params)
    rho22 = float(result.blue_fracs[1].real)
    rho44 = result.greenred.rho44
    return (result.pops.n_blue * rho22, result.pops.n_grrd * rho44, rho22, rho44)


def fluorescence_map(grid: tuple[Sequence[float], Sequence[float]],
                     params: SystemParams, beam_blue: MotBeam,
                     beam_green: MotBeam, rates: ExternalRates) -> MapResult:
    """Evaluate :func:`map_cell` over a (delta34, b_grad) grid, serially.

    Solver failures are recorded per cell and never abort the sweep.
    """
    delta34 = np.asarray(grid[0], dtype=float)
    b_grad = np.asarray(grid[1], dtype=float)
    if delta34.size == 0 or b_grad.size == 0:
        raise ExternalModelError("fluorescence_map needs a non-empty grid")
    shape = (delta34.size, b_grad.size)
    n22 = np.full(shape, np.nan)
    n44 = np.full(shape, np.nan)
    rho22 = np.full(shape, np.nan)
    rho44 = np.full(shape, np.nan)
    errors = []
    for i, d in enumerate(delta34):
        for j, b in enumerate(b_grad):
            try:
                n22[i, j], n44[i, j], rho22[i, j], rho44[i, j] = map_cell(
                    d, b, params, beam_blue, beam_green, rates)
            except Exception as exc:  # recorded, not raised
                errors.append((i, j, f"{type(exc).__name__}: {exc}"))
    return MapResult(delta34=delta34, b_grad=b_grad, n22=n22, n44=n44,
                     rho22=rho22, rho44=rho44, errors=errors)
