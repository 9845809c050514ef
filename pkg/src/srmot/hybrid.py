"""Adiabatic two-pool reduction of the six-level dynamics.

The blue pair thermalizes within ~1/Gamma_12 (tens of ns) and the
green-red sector within microseconds, while population exchange between
them runs on milliseconds.  That separation allows a hybrid model:

* the blue pair is replaced by its analytic two-level steady state,
* the green-red sector keeps an 8x8 set of open Bloch equations whose
  quasi-steady state is normalized to one,
* the slow exchange is a 2x2 rate equation for the subsystem atom
  numbers (N_blue, N_gr:rd) with pump rates R_ij = Gamma_ij rho_jj.

:func:`hybrid_steady_state` and :func:`hybrid_evolve` compose these
pieces with state-resolved effective rates so that the pool equilibria
reproduce the full 12x12 model.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .atomic import SrConstants
from .bloch import BlochState, LiouvillianError, SystemParams

logger = logging.getLogger(__name__)

#: Component ordering of the reduced green-red state vector.
REDUCED_LABELS = ("r55", "r66", "r56", "r65", "r33", "r44", "r34", "r43")
RIDX = {label: i for i, label in enumerate(REDUCED_LABELS)}
REDUCED_POPULATIONS = (RIDX["r55"], RIDX["r66"], RIDX["r33"], RIDX["r44"])
#: Row replaced by the trace constraint: the dark state |3> accumulates
#: population and has no intrinsic decay, so its balance row is the
#: redundant one in the quasi-steady solve.
_CONSTRAINT_ROW = RIDX["r33"]


class HybridModelError(ValueError):
    """Raised for unphysical inputs to the reduced model."""


class DegenerateSteadyStateError(HybridModelError):
    """Quasi-steady state is not unique for the given parameters."""


class SingularBalanceError(HybridModelError):
    """The two-pool balance has a vanishing denominator."""


@dataclass(frozen=True)
class ReducedState:
    """Normalized green-red state (rho55, rho66, rho56, rho65, rho33, rho44, rho34, rho43)."""

    components: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=complex)
        if arr.shape != (8,):
            raise HybridModelError(f"reduced state needs 8 components, got {arr.shape}")
        object.__setattr__(self, "components", arr)

    def __getitem__(self, label: str) -> complex:
        return self.components[RIDX[label]]

    @property
    def rho33(self) -> float:
        return float(self.components[RIDX["r33"]].real)

    @property
    def rho44(self) -> float:
        return float(self.components[RIDX["r44"]].real)

    @property
    def rho55(self) -> float:
        return float(self.components[RIDX["r55"]].real)

    @property
    def rho66(self) -> float:
        return float(self.components[RIDX["r66"]].real)

    @property
    def trace(self) -> float:
        return float(self.components[list(REDUCED_POPULATIONS)].real.sum())

    def validate(self, rtol: float = 1e-9) -> "ReducedState":
        if abs(self.trace - 1.0) > max(rtol, 1e-9):
            raise HybridModelError(f"populations sum to {self.trace!r}, expected 1")
        tol = max(rtol, 1e-9)
        for i in REDUCED_POPULATIONS:
            value = self.components[i]
            if abs(value.imag) > tol or value.real < -tol:
                raise HybridModelError(
                    f"population {REDUCED_LABELS[i]} = {value!r} violates realness/nonnegativity")
        for lo, hi in ((RIDX["r56"], RIDX["r65"]), (RIDX["r34"], RIDX["r43"])):
            if abs(self.components[lo] - np.conj(self.components[hi])) > tol:
                raise HybridModelError("coherences are not conjugate pairs")
        return self


@dataclass(frozen=True)
class PumpRates:
    """Slow population-transfer rates between the two pools (1/s)."""

    r_23: float
    r_25: float
    r_15: float

    def __post_init__(self):
        for name in ("r_23", "r_25", "r_15"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise HybridModelError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class SubsystemPopulations:
    """Atom numbers in the blue and green-red subsystems."""

    n_blue: float
    n_grrd: float

    def __post_init__(self):
        for name in ("n_blue", "n_grrd"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise HybridModelError(f"{name} must be finite, got {value!r}")


def blue_excited_fraction(s12: float, delta12: float, gamma12: float) -> float:
    """Steady excited fraction of the driven blue pair.

    rho22(inf) = 1 / (2 (1 + (1/s12)(1 + (2 Delta12/Gamma12)^2))),
    bounded by 1/2; the s12 -> 0 limit returns 0.
    """
    if s12 < 0.0:
        raise HybridModelError("s12 must be >= 0")
    if s12 == 0.0:
        return 0.0
    lorentz = 1.0 + (2.0 * delta12 / gamma12) ** 2
    return 1.0 / (2.0 * (1.0 + lorentz / s12))


def blue_steady_fractions(s12: float, delta12: float, gamma12: float) -> tuple[complex, complex, complex, complex]:
    """Normalized blue-pair steady state (rho11, rho22, rho12, rho21).

    The coherence follows the closed two-level relation
    rho12 = i Omega (rho11 - rho22) / (2 Lambda) with
    Lambda = i Delta + Gamma/2, consistent with
    :func:`blue_excited_fraction`.
    """
    rho22 = blue_excited_fraction(s12, delta12, gamma12)
    rho11 = 1.0 - rho22
    omega = gamma12 * math.sqrt(0.5 * s12)
    lam = 1j * delta12 + 0.5 * gamma12
    rho12 = 0.5j * omega * (rho11 - rho22) / lam
    return (rho11 + 0j, rho22 + 0j, rho12, np.conj(rho12))


def build_reduced_liouvillian(params: SystemParams) -> np.ndarray:
    """8x8 generator of the green-red sector.

    Equals the green-red sub-block of the full 12x12 generator with the
    blue feed columns deleted and the trap loss removed; the |5> -> |1>
    leak Gamma_15 stays on the rho55 diagonal and in the red coherence
    decay.
    """
    c = params.constants
    o34, d34 = params.green.omega, params.green.delta
    o56, d56 = params.red.omega, params.red.delta
    for value in (o34, d34, o56, d56):
        if not math.isfinite(value):
            raise HybridModelError("drive parameters must be finite")

    lam34 = 1j * d34 + 0.5 * (c.gamma_34 + c.gamma_45)
    lam56 = 1j * d56 + 0.5 * (c.gamma_56 + c.gamma_36 + c.gamma_15)
    i2 = 0.5j

    M = np.zeros((8, 8), dtype=complex)
    M[RIDX["r55"], RIDX["r55"]] = -c.gamma_15
    M[RIDX["r55"], RIDX["r66"]] = c.gamma_56
    M[RIDX["r55"], RIDX["r56"]] = i2 * o56
    M[RIDX["r55"], RIDX["r65"]] = -i2 * o56
    M[RIDX["r55"], RIDX["r44"]] = c.gamma_45

    M[RIDX["r66"], RIDX["r66"]] = -(c.gamma_56 + c.gamma_36)
    M[RIDX["r66"], RIDX["r56"]] = -i2 * o56
    M[RIDX["r66"], RIDX["r65"]] = i2 * o56

    M[RIDX["r56"], RIDX["r55"]] = i2 * o56
    M[RIDX["r56"], RIDX["r66"]] = -i2 * o56
    M[RIDX["r56"], RIDX["r56"]] = -lam56

    M[RIDX["r65"], RIDX["r55"]] = -i2 * o56
    M[RIDX["r65"], RIDX["r66"]] = i2 * o56
    M[RIDX["r65"], RIDX["r65"]] = -np.conj(lam56)

    M[RIDX["r33"], RIDX["r66"]] = c.gamma_36
    M[RIDX["r33"], RIDX["r44"]] = c.gamma_34
    M[RIDX["r33"], RIDX["r34"]] = i2 * o34
    M[RIDX["r33"], RIDX["r43"]] = -i2 * o34

    M[RIDX["r44"], RIDX["r44"]] = -(c.gamma_34 + c.gamma_45)
    M[RIDX["r44"], RIDX["r34"]] = -i2 * o34
    M[RIDX["r44"], RIDX["r43"]] = i2 * o34

    M[RIDX["r34"], RIDX["r33"]] = i2 * o34
    M[RIDX["r34"], RIDX["r44"]] = -i2 * o34
    M[RIDX["r34"], RIDX["r34"]] = -lam34

    M[RIDX["r43"], RIDX["r33"]] = -i2 * o34
    M[RIDX["r43"], RIDX["r44"]] = i2 * o34
    M[RIDX["r43"], RIDX["r43"]] = -np.conj(lam34)
    return M


def _drives_off(m: np.ndarray) -> tuple[bool, bool]:
    """(red drive off, green drive off) read back from the generator."""
    omega56 = 2.0 * abs(m[RIDX["r56"], RIDX["r55"]])
    omega34 = 2.0 * abs(m[RIDX["r34"], RIDX["r33"]])
    return omega56 == 0.0, omega34 == 0.0


def _injection_limit(m: np.ndarray) -> np.ndarray:
    """Long-time limit of exp(Mt) applied to a unit injection into |3>.

    Used to resolve degenerate quasi-steady states: population enters
    the green-red sector through the dark state, so the physically
    reachable stationary combination is the projection of e_33 onto the
    null modes of M.
    """
    eigvals, vecs = np.linalg.eig(m)
    scale = max(float(np.max(np.abs(eigvals))), 1.0)
    slow = np.abs(eigvals) <= 1e-10 * scale
    if np.any(eigvals.real > 1e-10 * scale):
        raise DegenerateSteadyStateError("generator has growing modes; unphysical parameters")
    x0 = np.zeros(8, dtype=complex)
    x0[RIDX["r33"]] = 1.0
    coeffs = np.linalg.solve(vecs, x0)
    limit = vecs[:, slow] @ coeffs[slow]
    trace = float(limit[list(REDUCED_POPULATIONS)].real.sum())
    if trace <= 1e-9:
        raise DegenerateSteadyStateError(
            "injection limit carries no population; parameters leave the sector empty")
    return limit / trace


def greenred_steady_state(m: np.ndarray, on_degenerate: str = "raise") -> ReducedState:
    """Quasi-steady state of the green-red sector, normalized to one.

    Solves M rho = 0 subject to sum_k rho_kk = 1 by replacing the dark
    state's balance row with the trace constraint; the slow Gamma_15
    leak makes the remaining rows exactly solvable while the replaced
    row absorbs the leak flux.

    With the green drive off the sector decouples and the constrained
    system can acquire extra null directions.  The all-drives-off case
    returns the pure dark state rho33 = 1 by convention; other
    degeneracies raise :class:`DegenerateSteadyStateError` unless
    ``on_degenerate="inject"`` selects the stationary state reachable
    from injection into |3> (the way the sector is actually fed).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (8, 8):
        raise HybridModelError(f"expected an 8x8 generator, got {m.shape}")
    if on_degenerate not in ("raise", "inject"):
        raise HybridModelError(f"unknown degeneracy policy {on_degenerate!r}")

    a = m.copy()
    a[_CONSTRAINT_ROW] = 0.0
    for i in REDUCED_POPULATIONS:
        a[_CONSTRAINT_ROW, i] = 1.0
    rhs = np.zeros(8, dtype=complex)
    rhs[_CONSTRAINT_ROW] = 1.0

    # row-equilibrate before the rank check: physical rows span many
    # orders of magnitude against the O(1) trace row
    norms = np.max(np.abs(a), axis=1)
    scaled = a / np.where(norms == 0.0, 1.0, norms)[:, None]
    sv = np.linalg.svd(scaled, compute_uv=False)
    degenerate = sv[0] == 0.0 or sv[-1] <= 1e-10 * sv[0]

    if degenerate:
        red_off, green_off = _drives_off(m)
        if red_off and green_off:
            rho = np.zeros(8, dtype=complex)
            rho[RIDX["r33"]] = 1.0
            return ReducedState(rho)
        if on_degenerate == "inject":
            logger.info("greenred_steady_state: degenerate sector resolved by "
                        "injection into the dark state")
            return ReducedState(_injection_limit(m)).validate(rtol=1e-8)
        raise DegenerateSteadyStateError(
            "quasi-steady state is not unique (decoupled sector); pass "
            "on_degenerate='inject' to pick the state fed through |3>")

    rho = np.linalg.solve(a, rhs)
    kept = [i for i in range(8) if i != _CONSTRAINT_ROW]
    residual = np.abs(m[kept] @ rho)
    row_scale = np.maximum(np.max(np.abs(m[kept]), axis=1), 1.0)
    if np.any(residual > 1e-9 * row_scale * max(1.0, float(np.max(np.abs(rho))))):
        raise HybridModelError("constrained quasi-steady solve left a large residual")
    return ReducedState(rho).validate(rtol=1e-8)


def pump_rates(rho22: float, rho55: float, constants: SrConstants) -> PumpRates:
    """Slow transfer rates R_23 = Gamma_23 rho22, R_25 = Gamma_25 rho22, R_15 = Gamma_15 rho55."""
    for name, value in (("rho22", rho22), ("rho55", rho55)):
        if not 0.0 <= value <= 1.0:
            raise HybridModelError(f"{name} must lie in [0, 1], got {value!r}")
    return PumpRates(r_23=constants.gamma_23 * rho22,
                     r_25=constants.gamma_25 * rho22,
                     r_15=constants.gamma_15 * rho55)


def subsystem_rate_matrix(rates: PumpRates, gamma_blue: float,
                          gamma_grrd: float) -> np.ndarray:
    """2x2 exchange matrix A for (N_blue, N_gr:rd).

    Blue loses at Gamma_blue + R_23 + R_25 and receives the R_15 return
    flux; the green-red pool is fed by R_23 and drains at
    Gamma_gr:rd + R_15.  Note the asymmetry: R_25 leaves the blue pool
    without entering the green-red balance here; feed effective rates
    (see :func:`hybrid_steady_state`) when both leak channels should
    transfer.
    """
    return np.array([
        [-gamma_blue - rates.r_23 - rates.r_25, rates.r_15],
        [rates.r_23, -gamma_grrd - rates.r_15],
    ])


def subsystem_steady_state(rates: PumpRates, gamma_blue: float, gamma_grrd: float,
                           r_load: float) -> SubsystemPopulations:
    """Closed-form stationary pool populations -A^-1 a.

    Returns R_load (Gamma_gr:rd + R15, R23) / D with
    D = Gamma_blue (Gamma_gr:rd + R15) + Gamma_gr:rd (R23 + R25) + R25 R15.
    """
    if r_load < 0.0:
        raise HybridModelError("r_load must be >= 0")
    denom = (gamma_blue * (gamma_grrd + rates.r_15)
             + gamma_grrd * (rates.r_23 + rates.r_25)
             + rates.r_25 * rates.r_15)
    if denom <= 0.0:
        raise SingularBalanceError(
            "pool balance denominator vanishes; no losses close the system")
    return SubsystemPopulations(
        n_blue=r_load * (gamma_grrd + rates.r_15) / denom,
        n_grrd=r_load * rates.r_23 / denom,
    )


def subsystem_evolve(rates: PumpRates, gamma_blue: float, gamma_grrd: float,
                     r_load: float, initial: SubsystemPopulations,
                     times: Sequence[float]) -> list[SubsystemPopulations]:
    """Exact two-pool evolution e^{At} N(0) + (I - e^{At}) N(inf).

    Solved by diagonalizing the 2x2 exchange matrix; a repeated
    eigenvalue falls back to the closed-form Jordan propagator (logged).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0.0) or np.any(np.diff(times) < 0.0):
        raise HybridModelError("times must be a sorted 1-D array of nonnegative values")
    a = subsystem_rate_matrix(rates, gamma_blue, gamma_grrd)
    if r_load == 0.0:
        n_inf = np.array([0.0, 0.0])
    else:
        stationary = subsystem_steady_state(rates, gamma_blue, gamma_grrd, r_load)
        n_inf = np.array([stationary.n_blue, stationary.n_grrd])

    x0 = np.array([initial.n_blue, initial.n_grrd]) - n_inf
    tr = a[0, 0] + a[1, 1]
    disc = tr * tr - 4.0 * (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    out = []
    if abs(disc) <= 1e-12 * max(tr * tr, 1.0):
        # repeated eigenvalue: e^{At} = e^{lt} (I + (A - lI) t)
        logger.info("subsystem_evolve: repeated eigenvalue, using Jordan form")
        lam = 0.5 * tr
        nilpotent = a - lam * np.eye(2)
        for t in times:
            xt = math.exp(lam * t) * (x0 + t * (nilpotent @ x0))
            out.append(SubsystemPopulations(*(xt + n_inf)))
    else:
        eigvals, vecs = np.linalg.eig(a)
        coeffs = np.linalg.solve(vecs, x0)
        for t in times:
            xt = (vecs @ (np.exp(eigvals * t) * coeffs)).real
            out.append(SubsystemPopulations(*(xt + n_inf)))
    return out


def assemble_populations(pops: SubsystemPopulations,
                         blue_fracs: Sequence[complex],
                         greenred: ReducedState) -> BlochState:
    """Scale the normalized fraction blocks to atom numbers, N_kl = N_pool rho_kl.

    ``blue_fracs`` is (rho11, rho22, rho12, rho21); the green-red block
    comes from the reduced state.  Both blocks must be separately
    normalized within 1e-6.
    """
    blue_fracs = np.asarray(blue_fracs, dtype=complex)
    if blue_fracs.shape != (4,):
        raise HybridModelError("blue_fracs must be (rho11, rho22, rho12, rho21)")
    blue_trace = float(blue_fracs[0].real + blue_fracs[1].real)
    if abs(blue_trace - 1.0) > 1e-6:
        raise HybridModelError(f"blue fractions sum to {blue_trace!r}, expected 1")
    if abs(greenred.trace - 1.0) > 1e-6:
        raise HybridModelError(f"green-red fractions sum to {greenred.trace!r}, expected 1")
    if pops.n_blue < 0.0 or pops.n_grrd < 0.0:
        raise HybridModelError("pool populations must be >= 0")
    arr = np.empty(12, dtype=complex)
    arr[0:4] = pops.n_blue * blue_fracs
    arr[4:12] = pops.n_grrd * greenred.components
    return BlochState(arr)


def balance_ratio(rho22: float, rho55: float, constants: SrConstants,
                  gamma_grrd: float) -> float:
    """Stationary pool ratio N_gr:rd / N_blue = Gamma_23 rho22 / (Gamma_gr:rd + Gamma_15 rho55).

    This is exactly the component ratio of :func:`subsystem_steady_state`.
    """
    denom = gamma_grrd + constants.gamma_15 * rho55
    if denom <= 0.0:
        raise SingularBalanceError("balance denominator must be positive")
    return constants.gamma_23 * rho22 / denom


def balance_bound(constants: SrConstants, gamma_grrd: float, rho55: float) -> float:
    """Upper bound of the pool ratio for any physical rho22 <= 1/2.

    1 / (2 Gamma_gr:rd/Gamma_23 + 2 Gamma_15 rho55 / Gamma_23); with
    rho55 = 0 it reduces to the ceiling Gamma_23 / (2 Gamma_gr:rd).
    """
    denom = 2.0 * (gamma_grrd + constants.gamma_15 * rho55) / constants.gamma_23
    if denom <= 0.0:
        raise SingularBalanceError("bound denominator must be positive")
    return 1.0 / denom


# ---------------------------------------------------------------------------
# composed hybrid model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HybridResult:
    """Composed hybrid solution: pools, fraction blocks and assembled state."""

    pops: SubsystemPopulations
    blue_fracs: tuple
    greenred: ReducedState
    rates: PumpRates
    state: BlochState


def _effective_pool_rates(params: SystemParams, rho11: float,
                          greenred: ReducedState, rates: PumpRates):
    """State-resolved effective rates for the two-pool equations.

    In the 12x12 model the blue trap loss acts on |1> only and the
    green-red loss on |3> and |5> only, and both leak channels
    2 -> 3 and 2 -> 5 deliver atoms to the green-red sector.  The pool
    reduction matches those fluxes with

        transfer  = R23 + R25,
        loss_blue = Gamma_blue rho11,
        loss_grrd = Gamma_gr:rd (rho33 + rho55),

    which keeps the hybrid equilibrium on top of the full solution.
    """
    eff = PumpRates(r_23=rates.r_23 + rates.r_25, r_25=0.0, r_15=rates.r_15)
    gb_eff = params.gamma_blue * rho11
    gg_eff = params.gamma_grrd * (greenred.rho33 + greenred.rho55)
    return eff, gb_eff, gg_eff


def hybrid_steady_state(params: SystemParams,
                        on_degenerate: str = "raise") -> HybridResult:
    """Equilibrium of the hybrid model, assembled to a 12-component state."""
    c = params.constants
    blue = blue_steady_fractions(params.s12, params.blue.delta, c.gamma_12)
    greenred = greenred_steady_state(build_reduced_liouvillian(params), on_degenerate)
    rates = pump_rates(float(blue[1].real), greenred.rho55, c)
    eff, gb_eff, gg_eff = _effective_pool_rates(params, float(blue[0].real),
                                                greenred, rates)
    pops = subsystem_steady_state(eff, gb_eff, gg_eff, params.r_load)
    state = assemble_populations(pops, blue, greenred)
    return HybridResult(pops=pops, blue_fracs=tuple(blue), greenred=greenred,
                        rates=rates, state=state)


def hybrid_evolve(params: SystemParams, initial: SubsystemPopulations,
                  times: Sequence[float],
                  on_degenerate: str = "raise") -> list[HybridResult]:
    """Hybrid time evolution from given pool populations.

    The internal fractions are frozen at their quasi-steady values (the
    fast sectors equilibrate long before the pools move), so only the
    2x2 pool exchange evolves.
    """
    c = params.constants
    blue = blue_steady_fractions(params.s12, params.blue.delta, c.gamma_12)
    greenred = greenred_steady_state(build_reduced_liouvillian(params), on_degenerate)
    rates = pump_rates(float(blue[1].real), greenred.rho55, c)
    eff, gb_eff, gg_eff = _effective_pool_rates(params, float(blue[0].real),
                                                greenred, rates)
    pools = subsystem_evolve(eff, gb_eff, gg_eff, params.r_load, initial, times)
    results = []
    for pop in pools:
        state = assemble_populations(pop, blue, greenred)
        results.append(HybridResult(pops=pop, blue_fracs=tuple(blue),
                                    greenred=greenred, rates=rates, state=state))
    return results
