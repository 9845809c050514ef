"""Open Bloch equations of the three incoherently coupled two-level pairs.

The six-level scheme splits into a blue (|1>,|2>), a red (|5>,|6>) and a
green (|3>,|4>) driven pair; the pairs exchange population only through
spontaneous decay, so the density matrix is block diagonal and the full
state reduces to 12 components: six populations and the three optical
coherence pairs.  The dynamics is linear,

    d/dt N = B N + b,

with a 12x12 complex generator B and a loading inhomogeneity b.  Losses
to the environment enter as rates Gamma_blue (from |1>) and Gamma_gr:rd
(from |3> and |5>); they are left off the rows dominated by fast
internal decay.

Two independent constructions of B are provided: a direct hand-coded
matrix (:func:`build_liouvillian`) and a generic Lindblad-vectorization
route (:func:`build_lindblad_liouvillian`).  They must agree elementwise
and serve as each other's oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .atomic import SrConstants, saturation_from_rabi

logger = logging.getLogger(__name__)

#: Component ordering of the state vector: blue pair, red pair, green pair.
STATE_LABELS = (
    "n11", "n22", "n12", "n21",
    "n55", "n66", "n56", "n65",
    "n33", "n44", "n34", "n43",
)
IDX = {label: i for i, label in enumerate(STATE_LABELS)}
POPULATION_LABELS = ("n11", "n22", "n55", "n66", "n33", "n44")
POPULATION_INDICES = tuple(IDX[l] for l in POPULATION_LABELS)
#: Conjugate coherence pairs (lower, upper) in the 12-component vector.
COHERENCE_PAIRS = ((IDX["n12"], IDX["n21"]),
                   (IDX["n56"], IDX["n65"]),
                   (IDX["n34"], IDX["n43"]))
BLUE_POPULATIONS = (IDX["n11"], IDX["n22"])
GREENRED_POPULATIONS = (IDX["n55"], IDX["n66"], IDX["n33"], IDX["n44"])

#: Density-matrix coordinates (row, col) of each component in the 6x6 picture.
_MATRIX_POSITIONS = (
    (0, 0), (1, 1), (0, 1), (1, 0),
    (4, 4), (5, 5), (4, 5), (5, 4),
    (2, 2), (3, 3), (2, 3), (3, 2),
)


class LiouvillianError(ValueError):
    """Raised for non-finite parameters or singular solves."""


@dataclass(frozen=True)
class DriveParams:
    """One driven transition: angular Rabi frequency and detuning (rad/s).

    Negative detuning means the laser is red of resonance.
    """

    omega: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.omega) or self.omega < 0.0:
            raise LiouvillianError(f"omega must be finite and >= 0, got {self.omega!r}")
        if not math.isfinite(self.delta):
            raise LiouvillianError(f"delta must be finite, got {self.delta!r}")


@dataclass(frozen=True)
class SystemParams:
    """Full parameter set: level constants, three drives, loading and losses.

    ``gamma_blue`` and ``gamma_grrd`` are trap-loss rates (1/s) out of the
    blue and green-red subsystems; ``r_load`` is the loading rate
    (atoms/s) into the ground state from the background reservoir.
    """

    constants: SrConstants
    blue: DriveParams = field(default_factory=DriveParams)
    green: DriveParams = field(default_factory=DriveParams)
    red: DriveParams = field(default_factory=DriveParams)
    gamma_blue: float = 0.0
    gamma_grrd: float = 0.0
    r_load: float = 0.0

    def __post_init__(self):
        for name in ("gamma_blue", "gamma_grrd", "r_load"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise LiouvillianError(f"{name} must be finite and >= 0, got {value!r}")

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def s12(self) -> float:
        return saturation_from_rabi(self.blue.omega, self.constants.gamma_12)

    @property
    def s34(self) -> float:
        return saturation_from_rabi(self.green.omega, self.constants.gamma_34)

    @property
    def s56(self) -> float:
        return saturation_from_rabi(self.red.omega, self.constants.gamma_56)


@dataclass(frozen=True)
class BlochState:
    """12-component state vector (populations and optical coherences).

    Components may be normalized fractions or scaled to atom numbers;
    the dynamics is linear so both live in the same space.
    """

    components: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=complex)
        if arr.shape != (12,):
            raise LiouvillianError(f"state needs 12 components, got shape {arr.shape}")
        object.__setattr__(self, "components", arr)

    def __getitem__(self, label: str) -> complex:
        return self.components[IDX[label]]

    @property
    def populations(self) -> np.ndarray:
        """Real parts of the six populations, ordered as POPULATION_LABELS."""
        return self.components[list(POPULATION_INDICES)].real

    @property
    def total(self) -> float:
        return float(self.populations.sum())

    @property
    def n_blue(self) -> float:
        return float(self.components[list(BLUE_POPULATIONS)].real.sum())

    @property
    def n_grrd(self) -> float:
        return float(self.components[list(GREENRED_POPULATIONS)].real.sum())

    def validate(self, rtol: float = 1e-9) -> "BlochState":
        """Check population realness/nonnegativity and conjugate pairing."""
        scale = float(np.linalg.norm(self.components))
        tol = rtol * max(scale, 1.0e-300)
        for i in POPULATION_INDICES:
            value = self.components[i]
            if abs(value.imag) > tol or value.real < -tol:
                raise LiouvillianError(
                    f"population {STATE_LABELS[i]} = {value!r} violates "
                    f"realness/nonnegativity at tolerance {tol:g}")
        for lo, hi in COHERENCE_PAIRS:
            if abs(self.components[lo] - np.conj(self.components[hi])) > tol:
                raise LiouvillianError(
                    f"coherences {STATE_LABELS[lo]}/{STATE_LABELS[hi]} are not "
                    f"conjugate within {tol:g}")
        return self

    def clamped(self) -> "BlochState":
        """Copy with tiny negative population roundoff clamped to zero.

        Reporting-layer convenience only; solvers never clamp.
        """
        arr = self.components.copy()
        for i in POPULATION_INDICES:
            if arr[i].real < 0.0:
                arr[i] = 0.0 + arr[i].imag * 1j
        return BlochState(arr)

    @classmethod
    def zero(cls) -> "BlochState":
        return cls(np.zeros(12, dtype=complex))

    @classmethod
    def from_populations(cls, **kwargs) -> "BlochState":
        """Build a state from labelled components, e.g. ``n11=1e6``."""
        arr = np.zeros(12, dtype=complex)
        for label, value in kwargs.items():
            if label not in IDX:
                raise LiouvillianError(f"unknown state label {label!r}")
            arr[IDX[label]] = value
        return cls(arr)


@dataclass(frozen=True)
class Liouvillian:
    """Generator matrix B plus the loading inhomogeneity b."""

    matrix: np.ndarray
    inhomogeneity: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        b = np.asarray(self.inhomogeneity, dtype=complex)
        if m.shape != (12, 12) or b.shape != (12,):
            raise LiouvillianError("Liouvillian needs a 12x12 matrix and a 12-vector")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "inhomogeneity", b)


def _lambda_12(c: SrConstants, delta: float) -> complex:
    return 1j * delta + 0.5 * (c.gamma_12 + c.gamma_25 + c.gamma_23)


def _lambda_34(c: SrConstants, delta: float) -> complex:
    return 1j * delta + 0.5 * (c.gamma_34 + c.gamma_45)


def _lambda_56(c: SrConstants, delta: float) -> complex:
    return 1j * delta + 0.5 * (c.gamma_56 + c.gamma_36 + c.gamma_15)


def build_liouvillian(params: SystemParams) -> Liouvillian:
    """Hand-coded 12x12 generator of the open Bloch equations.

    Loss rates sit on the n11 row (Gamma_blue) and the n55/n33 rows
    (Gamma_gr:rd) only; on all other rows they are negligible against
    the internal decay rates and are dropped.  Coherences decay with
    Lambda_ij = i Delta_ij + half the total depopulation rate of the
    pair.
    """
    c = params.constants
    o12, d12 = params.blue.omega, params.blue.delta
    o34, d34 = params.green.omega, params.green.delta
    o56, d56 = params.red.omega, params.red.delta
    for value in (o12, d12, o34, d34, o56, d56):
        if not math.isfinite(value):
            raise LiouvillianError("drive parameters must be finite")

    B = np.zeros((12, 12), dtype=complex)
    i2 = 0.5j

    # blue pair |1>,|2>
    B[IDX["n11"], IDX["n11"]] = -params.gamma_blue
    B[IDX["n11"], IDX["n22"]] = c.gamma_12
    B[IDX["n11"], IDX["n12"]] = i2 * o12
    B[IDX["n11"], IDX["n21"]] = -i2 * o12
    B[IDX["n11"], IDX["n55"]] = c.gamma_15

    B[IDX["n22"], IDX["n22"]] = -(c.gamma_12 + c.gamma_23 + c.gamma_25)
    B[IDX["n22"], IDX["n12"]] = -i2 * o12
    B[IDX["n22"], IDX["n21"]] = i2 * o12

    B[IDX["n12"], IDX["n11"]] = i2 * o12
    B[IDX["n12"], IDX["n22"]] = -i2 * o12
    B[IDX["n12"], IDX["n12"]] = -_lambda_12(c, d12)

    B[IDX["n21"], IDX["n11"]] = -i2 * o12
    B[IDX["n21"], IDX["n22"]] = i2 * o12
    B[IDX["n21"], IDX["n21"]] = -np.conj(_lambda_12(c, d12))

    # red pair |5>,|6>
    B[IDX["n55"], IDX["n22"]] = c.gamma_25
    B[IDX["n55"], IDX["n55"]] = -(c.gamma_15 + params.gamma_grrd)
    B[IDX["n55"], IDX["n66"]] = c.gamma_56
    B[IDX["n55"], IDX["n56"]] = i2 * o56
    B[IDX["n55"], IDX["n65"]] = -i2 * o56
    B[IDX["n55"], IDX["n44"]] = c.gamma_45

    B[IDX["n66"], IDX["n66"]] = -(c.gamma_56 + c.gamma_36)
    B[IDX["n66"], IDX["n56"]] = -i2 * o56
    B[IDX["n66"], IDX["n65"]] = i2 * o56

    B[IDX["n56"], IDX["n55"]] = i2 * o56
    B[IDX["n56"], IDX["n66"]] = -i2 * o56
    B[IDX["n56"], IDX["n56"]] = -_lambda_56(c, d56)

    B[IDX["n65"], IDX["n55"]] = -i2 * o56
    B[IDX["n65"], IDX["n66"]] = i2 * o56
    B[IDX["n65"], IDX["n65"]] = -np.conj(_lambda_56(c, d56))

    # green pair |3>,|4>
    B[IDX["n33"], IDX["n22"]] = c.gamma_23
    B[IDX["n33"], IDX["n66"]] = c.gamma_36
    B[IDX["n33"], IDX["n33"]] = -params.gamma_grrd
    B[IDX["n33"], IDX["n44"]] = c.gamma_34
    B[IDX["n33"], IDX["n34"]] = i2 * o34
    B[IDX["n33"], IDX["n43"]] = -i2 * o34

    B[IDX["n44"], IDX["n44"]] = -(c.gamma_34 + c.gamma_45)
    B[IDX["n44"], IDX["n34"]] = -i2 * o34
    B[IDX["n44"], IDX["n43"]] = i2 * o34

    B[IDX["n34"], IDX["n33"]] = i2 * o34
    B[IDX["n34"], IDX["n44"]] = -i2 * o34
    B[IDX["n34"], IDX["n34"]] = -_lambda_34(c, d34)

    B[IDX["n43"], IDX["n33"]] = -i2 * o34
    B[IDX["n43"], IDX["n44"]] = i2 * o34
    B[IDX["n43"], IDX["n43"]] = -np.conj(_lambda_34(c, d34))

    b = np.zeros(12, dtype=complex)
    b[IDX["n11"]] = params.r_load
    return Liouvillian(B, b)


# ---------------------------------------------------------------------------
# generic construction: vectorized master equation
# ---------------------------------------------------------------------------

#: Spontaneous decay channels (upper, lower, rate attribute), 1-based labels.
DECAY_CHANNELS = (
    (2, 1, "gamma_12"),
    (2, 3, "gamma_23"),
    (2, 5, "gamma_25"),
    (4, 3, "gamma_34"),
    (4, 5, "gamma_45"),
    (6, 5, "gamma_56"),
    (6, 3, "gamma_36"),
    (5, 1, "gamma_15"),
)


def build_lindblad_liouvillian(params: SystemParams) -> Liouvillian:
    """Generator assembled from the vectorized master equation.

    The coherent part is i[N, H] with one 2x2 Hamiltonian
    [[0, Omega/2], [Omega/2, -Delta]] per driven pair; each decay channel
    j -> i contributes a Lindblad dissipator with jump operator |i><j|.
    Everything is vectorized over the full 6x6 density matrix
    (column stacking) and then projected onto the 12 retained
    components.  Trap losses are added afterwards as population decay of
    |1>, |3> and |5> only, the same placement the hand-coded matrix
    uses, so the two constructions agree elementwise.
    """
    c = params.constants
    n = 6
    eye = np.eye(n, dtype=complex)

    H = np.zeros((n, n), dtype=complex)
    for (i, j), drive in (((0, 1), params.blue),
                          ((2, 3), params.green),
                          ((4, 5), params.red)):
        if not (math.isfinite(drive.omega) and math.isfinite(drive.delta)):
            raise LiouvillianError("drive parameters must be finite")
        H[i, j] = H[j, i] = 0.5 * drive.omega
        H[j, j] = -drive.delta

    # vec(N H) = (H^T (x) I) vec(N); vec(H N) = (I (x) H) vec(N)
    L = 1j * (np.kron(H.T, eye) - np.kron(eye, H))

    for upper, lower, attr in DECAY_CHANNELS:
        rate = getattr(c, attr)
        sigma = np.zeros((n, n), dtype=complex)
        sigma[lower - 1, upper - 1] = 1.0
        proj = sigma.conj().T @ sigma  # |upper><upper|
        L += rate * (np.kron(sigma.conj(), sigma)
                     - 0.5 * (np.kron(eye, proj) + np.kron(proj.T, eye)))

    # project the 36-dim generator onto the retained block components
    flat = [row + n * col for row, col in _MATRIX_POSITIONS]
    B = L[np.ix_(flat, flat)]

    # trap losses on the population rows only (see build_liouvillian)
    B[IDX["n11"], IDX["n11"]] -= params.gamma_blue
    B[IDX["n33"], IDX["n33"]] -= params.gamma_grrd
    B[IDX["n55"], IDX["n55"]] -= params.gamma_grrd

    b = np.zeros(12, dtype=complex)
    b[IDX["n11"]] = params.r_load
    return Liouvillian(B, b)


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------

def _check_invertible(B: np.ndarray) -> None:
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= 1e-13 * sv[0]:
        raise LiouvillianError(
            "generator is singular or near-singular; with zero loss rates the "
            "steady state is degenerate (population only enters and never leaves)")


def steady_state(liouvillian: Liouvillian, validate: bool = True) -> BlochState:
    """Stationary solution N(inf) = -B^-1 b of the loaded open system.

    Requires invertible B, guaranteed for positive loss rates.  One step
    of iterative refinement with an extended-precision residual brings
    ||B N + b|| down to 1e-9 ||b|| or to the double-precision
    representability floor ~||B|| ulp(||N||), whichever is larger (the
    floor matters only for loss rates many orders below the internal
    rates).
    """
    B, b = liouvillian.matrix, liouvillian.inhomogeneity
    _check_invertible(B)
    n_inf = np.linalg.solve(B, -b)
    B_ld = B.astype(np.clongdouble)
    b_ld = b.astype(np.clongdouble)
    resid_ld = B_ld @ n_inf.astype(np.clongdouble) + b_ld
    n_inf = n_inf - np.linalg.solve(B, resid_ld.astype(complex))

    residual = float(np.linalg.norm((B_ld @ n_inf.astype(np.clongdouble) + b_ld).astype(complex)))
    scale = float(np.linalg.norm(b))
    floor = 64.0 * np.finfo(float).eps * float(np.linalg.norm(B)) * float(np.linalg.norm(n_inf))
    if scale > 0.0 and residual > max(1e-9 * scale, floor):
        raise LiouvillianError(f"steady-state residual {residual:g} exceeds 1e-9*||b||")
    state = BlochState(n_inf)
    if validate:
        state.validate(rtol=1e-7)
    return state


def _enforce_conservation_structure(B: np.ndarray, eigvals: np.ndarray,
                                    vecs: np.ndarray, norm_b: float) -> None:
    """Restore exact population conservation in the eigenbasis, in place.

    For a closed generator the population-sum functional u is a left
    null vector, so u must be orthogonal to every eigenvector with a
    nonzero eigenvalue.  The eigensolver only delivers that to
    eps*||B||/|lambda|, which lets the total population drift at the
    1e-10 level for slow modes; projecting the non-null eigenvectors
    through the null vector restores the structure to rounding level.
    """
    u = np.zeros(12)
    u[list(POPULATION_INDICES)] = 1.0
    if float(np.max(np.abs(u @ B))) > 1e-8 * max(norm_b, 1.0):
        return  # not a conserving generator (losses present)
    null = np.where(eigvals == 0.0)[0]
    if len(null) != 1:
        return
    v0 = vecs[:, null[0]]
    uv0 = u @ v0
    if abs(uv0) < 1e-12:
        return
    for k in range(vecs.shape[1]):
        if k != null[0]:
            vecs[:, k] -= ((u @ vecs[:, k]) / uv0) * v0


def evolve(liouvillian: Liouvillian, initial: BlochState,
           times: Sequence[float], method: str = "auto") -> list[BlochState]:
    """Propagate N(t) = e^{Bt} N(0) + (I - e^{Bt}) N(inf) at the given times.

    Exact for any t: the propagator comes from an eigendecomposition of
    the 12x12 generator, with a scaling-and-squaring matrix exponential
    as fallback when the spectrum is too close to defective (the choice
    is logged).  Without loading (b = 0) the generator may be singular
    and the homogeneous propagation is used directly.

    Parameters
    ----------
    method : {"auto", "eig", "expm"}
        Force a propagation method, mostly for testing.
    """
    B, b = liouvillian.matrix, liouvillian.inhomogeneity
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0.0) or np.any(np.diff(times) < 0.0):
        raise LiouvillianError("times must be a sorted 1-D array of nonnegative values")

    if np.linalg.norm(b) == 0.0:
        n_inf = np.zeros(12, dtype=complex)
    else:
        n_inf = steady_state(liouvillian, validate=False).components
    x0 = initial.components - n_inf

    use_eig = method in ("auto", "eig")
    if use_eig:
        norm_b = float(np.linalg.norm(B))
        eigvals, vecs = np.linalg.eig(B)
        # a generator's zero eigenvalue is structural; snap the numerical
        # remnant to exactly zero so it cannot exponentiate over long times
        eigvals = np.where(np.abs(eigvals) <= 1e-12 * max(norm_b, 1.0), 0.0, eigvals)
        _enforce_conservation_structure(B, eigvals, vecs, norm_b)
        try:
            coeffs = np.linalg.solve(vecs, x0)
            recon = float(np.linalg.norm(vecs * eigvals @ np.linalg.inv(vecs) - B))
        except np.linalg.LinAlgError:
            recon = np.inf
        if recon > 1e-8 * max(norm_b, 1.0):
            if method == "eig":
                raise LiouvillianError(
                    f"eigendecomposition too inaccurate (residual {recon:g}); "
                    "generator is near-defective")
            use_eig = False
            logger.info("evolve: eigendecomposition near-defective "
                        "(residual %.3g), falling back to expm", recon)

    states = []
    if use_eig:
        logger.debug("evolve: using eigendecomposition")
        for t in times:
            xt = vecs @ (np.exp(eigvals * t) * coeffs)
            states.append(BlochState(xt + n_inf))
    else:
        logger.debug("evolve: using scaling-and-squaring exponential")
        for t in times:
            xt = expm(B * t) @ x0
            states.append(BlochState(xt + n_inf))
    return states


def fluorescence(state: BlochState, constants: SrConstants,
                 alpha_blue: float = 1.0, alpha_green: float = 1.0) -> tuple[float, float]:
    """Detected photon rates (F_blue, F_green) of the two MOT colors.

    F_blue = alpha_blue Gamma_12 N22 and F_green = alpha_green Gamma_34
    N44; the calibration factors bundle collection solid angle and
    detector efficiency.
    """
    if alpha_blue < 0.0 or alpha_green < 0.0:
        raise LiouvillianError("calibration factors must be >= 0")
    n22 = float(state["n22"].real)
    n44 = float(state["n44"].real)
    if min(n22, n44) < -1e-9 * max(1.0, float(np.linalg.norm(state.components))):
        raise LiouvillianError("excited-state populations must be nonnegative")
    return (alpha_blue * constants.gamma_12 * n22,
            alpha_green * constants.gamma_34 * n44)
