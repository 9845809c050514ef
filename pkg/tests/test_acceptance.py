"""Acceptance suite.

One test per criterion, each printing a single PASS/FAIL line (run with
``pytest tests/test_acceptance.py -s`` to see them all).  Tolerances are
pinned here and nowhere else.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import make_params, random_params
from srmot import (BlochState, DriveParams, ExternalRates, MotBeam,
                   SystemParams, balance_bound, balance_ratio,
                   beam_intensity, blue_excited_fraction,
                   build_lindblad_liouvillian, build_liouvillian,
                   combined_rates, evolve, hybrid_steady_state, mot_force,
                   optimal_detuning, rabi_from_saturation,
                   saturation_intensity, steady_state, trap_depth)
from srmot.config import load_config
from srmot.sweeps import run_balance_sweep, run_fluorescence_map

TWO_PI = 2.0 * math.pi


def report(num: str, description: str, ok: bool) -> bool:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'}: {description}")
    return ok


def test_criterion_01_two_level_oracle(sr):
    """Decoupled blue sector against the analytic excited fraction."""
    closed = replace(sr, gamma_23=0.0, gamma_25=0.0)
    worst = 0.0
    for s12 in np.linspace(0.1, 30.0, 10):
        for d12 in np.linspace(-4.0 * sr.gamma_12, 0.0, 10):
            params = SystemParams(
                constants=closed,
                blue=DriveParams(omega=rabi_from_saturation(float(s12), sr.gamma_12),
                                 delta=float(d12)),
                gamma_blue=100.0, gamma_grrd=100.0, r_load=1e6)
            state = steady_state(build_liouvillian(params))
            frac = state["n22"].real / (state["n11"].real + state["n22"].real)
            ref = blue_excited_fraction(float(s12), float(d12), sr.gamma_12)
            worst = max(worst, abs(frac - ref) / ref)
    assert report("01", f"two-level steady state on 10x10 grid, worst rel "
                        f"{worst:.2e} <= 1e-6", worst <= 1e-6)


def test_criterion_02_liouvillian_oracle(sr):
    """Hand-coded generator equals the vectorized master equation."""
    rng = np.random.default_rng(20240)
    worst = 0.0
    for _ in range(100):
        params = random_params(sr, rng, gamma_blue=rng.uniform(0.0, 1e3),
                               gamma_grrd=rng.uniform(0.0, 1e4),
                               r_load=rng.uniform(0.0, 1e9))
        direct = build_liouvillian(params).matrix
        generic = build_lindblad_liouvillian(params).matrix
        worst = max(worst, float(np.max(np.abs(direct - generic))) / sr.gamma_12)
    assert report("02", f"generator constructions elementwise equal on 100 "
                        f"draws, worst {worst:.2e} <= 1e-12", worst <= 1e-12)


def test_criterion_03_hybrid_full_equivalence(sr):
    """Hybrid and full steady states agree within 1% over (s56, delta56)."""
    worst = 0.0
    for s56 in np.geomspace(2.0, 31.0, 5):
        for d56 in np.linspace(-2.0 * sr.gamma_56, 2.0 * sr.gamma_56, 5):
            params = make_params(sr, s56=float(s56), d56=float(d56))
            full = steady_state(build_liouvillian(params))
            hyb = hybrid_steady_state(params)
            for a, b in ((full.n_blue, hyb.pops.n_blue),
                         (full.n_grrd, hyb.pops.n_grrd),
                         (full["n22"].real, hyb.state["n22"].real),
                         (full["n44"].real, hyb.state["n44"].real)):
                worst = max(worst, abs(a - b) / abs(a))
    assert report("03", f"hybrid vs full pools and excited numbers on 5x5 "
                        f"grid, worst rel {worst:.2e} <= 0.01", worst <= 0.01)


@pytest.fixture(scope="module")
def fig_evolution(sr):
    params = make_params(sr)
    L = build_liouvillian(params)
    times = np.geomspace(1e-9, 10.0, 601)
    states = evolve(L, BlochState.from_populations(n11=1e6), times)
    return params, times, states, steady_state(L)


def test_criterion_04a_blue_relaxation(sr, fig_evolution):
    """Blue pair reaches its quasi-equilibrium within 100 ns."""
    params, times, states, _ = fig_evolution
    i = int(np.searchsorted(times, 1e-7))
    frac = states[i]["n22"].real / states[i].n_blue
    ref = blue_excited_fraction(1.3, params.blue.delta, sr.gamma_12)
    ok = abs(frac - ref) / ref <= 0.05
    assert report("04a", f"blue excited fraction at 100 ns within 5% of "
                         f"quasi-equilibrium (rel {abs(frac-ref)/ref:.2e})", ok)


def test_criterion_04b_pumping_window(fig_evolution):
    """Green-red pool fills between 0.1 ms and 10 ms."""
    _, times, states, _ = fig_evolution
    ng = np.array([s.n_grrd for s in states])
    crest = float(ng.max())
    t_half = float(times[int(np.argmax(ng >= 0.5 * crest))])
    ok = 1e-4 <= t_half <= 1e-2
    assert report("04b", f"green-red half-rise at {t_half:.3g} s inside "
                         f"[1e-4, 1e-2] s", ok)


def test_criterion_04c_load_loss_settling(fig_evolution):
    """Total atom number settles to 5% of final only after 0.1 s.

    The slowest rates of the operating point (pool losses 190/s and
    2500/s) put the actual settling near 10 ms, so this criterion is
    expected to fail; see the repository notes on unattainable targets.
    """
    _, times, states, final = fig_evolution
    total = np.array([s.total for s in states])
    rel = np.abs(total - final.total) / final.total
    outside = np.where(rel > 0.05)[0]
    t_settle = float(times[outside[-1] + 1]) if len(outside) else float(times[0])
    ok = t_settle > 0.1
    assert report("04c", f"total atom number settles (5%) at {t_settle:.3g} s, "
                         f"required > 0.1 s", ok)


def test_criterion_05_balance_bound(sr):
    """Pool-ratio bound holds on 1000 random draws."""
    rng = np.random.default_rng(5)
    violations = 0
    for _ in range(1000):
        rho22 = rng.uniform(0.0, 0.5)
        rho55 = rng.uniform(0.0, 1.0)
        gg = rng.uniform(1e-2, 1e5)
        if balance_ratio(rho22, rho55, sr, gg) > \
                balance_bound(sr, gg, rho55) * (1.0 + 1e-12):
            violations += 1
    assert report("05", f"balance bound violations {violations}/1000",
                  violations == 0)


def test_criterion_06_conservation_and_hermiticity(sr):
    """Closed system conserves population and conjugate structure."""
    rng = np.random.default_rng(6)
    times = np.geomspace(1e-9, 1.0, 25)
    worst_cons, worst_herm = 0.0, 0.0
    for _ in range(50):
        params = random_params(sr, rng, gamma_blue=0.0, gamma_grrd=0.0,
                               r_load=0.0)
        L = build_liouvillian(params)
        pops = rng.uniform(0.0, 1.0, 6)
        pops /= pops.sum()
        init = BlochState.from_populations(
            **dict(zip(("n11", "n22", "n55", "n66", "n33", "n44"), pops)))
        for state in evolve(L, init, times):
            worst_cons = max(worst_cons, abs(state.total - 1.0))
            for lo, hi in ((2, 3), (6, 7), (10, 11)):
                worst_herm = max(worst_herm, abs(
                    state.components[lo] - np.conj(state.components[hi])))
    ok = worst_cons <= 1e-12 and worst_herm <= 1e-9
    assert report("06", f"50 closed draws: conservation {worst_cons:.2e} <= "
                        f"1e-12, hermiticity {worst_herm:.2e} <= 1e-9", ok)


def test_criterion_07_potential_quadrature(sr):
    """Closed-form trap depth equals adaptive quadrature of the force."""
    beams = (MotBeam(gamma=sr.gamma_12, wavelength=sr.lambda_12, s=2.0,
                     delta=-2.0 * sr.gamma_12, w=6.0e-3),
             MotBeam(gamma=sr.gamma_34, wavelength=sr.lambda_34, s=6.6,
                     delta=-2.0 * sr.gamma_34, w=2.3e-3))
    worst = 0.0
    for beam in beams:
        for delta in np.linspace(-3.0 * beam.gamma, -0.2 * beam.gamma, 10):
            tweaked = beam.with_(delta=float(delta))
            for b in np.linspace(10.0, 280.0, 10):
                ref, _ = quad(lambda z: mot_force(0.0, z, tweaked, float(b)),
                              -beam.w, 0.0, limit=400, epsrel=1e-10,
                              epsabs=1e-14 * abs(trap_depth(tweaked, float(b))))
                worst = max(worst,
                            abs(trap_depth(tweaked, float(b)) - ref) / abs(ref))
    assert report("07", f"trap depth vs quadrature on 10x10 grids (both "
                        f"beams), worst rel {worst:.2e} <= 1e-6", worst <= 1e-6)


def test_criterion_08_optimal_detuning_slope(sr):
    """Large-gradient slope of the deepest-potential detuning."""
    beam = MotBeam(gamma=sr.gamma_34, wavelength=sr.lambda_34, s=4.0,
                   delta=-1.0, w=2.2e-3)
    b1, b2 = 2.0e4, 4.0e4  # deep in the linear regime
    slope = ((optimal_detuning(beam, b2) - optimal_detuning(beam, b1))
             / (b2 - b1)) / TWO_PI
    ok = abs(slope + 180e3) / 180e3 <= 0.10
    assert report("08", f"asymptotic slope {slope/1e3:.1f} kHz/(G/cm) within "
                        f"10% of -180", ok)


def _map_peak(config_name: str) -> float:
    cfg = load_config({"external": {"green_config": config_name}})
    table = run_fluorescence_map(cfg)
    n22 = np.array(table.column("n22_atoms"))
    return float(np.nanmax(n22))


def test_criterion_09_gain_factor():
    """Confining green beams raise the blue atom number ~10x."""
    gain = _map_peak("gmot") / _map_peak("grp")
    ok = 5.0 <= gain <= 20.0
    assert report("09", f"peak blue-number gain gmot/grp = {gain:.2f}, "
                        f"required 10 within factor 2", ok)


def test_criterion_10_balancing_directions(sr):
    """Monotone s56 balancing; even, resonance-extremal detuning scan."""
    cfg = load_config({"sweep": {"variable": "s56", "start": 0.0, "stop": 31.0,
                                 "count": 33, "scale": "linear"}})
    table = run_balance_sweep(cfg)
    ok = True
    for prefix in ("full", "hybrid"):
        ng = np.array(table.column(f"{prefix}_n_grrd_atoms"))
        nb = np.array(table.column(f"{prefix}_n_blue_atoms"))
        ok &= bool(np.all(np.diff(ng) >= -1e-9 * ng.max()))
        ok &= bool(np.all(np.diff(nb) <= 1e-9 * nb.max()))
    cfg2 = load_config({"sweep": {"variable": "delta56", "start": -12e6,
                                  "stop": 12e6, "count": 25, "scale": "linear"}})
    table2 = run_balance_sweep(cfg2)
    for prefix in ("full", "hybrid"):
        ng = np.array(table2.column(f"{prefix}_n_grrd_atoms"))
        nb = np.array(table2.column(f"{prefix}_n_blue_atoms"))
        ok &= bool(np.allclose(ng, ng[::-1], rtol=1e-9))
        ok &= bool(np.allclose(nb, nb[::-1], rtol=1e-9))
        ok &= int(np.argmax(ng)) == 12 and int(np.argmin(nb)) == 12
    assert report("10", "s56 sweep monotone both models; delta56 scan even "
                        "and extremal at resonance", ok)


def test_criterion_11_saturation_arithmetic(sr):
    """Beam table rows and saturation intensities."""
    # quoted saturation intensities (mW/cm^2-scale calibration values)
    i_sat_461, i_sat_496 = 380.0, 91.0  # W/m^2
    i_sat_688 = saturation_intensity(sr.gamma_56, sr.lambda_56)
    rows = [
        (40e-3, 2.9e-3, i_sat_461, 8.0),
        (2.8e-3, 2.2e-3, i_sat_496, 4.0),
        (8.5e-3, 2.2e-3, i_sat_496, 12.3),
        (44e-3, 6.0e-3, i_sat_461, 2.0),
        (5.0e-3, 2.3e-3, i_sat_496, 6.6),
        (2.6e-3, 1.8e-3, i_sat_688, 31.0),
    ]
    worst_s = max(abs(beam_intensity(p, w) / isat - s) / s
                  for p, w, isat, s in rows)
    sat_checks = (
        (saturation_intensity(sr.gamma_12, sr.lambda_12), 380.0),
        (saturation_intensity(sr.gamma_34, sr.lambda_34), 91.0),
        (saturation_intensity(sr.gamma_15, sr.lambda_15), 0.028),
    )
    worst_isat = max(abs(got - ref) / ref for got, ref in sat_checks)
    ok = worst_s <= 0.05 and worst_isat <= 0.15
    assert report("11", f"table rows worst rel {worst_s:.3f} <= 0.05; "
                        f"intensities worst rel {worst_isat:.3f} <= 0.15", ok)


def test_criterion_12_decay_rate_regression(sr):
    """Cascade arithmetic reproduces the stored effective rates."""
    combined = combined_rates(sr.cascade)
    targets = {"gamma_25": TWO_PI * 159.0, "gamma_23": TWO_PI * 90.0,
               "gamma_45": TWO_PI * 26.3e3, "gamma_15": TWO_PI * 7.4e3}
    worst = max(abs(combined[k] - v) / v for k, v in targets.items())
    stored = max(abs(combined[k] - getattr(sr, k)) / getattr(sr, k)
                 for k in targets)
    ok = worst <= 1e-12 and stored <= 1e-12
    assert report("12", f"combined rates match pinned values, worst rel "
                        f"{max(worst, stored):.2e} <= 1e-12", ok)


def test_criterion_13_map_determinism():
    """Identical map payloads for 1 and 8 worker processes."""
    cfg = load_config()
    serial = run_fluorescence_map(cfg, jobs=1)
    parallel = run_fluorescence_map(cfg, jobs=8)
    ok = serial.csv_payload() == parallel.csv_payload()
    meta_s = {k: v for k, v in serial.metadata.items() if k != "created_utc"}
    meta_p = {k: v for k, v in parallel.metadata.items() if k != "created_utc"}
    ok = ok and meta_s == meta_p
    assert report("13", "51x51 map byte-identical for --jobs 1 vs --jobs 8", ok)
