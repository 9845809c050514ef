import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import make_params
from srmot import (CONSTANTS, ExternalModelError, ExternalRates, MotBeam,
                   beam_forces, fluorescence_map, greenred_loss_rate,
                   loading_rate, mot_force, mot_potential, optimal_detuning,
                   optimal_gradient, trap_depth)

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def blue_beam(sr):
    # trapping-potential reference parameters of the two-beam analysis
    return MotBeam(gamma=sr.gamma_12, wavelength=sr.lambda_12, s=2.0,
                   delta=-2.0 * sr.gamma_12, w=6.0e-3)


@pytest.fixture(scope="module")
def green_beam(sr):
    return MotBeam(gamma=sr.gamma_34, wavelength=sr.lambda_34, s=6.6,
                   delta=-2.0 * sr.gamma_34, w=2.3e-3)


def quad_depth(beam, b_grad):
    """Independent oracle: integrate the resting force from -w to 0."""
    value, err = quad(lambda z: mot_force(0.0, z, beam, b_grad),
                      -beam.w, 0.0, limit=400, epsabs=1e-40, epsrel=1e-11)
    return value


class TestMotForce:
    def test_zero_at_center(self, blue_beam):
        assert mot_force(0.0, 0.0, blue_beam, 50.0) == 0.0

    def test_zero_outside_beam(self, blue_beam):
        w = blue_beam.w
        assert mot_force(0.0, 1.01 * w, blue_beam, 50.0) == 0.0
        assert mot_force(0.0, -1.01 * w, blue_beam, 50.0) == 0.0
        # inclusive at the edge
        assert mot_force(0.0, w, blue_beam, 50.0) != 0.0

    def test_odd_in_position(self, blue_beam):
        for z in np.linspace(0.0, blue_beam.w, 20):
            assert mot_force(0.0, -z, blue_beam, 50.0) == pytest.approx(
                -mot_force(0.0, z, blue_beam, 50.0), rel=1e-9, abs=1e-40)

    def test_saturated_single_beam_limit(self, sr):
        beam = MotBeam(gamma=sr.gamma_12, wavelength=sr.lambda_12, s=1e9,
                       delta=-2.0 * sr.gamma_12, w=6.0e-3)
        f_plus, f_minus = beam_forces(0.0, 0.0, beam, 50.0)
        cap = CONSTANTS.hbar * beam.k * beam.gamma / 2.0
        assert f_plus == pytest.approx(cap, rel=1e-6)
        assert f_minus == pytest.approx(-cap, rel=1e-6)

    def test_restoring_for_red_detuning(self, blue_beam):
        assert mot_force(0.0, 2e-3, blue_beam, 50.0) < 0.0
        assert mot_force(0.0, -2e-3, blue_beam, 50.0) > 0.0


class TestMotPotential:
    def test_zero_below_lower_edge(self, blue_beam):
        assert mot_potential(-1.5 * blue_beam.w, blue_beam, 50.0) == 0.0
        assert mot_potential(-blue_beam.w, blue_beam, 50.0) == pytest.approx(0.0, abs=1e-40)

    def test_zero_beyond_upper_edge(self, blue_beam):
        assert mot_potential(1.5 * blue_beam.w, blue_beam, 50.0) == \
            pytest.approx(0.0, abs=1e-40)

    def test_even_in_position(self, blue_beam, green_beam):
        for beam in (blue_beam, green_beam):
            for z in np.linspace(0.0, beam.w, 15):
                assert mot_potential(-z, beam, 60.0) == pytest.approx(
                    mot_potential(z, beam, 60.0), rel=1e-9, abs=1e-40)

    def test_matches_quadrature_along_z(self, green_beam):
        b_grad = 80.0
        scale = abs(trap_depth(green_beam, b_grad))
        for z in np.linspace(-0.9 * green_beam.w, green_beam.w, 9):
            ref, _ = quad(lambda zz: mot_force(0.0, zz, green_beam, b_grad),
                          -green_beam.w, z, limit=400, epsabs=1e-12 * scale,
                          epsrel=1e-10)
            assert mot_potential(z, green_beam, b_grad) == pytest.approx(
                ref, rel=1e-6, abs=1e-9 * scale)

    def test_zero_gradient_branch(self, blue_beam):
        # counterpropagating beams balance exactly without a field gradient
        assert mot_potential(1e-3, blue_beam, 0.0) == 0.0


class TestTrapDepth:
    def test_equals_potential_at_center(self, blue_beam, green_beam):
        for beam in (blue_beam, green_beam):
            for b in (20.0, 64.0, 150.0):
                assert trap_depth(beam, b) == pytest.approx(
                    mot_potential(0.0, beam, b), rel=1e-12)

    def test_positive_in_trapping_regime(self, blue_beam, green_beam):
        assert trap_depth(blue_beam, 64.0) > 0.0
        assert trap_depth(green_beam, 64.0) > 0.0

    def test_quadrature_oracle_grid(self, blue_beam, green_beam):
        """Closed form against adaptive quadrature over a (Delta, B') grid."""
        for beam in (blue_beam, green_beam):
            for delta in np.linspace(-3.0 * beam.gamma, -0.3 * beam.gamma, 4):
                tweaked = beam.with_(delta=delta)
                for b in np.linspace(10.0, 250.0, 4):
                    assert trap_depth(tweaked, b) == pytest.approx(
                        quad_depth(tweaked, b), rel=1e-6)

    def test_vanishes_at_large_gradient(self, green_beam):
        d64 = trap_depth(green_beam, 64.0)
        assert trap_depth(green_beam, 1e6) < 1e-3 * d64
        grads = np.geomspace(300.0, 1e6, 12)
        depths = [trap_depth(green_beam, b) for b in grads]
        assert np.all(np.diff(depths) < 0.0)

    def test_requires_positive_gradient(self, blue_beam):
        with pytest.raises(ExternalModelError):
            trap_depth(blue_beam, 0.0)
        with pytest.raises(ExternalModelError):
            trap_depth(blue_beam, -10.0)


class TestOptimalDetuning:
    def test_zero_gradient_zero_saturation(self, sr):
        beam = MotBeam(gamma=sr.gamma_34, wavelength=sr.lambda_34, s=0.0,
                       delta=-1.0, w=2.3e-3)
        assert optimal_detuning(beam, 0.0) == pytest.approx(
            -sr.gamma_34 / math.sqrt(12.0), rel=1e-12)

    def test_asymptotic_slope(self, sr):
        """-180 kHz per G/cm for a 2.2 mm green beam at large gradients."""
        beam = MotBeam(gamma=sr.gamma_34, wavelength=sr.lambda_34, s=4.0,
                       delta=-1.0, w=2.2e-3)
        b1, b2 = 5000.0, 10000.0
        slope_hz = ((optimal_detuning(beam, b2) - optimal_detuning(beam, b1))
                    / (b2 - b1)) / TWO_PI
        assert slope_hz == pytest.approx(-180e3, rel=0.10)
        assert slope_hz == pytest.approx(-CONSTANTS.mu_b * beam.w * 100.0
                                         / math.sqrt(3.0) / TWO_PI, rel=1e-4)

    def test_monotone_in_gradient(self, green_beam):
        grads = np.linspace(0.0, 500.0, 40)
        values = [optimal_detuning(green_beam, b) for b in grads]
        assert np.all(np.diff(values) < 0.0)

    def test_maximizes_depth(self, blue_beam, green_beam):
        """argmax over detuning of the depth sits at the closed form."""
        for beam in (blue_beam, green_beam):
            for b in (40.0, 120.0):
                best = optimal_detuning(beam, b)
                deltas = best * np.linspace(0.7, 1.3, 241)
                depths = [trap_depth(beam.with_(delta=d), b) for d in deltas]
                assert deltas[int(np.argmax(depths))] == pytest.approx(
                    best, rel=5e-3)


class TestOptimalGradient:
    def test_zero_detuning_rejected(self, sr):
        beam = MotBeam(gamma=sr.gamma_12, wavelength=sr.lambda_12, s=2.0,
                       delta=0.0, w=2.9e-3)
        with pytest.raises(ExternalModelError):
            optimal_gradient(beam)

    def test_inverse_in_beam_radius(self, blue_beam):
        halved = blue_beam.with_(w=blue_beam.w / 2.0)
        assert optimal_gradient(halved) == pytest.approx(
            2.0 * optimal_gradient(blue_beam), rel=1e-12)

    def test_reference_value(self, sr):
        beam = MotBeam(gamma=sr.gamma_12, wavelength=sr.lambda_12, s=2.0,
                       delta=-2.0 * sr.gamma_12, w=2.9e-3)
        assert optimal_gradient(beam) == pytest.approx(256.0, rel=1e-3)

    def test_consistent_with_detuning_formula(self, green_beam):
        """At B'_m the asymptotic optimal detuning returns the beam's own."""
        b_m = optimal_gradient(green_beam)
        asym = -green_beam.w * green_beam.mu * b_m * 100.0 / math.sqrt(3.0)
        assert asym == pytest.approx(green_beam.delta, rel=1e-12)


class TestLoadingRate:
    def test_peak_at_optimal_gradient(self, sr):
        beam = MotBeam(gamma=sr.gamma_12, wavelength=sr.lambda_12, s=1.3,
                       delta=-0.5 * sr.gamma_12, w=2.9e-3)
        rates = ExternalRates.defaults("gmot")
        center = optimal_gradient(beam)
        assert loading_rate(center, beam, rates) == rates.r_load0
        assert loading_rate(center + rates.db_blue, beam, rates) == \
            pytest.approx(rates.r_load0 / math.e, rel=1e-12)
        grads = np.linspace(center - 150, center + 150, 81)
        values = [loading_rate(b, beam, rates) for b in grads]
        assert grads[int(np.argmax(values))] == pytest.approx(center, abs=4.0)

    def test_default_width(self):
        assert ExternalRates.defaults("gmot").db_blue == 100.0


class TestGreenRedLossRate:
    def test_floor_at_matched_gradient(self, sr, green_beam):
        rates = ExternalRates.defaults("gmot")
        delta34 = -1.5 * sr.gamma_34
        center = -math.sqrt(3.0) * delta34 / (green_beam.mu * green_beam.w) / 100.0
        assert greenred_loss_rate(delta34, center, green_beam, rates) == \
            pytest.approx(rates.gamma_free, rel=1e-12)

    def test_saturates_far_away(self, sr, green_beam):
        rates = ExternalRates.defaults("grp")
        got = greenred_loss_rate(0.0, 1e4, green_beam, rates)
        assert got == pytest.approx(rates.gamma_free + rates.gamma_trap, rel=1e-9)

    def test_default_parameters(self):
        gmot = ExternalRates.defaults("gmot")
        grp = ExternalRates.defaults("grp")
        assert (gmot.gamma_trap, gmot.gamma_free) == (200.0, 1.0)
        assert (grp.gamma_trap, grp.gamma_free) == (1000.0, 300.0)

    def test_grp_lossier_than_gmot_everywhere(self, sr, green_beam):
        gmot = ExternalRates.defaults("gmot")
        grp = ExternalRates.defaults("grp")
        for delta34 in np.linspace(-3 * sr.gamma_34, 3 * sr.gamma_34, 7):
            for b in np.linspace(5.0, 300.0, 7):
                assert (greenred_loss_rate(delta34, b, green_beam, grp) >
                        greenred_loss_rate(delta34, b, green_beam, gmot))


@pytest.fixture(scope="module")
def map_setup(sr):
    params = make_params(sr, gamma_blue=25.0)
    beam_blue = MotBeam(gamma=sr.gamma_12, wavelength=sr.lambda_12, s=1.3,
                        delta=-0.5 * sr.gamma_12, w=2.9e-3)
    beam_green = MotBeam(gamma=sr.gamma_34, wavelength=sr.lambda_34, s=2.1,
                         delta=0.0, w=2.2e-3)
    return params, beam_blue, beam_green


class TestFluorescenceMap:

    def test_flat_limit(self, map_setup):
        """No trap term and an essentially infinite loading width leave
        nothing depending on the gradient."""
        params, beam_blue, beam_green = map_setup
        rates = ExternalRates(config="gmot", gamma_trap=0.0, gamma_free=100.0,
                              db_blue=1e12, db_grrd=100.0)
        res = fluorescence_map(([0.0], np.linspace(10.0, 300.0, 7)),
                               params, beam_blue, beam_green, rates)
        assert res.errors == []
        assert np.ptp(res.n22[0]) < 1e-9 * res.n22[0, 0]

    def test_gain_between_configurations(self, map_setup, sr):
        params, beam_blue, beam_green = map_setup
        d34 = np.linspace(-3 * sr.gamma_34, 3 * sr.gamma_34, 31)
        bg = np.linspace(10.0, 300.0, 31)
        peaks = {}
        for cfg in ("gmot", "grp"):
            res = fluorescence_map((d34, bg), params, beam_blue, beam_green,
                                   ExternalRates.defaults(cfg))
            assert res.errors == []
            peaks[cfg] = np.nanmax(res.n22)
        gain = peaks["gmot"] / peaks["grp"]
        assert 5.0 <= gain <= 20.0

    def test_green_ridge_follows_deepest_detuning(self, map_setup, sr):
        """argmax over detuning of n44 tracks the deepest-potential curve
        at gradients where it approaches its linear asymptote."""
        params, beam_blue, beam_green = map_setup
        rates = ExternalRates.defaults("gmot", db_grrd=50.0)
        d34 = np.linspace(-7.0 * sr.gamma_34, 0.0, 141)
        cell = d34[1] - d34[0]
        bg = np.linspace(190.0, 340.0, 6)
        res = fluorescence_map((d34, bg), params, beam_blue, beam_green, rates)
        assert res.errors == []
        for j, b in enumerate(bg):
            ridge = d34[int(np.nanargmax(res.n44[:, j]))]
            assert abs(ridge - optimal_detuning(beam_green, float(b))) <= abs(cell)

    def test_single_cell_is_steady_state(self, map_setup, sr):
        from srmot import DriveParams, hybrid_steady_state
        params, beam_blue, beam_green = map_setup
        rates = ExternalRates.defaults("gmot")
        res = fluorescence_map(([0.0], [64.0]), params, beam_blue, beam_green,
                               rates)
        direct = hybrid_steady_state(params.with_(
            green=DriveParams(omega=params.green.omega, delta=0.0),
            gamma_grrd=greenred_loss_rate(0.0, 64.0, beam_green, rates),
            r_load=loading_rate(64.0, beam_blue, rates)))
        rho22 = float(direct.blue_fracs[1].real)
        assert res.n22[0, 0] == pytest.approx(direct.pops.n_blue * rho22,
                                              rel=1e-12)

    def test_cell_error_recorded_not_raised(self, map_setup, sr):
        params, beam_blue, beam_green = map_setup
        # zero losses and zero pumping make the pool balance singular
        broken = params.with_(gamma_blue=0.0,
                              blue=type(params.blue)(omega=0.0, delta=0.0))
        rates = ExternalRates(config="gmot", gamma_trap=0.0, gamma_free=0.0,
                              db_blue=100.0, db_grrd=100.0)
        res = fluorescence_map(([0.0], [64.0]), broken, beam_blue, beam_green,
                               rates)
        assert len(res.errors) == 1
        assert math.isnan(res.n22[0, 0])
