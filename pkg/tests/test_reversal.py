"""Reversal thresholds, feasibility windows, and grid scans."""

import io
import math

import numpy as np
import pytest

from heatrev import pairtls, thermo
from heatrev.qcore import DensityOperator
from heatrev.reversal import (
    SingularBathError,
    alpha_bound,
    alpha_critical,
    alpha_permanent,
    feasibility_bounds,
    feasibility_log_correction,
    reversal_condition_coherence,
    reversal_condition_general,
    scan_region,
    verdict,
    write_scan_csv,
)

LADDER = pairtls.collective_ladder()


def initial_current(beta_s, beta_b, re_alpha):
    state = pairtls.pair_initial_state(pairtls.PairConfig(beta_s, re_alpha))
    return thermo.heat_current(state, LADDER, thermo.BathSpec(beta_b))


def natural_current(beta_s, beta_b):
    return initial_current(beta_s, beta_b, 0.0)


class TestAlphaCritical:
    def test_equal_temperatures(self):
        assert alpha_critical(2.0, 2.0) == 0.0

    def test_pinned_values(self):
        assert alpha_critical(4.0, 3.5) == pytest.approx(0.012031352341430527, abs=1e-15)
        assert alpha_critical(3.5, 4.0) == pytest.approx(-0.01174864809197058, abs=1e-15)
        # quoted at 5 significant figures
        assert alpha_critical(4.0, 3.5) == pytest.approx(0.012031, abs=1e-6)
        assert alpha_critical(3.5, 4.0) == pytest.approx(-0.011749, abs=1e-6)

    def test_bisection_of_current_sign_agrees(self):
        lo, hi = -0.028, 0.0
        flo = initial_current(3.5, 4.0, lo)
        assert flo > 0 and initial_current(3.5, 4.0, hi) < 0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if (initial_current(3.5, 4.0, mid) > 0) == (flo > 0):
                lo = mid
            else:
                hi = mid
        assert 0.5 * (lo + hi) == pytest.approx(alpha_critical(3.5, 4.0), abs=1e-9)

    def test_singular_bath(self):
        with pytest.raises(SingularBathError):
            alpha_critical(1.0, 0.0)

    def test_monotonicity_direction_recorded(self):
        """alpha_c is strictly monotone in beta_S at fixed beta_B; the
        direction is whatever the numbers say (recorded, not presumed)."""
        values = [alpha_critical(a, 3.0) for a in np.linspace(0.5, 6.0, 40)]
        diffs = np.diff(values)
        direction = math.copysign(1.0, diffs[0])
        assert all(math.copysign(1.0, d) == direction for d in diffs)


class TestAlphaPermanent:
    def test_equal_temperatures_zero_and_energy_neutral(self):
        for b in (0.5, 1.0, 2.0, 3.5, 5.0):
            assert alpha_permanent(b, b) == 0.0
            # At the threshold the steady energy equals the initial one.
            assert pairtls.steady_energy(b, b, 0.0) == pytest.approx(
                pairtls.initial_energy(b), abs=1e-12
            )

    def test_pinned_value_and_root_oracle(self):
        a_p = alpha_permanent(3.5, 4.0)
        assert a_p == pytest.approx(-0.012291952678193052, abs=1e-15)
        # quoted as -0.012294 at print precision
        assert a_p == pytest.approx(-0.012294, abs=5e-6)
        e0 = pairtls.initial_energy(3.5)
        lo, hi = -0.028, 0.0
        flo = pairtls.steady_energy(3.5, 4.0, lo) - e0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if ((pairtls.steady_energy(3.5, 4.0, mid) - e0) > 0) == (flo > 0):
                lo = mid
            else:
                hi = mid
        assert 0.5 * (lo + hi) == pytest.approx(a_p, abs=1e-9)

    def test_permanent_needs_more_correlation(self):
        assert abs(alpha_permanent(3.5, 4.0)) > abs(alpha_critical(3.5, 4.0))

    def test_ordering_on_grid(self):
        grid = np.linspace(0.2, 6.0, 50)
        for i, a in enumerate(grid):
            for j, b in enumerate(grid):
                if i == j:
                    continue
                assert abs(alpha_critical(a, b)) < abs(alpha_permanent(a, b))

    def test_singular_bath(self):
        with pytest.raises(SingularBathError):
            alpha_permanent(1.0, 0.0)


class TestAlphaBound:
    def test_reference_values(self):
        assert alpha_bound(3.5) == pytest.approx(0.028453023879735556, abs=1e-15)
        assert alpha_bound(3.5) == pytest.approx(0.028, abs=5e-4)
        assert alpha_bound(0.0) == 0.25
        assert alpha_bound(200.0) == pytest.approx(0.0, abs=1e-80)

    def test_matches_positivity_boundary(self):
        """States at the bound validate; 1% above they do not."""
        from heatrev.qcore import validate_density

        for beta in (0.7, 2.0, 3.5):
            bound = alpha_bound(beta)
            ok = pairtls.pair_initial_state(pairtls.PairConfig(beta, bound))
            assert validate_density(ok.matrix).ok
            x = math.exp(-beta)
            z = (1.0 + x) ** 2
            bad = np.diag([1.0, x, x, x * x]).astype(complex) / z
            bad[1, 2] += 1.01 * bound
            bad[2, 1] += 1.01 * bound
            assert not validate_density(bad).ok


class TestFeasibilityBounds:
    def test_infinite_temperature_system(self):
        bounds = feasibility_bounds(0.0)
        assert bounds.min_beta_b_omega_for_heating_reversal == pytest.approx(0.0, abs=1e-15)

    def test_correction_saturates_at_ln_two(self):
        assert feasibility_log_correction(40.0) == pytest.approx(math.log(2.0), abs=1e-12)
        grid = np.linspace(0.0, 20.0, 50)
        corrections = [feasibility_log_correction(a) for a in grid]
        assert all(0.0 <= c <= math.log(2.0) + 1e-15 for c in corrections)

    def test_heating_bound_is_tight(self):
        """Just above the bound a reversing alpha exists (alpha_c <= alpha_max);
        just below it does not."""
        a = 3.5
        bound = feasibility_bounds(a).min_beta_b_omega_for_heating_reversal
        assert bound == pytest.approx(2.850508238804009, abs=1e-12)
        eps = 1e-6
        assert alpha_critical(a, bound + eps) <= alpha_bound(a)
        assert alpha_critical(a, bound - eps) > alpha_bound(a)

    def test_cooling_bound_value_and_necessity(self):
        a = 3.5
        bounds = feasibility_bounds(a)
        assert bounds.max_beta_b_omega_for_cooling_reversal == pytest.approx(
            2.0 * a + math.log1p(2.0 * math.exp(-a)), abs=1e-15
        )
        # Necessary: wherever reversal is feasible (hot-system side), the
        # bath obeys the bound.
        for b in np.linspace(a + 0.01, 9.0, 120):
            if abs(alpha_critical(a, b)) < alpha_bound(a):
                assert b <= bounds.max_beta_b_omega_for_cooling_reversal + 1e-12

    def test_negative_regime_not_applicable(self):
        bounds = feasibility_bounds(-1.0)
        assert not bounds.applicable
        assert math.isnan(bounds.min_beta_b_omega_for_heating_reversal)


class TestReversalConditions:
    def test_zero_correlation_never_reverses(self):
        for a, b in ((3.5, 4.0), (4.0, 3.5), (2.0, -1.0)):
            assert not reversal_condition_general(0.0, 0.1, a, b)

    def test_pair_value_above_threshold(self):
        loc = 2.0 / (1.0 + math.exp(4.0))
        assert reversal_condition_general(2.0 * 0.0130, loc, 4.0, 3.5)
        assert not reversal_condition_general(2.0 * 0.0110, loc, 4.0, 3.5)

    def test_matches_heat_current_oracle(self):
        """Condition == 'current sign flipped vs the uncorrelated one', over
        temperatures of both signs."""
        for a in (0.8, 2.0, 3.5):
            loc = 2.0 * math.exp(-a) / (1.0 + math.exp(-a))
            for b in (-2.0, -0.5, 0.7, 2.0, 3.9):
                natural = natural_current(a, b)
                for frac in (-0.9, -0.4, 0.4, 0.9):
                    ra = frac * pairtls.alpha_max(a)
                    claimed = reversal_condition_general(2.0 * ra, loc, a, b)
                    if abs(natural) < 1e-13:
                        # No natural flow (equal temperatures): any flow at
                        # all counts as a reversal.
                        actual = abs(initial_current(a, b, ra)) > 1e-13
                    else:
                        actual = initial_current(a, b, ra) * natural < 0
                    assert claimed == actual, (a, b, ra)

    def test_infinite_temperature_bath_cannot_reverse(self):
        """At beta_B = 0 the correlation drops out of the current entirely."""
        a = 2.0
        for ra in (-0.9 * pairtls.alpha_max(a), 0.9 * pairtls.alpha_max(a)):
            assert initial_current(a, 0.0, ra) == pytest.approx(
                natural_current(a, 0.0), abs=1e-14
            )
            assert not reversal_condition_general(2.0 * ra, 0.1, a, 0.0)

    def test_equal_temperatures_any_correlation_reverses(self):
        assert reversal_condition_general(1e-6, 0.1, 2.0, 2.0)
        assert reversal_condition_general(-1e-6, 0.1, 2.0, 2.0)
        assert not reversal_condition_general(0.0, 0.1, 2.0, 2.0)

    def test_coherence_reduces_to_general_when_equal(self):
        for a, b in ((3.5, 4.0), (4.0, 3.5), (2.0, -1.0), (1.0, 1.0)):
            loc = 2.0 * math.exp(-a) / (1.0 + math.exp(-a))
            for c in (-0.05, -0.005, 0.005, 0.05):
                assert reversal_condition_coherence(c, c, loc, a, b) == (
                    reversal_condition_general(c, loc, a, b)
                )

    def test_coherence_both_zero(self):
        assert not reversal_condition_coherence(0.0, 0.0, 0.1, 4.0, 3.5)

    def test_coherence_against_v_system_current(self):
        """Oracle: sign of the actual heat current of a three-level V system
        with an upper-state coherence, against the condition with C+ = 0,
        C- = 2c. Reversal for the colder system needs c > 0 (the drive term
        must beat a positive threshold)."""
        from heatrev.eigenops import LadderPair

        low = np.zeros((3, 3), dtype=complex)
        low[0, 1] = low[0, 2] = 1.0
        pair = LadderPair(frequency=1.0, lowering=low)
        a, b = 4.0, 3.5  # system colder than bath
        x = math.exp(-a)
        z = 1.0 + 2.0 * x
        loc_minus = 2.0 * x / z
        bath = thermo.BathSpec(b)
        natural = None
        for c in np.linspace(-0.015, 0.015, 13):
            m = np.diag([1.0, x, x]).astype(complex) / z
            m[1, 2] += c
            m[2, 1] += c
            state = DensityOperator(m)
            current = thermo.heat_current(state, pair, bath)
            if c == 0.0:
                natural = current
        natural = thermo.heat_current(
            DensityOperator(np.diag([1.0, x, x]).astype(complex) / z), pair, bath
        )
        assert natural > 0.0  # colder system absorbs heat naturally
        for c in (-0.012, -0.004, 0.004, 0.012):
            m = np.diag([1.0, x, x]).astype(complex) / z
            m[1, 2] += c
            m[2, 1] += c
            current = thermo.heat_current(DensityOperator(m), pair, bath)
            reversed_ = current * natural < 0
            claimed = reversal_condition_coherence(0.0, 2.0 * c, loc_minus, a, b)
            assert claimed == reversed_, c
        # and the reversing side is c > 0
        assert reversal_condition_coherence(0.0, 2.0 * 0.012, loc_minus, a, b)
        assert not reversal_condition_coherence(0.0, -2.0 * 0.012, loc_minus, a, b)


class TestVerdict:
    def test_infeasible_when_too_cold(self):
        v = verdict(10.0, 1.0, 0.0)
        assert not v.feasible
        assert v.alpha_c > v.alpha_max

    def test_flags_and_implication(self):
        rng = np.random.default_rng(15)
        for _ in range(300):
            a = rng.uniform(0.3, 5.0)
            b = rng.uniform(0.3, 5.0)
            ra = rng.uniform(-1.0, 1.0) * pairtls.alpha_max(a)
            v = verdict(a, b, ra)
            if v.permanent_reversal:
                assert v.initial_reversal
            assert abs(v.alpha_c) <= abs(v.alpha_p) + 1e-12

    def test_permanent_flag_matches_energy_comparison(self):
        for a, b, ra in ((3.5, 4.0, -0.02), (3.5, 4.0, -0.0125), (3.5, 4.0, -0.012),
                         (4.0, 3.5, 0.0127), (4.0, 3.5, 0.012)):
            v = verdict(a, b, ra)
            e0 = pairtls.initial_energy(a)
            gained = pairtls.steady_energy(a, b, ra) - e0
            natural = pairtls.steady_energy(a, b, 0.0) - e0
            assert v.permanent_reversal == (gained * natural < 0)

    def test_singular_bath_fields(self):
        v = verdict(2.0, 0.0, 0.01)
        assert math.isnan(v.alpha_c) and math.isnan(v.alpha_p)
        assert not v.feasible and not v.initial_reversal


class TestScanRegion:
    def test_single_cell_matches_point_values(self):
        (cell,) = scan_region([3.5], [4.0], alpha_policy=[-0.02])
        assert cell.alpha_c == alpha_critical(3.5, 4.0)
        assert cell.alpha_p == alpha_permanent(3.5, 4.0)
        assert cell.initial_reversal and cell.permanent_reversal
        assert cell.delta_e_over_omega == pytest.approx(
            pairtls.steady_energy(3.5, 4.0, -0.02) - pairtls.initial_energy(3.5), abs=1e-15
        )

    def test_diagonal_min_policy_reproduces_max_reversal(self):
        grid = np.arange(0.1, 6.0 + 1e-9, 0.05)
        cells = scan_region(None, grid, alpha_policy="min", diag=True)
        deltas = [c.delta_e_over_omega for c in cells]
        i = int(np.argmax(deltas))
        assert deltas[i] == pytest.approx(0.116, abs=0.005)
        assert cells[i].beta_b_omega == pytest.approx(1.2, abs=0.2)

    def test_diagonal_max_policy_entropy_crossing(self):
        grid = np.arange(0.1, 2.0 + 1e-9, 0.01)
        cells = scan_region(None, grid, alpha_policy="max", diag=True)
        crossings = [
            0.5 * (c1.beta_b_omega + c2.beta_b_omega)
            for c1, c2 in zip(cells, cells[1:])
            if c1.delta_s * c2.delta_s < 0
        ]
        assert len(crossings) == 1
        assert 0.55 <= crossings[0] <= 0.75

    def test_row_major_order(self):
        cells = scan_region([1.0, 2.0], [3.0, 4.0], alpha_policy=[0.0, 0.01])
        coords = [(c.beta_s_omega, c.beta_b_omega, c.re_alpha) for c in cells]
        assert coords == [
            (1.0, 3.0, 0.0), (1.0, 3.0, 0.01), (1.0, 4.0, 0.0), (1.0, 4.0, 0.01),
            (2.0, 3.0, 0.0), (2.0, 3.0, 0.01), (2.0, 4.0, 0.0), (2.0, 4.0, 0.01),
        ]

    def test_csv_roundtrip(self):
        cells = scan_region([3.5], [4.0], alpha_policy="min")
        buf = io.StringIO()
        write_scan_csv(cells, buf)
        lines = buf.getvalue().splitlines()
        header = lines[0].split(",")
        assert header[0] == "beta_S_omega" and header[-1] == "delta_S"
        fields = lines[1].split(",")
        assert float(fields[0]) == 3.5
        assert float(fields[3]) == cells[0].alpha_c
        assert float(fields[9]) == cells[0].delta_s
        assert fields[6] in ("0", "1") and fields[7] in ("0", "1")

    def test_zero_bath_row_has_nan_thresholds(self):
        (cell,) = scan_region([2.0], [0.0], alpha_policy=[0.01])
        assert math.isnan(cell.alpha_c) and math.isnan(cell.alpha_p)
        assert not cell.initial_reversal
        assert math.isfinite(cell.delta_e_over_omega)
