import numpy as np
import pytest

from oracles import jc_first_peak_time, tavis_cummings_energy
from sshqb.dynamics import trajectory
from sshqb.hilbert import ModelParams
from sshqb.spectral import detect_ground_crossings
from sshqb.sweeps import (
    OrderParamRecord,
    capacity_sweep,
    charging_record,
    grid_points,
    heatmap_j_delta,
    occupation_profile,
    order_param_sweep,
    sweep_delta,
    sweep_hopping,
    tau_scaling,
    worker_count,
)


class TestGridPoints:
    def test_inclusive_endpoints(self):
        assert np.allclose(grid_points(0.0, 1.0, 0.25), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_symmetric_delta_grid(self):
        grid = grid_points(-1.0, 1.0, 0.1)
        assert len(grid) == 21
        assert np.isclose(grid[0], -1.0) and np.isclose(grid[-1], 1.0)

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            grid_points(0.0, 1.0, 0.0)


class TestChargingRecord:
    def test_internally_consistent_capacities(self):
        rec = charging_record(ModelParams(n_spins=3, hopping=1.8, delta=0.4))
        window = rec.e_top - rec.e_ground
        assert rec.r_eb == pytest.approx(rec.de_max / window, abs=1e-12)
        assert rec.r_epb == pytest.approx(rec.ergotropy / window, abs=1e-12)
        assert 0.0 <= rec.r_epb <= rec.r_eb <= 1.0 + 1e-9

    def test_conservation_diagnostics_small(self):
        rec = charging_record(ModelParams(n_spins=4, hopping=2.2, delta=-0.5))
        assert rec.norm_error < 1e-9
        assert rec.n_exc_drift < 1e-9
        assert rec.e_total_drift < 1e-9

    def test_occupations_within_bounds(self):
        rec = charging_record(ModelParams(n_spins=4, hopping=0.9, delta=0.7))
        assert all(-1e-12 <= o <= 1.0 + 1e-12 for o in rec.occupations)

    def test_single_spin_full_inversion_capacity(self):
        # Resonant single spin inverts fully at the peak: R_eb = 1.
        rec = charging_record(ModelParams(n_spins=1, n_photons=3))
        assert rec.r_eb == pytest.approx(1.0, abs=1e-9)
        assert rec.de_max == pytest.approx(1.0, abs=1e-9)


class TestHoppingSweep:
    def test_zero_hopping_matches_collective_oracle(self):
        # Oracle: independent Dicke-basis implementation of the J = 0 chain.
        p = ModelParams(n_spins=4, hopping=0.0)
        traj = trajectory(p, t_max=2.0, dt=0.05)
        oracle = tavis_cummings_energy(4, p.n_photons, traj.times)
        assert np.max(np.abs(traj.e_battery - oracle)) < 1e-9

    def test_zero_hopping_record_against_oracle_peak(self):
        p = ModelParams(n_spins=3, hopping=0.0)
        rec = charging_record(p)
        times = np.linspace(0.0, 2 * rec.tau_c, 4001)
        oracle = tavis_cummings_energy(3, p.n_photons, times)
        k = int(np.argmax(oracle))
        assert rec.tau_c == pytest.approx(times[k], abs=2 * (times[1] - times[0]))
        assert rec.de_max == pytest.approx(oracle[k], abs=1e-6)

    def test_jumps_only_at_detected_crossings(self):
        # Between crossings dE_max(J) is continuous: differences stay below a
        # slope bound (measured slope is ~2.1 at step 0.1); across the first
        # crossing the jump is an order of magnitude above it.
        p = ModelParams(n_spins=5)
        grid = grid_points(0.0, 3.0, 0.1)
        records = sweep_hopping(p, grid)
        crossings = detect_ground_crossings(p, grid)
        de = np.array([r.de_max for r in records])
        slope_bound = 3.0 * 0.1
        jumps = []
        for i, diff in enumerate(np.abs(np.diff(de))):
            crossing_inside = any(grid[i] <= c <= grid[i + 1] for c in crossings)
            if not crossing_inside:
                assert diff < slope_bound, f"jump {diff} without crossing near J={grid[i]}"
            else:
                jumps.append(diff)
        assert max(jumps) > slope_bound

    def test_record_coordinates_follow_grid(self):
        grid = [0.4, 1.1]
        records = sweep_hopping(ModelParams(n_spins=2), grid)
        assert [r.hopping for r in records] == grid


class TestDeltaSweep:
    def test_odd_chain_symmetry(self):
        records = sweep_delta(ModelParams(n_spins=5, hopping=2.5),
                              [-0.8, -0.4, 0.0, 0.4, 0.8])
        by_delta = {round(r.delta, 3): r for r in records}
        for d in (0.4, 0.8):
            plus, minus = by_delta[d], by_delta[-d]
            assert plus.de_max == pytest.approx(minus.de_max, abs=1e-8)
            assert plus.ergotropy == pytest.approx(minus.ergotropy, abs=1e-8)
            assert plus.e_ground == pytest.approx(minus.e_ground, abs=1e-10)

    def test_even_chain_low_hopping_favors_negative_delta(self):
        records = sweep_delta(ModelParams(n_spins=6, hopping=0.3), [-1.0, -0.5, 0.5, 1.0])
        by_delta = {round(r.delta, 3): r for r in records}
        for d in (0.5, 1.0):
            assert by_delta[-d].de_max > by_delta[d].de_max

    def test_even_chain_high_hopping_favors_positive_delta(self):
        records = sweep_delta(ModelParams(n_spins=6, hopping=2.5), [-1.0, 1.0])
        assert records[1].de_max > records[0].de_max


class TestHeatmap:
    def test_slices_match_1d_sweeps_bitwise(self):
        p = ModelParams(n_spins=3)
        j_grid, d_grid = [0.5, 1.5], [-0.5, 0.0, 0.5]
        matrix = heatmap_j_delta(p, j_grid, d_grid)
        row = sweep_hopping(p.replace(delta=0.0), j_grid)
        col = sweep_delta(p.replace(hopping=1.5), d_grid)
        matrix_row = [r for r in matrix if r.delta == 0.0]
        matrix_col = [r for r in matrix if r.hopping == 1.5]
        assert matrix_row == row
        assert matrix_col == col

    def test_high_hopping_row_peaks_at_positive_boundary(self):
        # Fully split regime: the even chain gains most from delta = +1.
        row = heatmap_j_delta(ModelParams(n_spins=6), [2.5], [-1.0, -0.5, 0.0, 0.5, 1.0])
        best = max(row, key=lambda r: r.de_max)
        assert best.delta == 1.0


class TestOccupations:
    def test_mirror_symmetry_odd_chain(self):
        profile = dict(occupation_profile(ModelParams(n_spins=5, hopping=2.5), [-0.6, 0.6]))
        plus, minus = np.array(profile[0.6]), np.array(profile[-0.6])
        assert np.max(np.abs(plus - minus[::-1])) < 1e-8

    def test_uniform_when_decoupled(self):
        # J = 0 leaves the collective coupling permutation symmetric.
        (_, occ), = occupation_profile(ModelParams(n_spins=4, hopping=0.0), [0.0])
        assert np.max(np.abs(np.array(occ) - occ[0])) < 1e-8

    def test_reflection_symmetric_at_zero_delta(self):
        (_, occ), = occupation_profile(ModelParams(n_spins=5, hopping=1.7), [0.0])
        assert np.max(np.abs(np.array(occ) - np.array(occ)[::-1])) < 1e-8

    def test_split_regime_dimer_sites_charge_more(self):
        # At delta = +1 the odd chain is two strong pairs plus a lone site;
        # in the split regime the paired sites out-charge the lone one.
        (_, occ), = occupation_profile(ModelParams(n_spins=5, hopping=2.5), [1.0])
        assert np.mean(occ[:4]) > occ[4]

    def test_unsplit_regime_dimer_sites_charge_less(self):
        (_, occ), = occupation_profile(ModelParams(n_spins=5, hopping=0.3), [1.0])
        assert np.mean(occ[:4]) < occ[4]


class TestCapacity:
    def test_ergotropy_ratio_below_energy_ratio(self):
        rows = capacity_sweep(ModelParams(n_spins=4, hopping=2.5), [-0.9, 0.0, 0.9])
        for _, r_eb, r_epb in rows:
            assert r_epb <= r_eb + 1e-12

    def test_split_regime_more_sensitive_than_unsplit(self):
        grid = grid_points(-1.0, 1.0, 0.25)
        tv = {}
        for j in (0.3, 2.5):
            rows = capacity_sweep(ModelParams(n_spins=5, hopping=j), grid)
            values = np.array([r[1] for r in rows])
            tv[j] = float(np.abs(np.diff(values)).sum())
        assert tv[2.5] > tv[0.3]

    def test_unsplit_regime_capacity_decreases_with_dimerization(self):
        rows = capacity_sweep(ModelParams(n_spins=5, hopping=0.3), [0.0, 0.5, 1.0])
        r_eb = [r[1] for r in rows]
        assert r_eb[0] > r_eb[1] > r_eb[2]


class TestOrderParams:
    def test_weak_hopping_limit(self):
        records = order_param_sweep(ModelParams(n_spins=4), [0.0, 0.1])
        assert records[0].m_z == pytest.approx(-1.0)
        assert records[0].xi_z == pytest.approx(1.0)

    def test_monotone_nondecreasing_in_hopping(self):
        records = order_param_sweep(ModelParams(n_spins=5), grid_points(0.0, 3.0, 0.05))
        m_z = [r.m_z for r in records]
        assert all(b >= a - 1e-12 for a, b in zip(m_z, m_z[1:]))

    def test_steps_coincide_with_crossings(self):
        p = ModelParams(n_spins=5)
        grid = grid_points(0.0, 3.0, 0.02)
        records = order_param_sweep(p, grid)
        crossings = detect_ground_crossings(p, grid)
        jump_intervals = [
            (records[i].hopping, records[i + 1].hopping)
            for i in range(len(records) - 1)
            if abs(records[i + 1].m_z - records[i].m_z) > 1e-9
        ]
        assert len(jump_intervals) == len(crossings)
        for (lo, hi), star in zip(jump_intervals, crossings):
            assert lo - 1e-9 <= star <= hi + 1e-9

    def test_record_type(self):
        (rec,) = order_param_sweep(ModelParams(n_spins=2), [0.5])
        assert isinstance(rec, OrderParamRecord)
        assert rec.k_ground == 0


class TestTauScaling:
    def test_single_spin_matches_closed_form(self):
        result = tau_scaling(ModelParams(n_spins=1), [1], "scaled")
        assert result.records[0].n_photons == 3
        assert result.records[0].tau_c == pytest.approx(jc_first_peak_time(3), abs=1e-6)

    def test_fixed_mode_keeps_photon_number(self):
        result = tau_scaling(ModelParams(n_spins=2, n_photons=9), [1, 2], "fixed")
        assert [r.n_photons for r in result.records] == [9, 9]

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            tau_scaling(ModelParams(n_spins=2), [2, 3], "adaptive")

    def test_exponent_is_least_squares_slope(self):
        result = tau_scaling(ModelParams(n_spins=1), [2, 3], "scaled")
        taus = [r.tau_c for r in result.records]
        expected = (np.log(taus[1]) - np.log(taus[0])) / (np.log(3) - np.log(2))
        assert result.exponent == pytest.approx(expected, abs=1e-12)


class TestDeterminism:
    def test_independent_of_worker_count(self, monkeypatch):
        p = ModelParams(n_spins=3)
        grid = [0.3, 0.9, 1.5, 2.1]
        monkeypatch.setenv("SSHQB_THREADS", "1")
        assert worker_count() == 1
        serial = sweep_hopping(p, grid)
        monkeypatch.setenv("SSHQB_THREADS", "3")
        assert worker_count() == 3
        threaded = sweep_hopping(p, grid)
        assert serial == threaded

    def test_repeat_runs_identical(self):
        p = ModelParams(n_spins=3, hopping=1.3, delta=0.3)
        assert charging_record(p) == charging_record(p)
