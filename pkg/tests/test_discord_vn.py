import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given

from conftest import canonical_states, params
from oracles import discord_dense, from_bloch, projective_conditional_entropy, random_bloch
from xdiscord import _precise
from xdiscord.discord_vn import (
    AnalyticClass,
    Method,
    MinimizeOptions,
    VnMeasurement,
    algorithm_gap,
    classical_correlation,
    classify_analytic,
    cond_entropy_vn_arrays,
    conditional_entropy_vn,
    discord_given_measurement,
    discord_sigma_x,
    discord_sigma_z,
    minimize_discord_vn,
    scan_conditional_entropy,
)
from xdiscord.families import bell_diagonal, x3_params, x3_state
from xdiscord.xcore import BlochParams, as_params, InvalidState, binary_entropy, mutual_information

FORCE = MinimizeOptions(fast_path=False)
COUNTER = BlochParams(-0.8812, 0.9407, -0.9383, 0.2898, 0.2898)


class TestConditionalEntropy:
    def test_x3_at_nz_zero(self):
        p = x3_params(0.3, 0.2)
        assert conditional_entropy_vn(p, 0.0) == pytest.approx(binary_entropy(math.hypot(p.y, 0.2)), abs=1e-15)

    def test_no_coherence_at_sigma_z(self):
        x, y, t = 0.2, -0.1, 0.3
        p = BlochParams(x, y, t, 0.0, 0.0)
        expected = sum(
            (1 + sg * x) / 2 * binary_entropy((y + sg * t) / (1 + sg * x)) for sg in (1, -1)
        )
        assert conditional_entropy_vn(p, 1.0) == pytest.approx(expected, abs=1e-15)

    def test_matches_projector_algebra(self, rng):
        for row in random_bloch(rng, 200):
            p = as_params(BlochParams(*row))
            rho = from_bloch(*p.as_tuple())
            nz = 0.37
            n = (math.sqrt(1 - nz * nz), 0.0, nz)
            # fixed directions refer to the canonical frame (s >= |u|)
            assert conditional_entropy_vn(p, nz) == pytest.approx(
                projective_conditional_entropy(rho, n), abs=1e-10
            )

    def test_accepts_measurement_objects(self):
        p = x3_params(0.2, 0.1)
        assert conditional_entropy_vn(p, VnMeasurement(0.5)) == conditional_entropy_vn(p, 0.5)
        assert VnMeasurement.from_angle(math.pi / 3).nz == pytest.approx(0.5)
        with pytest.raises(ValueError):
            VnMeasurement(1.5)

    def test_outcome_relabelling_symmetry(self, rng):
        for row in random_bloch(rng, 1000):
            nz = rng.uniform(-1, 1)
            a = cond_entropy_vn_arrays(*row[:4], nz)
            b = cond_entropy_vn_arrays(*row[:4], -nz)
            assert abs(a - b) <= 1e-12

    @given(params())
    def test_precise_path_agrees(self, p):
        with mp.workdps(30):
            for nz in (0.0, 0.3, 0.77, 1.0):
                hi = _precise.cond_entropy_vn(*(mp.mpf(v) for v in p.as_tuple()[:4]), mp.mpf(nz))
                assert float(hi) == pytest.approx(conditional_entropy_vn(p, nz), abs=1e-12)


class TestDiscordGivenMeasurement:
    def test_x3_sigma_z_is_eps(self):
        for m, eps in [(0.1, 0.05), (0.3, 0.2), (0.45, 0.6)]:
            assert discord_given_measurement(x3_params(m, eps), 1.0) == pytest.approx(eps, abs=1e-12)

    def test_bell_every_direction(self):
        bell = BlochParams(0, 0, 1, 1, -1)
        for nz in np.linspace(0, 1, 11):
            assert discord_given_measurement(bell, nz) == pytest.approx(1.0, abs=1e-12)

    def test_matches_dense_discord(self, rng):
        for row in random_bloch(rng, 100):
            nz = rng.uniform()
            n = (math.sqrt(1 - nz * nz), 0.0, nz)
            p = as_params(BlochParams(*row))
            assert discord_given_measurement(p, nz) == pytest.approx(
                discord_dense(from_bloch(*p.as_tuple()), n), abs=1e-10
            )

    def test_fig2_point_beats_both_axes(self):
        # 1e5-point grid oracle for the minimum
        p = x3_params(0.101, 0.228)
        grid = np.linspace(0, 1, 100_001)
        brute = float(np.min(discord_given_measurement(p, grid)))
        assert discord_sigma_z(p) - brute > 1e-7
        assert discord_sigma_x(p) - brute > 1e-9
        assert minimize_discord_vn(p).discord == pytest.approx(brute, abs=1e-12)

    def test_nonnegative(self, rng):
        rows = random_bloch(rng, 10_000)
        nz = rng.uniform(size=len(rows))
        vals = np.array([discord_given_measurement(BlochParams(*r), z) for r, z in zip(rows, nz)])
        assert vals.min() >= -1e-10


class TestClassify:
    def test_bell_diagonal(self):
        assert classify_analytic(bell_diagonal(0.5, 0.3, 0.1)) is AnalyticClass.SIGMA_Z
        assert classify_analytic(bell_diagonal(0.2, 0.5, 0.1)) is AnalyticClass.SIGMA_X
        assert classify_analytic(bell_diagonal(0.4, 0.4, 0.1)) is AnalyticClass.BOTH

    def test_x3_large_eps(self):
        for m in np.linspace(0, 0.5, 11):
            for eps in (1 / 3, 0.5, 0.9):
                assert classify_analytic(x3_state(m=m, eps=eps)).has_x

    def test_fig2_point_unknown(self):
        assert classify_analytic(x3_state(m=0.101, eps=0.228)) is AnalyticClass.UNKNOWN

    @given(canonical_states())
    def test_case_i_forms_agree(self, st_):
        # classify raises if t^2 >= y^2 + s^2 and the matrix-element form disagree
        classify_analytic(st_)


class TestMinimize:
    def test_bell_diagonal_fast_path_matches_scan(self):
        p = BlochParams(0, 0, 0.8, 0.5, -0.3)
        fast = minimize_discord_vn(p)
        slow = minimize_discord_vn(p, FORCE)
        assert fast.method is Method.ANALYTIC_Z and slow.method is Method.NUMERIC_SCAN
        assert fast.discord == pytest.approx(discord_sigma_z(p), abs=1e-15)
        assert slow.discord == pytest.approx(fast.discord, abs=1e-12)

    def test_counterexample_gap(self):
        assert algorithm_gap(COUNTER) == pytest.approx(0.0029, abs=2e-4)

    def test_result_fields(self):
        res = minimize_discord_vn(x3_params(0.2, 0.2), FORCE)
        assert res.discord + res.classical_correlation == pytest.approx(res.mutual_information, abs=1e-12)
        assert res.mutual_information == pytest.approx(mutual_information(x3_state(m=0.2, eps=0.2)), abs=1e-12)
        d = res.to_dict()
        assert d["method"] == "NumericScan" and d["theta_opt"] == pytest.approx(math.acos(d["optimal_nz"]))

    def test_invalid_state(self):
        with pytest.raises(InvalidState):
            minimize_discord_vn(BlochParams(0.9, 0.9, 0.0, 0.9, 0.0))

    @given(params())
    def test_never_above_axes(self, p):
        res = minimize_discord_vn(p, FORCE)
        assert res.discord <= min(discord_sigma_z(p), discord_sigma_x(p)) + 1e-12
        assert res.discord >= -1e-10
        assert res.discord + res.classical_correlation == pytest.approx(res.mutual_information, abs=1e-12)

    def test_classical_correlation(self):
        assert classical_correlation(BlochParams(0, 0, 0, 0, 0)) == pytest.approx(0.0, abs=1e-15)
        assert classical_correlation(BlochParams(0, 0, 1, 1, -1)) == pytest.approx(1.0, abs=1e-12)
        p = x3_params(0.3, 0.2)
        res = minimize_discord_vn(p)
        assert classical_correlation(p) == pytest.approx(res.mutual_information - res.discord, abs=1e-10)

    def test_batch_scan_matches_scalar(self, rng):
        rows = random_bloch(rng, 50)
        x, y, t, s, u = rows.T
        s = np.maximum(np.abs(s), np.abs(u))
        nz, smin, s0, s1 = scan_conditional_entropy(x, y, t, s)
        for i, row in enumerate(rows):
            p = BlochParams(*row)
            assert smin[i] == pytest.approx(min(s0[i], s1[i], smin[i]))
            grid = np.linspace(0, 1, 20_001)
            assert smin[i] <= np.min(conditional_entropy_vn(p, grid)) + 1e-12

    def test_precise_option_agrees_with_float(self):
        p = x3_params(0.101, 0.228)
        lo = minimize_discord_vn(p, FORCE)
        hi = minimize_discord_vn(p, MinimizeOptions(fast_path=False, precision=30))
        assert hi.discord == pytest.approx(lo.discord, abs=1e-13)
        assert hi.optimal_nz == pytest.approx(lo.optimal_nz, abs=1e-5)

    def test_options_validation(self):
        with pytest.raises(ValueError):
            MinimizeOptions(grid_points=2)
        with pytest.raises(ValueError):
            MinimizeOptions(tol=0)


def test_sigma_z_criterion_implies_concavity(rng):
    rows = random_bloch(rng, 20_000)
    x, y, t, s, u = rows.T
    s = np.maximum(np.abs(s), np.abs(u))
    keep = t**2 >= y**2 + s**2
    nz = np.arange(-1000, 1001) / 1000
    vals = cond_entropy_vn_arrays(x[keep, None], y[keep, None], t[keep, None], s[keep, None], nz[None, :])
    assert keep.sum() > 100
    assert np.max(np.diff(vals, 2, axis=1)) <= 1e-8


def test_full_sphere_spot_check(rng):
    """Out-of-plane directions never beat the best x-z plane direction."""
    theta = np.linspace(0, np.pi / 2, 61)
    phi = np.linspace(0, np.pi, 61)
    for row in random_bloch(rng, 100):
        rho = from_bloch(*row)
        p = BlochParams(*row)
        best_plane = minimize_discord_vn(p, FORCE).discord
        x, y, t, s, u = row
        # exact conditional entropy for n = (sin th cos ph, sin th sin ph, cos th)
        th, ph = np.meshgrid(theta, phi, indexing="ij")
        nx, ny, nz = np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)
        total = 0.0
        for sg in (1, -1):
            pk = (1 + sg * x * nz) / 2
            r = np.sqrt((s * nx) ** 2 + (u * ny) ** 2 + (y + sg * t * nz) ** 2) / (2 * np.where(pk > 0, pk, 1))
            total = total + np.where(pk > 1e-14, pk * binary_entropy(np.minimum(r, 1)), 0)
        sphere = discord_given_measurement(p, 1.0) - conditional_entropy_vn(p, 1.0) + total
        assert sphere.min() >= best_plane - 1e-9
        # the sphere formula itself agrees with operator algebra at a random point
        i, j = 17, 23
        n = (nx[i, j], ny[i, j], nz[i, j])
        assert sphere[i, j] == pytest.approx(discord_dense(rho, n), abs=1e-10)
