import math

import numpy as np
import pytest

from oracles import from_bloch, povm_conditional_entropy, random_bloch
from xdiscord.discord_vn import Method, MinimizeOptions, classify_analytic, conditional_entropy_vn, minimize_discord_vn
from xdiscord.families import solve_xm, x3_params
from xdiscord.povm import (
    InvalidPovm,
    Povm,
    PovmElement,
    antipodal_povm,
    conditional_entropy_bound,
    conditional_entropy_povm,
    discord_upper_povm,
    three_outcome_povm,
)
from xdiscord.xcore import BlochParams, as_params


def random_povm(rng, k=3, in_plane=False):
    """Random K-outcome qubit POVM: K-1 free directions, the last one balances the moment."""
    while True:
        dirs = rng.normal(size=(k - 1, 3))
        if in_plane:
            dirs[:, 1] = 0
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        w = rng.uniform(0.05, 1, k - 1)
        v = -(w[:, None] * dirs).sum(0)
        wk = np.linalg.norm(v)
        if wk < 1e-3:
            continue
        mus = np.append(w, wk)
        ns = np.vstack([dirs, v / wk])
        mus /= mus.sum()
        return Povm(tuple(PovmElement(float(m), tuple(map(float, n))) for m, n in zip(mus, ns)))


class TestThreeOutcome:
    def test_theta_zero(self):
        p = three_outcome_povm(0.0)
        (a, b, c) = p.elements
        assert a.mu == 0.5 and a.n == (0.0, 0.0, -1.0)
        assert b.mu == 0.25 and c.mu == 0.25 and b.n == (0.0, 0.0, 1.0)

    def test_theta_half_pi_drops_first(self):
        p = three_outcome_povm(math.pi / 2)
        assert len(p) == 2
        assert [e.mu for e in p.elements] == pytest.approx([0.5, 0.5])
        assert p.elements[0].n == pytest.approx((1, 0, 0), abs=1e-15)

    def test_theta_quarter_pi(self):
        p = three_outcome_povm(math.pi / 4)
        mus = [e.mu for e in p.elements]
        r2 = math.sqrt(2)
        assert mus == pytest.approx([r2 / (2 + r2), 1 / (2 + r2), 1 / (2 + r2)], abs=1e-15)
        moment = sum(e.mu * np.array(e.n) for e in p.elements)
        assert np.allclose(moment, 0, atol=1e-15)

    def test_residuals_on_grid(self):
        for th in np.linspace(0, math.pi / 2, 1000):
            res = three_outcome_povm(th).residuals()
            assert max(res.values()) <= 1e-12

    def test_bad_angle(self):
        with pytest.raises(ValueError):
            three_outcome_povm(2.0)


class TestValidation:
    def test_too_many_outcomes(self):
        els = [PovmElement(0.2, (0, 0, 1)), PovmElement(0.2, (0, 0, -1))] * 2 + [PovmElement(0.2, (1, 0, 0))]
        with pytest.raises(InvalidPovm, match="at most 4"):
            Povm(tuple(els))

    def test_moment(self):
        with pytest.raises(InvalidPovm, match="vanish"):
            Povm((PovmElement(0.5, (0, 0, 1)), PovmElement(0.5, (1, 0, 0))))

    def test_weights(self):
        with pytest.raises(InvalidPovm, match="sum"):
            Povm((PovmElement(0.4, (0, 0, 1)), PovmElement(0.4, (0, 0, -1))))

    def test_norm(self):
        with pytest.raises(InvalidPovm, match="unit"):
            Povm((PovmElement(0.5, (0, 0, 0.9)), PovmElement(0.5, (0, 0, -0.9))))

    def test_json(self):
        p = three_outcome_povm(0.4)
        data = p.to_json()
        assert set(data[0]) == {"mu", "n"}
        assert Povm.from_json(data) == p


class TestConditionalEntropy:
    def test_two_outcome_reduces_to_projective(self, rng):
        for row in random_bloch(rng, 1000):
            p = as_params(BlochParams(*row))
            th = rng.uniform(0, math.pi)
            got = conditional_entropy_povm(p, antipodal_povm(th))
            assert got == pytest.approx(conditional_entropy_vn(p, abs(math.cos(th))), abs=1e-13)

    def test_theta_zero_is_sigma_z(self, rng):
        for row in random_bloch(rng, 50):
            p = as_params(BlochParams(*row))
            assert conditional_entropy_povm(p, three_outcome_povm(0.0)) == pytest.approx(
                conditional_entropy_vn(p, 1.0), abs=1e-13
            )

    def test_matches_operator_algebra(self, rng):
        for row in random_bloch(rng, 100):
            p = as_params(BlochParams(*row))
            povm = random_povm(rng, k=int(rng.integers(2, 5)))
            rho = from_bloch(*p.as_tuple())
            oracle = povm_conditional_entropy(rho, [(e.mu, e.n) for e in povm.elements])
            assert conditional_entropy_povm(p, povm) == pytest.approx(oracle, abs=1e-10)

    def test_bound_equal_in_plane(self, rng):
        for row in random_bloch(rng, 100):
            p = as_params(BlochParams(*row))
            povm = random_povm(rng, in_plane=True)
            assert conditional_entropy_bound(p, povm) == pytest.approx(conditional_entropy_povm(p, povm), abs=1e-13)

    def test_bound_below_tilted(self, rng):
        for row in random_bloch(rng, 100):
            p = as_params(BlochParams(*row))
            povm = random_povm(rng, k=3)
            assert conditional_entropy_povm(p, povm) >= conditional_entropy_bound(p, povm) - 1e-13


class TestUpperBound:
    def test_analytic_region(self, rng):
        checked = 0
        for row in random_bloch(rng, 300):
            p = as_params(BlochParams(*row))
            if classify_analytic(p).value == "Unknown":
                continue
            checked += 1
            assert discord_upper_povm(p).discord >= minimize_discord_vn(p).discord - 1e-10
        assert checked > 50

    def test_xm_interior_beats_von_neumann(self):
        pt = solve_xm(0.1)
        assert pt.delta_tilde > pt.delta > 0
        p = x3_params(pt.m, pt.eps)
        up = discord_upper_povm(p)
        vn = minimize_discord_vn(p, MinimizeOptions(fast_path=False))
        assert up.method is Method.POVM_UPPER
        assert up.discord < vn.discord

    def test_bell(self):
        res = discord_upper_povm(BlochParams(0, 0, 1, 1, -1))
        assert res.discord == pytest.approx(1.0, abs=1e-12)
        assert res.discord + res.classical_correlation == pytest.approx(res.mutual_information)
