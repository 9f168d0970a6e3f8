"""The two-object model: helix classes, modules, charts, membership."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from stabctl import gl_action, pn_model, rep_lab
from stabctl.klattice import CentralCharge, PhaseToken, euler_pair, gauss


def test_class_recursion_and_pairing():
    for n in (1, 2, 3, 4):
        em = pn_model.pn_euler(n)
        assert em.entries == ((1, -n), (0, 1))
        for i in range(-10, 9):
            c0, c1, c2 = (pn_model.s_class(n, i + k) for k in range(3))
            assert c2 == (n * c1[0] - c0[0], n * c1[1] - c0[1])
            assert euler_pair(em, c0, c0) == 1
            assert euler_pair(em, c0, c1) == n
            assert euler_pair(em, c1, c0) == 0
    assert pn_model.s_class(3, 0) == (-1, 0)
    assert pn_model.s_class(3, 1) == (0, 1)
    assert pn_model.s_class(3, 2) == (1, 3)
    assert pn_model.s_class(3, -1) == (-3, -1)


def test_natural_shift():
    assert [pn_model.natural_shift(i) for i in (-2, -1, 0, 1, 2)] == [1, 1, 1, 0, 0]


def test_helix_modules_match_classes():
    for n in (2, 3):
        for i in range(-4, 5):
            module, shift = pn_model.helix_module(n, i)
            sign = -1 if shift % 2 else 1
            assert tuple(sign * d for d in module.dims) == pn_model.s_class(n, i)
            assert rep_lab.hom_ext(module, module).hom == 1
            assert rep_lab.hom_ext(module, module).ext == 0


def test_helix_modules_single_arrow_cycle():
    # one arrow: six steps return to the start two floors down
    m0, s0 = pn_model.helix_module(1, 0)
    m6, s6 = pn_model.helix_module(1, 6)
    assert m0.dims == m6.dims
    assert s6 == s0 - 2
    dims = [pn_model.helix_module(1, i)[0].dims for i in range(3)]
    assert dims == [(1, 0), (0, 1), (1, 1)]


def test_backward_module_dims():
    dims = [pn_model.s_rep(2, -k).dims for k in range(1, 6)]
    assert dims == [(2, 1), (3, 2), (4, 3), (5, 4), (6, 5)]
    forward = [pn_model.s_rep(2, k).dims for k in range(2, 6)]
    assert forward == [(1, 2), (2, 3), (3, 4), (4, 5)]
    with pytest.raises(ValueError):
        pn_model.s_rep(1, 2)


def test_hom_degree_prediction():
    assert pn_model.hom_degrees(3, 0, 1) == (0, 3)
    assert pn_model.hom_degrees(3, 1, 0) == (1, 0)
    assert pn_model.hom_degrees(2, 0, 3) == (0, 4)
    with pytest.raises(ValueError):
        pn_model.hom_degrees(2, 1, 1)
    for n in (2, 3):
        for i in range(-2, 3):
            for j in range(-2, 3):
                if i == j:
                    continue
                degree, dim = pn_model.module_hom_prediction(n, i, j)
                he = rep_lab.hom_ext(
                    pn_model.helix_module(n, i)[0], pn_model.helix_module(n, j)[0]
                )
                assert (he.hom, he.ext) == ((dim, 0) if degree == 0 else (0, dim))


def test_reference_point_serialization():
    point = pn_model.sigma_minus1(2)
    assert point.to_data() == {
        "n": 2,
        "base": 0,
        "tokens": [{"z": "-1", "w": -1}, {"z": "1+1i", "w": 0}],
    }
    assert pn_model.point_from_data(point.to_data()) == point
    chart = pn_model.chart_point(point)
    assert chart.tokens == point.tokens


def test_point_validation():
    with pytest.raises(ValueError):
        pn_model.PnPoint(2, 0, (PhaseToken(gauss(-1), 0),))
    with pytest.raises(ValueError):
        pn_model.PnPoint(0, 0, pn_model.sigma_minus1(2).tokens)


def test_membership_profile_of_shifted_chart_point():
    from stabctl import chart_atlas as ca

    chart = ca.build_stability(
        pn_model.pn_collection(2, 2), (1, 0), (gauss(1, 1), gauss(0, 1))
    )
    point = pn_model.PnPoint(2, 2, chart.tokens)
    profile = {k: pn_model.theta_member(point, k, 12) for k in range(-1, 4)}
    assert profile == {-1: False, 0: False, 1: False, 2: True, 3: False}
    assert pn_model.find_stable_pair(point, window=20, bound=12) == 2
    assert not pn_model.in_O_minus1(point)


def test_reference_point_is_everywhere_member():
    point = pn_model.sigma_minus1(2)
    assert pn_model.in_O_minus1(point)
    for k in (-2, -1, 0, 1, 2, 3):
        assert pn_model.theta_member(point, k, 12)


def test_membership_is_orbit_invariant():
    rng = random.Random(61)
    base = pn_model.sigma_minus1(2)
    for _ in range(20):
        g = _random_element(rng)
        moved = pn_model.PnPoint(2, 0, gl_action.act_tokens(g, base.tokens))
        assert pn_model.in_O_minus1(moved)
        assert pn_model.theta_member(moved, 0, 12)


def _random_element(rng):
    while True:
        rows = (
            (Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2))),
            (Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2))),
        )
        if rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] > 0:
            return gl_action.GLTildeElement(rows, rng.randint(-1, 1))


def test_membership_rejects_bad_presentations():
    down = pn_model.PnPoint(
        2, 0, (PhaseToken(gauss(-1), 1), PhaseToken(gauss(1, 1), 0))
    )
    with pytest.raises(ValueError):
        pn_model.theta_member(down, 0, 12)
    collinear = pn_model.PnPoint(
        2, 0, (PhaseToken(gauss(0, 1), 0), PhaseToken(gauss(0, 2), 0))
    )
    with pytest.raises(ValueError):
        pn_model.theta_member(collinear, 0, 12)


def test_degenerate_ray_membership():
    # both charges on one ray: membership only on the chart of the base pair
    for delta in (1, 2):
        point = pn_model.PnPoint(
            3, 0, (PhaseToken(gauss(0, 1), 0), PhaseToken(gauss(0, 2), delta))
        )
        assert pn_model.theta_member(point, 0, 12)
        assert not pn_model.theta_member(point, 1, 12)
        assert not pn_model.theta_member(point, -1, 12)


def test_transport_law_on_random_points():
    for n in (1, 2, 3):
        for trial in range(25):
            rng = random.Random(f"transport:{n}:{trial}")
            point = pn_model._sample_point(n, rng.randint(-2, 2), rng)
            w = pn_model.fixed_basis_charge(point)
            wp = pn_model.fixed_basis_charge(pn_model.aut_shift(point, 1))
            assert (-wp[1], wp[0] + wp[1] * Fraction(n)) == w


def test_find_stable_pair_exception_carries_the_point():
    # heart simples are stable, so the search cannot fail on a valid
    # presentation; the exception still reports failures as data
    point = pn_model.sigma_minus1(2)
    exc = pn_model.StablePairNotFound(point, 3)
    assert exc.window == 3 and exc.point == point
    assert '"base": 0' in str(exc)
    assert isinstance(exc, RuntimeError)


def test_find_stable_pair_prefers_the_base_chart():
    for n in (2, 3):
        point = pn_model.sigma_minus1(n)
        assert pn_model.find_stable_pair(point, window=2, bound=12) == 0
        shifted = pn_model.aut_shift(point, 4)
        assert pn_model.find_stable_pair(shifted, window=2, bound=12) == 4


def test_overlap_scan_small():
    report = pn_model.overlap_scan(2, 0, 1, samples=40, seed=7, bound=12)
    assert report["agree"] == 40
    assert report["counterexamples"] == []
    with pytest.raises(ValueError):
        pn_model.overlap_scan(2, 1, 1)


def test_presented_reference_matches_chart():
    for n in (2, 3):
        for m in (-1, 0, 2):
            chart = pn_model.sigma_minus1_presented(n, m)
            assert pn_model.in_O_minus1(pn_model.PnPoint(n, m, chart.tokens))
