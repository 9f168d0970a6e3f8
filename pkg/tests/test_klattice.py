"""Lattice layer: exact complex scalars, phase tokens, pairings."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from stabctl.klattice import (
    CentralCharge,
    EulerMatrix,
    GaussianRational,
    OracleBoundError,
    PhaseToken,
    Quiver,
    charge_rank,
    euler_matrix,
    euler_pair,
    format_rational,
    gauss,
    in_half_plane,
    kronecker_quiver,
    parse_rational,
    phase_compare,
)


def _random_gauss(rng: random.Random, allow_zero: bool = False) -> GaussianRational:
    while True:
        z = gauss(Fraction(rng.randint(-12, 12), 4), Fraction(rng.randint(-12, 12), 4))
        if allow_zero or not z.is_zero():
            return z


def test_gaussian_str_parse_round_trip():
    rng = random.Random(1)
    for _ in range(300):
        z = _random_gauss(rng, allow_zero=True)
        assert GaussianRational.parse(str(z)) == z
    assert str(gauss(-1)) == "-1"
    assert str(gauss(1, 1)) == "1+1i"
    assert str(gauss(0, 1)) == "1i"
    assert GaussianRational.parse("i") == gauss(0, 1)
    assert GaussianRational.parse("1/2-3/4i") == gauss(Fraction(1, 2), Fraction(-3, 4))


def test_gaussian_arithmetic():
    rng = random.Random(2)
    for _ in range(200):
        a, b, c = (_random_gauss(rng) for _ in range(3))
        assert (a + b) * c == a * c + b * c
        assert a - a == gauss(0)
        assert -a + a == gauss(0)
        assert (a / b) * b == a
        assert a * a.conjugate() == gauss(a.abs_sq())
        assert a * Fraction(3, 2) == a + a * Fraction(1, 2)


def test_parse_errors():
    with pytest.raises(ValueError):
        GaussianRational.parse("")
    with pytest.raises(ValueError):
        parse_rational("x")


def test_half_plane_boundary():
    assert in_half_plane(gauss(0, 1))
    assert in_half_plane(gauss(-1))
    assert in_half_plane(gauss(-5, 3))
    assert in_half_plane(gauss(7, 1))
    assert not in_half_plane(gauss(1))
    assert not in_half_plane(gauss(0, -1))
    assert not in_half_plane(gauss(1, -1))
    with pytest.raises(ValueError):
        in_half_plane(gauss(0))


def test_token_normalization():
    t = PhaseToken.make(gauss(1, -1), 0)
    assert t.z == gauss(-1, 1) and t.winding == -1
    t = PhaseToken.make(gauss(0, 1), 5)
    assert t.z == gauss(0, 1) and t.winding == 5
    with pytest.raises(ValueError):
        PhaseToken(gauss(1), 0)
    with pytest.raises(ValueError):
        PhaseToken.make(gauss(0), 0)


def test_token_charge_value_parity():
    z = gauss(-2, 1)
    assert PhaseToken(z, 0).charge_value() == z
    assert PhaseToken(z, 1).charge_value() == -z
    assert PhaseToken(z, -1).charge_value() == -z
    assert PhaseToken(z, 2).charge_value() == z
    assert PhaseToken(z, 3).mass_sq() == z.abs_sq()
    assert PhaseToken(z, 0).shifted(2) == PhaseToken(z, 2)


def _float_phase(t: PhaseToken) -> float:
    return t.winding + math.atan2(float(t.z.im), float(t.z.re)) / math.pi


def test_phase_compare_against_float_phases():
    rng = random.Random(3)
    checked = 0
    for _ in range(2000):
        p = PhaseToken(_random_half(rng), rng.randint(-3, 3))
        q = PhaseToken(_random_half(rng), rng.randint(-3, 3))
        offset = rng.randint(-2, 2)
        cross = p.z.re * q.z.im - p.z.im * q.z.re
        got = phase_compare(p, q, offset)
        if cross == 0:
            assert got == (0 if p.winding == q.winding + offset
                           else (1 if p.winding > q.winding + offset else -1))
            checked += 1
            continue
        diff = _float_phase(p) - _float_phase(q) - offset
        if abs(diff) > 1e-7:
            assert got == (1 if diff > 0 else -1)
            checked += 1
    assert checked > 1500


def _random_half(rng: random.Random) -> GaussianRational:
    while True:
        z = gauss(Fraction(rng.randint(-12, 12), 4), Fraction(rng.randint(0, 12), 4))
        if not z.is_zero() and in_half_plane(z):
            return z


def test_phase_compare_fixtures():
    neg = PhaseToken(gauss(-1), 0)
    diag = PhaseToken(gauss(1, 1), 0)
    assert phase_compare(neg, diag) == 1
    assert phase_compare(diag, neg) == -1
    assert phase_compare(neg, neg) == 0
    # a full turn cancels an offset exactly
    assert phase_compare(PhaseToken(gauss(0, 1), 0), PhaseToken(gauss(0, 1), -1), 1) == 0
    # same ray, different windings
    assert phase_compare(PhaseToken(gauss(0, 2), 1), PhaseToken(gauss(0, 1), 0)) == 1


def test_central_charge():
    charge = CentralCharge((gauss(-1), gauss(1, 1)))
    assert charge.evaluate((1, 0)) == gauss(-1)
    assert charge.evaluate((-1, 2)) == gauss(3, 2)
    assert len(charge) == 2
    assert charge[1] == gauss(1, 1)
    assert charge_rank(charge) == 2
    assert charge_rank(CentralCharge((gauss(0, 1), gauss(0, 2)))) == 1
    with pytest.raises(ValueError):
        charge_rank(CentralCharge((gauss(0), gauss(0))))


def test_quiver_validation():
    q = kronecker_quiver(2)
    assert q.vertex_count == 2 and q.arrows == ((0, 1), (0, 1))
    assert q.arrow_count(0, 1) == 2
    assert q.topological_order() == (0, 1)
    with pytest.raises(ValueError):
        Quiver("bad", 2, ((0, 0),))
    with pytest.raises(ValueError):
        Quiver("bad", 2, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        kronecker_quiver(0)


def test_euler_matrix_and_pairing():
    q = kronecker_quiver(2)
    em = euler_matrix(q)
    assert em.entries == ((1, -2), (0, 1))
    assert em.rank == 2
    assert euler_pair(em, (1, 0), (0, 1)) == -2
    assert euler_pair(em, (1, 2), (3, 4)) == 1 * 3 - 2 * 4 + 2 * 4
    chain = Quiver("a3", 3, ((0, 1), (1, 2)))
    assert euler_matrix(chain).entries == ((1, -1, 0), (0, 1, -1), (0, 0, 1))


def test_rational_formatting():
    assert format_rational(Fraction(3, 4)) == "3/4"
    assert format_rational(Fraction(-2)) == "-2"
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == Fraction(-2)


def test_oracle_bound_error_is_runtime_error():
    assert issubclass(OracleBoundError, RuntimeError)
