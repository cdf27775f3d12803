import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from g2fourier.binary_cubics import BinaryCubic
from g2fourier.whittaker import (
    HalfInt,
    NotPsdError,
    _k_poly,
    alpha_squared,
    bessel_k_half,
    coeffs_to_json,
    default_j,
    ell1_closed_form,
    scale_index,
    track_alpha,
    whittaker_value,
)

half_ints = st.integers(-6, 5).map(lambda k: HalfInt(2 * k + 1))


def _quad_k(v, z):
    val, _ = integrate.quad(lambda t: math.exp(-z * math.cosh(t)) * math.cosh(v * t), 0, 40, limit=200, epsabs=0, epsrel=1e-13)
    return val


def test_k_poly_small_orders():
    assert _k_poly(0) == [1]
    assert _k_poly(1) == [1, 1]
    assert _k_poly(2) == [1, 3, 3]
    assert _k_poly(3) == [1, 6, 15, 15]


def test_k_half_at_one():
    assert bessel_k_half("1/2", 1.0) == pytest.approx(math.sqrt(math.pi / 2) / math.e, rel=1e-12, abs=1e-12)
    assert bessel_k_half("1/2", 1.0) == pytest.approx(special.kv(0.5, 1.0), rel=1e-12)


@settings(max_examples=200)
@given(half_ints, st.floats(0.05, 30))
def test_k_half_against_scipy(v, z):
    assert bessel_k_half(v, z) == pytest.approx(special.kv(float(v), z), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(half_ints, st.floats(0.2, 8))
def test_k_half_against_quadrature(v, z):
    assert bessel_k_half(v, z) == pytest.approx(_quad_k(float(v), z), rel=1e-9)


def test_k_symmetric_in_order():
    for k in range(6):
        v = HalfInt(2 * k + 1)
        assert bessel_k_half(v, 1.7) == bessel_k_half(-v, 1.7)


def _direct(n, nu, alpha):
    two_n = n.numerator
    r = abs(alpha)
    out = {}
    for i in range(two_n + 1):
        vnum = 2 * i - two_n
        ph = cmath.exp(-1j * cmath.phase(alpha) * vnum)
        out[(i, two_n - i)] = nu ** (float(n) + 1) * ph * special.kv(vnum / 2, r * r) / (math.factorial(i) * math.factorial(two_n - i))
    return out


@settings(max_examples=100)
@given(
    st.integers(0, 4).map(lambda k: HalfInt(2 * k + 1)),
    st.floats(0.1, 5),
    st.complex_numbers(min_magnitude=0.3, max_magnitude=3, allow_nan=False, allow_infinity=False),
)
def test_whittaker_against_direct_sum(n, nu, alpha):
    got = whittaker_value(n, nu, alpha)
    want = _direct(n, nu, alpha)
    assert got.keys() == want.keys()
    for k in got:
        assert abs(got[k] - want[k]) <= 1e-12 * max(1.0, abs(want[k]))


@given(st.floats(0.1, 5), st.complex_numbers(min_magnitude=0.2, max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_ell1_closed_form(nu, alpha):
    got = whittaker_value("1/2", nu, alpha)
    want = ell1_closed_form(nu, alpha)
    for k in want:
        assert abs(got[k] - want[k]) <= 1e-12 * max(1.0, abs(want[k]))


@given(
    st.integers(0, 4).map(lambda k: HalfInt(2 * k + 1)),
    st.floats(0.1, 5),
    st.complex_numbers(min_magnitude=0.2, max_magnitude=3, allow_nan=False, allow_infinity=False),
)
def test_odd_in_alpha(n, nu, alpha):
    a = whittaker_value(n, nu, alpha)
    b = whittaker_value(n, nu, -alpha)
    assert all(b[k] == -a[k] for k in a)


def test_bad_inputs():
    with pytest.raises(ValueError):
        whittaker_value("1", 1.0, 1)
    with pytest.raises(ValueError):
        whittaker_value("-1/2", 1.0, 1)
    with pytest.raises(ValueError):
        whittaker_value("1/2", 0, 1)
    with pytest.raises(ValueError):
        whittaker_value("1/2", 1.0, 0)
    with pytest.raises(ValueError):
        HalfInt(4)


def test_halfint_parse():
    assert HalfInt.parse("3/2") == HalfInt(3)
    assert HalfInt.parse("-0.5") == HalfInt(-1)
    assert str(HalfInt(5)) == "5/2"


def test_scale_and_json():
    assert scale_index(1 + 1j, 2 * math.pi) == pytest.approx(2 * math.pi * (1 + 1j))
    js = coeffs_to_json(whittaker_value("1/2", 1.0, 1.0))
    assert set(js) == {"x^0 y^1", "x^1 y^0"}


def test_alpha_squared_examples():
    f = BinaryCubic.parse("1,-2,-1,1")
    z = 0.3 + 1j
    j = default_j(z)
    assert j == pytest.approx(1.0)
    assert alpha_squared(f, z, j) == pytest.approx(-(z ** 3 - 2 * z ** 2 - z + 1))
    with pytest.raises(NotPsdError):
        alpha_squared(BinaryCubic.parse("1,0,1,0"), 1j, 1.0)
    with pytest.raises(ValueError):
        alpha_squared(f, 0.5 - 1j, 1.0)


def test_alpha_squared_nonvanishing_on_upper_half_plane():
    f = BinaryCubic.parse("10,-9,-1,1")
    for x in range(-20, 21):
        for y in (0.01, 0.1, 1.0, 5.0):
            z = complex(x / 4, y)
            assert abs(alpha_squared(f, z, default_j(z))) > 0


def test_track_alpha_is_continuous_branch():
    f = BinaryCubic.parse("1,-2,-1,1")
    path = [complex(3 * math.cos(t), 0.2 + 3 * math.sin(t)) for t in [k * math.pi / 400 for k in range(401)]]
    branch = track_alpha(f, path)
    for a, z in zip(branch, path):
        assert a * a == pytest.approx(alpha_squared(f, z, default_j(z)), rel=1e-12)
    steps = [abs(b - a) for a, b in zip(branch, branch[1:])]
    assert max(steps) < 0.5 * min(abs(a) for a in branch)
