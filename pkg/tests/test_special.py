import math

import mpmath as mp
import numpy as np
import pytest

from dryskew import special
from dryskew.errors import DomainError

mp.mp.dps = 40


def mp_h(s, y):
    s, y = mp.mpf(s), mp.mpf(y)
    return abs(y) / mp.sqrt(2 * mp.pi * s**3) * mp.exp(-y * y / (2 * s))


def test_erf_values():
    assert special.erf(0.0) == 0.0
    assert abs(special.erf(10.0) - 1.0) <= 1e-15
    assert special.erf(0.141421) == pytest.approx(float(mp.erf("0.141421")), abs=1e-12)
    assert special.erf(0.141421) == pytest.approx(0.158519, abs=1e-6)


def test_erfc_values():
    assert special.erfc(0.0) == 1.0
    for z in (-3.0, 0.5, 7.0):
        assert special.erfc(z) + special.erf(z) == pytest.approx(1.0, abs=1e-15)
    assert special.erfc(5.0) == pytest.approx(float(mp.erfc(5)), rel=1e-10)
    assert special.erfc(5.0) == pytest.approx(1.537e-12, rel=1e-3)


@pytest.mark.parametrize("z", np.linspace(0.0, 30.0, 61))
def test_erfc_tail_relative_accuracy(z):
    assert special.erfc(z) == pytest.approx(float(mp.erfc(z)), rel=1e-12)


def test_erfcx_matches_mpmath():
    for z in (0.0, 1.0, 10.0, 100.0):
        ref = mp.exp(mp.mpf(z) ** 2) * mp.erfc(z)
        assert special.erfcx(z) == pytest.approx(float(ref), rel=1e-13)


def test_erf_monotone_erfc_decreasing():
    z = np.linspace(-6, 6, 1001)
    assert np.all(np.diff(special.erf(z)) >= 0)
    ec = special.erfc(z)
    assert np.all(ec > 0) and np.all(np.diff(ec) <= 0)


def test_first_passage_values():
    assert special.first_passage_density(1.0, 1.0) == pytest.approx(0.2419707, abs=1e-7)
    assert special.first_passage_density(4.0, 2.0) == pytest.approx(float(mp_h(4, 2)), rel=1e-13)
    assert special.first_passage_density(4.0, 2.0) == pytest.approx(0.0604927, abs=1e-7)
    assert special.first_passage_density(3.0, 0.0) == 0.0


def test_first_passage_even_and_underflow():
    assert special.first_passage_density(0.7, -1.3) == special.first_passage_density(0.7, 1.3)
    assert special.first_passage_density(1e-6, 1.0) == 0.0
    assert special.first_passage_density(np.array([1e-300]), 1.0)[0] == 0.0


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_first_passage_rejects_bad_time(bad):
    with pytest.raises(DomainError):
        special.first_passage_density(bad, 1.0)
    with pytest.raises(DomainError):
        special.gaussian_pdf(bad, 0.0)


def test_gaussian_pdf():
    assert special.gaussian_pdf(1.0, 0.0) == pytest.approx(0.3989423, abs=1e-7)
    assert special.gaussian_pdf(1.0, 1.0) == pytest.approx(0.2419707, abs=1e-7)
    assert special.gaussian_pdf(2.0, 0.7) == special.gaussian_pdf(2.0, -0.7)


def test_scalar_in_scalar_out():
    assert isinstance(special.erf(0.3), float)
    assert isinstance(special.first_passage_density(1.0, 0.5), float)
    assert special.first_passage_density(np.ones(3), 0.5).shape == (3,)
