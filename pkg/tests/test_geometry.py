import math

import pytest

from varcap.errors import DomainError
from varcap.geometry import Dimension, unit_sphere_area


def test_unit_sphere_areas():
    assert unit_sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-14)
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-14)
    assert unit_sphere_area(4) == pytest.approx(2 * math.pi**2, rel=1e-14)


def test_unit_sphere_area_rejects_low_dimension():
    with pytest.raises(DomainError):
        unit_sphere_area(1)


def test_gamma_normalization():
    assert Dimension(2).gamma == pytest.approx(2 * math.pi)
    for m in range(3, 9):
        dim = Dimension(m)
        assert dim.gamma == pytest.approx((m - 2) * dim.omega, rel=1e-14)


def test_dimension_rejects_bad_m():
    with pytest.raises(DomainError):
        Dimension(1)
    with pytest.raises(DomainError):
        Dimension(2.5)
