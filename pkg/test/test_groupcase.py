from math import cosh, log, pi

import numpy as np
import pytest

from hororadon.errors import DomainError
from hororadon.groupcase import (
    FubiniCheck,
    GroupFunction,
    GroupPointPair,
    ds_coefficient,
    fubini_factorization_check,
    gaussian_entries,
    group_l1_closed_form,
    group_l1_norm,
    group_radon,
    separable_witness,
    slice_growth,
    slice_mass,
    weight_two_coefficient,
)
from hororadon.sl2core import IDENTITY, opposite_unipotent, random_element, rotation, torus, unipotent


def test_slice_matrices():
    rng = np.random.default_rng(2)
    pair = GroupPointPair(random_element(rng, 0.5), random_element(rng, 0.5))
    for x, y in ((0.0, 0.0), (1.5, -0.3), (-2.0, 4.0)):
        m0, m1 = pair.slice_matrices(y)
        expected = (pair.g @ unipotent(x) @ opposite_unipotent(y) @ pair.h.inverse()).matrix
        np.testing.assert_allclose(m0 + x * m1, expected, rtol=1e-12, atol=1e-12)


def test_ds_coefficient():
    with pytest.raises(DomainError):
        ds_coefficient(2)
    with pytest.raises(DomainError):
        ds_coefficient(3.0)
    phi = ds_coefficient(3)
    assert phi(IDENTITY) == pytest.approx(1.0)
    assert abs(phi(torus(1.0))) == pytest.approx(cosh(1.0) ** -3)
    # weight k on both sides
    g = torus(0.4) @ unipotent(0.7)
    assert phi(rotation(0.3) @ g) == pytest.approx(np.exp(3j * 0.3) * phi(g))
    assert phi(g @ rotation(0.3)) == pytest.approx(np.exp(3j * 0.3) * phi(g))


def test_absolute_and_translated():
    phi = ds_coefficient(4)
    g = torus(0.2) @ unipotent(-1.0)
    assert phi.absolute()(g) == pytest.approx(abs(phi(g)))
    left, right = rotation(0.5), torus(0.3)
    moved = phi.translated(left, right)
    assert moved(g) == pytest.approx(phi(left.inverse() @ g @ right))


def test_gaussian_entries():
    f = gaussian_entries(1.0)
    assert f(rotation(1.0)) == pytest.approx(1.0)
    assert f(torus(1.0)).real < 1.0
    with pytest.raises(DomainError):
        gaussian_entries(0.0)


def test_separable_witness_transform():
    # on the slice through (e, e): b = x and c = y
    f = separable_witness(0.7)
    assert group_radon(f, GroupPointPair()).value.real == pytest.approx(pi * 0.7 ** 2, rel=1e-9)


@pytest.mark.parametrize("pair", [GroupPointPair(), GroupPointPair(torus(0.4), rotation(0.7))],
                         ids=["e-e", "a-r"])
def test_discrete_series_in_kernel(pair):
    phi = ds_coefficient(4)
    mass = slice_mass(phi, pair)
    assert mass > 0
    assert abs(group_radon(phi, pair, scale=mass).value) <= 1e-7 * mass


def test_rejects_non_integrable_slices():
    slow = GroupFunction("slow", lambda a, b, c, d: 1.0 / (1 + b * b + c * c), tail_exponent=1.0)
    with pytest.raises(DomainError):
        group_radon(slow, GroupPointPair())


def test_fubini_residual():
    assert FubiniCheck(1.0, 1.0 + 1e-8, 10.0).residual == pytest.approx(1e-9)
    assert FubiniCheck(0j, 0j, 0.0).residual == 0.0


def test_fubini_separable():
    check = fubini_factorization_check(separable_witness(1.0), GroupPointPair())
    assert check.residual <= 1e-9
    assert check.joint.real == pytest.approx(pi, rel=1e-8)


def test_closed_form():
    assert group_l1_closed_form(3) == 2.0
    assert group_l1_closed_form(4) == 1.0
    assert group_l1_closed_form(2) == float("inf")
    assert group_l1_closed_form(2, 5.0) == pytest.approx(2 * log(cosh(5.0)))
    assert group_l1_closed_form(3, 30.0) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("k, radius", [(3, 30.0), (4, 30.0)])
def test_l1_ball(k, radius):
    numeric = group_l1_norm(ds_coefficient(k), radius).value.real
    assert numeric == pytest.approx(group_l1_closed_form(k, radius), rel=1e-6)


def test_l1_ball_weight_two():
    numeric = group_l1_norm(weight_two_coefficient(), 5.0).value.real
    assert numeric == pytest.approx(group_l1_closed_form(2, 5.0), rel=1e-6)


def test_weight_two_slices_saturate():
    growth = slice_growth(weight_two_coefficient(), GroupPointPair(), (10.0, 20.0, 40.0))
    assert growth[0] < growth[1] < growth[2]
    assert (growth[2] - growth[1]) / growth[2] <= 0.1
