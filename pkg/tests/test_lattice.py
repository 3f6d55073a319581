import pytest

from gwenum.errors import DimensionMismatch, NotPerpendicular
from gwenum.lattice import (
    adjunction_genus,
    blowup_lattice,
    blowup_model,
    cubic_model,
    dehn_twist,
    dot,
    fiber_image,
    j_range,
    model_from_json,
    n_points,
    perp_project,
    phi_fiber,
    quadric_model,
    sub,
)

QM = quadric_model()
BM = blowup_model()
CM = cubic_model()


def test_preset_invariants():
    assert dot(QM, QM.lattice.canonical, QM.lattice.canonical) == 8
    for m, want in ((1, 8), (2, 7), (6, 3)):
        lat = blowup_lattice(m)
        assert dot(lat, lat.canonical, lat.canonical) == 9 - m
    assert dot(QM, QM.gamma, QM.gamma) == -2
    assert dot(BM, BM.gamma, BM.gamma) == -2
    assert dot(CM, CM.gamma, CM.gamma) == -2
    assert dot(QM, QM.lattice.canonical, QM.gamma) == 0
    assert dot(CM, CM.lattice.canonical, CM.gamma) == 0


def test_dot_examples():
    assert dot(QM, (1, 1), (1, 1)) == 2
    assert dot(QM, (1, -1), (1, -1)) == -2
    d = (2, -1, -1, -1, -1, -1, -1)
    assert dot(CM, d, d) == -2
    with pytest.raises(DimensionMismatch):
        dot(QM, (1, 1, 1), (1, 1))


def test_n_points():
    for a in range(1, 5):
        assert n_points(QM, (a, a)) == 4 * a - 1
    assert n_points(BM, (3, -1, -1)) == 3 * 3 - 2 * 1 - 1
    assert n_points(QM, (0, 0)) == -1


def test_adjunction_genus():
    assert adjunction_genus(QM, (1, 1)) == 0
    assert adjunction_genus(QM, (2, 2)) == 1
    assert adjunction_genus(BM, (0, 1, 0)) == 0
    for a in range(5):
        for b in range(5):
            g = adjunction_genus(QM, (a, b))
            assert g == (a - 1) * (b - 1)
            assert g.denominator == 1  # even intersection parity on the presets


def test_j_range():
    assert j_range(QM, (2, 2)) == (-1, 1)
    assert j_range(QM, (1, 1)) == (0, 0)
    assert j_range(QM, (3, 3)) == (-2, 2)
    # D = 0: the bare genus bound admits +-gamma (p_a = 0)
    assert j_range(QM, (0, 0)) == (-1, 1)
    window = j_range(QM, (4, 4))
    assert window[0] == -window[1]


def test_dehn_twist():
    assert dehn_twist(QM, (3, 1)) == (1, 3)
    assert dehn_twist(QM, (2, 2)) == (2, 2)
    assert dehn_twist(QM, dehn_twist(QM, (5, 2))) == (5, 2)
    assert dehn_twist(QM, QM.lattice.canonical) == QM.lattice.canonical
    assert dehn_twist(QM, QM.gamma) == (-1, 1)
    for d1 in ((1, 2), (3, -1), (0, 4)):
        for d2 in ((2, 2), (1, -1), (5, 0)):
            assert dot(QM, dehn_twist(QM, d1), dehn_twist(QM, d2)) == dot(QM, d1, d2)
    # blow-up reflection swaps the two exceptional classes
    assert dehn_twist(BM, (2, -2, -1)) == (2, -1, -2)
    # six-points-on-a-conic model: 2e0 - e1 - ... - e5 reflects to e6
    assert dehn_twist(CM, (2, -1, -1, -1, -1, -1, 0)) == (0, 0, 0, 0, 0, 0, 1)


def test_n_points_constant_on_gamma_orbit():
    for model, d in ((QM, (2, 2)), (BM, (3, -1, -1)), (CM, (3, -1, -1, -1, -1, -1, -1))):
        base = n_points(model, d)
        for j in range(-3, 4):
            assert n_points(model, sub(d, model.gamma, j)) == base


def test_phi_fiber():
    fib = phi_fiber(QM, (2, 2), 0)
    assert (0, (0, 0)) in fib and (1, (1, 1)) in fib and (-1, (-1, -1)) in fib
    assert (0, (1, -1)) in phi_fiber(QM, (2, 2), 1)
    for l in (0, 1, 2):
        for entry in phi_fiber(QM, (2, 2), l):
            assert fiber_image(QM, (2, 2), entry) == sub((2, 2), QM.gamma, l)
    with pytest.raises(NotPerpendicular):
        phi_fiber(QM, (2, 1), 0)


def test_perp_project():
    assert perp_project(QM, (3, 3)) == (3,)
    assert perp_project(BM, (4, -2, -2)) == (4, -2)
    assert perp_project(CM, (1, 0, 0, 0, 0, 0, -2)) == (1, 0, 0, 0, 0, 0)
    with pytest.raises(NotPerpendicular):
        perp_project(QM, (1, 0))


def test_model_json():
    for model in (QM, BM, CM):
        again = model_from_json(model.to_json())
        assert again.gamma == model.gamma
        assert again.lattice.gram == model.lattice.gram
