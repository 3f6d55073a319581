from math import comb

import pytest

from gwenum.binomial import (
    binom,
    check_induction_step,
    check_main_identity,
    check_product,
    check_symmetry,
    check_twisted_product,
    check_useful_identity,
    fq_corpus,
    main_identity_rhs,
    multiquadratic_corpus,
    pascal_triangle,
    run_identity_suite,
    tbinom,
    tbinom_quiet,
    twisted_diagonal,
    useful_identity_rhs,
)
from gwenum.errors import DegreeLimitExceeded, DegreeMismatch, IndexOutOfRange, SquareTwistWarning
from gwenum.etale import EtaleAlgebra
from gwenum.fields import BaseField
from gwenum.gw import gw_eq, gw_form, gw_unit, parse_gw

Q = BaseField.rationals()
F3 = BaseField.finite(3)

PASCAL_ROWS = [
    ["1"] * 7,
    ["1", "1 + <u>", "3", "3 + <u>", "5", "5 + <u>"],
    ["1", "3", "6", "10", "15"],
    ["1", "3 + <u>", "10", "20"],
    ["1", "5", "15"],
    ["1", "5 + <u>"],
    ["1"],
]


def test_pascal_triangle_q3():
    rows = pascal_triangle(3, 6)
    assert sum(len(r) for r in rows) == 28
    for j, row in enumerate(rows):
        for idx, val in enumerate(row):
            assert gw_eq(val, parse_gw(PASCAL_ROWS[j][idx], F3)), (j, idx)


def test_twisted_diagonal_values():
    wants = ["2", "5 + <u>", "20", "69 + <u>"]
    for q in (3, 5):
        F = BaseField.finite(q)
        for v, w in zip(twisted_diagonal(q, 4), wants):
            assert gw_eq(v, parse_gw(w, F))


def test_binom_basics():
    a = EtaleAlgebra.of(F3, [2, 3, 1])
    for j in range(a.degree + 1):
        assert binom(a, j).rank == comb(a.degree, j)
    assert gw_eq(binom(a, 0), gw_unit(F3, 1))
    assert gw_eq(binom(EtaleAlgebra.of(Q, []), 0), gw_unit(Q, 1))
    with pytest.raises(IndexOutOfRange):
        binom(a, 7)
    with pytest.raises(DegreeLimitExceeded):
        binom(EtaleAlgebra.of(F3, [13]), 2)


def test_tbinom_basics():
    a = EtaleAlgebra.of(F3, [4])
    assert tbinom(a, 2, "u").rank == comb(4, 2)
    with pytest.raises(DegreeMismatch):
        tbinom(a, 1, "u")
    with pytest.warns(SquareTwistWarning):
        v = tbinom(a, 2, 1)
    assert gw_eq(v, binom(a, 2))
    # over Q with the twist class outside the algebra's span
    v = tbinom(EtaleAlgebra.of(Q, [2]), 1, -1)
    assert gw_eq(v, gw_form(Q, 2, -1))
    # twist on a fully split algebra: the quadratic trace form appears
    v = tbinom(EtaleAlgebra.split(Q, 2), 1, 5)
    assert gw_eq(v, gw_form(Q, 2, 10))


def test_symmetry_examples():
    a3 = EtaleAlgebra.of(F3, [3])
    assert check_symmetry(a3, 1)
    assert gw_eq(binom(a3, 1), binom(a3, 2))
    a = EtaleAlgebra.of(Q, [2, None])
    assert check_symmetry(a, 0)
    assert check_symmetry(a, 1)


def test_product_examples():
    a1 = a2 = EtaleAlgebra.of(F3, [2])
    assert check_product(a1, a2, 2)
    assert binom(a1 * a2, 2).rank == 6
    # one-point factor reduces to the Pascal recurrence
    a = EtaleAlgebra.of(F3, [3])
    pt = EtaleAlgebra.of(F3, [1])
    for j in range(4):
        assert check_product(a, pt, j)
    assert check_product(EtaleAlgebra.of(Q, [2]), EtaleAlgebra.of(Q, [3]), 2)


def test_twisted_product_examples():
    e = f = EtaleAlgebra.of(F3, [2])
    assert check_twisted_product(e, f, "u")
    # empty second factor: degenerate identity
    assert check_twisted_product(EtaleAlgebra.of(F3, [4]), EtaleAlgebra.of(F3, []), "u")
    assert check_twisted_product(EtaleAlgebra.of(Q, [2]), EtaleAlgebra.split(Q, 2), -1)


def test_main_identity_examples():
    # sigma = F_{q^2}, j = 1, d = u: rhs reduces to 2<1>
    rhs = main_identity_rhs(EtaleAlgebra.of(F3, [2]), 1, "u")
    assert gw_eq(rhs, 2 * gw_unit(F3, 1))
    assert check_main_identity(EtaleAlgebra.of(F3, [2]), 1, "u")
    # sigma = F_{q^4}, j = 2: the identity reproduces the twisted value
    rhs = main_identity_rhs(EtaleAlgebra.of(F3, [4]), 2, "u")
    assert gw_eq(rhs, parse_gw("5 + <u>", F3))
    assert check_main_identity(EtaleAlgebra.of(Q, [2, 3]), 2, -1)


def test_useful_identity_examples():
    sigma = EtaleAlgebra.of(F3, [2])
    assert check_useful_identity(sigma, 1, "u")
    # square twist degenerates to binom = binom
    assert gw_eq(useful_identity_rhs(sigma, 1, 1), binom(sigma, 1))
    assert check_useful_identity(sigma, 1, 1)
    mixed = EtaleAlgebra.of(Q, [-1, None, None])
    assert check_useful_identity(mixed, 2, 2)


def test_induction_step():
    assert check_induction_step(EtaleAlgebra.of(Q, [2]), EtaleAlgebra.of(Q, [3]), -1)
    assert check_induction_step(EtaleAlgebra.of(F3, [2, 1, 1]), EtaleAlgebra.of(F3, [2]), "u")
    assert check_induction_step(EtaleAlgebra.of(Q, []), EtaleAlgebra.of(Q, [5]), 2)
    with pytest.raises(DegreeMismatch):
        check_induction_step(EtaleAlgebra.of(Q, [2]), EtaleAlgebra.of(Q, [3, 5]), -1)


def test_rank_laws():
    for a in (EtaleAlgebra.of(F3, [4, 2]), EtaleAlgebra.of(Q, [2, 3, None])):
        n = a.degree
        for j in range(n + 1):
            assert binom(a, j).rank == comb(n, j)
    for j in (1, 2, 3):
        a = EtaleAlgebra.of(F3, [2 * j])
        assert tbinom_quiet(a, j, "u").rank == comb(2 * j, j)


def test_small_suites_clean():
    rep = run_identity_suite(fq_corpus(3, 6), "u")
    assert rep.ok and rep.checks_run > 200
    rep = run_identity_suite(multiquadratic_corpus(Q, (-1, 2, 3, 5), 4), -1)
    assert rep.ok and rep.checks_run > 150


def test_corpus_shapes():
    corpus = fq_corpus(3, 5)
    assert len(corpus) == 1 + 2 + 3 + 5 + 7  # partition counts
    degrees = {a.degree for a in multiquadratic_corpus(Q, (-1, 2), 4)}
    assert degrees == {1, 2, 3, 4}
