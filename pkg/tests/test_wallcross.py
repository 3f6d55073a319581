import json
import random
import warnings

import pytest

from gwenum.errors import (
    DegreeMismatch,
    MissingEntry,
    MissingEntryWarning,
    NotPerpendicular,
    ParityViolation,
    ProfileInconsistent,
    UnsupportedExtension,
)
from gwenum.etale import EtaleAlgebra, FiniteFactor
from gwenum.fields import BaseField, sq_class
from gwenum.gw import gw_eq, gw_unit, gw_zero, hyperbolic, parse_gw
from gwenum.lattice import quadric_model
from gwenum.wallcross import (
    InvariantTable,
    ProfileData,
    ProfileRecord,
    WallCrossDiagnostics,
    blowup_general,
    check_surgery_consistency,
    conjectural_blowup_reduction,
    degeneration_sum,
    dehn_check,
    euler_char_quadric,
    euler_diff,
    quadric_general,
    quadric_split,
    random_profile,
    wall_cross,
    welschinger_reduction,
)
from gwenum import seeds

Q = BaseField.rationals()
R = BaseField.real_closed()
F5 = BaseField.finite(5)


def quadric_table_a2():
    table = InvariantTable(quadric_model(), Q)
    sig = EtaleAlgebra.split(Q, 7)
    table.put((2, 2), sig, quadric_split(Q, 12, 8), "derived-base")
    table.put((3, 1), sig, gw_unit(Q, 1), "derived-base")
    table.put((1, 3), sig, gw_unit(Q, 1), "derived-base")
    table.put((4, 0), sig, gw_zero(Q), "genus-bound")
    table.put((0, 4), sig, gw_zero(Q), "genus-bound")
    return table, sig


def test_table_policies():
    table, sig = quadric_table_a2()
    with pytest.warns(MissingEntryWarning):
        v = table.get((5, -1), EtaleAlgebra.split(Q, 7))
    assert v.is_zero_map()
    table.missing_policy = "error"
    with pytest.raises(MissingEntry):
        table.get((5, -1), EtaleAlgebra.split(Q, 7))
    with pytest.raises(DegreeMismatch):
        table.get((2, 2), EtaleAlgebra.split(Q, 5))
    with pytest.raises(DegreeMismatch):
        table.put((2, 2), EtaleAlgebra.split(Q, 6), gw_unit(Q, 1))


def test_wall_cross_row_a2():
    table, sig = quadric_table_a2()
    for d in (-1, 2, 3):
        got = wall_cross(table, (2, 2), sig, d)
        assert gw_eq(got, parse_gw("6<1> + <2> + <2d> + 2h", Q, d=d))
        assert gw_eq(got, parse_gw("7<2> + <2d> + 2h", Q, d=d))
        assert got.rank == 12  # rank is preserved by wall crossing
    # square twist: the correction factor vanishes
    assert gw_eq(wall_cross(table, (2, 2), sig, 1), table.get((2, 2), sig))
    with pytest.raises(NotPerpendicular):
        wall_cross(table, (2, 1), EtaleAlgebra.split(Q, 5), -1)


def test_wall_cross_gamma_sign_independence():
    # replaying the sum with the reflected vanishing cycle gives the same value
    table, sig = quadric_table_a2()
    from gwenum.lattice import SurgeryModel

    flipped = SurgeryModel(table.model.lattice, (-1, 1), table.model.perp_basis, "quadric-flipped")
    table2 = InvariantTable(flipped, Q, entries=table.entries, algebras=table.algebras)
    for d in (-1, 2, 3):
        assert gw_eq(wall_cross(table, (2, 2), sig, d), wall_cross(table2, (2, 2), sig, d))


def test_wall_cross_reproduces_published_rows_a123():
    # the seeded base table feeds the formula; rows a = 1..3 come out
    table = seeds.quadric_base_table()
    rows = {1: "<1>", 2: "6<1> + <2> + <2d> + 2h", 3: "576<1> + 255<2> + 255<2d> + 1212h"}
    for d in (-1, 2, 3):
        for a, s in rows.items():
            sig = EtaleAlgebra.split(Q, 4 * a - 1)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", MissingEntryWarning)
                got = wall_cross(table, (a, a), sig, d)
            assert gw_eq(got, parse_gw(s, Q, d=d)), (a, d)
            assert got.rank == table.get((a, a), sig).rank


def test_wall_cross_a1_all_corrections_missing():
    table = InvariantTable(quadric_model(), Q)
    sig = EtaleAlgebra.split(Q, 3)
    table.put((1, 1), sig, gw_unit(Q, 1), "derived-base")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MissingEntryWarning)
        diag = WallCrossDiagnostics()
        got = wall_cross(table, (1, 1), sig, -1, diag)
    assert gw_eq(got, gw_unit(Q, 1))
    assert diag.genus_window == (0, 0)


def test_closed_forms():
    assert gw_eq(quadric_split(Q, 1, 1), gw_unit(Q, 1))
    assert gw_eq(quadric_split(Q, 12, 8), 8 * gw_unit(Q, 1) + 2 * hyperbolic(Q))
    assert quadric_split(Q, 0, 0).is_zero_map()
    with pytest.raises(ParityViolation):
        quadric_split(Q, 3, 2)
    with pytest.raises(ParityViolation):
        quadric_split(Q, 2, 4)
    # general form reproduces the published quadric rows
    rows = {
        2: (12, 8, 6, "6<1> + <2> + <2d> + 2h"),
        3: (3510, 1086, 576, "576<1> + 255<2> + 255<2d> + 1212h"),
        4: (6508640, 819200, 294336, "294336<1> + 262432<2> + 262432<2d> + 2844720h"),
    }
    for d in (-1, 2, 3):
        for a, (gwn, wp, wm, s) in rows.items():
            assert gw_eq(quadric_general(Q, gwn, wp, wm, d), parse_gw(s, Q, d=d)), (a, d)
    # d = 1 collapses to the split form
    assert gw_eq(quadric_general(Q, 12, 8, 6, 1), quadric_split(Q, 12, 8))
    assert gw_eq(blowup_general(Q, 3510, 1086, 576, -1), quadric_general(Q, 3510, 1086, 576, -1))
    with pytest.raises(ParityViolation):
        quadric_general(Q, 12, 8, 5, -1)
    assert quadric_general(Q, 0, 0, 0, -1).is_zero_map()


def test_welschinger_reduction():
    table = seeds.welschinger_table()
    # a = 1: no conics to subtract; the line count survives any twist
    for d in (1, -1, 2):
        v = welschinger_reduction(table, 1, EtaleAlgebra.split(Q, 0), d)
        assert gw_eq(v, gw_unit(Q, 1))
    # a = 2: same shape one degree up
    v = welschinger_reduction(table, 2, EtaleAlgebra.split(Q, 3), -1)
    assert gw_eq(v, gw_unit(Q, 1))
    with pytest.raises(DegreeMismatch):
        welschinger_reduction(table, 2, EtaleAlgebra.split(Q, 2), -1)


def test_conjectural_reduction_runs_but_is_flagged():
    assert "CONJECTURAL" in conjectural_blowup_reduction.__doc__
    table = seeds.welschinger_table()
    v = conjectural_blowup_reduction(table, (1, 0), (0, 1), EtaleAlgebra.split(Q, 0), -1)
    assert v.rank == 1


def test_euler_identities():
    for d in (-1, 2, 3):
        diff = euler_diff(Q, d)
        want = gw_unit(Q, -1) * (gw_unit(Q, 2) - gw_unit(Q, sq_class(Q, 2) * sq_class(Q, d)))
        assert gw_eq(diff, want)
        assert gw_eq(diff, euler_char_quadric(Q, 1) - euler_char_quadric(Q, d))
    assert gw_eq(euler_char_quadric(Q, 1), 2 * hyperbolic(Q))
    assert euler_diff(Q, 1).is_zero_map()
    assert gw_eq(euler_char_quadric(Q, -1), hyperbolic(Q) + 2 * gw_unit(Q, 2))


def test_dehn_check_seeded():
    table = seeds.quadric_base_table()
    for a in range(7):
        for b in range(7):
            if not (0 < a + b <= 6):
                continue
            sig = EtaleAlgebra.split(Q, 2 * (a + b) - 1)
            assert dehn_check(table, (a, b), sig), (a, b)
    b2 = seeds.blowup2_dehn_table()
    assert dehn_check(b2, (2, -2, -1), EtaleAlgebra.split(Q, 2))
    assert dehn_check(b2, (1, -1, 0), EtaleAlgebra.split(Q, 1))
    with pytest.raises(MissingEntry):
        dehn_check(table, (7, 0), EtaleAlgebra.split(Q, 13))


def test_degeneration_sum_examples():
    assert degeneration_sum(ProfileData(Q, ()), 1, 0).is_zero_map()
    v = 3 * gw_unit(Q, 2)
    prof = ProfileData(Q, (ProfileRecord(None, EtaleAlgebra.split(Q, 2), 1, v),))
    assert gw_eq(degeneration_sum(prof, 1, 0), 2 * gw_unit(Q, 1) * v)
    # shifted split sum picks binom(sigma', i - l)
    assert gw_eq(degeneration_sum(prof, 1, 1), v)  # binom(k^2, 0) = <1>
    assert degeneration_sum(prof, 1, 2).is_zero_map()
    # twisted single record over Q
    prof2 = ProfileData(Q, (ProfileRecord(None, EtaleAlgebra.of(Q, [2]), 1, v),))
    got = degeneration_sum(prof2, -1, 0)
    from gwenum.binomial import tbinom_quiet

    want = tbinom_quiet(EtaleAlgebra.of(Q, [2]), 1, -1) * gw_unit(Q, -1) * v
    assert gw_eq(got, want)
    with pytest.raises(ProfileInconsistent):
        degeneration_sum(prof2, -1, 1)


def test_profile_validation():
    with pytest.raises(ProfileInconsistent):
        ProfileData(Q, (ProfileRecord(None, EtaleAlgebra.split(Q, 3), 1, gw_unit(Q, 1)),))
    with pytest.raises(UnsupportedExtension):
        ProfileData(Q, (ProfileRecord(FiniteFactor(2), EtaleAlgebra.split(Q, 2), 1, gw_unit(Q, 1)),))
    F25 = BaseField.finite(25)
    with pytest.raises(ProfileInconsistent):
        ProfileData(F5, (ProfileRecord(FiniteFactor(2), EtaleAlgebra.split(F5, 2), 1, gw_unit(F25, 1)),))
    # a valid record over the quadratic extension of F_5
    ProfileData(F5, (ProfileRecord(FiniteFactor(2), EtaleAlgebra.split(F25, 2), 1, gw_unit(F25, "u")),))


def test_surgery_consistency_fuzz():
    rng = random.Random(2024)
    for base, twists in ((F5, ["u"]), (Q, [-1, 2]), (R, [-1])):
        for d in twists:
            for _ in range(40):
                profile = random_profile(rng, base)
                assert check_surgery_consistency(profile, d), (base, d, profile)
    assert check_surgery_consistency(ProfileData(Q, ()), -1)


def test_table_json_round_trip():
    table, sig = quadric_table_a2()
    blob = json.dumps(table.to_json())
    again = InvariantTable.from_json(json.loads(blob))
    assert again.entries == table.entries
    assert again.sources == table.sources
    assert json.dumps(again.to_json()) == blob
