import random

import pytest

from quivinv.field import RATIONALS, Mat, PrimeField
from quivinv.pfaffian import gen_pf
from quivinv.poly import Polynomial, entry_var, sigma, trace
from quivinv.quiver import Arrow, Quiver, Setting, SettingError, double_setting
from quivinv.verify import (
    GroupElement,
    act,
    check_invariance,
    check_reduction_invariance,
    check_semi_invariance,
    point_assignment,
    sample_group_element,
    sample_path_tableau,
    sample_point,
    sample_setting,
    semi_invariance_factor,
)

FIELDS = [RATIONALS, PrimeField(101)]


def make_setting(vertices, dim, group, involution, arrows):
    return Setting(
        quiver=Quiver(vertices=vertices, arrows=tuple(Arrow(*a) for a in arrows)),
        dim=tuple(dim),
        group=tuple(group),
        involution=tuple(involution),
    )


def gl_loop():
    return make_setting(2, [2, 2], ["GL", "GL"], [2, 1], [("a", 1, 1, "M")])


def so2_loop():
    return make_setting(1, [2], ["SO"], [1], [("a", 1, 1, "M")])


@pytest.mark.parametrize("field", FIELDS)
@pytest.mark.parametrize("group,n", [("O", 3), ("SO", 3), ("Sp", 4), ("SL", 3), ("GL", 3)])
def test_sampler_membership(field, group, n):
    s = make_setting(1, [n], [group], [1], []) if group not in ("GL", "SL") else make_setting(
        2, [n, n], [group, group], [2, 1], []
    )
    rng = random.Random(5)
    for _ in range(5):
        g = sample_group_element(s, rng, field)
        m = g[1]
        e = Mat.identity(n, field)
        if group in ("O", "SO"):
            assert m * m.transpose() == e
        if group in ("SO", "SL"):
            assert m.det() == field.one
        if group == "Sp":
            j = Mat.symplectic(n, field)
            assert m.transpose() * j * m == j
        if group in ("GL", "SL"):
            assert g[2] == m.inv().transpose()
        assert m.det()


def test_sampler_seed_determinism():
    s = so2_loop()
    a = sample_group_element(s, random.Random(99))
    b = sample_group_element(s, random.Random(99))
    assert a.mats == b.mats
    pa = sample_point(s, random.Random(99))
    pb = sample_point(s, random.Random(99))
    assert pa.mats == pb.mats


def test_sampler_rejects_tiny_characteristic():
    class Tiny:
        characteristic = 3

    with pytest.raises(SettingError):
        sample_group_element(so2_loop(), random.Random(1), Tiny())


def test_point_lies_in_subspace():
    s = make_setting(1, [2], ["O"], [1], [("a", 1, 1, "S+"), ("b", 1, 1, "S-")])
    rng = random.Random(7)
    h = sample_point(s, rng)
    assert h["a"].is_symmetric()
    assert h["b"].is_skew()


def test_act_identity_and_composition():
    s = gl_loop()
    rng = random.Random(11)
    h = sample_point(s, rng)
    e = GroupElement((Mat.identity(2), Mat.identity(2)))
    assert act(s, e, h).mats == h.mats
    g1 = sample_group_element(s, rng)
    g2 = sample_group_element(s, rng)
    combined = GroupElement(tuple(a * b for a, b in zip(g2.mats, g1.mats)))
    assert act(s, g2, act(s, g1, h)).mats == act(s, combined, h).mats


def test_act_preserves_symmetric_loops():
    s = make_setting(1, [2], ["O"], [1], [("a", 1, 1, "S+")])
    rng = random.Random(13)
    g = sample_group_element(s, rng)
    h = sample_point(s, rng)
    assert act(s, g, h)["a"].is_symmetric()


def test_act_on_paired_symmetric_arrows_is_congruence():
    # Dual GL pair with two symmetric arrows: the action is simultaneous
    # congruence (A, B) -> (g A g^t, g B g^t) on the free vertex side.
    s = make_setting(
        2, [2, 2], ["GL", "GL"], [2, 1],
        [("a", 2, 1, "S+"), ("b", 2, 1, "S+")],
    )
    rng = random.Random(17)
    g = sample_group_element(s, rng)
    h = sample_point(s, rng)
    moved = act(s, g, h)
    for name in ("a", "b"):
        assert moved[name] == g[1] * h[name] * g[1].transpose()


def test_lemma_about_substitution_commuting_with_action():
    # For every arrow of the double, evaluating the realized matrix at a
    # moved point agrees with conjugating the evaluation, i.e. the
    # substitution commutes with the action.
    s = make_setting(
        3, [2, 2, 2], ["GL", "GL", "Sp"], [2, 1, 3],
        [("a", 1, 3, "M"), ("b", 3, 3, "M")],
    )
    d = double_setting(s)
    rng = random.Random(19)
    for _ in range(5):
        g = sample_group_element(s, rng)
        h = sample_point(s, rng)
        ginv = g.inverse()
        moved = act(s, ginv, h)
        for arrow in d.setting.quiver.arrows:
            m = d.substitution.matrix(arrow.name)
            lhs = m.evaluate(point_assignment(s, moved))
            rhs = g[arrow.head].inv() * m.evaluate(point_assignment(s, h)) * g[arrow.tail]
            assert lhs == rhs


@pytest.mark.parametrize("field", FIELDS)
def test_trace_is_invariant(field):
    s = gl_loop()
    f = trace(s.generic("a"))
    report = check_invariance(s, f, trials=10, seed=3, field=field)
    assert report.ok


def test_single_coordinate_is_not_invariant():
    s = gl_loop()
    f = Polynomial.variable(entry_var("a", 1, 1))
    report = check_invariance(s, f, trials=10, seed=3)
    assert not report.ok
    assert report.to_json()["failures"][0]["witness"]["g"]


def test_so2_pfaffian_invariant_but_reflected_by_orthogonal():
    s = so2_loop()
    f = gen_pf(s.generic("a"))
    assert check_invariance(s, f, trials=20, seed=5).ok
    # Conjugating by the reflection diag(1, -1) negates the polynomial.
    from fractions import Fraction

    refl = Mat([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(-1)]])
    rng = random.Random(23)
    h = sample_point(s, rng)
    moved = act(s, GroupElement((refl,)), h)
    assert f.evaluate(point_assignment(s, moved)) == -f.evaluate(point_assignment(s, h))


def test_semi_invariance_trivial_character():
    # Equal weights at a dual pair give character 1: plain invariance.
    from quivinv.tableau import TabArrow, Tableau

    s = make_setting(2, [2, 2], ["GL", "GL"], [2, 1], [("a", 1, 2, "M"), ("b", 2, 1, "M")])
    t = Tableau(
        columns=(2, 2),
        arrows=(TabArrow((1, 1), (2, 1)), TabArrow((1, 2), (2, 2))),
        labels=(1, 2),
    )
    # Column 1 is vertex 1, column 2 is vertex 2: arrows from column 1 to
    # column 2 need paths with head vertex 1 and tail vertex inv(2) = 1.
    report = check_semi_invariance(
        s, t, weight=(1, 1), paths={1: ("a", "b"), 2: ("a", "b")}, trials=8, seed=7
    )
    assert report.ok


def test_semi_invariance_character_formula():
    rng = random.Random(29)
    s = gl_loop()
    g = sample_group_element(s, rng)
    q = semi_invariance_factor(s, (0, 2), g, RATIONALS)
    assert q == g[1].det() ** 2
    q = semi_invariance_factor(s, (2, 0), g, RATIONALS)
    assert q == g[1].det() ** -2


def test_semi_invariance_sl_pair_weight_one():
    from quivinv.tableau import TabArrow, Tableau

    s = make_setting(2, [2, 2], ["SL", "SL"], [2, 1], [("a", 2, 1, "M")])
    t = Tableau(columns=(2,), arrows=(TabArrow((1, 1), (1, 2)),), labels=(1,))
    report = check_semi_invariance(s, t, weight=(1, 0), paths={1: ("a",)}, trials=10, seed=11)
    assert report.ok


def test_semi_invariance_gl_pair_detects_character():
    # A dual GL pair with weight difference 2: the polynomial is genuinely
    # semi-invariant, and the q-free comparison would fail.
    from quivinv.tableau import TabArrow, Tableau, bpf

    s = make_setting(2, [2, 2], ["GL", "GL"], [2, 1], [("a", 2, 1, "M"), ("b", 2, 1, "M")])
    t = Tableau(
        columns=(2, 2),
        arrows=(TabArrow((1, 1), (1, 2)), TabArrow((2, 1), (2, 2))),
        labels=(1, 2),
    )
    paths = {1: ("a",), 2: ("b",)}
    report = check_semi_invariance(s, t, weight=(2, 0), paths=paths, trials=10, seed=13)
    assert report.ok
    from quivinv.quiver import path_matrix

    f = bpf(t, [path_matrix(s, paths[1]), path_matrix(s, paths[2])])
    assert not check_invariance(s, f, trials=10, seed=13).ok


def test_semi_invariance_rejects_symplectic_weight():
    from quivinv.tableau import TabArrow, Tableau

    s = make_setting(1, [2], ["Sp"], [1], [("a", 1, 1, "M")])
    t = Tableau(columns=(2,), arrows=(TabArrow((1, 1), (1, 2)),), labels=(1,))
    with pytest.raises(SettingError):
        check_semi_invariance(s, t, weight=(1,), paths={1: ("a",)}, trials=2, seed=1)


def test_reduction_invariance_orthogonal_vertex():
    from quivinv.quiver import closed_paths, path_matrix, reduce_setting

    s = make_setting(1, [2], ["O"], [1], [("a", 1, 1, "M")])
    d = reduce_setting(s)
    # Closed path through the constant arrows of the reduction.
    f = sigma(path_matrix(d.setting, ("beta@1", "gamma@1")), 1)
    report = check_reduction_invariance(s, f, trials=10, seed=17)
    assert report.ok
    constant = Polynomial.constant(7)
    assert check_reduction_invariance(s, constant, trials=4, seed=17).ok
    bad = Polynomial.variable(entry_var("a", 1, 2))
    assert not check_reduction_invariance(s, bad, trials=10, seed=17).ok


def test_sample_setting_always_valid():
    rng = random.Random(31)
    from quivinv.quiver import validate

    for _ in range(30):
        s = sample_setting(rng)
        assert validate(s) == []


def test_sample_path_tableau_satisfies_path_conditions():
    from quivinv.tableau import is_path_tableau

    rng = random.Random(37)
    found = 0
    for _ in range(40):
        s = sample_setting(rng)
        trip = sample_path_tableau(s, rng, max_cells=6, max_path_len=2)
        if trip is None:
            continue
        t, weight, paths = trip
        ok, diags = is_path_tableau(s, t, weight, paths)
        assert ok, diags
        found += 1
    assert found >= 5
