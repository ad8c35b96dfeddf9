import random
from itertools import product

import pytest

from quivinv.poly import Polynomial, entry_var, generic_matrix
from quivinv.quiver import (
    Arrow,
    DerivedSetting,
    Quiver,
    Setting,
    SettingError,
    closed_paths,
    double_setting,
    derived_to_json,
    is_normalized,
    loop_setting,
    normalize_setting,
    path_matrix,
    paths_between,
    reduce_setting,
    setting_from_json,
    setting_to_json,
    validate,
)


def make_setting(vertices, dim, group, involution, arrows):
    return Setting(
        quiver=Quiver(vertices=vertices, arrows=tuple(Arrow(*a) for a in arrows)),
        dim=tuple(dim),
        group=tuple(group),
        involution=tuple(involution),
    )


def sp_loop_setting(kind="L+"):
    return make_setting(1, [2], ["Sp"], [1], [("a", 1, 1, kind)])


def three_vertex_example(n=2, m=2):
    # Two special-linear duals and one orthogonal vertex: arrows
    # alpha: 3 -> 1 unconstrained, beta: 1 -> 2 symmetric, gamma: 2 -> 3
    # unconstrained, with the involution swapping 1 and 2.
    return make_setting(
        3,
        [n, n, m],
        ["SL", "SL", "O"],
        [2, 1, 3],
        [("alpha", 3, 1, "M"), ("beta", 1, 2, "S+"), ("gamma", 2, 3, "M")],
    )


def five_vertex_example():
    # Mixed GL/SL/O setting whose double gains transposes for exactly the
    # three unconstrained arrows.
    return make_setting(
        5,
        [2, 2, 3, 3, 2],
        ["GL", "GL", "SL", "SL", "O"],
        [2, 1, 4, 3, 5],
        [
            ("alpha", 1, 2, "M"),
            ("beta", 2, 1, "S+"),
            ("gamma", 3, 1, "M"),
            ("delta", 5, 3, "M"),
        ],
    )


def test_valid_settings():
    assert validate(sp_loop_setting()) == []
    assert validate(three_vertex_example()) == []
    assert validate(five_vertex_example()) == []


def test_sp_odd_dimension_violates_a():
    s = make_setting(1, [3], ["Sp"], [1], [])
    violations = validate(s)
    assert [v.condition for v in violations] == ["a"]


def test_characteristic_two_violates_b():
    s = make_setting(1, [2], ["O"], [1], [])
    assert validate(s) == []
    assert [v.condition for v in validate(s, characteristic=2)] == ["b"]


def test_involution_conditions():
    s = make_setting(3, [2, 2, 2], ["GL", "GL", "GL"], [2, 3, 1], [])
    assert {v.condition for v in validate(s)} == {"c"}
    s = make_setting(2, [2, 3], ["GL", "GL"], [2, 1], [])
    assert {v.condition for v in validate(s)} == {"d"}
    s = make_setting(2, [2, 2], ["O", "O"], [2, 1], [])
    assert {v.condition for v in validate(s)} == {"e"}


def test_arrow_conditions():
    s = make_setting(2, [2, 3], ["GL", "GL"], [1, 2], [("a", 1, 2, "S+")])
    assert "f" in {v.condition for v in validate(s)}
    s = make_setting(1, [2], ["GL"], [1], [("a", 1, 1, "S+")])
    assert {v.condition for v in validate(s)} == {"g"}
    s = make_setting(1, [2], ["O"], [1], [("a", 1, 1, "L+")])
    assert {v.condition for v in validate(s)} == {"h"}
    s = make_setting(2, [2, 2], ["GL", "GL"], [1, 2], [("a", 1, 2, "S-")])
    assert "i" in {v.condition for v in validate(s)}
    s = make_setting(2, [2, 2], ["GL", "GL"], [2, 1], [("a", 1, 2, "L+")])
    assert "i" in {v.condition for v in validate(s)}


def test_structural_errors_raise():
    with pytest.raises(SettingError):
        Quiver(vertices=1, arrows=(Arrow("a", 1, 2),))
    with pytest.raises(SettingError):
        Quiver(vertices=2, arrows=(Arrow("a", 1, 2), Arrow("a", 2, 1)))
    with pytest.raises(SettingError):
        make_setting(1, [2, 2], ["GL"], [1], [])
    with pytest.raises(SettingError):
        Arrow("a,b", 1, 1)


def test_normalize_identity_when_already_split():
    s = three_vertex_example()
    out = normalize_setting(s)
    assert out.setting == s
    assert out.twins == ()


def test_normalize_gl_loop():
    s = make_setting(1, [2], ["GL"], [1], [("a", 1, 1, "M")])
    out = normalize_setting(s)
    assert out.setting.vertices == 2
    assert out.setting.involution == (2, 1)
    assert out.setting.group == ("GL", "GL")
    assert out.twins == ((1, 2),)
    assert out.setting.quiver.arrows == s.quiver.arrows
    assert validate(out.setting) == []
    # The coordinate ring is untouched.
    assert out.setting.variables() == s.variables()
    again = normalize_setting(out.setting)
    assert again.setting == out.setting


def test_normalize_leaves_orthogonal_fixed_points():
    s = make_setting(1, [2], ["O"], [1], [])
    assert normalize_setting(s).setting == s


def test_double_gains_exactly_the_unconstrained_transposes():
    s = five_vertex_example()
    d = double_setting(s)
    names = {a.name for a in d.setting.quiver.arrows}
    assert names == {"alpha", "beta", "gamma", "delta", "alpha^t", "gamma^t", "delta^t"}
    by_name = {a.name: a for a in d.setting.quiver.arrows}
    assert (by_name["alpha^t"].tail, by_name["alpha^t"].head) == (1, 2)
    assert (by_name["gamma^t"].tail, by_name["gamma^t"].head) == (2, 4)
    assert (by_name["delta^t"].tail, by_name["delta^t"].head) == (4, 5)
    assert validate(d.setting) == []


def test_double_requires_split_duals():
    s = make_setting(1, [2], ["GL"], [1], [("a", 1, 1, "M")])
    with pytest.raises(SettingError):
        double_setting(s)
    double_setting(normalize_setting(s).setting)


def test_double_rule_plain_transpose_between_non_symplectic():
    s = five_vertex_example()
    d = double_setting(s)
    assert d.substitution.matrix("alpha^t") == s.generic("alpha").transpose()


def test_double_rule_symplectic_loop():
    s = make_setting(1, [2], ["Sp"], [1], [("a", 1, 1, "M")])
    d = double_setting(s)
    from quivinv.poly import PolyMatrix

    j = PolyMatrix.symplectic(2)
    assert d.substitution.matrix("a^t") == j * s.generic("a").transpose() * j


def test_double_rule_mixed_symplectic_end():
    s = make_setting(
        3, [2, 2, 2], ["GL", "GL", "Sp"], [2, 1, 3], [("a", 1, 3, "M"), ("b", 3, 1, "M")]
    )
    d = double_setting(s)
    from quivinv.poly import PolyMatrix

    j = PolyMatrix.symplectic(2)
    # a: head 3 is symplectic, so the transpose is post-multiplied by J.
    assert d.substitution.matrix("a^t") == s.generic("a").transpose() * j
    # b: tail 3 is symplectic, so the transpose is pre-multiplied by J.
    assert d.substitution.matrix("b^t") == j * s.generic("b").transpose()


def test_loop_setting():
    s = make_setting(
        2, [2, 2], ["GL", "GL"], [2, 1], [("a", 1, 2, "M")]
    )
    d = loop_setting(s)
    names = {a.name for a in d.setting.quiver.arrows}
    assert names == {"a", "alpha@1"}
    loop = d.setting.quiver.arrow("alpha@1")
    assert loop.tail == loop.head == 1
    assert validate(d.setting) == []
    from quivinv.poly import PolyMatrix

    assert d.substitution.matrix("alpha@1") == PolyMatrix.identity(2)


def test_loop_setting_rejects_wrong_labels():
    with pytest.raises(SettingError):
        loop_setting(make_setting(1, [2], ["O"], [1], []))
    s = make_setting(2, [2, 2], ["SL", "SL"], [2, 1], [("a", 1, 2, "S+")])
    with pytest.raises(SettingError):
        loop_setting(s)


def test_reduce_orthogonal_vertex():
    s = make_setting(1, [2], ["O"], [1], [("a", 1, 1, "M")])
    d = reduce_setting(s)
    out = d.setting
    assert out.vertices == 2
    assert out.group == ("GL", "GL")
    assert out.involution == (2, 1)
    names = {a.name for a in out.quiver.arrows}
    assert names == {"a", "beta@1", "gamma@1"}
    assert validate(out) == []
    from quivinv.poly import PolyMatrix

    assert d.substitution.matrix("beta@1") == PolyMatrix.identity(2)
    assert d.substitution.matrix("gamma@1") == PolyMatrix.identity(2)
    assert d.twins == ((1, 2),)


def test_reduce_symplectic_vertex_carries_skew_form():
    s = make_setting(1, [2], ["Sp"], [1], [])
    d = reduce_setting(s)
    from quivinv.poly import PolyMatrix

    assert d.substitution.matrix("beta@1") == PolyMatrix.symplectic(2)
    assert d.substitution.matrix("gamma@1") == PolyMatrix.symplectic(2)
    assert d.setting.group == ("GL", "GL")


def test_reduce_special_orthogonal_vertex():
    s = make_setting(1, [3], ["SO"], [1], [])
    d = reduce_setting(s)
    out = d.setting
    assert out.group == ("SL", "SL")
    assert {a.name for a in out.quiver.arrows} == {"beta@1"}
    assert validate(out) == []


def test_reduce_unconstrains_symmetric_arrows():
    s = make_setting(1, [2], ["O"], [1], [("a", 1, 1, "S-")])
    d = reduce_setting(s)
    assert d.setting.quiver.arrow("a").kind == "M"
    # The substitution maps the now-free entries onto the skew generic.
    m = d.substitution.matrix("a")
    assert m == s.generic("a")
    assert m[0, 0].is_zero()


def test_reduce_all_gl_sl_is_identity_shape():
    s = three_vertex_example()
    d = reduce_setting(make_setting(2, [2, 2], ["GL", "GL"], [2, 1], [("a", 1, 2, "M")]))
    assert d.setting.vertices == 2
    assert {a.name for a in d.setting.quiver.arrows} == {"a"}


def test_closed_paths_single_loop():
    q = Quiver(vertices=1, arrows=(Arrow("a", 1, 1),))
    assert closed_paths(q, 3) == [("a",), ("a", "a"), ("a", "a", "a")]


def test_closed_paths_two_cycle():
    q = Quiver(vertices=2, arrows=(Arrow("a", 1, 2), Arrow("b", 2, 1)))
    assert closed_paths(q, 2) == [("a", "b")]


def test_closed_paths_acyclic():
    q = Quiver(vertices=2, arrows=(Arrow("a", 1, 2),))
    assert closed_paths(q, 4) == []


def test_closed_paths_match_rotation_quotient_oracle():
    # Oracle: enumerate every closed walk as a word and quotient by rotation.
    q = Quiver(
        vertices=2,
        arrows=(Arrow("a", 1, 1), Arrow("b", 1, 2), Arrow("c", 2, 1), Arrow("d", 2, 2)),
    )
    arrows = {a.name: a for a in q.arrows}
    classes = set()
    for length in range(1, 4):
        for combo in product(arrows.values(), repeat=length):
            ok = all(x.head == y.tail for x, y in zip(combo, combo[1:]))
            if ok and combo[-1].head == combo[0].tail:
                names = tuple(a.name for a in combo)
                classes.add(min(names[i:] + names[:i] for i in range(length)))
    assert set(closed_paths(q, 3)) == classes


def test_paths_between():
    q = Quiver(vertices=2, arrows=(Arrow("a", 1, 2), Arrow("b", 2, 1)))
    assert paths_between(q, 1, 2, 3) == [("a",), ("a", "b", "a")]
    assert paths_between(q, 1, 1, 2) == [("a", "b")]


def test_path_matrix_single_loop():
    s = make_setting(1, [2], ["O"], [1], [("a", 1, 1, "M")])
    assert path_matrix(s, ["a"]) == s.generic("a")


def test_path_matrix_product_order_and_dims():
    s = make_setting(
        2, [2, 3], ["GL", "GL"], [1, 2], [("a", 1, 2, "M"), ("b", 2, 1, "M")]
    )
    m = path_matrix(s, ["a", "b"])
    assert m.rows == 2 and m.cols == 2
    assert m == s.generic("b") * s.generic("a")
    with pytest.raises(SettingError):
        path_matrix(s, ["a", "a"])


def test_path_through_transpose_is_symmetric():
    # GL duals 1, 2; orthogonal middle vertex 3.  The path (a, a^t) in the
    # double composes through the self-dual vertex and its realization is
    # X^t X, a symmetric matrix.
    s = make_setting(
        3, [2, 2, 2], ["GL", "GL", "O"], [2, 1, 3], [("a", 1, 3, "M")]
    )
    d = double_setting(s)
    m = path_matrix(d, ["a", "a^t"])
    assert m == m.transpose()
    assert m == s.generic("a").transpose() * s.generic("a")


def test_substitution_is_ring_homomorphism_on_random_polys():
    rng = random.Random(57)
    s = make_setting(1, [2], ["Sp"], [1], [("a", 1, 1, "M")])
    d = double_setting(s)
    phi = d.substitution

    def rand_poly():
        p = Polynomial.zero()
        for _ in range(rng.randint(1, 4)):
            t = Polynomial.constant(rng.randint(-3, 3))
            for _ in range(rng.randint(0, 2)):
                arrow = rng.choice(["a", "a^t"])
                t = t * Polynomial.variable(entry_var(arrow, rng.randint(1, 2), rng.randint(1, 2)))
            p = p + t
        return p

    for _ in range(10):
        f, g = rand_poly(), rand_poly()
        assert phi.apply(f * g) == phi.apply(f) * phi.apply(g)
        assert phi.apply(f + g) == phi.apply(f) + phi.apply(g)


def test_double_of_double_adds_transposes_of_new_arrows():
    s = make_setting(2, [2, 2], ["GL", "GL"], [2, 1], [("a", 1, 2, "M")])
    d = double_setting(s)
    dd = double_setting(d.setting)
    names = {a.name for a in dd.setting.quiver.arrows}
    assert names == {"a", "a^t", "a^t^t", "a^t^t^t"}


def test_json_round_trip():
    s = five_vertex_example()
    doc = setting_to_json(s)
    assert setting_from_json(doc) == s
    d = double_setting(s)
    ddoc = derived_to_json(d)
    assert set(ddoc["substitution"]) == {a.name for a in d.setting.quiver.arrows}
    assert ddoc["substitution"]["alpha^t"]["kind"] == "transpose"
    assert setting_from_json(ddoc) == d.setting
