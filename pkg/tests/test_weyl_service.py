"""
Tests for root data, alcove geometry, folding and parabolic Weyl groups.
"""

import random
from fractions import Fraction

import pytest

from loopk.errors import ImproperIndexError, InputError, InvalidCartanError, UnsupportedTypeError
from loopk.services.weyl_service import (
    AlcovePoint,
    ParabolicIndex,
    build_root_datum,
    cartan_matrix,
    create_weyl_service,
    root_datum_for,
)


@pytest.mark.parametrize("group,expected", [
    ("su2", 2), ("su3", 3), ("su4", 4), ("g2", 4),
    ("spin5", 3), ("sp2", 3), ("sp3", 4), ("spin7", 5),
    ("spin8", 6), ("f4", 9),
])
def test_dual_coxeter_numbers(group, expected):
    assert root_datum_for(group).dual_coxeter == expected


def test_su3_highest_root():
    datum = root_datum_for("su3")
    assert datum.cartan == ((2, -1), (-1, 2))
    assert datum.highest_root == (1, 1)
    assert len(datum.positive_roots) == 3


def test_g2_root_count():
    assert len(root_datum_for("g2").positive_roots) == 6


def test_explicit_cartan_matches_alias():
    assert build_root_datum(cartan_matrix("B2")).comarks == root_datum_for("spin5").comarks


@pytest.mark.parametrize("cartan,error", [
    ([[2, -3], [-3, 2]], InvalidCartanError),
    ([[2, -2], [-2, 2]], InvalidCartanError),
    ([[2, -1], [0, 2]], InvalidCartanError),
    ([[3, -1], [-1, 2]], InvalidCartanError),
    ([[2, 0], [0, 2]], UnsupportedTypeError),
])
def test_invalid_cartan_matrices(cartan, error):
    with pytest.raises(error):
        build_root_datum(cartan)


def test_unknown_group():
    with pytest.raises(UnsupportedTypeError):
        root_datum_for("e8")


# ============================================================================
# ALCOVE
# ============================================================================

@pytest.mark.parametrize("point,face", [
    ("1/2", set()),
    ("0", {1}),
    ("1", {0}),
])
def test_su2_faces(point, face):
    weyl = create_weyl_service("su2")
    assert weyl.alcove_face(AlcovePoint.parse(point)).indices == frozenset(face)


def test_su3_faces():
    weyl = create_weyl_service("su3")
    assert weyl.alcove_face(AlcovePoint.parse("0,0")).indices == frozenset({1, 2})
    assert weyl.alcove_face(AlcovePoint.parse("1/3,1/3")).indices == frozenset()
    assert weyl.alcove_face(AlcovePoint.parse("1/2,1/2")).indices == frozenset({0})
    assert weyl.alcove_face(AlcovePoint.parse("1,0")).indices == frozenset({0, 2})
    assert weyl.alcove_face(AlcovePoint.parse("1,1")) is None


def test_point_rank_must_match():
    with pytest.raises(InputError):
        create_weyl_service("su3").alcove_face(AlcovePoint.parse("1/2"))


# ============================================================================
# FOLDING
# ============================================================================

@pytest.mark.parametrize("point,folded,word", [
    ("1.7", Fraction(3, 10), (0,)),
    ("-0.3", Fraction(3, 10), (1,)),
    ("0.25", Fraction(1, 4), ()),
])
def test_su2_fold(point, folded, word):
    weyl = create_weyl_service("su2")
    result, path = weyl.affine_fold(AlcovePoint.parse(point))
    assert result.coords == (folded,)
    assert path == word


def test_fold_render_is_decimal():
    weyl = create_weyl_service("su2")
    result, _ = weyl.affine_fold(AlcovePoint.parse("1.7"))
    assert result.render() == "0.3"


@pytest.mark.parametrize("group", ["su2", "su3", "g2", "spin5"])
def test_fold_lands_in_alcove_and_word_recovers_point(group):
    weyl = create_weyl_service(group)
    rng = random.Random(42)
    for _ in range(30):
        coords = [Fraction(rng.randint(-40, 40), rng.randint(1, 7)) for _ in range(weyl.rank)]
        point = AlcovePoint(tuple(coords))
        folded, word = weyl.affine_fold(point)
        assert weyl.contains(folded)
        assert weyl.apply_word(word, folded) == point


def random_point(rng: random.Random, rank: int, spread: int = 6, denominator: int = 4) -> AlcovePoint:
    return AlcovePoint(tuple(Fraction(rng.randint(-spread, spread), rng.randint(1, denominator)) for _ in range(rank)))


def alcove_points_in_orbit(weyl, point: AlcovePoint, depth: int):
    """Every point of the closed alcove reachable from `point` by at most `depth` reflections"""
    seen = {point}
    frontier = [point]
    for _ in range(depth):
        following = []
        for current in frontier:
            for i in range(weyl.rank + 1):
                image = weyl.reflect_point(i, current)
                if image not in seen:
                    seen.add(image)
                    following.append(image)
        frontier = following
    return {p for p in seen if weyl.contains(p)}


@pytest.mark.parametrize("group", ["su2", "su3", "spin5", "g2"])
def test_folding_is_idempotent(group):
    weyl = create_weyl_service(group)
    rng = random.Random(7)
    for _ in range(30):
        folded, _ = weyl.affine_fold(random_point(rng, weyl.rank, spread=40, denominator=7))
        assert weyl.affine_fold(folded) == (folded, ())


@pytest.mark.parametrize("group", ["su2", "su3", "spin5", "g2"])
def test_orbit_meets_the_alcove_exactly_once(group):
    weyl = create_weyl_service(group)
    rng = random.Random(11)
    depth = 8
    checked = 0
    for _ in range(40):
        point = random_point(rng, weyl.rank, spread=3, denominator=2)
        folded, word = weyl.affine_fold(point)
        if len(word) > depth:
            continue
        assert alcove_points_in_orbit(weyl, point, depth) == {folded}
        checked += 1
    assert checked > 0


@pytest.mark.parametrize("group", ["su2", "su3", "spin5", "g2"])
def test_face_is_constant_on_stabilizer_and_orbit(group):
    weyl = create_weyl_service(group)
    rng = random.Random(13)
    for _ in range(15):
        p, _ = weyl.affine_fold(random_point(rng, weyl.rank, denominator=2))
        face = weyl.alcove_face(p)
        for element in weyl.weyl_group(face):
            moved = weyl.apply_word(element.word, p)
            assert moved == p
            assert weyl.alcove_face(moved) == face
        word = [rng.randint(0, weyl.rank) for _ in range(6)]
        refolded, _ = weyl.affine_fold(weyl.apply_word(word, p))
        assert refolded == p
        assert weyl.alcove_face(refolded) == face


@pytest.mark.parametrize("group", ["su2", "su3", "spin5", "g2"])
def test_parabolic_orders_divide_along_inclusions(group):
    weyl = create_weyl_service(group)
    poset = weyl.parabolic_poset()
    orders = {index: len(weyl.weyl_group(index)) for index in poset.elements}
    for smaller, larger in poset.relations:
        assert orders[larger] % orders[smaller] == 0


def test_reflections_are_involutions():
    weyl = create_weyl_service("su3")
    point = AlcovePoint.parse("2/5,-7/3")
    for i in range(3):
        assert weyl.reflect_point(i, weyl.reflect_point(i, point)) == point


# ============================================================================
# PARABOLIC WEYL GROUPS AND THE POSET
# ============================================================================

@pytest.mark.parametrize("group,indices,order", [
    ("su2", set(), 1),
    ("su2", {1}, 2),
    ("su2", {0}, 2),
    ("su3", {1, 2}, 6),
    ("su3", {0, 1}, 6),
    ("su3", {0}, 2),
    ("spin5", {1, 2}, 8),
    ("g2", {1, 2}, 12),
])
def test_weyl_group_orders(group, indices, order):
    weyl = create_weyl_service(group)
    assert len(weyl.weyl_group(ParabolicIndex(frozenset(indices), weyl.rank))) == order


def test_weyl_group_words_are_reduced():
    weyl = create_weyl_service("su3")
    group = weyl.weyl_group(ParabolicIndex(frozenset({1, 2}), 2))
    assert max(g.length for g in group) == 3
    assert sum(1 for g in group if g.sign == 1) == 3


def test_full_index_set_is_improper():
    with pytest.raises(ImproperIndexError):
        ParabolicIndex.parse("0,1", 1)


@pytest.mark.parametrize("text,expected", [
    ("{0,2}", {0, 2}),
    ("1", {1}),
    ("", set()),
    ("none", set()),
])
def test_parabolic_index_parse(text, expected):
    assert ParabolicIndex.parse(text, 2).indices == frozenset(expected)


def test_su3_poset():
    poset = create_weyl_service("su3").parabolic_poset()
    assert len(poset.elements) == 7
    assert len(poset.covers) == 9
    assert len(poset.relations) == 12
    assert poset.to_dict()["relations"] == 12


def test_rank_three_poset_size():
    assert len(create_weyl_service("su4").parabolic_poset().elements) == 15
