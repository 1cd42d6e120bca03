"""Bifiltered model tests: validation, planes, homology, flip, corpus."""

from __future__ import annotations

import pytest

from splicerank.corpus import corpus, corpus_names
from splicerank.errors import NoFlipData, NotQuasiIso, ShapeMismatch, UnknownName
from splicerank.homology import homology
from splicerank.model import (
    Arrow,
    BifilteredComplex,
    Generator,
    SubquotientSpec,
    flip_map,
    hf_hat,
    hfk_hat_dims,
    mirror,
    plane_i0,
    plane_j0,
    random_complex,
    reverse_orientation,
    subquotient,
    validate,
)


def trefoil() -> BifilteredComplex:
    return corpus("trefoil_staircase")


def test_validate_unknot():
    assert validate(corpus("unknot")).valid


def test_validate_trefoil_by_hand():
    c = trefoil()
    # s(b)-s(a) = 1 = 1-0 and s(b)-s(c) = -1 = 0-1
    assert validate(c).valid


def test_validate_flags_grading_violation():
    bad = BifilteredComplex(
        "bad",
        (Generator("a", -1), Generator("b", 0), Generator("c", 1)),
        (Arrow("b", "a", 0, 1), Arrow("b", "c", 0, 1)),
        {"a": "c", "c": "a", "b": "b"},
    )
    report = validate(bad)
    assert not report.valid
    assert any("grading" in v for v in report.violations)


def test_validate_flags_broken_symmetry():
    bad = BifilteredComplex(
        "bad-sigma",
        (Generator("a", -1), Generator("b", 0), Generator("c", 1)),
        (Arrow("b", "a", 1, 0), Arrow("b", "c", 0, 1)),
        {"a": "a", "b": "b", "c": "c"},  # fails s(sigma x) = -s(x)
    )
    report = validate(bad)
    assert any("negate" in v for v in report.violations)


def test_validate_flags_d_squared():
    bad = BifilteredComplex(
        "bad-d2",
        (Generator("a", 0), Generator("b", 1), Generator("c", 2)),
        (Arrow("c", "b", 1, 0), Arrow("b", "a", 1, 0)),
        None,
    )
    report = validate(bad)
    assert any("d^2" in v for v in report.violations)


def test_subquotient_unknot_j0():
    x = plane_j0(corpus("unknot"))
    assert x.basis == (("e", 0, 0),)
    assert x.boundary.is_zero()


def test_subquotient_trefoil_j0():
    x = plane_j0(trefoil())
    assert x.basis == (("a", -1, 0), ("b", 0, 0), ("c", 1, 0))
    # the j-dropping arrow b->c is excluded; d[b] = [a]
    assert x.boundary.column(x.index_of(("b", 0, 0))) == 1 << x.index_of(("a", -1, 0))
    assert x.boundary.column(x.index_of(("a", -1, 0))) == 0


def test_subquotient_trefoil_bounded_column():
    x = subquotient(trefoil(), SubquotientSpec(i_le=0, j_eq=0))
    assert x.basis == (("a", -1, 0), ("b", 0, 0))
    assert homology(x).dim == 0


def test_subquotient_requires_a_pin():
    with pytest.raises(ShapeMismatch):
        SubquotientSpec(i_le=0, j_le=0)


def test_homology_zero_boundary_and_empty():
    x = plane_i0(corpus("unknot"))
    assert homology(x).dim == 1
    empty = subquotient(trefoil(), SubquotientSpec(i_eq=99, j_eq=0))
    assert homology(empty).dim == 0


def test_homology_trefoil_j0_representative():
    x = plane_j0(trefoil())
    h = homology(x)
    assert h.dim == 1
    assert h.reps == [1 << x.index_of(("c", 1, 0))]


def test_reverse_orientation_unknot_fixed():
    u = corpus("unknot")
    assert reverse_orientation(u).generators == u.generators
    assert reverse_orientation(u).arrows == u.arrows


def test_reverse_orientation_trefoil_mechanical_swap():
    r = reverse_orientation(trefoil())
    assert {g.id: g.alexander for g in r.generators} == {"a": 1, "b": 0, "c": -1}
    assert set(r.arrows) == {Arrow("b", "a", 0, 1), Arrow("b", "c", 1, 0)}


def test_reverse_and_mirror_are_involutions():
    for name in ("trefoil_staircase", "fig8_box", "t34_staircase"):
        c = corpus(name)
        assert reverse_orientation(reverse_orientation(c)).generators == c.generators
        assert reverse_orientation(reverse_orientation(c)).arrows == c.arrows
        assert mirror(mirror(c)).generators == c.generators
        assert set(mirror(mirror(c)).arrows) == set(c.arrows)


def test_mirror_dual_hfk_dims():
    for name in ("trefoil_staircase", "t34_staircase", "fig8_box"):
        c = corpus(name)
        dims = hfk_hat_dims(c)
        dual = hfk_hat_dims(mirror(c))
        assert dual == {-s: d for s, d in dims.items()}


def test_flip_unknot_identity():
    f = flip_map(corpus("unknot"))
    assert f.matrix.dense() == [[1]]


def test_flip_trefoil_permutation():
    c = trefoil()
    f = flip_map(c)
    src, tgt, m = f.source, f.target, f.matrix
    assert m.column(src.index_of(("a", 0, 1))) == 1 << tgt.index_of(("c", 1, 0))
    assert m.column(src.index_of(("b", 0, 0))) == 1 << tgt.index_of(("b", 0, 0))
    assert m.column(src.index_of(("c", 0, -1))) == 1 << tgt.index_of(("a", -1, 0))


def test_flip_requires_data():
    c = BifilteredComplex("bare", (Generator("e", 0),), ())
    with pytest.raises(NoFlipData):
        flip_map(c)


def test_explicit_flip_must_be_quasi_iso():
    from splicerank.gf2 import Gf2Matrix

    c = BifilteredComplex("bad-flip", (Generator("e", 0),), (), None, Gf2Matrix.zeros(1, 1))
    with pytest.raises(NotQuasiIso):
        flip_map(c)


def test_corpus_catalog():
    names = corpus_names()
    assert "unknot" in names and "trefoil_staircase" in names and "fig8_box" in names
    assert len(names) >= 10
    with pytest.raises(UnknownName):
        corpus("granny")
    u = corpus("unknot")
    assert len(u.generators) == 1 and not u.arrows


def test_fig8_hfk_ranks():
    assert hfk_hat_dims(corpus("fig8_box")) == {-1: 1, 0: 3, 1: 1}
    assert hf_hat(corpus("fig8_box")).dim == 1


def test_corpus_all_valid_and_hf_matches_planes():
    for name in corpus_names():
        c = corpus(name)
        assert validate(c).valid, name
        assert homology(plane_j0(c)).dim == homology(plane_i0(c)).dim, name


def test_random_complex_deterministic_and_valid():
    a = random_complex(7, 8)
    b = random_complex(7, 8)
    assert a == b
    assert validate(a).valid
    assert hf_hat(a).dim % 2 == 1


def test_random_complexes_flip_quasi_iso():
    for seed in range(12):
        c = random_complex(seed, 8)
        f = flip_map(c)  # raises if not a chain quasi-isomorphism
        assert f.matrix.rows == f.target.dim
