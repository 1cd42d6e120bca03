"""Mapping cones for integer surgery and the two homology exact triangles.

For each spin-c level s the comparison map

    i_n^s : C{i<=s, j=0} (+) C{i=0, j<=n-s-1}  ->  C{j=0},
    (u, v) |-> u + flip(v)

has a cone whose homology is the surgery group H_n(K, s) for n in {0, 1};
the n = infinity group is the one-spot plane C{i=0, j=-s}.  The short exact
sequences relating the n = 0 and n = 1 cones give six maps per level:
unbarred f_inf, f_0, f_1 and barred counterparts shifted by one level.
Connecting maps are computed by an explicit chain-level zig-zag.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable

from .errors import NormalizationFailure, ShapeMismatch, WindowNotStable
from .gf2 import BlockGrid, Gf2Matrix
from .homology import ChainComplexF2, HomologySpace, homology, induced_matrix
from .model import BifilteredComplex, FlipMap, SubquotientSpec, flip_map, require_valid, subquotient

INF = "inf"


@dataclass(frozen=True)
class MappingCone:
    n: int
    s: int
    first: ChainComplexF2   # C{i<=s, j=0}
    second: ChainComplexF2  # C{i=0, j<=n-s-1}
    codomain: ChainComplexF2  # C{j=0}
    chain_map: Gf2Matrix    # i_n^s on the concatenated domain
    cone: ChainComplexF2    # labels ("u",lbl) | ("v",lbl) | ("w",lbl)


def label_matrix(
    source: ChainComplexF2,
    target: ChainComplexF2,
    fn: Callable[[Hashable], Hashable | None],
) -> Gf2Matrix:
    """Matrix of the linear map sending each basis label through fn (None kills)."""
    tgt = {lbl: k for k, lbl in enumerate(target.basis)}
    entries = []
    for col, lbl in enumerate(source.basis):
        image = fn(lbl)
        if image is not None:
            entries.append((tgt[image], col))
    return Gf2Matrix.from_entries(target.dim, source.dim, entries)


def relabel_vector(
    vec: int,
    source: ChainComplexF2,
    target: ChainComplexF2,
    fn: Callable[[Hashable], Hashable | None],
) -> int:
    tgt = {lbl: k for k, lbl in enumerate(target.basis)}
    out = 0
    v = vec
    while v:
        low = v & -v
        idx = low.bit_length() - 1
        v ^= low
        image = fn(source.basis[idx])
        if image is not None:
            out ^= 1 << tgt[image]
    return out


def build_cone(complex_: BifilteredComplex, n: int, s: int, flip: FlipMap | None = None) -> MappingCone:
    """Cone of i_n^s; the first summand maps by inclusion, the second by the flip."""
    if n not in (0, 1):
        raise ShapeMismatch(f"cone surgery coefficient must be 0 or 1, got {n!r}")
    if flip is None:
        flip = flip_map(complex_)
    first = subquotient(complex_, SubquotientSpec(i_le=s, j_eq=0))
    second = subquotient(complex_, SubquotientSpec(i_eq=0, j_le=n - s - 1))
    codomain = flip.target
    flip_cols = {lbl: flip.matrix.column(k) for k, lbl in enumerate(flip.source.basis)}
    cod_index = {lbl: k for k, lbl in enumerate(codomain.basis)}

    dom_dim = first.dim + second.dim
    map_bits_by_col = []
    for lbl in first.basis:
        map_bits_by_col.append(1 << cod_index[lbl])
    for lbl in second.basis:
        map_bits_by_col.append(flip_cols[lbl])
    chain_map = Gf2Matrix.from_columns(map_bits_by_col, codomain.dim)

    labels = (
        tuple(("u", lbl) for lbl in first.basis)
        + tuple(("v", lbl) for lbl in second.basis)
        + tuple(("w", lbl) for lbl in codomain.basis)
    )
    total = dom_dim + codomain.dim
    bits = [0] * total

    def put(col: int, row: int) -> None:
        bits[row] |= 1 << col

    for c in range(first.dim):
        col_bd = first.boundary.column(c)
        for r in _bit_positions(col_bd):
            put(c, r)
        for r in _bit_positions(map_bits_by_col[c]):
            put(c, dom_dim + r)
    for c in range(second.dim):
        col_bd = second.boundary.column(c)
        for r in _bit_positions(col_bd):
            put(first.dim + c, first.dim + r)
        for r in _bit_positions(map_bits_by_col[first.dim + c]):
            put(first.dim + c, dom_dim + r)
    for c in range(codomain.dim):
        for r in _bit_positions(codomain.boundary.column(c)):
            put(dom_dim + c, dom_dim + r)

    cone = ChainComplexF2(labels, Gf2Matrix(total, total, bits))
    return MappingCone(n, s, first, second, codomain, chain_map, cone)


def _bit_positions(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def spot_plane(complex_: BifilteredComplex, s: int) -> ChainComplexF2:
    """C{i=0, j=-s}, the knot Floer group at Alexander grading s."""
    return subquotient(complex_, SubquotientSpec(i_eq=0, j_eq=-s))


class SurgeryTriple:
    """All per-level surgery groups and triangle maps of one complex.

    Per-level maps live in the dictionaries keyed by s; ``f_inf[s]`` maps
    H0(s) -> H1(s) while the barred families carry the level shift:
    ``fbar_inf[s]``: H0(s-1) -> H1(s) and ``fbar_1[s]``: Hinf(s) -> H0(s-1).
    Totals are assembled over the support window in increasing s.
    """

    def __init__(self, complex_: BifilteredComplex):
        require_valid(complex_)
        self.complex = complex_
        self.flip = flip_map(complex_)
        lo, hi = complex_.grading_range()
        self.window = range(lo - 1, hi + 2)

        self.cones0: dict[int, MappingCone] = {}
        self.cones1: dict[int, MappingCone] = {}
        self.spots: dict[int, ChainComplexF2] = {}
        self.H0: dict[int, HomologySpace] = {}
        self.H1: dict[int, HomologySpace] = {}
        self.Hinf: dict[int, HomologySpace] = {}
        for s in self.window:
            self.cones0[s] = build_cone(complex_, 0, s, self.flip)
            self.cones1[s] = build_cone(complex_, 1, s, self.flip)
            self.spots[s] = spot_plane(complex_, s)
            self.H0[s] = homology(self.cones0[s].cone)
            self.H1[s] = homology(self.cones1[s].cone)
            self.Hinf[s] = homology(self.spots[s])
        self._check_window_stability()

        self.f_inf: dict[int, Gf2Matrix] = {}
        self.f0: dict[int, Gf2Matrix] = {}
        self.f1: dict[int, Gf2Matrix] = {}
        self.fbar_inf: dict[int, Gf2Matrix] = {}
        self.fbar0: dict[int, Gf2Matrix] = {}
        self.fbar1: dict[int, Gf2Matrix] = {}
        for s in self.window:
            self._build_level_maps(s)

    # -- construction helpers --------------------------------------------

    def _check_window_stability(self) -> None:
        lo, hi = self.window.start, self.window.stop - 1
        for s in (lo - 2, lo - 1, hi + 1, hi + 2):
            for n in (0, 1):
                cone = build_cone(self.complex, n, s, self.flip)
                if homology(cone.cone).dim:
                    raise WindowNotStable(f"H_{n}({s}) nonzero outside window")
            if homology(spot_plane(self.complex, s)).dim:
                raise WindowNotStable(f"H_inf({s}) nonzero outside window")

    def _build_level_maps(self, s: int) -> None:
        cone0, cone1 = self.cones0[s], self.cones1[s]
        spot = self.spots[s]

        # unbarred: inclusion of cones, projection to the quotient spot,
        # connecting map by zig-zag
        inc = label_matrix(cone0.cone, cone1.cone, lambda lbl: lbl)
        self.f_inf[s] = induced_matrix(inc, self.H0[s], self.H1[s])

        def project_v(lbl):
            tag, plane = lbl
            if tag == "v" and plane[2] == -s:
                return plane
            return None

        proj = label_matrix(cone1.cone, spot, project_v)
        self.f0[s] = induced_matrix(proj, self.H1[s], self.Hinf[s])

        cols = []
        for rep in self.Hinf[s].reps:
            lifted = relabel_vector(rep, spot, cone1.cone, lambda lbl: ("v", lbl))
            bd = cone1.cone.boundary.mul_vec(lifted)
            back = relabel_vector(bd, cone1.cone, cone0.cone, lambda lbl: lbl)
            cols.append(self.H0[s].coords(back))
        self.f1[s] = Gf2Matrix.from_columns(cols, self.H0[s].dim)

        # barred: the n = 0 cone one level down includes into the n = 1 cone
        prev = s - 1
        if prev in self.window:
            inc_bar = label_matrix(self.cones0[prev].cone, cone1.cone, lambda lbl: lbl)
            self.fbar_inf[s] = induced_matrix(inc_bar, self.H0[prev], self.H1[s])

        def project_u(lbl):
            tag, plane = lbl
            if tag == "u" and plane[1] == s:
                return (plane[0], 0, -s)
            return None

        proj_bar = label_matrix(cone1.cone, spot, project_u)
        self.fbar0[s] = induced_matrix(proj_bar, self.H1[s], self.Hinf[s])

        if prev in self.window:
            cols = []
            for rep in self.Hinf[s].reps:
                lifted = relabel_vector(
                    rep, spot, cone1.cone, lambda lbl: ("u", (lbl[0], s, 0))
                )
                bd = cone1.cone.boundary.mul_vec(lifted)
                back = relabel_vector(bd, cone1.cone, self.cones0[prev].cone, lambda lbl: lbl)
                cols.append(self.H0[prev].coords(back))
            self.fbar1[s] = Gf2Matrix.from_columns(cols, self.H0[prev].dim)

    # -- dimensions and totals ---------------------------------------------

    def dims(self, which: str) -> list[int]:
        spaces = {"H0": self.H0, "H1": self.H1, "Hinf": self.Hinf}[which]
        return [spaces[s].dim for s in self.window]

    def total_dim(self, which: str) -> int:
        return sum(self.dims(which))

    def offsets(self, which: str) -> dict[int, int]:
        out = {}
        acc = 0
        for s, d in zip(self.window, self.dims(which)):
            out[s] = acc
            acc += d
        return out

    def _total(
        self,
        fam: dict[int, Gf2Matrix],
        src: str,
        tgt: str,
        src_of: Callable[[int], int],
    ) -> Gf2Matrix:
        row_dims = tuple(self.dims(tgt))
        col_dims = tuple(self.dims(src))
        index = {s: k for k, s in enumerate(self.window)}
        blocks = {}
        for s, m in fam.items():
            s_src = src_of(s)
            if s_src in index:
                blocks[(index[s], index[s_src])] = m
        return BlockGrid(row_dims, col_dims, blocks).assemble()

    @cached_property
    def total_f_inf(self) -> Gf2Matrix:
        return self._total(self.f_inf, "H0", "H1", lambda s: s)

    @cached_property
    def total_f0(self) -> Gf2Matrix:
        return self._total(self.f0, "H1", "Hinf", lambda s: s)

    @cached_property
    def total_f1(self) -> Gf2Matrix:
        return self._total(self.f1, "Hinf", "H0", lambda s: s)

    @cached_property
    def total_fbar_inf(self) -> Gf2Matrix:
        return self._total(self.fbar_inf, "H0", "H1", lambda s: s - 1)

    @cached_property
    def total_fbar0(self) -> Gf2Matrix:
        return self._total(self.fbar0, "H1", "Hinf", lambda s: s)

    @cached_property
    def total_fbar1(self) -> Gf2Matrix:
        grid_blocks: dict[int, Gf2Matrix] = self.fbar1
        row_dims = tuple(self.dims("H0"))
        col_dims = tuple(self.dims("Hinf"))
        index = {s: k for k, s in enumerate(self.window)}
        blocks = {}
        for s, m in grid_blocks.items():
            if s - 1 in index:
                blocks[(index[s - 1], index[s])] = m
        return BlockGrid(row_dims, col_dims, blocks).assemble()

    @property
    def a0(self) -> int:
        return self.total_f0.rank()

    @property
    def a1(self) -> int:
        return self.total_f1.rank()

    @property
    def a_inf(self) -> int:
        return self.total_f_inf.rank()

    # -- verification -------------------------------------------------------

    def exactness_failures(self) -> list[str]:
        """Both triangles must be exact at every node of every level."""
        out = []
        for s in self.window:
            prev = s - 1
            triples = [
                ("unbarred", s, self.f_inf[s], self.f0[s], self.H1[s].dim, "H1"),
                ("unbarred", s, self.f0[s], self.f1[s], self.Hinf[s].dim, "Hinf"),
                ("unbarred", s, self.f1[s], self.f_inf[s], self.H0[s].dim, "H0"),
            ]
            if prev in self.window:
                triples += [
                    ("barred", s, self.fbar_inf[s], self.fbar0[s], self.H1[s].dim, "H1"),
                    ("barred", s, self.fbar0[s], self.fbar1[s], self.Hinf[s].dim, "Hinf"),
                    ("barred", s, self.fbar1[s], self.fbar_inf[s], self.H0[prev].dim, "H0"),
                ]
            for name, level, first, second, middle_dim, node in triples:
                if not (second @ first).is_zero():
                    out.append(f"{name} s={level}: composite through {node} nonzero")
                elif first.rank() + second.rank() != middle_dim:
                    out.append(f"{name} s={level}: image/kernel gap at {node}")
        return out

    def require_exact(self) -> None:
        failures = self.exactness_failures()
        if failures:
            raise NormalizationFailure("; ".join(failures))


def surgery_homology(complex_: BifilteredComplex, n, s: int) -> HomologySpace:
    """H_n(K, s) for n in {0, 1, "inf"}."""
    if n == INF:
        return homology(spot_plane(complex_, s))
    return homology(build_cone(complex_, n, s).cone)


def triangle_maps(complex_: BifilteredComplex, s: int) -> dict[str, Gf2Matrix]:
    """The six maps at level s (barred maps shift the level by one)."""
    triple = SurgeryTriple(complex_)

    def dim(spaces: dict[int, HomologySpace], level: int) -> int:
        return spaces[level].dim if level in triple.window else 0

    def get(fam: dict[int, Gf2Matrix], rows: int, cols: int) -> Gf2Matrix:
        return fam.get(s, Gf2Matrix.zeros(rows, cols))

    return {
        "f_inf": get(triple.f_inf, dim(triple.H1, s), dim(triple.H0, s)),
        "f0": get(triple.f0, dim(triple.Hinf, s), dim(triple.H1, s)),
        "f1": get(triple.f1, dim(triple.H0, s), dim(triple.Hinf, s)),
        "fbar_inf": get(triple.fbar_inf, dim(triple.H1, s), dim(triple.H0, s - 1)),
        "fbar0": get(triple.fbar0, dim(triple.Hinf, s), dim(triple.H1, s)),
        "fbar1": get(triple.fbar1, dim(triple.H0, s - 1), dim(triple.Hinf, s)),
    }


def total_package(complex_: BifilteredComplex) -> SurgeryTriple:
    triple = SurgeryTriple(complex_)
    triple.require_exact()
    return triple
