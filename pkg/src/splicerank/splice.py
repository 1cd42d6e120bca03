"""The splice matrix, its rank invariant, witnesses, bounds and verdicts.

The 6x6-block matrix of the splicing formula is assembled from the normalized
duality blocks of the two knots; its kernel plus cokernel rank is the rank of
the hat invariant of the spliced manifold.  Column blocks follow the
six-component witness vector of the linear-algebra argument; row blocks follow
the printed order of the block matrix.  Identity block sizes are the unique
shape-consistent choices and assembly hard-fails on any inconsistency.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .duality import PackageStats, SurgeryPackage, stats
from .errors import ShapeMismatch, WitnessNotInKernel
from .gf2 import BlockGrid, Gf2Matrix, bits_of, span_dim
from .model import BifilteredComplex, mirror

X_VARIANTS = ("printed", "symmetric")


@dataclass(frozen=True)
class SpliceMatrix:
    grid: BlockGrid
    matrix: Gf2Matrix
    row_block_dims: tuple[int, ...]
    col_block_dims: tuple[int, ...]
    x_variant: str


def _vec_kron(v: int, w: int, w_len: int) -> int:
    out = 0
    for i in bits_of(v):
        out |= w << (i * w_len)
    return out


def build_D(
    p1: SurgeryPackage, p2: SurgeryPackage, x_variant: str = "printed"
) -> SpliceMatrix:
    """Assemble the splice matrix of a package pair.

    ``x_variant`` controls the print-suspect dressed entries: "printed" keeps
    the square factors in the printed order (X1 A_inf on the left knot,
    D0 X1 on the right knot); "symmetric" reverses those two square products
    for sensitivity analysis.  The rectangular dressed factors admit no
    order swap at these shapes.
    """
    if x_variant not in X_VARIANTS:
        raise ShapeMismatch(f"unknown x_variant {x_variant!r}")
    A0_1, B0_1, D0_1 = p1.blocks0.A, p1.blocks0.B, p1.blocks0.D
    A1_1, B1_1, D1_1 = p1.blocks1.A, p1.blocks1.B, p1.blocks1.D
    Ai_1, Bi_1, Di_1 = p1.blocks_inf.A, p1.blocks_inf.B, p1.blocks_inf.D
    A0_2, B0_2, D0_2 = p2.blocks0.A, p2.blocks0.B, p2.blocks0.D
    A1_2, B1_2, D1_2 = p2.blocks1.A, p2.blocks1.B, p2.blocks1.D
    Ai_2, Bi_2, Di_2 = p2.blocks_inf.A, p2.blocks_inf.B, p2.blocks_inf.D
    X1_1, X1_2 = p1.X1, p2.X1

    a0_1, a1_1, ai_1 = p1.a0, p1.a1, p1.a_inf
    a0_2, a1_2, ai_2 = p2.a0, p2.a1, p2.a_inf

    col_dims = (
        ai_1 * ai_2,
        ai_1 * a0_2,
        a1_1 * a0_2,
        a0_1 * ai_2,
        a0_1 * a1_2,
        a1_1 * a1_2,
    )
    row_dims = (
        a0_1 * a0_2,
        ai_1 * a1_2,
        ai_1 * a0_2,
        a1_1 * ai_2,
        a0_1 * ai_2,
        a1_1 * a1_2,
    )

    ident = Gf2Matrix.identity
    if x_variant == "printed":
        x1a_1 = X1_1 @ Ai_1
        d0x_2 = D0_2 @ X1_2
    else:
        x1a_1 = Ai_1 @ X1_1
        d0x_2 = X1_2 @ D0_2
    x1b_1 = X1_1 @ Bi_1
    b0x_2 = B0_2 @ X1_2

    entries: dict[tuple[int, int], Gf2Matrix] = {
        (0, 0): (Di_1 @ B1_1).kron(B1_2 @ A0_2),
        (0, 1): (B1_1 @ A0_1).kron(ident(a0_2)),
        (0, 2): (B1_1 @ B0_1).kron(ident(a0_2)),
        (0, 3): (Di_1 @ A1_1).kron(B1_2 @ A0_2),
        (0, 4): ident(a0_1).kron(B1_2 @ B0_2),
        (1, 0): ident(ai_1).kron(Bi_2 @ B1_2),
        (1, 1): (D1_1 @ A0_1).kron(Bi_2 @ A1_2),
        (1, 2): (D1_1 @ B0_1).kron(Bi_2 @ A1_2),
        (1, 4): (B0_1 @ Bi_1).kron(ident(a1_2)),
        (1, 5): (B0_1 @ Ai_1).kron(ident(a1_2)),
        (2, 0): ident(ai_1).kron(Di_2 @ B1_2),
        (2, 1): ident(ai_1).kron(ident(a0_2)) + (D1_1 @ A0_1).kron(Di_2 @ A1_2),
        (2, 2): (D1_1 @ B0_1).kron(Di_2 @ A1_2),
        (3, 0): (Bi_1 @ B1_1).kron(ident(ai_2)),
        (3, 2): ident(a1_1).kron(B0_2 @ Bi_2),
        (3, 3): (Bi_1 @ A1_1).kron(ident(ai_2)),
        (3, 4): (D0_1 @ Bi_1).kron(B0_2 @ Ai_2) + x1b_1.kron(b0x_2),
        (3, 5): (D0_1 @ Ai_1).kron(B0_2 @ Ai_2) + x1a_1.kron(b0x_2),
        (4, 0): (Di_1 @ B1_1).kron(D1_2 @ A0_2),
        (4, 3): ident(a0_1).kron(ident(ai_2)) + (Di_1 @ A1_1).kron(D1_2 @ A0_2),
        (4, 4): ident(a0_1).kron(D1_2 @ B0_2),
        (5, 2): ident(a1_1).kron(D0_2 @ Bi_2),
        (5, 4): (D0_1 @ Bi_1).kron(D0_2 @ Ai_2) + x1b_1.kron(d0x_2),
        (5, 5): ident(a1_1).kron(ident(a1_2))
        + (D0_1 @ Ai_1).kron(D0_2 @ Ai_2)
        + x1a_1.kron(d0x_2),
    }
    for key, block in entries.items():
        want = (row_dims[key[0]], col_dims[key[1]])
        if (block.rows, block.cols) != want:
            raise ShapeMismatch(
                f"splice entry {key} has shape {(block.rows, block.cols)}, needs {want}"
            )
    grid = BlockGrid(row_dims, col_dims, entries)
    return SpliceMatrix(grid, grid.assemble(), row_dims, col_dims, x_variant)


@dataclass(frozen=True)
class SpliceRank:
    h: int
    ker: int
    coker: int


def splice_rank(p1: SurgeryPackage, p2: SurgeryPackage, x_variant: str = "printed") -> SpliceRank:
    """Rank of the hat invariant of the splice: dim Ker + dim Coker."""
    m = build_D(p1, p2, x_variant).matrix
    ker = len(m.kernel_basis())
    coker = len(m.cokernel_basis())
    return SpliceRank(ker + coker, ker, coker)


# -- kernel witnesses and the six-term bounds --------------------------------


@dataclass(frozen=True)
class WitnessData:
    """Per-knot solution spaces feeding the assembled kernel vectors."""

    z0: list[int]  # Ker B1
    z1: list[int]  # Ker Binf
    z_inf: list[int]  # Ker B0
    w0: list[int]  # Ker (Binf 0; Dinf+A1 B1), components (x0, y0)
    w1: list[int]  # Ker (B0 0; D0+Ainf Binf), components (x1, y1)
    w_inf: list[int]  # Ker (B1 0; D1+A0 B0), components (x_inf, y_inf)


def _system(top: Gf2Matrix, lower_left: Gf2Matrix, lower_right: Gf2Matrix) -> Gf2Matrix:
    grid = BlockGrid(
        (top.rows, lower_left.rows),
        (top.cols, lower_right.cols),
        {(0, 0): top, (1, 0): lower_left, (1, 1): lower_right},
    )
    return grid.assemble()


def witness_data(p: SurgeryPackage) -> WitnessData:
    b0, b1, bi = p.blocks0.B, p.blocks1.B, p.blocks_inf.B
    a0_, a1_, ai_ = p.blocks0.A, p.blocks1.A, p.blocks_inf.A
    d0_, d1_, di_ = p.blocks0.D, p.blocks1.D, p.blocks_inf.D
    return WitnessData(
        z0=b1.kernel_basis(),
        z1=bi.kernel_basis(),
        z_inf=b0.kernel_basis(),
        w0=_system(bi, di_ + a1_, b1).kernel_basis(),
        w1=_system(b0, d0_ + ai_, bi).kernel_basis(),
        w_inf=_system(b1, d1_ + a0_, b0).kernel_basis(),
    )


def _split(v: int, first: int) -> tuple[int, int]:
    return v & ((1 << first) - 1), v >> first


@dataclass(frozen=True)
class PairTuple:
    """One choice of witness ingredients for a single knot."""

    x0: int = 0
    y0: int = 0
    x1: int = 0
    y1: int = 0
    x_inf: int = 0
    y_inf: int = 0
    z0: int = 0
    z1: int = 0
    z_inf: int = 0


def _basis_tuples(data: WitnessData, p: SurgeryPackage) -> list[PairTuple]:
    out = []
    for w in data.w0:
        x, y = _split(w, p.a0)
        out.append(PairTuple(x0=x, y0=y))
    for w in data.w1:
        x, y = _split(w, p.a1)
        out.append(PairTuple(x1=x, y1=y))
    for w in data.w_inf:
        x, y = _split(w, p.a_inf)
        out.append(PairTuple(x_inf=x, y_inf=y))
    out += [PairTuple(z0=z) for z in data.z0]
    out += [PairTuple(z1=z) for z in data.z1]
    out += [PairTuple(z_inf=z) for z in data.z_inf]
    return out


def assemble_witness(t1: PairTuple, t2: PairTuple, p1: SurgeryPackage, p2: SurgeryPackage) -> int:
    """Six-component kernel vector from one ingredient choice per knot."""
    a0_2, a1_2, ai_2 = p2.a0, p2.a1, p2.a_inf
    comps = [
        _vec_kron(t1.y0, t2.x_inf, ai_2)
        ^ _vec_kron(t1.x_inf, t2.y0, ai_2)
        ^ _vec_kron(t1.z0, t2.z0, ai_2),
        _vec_kron(t1.x_inf, t2.x0, a0_2),
        _vec_kron(t1.y_inf, t2.x0, a0_2)
        ^ _vec_kron(t1.x1, t2.y1, a0_2)
        ^ _vec_kron(t1.z_inf, t2.z1, a0_2),
        _vec_kron(t1.x0, t2.x_inf, ai_2),
        _vec_kron(t1.y1, t2.x1, a1_2)
        ^ _vec_kron(t1.x0, t2.y_inf, a1_2)
        ^ _vec_kron(t1.z1, t2.z_inf, a1_2),
        _vec_kron(t1.x1, t2.x1, a1_2),
    ]
    widths = [
        p1.a_inf * ai_2,
        p1.a_inf * a0_2,
        p1.a1 * a0_2,
        p1.a0 * ai_2,
        p1.a0 * a1_2,
        p1.a1 * a1_2,
    ]
    out = 0
    offset = 0
    for comp, width in zip(comps, widths):
        out |= comp << offset
        offset += width
    return out


@dataclass(frozen=True)
class WitnessReport:
    checked: int
    nonzero: int
    ker_bound: int
    coker_bound: int
    ker_dim: int
    coker_dim: int
    witness_span: int

    @property
    def bounds_hold(self) -> bool:
        return self.ker_dim >= self.ker_bound and self.coker_dim >= self.coker_bound


def kernel_witnesses(
    p1: SurgeryPackage,
    p2: SurgeryPackage,
    st1: PackageStats | None = None,
    st2: PackageStats | None = None,
) -> WitnessReport:
    """Assemble every basis witness, verify annihilation, check both bounds."""
    st1 = st1 or stats(p1)
    st2 = st2 or stats(p2)
    d = build_D(p1, p2).matrix
    tuples1 = _basis_tuples(witness_data(p1), p1)
    tuples2 = _basis_tuples(witness_data(p2), p2)
    checked = nonzero = 0
    span: list[int] = []
    for t1, t2 in product(tuples1, tuples2):
        v = assemble_witness(t1, t2, p1, p2)
        checked += 1
        if v:
            nonzero += 1
            span.append(v)
            if d.mul_vec(v):
                raise WitnessNotInKernel(
                    f"witness from pair #{checked} not annihilated by the splice matrix"
                )
    ker_bound = (
        st1.k0 * st2.k0
        + st1.k_inf * st2.k1
        + st1.k1 * st2.k_inf
        + st1.l_inf * st2.l0
        + st1.l0 * st2.l_inf
        + st1.l1 * st2.l1
    )
    coker_bound = (
        st1.c_inf * st2.c_inf
        + st1.c0 * st2.c1
        + st1.c1 * st2.c0
        + st1.d_inf * st2.d0
        + st1.d0 * st2.d_inf
        + st1.d1 * st2.d1
    )
    return WitnessReport(
        checked,
        nonzero,
        ker_bound,
        coker_bound,
        len(d.kernel_basis()),
        len(d.cokernel_basis()),
        span_dim(span),
    )


# -- the five violation cases -------------------------------------------------

INVOLUTION = {"0": "inf", "1": "1", "inf": "0"}


@dataclass(frozen=True)
class SCase:
    s1: bool
    s2: bool
    s3: bool
    s4: bool
    s5: bool

    @property
    def satisfied(self) -> tuple[str, ...]:
        return tuple(
            name
            for name, flag in zip(("S1", "S2", "S3", "S4", "S5"), (self.s1, self.s2, self.s3, self.s4, self.s5))
            if flag
        )

    @property
    def any(self) -> bool:
        return bool(self.satisfied)


def classify_S(st: PackageStats) -> SCase:
    """Evaluate the five rank conditions on the second knot's statistics."""
    a0, a1, ai = st.a0, st.a1, st.a_inf
    r0, r1, ri = st.r0, st.r1, st.r_inf
    return SCase(
        s1=r0 <= r1 == ri == a1 == ai < a0,
        s2=r0 == r1 == ai <= ri and ai < a1 and ai < a0,
        s3=r0 == ri == a1 <= r1 and a1 < ai and a1 < a0,
        s4=r0 == ai and ri == a0 and a1 >= a0 and a1 >= ai,
        s5=r0 == a1 and r1 == a0 and ai >= a0 and ai >= a1,
    )


# -- subspace bounds (cyclic-triple and remark variants) -----------------------


@dataclass(frozen=True)
class SubspaceBound:
    label: str
    hypothesis_met: bool
    ker_bound: int | None = None
    coker_bound: int | None = None
    ker_ok: bool | None = None
    coker_ok: bool | None = None


def _inj(b: Gf2Matrix) -> bool:
    return b.rank() == b.cols


def _surj(b: Gf2Matrix) -> bool:
    return b.rank() == b.rows


def subspace_bounds(p1: SurgeryPackage, p2: SurgeryPackage) -> list[SubspaceBound]:
    """Tensor-factor lower bounds under the injectivity/surjectivity hypotheses."""
    b_1 = {"0": p1.blocks0.B, "1": p1.blocks1.B, "inf": p1.blocks_inf.B}
    b_2 = {"0": p2.blocks0.B, "1": p2.blocks1.B, "inf": p2.blocks_inf.B}
    d = build_D(p1, p2).matrix
    ker_dim = len(d.kernel_basis())
    coker_dim = len(d.cokernel_basis())
    out = []
    for circ, bullet, star in (("0", "1", "inf"), ("1", "inf", "0"), ("inf", "0", "1")):
        label = f"({circ},{bullet},{star})"
        if _inj(b_2[circ]) and _surj(b_2[bullet]):
            left = b_1[INVOLUTION[circ]] @ b_1[INVOLUTION[bullet]]
            right = b_2[bullet] @ b_2[circ]
            kb = len(left.kernel_basis()) * len(right.kernel_basis())
            cb = len(left.cokernel_basis()) * len(right.cokernel_basis())
            out.append(
                SubspaceBound(
                    f"case1 {label}", True, kb, cb, ker_dim >= kb, coker_dim >= cb
                )
            )
        else:
            out.append(SubspaceBound(f"case1 {label}", False))
        if _surj(b_2[circ]) and _inj(b_2[bullet]):
            left_k = b_1[INVOLUTION[bullet]] @ b_1[INVOLUTION[star]]
            right_k = b_2[star] @ b_2[bullet]
            kb = len(left_k.kernel_basis()) * len(right_k.kernel_basis())
            left_c = b_1[INVOLUTION[star]] @ b_1[INVOLUTION[circ]]
            right_c = b_2[circ] @ b_2[star]
            cb = len(left_c.cokernel_basis()) * len(right_c.cokernel_basis())
            out.append(
                SubspaceBound(
                    f"case2 {label}", True, kb, cb, ker_dim >= kb, coker_dim >= cb
                )
            )
        else:
            out.append(SubspaceBound(f"case2 {label}", False))

    # combined variant when B0 of the right knot is injective and Binf surjective;
    # the joined pair of overlapping subspaces is counted by the larger one
    if _inj(b_2["0"]) and _surj(b_2["inf"]):
        k_pair = len((b_1["inf"] @ b_1["1"]).kernel_basis()) * len(
            (b_2["1"] @ b_2["0"]).kernel_basis()
        )
        k_prime = len(b_1["1"].kernel_basis()) * len(b_2["1"].kernel_basis())
        kb = (
            len(b_1["0"].kernel_basis()) * len(b_2["inf"].kernel_basis())
            + len(b_1["inf"].kernel_basis()) * len(b_2["0"].kernel_basis())
            + max(k_pair, k_prime)
        )
        c_pair = len((b_1["1"] @ b_1["0"]).cokernel_basis()) * len(
            (b_2["inf"] @ b_2["1"]).cokernel_basis()
        )
        c_prime = len(b_1["1"].cokernel_basis()) * len(b_2["1"].cokernel_basis())
        cb = (
            len(b_1["0"].cokernel_basis()) * len(b_2["inf"].cokernel_basis())
            + len(b_1["inf"].cokernel_basis()) * len(b_2["0"].cokernel_basis())
            + max(c_pair, c_prime)
        )
        out.append(
            SubspaceBound("remark", True, kb, cb, ker_dim >= kb, coker_dim >= cb)
        )
    else:
        out.append(SubspaceBound("remark", False))
    return out


# -- theorem verdict and mirror invariance -------------------------------------


@dataclass(frozen=True)
class TheoremVerdict:
    applicable: bool
    holds: bool | None
    h: int
    lower_bound: int | None
    margin: int | None
    witness_bounds_hold: bool


def theorem_check(
    p1: SurgeryPackage,
    p2: SurgeryPackage,
    profile1=None,
) -> TheoremVerdict:
    """Main rank inequality when the right-hand knot sits in a minimal-rank sphere.

    ``profile1`` supplies the independently computed ambient rank of the first
    knot through its graded-piece total; without it the package statistic is
    used (the two are cross-checked elsewhere).
    """
    st1, st2 = stats(p1), stats(p2)
    y_inf_1 = profile1.e_total() if profile1 is not None else st1.y_inf
    rank = splice_rank(p1, p2)
    witness = kernel_witnesses(p1, p2, st1, st2)
    applicable = st2.y_inf == 1
    holds = rank.h >= y_inf_1 if applicable else None
    return TheoremVerdict(
        applicable,
        holds,
        rank.h,
        y_inf_1 if applicable else None,
        rank.h - y_inf_1 if applicable else None,
        witness.bounds_hold,
    )


@dataclass(frozen=True)
class MirrorVerdict:
    h: int
    h_mirrored: int

    @property
    def equal(self) -> bool:
        return self.h == self.h_mirrored


def mirror_invariance(c1: BifilteredComplex, c2: BifilteredComplex) -> MirrorVerdict:
    """The splice rank is unchanged by mirroring both knots simultaneously."""
    from .duality import geometric_package

    h = splice_rank(geometric_package(c1), geometric_package(c2)).h
    h_m = splice_rank(
        geometric_package(mirror(c1)), geometric_package(mirror(c2))
    ).h
    return MirrorVerdict(h, h_m)
