"""Finite algebraic models of bifiltered knot complexes.

A model is a finite generator set with Alexander gradings and a GF(2)
differential whose arrows drop the two filtration levels by recorded
amounts.  Planes of the induced bifiltration are finite chain complexes:
fixing one filtration index pins the other through the grading relation
s(x) - i + j = 0, so each generator contributes at most one basis element
``[x, i, j]`` to any constrained plane.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import (
    NoFlipData,
    NotChainMap,
    NotQuasiIso,
    SamplingExhausted,
    ShapeMismatch,
)
from .gf2 import Gf2Matrix
from .homology import ChainComplexF2, HomologySpace, chain_map_commutes, homology, induced_matrix


@dataclass(frozen=True)
class Generator:
    id: str
    alexander: int


@dataclass(frozen=True)
class Arrow:
    src: str
    dst: str
    drop_i: int
    drop_j: int


@dataclass(frozen=True)
class TauOverride:
    tau0: Gf2Matrix
    tau1: Gf2Matrix
    tau_inf: Gf2Matrix


@dataclass(frozen=True)
class BifilteredComplex:
    name: str
    generators: tuple[Generator, ...]
    arrows: tuple[Arrow, ...]
    symmetry: Mapping[str, str] | None = None
    flip: Gf2Matrix | None = None
    tau_override: TauOverride | None = None

    def alexander(self, gen_id: str) -> int:
        return self._grading[gen_id]

    @property
    def _grading(self) -> dict[str, int]:
        return {g.id: g.alexander for g in self.generators}

    @property
    def ids(self) -> list[str]:
        return [g.id for g in self.generators]

    def grading_range(self) -> tuple[int, int]:
        values = [g.alexander for g in self.generators]
        return (min(values), max(values)) if values else (0, 0)


@dataclass(frozen=True)
class SubquotientSpec:
    """Plane constraints; at least one axis must be pinned by an equality."""

    i_eq: int | None = None
    i_le: int | None = None
    j_eq: int | None = None
    j_le: int | None = None

    def __post_init__(self):
        if self.i_eq is not None and self.i_le is not None:
            raise ShapeMismatch("i is both pinned and bounded")
        if self.j_eq is not None and self.j_le is not None:
            raise ShapeMismatch("j is both pinned and bounded")
        if self.i_eq is None and self.j_eq is None:
            raise ShapeMismatch("at least one index must be pinned for finiteness")

    def admits(self, i: int, j: int) -> bool:
        if self.i_eq is not None and i != self.i_eq:
            return False
        if self.i_le is not None and i > self.i_le:
            return False
        if self.j_eq is not None and j != self.j_eq:
            return False
        if self.j_le is not None and j > self.j_le:
            return False
        return True


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


def validate(complex_: BifilteredComplex) -> ValidationReport:
    """Check grading compatibility, d^2 = 0 and the symmetry axioms."""
    out: list[str] = []
    grading: dict[str, int] = {}
    for g in complex_.generators:
        if g.id in grading:
            out.append(f"duplicate generator id {g.id!r}")
        grading[g.id] = g.alexander

    arrows_seen = set()
    outgoing: dict[str, list[Arrow]] = {}
    for a in complex_.arrows:
        key = (a.src, a.dst, a.drop_i, a.drop_j)
        if key in arrows_seen:
            out.append(f"duplicate arrow {key}")
        arrows_seen.add(key)
        if a.src not in grading or a.dst not in grading:
            out.append(f"arrow {a.src}->{a.dst} references a missing generator")
            continue
        if a.drop_i < 0 or a.drop_j < 0:
            out.append(f"arrow {a.src}->{a.dst} has a negative drop")
        if grading[a.src] - grading[a.dst] != a.drop_i - a.drop_j:
            out.append(
                f"arrow {a.src}->{a.dst} violates grading: "
                f"s difference {grading[a.src] - grading[a.dst]} != "
                f"{a.drop_i} - {a.drop_j}"
            )
        outgoing.setdefault(a.src, []).append(a)

    # d^2 = 0: composites grouped by endpoint and total bidegree drop
    square: dict[tuple[str, str, int, int], int] = {}
    for a in complex_.arrows:
        for b in outgoing.get(a.dst, []):
            key = (a.src, b.dst, a.drop_i + b.drop_i, a.drop_j + b.drop_j)
            square[key] = square.get(key, 0) ^ 1
    for (src, dst, di, dj), coeff in sorted(square.items()):
        if coeff:
            out.append(f"d^2 != 0: composite {src}->{dst} with total drop ({di},{dj})")

    sigma = complex_.symmetry
    if sigma is not None:
        for x in grading:
            if x not in sigma:
                out.append(f"symmetry does not cover generator {x!r}")
        for x, y in sigma.items():
            if x not in grading or y not in grading:
                out.append(f"symmetry maps through missing generator ({x!r},{y!r})")
                continue
            if sigma.get(y) != x:
                out.append(f"symmetry is not an involution at {x!r}")
            if grading[y] != -grading[x]:
                out.append(f"symmetry does not negate the grading at {x!r}")
        for a in complex_.arrows:
            if a.src in sigma and a.dst in sigma:
                image = (sigma[a.src], sigma[a.dst], a.drop_j, a.drop_i)
                if image not in arrows_seen:
                    out.append(
                        f"symmetry image of arrow {a.src}->{a.dst} "
                        f"(expected {image[0]}->{image[1]} with drop "
                        f"({a.drop_j},{a.drop_i})) is missing"
                    )
    return ValidationReport(tuple(out))


def require_valid(complex_: BifilteredComplex) -> None:
    report = validate(complex_)
    if not report.valid:
        raise ShapeMismatch(
            f"invalid complex {complex_.name!r}: " + "; ".join(report.violations)
        )


def subquotient(complex_: BifilteredComplex, spec: SubquotientSpec) -> ChainComplexF2:
    """The plane complex cut out by spec, with its induced differential."""
    grading = complex_._grading
    basis: list[tuple[str, int, int]] = []
    for g in complex_.generators:
        placements = []
        if spec.j_eq is not None:
            placements.append((g.alexander + spec.j_eq, spec.j_eq))
        elif spec.i_eq is not None:
            placements.append((spec.i_eq, spec.i_eq - g.alexander))
        for i, j in placements:
            if spec.admits(i, j):
                basis.append((g.id, i, j))
    index = {label: k for k, label in enumerate(basis)}
    n = len(basis)
    entries = []
    for a in complex_.arrows:
        for src_label in basis:
            if src_label[0] != a.src:
                continue
            _, i, j = src_label
            dst_label = (a.dst, i - a.drop_i, j - a.drop_j)
            if dst_label in index:
                entries.append((index[dst_label], index[src_label]))
    boundary = Gf2Matrix.from_entries(n, n, entries)
    return ChainComplexF2(tuple(basis), boundary)


def plane_j0(complex_: BifilteredComplex) -> ChainComplexF2:
    return subquotient(complex_, SubquotientSpec(j_eq=0))


def plane_i0(complex_: BifilteredComplex) -> ChainComplexF2:
    return subquotient(complex_, SubquotientSpec(i_eq=0))


def hf_hat(complex_: BifilteredComplex) -> HomologySpace:
    """Homology of the j = 0 plane: the ambient manifold's invariant."""
    return homology(plane_j0(complex_))


def hfk_hat_dims(complex_: BifilteredComplex) -> dict[int, int]:
    """Knot Floer ranks per Alexander grading (homology of one-spot planes)."""
    lo, hi = complex_.grading_range()
    out = {}
    for s in range(lo, hi + 1):
        h = homology(subquotient(complex_, SubquotientSpec(i_eq=0, j_eq=-s)))
        if h.dim:
            out[s] = h.dim
    return out


def reverse_orientation(complex_: BifilteredComplex) -> BifilteredComplex:
    """Swap the two filtration directions (the knot with reversed orientation)."""
    return replace(
        complex_,
        name=complex_.name + "-rev",
        generators=tuple(Generator(g.id, -g.alexander) for g in complex_.generators),
        arrows=tuple(Arrow(a.src, a.dst, a.drop_j, a.drop_i) for a in complex_.arrows),
        flip=None,
        tau_override=None,
    )


def mirror(complex_: BifilteredComplex) -> BifilteredComplex:
    """Dual complex: arrows reversed, gradings negated, drops kept."""
    return replace(
        complex_,
        name=complex_.name + "-mirror",
        generators=tuple(Generator(g.id, -g.alexander) for g in complex_.generators),
        arrows=tuple(Arrow(a.dst, a.src, a.drop_i, a.drop_j) for a in complex_.arrows),
        flip=None,
        tau_override=None,
    )


def sigma_chain_map(
    complex_: BifilteredComplex, source: ChainComplexF2, target: ChainComplexF2
) -> Gf2Matrix:
    """Matrix of [x,i,j] -> [sigma x, j, i] between two plane complexes."""
    sigma = complex_.symmetry
    if sigma is None:
        raise NoFlipData(f"complex {complex_.name!r} has no basis symmetry")
    target_index = {label: k for k, label in enumerate(target.basis)}
    entries = []
    for col, (x, i, j) in enumerate(source.basis):
        image = (sigma[x], j, i)
        if image not in target_index:
            raise ShapeMismatch(f"sigma image {image} missing from target plane")
        entries.append((target_index[image], col))
    return Gf2Matrix.from_entries(target.dim, source.dim, entries)


@dataclass(frozen=True)
class FlipMap:
    source: ChainComplexF2
    target: ChainComplexF2
    matrix: Gf2Matrix


def flip_map(complex_: BifilteredComplex) -> FlipMap:
    """Chain homotopy equivalence from the i = 0 plane to the j = 0 plane.

    Built from the basis symmetry when present, otherwise taken from the
    explicit matrix in the input; verified to be a chain map inducing an
    isomorphism on homology.
    """
    source = plane_i0(complex_)
    target = plane_j0(complex_)
    if complex_.flip is not None:
        matrix = complex_.flip
        if (matrix.rows, matrix.cols) != (target.dim, source.dim):
            raise ShapeMismatch(
                f"explicit flip is {matrix.rows}x{matrix.cols}, expected "
                f"{target.dim}x{source.dim}"
            )
    elif complex_.symmetry is not None:
        matrix = sigma_chain_map(complex_, source, target)
    else:
        raise NoFlipData(f"complex {complex_.name!r} has neither symmetry nor flip")
    if not chain_map_commutes(matrix, source, target):
        raise NotChainMap("flip map does not commute with the differentials")
    h_src = homology(source)
    h_tgt = homology(target)
    induced = induced_matrix(matrix, h_src, h_tgt)
    if h_src.dim != h_tgt.dim or induced.rank() != h_src.dim:
        raise NotQuasiIso("flip map is not a quasi-isomorphism")
    return FlipMap(source, target, matrix)


# -- named corpus -----------------------------------------------------------


def staircase(steps: Iterable[int], name: str = "staircase") -> BifilteredComplex:
    """Symmetric staircase complex from alternating step lengths.

    Steps must form a palindrome of even length; odd-position generators
    carry the differentials onto their two neighbours.
    """
    steps = list(steps)
    if not steps:
        return BifilteredComplex(name, (Generator("v0", 0),), (), {"v0": "v0"})
    if len(steps) % 2 or steps != steps[::-1]:
        raise ShapeMismatch("step list must be an even-length palindrome")
    total = sum(steps)
    if total % 2:
        raise ShapeMismatch("step list must have even total")
    gradings = [-total // 2]
    for step in steps:
        gradings.append(gradings[-1] + step)
    generators = tuple(Generator(f"v{k}", s) for k, s in enumerate(gradings))
    arrows = []
    for k in range(1, len(gradings), 2):
        arrows.append(Arrow(f"v{k}", f"v{k - 1}", steps[k - 1], 0))
        arrows.append(Arrow(f"v{k}", f"v{k + 1}", 0, steps[k]))
    n = len(gradings) - 1
    sigma = {f"v{k}": f"v{n - k}" for k in range(n + 1)}
    return BifilteredComplex(name, generators, tuple(arrows), sigma)


def random_complex(seed: int, max_generators: int = 8) -> BifilteredComplex:
    """Deterministic random valid symmetric model with odd ambient rank.

    Drawn as a two-layer complex (killers mapping onto cycles, so d^2 = 0
    holds by construction), then closed under the symmetry.  Rejection keeps
    drawing until validation passes and the j = 0 plane has odd homology
    rank, matching the homology-sphere setting of the geometric inputs.
    """
    rng = random.Random(f"splicerank-complex-{seed}")
    for _ in range(400):
        candidate = _draw_two_layer(rng, max_generators, seed)
        if not validate(candidate).valid:
            continue
        if hf_hat(candidate).dim % 2 == 1:
            return candidate
    raise SamplingExhausted(f"no valid random complex after 400 draws (seed {seed})")


def _draw_two_layer(rng: random.Random, max_generators: int, seed: int) -> BifilteredComplex:
    budget = max(1, max_generators)
    generators: list[Generator] = []
    sigma: dict[str, str] = {}
    layer: dict[str, str] = {}

    def room(extra: int) -> bool:
        return len(generators) + extra <= budget

    def add_pair(kind: str) -> list[str]:
        s = rng.randint(-3, 3)
        base = f"{kind[0]}{len(generators)}"
        if s == 0 and rng.random() < 0.5 and room(1):
            generators.append(Generator(base, 0))
            sigma[base] = base
            layer[base] = kind
            return [base]
        if not room(2):
            return []
        other = base + "m"
        generators.append(Generator(base, s))
        generators.append(Generator(other, -s))
        sigma[base] = other
        sigma[other] = base
        layer[base] = layer[other] = kind
        return [base, other]

    add_pair("cycle")
    while room(1) and rng.random() < 0.75:
        add_pair("cycle" if rng.random() < 0.6 else "killer")

    grading = {g.id: g.alexander for g in generators}
    killers = [g.id for g in generators if layer[g.id] == "killer"]
    cycles = [g.id for g in generators if layer[g.id] == "cycle"]
    arrow_set: set[tuple[str, str, int, int]] = set()
    if killers and cycles:
        for k in killers:
            for _ in range(rng.randint(0, 2)):
                c = rng.choice(cycles)
                delta = grading[k] - grading[c]
                if abs(delta) > 3:
                    continue
                slack = rng.randint(0, 3 - max(delta, 0, -delta))
                di = max(delta, 0) + slack
                dj = di - delta
                arrow_set.add((k, c, di, dj))
                arrow_set.add((sigma[k], sigma[c], dj, di))
    arrows = tuple(Arrow(*a) for a in sorted(arrow_set))
    return BifilteredComplex(f"random-{seed}", tuple(generators), arrows, sigma)
