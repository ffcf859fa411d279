"""Exact weight decomposition for commuting rational matrix families.

A commuting family splits the space into joint primary blocks; on each
block the expansiveness question reduces to the moduli of the (possibly
irrational) eigenvalues, which are bracketed by certified rational
intervals and compared to 1 only through the exact circle-root test.
Blocks may keep several conjugate eigenvalue families together; that is
sound here because every criterion below depends only on moduli.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .exact import (
    QMatrix,
    QPoly,
    Subspace,
    char_poly,
    coordinates_in_span,
    intersect,
    is_invariant,
    kernel,
    mat_power,
    minimal_poly,
    poly_of_matrix,
    rational_roots,
    root_multiplicity,
    squarefree_part,
)
from .orbits import EXPANSIVE, NOT_EXPANSIVE, UNKNOWN, SemigroupAction, iter_words
from .spectral import GROUP, SEMIGROUP, check_mode, circle_root_count, single_expansive, unit_disk_profile


class NotCommutingError(ValueError):
    def __init__(self, pair: tuple[str, str]):
        super().__init__(f"generators {pair[0]!r} and {pair[1]!r} do not commute")
        self.pair = pair


class NotGroupModeError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorWeightData:
    """Eigenvalue summary of one generator's restriction to one block."""

    minimal_poly: QPoly
    eigen_poly: QPoly  # squarefree part; its roots are the eigenvalues
    modulus_interval: tuple[Fraction, Fraction]
    modulus_is_one: str  # "yes" | "no" | "mixed"

    def to_json(self) -> dict:
        return {
            "minimal_poly": [str(c) for c in self.minimal_poly.coeffs],
            "modulus_interval": [str(self.modulus_interval[0]), str(self.modulus_interval[1])],
            "modulus_is_one": self.modulus_is_one,
        }


@dataclass(frozen=True)
class WeightBlock:
    space: Subspace
    per_generator: dict[str, GeneratorWeightData]

    @property
    def dim(self) -> int:
        return self.space.dim

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "space": self.space.to_json(),
            "per_generator": {name: d.to_json() for name, d in self.per_generator.items()},
        }


@dataclass(frozen=True)
class WeightDecomposition:
    action: SemigroupAction
    blocks: tuple[WeightBlock, ...]

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks]}


def _check_commuting(action: SemigroupAction) -> None:
    for i in range(len(action.mats)):
        for j in range(i + 1, len(action.mats)):
            if action.mats[i] @ action.mats[j] != action.mats[j] @ action.mats[i]:
                raise NotCommutingError((action.names[i], action.names[j]))


def _coprime_root_factors(p: QPoly) -> list[QPoly]:
    """Pairwise coprime polynomials covering p's roots, rational roots split off."""
    s = squarefree_part(p)
    out: list[QPoly] = []
    for lam in rational_roots(s):
        out.append(QPoly.from_coeffs([-lam, Fraction(1)]))
        _, s = root_multiplicity(s, lam)
    if s.degree > 0:
        out.append(s.monic())
    return out


def _restrict(mats: Iterable[QMatrix], basis: list[tuple[Fraction, ...]]) -> list[QMatrix]:
    out = []
    for g in mats:
        cols = []
        for b in basis:
            coords = coordinates_in_span(basis, g.apply(b))
            assert coords is not None, "block must be invariant"
            cols.append(coords)
        out.append(QMatrix.from_columns(cols))
    return out


def _modulus_flag(eigen_poly: QPoly) -> str:
    zeros, stripped = root_multiplicity(eigen_poly, Fraction(0))
    if stripped.degree == 0:
        return "no"
    on = circle_root_count(stripped)
    if on == 0:
        return "no"
    if on == stripped.degree and zeros == 0:
        return "yes"
    return "mixed"


def _count_below(eigen_poly: QPoly, r: Fraction) -> tuple[int, int]:
    """(#roots with modulus < r, #roots with modulus = r), exactly."""
    prof = unit_disk_profile(eigen_poly.shift_scale_arg(r))
    return prof.at_zero + prof.inside, prof.on_circle


def _modulus_interval(eigen_poly: QPoly, steps: int = 16) -> tuple[Fraction, Fraction]:
    """Certified rational bracket [lo, hi] around every root modulus."""
    deg = eigen_poly.degree
    roots = rational_roots(eigen_poly)
    if len(roots) == deg:
        mods = [abs(r) for r in roots]
        return min(mods), max(mods)
    if _modulus_flag(eigen_poly) == "yes":
        return Fraction(1), Fraction(1)
    mono = eigen_poly.monic()
    bound = Fraction(1) + max(abs(c) for c in mono.coeffs[:-1])
    zeros, _ = root_multiplicity(eigen_poly, Fraction(0))
    if zeros > 0:
        lo = Fraction(0)
    else:
        a, b = Fraction(0), bound
        for _ in range(steps):
            mid = (a + b) / 2
            below, _on = _count_below(eigen_poly, mid)
            if below == 0:
                a = mid
            else:
                b = mid
        lo = a
    a, b = Fraction(0), bound
    for _ in range(steps):
        mid = (a + b) / 2
        below, on = _count_below(eigen_poly, mid)
        if below + on == deg:
            b = mid
        else:
            a = mid
    hi = b
    return lo, hi


def weight_decomposition(action: SemigroupAction) -> WeightDecomposition:
    """Joint primary decomposition of a commuting family.

    Blocks are intersections over generators of kernels f(g)^n for the
    pairwise coprime root factors f of each characteristic polynomial;
    commutativity makes every kernel invariant under the whole family.
    """
    _check_commuting(action)
    n = action.dim
    blocks = [Subspace.full(n)]
    for g in action.mats:
        factors = _coprime_root_factors(char_poly(g))
        primaries = [kernel(mat_power(poly_of_matrix(f, g), n)) for f in factors]
        refined = []
        for b in blocks:
            for prim in primaries:
                piece = intersect(b, prim)
                if piece.dim > 0:
                    refined.append(piece)
        blocks = refined
    assert sum(b.dim for b in blocks) == n
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            assert intersect(blocks[i], blocks[j]).dim == 0
    out_blocks = []
    for b in blocks:
        for g in action.mats:
            assert is_invariant(b, g)
        restrictions = _restrict(action.mats, list(b.basis))
        per_gen = {}
        for name, r in zip(action.names, restrictions):
            mp = minimal_poly(r)
            ep = squarefree_part(mp)
            per_gen[name] = GeneratorWeightData(
                minimal_poly=mp,
                eigen_poly=ep,
                modulus_interval=_modulus_interval(ep),
                modulus_is_one=_modulus_flag(ep),
            )
        out_blocks.append(WeightBlock(space=b, per_generator=per_gen))
    return WeightDecomposition(action=action, blocks=tuple(out_blocks))


@dataclass(frozen=True)
class WeightsVerdict:
    status: str
    block_reports: tuple[dict, ...]

    def to_json(self) -> dict:
        return {"status": self.status, "blocks": list(self.block_reports)}


def _word_escapes_block(m: QMatrix, mode: str) -> bool:
    prof = unit_disk_profile(char_poly(m))
    if mode == SEMIGROUP:
        return prof.at_zero == 0 and prof.inside == 0 and prof.on_circle == 0
    return prof.on_circle == 0 and prof.at_zero == 0


def _block_escape_word(action: SemigroupAction, space: Subspace, mode: str, word_len: int = 3, budget: int = 80):
    """A word whose restriction to the block has every weight escaping."""
    restricted = SemigroupAction(
        space.dim, action.names, tuple(_restrict(action.mats, list(space.basis))), action.mode
    )
    for word, m in iter_words(restricted, word_len, budget):
        if _word_escapes_block(m, mode):
            return word
    return None


def _block_is_stuck(block: WeightBlock, mode: str) -> bool:
    """Exact certificate that every weight on the block stays bounded."""
    if mode == SEMIGROUP:
        # all eigenvalues of every generator inside or on the unit circle
        return all(
            unit_disk_profile(d.eigen_poly).outside == 0 for d in block.per_generator.values()
        )
    return all(d.modulus_is_one == "yes" for d in block.per_generator.values())


def expansive_by_weights(decomp: WeightDecomposition, mode: str) -> WeightsVerdict:
    """Three-valued expansiveness test on a weight decomposition.

    A block passes when one word drives every weight off the bounded
    region at once (moduli all > 1 in semigroup mode, all different from
    1 in group mode); it fails when no generator can move any weight.
    Blocks with mixed moduli and no covering word stay undecided.
    """
    check_mode(mode)
    reports = []
    overall = EXPANSIVE
    for block in decomp.blocks:
        word = _block_escape_word(decomp.action, block.space, mode)
        if word is not None:
            reports.append({"dim": block.dim, "status": "escapes", "word": list(word)})
            continue
        if _block_is_stuck(block, mode):
            reports.append({"dim": block.dim, "status": "stuck"})
            overall = NOT_EXPANSIVE
        else:
            reports.append({"dim": block.dim, "status": "undecided"})
            if overall == EXPANSIVE:
                overall = UNKNOWN
    return WeightsVerdict(status=overall, block_reports=tuple(reports))


def find_expansive_element(action: SemigroupAction, word_cap: int = 64) -> Optional[dict]:
    """Constructive search for a single expansive element of a commuting group.

    Greedy repair: start from the generator clearing the most blocks off
    the unit circle; while some block still touches the circle, append a
    block-clearing word, raising the power of the current word (doubling,
    capped at 2^40) until every previously cleared block stays cleared.
    The cleared-block count strictly increases, so the loop ends.  The
    result is re-verified by the exact single-matrix test.
    """
    if action.mode != GROUP:
        raise NotGroupModeError("expansive-element search applies to group actions")
    decomp = weight_decomposition(action)
    verdict = expansive_by_weights(decomp, GROUP)
    if verdict.status != EXPANSIVE:
        return None

    block_restrictions = [
        dict(zip(action.names, _restrict(action.mats, list(b.space.basis)))) for b in decomp.blocks
    ]
    escape_words = [tuple(rep["word"]) for rep in verdict.block_reports]

    def restriction_of(word: tuple[str, ...], table: dict[str, QMatrix], dim: int) -> QMatrix:
        out = QMatrix.identity(dim)
        for name in word:
            out = out @ table[name]
        return out

    def off_circle(r: QMatrix) -> bool:
        return unit_disk_profile(char_poly(r)).on_circle == 0

    def cleared(word: tuple[str, ...]) -> list[bool]:
        return [
            off_circle(restriction_of(word, table, block.dim))
            for block, table in zip(decomp.blocks, block_restrictions)
        ]

    best: tuple[str, ...] = (action.names[0],)
    best_count = sum(cleared(best))
    for name in action.names[1:]:
        c = sum(cleared((name,)))
        if c > best_count:
            best, best_count = (name,), c

    while True:
        flags = cleared(best)
        if all(flags):
            break
        target = flags.index(False)
        repair = escape_words[target]
        m = 1
        while True:
            if m * len(best) + len(repair) > word_cap or m > 2**40:
                return None
            new_flags = [
                off_circle(
                    mat_power(restriction_of(best, table, block.dim), m)
                    @ restriction_of(repair, table, block.dim)
                )
                for block, table in zip(decomp.blocks, block_restrictions)
            ]
            if all(nf for nf, old in zip(new_flags, flags) if old) and new_flags[target]:
                assert sum(new_flags) > sum(flags)
                best = best * m + repair
                break
            m *= 2

    matrix = action.word_matrix(best)
    assert single_expansive(matrix, GROUP).expansive
    return {"word": list(best), "matrix": matrix}
