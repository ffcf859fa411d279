"""Expansiveness of integer matrix actions on the n-torus.

An integer semigroup action on R^n induces one on T^n = R^n/Z^n, and
the torus action is expansive exactly when every nonzero vector of the
covering space has an unbounded orbit.  Two routes are implemented: a
fast sufficient test (infinite semigroup acting irreducibly) and the
general reduction to the linear orbit engine.  A brute-force oracle on
rational grid points gives desk-scale ground truth for small cases.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import (
    QMatrix,
    RationalLike,
    Subspace,
    char_poly,
    coordinates_in_span,
    intersect,
    is_invariant,
    kernel,
    mat_power,
    rational_roots,
    to_fraction,
)
from .orbits import (
    EXPANSIVE,
    INVERSE_SUFFIX,
    ExpansivenessVerdict,
    SemigroupAction,
    expansiveness_check,
    iter_words,
)
from .spectral import GROUP, unit_disk_profile

GRID_STATE_CAP = 10**7


class NonIntegerEntriesError(ValueError):
    pass


class NotUnimodularError(ValueError):
    pass


class GridTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class TorusPoint:
    """Point of T^n with exact rational coordinates reduced into [0, 1)."""

    coords: tuple[Fraction, ...]

    @staticmethod
    def from_coords(coords: Sequence[RationalLike]) -> "TorusPoint":
        return TorusPoint(tuple(to_fraction(c) % 1 for c in coords))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def distance_to_zero(self) -> Fraction:
        # sup metric on the torus: each coordinate sees min(t, 1 - t)
        return max((min(c, 1 - c) for c in self.coords), default=Fraction(0))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]


def _is_integer_matrix(m: QMatrix) -> bool:
    return all(x.denominator == 1 for x in m.entries)


def _check_integer_generators(action: SemigroupAction) -> None:
    for name, g in zip(action.names, action.mats):
        if name.endswith(INVERSE_SUFFIX):
            continue
        if not _is_integer_matrix(g):
            raise NonIntegerEntriesError(f"generator {name!r} has non-integer entries")


def _check_unimodular(action: SemigroupAction) -> None:
    for name, g in zip(action.names, action.mats):
        if name.endswith(INVERSE_SUFFIX):
            continue
        if abs(g.det()) != 1:
            raise NotUnimodularError(f"generator {name!r} has determinant {g.det()}")


@dataclass(frozen=True)
class IrreducibilityReport:
    algebra_dim: int
    absolutely_irreducible: bool
    rational_invariant_subspace: Optional[Subspace]
    conclusion: str  # "Irreducible" | "Reducible" | "Unknown"

    def to_json(self) -> dict:
        return {
            "algebra_dim": self.algebra_dim,
            "absolutely_irreducible": self.absolutely_irreducible,
            "rational_invariant_subspace": (
                None
                if self.rational_invariant_subspace is None
                else self.rational_invariant_subspace.to_json()
            ),
            "conclusion": self.conclusion,
        }


def _flatten(m: QMatrix) -> tuple[Fraction, ...]:
    return m.entries


def algebra_dimension(action: SemigroupAction) -> int:
    """Dimension of the unital algebra spanned by all word matrices.

    Closure under right multiplication by generators, starting from the
    identity, reaches the span of every word; linearity makes checking
    products of basis elements sufficient.
    """
    n = action.dim
    basis_vectors: list[tuple[Fraction, ...]] = []
    basis_mats: list[QMatrix] = []

    def try_add(m: QMatrix) -> bool:
        if coordinates_in_span(basis_vectors, _flatten(m)) is not None:
            return False
        basis_vectors.append(_flatten(m))
        basis_mats.append(m)
        return True

    queue = [QMatrix.identity(n)]
    try_add(queue[0])
    while queue:
        m = queue.pop()
        for g in action.mats:
            p = m @ g
            if try_add(p):
                queue.append(p)
        if len(basis_mats) == n * n:
            break
    return len(basis_mats)


def _invariant_subspace_candidates(action: SemigroupAction, word_len: int, budget: int) -> list[Subspace]:
    n = action.dim
    seeds: list[Subspace] = []
    for _word, m in iter_words(action, word_len, budget):
        k = kernel(m)
        if 0 < k.dim < n:
            seeds.append(k)
        for lam in rational_roots(char_poly(m)):
            eig = kernel(m - QMatrix.identity(n).scale(lam))
            if 0 < eig.dim < n:
                seeds.append(eig)
    out = list(seeds)
    for a, b in itertools.combinations(seeds[:12], 2):
        cut = intersect(a, b)
        if 0 < cut.dim < n:
            out.append(cut)
    out.sort(key=lambda s: s.dim)
    return out


def irreducibility_check(action: SemigroupAction, word_len: int = 2, budget: int = 60) -> IrreducibilityReport:
    """Decide irreducibility of the linear span where cheap tests suffice.

    A full matrix algebra leaves no invariant subspace over any field
    extension; below that threshold only rational witnesses are sought,
    so an R-irreducible action with a small algebra stays Unknown.
    """
    _check_integer_generators(action)
    n = action.dim
    dim = algebra_dimension(action)
    if dim == n * n:
        return IrreducibilityReport(dim, True, None, "Irreducible")
    for cand in _invariant_subspace_candidates(action, word_len, budget):
        if all(is_invariant(cand, g) for g in action.mats):
            return IrreducibilityReport(dim, False, cand, "Reducible")
    return IrreducibilityReport(dim, False, None, "Unknown")


def _totient(d: int) -> int:
    return sum(1 for k in range(1, d + 1) if math.gcd(k, d) == 1)


def _finite_order_exponent(n: int) -> int:
    """Every finite-order integer n x n matrix M satisfies M^L = I.

    The characteristic polynomial of such M is a product of cyclotomic
    polynomials Phi_d with phi(d) <= n, and M is diagonalizable, so its
    order divides L = lcm of those d.  phi(d) >= sqrt(d/2) bounds the
    search range.
    """
    out = 1
    for d in range(1, 2 * n * n + 2):
        if _totient(d) <= n:
            out = math.lcm(out, d)
    return out


def certified_infinite_word(action: SemigroupAction, word_len: int = 3, budget: int = 200):
    """A word of infinite order, or None when no cheap certificate exists."""
    n = action.dim
    exponent = _finite_order_exponent(n)
    ident = QMatrix.identity(n)
    for word, m in iter_words(action, word_len, budget):
        if unit_disk_profile(char_poly(m)).outside > 0:
            return word
        if mat_power(m, exponent) != ident:
            return word
    return None


def torus_expansive(action: SemigroupAction, depth: int = 10) -> ExpansivenessVerdict:
    """Expansiveness of the induced torus action.

    Fast path: an infinite semigroup acting irreducibly on R^n is
    expansive on T^n.  Anything else falls back to the linear orbit
    engine, since torus expansiveness is equivalent to every nonzero
    covering-space vector escaping.
    """
    _check_integer_generators(action)
    if action.mode == GROUP:
        _check_unimodular(action)
    infinite_word = certified_infinite_word(action)
    if infinite_word is not None:
        report = irreducibility_check(action)
        if report.conclusion == "Irreducible":
            return ExpansivenessVerdict(
                status=EXPANSIVE,
                witness=None,
                certificate={
                    "kind": "irreducible_fast_path",
                    "algebra_dim": report.algebra_dim,
                    "infinite_order_word": list(infinite_word),
                },
                evidence={"route": "irreducible-fast-path"},
                search_depth=depth,
            )
    return expansiveness_check(action, depth)


def _reduce_mod_1(vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(c % 1 for c in vec)


def orbit_closure(action: SemigroupAction, point: TorusPoint, cap: int = GRID_STATE_CAP) -> set:
    """All torus points reachable from the given one, exact and finite.

    Integer matrices keep denominators bounded, so the orbit of a
    rational point lies on a fixed finite grid.
    """
    seen = {point.coords}
    stack = [point.coords]
    while stack:
        coords = stack.pop()
        for g in action.mats:
            nxt = _reduce_mod_1(g.apply(coords))
            if nxt not in seen:
                if len(seen) >= cap:
                    raise GridTooLargeError(f"orbit closure exceeded {cap} states")
                seen.add(nxt)
                stack.append(nxt)
    return seen


def orbit_spread(action: SemigroupAction, point: TorusPoint, cap: int = GRID_STATE_CAP) -> Fraction:
    """Largest torus distance from zero attained along the orbit."""
    closure = orbit_closure(action, point, cap)
    return max(TorusPoint(c).distance_to_zero() for c in closure)


@dataclass(frozen=True)
class OracleResult:
    separated: bool
    failing_point: Optional[TorusPoint]
    q: int
    epsilon: Fraction
    states: int

    def to_json(self) -> dict:
        return {
            "separated": self.separated,
            "failing_point": None if self.failing_point is None else self.failing_point.to_json(),
            "q": self.q,
            "epsilon": str(self.epsilon),
            "states": self.states,
        }


def rational_orbit_oracle(
    action: SemigroupAction,
    q: int,
    epsilon: RationalLike,
    cap: int = GRID_STATE_CAP,
) -> OracleResult:
    """Exhaustive expansiveness check on the (1/q)-grid of the torus.

    Every nonzero grid point must reach torus distance >= epsilon from
    zero somewhere along its orbit; grid orbits are a subset of all
    orbits, so a failing point refutes epsilon-expansiveness while
    separation only supports it.
    """
    _check_integer_generators(action)
    eps = to_fraction(epsilon)
    if q < 2:
        raise ValueError("grid parameter q must be at least 2")
    if not (0 < eps <= Fraction(1, 2)):
        raise ValueError("epsilon must lie in (0, 1/2]")
    n = action.dim
    if q**n > cap:
        raise GridTooLargeError(f"{q}^{n} grid states exceed the cap of {cap}")
    states = q**n - 1
    for ks in itertools.product(range(q), repeat=n):
        if all(k == 0 for k in ks):
            continue
        point = TorusPoint(tuple(Fraction(k, q) for k in ks))
        if _point_separates(action, point, eps, cap):
            continue
        return OracleResult(False, point, q, eps, states)
    return OracleResult(True, None, q, eps, states)


def _point_separates(action: SemigroupAction, point: TorusPoint, eps: Fraction, cap: int) -> bool:
    seen = {point.coords}
    stack = [point.coords]
    while stack:
        coords = stack.pop()
        if TorusPoint(coords).distance_to_zero() >= eps:
            return True
        for g in action.mats:
            nxt = _reduce_mod_1(g.apply(coords))
            if nxt not in seen:
                if len(seen) >= cap:
                    raise GridTooLargeError(f"orbit closure exceeded {cap} states")
                seen.add(nxt)
                stack.append(nxt)
    return False
