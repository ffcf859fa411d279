"""Semi-decision engine for expansiveness of finitely generated linear actions.

The action is expansive exactly when every nonzero vector has an unbounded
orbit, so the engine hunts for one of two kinds of exact evidence:

* an element of the semigroup whose spectrum certifies escape of every
  vector (single-word route), possibly after splitting the space along an
  exactly invariant subspace and certifying restriction and quotient
  separately;
* a nonzero invariant subspace carrying an exactly verified invariant
  norm, which bounds every orbit inside it (NotExpansive witness).

Floating point appears only in search heuristics (eigenvalue prescreens,
Gram-matrix growth statistics, JSR bounds); every verdict-bearing claim is
re-derived in rational arithmetic.  Unknown is an honest third answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .exact import (
    QMatrix,
    Subspace,
    char_poly,
    coordinates_in_span,
    intersect,
    is_invariant,
    is_positive_definite,
    is_positive_semidefinite,
    kernel,
    rational_roots,
    solve_exact,
)
from .spectral import GROUP, SEMIGROUP, check_mode, single_expansive, unit_disk_profile

EXPANSIVE = "Expansive"
NOT_EXPANSIVE = "NotExpansive"
UNKNOWN = "Unknown"

INVERSE_SUFFIX = "^-1"


class ZeroVectorError(ValueError):
    pass


class NotInvertibleGeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class SemigroupAction:
    """A finite list of named square rational matrices plus the action mode.

    In group mode the generator list already contains the exact inverses,
    named with an ``^-1`` suffix; use ``from_generators`` to build one.
    """

    dim: int
    names: tuple[str, ...]
    mats: tuple[QMatrix, ...]
    mode: str

    @staticmethod
    def from_generators(named: Iterable[tuple[str, QMatrix]], mode: str) -> "SemigroupAction":
        check_mode(mode)
        names: list[str] = []
        mats: list[QMatrix] = []
        dim: Optional[int] = None
        for name, m in named:
            if not m.is_square:
                raise ValueError(f"generator {name!r} is not square")
            if dim is None:
                dim = m.rows
            elif m.rows != dim:
                raise ValueError(f"generator {name!r} has mismatched dimension")
            names.append(name)
            mats.append(m)
        if dim is None:
            raise ValueError("at least one generator is required")
        if mode == GROUP:
            for name, m in list(zip(names, mats)):
                try:
                    inv = m.inverse()
                except Exception as exc:
                    raise NotInvertibleGeneratorError(
                        f"group mode requires invertible generators; {name!r} is singular"
                    ) from exc
                if inv not in mats:
                    names.append(name + INVERSE_SUFFIX)
                    mats.append(inv)
        return SemigroupAction(dim, tuple(names), tuple(mats), mode)

    def matrix_for(self, name: str) -> QMatrix:
        if name in self.names:
            return self.mats[self.names.index(name)]
        base = name.removesuffix(INVERSE_SUFFIX)
        return self.mats[self.names.index(base)].inverse()

    def word_matrix(self, word: Iterable[str]) -> QMatrix:
        out = QMatrix.identity(self.dim)
        for name in word:
            out = out @ self.matrix_for(name)
        return out


@dataclass(frozen=True)
class EngineConfig:
    word_budget: int = 4000
    closure_cap: int = 400
    gram_depth: int = 12
    exact_gram_depth: int = 4
    bound_cap: float = 2.0
    snap_denominator: int = 10**6
    max_subspaces: int = 8
    metric_tries: int = 6
    jsr_depth: int = 5
    jsr_tol: float = 1e-4


@dataclass
class ExpansivenessVerdict:
    status: str
    witness: Optional[tuple[Fraction, ...]]
    certificate: Optional[dict]
    evidence: dict
    search_depth: int


# ------------------------------------------------------------ word search


def _float_mats(action: SemigroupAction) -> list[np.ndarray]:
    return [np.array(m.to_floats(), dtype=float) for m in action.mats]


def iter_words(action: SemigroupAction, max_len: int, budget: int):
    """Breadth-first distinct word matrices, as (word, matrix) pairs.

    Words whose matrix was already seen are neither yielded nor extended;
    for the searches below only the semigroup element matters.
    """
    seen = {QMatrix.identity(action.dim)}
    frontier: list[tuple[tuple[str, ...], QMatrix]] = [((), QMatrix.identity(action.dim))]
    emitted = 0
    for _ in range(max_len):
        nxt: list[tuple[tuple[str, ...], QMatrix]] = []
        for word, m in frontier:
            for name, g in zip(action.names, action.mats):
                wm = m @ g
                if wm in seen:
                    continue
                seen.add(wm)
                yield word + (name,), wm
                emitted += 1
                if emitted >= budget:
                    return
                nxt.append((word + (name,), wm))
        if not nxt:
            return
        frontier = nxt


def _word_prescreen(m: QMatrix, mode: str) -> bool:
    """Cheap float filter; anything within 1e-8 of the boundary survives."""
    mods = np.abs(np.linalg.eigvals(np.array(m.to_floats(), dtype=float)))
    if mode == SEMIGROUP:
        return bool(np.min(mods) > 1 - 1e-9)
    return bool(np.all(np.abs(mods - 1) > 1e-9) or np.min(np.abs(mods - 1)) <= 1e-8)


def find_expansive_word(action: SemigroupAction, max_len: int, budget: int):
    """First word whose single matrix is expansive in the action's mode."""
    for word, m in iter_words(action, max_len, budget):
        if not _word_prescreen(m, action.mode):
            continue
        p = char_poly(m)
        # exact root at 0 or +-1 already refutes expansiveness of the word
        if p(1) == 0 or p(-1) == 0 or p(0) == 0:
            continue
        if single_expansive(m, action.mode).expansive:
            return word, m
    return None


# --------------------------------------------------------- orbit probing


def orbit_simulate(
    action: SemigroupAction,
    v: tuple[Fraction, ...],
    max_depth: int,
    escape_radius: float,
) -> dict:
    """Breadth-first orbit exploration with direction-based pruning.

    States are stored as (unit direction, norm); a state whose direction
    lies within 2^-20 of a previously expanded one with at least the same
    norm is not re-expanded.
    """
    vec = np.array([float(x) for x in v], dtype=float)
    norm0 = float(np.linalg.norm(vec))
    if norm0 == 0:
        raise ZeroVectorError("orbit simulation needs a nonzero start vector")
    if escape_radius <= norm0:
        raise ValueError("escape radius must exceed the start norm")
    gens = list(zip(action.names, _float_mats(action)))
    seen: list[tuple[np.ndarray, float]] = []
    frontier: list[tuple[tuple[str, ...], np.ndarray]] = [((), vec)]
    max_norm = norm0
    tol = 2.0**-20
    for _ in range(max_depth):
        nxt = []
        for word, x in frontier:
            for name, g in gens:
                y = g @ x
                ny = float(np.linalg.norm(y))
                max_norm = max(max_norm, ny)
                w = word + (name,)
                if ny > escape_radius:
                    return {"escaped": True, "word": list(w), "max_norm": max_norm}
                if ny == 0:
                    continue
                d = y / ny
                if any(np.linalg.norm(d - sd) <= tol and sn >= ny * (1 - tol) for sd, sn in seen):
                    continue
                seen.append((d, ny))
                nxt.append((w, y))
        if not nxt:
            break
        frontier = nxt
    return {"escaped": False, "word": None, "max_norm": max_norm}


def jsr_bounds(action: SemigroupAction, depth: int, tol: float) -> dict:
    """Joint spectral radius bracket: averaged spectral radii from below,
    Gripenberg branch-and-bound on norm products from above."""
    mats = _float_mats(action)
    lower = 0.0
    for word, m in iter_words(action, depth, 2000):
        arr = np.array(m.to_floats(), dtype=float)
        sr = float(np.max(np.abs(np.linalg.eigvals(arr))))
        lower = max(lower, sr ** (1.0 / len(word)))
    # beta is the min over the branch's prefixes of the averaged norm; the
    # true JSR never exceeds max(lower, all betas at or past the cut)
    upper_candidates: list[float] = []
    frontier = [(g, float(np.linalg.norm(g, 2))) for g in mats]
    for length in range(1, depth + 1):
        nxt = []
        for prod, beta in frontier:
            if beta <= lower + tol or length == depth:
                upper_candidates.append(beta)
                continue
            for g in mats:
                p = prod @ g
                nb = min(beta, float(np.linalg.norm(p, 2)) ** (1.0 / (length + 1)))
                nxt.append((p, nb))
        frontier = nxt
        if not frontier:
            break
    upper = max(upper_candidates) if upper_candidates else lower
    return {"lower": lower, "upper": max(lower, upper)}


# -------------------------------------------- bounded-subspace machinery


def snap_vector(v: np.ndarray, max_den: int) -> Optional[tuple[Fraction, ...]]:
    big = float(np.max(np.abs(v)))
    if big == 0 or not math.isfinite(big):
        return None
    scaled = v / v[int(np.argmax(np.abs(v)))]
    return tuple(Fraction(float(x)).limit_denominator(max_den) for x in scaled)


def invariant_closure(action: SemigroupAction, vectors: Iterable[Iterable[Fraction]]) -> Subspace:
    """Smallest exactly invariant subspace containing the given vectors."""
    space = Subspace.from_vectors(action.dim, [tuple(v) for v in vectors])
    while True:
        extra = []
        for b in space.basis:
            for g in action.mats:
                w = g.apply(b)
                if not space.contains(w):
                    extra.append(w)
        if not extra:
            return space
        space = Subspace.from_vectors(action.dim, list(space.basis) + extra)


def _growth_normalized_gram(action: SemigroupAction, depth: int) -> np.ndarray:
    """Average over word lengths of (1/m^l) sum over |w|=l of rho(w)' rho(w).

    Equals B_l' B_l / m^l for the stacked length-l word matrix B_l, so its
    small eigenvalues flag directions every length-l word keeps small.
    """
    n = action.dim
    mats = _float_mats(action)
    m = max(len(mats), 1)
    g = np.eye(n)
    s = np.eye(n)
    levels = 1
    for _ in range(depth):
        g = sum((a.T @ g @ a) for a in mats) / m
        if not np.all(np.isfinite(g)) or np.max(np.abs(g)) > 1e14:
            break
        s = s + g
        levels += 1
    return s / levels


def _bounded_directions(action: SemigroupAction, depth: int, threshold: float, cfg: EngineConfig) -> Subspace:
    s = _growth_normalized_gram(action, depth)
    eigvals, eigvecs = np.linalg.eigh((s + s.T) / 2)
    snapped = []
    for i in range(len(eigvals)):
        if eigvals[i] <= threshold:
            sv = snap_vector(eigvecs[:, i], cfg.snap_denominator)
            if sv is not None:
                snapped.append(sv)
    if not snapped:
        return Subspace.zero(action.dim)
    return invariant_closure(action, snapped)


def bounded_subspace_estimate(
    action: SemigroupAction,
    depth: int,
    threshold: float = 2.0,
    cfg: EngineConfig = EngineConfig(),
) -> dict:
    """Numeric estimate of the bounded-orbit subspace, snapped and verified.

    Directions are filtered by a growth-normalized word Gram form (the
    normalization keeps isometric directions near 1 regardless of depth,
    so the threshold is scale-free).  Survivors are rationalized and
    closed under the action; the returned candidate is exactly invariant
    by construction.  The boundedness certificate and the complement
    escape evidence are attempted independently; either is reported as
    "Unknown" when unverifiable, never guessed.
    """
    candidate = _bounded_directions(action, depth, threshold, cfg)
    for g in action.mats:
        assert is_invariant(candidate, g)
    if candidate.dim == 0:
        cert = _norm_cert([], QMatrix.identity(0), "trivial")
    else:
        cert = None
        found = certify_bounded(action, candidate, cfg)
        if found is not None:
            cert = _norm_cert(list(candidate.basis), found["gram"], found["method"])
    escape = {"trivial": True} if candidate.dim == action.dim else None
    if candidate.dim < action.dim:
        quo = _quotient_action(action, candidate)[0] if candidate.dim else action
        hit = find_expansive_word(quo, max(4, depth // 2), cfg.word_budget // 4)
        if hit is not None:
            escape = {"word": list(hit[0]), "profile": unit_disk_profile(char_poly(hit[1])).to_json()}
        else:
            for word, m in iter_words(quo, max(4, depth // 2), cfg.word_budget // 4):
                prof = unit_disk_profile(char_poly(m))
                if prof.outside > 0:
                    escape = {"word": list(word), "profile": prof.to_json()}
                    break
    return {
        "candidate": candidate,
        "bounded_cert": cert if cert is not None else UNKNOWN,
        "complement_escape": escape if escape is not None else UNKNOWN,
    }


def _restrict_action(action: SemigroupAction, basis: list[tuple[Fraction, ...]]) -> SemigroupAction:
    mats = []
    for g in action.mats:
        cols = []
        for b in basis:
            coords = coordinates_in_span(basis, g.apply(b))
            assert coords is not None, "space must be invariant"
            cols.append(coords)
        mats.append(QMatrix.from_columns(cols))
    return SemigroupAction(len(basis), action.names, tuple(mats), action.mode)


def _complete_basis(space: Subspace) -> list[tuple[Fraction, ...]]:
    n = space.ambient_dim
    chosen: list[tuple[Fraction, ...]] = list(space.basis)
    comp = []
    for i in range(n):
        e = tuple(Fraction(1 if j == i else 0) for j in range(n))
        trial = Subspace.from_vectors(n, chosen + [e])
        if trial.dim > len(chosen):
            chosen.append(e)
            comp.append(e)
    assert len(chosen) == n
    return comp


def _quotient_action(
    action: SemigroupAction, space: Subspace
) -> tuple[SemigroupAction, list[tuple[Fraction, ...]], QMatrix]:
    """Quotient by an invariant subspace via an adapted basis.

    Returns (quotient action, completion vectors, change-of-basis P whose
    columns are the space basis followed by the completion).
    """
    comp = _complete_basis(space)
    p = QMatrix.from_columns(list(space.basis) + comp)
    pinv = p.inverse()
    k = space.dim
    mats = []
    for g in action.mats:
        t = pinv @ g @ p
        for i in range(k, action.dim):
            for j in range(k):
                assert t[i, j] == 0, "space must be invariant"
        mats.append(QMatrix.from_rows([[t[i, j] for j in range(k, action.dim)] for i in range(k, action.dim)]))
    quo = SemigroupAction(action.dim - k, action.names, tuple(mats), action.mode)
    return quo, comp, p


# ------------------------------------------------ boundedness certificates


def _gram_nonincreasing(mats: Iterable[QMatrix], q: QMatrix) -> bool:
    return all(is_positive_semidefinite(q - (g.transpose() @ q @ g)) for g in mats)


def certify_bounded(action: SemigroupAction, space: Subspace, cfg: EngineConfig = EngineConfig()) -> Optional[dict]:
    """Exact invariant-norm certificate for the restriction to a space.

    Tries, in order: the restriction being trivial, the Euclidean norm, a
    finite product closure (whose summed Gram matrix is invariant), an
    exact word-Gram partial sum, and an exactly solved invariant metric.
    Every candidate is validated by exact positive semidefiniteness of
    Q - g'Qg per generator with Q positive definite, so a returned
    certificate bounds every orbit in the space.
    """
    if space.dim == 0:
        return None
    res = _restrict_action(action, list(space.basis))
    k = res.dim
    ident = QMatrix.identity(k)
    if all(m == ident for m in res.mats):
        return {"gram": ident, "method": "identity"}
    if _gram_nonincreasing(res.mats, ident):
        return {"gram": ident, "method": "euclidean"}
    closure = _finite_closure(res, cfg.closure_cap)
    if closure is not None:
        # sum s's over the closure plus the identity, each element once; for
        # a finite right-closed set this form is exactly nonincreasing
        q = ident
        for s in closure:
            if s != ident:
                q = q + (s.transpose() @ s)
        if _gram_nonincreasing(res.mats, q):
            return {"gram": q, "method": "finite_closure"}
    q = _exact_gram_sum(res, cfg.exact_gram_depth)
    if _gram_nonincreasing(res.mats, q):
        return {"gram": q, "method": "word_gram"}
    solved = _solve_invariant_metric(res, cfg.metric_tries)
    if solved is not None:
        return {"gram": solved, "method": "isometry_metric"}
    return None


def _finite_closure(action: SemigroupAction, cap: int) -> Optional[list[QMatrix]]:
    seen = set(action.mats)
    frontier = list(dict.fromkeys(action.mats))
    out = list(frontier)
    while frontier:
        nxt = []
        for m in frontier:
            for g in action.mats:
                w = m @ g
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    out.append(w)
                    if len(out) > cap:
                        return None
        frontier = nxt
    return out


def _exact_gram_sum(action: SemigroupAction, depth: int) -> QMatrix:
    g = QMatrix.identity(action.dim)
    total = QMatrix.identity(action.dim)
    for _ in range(depth):
        terms = [(a.transpose() @ g @ a) for a in action.mats]
        g = terms[0]
        for t in terms[1:]:
            g = g + t
        total = total + g
    return total


def _solve_invariant_metric(action: SemigroupAction, tries: int) -> Optional[QMatrix]:
    """Exact positive definite Q with g'Qg = Q for every generator, or None."""
    n = action.dim
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    var_index = {p: t for t, p in enumerate(pairs)}

    def sym_from(vals: Iterable[Fraction]) -> QMatrix:
        vals = list(vals)
        ent = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), t in var_index.items():
            ent[i][j] = vals[t]
            ent[j][i] = vals[t]
        return QMatrix.from_rows(ent)

    rows = []
    for g in action.mats:
        for a, b in pairs:
            row = [Fraction(0)] * len(pairs)
            # coefficient of the variable Q_{ij} in (g'Qg - Q)_{ab}
            for (i, j), t in var_index.items():
                coef = g[i, a] * g[j, b]
                if i != j:
                    coef += g[j, a] * g[i, b]
                if (i, j) == (a, b):
                    coef -= 1
                row[t] = coef
            rows.append(row)
    null = kernel(QMatrix.from_rows(rows))
    if null.dim == 0:
        return None
    basis = [sym_from(v) for v in null.basis]
    combos: list[list[int]] = [[1] * len(basis), [-1] * len(basis)]
    for s in range(len(basis)):
        combos.append([1 if t == s else 0 for t in range(len(basis))])
        combos.append([-1 if t == s else 0 for t in range(len(basis))])
    for s in range(max(0, tries)):
        combos.append([(s + 1) ** t % 7 + 1 for t in range(len(basis))])
    for combo in combos:
        if not any(combo):
            continue
        q = basis[0].scale(Fraction(combo[0]))
        for b, c in zip(basis[1:], combo[1:]):
            q = q + b.scale(Fraction(c))
        if is_positive_definite(q):
            return q
    return None


# --------------------------------------------- invariant subspace search


def _eigenvector_seeds(action: SemigroupAction, word_len: int, budget: int) -> list[tuple[Fraction, ...]]:
    out: list[tuple[Fraction, ...]] = []
    mats = list(dict.fromkeys(action.mats))
    for _, m in iter_words(action, word_len, budget):
        if m not in mats:
            mats.append(m)
    for m in mats:
        for lam in rational_roots(char_poly(m)):
            out.extend(kernel(m - QMatrix.identity(action.dim).scale(lam)).basis)
        if action.mode == SEMIGROUP:
            out.extend(kernel(m).basis)
    return out


def _proper_invariant_subspaces(action: SemigroupAction, cfg: EngineConfig, depth: int) -> list[Subspace]:
    n = action.dim
    seeds = _eigenvector_seeds(action, 2, 40)
    s = _growth_normalized_gram(action, min(depth, cfg.gram_depth))
    eigvals, eigvecs = np.linalg.eigh((s + s.T) / 2)
    for i in range(len(eigvals)):
        sv = snap_vector(eigvecs[:, i], cfg.snap_denominator)
        if sv is not None:
            seeds.append(sv)
    spaces: list[Subspace] = []
    seen = set()
    for v in seeds:
        if all(x == 0 for x in v):
            continue
        sp = invariant_closure(action, [v])
        if 0 < sp.dim < n and sp.basis not in seen:
            seen.add(sp.basis)
            spaces.append(sp)
    # pairwise intersections occasionally expose smaller invariant spaces
    for a in list(spaces):
        for b in list(spaces):
            c = intersect(a, b)
            if 0 < c.dim < n and c.basis not in seen and all(is_invariant(c, g) for g in action.mats):
                seen.add(c.basis)
                spaces.append(c)
    spaces.sort(key=lambda sp: (sp.dim, sp.basis))
    return spaces[: cfg.max_subspaces]


# ------------------------------------------------------------- the engine


def _norm_cert(basis_rows: list[tuple[Fraction, ...]], gram: QMatrix, method: str) -> dict:
    return {
        "kind": "InvariantNormFound",
        "space": [[str(x) for x in b] for b in basis_rows],
        "gram": gram.to_json(),
        "slack": "0",
        "method": method,
    }


def _embed(space: Subspace, local: Iterable[Fraction]) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * space.ambient_dim
    for c, b in zip(local, space.basis):
        for i in range(space.ambient_dim):
            out[i] += c * b[i]
    return tuple(out)


def _norm_bound_from_cert(cert: dict, witness: tuple[Fraction, ...]) -> float:
    """Float upper bound on the witness orbit's Euclidean norm.

    x'Qx never increases along the orbit, so every orbit point y obeys
    lam_min(Q) |y|^2 <= x'Qx <= lam_max(Q) |x|^2 over the certified space.
    """
    gram = np.array([[float(Fraction(x)) for x in row] for row in cert["gram"]], dtype=float)
    eig = np.linalg.eigvalsh(gram)
    wnorm = math.sqrt(sum(float(x) * float(x) for x in witness))
    lo, hi = float(eig[0]), float(eig[-1])
    if lo <= 0:
        lo = min((abs(float(x)) for x in eig if x != 0), default=1.0)
    return math.sqrt(hi / lo) * wnorm * (1 + 1e-9)


def _spectral_witness(m: QMatrix, mode: str) -> Optional[tuple[tuple[Fraction, ...], Fraction]]:
    for lam in rational_roots(char_poly(m)):
        ok = (lam * lam <= 1) if mode == SEMIGROUP else (lam * lam == 1)
        if not ok:
            continue
        eig = kernel(m - QMatrix.identity(m.rows).scale(lam))
        if eig.dim > 0:
            return eig.basis[0], lam
    return None


def expansiveness_check(
    action: SemigroupAction,
    depth: int = 10,
    cfg: EngineConfig = EngineConfig(),
) -> ExpansivenessVerdict:
    """Three-valued expansiveness test with machine-checkable certificates.

    Expansive and NotExpansive come with certificates that re-verify in
    exact arithmetic; Unknown carries only search evidence.
    """
    res = _analyze(action, depth, cfg, {})
    evidence = dict(res.evidence)
    if res.status == NOT_EXPANSIVE and res.witness is not None and res.certificate is not None:
        if res.certificate.get("kind") == "InvariantNormFound":
            evidence["norm_bound"] = _norm_bound_from_cert(res.certificate, res.witness)
        else:
            evidence["norm_bound"] = math.sqrt(sum(float(x) ** 2 for x in res.witness))
    if res.status != NOT_EXPANSIVE:
        try:
            evidence["jsr"] = jsr_bounds(action, min(depth, cfg.jsr_depth), cfg.jsr_tol)
        except Exception:
            pass
    return replace(res, evidence=evidence)


def _analyze(action: SemigroupAction, depth: int, cfg: EngineConfig, memo: dict) -> ExpansivenessVerdict:
    key = (action.mats, action.mode, depth)
    if key in memo:
        return memo[key]
    out = _analyze_uncached(action, depth, cfg, memo)
    memo[key] = out
    return out


def _analyze_uncached(action: SemigroupAction, depth: int, cfg: EngineConfig, memo: dict) -> ExpansivenessVerdict:
    n = action.dim
    if n == 0:
        return ExpansivenessVerdict(EXPANSIVE, None, {"kind": "empty_space"}, {"route": "empty"}, 0)

    # 1. single-element spectral certificate
    found = find_expansive_word(action, depth, cfg.word_budget)
    if found is not None:
        word, m = found
        prof = unit_disk_profile(char_poly(m))
        cert = {"kind": "word_spectrum", "word": list(word), "profile": prof.to_json()}
        ev = {"escape_words": [list(word)], "route": "word-spectrum"}
        return ExpansivenessVerdict(EXPANSIVE, None, cert, ev, depth)

    # 2. cyclic actions are decided outright by one spectrum
    held: Optional[ExpansivenessVerdict] = None
    cyclic = _cyclic_generator(action)
    if cyclic is not None:
        name, m = cyclic
        if action.mode == SEMIGROUP or m.det() != 0:
            verdict = single_expansive(m, action.mode)
            if not verdict.expansive:
                cert = {"kind": "spectral_obstruction", "word": [name], "profile": verdict.profile.to_json()}
                wit = _spectral_witness(m, action.mode)
                if wit is not None:
                    cert["witness_eigenvalue"] = str(wit[1])
                held = ExpansivenessVerdict(
                    NOT_EXPANSIVE, wit[0] if wit else None, cert, {"route": "single-spectrum"}, depth
                )
                if wit is not None:
                    return held

    # 3. bounded invariant subspace, numerically guessed then exactly certified
    candidate = _bounded_directions(action, min(depth + 2, cfg.gram_depth), cfg.bound_cap, cfg)
    if candidate.dim > 0:
        cert = certify_bounded(action, candidate, cfg)
        if cert is not None:
            return ExpansivenessVerdict(
                NOT_EXPANSIVE,
                candidate.basis[0],
                _norm_cert(list(candidate.basis), cert["gram"], cert["method"]),
                {"route": "bounded-subspace"},
                depth,
            )

    # 4. split along proper invariant subspaces
    for space in _proper_invariant_subspaces(action, cfg, depth):
        resolved = _split_analysis(action, space, depth, cfg, memo)
        if resolved is not None and resolved.status != UNKNOWN:
            return resolved

    if held is not None:
        return held
    return ExpansivenessVerdict(UNKNOWN, None, None, {"route": "inconclusive"}, depth)


def _cyclic_generator(action: SemigroupAction) -> Optional[tuple[str, QMatrix]]:
    """The generating matrix when the action is generated by one element."""
    ident = QMatrix.identity(action.dim)
    named = list(dict.fromkeys(zip(action.names, action.mats)))
    nontrivial = [(nm, m) for nm, m in named if m != ident]
    if not nontrivial:
        return named[0][0], ident
    distinct = list(dict.fromkeys(m for _, m in nontrivial))
    if len(distinct) == 1:
        return nontrivial[0]
    if action.mode == GROUP and len(distinct) == 2 and distinct[0] @ distinct[1] == ident:
        return nontrivial[0]
    return None


def _split_analysis(
    action: SemigroupAction, space: Subspace, depth: int, cfg: EngineConfig, memo: dict
) -> Optional[ExpansivenessVerdict]:
    restriction = _restrict_action(action, list(space.basis))
    res = _analyze(restriction, depth, cfg, memo)

    if res.status == NOT_EXPANSIVE:
        return _lift_restriction_obstruction(action, space, res, depth, cfg)

    if res.status != EXPANSIVE:
        return None

    quo, comp, p = _quotient_action(action, space)
    qres = _analyze(quo, depth, cfg, memo)

    if qres.status == EXPANSIVE:
        cert = {
            "kind": "split",
            "space": [[str(x) for x in b] for b in space.basis],
            "complement": [[str(x) for x in b] for b in comp],
            "restriction": res.certificate,
            "quotient": qres.certificate,
        }
        words = (res.evidence.get("escape_words") or []) + (qres.evidence.get("escape_words") or [])
        return ExpansivenessVerdict(EXPANSIVE, None, cert, {"escape_words": words, "route": "split"}, depth)

    if qres.status == NOT_EXPANSIVE and quo.dim == 1:
        return _one_dim_quotient_analysis(action, space, comp, p, res, depth, cfg)

    if qres.status == NOT_EXPANSIVE and quo.dim > 1:
        return _graph_lift(action, space, p, quo, qres, depth, cfg)
    return None


def _lift_restriction_obstruction(
    action: SemigroupAction, space: Subspace, res: ExpansivenessVerdict, depth: int, cfg: EngineConfig
) -> Optional[ExpansivenessVerdict]:
    """Bounded orbits inside an invariant subspace are bounded orbits, full stop."""
    cert = res.certificate or {}
    if cert.get("kind") == "InvariantNormFound":
        rows = [_embed(space, [Fraction(x) for x in row]) for row in cert["space"]]
        gram = QMatrix.from_json(cert["gram"])
        # the restriction matrices over these ambient rows coincide entry for
        # entry with the ones the gram was certified against
        out = _norm_cert(rows, gram, cert.get("method", "inherited"))
        witness = _embed(space, res.witness) if res.witness is not None else rows[0]
        return ExpansivenessVerdict(NOT_EXPANSIVE, witness, out, {"route": "bounded-subspace"}, depth)
    if res.witness is not None:
        ambient = _embed(space, res.witness)
        line = invariant_closure(action, [ambient])
        bound = certify_bounded(action, line, cfg)
        if bound is not None:
            return ExpansivenessVerdict(
                NOT_EXPANSIVE,
                ambient,
                _norm_cert(list(line.basis), bound["gram"], bound["method"]),
                {"route": "bounded-subspace"},
                depth,
            )
    bound = certify_bounded(action, space, cfg)
    if bound is not None:
        return ExpansivenessVerdict(
            NOT_EXPANSIVE,
            space.basis[0],
            _norm_cert(list(space.basis), bound["gram"], bound["method"]),
            {"route": "bounded-subspace"},
            depth,
        )
    return None


def _adapted_blocks(action: SemigroupAction, space: Subspace, p: QMatrix):
    pinv = p.inverse()
    k = space.dim
    for g in action.mats:
        t = pinv @ g @ p
        a = QMatrix.from_rows([[t[i, j] for j in range(k)] for i in range(k)])
        b = QMatrix.from_rows([[t[i, j] for j in range(k, action.dim)] for i in range(k)])
        d = QMatrix.from_rows([[t[i, j] for j in range(k, action.dim)] for i in range(k, action.dim)])
        yield a, b, d


def _one_dim_quotient_analysis(
    action: SemigroupAction,
    space: Subspace,
    comp: list[tuple[Fraction, ...]],
    p: QMatrix,
    res: ExpansivenessVerdict,
    depth: int,
    cfg: EngineConfig,
) -> Optional[ExpansivenessVerdict]:
    """Decide the extension when the quotient is a one dimensional action.

    With the restriction expansive, the bounded subspace meets the
    invariant subspace in 0, so it is at most a line mapping onto the
    quotient; such a line exists iff the joint system
    (A_g - mu_g I) u = -B_g over all generators is solvable.  Insolvable
    means no bounded vector anywhere; solvable hands over an explicit
    bounded line.
    """
    k = space.dim
    blocks = list(_adapted_blocks(action, space, p))
    scalars = [d[0, 0] for _, _, d in blocks]
    space_json = [[str(x) for x in b] for b in space.basis]
    comp_json = [[str(x) for x in b] for b in comp]

    big = next((i for i, mu in enumerate(scalars) if mu * mu > 1), None)
    if big is not None:
        # the quotient escapes by that generator alone, so the extension splits
        quo_prof = unit_disk_profile(char_poly(QMatrix.from_rows([[scalars[big]]])))
        cert = {
            "kind": "split",
            "space": space_json,
            "complement": comp_json,
            "restriction": res.certificate,
            "quotient": {"kind": "word_spectrum", "word": [action.names[big]], "profile": quo_prof.to_json()},
        }
        words = (res.evidence.get("escape_words") or []) + [[action.names[big]]]
        return ExpansivenessVerdict(EXPANSIVE, None, cert, {"escape_words": words, "route": "split"}, depth)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for (a, b, _), mu in zip(blocks, scalars):
        shifted = a - QMatrix.identity(k).scale(mu)
        for i in range(k):
            rows.append([shifted[i, j] for j in range(k)])
            rhs.append(-b[i, 0])
    sol = solve_exact(QMatrix.from_rows(rows), rhs)

    if sol is None:
        cert = {
            "kind": "affine_obstruction",
            "space": space_json,
            "complement": comp_json,
            "restriction": res.certificate,
            "scalars": {name: str(mu) for name, mu in zip(action.names, scalars)},
        }
        words = res.evidence.get("escape_words") or []
        return ExpansivenessVerdict(
            EXPANSIVE, None, cert, {"escape_words": words, "route": "affine-obstruction"}, depth
        )

    ambient = p.apply(tuple(list(sol) + [Fraction(1)]))
    line = Subspace.from_vectors(action.dim, [ambient])
    bound = certify_bounded(action, line, cfg)
    if bound is None:
        return None
    return ExpansivenessVerdict(
        NOT_EXPANSIVE,
        line.basis[0],
        _norm_cert(list(line.basis), bound["gram"], bound["method"]),
        {"route": "invariant-line"},
        depth,
    )


def _graph_lift(
    action: SemigroupAction,
    space: Subspace,
    p: QMatrix,
    quo: SemigroupAction,
    qres: ExpansivenessVerdict,
    depth: int,
    cfg: EngineConfig,
) -> Optional[ExpansivenessVerdict]:
    """Lift a certified bounded quotient subspace to a bounded graph space.

    A bounded subspace meeting the invariant space in 0 projects into the
    quotient's bounded subspace, so it is the graph of some linear map L
    over part of it; solving the intertwining system for L over all of it
    is a sufficient (not a necessary) probe, hence None on failure.
    """
    cert = qres.certificate or {}
    if cert.get("kind") != "InvariantNormFound":
        return None
    vq_rows = [tuple(Fraction(x) for x in row) for row in cert["space"]]
    q2 = len(vq_rows)
    k = space.dim
    blocks = list(_adapted_blocks(action, space, p))
    basis_mat = QMatrix.from_columns(vq_rows)
    dprime = []
    for _, _, d in blocks:
        cols = []
        for b in vq_rows:
            coords = coordinates_in_span(vq_rows, d.apply(b))
            if coords is None:
                return None
            cols.append(coords)
        dprime.append(QMatrix.from_columns(cols))
    nvars = k * q2
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for (a, b, _), dp in zip(blocks, dprime):
        bp = b @ basis_mat
        for i in range(k):
            for j in range(q2):
                row = [Fraction(0)] * nvars
                for t in range(k):
                    row[t * q2 + j] += a[i, t]
                for t in range(q2):
                    row[i * q2 + t] -= dp[t, j]
                rows.append(row)
                rhs.append(-bp[i, j])
    sol = solve_exact(QMatrix.from_rows(rows), rhs)
    if sol is None:
        return None
    vectors = []
    for j in range(q2):
        top = [sol[i * q2 + j] for i in range(k)]
        bottom = list(vq_rows[j])
        vectors.append(p.apply(tuple(top + bottom)))
    graph_space = Subspace.from_vectors(action.dim, vectors)
    bound = certify_bounded(action, graph_space, cfg)
    if bound is None:
        return None
    return ExpansivenessVerdict(
        NOT_EXPANSIVE,
        graph_space.basis[0],
        _norm_cert(list(graph_space.basis), bound["gram"], bound["method"]),
        {"route": "graph-lift"},
        depth,
    )
