"""Conjugate partitions and quotient algebras of su(N).

Implements the quotient-algebra construction: seed a generator outside the
center subalgebra, commutate with the center to produce the conjugate space,
reverse once to complete the pair, repeat until the basis is exhausted, then
merge commuting fragments consistently with the binary partitioning. Also
holds the closure verification, the binary string labels, the removing
process for dimensions that are not powers of two, and the subscript tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import generators as gen
from ._linalg import (
    SOLVE_TOL,
    STRUCT_TOL,
    all_commute,
    dagger,
    frob,
    in_span,
    project_residual,
    simultaneous_diagonalize,
    span_rank,
    span_rows,
)
from .errors import (
    BasisNotClosedError,
    ClosureViolationError,
    DimensionMismatchError,
    InvalidMatrixError,
    InvalidSubscriptError,
    NotAbelianError,
    NotBinaryPartitionedError,
    NotMaximalError,
)
from .generators import Diag, Generator, Lambda, LambdaHat

__all__ = [
    "AbelianSpace",
    "ConjugatePair",
    "QuotientAlgebra",
    "SubscriptTable",
    "ClosureCheck",
    "ClosureReport",
    "intrinsic_center",
    "standard_basis",
    "standard_word_center",
    "lambda_basis",
    "diagonalize_abelian",
    "build_quotient_algebra",
    "intrinsic_quotient_algebra",
    "standard_quotient_algebra",
    "binary_label_of",
    "verify_closure",
    "removing_process",
    "subscript_table_of",
    "conjugate_quotient_algebra",
]


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AbelianSpace:
    """A commuting, linearly independent set of generators spanning a vector space."""

    generators: Tuple[Generator, ...]
    hat: bool = False
    binary_label: Optional[str] = None

    def __post_init__(self):
        if not self.generators:
            raise InvalidMatrixError("abelian space needs at least one generator")
        dims = {g.dim for g in self.generators}
        if len(dims) != 1:
            raise DimensionMismatchError("generators of one space must share a dim")
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    @property
    def matrices(self) -> List[np.ndarray]:
        return [g.matrix for g in self.generators]

    def validate(self, tol: float = STRUCT_TOL):
        if not all_commute(self.matrices, tol):
            raise NotAbelianError("space generators do not commute")
        if span_rank(self.matrices) != len(self.generators):
            raise InvalidMatrixError("space generators are linearly dependent")

    def span(self) -> np.ndarray:
        return span_rows(self.matrices)

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        tag = "W^" if self.hat else "W"
        lab = self.binary_label or "?"
        return f"AbelianSpace({tag}_{lab}, {len(self.generators)} generators)"


@dataclass(frozen=True, eq=False)
class ConjugatePair:
    """A conjugate pair {W, W^} of abelian spaces."""

    w: AbelianSpace
    w_hat: AbelianSpace
    binary_label: Optional[str] = None

    def __post_init__(self):
        if len(self.w) != len(self.w_hat):
            raise InvalidMatrixError("conjugate spaces must have equal size")

    @property
    def spaces(self) -> Tuple[AbelianSpace, AbelianSpace]:
        return (self.w, self.w_hat)

    def all_matrices(self) -> List[np.ndarray]:
        return self.w.matrices + self.w_hat.matrices


@dataclass(frozen=True, eq=False)
class QuotientAlgebra:
    """Center subalgebra plus conjugate pairs, closed under the commutator."""

    center: AbelianSpace
    pairs: Tuple[ConjugatePair, ...]
    dim: int
    p: int

    @property
    def labeled(self) -> bool:
        return all(pair.binary_label is not None for pair in self.pairs)

    def pair_by_label(self, label: str) -> ConjugatePair:
        for pair in self.pairs:
            if pair.binary_label == label:
                return pair
        raise KeyError(f"no pair labeled {label}")

    def generator_count(self) -> int:
        return len(self.center) + sum(2 * len(p.w) for p in self.pairs)

    def __repr__(self):
        return f"QuotientAlgebra(su({self.dim}), {len(self.pairs)} pairs)"


def bits_of(value: int, p: int) -> str:
    return format(value, f"0{p}b")


def label_int(label: str) -> int:
    return int(label, 2)


# ---------------------------------------------------------------------------
# Standard bases and centers
# ---------------------------------------------------------------------------

def _site_symbols(d: int, diagonal_only: bool) -> List[str]:
    """Symbols of one site, identity first; optionally only diagonal ones."""
    if d == 2:
        return ["p0", "p3"] if diagonal_only else ["p0", "p1", "p2", "p3"]
    if d == 3:
        if diagonal_only:
            return ["g0", "g3", "g8"]
        return [f"g{k}" for k in range(9)]
    syms = [f"i{d}"]
    diag = [f"d{d}(1,{l})" for l in range(2, d + 1)]
    if diagonal_only:
        return syms + diag
    off = []
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            off += [f"l{d}({i},{j})", f"lh{d}({i},{j})"]
    return syms + off + diag


def _words(n: int, diagonal_only: bool) -> List[Generator]:
    sites = gen.standard_sites(n)
    combos = [[]]
    for d in sites:
        combos = [c + [s] for c in combos for s in _site_symbols(d, diagonal_only)]
    out = []
    for combo in combos:
        try:
            out.append(gen.make_tensor_word(combo))
        except InvalidMatrixError:
            continue  # the all-identity word
    return out


def standard_basis(n: int) -> List[Generator]:
    """Word basis of su(n): tensor products over the standard site split.

    For n = 2^a 3^b ... the sites are the prime factors in decreasing order;
    a prime n is a single lambda-representation site. The list is a complete
    linearly independent spanning set of n^2 - 1 generators in a fixed
    canonical order (seed order for the construction algorithm).
    """
    words = _words(n, diagonal_only=False)
    if len(words) != n * n - 1:
        raise InvalidMatrixError(f"word basis of su({n}) has wrong size {len(words)}")
    return words


def standard_word_center(n: int) -> AbelianSpace:
    """The intrinsic center in word form: all diagonal words (identity excluded)."""
    return AbelianSpace(tuple(_words(n, diagonal_only=True)), hat=False)


def intrinsic_center(n: int) -> AbelianSpace:
    """The intrinsic center subalgebra: the N-1 diagonal generators d_1l."""
    if n < 2:
        raise InvalidSubscriptError("dimension must be at least 2")
    gens = tuple(gen.make_diag(1, l, n) for l in range(2, n + 1))
    return AbelianSpace(gens, hat=False)


def lambda_basis(n: int) -> List[Generator]:
    """The full lambda-representation basis of su(n)."""
    out: List[Generator] = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out.append(gen.make_lambda(i, j, n))
            out.append(gen.make_lambda_hat(i, j, n))
    out.extend(gen.make_diag(1, l, n) for l in range(2, n + 1))
    return out


# ---------------------------------------------------------------------------
# Simultaneous diagonalization
# ---------------------------------------------------------------------------

def diagonalize_abelian(space, seed: int = 0) -> np.ndarray:
    """Unitary U (det 1) with U g U^dag diagonal for every g in the space.

    Returns the identity when the space is already diagonal, so intrinsic
    centers keep their coordinates.
    """
    mats = space.matrices if isinstance(space, AbelianSpace) else [np.asarray(m) for m in space]
    if not all_commute(mats, 1e-10):
        raise NotAbelianError("input set is not abelian (commutator norm > 1e-10)")
    n = mats[0].shape[0]
    if all(frob(m - np.diag(np.diag(m))) < STRUCT_TOL * max(1.0, frob(m)) for m in mats):
        return np.eye(n, dtype=complex)
    return simultaneous_diagonalize(mats, seed=seed)


# ---------------------------------------------------------------------------
# Algorithm: quotient algebra construction
# ---------------------------------------------------------------------------

def _match_single(result: np.ndarray, pool: Sequence[Generator], tol=SOLVE_TOL) -> Optional[int]:
    """Index of the unique pool generator proportional to `result`, else None."""
    norm = frob(result)
    if norm < tol:
        return None
    hits = []
    for idx, g in enumerate(pool):
        overlap = np.trace(dagger(g.matrix) @ result)
        if abs(overlap) > tol * norm:
            hits.append((idx, overlap))
    if len(hits) != 1:
        raise BasisNotClosedError(
            "commutator is not proportional to a single basis generator; "
            "wrong representation choice for this center"
        )
    idx, overlap = hits[0]
    g = pool[idx].matrix
    coef = overlap / np.trace(dagger(g) @ g)
    if frob(result - coef * g) > tol * norm:
        raise BasisNotClosedError(
            "commutator leaves the basis span; wrong representation choice"
        )
    return idx


def _collect_conjugates(seed_mat: np.ndarray, center: AbelianSpace, pool: List[Generator]):
    """Indices of pool generators produced by [seed, center]."""
    found: List[int] = []
    for c in center.matrices:
        res = seed_mat @ c - c @ seed_mat
        idx = _match_single(res, pool)
        if idx is not None and idx not in found:
            found.append(idx)
    return found


def build_quotient_algebra(center: AbelianSpace, basis: Sequence[Generator]) -> QuotientAlgebra:
    """Construct the quotient algebra a center subalgebra generates.

    `basis` must be closed in the sense that each commutator with the center
    is proportional to a single basis element (true for word bases and for
    the lambda basis with a diagonal center); otherwise the construction
    signals a wrong representation choice. Commuting fragment pairs are
    merged according to the binary partitioning.
    """
    n = center.dim
    center.validate(1e-10)
    cspan = center.span()

    pool = [g for g in basis if g.dim == n and not in_span(g.matrix, cspan)]
    total = span_rank([g.matrix for g in pool] + center.matrices)
    if total != n * n - 1:
        raise InvalidMatrixError(
            f"center plus basis span {total} dimensions, expected {n * n - 1}"
        )
    if span_rank(center.matrices) + len(pool) != n * n - 1:
        raise InvalidMatrixError("basis contains redundant or center-span generators")

    raw_pairs: List[Tuple[List[Generator], List[Generator]]] = []
    remaining = list(pool)
    while remaining:
        seed = remaining[0]
        hat_idx = _collect_conjugates(seed.matrix, center, remaining)
        if not hat_idx:
            raise NotMaximalError(
                f"{seed!r} commutes with the whole center; center is not maximal abelian"
            )
        hats = [remaining[i] for i in hat_idx]
        back_idx = _collect_conjugates(hats[0].matrix, center, remaining)
        ws = [seed] + [remaining[i] for i in back_idx if remaining[i] is not seed]
        if len(ws) != len(hats):
            raise BasisNotClosedError(
                "reversing step produced a different count; pair sizes disagree"
            )
        raw_pairs.append((ws, hats))
        used = {id(g) for g in ws + hats}
        remaining = [g for g in remaining if id(g) not in used]

    merged = _merge_pairs(raw_pairs, n)
    p = max(1, math.ceil(math.log2(n)))
    pairs = _label_pairs(merged, n, p)
    qa = QuotientAlgebra(center=center, pairs=tuple(pairs), dim=n, p=p)
    if qa.generator_count() != n * n - 1:
        raise InvalidMatrixError("constructed algebra has the wrong generator count")
    return qa


def _hat_parity_of_fragment(ws: List[Generator]) -> Optional[bool]:
    """False for pure-lambda fragments, True for pure-hat, None if mixed."""
    kinds = set()
    for g in ws:
        for _, label in gen.to_lambda_basis(g.matrix):
            kinds.add(type(label).__name__)
    if kinds == {"Lambda"}:
        return False
    if kinds == {"LambdaHat"}:
        return True
    return None


def _fragment_label(ws: List[Generator], hats: List[Generator]) -> Optional[int]:
    patterns = set()
    for g in ws + hats:
        for _, label in gen.to_lambda_basis(g.matrix):
            if isinstance(label, (Lambda, LambdaHat)):
                patterns.add((label.i - 1) ^ (label.j - 1))
            else:
                return None
    return patterns.pop() if len(patterns) == 1 else None


def _merge_pairs(raw_pairs, n):
    """Merge commuting fragments sharing one binary-partitioning string.

    Fragments are grouped by the common XOR pattern of their lambda
    subscripts, and within a group the unhatted components merge together
    (the binary-consistent option, never the superposition variant). Pairs
    that are not lambda-aligned pass through untouched.
    """
    groups: Dict[object, List[Tuple[List[Generator], List[Generator]]]] = {}
    order: List[object] = []
    for ws, hats in raw_pairs:
        key = _fragment_label(ws, hats)
        key = key if key is not None else ("opaque", len(order))
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append((ws, hats))
    merged = []
    for key in order:
        frags = groups[key]
        if len(frags) == 1:
            merged.append(frags[0])
            continue
        w_all: List[Generator] = []
        h_all: List[Generator] = []
        for ws, hats in frags:
            parity = _hat_parity_of_fragment(ws)
            if parity is True:
                ws, hats = hats, ws
            w_all.extend(ws)
            h_all.extend(hats)
        for fragment in (w_all, h_all):
            if not all_commute([g.matrix for g in fragment], 1e-10):
                raise ClosureViolationError("merged fragments do not commute")
        merged.append((w_all, h_all))
    return merged


def _label_pairs(merged, n, p) -> List[ConjugatePair]:
    pairs = []
    labeled: List[Optional[str]] = []
    for ws, hats in merged:
        value = _fragment_label(ws, hats)
        labeled.append(bits_of(value, p) if value is not None else None)
    if any(lab is None for lab in labeled):
        labeled = _structural_labels(merged, n, p)
    used = [lab for lab in labeled if lab is not None]
    if len(set(used)) != len(used):
        raise NotBinaryPartitionedError("two pairs carry the same binary string")
    for (ws, hats), lab in zip(merged, labeled):
        w = AbelianSpace(tuple(ws), hat=False, binary_label=lab)
        wh = AbelianSpace(tuple(hats), hat=True, binary_label=lab)
        pairs.append(ConjugatePair(w=w, w_hat=wh, binary_label=lab))
    def sort_key(pair):
        return label_int(pair.binary_label) if pair.binary_label else 0
    if all(pair.binary_label is not None for pair in pairs):
        pairs.sort(key=sort_key)
    return pairs


def _structural_labels(merged, n, p) -> List[Optional[str]]:
    """Assign binary strings from the pair multiplication structure alone.

    Works when subscript patterns are unavailable (non-diagonal centers):
    pick successive pairs as the 2^r representatives, close the labeling
    under [pair_i, pair_j] -> pair_{i xor j}, and verify consistency.
    """
    count = len(merged)
    spans = [span_rows([g.matrix for g in ws + hats]) for ws, hats in merged]

    def target(i: int, j: int) -> Optional[int]:
        for ga in merged[i][0][:1] + merged[i][1][:1]:
            for gb in merged[j][0] + merged[j][1]:
                res = ga.matrix @ gb.matrix - gb.matrix @ ga.matrix
                if frob(res) < SOLVE_TOL:
                    continue
                hits = [k for k, s in enumerate(spans) if in_span(-1j * res, s)]
                if len(hits) == 1 and hits[0] not in (i, j):
                    return hits[0]
        return None

    labels: List[Optional[int]] = [None] * count
    next_bit = 1
    for i in range(count):
        if labels[i] is not None:
            continue
        labels[i] = next_bit
        next_bit <<= 1
        changed = True
        while changed:
            changed = False
            known = [k for k in range(count) if labels[k] is not None]
            for a in known:
                for b in known:
                    if a >= b:
                        continue
                    t = target(a, b)
                    if t is not None and labels[t] is None:
                        labels[t] = labels[a] ^ labels[b]
                        changed = True
    if any(lab is None or lab == 0 or lab >= (1 << p) for lab in labels):
        return [None] * count
    return [bits_of(lab, p) for lab in labels]


def intrinsic_quotient_algebra(n: int) -> QuotientAlgebra:
    """Quotient algebra of the intrinsic d-center over the lambda basis."""
    return build_quotient_algebra(intrinsic_center(n), lambda_basis(n))


def standard_quotient_algebra(n: int) -> QuotientAlgebra:
    """Intrinsic quotient algebra in the friendliest representation for n.

    Tensor words work whenever at most one site has odd prime dimension
    (words then pairwise commute or anticommute); otherwise the construction
    falls back to the lambda representation, whose structure is inherited
    from su(2^p) by the removing process.
    """
    try:
        return build_quotient_algebra(standard_word_center(n), standard_basis(n))
    except BasisNotClosedError:
        p = max(1, (n - 1).bit_length())
        qa = intrinsic_quotient_algebra(1 << p)
        return qa if n == (1 << p) else removing_process(qa, n)


# ---------------------------------------------------------------------------
# Binary labels
# ---------------------------------------------------------------------------

def binary_label_of(pair: ConjugatePair) -> str:
    """The common binary-partitioning string of a pair's lambda subscripts."""
    dim = pair.w.dim
    p = max(1, math.ceil(math.log2(dim)))
    patterns = set()
    for g in pair.w.generators + pair.w_hat.generators:
        for _, label in gen.to_lambda_basis(g.matrix):
            if isinstance(label, (Lambda, LambdaHat)):
                patterns.add((label.i - 1) ^ (label.j - 1))
            else:
                raise NotBinaryPartitionedError(
                    "pair generator has diagonal components; no subscript pattern"
                )
    if len(patterns) != 1:
        raise NotBinaryPartitionedError(
            f"pair carries {len(patterns)} distinct binary strings; "
            "inconsistent subscript partition"
        )
    return bits_of(patterns.pop(), p)


# ---------------------------------------------------------------------------
# Closure verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosureCheck:
    kind: str
    left: str
    right: str
    target: str
    residual: float
    ok: bool


@dataclass(frozen=True)
class ClosureReport:
    checks: Tuple[ClosureCheck, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def failures(self) -> List[ClosureCheck]:
        return [c for c in self.checks if not c.ok]


def _space_name(qa_label: Optional[str], hat: bool, fallback: str) -> str:
    lab = qa_label if qa_label is not None else fallback
    return ("W^_" if hat else "W_") + lab


def verify_closure(qa: QuotientAlgebra, tol: float = SOLVE_TOL) -> ClosureReport:
    """Check every conjugate-pair and cross-pair commutator lands where closure says.

    Within a pair the center acts as the zero element ([W,A] in W^, [W^,A] in
    W, [W,W^] in A). Across pairs the commutator must fall inside one single
    space; when binary labels exist the target must be the xor-labeled pair
    with hat parity flipped exactly when the operand hats agree.
    """
    checks: List[ClosureCheck] = []
    center_span = qa.center.span()
    spans = {}
    for idx, pair in enumerate(qa.pairs):
        spans[(idx, False)] = pair.w.span()
        spans[(idx, True)] = pair.w_hat.span()
    labels = [pair.binary_label for pair in qa.pairs]
    by_label = {lab: i for i, lab in enumerate(labels) if lab is not None}

    def add(kind, lname, rname, target_name, residual):
        checks.append(ClosureCheck(kind, lname, rname, target_name, float(residual), residual < tol))

    # Disjointness: each space is internally independent and the counts sum to
    # the full rank, so pairwise intersections are trivial exactly when the
    # joint rank of all generators equals the generator count.
    every = qa.center.matrices + [m for pair in qa.pairs for m in pair.all_matrices()]
    joint = span_rank(every)
    add("disjoint", "all spaces", "", "trivial intersections",
        0.0 if joint == len(every) else 1.0)

    for idx, pair in enumerate(qa.pairs):
        wname = _space_name(pair.binary_label, False, str(idx + 1))
        hname = _space_name(pair.binary_label, True, str(idx + 1))
        for g in pair.w.generators:
            for c in qa.center.generators:
                res = gen.commutator_numeric(g, c)
                add("pair-center", wname, "A", hname, _target_residual(res, spans[(idx, True)]))
        for g in pair.w_hat.generators:
            for c in qa.center.generators:
                res = gen.commutator_numeric(g, c)
                add("pair-center", hname, "A", wname, _target_residual(res, spans[(idx, False)]))
        for g in pair.w.generators:
            for h in pair.w_hat.generators:
                res = gen.commutator_numeric(g, h)
                add("pair-pair", wname, hname, "A", _target_residual(res, center_span))

    for i, pi in enumerate(qa.pairs):
        for j, pj in enumerate(qa.pairs):
            if i >= j:
                continue
            for hi in (False, True):
                for hj in (False, True):
                    li = _space_name(labels[i], hi, str(i + 1))
                    lj = _space_name(labels[j], hj, str(j + 1))
                    if labels[i] is not None and labels[j] is not None:
                        tgt = bits_of(label_int(labels[i]) ^ label_int(labels[j]), qa.p)
                        tgt_hat = not (hi ^ hj)
                        if tgt in by_label:
                            rows = spans[(by_label[tgt], tgt_hat)]
                            tname = _space_name(tgt, tgt_hat, tgt)
                        else:
                            rows, tname = None, f"missing pair {tgt}"
                    else:
                        rows, tname = None, "single third space"
                    src = (pi.w if not hi else pi.w_hat).generators
                    dst = (pj.w if not hj else pj.w_hat).generators
                    worst = 0.0
                    for g in src:
                        for h in dst:
                            res = gen.commutator_numeric(g, h)
                            if rows is not None:
                                worst = max(worst, _target_residual(res, rows))
                            else:
                                worst = max(worst, _best_single_space(res, spans, center_span))
                    add("cross-pair", li, lj, tname, worst)
    return ClosureReport(tuple(checks), tol)


def _target_residual(res: np.ndarray, rows: np.ndarray) -> float:
    # [Hermitian, Hermitian] is i times Hermitian; spans use real coefficients.
    if frob(res) < STRUCT_TOL:
        return 0.0
    return project_residual(-1j * res, rows)


def _best_single_space(res, spans, center_span) -> float:
    if frob(res) < STRUCT_TOL:
        return 0.0
    h = -1j * res
    best = project_residual(h, center_span)
    for rows in spans.values():
        best = min(best, project_residual(h, rows))
    return best


# ---------------------------------------------------------------------------
# Removing process
# ---------------------------------------------------------------------------

def _truncate_generator(g: Generator, n_target: int) -> Optional[Generator]:
    terms = gen.to_lambda_basis(g.matrix)
    kept = [(c, lab) for c, lab in terms if _max_subscript(lab) <= n_target]
    if not kept:
        return None
    dropped = len(kept) != len(terms)
    m = gen.from_lambda_terms(kept, n_target)
    if frob(m) < STRUCT_TOL:
        return None
    label = None
    if not dropped and len(kept) == 1 and abs(kept[0][0] - 1.0) < STRUCT_TOL:
        label = kept[0][1]
    return Generator(label, n_target, m)


def _max_subscript(label) -> int:
    if isinstance(label, (Lambda, LambdaHat)):
        return max(label.i, label.j)
    if isinstance(label, Diag):
        return max(label.k, label.l)
    raise NotBinaryPartitionedError("generator is not in the lambda representation")


def removing_process(qa: QuotientAlgebra, n_target: int) -> QuotientAlgebra:
    """Truncate a su(2^p) quotient algebra to su(N), 2^(p-1) < N <= 2^p.

    Deletes every generator carrying a subscript above N, then removes the
    now-zero rows and columns. The pair count and labels survive; closure is
    inherited from the larger algebra.
    """
    two_p = 1 << qa.p
    if qa.dim != two_p:
        raise DimensionMismatchError("removing process starts from a power-of-2 algebra")
    if not ((two_p // 2) < n_target <= two_p):
        raise InvalidSubscriptError(
            f"target dimension {n_target} outside (2^{qa.p - 1}, 2^{qa.p}]"
        )
    if n_target == qa.dim:
        return qa

    def cut_space(space: AbelianSpace) -> AbelianSpace:
        kept = [_truncate_generator(g, n_target) for g in space.generators]
        kept = [g for g in kept if g is not None]
        if not kept:
            raise ClosureViolationError("a conjugate space vanished under removal")
        # Independent survivors only (superposed entries can collapse together).
        out: List[Generator] = []
        for g in kept:
            if not out or not in_span(g.matrix, span_rows([x.matrix for x in out])):
                out.append(g)
        return AbelianSpace(tuple(out), hat=space.hat, binary_label=space.binary_label)

    center = cut_space(qa.center)
    pairs = []
    for pair in qa.pairs:
        w, wh = cut_space(pair.w), cut_space(pair.w_hat)
        if len(w) != len(wh):
            # Re-balance is impossible; sizes must agree by symmetry.
            raise ClosureViolationError("pair sizes diverged during removal")
        pairs.append(ConjugatePair(w=w, w_hat=wh, binary_label=pair.binary_label))
    out = QuotientAlgebra(center=center, pairs=tuple(pairs), dim=n_target, p=qa.p)
    if out.generator_count() != n_target * n_target - 1:
        raise ClosureViolationError(
            f"removal kept {out.generator_count()} generators, "
            f"expected {n_target * n_target - 1}"
        )
    return out


# ---------------------------------------------------------------------------
# Subscript tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubscriptTable:
    """Rows of unordered integer pairs, one row per conjugate pair."""

    rows: Tuple[Tuple[Tuple[int, int], ...], ...]
    labels: Tuple[Optional[str], ...] = None

    def __post_init__(self):
        norm_rows = []
        for row in self.rows:
            seen = set()
            norm = []
            for (i, j) in row:
                if i == j:
                    raise InvalidSubscriptError("subscript pair with equal entries")
                if i in seen or j in seen:
                    raise InvalidSubscriptError(
                        f"integer repeated within a row: {sorted((i, j))}"
                    )
                seen.update((i, j))
                norm.append((min(i, j), max(i, j)))
            norm_rows.append(tuple(sorted(norm)))
        object.__setattr__(self, "rows", tuple(norm_rows))
        if self.labels is None:
            object.__setattr__(self, "labels", tuple([None] * len(self.rows)))

    def multiply_rows(self, a: int, b: int) -> List[Tuple[int, int]]:
        """All products (i,j)*(j,k) = (i,k) between two rows."""
        out = []
        for (i, j) in self.rows[a]:
            for (k, l) in self.rows[b]:
                shared = {i, j} & {k, l}
                if len(shared) == 1:
                    s = shared.pop()
                    x = (({i, j} | {k, l}) - {s})
                    u, v = sorted(x)
                    out.append((u, v))
        return out

    def check_closure(self) -> List[str]:
        """Violation messages; empty when every row product fits one row.

        A product set must itself be a partial matching (no repeated integer)
        and, when a table row contains any of its pairs, must lie entirely
        inside that row.
        """
        problems = []
        for a in range(len(self.rows)):
            for b in range(a + 1, len(self.rows)):
                prods = self.multiply_rows(a, b)
                seen: Dict[int, Tuple[int, int]] = {}
                for (i, j) in prods:
                    for x in (i, j):
                        if x in seen and seen[x] != (i, j):
                            problems.append(
                                f"rows {a + 1}x{b + 1}: products repeat integer {x}; "
                                "no single row can hold them"
                            )
                            break
                        seen[x] = (i, j)
                hosts = [
                    r for r, row in enumerate(self.rows)
                    if any(pr in row for pr in prods)
                ]
                for r in hosts:
                    missing = [pr for pr in prods if pr not in self.rows[r]]
                    if missing and len(hosts) > 1:
                        problems.append(
                            f"rows {a + 1}x{b + 1}: products split across rows"
                        )
                        break
        return sorted(set(problems))


def subscript_table_of(qa: QuotientAlgebra) -> SubscriptTable:
    """Slot table of a lambda-representation quotient algebra."""
    if not qa.labeled:
        raise NotBinaryPartitionedError("subscript table needs a labeled algebra")
    rows = []
    for pair in qa.pairs:
        slots = set()
        for g in pair.w.generators + pair.w_hat.generators:
            for _, label in gen.to_lambda_basis(g.matrix):
                if not isinstance(label, (Lambda, LambdaHat)):
                    raise NotBinaryPartitionedError(
                        "pair generators must be off-diagonal lambda combinations"
                    )
                slots.add((label.i, label.j))
        rows.append(tuple(sorted(slots)))
    return SubscriptTable(tuple(rows), tuple(p.binary_label for p in qa.pairs))


# ---------------------------------------------------------------------------
# Conjugation transport
# ---------------------------------------------------------------------------

def conjugate_quotient_algebra(qa: QuotientAlgebra, u: np.ndarray) -> QuotientAlgebra:
    """Transport {Q(C)} to U^dag {Q(C)} U; structure constants are unchanged."""
    if u.shape != (qa.dim, qa.dim):
        raise DimensionMismatchError("conjugating unitary has the wrong shape")

    def move(space: AbelianSpace) -> AbelianSpace:
        gens = tuple(
            Generator(None, qa.dim, dagger(u) @ g.matrix @ u) for g in space.generators
        )
        return AbelianSpace(gens, hat=space.hat, binary_label=space.binary_label)

    pairs = tuple(
        ConjugatePair(w=move(p.w), w_hat=move(p.w_hat), binary_label=p.binary_label)
        for p in qa.pairs
    )
    return QuotientAlgebra(center=move(qa.center), pairs=pairs, dim=qa.dim, p=qa.p)
