"""Cartan splits, maximal abelian subalgebras, and decomposition sequences.

A quotient algebra with 2^p - 1 labeled conjugate pairs admits exactly 2^p
Cartan decompositions: the W-or-conjugate selection is free at the pairs
labeled 2^r and forced everywhere else by the condition of closure. The same
closure drives the level-by-level designation of center subalgebras that
directs the recursive factorization, and the shell extension that enumerates
maximal abelian subalgebras.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._linalg import (
    SOLVE_TOL,
    all_commute,
    frob,
    in_span,
    project_residual,
    span_fingerprint,
    span_rows,
    spans_equal,
)
from .errors import (
    BasisNotClosedError,
    InvalidChoiceError,
    InvalidMatrixError,
    NotAbelianError,
    NotBinaryPartitionedError,
    NotInSpanError,
    NotMaximalError,
)
from .generators import Generator
from .partition import (
    AbelianSpace,
    QuotientAlgebra,
    bits_of,
    build_quotient_algebra,
    conjugate_quotient_algebra,
    diagonalize_abelian,
    intrinsic_quotient_algebra,
    label_int,
    removing_process,
    standard_basis,
    standard_word_center,
)

__all__ = [
    "CartanSplit",
    "LevelSpec",
    "DecompositionSequence",
    "enumerate_t_choices",
    "build_cartan_split",
    "extend_to_maximal_abelian",
    "enumerate_maximal_abelian",
    "nearest_neighbors",
    "build_decomposition_sequence",
]


# ---------------------------------------------------------------------------
# Cartan splits
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CartanSplit:
    """One Cartan decomposition su(N) = t + p chosen from a quotient algebra."""

    qa: QuotientAlgebra
    choice_bits: str
    t: Tuple[AbelianSpace, ...]
    p_part: Tuple[AbelianSpace, ...]
    chosen_center: AbelianSpace

    @property
    def dim(self) -> int:
        return self.qa.dim

    def t_matrices(self) -> List[np.ndarray]:
        return [m for s in self.t for m in s.matrices]

    def p_matrices(self) -> List[np.ndarray]:
        out = [m for s in self.p_part for m in s.matrices]
        return out + self.chosen_center.matrices

    def hat_selection(self) -> Dict[str, bool]:
        """label -> True when the hatted space sits in t."""
        return {s.binary_label: s.hat for s in self.t}

    def validate(self, tol: float = SOLVE_TOL):
        """Check all four Cartan conditions and the dimension count."""
        t_rows = span_rows(self.t_matrices())
        p_rows = span_rows(self.p_matrices())
        n = self.dim
        if t_rows.shape[0] + p_rows.shape[0] != n * n - 1:
            raise InvalidChoiceError("t and p do not fill su(N)")
        pairs = (
            (self.t_matrices(), self.t_matrices(), t_rows, "[t,t] not in t"),
            (self.t_matrices(), self.p_matrices(), p_rows, "[t,p] not in p"),
            (self.p_matrices(), self.p_matrices(), t_rows, "[p,p] not in t"),
        )
        for left, right, rows, msg in pairs:
            for a in left:
                for b in right:
                    res = a @ b - b @ a
                    if frob(res) < 1e-14:
                        continue
                    if project_residual(-1j * res, rows) > tol:
                        raise InvalidChoiceError(msg)
        worst = max(
            abs(np.trace(a @ b)) for a in self.t_matrices() for b in self.p_matrices()
        )
        if worst > 1e-10:
            raise InvalidChoiceError("Tr(t p) != 0")


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


def enumerate_t_choices(qa: QuotientAlgebra) -> List[str]:
    """All 2^p selectors; bit r fixes W-vs-conjugate at the pair labeled 2^r."""
    if not qa.labeled:
        raise NotBinaryPartitionedError("t-choices need a labeled quotient algebra")
    return [bits_of(b, qa.p) for b in range(1 << qa.p)]


def _hat_assignment(qa: QuotientAlgebra, choice: str) -> Dict[str, bool]:
    """Resolve a selector to the hat flag of every pair.

    A p-bit selector sets the free choices at labels 2^r (bit '1' takes W);
    the rest follow from closure: hat(z) = 1 xor parity(b and z). A full
    per-pair string (one char per pair, label order, '1' meaning the hatted
    space) is validated against the same parity rule instead.
    """
    labels = [pair.binary_label for pair in qa.pairs]
    if len(choice) == qa.p and set(choice) <= {"0", "1"}:
        b = int(choice, 2)
        return {lab: bool(1 ^ _parity(b & label_int(lab))) for lab in labels}
    if len(choice) == len(qa.pairs) and set(choice) <= {"0", "1"}:
        hats = {lab: c == "1" for lab, c in zip(sorted(labels, key=label_int), choice)}
        for la in labels:
            for lb in labels:
                if la >= lb:
                    continue
                lc = bits_of(label_int(la) ^ label_int(lb), qa.p)
                if lc in hats:
                    want = not (hats[la] ^ hats[lb])
                    if hats[lc] != want:
                        raise InvalidChoiceError(
                            f"selection violates closure: pairs {la}, {lb} force "
                            f"{'the conjugate of ' if want else ''}W_{lc}"
                        )
        return hats
    raise InvalidChoiceError(
        f"choice must have {qa.p} bits (free selectors) or "
        f"{len(qa.pairs)} bits (explicit per-pair selection)"
    )


def build_cartan_split(qa: QuotientAlgebra, choice: str, validate: bool = True) -> CartanSplit:
    """Gather t from the chosen space of every pair; the rest plus A is p."""
    hats = _hat_assignment(qa, choice)
    t_spaces, p_spaces = [], []
    for pair in qa.pairs:
        chosen_hat = hats[pair.binary_label]
        t_spaces.append(pair.w_hat if chosen_hat else pair.w)
        p_spaces.append(pair.w if chosen_hat else pair.w_hat)
    bits = choice if len(choice) == qa.p else _selector_bits(qa, hats)
    split = CartanSplit(
        qa=qa,
        choice_bits=bits,
        t=tuple(t_spaces),
        p_part=tuple(p_spaces),
        chosen_center=qa.center,
    )
    if validate:
        split.validate()
    return split


def _selector_bits(qa: QuotientAlgebra, hats: Dict[str, bool]) -> str:
    bits = 0
    for r in range(qa.p):
        lab = bits_of(1 << r, qa.p)
        if lab in hats and not hats[lab]:
            bits |= 1 << r
    return bits_of(bits, qa.p)


# ---------------------------------------------------------------------------
# Maximal abelian subalgebras
# ---------------------------------------------------------------------------

def extend_to_maximal_abelian(space: AbelianSpace, center: AbelianSpace) -> AbelianSpace:
    """Augment an abelian space with commuting center elements up to N - 1.

    Whole center generators are preferred; when none of them commutes with
    the space, elements of the commutant of the space inside span(center) are
    appended (orthonormalized, unlabeled).
    """
    n = space.dim
    space.validate(1e-10)
    target = n - 1
    current: List[Generator] = list(space.generators)
    if len(current) > target:
        raise NotMaximalError("space already exceeds the maximal abelian size")

    def independent(mat) -> bool:
        return not in_span(mat, span_rows([g.matrix for g in current]))

    for c in center.generators:
        if len(current) == target:
            break
        if all(frob(c.matrix @ g.matrix - g.matrix @ c.matrix) < 1e-10 for g in current):
            if independent(c.matrix):
                current.append(c)
    if len(current) < target:
        for vec in _center_commutant(space, center):
            if len(current) == target:
                break
            if independent(vec):
                current.append(Generator(None, n, vec))
    if len(current) != target:
        raise NotMaximalError(
            f"extension reached {len(current)} generators, expected {target}"
        )
    out = AbelianSpace(tuple(current), hat=space.hat, binary_label=space.binary_label)
    out.validate(1e-10)
    return out


def _center_commutant(space: AbelianSpace, center: AbelianSpace) -> List[np.ndarray]:
    """Basis of {c in span(center): [c, space] = 0}."""
    cols = []
    for c in center.matrices:
        stacked = []
        for g in space.matrices:
            comm = c @ g - g @ c
            stacked.append(np.concatenate([comm.real.ravel(), comm.imag.ravel()]))
        cols.append(np.concatenate(stacked))
    a = np.array(cols).T
    if a.size == 0:
        return []
    u, s, vt = np.linalg.svd(a)
    tolerance = max(a.shape) * (s[0] if s.size else 0.0) * 1e-12
    null_dim = int(np.sum(s <= max(tolerance, 1e-12)))
    if s.size < vt.shape[0]:
        null_dim += vt.shape[0] - s.size
    out = []
    for row in vt[vt.shape[0] - null_dim :]:
        mat = sum(x * c for x, c in zip(row, center.matrices))
        norm = frob(mat)
        if norm > 1e-9:
            out.append(mat / norm)
    return out


def _structure_of_center(center: AbelianSpace, n: int) -> QuotientAlgebra:
    """Quotient algebra of an arbitrary maximal abelian subalgebra.

    Prefers the direct word-basis construction; falls back to the
    preparation-step transport U A U^dag = C when the word basis is not
    closed for this center.
    """
    try:
        return build_quotient_algebra(center, standard_basis(n))
    except (BasisNotClosedError, NotMaximalError, InvalidMatrixError):
        pass
    u = diagonalize_abelian(center)
    p = max(1, (n - 1).bit_length())
    base = intrinsic_quotient_algebra(1 << p)
    if (1 << p) != n:
        base = removing_process(base, n)
    moved = conjugate_quotient_algebra(base, u)
    if not spans_equal(moved.center.matrices, center.matrices):
        raise NotMaximalError("center does not diagonalize to the intrinsic one")
    return QuotientAlgebra(center=center, pairs=moved.pairs, dim=n, p=moved.p)


def nearest_neighbors(center: AbelianSpace, n: Optional[int] = None) -> List[AbelianSpace]:
    """Maximal abelian subalgebras one extension step from `center`."""
    n = n or center.dim
    qa = _structure_of_center(center, n)
    own = span_fingerprint(center.matrices)
    found: Dict[bytes, AbelianSpace] = {}
    for pair in qa.pairs:
        for space in pair.spaces:
            ext = extend_to_maximal_abelian(space, qa.center)
            fp = span_fingerprint(ext.matrices)
            if fp != own and fp not in found:
                found[fp] = ext
    return list(found.values())


def enumerate_maximal_abelian(n: int, max_shells: int) -> List[AbelianSpace]:
    """Shell extension of maximal abelian subalgebras from the intrinsic center.

    Each shell extends every known subalgebra through its quotient algebra;
    only basis generators are considered (no superpositions of noncommuting
    operators). Deduplication is by span equality.
    """
    if n > 16:
        raise InvalidMatrixError("enumeration is desk-scale: n <= 16")
    if max_shells < 1:
        raise InvalidChoiceError("max_shells must be at least 1")
    start = standard_word_center(n)
    known: Dict[bytes, AbelianSpace] = {span_fingerprint(start.matrices): start}
    frontier = [start]
    for _ in range(max_shells):
        fresh: List[AbelianSpace] = []
        for member in frontier:
            for nb in nearest_neighbors(member, n):
                fp = span_fingerprint(nb.matrices)
                if fp not in known:
                    known[fp] = nb
                    fresh.append(nb)
        if not fresh:
            break
        frontier = fresh
    return list(known.values())


# ---------------------------------------------------------------------------
# Decomposition sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LevelSpec:
    """The center designated at one recursion level."""

    ordinal: int
    center_core: AbelianSpace
    center: AbelianSpace  # extended to N - 1 commuting generators
    label: Optional[str]  # None at level 1 (the quotient algebra's own center)
    choice_bits: str
    chosen_labels: Tuple[str, ...]  # labels of the spaces forming t at this level


@dataclass(frozen=True, eq=False)
class DecompositionSequence:
    """Ordered designation of centers A_[1..p] plus the final abelian t_[p]."""

    qa: QuotientAlgebra
    levels: Tuple[LevelSpec, ...]
    final: AbelianSpace
    hat_selection: Dict[str, bool]

    @property
    def dim(self) -> int:
        return self.qa.dim

    @property
    def depth(self) -> int:
        return len(self.levels)

    def final_extended(self) -> AbelianSpace:
        """t_[p] recovered to its N - 1 abelian generators (the A_[p+1] view)."""
        return extend_to_maximal_abelian(self.final, self.qa.center)

    def space_at(self, label: str) -> AbelianSpace:
        pair = self.qa.pair_by_label(label)
        return pair.w_hat if self.hat_selection[label] else pair.w


def _default_choices(p: int) -> List[str]:
    return ["0" * (p - k) for k in range(p)]


def build_decomposition_sequence(
    qa: QuotientAlgebra,
    choices: Optional[Sequence[str]] = None,
    level_centers: Optional[Sequence[Optional[AbelianSpace]]] = None,
) -> DecompositionSequence:
    """Designate a center per level and resolve every t-choice by closure.

    `choices` holds one bit string per level: p bits for level 1 (the Cartan
    split selector), then one fewer per level (free picks among the remaining
    pairs, '0' favoring the lower label). `level_centers` optionally
    designates the next level's center; each override must match one of that
    level's candidate spaces by span.
    """
    if not qa.labeled:
        raise NotBinaryPartitionedError("sequences need a labeled quotient algebra")
    p = qa.p
    choices = list(choices) if choices is not None else _default_choices(p)
    if len(choices) != p:
        raise InvalidChoiceError(f"need {p} per-level choices, got {len(choices)}")
    for k, bits in enumerate(choices):
        if len(bits) != p - k or set(bits) - {"0", "1"}:
            raise InvalidChoiceError(
                f"level {k + 1} choice must be {p - k} bits, got {bits!r}"
            )
    overrides = list(level_centers) if level_centers is not None else []
    if len(overrides) > max(0, p - 1):
        raise InvalidChoiceError("too many level-center overrides")
    overrides += [None] * (p - 1 - len(overrides))

    split = build_cartan_split(qa, choices[0], validate=False)
    hats = split.hat_selection()
    labels = sorted((label_int(pair.binary_label) for pair in qa.pairs))

    def space_of(value: int) -> AbelianSpace:
        lab = bits_of(value, p)
        pair = qa.pair_by_label(lab)
        return pair.w_hat if hats[lab] else pair.w

    levels: List[LevelSpec] = []
    center1 = qa.center
    levels.append(
        LevelSpec(
            ordinal=1,
            center_core=center1,
            center=center1,
            label=None,
            choice_bits=choices[0],
            chosen_labels=tuple(bits_of(v, p) for v in labels),
        )
    )

    available = list(labels)
    for k in range(2, p + 1):
        alpha = _designate_center(available, overrides[k - 2], space_of, p, k)
        remaining = [x for x in available if x != alpha]
        chosen = _resolve_level_choices(remaining, alpha, choices[k - 1], p, k)
        core = space_of(alpha)
        levels.append(
            LevelSpec(
                ordinal=k,
                center_core=core,
                center=extend_to_maximal_abelian(core, qa.center),
                label=bits_of(alpha, p),
                choice_bits=choices[k - 1],
                chosen_labels=tuple(bits_of(v, p) for v in sorted(chosen)),
            )
        )
        available = sorted(chosen)

    if len(available) != 1:
        raise InvalidChoiceError(f"recursion left {len(available)} labels, expected 1")
    final = space_of(available[0])
    if not all_commute(final.matrices, 1e-10):
        raise NotAbelianError("final level space is not abelian")
    return DecompositionSequence(qa=qa, levels=tuple(levels), final=final, hat_selection=hats)


def _designate_center(available, override, space_of, p, k) -> int:
    if override is None:
        return min(available)
    override.validate(1e-10)
    for value in available:
        cand = space_of(value)
        if spans_equal(cand.matrices, override.matrices):
            return value
    # Distinguish "not inside t" from "inside t but not a candidate space".
    t_rows = span_rows([m for v in available for m in space_of(v).matrices])
    if all(in_span(m, t_rows) for m in override.matrices):
        raise NotInSpanError(
            f"level {k} override lies inside t but matches no candidate pair space"
        )
    raise NotInSpanError(f"level {k} override is not inside the level-{k - 1} t")


def _resolve_level_choices(remaining, alpha, bits, p, k) -> List[int]:
    """Pick one label per {x, x xor alpha} pair, closing picks under xor."""
    pair_of = {}
    for x in remaining:
        partner = x ^ alpha
        if partner not in remaining:
            raise InvalidChoiceError(
                f"level {k}: label {bits_of(x, p)} lost its partner"
            )
        pair_of[x] = partner
    decided: Dict[int, int] = {}  # min(pair) -> chosen label
    chosen: List[int] = []
    bit_iter = iter(bits)
    for x in sorted(remaining):
        key = min(x, pair_of[x])
        if key in decided:
            continue
        try:
            bit = next(bit_iter)
        except StopIteration as exc:
            raise InvalidChoiceError(f"level {k}: not enough choice bits") from exc
        pick = max(x, pair_of[x]) if bit == "1" else key
        new = [pick] + [pick ^ c for c in chosen]
        for v in new:
            kk = min(v, v ^ alpha)
            if kk in decided:
                if decided[kk] != v:
                    raise InvalidChoiceError(
                        f"level {k}: choice bits contradict closure at {bits_of(v, p)}"
                    )
            else:
                decided[kk] = v
        chosen.extend(new)
    leftovers = list(bit_iter)
    if leftovers:
        raise InvalidChoiceError(f"level {k}: {len(leftovers)} unused choice bits")
    if len(chosen) != len(remaining) // 2:
        raise InvalidChoiceError(f"level {k}: selection does not cover every pair")
    return chosen
