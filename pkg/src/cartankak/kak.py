"""Recursive KAK factorization of unitaries along a decomposition sequence.

The single-level computation follows the SVD-style recipe: conjugate into the
coordinate where the designated abelian subalgebra is diagonal and the chosen
t maps onto antisymmetric generators, eigendecompose M M^T = O1 D^2 O1^T to
split M = O1 D O2 with real orthogonal factors, and read the abelian part off
D. Deeper levels act inside exp(t), where the quotient-algebra structure
turns the same computation into cosine-sine decompositions of orthogonal
blocks; the leaves are abelian exponentials expanded over the final
subalgebra. Factors are ordered as a binary bifurcation tree and classified
local or nonlocal by their tensor-word site count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import generators as gen
from ._linalg import (
    SOLVE_TOL,
    complex_symmetric_eigenbasis,
    cs_decompose_so,
    dagger,
    expm_hermitian,
    frob,
    is_unitary,
    project_residual,
    real_log_special_orthogonal,
    span_rows,
)
from .cartan import CartanSplit, DecompositionSequence
from .errors import (
    DecompositionError,
    DimensionMismatchError,
    InvalidMatrixError,
    NotInSpanError,
    UnsupportedLabelError,
)
from .generators import Generator, TensorWord
from .partition import AbelianSpace, diagonalize_abelian, standard_basis

__all__ = [
    "GateFactor",
    "AbelianBlock",
    "Factorization",
    "ingest_unitary",
    "classify_gate",
    "kak_single_level",
    "factor_abelian_exponential",
    "recursive_decompose",
    "reconstruct",
]

ANGLE_PRUNE_TOL = 1e-12


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateFactor:
    """One factor exp(i * angle * generator) with its bifurcation-tree order."""

    tree_index: str
    ordinal: int
    generator: Generator
    angle: float
    locality: Optional[str]


@dataclass(frozen=True)
class AbelianBlock:
    """One abelian exponential of the tree: a center block or a final leaf."""

    tree_index: str
    level: int
    factors: Tuple[GateFactor, ...]


@dataclass(frozen=True)
class Factorization:
    dim: int
    factors: Tuple[GateFactor, ...]
    blocks: Tuple[AbelianBlock, ...]
    global_phase: complex
    reconstruction_error: float

    def local_count(self) -> int:
        return sum(1 for f in self.factors if f.locality == "local")

    def nonlocal_count(self) -> int:
        return sum(1 for f in self.factors if f.locality == "nonlocal")


def ingest_unitary(m: np.ndarray) -> Tuple[np.ndarray, complex]:
    """Check unitarity and normalize the determinant to 1.

    Returns (u, phase) with m = phase * u, det(u) = 1 and |phase| = 1; the
    phase spreads det(m)^(1/N) evenly across the diagonal.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMatrixError("unitary must be square")
    if not is_unitary(m, 1e-10):
        raise InvalidMatrixError("matrix is not unitary within 1e-10")
    phase = np.exp(1j * np.angle(np.linalg.det(m)) / n)
    return m / phase, phase


def classify_gate(g: Generator) -> str:
    """'local' when exactly one tensor site is non-identity, else 'nonlocal'.

    Generators without a word label are matched against the standard word
    basis of their dimension; a prime dimension is a single site, so every
    generator there is local.
    """
    if isinstance(g.label, TensorWord):
        return "local" if gen.word_site_count(g) == 1 else "nonlocal"
    sites = gen.standard_sites(g.dim)
    if len(sites) == 1:
        return "local"
    for word in standard_basis(g.dim):
        overlap = np.trace(dagger(word.matrix) @ g.matrix)
        denom = np.trace(dagger(word.matrix) @ word.matrix)
        coef = overlap / denom
        if abs(coef) > 1e-9 and frob(g.matrix - coef * word.matrix) < 1e-9 * frob(g.matrix):
            return classify_gate(word)
    raise UnsupportedLabelError(
        "generator is not proportional to a single word of the site structure"
    )


def _locality_or_none(g: Generator) -> Optional[str]:
    try:
        return classify_gate(g)
    except UnsupportedLabelError:
        return None


# ---------------------------------------------------------------------------
# Frames: diagonalize the center, rotate t onto the antisymmetric generators
# ---------------------------------------------------------------------------

def _binary_phase_frame(n: int, space_images: Sequence[Sequence[np.ndarray]], tol=1e-9):
    """Diagonal unitary V with V G V^dag antisymmetric-imaginary for all images.

    Each off-diagonal slot carries a one-dimensional direction; solving
    phi_i - phi_j = -pi/2 - arg(direction) (mod pi) over the slot graph gives
    the per-index phases. Inconsistency means the structure is not conjugate
    to a binary-partitioned one.
    """
    deltas: Dict[Tuple[int, int], float] = {}
    for images in space_images:
        for g in images:
            for i in range(n):
                for j in range(i + 1, n):
                    z = g[i, j]
                    if abs(z) < tol:
                        continue
                    delta = (-np.pi / 2.0 - np.angle(z)) % np.pi
                    if (i, j) in deltas:
                        diff = abs(deltas[(i, j)] - delta)
                        diff = min(diff, abs(diff - np.pi))
                        if diff > 1e-7:
                            raise DecompositionError(
                                f"slot ({i + 1},{j + 1}) carries two phase directions"
                            )
                    else:
                        deltas[(i, j)] = delta
    phi = np.zeros(n)
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue = [start]
        while queue:
            a = queue.pop()
            for (i, j), delta in deltas.items():
                if a not in (i, j):
                    continue
                b = j if a == i else i
                want = delta if a == i else (-delta) % np.pi
                if not seen[b]:
                    phi[b] = phi[a] - want
                    seen[b] = True
                    queue.append(b)
                else:
                    diff = (phi[a] - phi[b] - want) % np.pi
                    if min(diff, np.pi - diff) > 1e-7:
                        raise DecompositionError(
                            "slot phases are inconsistent; structure is not "
                            "binary-partitioned in any diagonal gauge"
                        )
    return np.diag(np.exp(1j * phi))


@dataclass(frozen=True)
class _Frame:
    """Conjugation frame plus the slot bookkeeping of the chosen spaces."""

    matrix: np.ndarray  # F with F (center) F^dag diagonal, F t F^dag antisymmetric
    slots: Dict[str, Tuple[Tuple[int, int], ...]]  # label -> 0-based (i, j) slots

    def image(self, g: Generator) -> np.ndarray:
        return self.matrix @ g.matrix @ dagger(self.matrix)


def _space_slots(images: Sequence[np.ndarray], n: int, tol=1e-9) -> Tuple[Tuple[int, int], ...]:
    slots = set()
    for g in images:
        for i in range(n):
            for j in range(i + 1, n):
                if abs(g[i, j]) > tol:
                    slots.add((i, j))
    return tuple(sorted(slots))


def _build_frame(qa, spaces: Dict[str, AbelianSpace], seed: int) -> _Frame:
    n = qa.dim
    u_a = diagonalize_abelian(qa.center, seed=seed)
    raw_images = {
        lab: [u_a @ g.matrix @ dagger(u_a) for g in sp.generators]
        for lab, sp in spaces.items()
    }
    v = _binary_phase_frame(n, list(raw_images.values()))
    f = v @ u_a
    slots: Dict[str, Tuple[Tuple[int, int], ...]] = {}
    taken = set()
    for lab, images in raw_images.items():
        rotated = [v @ g @ dagger(v) for g in images]
        ss = _space_slots(rotated, n)
        if len(ss) != len(images):
            raise DecompositionError(
                f"space {lab} covers {len(ss)} slots for {len(images)} generators"
            )
        for g in rotated:
            resid = frob(g + g.T) + frob(np.diag(np.diag(g)))
            if resid > 1e-8 * max(1.0, frob(g)):
                raise DecompositionError(
                    f"space {lab} image is not antisymmetric in the frame"
                )
        if taken & set(ss):
            raise DecompositionError("two chosen spaces overlap on a slot")
        taken |= set(ss)
        slots[lab] = ss
    return _Frame(matrix=f, slots=slots)


# ---------------------------------------------------------------------------
# Level-1 computation: M = O1 D O2 via the symmetric eigendecomposition
# ---------------------------------------------------------------------------

def _ai_step(m: np.ndarray, seed: int):
    """Split M = O1 diag(exp(i lam)) O2, O1/O2 special orthogonal, sum(lam) = 0."""
    n = m.shape[0]
    s = m @ m.T
    o1, w = complex_symmetric_eigenbasis(s, seed=seed)
    lam = np.angle(w) / 2.0  # branch (-pi/2, pi/2]
    if np.linalg.det(o1) < 0:
        o1 = o1.copy()
        o1[:, 0] = -o1[:, 0]

    def rebuild(lam_vec):
        d = np.exp(1j * lam_vec)
        o2 = (np.conj(d)[:, None] * o1.T) @ m
        return d, o2

    d, o2 = rebuild(lam)
    if np.linalg.det(np.real(o2)) < 0:
        # Flip one eigenphase by pi; pair it with the matching column sign of O1.
        lam = lam.copy()
        lam[0] = lam[0] + np.pi if lam[0] <= 0 else lam[0] - np.pi
        d, o2 = rebuild(lam)
    # Make the phase vector exactly traceless by 2-pi moves (exp unchanged).
    total = int(round(lam.sum() / (2.0 * np.pi)))
    if total:
        order = np.argsort(lam)
        picks = order[::-1][:abs(total)] if total > 0 else order[: abs(total)]
        lam = lam.copy()
        lam[picks] -= 2.0 * np.pi * np.sign(total)
        d, o2 = rebuild(lam)
    if abs(lam.sum()) > 1e-9:
        raise DecompositionError("eigenphase vector failed to become traceless")
    if frob(np.imag(o2)) > 1e-9:
        raise DecompositionError("right orthogonal factor is not real")
    o2 = np.real(o2)
    err = frob(o1 @ np.diag(d) @ o2 - m)
    if err > 1e-9 * n:
        raise DecompositionError(f"single-level reassembly error {err:.2e}")
    return o1, lam, o2


# ---------------------------------------------------------------------------
# Angle extraction and expansion over basis generators
# ---------------------------------------------------------------------------

def _slot_coefficients(images: Sequence[np.ndarray], slots) -> np.ndarray:
    """c[a, s]: expansion of image a over the antisymmetric slot generators."""
    c = np.zeros((len(images), len(slots)))
    for a, g in enumerate(images):
        for s, (i, j) in enumerate(slots):
            c[a, s] = -np.imag(g[i, j])
    return c


def _solve_expansion(images, slots, phis_by_slot) -> np.ndarray:
    phi = np.array([phis_by_slot[s] for s in slots])
    c = _slot_coefficients(images, slots)
    if c.shape[0] != c.shape[1]:
        raise DecompositionError(
            f"{c.shape[0]} generators vs {c.shape[1]} slots; bases disagree"
        )
    try:
        omega = np.linalg.solve(c.T, phi)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError("slot coefficient matrix is singular") from exc
    if frob(c.T @ omega - phi) > 1e-9 * max(1.0, frob(phi)):
        raise DecompositionError("angle expansion over the space basis failed")
    return omega


def _solve_diagonal_expansion(images, target) -> np.ndarray:
    e = np.array([np.real(np.diag(g)) for g in images])
    omega, *_ = np.linalg.lstsq(e.T, target, rcond=None)
    if frob(e.T @ omega - target) > 1e-9 * max(1.0, frob(target)):
        raise NotInSpanError("diagonal part does not lie in the center span")
    return omega


# ---------------------------------------------------------------------------
# The recursion
# ---------------------------------------------------------------------------

class _Engine:
    def __init__(self, seq: DecompositionSequence, seed: int):
        self.seq = seq
        self.qa = seq.qa
        self.n = seq.dim
        self.p = seq.qa.p
        self.seed = seed
        spaces = {lab: seq.space_at(lab) for lab in seq.levels[0].chosen_labels}
        self.frame = _build_frame(self.qa, spaces, seed)
        self.blocks: List[AbelianBlock] = []
        self.position = 0
        self.phase = 1.0 + 0.0j

    # -- tree bookkeeping ---------------------------------------------------

    def _next_index(self, level: int) -> str:
        self.position += 1
        idx = format(self.position, f"0{self.p + 1}b")
        low = (self.position & -self.position).bit_length() - 1
        if self.p + 1 - low != level:
            raise DecompositionError("tree position does not match the level rule")
        return idx

    def _emit(self, level: int, space: AbelianSpace, omegas: np.ndarray):
        idx = self._next_index(level)
        factors = []
        ordinal = 0
        for g, w in zip(space.generators, omegas):
            if abs(w) < ANGLE_PRUNE_TOL:
                continue
            ordinal += 1
            factors.append(
                GateFactor(
                    tree_index=idx,
                    ordinal=ordinal,
                    generator=g,
                    angle=float(w),
                    locality=_locality_or_none(g),
                )
            )
        self.blocks.append(AbelianBlock(tree_index=idx, level=level, factors=tuple(factors)))

    # -- levels ---------------------------------------------------------------

    def run(self, u_su: np.ndarray) -> None:
        m = self.frame.matrix @ u_su @ dagger(self.frame.matrix)
        o1, lam, o2 = _ai_step(m, self.seed)
        level1 = self.seq.levels[0]
        images = [self.frame.image(g) for g in level1.center_core.generators]
        self._expand_orthogonal(o1, 2, "L")
        omega = _solve_diagonal_expansion(images, lam)
        self._emit(1, level1.center_core, omega)
        self._expand_orthogonal(o2, 2, "R")

    def _components(self, level: int) -> List[List[int]]:
        """Index components induced by the chosen rows of level `level`."""
        if level <= self.p:
            labels = self.seq.levels[level - 1].chosen_labels
        else:
            labels = (self.seq.final.binary_label,)
        edges = []
        for lab in labels:
            edges.extend(self.frame.slots[lab])
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in edges:
            parent[find(i)] = find(j)
        groups: Dict[int, List[int]] = {}
        for i in range(self.n):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def _expand_orthogonal(self, o: np.ndarray, level: int, branch: str) -> None:
        if level == self.p + 1:
            self._emit_leaf(o, branch)
            return
        spec = self.seq.levels[level - 1]
        center_slots = self.frame.slots[spec.label]
        sub_components = self._components(level)
        k1 = np.eye(self.n)
        k2 = np.eye(self.n)
        phis: Dict[Tuple[int, int], float] = {s: 0.0 for s in center_slots}
        for comp in self._components(level - 1):
            if len(comp) == 1:
                if abs(o[comp[0], comp[0]] - 1.0) > 1e-9:
                    raise DecompositionError(
                        f"level {level}, branch {branch}: unit block is not the identity"
                    )
                continue
            subs = [c for c in sub_components if set(c) <= set(comp)]
            matched = [s for s in center_slots if s[0] in comp and s[1] in comp]
            k1c, k2c, angles = self._csd_component(o, comp, subs, matched, level, branch)
            for (slot, phi) in angles:
                phis[slot] = phi
            for (rows, block) in k1c:
                k1[np.ix_(rows, rows)] = block
            for (rows, block) in k2c:
                k2[np.ix_(rows, rows)] = block
        self._expand_orthogonal(k1, level + 1, branch + "L")
        images = [self.frame.image(g) for g in spec.center_core.generators]
        omega = _solve_expansion(images, center_slots, phis)
        self._emit(level, spec.center_core, omega)
        self._expand_orthogonal(k2, level + 1, branch + "R")

    def _csd_component(self, o, comp, subs, matched, level, branch):
        if len(subs) == 1:
            raise DecompositionError(
                f"level {level}, branch {branch}: component {comp} does not split; "
                "no center slot reaches it"
            )
        if len(subs) != 2:
            raise DecompositionError(
                f"level {level}, branch {branch}: component {comp} splits into "
                f"{len(subs)} parts"
            )
        side1, side2 = (set(subs[0]), set(subs[1]))
        if comp[0] not in side1:
            side1, side2 = side2, side1
        b1, b2 = [], []
        for (i, j) in matched:
            a, b = (i, j) if i in side1 else (j, i)
            if a not in side1 or b not in side2:
                raise DecompositionError(
                    f"level {level}, branch {branch}: center slot "
                    f"({i + 1},{j + 1}) does not cross the two sub-blocks"
                )
            b1.append(a)
            b2.append(b)
        if len(matched) != min(len(side1), len(side2)):
            raise DecompositionError(
                f"level {level}, branch {branch}: {len(matched)} center slots "
                f"cannot pair blocks of sizes {len(side1)} and {len(side2)}"
            )
        b1 += sorted(side1 - set(b1))
        b2 += sorted(side2 - set(b2))
        order = b1 + b2
        x = o[np.ix_(order, order)]
        outside = frob(o[np.ix_(order, [c for c in range(self.n) if c not in comp])])
        if outside > 1e-9:
            raise DecompositionError(
                f"level {level}, branch {branch}: block leaks outside its component"
            )
        u1, u2, thetas, v1, v2 = cs_decompose_so(np.real(x), len(b1), len(b2))
        angles = []
        for m_idx, th in enumerate(thetas):
            i, j = b1[m_idx], b2[m_idx]
            phi = -th if i < j else th
            slot = (min(i, j), max(i, j))
            angles.append((slot, float(phi)))
        k1c = [(b1, u1), (b2, u2)]
        k2c = [(b1, v1), (b2, v2)]
        return k1c, k2c, angles

    def _emit_leaf(self, o: np.ndarray, branch: str) -> None:
        final = self.seq.final
        slots = self.frame.slots[final.binary_label]
        phis: Dict[Tuple[int, int], float] = {}
        rebuilt = np.eye(self.n)
        for (i, j) in slots:
            phi = math.atan2(np.real(o[i, j]), np.real(o[i, i]))
            phis[(i, j)] = phi
            c, s = math.cos(phi), math.sin(phi)
            rebuilt[i, i] = c
            rebuilt[j, j] = c
            rebuilt[i, j] = s
            rebuilt[j, i] = -s
        if frob(rebuilt - np.real(o)) > 1e-9 * self.n:
            raise DecompositionError(
                f"final level, branch {branch}: leaf is not inside the final torus"
            )
        images = [self.frame.image(g) for g in final.generators]
        omega = _solve_expansion(images, tuple(slots), phis)
        self._emit(self.p + 1, final, omega)


def recursive_decompose(u: np.ndarray, seq: DecompositionSequence, seed: int = 0) -> Factorization:
    """Factor a unitary into single-generator exponentials along `seq`.

    Applies the single-level split at each recursion level, descending into
    both orthogonal factors; abelian blocks come out in binary-bifurcation
    order (2^(k-1) blocks at level k, 2^p leaves). The returned factor list
    reassembles to the input within the stored reconstruction error.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (seq.dim, seq.dim):
        raise DimensionMismatchError(
            f"unitary is {u.shape}, sequence expects dim {seq.dim}"
        )
    u_su, phase = ingest_unitary(u)
    engine = _Engine(seq, seed)
    try:
        engine.run(u_su)
    except DecompositionError as exc:
        raise DecompositionError(f"decomposition failed: {exc}") from exc
    factors = tuple(f for blk in engine.blocks for f in blk.factors)
    fact = Factorization(
        dim=seq.dim,
        factors=factors,
        blocks=tuple(engine.blocks),
        global_phase=complex(phase * engine.phase),
        reconstruction_error=0.0,
    )
    err = frob(reconstruct(fact, seq.dim) - u)
    return replace(fact, reconstruction_error=float(err))


def reconstruct(fact: Factorization, dim: int) -> np.ndarray:
    """Ordered product of exp(i angle generator) times the global phase."""
    total = np.eye(dim, dtype=complex)
    for f in fact.factors:
        if f.generator.dim != dim:
            raise DimensionMismatchError(
                f"factor dim {f.generator.dim} does not match {dim}"
            )
        total = total @ expm_hermitian(f.generator.matrix, f.angle)
    return total * fact.global_phase


# ---------------------------------------------------------------------------
# Single level and abelian exponentials as standalone operations
# ---------------------------------------------------------------------------

def kak_single_level(u: np.ndarray, split: CartanSplit, seed: int = 0):
    """One KAK step U = K1 exp(i a) K2 for a Cartan split.

    K1 and K2 lie in exp(t) (their logarithms project onto span t) and `a` is
    Hermitian in the span of the split's center. The input must have unit
    determinant (ingest_unitary normalizes and reports the phase).
    """
    u = np.asarray(u, dtype=complex)
    n = split.dim
    if u.shape != (n, n):
        raise DimensionMismatchError("unitary does not match the split dimension")
    if not is_unitary(u, 1e-10):
        raise InvalidMatrixError("matrix is not unitary within 1e-10")
    if abs(np.linalg.det(u) - 1.0) > 1e-8:
        raise InvalidMatrixError("determinant is not 1; run ingest_unitary first")
    spaces = {s.binary_label: s for s in split.t}
    frame = _build_frame(split.qa, spaces, seed)
    f = frame.matrix
    m = f @ u @ dagger(f)
    o1, lam, o2 = _ai_step(m, seed)
    k1 = dagger(f) @ o1.astype(complex) @ f
    k2 = dagger(f) @ o2.astype(complex) @ f
    a = dagger(f) @ np.diag(lam).astype(complex) @ f
    err = frob(k1 @ expm_hermitian(a) @ k2 - u)
    if err > 1e-9 * n:
        raise DecompositionError(f"single-level reassembly error {err:.2e}")
    # Membership checks: s1, s2 in span(t), a in span(center).
    t_rows = span_rows(split.t_matrices())
    for k in (k1, k2):
        log_k = real_log_special_orthogonal(f @ k @ dagger(f))
        s_part = dagger(f) @ (-1j * log_k) @ f
        if project_residual(s_part, t_rows) > SOLVE_TOL:
            raise DecompositionError("orthogonal factor log leaves span(t)")
    if project_residual(a, span_rows(split.chosen_center.matrices)) > SOLVE_TOL:
        raise DecompositionError("abelian part leaves the center span")
    return k1, a, k2


def factor_abelian_exponential(
    v: np.ndarray, space: AbelianSpace, seed: int = 0
) -> Tuple[List[GateFactor], complex]:
    """Expand a unitary inside exp(i span(space)) over the space's generators.

    Returns (factors, global_phase) with the factor product times the phase
    equal to the input. Raises when the matrix does not commute into the
    space's joint eigenbasis or its phases do not fit the span.
    """
    v = np.asarray(v, dtype=complex)
    n = space.dim
    if v.shape != (n, n):
        raise DimensionMismatchError("matrix does not match the space dimension")
    if not is_unitary(v, 1e-10):
        raise InvalidMatrixError("matrix is not unitary within 1e-10")
    space.validate(1e-10)
    w = diagonalize_abelian(space, seed=seed)
    d = w @ v @ dagger(w)
    off = frob(d - np.diag(np.diag(d)))
    if off > SOLVE_TOL * n:
        raise NotInSpanError(
            f"matrix is not in the abelian exponential (off-diagonal {off:.2e})"
        )
    phases = np.angle(np.diag(d))
    eigcols = np.array([np.real(np.diag(w @ g.matrix @ dagger(w))) for g in space.generators])
    a = np.vstack([eigcols, np.ones(n)]).T  # unknowns: omegas then the phase
    target = phases.copy()
    for _ in range(64):
        sol, *_ = np.linalg.lstsq(a, target, rcond=None)
        resid = target - a @ sol
        wraps = np.round(resid / (2.0 * np.pi))
        if not wraps.any():
            break
        target = target - 2.0 * np.pi * wraps
    else:
        raise NotInSpanError("phase branches did not stabilize")
    if frob(a @ sol - target) > SOLVE_TOL * n:
        raise NotInSpanError("phases do not lie in the space span")
    omegas, gamma = sol[:-1], sol[-1]
    factors = []
    ordinal = 0
    for g, om in zip(space.generators, omegas):
        if abs(om) < ANGLE_PRUNE_TOL:
            continue
        ordinal += 1
        factors.append(
            GateFactor(
                tree_index="0" * max(1, (n - 1).bit_length() + 1),
                ordinal=ordinal,
                generator=g,
                angle=float(om),
                locality=_locality_or_none(g),
            )
        )
    phase = complex(np.exp(1j * gamma))
    check = np.eye(n, dtype=complex)
    for fct in factors:
        check = check @ expm_hermitian(fct.generator.matrix, fct.angle)
    if frob(check * phase - v) > SOLVE_TOL * n:
        raise NotInSpanError("abelian expansion does not reproduce the input")
    return factors, phase
