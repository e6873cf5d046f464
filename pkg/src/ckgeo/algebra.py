"""Graded-contraction family of orthogonal Lie algebras.

The family so_kappa(N+1) depends on N real coefficients kappa_1..kappa_N.
Its N(N+1)/2 generators J_ab (0 <= a < b <= N) close into

    [J_ab, J_ac] =  k_ab J_bc
    [J_ab, J_bc] = -J_ac            (a < b < c)
    [J_ac, J_bc] =  k_bc J_ab

with the two-index coefficients k_ab = kappa_{a+1} kappa_{a+2} ... kappa_b;
brackets of generators sharing no index vanish.  Signs and zeros of kappa
sweep out the pseudo-orthogonal, inhomogeneous and fully flattened ("flag")
algebras, together with the commuting involutions, the basis-rescaling
contractions and the symmetric-space decompositions attached to each slot m.

All coefficient arithmetic is exact: kappa entries are stored as
`fractions.Fraction` (every binary float is a rational), so Jacobi residuals,
representation checks and contraction-limit comparisons return exact zeros
for arbitrary real input, not merely small floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import IndexRangeError

Coef = Fraction


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    raise TypeError(f"kappa entries must be real numbers, got {type(value)!r}")


@dataclass(frozen=True)
class CKSignature:
    """Dimension label n and the n contraction coefficients of so_kappa(n+1)."""

    n: int
    kappa: Tuple[Fraction, ...]

    def __init__(self, kappa: Sequence, n: int | None = None):
        kappa = tuple(_to_fraction(k) for k in kappa)
        if n is None:
            n = len(kappa)
        if n < 1:
            raise ValueError("signature needs n >= 1")
        if len(kappa) != n:
            raise ValueError(f"expected {n} kappa entries, got {len(kappa)}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "kappa", kappa)

    @property
    def kappa_floats(self) -> Tuple[float, ...]:
        return tuple(float(k) for k in self.kappa)

    def with_kappa_zero(self, m: int) -> "CKSignature":
        """Copy with kappa_m set to 0 (m is 1-based)."""
        if not 1 <= m <= self.n:
            raise IndexRangeError(f"m={m} outside 1..{self.n}")
        kap = list(self.kappa)
        kap[m - 1] = Fraction(0)
        return CKSignature(kap)


@dataclass(frozen=True, order=True)
class GeneratorIndex:
    """Label (a, b) of the generator J_ab, 0 <= a < b."""

    a: int
    b: int

    def __post_init__(self):
        if not 0 <= self.a < self.b:
            raise IndexRangeError(f"generator needs 0 <= a < b, got ({self.a},{self.b})")

    def __repr__(self):
        return f"J({self.a},{self.b})"


def generators(n: int) -> List[GeneratorIndex]:
    """All n(n+1)/2 generator labels of so_kappa(n+1), lexicographic."""
    return [GeneratorIndex(a, b) for a in range(n + 1) for b in range(a + 1, n + 1)]


def two_index_kappa(sig: CKSignature, a: int, b: int) -> Fraction:
    """k_ab = kappa_{a+1} kappa_{a+2} ... kappa_b (exact product)."""
    if not 0 <= a < b <= sig.n:
        raise IndexRangeError(f"need 0 <= a < b <= {sig.n}, got ({a},{b})")
    out = Fraction(1)
    for i in range(a + 1, b + 1):
        out *= sig.kappa[i - 1]
    return out


Term = Dict[GeneratorIndex, Coef]
TableKey = Tuple[GeneratorIndex, GeneratorIndex]


@dataclass
class StructureConstants:
    """Sparse antisymmetric bracket table keyed on ordered generator pairs.

    Only pairs x < y with a non-vanishing bracket are stored; the
    antisymmetric completion is applied on lookup.
    """

    n: int
    table: Dict[TableKey, Term] = field(default_factory=dict)

    def bracket(self, x: GeneratorIndex, y: GeneratorIndex) -> Term:
        """[J_x, J_y] as a {target: coefficient} map (empty when it vanishes)."""
        if x == y:
            return {}
        if x < y:
            entry = self.table.get((x, y), {})
            return dict(entry)
        entry = self.table.get((y, x), {})
        return {t: -c for t, c in entry.items()}

    def bracket_linear(self, left: Term, right: Term) -> Term:
        """Bilinear extension of the bracket to coefficient maps."""
        out: Term = {}
        for gx, cx in left.items():
            for gy, cy in right.items():
                for t, c in self.bracket(gx, gy).items():
                    acc = out.get(t, Fraction(0)) + cx * cy * c
                    if acc:
                        out[t] = acc
                    elif t in out:
                        del out[t]
        return out

    def nonzero_entries(self) -> Iterable[Tuple[TableKey, Term]]:
        for key, term in sorted(self.table.items()):
            if term:
                yield key, term

    def to_json_dict(self) -> dict:
        """Wire form consumed by the service/CLI layer."""
        brackets = []
        for (x, y), term in self.nonzero_entries():
            brackets.append(
                {
                    "x": [x.a, x.b],
                    "y": [y.a, y.b],
                    "terms": [
                        {"coef": float(c), "target": [t.a, t.b]}
                        for t, c in sorted(term.items())
                    ],
                }
            )
        return {"n": self.n, "brackets": brackets}

    def distance(self, other: "StructureConstants") -> float:
        """Max absolute coefficient difference over all ordered pairs."""
        keys = set(self.table) | set(other.table)
        worst = Fraction(0)
        for key in keys:
            mine = self.table.get(key, {})
            theirs = other.table.get(key, {})
            for t in set(mine) | set(theirs):
                diff = abs(mine.get(t, Fraction(0)) - theirs.get(t, Fraction(0)))
                if diff > worst:
                    worst = diff
        return float(worst)

    def equals(self, other: "StructureConstants") -> bool:
        return self.n == other.n and self.distance(other) == 0.0


def build_structure_constants(sig: CKSignature) -> StructureConstants:
    """Bracket table of so_kappa(n+1); brackets without a shared index vanish."""
    n = sig.n
    table: Dict[TableKey, Term] = {}

    def put(x: GeneratorIndex, y: GeneratorIndex, target: GeneratorIndex, coef: Coef):
        if coef:
            table.setdefault((x, y), {})[target] = coef

    for a, b, c in itertools.combinations(range(n + 1), 3):
        j_ab, j_ac, j_bc = GeneratorIndex(a, b), GeneratorIndex(a, c), GeneratorIndex(b, c)
        put(j_ab, j_ac, j_bc, two_index_kappa(sig, a, b))
        put(j_ab, j_bc, j_ac, Fraction(-1))
        put(j_ac, j_bc, j_ab, two_index_kappa(sig, b, c))
    return StructureConstants(n=n, table=table)


def jacobi_residual(sc: StructureConstants) -> float:
    """Max norm of [[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y] over all generator triples.

    Exactly 0.0 for every table produced by `build_structure_constants`;
    positive for corrupted tables.
    """
    gens = generators(sc.n)
    worst = Fraction(0)
    for gx, gy, gz in itertools.combinations(gens, 3):
        acc: Term = {}
        for left, right in ((gx, gy), (gy, gz), (gz, gx)):
            inner = sc.bracket(left, right)
            third = {gz: Fraction(1)} if left is gx else (
                {gx: Fraction(1)} if left is gy else {gy: Fraction(1)}
            )
            for t, c in sc.bracket_linear(inner, third).items():
                acc[t] = acc.get(t, Fraction(0)) + c
        for c in acc.values():
            if abs(c) > worst:
                worst = abs(c)
    return float(worst)


def involution_theta(sig: CKSignature, m: int, g: GeneratorIndex) -> int:
    """Sign of the m-th commuting involutive automorphism on J_ab.

    +1 when m <= a or b < m (invariant), -1 when a < m <= b.
    """
    if not 1 <= m <= sig.n:
        raise IndexRangeError(f"m={m} outside 1..{sig.n}")
    if not g.b <= sig.n:
        raise IndexRangeError(f"{g} outside so_kappa({sig.n + 1})")
    return -1 if g.a < m <= g.b else 1


def contract_gamma(sc: StructureConstants, m: int, eps) -> StructureConstants:
    """Bracket table after the basis rescaling J_ab -> eps*J_ab on a < m <= b.

    Each coefficient picks up eps**(i(X)+i(Y)-i(target)) with i = 1 on the
    rescaled block; for this family the exponent is 0 or 2, so eps = 0 is the
    finite contraction limit (it equals the table built with kappa_m = 0).
    """
    if not 1 <= m <= sc.n:
        raise IndexRangeError(f"m={m} outside 1..{sc.n}")
    eps = _to_fraction(eps)
    if eps < 0:
        raise ValueError("contraction parameter must be >= 0")

    def rescaled(g: GeneratorIndex) -> int:
        return 1 if g.a < m <= g.b else 0

    table: Dict[TableKey, Term] = {}
    for (x, y), term in sc.table.items():
        new_term: Term = {}
        for t, c in term.items():
            expo = rescaled(x) + rescaled(y) - rescaled(t)
            if expo < 0:
                raise ValueError("table is not compatible with this grading")
            if expo == 0:
                coef = c
            elif eps == 0:
                continue
            else:
                coef = c * eps**expo
            if coef:
                new_term[t] = coef
        if new_term:
            table[(x, y)] = new_term
    return StructureConstants(n=sc.n, table=table)


@dataclass(frozen=True)
class CartanDecomposition:
    """Anti-invariant/invariant split of so_kappa(n+1) under the m-th involution."""

    m: int
    p_generators: frozenset
    h_generators: frozenset
    left_factor_kappa: Tuple[Fraction, ...]
    right_factor_kappa: Tuple[Fraction, ...]


def cartan_decompose(sig: CKSignature, m: int) -> CartanDecomposition:
    """Split generators by the sign of the m-th involution.

    p (sign -1) spans the tangent space of the coset space attached to slot m
    and has m(n+1-m) elements; h (sign +1) is the isotropy subalgebra, a
    direct sum of the families with coefficients kappa_1..kappa_{m-1} and
    kappa_{m+1}..kappa_n.
    """
    if not 1 <= m <= sig.n:
        raise IndexRangeError(f"m={m} outside 1..{sig.n}")
    p, h = set(), set()
    for g in generators(sig.n):
        (p if involution_theta(sig, m, g) == -1 else h).add(g)
    return CartanDecomposition(
        m=m,
        p_generators=frozenset(p),
        h_generators=frozenset(h),
        left_factor_kappa=sig.kappa[: m - 1],
        right_factor_kappa=sig.kappa[m:],
    )


@dataclass(frozen=True)
class SpaceReport:
    """Dimension, rank and curvature coefficient of the slot-m coset space."""

    m: int
    dimension: int
    rank: int
    curvature_coefficient: Fraction

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "dimension": self.dimension,
            "rank": self.rank,
            "curvature_coefficient": float(self.curvature_coefficient),
        }


def space_report(sig: CKSignature, m: int) -> SpaceReport:
    """dimension = m(n+1-m), rank = min(m, n+1-m), curvature = kappa_m."""
    if not 1 <= m <= sig.n:
        raise IndexRangeError(f"m={m} outside 1..{sig.n}")
    return SpaceReport(
        m=m,
        dimension=m * (sig.n + 1 - m),
        rank=min(m, sig.n + 1 - m),
        curvature_coefficient=sig.kappa[m - 1],
    )


@dataclass
class MatrixRep:
    """Vector representation J_ab = -k_ab e_ab + e_ba with its invariant form.

    `matrices` holds (n+1)x(n+1) arrays of exact Fractions; `ik_matrix` is the
    diagonal invariant metric diag(1, k_01, k_02, ..., k_0n).  Every generator
    X satisfies X^T Ik + Ik X = 0 identically.
    """

    n: int
    matrices: Dict[GeneratorIndex, np.ndarray]
    ik_matrix: np.ndarray


def vector_representation(sig: CKSignature) -> MatrixRep:
    n = sig.n
    mats: Dict[GeneratorIndex, np.ndarray] = {}
    for g in generators(n):
        mat = np.full((n + 1, n + 1), Fraction(0), dtype=object)
        mat[g.a, g.b] = -two_index_kappa(sig, g.a, g.b)
        mat[g.b, g.a] = Fraction(1)
        mats[g] = mat
    diag = [Fraction(1)] + [two_index_kappa(sig, 0, b) for b in range(1, n + 1)]
    ik = np.full((n + 1, n + 1), Fraction(0), dtype=object)
    for i, d in enumerate(diag):
        ik[i, i] = d
    return MatrixRep(n=n, matrices=mats, ik_matrix=ik)


def representation_defect(sig: CKSignature, sc: StructureConstants | None = None) -> Fraction:
    """Max |commutator(X,Y) - bracket-table expansion| over all pairs (exact).

    Zero certifies that the matrix representation reproduces the structure
    constants entry for entry.
    """
    if sc is None:
        sc = build_structure_constants(sig)
    rep = vector_representation(sig)
    worst = Fraction(0)
    gens = generators(sig.n)
    for gx, gy in itertools.combinations(gens, 2):
        mx, my = rep.matrices[gx], rep.matrices[gy]
        comm = mx.dot(my) - my.dot(mx)
        expected = np.full_like(comm, Fraction(0))
        for t, c in sc.bracket(gx, gy).items():
            expected = expected + c * rep.matrices[t]
        diff = comm - expected
        for v in diff.flat:
            if abs(v) > worst:
                worst = abs(v)
    return worst


def _signature_counts(diag: Sequence[Fraction]) -> Tuple[int, int]:
    pos = sum(1 for d in diag if d > 0)
    neg = sum(1 for d in diag if d < 0)
    return (max(pos, neg), min(pos, neg))


def _so_name(diag: Sequence[Fraction]) -> str:
    p, q = _signature_counts(diag)
    return f"so({p})" if q == 0 else f"so({p},{q})"


def _metric_diag(kappa: Sequence[Fraction]) -> List[Fraction]:
    """diag(1, kappa_1, kappa_1 kappa_2, ...) of the invariant quadratic form."""
    out = [Fraction(1)]
    acc = Fraction(1)
    for k in kappa:
        acc *= k
        out.append(acc)
    return out


def classify_algebra(sig: CKSignature) -> str:
    """Name the algebra from the zero pattern and signs of kappa.

    All nonzero -> so(p,q); leading zero -> iso(p,q); two leading zeros ->
    iiso(p,q); all zero -> flag; a zero elsewhere splits off a translation
    ideal t_{a(n+1-a)} against the two flanking families (named recursively).
    """
    kappa = sig.kappa
    n = sig.n
    zeros = [i + 1 for i, k in enumerate(kappa) if k == 0]
    if not zeros:
        return _so_name(_metric_diag(kappa))
    if len(zeros) == n:
        return "flag"
    first = zeros[0]
    if first == 1:
        if n >= 2 and kappa[1] == 0:
            if all(k != 0 for k in kappa[2:]):
                p, q = _signature_counts(_metric_diag(kappa[2:]))
                return f"iiso({p})" if q == 0 else f"iiso({p},{q})"
        elif all(k != 0 for k in kappa[1:]):
            p, q = _signature_counts(_metric_diag(kappa[1:]))
            return f"iso({p})" if q == 0 else f"iso({p},{q})"
    # generic split at the first zero position a: t_{a(n+1-a)} (+) two factors
    a = first
    left = CKSignature(kappa[: a - 1]) if a >= 2 else None
    right = CKSignature(kappa[a:]) if a <= n - 1 else None
    left_name = classify_algebra(left) if left else "so(1)"
    right_name = classify_algebra(right) if right else "so(1)"
    return f"t{a * (n + 1 - a)}({left_name}+{right_name})"


def structure_constants_json(sig: CKSignature, sc: StructureConstants | None = None) -> dict:
    """Serialization of a signature plus its bracket table."""
    if sc is None:
        sc = build_structure_constants(sig)
    out = sc.to_json_dict()
    out["kappa"] = [float(k) for k in sig.kappa]
    return out
