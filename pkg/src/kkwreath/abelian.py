"""Finitely generated abelian groups and core-free subgroups of abelian normal subgroups.

Integer matrices are plain lists of Python ints (exact, no overflow).
Row vectors act on the right: a lattice is the row space of a matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .errors import NoValidCp, NotPrimitive, RankZero, WindowViolation
from .groups import (
    FiniteGroup,
    SubgroupHandle,
    all_subgroups,
    intersection,
    is_metabelian,
    is_normal,
    join,
    normal_closure,
    normal_core,
    normal_subgroups,
    quotient_with_projection,
    subgroup_as_group,
    subgroup_generated,
)

IntMatrix = list[list[int]]


# ---------------------------------------------------------------------------
# integer matrix helpers


def parse_matrix_text(text: str) -> IntMatrix:
    """Parse a ``rows cols`` header followed by integer rows; ``#`` starts a comment."""
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or len(lines[0]) != 2:
        raise ValueError("matrix file needs a 'rows cols' header")
    r, c = int(lines[0][0]), int(lines[0][1])
    rows = [[int(v) for v in ln] for ln in lines[1:]]
    if len(rows) != r or any(len(row) != c for row in rows):
        raise ValueError(f"expected {r} rows of {c} integers")
    return rows


def format_matrix(M: IntMatrix) -> str:
    if not M:
        return "0 0"
    width = max(len(str(v)) for row in M for v in row)
    return "\n".join(" ".join(f"{v:>{width}}" for v in row) for row in M)




def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def vecmat(v: Sequence[int], M: IntMatrix) -> list[int]:
    cols = len(M[0]) if M else 0
    return [sum(v[k] * M[k][j] for k in range(len(M))) for j in range(cols)]


def det(M: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    a = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    n = len(M)
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        lead = a[c][c]
        a[c] = [v / lead for v in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = [[v for v in row[n:]] for row in a]
    if any(v.denominator != 1 for row in out for v in row):
        raise ValueError("matrix is not unimodular")
    return [[int(v) for v in row] for row in out]


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U M V = D`` diagonal, ``d_i | d_(i+1)``, U and V unimodular."""
    A = [[int(v) for v in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U, V = identity(m), identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for X in (A, V):
            for row in X:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):      # row dst += q * row src
        for X in (A, U):
            X[dst] = [a + q * b for a, b in zip(X[dst], X[src])]

    def add_col(dst, src, q):      # col dst += q * col src
        for X in (A, V):
            for row in X:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return U, A, V
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean &= A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean &= A[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            U[t] = [-v for v in U[t]]
    return U, A, V


def invariant_factors(M: IntMatrix) -> list[int]:
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


# ---------------------------------------------------------------------------
# bases of Z^k


def _primitive(v: Sequence[int]) -> bool:
    return len(v) > 0 and gcd(*v) == 1


@dataclass
class LatticeBasis:
    """A basis of Z^k (rows of ``rows``) with its inverse change of basis.

    ``designated`` records, for each round ``i``, the position ``m(i-1)``
    (zero-based) at which the target vector ``g_i`` was placed.
    """

    rows: IntMatrix
    inverse: IntMatrix
    designated: list[tuple[int, list[int]]] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def determinant(self) -> int:
        return det(self.rows)

    def coordinates(self, v: Sequence[int]) -> list[int]:
        """Integer c with ``v = sum c_j rows[j]``."""
        return vecmat(v, self.inverse)


def extend_to_basis(g: Sequence[int]) -> LatticeBasis:
    """A unimodular basis of Z^k whose first vector is the primitive vector g."""
    g = [int(v) for v in g]
    k = len(g)
    if not _primitive(g):
        raise NotPrimitive(f"{g} is not primitive")
    # column operations E with g E = e_1; track V = prod E and Vinv = V^-1
    v = list(g)
    V, Vinv = identity(k), identity(k)

    def add_col(dst, src, q):
        v[dst] += q * v[src]
        for row in V:
            row[dst] += q * row[src]
        Vinv[src] = [a - q * b for a, b in zip(Vinv[src], Vinv[dst])]

    def swap(i, j):
        v[i], v[j] = v[j], v[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    while sum(1 for x in v if x) > 1 or v[0] == 0:
        nz = [i for i in range(k) if v[i]]
        i0 = min(nz, key=lambda i: (abs(v[i]), i))
        if i0 != 0:
            swap(0, i0)
        for j in range(1, k):
            if v[j]:
                add_col(j, 0, -(v[j] // v[0]))
    if v[0] == -1:
        v[0] = 1
        for row in V:
            row[0] = -row[0]
        Vinv[0] = [-a for a in Vinv[0]]
    assert Vinv[0] == g
    return LatticeBasis(Vinv, V)


@dataclass
class HyperplaneReport:
    """Certificate that the coordinate-sum hyperplane avoids every nonzero multiple of each target."""

    sum_functional: list[int]                  # s with sigma(v) = v . s
    hyperplane_basis: IntMatrix                # e_j - e_(j+1) in standard coordinates
    target_coordinates: list[list[int]]
    identity_holds: list[bool]                 # coordinates of g_i are a unit vector
    multiples_checked: int
    violations: list[tuple[int, int]]          # (round, m) with sigma(m g_i) == 0

    @property
    def ok(self) -> bool:
        return all(self.identity_holds) and not self.violations


def lemma_cb_rounds(k: int, targets: Sequence[Sequence[int]], bound: int = 100) -> tuple[LatticeBasis, HyperplaneReport]:
    """Change the standard basis of Z^k round by round so every target becomes a basis vector.

    Round ``i`` takes the target ``g_i``, whose support must lie strictly
    after the previous cutoff ``m(i-1)``; its window runs from ``m(i-1)+1``
    to the last nonzero coordinate ``m(i)``.  The window block is replaced by
    a unimodular basis starting with ``g_i``; everything outside the
    windows stays standard.
    """
    rows = identity(k)
    inv = identity(k)
    designated = []
    cutoff = 0
    for r, g in enumerate(targets):
        g = [int(v) for v in g]
        if len(g) != k:
            raise WindowViolation(f"target {r} has length {len(g)}, expected {k}")
        support = [j for j, v in enumerate(g) if v]
        if not support:
            raise NotPrimitive(f"target {r} is zero")
        if support[0] < cutoff:
            raise WindowViolation(f"target {r} has support at coordinate {support[0] + 1} <= cutoff {cutoff}")
        end = support[-1] + 1
        window = g[cutoff:end]
        if not _primitive(window):
            raise NotPrimitive(f"target {r} is not primitive on its window")
        block = extend_to_basis(window)
        for a in range(end - cutoff):
            rows[cutoff + a] = [0] * cutoff + block.rows[a] + [0] * (k - end)
            inv[cutoff + a] = [0] * cutoff + block.inverse[a] + [0] * (k - end)
        designated.append((cutoff, g))
        cutoff = end
    basis = LatticeBasis(rows, inv, designated)

    s = [sum(inv[i][j] for j in range(k)) for i in range(k)]      # inverse . 1
    hbasis = [[rows[j][c] - rows[j + 1][c] for c in range(k)] for j in range(k - 1)]
    coords, ident, violations = [], [], []
    for r, (pos, g) in enumerate(designated):
        c = basis.coordinates(g)
        coords.append(c)
        ident.append(c == [int(j == pos) for j in range(k)])
        for m in range(1, bound + 1):
            if sum(x * y for x, y in zip([m * v for v in g], s)) == 0:
                violations.append((r, m))
    return basis, HyperplaneReport(s, hbasis, coords, ident, bound, violations)


@dataclass
class QuotientReport:
    epimorphism: list[int]
    hyperplane_invariants: list[int]
    free_rank: int
    torsion: list[int]
    surjective_witness: list[int]

    @property
    def ok(self) -> bool:
        return self.free_rank == 1 and not self.torsion


def quotient_rank_one_check(basis: LatticeBasis, report: HyperplaneReport) -> QuotientReport:
    """Certify ``Z^k / H ≅ Z`` through the coordinate-sum map and the SNF of H's basis."""
    k = basis.rank
    s = report.sum_functional
    H = report.hyperplane_basis
    if H:
        inv = invariant_factors(H)
    else:
        inv = []
    nonzero = [d for d in inv if d != 0]
    free_rank = k - len(nonzero)
    torsion = [d for d in nonzero if d > 1]
    for row in H:
        if sum(a * b for a, b in zip(row, s)) != 0:
            raise AssertionError("hyperplane generator outside the kernel")
    e1 = basis.rows[0]
    if sum(a * b for a, b in zip(e1, s)) != 1:
        raise AssertionError("coordinate sum is not onto")
    return QuotientReport(s, inv, free_rank, torsion, e1)


# ---------------------------------------------------------------------------
# finitely generated abelian groups given by relations


@dataclass
class TorsionComplement:
    """``Z^k / rowspace(relations) = T ⊕ K``, with T torsion and K free.

    Generators are vectors in the original coordinates.
    """

    invariants: list[int]            # one per new generator; 0 means free
    new_basis: IntMatrix             # rows w_i, a basis of Z^k
    torsion_generators: list[list[int]]
    torsion_orders: list[int]
    free_generators: list[list[int]]

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion_orders:
            out *= d
        return out

    @property
    def free_rank(self) -> int:
        return len(self.free_generators)


def _relation_snf(relations: IntMatrix, k: int):
    rel = [list(r) for r in relations] or [[0] * k]
    U, D, V = smith_normal_form(rel)
    d = [D[i][i] if i < len(D) else 0 for i in range(k)]
    return U, D, V, d


def torsion_complement(relations: IntMatrix, k: int | None = None) -> TorsionComplement:
    if k is None:
        k = len(relations[0])
    _, _, V, d = _relation_snf(relations, k)
    W = inverse_unimodular(V)
    tors, orders, free = [], [], []
    for i in range(k):
        if d[i] == 0:
            free.append(W[i])
        elif d[i] > 1:
            tors.append(W[i])
            orders.append(d[i])
    return TorsionComplement(d, W, tors, orders, free)


@dataclass
class SelfIndexEmbedding:
    matrix: IntMatrix          # x -> x M on Z^k, preserving the relation lattice
    index: int
    scaled_generator: list[int]


def lattice_index(rows: IntMatrix, k: int) -> int | None:
    """Index of the row lattice in Z^k, or None if it is infinite."""
    if not rows:
        return None if k else 1
    inv = invariant_factors(rows)
    nonzero = [v for v in inv if v]
    if len(nonzero) < k:
        return None
    out = 1
    for v in nonzero:
        out *= v
    return out


def self_index_embedding(relations: IntMatrix, m: int, k: int | None = None) -> SelfIndexEmbedding:
    """Injective endomorphism of B with image of index m: scale one free generator by m."""
    if m < 1:
        raise ValueError("m must be positive")
    if k is None:
        k = len(relations[0])
    _, _, V, d = _relation_snf(relations, k)
    W = inverse_unimodular(V)
    free = [i for i in range(k) if d[i] == 0]
    if not free:
        raise RankZero("group has no free part")
    diag = identity(k)
    diag[free[0]][free[0]] = m
    M = matmul(matmul(V, diag), W)
    rel = [list(r) for r in relations if any(r)]
    for r in rel:
        if not lattice_contains(rel, vecmat(r, M)):
            raise AssertionError("endomorphism does not preserve the relations")
    index = lattice_index(rel + [list(row) for row in M], k)
    return SelfIndexEmbedding(M, index, W[free[0]])


def lattice_contains(rows: IntMatrix, v: Sequence[int]) -> bool:
    """Whether v lies in the row lattice of ``rows``."""
    if not rows:
        return not any(v)
    _, D, V = smith_normal_form(rows)
    w = vecmat(v, V)
    for i, c in enumerate(w):
        d = D[i][i] if i < min(len(D), len(D[0])) else 0
        if (d == 0 and c != 0) or (d != 0 and c % d):
            return False
    return True


@dataclass(frozen=True)
class DnRational:
    """An element of the group of rationals whose denominators divide a power of n."""

    numerator: int
    denominator: int
    n: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        g = gcd(self.numerator, self.denominator)
        object.__setattr__(self, "numerator", self.numerator // g)
        object.__setattr__(self, "denominator", self.denominator // g)
        rest = self.denominator
        for p in _prime_factors(self.n):
            while rest % p == 0:
                rest //= p
        if rest != 1:
            raise ValueError(f"denominator {self.denominator} does not divide a power of {self.n}")

    @classmethod
    def from_fraction(cls, q: Fraction, n: int) -> "DnRational":
        return cls(q.numerator, q.denominator, n)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __add__(self, other: "DnRational") -> "DnRational":
        if other.n != self.n:
            raise ValueError("different n")
        return DnRational.from_fraction(self.as_fraction() + other.as_fraction(), self.n)

    def __neg__(self):
        return DnRational(-self.numerator, self.denominator, self.n)

    def __sub__(self, other):
        return self + (-other)


def _prime_factors(n: int) -> list[int]:
    out, p, n = [], 2, abs(n)
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# finite abelian normal subgroups


@dataclass
class FiniteAbelianDecomp:
    A: SubgroupHandle
    blocks: dict[int, SubgroupHandle]

    @property
    def primes(self) -> list[int]:
        return sorted(self.blocks)


def sylow_decomposition(A: SubgroupHandle) -> FiniteAbelianDecomp:
    G = A.parent
    orders = G.element_orders[A.array]
    blocks = {}
    for p in _prime_factors(A.order):
        keep = [int(x) for x, o in zip(A.elements, orders) if _is_power_of(int(o), p)]
        blocks[p] = SubgroupHandle(G, tuple(keep))
    return FiniteAbelianDecomp(A, blocks)


def _is_power_of(v: int, p: int) -> bool:
    while v % p == 0:
        v //= p
    return v == 1


def socle_p(A_p: SubgroupHandle, p: int) -> SubgroupHandle:
    """Elements x of A_p with x^p = 1."""
    G = A_p.parent
    keep = [x for x in A_p.elements if int(G.element_orders[x]) in (1, p)]
    return SubgroupHandle(G, tuple(keep))


def _subgroups_within(H: SubgroupHandle) -> list[SubgroupHandle]:
    sub, incl = subgroup_as_group(H)
    out = []
    for K in all_subgroups(sub):
        out.append(SubgroupHandle(H.parent, tuple(sorted(int(incl.image[x]) for x in K.elements))))
    return out


def maximal_Ep(A_p: SubgroupHandle, C_p: SubgroupHandle, p: int | None = None) -> SubgroupHandle:
    """Largest subgroup E of A_p with ``E ∩ A(p) = C_p`` (ties broken by element list)."""
    if p is None:
        p = _prime_factors(A_p.order)[0] if A_p.order > 1 else 2
    soc = socle_p(A_p, p)
    if not C_p <= soc:
        raise ValueError("C_p must lie in the socle")
    candidates = [E for E in _subgroups_within(A_p) if intersection(E, soc).elements == C_p.elements]
    E = min(candidates, key=lambda E: (-E.order, E.elements))
    failures = check_Ep(A_p, E, soc)
    if failures:
        raise AssertionError("; ".join(failures))
    return E


def check_Ep(A_p: SubgroupHandle, E: SubgroupHandle, soc: SubgroupHandle) -> list[str]:
    """Every element of order p in A_p/E must come from the socle."""
    G = A_p.parent
    SE = join(soc, E) if not soc.is_trivial else E
    failures = []
    p_candidates = _prime_factors(A_p.order)
    if A_p.order > 1 and len(p_candidates) != 1:
        failures.append("A_p is not a p-group")
        return failures
    p = p_candidates[0] if p_candidates else 1
    for x in A_p.elements:
        if x in E:
            continue
        xp = G.power(x, p)
        if xp in E and x not in SE:
            failures.append(f"element {x} has order p mod E but is not in A(p)+E")
    for K in _subgroups_within(A_p):
        if E <= K and K.order > E.order and intersection(K, soc).elements == intersection(E, soc).elements:
            failures.append(f"E is not maximal: a subgroup of order {K.order} has the same socle intersection")
            break
    return failures


def f_p_basis(G: FiniteGroup, soc: SubgroupHandle, p: int, preferred: Sequence[SubgroupHandle] = ()) -> list[int]:
    """Basis of an elementary abelian p-group, taking one vector from each preferred subgroup when possible."""
    chosen: list[int] = []
    span = G.trivial()
    for N in preferred:
        v = next((x for x in N.elements if x not in span), None)
        if v is not None:
            chosen.append(v)
            span = subgroup_generated(G, chosen)
    for x in soc.elements:
        if x not in span:
            chosen.append(x)
            span = subgroup_generated(G, chosen)
    return chosen


def f_p_coordinates(G: FiniteGroup, basis: Sequence[int], p: int) -> dict[int, tuple[int, ...]]:
    coords = {}
    for c in itertools.product(range(p), repeat=len(basis)):
        x = 0
        for b, e in zip(basis, c):
            x = G.op(x, G.power(b, e))
        coords[x] = c
    return coords


@dataclass
class CpResult:
    C_p: SubgroupHandle
    basis: list[int]
    minimal_normal: list[SubgroupHandle]


def hyperplane_Cp(G: FiniteGroup, soc: SubgroupHandle, p: int) -> CpResult:
    """Sum-zero hyperplane of A(p) in a basis meeting every minimal normal subgroup of G inside A(p)."""
    if soc.is_trivial:
        return CpResult(soc, [], [])
    closures = {}
    for x in soc.elements[1:]:
        N = normal_closure(G, [x])
        closures.setdefault(N.elements, N)
    minimal = [N for N in closures.values()
               if not any(M.order < N.order and M <= N for M in closures.values())]
    minimal.sort(key=lambda N: (N.order, N.elements))
    basis = f_p_basis(G, soc, p, minimal)
    coords = f_p_coordinates(G, basis, p)
    keep = sorted(x for x, c in coords.items() if sum(c) % p == 0)
    C_p = SubgroupHandle(G, tuple(keep))
    core = normal_core(G, C_p)
    if not core.is_trivial:
        raise NoValidCp(f"sum-zero hyperplane of A({p}) contains a normal subgroup of order {core.order}",
                        prime=p, witness=core)
    return CpResult(C_p, basis, minimal)


@dataclass
class LemmaCCResult:
    C: SubgroupHandle
    n: int
    primes: dict[int, dict]
    normal_in_A: list[SubgroupHandle]
    escapes: list[tuple[SubgroupHandle, int]]      # (N, element of N outside C)
    core: SubgroupHandle
    quotient_exponent: int

    @property
    def ok(self) -> bool:
        return self.core.is_trivial and len(self.escapes) == len(self.normal_in_A) \
            and self.n % self.quotient_exponent == 0


def lemma_cc_C(G: FiniteGroup, A: SubgroupHandle) -> LemmaCCResult:
    """A core-free subgroup C of the finite abelian normal subgroup A with exp(A/C) | exp(A)."""
    if not is_normal(G, A):
        raise ValueError("A must be normal in G")
    A_group, _ = subgroup_as_group(A)
    if not A_group.is_abelian:
        raise ValueError("A must be abelian")
    if not is_metabelian(G):
        raise ValueError("G must be metabelian")
    n = A_group.exponent
    decomp = sylow_decomposition(A)
    data: dict[int, dict] = {}
    F_list = []
    for p in decomp.primes:
        A_p = decomp.blocks[p]
        soc = socle_p(A_p, p)
        cp = hyperplane_Cp(G, soc, p)
        E_p = maximal_Ep(A_p, cp.C_p, p)
        others = [decomp.blocks[q] for q in decomp.primes if q != p]
        F_p = join(E_p, *others) if others else E_p
        data[p] = dict(A_p=A_p, socle=soc, basis=cp.basis, C_p=cp.C_p, E_p=E_p, F_p=F_p)
        F_list.append(F_p)
    C = G.trivial()
    if F_list:
        C = F_list[0]
        for F in F_list[1:]:
            C = intersection(C, F)

    normals = [N for N in normal_subgroups(G) if N.order > 1 and N <= A]
    escapes = []
    for N in normals:
        out = next((x for x in N.elements if x not in C), None)
        if out is not None:
            escapes.append((N, out))
    core = normal_core(G, C)
    lookup = np.full(G.order, -1, dtype=np.int64)
    lookup[A.array] = np.arange(A.order)
    C_local = SubgroupHandle(A_group, tuple(sorted(int(lookup[c]) for c in C.elements)))
    Q, _ = quotient_with_projection(A_group, C_local)
    return LemmaCCResult(C, n, data, normals, escapes, core, Q.exponent)
