"""Modules over the p-element field for cyclic groups, and their semidirect products.

For a prime ``q != p`` the block ``V_q`` is the companion module of an
irreducible factor of ``1 + x + ... + x^(q-1)`` over F_p; a generator ``b``
acts on it with multiplicative order ``q``.  ``V_S`` is the direct sum over
a finite set ``S`` of such primes and ``G_S = <b> ⋉ V_S`` is realized with
``b`` of order ``n = prod S``.

Vectors are row vectors; ``b^-1 v b = v M`` where ``M`` is the block
diagonal action matrix.  An element ``(k, v)`` stands for ``b^k v``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import SizeCap
from .groups import (
    DEFAULT_CAP,
    FiniteGroup,
    SubgroupHandle,
    subgroup_generated,
)
from .kk import KKContext, Prop1Report, kk_reduced, make_context, verify_prop1
from .wreath import WreathMap

Poly = tuple[int, ...]        # coefficients, constant term first


# ---------------------------------------------------------------------------
# polynomials over F_p


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_mul(a: Poly, b: Poly, p: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return tuple(_trim(out))


def poly_divmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    _trim(r)
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(r) - len(b) + 1, 0)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        c = (r[-1] * inv_lead) % p
        q[shift] = c
        for i, y in enumerate(b):
            r[shift + i] = (r[shift + i] - c * y) % p
        _trim(r)
    return tuple(_trim(q)), tuple(r)


def monic_polys(degree: int, p: int) -> Iterable[Poly]:
    """Monic polynomials of a degree, ordered by coefficient tuple read from x^(d-1) down to 1."""
    for high_to_low in itertools.product(range(p), repeat=degree):
        yield tuple(reversed(high_to_low)) + (1,)


def is_irreducible(f: Poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree at most deg(f)/2."""
    d = len(f) - 1
    if d < 1:
        return False
    for e in range(1, d // 2 + 1):
        for g in monic_polys(e, p):
            if not poly_divmod(f, g, p)[1]:
                return False
    return True


def multiplicative_order(a: int, q: int) -> int:
    a %= q
    k, x = 1, a
    while x != 1:
        x = (x * a) % q
        k += 1
    return k


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


# ---------------------------------------------------------------------------
# matrices over F_p


@dataclass(frozen=True, eq=False)
class FpMatrix:
    p: int
    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.int64) % self.p
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.p, self.data @ other.data)

    def __eq__(self, other):
        return isinstance(other, FpMatrix) and self.p == other.p and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.p, self.data.tobytes()))

    def power(self, k: int) -> "FpMatrix":
        out = FpMatrix(self.p, np.eye(self.dim, dtype=np.int64))
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def is_identity(self) -> bool:
        return np.array_equal(self.data, np.eye(self.dim, dtype=np.int64))

    def multiplicative_order(self, limit: int = 10**6) -> int:
        m = self
        for k in range(1, limit + 1):
            if m.is_identity():
                return k
            m = m @ self
        raise ValueError("order exceeds limit")

    def rows(self) -> list[list[int]]:
        return self.data.tolist()


def companion(f: Poly, p: int) -> FpMatrix:
    """Multiplication by x on F_p[x]/(f) in the basis 1, x, ..., x^(d-1), acting on row vectors."""
    d = len(f) - 1
    M = np.zeros((d, d), dtype=np.int64)
    for k in range(d - 1):
        M[k, k + 1] = 1
    M[d - 1] = [(-c) % p for c in f[:d]]
    return FpMatrix(p, M)


@dataclass(frozen=True)
class IrreducibleBlock:
    q: int
    poly: Poly
    action: FpMatrix

    @property
    def dim(self) -> int:
        return self.action.dim


def irreducible_factor(p: int, q: int) -> Poly:
    if not (is_prime(p) and is_prime(q)) or p == q:
        raise ValueError("p and q must be distinct primes")
    d = multiplicative_order(p, q)
    cyclotomic = (1,) * q
    for f in monic_polys(d, p):
        if not poly_divmod(cyclotomic, f, p)[1]:
            return f
    raise AssertionError("no factor of the expected degree")


def irreducible_action(p: int, q: int) -> FpMatrix:
    """Companion matrix of the least irreducible factor of (x^q - 1)/(x - 1) over F_p."""
    return companion(irreducible_factor(p, q), p)


def poly_str(f: Poly) -> str:
    terms = []
    for k in range(len(f) - 1, -1, -1):
        c = f[k]
        if not c:
            continue
        mono = "1" if k == 0 else ("x" if k == 1 else f"x^{k}")
        terms.append(mono if c == 1 or k == 0 and c == 1 else (f"{c}" if k == 0 else f"{c}*{mono}"))
    return " + ".join(terms) or "0"


# ---------------------------------------------------------------------------
# the module V_S


@dataclass(frozen=True, eq=False)
class FpModuleDecomp:
    p: int
    blocks: tuple[IrreducibleBlock, ...]

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(b.q for b in self.blocks)

    @cached_property
    def offsets(self) -> dict[int, tuple[int, int]]:
        out, start = {}, 0
        for b in self.blocks:
            out[b.q] = (start, start + b.dim)
            start += b.dim
        return out

    @cached_property
    def action(self) -> FpMatrix:
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        for b in self.blocks:
            lo, hi = self.offsets[b.q]
            M[lo:hi, lo:hi] = b.action.data
        return FpMatrix(self.p, M)

    @property
    def size(self) -> int:
        return self.p ** self.dim

    @cached_property
    def vectors(self) -> np.ndarray:
        """All vectors, lexicographically; row c is the vector with code c."""
        D = self.dim
        codes = np.arange(self.size)
        weights = self.p ** np.arange(D - 1, -1, -1, dtype=np.int64)
        v = (codes[:, None] // weights[None, :]) % self.p
        v.setflags(write=False)
        return v

    def encode(self, v) -> np.ndarray | int:
        weights = self.p ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)
        c = np.asarray(v, dtype=np.int64) @ weights
        return int(c) if np.ndim(c) == 0 else c

    def block_codes(self, T: Iterable[int]) -> np.ndarray:
        """Codes of the vectors of the sub-sum V_T."""
        inside = np.zeros(self.dim, dtype=bool)
        for q in T:
            lo, hi = self.offsets[q]
            inside[lo:hi] = True
        ok = (self.vectors[:, ~inside] == 0).all(axis=1)
        return np.flatnonzero(ok)

    def basis_codes(self, T: Iterable[int] | None = None) -> list[int]:
        qs = self.primes if T is None else T
        out = []
        for q in qs:
            lo, hi = self.offsets[q]
            for i in range(lo, hi):
                e = [0] * self.dim
                e[i] = 1
                out.append(self.encode(e))
        return out


def module_decomp(p: int, S: Iterable[int]) -> FpModuleDecomp:
    S = sorted(set(int(q) for q in S))
    blocks = []
    for q in S:
        f = irreducible_factor(p, q)
        blocks.append(IrreducibleBlock(q, f, companion(f, p)))
    return FpModuleDecomp(p, tuple(blocks))


@dataclass(frozen=True, eq=False)
class TruncatedG:
    """``<b> ⋉ V_S`` with b of order n; element index ``k * p^D + code(v)``."""

    decomp: FpModuleDecomp
    cap: int = DEFAULT_CAP

    @property
    def p(self) -> int:
        return self.decomp.p

    @property
    def n(self) -> int:
        out = 1
        for q in self.decomp.primes:
            out *= q
        return out

    @property
    def order(self) -> int:
        return self.n * self.decomp.size

    @cached_property
    def _shift(self) -> np.ndarray:
        """shift[k, c] = code(v_c M^k)"""
        dec = self.decomp
        out = np.empty((self.n, dec.size), dtype=np.int64)
        vec = dec.vectors
        M = dec.action
        P = FpMatrix(self.p, np.eye(dec.dim, dtype=np.int64))
        for k in range(self.n):
            out[k] = dec.encode((vec @ P.data) % self.p) if dec.dim else 0
            P = P @ M
        return out

    @cached_property
    def _add(self) -> np.ndarray:
        dec = self.decomp
        vec = dec.vectors
        if dec.dim == 0:
            return np.zeros((1, 1), dtype=np.int64)
        s = (vec[:, None, :] + vec[None, :, :]) % self.p
        return dec.encode(s)

    def split(self, x):
        return np.divmod(np.asarray(x, dtype=np.int64), self.decomp.size)

    def multiply(self, x, y):
        """Vectorized product (k1, v1)(k2, v2) = (k1 + k2, v1 M^k2 + v2)."""
        k1, c1 = self.split(x)
        k2, c2 = self.split(y)
        k = (k1 + k2) % self.n
        c = self._add[self._shift[k2, c1], c2]
        return k * self.decomp.size + c

    def element(self, k: int, v: Sequence[int]) -> int:
        return int(k % self.n) * self.decomp.size + self.decomp.encode(v)

    def b(self) -> int:
        return self.element(1, [0] * self.decomp.dim) if self.n > 1 else 0

    def label(self, x: int) -> str:
        k, c = divmod(int(x), self.decomp.size)
        v = "".join(str(int(t)) for t in self.decomp.vectors[c]) if self.decomp.dim else ""
        return f"b^{k}|{v}"

    @property
    def feasible(self) -> bool:
        return self.order ** 2 <= self.cap

    @cached_property
    def realized(self) -> FiniteGroup:
        if not self.feasible:
            raise SizeCap(f"truncated group of order {self.order} exceeds cap {self.cap}")
        x = np.arange(self.order)
        table = self.multiply(x[:, None], x[None, :])
        inv = np.argmax(table == 0, axis=1)
        labels = tuple(self.label(i) for i in range(self.order))
        return FiniteGroup(table, inv, labels, name=f"<b> x| V_{{{','.join(map(str, self.decomp.primes))}}}")

    def base(self) -> SubgroupHandle:
        """V_S inside the realized group."""
        return SubgroupHandle(self.realized, tuple(range(self.decomp.size)), tuple(self.decomp.basis_codes()))


def build_truncated_G(p: int, S: Iterable[int], *, cap: int = DEFAULT_CAP, realize: bool = True) -> TruncatedG:
    S = sorted(set(int(q) for q in S))
    if not is_prime(p) or any(not is_prime(q) or q == p for q in S):
        raise ValueError("p must be prime and S a set of primes different from p")
    T = TruncatedG(module_decomp(p, S), cap)
    if realize:
        T.realized
    return T


# ---------------------------------------------------------------------------
# the sum-zero hyperplane


def _span(vectors: np.ndarray, p: int, dec: FpModuleDecomp) -> frozenset[int]:
    """Codes of the F_p-span of the given vectors."""
    codes = {0}
    for v in vectors:
        new = set()
        for c in codes:
            base = dec.vectors[c]
            for t in range(1, p):
                new.add(dec.encode((base + t * v) % p))
        codes |= new
    return frozenset(codes)


def submodules(dec: FpModuleDecomp) -> list[frozenset[int]]:
    """Every <b>-invariant subspace, by joining cyclic submodules (tiny dimensions only)."""
    p, M = dec.p, dec.action.data
    cyclic_subs = {}
    for c in range(dec.size):
        v = dec.vectors[c]
        orbit = [v]
        w = v
        for _ in range(dec.dim):
            w = (w @ M) % p
            orbit.append(w)
        S = _span(np.array(orbit), p, dec)
        cyclic_subs.setdefault(S, None)
    found = set(cyclic_subs)
    frontier = list(found)
    cyc = list(cyclic_subs)
    while frontier:
        nxt = []
        for A in frontier:
            for B in cyc:
                if B <= A:
                    continue
                J = _span(np.array([dec.vectors[c] for c in sorted(A | B)]), p, dec)
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


@dataclass
class HyperplaneC:
    decomp: FpModuleDecomp
    codes: tuple[int, ...]
    blocks_outside: dict[int, bool]           # q -> V_q not contained in C
    submodules_checked: int | None = None     # None when the brute-force scan was skipped
    submodules_inside: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def index(self) -> int:
        return self.decomp.size // len(self.codes)

    @property
    def dim(self) -> int:
        size, d = len(self.codes), 0
        while size > 1:
            size //= self.decomp.p
            d += 1
        return d

    @property
    def ok(self) -> bool:
        return all(self.blocks_outside.values()) and not self.submodules_inside and \
            self.index == self.decomp.p


def hyperplane_C(dec: FpModuleDecomp, *, scan_dim: int = 8) -> HyperplaneC:
    """Vectors whose coordinates in the union basis sum to zero."""
    if dec.dim < 1:
        raise ValueError("module must be nonzero")
    sums = dec.vectors.sum(axis=1) % dec.p
    inside = sums == 0
    codes = tuple(int(c) for c in np.flatnonzero(inside))
    outside = {}
    for q in dec.primes:
        outside[q] = not inside[dec.block_codes([q])].all()
    report = HyperplaneC(dec, codes, outside)
    if dec.dim <= scan_dim:
        subs = submodules(dec)
        report.submodules_checked = len(subs)
        report.submodules_inside = [tuple(sorted(s)) for s in subs if len(s) > 1 and all(inside[c] for c in s)]
    return report


# ---------------------------------------------------------------------------
# embedding and fingerprints


@dataclass
class Theorem3Result:
    group: TruncatedG
    hyperplane: HyperplaneC | None
    context: KKContext
    kappa: WreathMap
    prop1: Prop1Report

    @property
    def ok(self) -> bool:
        return self.kappa.verified_hom and self.kappa.verified_injective and \
            (self.hyperplane is None or self.hyperplane.ok)


def theorem3_embed(p: int, S: Iterable[int], *, cap: int = DEFAULT_CAP) -> Theorem3Result:
    """Embed ``G_S`` in ``(Z/p) Wr (Z/n)`` through the reduced embedding with C the sum-zero hyperplane.

    The target is never materialized; the map is checked on all pairs of
    the domain directly on the image arrays.
    """
    T = build_truncated_G(p, S, cap=cap)
    G = T.realized
    V = T.base()
    if T.decomp.dim:
        hyp = hyperplane_C(T.decomp)
        C = SubgroupHandle(G, hyp.codes)
    else:
        hyp, C = None, G.trivial()
    ctx = make_context(G, V, C)
    kappa = kk_reduced(ctx)
    return Theorem3Result(T, hyp, ctx, kappa, verify_prop1(ctx, kappa))


def _subsets(S: Sequence[int]):
    for r in range(len(S) + 1):
        yield from itertools.combinations(S, r)


def centralizer_index(T: TruncatedG, Tset: Iterable[int]) -> int:
    """Index in G_S of the centralizer of V_T, computed element by element with the group law."""
    gens = T.decomp.basis_codes(list(Tset))
    g = np.arange(T.order)
    if not gens:
        return 1
    gens = np.array(gens, dtype=np.int64)
    commutes = (T.multiply(g[:, None], gens[None, :]) == T.multiply(gens[None, :], g[:, None])).all(axis=1)
    return T.order // int(commutes.sum())


def fingerprint_table(p: int, S: Iterable[int]) -> dict[tuple[int, ...], int]:
    T = build_truncated_G(p, S, realize=False)
    return {sub: centralizer_index(T, sub) for sub in _subsets(T.decomp.primes)}


def fingerprint(p: int, S: Iterable[int]) -> tuple[int, ...]:
    """Sorted multiset of centralizer indices of the sub-sums V_T, T ⊆ S."""
    return tuple(sorted(fingerprint_table(p, S).values()))


@dataclass
class LocalCheck:
    generators: tuple[int, ...]
    order: int
    base_order: int
    top_order: int
    quotient_cyclic: bool
    base_inside_V: bool

    @property
    def ok(self) -> bool:
        return self.quotient_cyclic and self.base_inside_V and self.order == self.base_order * self.top_order


def local_structure_check(p: int, S: Iterable[int], *, trials: int = 20, seed: int = 0,
                          cap: int = DEFAULT_CAP) -> list[LocalCheck]:
    """Split random 2-generated subgroups as (part inside V_S) by cyclic quotient.

    Always includes the subgroup generated by b and one generated by a
    single basis vector.
    """
    T = build_truncated_G(p, S, cap=cap)
    G = T.realized
    size = T.decomp.size
    rng = random.Random(seed)
    gen_sets = [(T.b(),)]
    if T.decomp.dim:
        gen_sets.append((T.decomp.basis_codes()[0],))
    for _ in range(trials):
        gen_sets.append((rng.randrange(G.order), rng.randrange(G.order)))
    out = []
    for gens in gen_sets:
        K = subgroup_generated(G, gens)
        base = [x for x in K.elements if x < size]
        tops = sorted({x // size for x in K.elements})
        # K/(K ∩ V) embeds in Z/n through the top; it is cyclic iff one top generates all the others
        top_set = set(tops)
        cyclic = any({(j * t) % T.n for j in range(T.n)} == top_set for t in tops)
        out.append(LocalCheck(tuple(gens), K.order, len(base), len(tops), cyclic, all(x < size for x in base)))
    return out
