"""Standard (complete) wreath products of finite groups.

An element of ``A Wr B`` is a pair ``(b, f)`` with ``b`` in B and ``f`` a
total function ``B -> A`` stored as a tuple indexed by B.  The pair stands
for the product ``b*f``.  Functions are shifted by

    (b^-1 f b)(x) = f(x b^-1)

so ``(b1, f1)(b2, f2) = (b1 b2, shift(b2, f1) * f2)`` with pointwise
multiplication of base functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import MixedParents, NotTransversal, SizeCap
from .groups import (
    DEFAULT_CAP,
    FiniteGroup,
    GroupMap,
    SubgroupHandle,
    direct_product,
    subgroup_as_group,
)


@dataclass(frozen=True, eq=False)
class WreathGroup:
    bottom: FiniteGroup
    top: FiniteGroup
    cap: int = DEFAULT_CAP

    @property
    def base_size(self) -> int:
        return self.bottom.order ** self.top.order

    @property
    def order(self) -> int:
        return self.base_size * self.top.order

    @property
    def feasible(self) -> bool:
        return self.order ** 2 <= self.cap

    def __repr__(self):
        return f"<{self.bottom.name or self.bottom.order} Wr {self.top.name or self.top.order}, order {self.order}>"

    # -- encoding: lexicographic on (top, base tuple)

    @cached_property
    def _weights(self) -> np.ndarray:
        nb, na = self.top.order, self.bottom.order
        return na ** np.arange(nb - 1, -1, -1, dtype=np.int64)

    def encode(self, top, base) -> np.ndarray | int:
        top = np.asarray(top, dtype=np.int64)
        base = np.asarray(base, dtype=np.int64)
        code = top * self.base_size + base @ self._weights
        return int(code) if code.ndim == 0 else code

    def decode(self, code) -> tuple[np.ndarray, np.ndarray]:
        code = np.asarray(code, dtype=np.int64)
        top, rest = np.divmod(code, self.base_size)
        na = self.bottom.order
        base = (rest[..., None] // self._weights) % na
        return top, base

    def element(self, top: int, base: Sequence[int]) -> "WreathElement":
        base = tuple(int(v) for v in base)
        if len(base) != self.top.order:
            raise ValueError("base function must be total on the top group")
        return WreathElement(self, int(top), base)

    def identity(self) -> "WreathElement":
        return WreathElement(self, 0, (0,) * self.top.order)

    def element_from_code(self, code: int) -> "WreathElement":
        t, f = self.decode(code)
        return self.element(int(t), f.tolist())

    def label(self, top: int, base: Sequence[int]) -> str:
        vals = ",".join(self.bottom.label(int(v)) for v in base)
        return f"{self.top.label(int(top))}|{vals}"

    # -- realization

    def materialize(self) -> FiniteGroup:
        if not self.feasible:
            raise SizeCap(f"wreath product of order {self.order} exceeds cap {self.cap}")
        return self.materialized

    @cached_property
    def materialized(self) -> FiniteGroup | None:
        if not self.feasible:
            return None
        codes = np.arange(self.order)
        tops, bases = self.decode(codes)
        table = np.empty((self.order, self.order), dtype=np.int64)
        for x in range(self.order):
            t, f = multiply_arrays(self, tops[x], bases[x], tops, bases)
            table[x] = self.encode(t, f)
        inv_t, inv_f = inverse_arrays(self, tops, bases)
        inv = self.encode(inv_t, inv_f)
        labels = tuple(self.label(tops[i], bases[i]) for i in range(self.order))
        name = f"{self.bottom.name or self.bottom.order} Wr {self.top.name or self.top.order}"
        return FiniteGroup(table, inv, labels, name=name)

    def base_subgroup(self) -> SubgroupHandle:
        """The base group F as a subgroup of the materialized product (codes 0..|A|^|B|-1)."""
        G = self.materialize()
        return SubgroupHandle(G, tuple(range(self.base_size)))

    def top_subgroup(self) -> SubgroupHandle:
        G = self.materialize()
        return SubgroupHandle(G, tuple(b * self.base_size for b in range(self.top.order)))


@dataclass(frozen=True)
class WreathElement:
    parent: WreathGroup
    top: int
    base: tuple[int, ...]

    def __eq__(self, other):
        if not isinstance(other, WreathElement):
            return NotImplemented
        return self.parent is other.parent and self.top == other.top and self.base == other.base

    def __hash__(self):
        return hash((self.top, self.base))

    def __mul__(self, other):
        return wr_multiply(self, other)

    @property
    def code(self) -> int:
        return self.parent.encode(self.top, self.base)

    def inverse(self) -> "WreathElement":
        t, f = inverse_arrays(self.parent, np.array(self.top), np.array(self.base))
        return self.parent.element(int(t), f.tolist())

    def support(self) -> tuple[int, ...]:
        return tuple(x for x, v in enumerate(self.base) if v != 0)


# ---------------------------------------------------------------------------
# the action and the product


def _shift_index(B: FiniteGroup, b) -> np.ndarray:
    """Index array ``idx`` with ``shift(b, f) = f[idx]``; vectorized over ``b``."""
    b = np.asarray(b, dtype=np.int64)
    x = np.arange(B.order)
    if b.ndim == 0:
        return B.mult[x, B.inv[b]]
    return B.mult[x[None, :], B.inv[b][:, None]]


def wr_shift(B: FiniteGroup, b: int, f: Sequence[int]) -> tuple[int, ...]:
    """``b^-1 f b``, the function ``x -> f(x b^-1)``."""
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (B.order,):
        raise ValueError("base function must be total on B")
    return tuple(int(v) for v in f[_shift_index(B, b)])


def multiply_arrays(W: WreathGroup, t1, f1, t2, f2):
    """Vectorized product; ``t*`` are top indices, ``f*`` base rows (broadcasting)."""
    A, B = W.bottom, W.top
    t1 = np.asarray(t1, dtype=np.int64)
    t2 = np.asarray(t2, dtype=np.int64)
    f1 = np.asarray(f1, dtype=np.int64)
    f2 = np.asarray(f2, dtype=np.int64)
    idx = _shift_index(B, t2)
    if f1.ndim == 1 and idx.ndim == 2:
        shifted = f1[idx]
    elif f1.ndim == 2 and idx.ndim == 2:
        shifted = np.take_along_axis(f1, idx, axis=1)
    elif f1.ndim == 2:
        shifted = f1[:, idx]
    else:
        shifted = f1[idx]
    return B.mult[t1, t2], A.mult[shifted, f2]


def inverse_arrays(W: WreathGroup, t, f):
    """(b f)^-1 = b^-1 * shift(b^-1, f^-1)."""
    A, B = W.bottom, W.top
    t = np.asarray(t, dtype=np.int64)
    f = np.asarray(f, dtype=np.int64)
    tinv = B.inv[t]
    finv = A.inv[f]
    idx = _shift_index(B, tinv)
    if finv.ndim == 2:
        shifted = np.take_along_axis(finv, idx, axis=1)
    else:
        shifted = finv[idx]
    return tinv, shifted


def wr_multiply(u: WreathElement, v: WreathElement) -> WreathElement:
    if u.parent is not v.parent:
        raise MixedParents("elements belong to different wreath products")
    W = u.parent
    t, f = multiply_arrays(W, u.top, u.base, v.top, v.base)
    return WreathElement(W, int(t), tuple(int(x) for x in f))


def base_embed(W: WreathGroup, value: int | Sequence[int], position: int | None = None) -> WreathElement:
    """Base element: either a whole function, or a single value at ``position``."""
    if position is None:
        return W.element(0, value)
    base = [0] * W.top.order
    base[position] = int(value)
    return W.element(0, base)


def top_embed(W: WreathGroup, b: int) -> WreathElement:
    return W.element(b, (0,) * W.top.order)


# ---------------------------------------------------------------------------
# maps into wreath products


@dataclass(frozen=True, eq=False)
class WreathMap:
    """A map from a finite group into a wreath product, stored as image arrays.

    ``tops[g]`` and ``bases[g]`` give the image of ``g``.  Verification works
    directly on these arrays, so the target never has to be materialized.
    """

    domain: FiniteGroup
    target: WreathGroup
    tops: np.ndarray
    bases: np.ndarray
    verified_hom: bool = False
    verified_injective: bool = False
    evidence: str = ""

    @classmethod
    def checked(cls, domain: FiniteGroup, target: WreathGroup, tops, bases) -> "WreathMap":
        tops = np.asarray(tops, dtype=np.int64)
        bases = np.asarray(bases, dtype=np.int64).reshape(domain.order, target.top.order)
        ok, witness = verify_wreath_hom(domain, target, tops, bases)
        injective = ok and _kernel_mask(tops, bases).sum() == 1
        if ok:
            evidence = f"exhaustive check of {domain.order ** 2} pairs; kernel of size {int(_kernel_mask(tops, bases).sum())}"
        else:
            evidence = f"homomorphism fails at pair {witness}"
        tops.setflags(write=False)
        bases.setflags(write=False)
        return cls(domain, target, tops, bases, ok, bool(injective), evidence)

    def __call__(self, g: int) -> WreathElement:
        return self.target.element(int(self.tops[g]), self.bases[g].tolist())

    def kernel(self) -> tuple[int, ...]:
        return tuple(int(g) for g in np.flatnonzero(_kernel_mask(self.tops, self.bases)))

    def distinct_images(self) -> int:
        rows = np.concatenate([self.tops[:, None], self.bases], axis=1)
        return len(np.unique(rows, axis=0))

    def codes(self) -> np.ndarray:
        return self.target.encode(self.tops, self.bases)

    def to_group_map(self) -> GroupMap:
        """The same map into the materialized target (re-verified on all pairs)."""
        codomain = self.target.materialize()
        return GroupMap.checked(self.domain, codomain, self.codes())


def _kernel_mask(tops, bases) -> np.ndarray:
    return (tops == 0) & (bases == 0).all(axis=1)


def verify_wreath_hom(domain: FiniteGroup, W: WreathGroup, tops, bases):
    tops = np.asarray(tops, dtype=np.int64)
    bases = np.asarray(bases, dtype=np.int64)
    if domain.order == 0:
        return True, None
    if tops[0] != 0 or (bases[0] != 0).any():
        return False, (0, 0)
    for x in range(domain.order):
        t, f = multiply_arrays(W, tops[x], bases[x], tops, bases)
        xy = domain.mult[x]
        bad = np.flatnonzero((t != tops[xy]) | (f != bases[xy]).any(axis=1))
        if len(bad):
            return False, (x, int(bad[0]))
    return True, None


def lift_element(h: GroupMap, e: WreathElement, target: WreathGroup) -> WreathElement:
    """``b f -> b (h o f)``"""
    return target.element(e.top, [int(h.image[v]) for v in e.base])


def lift_wreath_map(h: GroupMap, phi: WreathMap) -> WreathMap:
    """Post-compose a map into ``A Wr B`` with the lift of ``h: A -> Abar``."""
    target = WreathGroup(h.codomain, phi.target.top, phi.target.cap)
    return WreathMap.checked(phi.domain, target, phi.tops, h.image[phi.bases])


def lift_hom(h: GroupMap, W: WreathGroup) -> GroupMap:
    """The induced map ``A Wr B -> Abar Wr B`` between materialized products, verified."""
    if not h.verified_hom:
        raise ValueError("lift_hom needs a verified homomorphism")
    if h.domain is not W.bottom:
        raise ValueError("map domain must be the bottom group")
    Wbar = WreathGroup(h.codomain, W.top, W.cap)
    src = W.materialize()
    dst = Wbar.materialize()
    tops, bases = W.decode(np.arange(W.order))
    return GroupMap.checked(src, dst, Wbar.encode(tops, h.image[bases]))


# ---------------------------------------------------------------------------
# finite-index blow-up


@dataclass(frozen=True, eq=False)
class BlowupResult:
    map: GroupMap
    domain_wreath: WreathGroup
    codomain_wreath: WreathGroup
    transversal: tuple[int, ...]


def index_blowup_iso(D: FiniteGroup, B0: FiniteGroup, B: SubgroupHandle,
                     t: Sequence[int] | None = None, *, cap: int = DEFAULT_CAP) -> BlowupResult:
    """Isomorphism ``B ⋉ F(B0, D) -> D^m Wr B`` sending ``f0`` to ``b -> (f0(t_1 b), ..., f0(t_m b))``.

    The domain is the subgroup of ``D Wr B0`` whose top lies in ``B``; the map
    is the identity on ``B``.  Both sides are materialized and the map is
    verified on all pairs.
    """
    if B.parent is not B0:
        raise ValueError("B must be a subgroup of B0")
    m = B0.order // B.order
    if t is None:
        t = _right_transversal(B0, B)
    t = tuple(int(x) for x in t)
    if len(t) != m:
        raise NotTransversal(f"need {m} coset representatives, got {len(t)}")
    cover = np.zeros(B0.order, dtype=np.int64)
    for tk in t:
        cover[B0.mult[tk, B.array]] += 1
    if not (cover == 1).all():
        raise NotTransversal("representatives do not cover B0 exactly once")

    big = WreathGroup(D, B0, cap)
    Bgrp, _ = subgroup_as_group(B)
    Dm = direct_product(*([D] * m), cap=cap) if m > 1 else D
    small = WreathGroup(Dm, Bgrp, cap)
    for W in (big, small):
        if not W.feasible:
            raise SizeCap(f"{W!r} exceeds cap")
    G0 = big.materialize()
    tops, bases = big.decode(np.arange(big.order))
    keep = np.flatnonzero(B.mask[tops])
    dom_handle = SubgroupHandle(G0, tuple(int(c) for c in keep))
    dom, _ = subgroup_as_group(dom_handle)

    lookup = np.full(B0.order, -1, dtype=np.int64)
    lookup[B.array] = np.arange(B.order)
    # positions[j, k] = t_k * (j-th element of B) inside B0
    positions = B0.mult[np.array(t)[None, :], B.array[:, None]]
    weights = D.order ** np.arange(m - 1, -1, -1, dtype=np.int64)
    f0 = bases[keep]                               # (|dom|, |B0|)
    new_base = f0[:, positions] @ weights          # (|dom|, |B|)
    new_top = lookup[tops[keep]]
    codes = small.encode(new_top, new_base)
    gm = GroupMap.checked(dom, small.materialize(), codes)
    return BlowupResult(gm, big, small, t)


def _right_transversal(B0: FiniteGroup, B: SubgroupHandle) -> tuple[int, ...]:
    seen = np.zeros(B0.order, dtype=bool)
    reps = []
    for x in range(B0.order):
        if not seen[x]:
            reps.append(x)
            seen[B0.mult[x, B.array]] = True
    return tuple(reps)
