"""Finite groups stored as Cayley tables.

Every group has its identity at index 0.  Subgroups are sorted index lists
into their parent group, and maps between groups are index arrays.  All the
exhaustive checks (homomorphism, normality, cores) are vectorized over the
table with numpy.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NotAGroup, NotNormal, SizeCap

#: Maximum number of Cayley-table cells (order squared) we are willing to build.
DEFAULT_CAP = 10**6


def check_cap(order: int, cap: int | None = None, what: str = "group") -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if order * order > cap:
        raise SizeCap(f"{what} of order {order} needs {order * order} table cells (cap {cap})")


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``mult[x, y]`` is the index of ``x*y``.  Index 0 is the identity.  Use
    :func:`from_multiplication_table` for untrusted tables; the constructor
    itself only checks shapes.
    """

    mult: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mult", _readonly(self.mult))
        object.__setattr__(self, "inv", _readonly(self.inv))
        n = self.mult.shape[0]
        if self.mult.shape != (n, n) or self.inv.shape != (n,):
            raise ValueError("table must be square and inverse array must match")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("need one label per element")

    @property
    def order(self) -> int:
        return self.mult.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        name = self.name or "FiniteGroup"
        return f"<{name} of order {self.order}>"

    def op(self, x: int, y: int) -> int:
        return int(self.mult[x, y])

    def product(self, xs: Iterable[int]) -> int:
        r = 0
        for x in xs:
            r = int(self.mult[r, x])
        return r

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = int(self.inv[x]), -k
        r = 0
        for _ in range(k):
            r = int(self.mult[r, x])
        return r

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return int(self.mult[self.mult[g, x], self.inv[g]])

    def label(self, x: int) -> str:
        if self.labels is None:
            return str(x)
        return self.labels[x]

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        k = 1
        todo = np.ones(n, dtype=bool)
        while todo.any():
            hit = todo & (cur == 0)
            orders[hit] = k
            todo &= ~hit
            cur = self.mult[cur, np.arange(n)]
            k += 1
        orders.setflags(write=False)
        return orders

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders)) if self.order else 1

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.mult == self.mult.T).all())

    def whole(self) -> "SubgroupHandle":
        return SubgroupHandle(self, tuple(range(self.order)), tuple(range(self.order)))

    def trivial(self) -> "SubgroupHandle":
        return SubgroupHandle(self, (0,), ())


@dataclass(frozen=True, eq=False)
class SubgroupHandle:
    """A subgroup of ``parent`` as a strictly sorted tuple of element indices."""

    parent: FiniteGroup
    elements: tuple[int, ...]
    generators: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return bool(self.mask[x])

    def __eq__(self, other):
        if not isinstance(other, SubgroupHandle):
            return NotImplemented
        return self.parent is other.parent and self.elements == other.elements

    def __hash__(self):
        return hash((id(self.parent), self.elements))

    def __le__(self, other: "SubgroupHandle") -> bool:
        return bool(other.mask[list(self.elements)].all())

    def __repr__(self):
        return f"<subgroup of order {self.order} in {self.parent!r}>"

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        m.setflags(write=False)
        return m

    @cached_property
    def array(self) -> np.ndarray:
        return _readonly(self.elements)

    @property
    def is_trivial(self) -> bool:
        return self.elements == (0,)

    def gens(self) -> tuple[int, ...]:
        return self.generators if self.generators else self.elements


@dataclass(frozen=True, eq=False)
class GroupMap:
    """An index map ``domain -> codomain`` plus what has been verified about it."""

    domain: FiniteGroup
    codomain: FiniteGroup
    image: np.ndarray
    verified_hom: bool = False
    verified_injective: bool = False
    evidence: str = ""

    def __post_init__(self):
        object.__setattr__(self, "image", _readonly(self.image))
        if self.image.shape != (self.domain.order,):
            raise ValueError("image must have one entry per domain element")
        if self.domain.order and int(self.image[0]) != 0:
            raise ValueError("a group map must send the identity to the identity")

    def __call__(self, x: int) -> int:
        return int(self.image[x])

    @classmethod
    def checked(cls, domain, codomain, image) -> "GroupMap":
        """Build the map and verify it on all |domain|^2 pairs."""
        image = np.asarray(image, dtype=np.int64)
        ok, witness = verify_homomorphism(domain, codomain, image)
        injective = ok and len(np.unique(image)) == domain.order
        if ok:
            evidence = f"exhaustive check of {domain.order ** 2} pairs"
        else:
            evidence = f"homomorphism fails at pair {witness}"
        return cls(domain, codomain, image, ok, bool(injective), evidence)

    @property
    def is_surjective(self) -> bool:
        return len(np.unique(self.image)) == self.codomain.order

    @property
    def is_bijective(self) -> bool:
        return self.verified_injective and self.is_surjective

    def kernel(self) -> SubgroupHandle:
        ker = tuple(int(x) for x in np.flatnonzero(self.image == 0))
        return SubgroupHandle(self.domain, ker)

    def image_subgroup(self) -> SubgroupHandle:
        return SubgroupHandle(self.codomain, tuple(int(x) for x in np.unique(self.image)))

    def compose(self, after: "GroupMap") -> "GroupMap":
        """Return ``after o self``; verification flags are re-derived exhaustively."""
        if after.domain is not self.codomain:
            raise ValueError("maps are not composable")
        return GroupMap.checked(self.domain, after.codomain, after.image[self.image])


@dataclass(frozen=True, eq=False)
class Transversal:
    """A section ``b -> b^s`` of the projection ``group -> quotient``."""

    group: FiniteGroup
    quotient: FiniteGroup
    section: tuple[int, ...]

    def __call__(self, b: int) -> int:
        return self.section[b]

    @cached_property
    def array(self) -> np.ndarray:
        return _readonly(self.section)


# ---------------------------------------------------------------------------
# construction


def _identity_of(table: np.ndarray) -> int | None:
    n = table.shape[0]
    ar = np.arange(n)
    for e in range(n):
        if (table[e] == ar).all() and (table[:, e] == ar).all():
            return e
    return None


def from_multiplication_table(table, labels: Sequence[str] | None = None, *, name: str = "") -> FiniteGroup:
    """Validate a Cayley table and return it as a group with identity at 0.

    If the identity sits at some other index ``e``, elements ``0`` and ``e``
    are swapped.  Labels default to the original row numbers, so callers can
    still refer to elements the way the input file did.
    """
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise NotAGroup("table must be a non-empty square array")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise NotAGroup("table entries out of range")
    if labels is None:
        labels = [str(i) for i in range(n)]
    labels = list(labels)
    if len(labels) != n:
        raise NotAGroup("label count does not match table size")

    ar = np.arange(n)
    for i in range(n):
        if len(np.unique(t[i])) != n:
            raise NotAGroup(f"row {i} is not a permutation", witness=("row", i))
        if len(np.unique(t[:, i])) != n:
            raise NotAGroup(f"column {i} is not a permutation", witness=("column", i))

    e = _identity_of(t)
    if e is None:
        raise NotAGroup("no two-sided identity", witness=("identity",))

    # associativity over all triples, one left factor at a time
    for a in range(n):
        left = t[t[a]]          # (ab)c  indexed [b, c]
        right = t[a][t]         # a(bc)  indexed [b, c]
        bad = np.argwhere(left != right)
        if len(bad):
            b, c = (int(v) for v in bad[0])
            raise NotAGroup(f"not associative at ({a}, {b}, {c})", witness=(a, b, c))

    if e != 0:
        perm = ar.copy()
        perm[0], perm[e] = e, 0          # new index -> old index
        old_to_new = np.argsort(perm)
        t = old_to_new[t[np.ix_(perm, perm)]]
        labels = [labels[int(i)] for i in perm]

    inv = np.argmax(t == 0, axis=1)
    return FiniteGroup(t, inv, tuple(labels), name=name)


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse cycle notation like ``(0 1 2)(3 4)`` into an image tuple."""
    perm = list(range(degree))
    text = text.strip()
    if text in ("", "()"):
        return tuple(perm)
    seen = set()
    for chunk in text.replace(")", ")\n").split("\n"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise ValueError(f"bad cycle {chunk!r}")
        pts = [int(p) for p in chunk[1:-1].replace(",", " ").split()]
        for p in pts:
            if not 0 <= p < degree or p in seen:
                raise ValueError(f"point {p} invalid or repeated in {text!r}")
            seen.add(p)
        for i, p in enumerate(pts):
            perm[p] = pts[(i + 1) % len(pts)]
    return tuple(perm)


def cycle_string(perm: Sequence[int]) -> str:
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        p = perm[start]
        while p != start:
            cyc.append(p)
            seen.add(p)
            p = perm[p]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def from_permutations(degree: int, gens: Sequence[Sequence[int]], *, cap: int | None = None,
                      name: str = "") -> FiniteGroup:
    """Close a set of permutations under composition and tabulate the result.

    Permutations are image tuples.  Products compose left to right:
    ``(x*y)(i) = y(x(i))``.  Elements are numbered in breadth-first order
    from the identity, so the numbering depends on the generator order.
    """
    cap = DEFAULT_CAP if cap is None else cap
    gens = [tuple(int(v) for v in g) for g in gens]
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise ValueError(f"{g} is not a permutation of {degree} points")
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    i = 0
    while i < len(elements):
        x = elements[i]
        for g in gens:
            y = tuple(g[x[k]] for k in range(degree))
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                if len(elements) ** 2 > cap:
                    raise SizeCap(f"closure exceeds cap {cap}")
        i += 1

    n = len(elements)
    perms = np.array(elements, dtype=np.int64).reshape(n, degree)
    radix = degree ** np.arange(degree, dtype=np.int64) if degree else np.zeros(0, dtype=np.int64)
    codes = perms @ radix if degree else np.zeros(n, dtype=np.int64)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        # row a: (a*y)(k) = y(a(k)) for every y
        prod = perms[:, perms[a]] if degree else np.zeros((n, 0), dtype=np.int64)
        c = prod @ radix if degree else np.zeros(n, dtype=np.int64)
        table[a] = order[np.searchsorted(sorted_codes, c)]
    inv = np.argmax(table == 0, axis=1)
    labels = tuple(cycle_string(p) for p in elements)
    return FiniteGroup(table, inv, labels, name=name)


def cyclic(n: int) -> FiniteGroup:
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, (-ar) % n,
                       tuple(str(i) for i in range(n)), name=f"Z/{n}")


def direct_product(*groups: FiniteGroup, cap: int | None = None) -> FiniteGroup:
    """Direct product; the first factor is the most significant digit."""
    sizes = [g.order for g in groups]
    n = int(np.prod(sizes)) if sizes else 1
    check_cap(n, cap, "direct product")
    digits = np.array(list(itertools.product(*[range(s) for s in sizes])), dtype=np.int64).reshape(n, len(groups))
    weights = np.array([int(np.prod(sizes[i + 1:])) for i in range(len(sizes))], dtype=np.int64)
    table = np.zeros((n, n), dtype=np.int64)
    inv = np.zeros(n, dtype=np.int64)
    for k, g in enumerate(groups):
        col = digits[:, k]
        table += g.mult[col[:, None], col[None, :]] * weights[k]
        inv += g.inv[col] * weights[k]
    labels = tuple("(" + ",".join(groups[k].label(int(d[k])) for k in range(len(groups))) + ")" for d in digits)
    name = " x ".join(g.name or f"G{g.order}" for g in groups)
    return FiniteGroup(table, inv, labels, name=name)


def symmetric(n: int) -> FiniteGroup:
    if n <= 1:
        return from_permutations(max(n, 0), [], name=f"S{n}")
    gens = [parse_cycles("(0 1)", n), tuple(list(range(1, n)) + [0])]
    return from_permutations(n, gens, name=f"S{n}")


def alternating(n: int) -> FiniteGroup:
    if n <= 2:
        return from_permutations(max(n, 0), [], name=f"A{n}")
    gens = [parse_cycles(f"(0 1 {k})", n) for k in range(2, n)]
    return from_permutations(n, gens, name=f"A{n}")


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n acting on the vertices of an n-gon."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return from_permutations(n, [rot, ref], name=f"D{n}")


def quaternion() -> FiniteGroup:
    """Q8 via its regular representation; the generators play the roles of i and j."""
    i = parse_cycles("(0 1 3 6)(2 5 7 4)", 8)
    j = parse_cycles("(0 2 3 7)(1 4 6 5)", 8)
    return from_permutations(8, [i, j], name="Q8")


def klein_four() -> FiniteGroup:
    return direct_product(cyclic(2), cyclic(2))


# ---------------------------------------------------------------------------
# subgroups


def _closure_mask(G: FiniteGroup, gens: Iterable[int]) -> np.ndarray:
    gens = np.array(sorted(set(int(g) for g in gens)), dtype=np.int64)
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    if len(gens) == 0:
        return mask
    frontier = np.array([0], dtype=np.int64)
    while len(frontier):
        new = np.unique(G.mult[frontier[:, None], gens[None, :]].ravel())
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return mask


def _handle(G: FiniteGroup, mask: np.ndarray, gens=()) -> SubgroupHandle:
    return SubgroupHandle(G, tuple(int(x) for x in np.flatnonzero(mask)), tuple(int(g) for g in gens))


def subgroup_generated(G: FiniteGroup, S: Iterable[int]) -> SubgroupHandle:
    S = [int(s) for s in S]
    for s in S:
        if not 0 <= s < G.order:
            raise IndexError(f"element {s} not in group of order {G.order}")
    gens = tuple(dict.fromkeys(s for s in S if s != 0))
    return _handle(G, _closure_mask(G, gens), gens)


def subgroup_from_elements(G: FiniteGroup, elements: Iterable[int]) -> SubgroupHandle:
    """Wrap a set that is already known to be a subgroup (checked)."""
    els = sorted(set(int(x) for x in elements))
    mask = np.zeros(G.order, dtype=bool)
    mask[els] = True
    arr = np.array(els, dtype=np.int64)
    if not mask[0] or not mask[G.mult[np.ix_(arr, arr)]].all():
        raise ValueError("element set is not a subgroup")
    return SubgroupHandle(G, tuple(els), ())


def intersection(H: SubgroupHandle, K: SubgroupHandle) -> SubgroupHandle:
    return _handle(H.parent, H.mask & K.mask)


def join(*subgroups: SubgroupHandle) -> SubgroupHandle:
    G = subgroups[0].parent
    gens = [g for H in subgroups for g in H.gens()]
    return subgroup_generated(G, gens)


def _conjugates_of_gens(G: FiniteGroup, gens: np.ndarray) -> np.ndarray:
    """Array [g, k] = g * gens[k] * g^-1 for every g in G."""
    g = np.arange(G.order)
    return G.mult[G.mult[g[:, None], gens[None, :]], G.inv[g][:, None]]


def is_normal(G: FiniteGroup, H: SubgroupHandle) -> bool:
    gens = np.array(H.gens(), dtype=np.int64)
    return bool(H.mask[_conjugates_of_gens(G, gens)].all())


def normalizer(G: FiniteGroup, H: SubgroupHandle) -> SubgroupHandle:
    gens = np.array(H.gens(), dtype=np.int64)
    ok = H.mask[_conjugates_of_gens(G, gens)].all(axis=1)
    return _handle(G, ok)


def centralizer(G: FiniteGroup, X: Iterable[int]) -> SubgroupHandle:
    X = np.array(sorted(set(int(x) for x in X)), dtype=np.int64)
    if len(X) == 0:
        return G.whole()
    ok = (G.mult[:, X] == G.mult[X, :].T).all(axis=1)
    return _handle(G, ok)


def conjugate(G: FiniteGroup, H: SubgroupHandle, g: int) -> SubgroupHandle:
    """g H g^-1"""
    els = G.mult[G.mult[g, H.array], G.inv[g]]
    gens = tuple(G.conj(g, h) for h in H.generators)
    return SubgroupHandle(G, tuple(sorted(int(x) for x in els)), gens)


def normal_core(G: FiniteGroup, C: SubgroupHandle) -> SubgroupHandle:
    """Intersection of all conjugates g C g^-1."""
    conj = G.mult[G.mult[np.arange(G.order)[:, None], C.array[None, :]], G.inv[:, None]]
    count = np.bincount(conj.ravel(), minlength=G.order)
    # x lies in every conjugate iff it appears once per g
    return _handle(G, count == G.order)


def normal_closure(G: FiniteGroup, S: Iterable[int]) -> SubgroupHandle:
    S = np.array(sorted(set(int(s) for s in S)), dtype=np.int64)
    if len(S) == 0:
        return G.trivial()
    conj = np.unique(_conjugates_of_gens(G, S).ravel())
    return subgroup_generated(G, conj.tolist())


def conjugate_subgroups(G: FiniteGroup, H: SubgroupHandle) -> list[SubgroupHandle]:
    """All distinct conjugates of H, in order of the first conjugating element; H comes first."""
    seen: dict[tuple[int, ...], SubgroupHandle] = {}
    N = normalizer(G, H)
    covered = np.zeros(G.order, dtype=bool)
    for g in range(G.order):
        if covered[g]:
            continue
        K = conjugate(G, H, g)
        seen.setdefault(K.elements, K)
        # every element of the coset g N gives the same conjugate
        covered[G.mult[g, N.array]] = True
    return list(seen.values())


def commutator_subgroup(G: FiniteGroup) -> SubgroupHandle:
    x = np.arange(G.order)
    comm = G.mult[G.mult[G.inv[x][:, None], G.inv[x][None, :]], G.mult[x[:, None], x[None, :]]]
    return subgroup_generated(G, np.unique(comm).tolist())


def is_metabelian(G: FiniteGroup) -> bool:
    D, _ = subgroup_as_group(commutator_subgroup(G))
    return D.is_abelian


@dataclass
class DirectProductCheck:
    ok: bool
    failures: list[tuple[str, str]] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def internal_direct_product_check(G: FiniteGroup, parts: Sequence[SubgroupHandle]) -> DirectProductCheck:
    """Decide whether the subgroup generated by ``parts`` is their internal direct product.

    All three conditions are evaluated so the witness names every failure:
    ``normal`` (each part normal in the join), ``intersection`` (each part
    meets the join of the others trivially) and ``order`` (the join has order
    equal to the product of the part orders).
    """
    if not parts:
        raise ValueError("need at least one part")
    J = join(*parts)
    res = DirectProductCheck(True)
    for k, P in enumerate(parts):
        gens = np.array(P.gens(), dtype=np.int64)
        conj = J.array[:, None]
        c = G.mult[G.mult[conj, gens[None, :]], G.inv[conj]]
        if not P.mask[c].all():
            res.failures.append(("normal", f"part {k} is not normal in the subgroup they generate"))
    for k, P in enumerate(parts):
        others = [Q for j, Q in enumerate(parts) if j != k]
        if not others:
            continue
        meet = intersection(P, join(*others))
        if not meet.is_trivial:
            res.failures.append(("intersection", f"part {k} meets the others in {meet.order} elements"))
    prod = int(np.prod([P.order for P in parts]))
    if prod != J.order:
        res.failures.append(("order", f"generated subgroup has order {J.order}, product of orders is {prod}"))
    res.ok = not res.failures
    return res


def subgroup_as_group(H: SubgroupHandle, name: str = "") -> tuple[FiniteGroup, GroupMap]:
    """H as a group in its own right, with the inclusion map into the parent.

    Local index i corresponds to ``H.elements[i]``; local 0 is the identity.
    """
    G = H.parent
    lookup = np.full(G.order, -1, dtype=np.int64)
    lookup[H.array] = np.arange(H.order)
    table = lookup[G.mult[np.ix_(H.array, H.array)]]
    inv = lookup[G.inv[H.array]]
    labels = tuple(G.label(int(x)) for x in H.elements)
    sub = FiniteGroup(table, inv, labels, name=name)
    incl = GroupMap(sub, G, H.array.copy(), True, True, "restriction of the parent table")
    return sub, incl


def local_index(H: SubgroupHandle) -> np.ndarray:
    """Array mapping parent indices to positions in ``H.elements`` (-1 outside H)."""
    lookup = np.full(H.parent.order, -1, dtype=np.int64)
    lookup[H.array] = np.arange(H.order)
    return lookup


def quotient_with_projection(G: FiniteGroup, N: SubgroupHandle, name: str = "") -> tuple[FiniteGroup, GroupMap]:
    """G/N on minimal coset representatives, with the verified projection."""
    if not is_normal(G, N):
        raise NotNormal("subgroup is not normal")
    proj = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in range(G.order):
        if proj[g] >= 0:
            continue
        proj[G.mult[g, N.array]] = len(reps)
        reps.append(g)
    reps = np.array(reps, dtype=np.int64)
    table = proj[G.mult[np.ix_(reps, reps)]]
    inv = proj[G.inv[reps]]
    labels = tuple(G.label(int(r)) for r in reps)
    Q = FiniteGroup(table, inv, labels, name=name)
    pi = GroupMap.checked(G, Q, proj)
    return Q, pi


def transversal(G: FiniteGroup, N: SubgroupHandle, pi: GroupMap) -> Transversal:
    """Minimal-index representative of each coset; identity goes to identity."""
    Q = pi.codomain
    section = [-1] * Q.order
    for g in range(G.order - 1, -1, -1):
        section[int(pi.image[g])] = g
    section[0] = 0
    return Transversal(G, Q, tuple(section))


def normal_subgroups(G: FiniteGroup) -> list[SubgroupHandle]:
    """Every normal subgroup, by joining normal closures of cyclic subgroups.

    Sorted by order, then by element list.
    """
    found: dict[tuple[int, ...], SubgroupHandle] = {}
    base = []
    for x in range(G.order):
        N = normal_closure(G, [x])
        if N.elements not in found:
            found[N.elements] = N
            base.append(N)
    frontier = list(base)
    while frontier:
        nxt = []
        for N in frontier:
            for M in base:
                if M <= N:
                    continue
                J = join(N, M)
                if J.elements not in found:
                    found[J.elements] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.elements))


def all_subgroups(G: FiniteGroup) -> list[SubgroupHandle]:
    """Every subgroup of a small group, by joining cyclic subgroups."""
    found: dict[tuple[int, ...], SubgroupHandle] = {}
    cyclic_subs = []
    for x in range(G.order):
        H = subgroup_generated(G, [x])
        if H.elements not in found:
            found[H.elements] = H
            cyclic_subs.append(H)
    frontier = list(cyclic_subs)
    while frontier:
        nxt = []
        for H in frontier:
            for K in cyclic_subs:
                if K <= H:
                    continue
                J = join(H, K)
                if J.elements not in found:
                    found[J.elements] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.elements))


# ---------------------------------------------------------------------------
# maps


def verify_homomorphism(domain: FiniteGroup, codomain: FiniteGroup, image) -> tuple[bool, tuple[int, int] | None]:
    """Check image[xy] == image[x] image[y] on every pair; return a failing pair if any."""
    image = np.asarray(image, dtype=np.int64)
    for x in range(domain.order):
        lhs = image[domain.mult[x]]
        rhs = codomain.mult[image[x], image]
        bad = np.flatnonzero(lhs != rhs)
        if len(bad):
            return False, (x, int(bad[0]))
    return True, None


def identity_map(G: FiniteGroup) -> GroupMap:
    return GroupMap(G, G, np.arange(G.order), True, True, "identity")


def minimal_generators(G: FiniteGroup) -> list[int]:
    """A short generating set, picking elements of largest order first."""
    order = sorted(range(G.order), key=lambda x: (-int(G.element_orders[x]), x))
    gens: list[int] = []
    mask = _closure_mask(G, [])
    for x in order:
        if mask.all():
            break
        if not mask[x]:
            gens.append(x)
            mask = _closure_mask(G, gens)
    return gens


def _words(G: FiniteGroup, gens: Sequence[int]):
    """BFS spanning tree: for each element, (parent element, generator position)."""
    parent = np.full(G.order, -1, dtype=np.int64)
    via = np.full(G.order, -1, dtype=np.int64)
    parent[0] = 0
    order = [0]
    i = 0
    while i < len(order):
        x = order[i]
        for k, g in enumerate(gens):
            y = int(G.mult[x, g])
            if parent[y] < 0:
                parent[y] = x
                via[y] = k
                order.append(y)
        i += 1
    return order, parent, via


def find_isomorphism(G: FiniteGroup, H: FiniteGroup) -> GroupMap | None:
    """Brute-force isomorphism search by backtracking over generator images."""
    if G.order != H.order:
        return None
    if sorted(G.element_orders.tolist()) != sorted(H.element_orders.tolist()):
        return None
    if G.is_abelian != H.is_abelian:
        return None
    gens = minimal_generators(G)
    order, parent, via = _words(G, gens)
    candidates = [[h for h in range(H.order) if H.element_orders[h] == G.element_orders[g]] for g in gens]
    for choice in itertools.product(*candidates):
        image = np.zeros(G.order, dtype=np.int64)
        for x in order[1:]:
            image[x] = H.mult[image[parent[x]], choice[via[x]]]
        if len(np.unique(image)) != G.order:
            continue
        ok, _ = verify_homomorphism(G, H, image)
        if ok:
            return GroupMap(G, H, image, True, True, "brute-force generator search, verified on all pairs")
    return None


# ---------------------------------------------------------------------------
# group files


def parse_group_text(text: str, *, cap: int | None = None, name: str = "") -> FiniteGroup:
    """Parse the ``table n`` / ``perm n`` text format (with optional ``label i name`` lines)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise NotAGroup("empty group file")
    head = lines[0].split()
    if len(head) != 2 or head[0] not in ("table", "perm"):
        raise NotAGroup(f"bad header {lines[0]!r}")
    n = int(head[1])
    body = [ln for ln in lines[1:] if not ln.startswith("label ")]
    label_lines = [ln for ln in lines[1:] if ln.startswith("label ")]
    if head[0] == "table":
        if len(body) != n:
            raise NotAGroup(f"expected {n} table rows, found {len(body)}")
        rows = [[int(v) for v in ln.split()] for ln in body]
        if any(len(r) != n for r in rows):
            raise NotAGroup("table rows must have n entries")
        labels = [str(i) for i in range(n)]
        for ln in label_lines:
            _, i, lab = ln.split(None, 2)
            labels[int(i)] = lab
        check_cap(n, cap)
        return from_multiplication_table(rows, labels, name=name)
    gens = [parse_cycles(ln, n) for ln in body]
    G = from_permutations(n, gens, cap=cap, name=name)
    if label_lines:
        labels = list(G.labels)
        for ln in label_lines:
            _, i, lab = ln.split(None, 2)
            labels[int(i)] = lab
        G = FiniteGroup(G.mult, G.inv, tuple(labels), name=name)
    return G


def format_group_table(G: FiniteGroup, *, with_labels: bool = True) -> str:
    out = [f"table {G.order}"]
    out.extend(" ".join(str(int(v)) for v in row) for row in G.mult)
    if with_labels and G.labels is not None:
        out.extend(f"label {i} {lab}" for i, lab in enumerate(G.labels))
    return "\n".join(out) + "\n"


def _norm_label(s: str) -> str:
    s = re.sub(r"\s+", " ", s.replace(",", " "))
    return re.sub(r"\s*([()])\s*", r"\1", s).strip()


def parse_elements(G: FiniteGroup, spec: str) -> list[int]:
    """Resolve a comma-separated element list by label, falling back to index.

    Commas inside parentheses belong to cycle labels, so ``(0,1),(1,2)`` and
    ``(0 1),(1 2)`` both name two elements.
    """
    tokens, depth, cur = [], 0, ""
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            tokens.append(cur)
            cur = ""
        else:
            cur += ch
    tokens.append(cur)
    by_label = {}
    if G.labels is not None:
        for i, lab in enumerate(G.labels):
            by_label.setdefault(_norm_label(lab), i)
    out = []
    for tok in tokens:
        tok = tok.strip()
        if not tok:
            continue
        key = _norm_label(tok)
        if key in by_label:
            out.append(by_label[key])
        elif tok.lstrip("-").isdigit() and 0 <= int(tok) < G.order:
            out.append(int(tok))
        else:
            raise ValueError(f"unknown element {tok!r}")
    return out
