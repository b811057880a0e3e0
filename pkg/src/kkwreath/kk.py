"""Kaluzhnin-Krasner embeddings of a finite group into wreath products.

Given ``G`` with normal subgroup ``A`` (quotient ``B = G/A``, projection
``pi``, section ``s``) the full embedding sends ``g`` to ``(pi(g), f_g)``
with

    f_g(x) = (x pi(g)^-1)^s * g * (x^s)^-1,   x in B,

a function ``B -> A``.  The reduced embedding further pushes the values
into ``A/C`` for a subgroup ``C`` normal in ``A`` that contains no
nontrivial normal subgroup of ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CoreNotTrivial, HypothesisFailed, NotNormal, NotTransversal
from .groups import (
    DirectProductCheck,
    FiniteGroup,
    GroupMap,
    SubgroupHandle,
    Transversal,
    conjugate_subgroups,
    internal_direct_product_check,
    is_normal,
    join,
    local_index,
    normal_core,
    normalizer,
    quotient_with_projection,
    subgroup_as_group,
    transversal,
)
from .wreath import WreathGroup, WreathMap


@dataclass(frozen=True, eq=False)
class KKContext:
    G: FiniteGroup
    A: SubgroupHandle
    C: SubgroupHandle
    pi: GroupMap
    s: Transversal
    A_group: FiniteGroup
    A_local: np.ndarray          # parent index -> index in A_group
    Abar: FiniteGroup
    abar_proj: GroupMap          # A_group -> Abar

    @property
    def B(self) -> FiniteGroup:
        return self.pi.codomain


def make_context(G: FiniteGroup, A: SubgroupHandle, C: SubgroupHandle | None = None,
                 section: Sequence[int] | None = None) -> KKContext:
    """Validate the series ``G > A > C`` and fix the projection and section.

    ``section`` overrides the default minimal-index transversal; it must
    send the identity coset to the identity.
    """
    if not is_normal(G, A):
        raise NotNormal("A is not normal in G")
    if C is None:
        C = G.trivial()
    if not C <= A:
        raise ValueError("C must be contained in A")
    A_group, _ = subgroup_as_group(A, name="A")
    lookup = local_index(A)
    C_local = SubgroupHandle(A_group, tuple(sorted(int(lookup[c]) for c in C.elements)),
                             tuple(int(lookup[c]) for c in C.generators))
    if not is_normal(A_group, C_local):
        raise NotNormal("C is not normal in A")
    core = normal_core(G, C)
    if not core.is_trivial:
        raise CoreNotTrivial(f"C contains a normal subgroup of G of order {core.order}", witness=core)

    B, pi = quotient_with_projection(G, A, name="G/A")
    if section is None:
        s = transversal(G, A, pi)
    else:
        section = tuple(int(x) for x in section)
        if len(section) != B.order or section[0] != 0:
            raise NotTransversal("section must have one entry per coset and fix the identity")
        if any(int(pi.image[section[b]]) != b for b in range(B.order)):
            raise NotTransversal("section does not pick one element of each coset")
        s = Transversal(G, B, section)
    Abar, proj = quotient_with_projection(A_group, C_local, name="A/C" if C.order > 1 else "A")
    return KKContext(G, A, C, pi, s, A_group, lookup, Abar, proj)


def cocycle_values(ctx: KKContext) -> np.ndarray:
    """``vals[g, x] = (x pi(g)^-1)^s g (x^s)^-1`` as elements of G (all lie in A)."""
    G, B = ctx.G, ctx.B
    g = np.arange(G.order)
    x = np.arange(B.order)
    sec = ctx.s.array
    pg_inv = B.inv[ctx.pi.image]
    left = sec[B.mult[x[None, :], pg_inv[:, None]]]          # (|G|, |B|)
    return G.mult[G.mult[left, g[:, None]], G.inv[sec][None, :]]


def kk_full(ctx: KKContext) -> WreathMap:
    """The embedding ``G -> A Wr B``, verified on all pairs."""
    vals = cocycle_values(ctx)
    bases = ctx.A_local[vals]
    if (bases < 0).any():
        raise AssertionError("cocycle value outside A")
    W = WreathGroup(ctx.A_group, ctx.B)
    return WreathMap.checked(ctx.G, W, ctx.pi.image, bases)


def kk_reduced(ctx: KKContext) -> WreathMap:
    """The embedding ``G -> (A/C) Wr B`` computed straight from the coset formula."""
    vals = cocycle_values(ctx)
    bases = ctx.abar_proj.image[ctx.A_local[vals]]
    W = WreathGroup(ctx.Abar, ctx.B)
    return WreathMap.checked(ctx.G, W, ctx.pi.image, bases)


@dataclass
class Prop1Report:
    injective: bool
    a_in_base: bool
    product_order: int
    wreath_order: int
    method: str
    witnesses: dict = field(default_factory=dict)

    @property
    def product_is_whole(self) -> bool:
        return self.product_order == self.wreath_order

    @property
    def ok(self) -> bool:
        return self.injective and self.a_in_base and self.product_is_whole

    def assertions(self) -> list[tuple[str, bool, str]]:
        return [
            ("kappa_injective", self.injective, self.witnesses.get("kernel", "")),
            ("kappa_A_in_base", self.a_in_base, self.witnesses.get("a_in_base", "")),
            ("kappaG_times_base_is_whole", self.product_is_whole,
             f"|kappa(G)F| = {self.product_order}, |Abar Wr B| = {self.wreath_order} ({self.method})"),
        ]


def verify_prop1(ctx: KKContext, kappa: WreathMap) -> Prop1Report:
    """Check injectivity, kappa(A) inside the base group, and kappa(G)*base = whole product.

    The set product is enumerated in the materialized target when it fits
    the cap; otherwise it is counted from the distinct tops, which is exact
    because the base group is normal and acts simply transitively on each
    coset.
    """
    W = kappa.target
    witnesses = {}
    ker = kappa.kernel()
    injective = kappa.verified_hom and len(ker) == 1
    if not injective:
        witnesses["kernel"] = f"kernel elements {list(ker)[:8]}"
    a_tops = kappa.tops[ctx.A.array]
    a_in_base = bool((a_tops == 0).all())
    if not a_in_base:
        bad = int(ctx.A.array[np.flatnonzero(a_tops != 0)[0]])
        witnesses["a_in_base"] = f"element {bad} of A has nontrivial top"
    if W.feasible:
        T = W.materialize()
        K = np.unique(kappa.codes())
        F = np.arange(W.base_size)
        prod = np.unique(T.mult[K[:, None], F[None, :]])
        count, method = len(prod), "enumerated in the materialized product"
    else:
        count = len(np.unique(kappa.tops)) * W.base_size
        method = "counted by cosets of the base group"
    return Prop1Report(injective, a_in_base, int(count), W.order, method, witnesses)


# ---------------------------------------------------------------------------
# splitting of extensions with a direct product of conjugates as kernel


@dataclass
class Theorem1Report:
    H: SubgroupHandle
    conjugates: list[SubgroupHandle]
    A: SubgroupHandle
    normal: bool
    direct: DirectProductCheck
    normalizer: SubgroupHandle
    n: int

    @property
    def normalizer_is_A(self) -> bool:
        return self.normalizer == self.A

    @property
    def failed(self) -> list[str]:
        out = []
        if not self.normal:
            out.append("normal")
        if not self.direct.ok:
            out.append("direct_product")
        if not self.normalizer_is_A:
            out.append("normalizer")
        return out

    @property
    def ok(self) -> bool:
        return not self.failed

    def assertions(self) -> list[tuple[str, bool, str]]:
        direct_detail = "; ".join(f"{k}: {v}" for k, v in self.direct.failures)
        return [
            ("A_normal", self.normal, f"|A| = {self.A.order}"),
            ("A_direct_product_of_conjugates", self.direct.ok,
             direct_detail or f"{len(self.conjugates)} conjugates"),
            ("normalizer_equals_A", self.normalizer_is_A,
             f"|N_G(H)| = {self.normalizer.order}, |A| = {self.A.order}"),
            ("index_equals_conjugate_count", self.n == len(self.conjugates),
             f"|G/A| = {self.n}, conjugates = {len(self.conjugates)}"),
        ]


def theorem1_check(G: FiniteGroup, H: SubgroupHandle) -> Theorem1Report:
    conj = conjugate_subgroups(G, H)
    A = join(*conj)
    return Theorem1Report(
        H=H,
        conjugates=conj,
        A=A,
        normal=is_normal(G, A),
        direct=internal_direct_product_check(G, conj),
        normalizer=normalizer(G, H),
        n=G.order // A.order,
    )


@dataclass
class Theorem1Split:
    map: GroupMap                # G -> materialized H Wr B
    kappa: WreathMap             # G -> (A/C) Wr B
    context: KKContext
    report: Theorem1Report
    kappa_A_is_base: bool
    H_in_H1: bool

    def assertions(self) -> list[tuple[str, bool, str]]:
        return self.report.assertions() + [
            ("kappa_A_equals_base", self.kappa_A_is_base, ""),
            ("H_lands_in_H1", self.H_in_H1, "values supported at the identity of B"),
            ("split_is_bijective_hom", self.map.verified_hom and self.map.is_bijective,
             self.map.evidence),
        ]


def theorem1_split(G: FiniteGroup, H: SubgroupHandle) -> Theorem1Split:
    """Build ``G ≅ H Wr B`` from the reduced embedding with ``C`` the product of the other conjugates.

    A trivial ``H`` is accepted as the degenerate case ``G ≅ 1 Wr G`` even
    though the normalizer condition fails there.
    """
    report = theorem1_check(G, H)
    if not report.ok and not H.is_trivial:
        raise HypothesisFailed("hypotheses fail: " + ", ".join(report.failed), report.failed)
    others = report.conjugates[1:]
    C = join(*others) if others else G.trivial()
    ctx = make_context(G, report.A, C)
    kappa = kk_reduced(ctx)

    # A/C -> H: invert the bijection h -> hC
    H_group, _ = subgroup_as_group(H, name="H")
    to_abar = ctx.abar_proj.image[ctx.A_local[H.array]]
    if len(np.unique(to_abar)) != ctx.Abar.order or len(to_abar) != ctx.Abar.order:
        raise AssertionError("H does not map bijectively onto A/C")
    back = np.empty(ctx.Abar.order, dtype=np.int64)
    back[to_abar] = np.arange(H.order)

    target = WreathGroup(H_group, ctx.B)
    iso = WreathMap.checked(G, target, kappa.tops, back[kappa.bases])
    gm = iso.to_group_map()

    a_rows = kappa.bases[report.A.array]
    kappa_A_is_base = bool((kappa.tops[report.A.array] == 0).all()) and \
        len(np.unique(a_rows, axis=0)) == ctx.Abar.order ** ctx.B.order
    h_rows = kappa.bases[H.array]
    H_in_H1 = bool((kappa.tops[H.array] == 0).all() and (h_rows[:, 1:] == 0).all())
    return Theorem1Split(gm, kappa, ctx, report, kappa_A_is_base, H_in_H1)
