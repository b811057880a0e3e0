import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kkwreath.errors import MixedParents, NotTransversal, SizeCap
from kkwreath.groups import (
    GroupMap,
    cyclic,
    dihedral,
    direct_product,
    find_isomorphism,
    identity_map,
    is_normal,
    klein_four,
    quotient_with_projection,
    subgroup_generated,
    symmetric,
)
from kkwreath.wreath import (
    WreathGroup,
    base_embed,
    index_blowup_iso,
    lift_hom,
    top_embed,
    wr_multiply,
    wr_shift,
)


def action_perm(W, e):
    """Permutation of A x B induced by b*f acting on the right: (a, x) -> (a f(xb), xb)."""
    A, B = W.bottom, W.top
    out = []
    for a in range(A.order):
        for x in range(B.order):
            xb = B.op(x, e.top)
            out.append(A.op(a, e.base[xb]) * B.order + xb)
    return tuple(out)


def compose(p, q):
    """p then q"""
    return tuple(q[i] for i in p)


SMALL = [(cyclic(2), cyclic(2)), (cyclic(2), cyclic(3)), (cyclic(3), cyclic(2)), (symmetric(3), cyclic(2)),
         (cyclic(2), symmetric(3))]


@pytest.mark.parametrize("A,B", SMALL)
def test_product_matches_permutation_action(A, B):
    W = WreathGroup(A, B)
    elems = [W.element_from_code(c) for c in range(W.order)]
    perms = [action_perm(W, e) for e in elems]
    assert len(set(perms)) == W.order           # the action is faithful
    for u, pu in zip(elems, perms):
        for v, pv in zip(elems[:: max(1, W.order // 40)], perms[:: max(1, W.order // 40)]):
            assert action_perm(W, u * v) == compose(pu, pv)


def test_shift_examples():
    B = cyclic(3)
    f = (1, 0, 0)
    assert wr_shift(B, 0, f) == f
    assert wr_shift(B, 1, f) == (0, 1, 0)
    for b in range(3):
        assert wr_shift(B, B.inv[b], wr_shift(B, b, f)) == f


@pytest.mark.parametrize("B", [cyclic(3), symmetric(3)])
def test_shift_is_an_action(B):
    rng = np.random.default_rng(1)
    for _ in range(20):
        f = tuple(rng.integers(0, 5, B.order).tolist())
        assert wr_shift(B, 0, f) == f
        for b1, b2 in itertools.product(range(B.order), repeat=2):
            # shift(b2) after shift(b1) equals shift(b1 b2)
            assert wr_shift(B, b2, wr_shift(B, b1, f)) == wr_shift(B, B.op(b1, b2), f)


def test_multiply_examples():
    W = WreathGroup(cyclic(2), cyclic(2))
    assert wr_multiply(W.identity(), W.element(1, (1, 0))) == W.element(1, (1, 0))
    u = W.element(1, (0, 0))
    v = W.element(0, (1, 0))
    # (1, f) stands for b*f, so u*v keeps the support of f; moving f past b shifts it
    assert u * v == W.element(1, (1, 0))
    assert v * u == W.element(1, (0, 1))


def test_z2_wr_z2_is_dihedral():
    G = WreathGroup(cyclic(2), cyclic(2)).materialize()
    assert G.order == 8 and not G.is_abelian
    assert find_isomorphism(G, dihedral(4)) is not None


def test_orders():
    assert WreathGroup(cyclic(2), cyclic(3)).materialize().order == 24
    assert WreathGroup(cyclic(3), cyclic(2)).materialize().order == 18
    trivial = cyclic(1)
    G = WreathGroup(trivial, symmetric(3)).materialize()
    assert find_isomorphism(G, symmetric(3)) is not None


def test_mixed_parents():
    W1 = WreathGroup(cyclic(2), cyclic(2))
    W2 = WreathGroup(cyclic(2), cyclic(2))
    with pytest.raises(MixedParents):
        W1.identity() * W2.identity()


def test_size_cap_on_materialize():
    W = WreathGroup(cyclic(2), cyclic(15))
    assert not W.feasible and W.materialized is None
    with pytest.raises(SizeCap):
        W.materialize()


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_group_axioms_on_random_elements(data):
    W = WreathGroup(symmetric(3), cyclic(3))
    code = st.integers(0, W.order - 1)
    u, v, w = (W.element_from_code(data.draw(code)) for _ in range(3))
    assert (u * v) * w == u * (v * w)
    assert u * u.inverse() == W.identity() == u.inverse() * u
    assert W.identity() * u == u


def test_base_normal_top_complement():
    W = WreathGroup(cyclic(2), cyclic(3))
    G = W.materialize()
    F, T = W.base_subgroup(), W.top_subgroup()
    assert is_normal(G, F)
    assert set(F.elements) & set(T.elements) == {0}
    assert F.order * T.order == G.order


def test_embeddings_and_conjugated_coordinates():
    W = WreathGroup(cyclic(2), cyclic(3))
    assert top_embed(W, 0) == W.identity()
    e = base_embed(W, 1, 2)
    assert e.top == 0 and e.support() == (2,)
    B = W.top
    for b in range(B.order):
        t = top_embed(W, b)
        conj = t * e * t.inverse()
        h = base_embed(W, 1, 0)                    # generator of H(1)
        c = t * h * t.inverse()
        assert c.top == 0 and c.support() == (B.inv[b],)
        assert conj.top == 0


def test_lift_hom_mod_two():
    Z4 = cyclic(4)
    Z2, pi = quotient_with_projection(Z4, subgroup_generated(Z4, [2]))
    W = WreathGroup(Z4, cyclic(2))
    L = lift_hom(pi, W)
    assert L.domain.order == 32 and L.codomain.order == 8
    assert L.verified_hom and L.is_surjective
    ker = L.kernel()
    tops, bases = W.decode(np.array(ker.elements))
    # kernel = functions valued in ker(pi) = {0, 2}
    assert (tops == 0).all() and np.isin(bases, [0, 2]).all() and ker.order == 4


def test_lift_identity_and_trivial():
    Z3 = cyclic(3)
    W = WreathGroup(Z3, cyclic(2))
    L = lift_hom(identity_map(Z3), W)
    assert (L.image == np.arange(W.order)).all()
    one = cyclic(1)
    trivial = GroupMap.checked(Z3, one, np.zeros(3, dtype=np.int64))
    L = lift_hom(trivial, W)
    assert L.image_subgroup().order == 2


def test_blowup_z4():
    Z2, Z4 = cyclic(2), cyclic(4)
    B = subgroup_generated(Z4, [2])
    res = index_blowup_iso(Z2, Z4, B, (0, 1))
    assert res.map.domain.order == 32 and res.map.codomain.order == 32
    assert res.map.verified_hom and res.map.is_bijective


def test_blowup_klein():
    V = klein_four()
    B = subgroup_generated(V, [1])
    res = index_blowup_iso(cyclic(2), V, B)
    assert res.map.verified_hom and res.map.is_bijective
    assert res.map.domain.order == 2 ** 4 * 2


def test_blowup_index_one_is_identity():
    Z3 = cyclic(3)
    res = index_blowup_iso(cyclic(2), Z3, Z3.whole())
    assert res.map.is_bijective
    assert (res.map.image == np.arange(res.map.domain.order)).all()


def test_blowup_bad_transversal():
    Z4 = cyclic(4)
    with pytest.raises(NotTransversal):
        index_blowup_iso(cyclic(2), Z4, subgroup_generated(Z4, [2]), (0, 2))


def test_blowup_non_cyclic_bottom():
    Z2x2 = direct_product(cyclic(2), cyclic(2))
    Z4 = cyclic(4)
    res = index_blowup_iso(cyclic(2), Z4, subgroup_generated(Z4, [2]), (0, 3))
    assert res.map.is_bijective and res.map.verified_hom
    assert res.codomain_wreath.bottom.order == Z2x2.order
