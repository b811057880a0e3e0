import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from kkwreath import fpmod
from kkwreath.errors import SizeCap
from kkwreath.groups import alternating, find_isomorphism, is_normal

X = sympy.symbols("x")


def sympy_factors(p, q):
    """Monic irreducible factors of 1 + x + ... + x^(q-1) over F_p, constant term first."""
    poly = sympy.Poly(sum(X ** k for k in range(q)), X, modulus=p)
    out = []
    for f, _ in poly.factor_list()[1]:
        coeffs = [int(c) % p for c in reversed(f.all_coeffs())]
        lead = pow(coeffs[-1], -1, p)
        out.append(tuple((c * lead) % p for c in coeffs))
    return out


PAIRS = [(2, 3), (2, 5), (2, 7), (3, 2), (3, 5), (5, 2), (5, 3), (2, 11), (3, 7)]


@pytest.mark.parametrize("p,q", PAIRS)
def test_factor_choice_matches_sympy(p, q):
    d = fpmod.multiplicative_order(p, q)
    facs = sympy_factors(p, q)
    assert all(len(f) - 1 == d for f in facs)
    expect = min(facs, key=lambda f: tuple(reversed(f[:-1])))
    assert fpmod.irreducible_factor(p, q) == expect


@pytest.mark.parametrize("p,q", PAIRS)
def test_block_invariants(p, q):
    M = fpmod.irreducible_action(p, q)
    assert M.dim == fpmod.multiplicative_order(p, q)
    assert M.multiplicative_order() == q
    f = fpmod.irreducible_factor(p, q)
    assert fpmod.is_irreducible(f, p)
    # no nonzero fixed vector
    dec = fpmod.module_decomp(p, [q])
    fixed = ((dec.vectors @ M.data) % p == dec.vectors).all(axis=1)
    assert fixed.sum() == 1


def test_action_examples():
    assert fpmod.irreducible_action(2, 3).rows() == [[0, 1], [1, 1]]
    assert fpmod.irreducible_action(2, 5).dim == 4
    assert fpmod.irreducible_action(3, 2).rows() == [[2]]


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(0, 4), min_size=2, max_size=5))
def test_irreducibility_matches_sympy(p, coeffs):
    f = tuple(c % p for c in coeffs[:-1]) + (1,)
    expr = sum(c * X ** k for k, c in enumerate(f))
    assert fpmod.is_irreducible(f, p) == sympy.Poly(expr, X, modulus=p).is_irreducible


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2), max_size=6), st.lists(st.integers(0, 2), min_size=1, max_size=4))
def test_poly_division(a, b):
    p = 3
    b = fpmod._trim(list(b))
    if not b:
        return
    a, b = tuple(fpmod._trim(list(a))), tuple(b)
    q, r = fpmod.poly_divmod(a, b, p)
    back = fpmod.poly_mul(q, b, p)
    n = max(len(back), len(r))
    total = tuple(fpmod._trim([((back[i] if i < len(back) else 0) + (r[i] if i < len(r) else 0)) % p
                               for i in range(n)]))
    assert total == a and len(r) < len(b)


def test_truncations():
    T = fpmod.build_truncated_G(2, [])
    assert T.order == 1 and T.realized.order == 1
    T = fpmod.build_truncated_G(2, [3])
    assert T.order == 12
    assert find_isomorphism(T.realized, alternating(4)) is not None
    assert fpmod.build_truncated_G(2, [3, 5], realize=False).order == 960


def test_truncation_structure():
    T = fpmod.build_truncated_G(2, [3, 5])
    G = T.realized
    V = T.base()
    assert is_normal(G, V)
    sub_table = G.mult[np.ix_(V.array, V.array)]
    assert (sub_table == sub_table.T).all()
    # quotient cyclic of order n generated by b
    b = T.b()
    assert G.element_orders[b] == 15


def test_group_law_matches_table():
    T = fpmod.build_truncated_G(3, [2])
    G = T.realized
    x = np.arange(G.order)
    assert (T.multiply(x[:, None], x[None, :]) == G.mult).all()
    assert T.order == 6


def test_size_cap():
    T = fpmod.build_truncated_G(2, [3, 5, 7], realize=False)
    with pytest.raises(SizeCap):
        T.realized


def test_bad_primes():
    with pytest.raises(ValueError):
        fpmod.build_truncated_G(2, [2])
    with pytest.raises(ValueError):
        fpmod.build_truncated_G(4, [3])


def test_hyperplane_examples():
    dec = fpmod.module_decomp(3, [2])
    h = fpmod.hyperplane_C(dec)
    assert h.codes == (0,) and h.ok

    dec = fpmod.module_decomp(2, [3])
    h = fpmod.hyperplane_C(dec)
    assert [dec.vectors[c].tolist() for c in h.codes] == [[0, 0], [1, 1]]
    assert h.blocks_outside == {3: True} and h.ok

    dec = fpmod.module_decomp(2, [3, 5])
    h = fpmod.hyperplane_C(dec)
    assert h.dim == 5 and h.index == 2
    assert h.submodules_checked == 4 and not h.submodules_inside and h.ok


def test_submodules_are_block_sums():
    dec = fpmod.module_decomp(2, [3, 5])
    subs = set(fpmod.submodules(dec))
    expect = {frozenset(dec.block_codes(T).tolist()) for r in range(3) for T in itertools.combinations([3, 5], r)}
    assert subs == expect


def test_submodules_brute_force_small():
    # every subspace of F_2^2 invariant under the order-3 action
    dec = fpmod.module_decomp(2, [3])
    M = dec.action.data
    found = []
    for mask in range(1, 2 ** dec.size):
        S = [c for c in range(dec.size) if mask >> c & 1]
        if 0 not in S:
            continue
        vecs = dec.vectors[S]
        closed = all(dec.encode((u + v) % 2) in S for u in vecs for v in vecs)
        inv = all(dec.encode((v @ M) % 2) in S for v in vecs)
        if closed and inv:
            found.append(frozenset(S))
    assert set(found) == set(fpmod.submodules(dec))


@pytest.mark.parametrize("p,S,target", [(2, [3], 24), (3, [2], 18), (2, [], 1), (2, [5], 2 ** 5 * 5)])
def test_embed_small(p, S, target):
    res = fpmod.theorem3_embed(p, S)
    assert res.ok and res.kappa.target.order == target
    assert res.kappa.distinct_images() == res.group.order


def test_embed_960_without_materializing_target():
    res = fpmod.theorem3_embed(2, [3, 5])
    W = res.kappa.target
    assert res.group.order == 960 and W.order == 2 ** 15 * 15
    assert not W.feasible and W.materialized is None
    assert res.kappa.verified_hom and res.kappa.verified_injective
    assert res.prop1.ok


def test_embedding_base_projection_gives_coset_data():
    res = fpmod.theorem3_embed(2, [3, 5])
    T = res.group
    size = T.decomp.size
    sums = T.decomp.vectors.sum(axis=1) % 2
    # for v in V, the value at the identity of B is v + C, i.e. the coordinate sum
    assert (res.kappa.tops[:size] == 0).all()
    vals = res.kappa.bases[:size, 0]
    cosets = {int(v): int(s) for v, s in zip(vals, sums)}
    assert len(cosets) == 2 and len(set(cosets.values())) == 2
    # at x the value is the coset of b^x v b^-x = v M^-x
    M = T.decomp.action
    for x in range(T.n):
        Mx = M.power((T.n - x) % T.n).data
        s = (T.decomp.vectors @ Mx % 2).sum(axis=1) % 2
        assert all(cosets[int(v)] == int(t) for v, t in zip(res.kappa.bases[:size, x], s))


def test_fingerprints():
    assert fpmod.fingerprint(2, []) == (1,)
    assert fpmod.fingerprint(2, [3]) == (1, 3)
    assert fpmod.fingerprint(2, [3, 5]) == (1, 3, 5, 15)


def test_fingerprints_distinct():
    prints = {}
    for r in range(4):
        for S in itertools.combinations([3, 5, 7], r):
            prints[S] = fpmod.fingerprint(2, S)
    assert len(set(prints.values())) == len(prints)


def test_centralizer_index_against_table():
    T = fpmod.build_truncated_G(2, [3, 5])
    G = T.realized
    for sub in [(), (3,), (5,), (3, 5)]:
        gens = T.decomp.basis_codes(list(sub))
        count = sum(all(G.mult[g, v] == G.mult[v, g] for v in gens) for g in range(G.order))
        assert fpmod.centralizer_index(T, sub) == G.order // count


def test_local_structure():
    checks = fpmod.local_structure_check(2, [3, 5], seed=3)
    assert all(c.ok for c in checks)
    assert checks[0].base_order == 1 and checks[0].order == 15
    assert checks[1].base_order == checks[1].order == 2
