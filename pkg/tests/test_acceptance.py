"""End-to-end acceptance suite; each test prints one PASS/FAIL line."""

import contextlib
import io
import itertools
import random
import time

import numpy as np
import pytest

from conftest import FIXTURES, GOLDEN, load, sub
from golden_cases import CASES, EXIT
from kkwreath import abelian as ab
from kkwreath import fpmod
from kkwreath.cli import main
from kkwreath.errors import CoreNotTrivial, HypothesisFailed
from kkwreath.groups import alternating, cyclic, find_isomorphism, normal_core, normal_subgroups, subgroup_generated
from kkwreath.kk import kk_full, kk_reduced, make_context, theorem1_check, theorem1_split, verify_prop1
from kkwreath.magnus import (
    ONE,
    TriMat2,
    coefficient_matrix,
    dij_closed_form,
    dij_entry,
    dij_window,
    magnus_dij,
    magnus_eval,
    random_word,
    z_linear_independence,
)
from kkwreath.wreath import index_blowup_iso


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(n):
        detail = []
        try:
            yield detail
        except BaseException:
            with capsys.disabled():
                print(f"\ncriterion {n}: FAIL {' '.join(detail)}")
            raise
        with capsys.disabled():
            print(f"\ncriterion {n}: PASS {' '.join(detail)}")
    return run


def test_criterion_1_embedding_suite(criterion):
    cases = [("z4", "(0 2)(1 3)"), ("s3", "(0 1 2)"), ("d4", "(0 1 2 3)"),
             ("q8", "(0 1 3 6)(2 5 7 4)"), ("a4", "(0 1)(2 3),(0 2)(1 3)")]
    with criterion(1) as detail:
        for name, normal in cases:
            G = load(name)
            start = time.perf_counter()
            phi = kk_full(make_context(G, sub(G, normal)))
            elapsed = time.perf_counter() - start
            assert phi.verified_hom and phi.verified_injective
            assert phi.distinct_images() == G.order
            assert elapsed < 1.0, (name, elapsed)
            detail.append(f"{name}:{elapsed:.3f}s")


def test_criterion_2_reduced_embedding(criterion):
    with criterion(2) as detail:
        A4, S3 = load("a4"), load("s3")
        for G, A, C, order in [(A4, sub(A4, "(0 1)(2 3),(0 2)(1 3)"), sub(A4, "(0 1)(2 3)"), 24),
                               (S3, sub(S3, "(0 1 2)"), None, 18)]:
            ctx = make_context(G, A, C)
            kappa = kk_reduced(ctx)
            rep = verify_prop1(ctx, kappa)
            assert rep.injective and rep.a_in_base
            assert rep.product_order == rep.wreath_order == order
            detail.append(str(order))
        with pytest.raises(CoreNotTrivial):
            make_context(S3, sub(S3, "(0 1 2)"), sub(S3, "(0 1 2)"))
        detail.append("planted-core-rejected")


def test_criterion_3_split_round_trip(criterion):
    with criterion(3) as detail:
        G = load("z2wrz3")
        H = subgroup_generated(G, [4])
        rep = theorem1_check(G, H)
        assert rep.ok and rep.n == 3
        res = theorem1_split(G, H)
        assert res.map.verified_hom and res.map.is_bijective
        assert res.map.domain.order == res.map.codomain.order == 24
        Q8, S3 = load("q8"), load("s3")
        with pytest.raises(HypothesisFailed) as exc:
            theorem1_split(Q8, sub(Q8, "(0 1 3 6)(2 5 7 4)"))
        assert "normalizer" in exc.value.failed
        with pytest.raises(HypothesisFailed) as exc:
            theorem1_split(S3, sub(S3, "(0 1)"))
        assert "direct_product" in exc.value.failed
        detail.append("n=3 order=24 negatives-named")


def test_criterion_4_magnus(criterion):
    with criterion(4) as detail:
        pairs = dij_window(3)
        assert len(pairs) == 49
        assert all(magnus_dij(i, j) == dij_closed_form(i, j) for i, j in pairs)
        polys = [dij_entry(i, j) for i, j in pairs]
        cert = z_linear_independence(polys)
        assert cert.independent and cert.rank == 49
        assert len(coefficient_matrix(polys)[0]) == 49
        rng = random.Random(0)
        for _ in range(1000):
            u, v = random_word(rng), random_word(rng)
            assert magnus_eval(u * v) == magnus_eval(u) * magnus_eval(v)
        assert magnus_eval("") == TriMat2.identity() and magnus_dij(0, 0).a11 == ONE
        detail.append("49-closed-forms rank=49 pairs=1000")


def test_criterion_5_truncation(criterion):
    with criterion(5) as detail:
        T = fpmod.build_truncated_G(2, [3])
        assert T.order == 12
        assert find_isomorphism(T.realized, alternating(4)) is not None
        res = fpmod.theorem3_embed(2, [3])
        assert res.ok and res.kappa.verified_injective and res.kappa.target.order == 24
        res = fpmod.theorem3_embed(2, [3, 5])
        W = res.kappa.target
        assert res.group.order == 960
        assert W.materialized is None and res.kappa.verified_injective and res.kappa.verified_hom
        detail.append(f"A4-iso target=24 order=960 target={W.order}-unmaterialized")


def test_criterion_6_fingerprints(criterion):
    with criterion(6) as detail:
        assert set(fpmod.fingerprint(2, [3])) == {1, 3}
        assert set(fpmod.fingerprint(2, [3, 5])) == {1, 3, 5, 15}
        prints = [fpmod.fingerprint(2, S) for r in range(4) for S in itertools.combinations([3, 5, 7], r)]
        assert len(set(prints)) == len(prints) == 8
        detail.append("8-subsets-distinct")


def test_criterion_7_blowup(criterion):
    with criterion(7) as detail:
        Z4 = cyclic(4)
        res = index_blowup_iso(cyclic(2), Z4, subgroup_generated(Z4, [2]))
        assert res.map.domain.order == res.map.codomain.order == 32
        assert res.map.verified_hom and res.map.is_bijective
        Z3 = cyclic(3)
        one = index_blowup_iso(cyclic(2), Z3, Z3.whole())
        assert one.map.is_bijective
        assert (one.map.image == np.arange(one.map.domain.order)).all()
        detail.append("order=32 m=1-identity")


def test_criterion_8_lattice_machinery(criterion):
    with criterion(8) as detail:
        rng = random.Random(8)
        for _ in range(500):
            r, c = rng.randint(1, 6), rng.randint(1, 6)
            M = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
            U, D, V = ab.smith_normal_form(M)
            assert ab.matmul(ab.matmul(U, M), V) == D
        done = 0
        while done < 500:
            g = [rng.randint(-20, 20) for _ in range(rng.randint(1, 6))]
            if ab._primitive(g):
                assert abs(ab.extend_to_basis(g).determinant) == 1
                done += 1
        targets = ab.parse_matrix_text((FIXTURES / "lemma_cb.txt").read_text())
        basis, rep = ab.lemma_cb_rounds(len(targets[0]), targets, bound=100)
        assert rep.ok and rep.multiples_checked == 100
        for g in targets:
            for m in range(1, 101):
                assert not ab.lattice_contains(rep.hyperplane_basis, [m * v for v in g])
                assert sum(basis.coordinates([m * v for v in g])) == m
        G = load("s3xz2")
        res = ab.lemma_cc_C(G, sub(G, "(0 1 2),(3 4)"))
        assert normal_core(G, res.C).is_trivial
        assert all(N.order == 1 or not N <= res.C for N in normal_subgroups(G))
        detail.append("snf=500 basis=500 multiples=1..100 core-trivial")


def _render(argv):
    buf = io.TextIOWrapper(io.BytesIO(), write_through=True)
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return buf.buffer.getvalue(), code


def test_criterion_9_determinism(criterion, monkeypatch):
    monkeypatch.chdir(FIXTURES)
    with criterion(9) as detail:
        for name, argv in sorted(CASES.items()):
            a, ca = _render(argv)
            b, cb = _render(argv)
            assert a == b and ca == cb == EXIT.get(name, 0), name
            assert a == (GOLDEN / f"{name}.txt").read_bytes(), name
        detail.append(f"{len(CASES)}-reports-byte-identical")
