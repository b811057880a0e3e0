"""``kk`` command line: parse inputs, run a computation, print a verification report.

Exit codes: 0 when every assertion passes, 1 when one fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import random
import re
import shlex
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import abelian as ab
from . import fpmod
from . import magnus as mg
from .errors import KKError, NotAGroup, UsageError
from .groups import FiniteGroup, SubgroupHandle, parse_elements, parse_group_text, subgroup_generated
from .kk import kk_full, kk_reduced, make_context, theorem1_check, theorem1_split, verify_prop1
from .report import Report, digest_inputs, emit_report
from .wreath import WreathMap, index_blowup_iso

DEFAULT_SEED = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        m = re.search(r"'([^']*)'", message) or re.search(r": (\S+)", message)
        raise UsageError(message, m.group(1) if m else "")


@dataclass
class Command:
    verb: str
    options: dict
    argv: list[str]


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = _Parser(prog="kk", description="Wreath product embeddings with exhaustive verification.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    for verb, help_ in (("embed", "full or reduced embedding into a wreath product"),
                        ("prop1", "reduced embedding and the three-part check")):
        q = sub.add_parser(verb, parents=[common], help=help_)
        q.add_argument("--group", required=True, metavar="FILE")
        q.add_argument("--normal", required=True, metavar="ELEMS", help="generators of A")
        q.add_argument("--mod", metavar="ELEMS", help="generators of C (default: trivial)")

    q = sub.add_parser("split", parents=[common], help="hypothesis check and splitting as H Wr B")
    q.add_argument("--group", required=True, metavar="FILE")
    q.add_argument("--h", required=True, metavar="ELEMS")

    q = sub.add_parser("blowup", parents=[common], help="finite-index blow-up isomorphism")
    q.add_argument("--group", required=True, metavar="FILE", help="bottom group D")
    q.add_argument("--top", required=True, metavar="FILE", help="abelian top group B0")
    q.add_argument("--h", required=True, metavar="ELEMS", help="generators of the subgroup B of B0")

    q = sub.add_parser("magnus", help="exact matrix computations for the free metabelian group")
    msub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = msub.add_parser("eval", parents=[common])
    r.add_argument("word")
    r = msub.add_parser("dij", parents=[common])
    r.add_argument("i", type=int)
    r.add_argument("j", type=int)
    r = msub.add_parser("independence", parents=[common])
    r.add_argument("--window", type=int, default=3)
    r = msub.add_parser("hom-check", parents=[common])
    r.add_argument("--pairs", type=int, default=1000)

    q = sub.add_parser("abelian", help="integer lattices and core-free subgroups")
    asub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = asub.add_parser("snf", parents=[common])
    r.add_argument("--matrix", required=True, metavar="FILE")
    r = asub.add_parser("lemma-cb", parents=[common])
    r.add_argument("--matrix", required=True, metavar="FILE", help="one target vector per row")
    r.add_argument("--bound", type=int, default=100)
    r = asub.add_parser("lemma-cc", parents=[common])
    r.add_argument("--group", required=True, metavar="FILE")
    r.add_argument("--a", required=True, metavar="ELEMS")

    q = sub.add_parser("fp", help="modules over F_p and truncated semidirect products")
    fsub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for action in ("embed", "fingerprint", "local-check"):
        r = fsub.add_parser(action, parents=[common])
        r.add_argument("--p", type=int, required=True)
        r.add_argument("--s", default="", metavar="LIST", help="comma-separated primes")
        if action == "local-check":
            r.add_argument("--trials", type=int, default=20)
    return p


def parse_command(argv: list[str]) -> Command:
    ns = _build_parser().parse_args(argv)
    opts = vars(ns)
    verb = opts.pop("verb")
    return Command(verb, opts, list(argv))


# ---------------------------------------------------------------------------
# inputs


class _Inputs:
    """Reads files once and records their bytes for the report digest."""

    def __init__(self):
        self.files: list[tuple[str, bytes]] = []

    def read(self, path: str) -> str:
        data = Path(path).read_bytes()
        self.files.append((path, data))
        return data.decode()

    def group(self, path: str) -> FiniteGroup:
        return parse_group_text(self.read(path), name=Path(path).stem)

    def matrix(self, path: str) -> ab.IntMatrix:
        return ab.parse_matrix_text(self.read(path))


def _subgroup(G: FiniteGroup, spec: str | None) -> SubgroupHandle:
    if not spec:
        return G.trivial()
    return subgroup_generated(G, parse_elements(G, spec))


def _labels(G: FiniteGroup, xs) -> str:
    return "{" + ", ".join(G.label(int(x)) for x in xs) + "}"


def _parse_primes(text: str) -> list[int]:
    text = text.strip().strip("{}")
    return [int(t) for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# handlers


def _image_table(kappa: WreathMap) -> str:
    W, G = kappa.target, kappa.domain
    return "\n".join(f"{G.label(g)} -> {W.label(kappa.tops[g], kappa.bases[g])}" for g in range(G.order))


def _context_notes(rep: Report, ctx) -> None:
    G = ctx.G
    rep.note("group", f"{G.name or 'G'} of order {G.order}")
    rep.note("A", _labels(G, ctx.A.elements))
    rep.note("C", _labels(G, ctx.C.elements))
    rep.note("quotient order", ctx.B.order)
    rep.note("transversal", ", ".join(G.label(int(x)) for x in ctx.s.array))


def _embed(cmd: Command, rep: Report, inp: _Inputs) -> None:
    o = cmd.options
    G = inp.group(o["group"])
    ctx = make_context(G, _subgroup(G, o["normal"]), _subgroup(G, o.get("mod")))
    _context_notes(rep, ctx)
    kappa = kk_full(ctx) if ctx.C.is_trivial else kk_reduced(ctx)
    W = kappa.target
    rep.note("target", f"wreath product of order {W.order} (bottom {W.bottom.order}, top {W.top.order})")
    rep.note("images", _image_table(kappa))
    rep.check("homomorphism", kappa.verified_hom, kappa.evidence)
    ker = kappa.kernel()
    rep.check("injective", kappa.verified_injective,
              "kernel " + _labels(G, ker) if len(ker) > 1 else f"kernel of size {len(ker)}")


def _prop1(cmd: Command, rep: Report, inp: _Inputs) -> None:
    o = cmd.options
    G = inp.group(o["group"])
    ctx = make_context(G, _subgroup(G, o["normal"]), _subgroup(G, o.get("mod")))
    _context_notes(rep, ctx)
    kappa = kk_reduced(ctx)
    rep.note("target", f"wreath product of order {kappa.target.order}")
    rep.check("homomorphism", kappa.verified_hom, kappa.evidence)
    rep.extend(verify_prop1(ctx, kappa).assertions())


def _split(cmd: Command, rep: Report, inp: _Inputs) -> None:
    o = cmd.options
    G = inp.group(o["group"])
    H = _subgroup(G, o["h"])
    check = theorem1_check(G, H)
    rep.note("group", f"{G.name or 'G'} of order {G.order}")
    rep.note("H", _labels(G, H.elements))
    rep.note("conjugates", len(check.conjugates))
    if not check.ok and not H.is_trivial:
        rep.extend(check.assertions())
        rep.check("HypothesisFailed", False, "failed: " + ", ".join(check.failed))
        return
    res = theorem1_split(G, H)
    rep.note("transversal", ", ".join(G.label(int(x)) for x in res.context.s.array))
    rep.note("target", f"H Wr B of order {res.map.codomain.order}")
    rep.extend(res.assertions())


def _blowup(cmd: Command, rep: Report, inp: _Inputs) -> None:
    o = cmd.options
    D = inp.group(o["group"])
    B0 = inp.group(o["top"])
    B = _subgroup(B0, o["h"])
    res = index_blowup_iso(D, B0, B)
    rep.note("index", B0.order // B.order)
    rep.note("transversal", ", ".join(B0.label(x) for x in res.transversal))
    rep.note("domain order", res.map.domain.order)
    rep.note("codomain order", res.map.codomain.order)
    rep.check("homomorphism", res.map.verified_hom, res.map.evidence)
    rep.check("bijective", res.map.is_bijective,
              f"{len(np.unique(res.map.image))} distinct images of {res.map.domain.order}")


def _magnus(cmd: Command, rep: Report, inp: _Inputs) -> None:
    o = cmd.options
    action = o["action"]
    if action == "eval":
        w = mg.FreeWord(o["word"])
        m = mg.magnus_eval(w)
        ea, eb = w.exponent_sums()
        rep.note("word", w)
        rep.note("image", m)
        rep.note("in derived subgroup", mg.derived_membership(w))
        diag = mg.LaurentPoly.monomial(ea, eb)
        rep.check("diagonal_matches_exponent_sums", m.a11 == diag and m.a22 == mg.ONE, f"x^{ea} y^{eb}")
        rep.check("invertible", m.is_invertible(), "")
    elif action == "dij":
        i, j = o["i"], o["j"]
        m = mg.magnus_dij(i, j)
        rep.note("word", mg.dij_word(i, j))
        rep.note("image", m)
        rep.check("closed_form", m == mg.dij_closed_form(i, j), f"corner {mg.dij_entry(i, j)}")
    elif action == "independence":
        k = o["window"]
        pairs = mg.dij_window(k)
        cert = mg.z_linear_independence([mg.dij_entry(i, j) for i, j in pairs])
        rep.note("window", f"|i|, |j| <= {k} ({len(pairs)} elements)")
        rep.note("columns", len(cert.columns))
        rep.check("full_rank", cert.independent, f"rank {cert.rank} of {len(pairs)}"
                  + ("" if cert.independent else f"; dependency {cert.dependency}"))
    elif action == "hom-check":
        rng = random.Random(o["seed"])
        bad = None
        for _ in range(o["pairs"]):
            u, v = mg.random_word(rng), mg.random_word(rng)
            if mg.magnus_eval(u * v) != mg.magnus_eval(u) * mg.magnus_eval(v):
                bad = (u, v)
                break
        rep.note("pairs", o["pairs"])
        rep.note("seed", o["seed"])
        rep.check("homomorphism", bad is None, f"fails on {bad}" if bad else f"{o['pairs']} random pairs")


def _abelian(cmd: Command, rep: Report, inp: _Inputs) -> None:
    o = cmd.options
    action = o["action"]
    if action == "snf":
        M = inp.matrix(o["matrix"])
        U, D, V = ab.smith_normal_form(M)
        rep.note("U", ab.format_matrix(U))
        rep.note("D", ab.format_matrix(D))
        rep.note("V", ab.format_matrix(V))
        diag = [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]
        rep.note("invariant factors", diag)
        rep.check("reconstruction", ab.matmul(ab.matmul(U, M), V) == D, "U M V = D")
        rep.check("unimodular", abs(ab.det(U)) == 1 and abs(ab.det(V)) == 1,
                  f"det U = {ab.det(U)}, det V = {ab.det(V)}")
        nz = [d for d in diag if d]
        chain = all(b % a == 0 for a, b in zip(nz, nz[1:])) and all(d >= 0 for d in diag) \
            and diag[len(nz):] == [0] * (len(diag) - len(nz))
        rep.check("divisibility_chain", chain, str(diag))
    elif action == "lemma-cb":
        targets = inp.matrix(o["matrix"])
        k = len(targets[0]) if targets else 0
        basis, hr = ab.lemma_cb_rounds(k, targets, o["bound"])
        rep.note("basis", ab.format_matrix(basis.rows))
        rep.note("coordinate sum functional", hr.sum_functional)
        rep.check("basis_unimodular", abs(basis.determinant) == 1, f"det {basis.determinant}")
        rep.check("targets_are_basis_vectors", all(hr.identity_holds), str(hr.target_coordinates))
        rep.check("multiples_avoid_hyperplane", not hr.violations,
                  f"violations {hr.violations[:5]}" if hr.violations else f"1 <= m <= {hr.multiples_checked}")
        q = ab.quotient_rank_one_check(basis, hr)
        rep.check("quotient_is_Z", q.ok, f"free rank {q.free_rank}, torsion {q.torsion}")
    elif action == "lemma-cc":
        G = inp.group(o["group"])
        A = _subgroup(G, o["a"])
        res = ab.lemma_cc_C(G, A)
        rep.note("A", _labels(G, A.elements))
        rep.note("C", _labels(G, res.C.elements))
        rep.note("exponent of A", res.n)
        for p, d in res.primes.items():
            rep.note(f"p={p} socle", _labels(G, d["socle"].elements))
            rep.note(f"p={p} C_p", _labels(G, d["C_p"].elements))
            rep.note(f"p={p} E_p", _labels(G, d["E_p"].elements))
        rep.check("core_trivial", res.core.is_trivial, "core " + _labels(G, res.core.elements))
        missing = [N for N in res.normal_in_A if all(N is not e[0] for e in res.escapes)]
        rep.check("normal_subgroups_escape_C", not missing,
                  f"{len(res.normal_in_A)} nontrivial normal subgroups inside A"
                  + (f"; contained: {_labels(G, missing[0].elements)}" if missing else ""))
        rep.check("quotient_exponent_divides_n", res.n % res.quotient_exponent == 0,
                  f"exp(A/C) = {res.quotient_exponent}, n = {res.n}")


def _fp(cmd: Command, rep: Report, inp: _Inputs) -> None:
    o = cmd.options
    p, S = o["p"], _parse_primes(o["s"])
    action = o["action"]
    dec = fpmod.module_decomp(p, S)
    rep.note("p", p)
    rep.note("S", "{" + ",".join(map(str, sorted(set(S)))) + "}")
    for b in dec.blocks:
        rep.note(f"V_{b.q} factor", fpmod.poly_str(b.poly))
        rep.note(f"V_{b.q} action", ab.format_matrix(b.action.rows()))
    if action == "embed":
        res = fpmod.theorem3_embed(p, S)
        G = res.group
        rep.note("group order", G.order)
        rep.note("target", f"(Z/{p}) Wr (Z/{G.n}) of order {res.kappa.target.order}")
        if res.hyperplane is not None:
            h = res.hyperplane
            rep.note("C dimension", h.dim)
            rep.check("C_has_index_p", h.index == p, f"|V/C| = {h.index}")
            rep.check("no_block_in_C", all(h.blocks_outside.values()), str(h.blocks_outside))
            rep.check("no_submodule_in_C", not h.submodules_inside,
                      "skipped above dimension 8" if h.submodules_checked is None
                      else f"{h.submodules_checked} submodules scanned")
        rep.check("homomorphism", res.kappa.verified_hom, res.kappa.evidence)
        rep.check("injective", res.kappa.verified_injective, f"kernel size {len(res.kappa.kernel())}")
    elif action == "fingerprint":
        table = fpmod.fingerprint_table(p, S)
        bad = []
        for T, idx in table.items():
            expect = int(np.prod(T)) if T else 1
            rep.note("index " + ("{" + ",".join(map(str, T)) + "}"), idx)
            if idx != expect:
                bad.append((T, idx, expect))
        rep.note("fingerprint", sorted(table.values()))
        rep.check("centralizer_index_is_product", not bad, f"mismatches {bad}" if bad else f"{len(table)} subsets")
    elif action == "local-check":
        checks = fpmod.local_structure_check(p, S, trials=o["trials"], seed=o["seed"])
        rep.note("subgroups", len(checks))
        rep.note("seed", o["seed"])
        bad = [c for c in checks if not c.ok]
        rep.check("finite_by_cyclic", not bad,
                  f"generators {bad[0].generators}" if bad else
                  "orders " + ",".join(str(c.order) for c in checks))


_HANDLERS = {
    "embed": _embed, "prop1": _prop1, "split": _split, "blowup": _blowup,
    "magnus": _magnus, "abelian": _abelian, "fp": _fp,
}


def _echo(argv: list[str]) -> str:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--out":
            skip = True
            continue
        if tok.startswith("--out="):
            continue
        out.append(tok)
    return "kk " + shlex.join(out)


def run(cmd: Command) -> tuple[Report, int]:
    """Execute a parsed command.  Input errors raise OSError or ValueError."""
    inp = _Inputs()
    echo = _echo(cmd.argv)
    rep = Report(echo, "")
    try:
        _HANDLERS[cmd.verb](cmd, rep, inp)
    except (NotAGroup, OSError):
        raise
    except KKError as e:
        rep.check(type(e).__name__, False, str(e))
    rep.digest = digest_inputs(echo, inp.files)
    return rep, rep.exit_code


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cmd = parse_command(argv)
        rep, code = run(cmd)
    except UsageError as e:
        print(f"kk: usage error: {e} (token {e.token!r})", file=sys.stderr)
        return 2
    except (OSError, NotAGroup, ValueError) as e:
        print(f"kk: input error: {e}", file=sys.stderr)
        return 2
    data = emit_report(rep, cmd.options["format"])
    sys.stdout.buffer.write(data)
    sys.stdout.flush()
    if cmd.options.get("out"):
        try:
            Path(cmd.options["out"]).write_bytes(data)
        except OSError as e:
            print(f"kk: cannot write report: {e}", file=sys.stderr)
            return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
