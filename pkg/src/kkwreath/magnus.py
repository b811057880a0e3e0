"""Magnus-type embedding of the free metabelian group on ``a, b``.

Words map to 2x2 upper-triangular matrices over the integer Laurent
polynomial ring in ``x, y``:

    a -> diag(x, 1),    b -> diag(y, 1) + E12.

Everything here is exact integer arithmetic.  The commutator convention is
``[u, v] = u^-1 v^-1 u v``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

Exp = tuple[int, int]


class LaurentPoly:
    """Sparse integer Laurent polynomial in x, y: a map (i, j) -> coefficient."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Exp, int] | Iterable[tuple[Exp, int]] = ()):
        acc: dict[Exp, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (i, j), c in items:
            key = (int(i), int(j))
            acc[key] = acc.get(key, 0) + int(c)
        self._terms = tuple(sorted((k, c) for k, c in acc.items() if c != 0))

    @classmethod
    def monomial(cls, i: int, j: int, c: int = 1) -> "LaurentPoly":
        return cls({(i, j): c})

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({(0, 0): c})

    @property
    def terms(self) -> dict[Exp, int]:
        return dict(self._terms)

    def support(self) -> list[Exp]:
        return [k for k, _ in self._terms]

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return LaurentPoly(list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly([(k, -c) for k, c in self._terms])

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly([(k, c * other) for k, c in self._terms])
        out: dict[Exp, int] = {}
        for (i1, j1), c1 in self._terms:
            for (i2, j2), c2 in other._terms:
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        return len(self._terms) == 1 and abs(self._terms[0][1]) == 1

    def unit_inverse(self) -> "LaurentPoly":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit")
        (i, j), c = self._terms[0]
        return LaurentPoly.monomial(-i, -j, c)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in self._terms:
            mono = []
            if i:
                mono.append("x" if i == 1 else f"x^{i}")
            if j:
                mono.append("y" if j == 1 else f"y^{j}")
            body = "*".join(mono)
            if not body:
                s = str(abs(c))
            elif abs(c) == 1:
                s = body
            else:
                s = f"{abs(c)}*{body}"
            parts.append(("-" if c < 0 else "+", s))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
X = LaurentPoly.monomial(1, 0)
Y = LaurentPoly.monomial(0, 1)


@dataclass(frozen=True)
class TriMat2:
    """Upper-triangular [[a11, a12], [0, a22]]."""

    a11: LaurentPoly
    a12: LaurentPoly
    a22: LaurentPoly

    @classmethod
    def identity(cls) -> "TriMat2":
        return cls(ONE, ZERO, ONE)

    def __mul__(self, other: "TriMat2") -> "TriMat2":
        return TriMat2(self.a11 * other.a11,
                       self.a11 * other.a12 + self.a12 * other.a22,
                       self.a22 * other.a22)

    def is_invertible(self) -> bool:
        return self.a11.is_unit() and self.a22.is_unit()

    def inverse(self) -> "TriMat2":
        i11 = self.a11.unit_inverse()
        i22 = self.a22.unit_inverse()
        return TriMat2(i11, -(i11 * self.a12 * i22), i22)

    def __str__(self):
        return f"[[{self.a11}, {self.a12}], [0, {self.a22}]]"


def unit_plus_e12(p: LaurentPoly) -> TriMat2:
    """I + p E12"""
    return TriMat2(ONE, p, ONE)


# ---------------------------------------------------------------------------
# words


class FreeWord:
    """Freely reduced word in a, b.  Capital letters are inverses."""

    __slots__ = ("letters",)
    ALPHABET = "abAB"

    def __init__(self, letters: str = ""):
        for ch in letters:
            if ch not in self.ALPHABET:
                raise ValueError(f"bad letter {ch!r}; use a, b, A, B")
        stack: list[str] = []
        for ch in letters:
            if stack and stack[-1] == ch.swapcase():
                stack.pop()
            else:
                stack.append(ch)
        self.letters = "".join(stack)

    def __repr__(self):
        return f"FreeWord({self.letters!r})"

    def __str__(self):
        return self.letters or "1"

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.letters[::-1].swapcase())

    def __pow__(self, k: int) -> "FreeWord":
        w = self if k >= 0 else self.inverse()
        return FreeWord(w.letters * abs(k))

    def exponent_sums(self) -> tuple[int, int]:
        return (self.letters.count("a") - self.letters.count("A"),
                self.letters.count("b") - self.letters.count("B"))


A_WORD = FreeWord("a")
B_WORD = FreeWord("b")


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    return u.inverse() * v.inverse() * u * v


_GEN = {
    "a": TriMat2(X, ZERO, ONE),
    "b": TriMat2(Y, ONE, ONE),
}
_GEN["A"] = _GEN["a"].inverse()
_GEN["B"] = _GEN["b"].inverse()


def magnus_eval(w: FreeWord | str) -> TriMat2:
    if isinstance(w, str):
        w = FreeWord(w)
    m = TriMat2.identity()
    for ch in w.letters:
        m = m * _GEN[ch]
    return m


def dij_word(i: int, j: int) -> FreeWord:
    """c^-1 [a, b] c with c = a^i b^j."""
    c = (A_WORD ** i) * (B_WORD ** j)
    return c.inverse() * commutator(A_WORD, B_WORD) * c


def magnus_dij(i: int, j: int) -> TriMat2:
    return magnus_eval(dij_word(i, j))


def dij_entry(i: int, j: int) -> LaurentPoly:
    """Closed form x^-i y^(-j-1) (1 - x^-1) of the corner entry."""
    return LaurentPoly.monomial(-i, -j - 1) * (ONE - LaurentPoly.monomial(-1, 0))


def dij_closed_form(i: int, j: int) -> TriMat2:
    return unit_plus_e12(dij_entry(i, j))


def derived_membership(w: FreeWord | str) -> bool:
    """True iff the image of w lies in the derived subgroup (both exponent sums vanish)."""
    if isinstance(w, str):
        w = FreeWord(w)
    return w.exponent_sums() == (0, 0)


def random_word(rng: random.Random, max_len: int = 12) -> FreeWord:
    n = rng.randint(0, max_len)
    return FreeWord("".join(rng.choice(FreeWord.ALPHABET) for _ in range(n)))


# ---------------------------------------------------------------------------
# linear independence over Z


@dataclass
class IndependenceCertificate:
    independent: bool
    rank: int
    columns: list[Exp]
    pivots: list[int] | None = None          # pivot column positions, one per row
    dependency: list[int] | None = None      # integer c with sum c_k p_k = 0


def coefficient_matrix(polys: list[LaurentPoly]) -> tuple[list[list[int]], list[Exp]]:
    """Rows are the polynomials; columns are exponent pairs in lexicographic order."""
    cols = sorted({k for p in polys for k in p.support()})
    where = {k: n for n, k in enumerate(cols)}
    rows = []
    for p in polys:
        row = [0] * len(cols)
        for k, c in p.terms.items():
            row[where[k]] = c
        rows.append(row)
    return rows, cols


def bareiss_rank(rows: list[list[int]]) -> tuple[int, list[int]]:
    """Rank over Q by fraction-free elimination; also the pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return 0, []
    nrows, ncols = len(m), len(m[0])
    prev = 1
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((k for k in range(r, nrows) if m[k][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for k in range(r + 1, nrows):
            for cc in range(c + 1, ncols):
                m[k][cc] = (m[r][c] * m[k][cc] - m[k][c] * m[r][cc]) // prev
            m[k][c] = 0
        prev = m[r][c]
        pivots.append(c)
        r += 1
    return r, pivots


def integer_dependency(rows: list[list[int]]) -> list[int] | None:
    """A primitive integer vector c with sum_k c_k rows[k] = 0, or None."""
    n = len(rows)
    ncols = len(rows[0]) if rows else 0
    # solve M^T c = 0 by exact row reduction over Q
    mat = [[Fraction(rows[k][col]) for k in range(n)] for col in range(ncols)]
    pivcols = []
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, len(mat)) if mat[k][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        lead = mat[r][c]
        mat[r] = [v / lead for v in mat[r]]
        for k in range(len(mat)):
            if k != r and mat[k][c] != 0:
                f = mat[k][c]
                mat[k] = [a - f * b for a, b in zip(mat[k], mat[r])]
        pivcols.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivcols]
    if not free:
        return None
    f0 = free[0]
    sol = [Fraction(0)] * n
    sol[f0] = Fraction(1)
    for k, pc in enumerate(pivcols):
        sol[pc] = -mat[k][f0]
    den = 1
    for v in sol:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in sol]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    first = next(v for v in ints if v != 0)
    if first < 0:
        ints = [-v for v in ints]
    return ints


def z_linear_independence(polys: list[LaurentPoly]) -> IndependenceCertificate:
    if not polys:
        raise ValueError("need at least one polynomial")
    rows, cols = coefficient_matrix(polys)
    if not cols:
        return IndependenceCertificate(False, 0, cols, dependency=[1] + [0] * (len(polys) - 1))
    rank, pivots = bareiss_rank(rows)
    if rank == len(polys):
        return IndependenceCertificate(True, rank, cols, pivots=pivots)
    return IndependenceCertificate(False, rank, cols, dependency=integer_dependency(rows))


def dij_window(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(-k, k + 1) for j in range(-k, k + 1)]
