"""Laurent polynomials, exterior algebra and exact linear algebra over Q.

Conventions used across the package:

* exponent vectors are plain integer tuples and may be negative;
* the interior product is the *left* contraction, with
  ``d_j -| (dx_{s_1} ^ ... ^ dx_{s_p})`` equal to
  ``(-1)^(r-1) dx_{s_1} ^ .. (omit s_r) .. ^ dx_{s_p}`` when ``j = s_r``, and
  a polyvector ``d_{j_1} ^ ... ^ d_{j_k}`` contracts as
  ``d_{j_k} -| ( ... -| (d_{j_1} -| w))``, so ``(d_x ^ d_y) -| (dx ^ dy) = -1``;
* elimination pivots on the first nonzero entry, scanning vectors in the
  order they are supplied, so bases are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .ratseries import exact


class ContextMismatch(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Sparse Laurent polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ContextMismatch(f"exponent {exps} has wrong length for {nvars} variables")
            c = exact(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        self.terms = {e: c for e, c in sorted(clean.items()) if c}
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, nvars: int, c=1) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls._raw(nvars, {})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "LaurentPoly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "LaurentPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other: "LaurentPoly"):
        if other.nvars != self.nvars:
            raise ContextMismatch("polynomials live in different variable contexts")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return LaurentPoly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.nvars, dict(sorted(out.items())))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = exact(other)
            if not c:
                return LaurentPoly.zero(self.nvars)
            return LaurentPoly._raw(self.nvars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._raw(self.nvars, {e: c for e, c in sorted(out.items()) if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly.monomial([-a * -k for a in e], Fraction(1) / c ** -k)
        out = LaurentPoly.constant(self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "LaurentPoly":
        return self ** -1

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == LaurentPoly.constant(self.nvars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self.terms.items())))
        return self._hash

    def derivative(self, i: int) -> "LaurentPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return LaurentPoly._raw(self.nvars, dict(sorted(out.items())))

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self.nvars)

    def single_term(self) -> tuple[tuple, Fraction]:
        if len(self.terms) != 1:
            raise ValueError("not a monomial")
        return next(iter(self.terms.items()))

    def min_exponents(self) -> tuple:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(col) for col in zip(*self.terms))

    def is_polynomial(self) -> bool:
        return all(a >= 0 for e in self.terms for a in e)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"x{i}^{a}" if a != 1 else f"x{i}" for i, a in enumerate(e) if a)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Exterior algebra
# ---------------------------------------------------------------------------


def merge_sign(s: Sequence[int], t: Sequence[int]) -> int:
    """Sign of the shuffle sorting the concatenation ``s + t`` (0 if they overlap)."""
    if set(s) & set(t):
        return 0
    inversions = sum(1 for a in s for b in t if a > b)
    return -1 if inversions % 2 else 1


def permutation_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class ExteriorElement:
    """Element of a graded exterior algebra on ``ngens`` odd generators.

    ``kind`` is ``"form"`` (generators dx_i) or ``"polyvector"`` (generators
    d_i); wedge requires matching kinds, contraction pairs a polyvector with a
    form.  Coefficients are :class:`LaurentPoly` in ``nvars`` variables.
    """

    __slots__ = ("ngens", "nvars", "kind", "components")

    def __init__(self, ngens: int, nvars: int, components=None, kind: str = "form"):
        self.ngens = ngens
        self.nvars = nvars
        self.kind = kind
        comps = {}
        for subset, coeff in (components or {}).items():
            subset = tuple(subset)
            if list(subset) != sorted(set(subset)):
                sign = permutation_sign(subset)
                if not sign:
                    continue
                subset = tuple(sorted(subset))
                coeff = coeff * sign
            if not isinstance(coeff, LaurentPoly):
                coeff = LaurentPoly.constant(nvars, coeff)
            if coeff.nvars != nvars:
                raise ContextMismatch("coefficient context mismatch")
            if subset in comps:
                coeff = comps[subset] + coeff
            if coeff:
                comps[subset] = coeff
            else:
                comps.pop(subset, None)
        self.components = dict(sorted(comps.items(), key=lambda kv: (len(kv[0]), kv[0])))

    @classmethod
    def generator(cls, ngens: int, nvars: int, i: int, kind: str = "form"):
        return cls(ngens, nvars, {(i,): LaurentPoly.constant(nvars)}, kind)

    @classmethod
    def scalar(cls, ngens: int, nvars: int, c, kind: str = "form"):
        return cls(ngens, nvars, {(): c}, kind)

    def _check(self, other: "ExteriorElement", same_kind=True):
        if (self.ngens, self.nvars) != (other.ngens, other.nvars):
            raise ContextMismatch("exterior elements live in different contexts")
        if same_kind and self.kind != other.kind:
            raise ContextMismatch("cannot combine forms with polyvectors")

    def degrees(self) -> set[int]:
        return {len(s) for s in self.components}

    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) > 1:
            raise DegreeMismatch("element is not homogeneous")
        return degs.pop() if degs else 0

    def homogeneous_part(self, p: int) -> "ExteriorElement":
        return ExteriorElement(self.ngens, self.nvars,
                               {s: c for s, c in self.components.items() if len(s) == p}, self.kind)

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for s, c in other.components.items():
            comps[s] = comps[s] + c if s in comps else c
        return ExteriorElement(self.ngens, self.nvars, comps, self.kind)

    def __neg__(self):
        return ExteriorElement(self.ngens, self.nvars,
                               {s: -c for s, c in self.components.items()}, self.kind)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExteriorElement":
        return ExteriorElement(self.ngens, self.nvars,
                               {s: v * c for s, v in self.components.items()}, self.kind)

    def __eq__(self, other):
        if not isinstance(other, ExteriorElement):
            return NotImplemented
        return (self.ngens, self.nvars, self.kind, self.components) == (
            other.ngens, other.nvars, other.kind, other.components)

    def is_zero(self) -> bool:
        return not self.components

    def __repr__(self):
        if not self.components:
            return "0"
        g = "d" if self.kind == "form" else "D"
        return " + ".join(f"({c})" + "".join(f"{g}{i}" for i in s) for s, c in self.components.items())


def wedge(a: ExteriorElement, b: ExteriorElement) -> ExteriorElement:
    """Graded-commutative product of two forms (or two polyvectors)."""
    a._check(b)
    comps: dict = {}
    for s, c in a.components.items():
        for t, d in b.components.items():
            sign = merge_sign(s, t)
            if not sign:
                continue
            key = tuple(sorted(s + t))
            val = c * d * sign
            comps[key] = comps[key] + val if key in comps else val
    return ExteriorElement(a.ngens, a.nvars, comps, a.kind)


def _contract_one(j: int, w: ExteriorElement) -> ExteriorElement:
    comps = {}
    for s, c in w.components.items():
        if j in s:
            r = s.index(j)
            comps[s[:r] + s[r + 1:]] = c * (-1 if r % 2 else 1)
    return ExteriorElement(w.ngens, w.nvars, comps, "form")


def contract(v: ExteriorElement, w: ExteriorElement) -> ExteriorElement:
    """Left interior product of a polyvector into a form."""
    v._check(w, same_kind=False)
    if v.kind != "polyvector" or w.kind != "form":
        raise ContextMismatch("contract expects (polyvector, form)")
    if v.components and w.components and max(v.degrees()) > max(w.degrees()):
        raise DegreeMismatch("polyvector degree exceeds form degree")
    out = ExteriorElement(w.ngens, w.nvars, {}, "form")
    for s, c in v.components.items():
        term = w
        for j in s:
            term = _contract_one(j, term)
        comps = {t: d * c for t, d in term.components.items()}
        out = out + ExteriorElement(w.ngens, w.nvars, comps, "form")
    return out


def bar_sign(p: int) -> int:
    """(-1)^(p(p-1)/2), the sign the involution puts on degree-p forms."""
    return -1 if (p * (p - 1) // 2) % 2 else 1


def involution_bar(c):
    """Scale the degree-p part of a graded object by (-1)^(p(p-1)/2).

    Accepts an :class:`ExteriorElement` or a mapping ``degree -> value`` whose
    values support ``scale``.
    """
    if isinstance(c, ExteriorElement):
        comps = {s: v * bar_sign(len(s)) for s, v in c.components.items()}
        return ExteriorElement(c.ngens, c.nvars, comps, c.kind)
    if hasattr(c, "map_components"):
        return c.map_components(lambda p, v: v.scale(bar_sign(p)))
    return {p: v.scale(bar_sign(p)) for p, v in c.items()}


def top_pairing(a, b, variety=None):
    """<a, b> = integral of the top-degree part of bar(a) ^ b."""
    from .cech import MixedClass  # cech depends on this module

    if not isinstance(a, MixedClass) or not isinstance(b, MixedClass):
        raise TypeError("top_pairing expects MixedClass arguments")
    return involution_bar(a).pairing_top(b)


# ---------------------------------------------------------------------------
# Exact linear algebra
# ---------------------------------------------------------------------------


SparseVector = dict  # column index -> Fraction


class ExactMatrix:
    """Sparse rational matrix stored by rows."""

    def __init__(self, nrows: int, ncols: int, rows: Mapping[int, Mapping[int, object]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, Fraction]] = {}
        for i, row in (rows or {}).items():
            clean = {j: exact(v) for j, v in row.items() if v}
            if clean:
                self.rows[i] = clean

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "ExactMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        return cls(nrows, ncols, {i: {j: v for j, v in enumerate(r)} for i, r in enumerate(data)})

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, {i: {i: 1} for i in range(n)})

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, row in self.rows.items():
            for j, v in row.items():
                out[i][j] = v
        return out

    def columns(self) -> list[dict[int, Fraction]]:
        cols: list[dict[int, Fraction]] = [{} for _ in range(self.ncols)]
        for i in sorted(self.rows):
            for j, v in self.rows[i].items():
                cols[j][i] = v
        return cols

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ncols, self.nrows, dict(enumerate(self.columns())))

    def apply(self, x: Sequence) -> list[Fraction]:
        if len(x) != self.ncols:
            raise DimensionMismatch("vector length does not match column count")
        out = [Fraction(0)] * self.nrows
        for i, row in self.rows.items():
            out[i] = sum((v * x[j] for j, v in row.items()), Fraction(0))
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch("inner dimensions differ")
        rows = {}
        for i, row in self.rows.items():
            acc: dict[int, Fraction] = {}
            for k, v in row.items():
                for j, w in other.rows.get(k, {}).items():
                    acc[j] = acc.get(j, 0) + v * w
            rows[i] = acc
        return ExactMatrix(self.nrows, other.ncols, rows)

    def is_zero(self) -> bool:
        return not self.rows

    def rank(self) -> int:
        ech = Echelon()
        for col in self.columns():
            ech.add(col)
        return ech.rank

    def kernel(self) -> list[list[Fraction]]:
        ech = Echelon(track=True)
        kernel = []
        for j, col in enumerate(self.columns()):
            residual, combo = ech.add(col, tag=j)
            if residual is None:
                vec = [Fraction(0)] * self.ncols
                for k, c in combo.items():
                    vec[k] = c
                kernel.append(vec)
        return kernel


class Echelon:
    """Incremental echelon basis of a span of sparse vectors.

    Each stored vector has a pivot equal to its smallest index; a new vector
    is reduced by repeatedly clearing its smallest index against the stored
    pivot.  With ``track=True`` every stored vector remembers its expression
    in terms of the tags of the vectors that were added.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict[int, tuple[dict, dict]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Mapping[int, Fraction], combo: dict | None = None):
        v = {i: exact(x) for i, x in vec.items() if x}
        combo = dict(combo or {})
        while v:
            i = min(v)
            if i not in self.pivots:
                break
            pvec, pcombo = self.pivots[i]
            f = v[i]
            for k, x in pvec.items():
                y = v.get(k, 0) - f * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
            if self.track:
                for k, x in pcombo.items():
                    y = combo.get(k, 0) - f * x
                    if y:
                        combo[k] = y
                    else:
                        combo.pop(k, None)
        else:
            return None, combo
        # remaining smallest index is not a pivot: reduce the rest for a canonical residual
        return v, combo

    def add(self, vec: Mapping[int, Fraction], tag=None):
        """Insert ``vec``; returns (residual or None, combination).

        When the vector is dependent the combination expresses
        ``vec - sum(c_k * added_k) = 0`` as ``{tag: 1, k: -c_k}``.
        """
        start = {tag: Fraction(1)} if self.track else {}
        residual, combo = self.reduce(vec, start)
        if residual is None:
            return None, combo
        i = min(residual)
        f = residual[i]
        residual = {k: x / f for k, x in residual.items()}
        if self.track:
            combo = {k: x / f for k, x in combo.items()}
        self.pivots[i] = (residual, combo)
        return residual, combo

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        residual, _ = self.reduce(vec)
        return residual is None


def solve_linear(M: ExactMatrix, v: Sequence) -> list[Fraction] | None:
    """One exact solution of ``M x = v`` or ``None`` when inconsistent."""
    if len(v) != M.nrows:
        raise DimensionMismatch("right-hand side length does not match row count")
    return solve_sparse(M.columns(), {i: exact(x) for i, x in enumerate(v) if x}, M.ncols)


def solve_sparse(columns: Sequence[Mapping[int, Fraction]], target: Mapping[int, Fraction],
                 ncols: int | None = None) -> list[Fraction] | None:
    """Solve sum_j x_j columns[j] = target, columns given as sparse vectors."""
    ncols = len(columns) if ncols is None else ncols
    ech = Echelon(track=True)
    for j, col in enumerate(columns):
        ech.add(col, tag=j)
    residual, combo = ech.reduce(target, {})
    if residual is not None:
        return None
    # target - sum combo-expressed pivots = 0 ; combo holds -coefficients
    x = [Fraction(0)] * ncols
    for k, c in combo.items():
        x[k] = -c
    return x


def rank_of(vectors: Iterable[Mapping[int, Fraction]]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def integer_rank(vectors: Iterable[Mapping[int, int]]) -> int:
    """Exact rank of integer sparse vectors by fraction-free elimination.

    Rows are kept primitive (content divided out), so the numbers stay small
    on the sparse +-1 matrices that bar complexes produce.
    """
    pivots: dict[int, dict[int, int]] = {}
    for vec in vectors:
        v = {i: int(x) for i, x in vec.items() if x}
        while v:
            i = min(v)
            p = pivots.get(i)
            if p is None:
                g = 0
                for x in v.values():
                    g = gcd(g, x)
                if v[i] < 0:
                    g = -g
                pivots[i] = {k: x // g for k, x in v.items()}
                break
            a, b = p[i], v[i]
            g = gcd(a, b)
            a, b = a // g, b // g
            w = {k: a * x for k, x in v.items()} if a != 1 else dict(v)
            for k, x in p.items():
                y = w.get(k, 0) - b * x
                if y:
                    w[k] = y
                else:
                    w.pop(k, None)
            if w:
                g = 0
                for x in w.values():
                    g = gcd(g, x)
                    if g == 1:
                        break
                if g != 1:
                    w = {k: x // g for k, x in w.items()}
            v = w
    return len(pivots)


def subsets(n: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(n), k))


def iter_nonzero(vec: Mapping[int, Fraction]) -> Iterator[tuple[int, Fraction]]:
    return ((i, x) for i, x in sorted(vec.items()) if x)
