"""Hochschild (co)homology of A = k[x_1..x_n] and the HKR maps.

Chains live in the reduced bar complex: a term ``a0 [a1 | ... | ai]`` has
monomials ``a1 .. ai`` of positive degree.  The coefficient ``a0`` is a
monomial of A (Hochschild chains) or a pair of monomials, left and right,
when the bar complex is read as the resolution of A over A ⊗ A.

Cochains are functions on tuples of nonconstant monomials with values in A.
A cochain has weight ``w`` when ``f(a1..ai)`` has multidegree
``w + deg a1 + ... + deg ai``.  The differential preserves weights.
Truncating inputs to total degree at most D gives a quotient complex.
Cohomology is read off as the image of ``H(C_{<=D'})`` in ``H(C_{<=D})``
for some ``D' > D``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product as iproduct
from math import comb
from typing import Callable, Mapping, Sequence

from .polyalg import (
    DegreeMismatch,
    Echelon,
    ExteriorElement,
    LaurentPoly,
    integer_rank,
    permutation_sign,
    solve_sparse,
    wedge,
)
from .ratseries import exact

Monomial = tuple


def _madd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _unit(n: int, k: int) -> Monomial:
    return tuple(1 if j == k else 0 for j in range(n))


def monomials_of_degree(n: int, d: int) -> list[Monomial]:
    """All exponent vectors of total degree d, in lexicographically decreasing order."""
    if d < 0:
        return []
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


def monomials_below(n: int, d: int) -> list[Monomial]:
    return [m for k in range(d + 1) for m in monomials_of_degree(n, k)]


def multidegrees_below(n: int, d: int) -> list[Monomial]:
    return monomials_below(n, d)


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


class BarChain:
    """Formal sum of ``coefficient [a1 | ... | ai]`` with exact coefficients.

    ``bimodule=False``: coefficient is a monomial a0 of A (Hochschild chain).
    ``bimodule=True``: coefficient is ``(left, right)``, read ``left ⊗ [..] ⊗ right``.
    """

    def __init__(self, nvars: int, length: int, terms: Mapping | None = None, bimodule: bool = False):
        self.nvars, self.length, self.bimodule = nvars, length, bimodule
        clean = {}
        for (coef, slots), c in (terms or {}).items():
            slots = tuple(tuple(a) for a in slots)
            if len(slots) != length:
                raise ValueError("slot count differs from the tensor length")
            if any(not any(a) for a in slots):
                continue  # a scalar slot is zero in the reduced complex
            coef = tuple(tuple(x) for x in coef) if bimodule else tuple(coef)
            key = (coef, slots)
            v = clean.get(key, 0) + exact(c)
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def monomial(cls, nvars, slots, a0=None, right=None, coeff=1, bimodule=False) -> "BarChain":
        zero = (0,) * nvars
        slots = tuple(tuple(a) for a in slots)
        if bimodule:
            coef = (tuple(a0 or zero), tuple(right or zero))
        else:
            coef = tuple(a0 or zero)
        return cls(nvars, len(slots), {(coef, slots): coeff}, bimodule)

    def _check(self, other):
        if (self.nvars, self.length, self.bimodule) != (other.nvars, other.length, other.bimodule):
            raise ValueError("chains of different shapes")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return BarChain(self.nvars, self.length, t, self.bimodule)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = exact(c)
        return BarChain(self.nvars, self.length, {k: v * c for k, v in self.terms.items()}, self.bimodule)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, BarChain) and (self.nvars, self.length, self.bimodule) ==
                (other.nvars, other.length, other.bimodule) and self.terms == other.terms)

    def multidegrees(self) -> set:
        out = set()
        for (coef, slots) in self.terms:
            total = (0,) * self.nvars
            for a in (coef if self.bimodule else (coef,)):
                total = _madd(total, a)
            for a in slots:
                total = _madd(total, a)
            out.add(total)
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*{coef}{list(slots)}" for (coef, slots), v in self.terms.items())


def bar_differential(c: BarChain) -> BarChain:
    """Reduced bar (bimodule) or Hochschild (chain) differential."""
    i = c.length
    if i < 1:
        raise ValueError("the differential needs tensor length >= 1")
    out: dict = {}

    def put(key, v):
        out[key] = out.get(key, 0) + v

    for (coef, slots), v in c.terms.items():
        if c.bimodule:
            left, right = coef
            put(((_madd(left, slots[0]), right), slots[1:]), v)
            for j in range(1, i):
                merged = slots[: j - 1] + (_madd(slots[j - 1], slots[j]),) + slots[j + 1:]
                put(((left, right), merged), v * (-1) ** j)
            put(((left, _madd(slots[-1], right)), slots[:-1]), v * (-1) ** i)
        else:
            put((_madd(coef, slots[0]), slots[1:]), v)
            for j in range(1, i):
                merged = slots[: j - 1] + (_madd(slots[j - 1], slots[j]),) + slots[j + 1:]
                put((coef, merged), v * (-1) ** j)
            put((_madd(coef, slots[-1]), slots[:-1]), v * (-1) ** i)
    return BarChain(c.nvars, i - 1, out, c.bimodule)


def augment(c: BarChain) -> BarChain:
    """Multiply the two coefficients of a bimodule chain: A ⊗ Ā^i ⊗ A -> A ⊗ Ā^i."""
    if not c.bimodule:
        raise ValueError("already a Hochschild chain")
    out: dict = {}
    for ((left, right), slots), v in c.terms.items():
        key = (_madd(left, right), slots)
        out[key] = out.get(key, 0) + v
    return BarChain(c.nvars, c.length, out, False)


def chain_basis(n: int, i: int, gamma: Monomial) -> list[tuple]:
    """Basis (a0, slots) of Hochschild chains of length i and multidegree gamma."""
    gamma = tuple(gamma)
    out = []

    def rec(rem, slots, k):
        if k == i:
            out.append((rem, tuple(slots)))
            return
        for a in _submonomials(rem):
            if any(a):
                rec(tuple(x - y for x, y in zip(rem, a)), slots + [a], k + 1)

    rec(gamma, [], 0)
    return sorted(out)


def _submonomials(m: Monomial):
    return list(iproduct(*(range(x + 1) for x in m)))


def chain_differential_matrix(n: int, i: int, gamma: Monomial):
    """Columns of b: C_i(gamma) -> C_{i-1}(gamma) with the two bases."""
    src = chain_basis(n, i, gamma)
    dst = chain_basis(n, i - 1, gamma) if i >= 1 else []
    index = {b: t for t, b in enumerate(dst)}
    cols = []
    for a0, slots in src:
        d = bar_differential(BarChain(n, i, {(a0, slots): 1}))
        cols.append({index[k]: v for k, v in d.terms.items()})
    return src, dst, cols


def hochschild_homology_dims(n: int, gamma: Monomial, max_length: int) -> list[int]:
    ranks = {}
    sizes = {}
    for i in range(max_length + 2):
        if i == 0:
            sizes[0] = len(chain_basis(n, 0, gamma))
            ranks[0] = 0
            continue
        src, dst, cols = chain_differential_matrix(n, i, gamma)
        sizes[i] = len(src)
        ech = Echelon()
        for col in cols:
            ech.add(col)
        ranks[i] = ech.rank
    return [sizes[i] - ranks[i] - ranks[i + 1] for i in range(max_length + 1)]


def forms_dim(n: int, i: int, gamma: Monomial) -> int:
    """dim of the multidegree-gamma part of Ω^i: pairs (T, m) with m + e_T = gamma."""
    return sum(1 for T in combinations(range(n), i) if all(gamma[t] >= 1 for t in T))


def polyvector_dim(n: int, i: int, w: Sequence[int]) -> int:
    """dim of the weight-w part of Λ^i T: pairs (S, c) with c - e_S = w, c >= 0."""
    return sum(1 for S in combinations(range(n), i)
               if all(w[k] + (1 if k in S else 0) >= 0 for k in range(n)))


def homology_basis(n: int, i: int, gamma: Monomial) -> list[BarChain]:
    """Cycle representatives of a basis of HH_i(A) in multidegree gamma."""
    src, dst, cols = chain_differential_matrix(n, i, gamma) if i >= 1 else (chain_basis(n, 0, gamma), [], None)
    if cols is None:
        kernel = [{t: Fraction(1)} for t in range(len(src))]
    else:
        ech = Echelon(track=True)
        kernel = []
        for t, col in enumerate(cols):
            res, combo = ech.add(col, tag=t)
            if res is None:
                kernel.append(combo)
    image = Echelon()
    _, _, up = chain_differential_matrix(n, i + 1, gamma)
    for col in up:
        image.add(col)
    reps = []
    for vec in kernel:
        res, _ = image.add(vec)
        if res is not None:
            reps.append(BarChain(n, i, {src[t]: c for t, c in vec.items()}))
    return reps


# ---------------------------------------------------------------------------
# Koszul resolution
# ---------------------------------------------------------------------------


class KoszulElement:
    """Element of Λ^i V ⊗ (A ⊗ A): {(S, (left, right)): coefficient}."""

    def __init__(self, nvars: int, degree: int, terms: Mapping | None = None):
        self.nvars, self.degree = nvars, degree
        clean = {}
        for (S, (l, r)), c in (terms or {}).items():
            S = tuple(S)
            if len(S) != degree:
                raise ValueError("exterior degree mismatch")
            sign = permutation_sign(S)
            if not sign:
                continue
            key = (tuple(sorted(S)), (tuple(l), tuple(r)))
            v = clean.get(key, 0) + exact(c) * sign
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def generator(cls, n, S, left=None, right=None, coeff=1):
        zero = (0,) * n
        return cls(n, len(S), {(tuple(S), (tuple(left or zero), tuple(right or zero))): coeff})

    def __add__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return KoszulElement(self.nvars, self.degree, t)

    def scale(self, c):
        return KoszulElement(self.nvars, self.degree, {k: v * exact(c) for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, KoszulElement) and (self.nvars, self.degree, self.terms) == (
            other.nvars, other.degree, other.terms)


def koszul_differential(k: KoszulElement) -> KoszulElement:
    """d(v_S) = Σ_r (-1)^(r-1) (x_{s_r} ⊗ 1 - 1 ⊗ x_{s_r}) v_{S - s_r}."""
    n = k.nvars
    out: dict = {}
    for (S, (l, r)), v in k.terms.items():
        for pos, s in enumerate(S):
            rest = S[:pos] + S[pos + 1:]
            sign = -1 if pos % 2 else 1
            e = _unit(n, s)
            for key, c in (((rest, (_madd(l, e), r)), sign), ((rest, (l, _madd(r, e))), -sign)):
                out[key] = out.get(key, 0) + v * c
    return KoszulElement(n, k.degree - 1, out)


@dataclass
class KoszulComplex:
    nvars: int

    def basis(self, i: int, gamma: Monomial) -> list[tuple]:
        """(S, (left, right)) with e_S + left + right = gamma."""
        n = self.nvars
        out = []
        for S in combinations(range(n), i):
            rem = tuple(g - (1 if k in S else 0) for k, g in enumerate(gamma))
            if min(rem, default=0) < 0:
                continue
            for l in _submonomials(rem):
                r = tuple(x - y for x, y in zip(rem, l))
                out.append((S, (l, r)))
        return sorted(out)

    def differential_matrix(self, i: int, gamma: Monomial):
        src, dst = self.basis(i, gamma), self.basis(i - 1, gamma)
        index = {b: t for t, b in enumerate(dst)}
        cols = []
        for S, lr in src:
            d = koszul_differential(KoszulElement(self.nvars, i, {(S, lr): 1}))
            cols.append({index[k]: v for k, v in d.terms.items()})
        return src, dst, cols

    def homology_dims(self, gamma: Monomial) -> list[int]:
        """Homology of K_n -> ... -> K_0 in multidegree gamma (K_0 has no augmentation)."""
        n = self.nvars
        ranks = [0] * (n + 2)
        for i in range(1, n + 1):
            _, _, cols = self.differential_matrix(i, gamma)
            ech = Echelon()
            for c in cols:
                ech.add(c)
            ranks[i] = ech.rank
        return [len(self.basis(i, gamma)) - ranks[i] - ranks[i + 1] for i in range(n + 1)]


def koszul_complex(n: int) -> KoszulComplex:
    if n < 1:
        raise ValueError("need at least one variable")
    return KoszulComplex(n)


def comparison_phi(k: KoszulElement) -> BarChain:
    """v_S ↦ Σ_σ sgn(σ) [x_{σ(s1)} | ... | x_{σ(si)}], coefficients carried along."""
    n, i = k.nvars, k.degree
    out: dict = {}
    for (S, (l, r)), v in k.terms.items():
        for perm in permutations(range(i)):
            slots = tuple(_unit(n, S[p]) for p in perm)
            key = ((l, r), slots)
            out[key] = out.get(key, 0) + v * permutation_sign(perm)
    return BarChain(n, i, out, bimodule=True)


# ---------------------------------------------------------------------------
# cochains
# ---------------------------------------------------------------------------


class HochschildCochain:
    """Reduced cochain Ā^{⊗i} -> A given by a function on monomial tuples."""

    def __init__(self, nvars: int, degree: int, func: Callable[[tuple], LaurentPoly], label: str = ""):
        self.nvars, self.degree, self.func, self.label = nvars, degree, func, label
        self._cache: dict = {}

    def __call__(self, *slots) -> LaurentPoly:
        slots = tuple(tuple(a) for a in slots)
        if len(slots) != self.degree:
            raise DegreeMismatch(f"cochain of degree {self.degree} got {len(slots)} arguments")
        if any(not any(a) for a in slots):
            return LaurentPoly.zero(self.nvars)
        if slots not in self._cache:
            self._cache[slots] = self.func(slots)
        return self._cache[slots]

    def table(self, cap: int) -> dict:
        """Nonzero values on all input tuples of total degree <= cap."""
        out = {}
        for slots in input_tuples(self.nvars, self.degree, cap):
            v = self(*slots)
            if v:
                out[slots] = v
        return out

    def evaluate(self, c: BarChain) -> LaurentPoly:
        """Σ coeff · a0 · f(a1..ai) for a Hochschild chain of the same length."""
        if c.length != self.degree:
            raise DegreeMismatch("tensor length differs from the cochain degree")
        total = LaurentPoly.zero(self.nvars)
        for (a0, slots), v in c.terms.items():
            total = total + self(*slots) * LaurentPoly.monomial(a0, v)
        return total

    def __add__(self, other):
        return HochschildCochain(self.nvars, self.degree, lambda s: self(*s) + other(*s))

    def __sub__(self, other):
        return HochschildCochain(self.nvars, self.degree, lambda s: self(*s) - other(*s))

    def scale(self, c):
        c = exact(c)
        return HochschildCochain(self.nvars, self.degree, lambda s: self(*s) * c)

    def agrees_with(self, other, cap: int) -> bool:
        return self.table(cap) == other.table(cap)


def input_tuples(n: int, i: int, cap: int) -> list[tuple]:
    """i-tuples of nonconstant monomials with total degree <= cap."""
    out = []

    def rec(slots, budget):
        if len(slots) == i:
            out.append(tuple(slots))
            return
        need = i - len(slots) - 1
        for d in range(1, budget - need + 1):
            for m in monomials_of_degree(n, d):
                rec(slots + [m], budget - d)

    rec([], cap)
    return out


def constant_cochain(n: int, value) -> HochschildCochain:
    v = value if isinstance(value, LaurentPoly) else LaurentPoly.constant(n, value)
    return HochschildCochain(n, 0, lambda s: v, "const")


def cochain_differential(f: HochschildCochain) -> HochschildCochain:
    """(δf)(a1..a_{i+1}) = a1 f(a2..) + Σ_j (-1)^j f(..a_j a_{j+1}..) + (-1)^{i+1} f(a1..a_i) a_{i+1}."""
    n, i = f.nvars, f.degree

    def value(s):
        total = LaurentPoly.monomial(s[0]) * f(*s[1:])
        for j in range(1, i + 1):
            merged = s[: j - 1] + (_madd(s[j - 1], s[j]),) + s[j + 1:]
            total = total + f(*merged) * (-1) ** j
        total = total + f(*s[:-1]) * LaurentPoly.monomial(s[-1]) * (-1) ** (i + 1)
        return total

    return HochschildCochain(n, i + 1, value, f"δ{f.label}")


def _poly_det(rows: list[list[LaurentPoly]], n: int) -> LaurentPoly:
    k = len(rows)
    total = LaurentPoly.zero(n)
    for perm in permutations(range(k)):
        term = LaurentPoly.constant(n, permutation_sign(perm))
        for r, c in enumerate(perm):
            term = term * rows[r][c]
            if not term:
                break
        total = total + term
    return total


def polyvector(n: int, terms: Mapping) -> ExteriorElement:
    """Polyvector Σ coeff ∂_S from {S: coefficient}; coefficients may be monomial tuples."""
    comps = {}
    for S, c in terms.items():
        if isinstance(c, tuple):
            c = LaurentPoly.monomial(c)
        comps[tuple(S)] = c
    return ExteriorElement(n, n, comps, "polyvector")


def hkr_cochain(p: ExteriorElement, degree: int | None = None) -> HochschildCochain:
    """a1 ⊗ .. ⊗ ai ↦ Σ_S p_S Σ_σ sgn σ ∂_{S σ(1)} a1 ⋯ ∂_{S σ(i)} ai.

    ``degree`` is only needed for the zero polyvector.
    """
    if p.kind != "polyvector":
        raise ValueError("hkr_cochain expects a polyvector")
    i = p.degree() if degree is None or not p.is_zero() else degree
    n = p.nvars

    def value(slots):
        total = LaurentPoly.zero(n)
        for S, coeff in p.components.items():
            rows = [[LaurentPoly.monomial(a).derivative(s) for s in S] for a in slots]
            total = total + coeff * _poly_det(rows, n)
        return total

    return HochschildCochain(n, i, value, f"hkr({p})")


def hkr_chain(c: BarChain) -> ExteriorElement:
    """a0 [a1 | .. | ai] ↦ a0 da1 ∧ .. ∧ dai."""
    if c.bimodule:
        c = augment(c)
    n = c.nvars
    total = ExteriorElement(n, n, {}, "form")
    for (a0, slots), v in c.terms.items():
        term = ExteriorElement.scalar(n, n, LaurentPoly.monomial(a0, v))
        for a in slots:
            m = LaurentPoly.monomial(a)
            da = ExteriorElement(n, n, {(k,): m.derivative(k) for k in range(n)})
            term = wedge(term, da)
        total = total + term
    return total


def canonical_pairing(p: ExteriorElement, k: KoszulElement) -> LaurentPoly:
    """⟨∂_S, v_T⟩ = δ_ST extended over the coefficients (left ⊗ right multiplied)."""
    n = p.nvars
    total = LaurentPoly.zero(n)
    for (T, (l, r)), v in k.terms.items():
        c = p.components.get(T)
        if c is not None:
            total = total + c * LaurentPoly.monomial(_madd(l, r), v)
    return total


def evaluate_on_resolution(f: HochschildCochain, c: BarChain) -> LaurentPoly:
    """f applied to a bimodule bar chain, coefficients multiplied into the value."""
    return f.evaluate(augment(c) if c.bimodule else c)


def cup_product(f: HochschildCochain, g: HochschildCochain) -> HochschildCochain:
    p, q = f.degree, g.degree
    return HochschildCochain(f.nvars, p + q, lambda s: f(*s[:p]) * g(*s[p:]), f"{f.label}∪{g.label}")


def action_D(f: HochschildCochain, c: BarChain) -> BarChain:
    """Apply f to the first deg f slots of each term and multiply into a0.

    The value of f is a polynomial, so the result is a sum of chains
    with monomial coefficients.
    """
    if c.bimodule:
        c = augment(c)
    p = f.degree
    if p > c.length:
        raise DegreeMismatch("cochain degree exceeds the tensor length")
    out: dict = {}
    for (a0, slots), v in c.terms.items():
        val = f(*slots[:p])
        for e, coeff in val.terms.items():
            key = (_madd(a0, e), slots[p:])
            out[key] = out.get(key, 0) + v * coeff
    return BarChain(c.nvars, c.length - p, out)


def pairing(f: HochschildCochain, c: BarChain) -> Fraction:
    """ε(action_D(f, c)): the constant term of the full contraction."""
    if f.degree != c.length:
        raise DegreeMismatch("pairing needs deg f = tensor length")
    zero = (0,) * c.nvars
    d = action_D(f, c)
    return d.terms.get((zero, ()), Fraction(0))


def A_pairing(f: HochschildCochain, c: BarChain) -> LaurentPoly:
    """The A-valued contraction: the polynomial a0 f(a1..ai) summed over terms."""
    if f.degree != c.length:
        raise DegreeMismatch("pairing needs deg f = tensor length")
    total = LaurentPoly.zero(c.nvars)
    for (a0, _), v in action_D(f, c).terms.items():
        total = total + LaurentPoly.monomial(a0, v)
    return total


# ---------------------------------------------------------------------------
# truncated cochain complexes, graded by weight
# ---------------------------------------------------------------------------


class TruncatedCochains:
    """Weight-w cochains restricted to inputs of total degree <= cap.

    A cochain is a vector indexed by input tuples; the entry is the coefficient
    of the single monomial x^(w + Σ deg a_j) in the value.
    """

    def __init__(self, n: int, weight: Sequence[int], cap: int):
        self.n, self.weight, self.cap = n, tuple(weight), cap
        self._bases: dict = {}
        self._diffs: dict = {}

    def _valid(self, slots) -> bool:
        total = list(self.weight)
        for a in slots:
            for k, x in enumerate(a):
                total[k] += x
        return min(total, default=0) >= 0

    def basis(self, i: int) -> list[tuple]:
        if i < 0:
            return []
        if i not in self._bases:
            if i == 0:
                self._bases[0] = [()] if self._valid(()) else []
            else:
                self._bases[i] = [s for s in input_tuples(self.n, i, self.cap) if self._valid(s)]
        return self._bases[i]

    def index(self, i: int) -> dict:
        key = ("index", i)
        if key not in self._diffs:
            self._diffs[key] = {s: t for t, s in enumerate(self.basis(i))}
        return self._diffs[key]

    def differential(self, i: int) -> list[dict]:
        """Columns of δ: C^i -> C^{i+1} (one column per basis tuple of C^i)."""
        if i in self._diffs:
            return self._diffs[i]
        src = self.index(i)
        cols = [dict() for _ in src]
        for r, s in enumerate(self.basis(i + 1)):
            # row s of δ: which f-values enter (δf)(s)
            entries = []
            head = s[1:]
            if head in src:
                entries.append((src[head], 1))
            for j in range(1, i + 1):
                merged = s[: j - 1] + (_madd(s[j - 1], s[j]),) + s[j + 1:]
                if merged in src:
                    entries.append((src[merged], (-1) ** j))
            tail = s[:-1]
            if tail in src:
                entries.append((src[tail], (-1) ** (i + 1)))
            for t, v in entries:
                col = cols[t]
                x = col.get(r, 0) + v
                if x:
                    col[r] = x
                else:
                    col.pop(r, None)
        self._diffs[i] = cols
        return cols

    def vector(self, f: HochschildCochain, i: int | None = None) -> dict:
        """Coordinates of f's weight-w part."""
        i = f.degree if i is None else i
        out = {}
        for t, s in enumerate(self.basis(i)):
            m = tuple(w + sum(a[k] for a in s) for k, w in enumerate(self.weight))
            c = f(*s).coefficient(m)
            if c:
                out[t] = c
        return out

    def cocycles(self, i: int) -> list[dict]:
        ech = Echelon(track=True)
        kernel = []
        for t, col in enumerate(self.differential(i)):
            res, combo = ech.add(col, tag=t)
            if res is None:
                kernel.append(combo)
        return kernel

    def coboundary_echelon(self, i: int) -> Echelon:
        ech = Echelon()
        if i > 0:
            for col in self.differential(i - 1):
                ech.add(col)
        return ech

    def solve_coboundary(self, vec: Mapping, i: int) -> list | None:
        if i == 0:
            return [] if not any(vec.values()) else None
        return solve_sparse(self.differential(i - 1), vec, len(self.basis(i - 1)))


def stable_cohomology_dim(n: int, i: int, weight: Sequence[int], cap: int, margin: int = 1) -> int:
    """dim of the image of H^i(C_{<=cap+margin}) in H^i(C_{<=cap}) in the given weight.

    Restriction r is onto and commutes with the differential, so the image of
    the big cocycles contains the small coboundaries and
    dim = dim Z_big - dim(Z_big ∩ ker r) - rank δ_small.
    """
    small = TruncatedCochains(n, weight, cap)
    big = TruncatedCochains(n, weight, cap + margin)
    cols = big.differential(i)
    z_big = len(cols) - integer_rank(cols)
    keep = small.index(i)
    high = [col for s, col in zip(big.basis(i), cols) if s not in keep]
    z_high = len(high) - integer_rank(high)
    b_small = integer_rank(small.differential(i - 1)) if i > 0 else 0
    return z_big - z_high - b_small


def hkr_weights(n: int, i: int, max_internal: int) -> list[tuple]:
    """Weights w = c - e_S with |c| <= max_internal, plus their zero-dimensional neighbours."""
    out = set()
    for w in iproduct(range(-1, max_internal + 1), repeat=n):
        if sum(w) + i <= max_internal and sum(1 for x in w if x < 0) <= min(i + 1, n):
            out.add(w)
    return sorted(out)


def is_truncated_coboundary(f: HochschildCochain, cap: int) -> tuple[bool, dict]:
    """Decide whether f is δg on inputs of total degree <= cap, weight by weight."""
    n, i = f.nvars, f.degree
    weights = set()
    for s in input_tuples(n, i, cap):
        val = f(*s)
        for e in val.terms:
            weights.add(tuple(x - sum(a[k] for a in s) for k, x in enumerate(e)))
    failures = {}
    for w in sorted(weights):
        T = TruncatedCochains(n, w, cap)
        vec = T.vector(f)
        if T.solve_coboundary(vec, i) is None:
            failures[w] = len(vec)
    return not failures, failures


def hkr_cup_check(a: ExteriorElement, b: ExteriorElement, factor=1, cap: int | None = None) -> tuple[bool, dict]:
    """Is factor · hkr(a) ∪ hkr(b) − hkr(a ∧ b) a coboundary on inputs of degree <= cap?"""
    p, q = a.degree(), b.degree()
    cap = p + q + 1 if cap is None else cap
    diff = cup_product(hkr_cochain(a), hkr_cochain(b)).scale(factor) - hkr_cochain(wedge(a, b), p + q)
    return is_truncated_coboundary(diff, cap)


def shuffle_factor(p: int, q: int) -> int:
    """The factor C(p+q, p) relating cup of HKR images to HKR of the wedge."""
    return comb(p + q, p)


def pairing_gram(n: int, i: int, gamma: Monomial) -> list[list[Fraction]]:
    """Rows: homology basis of HH_i in multidegree gamma; columns: (S, m) with
    m + e_S = gamma; entry = coefficient of x^m in the A-valued pairing of
    hkr(∂_S) with the cycle."""
    cycles = homology_basis(n, i, gamma)
    cols = []
    for S in combinations(range(n), i):
        m = tuple(g - (1 if k in S else 0) for k, g in enumerate(gamma))
        if min(m, default=0) >= 0:
            cols.append((S, m))
    cochains = {S: hkr_cochain(polyvector(n, {S: 1})) for S, _ in cols}
    rows = []
    for z in cycles:
        rows.append([A_pairing(cochains[S], z).coefficient(m) for S, m in cols])
    return rows


def scalar_pairing_gram(n: int, i: int, gamma: Monomial) -> list[list[Fraction]]:
    """Gram matrix of ε-pairings between HH_i(gamma) cycles and hkr(x^c ∂_S) of weight -gamma."""
    cycles = homology_basis(n, i, gamma)
    cols = []
    for S in combinations(range(n), i):
        c = tuple((1 if k in S else 0) - g for k, g in enumerate(gamma))
        if min(c, default=0) >= 0:
            cols.append(hkr_cochain(polyvector(n, {S: c})))
    return [[pairing(f, z) for f in cols] for z in cycles]


def matrix_rank(rows: list[list[Fraction]]) -> int:
    ech = Echelon()
    for r in rows:
        ech.add({k: v for k, v in enumerate(r) if v})
    return ech.rank


def is_invertible(rows: list[list[Fraction]]) -> bool:
    return bool(rows) and all(len(r) == len(rows) for r in rows) and matrix_rank(rows) == len(rows)
