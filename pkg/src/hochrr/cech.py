"""Projective spaces, locally free sheaves and exact Čech cohomology.

Model
-----
A variety is a product of projective spaces with homogeneous coordinates
``X_0 .. X_{N-1}`` (all factors concatenated).  Every function on a chart
intersection is written as a Laurent polynomial in the ``X`` of degree zero in
each factor; restriction between opens is then literally inclusion.

A locally free sheaf carries, on every chart ``c``, a frame whose elements
have torus weights ``weights[c][a]``.  Transition matrices ``g[i, j]`` convert
coordinates from chart ``j`` to chart ``i`` (``s_i = g_ij s_j``), and every
nonzero entry is a single monomial of weight ``w_j(b) - w_i(a)``.  A section of
weight ``mu`` therefore has one monomial per frame element, and the Čech
complex of any such sheaf splits into finite scalar complexes, one per weight.
A Čech component on ``U_I`` is always expressed in the frame of chart
``I[0]``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, combinations_with_replacement, permutations, product as iproduct
from math import comb
from typing import Callable, Mapping, Sequence

from .polyalg import Echelon, LaurentPoly, merge_sign, permutation_sign
from .ratseries import exact, format_scalar


class WindowOverflow(RuntimeError):
    pass


class RankExceeded(ValueError):
    pass


class CoefficientMismatch(ValueError):
    pass


class SheafMismatch(ValueError):
    pass


class NotTopDegree(ValueError):
    pass


class CocycleViolation(ValueError):
    pass


DEFAULT_MAX_WINDOW = 40


def max_window() -> int:
    return int(os.environ.get("HOCHRR_MAX_WINDOW", DEFAULT_MAX_WINDOW))


# ---------------------------------------------------------------------------
# varieties
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Variety:
    factors: tuple[int, ...]

    def __post_init__(self):
        if not self.factors or any(n < 1 for n in self.factors):
            raise ValueError("factors must be projective dimensions >= 1")

    @property
    def name(self) -> str:
        return "x".join(f"P{n}" for n in self.factors)

    @property
    def dim(self) -> int:
        return sum(self.factors)

    @property
    def nvars(self) -> int:
        return sum(n + 1 for n in self.factors)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, k = [], 0
        for n in self.factors:
            out.append(k)
            k += n + 1
        return tuple(out)

    @cached_property
    def factor_of(self) -> tuple[int, ...]:
        return tuple(f for f, n in enumerate(self.factors) for _ in range(n + 1))

    @cached_property
    def charts(self) -> tuple[tuple[int, ...], ...]:
        return tuple(iproduct(*(range(n + 1) for n in self.factors)))

    def chart_vars(self, c: int) -> tuple[int, ...]:
        return tuple(o + t for o, t in zip(self.offsets, self.charts[c]))

    def affine_vars(self, c: int) -> tuple[int, ...]:
        """Global indices k of the affine coordinates X_k / X_{chart} of chart c."""
        cv = set(self.chart_vars(c))
        return tuple(k for k in range(self.nvars) if k not in cv)

    def affine_coordinate(self, c: int, k: int) -> LaurentPoly:
        e = [0] * self.nvars
        e[k] += 1
        e[self.chart_vars(c)[self.factor_of[k]]] -= 1
        return LaurentPoly.monomial(e)

    def differential(self, f: LaurentPoly, c: int) -> list[LaurentPoly]:
        """Coefficients of df on the basis dy_k of chart c."""
        cv = self.chart_vars(c)
        out = []
        for k in self.affine_vars(c):
            e = [0] * self.nvars
            e[cv[self.factor_of[k]]] = 1
            out.append(f.derivative(k) * LaurentPoly.monomial(e))
        return out

    def nerve(self, q: int) -> list[tuple[int, ...]]:
        return _nerve(len(self.charts), q)

    @cached_property
    def max_cech_degree(self) -> int:
        return len(self.charts) - 1

    def allowed_negative(self, I: Sequence[int]) -> frozenset:
        return frozenset(k for c in I for k in self.chart_vars(c))

    def factor_degrees(self, exps: Sequence[int]) -> tuple[int, ...]:
        out = [0] * len(self.factors)
        for k, a in enumerate(exps):
            out[self.factor_of[k]] += a
        return tuple(out)

    def is_regular(self, f: LaurentPoly, I: Sequence[int]) -> bool:
        allowed = self.allowed_negative(I)
        for e in f.terms:
            if any(self.factor_degrees(e)):
                return False
            if any(a < 0 and k not in allowed for k, a in enumerate(e)):
                return False
        return True

    def __str__(self):
        return self.name


_NERVE_CACHE: dict = {}


def _nerve(ncharts: int, q: int):
    key = (ncharts, q)
    if key not in _NERVE_CACHE:
        _NERVE_CACHE[key] = list(combinations(range(ncharts), q + 1))
    return _NERVE_CACHE[key]


def projective_space(n: int) -> Variety:
    return Variety((n,))


def product(V: Variety, W: Variety) -> Variety:
    return Variety(V.factors + W.factors)


def parse_variety(text: str) -> Variety:
    """'P2', 'P1xP1', 'P1 x P2' ..."""
    parts = [p.strip() for p in text.replace("×", "x").split("x")]
    try:
        dims = tuple(int(p[1:]) for p in parts if p)
        if not all(p.upper().startswith("P") for p in parts if p):
            raise ValueError
    except ValueError:
        raise ValueError(f"cannot parse variety {text!r}") from None
    return Variety(dims)


# ---------------------------------------------------------------------------
# matrices of Laurent polynomials
# ---------------------------------------------------------------------------

Matrix = list  # list[list[LaurentPoly]]


def mat_zero(nvars, rows, cols) -> Matrix:
    z = LaurentPoly.zero(nvars)
    return [[z] * cols for _ in range(rows)]


def mat_identity(nvars, n) -> Matrix:
    one, z = LaurentPoly.constant(nvars), LaurentPoly.zero(nvars)
    return [[one if i == j else z for j in range(n)] for i in range(n)]


def mat_mul(A: Matrix, B: Matrix, nvars: int) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        nz = [(k, v) for k, v in enumerate(row) if v]
        new = []
        for j in range(cols):
            acc = LaurentPoly.zero(nvars)
            for k, v in nz:
                w = B[k][j]
                if w:
                    acc = acc + v * w
            new.append(acc)
        out.append(new)
    assert inner == len(A[0])
    return out


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A: Matrix, s) -> Matrix:
    return [[a * s for a in row] for row in A]


def mat_kron(A: Matrix, B: Matrix) -> Matrix:
    out = []
    for ra in A:
        for rb in B:
            out.append([a * b for a in ra for b in rb])
    return out


def mat_is_zero(A: Matrix) -> bool:
    return all(not v for row in A for v in row)


def mat_const(nvars, data) -> Matrix:
    return [[LaurentPoly.constant(nvars, v) if v else LaurentPoly.zero(nvars) for v in row] for row in data]


def mat_transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)] if A else []


def det(A: Matrix, nvars: int) -> LaurentPoly:
    n = len(A)
    if n == 0:
        return LaurentPoly.constant(nvars)
    total = LaurentPoly.zero(nvars)
    for perm in permutations(range(n)):
        term = LaurentPoly.constant(nvars, permutation_sign(perm))
        for i, j in enumerate(perm):
            v = A[i][j]
            if not v:
                break
            term = term * v
        else:
            total = total + term
    return total


# ---------------------------------------------------------------------------
# frame systems: sheaves and Hom sheaves
# ---------------------------------------------------------------------------


class FrameSystem:
    """Common surface used by the per-weight Čech machinery."""

    variety: Variety
    rank: int

    def weight(self, c: int, a: int) -> tuple[int, ...]:
        raise NotImplementedError

    def reframe_column(self, i: int, j: int, a: int) -> list[tuple[int, LaurentPoly]]:
        """Image of frame vector a of chart j written in chart i's frame."""
        raise NotImplementedError

    @cached_property
    def _weights(self):
        return [[self.weight(c, a) for a in range(self.rank)] for c in range(len(self.variety.charts))]

    @cached_property
    def _scalar_columns(self):
        return {}

    def scalar_column(self, i, j, a):
        key = (i, j, a)
        cache = self._scalar_columns
        if key not in cache:
            cache[key] = [(b, g.single_term()[1]) for b, g in self.reframe_column(i, j, a)]
        return cache[key]

    @cached_property
    def frame_degrees(self) -> set:
        V = self.variety
        return {V.factor_degrees(w) for ws in self._weights for w in ws}

    @cached_property
    def weight_bound(self) -> int:
        b = 0
        for ws in self._weights:
            for w in ws:
                b = max([b] + [abs(x) for x in w])
        for d in self.frame_degrees:
            b = max([b] + [abs(x) for x in d])
        return b

    def reframe(self, vec: Sequence[LaurentPoly], i: int, j: int) -> list[LaurentPoly]:
        nv = self.variety.nvars
        out = [LaurentPoly.zero(nv) for _ in range(self.rank)]
        for a, v in enumerate(vec):
            if v:
                for b, g in self.reframe_column(i, j, a):
                    out[b] = out[b] + g * v
        return out


class SheafDescriptor(FrameSystem):
    """Locally free sheaf given by transition matrices on the standard atlas."""

    def __init__(self, variety: Variety, rank: int, transitions: Mapping, weights: Mapping,
                 key: str, check: bool | None = None):
        self.variety = variety
        self.rank = rank
        self.key = key
        self.transitions = {k: [list(r) for r in m] for k, m in transitions.items()}
        self.weights = {c: tuple(tuple(w) for w in ws) for c, ws in weights.items()}
        if check is None:
            check = rank <= 3
        if check:
            self.validate()

    def weight(self, c, a):
        return self.weights[c][a]

    def transition(self, i: int, j: int) -> Matrix:
        return self.transitions[(i, j)]

    @cached_property
    def _columns(self):
        return {}

    def reframe_column(self, i, j, a):
        key = (i, j, a)
        if key not in self._columns:
            g = self.transitions[(i, j)]
            self._columns[key] = [(b, g[b][a]) for b in range(self.rank) if g[b][a]]
        return self._columns[key]

    def validate(self):
        V, nv, r = self.variety, self.variety.nvars, self.rank
        m = len(V.charts)
        ident = mat_identity(nv, r)
        for i in range(m):
            if self.transitions[(i, i)] != ident:
                raise CocycleViolation(f"g_{i}{i} is not the identity")
            for j in range(m):
                g = self.transitions[(i, j)]
                for a in range(r):
                    for b in range(r):
                        v = g[a][b]
                        if not v:
                            continue
                        if len(v.terms) != 1:
                            raise CocycleViolation("transition entries must be monomials")
                        e, _ = v.single_term()
                        want = tuple(x - y for x, y in zip(self.weights[j][b], self.weights[i][a]))
                        if e != want:
                            raise CocycleViolation(f"entry ({a},{b}) of g_{i}{j} has the wrong weight")
                        if not V.is_regular(v, (i, j)):
                            raise CocycleViolation("transition entry is not regular on the overlap")
                for k in range(m):
                    lhs = mat_mul(g, self.transitions[(j, k)], nv)
                    if lhs != self.transitions[(i, k)]:
                        raise CocycleViolation(f"cocycle condition fails on ({i},{j},{k})")

    def __eq__(self, other):
        return isinstance(other, SheafDescriptor) and (self.variety, self.key) == (other.variety, other.key)

    def __hash__(self):
        return hash((self.variety, self.key))

    def __repr__(self):
        return f"SheafDescriptor({self.key} on {self.variety.name}, rank {self.rank})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        trans = {}
        for (i, j), g in sorted(self.transitions.items()):
            trans[f"{i},{j}"] = [[[[list(e), format_scalar(c)] for e, c in v.terms.items()] for v in row]
                                 for row in g]
        return {
            "variety": {"factors": list(self.variety.factors)},
            "key": self.key,
            "rank": self.rank,
            "weights": {str(c): [list(w) for w in ws] for c, ws in sorted(self.weights.items())},
            "transitions": trans,
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "SheafDescriptor":
        V = Variety(tuple(doc["variety"]["factors"]))
        nv = V.nvars
        trans = {}
        for k, g in doc["transitions"].items():
            i, j = (int(x) for x in k.split(","))
            trans[(i, j)] = [[LaurentPoly(nv, {tuple(e): Fraction(c) for e, c in entry}) for entry in row]
                             for row in g]
        weights = {int(c): [tuple(w) for w in ws] for c, ws in doc["weights"].items()}
        return cls(V, int(doc["rank"]), trans, weights, doc["key"], check=True)


def dumps_sheaf(E: SheafDescriptor) -> str:
    return json.dumps(E.to_json(), sort_keys=True, separators=(",", ":"))


def loads_sheaf(text: str) -> SheafDescriptor:
    return SheafDescriptor.from_json(json.loads(text))


class HomSystem(FrameSystem):
    """Frames of Hom(E, F); index b * rank(E) + a is the entry (row b, column a)."""

    def __init__(self, source: SheafDescriptor, target: SheafDescriptor):
        if source.variety != target.variety:
            raise SheafMismatch("sheaves on different varieties")
        self.source, self.target = source, target
        self.variety = source.variety
        self.rank = source.rank * target.rank

    def weight(self, c, idx):
        b, a = divmod(idx, self.source.rank)
        return tuple(x - y for x, y in zip(self.target.weight(c, b), self.source.weight(c, a)))

    @cached_property
    def _columns(self):
        return {}

    def reframe_column(self, i, j, idx):
        key = (i, j, idx)
        if key not in self._columns:
            rE = self.source.rank
            b, a = divmod(idx, rE)
            out = []
            # new M = gF_ij M gE_ji
            for b2, gf in self.target.reframe_column(i, j, b):
                for a2 in range(rE):
                    ge = self.source.transitions[(j, i)][a][a2]
                    if ge:
                        out.append((b2 * rE + a2, gf * ge))
            self._columns[key] = out
        return self._columns[key]

    def __eq__(self, other):
        return isinstance(other, HomSystem) and (self.source, self.target) == (other.source, other.target)

    def __hash__(self):
        return hash(("Hom", self.source, self.target))


# ---------------------------------------------------------------------------
# sheaf constructors
# ---------------------------------------------------------------------------

_SHEAVES: dict = {}


def _cached(V: Variety, key: str, build: Callable[[], SheafDescriptor]) -> SheafDescriptor:
    k = (V, key)
    if k not in _SHEAVES:
        _SHEAVES[k] = build()
    return _SHEAVES[k]


def _as_degrees(V: Variety, d) -> tuple[int, ...]:
    if isinstance(d, int):
        d = (d,) * len(V.factors) if len(V.factors) == 1 else None
        if d is None:
            raise ValueError("products need one degree per factor")
    d = tuple(int(x) for x in d)
    if len(d) != len(V.factors):
        raise ValueError(f"expected {len(V.factors)} degrees, got {len(d)}")
    return d


def line_bundle(V: Variety, d) -> SheafDescriptor:
    """O(d) with frame X_{c}^d on chart c, so H^0 = degree-d forms."""
    d = _as_degrees(V, d)
    key = "O" if not any(d) else "O(" + ",".join(map(str, d)) + ")"

    def build():
        nv = V.nvars
        weights, trans = {}, {}
        for c in range(len(V.charts)):
            w = [0] * nv
            for f, k in enumerate(V.chart_vars(c)):
                w[k] += d[f]
            weights[c] = [tuple(w)]
        for i in range(len(V.charts)):
            for j in range(len(V.charts)):
                e = tuple(a - b for a, b in zip(weights[j][0], weights[i][0]))
                trans[(i, j)] = [[LaurentPoly.monomial(e)]]
        return SheafDescriptor(V, 1, trans, weights, key)

    return _cached(V, key, build)


def structure_sheaf(V: Variety) -> SheafDescriptor:
    return line_bundle(V, (0,) * len(V.factors))


def cotangent(V: Variety) -> SheafDescriptor:
    """Ω¹ with frame dy_k on each chart; transitions are Jacobians."""

    def build():
        nv = V.nvars
        weights, trans = {}, {}
        for c in range(len(V.charts)):
            ws = []
            for k in V.affine_vars(c):
                w = [0] * nv
                w[k] += 1
                w[V.chart_vars(c)[V.factor_of[k]]] -= 1
                ws.append(tuple(w))
            weights[c] = ws
        for i in range(len(V.charts)):
            for j in range(len(V.charts)):
                cols = [V.differential(V.affine_coordinate(j, k), i) for k in V.affine_vars(j)]
                trans[(i, j)] = mat_transpose(cols)
        return SheafDescriptor(V, V.dim, trans, weights, "Omega1")

    return _cached(V, "Omega1", build)


def tangent(V: Variety) -> SheafDescriptor:
    return dual(cotangent(V))


def dual(E: SheafDescriptor) -> SheafDescriptor:
    if E.key == "O":
        return E
    if E.key.startswith("dual(") and E.key.endswith(")"):
        inner = E.key[5:-1]
        if (E.variety, inner) in _SHEAVES:
            return _SHEAVES[(E.variety, inner)]
    key = f"dual({E.key})"

    def build():
        V = E.variety
        trans = {(i, j): mat_transpose(E.transitions[(j, i)]) for (i, j) in E.transitions}
        weights = {c: [tuple(-x for x in w) for w in ws] for c, ws in E.weights.items()}
        return SheafDescriptor(V, E.rank, trans, weights, key)

    return _cached(E.variety, key, build)


def tensor(*sheaves: SheafDescriptor) -> SheafDescriptor:
    """Tensor product; frame (a, b) sits at index a * rank(F) + b."""
    if not sheaves:
        raise ValueError("tensor of nothing")
    kept = [S for S in sheaves if S.key != "O"]
    if not kept:
        return sheaves[0]
    sheaves = kept
    if len(sheaves) == 1:
        return sheaves[0]
    E, F = sheaves[0], tensor(*sheaves[1:])
    if E.variety != F.variety:
        raise SheafMismatch("sheaves on different varieties")
    key = f"({E.key})*({F.key})"

    def build():
        trans = {k: mat_kron(E.transitions[k], F.transitions[k]) for k in E.transitions}
        weights = {c: [tuple(x + y for x, y in zip(we, wf)) for we in E.weights[c] for wf in F.weights[c]]
                   for c in E.weights}
        return SheafDescriptor(E.variety, E.rank * F.rank, trans, weights, key, check=False)

    return _cached(E.variety, key, build)


def direct_sum(*sheaves: SheafDescriptor) -> SheafDescriptor:
    if len(sheaves) == 1:
        return sheaves[0]
    V = sheaves[0].variety
    key = "(" + ")+(".join(S.key for S in sheaves) + ")"

    def build():
        nv = V.nvars
        r = sum(S.rank for S in sheaves)
        trans = {}
        for k in sheaves[0].transitions:
            g = mat_zero(nv, r, r)
            off = 0
            for S in sheaves:
                for a in range(S.rank):
                    for b in range(S.rank):
                        g[off + a][off + b] = S.transitions[k][a][b]
                off += S.rank
            trans[k] = g
        weights = {c: [w for S in sheaves for w in S.weights[c]] for c in sheaves[0].weights}
        return SheafDescriptor(V, r, trans, weights, key, check=False)

    return _cached(V, key, build)


def wedge_power(E: SheafDescriptor, k: int) -> SheafDescriptor:
    """Λ^k E with frames e_S, S running over increasing k-subsets in lex order."""
    if k < 0 or k > E.rank:
        raise RankExceeded(f"wedge power {k} of a rank {E.rank} sheaf")
    V = E.variety
    if k == 0:
        return structure_sheaf(V)
    if k == 1:
        return E
    key = f"wedge{k}({E.key})"

    def build():
        nv = V.nvars
        subs = list(combinations(range(E.rank), k))
        trans = {}
        for key2, g in E.transitions.items():
            trans[key2] = [[det([[g[a][b] for b in B] for a in A], nv) for B in subs] for A in subs]
        weights = {c: [tuple(sum(ws[a][t] for a in S) for t in range(nv)) for S in subs]
                   for c, ws in E.weights.items()}
        return SheafDescriptor(V, len(subs), trans, weights, key, check=False)

    return _cached(V, key, build)


def sym_power(E: SheafDescriptor, k: int) -> SheafDescriptor:
    """S^k E with frames the monomials e_A, A a sorted multiset of size k."""
    if k < 0:
        raise RankExceeded("negative symmetric power")
    V = E.variety
    if k == 0:
        return structure_sheaf(V)
    if k == 1:
        return E
    key = f"sym{k}({E.key})"

    def build():
        nv = V.nvars
        multis = list(combinations_with_replacement(range(E.rank), k))
        index = {m: t for t, m in enumerate(multis)}
        trans = {}
        for key2, g in E.transitions.items():
            m = mat_zero(nv, len(multis), len(multis))
            for col, B in enumerate(multis):
                # expand prod_b (sum_a g[a][b] e_a)
                acc = {(): LaurentPoly.constant(nv)}
                for b in B:
                    new = {}
                    for A, v in acc.items():
                        for a in range(E.rank):
                            if g[a][b]:
                                A2 = tuple(sorted(A + (a,)))
                                new[A2] = new[A2] + v * g[a][b] if A2 in new else v * g[a][b]
                    acc = new
                for A, v in acc.items():
                    m[index[A]][col] = v
            trans[key2] = m
        weights = {c: [tuple(sum(ws[a][t] for a in A) for t in range(nv)) for A in multis]
                   for c, ws in E.weights.items()}
        return SheafDescriptor(V, len(multis), trans, weights, key, check=False)

    return _cached(V, key, build)


def twist(E: SheafDescriptor, d) -> SheafDescriptor:
    return tensor(E, line_bundle(E.variety, d))


def forms(V: Variety, p: int) -> SheafDescriptor:
    """Ω^p as a wedge power of the cotangent sheaf (Ω^0 = O)."""
    return wedge_power(cotangent(V), p)


def canonical_bundle(V: Variety) -> SheafDescriptor:
    return forms(V, V.dim)


# ---------------------------------------------------------------------------
# Čech cochains
# ---------------------------------------------------------------------------


class CechCochain:
    """Čech q-cochain of a frame system; component on U_I in the frame of chart I[0]."""

    def __init__(self, system: FrameSystem, degree: int, components: Mapping | None = None):
        self.system = system
        self.degree = degree
        nv = system.variety.nvars
        comps = {}
        for I, vec in (components or {}).items():
            I = tuple(I)
            vec = [v if isinstance(v, LaurentPoly) else LaurentPoly.constant(nv, v) for v in vec]
            if len(vec) != system.rank:
                raise CoefficientMismatch("component length differs from the rank")
            if any(vec):
                comps[I] = vec
        self.components = dict(sorted(comps.items()))

    @property
    def variety(self):
        return self.system.variety

    def _check(self, other):
        if self.system != other.system or self.degree != other.degree:
            raise CoefficientMismatch("cochains of different sheaves or degrees")

    def __add__(self, other):
        self._check(other)
        comps = {I: list(v) for I, v in self.components.items()}
        for I, v in other.components.items():
            comps[I] = [a + b for a, b in zip(comps[I], v)] if I in comps else list(v)
        return CechCochain(self.system, self.degree, comps)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        s = exact(s)
        return CechCochain(self.system, self.degree, {I: [x * s for x in v] for I, v in self.components.items()})

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other):
        return (isinstance(other, CechCochain) and self.system == other.system
                and self.degree == other.degree and self.components == other.components)

    def is_valid(self) -> bool:
        V = self.variety
        return all(V.is_regular(x, I) for I, v in self.components.items() for x in v)

    def differential(self) -> "CechCochain":
        V, S = self.variety, self.system
        q = self.degree
        nv = V.nvars
        out: dict = {}
        for J in V.nerve(q + 1):
            acc = [LaurentPoly.zero(nv)] * S.rank
            for k in range(len(J)):
                I = J[:k] + J[k + 1:]
                v = self.components.get(I)
                if v is None:
                    continue
                if k == 0:
                    v = S.reframe(v, J[0], J[1])
                sign = -1 if k % 2 else 1
                acc = [a + x * sign for a, x in zip(acc, v)]
            out[J] = acc
        return CechCochain(S, q + 1, out)

    def is_cocycle(self) -> bool:
        return self.differential().is_zero()

    def weight_vectors(self) -> dict:
        """Split into weights: mu -> {(I, a): coefficient}."""
        S = self.system
        out: dict = {}
        for I, vec in self.components.items():
            for a, v in enumerate(vec):
                w = S.weight(I[0], a)
                for e, c in v.terms.items():
                    mu = tuple(x + y for x, y in zip(e, w))
                    out.setdefault(mu, {})[(I, a)] = c
        return out

    @classmethod
    def from_weight_vector(cls, system: FrameSystem, degree: int, mu, coeffs: Mapping) -> "CechCochain":
        nv = system.variety.nvars
        comps: dict = {}
        for (I, a), c in coeffs.items():
            if not c:
                continue
            vec = comps.setdefault(I, [LaurentPoly.zero(nv)] * system.rank)
            e = tuple(x - y for x, y in zip(mu, system.weight(I[0], a)))
            vec[a] = vec[a] + LaurentPoly.monomial(e, c)
        return cls(system, degree, comps)

    def __repr__(self):
        return f"CechCochain(degree={self.degree}, {len(self.components)} components)"


# ---------------------------------------------------------------------------
# per-weight complexes
# ---------------------------------------------------------------------------


def weight_basis(system: FrameSystem, q: int, mu: Sequence[int]) -> list[tuple]:
    V = system.variety
    if q < 0 or q > V.max_cech_degree:
        return []
    ws = system._weights
    fac = V.factor_of
    nf = len(V.factors)
    out = []
    for I in V.nerve(q):
        allowed = V.allowed_negative(I)
        for a, w in enumerate(ws[I[0]]):
            deg = [0] * nf
            ok = True
            for k, (x, y) in enumerate(zip(mu, w)):
                m = x - y
                deg[fac[k]] += m
                if m < 0 and k not in allowed:
                    ok = False
                    break
            if ok and not any(deg):
                out.append((I, a))
    return out


def weight_differential(system: FrameSystem, q: int, src: Sequence[tuple], dst: Sequence[tuple]) -> list[dict]:
    """Columns of δ: C^q(mu) -> C^{q+1}(mu) in the given bases."""
    V = system.variety
    row = {b: t for t, b in enumerate(dst)}
    ncharts = len(V.charts)
    cols = []
    for I, a in src:
        col: dict = {}
        Iset = set(I)
        for j in range(ncharts):
            if j in Iset:
                continue
            J = tuple(sorted(I + (j,)))
            k = J.index(j)
            if k:
                r = row[(J, a)]
                col[r] = col.get(r, 0) + (-1 if k % 2 else 1)
            else:
                for b, c in system.scalar_column(j, I[0], a):
                    r = row[(J, b)]
                    col[r] = col.get(r, 0) + c
        cols.append({r: v for r, v in col.items() if v})
    return cols


@dataclass
class WeightComplex:
    system: FrameSystem
    mu: tuple
    bases: list

    @cached_property
    def differentials(self):
        return [weight_differential(self.system, q, self.bases[q], self.bases[q + 1])
                for q in range(len(self.bases) - 1)]

    @cached_property
    def ranks(self):
        return [Echelon_rank(cols) for cols in self.differentials]

    def dims(self) -> list[int]:
        out = []
        for q, B in enumerate(self.bases):
            r_out = self.ranks[q] if q < len(self.ranks) else 0
            r_in = self.ranks[q - 1] if q > 0 else 0
            out.append(len(B) - r_out - r_in)
        return out

    def cohomology_basis(self, q: int) -> list[dict]:
        """Cocycle representatives of H^q(mu) as {(I, a): coeff}."""
        if not self.bases[q]:
            return []
        # kernel of δ^q
        if q < len(self.differentials):
            ech = Echelon(track=True)
            kernel = []
            for t, col in enumerate(self.differentials[q]):
                res, combo = ech.add(col, tag=t)
                if res is None:
                    kernel.append(combo)
        else:
            kernel = [{t: Fraction(1)} for t in range(len(self.bases[q]))]
        image = Echelon()
        if q > 0:
            for col in self.differentials[q - 1]:
                image.add(col)
        reps = []
        for vec in kernel:
            res, _ = image.add(vec)
            if res is not None:
                reps.append({self.bases[q][t]: c for t, c in sorted(vec.items()) if c})
        return reps

    def solve_coboundary(self, q: int, target: Mapping) -> dict | None:
        """A (q-1)-cochain b with δb = target, or None."""
        from .polyalg import solve_sparse

        index = {b: t for t, b in enumerate(self.bases[q])}
        vec = {}
        for key, c in target.items():
            if key not in index:
                raise CocycleViolation(f"component {key} is not a valid section in this weight")
            vec[index[key]] = c
        if q == 0:
            return {} if not any(vec.values()) else None
        x = solve_sparse(self.differentials[q - 1], vec, len(self.bases[q - 1]))
        if x is None:
            return None
        return {self.bases[q - 1][t]: c for t, c in enumerate(x) if c}


def Echelon_rank(cols) -> int:
    ech = Echelon()
    for col in cols:
        ech.add(col)
    return ech.rank


def weight_complex(system: FrameSystem, mu: Sequence[int]) -> WeightComplex:
    mu = tuple(mu)
    qmax = system.variety.max_cech_degree
    return WeightComplex(system, mu, [weight_basis(system, q, mu) for q in range(qmax + 1)])


def _compositions(length: int, total: int, lo: int, hi: int):
    if length == 1:
        if lo <= total <= hi:
            yield (total,)
        return
    for x in range(lo, hi + 1):
        rest = total - x
        if (length - 1) * lo <= rest <= (length - 1) * hi:
            for tail in _compositions(length - 1, rest, lo, hi):
                yield (x,) + tail


def window_weights(system: FrameSystem, radius: int):
    V = system.variety
    for degs in sorted(system.frame_degrees):
        pieces = [list(_compositions(n + 1, d, -radius, radius)) for n, d in zip(V.factors, degs)]
        for combo in iproduct(*pieces):
            yield tuple(x for part in combo for x in part)


def window_radius(system: FrameSystem, margin: int = 2) -> int:
    return system.weight_bound + system.variety.dim + margin


@dataclass
class CohomologyResult:
    dims: list[int]
    radius: int
    basis: dict | None = None

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** q * d for q, d in enumerate(self.dims))


def cech_cohomology(E: FrameSystem, margin: int = 2, with_basis: bool = False,
                    hard_cap: int | None = None) -> CohomologyResult:
    """Dimensions (and optionally representatives) of H^q(X, E)."""
    radius = window_radius(E, margin)
    cap = max_window() if hard_cap is None else hard_cap
    if radius > cap:
        raise WindowOverflow(f"weight window radius {radius} exceeds the cap {cap}")
    V = E.variety
    qmax = V.max_cech_degree
    dims = [0] * (qmax + 1)
    basis = {q: [] for q in range(qmax + 1)} if with_basis else None
    cache: dict = {}
    for mu in window_weights(E, radius):
        bases = [weight_basis(E, q, mu) for q in range(qmax + 1)]
        if not any(bases):
            continue
        key = tuple(tuple(b) for b in bases)
        if key not in cache:
            cache[key] = WeightComplex(E, mu, bases).dims()
        d = cache[key]
        for q in range(qmax + 1):
            dims[q] += d[q]
            if with_basis and d[q]:
                wc = WeightComplex(E, mu, bases)
                for rep in wc.cohomology_basis(q):
                    basis[q].append(CechCochain.from_weight_vector(E, q, mu, rep))
    # the nerve may be longer than the dimension; higher groups vanish
    dims = dims[: V.dim + 1] + [d for d in dims[V.dim + 1:] if d]
    return CohomologyResult(dims, radius, basis)


def euler_characteristic(E: FrameSystem, margin: int = 2) -> int:
    return cech_cohomology(E, margin).euler_characteristic


def invariant_cohomology_dim(system: FrameSystem, q: int) -> int:
    """dim of the torus-invariant (weight 0) part of H^q."""
    wc = weight_complex(system, (0,) * system.variety.nvars)
    dims = wc.dims()
    return dims[q] if 0 <= q < len(dims) else 0


def solve_coboundary(c: CechCochain) -> CechCochain | None:
    """b with δb = c, or None if c is not a coboundary."""
    S, q = c.system, c.degree
    if q > S.variety.max_cech_degree:
        return CechCochain(S, q - 1) if c.is_zero() else None
    total = CechCochain(S, max(q - 1, 0))
    for mu, vec in c.weight_vectors().items():
        wc = weight_complex(S, mu)
        sol = wc.solve_coboundary(q, vec)
        if sol is None:
            return None
        if q > 0:
            total = total + CechCochain.from_weight_vector(S, q - 1, mu, sol)
    return total


def is_coboundary(c: CechCochain) -> bool:
    return solve_coboundary(c) is not None


def pairing_tensor(vec_a, vec_b):
    return [x * y for x in vec_a for y in vec_b]


def cup(a: CechCochain, b: CechCochain, pairing: Callable | str = "tensor",
        target: FrameSystem | None = None) -> CechCochain:
    """Front-face/back-face cup product with a constant coefficient pairing.

    ``pairing`` maps (vector in a's frame, vector in b's frame) at the same
    chart to a vector of ``target``; ``"tensor"`` uses the tensor product sheaf.
    """
    if a.variety != b.variety:
        raise CoefficientMismatch("cochains on different varieties")
    if pairing == "tensor":
        if not (isinstance(a.system, SheafDescriptor) and isinstance(b.system, SheafDescriptor)):
            raise CoefficientMismatch("tensor pairing needs sheaf coefficients")
        target = tensor(a.system, b.system)
        pairing = pairing_tensor
    elif pairing == "wedge":
        p, r = _form_degree(a.system), _form_degree(b.system)
        target = forms(a.variety, p + r)
        pairing = _wedge_pairing(a.variety, p, r)
    if target is None:
        raise CoefficientMismatch("custom pairings need an explicit target")
    V = a.variety
    p, q = a.degree, b.degree
    out = {}
    for J in V.nerve(p + q):
        front = a.components.get(J[: p + 1])
        back = b.components.get(J[p:])
        if front is None or back is None:
            continue
        back = b.system.reframe(back, J[0], J[p])
        out[J] = pairing(front, back)
    return CechCochain(target, p + q, out)


def _form_degree(S: FrameSystem) -> int:
    V = S.variety
    for p in range(V.dim + 1):
        if forms(V, p) == S:
            return p
    raise CoefficientMismatch("wedge pairing needs Ω^p coefficients")


def wedge_structure(V: Variety, p: int, r: int) -> dict:
    """(i, j) -> (k, sign): frame_i(Ω^p) ^ frame_j(Ω^r) = sign * frame_k(Ω^{p+r})."""
    n = V.dim
    A = list(combinations(range(n), p))
    B = list(combinations(range(n), r))
    C = {S: t for t, S in enumerate(combinations(range(n), p + r))} if p + r <= n else {}
    out = {}
    for i, s in enumerate(A):
        for j, t in enumerate(B):
            sign = merge_sign(s, t)
            if sign:
                out[(i, j)] = (C[tuple(sorted(s + t))], sign)
    return out


def _wedge_pairing(V: Variety, p: int, r: int):
    table = wedge_structure(V, p, r)
    rank = comb(V.dim, p + r) if p + r <= V.dim else 0

    def pair(va, vb):
        nv = V.nvars
        out = [LaurentPoly.zero(nv)] * rank
        for (i, j), (k, s) in table.items():
            if va[i] and vb[j]:
                out[k] = out[k] + va[i] * vb[j] * s
        return out

    return pair


# ---------------------------------------------------------------------------
# Hom-valued cochains (Ext-class representatives)
# ---------------------------------------------------------------------------


class ExtCochain:
    """Čech cochain valued in Hom(source, target).

    Component on U_I is a matrix (rows: target frame, columns: source frame)
    in chart I[0]'s frames.  Composition is the cup product with matrix
    multiplication, the later map on the front face.
    """

    def __init__(self, source: SheafDescriptor, target: SheafDescriptor, degree: int,
                 components: Mapping | None = None):
        if source.variety != target.variety:
            raise SheafMismatch("source and target on different varieties")
        self.source, self.target, self.degree = source, target, degree
        comps = {}
        for I, M in (components or {}).items():
            if len(M) != target.rank or any(len(r) != source.rank for r in M):
                raise CoefficientMismatch("component has the wrong shape")
            if not mat_is_zero(M):
                comps[tuple(I)] = M
        self.components = dict(sorted(comps.items()))

    @property
    def variety(self) -> Variety:
        return self.source.variety

    @cached_property
    def system(self) -> HomSystem:
        return HomSystem(self.source, self.target)

    @classmethod
    def constant(cls, source, target, data) -> "ExtCochain":
        """Degree-0 cochain with the same constant matrix on every chart."""
        V = source.variety
        M = mat_const(V.nvars, data)
        return cls(source, target, 0, {(c,): M for c in range(len(V.charts))})

    @classmethod
    def identity(cls, E: SheafDescriptor) -> "ExtCochain":
        return cls.constant(E, E, [[1 if i == j else 0 for j in range(E.rank)] for i in range(E.rank)])

    @classmethod
    def zero(cls, source, target, degree) -> "ExtCochain":
        return cls(source, target, degree, {})

    def _check(self, other):
        if (self.source, self.target, self.degree) != (other.source, other.target, other.degree):
            raise SheafMismatch("cochains with different sheaves or degrees")

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for I, M in other.components.items():
            comps[I] = mat_add(comps[I], M) if I in comps else M
        return ExtCochain(self.source, self.target, self.degree, comps)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        s = exact(s)
        return ExtCochain(self.source, self.target, self.degree,
                          {I: mat_scale(M, s) for I, M in self.components.items()})

    def is_zero(self):
        return not self.components

    def reframed(self, I: Sequence[int], chart: int) -> Matrix:
        """Component on I written in the frames of ``chart``."""
        M = self.components.get(tuple(I))
        if M is None:
            return None
        c0 = I[0]
        if chart == c0:
            return M
        nv = self.variety.nvars
        return mat_mul(mat_mul(self.target.transition(chart, c0), M, nv), self.source.transition(c0, chart), nv)

    def compose(self, other: "ExtCochain") -> "ExtCochain":
        """self ∘ other (other applied first)."""
        if other.target != self.source:
            raise SheafMismatch(f"cannot compose: {other.target.key} vs {self.source.key}")
        V = self.variety
        p, q = self.degree, other.degree
        nv = V.nvars
        out = {}
        for J in V.nerve(p + q):
            front = self.components.get(J[: p + 1])
            if front is None:
                continue
            back = other.reframed(J[p:], J[0])
            if back is None:
                continue
            out[J] = mat_mul(front, back, nv)
        return ExtCochain(other.source, self.target, p + q, out)

    def __matmul__(self, other):
        return self.compose(other)

    def tensor_identity(self, G: SheafDescriptor, side: str = "right") -> "ExtCochain":
        """f ⊗ id_G (side='right') or id_G ⊗ f (side='left')."""
        nv = self.variety.nvars
        I = mat_identity(nv, G.rank)
        if side == "right":
            comps = {J: mat_kron(M, I) for J, M in self.components.items()}
            return ExtCochain(tensor(self.source, G), tensor(self.target, G), self.degree, comps)
        comps = {J: mat_kron(I, M) for J, M in self.components.items()}
        return ExtCochain(tensor(G, self.source), tensor(G, self.target), self.degree, comps)

    def retarget(self, target: SheafDescriptor) -> "ExtCochain":
        """Relabel the target with an equal-rank sheaf sharing the frames (checked by weights)."""
        if target.rank != self.target.rank or target.weights != self.target.weights:
            raise SheafMismatch("retarget needs identical frames")
        return ExtCochain(self.source, target, self.degree, self.components)

    def resource(self, source: SheafDescriptor) -> "ExtCochain":
        if source.rank != self.source.rank or source.weights != self.source.weights:
            raise SheafMismatch("resource needs identical frames")
        return ExtCochain(source, self.target, self.degree, self.components)

    def to_cech(self) -> CechCochain:
        comps = {I: [v for row in M for v in row] for I, M in self.components.items()}
        return CechCochain(self.system, self.degree, comps)

    @classmethod
    def from_cech(cls, c: CechCochain) -> "ExtCochain":
        S = c.system
        rE = S.source.rank
        comps = {I: [list(vec[b * rE:(b + 1) * rE]) for b in range(S.target.rank)]
                 for I, vec in c.components.items()}
        return cls(S.source, S.target, c.degree, comps)

    def differential(self) -> "ExtCochain":
        return ExtCochain.from_cech(self.to_cech().differential())

    def is_cocycle(self) -> bool:
        return self.to_cech().is_cocycle()

    def solve_coboundary(self) -> "ExtCochain | None":
        sol = solve_coboundary(self.to_cech())
        return None if sol is None else ExtCochain.from_cech(sol)

    def is_coboundary(self) -> bool:
        return self.solve_coboundary() is not None

    def trace(self, G: SheafDescriptor | None = None) -> "ExtCochain":
        """Tr: Hom(E, E ⊗ G) -> G; the target must be tensor(source, G)."""
        E = self.source
        if G is None:
            G = structure_sheaf(self.variety)
            if self.target != E:
                raise SheafMismatch("plain trace needs an endomorphism")
        elif self.target != tensor(E, G):
            raise SheafMismatch("trace target must be source ⊗ G")
        nv = self.variety.nvars
        O = structure_sheaf(self.variety)
        comps = {}
        for I, M in self.components.items():
            col = []
            for g in range(G.rank):
                acc = LaurentPoly.zero(nv)
                for a in range(E.rank):
                    acc = acc + M[a * G.rank + g][a]
                col.append([acc])
            comps[I] = col
        return ExtCochain(O, G, self.degree, comps)

    def __repr__(self):
        return f"ExtCochain({self.source.key} -> {self.target.key}, degree {self.degree})"


# ---------------------------------------------------------------------------
# constant structure maps
# ---------------------------------------------------------------------------


def wedge_map(V: Variety, p: int, r: int) -> ExtCochain:
    """Ω^p ⊗ Ω^r -> Ω^{p+r}."""
    A, B = forms(V, p), forms(V, r)
    C = forms(V, p + r)
    data = [[0] * (A.rank * B.rank) for _ in range(C.rank)]
    for (i, j), (k, s) in wedge_structure(V, p, r).items():
        data[k][i * B.rank + j] = s
    return ExtCochain.constant(tensor(A, B), C, data)


def swap_map(E: SheafDescriptor, F: SheafDescriptor, sign: int = 1) -> ExtCochain:
    """E ⊗ F -> F ⊗ E, e ⊗ f -> sign * f ⊗ e."""
    rE, rF = E.rank, F.rank
    data = [[0] * (rE * rF) for _ in range(rE * rF)]
    for a in range(rE):
        for b in range(rF):
            data[b * rE + a][a * rF + b] = sign
    return ExtCochain.constant(tensor(E, F), tensor(F, E), data)


def permutation_map(factors: Sequence[SheafDescriptor], perm: Sequence[int]) -> ExtCochain:
    """E_0 ⊗ ... ⊗ E_{k-1} -> E_{perm[0]} ⊗ ... ; slot t of the output is slot perm[t] of the input."""
    ranks = [E.rank for E in factors]
    src = tensor(*factors)
    dst = tensor(*[factors[p] for p in perm])
    size = src.rank
    data = [[0] * size for _ in range(size)]
    out_ranks = [ranks[p] for p in perm]
    for idx in iproduct(*(range(r) for r in ranks)):
        s = 0
        for t, r in zip(idx, ranks):
            s = s * r + t
        d = 0
        for p, r in zip(perm, out_ranks):
            d = d * r + idx[p]
        data[d][s] = 1
    return ExtCochain.constant(src, dst, data)


def skew_embedding(V: Variety, p: int) -> ExtCochain:
    """Ω^p -> Ω^{p-1} ⊗ Ω¹, dy_S -> sum_r (-1)^(p-r) dy_{S - s_r} ⊗ dy_{s_r}."""
    n = V.dim
    src = forms(V, p)
    low = forms(V, p - 1)
    one = forms(V, 1)
    lows = {S: t for t, S in enumerate(combinations(range(n), p - 1))}
    data = [[0] * src.rank for _ in range(low.rank * n)]
    for col, S in enumerate(combinations(range(n), p)):
        for r, s in enumerate(S, start=1):
            rest = S[: r - 1] + S[r:]
            data[lows[rest] * n + s][col] = -1 if (p - r) % 2 else 1
    return ExtCochain.constant(src, tensor(low, one), data)


# ---------------------------------------------------------------------------
# classes in ⊕ H^q(Ω^p)
# ---------------------------------------------------------------------------


def connection_difference(E: SheafDescriptor) -> ExtCochain:
    """1-cocycle (∇_i - ∇_j) = dg_ij · g_ji for the chartwise trivial connections."""
    V = E.variety
    nv = V.nvars
    n = V.dim
    r = E.rank
    Om = cotangent(V)
    comps = {}
    for (i, j) in V.nerve(1):
        g = E.transition(i, j)
        ginv = E.transition(j, i)
        # dg[a][b] is a list of n coefficients
        dg = [[V.differential(g[a][b], i) for b in range(r)] for a in range(r)]
        M = mat_zero(nv, r * n, r)
        for a in range(r):
            for k in range(n):
                row = [dg[a][b][k] for b in range(r)]
                for col in range(r):
                    acc = LaurentPoly.zero(nv)
                    for b in range(r):
                        if row[b] and ginv[b][col]:
                            acc = acc + row[b] * ginv[b][col]
                    M[a * n + k][col] = acc
        comps[(i, j)] = M
    return ExtCochain(E, tensor(E, Om), 1, comps)


def hyperplane_class(V: Variety, factor: int = 0) -> ExtCochain:
    """c₁(O(e_factor)) as the trace of its Atiyah cocycle, a 1-cochain of Ω¹."""
    d = [0] * len(V.factors)
    d[factor] = 1
    L = line_bundle(V, tuple(d))
    return connection_difference(L).trace(cotangent(V))


class MixedClass:
    """Element of ⊕_{p,q} H^q(Ω^p) stored as representatives (p, q) -> ExtCochain(O -> Ω^p)."""

    def __init__(self, variety: Variety, components: Mapping | None = None):
        self.variety = variety
        comps = {}
        for (p, q), c in (components or {}).items():
            if c.degree != q or c.target != forms(variety, p):
                raise CoefficientMismatch(f"component ({p},{q}) has the wrong coefficients")
            if not c.is_zero():
                comps[(p, q)] = c
        self.components = dict(sorted(comps.items()))

    @classmethod
    def one(cls, V: Variety) -> "MixedClass":
        O = structure_sheaf(V)
        return cls(V, {(0, 0): ExtCochain.identity(O)})

    @classmethod
    def scalar(cls, V: Variety, c) -> "MixedClass":
        return cls.one(V).scale(c)

    @classmethod
    def from_cochain(cls, c: ExtCochain) -> "MixedClass":
        V = c.variety
        for p in range(V.dim + 1):
            if forms(V, p) == c.target:
                return cls(V, {(p, c.degree): c})
        raise CoefficientMismatch("target is not a sheaf of forms")

    def __getitem__(self, pq) -> ExtCochain:
        if isinstance(pq, int):
            pq = (pq, pq)
        p, q = pq
        c = self.components.get(pq)
        if c is None:
            V = self.variety
            return ExtCochain.zero(structure_sheaf(V), forms(V, p), q)
        return c

    def diagonal(self, p: int) -> ExtCochain:
        return self[(p, p)]

    def __add__(self, other: "MixedClass") -> "MixedClass":
        comps = dict(self.components)
        for k, c in other.components.items():
            comps[k] = comps[k] + c if k in comps else c
        return MixedClass(self.variety, comps)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "MixedClass":
        return MixedClass(self.variety, {k: c.scale(s) for k, c in self.components.items()})

    def map_components(self, fn) -> "MixedClass":
        return MixedClass(self.variety, {k: fn(k[0], c) for k, c in self.components.items()})

    def __mul__(self, other: "MixedClass") -> "MixedClass":
        V = self.variety
        n = V.dim
        out: dict = {}
        for (p1, q1), a in self.components.items():
            for (p2, q2), b in other.components.items():
                if p1 + p2 > n or q1 + q2 > V.max_cech_degree:
                    continue
                c = class_product(a, b, p1, p2)
                k = (p1 + p2, q1 + q2)
                out[k] = out[k] + c if k in out else c
        return MixedClass(V, out)

    def truncated(self, max_p: int) -> "MixedClass":
        return MixedClass(self.variety, {k: c for k, c in self.components.items() if k[0] <= max_p})

    def nilpotent_part(self) -> "MixedClass":
        return MixedClass(self.variety, {k: c for k, c in self.components.items() if k != (0, 0)})

    def constant_term(self) -> Fraction:
        c = self.components.get((0, 0))
        if c is None:
            return Fraction(0)
        # a 0-cocycle of O is a global constant; read it off chart 0
        M = c.components.get((0,))
        return M[0][0].constant_term() if M else Fraction(0)

    def exp(self) -> "MixedClass":
        """exp of a class with zero (0,0) part, truncated by degree."""
        if self.components.get((0, 0)) is not None:
            raise ValueError("exp needs a class without constant part")
        V = self.variety
        out = MixedClass.one(V)
        term = MixedClass.one(V)
        for k in range(1, V.dim + 1):
            term = (term * self).scale(Fraction(1, k))
            out = out + term
        return out

    def inverse(self) -> "MixedClass":
        """Inverse of a class whose (0,0) part is a nonzero constant."""
        c0 = self.constant_term()
        if not c0:
            raise ZeroDivisionError("class has no invertible constant part")
        V = self.variety
        nil = self.nilpotent_part().scale(Fraction(1) / c0)
        out = MixedClass.one(V)
        power = MixedClass.one(V)
        for _ in range(1, V.dim + 1):
            power = (power * nil).scale(-1)
            out = out + power
        return out.scale(Fraction(1) / c0)

    def top(self) -> ExtCochain:
        n = self.variety.dim
        return self[(n, n)]

    def integrate(self) -> Fraction:
        return integrate(self.top())

    def pairing_top(self, other: "MixedClass") -> Fraction:
        return (self * other).integrate()

    def differs_by_coboundary(self, other: "MixedClass") -> bool:
        diff = self - other
        return all(c.is_coboundary() for c in diff.components.values())

    def is_cocycle(self) -> bool:
        return all(c.is_cocycle() for c in self.components.values())

    def __repr__(self):
        return f"MixedClass({self.variety.name}, components={sorted(self.components)})"


def class_product(a: ExtCochain, b: ExtCochain, p1: int, p2: int) -> ExtCochain:
    """Cup product of form-valued classes followed by the wedge Ω^p1 ⊗ Ω^p2 -> Ω^{p1+p2}."""
    V = a.variety
    nv = V.nvars
    table = wedge_structure(V, p1, p2)
    target = forms(V, p1 + p2)
    qa, qb = a.degree, b.degree
    out = {}
    for J in V.nerve(qa + qb):
        front = a.components.get(J[: qa + 1])
        if front is None:
            continue
        back = b.reframed(J[qa:], J[0])
        if back is None:
            continue
        vec = [LaurentPoly.zero(nv) for _ in range(target.rank)]
        for (i, j), (k, s) in table.items():
            x, y = front[i][0], back[j][0]
            if x and y:
                vec[k] = vec[k] + x * y * s
        out[J] = [[v] for v in vec]
    return ExtCochain(structure_sheaf(V), target, qa + qb, out)


_GENERATORS: dict = {}


def top_generator(V: Variety) -> ExtCochain:
    """Π_f c₁(O(e_f))^{n_f}, the class normalized to integrate to 1."""
    if V not in _GENERATORS:
        cls = MixedClass.one(V)
        for f, n in enumerate(V.factors):
            h = MixedClass.from_cochain(hyperplane_class(V, f))
            for _ in range(n):
                cls = cls * h
        _GENERATORS[V] = cls.top()
    return _GENERATORS[V]


def integrate(c: ExtCochain) -> Fraction:
    """∫ of a top-degree class with coefficients in ω."""
    V = c.variety
    n = V.dim
    if c.degree != n or c.target != forms(V, n) or c.source != structure_sheaf(V):
        raise NotTopDegree("integrate needs an H^n(ω) representative")
    gen = top_generator(V).to_cech()
    cc = c.to_cech()
    vectors = cc.weight_vectors()
    zero = (0,) * V.nvars
    for mu, vec in vectors.items():
        if mu != zero and weight_complex(cc.system, mu).solve_coboundary(n, vec) is None:
            raise CocycleViolation("top class has a nontrivial non-invariant part")
    wc = weight_complex(cc.system, zero)
    index = {b: t for t, b in enumerate(wc.bases[n])}
    gvec = {index[k]: v for k, v in gen.weight_vectors()[zero].items()}
    target = {index[k]: v for k, v in vectors.get(zero, {}).items()}
    from .polyalg import solve_sparse

    cols = list(wc.differentials[n - 1]) + [gvec]
    x = solve_sparse(cols, target, len(cols))
    if x is None:
        raise CocycleViolation("class is not a cocycle of top degree")
    return x[-1]


# ---------------------------------------------------------------------------
# closed forms used as oracles
# ---------------------------------------------------------------------------


def line_bundle_dims_closed_form(n: int, d: int) -> list[int]:
    dims = [0] * (n + 1)
    if d >= 0:
        dims[0] = comb(n + d, n)
    if d <= -n - 1:
        dims[n] = comb(-d - 1, n)
    return dims


def monomial_count(nvars: int, degree: int) -> int:
    if degree < 0:
        return 0
    return comb(nvars + degree - 1, degree)
