"""Command-line front end.

    hochrr rr-verify --variety P2 --sheaf "O(3)"
    hochrr coefficients --which l --order 4 --json

Exit status: 0 when the identity holds, 1 when it fails, 2 on usage or
configuration errors.  Numbers are printed as exact ``p/q`` strings.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from importlib import resources
from typing import Sequence

from . import __version__
from .ratseries import bernoulli_numbers, format_scalar, l_coefficients, t_coefficients

COMMANDS = ("hh", "hkr-check", "cohomology", "chern", "todd", "atiyah-check",
            "todd-annihilation", "l-adjoint", "rr-verify", "coefficients")

# hard limits for the affine model; larger values are refused as usage errors
MAX_NVARS = 3
MAX_LENGTH = 4
MAX_INTERNAL = 4
MAX_ORDER = 60


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# sheaf expressions
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(Omega|O|T|K|dual|wedge|sym|tensor|sum|twist)|(-)|([()^,+*⊗⊕]))")


def tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise UsageError(f"unexpected input at {text[pos:]!r}")
        num, word, minus, sym = m.groups()
        if num is not None:
            out.append(("num", num))
        elif word is not None:
            out.append(("word", word))
        elif minus is not None:
            out.append(("sym", "-"))
        else:
            out.append(("sym", {"⊗": "*", "⊕": "+"}.get(sym, sym)))
        pos = m.end()
    return out


class SheafParser:
    """Recursive descent over

        sum     := tensor ('+' tensor)*
        tensor  := unary ('*' unary)*
        unary   := 'dual' unary | ('wedge' | 'sym') '^' int unary | postfix
        postfix := atom ('(' ints ')')*          -- a twist
        atom    := 'O' ['(' ints ')'] | 'T' | 'K' | 'Omega' ['^' int]
                 | name '(' args ')' | '(' sum ')'

    so dual binds tighter than wedge/sym, which bind tighter than tensor,
    which binds tighter than sum.
    """

    def __init__(self, variety, text: str):
        self.V = variety
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "more input"
            raise UsageError(f"expected {want!r} in sheaf expression, found {tok[1]!r}")
        self.pos += 1
        return tok[1]

    def at(self, value):
        return self.peek()[1] == value

    def parse(self):
        e = self.sum()
        if self.pos != len(self.toks):
            raise UsageError(f"trailing input in sheaf expression: {self.peek()[1]!r}")
        return e

    def sum(self):
        from .cech import direct_sum

        parts = [self.tensor()]
        while self.at("+"):
            self.take()
            parts.append(self.tensor())
        return parts[0] if len(parts) == 1 else direct_sum(*parts)

    def tensor(self):
        from .cech import tensor

        parts = [self.unary()]
        while self.at("*"):
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else tensor(*parts)

    def unary(self):
        from .cech import dual, sym_power, wedge_power

        if self.at("dual") and self.toks[self.pos + 1: self.pos + 2] != [("sym", "(")]:
            self.take()
            return dual(self.unary())
        if (self.at("wedge") or self.at("sym")) and self.toks[self.pos + 1: self.pos + 2] == [("sym", "^")]:
            op = self.take()
            self.take("sym", "^")
            k = self.integer()
            e = self.unary()
            return wedge_power(e, k) if op == "wedge" else sym_power(e, k)
        return self.postfix()

    def integer(self) -> int:
        sign = -1 if self.at("-") else 1
        if sign < 0:
            self.take()
        return sign * int(self.take("num"))

    def ints(self) -> list[int]:
        self.take("sym", "(")
        vals = [self.integer()]
        while self.at(","):
            self.take()
            vals.append(self.integer())
        self.take("sym", ")")
        return vals

    def degrees(self, vals):
        nf = len(self.V.factors)
        if len(vals) == 1 and nf > 1:
            raise UsageError(f"{self.V.name} needs {nf} degrees per twist")
        if len(vals) != nf:
            raise UsageError(f"expected {nf} degrees, got {len(vals)}")
        return tuple(vals)

    def postfix(self):
        from .cech import twist

        e = self.atom()
        while self.at("("):
            e = twist(e, self.degrees(self.ints()))
        return e

    def args(self) -> list:
        self.take("sym", "(")
        out = [self.sum_or_int()]
        while self.at(","):
            self.take()
            out.append(self.sum_or_int())
        self.take("sym", ")")
        return out

    def sum_or_int(self):
        if self.peek()[0] == "num" or self.at("-"):
            return self.integer()
        return self.sum()

    def atom(self):
        from . import cech

        tok = self.peek()
        if tok == ("sym", "("):
            self.take()
            e = self.sum()
            self.take("sym", ")")
            return e
        word = self.take("word")
        V = self.V
        if word == "O":
            if self.at("("):
                return cech.line_bundle(V, self.degrees(self.ints()))
            return cech.structure_sheaf(V)
        if word == "T":
            return cech.tangent(V)
        if word == "K":
            return cech.canonical_bundle(V)
        if word == "Omega":
            p = 1
            if self.at("^"):
                self.take()
                p = self.integer()
            if not 0 <= p <= V.dim:
                raise UsageError(f"Omega^{p} is not defined on {V.name}")
            return cech.forms(V, p)
        args = self.args()
        sheaves = [a for a in args if not isinstance(a, int)]
        numbers = [a for a in args if isinstance(a, int)]
        if word == "dual" and len(sheaves) == 1 and not numbers:
            return cech.dual(sheaves[0])
        if word in ("tensor", "sum") and sheaves and not numbers:
            return (cech.tensor if word == "tensor" else cech.direct_sum)(*sheaves)
        if word in ("wedge", "sym") and len(numbers) == 1 and len(sheaves) == 1:
            f = cech.wedge_power if word == "wedge" else cech.sym_power
            return f(sheaves[0], numbers[0])
        if word == "twist" and len(sheaves) == 1 and numbers:
            return cech.twist(sheaves[0], self.degrees(numbers))
        raise UsageError(f"bad arguments to {word}(...)")


def parse_sheaf(variety, text: str):
    try:
        return SheafParser(variety, text).parse()
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _s(x) -> str:
    return format_scalar(Fraction(x))


def _variety(cfg):
    from .cech import parse_variety

    text = cfg.get("variety")
    if not text:
        raise UsageError("--variety is required")
    try:
        V = parse_variety(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not V.factors or any(n < 1 for n in V.factors):
        raise UsageError(f"unsupported variety {text!r}")
    return V


def _sheaf(cfg, V):
    text = cfg.get("sheaf")
    if not text:
        raise UsageError("--sheaf is required")
    return parse_sheaf(V, text)


def _numbers_json(table) -> list:
    return [{"p": p, "values": [{"monomial": list(m), "value": _s(v)} for m, v in rows]}
            for p, rows in sorted(table.items())]


def cmd_coefficients(cfg):
    which, order = cfg.get("which", "l"), int(cfg.get("order", 8))
    if not 0 <= order <= MAX_ORDER:
        raise UsageError(f"order must lie in [0, {MAX_ORDER}]")
    if which == "l":
        vals, start = l_coefficients(order), 0
    elif which == "t":
        if order < 1:
            raise UsageError("t coefficients start at order 1")
        vals, start = t_coefficients(order), 1
    elif which == "bernoulli":
        vals, start = bernoulli_numbers(order), 0
    else:
        raise UsageError(f"unknown sequence {which!r}")
    values = [_s(v) for v in vals]
    text = f"{which}_{start}..{which}_{start + len(vals) - 1}: [" + ", ".join(values) + "]"
    return True, {"which": which, "start": start, "values": values}, text


def cmd_cohomology(cfg):
    from .cech import cech_cohomology

    V = _variety(cfg)
    E = _sheaf(cfg, V)
    res = cech_cohomology(E, hard_cap=cfg.get("max_window"))
    out = {"variety": V.name, "sheaf": E.key, "rank": E.rank,
           "dims": res.dims, "euler_characteristic": _s(res.euler_characteristic)}
    text = "\n".join([f"{V.name}  {E.key}  rank {E.rank}"] +
                     [f"  h^{q} = {d}" for q, d in enumerate(res.dims)] +
                     [f"  chi = {_s(res.euler_characteristic)}"])
    return True, out, text


def _class_text(title, table):
    lines = [title]
    for p, rows in sorted(table.items()):
        for m, v in rows:
            mon = "·".join(f"h{f}^{e}" for f, e in enumerate(m) if e) or "1"
            lines.append(f"  ∫ [{p}] · {mon} = {_s(v)}")
    return "\n".join(lines)


def cmd_chern(cfg):
    from .charclass import chern_character, class_numbers

    V = _variety(cfg)
    E = _sheaf(cfg, V)
    table = class_numbers(chern_character(E))
    out = {"variety": V.name, "sheaf": E.key, "rank": E.rank, "components": _numbers_json(table)}
    return True, out, _class_text(f"ch({E.key}) on {V.name}", table)


def cmd_todd(cfg):
    from .charclass import class_numbers, todd_class

    V = _variety(cfg)
    table = class_numbers(todd_class(V))
    out = {"variety": V.name, "components": _numbers_json(table)}
    return True, out, _class_text(f"td({V.name})", table)


def cmd_rr(cfg):
    from .charclass import hrr_verify

    V = _variety(cfg)
    E = _sheaf(cfg, V)
    rep = hrr_verify(E)
    text = (f"{V.name}  {E.key}\n  chi (cohomology)    = {rep['chi_cohomology']}\n"
            f"  ∫ ch·td (classes)   = {rep['chi_rr']}\n  equal: {rep['equal']}")
    return rep["equal"], rep, text


def _reports(reports):
    ok = all(r.success for r in reports)
    lines = []
    for r in reports:
        lines.append(f"{r.identity} on {r.variety}: {'success' if r.success else 'FAILURE'}")
        for c in r.components:
            lab = f"  [{c.label}]" if c.label else ""
            lines.append(f"  p={c.p} degree={c.degree} {c.status} (dim {c.dim_target}){lab}")
    return ok, {"reports": [r.to_json() for r in reports]}, "\n".join(lines)


def cmd_atiyah(cfg):
    from .charclass import verify_at_jacobi, verify_at_symmetry

    V = _variety(cfg)
    return _reports([verify_at_symmetry(V), verify_at_jacobi(V)])


def cmd_td_annihilation(cfg):
    from .charclass import verify_td_annihilation

    return _reports([verify_td_annihilation(_variety(cfg))])


def cmd_l_adjoint(cfg):
    from .charclass import verify_L_adjoint

    return _reports([verify_L_adjoint(_variety(cfg), at_zero=bool(cfg.get("at_zero")))])


def _affine_caps(cfg):
    n = int(cfg.get("nvars", 2))
    length = int(cfg.get("max_length", 2))
    internal = int(cfg.get("max_internal", 2))
    if not 1 <= n <= MAX_NVARS:
        raise UsageError(f"--nvars must lie in [1, {MAX_NVARS}]")
    if not 0 <= length <= MAX_LENGTH:
        raise UsageError(f"--max-length must lie in [0, {MAX_LENGTH}]")
    if not 0 <= internal <= MAX_INTERNAL:
        raise UsageError(f"--max-internal must lie in [0, {MAX_INTERNAL}]")
    return n, length, internal


def cmd_hh(cfg):
    from .hochschild import (forms_dim, hkr_weights, hochschild_homology_dims,
                             monomials_below, polyvector_dim, stable_cohomology_dim)

    n, length, internal = _affine_caps(cfg)
    rows, ok = [], True
    if cfg.get("side", "cohomology") == "cohomology":
        for i in range(length + 1):
            for w in hkr_weights(n, i, internal):
                got, want = stable_cohomology_dim(n, i, w, i + 1), polyvector_dim(n, i, w)
                ok &= got == want
                rows.append({"i": i, "degree": list(w), "hochschild": got, "hkr": want})
        head = "HH^i(A, A) by weight vs Λ^i T"
    else:
        for gamma in monomials_below(n, internal):
            dims = hochschild_homology_dims(n, gamma, length)
            for i, got in enumerate(dims):
                want = forms_dim(n, i, gamma)
                ok &= got == want
                rows.append({"i": i, "degree": list(gamma), "hochschild": got, "hkr": want})
        head = "HH_i(A) by multidegree vs Ω^i"
    out = {"nvars": n, "side": cfg.get("side", "cohomology"), "rows": rows, "equal": ok}
    lines = [head] + [f"  i={r['i']} degree={tuple(r['degree'])}: {r['hochschild']} vs {r['hkr']}"
                      for r in rows if r["hochschild"] or r["hkr"]]
    lines.append(f"equal: {ok}")
    return ok, out, "\n".join(lines)


def cmd_hkr_check(cfg):
    from itertools import combinations
    from math import factorial

    from .hochschild import (BarChain, KoszulElement, bar_differential, canonical_pairing,
                             chain_basis, cochain_differential, comparison_phi,
                             evaluate_on_resolution, hkr_chain, hkr_cochain, hkr_cup_check,
                             monomials_below, polyvector, shuffle_factor)

    n, length, internal = _affine_caps(cfg)
    factor_mode = cfg.get("cup_factor", "shuffle")
    if factor_mode not in ("shuffle", "literal"):
        raise UsageError("--cup-factor must be shuffle or literal")
    checks = {}
    basis = [(S, c) for i in range(1, min(n, length) + 1)
             for S in combinations(range(n), i) for c in monomials_below(n, 1)]
    checks["cocycle"] = all(
        not cochain_differential(hkr_cochain(polyvector(n, {S: c}))).table(len(S) + 2)
        for S, c in basis)
    zero = (0,) * n
    checks["comparison"] = all(
        evaluate_on_resolution(hkr_cochain(polyvector(n, {S: 1})), comparison_phi(
            KoszulElement.generator(n, T, zero, zero)))
        == canonical_pairing(polyvector(n, {S: 1}), KoszulElement.generator(n, T, zero, zero)) * factorial(len(S))
        for i in range(1, min(n, length) + 1)
        for S in combinations(range(n), i) for T in combinations(range(n), i))
    checks["boundaries"] = all(
        hkr_chain(bar_differential(BarChain(n, i, {b: 1}))).is_zero()
        for i in range(1, length + 1) for g in monomials_below(n, internal)
        for b in chain_basis(n, i, g))
    cup_ok = True
    for S1, c1 in basis:
        for S2, c2 in basis:
            p, q = len(S1), len(S2)
            if p + q > length:
                continue
            k = shuffle_factor(p, q) if factor_mode == "shuffle" else 1
            cup_ok &= hkr_cup_check(polyvector(n, {S1: c1}), polyvector(n, {S2: c2}), k)[0]
    checks[f"cup_{factor_mode}"] = cup_ok
    ok = all(checks.values())
    out = {"nvars": n, "checks": checks, "equal": ok}
    text = "\n".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items())
    return ok, out, text


HANDLERS = {
    "hh": cmd_hh,
    "hkr-check": cmd_hkr_check,
    "cohomology": cmd_cohomology,
    "chern": cmd_chern,
    "todd": cmd_todd,
    "atiyah-check": cmd_atiyah,
    "todd-annihilation": cmd_td_annihilation,
    "l-adjoint": cmd_l_adjoint,
    "rr-verify": cmd_rr,
    "coefficients": cmd_coefficients,
}


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with the same fields as the flags")
    common.add_argument("--json", action="store_true", default=None, help="emit a JSON report")
    common.add_argument("--max-window", type=int, dest="max_window",
                        help="hard cap on the cohomology weight window (default $HOCHRR_MAX_WINDOW or 40)")

    geo = _Parser(add_help=False)
    geo.add_argument("--variety", help="P1, P2, P3, P1xP1, ...")

    sheaf = _Parser(add_help=False)
    sheaf.add_argument("--sheaf", help='expression such as "O(3)", "Omega^1(1)", "dual T * O(1)"')

    affine = _Parser(add_help=False)
    affine.add_argument("--nvars", type=int)
    affine.add_argument("--max-length", type=int, dest="max_length")
    affine.add_argument("--max-internal", type=int, dest="max_internal")

    p = _Parser(prog="hochrr", description="Exact Hochschild and Riemann-Roch computations.")
    p.add_argument("--version", action="version", version=f"hochrr {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    hh = sub.add_parser("hh", parents=[common, affine], help="Hochschild (co)homology dimensions vs HKR")
    hh.add_argument("--side", choices=["cohomology", "homology"])
    hk = sub.add_parser("hkr-check", parents=[common, affine], help="HKR cochain and chain map checks")
    hk.add_argument("--cup-factor", choices=["shuffle", "literal"], dest="cup_factor")
    sub.add_parser("cohomology", parents=[common, geo, sheaf], help="sheaf cohomology dimensions")
    sub.add_parser("chern", parents=[common, geo, sheaf], help="Chern character numbers")
    sub.add_parser("todd", parents=[common, geo], help="Todd class numbers")
    sub.add_parser("atiyah-check", parents=[common, geo], help="symmetry and Jacobi of at(Ω¹)")
    sub.add_parser("todd-annihilation", parents=[common, geo], help="(td ∧ -) ∘ L = 0")
    la = sub.add_parser("l-adjoint", parents=[common, geo], help="adjoint identity for L")
    la.add_argument("--at-zero", action="store_true", default=None, dest="at_zero")
    sub.add_parser("rr-verify", parents=[common, geo, sheaf], help="χ(E) against ∫ ch(E) td")
    co = sub.add_parser("coefficients", parents=[common], help="l_n, t_n or Bernoulli numbers")
    co.add_argument("--which", choices=["l", "t", "bernoulli"])
    co.add_argument("--order", type=int)
    return p


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def resolve(argv: Sequence[str]) -> dict:
    ns = build_parser().parse_args(list(argv))
    cfg = load_config(ns.config) if getattr(ns, "config", None) else {}
    for k, v in vars(ns).items():
        if v is not None and k != "config":
            cfg[k] = v
    if cfg.get("command") not in COMMANDS:
        raise UsageError("a command is required: " + " | ".join(COMMANDS))
    if cfg.get("max_window") is not None and int(cfg["max_window"]) < 1:
        raise UsageError("--max-window must be positive")
    return cfg


def schema() -> dict:
    return json.loads(resources.files("hochrr").joinpath("report.schema.json").read_text(encoding="utf-8"))


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    from .cech import WindowOverflow

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    saved = os.environ.get("HOCHRR_MAX_WINDOW")
    try:
        cfg = resolve(sys.argv[1:] if argv is None else argv)
        if cfg.get("max_window") is not None:
            os.environ["HOCHRR_MAX_WINDOW"] = str(int(cfg["max_window"]))
        ok, payload, text = HANDLERS[cfg["command"]](cfg)
    except UsageError as exc:
        print(f"hochrr: error: {exc}", file=stderr)
        return 2
    except WindowOverflow as exc:
        print(f"hochrr: error: {exc} (raise --max-window)", file=stderr)
        return 2
    finally:
        # a flag applies to this job only
        if saved is None:
            os.environ.pop("HOCHRR_MAX_WINDOW", None)
        else:
            os.environ["HOCHRR_MAX_WINDOW"] = saved
    if cfg.get("json"):
        doc = {"command": cfg["command"], "status": "pass" if ok else "fail", "result": payload}
        stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        stdout.write(text + "\n")
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
