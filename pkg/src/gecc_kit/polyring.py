"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials are immutable term maps over an explicit variable context.
Three ambient-space flavours of variables occur (base coordinates,
cotangent coordinates, projective tags) and are never mixed in a slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

BASE = "base"
COTANGENT = "cotangent"
PROJECTIVE = "projective-tag"

Exponent = tuple  # tuple[int, ...]


class ContextMismatch(ValueError):
    """Operands live in different variable contexts."""


class ParseError(ValueError):
    """Polynomial source text is malformed; carries line/column."""

    def __init__(self, message: str, line: int = 1, col: int = 0):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True, order=True)
class Variable:
    name: str
    kind: str = BASE
    index: int = 0


class VarContext:
    """Ordered, immutable list of variables shared by a family of polynomials."""

    __slots__ = ("variables", "_by_name", "_hash")

    def __init__(self, variables: Sequence[Variable]):
        vs = tuple(variables)
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in context: {names}")
        object.__setattr__(self, "variables", vs)
        object.__setattr__(self, "_by_name", {v.name: i for i, v in enumerate(vs)})
        object.__setattr__(self, "_hash", hash(vs))

    def __len__(self) -> int:
        return len(self.variables)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarContext) and self.variables == other.variables

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "VarContext(" + ", ".join(v.name for v in self.variables) + ")"

    def names(self) -> tuple:
        return tuple(v.name for v in self.variables)

    def position(self, var: Variable | str) -> int:
        name = var if isinstance(var, str) else var.name
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in {self!r}") from None

    def variable(self, name: str) -> Variable:
        return self.variables[self.position(name)]

    def gen(self, var: Variable | str) -> "Polynomial":
        i = self.position(var)
        exp = tuple(1 if j == i else 0 for j in range(len(self)))
        return Polynomial(self, {exp: Fraction(1)})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, {(0,) * len(self): c})

    def extend(self, extra: Sequence[Variable]) -> "VarContext":
        return VarContext(self.variables + tuple(extra))

    def restrict(self, keep: Sequence[Variable]) -> "VarContext":
        keep_set = {v.name for v in keep}
        return VarContext(tuple(v for v in self.variables if v.name in keep_set))


def base_context(names: Sequence[str]) -> VarContext:
    return VarContext(tuple(Variable(n, BASE, i) for i, n in enumerate(names)))


# ---------------------------------------------------------------------------
# Monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """Total multiplicative monomial order with 1 minimal.

    kind 'block' compares a leading variable block first (both blocks
    degrevlex); ``perm`` optionally permutes exponent slots before
    comparison, which is how elimination blocks for arbitrary variable
    subsets are formed.
    """

    kind: str = "degrevlex"  # lex | degrevlex | block
    split: int = 0
    perm: tuple | None = None

    def key_function(self, n: int) -> Callable[[Exponent], tuple]:
        return _key_function(self, n)

    def signature(self) -> str:
        p = "" if self.perm is None else ",".join(map(str, self.perm))
        return f"{self.kind}:{self.split}:{p}"


LEX = MonomialOrder("lex")
DEGREVLEX = MonomialOrder("degrevlex")


def block_order(drop_positions: Sequence[int], n: int) -> MonomialOrder:
    """Elimination order whose leading block is the given positions."""
    drop = tuple(drop_positions)
    rest = tuple(i for i in range(n) if i not in set(drop))
    return MonomialOrder("block", split=len(drop), perm=drop + rest)


def _lex_key(e: Exponent) -> tuple:
    return e


def _degrevlex_key(e: Exponent) -> tuple:
    return (sum(e),) + tuple(-x for x in reversed(e))


@lru_cache(maxsize=None)
def _key_function(order: MonomialOrder, n: int) -> Callable[[Exponent], tuple]:
    if order.perm is not None and len(order.perm) != n:
        raise ValueError("order permutation length does not match context")
    if order.kind == "lex":
        if order.perm is None:
            return _lex_key
        perm = order.perm
        return lambda e: tuple(e[i] for i in perm)
    if order.kind == "degrevlex":
        if order.perm is None:
            return _degrevlex_key
        perm = order.perm
        return lambda e: _degrevlex_key(tuple(e[i] for i in perm))
    if order.kind == "block":
        perm = order.perm if order.perm is not None else tuple(range(n))
        split = order.split

        def key(e: Exponent) -> tuple:
            pe = tuple(e[i] for i in perm)
            return _degrevlex_key(pe[:split]) + _degrevlex_key(pe[split:])

        return key
    raise ValueError(f"unknown monomial order kind {order.kind!r}")


def exp_mul(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def exp_divides(a: Exponent, b: Exponent) -> bool:
    """True when monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def exp_div(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def exp_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# Polynomials


class Polynomial:
    """Immutable exact polynomial: mapping exponent vector -> nonzero Fraction."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping[Exponent, Fraction]):
        self.ctx = ctx
        clean = {e: c for e, c in terms.items() if c != 0}
        for e in clean:
            if len(e) != len(ctx):
                raise ValueError("exponent length does not match context")
        self.terms = clean
        self._hash = None

    # -- basic protocol

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            if other == 0:
                return not self.terms
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "Polynomial") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")

    # -- arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Polynomial(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return self.ctx.zero()
            return Polynomial(self.ctx, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = exp_mul(e1, e2)
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return Polynomial(self.ctx, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ctx.one()
        for _ in range(k):
            result = result * self
        return result

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        raise TypeError(f"cannot combine Polynomial with {type(other)!r}")

    # -- structure

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: Variable | str) -> int:
        i = self.ctx.position(var)
        return max((e[i] for e in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.ctx), Fraction(0))

    def leading(self, order: MonomialOrder) -> tuple:
        """(exponent, coefficient) of the order-leading term."""
        key = order.key_function(len(self.ctx))
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX) -> list:
        key = order.key_function(len(self.ctx))
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def monic(self, order: MonomialOrder = DEGREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        _, c = self.leading(order)
        if c == 1:
            return self
        return self * (Fraction(1) / c)

    def partial(self, var: Variable | str) -> "Polynomial":
        """Formal partial derivative."""
        i = self.ctx.position(var)
        terms: dict = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = list(e)
            d[i] -= 1
            terms[tuple(d)] = terms.get(tuple(d), Fraction(0)) + c * e[i]
        return Polynomial(self.ctx, {e: c for e, c in terms.items() if c})

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        vals = [Fraction(point[v.name]) for v in self.ctx.variables]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(vals, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def substitute(self, assignment: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials (in a common target context) for variables.

        Variables absent from the assignment map to their namesake generator
        in the target context.
        """
        target = None
        for p in assignment.values():
            target = p.ctx
            break
        if target is None:
            return self
        result = target.zero()
        gens = {}
        for v in self.ctx.variables:
            a = assignment.get(v.name)
            gens[v.name] = a if a is not None else target.gen(v.name)
        for e, c in self.terms.items():
            term = target.const(c)
            for v, k in zip(self.ctx.variables, e):
                if k:
                    term = term * gens[v.name] ** k
            result = result + term
        return result

    def lift(self, target: VarContext) -> "Polynomial":
        """Reinterpret in a larger context containing all current variables."""
        pos = [target.position(v.name) for v in self.ctx.variables]
        m = len(target)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * m
            for p, k in zip(pos, e):
                ne[p] = k
            terms[tuple(ne)] = c
        return Polynomial(target, terms)

    def restrict(self, target: VarContext) -> "Polynomial":
        """Reinterpret in a smaller context; dropped variables must not occur."""
        keep = []
        for i, v in enumerate(self.ctx.variables):
            if v.name in target.names():
                keep.append((i, target.position(v.name)))
            else:
                if any(e[i] for e in self.terms):
                    raise ValueError(f"variable {v.name} occurs; cannot restrict")
        m = len(target)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * m
            for i, p in keep:
                ne[p] = e[i]
            terms[tuple(ne)] = c
        return Polynomial(target, terms)

    def is_homogeneous_in(self, positions: Sequence[int]) -> bool:
        degs = {sum(e[i] for i in positions) for e in self.terms}
        return len(degs) <= 1

    def coefficient_of(self, var: Variable | str, power: int) -> "Polynomial":
        """Coefficient of var**power, as a polynomial with var zeroed out."""
        i = self.ctx.position(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == power:
                d = list(e)
                d[i] = 0
                terms[tuple(d)] = c
        return Polynomial(self.ctx, terms)

    # -- formatting

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.ctx.names()
        chunks = []
        for e, c in self.sorted_terms(DEGREVLEX):
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            body = "*".join(factors)
            if not body:
                chunk = str(abs(c))
            elif abs(c) == 1:
                chunk = body
            else:
                chunk = f"{abs(c)}*{body}"
            sign = "-" if c < 0 else "+"
            chunks.append((sign, chunk))
        first_sign, first = chunks[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, chunk in chunks[1:]:
            out += f" {sign} {chunk}"
        return out


# ---------------------------------------------------------------------------
# Parsing: identifiers, ^ powers, * optional between coefficient and variable.


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _line_col(self) -> tuple:
        line = self.text.count("\n", 0, self.pos) + 1
        col = self.pos - (self.text.rfind("\n", 0, self.pos) + 1)
        return line, col

    def error(self, message: str) -> ParseError:
        line, col = self._line_col()
        return ParseError(message, line, col)

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def next_token(self) -> tuple:
        ch = self.peek()
        if ch == "":
            return ("end", "")
        if ch in "+-*^()/":
            self.pos += 1
            return ("op", ch)
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return ("int", self.text[start:self.pos])
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            return ("name", self.text[start:self.pos])
        raise self.error(f"unexpected character {ch!r}")


def parse_polynomial(text: str, ctx: VarContext) -> Polynomial:
    """Parse ASCII polynomial text, e.g. ``y^2 - x^3 - t^2*x^2``."""
    tz = _Tokenizer(text)
    value, tok = _parse_sum(tz, ctx, tz.next_token())
    if tok != ("end", ""):
        raise tz.error(f"trailing input {tok[1]!r}")
    return value


def _parse_sum(tz: _Tokenizer, ctx: VarContext, tok) -> tuple:
    sign = 1
    while tok == ("op", "+") or tok == ("op", "-"):
        if tok[1] == "-":
            sign = -sign
        tok = tz.next_token()
    value, tok = _parse_product(tz, ctx, tok)
    total = value * sign
    while tok in (("op", "+"), ("op", "-")):
        sign = 1 if tok[1] == "+" else -1
        tok = tz.next_token()
        while tok in (("op", "+"), ("op", "-")):
            if tok[1] == "-":
                sign = -sign
            tok = tz.next_token()
        value, tok = _parse_product(tz, ctx, tok)
        total = total + value * sign
    return total, tok


def _parse_product(tz: _Tokenizer, ctx: VarContext, tok) -> tuple:
    value, tok = _parse_power(tz, ctx, tok)
    while True:
        if tok == ("op", "*"):
            tok = tz.next_token()
            rhs, tok = _parse_power(tz, ctx, tok)
            value = value * rhs
        elif tok[0] in ("name", "int") or tok == ("op", "("):
            rhs, tok = _parse_power(tz, ctx, tok)
            value = value * rhs
        else:
            return value, tok


def _parse_power(tz: _Tokenizer, ctx: VarContext, tok) -> tuple:
    base, tok = _parse_atom(tz, ctx, tok)
    if tok == ("op", "^"):
        tok = tz.next_token()
        if tok[0] != "int":
            raise tz.error("exponent must be a nonnegative integer")
        k = int(tok[1])
        tok = tz.next_token()
        return base ** k, tok
    return base, tok


def _parse_atom(tz: _Tokenizer, ctx: VarContext, tok) -> tuple:
    kind, text = tok
    if kind == "int":
        nxt = tz.next_token()
        if nxt == ("op", "/"):
            den = tz.next_token()
            if den[0] != "int" or int(den[1]) == 0:
                raise tz.error("denominator must be a nonzero integer")
            return ctx.const(Fraction(int(text), int(den[1]))), tz.next_token()
        return ctx.const(int(text)), nxt
    if kind == "name":
        if text not in ctx.names():
            raise tz.error(f"unknown variable {text!r}")
        return ctx.gen(text), tz.next_token()
    if tok == ("op", "("):
        tok = tz.next_token()
        value, tok = _parse_sum(tz, ctx, tok)
        if tok != ("op", ")"):
            raise tz.error("expected ')'")
        return value, tz.next_token()
    if tok == ("op", "-"):
        value, tok = _parse_atom(tz, ctx, tz.next_token())
        return -value, tok
    raise tz.error(f"expected term, found {text!r}")
