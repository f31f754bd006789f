"""Exact multivariate polynomials over Q or F_p with a fixed monomial order."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Exps = tuple[int, ...]


class ParseError(ValueError):
    """Raised on malformed polynomial text."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class CoefficientField:
    """Q (characteristic 0) or the prime field F_p."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and not (_is_prime(p) and p < 2**31):
            raise ValueError(f"characteristic must be 0 or a prime < 2^31, got {p}")

    @property
    def kind(self) -> str:
        return "rationals" if self.characteristic == 0 else "prime_field"

    def __call__(self, c) -> int | Fraction:
        """Canonical representative of ``c`` in this field."""
        p = self.characteristic
        if p:
            if isinstance(c, Fraction):
                return c.numerator * pow(c.denominator, -1, p) % p
            return int(c) % p
        if isinstance(c, Fraction):
            return c.numerator if c.denominator == 1 else c
        return int(c)

    def div(self, a, b):
        p = self.characteristic
        if p:
            return a * pow(b, -1, p) % p
        q = Fraction(a) / b
        return q.numerator if q.denominator == 1 else q

    def __str__(self) -> str:
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"


QQ = CoefficientField(0)


def _key_lex(e: Exps):
    return e


def _key_grlex(e: Exps):
    return (sum(e), e)


def _key_grevlex(e: Exps):
    return (sum(e), tuple(-x for x in reversed(e)))


_ORDER_KEYS = {"lex": _key_lex, "grlex": _key_grlex, "grevlex": _key_grevlex}
MODULE_EXTENSIONS = ("term_over_position", "position_over_term", "schreyer")


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grevlex"
    module_extension: str = "term_over_position"

    def __post_init__(self):
        if self.kind not in _ORDER_KEYS:
            raise ValueError(f"unsupported order {self.kind!r}")
        if self.module_extension not in MODULE_EXTENSIONS:
            raise ValueError(f"unsupported module extension {self.module_extension!r}")

    @property
    def key(self):
        """Sort key on exponent tuples; larger key means larger monomial."""
        return _ORDER_KEYS[self.kind]


def monomial_compare(a: Exps, b: Exps, order: MonomialOrder | str = "grevlex") -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    if len(a) != len(b):
        raise ValueError("monomials have different variable counts")
    key = (order if isinstance(order, MonomialOrder) else MonomialOrder(order)).key
    ka, kb = key(tuple(a)), key(tuple(b))
    return (ka > kb) - (ka < kb)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class PolyRing:
    """k[x_1, ..., x_m] with a monomial order; every variable has degree 1."""

    variables: tuple[str, ...]
    field: CoefficientField = QQ
    order: MonomialOrder = MonomialOrder()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValueError("a ring needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be unique")
        for v in self.variables:
            if not _IDENT.match(v):
                raise ValueError(f"invalid variable name {v!r}")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.constant(1)

    def constant(self, c) -> Polynomial:
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name: str | int) -> Polynomial:
        i = name if isinstance(name, int) else self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> list[Polynomial]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Iterable[int], coeff=1) -> Polynomial:
        return Polynomial(self, {tuple(exps): coeff})

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self)

    def with_variables(self, variables: Iterable[str]) -> PolyRing:
        return PolyRing(tuple(variables), self.field, self.order)

    def __str__(self) -> str:
        return f"{self.field}[{','.join(self.variables)}] {self.order.kind}"


class Polynomial:
    """Immutable polynomial; ``terms`` is strictly descending in the ring order."""

    __slots__ = ("ring", "_dict", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[Exps, object] | Iterable = ()):
        F = ring.field
        m = ring.nvars
        d: dict[Exps, object] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = tuple(e)
            if len(e) != m or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {m} variables")
            c = F(F(c) + d.get(e, 0))
            if c:
                d[e] = c
            else:
                d.pop(e, None)
        self.ring = ring
        self._dict = d
        key = ring.order.key
        self.terms = tuple(sorted(d.items(), key=lambda t: key(t[0]), reverse=True))

    @classmethod
    def _from_dict(cls, ring: PolyRing, d: dict) -> Polynomial:
        # trusted constructor: d already canonical
        self = object.__new__(cls)
        self.ring = ring
        self._dict = d
        key = ring.order.key
        self.terms = tuple(sorted(d.items(), key=lambda t: key(t[0]), reverse=True))
        return self

    def as_dict(self) -> dict[Exps, object]:
        return dict(self._dict)

    def is_zero(self) -> bool:
        return not self._dict

    def __bool__(self) -> bool:
        return bool(self._dict)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def leading_monomial(self) -> Exps:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][0]

    @property
    def leading_coefficient(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][1]

    def total_degree(self) -> int:
        return max((sum(e) for e in self._dict), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._dict}) <= 1

    def is_monomial(self) -> bool:
        return len(self._dict) == 1

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._dict)

    def monic(self) -> Polynomial:
        if not self:
            return self
        return self * self.ring.field.div(1, self.leading_coefficient)

    def variables_used(self) -> set[int]:
        return {i for e in self._dict for i, x in enumerate(e) if x}

    def _check(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ValueError("polynomials belong to different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        F = self.ring.field
        d = dict(self._dict)
        for e, c in other._dict.items():
            v = F(d.get(e, 0) + c)
            if v:
                d[e] = v
            else:
                d.pop(e, None)
        return Polynomial._from_dict(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        F = self.ring.field
        return Polynomial._from_dict(self.ring, {e: F(-c) for e, c in self._dict.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            F = self.ring.field
            c = F(other)
            if not c:
                return self.ring.zero()
            return Polynomial._from_dict(self.ring, {e: F(a * c) for e, a in self._dict.items()})
        other = self._check(other)
        if other is NotImplemented:
            return other
        F = self.ring.field
        d: dict = {}
        for e1, c1 in self._dict.items():
            for e2, c2 in other._dict.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return Polynomial._from_dict(self.ring, {e: v for e, c in d.items() if (v := F(c))})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._dict == other._dict
        if isinstance(other, (int, Fraction)):
            return self._dict == self.ring.constant(other)._dict
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.terms))

    def substitute(self, values: Mapping[int, object], ring: PolyRing | None = None) -> Polynomial:
        """Replace variable ``i`` by the constant ``values[i]``; drop those variables
        when ``ring`` (with the remaining variables, in order) is given."""
        F = self.ring.field
        keep = [i for i in range(self.ring.nvars) if i not in values] if ring else None
        d: dict = {}
        for e, c in self._dict.items():
            for i, v in values.items():
                if e[i]:
                    c = c * F(v) ** e[i]
            c = F(c)
            if not c:
                continue
            if keep is not None:
                e = tuple(e[i] for i in keep)
            else:
                e = tuple(0 if i in values else x for i, x in enumerate(e))
            d[e] = F(d.get(e, 0) + c)
        return Polynomial(ring or self.ring, {e: c for e, c in d.items() if c})

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"


def _format_coeff(c) -> str:
    return str(c) if not isinstance(c, Fraction) else f"{c.numerator}/{c.denominator}"


def format_polynomial(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    names = f.ring.variables
    out = []
    for k, (e, c) in enumerate(f.terms):
        neg = (c < 0) if not f.ring.field.characteristic else False
        a = -c if neg else c
        mono = "*".join(
            names[i] if x == 1 else f"{names[i]}^{x}" for i, x in enumerate(e) if x
        )
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*^()/]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("var", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise ParseError("empty polynomial", 0)
        f = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return f

    def expr(self) -> Polynomial:
        f = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                g = self.term()
                f = f + g if val == "+" else f - g
            else:
                return f

    def term(self) -> Polynomial:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            f = self.term()
            return -f if val == "-" else f
        f = self.power()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = f * self.power()
            elif kind == "op" and val == "/":
                _, _, pos = self.take()
                k2, d, p2 = self.take()
                if k2 != "num" or d == 0:
                    raise ParseError("division only by a nonzero integer", p2)
                f = f * Fraction(1, d)
            elif kind in ("num", "var") or (kind == "op" and val == "("):
                f = f * self.power()
            else:
                return f

    def power(self) -> Polynomial:
        f = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k2, n, pos = self.take()
            if k2 != "num":
                raise ParseError("exponent must be a non-negative integer", pos)
            f = f**n
        return f

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return self.ring.constant(val)
        if kind == "var":
            if val not in self.ring.variables:
                raise ParseError(f"unknown variable {val!r}", pos)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect_op(")")
            return f
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    """Parse ``text`` such as ``"x^2*y - 3*z"`` or ``"(x+y)^2"`` into ``ring``."""
    return _Parser(text, ring).parse()
