"""Mini-language for test functions.

    spec  := term ('+' term)*
    term  := 'poly:' num (',' num){0..4}
           | 'sin:amp=' num ',freq=' num
           | 'cos:amp=' num ',freq=' num
           | 'noise:amp=' num ',seed=' int
           | 'scale:factor=' num '(' spec ')'
    num   := integer | p/q | decimal (optional exponent), optionally signed

Whitespace between tokens is ignored. Literals keep their source text, so
``parse_function_spec(print_function_spec(s)) == s`` on parsed specs.

A spec containing a decimal literal or a sin/cos term needs float mode;
otherwise it evaluates exactly over rationals.
"""
from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ModeError, ParseError
from .functions import EXACT, FLOAT, FunctionHandle, coerce

_NUM = re.compile(r"[+-]?(?:\d+/\d+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")
_INT = re.compile(r"[+-]?\d+")


@dataclass(frozen=True)
class Poly:
    coeffs: tuple


@dataclass(frozen=True)
class Sin:
    amp: str
    freq: str


@dataclass(frozen=True)
class Cos:
    amp: str
    freq: str


@dataclass(frozen=True)
class Noise:
    amp: str
    seed: int


@dataclass(frozen=True)
class Scale:
    inner: "FunctionSpec"
    factor: str


@dataclass(frozen=True)
class FunctionSpec:
    terms: tuple


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, lit):
        self.skip()
        return self.text.startswith(lit, self.pos)

    def expect(self, lit):
        self.skip()
        if not self.text.startswith(lit, self.pos):
            raise ParseError(f"expected {lit!r}", self.pos, {lit})
        self.pos += len(lit)

    def number(self, pattern=_NUM, what="number"):
        self.skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            raise ParseError(f"expected {what}", self.pos, {what})
        self.pos = m.end()
        return m.group(0)

    def spec(self):
        terms = [self.term()]
        while self.peek("+"):
            self.expect("+")
            terms.append(self.term())
        return FunctionSpec(tuple(terms))

    def term(self):
        self.skip()
        heads = ("poly:", "sin:", "cos:", "noise:", "scale:")
        for head in heads:
            if self.text.startswith(head, self.pos):
                self.pos += len(head)
                return getattr(self, head[:-1])()
        raise ParseError("expected a term", self.pos, set(heads))

    def poly(self):
        coeffs = [self.number()]
        while len(coeffs) < 5 and self.peek(","):
            self.expect(",")
            coeffs.append(self.number())
        return Poly(tuple(coeffs))

    def _wave(self, cls):
        self.expect("amp=")
        amp = self.number()
        self.expect(",")
        self.expect("freq=")
        return cls(amp, self.number())

    def sin(self):
        return self._wave(Sin)

    def cos(self):
        return self._wave(Cos)

    def noise(self):
        self.expect("amp=")
        amp = self.number()
        self.expect(",")
        self.expect("seed=")
        return Noise(amp, int(self.number(_INT, "integer")))

    def scale(self):
        self.expect("factor=")
        factor = self.number()
        self.expect("(")
        inner = self.spec()
        self.expect(")")
        return Scale(inner, factor)


def parse_function_spec(text: str) -> FunctionSpec:
    p = _Parser(text)
    spec = p.spec()
    p.skip()
    if p.pos != len(text):
        raise ParseError("unexpected trailing input", p.pos, {"+", "end of input"})
    return spec


def print_function_spec(spec: FunctionSpec) -> str:
    def term(t):
        if isinstance(t, Poly):
            return "poly:" + ",".join(t.coeffs)
        if isinstance(t, Sin):
            return f"sin:amp={t.amp},freq={t.freq}"
        if isinstance(t, Cos):
            return f"cos:amp={t.amp},freq={t.freq}"
        if isinstance(t, Noise):
            return f"noise:amp={t.amp},seed={t.seed}"
        return f"scale:factor={t.factor}({print_function_spec(t.inner)})"
    return " + ".join(term(t) for t in spec.terms)


def _literals(spec):
    for t in spec.terms:
        if isinstance(t, Poly):
            yield from t.coeffs
        elif isinstance(t, (Sin, Cos)):
            yield t.amp
            yield t.freq
        elif isinstance(t, Noise):
            yield t.amp
        else:
            yield t.factor
            yield from _literals(t.inner)


def _has_wave(spec):
    return any(isinstance(t, (Sin, Cos)) or (isinstance(t, Scale) and _has_wave(t.inner))
               for t in spec.terms)


def is_decimal(text: str) -> bool:
    return "/" not in text and any(ch in text for ch in ".eE")


def required_mode(spec: FunctionSpec) -> str:
    if _has_wave(spec) or any(is_decimal(s) for s in _literals(spec)):
        return FLOAT
    return EXACT


def noise_value(x, seed: int, mode: str):
    """Deterministic per-point value in [-1, 1], zero at the origin.

    Keyed on the exact rational value of x, so an exactly representable
    point gets the same noise in both modes.
    """
    key = Fraction(x)
    if key == 0:
        return coerce(0, mode)
    digest = hashlib.blake2b(f"{seed}:{key.numerator}/{key.denominator}".encode(),
                             digest_size=8).digest()
    u = int.from_bytes(digest, "big")
    return coerce(Fraction(2 * u - 2 ** 64, 2 ** 64), mode)


def build_function(spec: FunctionSpec, mode: str | None = None) -> FunctionHandle:
    need = required_mode(spec)
    mode = mode or need
    if mode == EXACT and need == FLOAT:
        raise ModeError("spec needs float mode (decimal literal or sin/cos term)")

    def num(text):
        return coerce(Fraction(text), mode)

    def compile_spec(s):
        parts = [compile_term(t) for t in s.terms]
        return lambda x: sum((p(x) for p in parts[1:]), parts[0](x))

    def compile_term(t):
        if isinstance(t, Poly):
            cs = [num(c) for c in t.coeffs]

            def poly(x):
                acc = cs[-1]
                for c in reversed(cs[:-1]):
                    acc = acc * x + c
                return acc
            return poly
        if isinstance(t, (Sin, Cos)):
            amp, freq = num(t.amp), num(t.freq)
            wave = math.sin if isinstance(t, Sin) else math.cos
            return lambda x: amp * wave(freq * x)
        if isinstance(t, Noise):
            amp, seed = num(t.amp), t.seed
            return lambda x: amp * noise_value(x, seed, mode)
        factor, inner = num(t.factor), compile_spec(t.inner)
        return lambda x: factor * inner(x)

    return FunctionHandle(compile_spec(spec), mode, label=print_function_spec(spec))
