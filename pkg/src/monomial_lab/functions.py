"""Evaluable scalar functions and the exact/float mode discipline.

Every computation runs in one of two modes. In exact mode all scalars are
``fractions.Fraction`` and nothing is ever rounded; in float mode they are
Python floats and zero tests go through an explicit tolerance. The two are
never mixed: feeding a float into an exact-mode handle raises ``ModeError``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence, Union

from .errors import EvaluationError, ModeError, OutOfRange

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"


def coerce(value, mode: str) -> Scalar:
    """Convert ``value`` into the scalar type of ``mode``."""
    if mode == EXACT:
        if isinstance(value, Rational):
            return Fraction(value)
        raise ModeError(f"non-rational value {value!r} in an exact-mode computation")
    if mode == FLOAT:
        return float(value)
    raise ValueError(f"unknown mode {mode!r}")


def mode_of(*values) -> str:
    """EXACT when every value is rational, FLOAT otherwise."""
    return EXACT if all(isinstance(v, Rational) for v in values) else FLOAT


def exactify(value):
    """ints become Fractions; floats and Fractions pass through."""
    if isinstance(value, Rational):
        return Fraction(value)
    return float(value)


@dataclass(frozen=True)
class FunctionHandle:
    """A deterministic map from scalars to scalars.

    ``limit`` is the largest ``|x|`` at which ``fn`` may be evaluated;
    the stabilizer checks orbit points against it before iterating.
    """

    fn: Callable[[Scalar], Scalar]
    mode: str = EXACT
    limit: float = math.inf
    label: str = "f"

    def __call__(self, x) -> Scalar:
        x = coerce(x, self.mode)
        if abs(x) > self.limit:
            raise OutOfRange(f"{self.label}: argument {x} beyond evaluable range {self.limit}")
        try:
            value = self.fn(x)
        except OverflowError as exc:
            raise OutOfRange(f"{self.label}({x}) overflowed") from exc
        except (ArithmeticError, ValueError) as exc:
            if isinstance(exc, EvaluationError):
                raise
            raise EvaluationError(f"{self.label}({x}) failed: {exc}") from exc
        value = coerce(value, self.mode)
        if self.mode == FLOAT and not math.isfinite(value):
            raise OutOfRange(f"{self.label}({x}) is not finite")
        return value

    def _combine(self, other, op, label):
        if not isinstance(other, FunctionHandle):
            return NotImplemented
        if other.mode != self.mode:
            raise ModeError("cannot combine exact and float handles")
        f, g = self.fn, other.fn
        return FunctionHandle(lambda x: op(f(x), g(x)), self.mode,
                              min(self.limit, other.limit), label)

    def __add__(self, other):
        return self._combine(other, lambda u, v: u + v, f"({self.label} + {getattr(other, 'label', '?')})")

    def __sub__(self, other):
        return self._combine(other, lambda u, v: u - v, f"({self.label} - {getattr(other, 'label', '?')})")

    def __rmul__(self, factor):
        factor = coerce(factor, self.mode)
        f = self.fn
        return FunctionHandle(lambda x: factor * f(x), self.mode, self.limit, f"{factor}*{self.label}")

    def __neg__(self):
        return (-1) * self


def polynomial(coeffs: Sequence, mode: str | None = None, label: str | None = None) -> FunctionHandle:
    """Handle for ``sum(coeffs[k] * x**k)``, evaluated by Horner's rule."""
    mode = mode or mode_of(*coeffs)
    cs = [coerce(c, mode) for c in coeffs]

    def fn(x):
        acc = cs[-1] if cs else coerce(0, mode)
        for c in reversed(cs[:-1]):
            acc = acc * x + c
        return acc

    if label is None:
        label = " + ".join(f"{c}*x^{k}" for k, c in enumerate(cs) if c) or "0"
    return FunctionHandle(fn, mode, label=label)


def monomial(k: int, coef=1, mode: str = EXACT) -> FunctionHandle:
    return polynomial([0] * k + [coef], mode, label=f"{coef}*x^{k}")


def from_callable(fn, mode: str = FLOAT, label: str = "f", limit: float = math.inf) -> FunctionHandle:
    return FunctionHandle(fn, mode, limit, label)


def linear_grid(lo, hi, n: int, mode: str | None = None) -> list:
    """``n`` equally spaced points from ``lo`` to ``hi`` inclusive."""
    if n < 2:
        raise ValueError("grid needs at least two points")
    mode = mode or mode_of(lo, hi)
    lo, hi = coerce(lo, mode), coerce(hi, mode)
    if not lo < hi:
        raise ValueError("grid requires lo < hi")
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def pairs(xs: Sequence, ys: Sequence | None = None) -> list:
    """Cartesian product grid of (x, y) pairs."""
    ys = xs if ys is None else ys
    return [(x, y) for x in xs for y in ys]
