"""The equation family

    c1 f(ax+by) + c2 f(ax-by) = c3 f(x) + c4 f(y) + c5 f(x+y) + c6 f(x-y),

its defect operator D, and classification of an instance by the degree of
the monomial functions that solve it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import EmptyGrid, InvalidFamily
from .functions import EXACT, FLOAT, FunctionHandle, Scalar, coerce, exactify, mode_of

SNAP_TOL = 1e-9


@dataclass(frozen=True)
class EquationFamily:
    a: Scalar
    b: Scalar
    c1: Scalar
    c2: Scalar
    c3: Scalar
    c4: Scalar
    c5: Scalar
    c6: Scalar

    def __post_init__(self):
        for name in ("a", "b", "c1", "c2", "c3", "c4", "c5", "c6"):
            object.__setattr__(self, name, exactify(getattr(self, name)))
        for name in ("a", "b", "c1", "c3"):
            if getattr(self, name) == 0:
                raise InvalidFamily(f"{name} must be nonzero ({name}=0)")
        if self.c1 + self.c2 == 0:
            raise InvalidFamily("c1 + c2 must be nonzero")

    @property
    def coeffs(self) -> tuple:
        return (self.c1, self.c2, self.c3, self.c4, self.c5, self.c6)

    @property
    def params(self) -> tuple:
        return (self.a, self.b) + self.coeffs

    @property
    def mode(self) -> str:
        return mode_of(*self.params)

    def in_mode(self, mode: str) -> tuple:
        """(a, b, c1..c6) converted to ``mode``."""
        return tuple(coerce(v, mode) for v in self.params)


def new_family(a, b, c1, c2, c3, c4, c5, c6) -> EquationFamily:
    return EquationFamily(a, b, c1, c2, c3, c4, c5, c6)


PRESETS = {
    # Q(x+y) + Q(x-y) = 2Q(x) + 2Q(y)
    "quadratic": (1, 1, 1, 1, 2, 2, 0, 0),
    # f(2x+y) + f(2x-y) = 12f(x) + 2f(x+y) + 2f(x-y)
    "cubic": (2, 1, 1, 1, 12, 0, 2, 2),
    # F(2x+y) + F(2x-y) = 24F(x) - 6F(y) + 4F(x+y) + 4F(x-y)
    "quartic": (2, 1, 1, 1, 24, -6, 4, 4),
    # f((x+y)/2) + f((x-y)/2) = f(x), solved by f(x) = x
    "halving_additive": (Fraction(1, 2), Fraction(1, 2), 1, 1, 1, 0, 0, 0),
}

# degree of the known monomial solution x**k of each preset
PRESET_DEGREES = {"quadratic": 2, "cubic": 3, "quartic": 4, "halving_additive": 1}


def preset(name: str) -> EquationFamily:
    try:
        return EquationFamily(*PRESETS[name])
    except KeyError:
        raise InvalidFamily(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def residual_D(F: EquationFamily, f: FunctionHandle, x, y) -> Scalar:
    """Defect Df(x, y); exactly zero in exact mode iff f solves F at (x, y)."""
    mode = f.mode
    a, b, c1, c2, c3, c4, c5, c6 = F.in_mode(mode)
    x, y = coerce(x, mode), coerce(y, mode)
    return (c1 * f(a * x + b * y) + c2 * f(a * x - b * y)
            - c3 * f(x) - c4 * f(y) - c5 * f(x + y) - c6 * f(x - y))


def scaling_ratio(F: EquationFamily) -> Scalar:
    """lambda = (c3 + c5 + c6) / (c1 + c2), from setting y = 0."""
    return (F.c3 + F.c5 + F.c6) / (F.c1 + F.c2)


@dataclass(frozen=True)
class Degree:
    """Solutions with f(0) = 0 are monomials of degree ``k``."""
    k: int
    ratio: Scalar
    name = "Degree"


@dataclass(frozen=True)
class NonIntegerDegree:
    """log_|a| |lambda| is not an integer in 1..4.

    Covers integral values outside 1..4 as well: degree is capped at 4 for
    any solution, so either way only the trivial solution has f(0) = 0.
    """
    value: float
    name = "NonIntegerDegree"

    @property
    def only_trivial(self) -> bool:
        return True


@dataclass(frozen=True)
class DegenerateRatio:
    ratio: Scalar
    name = "DegenerateRatio"


@dataclass(frozen=True)
class UndefinedBase:
    """|a| = 1: the logarithm has no base. Fall back to the GP-degree probe."""
    ratio: Scalar
    name = "UndefinedBase"
    fallback = "gp-degree"


def _is_one(v) -> bool:
    if isinstance(v, float):
        return math.isclose(v, 1.0, rel_tol=1e-12)
    return v == 1


def classify(F: EquationFamily):
    lam = scaling_ratio(F)
    base = abs(F.a)
    if _is_one(base):
        return UndefinedBase(lam)
    if lam == 0 or _is_one(abs(lam)):
        return DegenerateRatio(lam)
    value = math.log(abs(lam)) / math.log(base)
    if F.mode == EXACT:
        for k in range(1, 5):
            if base ** k == abs(lam):
                return Degree(k, lam)
        return NonIntegerDegree(value)
    k = round(value)
    if abs(value - k) <= SNAP_TOL and 1 <= k <= 4:
        return Degree(k, lam)
    return NonIntegerDegree(value)


@dataclass(frozen=True)
class ResidualStats:
    max_abs: Scalar
    mean_abs: Scalar
    argmax: tuple
    count: int


def residual_stats(F: EquationFamily, f: FunctionHandle, grid: Sequence) -> ResidualStats:
    """Aggregate |Df(x, y)| over a list of (x, y) pairs."""
    if not grid:
        raise EmptyGrid("residual_stats needs at least one (x, y) pair")
    total = coerce(0, f.mode)
    best, where = None, None
    for x, y in grid:
        r = abs(residual_D(F, f, x, y))
        total += r
        if best is None or r > best:
            best, where = r, (coerce(x, f.mode), coerce(y, f.mode))
    return ResidualStats(best, total / len(grid), where, len(grid))


def scale_identity_defect(F: EquationFamily, f: FunctionHandle, x) -> Scalar:
    """f(ax) - lambda f(x); zero for monomial solutions of the right degree."""
    mode = f.mode
    x = coerce(x, mode)
    return f(coerce(F.a, mode) * x) - coerce(scaling_ratio(F), mode) * f(x)


__all__ = [
    "EquationFamily", "new_family", "preset", "PRESETS", "PRESET_DEGREES",
    "residual_D", "scaling_ratio", "classify", "residual_stats", "ResidualStats",
    "Degree", "NonIntegerDegree", "DegenerateRatio", "UndefinedBase",
    "scale_identity_defect", "SNAP_TOL", "FLOAT", "EXACT",
]
