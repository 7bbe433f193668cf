"""Scalar generalized polynomials a0 + c1 x + c2 x^2 + c3 x^3 + c4 x^4.

On the real line the diagonal of a symmetric k-additive map that is also
rational-homogeneous is represented by ``c_k * x**k``; a GP model is the
sum of those diagonals plus a constant.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import GPViolation, InsufficientSamples
from .functions import EXACT, FLOAT, FunctionHandle, Scalar, coerce, exactify, mode_of

MAX_DEGREE = 4


@dataclass(frozen=True)
class GPModel:
    a0: Scalar = Fraction(0)
    coeffs: tuple = (Fraction(0),) * MAX_DEGREE

    def __post_init__(self):
        cs = tuple(exactify(c) for c in self.coeffs)
        if len(cs) > MAX_DEGREE:
            raise ValueError(f"at most {MAX_DEGREE} coefficients")
        cs = cs + (Fraction(0),) * (MAX_DEGREE - len(cs))
        object.__setattr__(self, "a0", exactify(self.a0))
        object.__setattr__(self, "coeffs", cs)

    @property
    def mode(self) -> str:
        return mode_of(self.a0, *self.coeffs)

    @property
    def degree(self) -> int:
        for k in range(MAX_DEGREE, 0, -1):
            if self.coeffs[k - 1] != 0:
                return k
        return 0

    def __call__(self, x):
        return eval_gp(self, x)

    def as_function(self, label: str | None = None) -> FunctionHandle:
        return FunctionHandle(lambda x: eval_gp(self, x), self.mode, label=label or repr(self))


def eval_gp(p: GPModel, x) -> Scalar:
    mode = p.mode if not isinstance(x, float) else FLOAT
    x = coerce(x, mode)
    acc = coerce(p.coeffs[-1], mode)
    for c in reversed(p.coeffs[:-1]):
        acc = acc * x + coerce(c, mode)
    return acc * x + coerce(p.a0, mode)


def scale_law_check(p: GPModel, r, x) -> tuple:
    """(p(r x), a0 + sum r^k c_k x^k); the two agree exactly in exact mode."""
    lhs = eval_gp(p, r * x)
    rhs = p.a0 + sum(r ** k * c * x ** k for k, c in enumerate(p.coeffs, start=1))
    return lhs, rhs


def _solve_exact(A, b):
    """Gauss-Jordan elimination over Fractions; A is square and nonsingular."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [vr - factor * vc for vr, vc in zip(M[r], M[col])]
    return [row[-1] for row in M]


def _vandermonde_inverse():
    nodes = range(1, MAX_DEGREE + 1)
    V = [[Fraction(r) ** k for k in nodes] for r in nodes]
    cols = [_solve_exact(V, [int(i == j) for i in range(len(V))]) for j in range(len(V))]
    return tuple(tuple(cols[j][i] for j in range(len(V))) for i in range(len(V)))


# rows map (f(x), f(2x), f(3x), f(4x)) to the components (a1*(x), ..., a4*(x))
VANDERMONDE_INV = _vandermonde_inverse()
VALIDATION_NODE = 5
VALIDATION_RTOL = 1e-8


def component_split(f: FunctionHandle, x) -> tuple:
    """Monomial components of ``f`` at ``x``, assuming f(0) = 0 and degree <= 4.

    Solves f(r x) = sum_k r^k v_k for r = 1..4 and checks the answer at r = 5.
    """
    mode = f.mode
    x = coerce(x, mode)
    origin = abs(f(coerce(0, mode)))
    if origin != 0 and (mode == EXACT or origin > VALIDATION_RTOL):
        raise GPViolation(f"component split needs f(0) = 0, got {origin}")
    values = [f(r * x) for r in range(1, MAX_DEGREE + 1)]
    inv = VANDERMONDE_INV if mode == EXACT else [[float(v) for v in row] for row in VANDERMONDE_INV]
    comps = tuple(sum(m * v for m, v in zip(row, values)) for row in inv)
    r = VALIDATION_NODE
    predicted = sum(r ** k * v for k, v in enumerate(comps, start=1))
    actual = f(r * x)
    if mode == EXACT:
        bad = predicted != actual
    else:
        bad = abs(predicted - actual) > VALIDATION_RTOL * max(1.0, abs(actual))
    if bad:
        raise GPViolation(f"node r={r}: reconstructed {predicted}, observed {actual}")
    return comps


def fit_gp(samples: Sequence, max_degree: int = MAX_DEGREE) -> GPModel:
    """Least-squares GP model through ``(x, f(x))`` samples.

    All-rational samples are fitted exactly via the normal equations;
    otherwise numpy's scaled polynomial least squares is used.
    """
    if not 0 <= max_degree <= MAX_DEGREE:
        raise ValueError(f"max_degree must be in 0..{MAX_DEGREE}")
    xs = [x for x, _ in samples]
    ys = [y for _, y in samples]
    if len(set(xs)) < max_degree + 1:
        raise InsufficientSamples(
            f"need {max_degree + 1} distinct abscissae, got {len(set(xs))}")
    if mode_of(*xs, *ys) == EXACT:
        rows = [[Fraction(x) ** k for k in range(max_degree + 1)] for x in xs]
        n = max_degree + 1
        AtA = [[sum(row[i] * row[j] for row in rows) for j in range(n)] for i in range(n)]
        Aty = [sum(row[i] * Fraction(y) for row, y in zip(rows, ys)) for i in range(n)]
        sol = _solve_exact(AtA, Aty)
    else:
        sol = np.polynomial.polynomial.polyfit(
            np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), max_degree).tolist()
    return GPModel(sol[0], tuple(sol[1:]))


def is_monomial(p: GPModel, tol: float = 1e-9):
    """Degree k if p is (within tol) the single monomial c_k x^k, else None."""
    mags = [abs(c) for c in p.coeffs]
    top = max(mags)
    if top == 0:
        return None
    big = [k for k, m in enumerate(mags, start=1) if m > tol * top]
    if len(big) != 1 or abs(p.a0) > tol * max(1, top):
        return None
    return big[0]
