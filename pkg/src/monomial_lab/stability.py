"""Hyers-Ulam stabilizer for the equation family.

Given f with ``|Df(x, y)| <= psi(x, y)`` and f(0) = 0, the map

    (J g)(x) = g(s x) / r

with step ``s`` and ratio ``r`` chosen by the branch is a strict contraction
in the psi-weighted sup metric whenever psi(s x, 0) <= L |r| psi(x, 0) with
L < 1. Its iterates ``f(s^n x) / r^n`` converge to the unique exact solution
T near f, and

    |f(x) - T(x)| <= L^(i-1) / ((1 - L) |c3 + c5 + c6|) * psi(x, 0).

The diagonal variant (c2 = c5 = 0) sets y = x instead: step a + b, ratio
(c3 + c4) / c1, psi(x, x) in place of psi(x, 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

from .equation import EquationFamily, residual_D, scaling_ratio
from .errors import (AllZeroPsi, DegenerateRatioError, DomainOverflow, NoConvergence,
                     InsufficientSamples, NonZeroAtOrigin, NotContractive,
                     OutOfRange, VariantPreconditionFailed)
from .functions import EXACT, FLOAT, FunctionHandle, Scalar, coerce, pairs
from .gp import GPModel, fit_gp

GENERAL = "general"
DIAGONAL = "diagonal"

DEFAULT_TOL = 1e-10
DEFAULT_MAX_N = {1: 40, 2: 200}


@dataclass(frozen=True)
class ControlFunction:
    """Nonnegative bound psi(x, y) on the defect.

    ``kind`` is ``constant`` (params: delta), ``power`` (params: p, w, for
    w(|x|^p + |y|^p)) or ``custom``. ``grid_only`` marks a psi that was
    read off a finite grid rather than proven to dominate |Df| everywhere.
    """

    kind: str
    params: tuple = ()
    fn: Callable | None = field(default=None, compare=False, repr=False)
    grid_only: bool = False

    @classmethod
    def constant(cls, delta) -> "ControlFunction":
        if delta < 0:
            raise ValueError("psi must be nonnegative")
        return cls("constant", (delta,))

    @classmethod
    def power(cls, p, w=1) -> "ControlFunction":
        if w < 0 or p < 0:
            raise ValueError("power psi needs p >= 0 and w >= 0")
        return cls("power", (p, w))

    @classmethod
    def custom(cls, fn, label: str = "custom") -> "ControlFunction":
        return cls("custom", (label,), fn)

    @classmethod
    def auto(cls, F: EquationFamily, f: FunctionHandle, grid: Sequence) -> "ControlFunction":
        """Constant psi = sup |Df| over ``grid`` x ``grid``; only grid-certified."""
        delta = max(abs(residual_D(F, f, x, y)) for x, y in pairs(grid))
        return cls("constant", (delta,), grid_only=True)

    def __call__(self, x, y):
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "power":
            p, w = self.params
            return w * (abs(x) ** p + abs(y) ** p)
        value = self.fn(x, y)
        if value < 0:
            raise ValueError(f"psi({x}, {y}) = {value} is negative")
        return value

    def describe(self) -> str:
        if self.kind == "constant":
            return f"const:{self.params[0]}"
        if self.kind == "power":
            return f"power:{self.params[0]},{self.params[1]}"
        return f"custom:{self.params[0]}"


@dataclass(frozen=True)
class StabilityBranch:
    i: int
    ratio: Scalar
    step: Scalar
    variant: str = GENERAL
    L: float | None = None
    # |c3 + c5 + c6| (general) or |c3 + c4| (diagonal)
    denominator: Scalar = 1
    # diagonal only: (c3 + c4 + c6) / (c1 + c2), reported when it differs from gamma
    alt_ratio: Scalar | None = None

    def psi_term(self, psi: ControlFunction, x):
        return psi(x, x) if self.variant == DIAGONAL else psi(x, 0)


def select_branch(F: EquationFamily, variant: str = GENERAL) -> StabilityBranch:
    if variant == GENERAL:
        lam = scaling_ratio(F)
        step = F.a
        denom = abs(F.c3 + F.c5 + F.c6)
        alt = None
    elif variant == DIAGONAL:
        if F.c2 != 0 or F.c5 != 0:
            raise VariantPreconditionFailed(
                f"diagonal variant needs c2 = c5 = 0 (c2={F.c2}, c5={F.c5})")
        if F.a + F.b == 0:
            raise VariantPreconditionFailed("diagonal variant needs a + b != 0")
        lam = (F.c3 + F.c4) / F.c1
        step = F.a + F.b
        denom = abs(F.c3 + F.c4)
        printed = (F.c3 + F.c4 + F.c6) / (F.c1 + F.c2)
        alt = printed if printed != lam else None
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if lam == 0 or abs(lam) == 1:
        raise DegenerateRatioError(f"ratio {lam} has modulus 0 or 1; no contraction branch")
    if abs(lam) > 1:
        return StabilityBranch(1, lam, step, variant, None, denom, alt)
    return StabilityBranch(2, 1 / lam, 1 / step, variant, None, denom, alt)


def estimate_L(psi: ControlFunction, branch: StabilityBranch, xs: Sequence = ()) -> float:
    """Smallest L with psi(s x, .) <= L |r| psi(x, .) on the samples.

    Analytic for constant and power psi; sampled for custom psi.
    """
    s, r = abs(branch.step), abs(branch.ratio)
    if psi.kind == "constant":
        if psi.params[0] == 0:
            raise AllZeroPsi("constant psi is zero")
        L = 1 / float(r)
    elif psi.kind == "power":
        p, w = psi.params
        if w == 0:
            raise AllZeroPsi("power psi has zero weight")
        L = float(s) ** float(p) / float(r)
    else:
        ratios = []
        for x in xs:
            base = branch.psi_term(psi, x)
            if base > 0:
                ratios.append(float(branch.psi_term(psi, branch.step * x)) / (float(r) * float(base)))
        if not ratios:
            raise AllZeroPsi("psi vanishes at every sample")
        L = max(ratios)
    if L >= 1:
        raise NotContractive(f"Lipschitz constant L = {L} is not < 1", L)
    return L


def psi_metric(g: FunctionHandle, h: FunctionHandle, psi: ControlFunction,
               grid: Sequence, diagonal: bool = False) -> float:
    """sup |g - h| / psi over grid points where psi does not vanish."""
    best = 0.0
    for x in grid:
        w = psi(x, x) if diagonal else psi(x, 0)
        if w == 0:
            continue
        try:
            d = abs(g(x) - h(x))
        except OutOfRange:
            return math.inf
        if math.isinf(float(d)):
            return math.inf
        best = max(best, float(d) / float(w))
    return best


def contraction_map(g: FunctionHandle, branch: StabilityBranch) -> FunctionHandle:
    """(J g)(x) = g(step x) / ratio."""
    step, ratio = coerce(branch.step, g.mode), coerce(branch.ratio, g.mode)
    return FunctionHandle(lambda x: g(step * x) / ratio, g.mode, g.limit / abs(float(step)),
                          f"J{g.label}")


def iterate_map(f: FunctionHandle, branch: StabilityBranch, n: int) -> FunctionHandle:
    """J^n f, i.e. x -> f(step^n x) / ratio^n."""
    step, ratio = coerce(branch.step, f.mode), coerce(branch.ratio, f.mode)
    sn, rn = step ** n, ratio ** n
    return FunctionHandle(lambda x: f(sn * x) / rn, f.mode, f.limit / abs(float(sn)),
                          f"J^{n}{f.label}")


def _memo(g: FunctionHandle) -> FunctionHandle:
    cache = {}

    def fn(x):
        if x not in cache:
            cache[x] = g(x)
        return cache[x]
    return FunctionHandle(fn, g.mode, g.limit, g.label)


@dataclass(frozen=True)
class Certification:
    passed: bool
    margin: float


def _fit_model(grid, T_values):
    # descriptive only; too few grid points just leaves it empty
    try:
        return fit_gp(list(zip(grid, T_values)))
    except InsufficientSamples:
        return None


@dataclass(frozen=True)
class StabilityReport:
    branch: StabilityBranch
    iterations: int
    grid: tuple
    f_values: tuple
    T_values: tuple
    bound_values: tuple
    bound_factor: float
    stated_bound_factor: float
    measured_error: Scalar
    residual_DT: Scalar
    fixed_point_defect: Scalar
    step_history: tuple
    T_model: GPModel | None
    psi: str
    psi_decay_ok: bool
    psi_dominates: bool
    psi_grid_only: bool
    certified: bool
    margin: float
    solution: FunctionHandle | None = field(default=None, compare=False, repr=False)

    @property
    def hypotheses_ok(self) -> bool:
        return self.psi_decay_ok and self.psi_dominates


def bound_factor(L: float, i: int, denominator) -> float:
    """L^(i-1) / ((1 - L) * denominator)."""
    return L ** (i - 1) / ((1 - L) * float(denominator))


def _denominator(F: EquationFamily, variant: str):
    if variant == DIAGONAL:
        return abs(F.c3 + F.c4)
    return abs(F.c3 + F.c5 + F.c6)


def verify_bound(report: StabilityReport, F: EquationFamily, psi: ControlFunction,
                 branch: StabilityBranch | None = None, grid: Sequence | None = None) -> Certification:
    """Pointwise check |f - T| <= bound on the report grid (or a subset of it)."""
    branch = branch or report.branch
    factor = bound_factor(branch.L, branch.i, _denominator(F, branch.variant))
    keep = None if grid is None else set(grid)
    passed, margin = True, math.inf
    for x, fv, tv in zip(report.grid, report.f_values, report.T_values):
        if keep is not None and x not in keep:
            continue
        bound = factor * float(branch.psi_term(psi, x))
        gap = bound - float(abs(fv - tv))
        passed = passed and gap >= 0
        margin = min(margin, gap)
    return Certification(passed, margin)


def _audit_pairs(grid):
    coarse = grid[:: max(1, len(grid) // 10)]
    out = [(x, 0 * x) for x in grid] + [(x, x) for x in grid] + [(x, -x) for x in grid]
    return out + pairs(coarse)


def _eval_orbit(f, points, n):
    try:
        return [f(p) for p in points]
    except OutOfRange as exc:
        raise DomainOverflow(f"iteration {n}: {exc}",
                             {"iterations": n - 1}) from exc


def stabilize(F: EquationFamily, f: FunctionHandle, psi: ControlFunction, grid: Sequence,
              tol: float = DEFAULT_TOL, max_n: int | None = None,
              variant: str = GENERAL) -> StabilityReport:
    """Recover the exact solution near ``f`` and certify the error bound."""
    mode = f.mode
    grid = tuple(coerce(x, mode) for x in grid)
    branch = select_branch(F, variant)
    zero = coerce(0, mode)
    origin = f(zero)
    if origin != 0 and (mode == EXACT or abs(origin) > tol):
        raise NonZeroAtOrigin(f"f(0) = {origin}")
    L = estimate_L(psi, branch, grid)
    branch = replace(branch, L=L)
    if max_n is None:
        max_n = DEFAULT_MAX_N[branch.i]

    step, ratio = coerce(branch.step, mode), coerce(branch.ratio, mode)
    f_values = _eval_orbit(f, grid, 0)
    prev = f_values
    history = []
    n, sn, rn = 0, coerce(1, mode), coerce(1, mode)
    converged = False
    while n < max_n:
        n += 1
        sn, rn = sn * step, rn * ratio
        reach = max(abs(float(sn * x)) for x in grid)
        if reach > f.limit:
            raise DomainOverflow(f"iteration {n}: |step^n x| = {reach} exceeds range {f.limit}",
                                 {"iterations": n - 1, "step_history": tuple(history)})
        cur = [v / rn for v in _eval_orbit(f, [sn * x for x in grid], n)]
        change = max(abs(c - p) for c, p in zip(cur, prev))
        history.append(change)
        prev = cur
        scale = max(1, max(abs(c) for c in cur))
        if change <= tol * scale:
            converged = True
            break
    if not converged:
        raise NoConvergence(f"no convergence after {max_n} iterations",
                            {"iterations": n, "step_history": tuple(history)})

    T = iterate_map(f, branch, n)
    T_values = tuple(prev)
    shifted = _eval_orbit(T, [step * x for x in grid], n + 1)
    defect = max(abs(s - ratio * t) for s, t in zip(shifted, T_values))
    # grid x grid audit revisits the same arguments (x + y, 2x - y, ...) many times
    Tm = _memo(T)
    residual_DT = max(abs(residual_D(F, Tm, x, y)) for x, y in pairs(grid))

    audit = _audit_pairs(grid)
    decay = []
    for k in range(n + 1):
        sk, rk = step ** k, ratio ** k
        decay.append(max(float(psi(sk * x, sk * y)) / abs(float(rk)) for x, y in audit))
    decay_ok = all(b <= a * (1 + 1e-12) for a, b in zip(decay, decay[1:]))
    decay_ok = decay_ok and (decay[0] == 0 or decay[-1] < decay[0])
    fm = _memo(f)
    dominates = all(float(abs(residual_D(F, fm, x, y))) <= float(psi(x, y)) * (1 + 1e-12) + 1e-300
                    for x, y in audit)

    denom = _denominator(F, branch.variant)
    factor = bound_factor(L, branch.i, denom)
    stated = L ** (2 - branch.i) / ((1 - L) * float(denom))
    bounds = tuple(factor * float(branch.psi_term(psi, x)) for x in grid)
    errors = [abs(a - b) for a, b in zip(f_values, T_values)]
    report = StabilityReport(
        branch=branch, iterations=n, grid=grid, f_values=tuple(f_values), T_values=T_values,
        bound_values=bounds, bound_factor=factor, stated_bound_factor=stated,
        measured_error=max(errors), residual_DT=residual_DT, fixed_point_defect=defect,
        step_history=tuple(history), T_model=_fit_model(grid, T_values),
        psi=psi.describe(), psi_decay_ok=decay_ok, psi_dominates=dominates,
        psi_grid_only=psi.grid_only, certified=False, margin=0.0, solution=T)
    cert = verify_bound(report, F, psi)
    return replace(report, certified=cert.passed, margin=cert.margin)


def stabilize_diagonal(F: EquationFamily, f: FunctionHandle, psi: ControlFunction,
                       grid: Sequence, tol: float = DEFAULT_TOL,
                       max_n: int | None = None) -> StabilityReport:
    return stabilize(F, f, psi, grid, tol, max_n, variant=DIAGONAL)
