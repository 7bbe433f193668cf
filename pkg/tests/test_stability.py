import math
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monomial_lab import (ControlFunction, build_function, contraction_map, estimate_L,
                          from_callable, iterate_map, linear_grid, monomial, new_family,
                          parse_function_spec, polynomial, preset, psi_metric, select_branch,
                          stabilize, stabilize_diagonal, verify_bound)
from monomial_lab.errors import (AllZeroPsi, DegenerateRatioError, DomainOverflow, NoConvergence,
                                 NonZeroAtOrigin, NotContractive, VariantPreconditionFailed)
from monomial_lab.functions import FLOAT
from monomial_lab.stability import DIAGONAL, bound_factor

EPS = 0.01
GRID = linear_grid(-5.0, 5.0, 101)
CAUCHY = new_family(1, 1, 1, 0, 1, 1, 0, 0)


def cubic_sin(eps=EPS):
    return from_callable(lambda x: x ** 3 + eps * math.sin(x), label="x^3 + eps sin x")


def test_select_branch_examples():
    b = select_branch(preset("cubic"))
    assert (b.i, b.ratio, b.step) == (1, 8, 2)
    b = select_branch(preset("halving_additive"))
    assert (b.i, b.ratio, b.step) == (2, 2, 2)
    with pytest.raises(VariantPreconditionFailed):
        select_branch(preset("cubic"), DIAGONAL)
    with pytest.raises(DegenerateRatioError):
        select_branch(preset("quadratic"))


def test_select_branch_diagonal():
    b = select_branch(CAUCHY, DIAGONAL)
    assert (b.i, b.ratio, b.step, b.denominator) == (1, 2, 2, 2)
    assert b.alt_ratio is None
    # c6 != 0 makes the alternative ratio formula disagree with (c3 + c4) / c1
    b = select_branch(new_family(1, 1, 1, 0, 1, 1, 0, 1), DIAGONAL)
    assert b.ratio == 2 and b.alt_ratio == 3
    with pytest.raises(VariantPreconditionFailed):
        select_branch(new_family(1, 1, 1, 0, 1, 1, 1, 0), DIAGONAL)
    # gamma = 1/4 -> inverse branch with step 1/(a+b)
    b = select_branch(new_family(1, 1, 4, 0, 1, 0, 0, 0), DIAGONAL)
    assert (b.i, b.ratio, b.step) == (2, 4, Fraction(1, 2))


def test_estimate_L_examples():
    cubic = select_branch(preset("cubic"))
    assert estimate_L(ControlFunction.constant(0.3), cubic) == 1 / 8
    assert estimate_L(ControlFunction.power(1, 1), cubic) == 1 / 4
    with pytest.raises(NotContractive) as info:
        estimate_L(ControlFunction.power(3, 1), cubic)
    assert info.value.lipschitz == 1.0
    with pytest.raises(AllZeroPsi):
        estimate_L(ControlFunction.constant(0), cubic)


def test_estimate_L_custom_matches_analytic():
    cubic = select_branch(preset("cubic"))
    psi = ControlFunction.custom(lambda x, y: abs(x) + abs(y))
    assert estimate_L(psi, cubic, GRID) == pytest.approx(1 / 4)
    with pytest.raises(AllZeroPsi):
        estimate_L(ControlFunction.custom(lambda x, y: 0.0), cubic, GRID)


def test_psi_metric_examples():
    f = from_callable(math.cos)
    delta = 0.25
    assert psi_metric(f, f, ControlFunction.constant(1), GRID) == 0
    g = from_callable(lambda x: math.cos(x) + delta)
    assert psi_metric(g, f, ControlFunction.constant(delta), GRID) == pytest.approx(1, rel=1e-12)
    sq, zero = monomial(2, mode=FLOAT), polynomial([0.0])
    assert psi_metric(sq, zero, ControlFunction.power(1, 1), [1.0, 2.0, 4.0]) == 4
    assert psi_metric(from_callable(lambda x: math.inf), zero, ControlFunction.constant(1), [1.0]) == math.inf


bounded = st.lists(st.floats(-1, 1), min_size=3, max_size=3)


@settings(max_examples=50, deadline=None)
@given(u=bounded, v=bounded, name=st.sampled_from(["cubic", "quartic", "halving_additive"]),
       psi_kind=st.sampled_from(["const", "power"]))
def test_contraction_property(u, v, name, psi_kind):
    branch = select_branch(preset(name))
    psi = ControlFunction.constant(0.5) if psi_kind == "const" else ControlFunction.power(1, 1)
    if psi_kind == "power" and branch.i == 2:
        # |x| against the halving family sits exactly at L = 1
        return
    L = estimate_L(psi, branch, GRID)
    g = from_callable(lambda x: u[0] * math.sin(u[1] * x) + u[2] * x)
    h = from_callable(lambda x: v[0] * math.cos(v[1] * x) + v[2] * x)
    Jg, Jh = contraction_map(g, branch), contraction_map(h, branch)
    image = sorted(set(GRID) | {float(branch.step) * x for x in GRID})
    assert psi_metric(Jg, Jh, psi, GRID) <= L * psi_metric(g, h, psi, image) * (1 + 1e-12) + 1e-15


def test_stabilize_cubic_branch_one():
    psi = ControlFunction.constant(18 * EPS)
    report = stabilize(preset("cubic"), cubic_sin(), psi, GRID, tol=1e-12)
    assert report.branch.i == 1 and report.branch.L == 1 / 8
    assert report.bound_factor == pytest.approx(1 / 14)
    assert report.certified and report.margin > 0
    assert report.measured_error <= EPS
    assert max(abs(t - x ** 3) for x, t in zip(GRID, report.T_values)) <= 1e-8
    assert report.fixed_point_defect <= 1e-9
    assert report.residual_DT <= 1e-8
    assert report.psi_decay_ok and report.psi_dominates
    assert report.T_model.coeffs[2] == pytest.approx(1, abs=1e-9)


def test_stabilize_records_both_exponents():
    psi = ControlFunction.constant(18 * EPS)
    report = stabilize(preset("halving_additive"),
                       from_callable(lambda x: x + EPS * math.cos(x) - EPS), psi, GRID)
    L = report.branch.L
    assert report.bound_factor == pytest.approx(L / (1 - L))
    assert report.stated_bound_factor == pytest.approx(1 / (1 - L))


@pytest.mark.parametrize("name, k", [("cubic", 3), ("quartic", 4), ("halving_additive", 1)])
def test_exact_solution_is_fixed_point(name, k):
    grid = linear_grid(-5, 5, 21)
    psi = ControlFunction.constant(Fraction(1, 10))
    report = stabilize(preset(name), monomial(k), psi, grid)
    assert report.iterations == 1
    assert report.measured_error == 0
    assert report.T_values == tuple(x ** k for x in grid)
    assert report.fixed_point_defect == 0 and report.residual_DT == 0
    assert report.certified
    assert report.margin == pytest.approx(min(report.bound_values))


def test_verify_bound_detects_wrong_solution():
    psi = ControlFunction.constant(18 * EPS)
    F = preset("cubic")
    report = stabilize(F, cubic_sin(), psi, GRID, tol=1e-12)
    cert = verify_bound(report, F, psi)
    assert cert.passed and cert.margin == report.margin
    wrong = replace(report, T_values=tuple(x ** 2 for x in GRID))
    cert = verify_bound(wrong, F, psi)
    assert not cert.passed and cert.margin < 0
    # restricting to a subset of the grid
    assert verify_bound(wrong, F, psi, grid=[0.0]).passed


def test_stabilize_power_psi():
    # g(x) = eps x gives |Dg| = 12 eps |x| for the cubic family
    eps = 1e-3
    f = from_callable(lambda x: x ** 3 + eps * x)
    psi = ControlFunction.power(1, 13 * eps)
    report = stabilize(preset("cubic"), f, psi, GRID)
    assert report.branch.L == 1 / 4
    assert report.psi_dominates and report.certified
    assert max(abs(t - x ** 3) for x, t in zip(GRID, report.T_values)) <= 1e-7


def test_stabilize_refuses_critical_exponent():
    with pytest.raises(NotContractive):
        stabilize(preset("cubic"), cubic_sin(), ControlFunction.power(3, 1), GRID)


def test_stabilize_errors():
    psi = ControlFunction.constant(1.0)
    with pytest.raises(NonZeroAtOrigin):
        stabilize(preset("cubic"), from_callable(lambda x: x ** 3 + 1), psi, GRID)
    with pytest.raises(NoConvergence) as info:
        stabilize(preset("cubic"), cubic_sin(), psi, GRID, tol=1e-14, max_n=3)
    assert info.value.partial["iterations"] == 3
    bounded = from_callable(lambda x: x ** 3 + EPS * math.sin(x), limit=100.0)
    with pytest.raises(DomainOverflow) as info:
        stabilize(preset("cubic"), bounded, psi, GRID, tol=1e-14)
    assert info.value.partial["iterations"] == 4
    with pytest.raises(DegenerateRatioError):
        stabilize(preset("quadratic"), monomial(2, mode=FLOAT), psi, GRID)


def test_float_overflow_is_domain_overflow():
    f = from_callable(lambda x: x ** 3 + EPS * math.sin(x) + (math.exp(x) - 1) * 1e-300)
    with pytest.raises(DomainOverflow):
        stabilize(preset("cubic"), f, ControlFunction.constant(1.0), GRID, tol=1e-300, max_n=40)


def test_psi_audit_flags_undersized_psi():
    report = stabilize(preset("cubic"), cubic_sin(), ControlFunction.constant(EPS), GRID)
    assert not report.psi_dominates
    assert not report.hypotheses_ok


def test_auto_psi_is_grid_only():
    F = preset("cubic")
    f = cubic_sin()
    psi = ControlFunction.auto(F, f, GRID[::5])
    assert psi.grid_only and 0 < psi.params[0] <= 0.18
    report = stabilize(F, f, psi, GRID[::5])
    assert report.psi_grid_only


def test_geometric_convergence():
    F = preset("cubic")
    f = cubic_sin()
    delta = 18 * EPS
    report = stabilize(F, f, ControlFunction.constant(delta), GRID, tol=1e-12)
    T = report.T_values
    L = report.branch.L
    errors = []
    for n in range(report.iterations):
        Tn = iterate_map(f, report.branch, n)
        errors.append(max(abs(Tn(x) - t) for x, t in zip(GRID, T)))
    for n, err in enumerate(errors):
        assert err <= L ** n * report.bound_factor * delta + 1e-12
    for prev, cur in zip(errors, errors[1:]):
        assert cur <= prev * L * 1.5 + 1e-12


def test_halving_branch_two():
    F = preset("halving_additive")
    f = from_callable(lambda x: x + EPS * math.cos(x) - EPS)
    # eps (cos t - 1) lies in [-2 eps, 0], so |Dg| <= 4 eps
    report = stabilize(F, f, ControlFunction.constant(4 * EPS), GRID)
    assert report.branch.i == 2 and report.branch.L == 0.5
    assert report.bound_factor == pytest.approx(0.5 / (0.5 * 1))
    assert report.certified
    assert max(abs(t - x) for x, t in zip(GRID, report.T_values)) <= 1e-8


def test_diagonal_variant():
    f = build_function(parse_function_spec("poly:0,1 + noise:amp=0.01,seed=7"))
    report = stabilize_diagonal(CAUCHY, f, ControlFunction.constant(3 * EPS), GRID)
    assert report.branch.variant == DIAGONAL
    assert (report.branch.ratio, report.branch.step) == (2, 2)
    assert report.bound_factor == pytest.approx(1 / (0.5 * 2))
    assert report.certified and report.psi_dominates
    assert max(abs(t - x) for x, t in zip(GRID, report.T_values)) <= 1e-8


def test_diagonal_exact_solution():
    grid = linear_grid(-5, 5, 21)
    report = stabilize_diagonal(CAUCHY, monomial(1), ControlFunction.constant(Fraction(1, 100)), grid)
    assert report.measured_error == 0 and report.iterations == 1


def test_diagonal_rejects_c5():
    with pytest.raises(VariantPreconditionFailed):
        stabilize_diagonal(new_family(1, 1, 1, 0, 1, 1, 1, 0), monomial(1, mode=FLOAT),
                           ControlFunction.constant(1.0), GRID)


def test_uniqueness_across_perturbations():
    F = preset("quartic")
    psi = ControlFunction.constant(40 * EPS)
    grid = linear_grid(-3.0, 3.0, 61)
    Ts = []
    for seed in (1, 2):
        f = build_function(parse_function_spec(f"poly:0,0,0,0,1 + noise:amp=0.01,seed={seed}"))
        report = stabilize(F, f, psi, grid)
        assert report.certified
        Ts.append(report.T_values)
    assert max(abs(a - b) for a, b in zip(*Ts)) <= 10 * 1e-10 * 81


def test_bound_factor():
    assert bound_factor(0.5, 1, 2) == 1.0
    assert bound_factor(0.5, 2, 2) == 0.5
