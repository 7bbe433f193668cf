"""
Recovering x^3 from a perturbed cubic
=====================================

"""
import math

from monomial_lab import ControlFunction, from_callable, linear_grid, preset, stabilize

eps = 0.01
F = preset("cubic")
f = from_callable(lambda x: x ** 3 + eps * math.sin(x))
grid = linear_grid(-5.0, 5.0, 101)

# |D(eps sin)| <= (1 + 1 + 12 + 0 + 2 + 2) eps = 18 eps
psi = ControlFunction.constant(18 * eps)
report = stabilize(F, f, psi, grid, tol=1e-12)

print("branch", report.branch.i, "L =", report.branch.L, "iterations", report.iterations)
print("bound factor", report.bound_factor, "-> bound", 18 * eps * report.bound_factor)
print("measured sup|f - T|", report.measured_error)
print("sup|T - x^3|", max(abs(t - x ** 3) for x, t in zip(grid, report.T_values)))
print("certified", report.certified, "margin", report.margin)

# step sizes shrink geometrically with ratio about 1/8
print([f"{s:.2e}" for s in report.step_history])

# the same perturbation with psi = |x|^3 + |y|^3 is exactly critical
try:
    stabilize(F, f, ControlFunction.power(3, 1.0), grid)
except Exception as exc:
    print(type(exc).__name__, exc)
