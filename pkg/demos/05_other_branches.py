"""
Contracting the other way, and the diagonal variant
===================================================

"""
import math

from monomial_lab import (ControlFunction, build_function, from_callable, linear_grid,
                          new_family, parse_function_spec, preset, stabilize, stabilize_diagonal)

eps = 0.01
grid = linear_grid(-5.0, 5.0, 101)

# lambda = 1/2 < 1: iterate with step 2 against ratio 2
F = preset("halving_additive")
f = from_callable(lambda x: x + eps * (math.cos(x) - 1))
report = stabilize(F, f, ControlFunction.constant(4 * eps), grid)
print(report.branch)
print("bound factor", report.bound_factor, "certified", report.certified)
print("sup|T - x|", max(abs(t - x) for x, t in zip(grid, report.T_values)))

# y = x specialization of the Cauchy-type family: f(2x) = 2 f(x)
cauchy = new_family(1, 1, 1, 0, 1, 1, 0, 0)
g = build_function(parse_function_spec("poly:0,1 + noise:amp=0.01,seed=3"))
report = stabilize_diagonal(cauchy, g, ControlFunction.constant(3 * eps), grid)
print(report.branch)
print("measured", report.measured_error, "bound", min(report.bound_values))
