"""
Classifying family instances and checking exact solutions
=========================================================

"""
from fractions import Fraction

from monomial_lab import classify, linear_grid, monomial, pairs, preset, residual_stats
from monomial_lab import from_callable, new_family
import math

# every preset, with its scaling ratio and the degree it forces
for name in ["quadratic", "cubic", "quartic", "halving_additive"]:
    print(name, classify(preset(name)))

# inline coefficients: a, b, c1..c6
F = new_family(2, 1, 1, 0, 3, 0, 0, 0)
print("lambda = 3 with base 2:", classify(F))

# exact mode: x^3 solves the cubic instance on any rational grid
grid = pairs([Fraction(k, 3) for k in range(-6, 7)])
print(residual_stats(preset("cubic"), monomial(3), grid))

# float mode: a small sine perturbation leaves a small defect
f = from_callable(lambda x: x ** 3 + 0.01 * math.sin(x))
stats = residual_stats(preset("cubic"), f, pairs(linear_grid(-5.0, 5.0, 41)))
print("max |Df| =", stats.max_abs, "at", stats.argmax)
