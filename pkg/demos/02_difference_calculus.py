"""
Difference operators and the elimination chain
==============================================

"""
import math
from fractions import Fraction

from monomial_lab import (delta_chain, delta_iter, from_callable, gp_degree_probe, monomial,
                          polynomial, preset, verify_elimination_chain)

# k-th difference of x^k is k! h^k, one more kills it
h = Fraction(1, 2)
for k in range(1, 5):
    print(k, delta_iter(monomial(k), h, k, 3), math.factorial(k) * h ** k,
          delta_iter(monomial(k), h, k + 1, 3))

# mixed steps commute
f = polynomial([1, -2, 0, 5])
print(delta_chain(f, [1, 2, 3], Fraction(1, 7)), delta_chain(f, [3, 1, 2], Fraction(1, 7)))

# degree probe: an integer for polynomials, None otherwise
print(gp_degree_probe(polynomial([4, 0, 1, 1])), gp_degree_probe(from_callable(math.sin)))

# stage by stage elimination for the quartic instance, all in exact arithmetic
report = verify_elimination_chain(preset("quartic"), monomial(4), (1, 2, 3, 4, 5),
                                  [(0, 0), (1, 2), (Fraction(3, 2), -1)])
for stage in report.stages:
    print(stage.name, stage.passed, stage.max_residual)
for variant in report.variants:
    print(variant.name, variant.max_residual)
print(report.notes)
