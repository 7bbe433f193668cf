"""
Generalized polynomials and their monomial components
=====================================================

"""
from fractions import Fraction

from monomial_lab import GPModel, component_split, fit_gp, is_monomial, polynomial

p = GPModel(0, (1, 0, Fraction(1, 2), 0))
print(p, p.degree, p(2))

# f(rx) = sum r^k a_k(x): solve the 4x4 Vandermonde system at r = 1..4
f = polynomial([0, 3, 0, -1, 2])
print(component_split(f, Fraction(1, 2)))

# least squares recovery from samples
samples = [(Fraction(k, 2), Fraction(k, 2) ** 3) for k in range(-6, 7)]
q = fit_gp(samples)
print(q, "monomial of degree", is_monomial(q))
