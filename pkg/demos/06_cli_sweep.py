"""
Epsilon sweep through the command line
======================================

"""
from monomial_lab.cli import main

# psi is given per unit eps; each row scales it by its own eps
main(["sweep", "--family", "cubic", "--fn", "poly:0,0,0,1", "--psi", "const:18",
      "--eps", "0.1,0.01,0.001", "--grid", "-5,5,51"])

main(["classify", "--family", "2,1,1,1,24,-6,4,4"])
