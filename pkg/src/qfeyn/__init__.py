"""
Exact and numeric q-calculus for Feynman-Jackson integrals.

The package computes with q-analogues in two ways: exactly, with polynomials,
rational functions and truncated power series in ``q`` over the rationals
(:mod:`qfeyn.qarith`), and numerically at a fixed ``0 < q < 1``
(:mod:`qfeyn.qfunc`, :mod:`qfeyn.jackson`). On top of these,
:mod:`qfeyn.combinat` enumerates weighted pairings and maps, and
:mod:`qfeyn.perturb` expands the q-deformed Gaussian integral with
interaction couplings as a formal series, sums it over planar q-graphs and
checks it against direct Jackson integration and the classical ``q → 1`` limit.

The ``qfeyn`` command (:mod:`qfeyn.cli`) runs the verification suites and
prints tables as JSON, CSV or text.
"""

__version__ = '0.1.0'
