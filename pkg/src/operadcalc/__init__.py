"""Exact symbolic calculus for derivations of free operad algebras.

Modules: ``trees`` (labelled planar trees), ``linear`` (formal sums and
exact subspaces), ``freeder`` (derivations, pointed derivations, necklaces),
``divergence`` (contraction, divergence, cocycle), ``classical`` (Lie, Ass and
Com realizations), ``analysis`` (generated subalgebras, torsion, suites) and
``cli``.
"""

__version__ = "0.1.0"
