"""Exact-arithmetic small quantum cohomology for projectivised bundles over P^n.

The pipeline reconstructs the quantum multiplication matrices of
X = P(E) -> P^n from a small set of seed two-point invariants, solves the
quantum differential system for the J-series, and pushes the identity
component through the hypergeometric modification to quantum periods and
their Picard-Fuchs operator.
"""

from qfano.ring import BundleSpec, make_bundle, basis_index

__all__ = ["BundleSpec", "make_bundle", "basis_index"]
