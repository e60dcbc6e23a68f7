"""Exact enumeration and cone inequalities for polyhedral realizations of the crystal B(infinity).

Modules:

- :mod:`~crystal_cone.cartan`: Cartan matrices, built-in families and index sequences.
- :mod:`~crystal_cone.zinf`: the crystal on integer sequences and breadth-first enumeration.
- :mod:`~crystal_cone.forms`: linear forms, the maps ``S_k`` and windowed closures.
- :mod:`~crystal_cone.closed_forms`: explicit inequality systems for rank 2, A_n and affine A.
- :mod:`~crystal_cone.abstract`: generic crystals and tensor products for cross-checks.
- :mod:`~crystal_cone.verify`: exhaustive bounded verification reports.
- :mod:`~crystal_cone.cli`: the ``crystal-cone`` command.
"""
from .cartan import CartanMatrix, IndexSequence, builtin_family, parse_family
from .forms import LinearForm, xi_closure, xi_plus_closure
from .zinf import ZSeq, enumerate_image

__version__ = "0.1.0"

__all__ = [
    "CartanMatrix",
    "IndexSequence",
    "LinearForm",
    "ZSeq",
    "builtin_family",
    "enumerate_image",
    "parse_family",
    "xi_closure",
    "xi_plus_closure",
]
