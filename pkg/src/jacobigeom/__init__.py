"""Exact computations with Jacobi structures on coordinate charts.

Coefficients are rational functions in the chart coordinates; every identity
checked by the library is decided exactly. Submodules:

``expr``      rational-function scalars on a chart
``cartan``    multivectors, forms, Schouten bracket, LForms and derivations
``linalg``    exact Gaussian elimination
``jacobi``    Jacobi pairs, their sharp map and bracket
``homog``     homogeneous Poisson structures and the dictionary with Jacobi pairs
``omni``      the omni-Lie algebroid, Dirac structures and transversals
``split``     normal-form models near transversals, Euler-like fields
``moser``     deformations by closed 2-forms and their Moser flows
``io``, ``cli``  JSON files and the command-line driver
"""
from .cartan import (
    Derivation,
    DiffForm,
    LForm,
    Multivector,
    d,
    dL,
    iota,
    lieD,
    schouten,
    wedge,
)
from .expr import Chart, ScalarExpr
from .homog import HomogeneousPoisson, dehomogenize, homogeneity_defect, homogenize
from .jacobi import JacobiPair, JetSection, jacobi_defect, sharp

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "ScalarExpr",
    "Multivector",
    "DiffForm",
    "LForm",
    "Derivation",
    "wedge",
    "schouten",
    "d",
    "dL",
    "iota",
    "lieD",
    "JacobiPair",
    "JetSection",
    "jacobi_defect",
    "sharp",
    "HomogeneousPoisson",
    "homogenize",
    "dehomogenize",
    "homogeneity_defect",
]
