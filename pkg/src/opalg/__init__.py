"""Finite-dimensional operator algebra toolkit: *-algebras, spectra,
functional calculus, GNS representations, spectral measures, commutants
and diagonal models of unbounded operators."""

from . import (
    elemcalc,
    errors,
    gelfand,
    gnsrep,
    linops,
    specanalysis,
    specmeasure,
    staralg,
    unbounded,
    vonneumann,
)

__version__ = "0.1.0"

__all__ = [
    "elemcalc",
    "errors",
    "gelfand",
    "gnsrep",
    "linops",
    "specanalysis",
    "specmeasure",
    "staralg",
    "unbounded",
    "vonneumann",
]
