"""Eisenstein measures, operator calculus on q-expansions and orientation checks."""
from .chars import DirichletCharacter, enumerate_characters, parse_character
from .cyclo import CycRing, CycScalar
from .eisenstein import eisenstein_chi, eisenstein_level_one
from .qseries import QExpansion

__version__ = "0.1.0"

__all__ = [
    "CycRing",
    "CycScalar",
    "DirichletCharacter",
    "QExpansion",
    "eisenstein_chi",
    "eisenstein_level_one",
    "enumerate_characters",
    "parse_character",
]
