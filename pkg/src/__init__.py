"""btstrata: exact verification of Bruhat–Tits strata of unitary Rapoport–Zink spaces."""

__version__ = "1.0.0"
__author__ = "AJ Barea"
__email__ = "ajbareaa@gmail.com"
