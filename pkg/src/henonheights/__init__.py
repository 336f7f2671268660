"""Heights and Green functions for one-parameter families of Hénon maps."""

__version__ = "0.1.0"

from .exactring import Poly, NumberField, GF
from .henon import HenonFamily, InitialPoint, orbit_polys
from .ffheight import stabilize, ff_height
from .localgreen import Place, green, G_P, classify, filtration_consts
from .globalheight import canonical_height, h_P, green_compare

__all__ = ["Poly", "NumberField", "GF", "HenonFamily", "InitialPoint", "orbit_polys",
           "stabilize", "ff_height", "Place", "green", "G_P", "classify", "filtration_consts",
           "canonical_height", "h_P", "green_compare", "__version__"]
