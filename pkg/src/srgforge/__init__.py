"""Construction and exact verification of strongly regular Cayley graphs
from systems of 2m^2 building blocks over finite fields."""

from .blocks import BlockSystem, PartitionChoice, build_system, construct_base, product, verify
from .cyclo import CycloInt
from .gf import FieldSpec, build_field, cyclotomic_class
from .group import Character, GroupSpec, MultiSet, Subset, char_scan, char_value
from .pds import PdsCandidate, SrgParams, check_pds, fuse

__version__ = "0.1.0"
