"""Subgroup lattices of finite groups: pattern search and structural classification."""

from .catalog_io import build_group, builtin_corpus, lattice_cache, parse_group_file, write_group_file
from .errors import *  # noqa: F401,F403
from .group_core import (
    GroupTable,
    SubgroupSet,
    cyclic,
    direct_product,
    from_generators,
    semidirect_product,
    subgroups_of,
    table_group,
)
from .lattice_core import AbstractLattice, SubgroupLattice, build_lattice, enumerate_congruences, named_pattern
from .pattern_detect import ABSENT, TIMEOUT, detect_l9_direct, find_sublattice_embedding, freeness_profile, is_l9_free
from .structure_classify import action_avoidance, batten_factorization, batten_kind, class_l_membership, fl4_model

__version__ = "0.1.0"
