"""Small cancellation labellings of finite graph families, homology covers
with wall structures, and bounded exploration of the resulting graphical
presentations."""

__version__ = "0.1.0"

from .graphs import Graph, Path, FamilySpec, cycle_graph, random_regular
from .labelings import (Alphabet, Labeling, ScConstants, constants, decorate,
                        is_reduced, product, word_of_path)
from .lll import (check_lll_hypothesis, detect_bad_pattern, label_intergraph,
                  label_intragraph)
from .verify import check_cprime, longest_repeated_path, piece_bound
from .covers import (fiber_walls, girth_boost, lacunary_check,
                     properness_check, separation_profile, wall_metric,
                     z2_cover)
from .presentation import GraphicalPresentation, cayley_patch, free_reduce
