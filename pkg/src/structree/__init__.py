"""Edge-cut structure trees of end-marked graph truncations, and Stallings
splittings of Cayley graphs with more than one end."""

from .bass_serre import (GroupAction, SplittingDescriptor, cut_stabilizer, detect_edge_inversion,
                         extract_splitting, induced_tree_action, setwise_stabilizer,
                         stallings_pipeline, verify_splitting)
from .cuts import (Cut, all_separators, check_corner_minimality, corner_profile,
                   enumerate_separators_containing, is_cut, kappa, minimal_cuts)
from .errors import (BudgetExhausted, IncreaseRadius, InputError, InvariantViolation, NoCutFound,
                     NoSplitting, PresentationError, StructreeError, Unverifiable)
from .families import count_ends, make_generator, truncate
from .graph import EndMarkedGraph, barycentric_subdivision, graph_from_edges
from .groups import (AmalgamPresentation, FiniteGroupTable, HNNPresentation, load_presentation,
                     presentation_from_dict)
from .nesting import (check_corner_inequality, check_not_nested_corner, corners, is_nested, m_index,
                      optimal_cuts, orbit_close)
from .structure import (CutSystem, StructureTree, blocks, build_tree, check_block_lemma, classes,
                        compare_trees, locate_vertex)

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_")]
