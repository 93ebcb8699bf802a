"""Experimental: blocks of a nested cut system and how they fit together.

Blocks are maximal vertex sets that no cut of the system splits.  On the
4-regular tree each block is a star (a vertex and its neighbours).  The
stars of a vertex and of any two of its neighbours meet pairwise, so the
block intersection graph has triangles and is not a tree.
"""

from structree import CutSystem, blocks, check_block_lemma, make_generator, minimal_cuts, optimal_cuts, truncate
from structree.structure import block_intersection_graph, block_sizes

for spec, radius in [("line", 6), ("tree:4", 2), ("cross:4", 6)]:
    sys_ = CutSystem(optimal_cuts(minimal_cuts(truncate(make_generator(spec), radius).model)))
    bl = blocks(sys_)
    lemma = check_block_lemma(sys_, bl)
    inter = block_intersection_graph(sys_, bl)
    print(f"{spec}: block sizes {block_sizes(sys_, bl)}, lemma passed {lemma['passed']}, "
          f"intersection graph is a tree: {inter['is_tree']} ({inter['triangles']} triangles)")
