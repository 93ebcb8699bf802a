"""Structure trees of a few truncated graphs, printed as DOT and as shapes."""

from structree import CutSystem, build_tree, make_generator, minimal_cuts, optimal_cuts, truncate


def tree_for(spec, radius):
    model = truncate(make_generator(spec), radius).model
    return build_tree(CutSystem(optimal_cuts(minimal_cuts(model))))


for spec, radius in [("line", 6), ("cross:4", 6), ("tree:4", 3), ("cayley:z2_z3.json", 5)]:
    t = tree_for(spec, radius)
    degrees = sorted((len(n) for n in t.adjacency().values()), reverse=True)
    print(f"{spec} radius {radius}: {len(t.classes)} classes, {len(t.edges)} edges, top degrees {degrees[:5]}")

print()
print(tree_for("cross:4", 6).to_dot())
