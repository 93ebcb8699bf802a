"""Minimal cuts of a 4-cycle with four thick rays, and which of them nest.

The hub cycle v1..v4 can be cut by removing two of its edges.  Cutting two
adjacent hub edges peels off one ray; cutting two opposite edges splits the
rays two against two, and those two splittings cross each other.
"""

from structree import corner_profile, is_nested, kappa, m_index, make_generator, minimal_cuts, optimal_cuts, truncate

model = truncate(make_generator("cross:4"), 6).model
print(f"model: {len(model.vertices)} vertices, {len(model.end_markers)} end markers")

k = kappa(model)
cuts = minimal_cuts(model)
idx = m_index(cuts)
print(f"kappa = {k}, oriented minimal cuts = {len(cuts)}")
for c in cuts:
    if c.contains_least_marker():
        print(f"  boundary {c.boundary_tokens()}  m = {idx.values[c]}")

pair = [c for c in cuts if idx.values[c] > 0]
C, D = pair[0], next(d for d in pair if not is_nested(pair[0], d))
p = corner_profile(C, D)
print(f"crossing pair {C.boundary_tokens()} x {D.boundary_tokens()}: "
      f"a,b,c,d,e,f = {p.a},{p.b},{p.c},{p.d},{p.e},{p.f}; identity holds: {p.identity_holds(k)}")

opt = optimal_cuts(cuts, idx)
print(f"m* = {idx.m_star}; {len(opt)} optimally nested cuts (the four single-ray cuts and complements)")
