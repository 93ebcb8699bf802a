"""Read a splitting off the structure tree for each bundled group."""

import json

from structree import NoSplitting, load_presentation, stallings_pipeline, verify_splitting

for name in ["z2_z2.json", "z2_z3.json", "z4_z2_z4.json", "z.json", "hnn_z4_z2.json", "zxz.json", "d3.json"]:
    pres = load_presentation(name)
    try:
        desc, evidence = stallings_pipeline(pres)
    except NoSplitting as exc:
        print(f"{name}: {exc}")
        continue
    ok = verify_splitting(desc, pres, 4)
    print(f"{name}: {json.dumps(desc.to_dict()['orders'], sort_keys=True)} kind={desc.kind} "
          f"inversion={evidence['splitting_report']['inversion']} verified={ok}")
