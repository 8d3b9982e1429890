"""Fleet composition: deterministic electric-vehicle quota assignment."""

from __future__ import annotations

import random
import xml.etree.ElementTree as ET

from ..errors import EmptyRoutesError
from ..scenario.demand import round_half_up
from ..toolserver.workspace import Artifact, Workspace, fingerprint

COMBUSTION_TYPE = "combustion"
ELECTRIC_TYPE = "electric"

# Zero-tailpipe emission class plus the battery device so electricity
# consumption shows up in trip metrics.
_VTYPE_XML = (
    f'    <vType id="{COMBUSTION_TYPE}" emissionClass="HBEFA4/PC_petrol_Euro-4"/>\n'
    f'    <vType id="{ELECTRIC_TYPE}" emissionClass="Energy/unknown">\n'
    '        <param key="has.battery.device" value="true"/>\n'
    '        <param key="maximumBatteryCapacity" value="40000"/>\n'
    "    </vType>\n"
)


def set_fleet_composition(
    workspace: Workspace, routes: Artifact, ev_ratio: float, seed: int
) -> tuple[Artifact, int]:
    """Assign exactly round-half-up(N * ratio) vehicles the electric type.

    Quota fill over a seeded shuffle of vehicle ids keeps the split exact and
    reproducible. Returns (new routes artifact, electric count).
    """
    if not 0 <= ev_ratio <= 1:
        raise ValueError(f"ev_ratio must lie in [0, 1], got {ev_ratio}")
    tree = ET.parse(routes.path)
    root = tree.getroot()
    vehicles = list(root.iter("vehicle"))
    if not vehicles:
        raise EmptyRoutesError("route file carries no vehicles")

    quota = round_half_up(len(vehicles) * ev_ratio)
    order = sorted(v.get("id") for v in vehicles)
    random.Random(seed).shuffle(order)
    electric_ids = set(order[:quota])
    for vehicle in vehicles:
        vehicle.set(
            "type", ELECTRIC_TYPE if vehicle.get("id") in electric_ids else COMBUSTION_TYPE
        )

    # vTypes must precede the vehicles that reference them
    for existing in [t for t in root.findall("vType") if t.get("id") in (COMBUSTION_TYPE, ELECTRIC_TYPE)]:
        root.remove(existing)
    for element in reversed(list(ET.fromstring(f"<routes>\n{_VTYPE_XML}</routes>"))):
        root.insert(0, element)

    fp = fingerprint(
        {
            "op": "set_fleet_composition",
            "routes": routes.content_hash,
            "ratio": ev_ratio,
            "seed": seed,
        }
    )
    out = workspace.allocate("routes")
    tree.write(out, encoding="unicode", xml_declaration=False)
    return workspace.register("routes", out, fp), quota
