#!/usr/bin/env python3
"""Writes the synthetic mountain-town fixture used by tests and the README.

Two villages (A, B) and a hamlet (C) share a valley ambulatory reachable by
a fairly direct road. The relocation scenario moves the ambulatory to a
hilltop that can only be reached through a switchback road, next to a tiny
hamlet (D). Output is deterministic.

    python3 tools/gen_mountain_town.py data/mountain_town
"""

import csv
import json
import math
import sys
from pathlib import Path

nodes = []  # (id, x, y, elevation)
edges = []  # (u, v, surface, width, safety, modes)
pos = {}


def node(x, y, z):
    nid = len(nodes)
    nodes.append((nid, x, y, z))
    pos[nid] = (x, y, z)
    return nid


def edge(u, v, surface=0.8, width=2.0, safety=0.8, modes="walk|car|public"):
    edges.append((u, v, surface, width, safety, modes))


def grid(x0, y0, nx, ny, step, z0, tilt=0.0):
    ids = {}
    for j in range(ny):
        for i in range(nx):
            # gentle tilt so slopes inside a village are not all zero
            ids[i, j] = node(x0 + i * step, y0 + j * step, z0 + tilt * (i + j) * step)
    for j in range(ny):
        for i in range(nx):
            if i + 1 < nx:
                edge(ids[i, j], ids[i + 1, j], surface=0.9, width=2.5, safety=0.9)
            if j + 1 < ny:
                edge(ids[i, j], ids[i, j + 1], surface=0.9, width=2.5, safety=0.9)
    return ids


village_a = grid(0, 0, 8, 8, 60, 800, tilt=0.01)
village_b = grid(900, 300, 6, 6, 60, 850, tilt=0.005)
hamlet_c = grid(-700, 600, 3, 3, 60, 880)

# Valley road: A's south-east corner and B's south-west corner meet at a
# junction, then one straight road runs down to the ambulatory.
junction = node(600, -200, 790)
ambulatory = node(600, -1300, 780)
edge(village_a[7, 0], junction, surface=0.7, width=1.5, safety=0.6)
edge(village_b[0, 0], junction, surface=0.7, width=1.5, safety=0.6)
prev = junction
for k in range(1, 5):
    y = -200 - k * 220
    mid = node(600, y, 790 - 10 * k / 5)
    edge(prev, mid, surface=0.7, width=1.5, safety=0.6)
    prev = mid
edge(prev, ambulatory, surface=0.7, width=1.5, safety=0.6)

# Hamlet C hangs off A's north-west corner.
edge(hamlet_c[2, 0], village_a[0, 7], surface=0.6, width=1.2, safety=0.5)

# Switchback up to the hilltop from the middle of A's north edge.
switchback = [(510, 600), (-90, 780), (510, 960), (-90, 1140), (510, 1320)]
hill_z = 900.0
start = village_a[3, 7]
sz = pos[start][2]
prev = start
for k, (x, y) in enumerate(switchback, 1):
    n = node(x, y, sz + (hill_z - sz) * k / (len(switchback) + 1))
    edge(prev, n, surface=0.5, width=1.2, safety=0.5)
    prev = n
hilltop = node(300, 1400, hill_z)
edge(prev, hilltop, surface=0.5, width=1.2, safety=0.5)

# Hamlet D on the hilltop: a single inhabited house.
hamlet_d = [node(300 + dx, 1460 + dy, hill_z) for dx, dy in ((0, 0), (60, 0), (0, 60), (60, 60))]
edge(hilltop, hamlet_d[0])
edge(hamlet_d[0], hamlet_d[1])
edge(hamlet_d[0], hamlet_d[2])
edge(hamlet_d[1], hamlet_d[3])
edge(hamlet_d[2], hamlet_d[3])

dwelling_nodes = (
    list(village_a.values()) + list(village_b.values()) + list(hamlet_c.values()) + hamlet_d[:1]
)

# Non-essential services: kinds 1 and 2 in A, kinds 3 and 4 in B.
facilities = [
    (0, 0, ambulatory, 1),
    (1, 1, village_a[3, 3], 0),
    (2, 2, village_a[4, 4], 0),
    (3, 3, village_b[2, 2], 0),
    (4, 4, village_b[3, 3], 0),
]

marginals = {
    "population": 746,
    "urbanized": 0.964,
    "adults_with_education": 0.582,
    "adults_divorced": 0.088,
    "employment_males": 0.551,
    "employment_females": 0.426,
    "unemployed_males": 0.068,
    "unemployed_females": 0.104,
    "highly_skilled_jobs": 0.353,
    "unskilled_jobs": 0.135,
    "artisans_farmers": 0.218,
    "daily_mobility": 0.622,
    "private_transport": 0.723,
    "public_transport": 0.164,
    "pedestrian_transport": 0.101,
    "elderly_adults_ratio": 0.39,
    "elderly_over_75": 0.129,
    "elderly_single": 0.33,
    "elderly_couples_no_children": 0.157,
    "elderly_couples_with_children": 0.051,
    "elderly_single_parent": 0.091,
}

config = {
    "network": {
        "nodes": "nodes.csv",
        "edges": "edges.csv",
        "dwellings": "dwellings.csv",
        "facilities": "facilities.csv",
    },
    "marginals": "marginals.json",
    "scenarios": [
        {"name": "baseline", "moves": {}},
        {"name": "relocation", "moves": {"0": hilltop}},
    ],
    "replicates": 40,
    "base_seed": 20240611,
    "grid": {"cell_m": 100},
}


def fmt(v):
    if isinstance(v, float):
        r = round(v, 6)
        return str(int(r)) if r == int(r) else repr(r)
    return str(v)


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "nodes.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "x", "y", "elevation"])
        for nid, x, y, z in nodes:
            w.writerow([nid, fmt(float(x)), fmt(float(y)), fmt(float(z))])
    with open(out / "edges.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["u", "v", "length", "slope", "surface", "width", "safety", "modes"])
        for u, v, surface, width, safety, modes in edges:
            (x1, y1, z1), (x2, y2, z2) = pos[u], pos[v]
            length = math.hypot(x2 - x1, y2 - y1)
            w.writerow([u, v, fmt(length), fmt((z2 - z1) / length), fmt(surface), fmt(width), fmt(safety), modes])
    with open(out / "dwellings.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "node", "inhabited", "has_elder_75"])
        for i, nid in enumerate(dwelling_nodes):
            w.writerow([i, nid, 1, 0])
    with open(out / "facilities.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "kind", "node", "essential"])
        for row in facilities:
            w.writerow(row)
    (out / "marginals.json").write_text(json.dumps(marginals, indent=2) + "\n")
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/mountain_town")
