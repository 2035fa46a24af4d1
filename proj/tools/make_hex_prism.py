#!/usr/bin/env python3
"""Writes data/scenes/hex_prism.json: a regular hexagonal prism with unit
side and height 2, as points, edges, faces and their relations."""
import json
import math
import sys

N = 6
H = 2.0


def coord(i, z):
    a = 2 * math.pi * i / N
    return f"{math.cos(a):.6f},{math.sin(a):.6f},{z:.1f}"


prims, rels = [], []
for ring, z in (("b", 0.0), ("t", H)):
    for i in range(N):
        prims.append({"id": f"{ring}{i}", "kind": "point", "label": "base vertex",
                      "attributes": {"xyz": coord(i, z)}})
for ring in ("b", "t"):
    for i in range(N):
        j = (i + 1) % N
        prims.append({"id": f"e{ring}{i}", "kind": "line", "label": "base edge",
                      "attributes": {"from": f"{ring}{i}", "to": f"{ring}{j}"}})
for i in range(N):
    prims.append({"id": f"el{i}", "kind": "line", "label": "lateral edge",
                  "attributes": {"from": f"b{i}", "to": f"t{i}"}})
prims.append({"id": "base_bottom", "kind": "region", "label": "hexagonal base"})
prims.append({"id": "base_top", "kind": "region", "label": "hexagonal base"})
for i in range(N):
    prims.append({"id": f"f{i}", "kind": "region", "label": "lateral face (rectangle)"})

for ring in ("b", "t"):
    for i in range(N):
        j = (i + 1) % N
        rels.append([f"{ring}{i}", f"e{ring}{i}", "incident"])
        rels.append([f"{ring}{j}", f"e{ring}{i}", "incident"])
        rels.append([f"e{ring}{i}", f"e{ring}{j}", "adjacent"])
        rels.append([f"e{ring}{i}", f"e{ring}{j}", "equal_length"])
        rels.append([f"e{ring}{i}", f"base_{'bottom' if ring == 'b' else 'top'}", "contained_in"])
for i in range(N):
    j = (i + 1) % N
    rels.append([f"b{i}", f"el{i}", "incident"])
    rels.append([f"t{i}", f"el{i}", "incident"])
    rels.append([f"eb{i}", f"et{i}", "parallel"])
    rels.append([f"el{i}", f"el{j}", "parallel"])
    rels.append([f"el{i}", f"eb{i}", "perpendicular"])
    rels.append([f"f{i}", f"f{j}", "adjacent"])
    rels.append([f"f{i}", "base_bottom", "adjacent"])
    rels.append([f"f{i}", "base_top", "adjacent"])
rels.append(["base_bottom", "base_top", "parallel"])
rels.append(["base_bottom", "base_top", "opposite"])

scene = {
    "scene": "hex_prism",
    "domain": "math",
    "problem": "A regular hexagonal prism.",
    "root": ["RegularHexagonalPrism"],
    "primitives": prims,
    "relations": rels,
}
out = sys.argv[1] if len(sys.argv) > 1 else "data/scenes/hex_prism.json"
with open(out, "w") as f:
    json.dump(scene, f, indent=1, ensure_ascii=False)
    f.write("\n")
