#!/usr/bin/env python3
"""Freeze reference cell ids for the cellgrid oracle test.

Uses the s2sphere package (an independent port of the reference S2 library)
to encode random points at random levels and writes one TSV row per sample:

    lat  lng  level  token  center_lat  center_lng

Run from the repository root:
    python3 scripts/make_s2_oracle.py > tests/data/s2_oracle.tsv
"""
import math
import random
import sys

import s2sphere


def row(lat, lng, level):
    leaf = s2sphere.CellId.from_lat_lng(s2sphere.LatLng.from_degrees(lat, lng))
    cell = leaf.parent(level)
    center = s2sphere.LatLng.from_point(cell.to_point())
    return "\t".join(
        [repr(lat), repr(lng), str(level), cell.to_token(),
         repr(center.lat().degrees), repr(center.lng().degrees)])


def main():
    rng = random.Random(20191107)
    out = sys.stdout
    out.write("# lat\tlng\tlevel\ttoken\tcenter_lat\tcenter_lng\n")
    # Uniform on the sphere.
    for _ in range(10000):
        lat = math.degrees(math.asin(rng.uniform(-1.0, 1.0)))
        lng = rng.uniform(-180.0, 180.0)
        out.write(row(lat, lng, rng.randint(0, 12)) + "\n")
    # Round-degree grid points, which sit on face and cell edges.
    for _ in range(1500):
        lat = float(rng.randint(-90, 90))
        lng = float(rng.randint(-180, 179))
        out.write(row(lat, lng, rng.randint(0, 12)) + "\n")
    # Near cube-face diagonals, where the face choice is delicate.
    for _ in range(500):
        lng = rng.choice([-135.0, -45.0, 45.0, 135.0]) + rng.uniform(-1e-9, 1e-9)
        lat = rng.choice([0.0, 35.26438968275466, -35.26438968275466]) + rng.uniform(-1e-9, 1e-9)
        out.write(row(lat, lng, rng.randint(0, 12)) + "\n")


if __name__ == "__main__":
    main()
