#!/usr/bin/env python3
"""Writes the example measurement patterns in patterns/.

The CNOT pattern keeps two site paths open in a 2x1x2 green-centre lattice
and measures every other site in Z.  The Z-measured sites are split per
sublattice into strands whose consecutive sites share a cell.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "patterns"


def is_site(s):
    return sum(c % 2 for c in s) in (1, 2)


def sublattice(s):
    return "primal" if sum(c % 2 for c in s) == 2 else "dual"


def cells(s):
    """Cells of the site's own sublattice that have it as a face."""
    c = list(s) if sublattice(s) == "primal" else [v - 1 for v in s]
    base = [0, 0, 0]
    normal = 0
    for axis in range(3):
        if c[axis] % 2 == 1:
            base[axis] = (c[axis] - 1) // 2
        else:
            normal = axis
    lo, hi = list(base), list(base)
    lo[normal] = c[normal] // 2 - 1
    hi[normal] = c[normal] // 2
    return {tuple(lo), tuple(hi)}


def sites(cells_xyz):
    nx, ny, nz = cells_xyz
    return [
        (x, y, z)
        for z in range(2 * nz + 1)
        for y in range(2 * ny + 1)
        for x in range(2 * nx + 1)
        if is_site((x, y, z))
    ]


def strands(removed):
    """Greedy paths of same-sublattice sites, consecutive ones sharing a cell."""
    left = sorted(removed, key=lambda s: (s[2], s[1], s[0]))
    out = []
    while left:
        path = [left.pop(0)]
        while True:
            nxt = next(
                (s for s in left if sublattice(s) == sublattice(path[-1]) and cells(s) & cells(path[-1])),
                None,
            )
            if nxt is None:
                break
            left.remove(nxt)
            path.append(nxt)
        out.append({"sublattice": sublattice(path[0]), "path": [list(s) for s in path]})
    return out


def write(name, pattern):
    (OUT / name).write_text(json.dumps(pattern, indent=2) + "\n")


def tube(logical_ops):
    return {
        "lattice": {"cells": [1, 1, 2], "convention": "red-centre"},
        "defects": [{"sublattice": "primal", "path": [[1, 1, 0], [1, 1, 2], [1, 1, 4]]}],
        "pairs": [],
        "logical_ops": logical_ops,
        "outcomes": "all-plus",
    }


def main():
    OUT.mkdir(exist_ok=True)
    write("identity.json", tube([]))
    ring = [[1, 0, 0], [0, 1, 0], [2, 1, 0], [1, 2, 0]]
    write("z_l.json", tube([{"kind": "ring", "sites": ring}]))
    write("x_l.json", tube([{"kind": "chain", "sites": [[1, 0, 1]]}]))

    line_a = [(1, 0, z) for z in range(5)]
    line_g = [(3, 0, 0), (3, 0, 1), (2, 0, 1), (2, 1, 1), (2, 1, 2), (2, 1, 3), (2, 1, 4)]
    kept = set(line_a) | set(line_g)
    removed = [s for s in sites((2, 1, 2)) if s not in kept]
    write(
        "cnot.json",
        {
            "lattice": {"cells": [2, 1, 2], "convention": "green-centre"},
            "defects": strands(removed),
            "pairs": [],
            "logical_ops": [],
            "outcomes": "all-plus",
        },
    )


if __name__ == "__main__":
    main()
