#!/usr/bin/env python3
"""Generate an acute triangulation of the disk D(0, R) and write it as MSH 2.2 ASCII.

Uses the Persson-Strang force-equilibrium iteration (distmesh) with a uniform
size function, then checks that every triangle is strictly acute so that the
circumcentric dual is an admissible finite-volume mesh.

    python3 scripts/make_disk_mesh.py --radius 2 --h 0.098 -o data/disk_r2_h0.098.msh
"""

import argparse
import math
import sys

import numpy as np
from scipy.spatial import Delaunay


def distmesh_disk(radius, h0, iters, seed):
    rng = np.random.default_rng(seed)
    # hexagonal start lattice
    xs = np.arange(-radius, radius + h0, h0)
    ys = np.arange(-radius, radius + h0, h0 * math.sqrt(3) / 2)
    px, py = np.meshgrid(xs, ys)
    px[1::2, :] += h0 / 2
    p = np.column_stack([px.ravel(), py.ravel()])
    p = p[np.hypot(p[:, 0], p[:, 1]) < radius - 0.3 * h0]
    p += rng.uniform(-1e-3, 1e-3, p.shape) * h0

    # fixed boundary nodes on the circle
    nb = int(round(2 * math.pi * radius / h0))
    ang = 2 * math.pi * np.arange(nb) / nb
    pfix = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    nfix = len(pfix)
    p = np.vstack([pfix, p])

    dptol, ttol, fscale, dt = 1e-4, 0.1, 1.2, 0.2
    pold = np.full_like(p, np.inf)
    for _ in range(iters):
        if np.max(np.hypot(*(p - pold).T)) / h0 > ttol:
            pold = p.copy()
            tri = Delaunay(p).simplices
            cent = p[tri].mean(axis=1)
            tri = tri[np.hypot(cent[:, 0], cent[:, 1]) < radius - 1e-3 * h0]
            bars = np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
            bars = np.unique(np.sort(bars, axis=1), axis=0)
        barvec = p[bars[:, 0]] - p[bars[:, 1]]
        length = np.hypot(barvec[:, 0], barvec[:, 1])
        l0 = fscale * math.sqrt(np.sum(length**2) / len(length))
        force = np.maximum(l0 - length, 0)
        fvec = (force / length)[:, None] * barvec
        ftot = np.zeros_like(p)
        np.add.at(ftot, bars[:, 0], fvec)
        np.add.at(ftot, bars[:, 1], -fvec)
        ftot[:nfix] = 0
        p += dt * ftot
        r = np.hypot(p[:, 0], p[:, 1])
        out = r > radius
        p[out] *= (radius / r[out])[:, None]
        if np.max(np.hypot(*(dt * ftot[nfix:]).T)) / h0 < dptol:
            break

    tri = Delaunay(p).simplices
    cent = p[tri].mean(axis=1)
    tri = tri[np.hypot(cent[:, 0], cent[:, 1]) < radius - 1e-3 * h0]
    return p, tri, nfix


def fix_obtuse(p, tri, nfix, radius, h0, max_angle, rounds=200):
    """Push the obtuse vertex of each non-acute triangle off the Thales circle of its opposite edge."""
    for _ in range(rounds):
        angles = vertex_angles(p, tri)
        bad = np.nonzero(angles.max(axis=1) >= max_angle)[0]
        if len(bad) == 0:
            break
        for t in bad:
            k = int(np.argmax(angles[t]))
            v, a, b = tri[t, k], tri[t, (k + 1) % 3], tri[t, (k + 2) % 3]
            if v < nfix:
                continue
            mid = 0.5 * (p[a] + p[b])
            half = 0.5 * np.hypot(*(p[b] - p[a]))
            off = p[v] - mid
            p[v] = mid + off / np.hypot(*off) * 1.1 * half
        r = np.hypot(p[:, 0], p[:, 1])
        out = r > radius
        p[out] *= (radius / r[out])[:, None]
        tri = Delaunay(p).simplices
        cent = p[tri].mean(axis=1)
        tri = tri[np.hypot(cent[:, 0], cent[:, 1]) < radius - 1e-3 * h0]
    return p, tri


def vertex_angles(p, tri):
    a, b, c = p[tri[:, 0]], p[tri[:, 1]], p[tri[:, 2]]
    la = np.hypot(*(b - c).T)
    lb = np.hypot(*(c - a).T)
    lc = np.hypot(*(a - b).T)
    cosines = np.column_stack([
        (lb**2 + lc**2 - la**2) / (2 * lb * lc),
        (la**2 + lc**2 - lb**2) / (2 * la * lc),
        (la**2 + lb**2 - lc**2) / (2 * la * lb),
    ])
    return np.degrees(np.arccos(np.clip(cosines, -1, 1)))


def max_angles(p, tri):
    return vertex_angles(p, tri).max(axis=1)


def orient(p, tri):
    a, b, c = p[tri[:, 0]], p[tri[:, 1]], p[tri[:, 2]]
    det = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    tri = tri.copy()
    flip = det < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri


def boundary_edges(tri):
    edges = np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    _, idx, counts = np.unique(key, axis=0, return_index=True, return_counts=True)
    return edges[idx[counts == 1]]


def write_msh(path, p, tri):
    used = np.unique(tri)
    remap = -np.ones(len(p), dtype=int)
    remap[used] = np.arange(len(used))
    p = p[used]
    tri = remap[tri]
    bnd = boundary_edges(tri)
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write(f"$Nodes\n{len(p)}\n")
        for i, (x, y) in enumerate(p):
            f.write(f"{i + 1} {x:.17g} {y:.17g} 0\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(bnd) + len(tri)}\n")
        eid = 1
        for a, b in bnd:
            f.write(f"{eid} 1 2 1 1 {a + 1} {b + 1}\n")
            eid += 1
        for a, b, c in tri:
            f.write(f"{eid} 2 2 2 1 {a + 1} {b + 1} {c + 1}\n")
            eid += 1
        f.write("$EndElements\n")
    return len(p), len(tri)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=2.0)
    ap.add_argument("--h", type=float, default=0.1)
    ap.add_argument("--iters", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-angle", type=float, default=89.0)
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args()

    p, tri, nfix = distmesh_disk(args.radius, args.h, args.iters, args.seed)
    p, tri = fix_obtuse(p, tri, nfix, args.radius, args.h, args.max_angle - 1.0)
    tri = orient(p, tri)
    worst = max_angles(p, tri).max()
    print(f"triangles={len(tri)} max_angle={worst:.3f} deg", file=sys.stderr)
    if worst >= args.max_angle:
        print("error: triangulation is not acute enough", file=sys.stderr)
        return 1
    n_nodes, n_tri = write_msh(args.output, p, tri)
    print(f"wrote {args.output}: {n_nodes} nodes, {n_tri} triangles", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
