"""Mesh families on the unit square.

Four families: uniform squares, squares split into two non-convex polygons
by a zigzag polyline, clipped Voronoi diagrams of random seeds, and the same
after Lloyd relaxation (100 iterations approaches a centroidal tessellation).

Voronoi cells are clipped to the square by mirroring the seed set across all
four sides: the sides then appear as exact bisectors, every interior seed
gets a bounded region, and neighboring cells share vertex ids by
construction, so the clipped diagram is conforming without any per-cell
polygon stitching.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import Voronoi, cKDTree

from .mesh import MeshError, make_mesh, polygon_area_centroid

#: interior points of the splitting polyline for the concave family, in
#: twentieths of the square side; endpoints are the side midpoints (0, 10)
#: and (20, 10).  The two halves are congruent (180-degree rotation) and
#: star-shaped with respect to a disk of positive radius.
_ZIGZAG = ((4, 7), (8, 13), (12, 7), (16, 13))

_WELD_TOL = 1e-10
_SNAP_TOL = 1e-12

FAMILIES = ("square", "concave", "lloyd0", "lloyd100", "voronoi")


@dataclass(frozen=True)
class GeneratorSpec:
    """Reproducible description of one generated mesh.

    ``target_cells`` counts squares for the square/concave families (the
    concave family produces two cells per square) and seeds for the Voronoi
    families.  ``rng`` pins the generator algorithm by name so runs stay
    reproducible across library versions.
    """

    family: str
    target_cells: int
    seed: int = 0
    lloyd_iterations: int = 0
    rng: str = "pcg64"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.target_cells < 1:
            raise ValueError("target_cells must be positive")
        if self.rng != "pcg64":
            raise ValueError(f"unsupported rng {self.rng!r}")

    @property
    def iterations(self):
        if self.family == "lloyd0":
            return 0
        if self.family == "lloyd100":
            return 100
        return self.lloyd_iterations


def generate(spec):
    """Build the mesh described by ``spec``."""
    if spec.family in ("square", "concave"):
        n = int(round(np.sqrt(spec.target_cells)))
        if n * n != spec.target_cells:
            raise ValueError("square/concave families need a square cell count")
        return square_mesh(n) if spec.family == "square" else concave_mesh(n)
    return voronoi_mesh(spec)


def square_mesh(n_per_side):
    """n-by-n uniform square mesh of the unit square."""
    n = int(n_per_side)
    if n < 1:
        raise ValueError("n_per_side must be positive")
    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    vertices = np.column_stack([ii.ravel(order="F") / n, jj.ravel(order="F") / n])

    def vid(i, j):
        return j * (n + 1) + i

    cells = []
    for j in range(n):
        for i in range(n):
            cells.append([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)])
    return make_mesh(vertices, cells)


def concave_mesh(n_per_side):
    """Each of n*n squares split into two congruent non-convex octagons.

    The splitting polyline runs between the midpoints of the vertical sides
    with two valleys and two peaks, so both halves have a reflex corner but
    remain star-shaped.
    """
    n = int(n_per_side)
    if n < 1:
        raise ValueError("n_per_side must be positive")
    registry = {}
    vertices = []

    def vid(gx, gy):
        # lattice units of 1/(20n): every construction point is exact here
        key = (gx, gy)
        v = registry.get(key)
        if v is None:
            v = len(vertices)
            registry[key] = v
            vertices.append((gx / (20.0 * n), gy / (20.0 * n)))
        return v

    zig = _ZIGZAG
    lower = [(0, 0), (20, 0), (20, 10), zig[3], zig[2], zig[1], zig[0], (0, 10)]
    upper = [(0, 10), zig[0], zig[1], zig[2], zig[3], (20, 10), (20, 20), (0, 20)]
    cells = []
    for j in range(n):
        for i in range(n):
            ox, oy = 20 * i, 20 * j
            for ring in (lower, upper):
                cells.append([vid(ox + lx, oy + ly) for lx, ly in ring])
    return make_mesh(np.array(vertices), cells)


def voronoi_mesh(spec):
    """Voronoi diagram of random seed points, clipped to the unit square.

    Applies ``spec.iterations`` Lloyd iterations to the seeds first.
    Duplicate seed draws are retried with fresh randomness (at most 10
    times).
    """
    pts = _draw_seeds(spec)
    if spec.iterations:
        pts, _ = relax_points(pts, spec.iterations)
    return _tessellate(pts)


def lloyd_relax(seeds, iterations):
    """Mesh from Lloyd relaxation of explicit seed points.

    Each iteration replaces every seed by the area centroid of its clipped
    Voronoi cell; the tessellation of the final seeds is returned.
    """
    pts, _ = relax_points(np.asarray(seeds, dtype=float), iterations)
    return _tessellate(pts)


def relax_points(points, iterations):
    """Lloyd iterations on seed points.

    Returns the relaxed points and the per-iteration movement norms
    ``max_i |seed_i - centroid_i|``.
    """
    pts = np.asarray(points, dtype=float).copy()
    movements = np.empty(iterations)
    for it in range(iterations):
        rings, coords = _clipped_cells(pts)
        new = np.empty_like(pts)
        for i, ring in enumerate(rings):
            _, new[i] = polygon_area_centroid(coords[ring])
        movements[it] = np.max(np.hypot(new[:, 0] - pts[:, 0], new[:, 1] - pts[:, 1]))
        pts = new
    return pts, movements


def _draw_seeds(spec):
    rng = np.random.default_rng(spec.seed)
    for attempt in range(10):
        pts = rng.uniform(0.0, 1.0, size=(spec.target_cells, 2))
        if len(np.unique(pts, axis=0)) == spec.target_cells:
            return pts
    raise MeshError("could not draw distinct seed points")


def _tessellate(pts):
    rings, coords = _clipped_cells(pts)
    return _mesh_from_rings(rings, coords)


def _clipped_cells(pts):
    """Rings (vertex-id lists) and coordinates of square-clipped Voronoi cells."""
    n = len(pts)
    if n == 1:
        # qhull needs a 2-d point cloud; the single-seed diagram is the square
        return [np.array([0, 1, 2, 3])], np.array([[0.0, 0.0], [1.0, 0.0],
                                                   [1.0, 1.0], [0.0, 1.0]])
    mirrored = np.vstack([
        pts,
        pts * (-1.0, 1.0),               # across x = 0
        pts * (-1.0, 1.0) + (2.0, 0.0),  # across x = 1
        pts * (1.0, -1.0),               # across y = 0
        pts * (1.0, -1.0) + (0.0, 2.0),  # across y = 1
    ])
    vor = Voronoi(mirrored)
    coords = vor.vertices.copy()
    coords[np.abs(coords) < _SNAP_TOL] = 0.0
    coords[np.abs(coords - 1.0) < _SNAP_TOL] = 1.0
    rings = []
    for i in range(n):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or len(region) < 3:
            raise MeshError("unbounded Voronoi region; seed configuration degenerate")
        ring = np.asarray(region, dtype=int)
        # counterclockwise angular order around the seed (cells are convex)
        ang = np.arctan2(coords[ring, 1] - pts[i, 1], coords[ring, 0] - pts[i, 0])
        rings.append(ring[np.argsort(ang)])
    return rings, coords


def _mesh_from_rings(rings, coords):
    """Weld near-duplicate vertices, compact ids, and validate."""
    used = np.unique(np.concatenate(rings))
    parent = {int(v): int(v) for v in used}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = cKDTree(coords[used])
    for a, b in sorted(tree.query_pairs(_WELD_TOL)):
        ra, rb = find(int(used[a])), find(int(used[b]))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    reps = sorted({find(int(v)) for v in used})
    new_id = {r: i for i, r in enumerate(reps)}
    vertices = coords[reps]
    cells = []
    for i, ring in enumerate(rings):
        mapped = [new_id[find(int(v))] for v in ring]
        ring_out = [v for j, v in enumerate(mapped) if v != mapped[j - 1]]
        if len(ring_out) < 3:
            raise MeshError(f"Voronoi cell {i} collapsed during welding")
        cells.append(ring_out)
    return make_mesh(vertices, cells)
