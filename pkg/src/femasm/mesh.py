"""Triangle meshes: container type, structured generators, and text I/O.

A mesh is a set of vertices, a triangle connectivity table (0-based
internally) and the precomputed triangle areas.  Meshes are immutable
after construction; the backing arrays are marked read-only so they can
be shared freely between threads.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "AREA_EPS",
    "DegenerateTriangleError",
    "Mesh",
    "MeshFormatError",
    "compute_areas",
    "generate_disk_mesh",
    "generate_unit_square_mesh",
    "read_mesh",
    "write_mesh",
]

# Areas at or below this are treated as degenerate: 1/(4*area) factors in the
# stiffness kernels would overflow long before the area underflows to zero.
AREA_EPS = 1e-300

# Enough significant digits for an exact float64 round trip through text.
_FLOAT_FMT = "%.17g"


class DegenerateTriangleError(ValueError):
    """A triangle has (numerically) zero area."""

    def __init__(self, index: int, area: float):
        self.index = int(index)
        self.area = float(area)
        super().__init__(f"triangle {self.index} is degenerate (area={self.area:g})")


class MeshFormatError(ValueError):
    """A mesh file could not be parsed; carries the offending line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = int(line_no)
        super().__init__(f"{self.path}:{self.line_no}: {message}")


def compute_areas(vertices: np.ndarray, connectivity: np.ndarray) -> np.ndarray:
    """Triangle areas, 0.5*|cross(q2-q1, q3-q1)| per triangle.

    Raises DegenerateTriangleError (with the triangle index) if any area
    is at or below AREA_EPS.
    """
    vertices = np.asarray(vertices, dtype=np.float64)
    connectivity = np.asarray(connectivity, dtype=np.int64)
    p1 = vertices[connectivity[:, 0]]
    p2 = vertices[connectivity[:, 1]]
    p3 = vertices[connectivity[:, 2]]
    cross = (p2[:, 0] - p1[:, 0]) * (p3[:, 1] - p1[:, 1]) - (
        p3[:, 0] - p1[:, 0]
    ) * (p2[:, 1] - p1[:, 1])
    areas = 0.5 * np.abs(cross)
    bad = np.flatnonzero(areas <= AREA_EPS)
    if bad.size:
        raise DegenerateTriangleError(bad[0], areas[bad[0]])
    return areas


class Mesh:
    """Immutable 2D triangulation.

    Attributes
    ----------
    vertices : (nq, 2) float64, read-only
    connectivity : (nme, 3) int64, 0-based vertex indices, read-only
    areas : (nme,) float64, read-only
    """

    __slots__ = ("vertices", "connectivity", "areas")

    def __init__(self, vertices, connectivity, areas=None):
        vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        connectivity = np.ascontiguousarray(connectivity, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise ValueError(f"vertices must have shape (nq, 2), got {vertices.shape}")
        if connectivity.ndim != 2 or connectivity.shape[1] != 3:
            raise ValueError(
                f"connectivity must have shape (nme, 3), got {connectivity.shape}"
            )
        if vertices.shape[0] < 1 or connectivity.shape[0] < 1:
            raise ValueError("mesh needs at least one vertex and one triangle")
        nq = vertices.shape[0]
        if connectivity.min() < 0 or connectivity.max() >= nq:
            raise ValueError("connectivity index out of range [0, nq)")
        if (
            (connectivity[:, 0] == connectivity[:, 1])
            | (connectivity[:, 1] == connectivity[:, 2])
            | (connectivity[:, 0] == connectivity[:, 2])
        ).any():
            raise ValueError("triangle with repeated vertex indices")

        exact = compute_areas(vertices, connectivity)
        if areas is None:
            areas = exact
        else:
            areas = np.ascontiguousarray(areas, dtype=np.float64)
            if areas.shape != (connectivity.shape[0],):
                raise ValueError("areas length must equal the triangle count")
            if not np.all(np.abs(areas - exact) <= 1e-12 * np.abs(exact)):
                raise ValueError("stored areas disagree with vertex coordinates")

        for arr in (vertices, connectivity, areas):
            arr.flags.writeable = False
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "connectivity", connectivity)
        object.__setattr__(self, "areas", areas)

    def __setattr__(self, name, value):
        raise AttributeError("Mesh is immutable")

    @property
    def nq(self) -> int:
        return self.vertices.shape[0]

    @property
    def nme(self) -> int:
        return self.connectivity.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            self.vertices.shape == other.vertices.shape
            and self.connectivity.shape == other.connectivity.shape
            and bool(np.all(self.vertices == other.vertices))
            and bool(np.all(self.connectivity == other.connectivity))
            and bool(np.all(self.areas == other.areas))
        )

    def __repr__(self) -> str:
        return f"Mesh(nq={self.nq}, nme={self.nme})"


def generate_unit_square_mesh(n: int) -> Mesh:
    """Structured triangulation of [0,1]^2 with n cells per side.

    Each grid cell is split along its diagonal, giving nq = (n+1)^2
    vertices and nme = 2 n^2 triangles, all of area 1/(2 n^2).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    side = np.linspace(0.0, 1.0, n + 1)
    xg, yg = np.meshgrid(side, side, indexing="xy")
    vertices = np.column_stack([xg.ravel(), yg.ravel()])

    ix, iy = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    v00 = (iy * (n + 1) + ix).ravel()
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    connectivity = np.empty((2 * n * n, 3), dtype=np.int64)
    connectivity[0::2] = lower
    connectivity[1::2] = upper
    return Mesh(vertices, connectivity)


def generate_disk_mesh(n: int) -> Mesh:
    """Polar triangulation of the unit disk with n concentric rings.

    Ring r (1 <= r <= n) sits at radius r/n and carries 6r equally spaced
    vertices; consecutive rings are stitched by walking both rings in
    angular order.  nq = 1 + 3 n (n+1), nme = 6 n^2, and the total area
    tends to pi as n grows.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    points = [(0.0, 0.0)]
    start = [0] * (n + 1)
    for r in range(1, n + 1):
        start[r] = len(points)
        m = 6 * r
        ang = 2.0 * np.pi * np.arange(m) / m
        rad = r / n
        points.extend(zip(rad * np.cos(ang), rad * np.sin(ang)))
    vertices = np.array(points, dtype=np.float64)

    tris = []
    for j in range(6):
        tris.append((0, start[1] + j, start[1] + (j + 1) % 6))
    for r in range(2, n + 1):
        ni, no = 6 * (r - 1), 6 * r
        si, so = start[r - 1], start[r]
        i = j = 0
        # walk both rings in angular order, always advancing the ring whose
        # next vertex comes first; keeps every triangle counterclockwise
        while i < ni or j < no:
            outer_next = (j + 1) / no
            inner_next = (i + 1) / ni
            if j < no and (i == ni or outer_next <= inner_next):
                tris.append((si + i % ni, so + j, so + (j + 1) % no))
                j += 1
            else:
                tris.append((si + i % ni, so + j % no, si + (i + 1) % ni))
                i += 1
    connectivity = np.array(tris, dtype=np.int64)
    return Mesh(vertices, connectivity)


def write_mesh(mesh: Mesh, path) -> None:
    """Write the line-oriented text format: header ``nq nme``, then nq
    ``x y`` lines, then nme ``i1 i2 i3`` lines with 1-based indices."""
    with open(path, "w", encoding="ascii") as f:
        f.write(f"{mesh.nq} {mesh.nme}\n")
        for x, y in mesh.vertices:
            f.write(f"{_FLOAT_FMT % x} {_FLOAT_FMT % y}\n")
        for a, b, c in mesh.connectivity:
            f.write(f"{a + 1} {b + 1} {c + 1}\n")


def read_mesh(path) -> Mesh:
    """Read the text format written by write_mesh.

    Raises MeshFormatError (with a line number) on any malformed content.
    """
    with open(path, "r", encoding="ascii") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].strip():
        raise MeshFormatError(path, 1, "empty file, expected 'nq nme' header")

    def parse_ints(line_no: int, expected: int, what: str) -> list[int]:
        parts = lines[line_no - 1].split()
        if len(parts) != expected:
            raise MeshFormatError(
                path, line_no, f"expected {expected} fields for {what}, got {len(parts)}"
            )
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise MeshFormatError(path, line_no, f"invalid integer in {what}") from None

    nq, nme = parse_ints(1, 2, "header")
    if nq < 1 or nme < 1:
        raise MeshFormatError(path, 1, f"counts must be positive, got nq={nq} nme={nme}")
    if len(lines) < 1 + nq + nme:
        raise MeshFormatError(
            path,
            len(lines) + 1,
            f"file ends early: header promises {1 + nq + nme} lines",
        )

    vertices = np.empty((nq, 2), dtype=np.float64)
    for k in range(nq):
        line_no = 2 + k
        parts = lines[line_no - 1].split()
        if len(parts) != 2:
            raise MeshFormatError(path, line_no, f"expected 2 coordinates, got {len(parts)}")
        try:
            vertices[k, 0] = float(parts[0])
            vertices[k, 1] = float(parts[1])
        except ValueError:
            raise MeshFormatError(path, line_no, "invalid coordinate") from None

    connectivity = np.empty((nme, 3), dtype=np.int64)
    for k in range(nme):
        line_no = 2 + nq + k
        i1, i2, i3 = parse_ints(line_no, 3, "triangle")
        for idx in (i1, i2, i3):
            if idx < 1 or idx > nq:
                raise MeshFormatError(
                    path, line_no, f"vertex index {idx} out of range 1..{nq}"
                )
        connectivity[k] = (i1 - 1, i2 - 1, i3 - 1)

    for extra in range(1 + nq + nme, len(lines)):
        if lines[extra].strip():
            raise MeshFormatError(path, extra + 1, "unexpected content after last triangle")

    try:
        return Mesh(vertices, connectivity)
    except ValueError as exc:
        raise MeshFormatError(path, 1, f"invalid mesh: {exc}") from exc
