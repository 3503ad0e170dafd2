"""Deterministic structured triangulations of truncated positive phases.

Every generator is a pure function of its arguments and produces bit-identical
meshes on identical inputs.  Boundary edges carry a FREE or DIRICHLET tag plus
the exact mean curvature of the underlying free-boundary curve at the two edge
endpoints (zero on DIRICHLET edges).

Generators:

* :func:`annulus_mesh` - truncated disk-complement phase 1 <= r <= R,
  inner circle FREE (H = 1), outer circle DIRICHLET.
* :func:`disk_mesh` - the unit disk (the conformal comparison domain),
  all boundary FREE with H = 1.
* :func:`hairpin_mesh` / :func:`hairpin_band_mesh` - strip-coordinate
  truncations of the hairpin phase, catenary edges FREE (H = sech^2 s),
  cuts DIRICHLET.
* :func:`rect_mesh` - truncated plane phase, the x1 = 0 edge FREE (H = 0).
* :func:`shell_mesh` - all-DIRICHLET annulus (collar subdomains).

The truncation geometry deviates from metric balls: annuli are cut by circles
(identical) and the hairpin by strip-coordinate cuts Re w = +-S.  Both
families exhaust the positive phase monotonically, which is all the local
index limit uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import solutions
from .errors import DomainError, MeshFormatError
from .solutions import STRIP_HALF_WIDTH, S_MAX, SolutionKind

TAG_FREE = "FREE"
TAG_DIRICHLET = "DIRICHLET"
_TAGS = (TAG_FREE, TAG_DIRICHLET)


@dataclass
class TriMesh:
    """Planar triangulation with tagged boundary edges.

    ``vertices`` is (V, 2), ``triangles`` (T, 3) counterclockwise,
    ``edges`` (E, 2) with parallel arrays ``edge_tags`` and ``edge_h``
    (mean curvature at the two edge endpoints).  ``kind``/``params`` record
    the generator so refinement can re-evaluate exact boundary geometry;
    ``vertex_params`` holds strip coordinates for hairpin meshes.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_tags: np.ndarray
    edge_h: np.ndarray
    kind: str = "generic"
    params: dict = field(default_factory=dict)
    vertex_params: np.ndarray | None = None

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def min_angle_deg(self) -> float:
        p = self.vertices[self.triangles]
        angles = []
        for k in range(3):
            a = p[:, (k + 1) % 3] - p[:, k]
            b = p[:, (k + 2) % 3] - p[:, k]
            cosang = (a * b).sum(axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            angles.append(np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0))))
        return float(np.min(angles))

    def free_edge_mask(self) -> np.ndarray:
        return self.edge_tags == TAG_FREE

    def dirichlet_vertices(self) -> np.ndarray:
        sel = self.edges[self.edge_tags == TAG_DIRICHLET]
        return np.unique(sel) if len(sel) else np.zeros(0, dtype=self.edges.dtype)

    def max_edge_length(self) -> float:
        p = self.vertices[self.triangles]
        lengths = [np.linalg.norm(p[:, (k + 1) % 3] - p[:, k], axis=1) for k in range(3)]
        return float(np.max(lengths))

    def validate(self) -> None:
        """Check orientation, conformity and tag consistency; raise ValueError."""
        if self.signed_areas().min() <= 0:
            raise ValueError("mesh contains a non-counterclockwise or degenerate triangle")
        boundary = _boundary_edges_of(self.triangles)
        declared = {tuple(sorted(e)) for e in self.edges.tolist()}
        if declared != set(boundary):
            raise ValueError("declared boundary edges do not match the triangulation boundary")
        for tag in self.edge_tags:
            if tag not in _TAGS:
                raise ValueError(f"unknown edge tag {tag!r}")
        if np.any(self.edge_h[self.edge_tags == TAG_DIRICHLET] != 0.0):
            raise ValueError("DIRICHLET edges must carry zero curvature values")


def _boundary_edges_of(triangles: np.ndarray) -> list[tuple[int, int]]:
    counts: dict[tuple[int, int], int] = {}
    for tri in triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (int(min(a, b)), int(max(a, b)))
            counts[key] = counts.get(key, 0) + 1
    return [e for e, c in counts.items() if c == 1]


def _finalize(vertices, triangles, edges, tags, h, kind, params, vertex_params=None) -> TriMesh:
    mesh = TriMesh(
        vertices=np.asarray(vertices, dtype=float),
        triangles=np.asarray(triangles, dtype=np.int32),
        edges=np.asarray(edges, dtype=np.int32).reshape(-1, 2),
        edge_tags=np.asarray(tags, dtype="U9"),
        edge_h=np.asarray(h, dtype=float).reshape(-1, 2),
        kind=kind,
        params=params,
        vertex_params=vertex_params,
    )
    return mesh


def annulus_mesh(R: float, n_r: int, n_theta: int) -> TriMesh:
    """Structured mesh of the annulus 1 <= r <= R.

    (n_r + 1) * n_theta vertices, 2 * n_r * n_theta triangles.  Inner circle
    FREE with H = 1, outer circle DIRICHLET.  Radial spacing is uniform (the
    geometric-grading ratio that keeps the first layer at (R-1)/n_r is 1).
    """
    if not R > 1:
        raise ValueError(f"need R > 1, got {R}")
    if n_r < 2 or n_theta < 8:
        raise ValueError(f"need n_r >= 2 and n_theta >= 8, got ({n_r}, {n_theta})")
    radii = 1.0 + (R - 1.0) * np.arange(n_r + 1) / n_r
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    verts = np.empty(((n_r + 1) * n_theta, 2))
    for i, r in enumerate(radii):
        base = i * n_theta
        verts[base : base + n_theta, 0] = r * np.cos(thetas)
        verts[base : base + n_theta, 1] = r * np.sin(thetas)

    tris = []
    for i in range(n_r):
        for j in range(n_theta):
            jn = (j + 1) % n_theta
            a = i * n_theta + j
            b = (i + 1) * n_theta + j
            c = (i + 1) * n_theta + jn
            d = i * n_theta + jn
            tris.append((a, b, c))
            tris.append((a, c, d))

    edges, tags, h = [], [], []
    for j in range(n_theta):
        edges.append((j, (j + 1) % n_theta))
        tags.append(TAG_FREE)
        h.append((1.0, 1.0))
    outer = n_r * n_theta
    for j in range(n_theta):
        edges.append((outer + j, outer + (j + 1) % n_theta))
        tags.append(TAG_DIRICHLET)
        h.append((0.0, 0.0))
    return _finalize(verts, tris, edges, tags, h, "annulus", {"R": float(R), "n_r": n_r, "n_theta": n_theta})


def _zipper_band(o1: int, m1: int, o2: int, m2: int) -> list[tuple[int, int, int]]:
    """Triangulate the band between two concentric vertex rings by angle merge."""
    tris = []
    i = j = 0
    while i < m1 or j < m2:
        I = o1 + (i % m1)
        J = o2 + (j % m2)
        advance_inner = i < m1 and (j >= m2 or (i + 1) * m2 <= (j + 1) * m1)
        if advance_inner:
            tris.append((I, J, o1 + ((i + 1) % m1)))
            i += 1
        else:
            tris.append((I, J, o2 + ((j + 1) % m2)))
            j += 1
    return tris


def disk_mesh(n_rings: int) -> TriMesh:
    """Mesh of the unit disk: ring k of n carries 8k vertices at radius k/n.

    All boundary edges are FREE with H = 1 (the disk-form boundary weight).
    1 + 4n(n+1) vertices and 8n^2 triangles.
    """
    if n_rings < 1:
        raise ValueError(f"need n_rings >= 1, got {n_rings}")
    n = n_rings
    verts = [(0.0, 0.0)]
    offsets = [0]
    for k in range(1, n + 1):
        offsets.append(len(verts))
        m = 8 * k
        ang = 2.0 * np.pi * np.arange(m) / m
        r = k / n
        verts.extend(zip(r * np.cos(ang), r * np.sin(ang)))

    tris: list[tuple[int, int, int]] = []
    for j in range(8):
        tris.append((0, 1 + j, 1 + (j + 1) % 8))
    for k in range(2, n + 1):
        tris.extend(_zipper_band(offsets[k - 1], 8 * (k - 1), offsets[k], 8 * k))

    m = 8 * n
    o = offsets[n]
    edges = [(o + j, o + (j + 1) % m) for j in range(m)]
    tags = [TAG_FREE] * m
    h = [(1.0, 1.0)] * m
    return _finalize(verts, tris, edges, tags, h, "disk", {"n_rings": n})


def _check_orientation_ccw(tris, verts):
    p = np.asarray(verts)[np.asarray(tris, dtype=int)]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def hairpin_band_mesh(s_lo: float, s_hi: float, n_s: int, n_t: int) -> TriMesh:
    """Image of the strip rectangle [s_lo, s_hi] x [-pi/2, pi/2] under the chart.

    Catenary edges (t = +-pi/2) are FREE with H = sech^2(s); the cuts
    Re w = s_lo, s_hi are DIRICHLET.  Strip coordinates of every vertex are
    kept so refinement can go through the chart.
    """
    if not s_lo < s_hi:
        raise ValueError(f"need s_lo < s_hi, got ({s_lo}, {s_hi})")
    if max(abs(s_lo), abs(s_hi)) > S_MAX:
        raise ValueError(f"strip cut outside overflow guard |s| <= {S_MAX}")
    if n_s < 1 or n_t < 1:
        raise ValueError("need n_s, n_t >= 1")
    s = np.linspace(s_lo, s_hi, n_s + 1)
    t = np.linspace(-STRIP_HALF_WIDTH, STRIP_HALF_WIDTH, n_t + 1)
    W = s[:, None] + 1j * t[None, :]
    Z = W + np.sinh(W)
    verts = np.column_stack([Z.real.ravel(), Z.imag.ravel()])
    wflat = W.ravel()

    def vid(i, j):
        return i * (n_t + 1) + j

    tris = []
    for i in range(n_s):
        for j in range(n_t):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))

    edges, tags, h = [], [], []
    for i in range(n_s):
        for j_side in (0, n_t):
            e = (vid(i, j_side), vid(i + 1, j_side))
            edges.append(e)
            tags.append(TAG_FREE)
            h.append((1.0 / math.cosh(s[i]) ** 2, 1.0 / math.cosh(s[i + 1]) ** 2))
    for j in range(n_t):
        edges.append((vid(0, j), vid(0, j + 1)))
        tags.append(TAG_DIRICHLET)
        h.append((0.0, 0.0))
        edges.append((vid(n_s, j), vid(n_s, j + 1)))
        tags.append(TAG_DIRICHLET)
        h.append((0.0, 0.0))
    return _finalize(
        verts, tris, edges, tags, h, "hairpin_band",
        {"s_lo": float(s_lo), "s_hi": float(s_hi), "n_s": n_s, "n_t": n_t},
        vertex_params=wflat,
    )


def hairpin_mesh(S: float, n_s: int, n_t: int) -> TriMesh:
    """Symmetric truncation of the hairpin phase, strip cuts at Re w = +-S."""
    if not S > 0:
        raise ValueError(f"need S > 0, got {S}")
    mesh = hairpin_band_mesh(-S, S, n_s, n_t)
    return replace(mesh, kind="hairpin", params={"S": float(S), "n_s": n_s, "n_t": n_t})


def rect_mesh(width: float, half_height: float, n_x: int, n_y: int) -> TriMesh:
    """Truncated plane phase (0, width) x (-half_height, half_height).

    The x1 = 0 edge is the free boundary (H = 0); the other sides are cuts.
    """
    if width <= 0 or half_height <= 0:
        raise ValueError("need positive width and half_height")
    if n_x < 1 or n_y < 1:
        raise ValueError("need n_x, n_y >= 1")
    x = np.linspace(0.0, width, n_x + 1)
    y = np.linspace(-half_height, half_height, n_y + 1)
    verts = np.column_stack([np.repeat(x, n_y + 1), np.tile(y, n_x + 1)])

    def vid(i, j):
        return i * (n_y + 1) + j

    tris = []
    for i in range(n_x):
        for j in range(n_y):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))

    edges, tags, h = [], [], []
    for j in range(n_y):
        edges.append((vid(0, j), vid(0, j + 1)))
        tags.append(TAG_FREE)
        h.append((0.0, 0.0))
        edges.append((vid(n_x, j), vid(n_x, j + 1)))
        tags.append(TAG_DIRICHLET)
        h.append((0.0, 0.0))
    for i in range(n_x):
        edges.append((vid(i, 0), vid(i + 1, 0)))
        tags.append(TAG_DIRICHLET)
        h.append((0.0, 0.0))
        edges.append((vid(i, n_y), vid(i + 1, n_y)))
        tags.append(TAG_DIRICHLET)
        h.append((0.0, 0.0))
    return _finalize(
        verts, tris, edges, tags, h, "rect",
        {"width": float(width), "half_height": float(half_height), "n_x": n_x, "n_y": n_y},
    )


def shell_mesh(r_in: float, r_out: float, n_r: int, n_theta: int) -> TriMesh:
    """Annulus r_in <= r <= r_out with both circles DIRICHLET (collar subdomain)."""
    if not 0 < r_in < r_out:
        raise ValueError(f"need 0 < r_in < r_out, got ({r_in}, {r_out})")
    if n_r < 2 or n_theta < 8:
        raise ValueError(f"need n_r >= 2 and n_theta >= 8, got ({n_r}, {n_theta})")
    base = annulus_mesh(1.0 + (r_out - r_in), n_r, n_theta)  # reuse layout, rescale below
    radii = r_in + (r_out - r_in) * np.arange(n_r + 1) / n_r
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    verts = np.empty_like(base.vertices)
    for i, r in enumerate(radii):
        sl = slice(i * n_theta, (i + 1) * n_theta)
        verts[sl, 0] = r * np.cos(thetas)
        verts[sl, 1] = r * np.sin(thetas)
    tags = np.full(len(base.edges), TAG_DIRICHLET, dtype="U9")
    h = np.zeros_like(base.edge_h)
    return _finalize(
        verts, base.triangles, base.edges, tags, h, "shell",
        {"r_in": float(r_in), "r_out": float(r_out), "n_r": n_r, "n_theta": n_theta},
    )


def _hairpin_curvature(s: float) -> float:
    return 1.0 / math.cosh(s) ** 2


def refine(mesh: TriMesh) -> TriMesh:
    """Uniform red refinement (each triangle into four).

    Midpoints on curved free boundaries are reprojected to the exact curve
    (radially for circles, through the strip chart for the hairpin) and their
    curvature values are re-evaluated exactly, never interpolated.  Requires
    generator geometry metadata; meshes loaded from file cannot be refined.
    """
    if mesh.kind not in ("annulus", "disk", "hairpin", "hairpin_band", "rect", "shell"):
        raise ValueError(
            f"cannot refine mesh of kind {mesh.kind!r}: exact boundary geometry is unknown"
        )
    chart = mesh.kind in ("hairpin", "hairpin_band")
    if chart and mesh.vertex_params is None:
        raise ValueError("hairpin mesh lost its strip coordinates; cannot refine")

    edge_info: dict[tuple[int, int], tuple[str, float]] = {}
    for e, tag in zip(mesh.edges.tolist(), mesh.edge_tags):
        key = (min(e), max(e))
        if mesh.kind in ("annulus", "disk", "shell"):
            if tag == TAG_FREE:
                snap_r = 1.0
            elif mesh.kind == "annulus":
                snap_r = mesh.params["R"]
            elif mesh.kind == "shell":
                # decide which circle by radius of the endpoints
                rr = float(np.linalg.norm(mesh.vertices[e[0]]))
                snap_r = mesh.params["r_in"] if abs(rr - mesh.params["r_in"]) < abs(rr - mesh.params["r_out"]) else mesh.params["r_out"]
            else:
                snap_r = 1.0
        else:
            snap_r = math.nan
        edge_info[key] = (str(tag), snap_r)

    verts = [tuple(v) for v in mesh.vertices.tolist()]
    wparams = list(mesh.vertex_params.tolist()) if chart else None
    midpoint: dict[tuple[int, int], int] = {}

    def get_mid(a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        idx = midpoint.get(key)
        if idx is not None:
            return idx
        if chart:
            wm = 0.5 * (wparams[a] + wparams[b])
            zm, _ = solutions.strip_map(wm)
            pos = (zm.real, zm.imag)
            wparams.append(wm)
        else:
            pa = mesh.vertices[a]
            pb = mesh.vertices[b]
            pos = tuple(0.5 * (pa + pb))
            info = edge_info.get(key)
            if info is not None and not math.isnan(info[1]):
                r = math.hypot(*pos)
                if r > 0:
                    scale = info[1] / r
                    pos = (pos[0] * scale, pos[1] * scale)
        idx = len(verts)
        verts.append(pos)
        midpoint[key] = idx
        return idx

    tris = []
    for a, b, c in mesh.triangles.tolist():
        mab, mbc, mca = get_mid(a, b), get_mid(b, c), get_mid(c, a)
        tris.extend([(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)])

    def h_at(vertex_idx: int, tag: str) -> float:
        if tag == TAG_DIRICHLET:
            return 0.0
        if mesh.kind in ("annulus", "disk"):
            return 1.0
        if chart:
            return _hairpin_curvature(wparams[vertex_idx].real)
        return 0.0  # rect free boundary is the straight line H = 0

    edges, tags, h = [], [], []
    for e, tag in zip(mesh.edges.tolist(), mesh.edge_tags):
        a, b = e
        m = get_mid(a, b)
        tag = str(tag)
        for p, q in ((a, m), (m, b)):
            edges.append((p, q))
            tags.append(tag)
            h.append((h_at(p, tag), h_at(q, tag)))

    return _finalize(
        np.asarray(verts), tris, edges, tags, h, mesh.kind, dict(mesh.params),
        vertex_params=np.asarray(wparams) if chart else None,
    )


def store(mesh: TriMesh, path) -> None:
    """Write the line-oriented text format: header, v/t/e records, 17 digits."""
    lines = ["fbmesh 1"]
    for x, y in mesh.vertices:
        lines.append(f"v {x:.17g} {y:.17g}")
    for i, j, k in mesh.triangles:
        lines.append(f"t {i} {j} {k}")
    for (i, j), tag, (h1, h2) in zip(mesh.edges, mesh.edge_tags, mesh.edge_h):
        lines.append(f"e {i} {j} {tag} {h1:.17g} {h2:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load(path) -> TriMesh:
    """Parse a mesh file; malformed content raises MeshFormatError with a line number."""
    verts: list[tuple[float, float]] = []
    tris: list[tuple[int, int, int]] = []
    tri_lines: list[int] = []
    edges: list[tuple[int, int]] = []
    edge_lines: list[int] = []
    tags: list[str] = []
    h: list[tuple[float, float]] = []
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0].split() != ["fbmesh", "1"]:
        raise MeshFormatError("line 1: expected header 'fbmesh 1'")
    for ln, line in enumerate(raw[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] == "v" and len(parts) == 3:
                verts.append((float(parts[1]), float(parts[2])))
            elif parts[0] == "t" and len(parts) == 4:
                tris.append((int(parts[1]), int(parts[2]), int(parts[3])))
                tri_lines.append(ln)
            elif parts[0] == "e" and len(parts) == 6:
                if parts[3] not in _TAGS:
                    raise MeshFormatError(f"line {ln}: unknown edge tag {parts[3]!r}")
                edges.append((int(parts[1]), int(parts[2])))
                edge_lines.append(ln)
                tags.append(parts[3])
                h.append((float(parts[4]), float(parts[5])))
            else:
                raise MeshFormatError(f"line {ln}: unrecognized record {line!r}")
        except MeshFormatError:
            raise
        except ValueError as exc:
            raise MeshFormatError(f"line {ln}: {exc}") from exc
    nv = len(verts)
    for ln, tri in zip(tri_lines, tris):
        if any(not 0 <= v < nv for v in tri):
            raise MeshFormatError(f"line {ln}: triangle index out of range")
    for ln, e in zip(edge_lines, edges):
        if any(not 0 <= v < nv for v in e):
            raise MeshFormatError(f"line {ln}: edge index out of range")
    mesh = _finalize(verts, tris, edges, tags, h, "file", {})
    areas = mesh.signed_areas()
    if len(areas) and areas.min() <= 0:
        bad = int(np.argmin(areas))
        raise MeshFormatError(f"line {tri_lines[bad]}: triangle not counterclockwise")
    return mesh


def mesh_for(kind: SolutionKind, truncation: float, n_r: int = 24, n_theta: int = 48,
             n_t: int = 16) -> TriMesh:
    """Truncated positive-phase mesh for a solution at a given truncation size.

    DISK_COMPLEMENT: annulus of outer radius ``truncation``; HAIRPIN: strip
    cut at ``|Re w| <= truncation``; PLANE: rectangle (0, truncation) x
    (-truncation, truncation).  Cell counts scale with the domain so element
    size stays comparable across truncations.
    """
    if kind is SolutionKind.DISK_COMPLEMENT:
        return annulus_mesh(truncation, n_r, n_theta)
    if kind is SolutionKind.HAIRPIN:
        n_s = max(4, int(round(2 * truncation * n_t / math.pi)))
        return hairpin_mesh(truncation, n_s, n_t)
    n_y = max(8, int(round(n_r)))
    return rect_mesh(truncation, truncation, max(4, n_y // 2), n_y)


def mesh_solution_kind(mesh: TriMesh) -> SolutionKind | None:
    return {
        "annulus": SolutionKind.DISK_COMPLEMENT,
        "hairpin": SolutionKind.HAIRPIN,
        "hairpin_band": SolutionKind.HAIRPIN,
        "rect": SolutionKind.PLANE,
        "shell": SolutionKind.DISK_COMPLEMENT,
    }.get(mesh.kind)
