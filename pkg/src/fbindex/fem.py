"""P1 finite element assembly of the second-variation form.

The form is Q(phi, phi) = int |grad phi|^2 - int_FREE H phi^2, discretized
with linear elements and exact element integration: no quadrature rule enters
the core path.  Dirichlet constraints on truncation edges are imposed by
row/column elimination so that inertia counts stay exact.

Element formulas (triangle area A, barycentric gradients g_i):

    stiffness  K_ij = A * g_i . g_j
    mass       M_ij = A/12 * (1 + delta_ij)

and on a FREE edge of length ell with endpoint curvature values h1, h2 the
Robin matrix is the exact integral of the linear interpolant of H:

    (ell/12) * [[3 h1 + h2, h1 + h2], [h1 + h2, h1 + 3 h2]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import AssemblyError, NumericalError, StabilityViolationError
from .linalg import BandedLDLT
from .meshgen import TAG_FREE, TriMesh

_DEGENERATE_AREA = 1e-14


@dataclass
class AssembledForms:
    """Assembled matrices on a mesh.

    A, M, B are full vertex-indexed matrices (stiffness, mass, Robin boundary
    mass).  ``free_dofs`` indexes vertices not on any DIRICHLET edge and
    K = (A - B) restricted to them; its inertia is the discrete Morse index.
    """

    A: sparse.csr_matrix
    M: sparse.csr_matrix
    B: sparse.csr_matrix
    free_dofs: np.ndarray
    K: sparse.csr_matrix
    M_free: sparse.csr_matrix
    mesh: TriMesh


def _element_arrays(mesh: TriMesh):
    p = mesh.vertices[mesh.triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    if len(area) and area.min() < _DEGENERATE_AREA:
        bad = int(np.argmin(area))
        raise AssemblyError(f"triangle {bad} degenerate (signed area {area[bad]:.3e})")
    x, y = p[..., 0], p[..., 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    inv2a = 1.0 / (2.0 * area)
    gx = b * inv2a[:, None]
    gy = c * inv2a[:, None]
    return area, gx, gy


def assemble(mesh: TriMesh) -> AssembledForms:
    """Assemble stiffness, mass and Robin boundary matrices for a mesh."""
    nv = mesh.num_vertices
    area, gx, gy = _element_arrays(mesh)

    ke = area[:, None, None] * (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :])
    me = (area[:, None, None] / 12.0) * (np.ones((3, 3)) + np.eye(3))[None]

    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    A = sparse.coo_matrix((ke.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()
    M = sparse.coo_matrix((me.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()

    B = free_boundary_mass(mesh, weighted=True)

    constrained = mesh.dirichlet_vertices()
    mask = np.ones(nv, dtype=bool)
    mask[constrained] = False
    free = np.nonzero(mask)[0]
    KB = (A - B).tocsr()
    K = KB[free][:, free].tocsr()
    M_free = M[free][:, free].tocsr()
    return AssembledForms(A=A, M=M, B=B, free_dofs=free, K=K, M_free=M_free, mesh=mesh)


def free_boundary_mass(mesh: TriMesh, weighted: bool = True) -> sparse.csr_matrix:
    """Boundary mass on FREE edges; weighted by the linear interpolant of H or by 1."""
    nv = mesh.num_vertices
    rows, cols, vals = [], [], []
    for (i, j), tag, (h1, h2) in zip(mesh.edges.tolist(), mesh.edge_tags, mesh.edge_h):
        if tag != TAG_FREE:
            continue
        if not weighted:
            h1 = h2 = 1.0
        ell = float(np.linalg.norm(mesh.vertices[j] - mesh.vertices[i]))
        mat = (ell / 12.0) * np.array([[3 * h1 + h2, h1 + h2], [h1 + h2, h1 + 3 * h2]])
        for a, ia in ((0, i), (1, j)):
            for b_, jb in ((0, i), (1, j)):
                rows.append(ia)
                cols.append(jb)
                vals.append(mat[a, b_])
    return sparse.coo_matrix((vals, (rows, cols)), shape=(nv, nv)).tocsr()


def solve_poisson_robin(
    forms: AssembledForms,
    f: np.ndarray,
    dirichlet_data: np.ndarray | None = None,
) -> np.ndarray:
    """Solve the discrete problem -Lap v = f with the Robin free-boundary condition.

    ``f`` and ``dirichlet_data`` are per-vertex arrays (data is read only on
    constrained vertices).  The constrained operator K must be positive
    definite, which encodes the stability hypothesis lambda_1 > 0; otherwise
    StabilityViolationError is raised.  The returned per-vertex solution
    satisfies the free-dof residual bound 1e-10 relative.
    """
    nv = forms.mesh.num_vertices
    f = np.asarray(f, dtype=float)
    if f.shape != (nv,):
        raise ValueError(f"f must have shape ({nv},)")
    g = np.zeros(nv) if dirichlet_data is None else np.asarray(dirichlet_data, dtype=float)
    if g.shape != (nv,):
        raise ValueError(f"dirichlet_data must have shape ({nv},)")

    free = forms.free_dofs
    mask = np.ones(nv, dtype=bool)
    mask[free] = False
    constrained = np.nonzero(mask)[0]

    factor = BandedLDLT(forms.K)
    if not factor.is_positive_definite:
        neg, zero, _ = factor.inertia
        raise StabilityViolationError(
            f"constrained form is not positive definite (inertia: {neg} negative, {zero} zero); "
            "the subdomain is not stable"
        )

    rhs = (forms.M @ f)[free]
    if len(constrained):
        KB = (forms.A - forms.B).tocsr()
        rhs = rhs - KB[free][:, constrained] @ g[constrained]

    v_free = factor.solve(rhs)
    norm_rhs = np.linalg.norm(rhs)
    for _ in range(2):
        res = rhs - forms.K @ v_free
        if np.linalg.norm(res) <= 1e-10 * max(norm_rhs, 1e-300):
            break
        v_free = v_free + factor.solve(res)
    res = rhs - forms.K @ v_free
    if np.linalg.norm(res) > 1e-10 * max(norm_rhs, 1e-300) and norm_rhs > 0:
        raise NumericalError(f"poisson solve residual {np.linalg.norm(res):.3e} exceeds tolerance")

    v = np.zeros(nv)
    v[free] = v_free
    v[constrained] = g[constrained]
    return v


def dump_matrix(mat: sparse.spmatrix, path) -> None:
    """Write a matrix as sorted 0-based ``i j value`` coordinate text."""
    coo = sparse.coo_matrix(mat)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{i} {j} {v:.17g}\n")
