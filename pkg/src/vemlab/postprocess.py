"""Error measurement and convergence-rate fitting.

The discrete solution is only known through its DoFs, so all errors are
computed against its computable polynomial snapshots: the cellwise L2
projection of the function for the L2 error and the projected gradient for
the H1 seminorm error.  Slopes come from log-log fits over mesh sequences.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .assembly import build_dofmap
from .basis import ScaledMonomialBasis, polygon_quadrature
from .local import projector_set
from .mesh import element_geometry


@dataclass(frozen=True)
class ErrorRecord:
    """Errors of one solve; ``failed`` marks an unsolvable mesh (kept as
    data so sweeps can continue)."""

    h_max: float
    n_cells: int
    n_dofs: int
    err_L2_rel: float
    err_H1_rel: float
    err_point_rel: float
    failed: bool = False


@dataclass(frozen=True)
class ConvergenceReport:
    """Least-squares and pairwise log-log slopes over a mesh sequence."""

    records: tuple
    slope_L2: float
    slope_H1: float
    slope_point: float
    pairwise_L2: np.ndarray = field(repr=False)
    pairwise_H1: np.ndarray = field(repr=False)
    pairwise_point: np.ndarray = field(repr=False)


@dataclass
class SolutionProjection:
    """Cellwise polynomial snapshots of a discrete solution.

    ``coeffs[c]`` holds the L2-projection coefficients of the solution on
    cell ``c`` in the scaled monomial basis of degree ``k``; ``grad_coeffs``
    the projected gradient (degree ``k - 1``, last axis = component);
    ``energy_coeffs`` the energy projection, kept for the alternative H1
    error representative.
    """

    mesh: object
    k: int
    coeffs: np.ndarray
    grad_coeffs: np.ndarray
    energy_coeffs: np.ndarray

    def cell_value(self, cell, points):
        basis = ScaledMonomialBasis(element_geometry(self.mesh, cell), self.k)
        return basis.eval(points) @ self.coeffs[cell]


def project_solution(mesh, k, u, dofmap=None):
    """Cellwise polynomial snapshots of the DoF vector ``u``."""
    if dofmap is None:
        dofmap = build_dofmap(mesh, k)
    if u.shape != (dofmap.n_dofs,):
        raise ValueError(
            f"DoF vector has shape {u.shape}, expected ({dofmap.n_dofs},)")
    n_cells = mesh.num_cells
    first = projector_set(element_geometry(mesh, 0), k)
    coeffs = np.empty((n_cells, first.Pi0k.shape[0]))
    grads = np.empty((n_cells, first.Pi0GradX.shape[0], 2))
    energy = np.empty((n_cells, first.PiNabla.shape[0]))
    for c in range(n_cells):
        ps = first if c == 0 else projector_set(element_geometry(mesh, c), k)
        u_loc = u[dofmap.cell_dofs[c]]
        coeffs[c] = ps.Pi0k @ u_loc
        grads[c, :, 0] = ps.Pi0GradX @ u_loc
        grads[c, :, 1] = ps.Pi0GradY @ u_loc
        energy[c] = ps.PiNabla @ u_loc
    return SolutionProjection(mesh=mesh, k=k, coeffs=coeffs,
                              grad_coeffs=grads, energy_coeffs=energy)


def error_norms(mesh, k, projection, p_ex, grad_p_ex, gradient="pi0",
                exactness=None, relative=True):
    """(L2, H1-seminorm) errors of a projected solution against ``p_ex``.

    ``gradient`` selects the discrete-gradient representative: ``"pi0"``
    uses the projected gradient, ``"pinabla"`` the gradient of the energy
    projection.  With ``relative=True`` (default) errors are normalized by
    the corresponding norms of ``p_ex``, integrated with the same rule.
    """
    if gradient not in ("pi0", "pinabla"):
        raise ValueError(f"unknown gradient representative {gradient!r}")
    ex = (2 * k + 4) if exactness is None else exactness
    num_l2 = num_h1 = den_l2 = den_h1 = 0.0
    for c in range(mesh.num_cells):
        geom = element_geometry(mesh, c)
        rule = polygon_quadrature(geom, ex)
        x, y = rule.points[:, 0], rule.points[:, 1]
        w = rule.weights
        basis = ScaledMonomialBasis(geom, k)
        p_vals = np.asarray(p_ex(x, y), dtype=float)
        g_vals = np.asarray(grad_p_ex(x, y), dtype=float)
        ph = basis.eval(rule.points) @ projection.coeffs[c]
        if gradient == "pi0":
            Vm1 = ScaledMonomialBasis(geom, k - 1).eval(rule.points)
            gh = Vm1 @ projection.grad_coeffs[c]
        else:
            gx, gy = basis.grad(rule.points)
            gh = np.column_stack([gx @ projection.energy_coeffs[c],
                                  gy @ projection.energy_coeffs[c]])
        num_l2 += w @ (ph - p_vals) ** 2
        num_h1 += w @ np.sum((gh - g_vals) ** 2, axis=1)
        den_l2 += w @ p_vals ** 2
        den_h1 += w @ np.sum(g_vals ** 2, axis=1)
    err_l2, err_h1 = np.sqrt(num_l2), np.sqrt(num_h1)
    if not relative:
        return err_l2, err_h1
    return (err_l2 / max(np.sqrt(den_l2), 1e-300),
            err_h1 / max(np.sqrt(den_h1), 1e-300))


def _segment_distance(a, b, p):
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom == 0.0 else np.clip((p - a) @ ab / denom, 0.0, 1.0)
    return np.linalg.norm(p - (a + t * ab))


def _contains(coords, p, tol):
    x, y = p
    n = coords.shape[0]
    for i in range(n):
        if _segment_distance(coords[i], coords[(i + 1) % n], p) <= tol:
            return True
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = coords[i]
        xj, yj = coords[j]
        if (yi > y) != (yj > y):
            x_cross = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < x_cross:
                inside = not inside
        j = i
    return inside


def locate_cell(mesh, point):
    """Index of the first cell containing ``point`` (boundary-inclusive)."""
    p = np.asarray(point, dtype=float)
    span = np.ptp(mesh.vertices, axis=0).max()
    for c in range(mesh.num_cells):
        if _contains(mesh.vertices[mesh.cells[c]], p, 1e-12 * span):
            return c
    raise ValueError(f"point {tuple(p)} lies outside the mesh")


def point_error(projection, point, p_ex):
    """Relative error of the projected solution at one point.

    Returns ``(error, cell)`` where ``cell`` is the containing cell whose
    polynomial was evaluated; for points on an interface the lowest-index
    incident cell is used.
    """
    p = np.asarray(point, dtype=float)
    cell = locate_cell(projection.mesh, p)
    value = projection.cell_value(cell, p[None, :])[0]
    exact = float(p_ex(p[0], p[1]))
    return abs(exact - value) / max(abs(exact), 1e-300), cell


def _pairwise(hs, errs):
    out = np.full(len(hs) - 1, np.nan)
    for i in range(len(hs) - 1):
        dh = np.log(hs[i + 1] / hs[i])
        if dh != 0.0 and errs[i] > 0 and errs[i + 1] > 0:
            out[i] = np.log(errs[i + 1] / errs[i]) / dh
    return out


def _fit(hs, errs):
    mask = np.isfinite(errs) & (np.asarray(errs) > 0)
    hs, errs = np.asarray(hs)[mask], np.asarray(errs)[mask]
    keep = np.ones(hs.size, dtype=bool)
    seen = set()
    for i, h in enumerate(hs):
        if h in seen:
            keep[i] = False
            warnings.warn(f"duplicate mesh size h = {h}; excluded from the "
                          "slope fit", stacklevel=3)
        seen.add(h)
    hs, errs = hs[keep], errs[keep]
    if hs.size < 2:
        return np.nan
    return np.polyfit(np.log(hs), np.log(errs), 1)[0]


def convergence_rates(records):
    """Fit log-log slopes over a sequence of error records.

    Failed or non-finite records are skipped; duplicate mesh sizes are
    excluded from the least-squares fit with a warning.  Pairwise slopes sit
    between successive usable records (``nan`` where undefined).
    """
    usable = [r for r in records
              if not r.failed and np.isfinite([r.err_L2_rel, r.err_H1_rel,
                                               r.h_max]).all()]
    hs = np.array([r.h_max for r in usable])
    l2 = np.array([r.err_L2_rel for r in usable])
    h1 = np.array([r.err_H1_rel for r in usable])
    pt = np.array([r.err_point_rel for r in usable])
    if hs.size >= 2:
        pair_l2, pair_h1, pair_pt = (_pairwise(hs, l2), _pairwise(hs, h1),
                                     _pairwise(hs, pt))
    else:
        pair_l2 = pair_h1 = pair_pt = np.empty(0)
    return ConvergenceReport(records=tuple(records),
                             slope_L2=_fit(hs, l2),
                             slope_H1=_fit(hs, h1),
                             slope_point=_fit(hs, pt),
                             pairwise_L2=pair_l2,
                             pairwise_H1=pair_h1,
                             pairwise_point=pair_pt)
