"""Dense per-triangle element matrices for P1 Lagrange elements.

Scalar kinds (mass, weighted mass, stiffness) produce 3x3 matrices, the
plane linear-elasticity kind a 6x6 with the interleaved local ordering
(x1, y1, x2, y2, x3, y3).  Every matrix is assembled from its upper
triangle and mirrored, so symmetry holds exactly, not just to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import AREA_EPS

__all__ = [
    "ElasticParams",
    "elasticity_tensor",
    "elem_mass",
    "elem_mass_weighted",
    "elem_stiff",
    "elem_stiff_elastic",
]


def _check_area(area: float) -> float:
    area = float(area)
    if not area > AREA_EPS:
        raise ValueError(f"triangle area must be positive, got {area:g}")
    return area


def elem_mass(area: float) -> np.ndarray:
    """3x3 element mass matrix: (area/12) * [[2,1,1],[1,2,1],[1,1,2]]."""
    area = _check_area(area)
    d = area / 6.0
    o = area / 12.0
    return np.array([[d, o, o], [o, d, o], [o, o, d]])


def elem_mass_weighted(area: float, w1: float, w2: float, w3: float) -> np.ndarray:
    """3x3 element mass matrix with the weight sampled at the vertices.

    The diagonal entry for vertex a is (area/30)*(3*wa + wb + wc) and the
    off-diagonal entry for the pair (a, b) is (area/30)*(wa + wb + wc/2),
    c being the remaining vertex.
    """
    area = _check_area(area)
    s = area / 30.0
    e11 = s * (3.0 * w1 + w2 + w3)
    e22 = s * (w1 + 3.0 * w2 + w3)
    e33 = s * (w1 + w2 + 3.0 * w3)
    e12 = s * (w1 + w2 + w3 / 2.0)
    e13 = s * (w1 + w2 / 2.0 + w3)
    e23 = s * (w1 / 2.0 + w2 + w3)
    return np.array([[e11, e12, e13], [e12, e22, e23], [e13, e23, e33]])


def elem_stiff(p1, p2, p3, area: float) -> np.ndarray:
    """3x3 element stiffness matrix from the edge vectors
    u = p2 - p3, v = p3 - p1, w = p1 - p2:
    entry (a, b) = dot(edge_a, edge_b) / (4 * area)."""
    area = _check_area(area)
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    p3 = np.asarray(p3, dtype=np.float64)
    u = p2 - p3
    v = p3 - p1
    w = p1 - p2
    c = 1.0 / (4.0 * area)
    uu = c * (u @ u)
    uv = c * (u @ v)
    uw = c * (u @ w)
    vv = c * (v @ v)
    vw = c * (v @ w)
    ww = c * (w @ w)
    return np.array([[uu, uv, uw], [uv, vv, vw], [uw, vw, ww]])


@dataclass(frozen=True)
class ElasticParams:
    """Lame coefficients and the derived 3x3 isotropic Hooke matrix
    C = [[lam+2mu, lam, 0], [lam, lam+2mu, 0], [0, 0, mu]].

    Admissibility requires lam + mu > 0 and mu > 0.
    """

    lam: float
    mu: float
    C: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lam, mu = float(self.lam), float(self.mu)
        if not lam + mu > 0.0:
            raise ValueError(f"lam + mu must be positive, got {lam + mu:g}")
        if not mu > 0.0:
            raise ValueError(f"mu must be positive, got {mu:g}")
        C = np.array([[lam + 2 * mu, lam, 0.0], [lam, lam + 2 * mu, 0.0], [0.0, 0.0, mu]])
        C.flags.writeable = False
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "C", C)


def elasticity_tensor(lam: float, mu: float) -> ElasticParams:
    """Validated Lame parameters with their Hooke matrix."""
    return ElasticParams(lam, mu)


def elem_stiff_elastic(p1, p2, p3, area: float, params: ElasticParams) -> np.ndarray:
    """6x6 element matrix of the plane linear-elasticity bilinear form,
    area * B^T C B, for the interleaved local ordering (x1,y1,...,y3).

    B applies the symmetric-gradient operator to the local basis; with
    the constant P1 gradients g_a the unique entries reduce to products
    of gradient components, computed below for the upper triangle and
    mirrored.
    """
    area = _check_area(area)
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    p3 = np.asarray(p3, dtype=np.float64)
    inv2a = 0.5 / area
    u = p2 - p3
    v = p3 - p1
    w = p1 - p2
    # constant basis gradients: g_a = perp(edge_a) / (2*area)
    g = np.array(
        [
            [u[1] * inv2a, -u[0] * inv2a],
            [v[1] * inv2a, -v[0] * inv2a],
            [w[1] * inv2a, -w[0] * inv2a],
        ]
    )
    lam, mu = params.lam, params.mu
    lpm2 = lam + 2.0 * mu

    ke = np.empty((6, 6))
    for a in range(3):
        gax, gay = g[a]
        for b in range(a, 3):
            gbx, gby = g[b]
            xx = (lpm2 * gax * gbx + mu * gay * gby) * area
            xy = (lam * gax * gby + mu * gay * gbx) * area
            yx = (lam * gay * gbx + mu * gax * gby) * area
            yy = (lpm2 * gay * gby + mu * gax * gbx) * area
            ke[2 * a, 2 * b] = xx
            ke[2 * a, 2 * b + 1] = xy
            ke[2 * a + 1, 2 * b] = yx
            ke[2 * a + 1, 2 * b + 1] = yy
    iu = np.triu_indices(6, 1)
    ke[iu[1], iu[0]] = ke[iu]
    return ke
