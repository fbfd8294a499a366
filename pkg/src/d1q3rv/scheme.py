"""D1Q3 lattice Boltzmann scheme with relative velocity.

The scheme lives on a 1D lattice with the three velocities -lambda, 0,
+lambda.  Collisions relax the first and second shifted moments toward
advection equilibria at rates s and s'; the shift is controlled by the
relative velocity u.  This module builds the moment matrix M, the basis
shift T(u), the relaxation rates S, the equilibrium projector E, and the
resulting per-cell relaxation operator

    R = M^-1 T^-1 (I + S (T E T^-1 - I)) T M,

which acts directly on the distribution triple (f1, f2, f3).  All values
are float64; every function is pure.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass

# Discrete velocities c_j in lattice units; distribution index j maps to
# velocity c_j * lambda, so matrix row/column 0 belongs to the left mover.
VELOCITIES = np.array([-1.0, 0.0, 1.0])

# Entrywise absolute tolerance for 3x3 matrix identities.  All entries are
# low-degree polynomials of O(1) inputs, so double precision leaves margin.
TAU_MAT = 1e-12


@dataclass(frozen=True)
class SchemeParameters:
    """One scheme instance.

    V is the nondimensional advection velocity (physical speed lam*V),
    u the relative velocity shifting the moment basis, s and s_prime the
    relaxation rates, alpha the second equilibrium parameter, and lam the
    lattice velocity dx/dt.  No admissibility restriction is applied here;
    the stability module decides which tuples yield a non-negative R.
    """

    V: float
    u: float = 0.0
    s: float = 1.0
    s_prime: float = 1.0
    alpha: float = 0.0
    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lattice velocity must be positive, got lam={self.lam}")


def mats_close(a, b, tol: float = TAU_MAT) -> bool:
    """Entrywise comparison with absolute tolerance."""
    return bool(np.max(np.abs(np.asarray(a, float) - np.asarray(b, float))) <= tol)


def build_M(p: SchemeParameters) -> np.ndarray:
    """Moment matrix: rows evaluate 1, lam*X, lam^2*(3X^2-2) at the velocities."""
    lam = p.lam
    return np.array([
        [1.0, 1.0, 1.0],
        [-lam, 0.0, lam],
        [lam**2, -2.0 * lam**2, lam**2],
    ])


def inverse_M(p: SchemeParameters) -> np.ndarray:
    """Closed-form inverse of the moment matrix (det M = 6 lam^3)."""
    lam = p.lam
    return np.array([
        [1.0 / 3.0, -1.0 / (2.0 * lam), 1.0 / (6.0 * lam**2)],
        [1.0 / 3.0, 0.0, -1.0 / (3.0 * lam**2)],
        [1.0 / 3.0, 1.0 / (2.0 * lam), 1.0 / (6.0 * lam**2)],
    ])


def build_T(p: SchemeParameters) -> np.ndarray:
    """Basis shift from plain moments to moments of (c - u).

    Lower triangular with unit diagonal, hence invertible for any u.
    """
    lam, u = p.lam, p.u
    return np.array([
        [1.0, 0.0, 0.0],
        [-lam * u, 1.0, 0.0],
        [3.0 * lam**2 * u**2, -6.0 * lam * u, 1.0],
    ])


def inverse_T(p: SchemeParameters) -> np.ndarray:
    """Inverse of the shift matrix by forward substitution (unit lower triangular)."""
    t = build_T(p)
    inv = np.zeros((3, 3))
    for j in range(3):
        for i in range(3):
            inv[i, j] = (1.0 if i == j else 0.0) - t[i, :i] @ inv[:i, j]
    return inv


def build_S(p: SchemeParameters) -> np.ndarray:
    """Diagonal relaxation rates: density is conserved, q and eps relax."""
    return np.diag([0.0, p.s, p.s_prime])


def build_E(p: SchemeParameters) -> np.ndarray:
    """Equilibrium projector in the unshifted moment basis.

    Only the first column is nonzero: equilibria depend on the density alone.
    """
    E = np.zeros((3, 3))
    E[0, 0] = 1.0
    E[1, 0] = p.V * p.lam
    E[2, 0] = p.alpha * p.lam**2
    return E


def build_relaxation_matrix(p: SchemeParameters) -> np.ndarray:
    """Per-cell collision operator R acting on (f1, f2, f3).

    Entries are independent of lam and each column sums to 1 (density
    conservation).  Non-negativity of all nine entries is the stability
    notion studied by the stability module.
    """
    M = build_M(p)
    T = build_T(p)
    S = build_S(p)
    E = build_E(p)
    eye = np.eye(3)
    return inverse_M(p) @ inverse_T(p) @ (eye + S @ (T @ E @ inverse_T(p) - eye)) @ T @ M


def relaxation_matrices(V, u, s, s_prime, alpha, lam=1.0) -> np.ndarray:
    """Vectorized relaxation operators, shape broadcast(inputs) + (3, 3).

    Same construction as build_relaxation_matrix with the closed-form
    inverses; used for parameter sweeps where per-tuple calls would dominate.
    """
    V, u, s, sp, al, lam = np.broadcast_arrays(
        *(np.asarray(x, float) for x in (V, u, s, s_prime, alpha, lam))
    )
    o = np.ones_like(V)
    z = np.zeros_like(V)

    def mat(rows):
        return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)

    M = mat([[o, o, o], [-lam, z, lam], [lam**2, -2 * lam**2, lam**2]])
    Minv = mat([
        [o / 3, -1 / (2 * lam), 1 / (6 * lam**2)],
        [o / 3, z, -1 / (3 * lam**2)],
        [o / 3, 1 / (2 * lam), 1 / (6 * lam**2)],
    ])
    T = mat([[o, z, z], [-lam * u, o, z], [3 * lam**2 * u**2, -6 * lam * u, o]])
    Tinv = mat([[o, z, z], [lam * u, o, z], [3 * lam**2 * u**2, 6 * lam * u, o]])
    S = mat([[z, z, z], [z, s, z], [z, z, sp]])
    E = mat([[o, z, z], [V * lam, z, z], [al * lam**2, z, z]])
    eye = np.zeros_like(M)
    eye[..., 0, 0] = eye[..., 1, 1] = eye[..., 2, 2] = 1.0
    return Minv @ Tinv @ (eye + S @ (T @ E @ Tinv - eye)) @ T @ M


def equilibrium_weights(p: SchemeParameters) -> np.ndarray:
    """Equilibrium distribution per unit density; independent of u."""
    return np.array([
        (2.0 - 3.0 * p.V + p.alpha) / 6.0,
        (2.0 - 2.0 * p.alpha) / 6.0,
        (2.0 + 3.0 * p.V + p.alpha) / 6.0,
    ])


def equilibrium_distributions(rho, p: SchemeParameters) -> np.ndarray:
    """Equilibrium triple(s) for density rho; sums back to rho exactly.

    rho may be a scalar (returns shape (3,)) or an array of cell densities
    (returns rho.shape + (3,)).
    """
    return np.asarray(rho, float)[..., None] * equilibrium_weights(p)


@dataclass(frozen=True)
class MomentVector:
    """Density and the two shifted moments of a distribution triple."""

    rho: float
    q: float
    eps: float


def moments_from_distributions(F, p: SchemeParameters) -> MomentVector:
    """Moments rho, q(u), eps(u) of a distribution triple.

    Equals T(u) @ M @ F: rho = sum f_j, q = lam * sum (c_j - u) f_j,
    eps = 3 lam^2 sum (c_j - u)^2 f_j - 2 lam^2 sum f_j.
    """
    f = np.asarray(F, float)
    c = VELOCITIES - p.u
    rho = float(f.sum())
    q = float(p.lam * (c * f).sum())
    eps = float(3.0 * p.lam**2 * (c**2 * f).sum() - 2.0 * p.lam**2 * f.sum())
    return MomentVector(rho, q, eps)


def _check_moment_change(C: np.ndarray) -> np.ndarray:
    C = np.asarray(C, float)
    if C.shape != (3, 3):
        raise ValueError(f"change-of-basis matrix must be 3x3, got shape {C.shape}")
    if np.max(np.abs(C[0] - np.array([1.0, 0.0, 0.0]))) > TAU_MAT:
        raise ValueError("change of basis must preserve the density moment: first row must be (1, 0, 0)")
    if abs(np.linalg.det(C)) <= TAU_MAT:
        raise ValueError("change-of-basis matrix must be invertible")
    return C


def basis_commutator(C, p: SchemeParameters) -> np.ndarray:
    """(S C - C S) T (E - I) for a moment change of basis C.

    This matrix is zero for all (s, s') exactly when C[1,2] = C[2,1] = 0,
    which is the condition for the relaxation operator to be unchanged by
    the change of basis.  C must be invertible with first row (1, 0, 0).
    """
    C = _check_moment_change(C)
    S = build_S(p)
    return (S @ C - C @ S) @ build_T(p) @ (build_E(p) - np.eye(3))


def change_basis_relaxation_matrix(C, p: SchemeParameters) -> np.ndarray:
    """Relaxation operator of the scheme rebuilt in the moment basis C @ M.

    The shifted basis becomes C T C^-1, the equilibrium projector C E, and
    the relaxation rates stay diagonal.  The result differs from
    build_relaxation_matrix(p) by M^-1 T^-1 C^-1 @ basis_commutator(C, p) @ M.
    """
    C = _check_moment_change(C)
    Cinv = np.linalg.inv(C)
    M = build_M(p)
    T = build_T(p)
    S = build_S(p)
    eye = np.eye(3)
    Mh = C @ M
    Mh_inv = inverse_M(p) @ Cinv
    Th = C @ T @ Cinv
    Th_inv = C @ inverse_T(p) @ Cinv
    Eh = C @ build_E(p)
    return Mh_inv @ Th_inv @ (eye + S @ (Th @ Eh @ Th_inv - eye)) @ Th @ Mh
