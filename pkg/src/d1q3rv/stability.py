"""Non-negativity of the relaxation operator.

R is called stable when all nine of its entries are >= 0: distributions
that start non-negative then stay non-negative for all times, which bounds
them through mass conservation.  Three equivalent decision routes are
provided:

  * entrywise non-negativity of the assembled matrix,
  * the nine entry values written as closed-form polynomials in
    (V, u, s, s', alpha),
  * a reduced five-comparison chain in the variables
    u_bar = 2 u (s - s') and gamma = (s'/6)(1 - alpha) - u (s - s') V:

        max(s' - 1, |u_bar|) <= 2 gamma
                             <= min(2 - s - |u_bar - sV|,
                                    s - |u_bar + sV|,
                                    s' - |sV|).

Since gamma is an affine function of alpha (for s' != 0), the chain also
yields the feasible gamma interval at fixed (V, u, s, s') and from it the
feasible alpha interval.  Everything accepts scalars or numpy arrays and
is pure.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass

from .scheme import SchemeParameters, build_relaxation_matrix

# Verdict tolerance: entries within -TAU_STAB of zero still count as
# non-negative (closed regions; ties resolved toward stability).
TAU_STAB = 1e-11

# Constraints with |slack| below this are reported as binding; property
# checks exclude samples this close to a boundary so rounding cannot flip
# an exact-arithmetic equivalence.
GUARD_BAND = 1e-9


@dataclass(frozen=True)
class ReducedParameters:
    """The two combinations that carry all stability information."""

    u_bar: float
    gamma: float


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of one decision route.

    slacks holds the signed residuals of that route's constraints (nine
    matrix entries or five chain margins), min_slack their minimum, and
    binding the indices within the guard band of zero.  The route tag keeps
    consumers agnostic of which shape they received.
    """

    stable: bool
    slacks: tuple
    min_slack: float
    binding: tuple
    route: str


@dataclass(frozen=True)
class GammaInterval:
    """Feasible interval for gamma at fixed (V, u, s, s'); may be empty."""

    lower: float
    upper: float
    empty: bool

    def contains(self, gamma: float, tol: float = TAU_STAB) -> bool:
        return (not self.empty) and self.lower - tol <= gamma <= self.upper + tol


def _verdict(slacks, route: str, tol: float = TAU_STAB, guard: float = GUARD_BAND) -> StabilityVerdict:
    slacks = tuple(float(x) for x in slacks)
    m = min(slacks)
    binding = tuple(i for i, x in enumerate(slacks) if abs(x) <= guard)
    return StabilityVerdict(stable=bool(m >= -tol), slacks=slacks, min_slack=m,
                            binding=binding, route=route)


def relaxation_entries_closed_form(V, u, s, s_prime, alpha) -> np.ndarray:
    """The nine entries of R as explicit polynomials, shape (..., 3, 3).

    Independent of the matrix-product construction in the scheme module and
    of lam; serves as its cross-check and as the slack vector of the
    nine-inequality route.
    """
    V, u, s, sp, al = np.broadcast_arrays(
        *(np.asarray(x, float) for x in (V, u, s, s_prime, alpha))
    )
    R = np.empty(V.shape + (3, 3))
    common_top = V * s * u - V * sp * u + al * sp / 6
    R[..., 0, 0] = common_top - 0.5 * V * s + s * u - 0.5 * s - sp * u - sp / 6 + 1
    R[..., 0, 1] = common_top - 0.5 * V * s + sp / 3
    R[..., 0, 2] = common_top - 0.5 * V * s - s * u + 0.5 * s + sp * u - sp / 6
    R[..., 1, 0] = -2 * common_top - 2 * s * u + 2 * sp * u + sp / 3
    R[..., 1, 1] = -2 * common_top - 2 * sp / 3 + 1
    R[..., 1, 2] = -2 * common_top + 2 * s * u - 2 * sp * u + sp / 3
    R[..., 2, 0] = common_top + 0.5 * V * s + s * u + 0.5 * s - sp * u - sp / 6
    R[..., 2, 1] = common_top + 0.5 * V * s + sp / 3
    R[..., 2, 2] = common_top + 0.5 * V * s - s * u - 0.5 * s + sp * u - sp / 6 + 1
    return R


def nine_inequalities(p: SchemeParameters) -> StabilityVerdict:
    """Stability by the nine closed-form entry values (row-major slacks)."""
    entries = relaxation_entries_closed_form(p.V, p.u, p.s, p.s_prime, p.alpha)
    return _verdict(entries.reshape(9), route="nine")


def matrix_entry_verdict(p: SchemeParameters) -> StabilityVerdict:
    """Stability by the entries of the assembled matrix product."""
    return _verdict(build_relaxation_matrix(p).reshape(9), route="entries")


def reduced_parameters(p: SchemeParameters) -> ReducedParameters:
    return ReducedParameters(
        u_bar=2.0 * p.u * (p.s - p.s_prime),
        gamma=(p.s_prime / 6.0) * (1.0 - p.alpha) - p.u * (p.s - p.s_prime) * p.V,
    )


def chain_bounds(V, u, s, s_prime):
    """Lower and upper bounds of the reduced chain, in units of 2*gamma.

    Vectorized; returns (lower, upper) where stability at given alpha reads
    lower <= 2*gamma <= upper.
    """
    V, u, s, sp = np.broadcast_arrays(*(np.asarray(x, float) for x in (V, u, s, s_prime)))
    ubar = 2.0 * u * (s - sp)
    lower = np.maximum(sp - 1.0, np.abs(ubar))
    upper = np.minimum(
        np.minimum(2.0 - s - np.abs(ubar - s * V), s - np.abs(ubar + s * V)),
        sp - np.abs(s * V),
    )
    return lower, upper


def reduced_condition(p: SchemeParameters) -> StabilityVerdict:
    """Stability by the five-comparison chain.

    Slacks, in order: 2g - (s'-1), 2g - |u_bar|, (2 - s - |u_bar - sV|) - 2g,
    (s - |u_bar + sV|) - 2g, (s' - |sV|) - 2g.
    """
    r = reduced_parameters(p)
    two_gamma = 2.0 * r.gamma
    sV = p.s * p.V
    slacks = (
        two_gamma - (p.s_prime - 1.0),
        two_gamma - abs(r.u_bar),
        (2.0 - p.s - abs(r.u_bar - sV)) - two_gamma,
        (p.s - abs(r.u_bar + sV)) - two_gamma,
        (p.s_prime - abs(sV)) - two_gamma,
    )
    return _verdict(slacks, route="reduced")


def gamma_feasible_interval(V, u, s, s_prime, tol: float = TAU_STAB) -> GammaInterval:
    """Feasible gamma interval at fixed (V, u, s, s'); empty when lower > upper + tol."""
    lower, upper = chain_bounds(V, u, s, s_prime)
    lo, hi = float(lower) / 2.0, float(upper) / 2.0
    return GammaInterval(lower=lo, upper=hi, empty=bool(lo > hi + tol))


def pinned_gamma(V, u, s) -> float:
    """The value gamma is forced to when s' = 0 (alpha then drops out)."""
    return -u * s * V


def alpha_from_gamma(gamma, V, u, s, s_prime):
    """Invert gamma back to alpha; None when s' = 0 (alpha-unconstrained).

    For s' = 0 the definition pins gamma at -u*s*V whatever alpha is, so
    callers must instead test that pinned value against the interval.
    """
    if s_prime == 0.0:
        return None
    return 1.0 - 6.0 * (gamma + u * (s - s_prime) * V) / s_prime


def alpha_interval(V, u, s, s_prime, tol: float = TAU_STAB):
    """Feasible alpha interval, or None when empty or alpha-unconstrained.

    Maps the gamma interval endpoints through alpha_from_gamma (alpha is
    affine, decreasing in gamma for s' > 0).
    """
    iv = gamma_feasible_interval(V, u, s, s_prime, tol)
    if iv.empty or s_prime == 0.0:
        return None
    a, b = (alpha_from_gamma(g, V, u, s, s_prime) for g in (iv.lower, iv.upper))
    return (min(a, b), max(a, b))


def alpha_feasible(V, u, s, s_prime, tol: float = TAU_STAB) -> bool:
    """Whether some alpha (any alpha, when s' = 0) makes the scheme stable."""
    iv = gamma_feasible_interval(V, u, s, s_prime, tol)
    if s_prime == 0.0:
        return iv.contains(pinned_gamma(V, u, s), tol)
    return not iv.empty


def u_zero_slacks(V, s, s_prime):
    """Signed residuals of the explicit u = 0 region conditions (vectorized).

    Conditions, for v = |V|: 0 <= s <= 2, 0 <= s' <= 2, s' >= s v,
    s <= 2/(1+v), s' <= 3 - (1+v) s, s' <= 1 + (1-v) s, and v <= 1.
    """
    v = np.abs(np.asarray(V, float))
    s = np.asarray(s, float)
    sp = np.asarray(s_prime, float)
    return np.stack(np.broadcast_arrays(
        s, 2.0 - s, sp, 2.0 - sp, sp - s * v, 2.0 - s * (1.0 + v),
        (3.0 - (1.0 + v) * s) - sp, (1.0 + (1.0 - v) * s) - sp, 1.0 - v,
    ), axis=-1)


def u_zero_region(V, s, s_prime, tol: float = TAU_STAB):
    """Explicit stability region in (s, s') when the relative velocity is zero.

    Negative V is folded to |V| (the region only depends on |V|).  For
    |V| <= 1 this is equivalent to the gamma interval at u = 0 being
    nonempty.  Scalar inputs give a bool; arrays give a bool array.
    """
    res = u_zero_slacks(V, s, s_prime).min(axis=-1) >= -tol
    return bool(res) if np.isscalar(res) or res.ndim == 0 else res


def u_zero_alpha_bounds(V, s, s_prime, tol: float = TAU_STAB):
    """Feasible alpha interval at u = 0; None when s' = 0 (alpha-unconstrained).

    Requires u_zero_region(V, s, s_prime) to hold.  The upper endpoint never
    exceeds 1, and the lower endpoint satisfies s' <= 3/(alpha + 2).
    """
    if s_prime == 0.0:
        return None
    if not u_zero_region(V, s, s_prime, tol):
        raise ValueError(f"(V={V}, s={s}, s_prime={s_prime}) is outside the u=0 stability region")
    return alpha_interval(V, 0.0, s, s_prime, tol)


def necessary_slacks(V, s, s_prime):
    """Signed residuals of the conditions every stable (s, s') must satisfy.

    For v = |V|: 0 <= s v <= s' <= 2, s v <= 1, 0 <= s <= 2,
    s' <= min(2 - s v, s + 1, 3 - s), s <= 2/(1+v).  These hold whatever u
    and alpha are, so they bound the union of all stability regions.
    """
    v = np.abs(np.asarray(V, float))
    s = np.asarray(s, float)
    sp = np.asarray(s_prime, float)
    sv = s * v
    return np.stack(np.broadcast_arrays(
        sv, sp - sv, 2.0 - sp, 1.0 - sv, s, 2.0 - s,
        (2.0 - sv) - sp, (s + 1.0) - sp, (3.0 - s) - sp, 2.0 - s * (1.0 + v),
    ), axis=-1)


def necessary_region(V, s, s_prime, tol: float = TAU_STAB):
    """Necessary-condition polytope in (s, s'); superset of every stable region."""
    res = necessary_slacks(V, s, s_prime).min(axis=-1) >= -tol
    return bool(res) if np.isscalar(res) or res.ndim == 0 else res


def u_bar_bound_check(p: SchemeParameters, tol: float = TAU_STAB) -> bool:
    """Probe of the implication: stable => |u_bar| <= 1/2."""
    if not reduced_condition(p).stable:
        return True
    return abs(2.0 * p.u * (p.s - p.s_prime)) <= 0.5 + tol
