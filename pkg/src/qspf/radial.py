"""Radial sampling scheme and the Gaussian-Laguerre radial basis.

Shells sit at q_i = sqrt(zeta * x_i), where x_i are the roots of the N-th
generalized Laguerre polynomial of order 1/2 and zeta is a scale factor
chosen so the outermost shell lands exactly on the requested maximum
b-value. With the closed-form weights below, the N-node rule integrates
f(q) q^2 dq over [0, inf) exactly whenever f is exp(-q^2/zeta) times a
polynomial in q^2/zeta of degree <= 2N-1; in particular it makes the
N-term radial basis exactly orthonormal, so N shells suffice for an exact
radial transform.

b-value conventions: "normalized" takes b = q^2 (the diffusion-time
constant is absorbed into q), "physical" takes b = 4 pi^2 tau q^2 with tau
in seconds. Shell geometry depends only on root ratios, so b_i/b_N is the
same in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError
from .specfun import laguerre_eval, laguerre_roots

__all__ = [
    "BConvention",
    "RadialScheme",
    "make_radial_scheme",
    "radial_basis_eval",
    "quadrature_weights",
    "radial_project",
    "radial_collocation_solve",
]

COLLOCATION_COND_LIMIT = 1e8


@dataclass(frozen=True)
class BConvention:
    """Mapping between b-values (s/mm^2) and q-space radii."""

    mode: str = "normalized"
    tau: float | None = None

    def __post_init__(self):
        if self.mode not in ("normalized", "physical"):
            raise ValueError(f"unknown b convention {self.mode!r}")
        if self.mode == "physical":
            if self.tau is None or self.tau <= 0:
                raise ValueError("physical convention requires tau > 0 (seconds)")

    @property
    def b_per_q2(self) -> float:
        """Constant c in b = c * q^2."""
        if self.mode == "normalized":
            return 1.0
        return 4.0 * math.pi**2 * self.tau

    def q_from_b(self, b):
        return np.sqrt(np.asarray(b, dtype=float) / self.b_per_q2)

    def b_from_q(self, q):
        return self.b_per_q2 * np.square(np.asarray(q, dtype=float))


@dataclass(frozen=True, eq=False)
class RadialScheme:
    """Immutable radial sampling scheme.

    roots are in the dimensionless variable x = q^2/zeta; radii are in
    q-units, bvalues in s/mm^2, weights in units of zeta^(3/2).
    """

    n_shells: int
    zeta: float
    roots: np.ndarray
    radii: np.ndarray
    bvalues: np.ndarray
    weights: np.ndarray
    convention: BConvention


def make_radial_scheme(
    n_shells: int, b_max: float, convention: BConvention = BConvention()
) -> RadialScheme:
    """Build the N-shell radial scheme with the outermost shell at b_max.

    zeta = q_max^2 / x_N, so shells land at b_i = b_max * x_i / x_N.

    Parameters
    ----------
    n_shells : int
        Number of shells N >= 1 (4 is the recommended default elsewhere).
    b_max : float
        b-value of the outermost shell, s/mm^2, > 0.
    convention : BConvention
        b <-> q mapping; the default absorbs the diffusion-time constant.
    """
    if n_shells < 1:
        raise ValueError(f"need at least one shell, got {n_shells}")
    if not b_max > 0:
        raise ValueError(f"b_max must be positive, got {b_max}")
    roots = laguerre_roots(n_shells, 0.5)
    q_max = float(convention.q_from_b(b_max))
    zeta = float(q_max**2 / roots[-1])
    radii = np.sqrt(zeta * roots)
    bvalues = convention.b_from_q(radii)
    weights = quadrature_weights(roots, n_shells, zeta)
    return RadialScheme(
        n_shells=n_shells,
        zeta=zeta,
        roots=roots,
        radii=radii,
        bvalues=bvalues,
        weights=weights,
        convention=convention,
    )


def radial_basis_eval(n: int, q, zeta: float):
    """Orthonormal Gaussian-Laguerre radial basis function R_n(q).

    R_n(q) = sqrt(2/zeta^1.5 * n!/Gamma(n+1.5)) exp(-q^2/(2 zeta))
             L_n^(1/2)(q^2/zeta),
    orthonormal under the measure q^2 dq on [0, inf). The factorial ratio
    is computed from log-gamma differences so relative error stays flat
    in n.
    """
    if zeta <= 0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    if n < 0:
        raise ValueError(f"radial order must be >= 0, got {n}")
    q = np.asarray(q, dtype=float)
    x = q * q / zeta
    log_norm = 0.5 * (
        math.log(2.0) - 1.5 * math.log(zeta) + math.lgamma(n + 1) - math.lgamma(n + 1.5)
    )
    out = np.exp(log_norm - 0.5 * x) * laguerre_eval(n, 0.5, x)
    return float(out) if out.ndim == 0 else out


def quadrature_weights(roots: np.ndarray, n_shells: int, zeta: float) -> np.ndarray:
    """Closed-form Gauss-Laguerre weights for the q^2 dq measure.

    w_i = 0.5 zeta^1.5 Gamma(N+1.5) x_i e^{x_i}
          / (N! (N+1)^2 [L_{N+1}^(1/2)(x_i)]^2),
    evaluated in log space. Requires ``roots`` to actually be the roots of
    L_N^(1/2); this is checked through the Newton residual |L_N(x_i)/L_N'|.
    """
    roots = np.asarray(roots, dtype=float)
    if len(roots) != n_shells:
        raise ValueError(f"expected {n_shells} roots, got {len(roots)}")
    if zeta <= 0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    resid = laguerre_eval(n_shells, 0.5, roots)
    deriv = -laguerre_eval(n_shells - 1, 1.5, roots) if n_shells > 1 else -np.ones_like(roots)
    if np.any(np.abs(resid / deriv) > 1e-8 * np.maximum(roots, 1.0)):
        raise ValueError("supplied nodes are not roots of the order-N Laguerre polynomial")
    log_w = (
        math.log(0.5)
        + 1.5 * math.log(zeta)
        + math.lgamma(n_shells + 1.5)
        + np.log(roots)
        + roots
        - math.lgamma(n_shells + 1)
        - 2.0 * math.log(n_shells + 1.0)
        - 2.0 * np.log(np.abs(laguerre_eval(n_shells + 1, 0.5, roots)))
    )
    return np.exp(log_w)


def _basis_matrix(scheme: RadialScheme, orders: int, shells) -> np.ndarray:
    """Matrix M[i, n] = R_n(q_i) over the given shell indices."""
    return np.column_stack(
        [radial_basis_eval(n, scheme.radii[shells], scheme.zeta) for n in range(orders)]
    )


def radial_project(values, scheme: RadialScheme) -> np.ndarray:
    """Exact radial projection c_n = sum_i w_i R_n(q_i) v_i, n < N.

    Exact whenever the shell values sample a signal in the span of
    {R_0 .. R_{N-1}}.
    """
    values = np.asarray(values)
    if values.shape != (scheme.n_shells,):
        raise ValueError(
            f"expected one value per shell ({scheme.n_shells}), got shape {values.shape}"
        )
    basis = _basis_matrix(scheme, scheme.n_shells, slice(None))
    return (basis * scheme.weights[:, None]).T @ values


def radial_collocation_solve(
    values, shells, scheme: RadialScheme, n_orders: int | None = None
) -> np.ndarray:
    """Direct collocation solve for radial coefficients on a shell subset.

    Solves M c = values with M[i, n] = R_n(q_i) over the chosen shells.
    Used for coefficient rows whose degree is carried by fewer than N
    shells; with all N shells it reproduces radial_project.

    Raises
    ------
    ConditioningError
        If the collocation matrix condition number exceeds 1e8.
    """
    values = np.asarray(values)
    shells = np.asarray(shells, dtype=int)
    if values.shape != shells.shape:
        raise ValueError(f"{len(shells)} shells but {values.shape} values")
    if len(shells) > scheme.n_shells:
        raise ValueError("more collocation shells than the scheme has")
    if n_orders is None:
        n_orders = len(shells)
    if n_orders != len(shells):
        raise ValueError("collocation system must be square: one order per shell")
    matrix = _basis_matrix(scheme, n_orders, shells)
    cond = np.linalg.cond(matrix)
    if not cond < COLLOCATION_COND_LIMIT:
        raise ConditioningError("radial collocation matrix is ill-conditioned", cond)
    return np.linalg.solve(matrix, values)
