"""Multi-shell q-space grid and the separable forward/inverse transform.

The grid pairs one radial scheme with one iso-latitude angular scheme per
shell. With per-shell band limits L_1..L_N the total sample count is
sum_i L_i(L_i+1)/2, which equals the number of recoverable coefficients,
so the forward transform is a bijection on its model space. At the
recommended defaults (4 shells to b = 8000 s/mm^2, band limits 3/5/9/11)
that is 132 samples.

The coefficient set is a staircase: degree l is kept on radial orders
n < N_l, where N_l counts the shells whose band limit exceeds l. Degrees
carried by all shells go through the exact Gauss-Laguerre radial
quadrature; the rest are solved by direct collocation on the shells that
see them. Signals with energy at degree l on shells whose band limit is
<= l fall outside the model space by construction; sampling such a shell
simply cannot represent that content.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .angular import AngularScheme, ShCoefficients, forward_sht, inverse_sht, make_angular_scheme
from .radial import (
    BConvention,
    RadialScheme,
    make_radial_scheme,
    radial_basis_eval,
    radial_collocation_solve,
    radial_project,
)
from .specfun import normalized_legendre

__all__ = [
    "StaircaseIndex",
    "staircase_index",
    "MultiShellGrid",
    "build_grid",
    "SignalSamples",
    "SpfCoefficients",
    "forward_spf",
    "inverse_spf",
    "synthesize_on_grid",
]


@dataclass(frozen=True, eq=False)
class StaircaseIndex:
    """Bijection between (n, l, m) triples and linear positions.

    Entries are ordered by ascending even degree l, then order m from -l
    to l, then radial order n. Degree l appears with n < N_l, where N_l
    is the number of shells whose band limit exceeds l.
    """

    bandlimits: tuple
    entries: tuple
    position: dict = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.entries)

    def n_per_degree(self, l: int) -> int:
        return sum(1 for L in self.bandlimits if L > l)

    def shells_for_degree(self, l: int) -> tuple:
        return tuple(i for i, L in enumerate(self.bandlimits) if L > l)

    def locate(self, n: int, l: int, m: int) -> int:
        try:
            return self.position[(n, l, m)]
        except KeyError:
            raise ValueError(f"(n={n}, l={l}, m={m}) is outside the coefficient set") from None


def staircase_index(bandlimits) -> StaircaseIndex:
    """Enumerate the recoverable (n, l, m) set for per-shell band limits."""
    bandlimits = tuple(int(L) for L in bandlimits)
    if not bandlimits:
        raise ValueError("need at least one band limit")
    for L in bandlimits:
        if L < 1 or L % 2 == 0:
            raise ValueError(f"band limits must be odd and positive, got {L}")
    entries = []
    for l in range(0, max(bandlimits), 2):
        n_l = sum(1 for L in bandlimits if L > l)
        for m in range(-l, l + 1):
            entries.extend((n, l, m) for n in range(n_l))
    entries = tuple(entries)
    position = {key: pos for pos, key in enumerate(entries)}
    return StaircaseIndex(bandlimits=bandlimits, entries=entries, position=position)


@dataclass(frozen=True, eq=False)
class MultiShellGrid:
    """Joint radial and angular sampling scheme.

    Flat sample arrays are shell-major (all of shell 0, then shell 1, ...)
    and ring-major within each shell, matching the angular schemes' point
    order.
    """

    radial: RadialScheme
    angular: tuple
    index: StaircaseIndex
    shell_of: np.ndarray
    points: np.ndarray
    radii: np.ndarray
    bvalues: np.ndarray
    shell_starts: np.ndarray

    @property
    def n_shells(self) -> int:
        return len(self.angular)

    @property
    def n_samples(self) -> int:
        return len(self.radii)

    @property
    def bandlimits(self) -> tuple:
        return self.index.bandlimits

    def shell_slice(self, i: int) -> slice:
        return slice(self.shell_starts[i], self.shell_starts[i] + self.angular[i].n_points)


def build_grid(
    n_shells: int,
    b_max: float,
    bandlimits,
    convention: BConvention = BConvention(),
    ring_latitudes=None,
    ring_offsets=None,
) -> MultiShellGrid:
    """Build the multi-shell grid for given shell count and band limits.

    Band limits are assigned to shells in ascending b order. An assignment
    that decreases with b is accepted with a warning; the coefficient set
    still counts shells per degree, but pairing richer angular sampling
    with the faster-decaying inner shells is usually unintended.

    ring_latitudes and ring_offsets, when given, are per-shell sequences
    of explicit ring placements (None entries keep the built-in layout
    for that shell); they exist so a serialized scheme can be rebuilt
    exactly, custom layouts included.
    """
    bandlimits = tuple(int(L) for L in bandlimits)
    if len(bandlimits) != n_shells:
        raise ValueError(f"{n_shells} shells need {n_shells} band limits, got {len(bandlimits)}")
    index = staircase_index(bandlimits)
    if any(b > a for a, b in zip(bandlimits[1:], bandlimits)):
        warnings.warn(
            "band limits decrease with b; inner shells will carry more angular "
            "detail than outer ones",
            stacklevel=2,
        )
    if ring_latitudes is None:
        ring_latitudes = [None] * n_shells
    if ring_offsets is None:
        ring_offsets = [None] * n_shells
    if len(ring_latitudes) != n_shells or len(ring_offsets) != n_shells:
        raise ValueError("ring overrides must supply one entry (or None) per shell")
    radial = make_radial_scheme(n_shells, b_max, convention)
    cache = {}
    schemes = []
    for L, lat, off in zip(bandlimits, ring_latitudes, ring_offsets):
        if lat is None and off is None:
            if L not in cache:
                cache[L] = make_angular_scheme(L)
            schemes.append(cache[L])
        else:
            schemes.append(make_angular_scheme(L, thetas=lat, phi_offsets=off))
    schemes = tuple(schemes)
    counts = np.array([s.n_points for s in schemes])
    shell_starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    shell_of = np.repeat(np.arange(n_shells), counts)
    points = np.vstack([s.points for s in schemes])
    radii = np.repeat(radial.radii, counts)
    bvalues = np.repeat(radial.bvalues, counts)
    return MultiShellGrid(
        radial=radial,
        angular=schemes,
        index=index,
        shell_of=shell_of,
        points=points,
        radii=radii,
        bvalues=bvalues,
        shell_starts=shell_starts,
    )


@dataclass
class SignalSamples:
    """Signal values aligned one-to-one with a grid's samples."""

    values: np.ndarray
    noise_sigma: float | None = None

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values))
        if self.values.ndim != 1:
            raise ValueError("sample values must be a flat array")


@dataclass
class SpfCoefficients:
    """Coefficient table over a staircase index set.

    values[k] holds the coefficient for index.entries[k]; zeta and the
    b convention pin down the radial basis the table refers to.
    """

    index: StaircaseIndex
    zeta: float
    convention: BConvention
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.index.size,):
            raise ValueError(
                f"index has {self.index.size} entries, values have shape {self.values.shape}"
            )

    @classmethod
    def zeros(cls, index: StaircaseIndex, zeta: float, convention: BConvention):
        return cls(index, zeta, convention, np.zeros(index.size, dtype=complex))

    def get(self, n: int, l: int, m: int) -> complex:
        return complex(self.values[self.index.locate(n, l, m)])

    def set(self, n: int, l: int, m: int, value) -> None:
        self.values[self.index.locate(n, l, m)] = value

    def to_real_basis(self) -> np.ndarray:
        """Coefficients in the real spherical harmonic basis.

        The target basis is the usual real harmonics
        u_{l,m} = sqrt(2) (-1)^m Re Y_l^m for m > 0,
        u_{l,0} = Y_l^0,
        u_{l,-m} = sqrt(2) (-1)^m Im Y_l^m for m > 0,
        so for a complex table with the real-signal symmetry the exports
        are a_{n,l,m} = sqrt(2) (-1)^m Re c_{n,l,m} and
        a_{n,l,-m} = -sqrt(2) (-1)^m Im c_{n,l,m}, with a_{n,l,0} =
        Re c_{n,l,0}. Entry order matches index.entries.
        """
        out = np.empty(self.index.size)
        root2 = np.sqrt(2.0)
        for pos, (n, l, m) in enumerate(self.index.entries):
            if m == 0:
                out[pos] = self.values[pos].real
            else:
                c = self.values[self.index.locate(n, l, abs(m))]
                sign = -1.0 if abs(m) % 2 else 1.0
                out[pos] = root2 * sign * (c.real if m > 0 else -c.imag)
        return out


def forward_spf(grid: MultiShellGrid, samples, radial_mode: str = "staircase") -> SpfCoefficients:
    """Transform grid samples to coefficients, shell by shell then radially.

    Each shell goes through its exact angular transform; each (l, m) row
    then goes through the exact radial quadrature when every shell carries
    degree l, or a direct collocation solve on the shells that do.

    radial_mode "staircase" (default) returns the bijective coefficient
    set. Mode "zero_padded" instead treats degrees above a shell's band
    limit as zero-valued on that shell and runs the quadrature for every
    (l, m) over all shells, returning a uniform table of n_shells radial
    orders per degree (264 entries at the defaults). That variant is not
    a bijection but keeps the pure-quadrature radial path for every row.

    Raises
    ------
    ConditioningError
        Propagated from the angular transform or a radial collocation
        solve.
    """
    if radial_mode not in ("staircase", "zero_padded"):
        raise ValueError(f"unknown radial_mode {radial_mode!r}")
    values = samples.values if isinstance(samples, SignalSamples) else np.asarray(samples)
    if values.shape != (grid.n_samples,):
        raise ValueError(f"grid has {grid.n_samples} samples, got values of shape {values.shape}")
    per_shell = [
        forward_sht(values[grid.shell_slice(i)], grid.angular[i]) for i in range(grid.n_shells)
    ]
    radial = grid.radial
    l_max = max(grid.bandlimits)

    if radial_mode == "zero_padded":
        out_index = staircase_index((l_max,) * grid.n_shells)
    else:
        out_index = grid.index
    coeffs = SpfCoefficients.zeros(out_index, radial.zeta, radial.convention)

    for l in range(0, l_max, 2):
        shells = grid.index.shells_for_degree(l)
        for m in range(-l, l + 1):
            if radial_mode == "zero_padded":
                row = np.array(
                    [per_shell[i].get(l, m) if i in shells else 0.0 for i in range(grid.n_shells)]
                )
                solved = radial_project(row, radial)
                for n, c in enumerate(solved):
                    coeffs.set(n, l, m, c)
                continue
            row = np.array([per_shell[i].get(l, m) for i in shells])
            if len(shells) == grid.n_shells:
                solved = radial_project(row, radial)
            else:
                solved = radial_collocation_solve(row, shells, radial)
            for n, c in enumerate(solved):
                coeffs.set(n, l, m, c)
    return coeffs


def _radial_table(coeffs: SpfCoefficients, q: np.ndarray) -> np.ndarray:
    n_max = max(coeffs.index.n_per_degree(0), 1)
    return np.stack([radial_basis_eval(n, q, coeffs.zeta) for n in range(n_max)])


def inverse_spf(coeffs: SpfCoefficients, directions, q=None, b=None):
    """Evaluate the expansion at arbitrary q-space locations.

    The value is the full triple sum over the coefficient table, so it is
    defined for any radius and any unit direction, on or off the grid.
    Pass exactly one of q (radius) or b (b-value in the table's
    convention). Directions and radii broadcast: one direction with many
    radii, many directions with one radius, or matched arrays.
    """
    if (q is None) == (b is None):
        raise ValueError("pass exactly one of q or b")
    if b is not None:
        q = coeffs.convention.q_from_b(b)
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise ValueError("radii must be non-negative")
    directions = np.asarray(directions, dtype=float)
    scalar = directions.ndim == 1 and q.ndim == 0
    dirs = np.atleast_2d(directions)
    if dirs.ndim != 2 or dirs.shape[1] != 3:
        raise ValueError(f"directions must have 3 components, got shape {directions.shape}")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise ValueError("directions must be unit vectors")
    qv = np.atleast_1d(q)
    if qv.ndim != 1:
        raise ValueError("q must be a scalar or a flat array")
    if len(qv) == 1 and len(dirs) > 1:
        qv = np.full(len(dirs), qv[0])
    elif len(dirs) == 1 and len(qv) > 1:
        dirs = np.broadcast_to(dirs, (len(qv), 3))
    elif len(qv) != len(dirs):
        raise ValueError(f"{len(qv)} radii do not pair with {len(dirs)} directions")

    theta = np.arccos(np.clip(dirs[:, 2], -1.0, 1.0))
    phi = np.arctan2(dirs[:, 1], dirs[:, 0])
    l_max = max(coeffs.index.bandlimits)
    ptab = normalized_legendre(l_max - 1, np.cos(theta))
    rtab = _radial_table(coeffs, qv)

    out = np.zeros(dirs.shape[0], dtype=complex)
    for pos, (n, l, m) in enumerate(coeffs.index.entries):
        c = coeffs.values[pos]
        if c == 0:
            continue
        mu = abs(m)
        ang = ptab[l, mu, :] * np.exp(1j * m * phi)
        if m < 0 and mu % 2:
            ang = -ang
        out += c * rtab[n] * ang
    return complex(out[0]) if scalar else out


def synthesize_on_grid(coeffs: SpfCoefficients, grid: MultiShellGrid) -> np.ndarray:
    """Render coefficients as grid samples, each shell at its band limit.

    This is the sampling operator the forward transform inverts: shell i
    receives only degrees below its own band limit L_i, since the shell's
    angular scheme cannot carry more. forward_spf(grid, result) returns
    the coefficients (restricted to the grid's staircase set) to rounding.
    For tables with content above a shell's band limit (zero-padded mode,
    or a grid with lower limits), that content is dropped shell by shell,
    which is where this differs from pointwise inverse_spf evaluation.
    """
    if abs(coeffs.zeta - grid.radial.zeta) > 1e-9 * max(coeffs.zeta, grid.radial.zeta):
        raise ValueError("coefficient table and grid use different radial scales")
    out = np.empty(grid.n_samples, dtype=complex)
    for i in range(grid.n_shells):
        L = grid.bandlimits[i]
        q_i = grid.radial.radii[i]
        shell_coeffs = ShCoefficients.zeros(L)
        for l in range(0, L, 2):
            n_l = coeffs.index.n_per_degree(l)
            if n_l == 0:
                continue
            rvals = np.array(
                [radial_basis_eval(n, q_i, coeffs.zeta) for n in range(n_l)]
            )
            for m in range(-l, l + 1):
                amps = np.array([coeffs.get(n, l, m) for n in range(n_l)])
                shell_coeffs.set(l, m, amps @ rvals)
        out[grid.shell_slice(i)] = inverse_sht(shell_coeffs, grid.angular[i])
    return out
