"""Shooting solver for the dimensionless universal bound-state system.

The pair of radial ODEs

    f'' + (2/rho) f' = g f,      g'' + (2/rho) g' = f^2,

with f(0)=1, f'(0)=0, g(0)=gamma0, g'(0)=0, has square-integrable solutions
only for a discrete set of central values gamma0(n) < 0, labelled by the
node count n of f.  This module integrates the initial-value problem
outward with fixed-step RK4 (series start at the origin), classifies
trajectories by node count and divergence direction, brackets eigenvalues
by scanning gamma0, and bisects to convergence.  Converged trajectories are
clamped at the break of the exponential tail and extended analytically so
the moment integrals gamma1 = int f^2 rho^2 drho and
eps_star = (3/gamma1) int f^2 g rho^2 drho converge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    InvalidBracketError,
    WrongStateError,
)
from .grids import RadialField, RadialGrid, integrate_radial, make_grid

__all__ = [
    "DEFAULT_RHO_MAX",
    "DEFAULT_POINTS",
    "DEFAULT_TOL",
    "DEFAULT_CAP",
    "ShootOutcome",
    "UniversalSolution",
    "default_grid",
    "integrate_universal",
    "scan_brackets",
    "find_bracket",
    "shoot_gamma0",
]

DEFAULT_RHO_MAX = 40.0
DEFAULT_POINTS = 8001
DEFAULT_TOL = 1e-10
DEFAULT_CAP = 1e3

# A trajectory extremum below this amplitude is tail residue, not a lobe.
_LOBE_FLOOR = 1e-2


def default_grid() -> RadialGrid:
    return make_grid(DEFAULT_RHO_MAX, DEFAULT_POINTS)


@dataclass(frozen=True)
class ShootOutcome:
    """Result of one outward integration at fixed gamma0.

    ``trajectory`` holds (f, g) on the full grid; samples beyond
    ``valid_points`` repeat the last computed value and carry no information.
    ``derivs`` are the raw RK4 slope samples (f', g'), same validity window.
    """

    gamma0: float
    classification: str  # converged | diverged_up | diverged_down | max_radius_reached
    node_count: int
    trajectory: tuple[RadialField, RadialField]
    blowup_radius: Optional[float]
    valid_points: int
    derivs: tuple[np.ndarray, np.ndarray] = field(repr=False)

    @property
    def label(self) -> tuple[int, str]:
        """Bracket label: node count first, divergence direction as tie-break."""
        return (self.node_count, self.classification)


@dataclass(frozen=True)
class UniversalSolution:
    """A converged bound state of the universal system.

    ``f_star`` is clamped at ``clamp_index`` and continued by the fitted
    exponential tail; ``g_star`` is continued by its mass-function quadrature.
    ``clamp_index`` is None for solutions reconstructed from serialized data.
    """

    n: int
    gamma0: float
    gamma1: float
    epsilon_star: float
    f_star: RadialField
    g_star: RadialField
    node_count: int
    bracket_width: float
    grid: RadialGrid
    clamp_index: Optional[int] = None

    def __post_init__(self):
        if self.node_count != self.n:
            raise WrongStateError(
                f"trajectory has {self.node_count} nodes, wanted n={self.n}"
            )
        f = self.f_star.values
        if f[0] != 1.0:
            raise WrongStateError(f"f*(0) must be exactly 1, got {f[0]!r}")
        if not self.gamma1 > 0:
            raise WrongStateError(f"gamma1 must be positive, got {self.gamma1}")
        if abs(self.g_star.values[0] - self.gamma0) > max(self.bracket_width, 1e-12):
            raise WrongStateError("g*(0) disagrees with gamma0 beyond bracket width")
        tail = np.abs(f[-(self.grid.n_points // 10):])
        if not np.all(np.diff(tail) < 0.0):
            raise WrongStateError("|f*| must decay strictly over the final 10% of the grid")


# ---------------------------------------------------------------------------
# outward integration
# ---------------------------------------------------------------------------

def integrate_universal(gamma0: float, grid: RadialGrid | None = None,
                        cap: float = DEFAULT_CAP) -> ShootOutcome:
    """Integrate the universal system outward from the origin at one gamma0.

    Fixed-step RK4 on (f, f', g, g').  The first step leaves rho=0 on the
    series f = 1 + gamma0 rho^2/6, g = gamma0 + rho^2/6 whose coefficients
    are forced by the ODEs; integration stops at rho_max or as soon as
    |f| > cap, whichever comes first.  Divergence is a classification, not
    an error.

    Returns
    -------
    ShootOutcome
        classification is ``diverged_up``/``diverged_down`` when |f| crossed
        the cap, ``converged`` when the trajectory reached rho_max with
        |f(rho_max)| < 1e-6 still shrinking, ``max_radius_reached`` otherwise.
    """
    if grid is None:
        grid = default_grid()
    if not np.isfinite(gamma0):
        raise InvalidArgumentError(f"gamma0 must be finite, got {gamma0}")
    if not cap > 1.0:
        raise InvalidArgumentError(f"cap must exceed 1, got {cap}")

    n = grid.n_points
    h = grid.spacing
    f = np.empty(n)
    fp = np.empty(n)
    g = np.empty(n)
    gp = np.empty(n)
    f[0], fp[0], g[0], gp[0] = 1.0, 0.0, float(gamma0), 0.0
    f[1] = 1.0 + gamma0 * h * h / 6.0
    fp[1] = gamma0 * h / 3.0
    g[1] = gamma0 + h * h / 6.0
    gp[1] = h / 3.0

    yf, yfp, yg, ygp = f[1], fp[1], g[1], gp[1]
    rho = h
    valid = n
    classification = None
    blowup = None
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(1, n - 1):
        # RK4 stage derivatives for y' = (f', g f - 2f'/r, g', f^2 - 2g'/r)
        r0 = rho
        a1 = yfp
        b1 = yg * yf - 2.0 * yfp / r0
        c1 = ygp
        d1 = yf * yf - 2.0 * ygp / r0

        rm = rho + half
        f2 = yf + half * a1
        fp2 = yfp + half * b1
        g2 = yg + half * c1
        gp2 = ygp + half * d1
        a2 = fp2
        b2 = g2 * f2 - 2.0 * fp2 / rm
        c2 = gp2
        d2 = f2 * f2 - 2.0 * gp2 / rm

        f3 = yf + half * a2
        fp3 = yfp + half * b2
        g3 = yg + half * c2
        gp3 = ygp + half * d2
        a3 = fp3
        b3 = g3 * f3 - 2.0 * fp3 / rm
        c3 = gp3
        d3 = f3 * f3 - 2.0 * gp3 / rm

        r1 = rho + h
        f4 = yf + h * a3
        fp4 = yfp + h * b3
        g4 = yg + h * c3
        gp4 = ygp + h * d3
        a4 = fp4
        b4 = g4 * f4 - 2.0 * fp4 / r1
        c4 = gp4
        d4 = f4 * f4 - 2.0 * gp4 / r1

        yf += sixth * (a1 + 2.0 * (a2 + a3) + a4)
        yfp += sixth * (b1 + 2.0 * (b2 + b3) + b4)
        yg += sixth * (c1 + 2.0 * (c2 + c3) + c4)
        ygp += sixth * (d1 + 2.0 * (d2 + d3) + d4)
        rho = r1
        f[i + 1], fp[i + 1], g[i + 1], gp[i + 1] = yf, yfp, yg, ygp
        if abs(yf) > cap:
            valid = i + 2
            classification = "diverged_up" if yf > 0.0 else "diverged_down"
            blowup = rho
            break

    if classification is None:
        tail_shrinking = abs(f[-1]) < 1e-6 and abs(f[-1]) <= abs(f[-2])
        classification = "converged" if tail_shrinking else "max_radius_reached"
    if valid < n:
        f[valid:] = f[valid - 1]
        fp[valid:] = fp[valid - 1]
        g[valid:] = g[valid - 1]
        gp[valid:] = gp[valid - 1]

    nodes = int(np.count_nonzero(f[: valid - 1] * f[1:valid] < 0.0))
    return ShootOutcome(
        gamma0=float(gamma0),
        classification=classification,
        node_count=nodes,
        trajectory=(RadialField(grid, f), RadialField(grid, g)),
        blowup_radius=blowup,
        valid_points=valid,
        derivs=(fp, gp),
    )


# ---------------------------------------------------------------------------
# bracketing
# ---------------------------------------------------------------------------

def scan_brackets(gamma0_range: tuple[float, float] = (-5.0, 0.0),
                  steps: int = 101,
                  grid: RadialGrid | None = None,
                  cap: float = DEFAULT_CAP) -> list[tuple[int, tuple[float, float]]]:
    """Locate candidate eigenvalue brackets on a uniform gamma0 lattice.

    Every pair of consecutive lattice points whose (node count, divergence)
    labels differ is returned as ``(candidate_n, (lo, hi))`` with candidate_n
    the smaller of the two node counts.  Empty list when no transition is
    found (e.g. any scan over gamma0 >= 0, where g* > 0 forbids decay).
    """
    lo, hi = gamma0_range
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise InvalidArgumentError(f"need lo < hi, got {gamma0_range}")
    if steps < 2:
        raise InvalidArgumentError(f"need at least 2 scan steps, got {steps}")
    if grid is None:
        grid = default_grid()
    lattice = np.linspace(lo, hi, steps)
    labels = [integrate_universal(g0, grid, cap).label for g0 in lattice]
    out = []
    for i in range(steps - 1):
        if labels[i] != labels[i + 1]:
            candidate = min(labels[i][0], labels[i + 1][0])
            out.append((candidate, (float(lattice[i]), float(lattice[i + 1]))))
    return out


def find_bracket(n: int, grid: RadialGrid | None = None, cap: float = DEFAULT_CAP,
                 gamma0_range: tuple[float, float] = (-5.0, 0.0),
                 steps: int = 101) -> tuple[float, float]:
    """Scan for a bracket labelled with the requested n, refining twice
    before giving up with an invalid-bracket error."""
    attempts = [
        (gamma0_range, steps),
        (gamma0_range, 4 * steps),
        ((min(gamma0_range[0] * 2.0, -10.0), gamma0_range[1]), 8 * steps),
    ]
    for rng, st in attempts:
        for candidate, bracket in scan_brackets(rng, st, grid, cap):
            if candidate == n:
                return bracket
    raise InvalidBracketError(
        f"no bracket with node count {n} found scanning gamma0 in {gamma0_range}; "
        "widen the scan range or enlarge rho_max"
    )


# ---------------------------------------------------------------------------
# bisection + tail clamp
# ---------------------------------------------------------------------------

def _clamp_point(f: np.ndarray, valid: int) -> tuple[int, int]:
    """Index where the exponential tail breaks.

    Returns (last_lobe_extremum, clamp_index).  The clamp sits at the last
    sample that still carries the final lobe's sign: near-eigenvalue
    trajectories often cross zero spuriously once more just before
    diverging, and that crossing must stay out of both the stored tail and
    the node count.
    """
    slopes = np.diff(f[:valid])
    turns = np.where(slopes[:-1] * slopes[1:] < 0.0)[0] + 1
    lobes = turns[np.abs(f[turns]) >= _LOBE_FLOOR] if turns.size else turns
    e = int(lobes[-1]) if lobes.size else 0
    seg = f[e:valid]
    crossings = np.where(seg[:-1] * seg[1:] < 0.0)[0]
    if crossings.size:
        c = e + int(crossings[0])
    else:
        c = e + int(np.argmin(np.abs(seg)))
    while c > 0 and f[c] == 0.0:
        c -= 1
    return e, c


def _tail_decay_rate(rho: np.ndarray, f: np.ndarray, e: int, c: int,
                     g_at_clamp: float) -> float:
    """Exponential rate of the observed tail, from a log-linear fit of
    |f|*rho over the clean mid-decay decades; falls back to sqrt(g(clamp))
    when the window is degenerate."""
    lobe_amp = abs(f[e]) if e > 0 else 1.0
    mag = np.abs(f[e:c + 1])
    window = np.nonzero((mag >= 10.0 * abs(f[c])) & (mag <= 0.1 * lobe_amp))[0]
    if window.size >= 8:
        idx = e + window
        slope = np.polyfit(rho[idx], np.log(np.abs(f[idx]) * rho[idx]), 1)[0]
        if slope < 0.0:
            return -float(slope)
    return float(np.sqrt(max(g_at_clamp, 1e-12)))


def shoot_gamma0(n: int, bracket: tuple[float, float],
                 grid: RadialGrid | None = None,
                 tol: float = DEFAULT_TOL,
                 cap: float = DEFAULT_CAP) -> UniversalSolution:
    """Bisect gamma0 inside ``bracket`` until the width falls below ``tol``
    and return the clamped mid-bracket trajectory as a UniversalSolution.

    The bracket ends must classify differently (different node counts, or
    the same count with opposite divergence).  After convergence the
    trajectory is truncated where its exponential decay breaks; beyond the
    clamp f* continues on the fitted exponential (times 1/rho) and g*
    continues by integrating its own ODE with the clamped f* as source,
    starting from the enclosed moment rho_c^2 g'(rho_c).

    Raises
    ------
    InvalidBracketError
        If both bracket ends carry the same label.
    WrongStateError
        If the converged trajectory has the wrong node count, or its tail
        sits where g* <= 0 (no exponentially decaying regime inside the
        grid; enlarge rho_max).
    ConvergenceError
        If bisection exhausts floating point resolution before reaching tol.
    """
    if n < 0 or int(n) != n:
        raise InvalidArgumentError(f"n must be a non-negative integer, got {n}")
    if not tol > 0.0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    if grid is None:
        grid = default_grid()
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise InvalidArgumentError(f"need bracket lo < hi, got {bracket}")

    label_lo = integrate_universal(lo, grid, cap).label
    if label_lo == integrate_universal(hi, grid, cap).label:
        raise InvalidBracketError(
            f"bracket ends {bracket} classify identically as {label_lo}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            raise ConvergenceError(
                f"bisection exhausted float resolution at width {hi - lo:.3e} > tol {tol:.3e}"
            )
        if integrate_universal(mid, grid, cap).label == label_lo:
            lo = mid
        else:
            hi = mid

    gamma0 = 0.5 * (lo + hi)
    outcome = integrate_universal(gamma0, grid, cap)
    f = outcome.trajectory[0].values.copy()
    g = outcome.trajectory[1].values.copy()
    fp, gp = outcome.derivs
    rho = grid.nodes
    e, c = _clamp_point(f, outcome.valid_points)

    if g[c] <= 0.0:
        raise WrongStateError(
            f"tail clamp at rho={rho[c]:.3f} where g*={g[c]:.3f} <= 0: the "
            "trajectory is still oscillatory there; enlarge rho_max"
        )
    nodes = int(np.count_nonzero(f[:c] * f[1:c + 1] < 0.0))
    if nodes != n:
        raise WrongStateError(
            f"converged trajectory has {nodes} nodes, wanted n={n}; rebracket"
        )

    k = _tail_decay_rate(rho, f, e, c, g[c])
    if c + 1 < grid.n_points:
        tail = rho[c + 1:]
        f[c + 1:] = f[c] * (rho[c] / tail) * np.exp(-k * (tail - rho[c]))
        sub = rho[c:]
        moment = rho[c] ** 2 * gp[c] + cumulative_trapezoid(sub ** 2 * f[c:] ** 2, sub, initial=0.0)
        g[c:] = g[c] + cumulative_trapezoid(moment / sub ** 2, sub, initial=0.0)

    f_star = RadialField(grid, f)
    g_star = RadialField(grid, g)
    f_sq = RadialField(grid, f * f)
    gamma1 = integrate_radial(f_sq)
    epsilon_star = 3.0 / gamma1 * integrate_radial(RadialField(grid, f * f * g))
    return UniversalSolution(
        n=n,
        gamma0=gamma0,
        gamma1=gamma1,
        epsilon_star=epsilon_star,
        f_star=f_star,
        g_star=g_star,
        node_count=nodes,
        bracket_width=hi - lo,
        grid=grid,
        clamp_index=c,
    )
