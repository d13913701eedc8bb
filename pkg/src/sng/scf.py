"""Self-consistent-field oracle: an independent route to the bound states.

Instead of shooting on the universal system, iterate the physical fixed
point directly on u(r) = r f(r):

    -(hbar^2/2m) u'' + m Phi u = eps u,      lap Phi = 4 pi G m N f^2,

alternating a frozen-potential tridiagonal eigensolve (selecting the n-th
eigenpair) with a Poisson update of the potential, under damped mixing.
The converged state maps back to the universal normalization through
f*(0) = 1, giving gamma0 = (2m/(hbar beta)^... see universal_from_scf) for
direct comparison with the shooting route.  Nothing here shares algorithmic
structure with the shooting module beyond the Poisson quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, InvalidArgumentError
from .grids import RadialField, RadialGrid, solve_radial_poisson
from .physical import PhysicalParams, _line_integral, _psi_from_u, gravitational_bohr_radius

__all__ = ["SCFResult", "ScfUniversal", "scf_solve", "universal_from_scf"]


@dataclass(frozen=True)
class SCFResult:
    """Converged fixed point of the eigensolve/Poisson iteration."""

    n: int
    params: PhysicalParams
    f: RadialField          # unit-norm radial wavefunction
    phi: RadialField        # potential sourced by f^2
    epsilon: float          # n-th eigenvalue in that potential
    iterations: int
    converged: bool


@dataclass(frozen=True)
class ScfUniversal:
    """SCF results converted to the universal normalization."""

    gamma0: float
    beta: float
    gamma1: float
    epsilon_star: float


def _normalized_f(u: np.ndarray, grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    norm = 4.0 * np.pi * _line_integral(u * u, grid)
    u = u / np.sqrt(norm)
    return u, _psi_from_u(u, grid).real


def scf_solve(n: int, grid: RadialGrid, params: PhysicalParams,
              mix: float = 0.5, tol: float = 1e-10, max_iter: int = 400,
              sigma0: float | None = None) -> SCFResult:
    """Iterate eigensolve + Poisson update to the n-th bound state.

    Parameters
    ----------
    n : int
        Radial quantum number (eigenvalue index in the frozen potential).
    grid : RadialGrid
        Physical grid; must extend well past the state's support.
    params : PhysicalParams
        Mass, particle number and constants.
    mix : float
        Damping of the potential update, 0 < mix <= 1.
    tol : float
        Relative eigenvalue stall threshold; the potential must also settle
        to 100*tol relative.
    sigma0 : float, optional
        Width of the normalized Gaussian start (default rho_max/12).

    Raises
    ------
    ConvergenceError
        If the fixed point is not reached within max_iter sweeps.
    """
    if n < 0 or int(n) != n:
        raise InvalidArgumentError(f"n must be a non-negative integer, got {n}")
    if not 0.0 < mix <= 1.0:
        raise InvalidArgumentError(f"mix must lie in (0, 1], got {mix}")
    r = grid.nodes
    dr = grid.spacing
    m, hbar = params.mass, params.hbar
    coupling = 4.0 * np.pi * params.G * m * params.n_particles

    sigma = sigma0 if sigma0 is not None else grid.rho_max / 12.0
    f = np.exp(-r * r / (2.0 * sigma * sigma))
    f /= np.sqrt(4.0 * np.pi * _line_integral(f * f * r * r, grid))

    kin_diag = hbar**2 / (m * dr * dr)
    kin_off = np.full(grid.n_points - 3, -hbar**2 / (2.0 * m * dr * dr))
    phi_mix = None
    eps_prev = None
    u = np.zeros(grid.n_points)
    eps = np.nan
    for it in range(1, max_iter + 1):
        phi_new = solve_radial_poisson(RadialField(grid, f * f), coupling).values
        phi_mix = phi_new if phi_mix is None else (1.0 - mix) * phi_mix + mix * phi_new
        w, v = eigh_tridiagonal(kin_diag + m * phi_mix[1:-1], kin_off,
                                select="i", select_range=(n, n))
        eps = float(w[0])
        u[1:-1] = v[:, 0]
        lead = int(np.argmax(np.abs(u) > 1e-3 * np.max(np.abs(u))))
        if u[lead] < 0.0:
            u = -u
        u, f = _normalized_f(u, grid)
        dphi = np.max(np.abs(phi_mix - phi_new)) / np.max(np.abs(phi_new))
        if (eps_prev is not None
                and abs(eps - eps_prev) <= tol * abs(eps)
                and dphi <= 100.0 * tol):
            break
        eps_prev = eps
    else:
        raise ConvergenceError(
            f"SCF did not settle in {max_iter} sweeps (eigenvalue {eps:.6e})"
        )

    # one polishing eigensolve in the unmixed potential of the converged density
    phi_final = solve_radial_poisson(RadialField(grid, f * f), coupling).values
    w, v = eigh_tridiagonal(kin_diag + m * phi_final[1:-1], kin_off,
                            select="i", select_range=(n, n))
    eps = float(w[0])
    u = np.zeros(grid.n_points)
    u[1:-1] = v[:, 0]
    lead = int(np.argmax(np.abs(u) > 1e-3 * np.max(np.abs(u))))
    if u[lead] < 0.0:
        u = -u
    u, f = _normalized_f(u, grid)
    return SCFResult(
        n=n,
        params=params,
        f=RadialField(grid, f),
        phi=RadialField(grid, phi_final),
        epsilon=eps,
        iterations=it,
        converged=True,
    )


def universal_from_scf(result: SCFResult) -> ScfUniversal:
    """Convert a converged SCF state to the universal normalization.

    The amplitude mapping f(r) = f(0) f*(beta r) with f*(0) = 1 and unit
    norm fixes beta^4 = 8 pi f(0)^2 / a_g; the central value follows from
    the radial equation at the origin:
    gamma0 = (2m/(hbar^2 beta^2)) (m Phi(0) - eps).
    """
    p = result.params
    a_g = gravitational_bohr_radius(p)
    f0 = float(result.f.values[0])
    beta = (8.0 * np.pi * f0 * f0 / a_g) ** 0.25
    gamma0 = 2.0 * p.mass * (p.mass * float(result.phi.values[0]) - result.epsilon) / (
        p.hbar**2 * beta**2
    )
    gamma1 = 2.0 / (beta * a_g)
    epsilon_star = result.epsilon * gamma1**2 * p.hbar**2 / (
        2.0 * p.G**2 * p.n_particles**2 * p.mass**5
    )
    return ScfUniversal(gamma0=gamma0, beta=beta, gamma1=gamma1, epsilon_star=epsilon_star)
