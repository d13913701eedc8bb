"""Physical rescaling, energy bookkeeping, and analytic energy anchors.

Frozen numbers: natural-units (hbar = G = m = N = 1) ground-state values on
the (40, 4001) working grid, computed by this package and cross-checked
against the self-consistent-field route; the Gaussian self-energy and
kinetic anchors are closed forms, independent of any solver here.
"""

from __future__ import annotations

import numpy as np
import pytest

from sng.errors import InvalidArgumentError
from sng.evolution import gaussian_state
from sng.grids import RadialField, make_grid
from sng.physical import (
    HBAR,
    NEWTON_G,
    NUCLEON_MASS,
    EnergyBreakdown,
    PhysicalParams,
    _kinetic_energy,
    _self_energy_raw,
    energy_breakdown,
    gravitational_bohr_radius,
    half_max_radius,
    hamiltonian_functional,
    rescale_to_physical,
    rms_radius,
)

# ground state, natural units, (40, 4001) grid
FROZEN = {
    "e_kinetic": 0.0542562746478107,
    "e_gravity": -0.108513508437768,
    "e_total": -0.054257233789957296,
    "epsilon": -0.162770262656652,
    "e_single": -0.054256754218884005,
    "half_max_radius": 3.8882204049888958,
    "rms_radius": 4.63521365094028,
}


# --- parameters --------------------------------------------------------------

def test_natural_units_are_all_ones():
    p = PhysicalParams.natural_units()
    assert (p.mass, p.n_particles, p.hbar, p.G) == (1.0, 1.0, 1.0, 1.0)
    assert gravitational_bohr_radius(p) == 1.0


def test_params_reject_nonpositive_values():
    with pytest.raises(InvalidArgumentError):
        PhysicalParams(mass=-1.0, n_particles=1.0)
    with pytest.raises(InvalidArgumentError):
        PhysicalParams(mass=1.0, n_particles=0.0)


def test_bohr_radius_scales_as_inverse_cube_of_mass():
    p1 = PhysicalParams(mass=NUCLEON_MASS, n_particles=1.0)
    p2 = PhysicalParams(mass=2.0 * NUCLEON_MASS, n_particles=1.0)
    ratio = gravitational_bohr_radius(p1) / gravitational_bohr_radius(p2)
    assert ratio == pytest.approx(8.0, rel=1e-12)


# --- frozen ground-state numbers ---------------------------------------------

def test_frozen_natural_energies(natural_ground_profile):
    eb = energy_breakdown(natural_ground_profile)
    assert eb.e_kinetic == pytest.approx(FROZEN["e_kinetic"], rel=1e-6)
    assert eb.e_gravity == pytest.approx(FROZEN["e_gravity"], rel=1e-6)
    assert eb.e_total == pytest.approx(FROZEN["e_total"], rel=1e-6)
    assert eb.epsilon == pytest.approx(FROZEN["epsilon"], rel=1e-6)
    assert eb.e_single == pytest.approx(FROZEN["e_single"], rel=1e-6)


def test_frozen_geometry(natural_ground_profile):
    assert half_max_radius(natural_ground_profile) == pytest.approx(
        FROZEN["half_max_radius"], rel=1e-9)
    assert rms_radius(natural_ground_profile) == pytest.approx(
        FROZEN["rms_radius"], rel=1e-9)


def test_profile_is_normalized_without_renormalization(natural_ground_profile):
    assert natural_ground_profile.renormalized is False
    assert natural_ground_profile.norm == pytest.approx(1.0, abs=1e-9)


def test_virial_residual_small(natural_ground_profile):
    eb = energy_breakdown(natural_ground_profile)
    assert abs(2.0 * eb.e_kinetic / abs(eb.e_gravity) - 1.0) < 1e-4


def test_eigenvalue_routes_agree(natural_ground_profile):
    eb = energy_breakdown(natural_ground_profile)
    assert eb.epsilon == pytest.approx(1.5 * eb.e_gravity, rel=1e-12)
    assert eb.e_single == pytest.approx(eb.epsilon / 3.0, rel=1e-12)
    # the independent route: eigenvalue carried through the homology rescale
    assert natural_ground_profile.epsilon == pytest.approx(eb.epsilon, rel=1e-4)


# --- physical-unit scaling ---------------------------------------------------

def test_rescaled_lengths_scale_with_bohr_radius(ground_state):
    single = PhysicalParams(mass=NUCLEON_MASS, n_particles=1.0)
    a_g = gravitational_bohr_radius(single)
    prof = rescale_to_physical(ground_state, single)
    assert half_max_radius(prof) / a_g == pytest.approx(
        FROZEN["half_max_radius"], rel=1e-4)
    assert rms_radius(prof) / a_g == pytest.approx(FROZEN["rms_radius"], rel=1e-4)


def test_rescaled_energy_scales_with_n_squared_m_to_fifth(ground_state):
    # epsilon proportional to G^2 N^2 m^5: check both exponents by ratio
    base = PhysicalParams(mass=NUCLEON_MASS, n_particles=1.0)
    heavier = PhysicalParams(mass=2.0 * NUCLEON_MASS, n_particles=1.0)
    more = PhysicalParams(mass=NUCLEON_MASS, n_particles=3.0)
    eps = lambda p: rescale_to_physical(ground_state, p).epsilon  # noqa: E731
    assert eps(heavier) / eps(base) == pytest.approx(32.0, rel=1e-9)
    assert eps(more) / eps(base) == pytest.approx(9.0, rel=1e-9)


def test_potential_satisfies_its_own_field_equation(ground_state):
    # the stored closed-form potential must obey the same Poisson relation
    # the quadrature route uses: compare the two potentials directly
    from sng.grids import solve_radial_poisson

    p = PhysicalParams.natural_units()
    prof = rescale_to_physical(ground_state, p)
    density = prof.f.values**2
    coupling = 4.0 * np.pi * p.G * p.mass * p.n_particles
    phi_q = solve_radial_poisson(RadialField(prof.f.grid, density), coupling)
    scale = np.abs(prof.phi.values).max()
    assert np.abs(prof.phi.values - phi_q.values).max() / scale < 1e-4


# --- energy breakdown validation --------------------------------------------

def test_energy_breakdown_rejects_inconsistent_totals():
    with pytest.raises(InvalidArgumentError):
        EnergyBreakdown(e_kinetic=1.0, e_gravity=-2.0, e_total=-0.5,
                        epsilon=-3.0, e_single=-1.0)
    with pytest.raises(InvalidArgumentError):
        EnergyBreakdown(e_kinetic=-1.0, e_gravity=-2.0, e_total=-3.0,
                        epsilon=-3.0, e_single=-1.0)


# --- analytic anchors --------------------------------------------------------

def _gaussian_density(grid, sigma=1.0):
    r = grid.nodes
    return (2.0 * np.pi * sigma**2) ** -1.5 * np.exp(-r * r / (2.0 * sigma**2))


def test_self_energy_matches_gaussian_closed_form():
    # E = -G m^2 N / (2 sigma sqrt(pi)) for a unit-norm Gaussian cloud;
    # Richardson extrapolation over a 2x grid pair cancels the O(dr^2) bias
    params = PhysicalParams.natural_units()
    exact = -params.G * params.mass**2 * params.n_particles / (2.0 * np.sqrt(np.pi))
    coarse_grid, fine_grid = make_grid(16.0, 2001), make_grid(16.0, 4001)
    coarse = _self_energy_raw(_gaussian_density(coarse_grid), coarse_grid, params)
    fine = _self_energy_raw(_gaussian_density(fine_grid), fine_grid, params)
    assert abs(fine / exact - 1.0) < 1e-5
    richardson = (4.0 * fine - coarse) / 3.0
    assert abs(richardson / exact - 1.0) < 1e-8


def test_self_energy_matches_literal_double_integral():
    # O(M^2) pair sum over the 1/max(r, s) kernel on a coarse grid;
    # trapezoid weights, kink on-node; agreement limited by the kink's
    # O(dr^2) quadrature error
    params = PhysicalParams.natural_units()
    grid = make_grid(16.0, 401)
    r = grid.nodes
    density = _gaussian_density(grid)
    w = np.full(grid.n_points, grid.spacing)
    w[0] = w[-1] = grid.spacing / 2.0
    rmax = np.maximum.outer(r, r)
    rmax[0, 0] = 1.0  # weighted by r^2 = 0 either way
    src = w * r * r * density
    pair_sum = float(src @ (1.0 / rmax) @ src)
    e_double = -8.0 * np.pi**2 * params.G * params.mass**2 * params.n_particles * pair_sum
    e_green = _self_energy_raw(density, grid, params)
    assert abs(e_double / e_green - 1.0) < 5e-4


def test_kinetic_energy_matches_gaussian_closed_form():
    # E_kin = 3 hbar^2 / (8 m sigma^2) at second order in the spacing
    errs = []
    for pts in (2001, 4001):
        grid = make_grid(60.0, pts)
        psi = gaussian_state(grid, sigma=1.0).psi()
        e = _kinetic_energy(psi, grid, 1.0, 1.0)
        errs.append(abs(e / 0.375 - 1.0))
    assert errs[0] < 2e-4
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.3)


# --- homogeneity -------------------------------------------------------------

def test_hamiltonian_functional_is_degree_two(natural_ground_profile):
    from dataclasses import replace

    from sng.evolution import state_from_profile

    params = PhysicalParams.natural_units()
    state = state_from_profile(natural_ground_profile)
    base = hamiltonian_functional(state, params)
    rng = np.random.default_rng(20260822)
    for lam in (*rng.uniform(0.05, 20.0, size=4), 0.1, 2.5, 10.0):
        scaled = hamiltonian_functional(replace(state, u=lam * state.u), params)
        assert abs(scaled - lam * lam * base) <= 1e-12 * abs(base) * max(1.0, lam * lam)


def test_weak_field_limit_is_kinetic_dominated():
    # narrow packets barely feel self-gravity: for sigma = 0.01 a_g the
    # interaction term is below one percent of the kinetic term
    params = PhysicalParams.natural_units()
    grid = make_grid(0.6, 2001)
    state = gaussian_state(grid, sigma=0.01)
    h = hamiltonian_functional(state, params)
    e_kin = _kinetic_energy(state.psi(), grid, 1.0, 1.0)
    assert abs(h - e_kin) / e_kin < 0.01
