"""Toy potentials, relaxation, and finite-difference Hessians."""

import json

import numpy as np
import pytest

from spescreen.potential import (
    ExternalPotential,
    HarmonicBondPotential,
    LennardJonesPotential,
    hessian_finite_difference,
    max_force_norm,
    relax,
)
from spescreen.structure import AtomicStructure

from conftest import dimer

AR_LJ = LennardJonesPotential({("Ar", "Ar"): (0.0104, 3.4)})


def fd_forces(structure, potential, h=1e-5):
    """Central-difference forces as an oracle for analytic ones."""
    base = structure.positions.copy()
    out = np.zeros_like(base)
    work = structure.copy()
    for i in range(len(structure)):
        for k in range(3):
            work.positions = base.copy()
            work.positions[i, k] += h
            ep = potential.energy(work)
            work.positions = base.copy()
            work.positions[i, k] -= h
            em = potential.energy(work)
            out[i, k] = -(ep - em) / (2 * h)
    return out


class TestLennardJones:
    def test_minimum_location(self):
        r_min = 2 ** (1 / 6) * 3.4
        s = dimer(r=r_min)
        assert AR_LJ.energy(s) == pytest.approx(-0.0104, rel=1e-12)
        assert max_force_norm(AR_LJ.forces(s)) < 1e-10

    def test_forces_match_fd(self):
        rng = np.random.default_rng(0)
        s = AtomicStructure(
            elements=["Ar"] * 5,
            positions=rng.uniform(0, 6, size=(5, 3)),
        )
        assert np.allclose(AR_LJ.forces(s), fd_forces(s, AR_LJ), atol=1e-7)

    def test_periodic_minimum_image(self):
        s = AtomicStructure(
            elements=["Ar", "Ar"],
            positions=np.array([[0.5, 0, 0], [11.5, 0, 0]]),
            cell=np.eye(3) * 12.0, pbc=(True, True, True),
        )
        near = dimer(r=1.0)
        assert AR_LJ.energy(s) == pytest.approx(AR_LJ.energy(near), rel=1e-10)

    def test_missing_pair(self):
        s = dimer(element="Ne", r=3.0)
        with pytest.raises(KeyError):
            AR_LJ.energy(s)


class TestHarmonicBond:
    def test_energy_and_forces(self):
        pot = HarmonicBondPotential([(0, 1, 5.0, 1.0)])
        s = AtomicStructure(
            elements=["C", "C"],
            positions=np.array([[0.0, 0, 0], [1.3, 0, 0]]),
        )
        assert pot.energy(s) == pytest.approx(0.5 * 5.0 * 0.3**2)
        assert np.allclose(pot.forces(s), fd_forces(s, pot), atol=1e-7)

    def test_repulsion(self):
        pot = HarmonicBondPotential([(0, 1, 5.0, 1.0)], eps_rep=0.01,
                                    sigma_rep=2.0)
        s = AtomicStructure(
            elements=["C", "C", "C"],
            positions=np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 2.5, 0]]),
        )
        assert pot.energy(s) > 0.0
        assert np.allclose(pot.forces(s), fd_forces(s, pot), atol=1e-7)


class TestRelax:
    def test_dimer_to_minimum(self):
        result = relax(dimer(r=3.0), AR_LJ, fmax=1e-6)
        assert result.converged
        r = np.linalg.norm(
            result.structure.positions[1] - result.structure.positions[0]
        )
        assert r == pytest.approx(2 ** (1 / 6) * 3.4, rel=1e-6)

    def test_energies_non_increasing(self):
        result = relax(dimer(r=3.0), AR_LJ, fmax=1e-4)
        assert all(
            b <= a + 1e-12 for a, b in zip(result.energies, result.energies[1:])
        )

    def test_cluster_converges(self):
        rng = np.random.default_rng(4)
        s = AtomicStructure(
            elements=["Ar"] * 6,
            positions=rng.uniform(0, 5, size=(6, 3)) * 1.4,
        )
        result = relax(s, AR_LJ, fmax=0.01, max_steps=2000)
        assert result.converged
        assert result.max_force <= 0.01

    def test_input_untouched(self):
        s = dimer(r=3.0)
        before = s.positions.copy()
        relax(s, AR_LJ, fmax=1e-4)
        assert np.array_equal(s.positions, before)


class TestHessian:
    def test_symmetric(self):
        s = dimer(r=3.6)
        K = hessian_finite_difference(s, AR_LJ)
        assert np.allclose(K, K.T)

    def test_harmonic_exact(self):
        pot = HarmonicBondPotential([(0, 1, 5.0, 1.0)])
        s = AtomicStructure(
            elements=["C", "C"],
            positions=np.array([[0.0, 0, 0], [1.0, 0, 0]]),
        )
        K = hessian_finite_difference(s, pot, h=1e-3)
        # at equilibrium the xx block is the bond constant
        assert K[0, 0] == pytest.approx(5.0, rel=1e-5)
        assert K[0, 3] == pytest.approx(-5.0, rel=1e-5)


class TestExternalPotential:
    def test_replay(self, tmp_path):
        payload = {
            "n_atoms": 2,
            "energy_eV": -1.25,
            "forces_eV_per_A": [[0.0, 0.0, 0.1], [0.0, 0.0, -0.1]],
            "hessian_eV_per_A2": np.eye(6).tolist(),
        }
        p = tmp_path / "sp.json"
        p.write_text(json.dumps(payload))
        pot = ExternalPotential(p)
        s = dimer(r=3.0)
        assert pot.energy(s) == -1.25
        assert pot.forces(s)[0, 2] == 0.1
        assert pot.hessian(s).shape == (6, 6)

    def test_shape_validation(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({
            "n_atoms": 2, "energy_eV": 0.0,
            "forces_eV_per_A": [[0.0, 0.0, 0.0]],
        }))
        with pytest.raises(ValueError):
            ExternalPotential(p)
