"""Energy/force providers, quasi-Newton relaxation, finite-difference Hessians.

Shipped providers: a harmonic-bond + pair-repulsion toy potential, a
Lennard-Jones pair potential, and an adapter that replays externally
computed energies/forces/Hessians from a JSON file. All providers are
stateless: energy(structure) -> eV, forces(structure) -> (N, 3) eV/A.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .structure import AtomicStructure


def _pair_key(e1, e2):
    return tuple(sorted((e1, e2)))


def _min_image_vectors(structure, deltas):
    """Apply the minimum-image convention to displacement vectors."""
    if structure.cell is None or not any(structure.pbc):
        return deltas
    cell = structure.cell
    inv = np.linalg.inv(cell)
    frac = deltas @ inv
    frac -= np.round(frac)
    best = frac @ cell
    # 27-image fallback for skewed cells where rounding is not exact MIC
    shifts = np.array([
        a * cell[0] + b * cell[1] + c * cell[2]
        for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1)
    ])
    cand = best[:, None, :] + shifts[None, :, :]
    idx = np.argmin((cand ** 2).sum(axis=2), axis=1)
    return cand[np.arange(len(best)), idx]


class LennardJonesPotential:
    """Pairwise 4*eps*((sigma/r)^12 - (sigma/r)^6) with per-element-pair params."""

    def __init__(self, params):
        # params: {("C","C"): (eps_eV, sigma_A), ...}
        self.params = {_pair_key(*k): tuple(v) for k, v in params.items()}
        for eps, sigma in self.params.values():
            if eps <= 0 or sigma <= 0:
                raise ValueError("LJ parameters must be positive")

    def _pair_params(self, e1, e2):
        try:
            return self.params[_pair_key(e1, e2)]
        except KeyError:
            raise KeyError(f"missing LJ parameters for pair {e1}-{e2}") from None

    def _pairs(self, structure):
        n = len(structure)
        ii, jj = np.triu_indices(n, k=1)
        deltas = structure.positions[jj] - structure.positions[ii]
        deltas = _min_image_vectors(structure, deltas)
        return ii, jj, deltas

    def energy(self, structure) -> float:
        ii, jj, deltas = self._pairs(structure)
        r = np.linalg.norm(deltas, axis=1)
        e = 0.0
        for a, b, d in zip(ii, jj, r):
            eps, sigma = self._pair_params(structure.elements[a], structure.elements[b])
            sr6 = (sigma / d) ** 6
            e += 4.0 * eps * (sr6 * sr6 - sr6)
        return float(e)

    def forces(self, structure) -> np.ndarray:
        ii, jj, deltas = self._pairs(structure)
        r = np.linalg.norm(deltas, axis=1)
        f = np.zeros_like(structure.positions)
        for a, b, d, vec in zip(ii, jj, r, deltas):
            eps, sigma = self._pair_params(structure.elements[a], structure.elements[b])
            sr6 = (sigma / d) ** 6
            # dE/dr = 4 eps (-12 sr12 + 6 sr6)/r
            dedr = 4.0 * eps * (-12.0 * sr6 * sr6 + 6.0 * sr6) / d
            unit = vec / d
            f[a] += dedr * unit
            f[b] -= dedr * unit
        return f


@dataclass
class HarmonicBond:
    i: int
    j: int
    k: float   # eV/A^2
    r0: float  # A


class HarmonicBondPotential:
    """Explicit harmonic bonds plus an optional soft r^-12 pair repulsion.

    The repulsion acts between all non-bonded pairs with strength
    eps_rep * (sigma_rep / r)^12 and keeps unbonded fragments apart.
    """

    def __init__(self, bonds, eps_rep: float = 0.0, sigma_rep: float = 1.0):
        self.bonds = [b if isinstance(b, HarmonicBond) else HarmonicBond(*b)
                      for b in bonds]
        for b in self.bonds:
            if b.k <= 0 or b.r0 <= 0:
                raise ValueError("bond parameters must be positive")
        if eps_rep < 0 or sigma_rep <= 0:
            raise ValueError("repulsion parameters must be non-negative/positive")
        self.eps_rep = eps_rep
        self.sigma_rep = sigma_rep
        self._bonded = {(min(b.i, b.j), max(b.i, b.j)) for b in self.bonds}

    def _delta(self, structure, i, j):
        d = structure.positions[j] - structure.positions[i]
        return _min_image_vectors(structure, d[None, :])[0]

    def energy(self, structure) -> float:
        e = 0.0
        for b in self.bonds:
            r = np.linalg.norm(self._delta(structure, b.i, b.j))
            e += 0.5 * b.k * (r - b.r0) ** 2
        if self.eps_rep > 0:
            n = len(structure)
            for i in range(n):
                for j in range(i + 1, n):
                    if (i, j) in self._bonded:
                        continue
                    r = np.linalg.norm(self._delta(structure, i, j))
                    e += self.eps_rep * (self.sigma_rep / r) ** 12
        return float(e)

    def forces(self, structure) -> np.ndarray:
        f = np.zeros_like(structure.positions)
        for b in self.bonds:
            vec = self._delta(structure, b.i, b.j)
            r = np.linalg.norm(vec)
            dedr = b.k * (r - b.r0)
            unit = vec / r
            f[b.i] += dedr * unit
            f[b.j] -= dedr * unit
        if self.eps_rep > 0:
            n = len(structure)
            for i in range(n):
                for j in range(i + 1, n):
                    if (i, j) in self._bonded:
                        continue
                    vec = self._delta(structure, i, j)
                    r = np.linalg.norm(vec)
                    dedr = -12.0 * self.eps_rep * (self.sigma_rep / r) ** 12 / r
                    unit = vec / r
                    f[i] += dedr * unit
                    f[j] -= dedr * unit
        return f


class ExternalPotential:
    """Replay adapter for externally computed single-point data.

    File schema (JSON): {"n_atoms": N, "energy_eV": float,
    "forces_eV_per_A": N x 3, "hessian_eV_per_A2": 3N x 3N (optional)}.
    """

    def __init__(self, path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        self.n_atoms = int(data["n_atoms"])
        self._energy = float(data["energy_eV"])
        self._forces = np.asarray(data["forces_eV_per_A"], dtype=float)
        if self._forces.shape != (self.n_atoms, 3):
            raise ValueError(
                f"forces shape {self._forces.shape} does not match "
                f"n_atoms={self.n_atoms}"
            )
        self._hessian = None
        if data.get("hessian_eV_per_A2") is not None:
            self._hessian = np.asarray(data["hessian_eV_per_A2"], dtype=float)
            if self._hessian.shape != (3 * self.n_atoms, 3 * self.n_atoms):
                raise ValueError("hessian shape does not match 3N x 3N")

    def _check(self, structure):
        if len(structure) != self.n_atoms:
            raise ValueError(
                f"structure has {len(structure)} atoms, file has {self.n_atoms}"
            )

    def energy(self, structure) -> float:
        self._check(structure)
        return self._energy

    def forces(self, structure) -> np.ndarray:
        self._check(structure)
        return self._forces.copy()

    def hessian(self, structure) -> np.ndarray:
        self._check(structure)
        if self._hessian is None:
            raise ValueError("external file carries no Hessian")
        return self._hessian.copy()


# --- relaxation ------------------------------------------------------------

@dataclass
class RelaxationResult:
    structure: AtomicStructure
    max_force: float
    iterations: int
    converged: bool
    energies: list = field(default_factory=list)


def max_force_norm(forces) -> float:
    return float(np.linalg.norm(forces, axis=1).max())


def relax(structure: AtomicStructure, potential, fmax: float = 0.01,
          max_steps: int = 500, memory: int = 20,
          initial_step: float = 0.1) -> RelaxationResult:
    """L-BFGS descent with backtracking line search.

    Stops when the largest per-atom force norm drops to fmax (eV/A) or the
    step budget is exhausted. Accepted-step energies are non-increasing.
    """
    if fmax <= 0:
        raise ValueError("fmax must be positive")
    current = structure.copy()
    x = current.positions.ravel().copy()
    n = x.size

    def eval_at(vec):
        current.positions = vec.reshape(-1, 3)
        e = potential.energy(current)
        f = potential.forces(current)
        return e, f

    e, f = eval_at(x)
    if not np.isfinite(e):
        raise ValueError("initial energy is not finite")
    energies = [e]
    s_list, y_list, rho_list = [], [], []
    g = -f.ravel()  # gradient
    it = 0
    while it < max_steps:
        if max_force_norm(f) <= fmax:
            return RelaxationResult(current, max_force_norm(f), it, True, energies)
        # two-loop recursion
        q = g.copy()
        alphas = []
        for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * y
        if y_list:
            gamma = (s_list[-1] @ y_list[-1]) / (y_list[-1] @ y_list[-1])
            q *= gamma
        for (s, y, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
            b = rho * (y @ q)
            q += (a - b) * s
        d = -q
        if d @ g >= 0:  # not a descent direction; restart
            d = -g
            s_list, y_list, rho_list = [], [], []
        # cap the largest single-atom displacement per trial step
        dmax = np.linalg.norm(d.reshape(-1, 3), axis=1).max()
        max_disp = 2.0 * initial_step
        step = min(1.0, max_disp / dmax) if dmax > 0 else 1.0
        accepted = False
        for _ in range(30):
            x_new = x + step * d
            e_new, f_new = eval_at(x_new)
            if np.isfinite(e_new) and e_new <= e + 1e-12:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            current.positions = x.reshape(-1, 3)
            return RelaxationResult(current, max_force_norm(f), it, False, energies)
        g_new = -f_new.ravel()
        s_vec = x_new - x
        y_vec = g_new - g
        sy = s_vec @ y_vec
        if sy > 1e-12:
            s_list.append(s_vec)
            y_list.append(y_vec)
            rho_list.append(1.0 / sy)
            if len(s_list) > memory:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)
        x, e, f, g = x_new, e_new, f_new, g_new
        energies.append(e)
        it += 1
    current.positions = x.reshape(-1, 3)
    mf = max_force_norm(f)
    return RelaxationResult(current, mf, it, mf <= fmax, energies)


# --- Hessian ---------------------------------------------------------------

def hessian_finite_difference(structure: AtomicStructure, potential,
                              h: float = 0.01) -> np.ndarray:
    """Central-difference Hessian of the energy, symmetrized, in eV/A^2."""
    if h <= 0:
        raise ValueError("displacement must be positive")
    work = structure.copy()
    n3 = 3 * len(structure)
    K = np.zeros((n3, n3))
    base = structure.positions.copy()
    for col in range(n3):
        atom, axis = divmod(col, 3)
        work.positions = base.copy()
        work.positions[atom, axis] += h
        f_plus = potential.forces(work).ravel()
        work.positions = base.copy()
        work.positions[atom, axis] -= h
        f_minus = potential.forces(work).ravel()
        K[:, col] = -(f_plus - f_minus) / (2.0 * h)
    return 0.5 * (K + K.T)
