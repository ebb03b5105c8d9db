"""Stochastic guest-in-host embedding and binding-energy selection.

An emitter is placed at the host center of mass, then randomly rotated and
translated in a cumulative random walk. Host molecules with any atom
closer than the overlap cutoff to the emitter are deleted whole, and a
trial is kept only when the emitter bounding box lies strictly inside the
remaining host bounding box.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .potential import relax
from .structure import AtomicStructure, identify_molecules, write_xyz


@dataclass
class EmbeddingConfig:
    overlap_cutoff: float = 1.0        # A
    translation_scale: float = 0.05    # fraction of cell lengths per step
    min_removed: int = 2
    max_removed: int = 5
    structures_per_count: int = 25
    max_trials: int = 10000
    seed: int = 0
    cumulative: bool = True            # random walk vs fresh-from-center draws

    def __post_init__(self):
        if self.overlap_cutoff <= 0:
            raise ValueError("overlap cutoff must be positive")
        if self.min_removed > self.max_removed:
            raise ValueError("min_removed must be <= max_removed")
        if self.structures_per_count < 1 or self.max_trials < 1:
            raise ValueError("trial caps must be >= 1")


@dataclass
class EmbeddingTrial:
    structure: AtomicStructure       # remaining host + emitter
    removed_count: int
    rotation_axis: np.ndarray
    rotation_angle_deg: float
    translation: np.ndarray
    trial_index: int
    n_host_atoms: int                # atoms of the (reduced) host, listed first
    accepted: bool = True


def _random_unit_vector(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _cell_lengths(structure):
    return np.linalg.norm(structure.cell, axis=1)


def embed_emitter(host: AtomicStructure, emitter: AtomicStructure,
                  cfg: EmbeddingConfig):
    """Run the stochastic embedding loop; returns accepted EmbeddingTrials."""
    if host.cell is None:
        raise ValueError("host must carry a periodic cell")
    rng = np.random.default_rng(cfg.seed)
    labels = identify_molecules(host)
    lengths = _cell_lengths(host)

    base = emitter.copy()
    base.translate(host.center_of_mass() - base.center_of_mass())

    walker = base.copy()
    accepted = []
    per_count = {k: 0 for k in range(cfg.min_removed, cfg.max_removed + 1)}

    for trial in range(cfg.max_trials):
        if all(v >= cfg.structures_per_count for v in per_count.values()):
            break
        if not cfg.cumulative:
            walker = base.copy()
        axis = _random_unit_vector(rng)
        angle = float(rng.uniform(0.0, 360.0))
        walker.rotate(axis, angle)
        shift = cfg.translation_scale * lengths * rng.uniform(-1.0, 1.0, size=3)
        walker.translate(shift)

        # host atoms within the cutoff of any emitter atom (raw distances)
        d = np.linalg.norm(
            host.positions[:, None, :] - walker.positions[None, :, :], axis=2
        )
        overlapping_atoms = np.nonzero((d < cfg.overlap_cutoff).any(axis=1))[0]
        removed_mols = set(labels.labels[overlapping_atoms].tolist())
        removed = len(removed_mols)
        if not cfg.min_removed <= removed <= cfg.max_removed:
            continue
        if per_count[removed] >= cfg.structures_per_count:
            continue
        keep = [i for i in range(len(host)) if labels.labels[i] not in removed_mols]
        reduced = host.subset(keep)
        # containment: emitter bbox strictly inside remaining-host bbox
        hmin, hmax = reduced.positions.min(0), reduced.positions.max(0)
        emin, emax = walker.positions.min(0), walker.positions.max(0)
        if not (np.all(emin > hmin) and np.all(emax < hmax)):
            continue
        combined = AtomicStructure(
            elements=list(reduced.elements) + list(walker.elements),
            positions=np.vstack([reduced.positions, walker.positions]),
            masses=np.concatenate([reduced.masses, walker.masses]),
            cell=host.cell.copy(),
            pbc=host.pbc,
        )
        accepted.append(EmbeddingTrial(
            structure=combined,
            removed_count=removed,
            rotation_axis=axis,
            rotation_angle_deg=angle,
            translation=shift,
            trial_index=trial,
            n_host_atoms=len(reduced),
        ))
        per_count[removed] += 1
    return accepted


def binding_energy(e_complex: float, e_emitter: float, n_complex: int,
                   n_emitter: int, n_supercell: int, e_supercell: float) -> float:
    """Formation energy of the guest-host complex relative to its parts.

    E_bind = E_complex - E_emitter
             - (N_complex - N_emitter) / N_supercell * E_supercell
    """
    if n_supercell <= 0:
        raise ValueError("supercell atom count must be positive")
    frac = (n_complex - n_emitter) / n_supercell
    return e_complex - e_emitter - frac * e_supercell


def select_most_stable(trials, potential, host: AtomicStructure,
                       emitter: AtomicStructure, fmax: float = 0.01,
                       max_steps: int = 500):
    """Relax complex/emitter/host, compute binding energies, return argmin.

    Returns (best_trial, best_binding_energy, per_trial_energies). Ties
    break toward the earliest trial index.
    """
    trials = list(trials)
    if not trials:
        raise ValueError("no accepted trials to select from")
    em_res = relax(emitter, potential, fmax=fmax, max_steps=max_steps)
    host_res = relax(host, potential, fmax=fmax, max_steps=max_steps)
    e_emitter = potential.energy(em_res.structure)
    e_host = potential.energy(host_res.structure)
    energies = []
    for t in trials:
        res = relax(t.structure, potential, fmax=fmax, max_steps=max_steps)
        e_complex = potential.energy(res.structure)
        eb = binding_energy(
            e_complex, e_emitter, len(t.structure), len(emitter),
            len(host), e_host,
        )
        energies.append(eb)
    best = int(np.argmin(energies))
    return trials[best], energies[best], energies


def write_manifest(trials, path, cfg: EmbeddingConfig, binding_energies=None,
                   xyz_prefix=None):
    """Dump accepted trials to a JSON manifest (and optional numbered XYZs)."""
    records = []
    for k, t in enumerate(trials):
        rec = {
            "trial_index": t.trial_index,
            "removed_count": t.removed_count,
            "rotation_axis": [round(float(x), 12) for x in t.rotation_axis],
            "rotation_angle_deg": round(float(t.rotation_angle_deg), 12),
            "translation": [round(float(x), 12) for x in t.translation],
            "n_atoms": len(t.structure),
            "n_host_atoms": t.n_host_atoms,
        }
        if binding_energies is not None:
            rec["binding_energy_eV"] = round(float(binding_energies[k]), 12)
        if xyz_prefix is not None:
            xyz_path = f"{xyz_prefix}{k:04d}.xyz"
            write_xyz(t.structure, xyz_path)
            rec["xyz"] = xyz_path
        records.append(rec)
    payload = {"config": asdict(cfg), "accepted": records}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    return payload
