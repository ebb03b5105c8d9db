"""Circular (Morgan-style) fingerprints and similarity measures.

The per-atom environment hash is a stable 64-bit blake2b digest over a
canonical invariant tuple, so fingerprints are deterministic across runs
and atom orderings. Bit patterns are not expected to match any particular
cheminformatics toolkit bit-for-bit.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

import numpy as np

from .graph import AROMATIC, MolecularGraph
from .smiles import SmilesParseError, parse_smiles

_BOND_RANK = {1: 1, 2: 2, 3: 3, AROMATIC: 4}


def _stable_hash(obj) -> int:
    data = repr(obj).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


@dataclass
class Fingerprint:
    bits: np.ndarray  # boolean vector of length nbits
    nbits: int
    radius: int

    def popcount(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        return (
            isinstance(other, Fingerprint)
            and self.nbits == other.nbits
            and self.radius == other.radius
            and bool(np.array_equal(self.bits, other.bits))
        )


def morgan_fingerprint(graph: MolecularGraph, radius: int = 2,
                       nbits: int = 1024) -> Fingerprint:
    """Hash circular atom environments of depth 0..radius into a bit vector."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if nbits < 8 or nbits & (nbits - 1):
        raise ValueError("nbits must be a power of two >= 8")
    ring_atoms = graph.ring_atoms()
    neighbors = [graph.neighbors(i) for i in range(len(graph))]
    invariants = []
    for i, a in enumerate(graph.atoms):
        invariants.append(_stable_hash((
            a.element, len(neighbors[i]), a.h_count, a.charge,
            i in ring_atoms, a.aromatic, a.isotope or 0,
        )))
    bits = np.zeros(nbits, dtype=bool)
    for h in invariants:
        bits[h % nbits] = True
    for _ in range(radius):
        new = []
        for i in range(len(graph)):
            env = tuple(sorted(
                (_BOND_RANK[b.order], invariants[j]) for j, b in neighbors[i]
            ))
            new.append(_stable_hash((invariants[i], env)))
        invariants = new
        for h in invariants:
            bits[h % nbits] = True
    return Fingerprint(bits=bits, nbits=nbits, radius=radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Bit-vector similarity c/(a+b-c); two empty fingerprints count as 1."""
    if a.nbits != b.nbits:
        raise ValueError(f"fingerprint length mismatch: {a.nbits} vs {b.nbits}")
    pa = a.popcount()
    pb = b.popcount()
    c = int(np.logical_and(a.bits, b.bits).sum())
    if pa + pb == 0:
        return 1.0
    return c / (pa + pb - c)


def rank_by_similarity(reference: Fingerprint, database):
    """Rank (id, Fingerprint) entries by Tanimoto similarity to a reference.

    Returns a descending list of (id, similarity); ties break by id.
    """
    entries = list(database)
    if not entries:
        raise ValueError("empty fingerprint database")
    scored = [(str(eid), tanimoto(reference, fp)) for eid, fp in entries]
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored


def similarity_summary(ranked, thresholds=(0.4, 0.5)) -> dict:
    """Threshold statistics over a ranked (id, similarity) list."""
    sims = np.array([s for _, s in ranked], dtype=float)
    summary = {"count": int(sims.size)}
    for t in thresholds:
        frac = float((sims <= t).mean()) if sims.size else 0.0
        summary[f"fraction_at_or_below_{t}"] = frac
    return summary


def linear_kernel_similarity(a, b) -> float:
    """Normalized linear kernel (cosine) between two descriptor vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("descriptor vectors must be finite")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("descriptor vector has zero norm")
    return float(a @ b / (na * nb))


def load_smiles_table(path):
    """Load an (id, smiles) table from a TSV/CSV file.

    Rows whose SMILES fail to parse are skipped and counted.
    Returns (entries, skipped) with entries a list of (id, smiles).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        if not sample.strip():
            return [], 0
        delimiter = "\t" if "\t" in sample.splitlines()[0] else ","
        reader = csv.DictReader(fh, delimiter=delimiter)
        if reader.fieldnames is None:
            return [], 0
        fields = {f.strip().lower(): f for f in reader.fieldnames}
        if "id" not in fields or "smiles" not in fields:
            raise ValueError(
                f"expected columns 'id' and 'smiles', got {reader.fieldnames}"
            )
        entries = []
        skipped = 0
        for row in reader:
            eid = (row[fields["id"]] or "").strip()
            smi = (row[fields["smiles"]] or "").strip()
            if not eid and not smi:
                continue
            try:
                parse_smiles(smi)
            except (SmilesParseError, ValueError):
                skipped += 1
                continue
            entries.append((eid, smi))
    return entries, skipped
