"""spescreen: screening toolkit for molecular single-photon emitter candidates.

Pipeline pieces: SMILES similarity search, guest-in-host embedding with
binding-energy ranking, harmonic vibrational analysis and the vibronic
coupling entropy, spin-orbit aggregation metrics, Stark coefficients, and
a PCA + Gaussian-process classification stage.
"""

__version__ = "0.1.0"
