"""Command-line pipeline driver.

Subcommands cover the screening stages: similarity ranking, candidate
maps, guest-host embedding, normal modes, vibronic metrics, spin-orbit
aggregates, Stark coefficients, labeling, classification, and report
assembly. A plain-text INI config supplies per-stage defaults; explicit
flags override it. Exit codes: 0 success, 2 validation error, 3 numerical
failure.
"""

from __future__ import annotations

import configparser
import csv
import functools
import hashlib
import json
import os
import sys

import click
import numpy as np

from . import __version__
from .chem import (
    load_smiles_table,
    morgan_fingerprint,
    parse_smiles,
    rank_by_similarity,
    similarity_summary,
    tanimoto,
)
from .embedding import EmbeddingConfig, embed_emitter, select_most_stable, write_manifest
from .ml import feature_matrix, gpc_predict, gpc_train, hdbscan, label_good, pca, tsne
from .potential import (
    ExternalPotential,
    LennardJonesPotential,
    hessian_finite_difference,
    relax,
)
from .spectro import (
    CANDIDATE_COLUMNS,
    StarkInput,
    gssoc_metric,
    load_excited_state_table,
    read_candidates_csv,
    rsoc_metric,
    soc_metric,
    stark_coefficients,
    write_candidates_csv,
)
from .structure import parse_xyz
from .vibronic import load_mode_set, normal_modes, save_mode_set, vibronic_report

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (np.linalg.LinAlgError, FloatingPointError, ArithmeticError)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_stage_manifest(ctx, stage, inputs, params, outputs):
    """Record inputs (with hashes), parameters, and outputs for a stage."""
    manifest = {
        "stage": stage,
        "version": __version__,
        "inputs": {
            name: {"path": str(p), "sha256": _sha256(p)}
            for name, p in inputs.items() if p is not None
        },
        "parameters": params,
        "outputs": sorted(str(o) for o in outputs),
    }
    path = os.path.join(ctx.obj["out_dir"], f"{stage}_manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def _stage(func):
    """Map stage exceptions onto the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        stage = func.__name__
        try:
            return func(*args, **kwargs)
        except _NUMERICAL_ERRORS as exc:
            click.echo(f"[{stage}] numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"[{stage}] validation error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def _cfg(ctx, section, key, fallback=None, cast=str):
    """Config lookup with section fallback; flags override by arriving non-None."""
    parser = ctx.obj.get("config")
    if parser is None:
        return fallback
    if parser.has_option(section, key):
        raw = parser.get(section, key)
        return cast(raw)
    return fallback


def _resolve(flag_value, ctx, section, key, fallback=None, cast=str):
    if flag_value is not None:
        return flag_value
    return _cfg(ctx, section, key, fallback=fallback, cast=cast)


def _out(ctx, name):
    return os.path.join(ctx.obj["out_dir"], name)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="INI config with per-stage sections.")
@click.option("--seed", type=int, default=None, help="Global random seed.")
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker threads within a stage (outputs are "
                   "deterministic regardless).")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".",
              show_default=True, help="Directory for stage outputs.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config_path, seed, threads, out_dir):
    """Emitter-host screening pipeline."""
    parser = None
    if config_path:
        parser = configparser.ConfigParser()
        parser.read(config_path)
    os.makedirs(out_dir, exist_ok=True)
    if seed is None and parser is not None and parser.has_option("global",
                                                                "seed"):
        seed = parser.getint("global", "seed")
    ctx.obj = {
        "config": parser,
        "seed": 0 if seed is None else seed,
        "threads": threads,
        "out_dir": out_dir,
    }


# --- similarity ------------------------------------------------------------

@main.command()
@click.option("--smiles", "table_path", type=click.Path(exists=True),
              default=None, help="TSV/CSV with id and smiles columns.")
@click.option("--reference", default=None,
              help="Reference: an id from the table or a SMILES string.")
@click.option("--nbits", type=int, default=None)
@click.option("--radius", type=int, default=None)
@click.pass_context
@_stage
def similarity(ctx, table_path, reference, nbits, radius):
    """Rank a SMILES table by Tanimoto similarity to a reference."""
    table_path = _resolve(table_path, ctx, "similarity", "smiles")
    reference = _resolve(reference, ctx, "similarity", "reference")
    nbits = _resolve(nbits, ctx, "similarity", "nbits", 1024, int)
    radius = _resolve(radius, ctx, "similarity", "radius", 2, int)
    if table_path is None or reference is None:
        raise ValueError("similarity needs --smiles and --reference")

    entries, skipped = load_smiles_table(table_path)
    by_id = dict(entries)
    ref_smiles = by_id.get(reference, reference)
    ref_fp = morgan_fingerprint(parse_smiles(ref_smiles), radius, nbits)
    database = [
        (cid, morgan_fingerprint(parse_smiles(smi), radius, nbits))
        for cid, smi in entries
    ]
    ranked = rank_by_similarity(ref_fp, database)
    summary = similarity_summary(ranked)
    summary["skipped_rows"] = skipped

    ranking_path = _out(ctx, "ranking.csv")
    with open(ranking_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "tanimoto"])
        for cid, sim in ranked:
            writer.writerow([cid, f"{sim:.6f}"])

    sims = np.array([s for _, s in ranked])
    edges = np.linspace(0.0, 1.0, 21)
    counts, _ = np.histogram(sims, bins=edges)
    hist_path = _out(ctx, "histogram.json")
    with open(hist_path, "w", encoding="utf-8") as fh:
        json.dump({
            "bin_edges": edges.tolist(),
            "counts": counts.tolist(),
            "summary": summary,
        }, fh, indent=2, sort_keys=True)

    _write_stage_manifest(
        ctx, "similarity", {"smiles": table_path},
        {"reference": reference, "nbits": nbits, "radius": radius},
        [ranking_path, hist_path],
    )
    click.echo(f"ranked {len(ranked)} entries ({skipped} skipped)")


# --- map -------------------------------------------------------------------

@main.command(name="map")
@click.option("--smiles", "table_path", type=click.Path(exists=True),
              default=None)
@click.option("--perplexity", type=float, default=None)
@click.option("--min-cluster-size", type=int, default=None)
@click.option("--nbits", type=int, default=None)
@click.option("--radius", type=int, default=None)
@click.option("--out", "out_name", default="map.csv", show_default=True)
@click.pass_context
@_stage
def map_cmd(ctx, table_path, perplexity, min_cluster_size, nbits, radius,
            out_name):
    """Embed fingerprints with t-SNE and cluster the 2D map."""
    table_path = _resolve(table_path, ctx, "map", "smiles")
    perplexity = _resolve(perplexity, ctx, "map", "perplexity", 50.0, float)
    min_cluster_size = _resolve(min_cluster_size, ctx, "map",
                                "min_cluster_size", 5, int)
    nbits = _resolve(nbits, ctx, "map", "nbits", 1024, int)
    radius = _resolve(radius, ctx, "map", "radius", 2, int)
    if table_path is None:
        raise ValueError("map needs --smiles")

    entries, skipped = load_smiles_table(table_path)
    ids = [cid for cid, _ in entries]
    fps = [
        morgan_fingerprint(parse_smiles(smi), radius, nbits)
        for _, smi in entries
    ]
    n = len(fps)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = 1.0 - tanimoto(fps[i], fps[j])

    result = tsne(dist, perplexity=perplexity, seed=ctx.obj["seed"],
                  metric="precomputed")
    clusters = hdbscan(result.embedding, min_cluster_size=min_cluster_size)

    out_path = _out(ctx, out_name)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "cluster", "id"])
        for k, cid in enumerate(ids):
            writer.writerow([
                f"{result.embedding[k, 0]:.6f}",
                f"{result.embedding[k, 1]:.6f}",
                int(clusters.labels[k]),
                cid,
            ])
    _write_stage_manifest(
        ctx, "map", {"smiles": table_path},
        {"perplexity": perplexity, "min_cluster_size": min_cluster_size,
         "nbits": nbits, "radius": radius, "seed": ctx.obj["seed"],
         "skipped_rows": skipped},
        [out_path],
    )
    click.echo(
        f"mapped {n} entries into {clusters.n_clusters} clusters "
        f"(kl={result.kl_divergence:.4f})"
    )


# --- embed -----------------------------------------------------------------

@main.command()
@click.option("--host", "host_path", type=click.Path(exists=True), default=None)
@click.option("--emitter", "emitter_path", type=click.Path(exists=True),
              default=None)
@click.option("--cutoff", type=float, default=None)
@click.option("--min-removed", type=int, default=None)
@click.option("--max-removed", type=int, default=None)
@click.option("--per-count", type=int, default=None)
@click.option("--max-trials", type=int, default=None)
@click.option("--lj-params", "lj_path", type=click.Path(exists=True),
              default=None,
              help="JSON {\"C,C\": [eps_eV, sigma_A], ...}; enables "
                   "relaxation and binding energies.")
@click.option("--fmax", type=float, default=0.01, show_default=True)
@click.pass_context
@_stage
def embed(ctx, host_path, emitter_path, cutoff, min_removed, max_removed,
          per_count, max_trials, lj_path, fmax):
    """Stochastically embed the emitter into the host supercell."""
    host_path = _resolve(host_path, ctx, "embed", "host")
    emitter_path = _resolve(emitter_path, ctx, "embed", "emitter")
    if host_path is None or emitter_path is None:
        raise ValueError("embed needs --host and --emitter")
    cfg = EmbeddingConfig(
        overlap_cutoff=_resolve(cutoff, ctx, "embed", "cutoff", 1.0, float),
        min_removed=_resolve(min_removed, ctx, "embed", "min_removed", 2, int),
        max_removed=_resolve(max_removed, ctx, "embed", "max_removed", 5, int),
        structures_per_count=_resolve(per_count, ctx, "embed", "per_count",
                                      25, int),
        max_trials=_resolve(max_trials, ctx, "embed", "max_trials",
                            10000, int),
        seed=ctx.obj["seed"],
    )
    host = parse_xyz(host_path)
    emitter = parse_xyz(emitter_path)
    trials = embed_emitter(host, emitter, cfg)

    binding = None
    if lj_path is not None:
        with open(lj_path, encoding="utf-8") as fh:
            raw = json.load(fh)
        params = {
            tuple(k.split(",")): tuple(v) for k, v in raw.items()
        }
        potential = LennardJonesPotential(params)
        _, _, binding = select_most_stable(trials, potential, host, emitter,
                                           fmax=fmax)

    manifest_path = _out(ctx, "embedding.json")
    prefix = _out(ctx, "embedded_")
    write_manifest(trials, manifest_path, cfg, binding_energies=binding,
                   xyz_prefix=prefix)
    outputs = [manifest_path] + [
        f"{prefix}{k:04d}.xyz" for k in range(len(trials))
    ]
    _write_stage_manifest(
        ctx, "embed", {"host": host_path, "emitter": emitter_path,
                       "lj_params": lj_path},
        {"cutoff": cfg.overlap_cutoff, "min_removed": cfg.min_removed,
         "max_removed": cfg.max_removed, "per_count": cfg.structures_per_count,
         "max_trials": cfg.max_trials, "seed": cfg.seed, "fmax": fmax},
        outputs,
    )
    click.echo(f"accepted {len(trials)} embedded structures")


# --- modes -----------------------------------------------------------------

@main.command()
@click.option("--structure", "structure_path", type=click.Path(exists=True),
              default=None)
@click.option("--potential-file", "ext_path", type=click.Path(exists=True),
              default=None, help="External single-point JSON with a Hessian.")
@click.option("--lj-params", "lj_path", type=click.Path(exists=True),
              default=None)
@click.option("--relax/--no-relax", "do_relax", default=False,
              show_default=True)
@click.option("--fmax", type=float, default=0.01, show_default=True)
@click.option("--out", "out_name", default="modes.json", show_default=True)
@click.pass_context
@_stage
def modes(ctx, structure_path, ext_path, lj_path, do_relax, fmax, out_name):
    """Compute normal modes from an external or Lennard-Jones Hessian."""
    structure_path = _resolve(structure_path, ctx, "modes", "structure")
    if structure_path is None:
        raise ValueError("modes needs --structure")
    structure = parse_xyz(structure_path)

    if ext_path is not None:
        potential = ExternalPotential(ext_path)
    elif lj_path is not None:
        with open(lj_path, encoding="utf-8") as fh:
            raw = json.load(fh)
        potential = LennardJonesPotential(
            {tuple(k.split(",")): tuple(v) for k, v in raw.items()}
        )
    else:
        raise ValueError("modes needs --potential-file or --lj-params")

    if do_relax:
        result = relax(structure, potential, fmax=fmax)
        if not result.converged:
            raise FloatingPointError(
                f"relaxation stalled at max force {result.max_force:.3e}"
            )
        structure = result.structure

    if ext_path is not None:
        hessian = potential.hessian(structure)
    else:
        hessian = hessian_finite_difference(structure, potential)
    modeset = normal_modes(hessian, structure.masses)
    out_path = _out(ctx, out_name)
    save_mode_set(modeset, out_path)
    _write_stage_manifest(
        ctx, "modes",
        {"structure": structure_path, "potential_file": ext_path,
         "lj_params": lj_path},
        {"relax": do_relax, "fmax": fmax},
        [out_path],
    )
    n_im = int((modeset.frequencies < 0).sum())
    click.echo(f"{len(modeset.frequencies)} modes ({n_im} imaginary)")


# --- vibronic --------------------------------------------------------------

def _parse_atom_selection(spec, n):
    """'a:b' slice or comma list of indices; None means all atoms."""
    if spec is None:
        return list(range(n))
    if ":" in spec:
        a, b = spec.split(":", 1)
        return list(range(int(a or 0), int(b or n)))
    return [int(tok) for tok in spec.split(",") if tok.strip()]


@main.command()
@click.option("--isolated", "iso_path", type=click.Path(exists=True),
              default=None, help="Mode-set JSON of the isolated emitter.")
@click.option("--embedded", "emb_path", type=click.Path(exists=True),
              default=None, help="Mode-set JSON of the embedded complex.")
@click.option("--forces", "forces_path", type=click.Path(exists=True),
              default=None, help="JSON array of excited-state forces (N x 3).")
@click.option("--emitter-atoms", default=None,
              help="Emitter atom indices in the complex: 'a:b' or 'i,j,...'.")
@click.option("--r-ground", "rg_path", type=click.Path(exists=True),
              default=None, help="Ground-state emitter geometry (XYZ).")
@click.option("--r-excited", "re_path", type=click.Path(exists=True),
              default=None, help="Excited-state emitter geometry (XYZ).")
@click.option("--out", "out_name", default="vibronic.json", show_default=True)
@click.pass_context
@_stage
def vibronic(ctx, iso_path, emb_path, forces_path, emitter_atoms, rg_path,
             re_path, out_name):
    """Mode projections, entropies, Huang-Rhys factors, and the FC metric."""
    iso_path = _resolve(iso_path, ctx, "vibronic", "isolated")
    emb_path = _resolve(emb_path, ctx, "vibronic", "embedded")
    forces_path = _resolve(forces_path, ctx, "vibronic", "forces")
    rg_path = _resolve(rg_path, ctx, "vibronic", "r_ground")
    re_path = _resolve(re_path, ctx, "vibronic", "r_excited")
    required = {"isolated": iso_path, "embedded": emb_path,
                "forces": forces_path, "r-ground": rg_path,
                "r-excited": re_path}
    missing = [k for k, v in required.items() if v is None]
    if missing:
        raise ValueError(f"vibronic needs --{', --'.join(missing)}")

    isolated = load_mode_set(iso_path)
    embedded = load_mode_set(emb_path)
    with open(forces_path, encoding="utf-8") as fh:
        forces = np.asarray(json.load(fh), dtype=float)
    r_ground = parse_xyz(rg_path).positions
    r_excited = parse_xyz(re_path).positions
    n_complex = embedded.modes.shape[1] // 3
    atoms = _parse_atom_selection(emitter_atoms, n_complex)

    report = vibronic_report(isolated, embedded, atoms, forces,
                             r_ground, r_excited)
    out_path = _out(ctx, out_name)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump({
            "g": report.g.tolist(),
            "s_projection": report.s_projection.tolist(),
            "huang_rhys": report.huang_rhys.tolist(),
            "weighted_huang_rhys": report.weighted_huang_rhys.tolist(),
            "svc": report.svc,
            "sum_g": report.sum_g,
            "sum_weighted_hr": report.sum_weighted_hr,
            "direct_fc": report.direct_fc,
        }, fh, indent=2, sort_keys=True)
    _write_stage_manifest(
        ctx, "vibronic",
        {"isolated": iso_path, "embedded": emb_path, "forces": forces_path,
         "r_ground": rg_path, "r_excited": re_path},
        {"emitter_atoms": emitter_atoms},
        [out_path],
    )
    click.echo(f"svc={report.svc:.4f} direct_fc={report.direct_fc:.4f}")


# --- spin ------------------------------------------------------------------

@main.command()
@click.option("--states", "states_path", type=click.Path(exists=True),
              default=None, help="Excited-state table JSON.")
@click.option("--out", "out_name", default="spin.json", show_default=True)
@click.pass_context
@_stage
def spin(ctx, states_path, out_name):
    """Aggregate spin-orbit couplings into SOC / rSOC / gsSOC."""
    states_path = _resolve(states_path, ctx, "spin", "states")
    if states_path is None:
        raise ValueError("spin needs --states")
    table = load_excited_state_table(states_path)
    payload = {
        "soc": soc_metric(table),
        "rsoc": rsoc_metric(table),
        "gssoc": (
            gssoc_metric(table) if table.gs_soc_t1_cm1 is not None else None
        ),
        "e_s1_eV": table.e_s1,
        "n_triplets": len(table.triplets),
    }
    out_path = _out(ctx, out_name)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    _write_stage_manifest(ctx, "spin", {"states": states_path}, {},
                          [out_path])
    click.echo(
        f"soc={payload['soc']:.4f} rsoc={payload['rsoc']:.4f} "
        f"gssoc={payload['gssoc']}"
    )


# --- stark -----------------------------------------------------------------

@main.command()
@click.option("--delta-mu", type=float, default=None,
              help="|dipole difference| in atomic units.")
@click.option("--delta-alpha", type=float, default=None,
              help="Polarizability difference in atomic units.")
@click.option("--field", "fields", type=float, multiple=True,
              help="Evaluate the shift at these fields (kV/cm); repeatable.")
@click.option("--out", "out_name", default="stark.json", show_default=True)
@click.pass_context
@_stage
def stark(ctx, delta_mu, delta_alpha, fields, out_name):
    """Linear and quadratic Stark shift coefficients."""
    delta_mu = _resolve(delta_mu, ctx, "stark", "delta_mu", cast=float)
    delta_alpha = _resolve(delta_alpha, ctx, "stark", "delta_alpha",
                           cast=float)
    if delta_mu is None or delta_alpha is None:
        raise ValueError("stark needs --delta-mu and --delta-alpha")
    coeffs = stark_coefficients(StarkInput(delta_mu, delta_alpha))
    payload = {
        "a_mhz_per_kvcm": coeffs.a_mhz_per_kvcm,
        "b_mhz_per_kvcm2": coeffs.b_mhz_per_kvcm2,
        "shifts": [
            {"field_kv_cm": f, "shift_mhz": coeffs.shift_mhz(f)}
            for f in fields
        ],
    }
    out_path = _out(ctx, out_name)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    _write_stage_manifest(
        ctx, "stark", {},
        {"delta_mu": delta_mu, "delta_alpha": delta_alpha},
        [out_path],
    )
    click.echo(
        f"a={coeffs.a_mhz_per_kvcm:.3f} MHz/(kV/cm) "
        f"b={coeffs.b_mhz_per_kvcm2:.4f} MHz/(kV/cm)^2"
    )


# --- label / classify ------------------------------------------------------

def _load_records_and_labels(ctx, records_path, lambda_host, no_soc, stage):
    records_path = _resolve(records_path, ctx, stage, "records")
    lambda_host = _resolve(lambda_host, ctx, stage, "lambda_host", cast=float)
    if records_path is None or lambda_host is None:
        raise ValueError(f"{stage} needs --records and --lambda-host")
    records = read_candidates_csv(records_path)
    if not records:
        raise ValueError("record table is empty")
    good = label_good(records, lambda_host, include_soc=not no_soc)
    return records_path, lambda_host, records, good


@main.command()
@click.option("--records", "records_path", type=click.Path(exists=True),
              default=None)
@click.option("--lambda-host", type=float, default=None,
              help="Host absorption wavelength threshold (nm).")
@click.option("--no-soc", is_flag=True, default=False,
              help="Drop the SOC condition from the labeling rule.")
@click.option("--out", "out_name", default="labels.csv", show_default=True)
@click.pass_context
@_stage
def label(ctx, records_path, lambda_host, no_soc, out_name):
    """Label candidates as good/bad emitters."""
    records_path, lambda_host, records, good = _load_records_and_labels(
        ctx, records_path, lambda_host, no_soc, "label"
    )
    out_path = _out(ctx, out_name)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label"])
        for rec, g in zip(records, good):
            writer.writerow([rec.id, int(g)])
    _write_stage_manifest(
        ctx, "label", {"records": records_path},
        {"lambda_host": lambda_host, "include_soc": not no_soc},
        [out_path],
    )
    click.echo(f"labeled {int(good.sum())}/{len(records)} as good")


@main.command()
@click.option("--records", "records_path", type=click.Path(exists=True),
              default=None)
@click.option("--lambda-host", type=float, default=None)
@click.option("--no-soc", is_flag=True, default=False)
@click.option("--out", "out_name", default="labels.csv", show_default=True)
@click.pass_context
@_stage
def classify(ctx, records_path, lambda_host, no_soc, out_name):
    """Label candidates and attach GPC class probabilities."""
    records_path, lambda_host, records, good = _load_records_and_labels(
        ctx, records_path, lambda_host, no_soc, "classify"
    )
    features = feature_matrix(records)
    model = gpc_train(features.values, good.astype(float))
    probs = gpc_predict(model, features.values)
    out_path = _out(ctx, out_name)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label", "probability"])
        for rec, g, p in zip(records, good, probs):
            writer.writerow([rec.id, int(g), f"{p:.6f}"])
    _write_stage_manifest(
        ctx, "classify", {"records": records_path},
        {"lambda_host": lambda_host, "include_soc": not no_soc,
         "sigma2": model.sigma2, "lengthscale": model.lengthscale},
        [out_path],
    )
    click.echo(
        f"classified {len(records)} records "
        f"(sigma2={model.sigma2:.3g}, lengthscale={model.lengthscale:.3g})"
    )


# --- report ----------------------------------------------------------------

_FIG3_METRICS = ("soc", "rsoc", "gssoc", "svc", "e_bind_eV",
                 "fosc_em", "lambda_em_nm")


@main.command()
@click.option("--records", "records_path", type=click.Path(exists=True),
              default=None)
@click.option("--lambda-host", type=float, default=None,
              help="Enables label/PC-score/GPC-grid outputs.")
@click.option("--no-soc", is_flag=True, default=False)
@click.option("--vibronic-dir", type=click.Path(exists=True, file_okay=False),
              default=None,
              help="Directory of per-candidate vibronic JSONs named <id>.json.")
@click.pass_context
@_stage
def report(ctx, records_path, lambda_host, no_soc, vibronic_dir):
    """Assemble the results table and per-figure CSV data."""
    records_path = _resolve(records_path, ctx, "report", "records")
    lambda_host = _resolve(lambda_host, ctx, "report", "lambda_host",
                           cast=float)
    if records_path is None:
        raise ValueError("report needs --records")
    records = read_candidates_csv(records_path)
    if not records:
        raise ValueError("record table is empty")
    outputs = []

    table_csv = _out(ctx, "table1.csv")
    write_candidates_csv(records, table_csv)
    table_json = _out(ctx, "table1.json")
    with open(table_json, "w", encoding="utf-8") as fh:
        json.dump(
            [dict(zip(CANDIDATE_COLUMNS, r.as_row())) for r in records],
            fh, indent=2, sort_keys=True,
        )
    outputs += [table_csv, table_json]

    for metric in _FIG3_METRICS:
        path = _out(ctx, f"fig3_{metric}.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "tanimoto", metric])
            for r in records:
                writer.writerow([
                    r.id, f"{r.tanimoto:.4f}", f"{getattr(r, metric):.4f}",
                ])
        outputs.append(path)

    if lambda_host is not None:
        good = label_good(records, lambda_host, include_soc=not no_soc)
        features = feature_matrix(records)
        comp = pca(features.values, k=2)
        path = _out(ctx, "fig4_pca.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "pc1", "pc2", "label"])
            for r, row, g in zip(records, comp.scores, good):
                writer.writerow([
                    r.id, f"{row[0]:.6f}", f"{row[1]:.6f}", int(g),
                ])
        outputs.append(path)
        if 0 < int(good.sum()) < len(records):
            model = gpc_train(comp.scores, good.astype(float))
            lo = comp.scores.min(axis=0) - 1.0
            hi = comp.scores.max(axis=0) + 1.0
            gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], 50),
                                 np.linspace(lo[1], hi[1], 50))
            grid = np.column_stack([gx.ravel(), gy.ravel()])
            probs = gpc_predict(model, grid)
            path = _out(ctx, "fig4_grid.csv")
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["pc1", "pc2", "probability"])
                for (x, y), p in zip(grid, probs):
                    writer.writerow([f"{x:.6f}", f"{y:.6f}", f"{p:.6f}"])
            outputs.append(path)

    if vibronic_dir is not None:
        rows = []
        for r in records:
            path = os.path.join(vibronic_dir, f"{r.id}.json")
            if not os.path.exists(path):
                continue
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            rows.append((r.id, r.svc, data["sum_weighted_hr"],
                         data["sum_g"]))
        for name, col in (("fig5_svc_vs_hr.csv", 2), ("fig6_svc_vs_g.csv", 3)):
            path = _out(ctx, name)
            header = ["id", "svc",
                      "sum_weighted_hr" if col == 2 else "sum_g"]
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(header)
                for row in rows:
                    writer.writerow([row[0], f"{row[1]:.4f}",
                                     f"{row[col]:.4f}"])
            outputs.append(path)

    _write_stage_manifest(
        ctx, "report", {"records": records_path},
        {"lambda_host": lambda_host, "include_soc": not no_soc},
        outputs,
    )
    click.echo(f"wrote {len(outputs)} report files")


if __name__ == "__main__":
    main()
