"""Command line interface.

Subcommands:

  simulate         draw seeded detector counts for a configured source
  tomo             reconstruct a density matrix from count records
  audit            certify the randomness of a stored state
  bits             generate (and optionally extract) a bit stream
  reproduce-paper  recompute the bundled published results and compare

Exit codes: 0 success, 2 invalid input, 3 failed check or budget,
1 unexpected error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import ContractError, QrngSimError, ValidationError
from .optics import make_source, simulate_counts
from .randomness import SCHEMES, audit, generate_bits
from .reference import TOLERANCE, reference_rows
from .extractors import extract_toeplitz, extract_von_neumann
from .serialize import (
    audit_report_to_obj,
    config_hash,
    density_matrix_to_obj,
    dump_json,
    load_count_records,
    load_density_matrix,
    load_json,
    obj_to_run_config,
    reconstruction_report_to_obj,
    save_count_records,
    write_bit_stream,
)
from .tomography import reconstruct_from_records


def _matrix_lines(m: np.ndarray) -> list[str]:
    return [
        "  ".join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in row) for row in np.asarray(m)
    ]


def _infer_scheme(dim: int) -> str:
    return "single_HV" if dim == 2 else "coincidence_HH_VV"


def cmd_simulate(args) -> int:
    data = load_json(args.config)
    if not isinstance(data, dict):
        raise ValidationError(f"{args.config}: expected a configuration object")
    config = obj_to_run_config(data, context=str(args.config))
    effective = dict(data)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
        effective["seed"] = args.seed
    out_dir = args.out or config.output_dir
    if out_dir is None:
        raise ValidationError("an output directory is required: pass --out or set output_dir")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    state = make_source(config.source)
    occurrences: dict[str, int] = {}
    records = []
    for setting in config.settings:
        key = setting.key()
        occ = occurrences.get(key, 0)
        occurrences[key] = occ + 1
        records.append(
            simulate_counts(
                state,
                setting,
                config.trials_per_setting,
                efficiency=config.efficiency,
                seed=config.seed + occ,
                background=config.background,
            )
        )

    counts_name = "counts.csv" if args.format == "csv" else "counts.json"
    save_count_records(records, out_dir / counts_name, fmt=args.format)
    dump_json(density_matrix_to_obj(state), out_dir / "state.json")
    dump_json(
        {
            "config_hash": config_hash(effective),
            "files": [counts_name, "state.json"],
            "format": args.format,
        },
        out_dir / "manifest.json",
    )
    print(f"wrote {len(records)} count records to {out_dir / counts_name}")
    print(f"wrote the emitted state to {out_dir / 'state.json'}")
    return 0


def cmd_tomo(args) -> int:
    records = load_count_records(args.records)
    arm_counts = {rec.setting.n_arms for rec in records}
    if len(arm_counts) != 1:
        raise ValidationError(f"{args.records}: mixes one-arm and two-arm records")
    dim = 2 if arm_counts == {1} else 4
    truth = load_density_matrix(args.truth) if args.truth else None
    report = reconstruct_from_records(
        records,
        dim,
        n_resamples=args.bootstrap,
        seed=args.seed,
        truth=truth,
        convention=args.convention,
        label=args.label,
    )
    print(f"reconstructed a {dim}x{dim} state from {len(records)} count records")
    print("eigenvalues before projection: " + ", ".join(f"{v:.6f}" for v in report.eigenvalues_raw))
    print(
        "eigenvalues after projection:  "
        + ", ".join(f"{v:.6f}" for v in report.eigenvalues_projected)
    )
    print("projected state:")
    for line in _matrix_lines(report.projected.matrix):
        print("  " + line)
    boot = report.bootstrap
    if boot is not None:
        print(f"bootstrap ({boot.n_resamples} resamples):")
        print(f"  coherence C   = {boot.coherence_mean:.6f} +/- {boot.coherence_std:.6f}")
        print(f"  entropy bound = {boot.entropy_bound_mean:.6f} +/- {boot.entropy_bound_std:.6f}")
        if boot.fidelity_mean is not None:
            print(f"  fidelity      = {boot.fidelity_mean:.6f} +/- {boot.fidelity_std:.6f}")
    if report.fidelity_to_truth is not None:
        print(f"fidelity to the supplied truth state: {report.fidelity_to_truth:.6f}")
    if args.out:
        dump_json(reconstruction_report_to_obj(report), args.out)
        print(f"wrote the reconstruction report to {args.out}")
    return 0


def cmd_audit(args) -> int:
    state = load_density_matrix(args.state, require_psd=False)
    scheme = args.scheme or _infer_scheme(state.dim)
    target = load_density_matrix(args.target) if args.target else None
    report = audit(
        state,
        scheme,
        target=target,
        convention=args.convention,
        raw_length=args.raw_length,
    )
    labels = ("p_H", "p_V") if scheme == "single_HV" else ("p_HH", "p_VV")
    print(f"scheme: {scheme}")
    for label, value in zip(labels, report.probabilities):
        print(f"{label} = {value:.6f}")
    print(f"coherence C = {report.coherence_C:.6f}")
    print(f"min-entropy bound = {report.min_entropy_bound:.6f} bits per bit")
    print(f"empirical min-entropy = {report.empirical_min_entropy:.6f} bits per bit")
    if report.fidelity_to_target is not None:
        print(f"fidelity to target = {report.fidelity_to_target:.6f}")
    if report.chsh_S is not None:
        print(f"CHSH S = {report.chsh_S:.6f}")
    print(f"extractable bits from {args.raw_length} raw = {report.extractable_bits}")
    if args.out:
        dump_json(audit_report_to_obj(report), args.out)
        print(f"wrote the audit report to {args.out}")
    return 0


def cmd_bits(args) -> int:
    state = load_density_matrix(args.state, require_psd=False)
    scheme = args.scheme or _infer_scheme(state.dim)
    raw = generate_bits(state, scheme, args.n_bits, args.seed)
    if args.extractor == "none":
        stream = raw
    elif args.extractor == "von_neumann":
        stream = extract_von_neumann(raw)
    elif args.extractor == "toeplitz":
        report = audit(state, scheme, raw_length=raw.length)
        budget = report.min_entropy_bound * raw.length
        out_len = report.extractable_bits if args.extract_length is None else args.extract_length
        stream = extract_toeplitz(raw, out_len, args.seed, entropy_budget_bits=budget)
        print(f"entropy budget: {budget:.1f} bits from {raw.length} raw")
    else:
        raise ValidationError(f"unknown extractor {args.extractor!r}")
    sidecar = write_bit_stream(stream, args.out)
    print(f"scheme: {scheme}")
    print(f"raw bits drawn: {raw.length}")
    if raw.discard_rate is not None:
        print(f"expected discard rate: {raw.discard_rate:.6f}")
    if stream.length:
        print(f"ones fraction: {float(np.mean(stream.bits)):.6f}")
    print(f"wrote {stream.length} bits to {args.out} (metadata in {sidecar.name})")
    return 0


def cmd_reproduce(args) -> int:
    rows = reference_rows(args.convention)
    name_width = max(len(row.name) for row in rows)
    tallies = {"pass": 0, "fail": 0, "flag": 0, "info": 0}
    for row in rows:
        tallies[row.status] += 1
        published = "   --" if row.published is None else f"{row.published:.3f}"
        deviation = "" if row.deviation is None else f"  |dev| {row.deviation:.6f}"
        print(
            f"[{row.status.upper():4s}] {row.name:<{name_width}}  "
            f"computed {row.computed:9.6f}  published {published}{deviation}"
        )
        if row.note:
            print(f"       note: {row.note}")
    print(
        f"{tallies['pass']} passed, {tallies['fail']} failed, {tallies['flag']} flagged, "
        f"{tallies['info']} informational (tolerance {TOLERANCE})"
    )
    if args.out:
        dump_json(
            [
                {
                    "name": row.name,
                    "computed": row.computed,
                    "published": row.published,
                    "deviation": row.deviation,
                    "status": row.status,
                    "note": row.note,
                }
                for row in rows
            ],
            args.out,
        )
        print(f"wrote the comparison table to {args.out}")
    return 0 if tallies["fail"] == 0 else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrngsim",
        description="Simulate, reconstruct, and certify polarization-based quantum RNG.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw seeded detector counts for a configured source")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", default=None, help="output directory (overrides config output_dir)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tomo", help="reconstruct a density matrix from count records")
    p.add_argument("--records", required=True, help="count records (.json or .csv)")
    p.add_argument("--out", default=None, help="write the full reconstruction report here")
    p.add_argument("--bootstrap", type=int, default=0, help="resamples (0 disables, else >= 100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truth", default=None, help="known source state for a fidelity check")
    p.add_argument("--convention", choices=("root", "squared"), default="root")
    p.add_argument("--label", default="reconstructed")
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("audit", help="certify the randomness of a stored state")
    p.add_argument("--state", required=True, help="density matrix JSON")
    p.add_argument("--scheme", choices=SCHEMES, default=None, help="default: by dimension")
    p.add_argument("--target", default=None, help="ideal state for a fidelity check")
    p.add_argument("--convention", choices=("root", "squared"), default="root")
    p.add_argument("--raw-length", dest="raw_length", type=int, default=0)
    p.add_argument("--out", default=None, help="write the audit report here")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bits", help="generate a seeded bit stream from a stored state")
    p.add_argument("--state", required=True, help="density matrix JSON")
    p.add_argument("--scheme", choices=SCHEMES, default=None, help="default: by dimension")
    p.add_argument("--n-bits", dest="n_bits", type=int, required=True, help="raw bits to draw")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output .bin path (sidecar JSON is added)")
    p.add_argument(
        "--extractor", choices=("none", "von_neumann", "toeplitz"), default="none"
    )
    p.add_argument(
        "--extract-length",
        dest="extract_length",
        type=int,
        default=None,
        help="toeplitz output length (default: the full entropy budget)",
    )
    p.set_defaults(func=cmd_bits)

    p = sub.add_parser(
        "reproduce-paper",
        help="recompute the bundled published results and compare at 3-decimal precision",
    )
    p.add_argument("--convention", choices=("root", "squared"), default="root")
    p.add_argument("--out", default=None, help="write the comparison table here")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except QrngSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
