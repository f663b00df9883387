"""JSON and CSV artifact input/output.

Conventions, chosen so that identical inputs give byte-identical files:

- JSON is written with sorted keys, two-space indent, and a trailing
  newline. No artifact contains timestamps, hostnames, or library versions.
- Complex matrices serialize as {"dim": n, "entries": [[re, im], ...]} in
  row-major order.
- Count tables are keyed by outcome label: "0"/"1" for one arm,
  "00"/"01"/"10"/"11" for two (first digit is arm 1).
- Bit streams are packed little-endian (stream bit i is bit i % 8 of byte
  i // 8) into a .bin file, with a JSON sidecar at <path>.json holding the
  exact bit length, provenance, seed, and discard rate.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .optics import ArmSetting, CountRecord, MeasurementSetting, SourceModel
from .randomness import AuditReport, BitStream
from .states import DensityMatrix
from .tomography import BootstrapResult, ReconstructionReport

_SINGLE_OUTCOMES = ("0", "1")
_PAIR_OUTCOMES = ("00", "01", "10", "11")

_CSV_SINGLE_HEADER = ["arm1_hwp", "arm1_qwp", "c0", "c1", "total_trials", "seed"]
_CSV_PAIR_HEADER = [
    "arm1_hwp",
    "arm1_qwp",
    "arm2_hwp",
    "arm2_qwp",
    "c00",
    "c01",
    "c10",
    "c11",
    "total_trials",
    "seed",
]


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def dump_json(obj, path) -> None:
    Path(path).write_text(dumps_json(obj))


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc


def _require_keys(data, keys, context: str) -> None:
    if not isinstance(data, dict):
        raise ValidationError(f"{context}: expected an object, got {type(data).__name__}")
    missing = [k for k in keys if k not in data]
    if missing:
        raise ValidationError(f"{context}: missing key(s) {', '.join(missing)}")


def _as_number(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{context}: expected a number, got {value!r}")
    return float(value)


def _as_int(value, context: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{context}: expected an integer, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# complex matrices and states


def complex_matrix_to_obj(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    entries = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"dim": n, "entries": entries}


def obj_to_complex_matrix(data, context: str = "matrix") -> np.ndarray:
    _require_keys(data, ("dim", "entries"), context)
    n = _as_int(data["dim"], f"{context}.dim")
    entries = data["entries"]
    if not isinstance(entries, list) or len(entries) != n * n:
        raise ValidationError(f"{context}.entries: expected {n * n} [re, im] pairs")
    flat = np.empty(n * n, dtype=complex)
    for i, entry in enumerate(entries):
        if not isinstance(entry, list) or len(entry) != 2:
            raise ValidationError(f"{context}.entries[{i}]: expected an [re, im] pair")
        flat[i] = complex(
            _as_number(entry[0], f"{context}.entries[{i}][0]"),
            _as_number(entry[1], f"{context}.entries[{i}][1]"),
        )
    return flat.reshape(n, n)


def density_matrix_to_obj(rho: DensityMatrix) -> dict:
    obj = complex_matrix_to_obj(rho.matrix)
    obj["label"] = rho.label
    obj["tensor_order"] = rho.tensor_order
    return obj


def obj_to_density_matrix(data, context: str = "state", require_psd: bool = True) -> DensityMatrix:
    m = obj_to_complex_matrix(data, context)
    label = data.get("label", "")
    if not isinstance(label, str):
        raise ValidationError(f"{context}.label: expected a string")
    tensor_order = data.get("tensor_order")
    if tensor_order is not None and not isinstance(tensor_order, str):
        raise ValidationError(f"{context}.tensor_order: expected a string or null")
    return DensityMatrix(m, label=label, tensor_order=tensor_order, require_psd=require_psd)


def load_density_matrix(path, require_psd: bool = True) -> DensityMatrix:
    return obj_to_density_matrix(load_json(path), context=str(path), require_psd=require_psd)


# ---------------------------------------------------------------------------
# settings and count records


def _arm_to_obj(arm: ArmSetting) -> dict:
    return {"hwp": arm.hwp, "qwp": arm.qwp}


def _obj_to_arm(data, context: str) -> ArmSetting:
    _require_keys(data, ("hwp", "qwp"), context)
    return ArmSetting(
        _as_number(data["hwp"], f"{context}.hwp"),
        _as_number(data["qwp"], f"{context}.qwp"),
    )


def setting_to_obj(setting: MeasurementSetting) -> dict:
    obj = {"arm1": _arm_to_obj(setting.arm1)}
    if setting.arm2 is not None:
        obj["arm2"] = _arm_to_obj(setting.arm2)
    return obj


def obj_to_setting(data, context: str = "setting") -> MeasurementSetting:
    _require_keys(data, ("arm1",), context)
    arm1 = _obj_to_arm(data["arm1"], f"{context}.arm1")
    arm2 = None
    if data.get("arm2") is not None:
        arm2 = _obj_to_arm(data["arm2"], f"{context}.arm2")
    return MeasurementSetting(arm1, arm2)


def count_record_to_obj(rec: CountRecord) -> dict:
    labels = _SINGLE_OUTCOMES if rec.setting.n_outcomes == 2 else _PAIR_OUTCOMES
    return {
        "setting": setting_to_obj(rec.setting),
        "counts": {label: int(c) for label, c in zip(labels, rec.counts)},
        "total_trials": rec.total_trials,
        "seed": rec.seed,
    }


def obj_to_count_record(data, context: str = "record") -> CountRecord:
    _require_keys(data, ("setting", "counts", "total_trials", "seed"), context)
    setting = obj_to_setting(data["setting"], f"{context}.setting")
    labels = _SINGLE_OUTCOMES if setting.n_outcomes == 2 else _PAIR_OUTCOMES
    counts_obj = data["counts"]
    if not isinstance(counts_obj, dict):
        raise ValidationError(f"{context}.counts: expected an object")
    extra = sorted(set(counts_obj) - set(labels))
    if extra:
        raise ValidationError(f"{context}.counts: unexpected outcome key(s) {', '.join(extra)}")
    counts = tuple(
        _as_int(counts_obj.get(label, 0), f"{context}.counts[{label!r}]") for label in labels
    )
    return CountRecord(
        setting=setting,
        counts=counts,
        total_trials=_as_int(data["total_trials"], f"{context}.total_trials"),
        seed=_as_int(data["seed"], f"{context}.seed"),
    )


def _records_to_csv_rows(records) -> tuple[list[str], list[list]]:
    n_arms = {rec.setting.n_arms for rec in records}
    if len(n_arms) != 1:
        raise ValidationError("CSV output cannot mix one-arm and two-arm records")
    if n_arms == {1}:
        header = _CSV_SINGLE_HEADER
        rows = [
            [rec.setting.arm1.hwp, rec.setting.arm1.qwp, *rec.counts, rec.total_trials, rec.seed]
            for rec in records
        ]
    else:
        header = _CSV_PAIR_HEADER
        rows = [
            [
                rec.setting.arm1.hwp,
                rec.setting.arm1.qwp,
                rec.setting.arm2.hwp,
                rec.setting.arm2.qwp,
                *rec.counts,
                rec.total_trials,
                rec.seed,
            ]
            for rec in records
        ]
    return header, rows


def save_count_records(records, path, fmt: str = "json") -> None:
    records = list(records)
    if not records:
        raise ValidationError("no count records to save")
    path = Path(path)
    if fmt == "json":
        dump_json([count_record_to_obj(rec) for rec in records], path)
    elif fmt == "csv":
        header, rows = _records_to_csv_rows(records)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        raise ValidationError(f"unknown count record format {fmt!r}")


def _csv_row_to_record(header, row, context: str) -> CountRecord:
    if len(row) != len(header):
        raise ValidationError(f"{context}: expected {len(header)} fields, got {len(row)}")
    values = dict(zip(header, row))
    try:
        arm1 = ArmSetting(float(values["arm1_hwp"]), float(values["arm1_qwp"]))
        if header is _CSV_PAIR_HEADER:
            arm2 = ArmSetting(float(values["arm2_hwp"]), float(values["arm2_qwp"]))
            counts = tuple(int(values[f"c{label}"]) for label in _PAIR_OUTCOMES)
            setting = MeasurementSetting(arm1, arm2)
        else:
            counts = tuple(int(values[f"c{label}"]) for label in _SINGLE_OUTCOMES)
            setting = MeasurementSetting(arm1)
        return CountRecord(
            setting=setting,
            counts=counts,
            total_trials=int(values["total_trials"]),
            seed=int(values["seed"]),
        )
    except ValueError as exc:
        raise ValidationError(f"{context}: {exc}") from exc


def load_count_records(path) -> list[CountRecord]:
    """Load count records from a .json or .csv file (dispatch on suffix)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValidationError(f"{path}: empty CSV file") from None
            if header == _CSV_SINGLE_HEADER:
                canonical = _CSV_SINGLE_HEADER
            elif header == _CSV_PAIR_HEADER:
                canonical = _CSV_PAIR_HEADER
            else:
                raise ValidationError(f"{path}: unrecognized CSV header {header}")
            records = [
                _csv_row_to_record(canonical, row, f"{path} row {i}")
                for i, row in enumerate(reader, start=2)
            ]
    else:
        data = load_json(path)
        if isinstance(data, dict) and "records" in data:
            data = data["records"]
        if not isinstance(data, list):
            raise ValidationError(f"{path}: expected a list of count records")
        records = [
            obj_to_count_record(item, f"{path} record {i}") for i, item in enumerate(data)
        ]
    if not records:
        raise ValidationError(f"{path}: no count records found")
    return records


# ---------------------------------------------------------------------------
# bit streams


def bit_stream_to_bytes(stream: BitStream) -> bytes:
    return np.packbits(stream.bits, bitorder="little").tobytes()


def _sidecar_path(bin_path) -> Path:
    bin_path = Path(bin_path)
    return bin_path.with_name(bin_path.name + ".json")


def write_bit_stream(stream: BitStream, bin_path) -> Path:
    """Write packed bits to bin_path and a metadata sidecar next to it."""
    bin_path = Path(bin_path)
    bin_path.write_bytes(bit_stream_to_bytes(stream))
    sidecar = _sidecar_path(bin_path)
    dump_json(
        {
            "length": stream.length,
            "provenance": stream.provenance,
            "seed": stream.seed,
            "discard_rate": stream.discard_rate,
        },
        sidecar,
    )
    return sidecar


def read_bit_stream(bin_path) -> BitStream:
    bin_path = Path(bin_path)
    sidecar = _sidecar_path(bin_path)
    if not sidecar.exists():
        raise ValidationError(f"{bin_path}: missing metadata sidecar {sidecar.name}")
    meta = load_json(sidecar)
    _require_keys(meta, ("length", "provenance"), str(sidecar))
    length = _as_int(meta["length"], f"{sidecar}.length")
    if length < 0:
        raise ValidationError(f"{sidecar}.length: must be nonnegative")
    packed = np.frombuffer(bin_path.read_bytes(), dtype=np.uint8)
    if packed.size * 8 < length or packed.size > (length + 7) // 8:
        raise ValidationError(
            f"{bin_path}: {packed.size} bytes does not match declared length {length}"
        )
    bits = np.unpackbits(packed, bitorder="little")[:length]
    provenance = meta["provenance"]
    if provenance not in ("simulated", "external"):
        raise ValidationError(f"{sidecar}.provenance: expected 'simulated' or 'external'")
    seed = meta.get("seed")
    if seed is not None:
        seed = _as_int(seed, f"{sidecar}.seed")
    discard = meta.get("discard_rate")
    if discard is not None:
        discard = _as_number(discard, f"{sidecar}.discard_rate")
    return BitStream(bits=bits, provenance=provenance, seed=seed, discard_rate=discard)


# ---------------------------------------------------------------------------
# reports


def audit_report_to_obj(report: AuditReport) -> dict:
    return {
        "probabilities": [float(p) for p in report.probabilities],
        "coherence_C": report.coherence_C,
        "min_entropy_bound": report.min_entropy_bound,
        "empirical_min_entropy": report.empirical_min_entropy,
        "fidelity_to_target": report.fidelity_to_target,
        "chsh_S": report.chsh_S,
        "extractable_bits": report.extractable_bits,
    }


def _bootstrap_to_obj(boot: BootstrapResult) -> dict:
    return {
        "n_resamples": boot.n_resamples,
        "entry_std": [[float(v) for v in row] for row in boot.entry_std],
        "coherence_mean": boot.coherence_mean,
        "coherence_std": boot.coherence_std,
        "entropy_bound_mean": boot.entropy_bound_mean,
        "entropy_bound_std": boot.entropy_bound_std,
        "fidelity_mean": boot.fidelity_mean,
        "fidelity_std": boot.fidelity_std,
    }


def reconstruction_report_to_obj(report: ReconstructionReport) -> dict:
    return {
        "label": report.projected.label,
        "dim": report.dim,
        "stokes": [float(s) for s in report.stokes],
        "raw": complex_matrix_to_obj(report.raw),
        "projected": density_matrix_to_obj(report.projected),
        "eigenvalues_raw": [float(v) for v in report.eigenvalues_raw],
        "eigenvalues_projected": [float(v) for v in report.eigenvalues_projected],
        "bootstrap": None if report.bootstrap is None else _bootstrap_to_obj(report.bootstrap),
        "fidelity_to_truth": report.fidelity_to_truth,
    }


# ---------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class RunConfig:
    """Parsed simulation run configuration."""

    source: SourceModel
    settings: tuple[MeasurementSetting, ...]
    trials_per_setting: int
    efficiency: float
    seed: int
    background: float = 0.0
    output_dir: str | None = None


def _obj_to_amplitudes(data, context: str) -> tuple:
    if not isinstance(data, list) or not data:
        raise ValidationError(f"{context}: expected a nonempty list of amplitudes")
    out = []
    for i, item in enumerate(data):
        if isinstance(item, list):
            if len(item) != 2:
                raise ValidationError(f"{context}[{i}]: expected [re, im]")
            out.append(
                complex(
                    _as_number(item[0], f"{context}[{i}][0]"),
                    _as_number(item[1], f"{context}[{i}][1]"),
                )
            )
        else:
            out.append(complex(_as_number(item, f"{context}[{i}]")))
    return tuple(out)


def obj_to_source(data, context: str = "config.source") -> SourceModel:
    _require_keys(data, ("kind",), context)
    kind = data["kind"]
    if kind == "pure":
        _require_keys(data, ("amplitudes",), context)
        return SourceModel(
            kind="pure",
            amplitudes=_obj_to_amplitudes(data["amplitudes"], f"{context}.amplitudes"),
            tensor_order=data.get("tensor_order"),
        )
    if kind == "classical_mixture":
        _require_keys(data, ("components",), context)
        comps = data["components"]
        if not isinstance(comps, list) or not comps:
            raise ValidationError(f"{context}.components: expected a nonempty list")
        parsed = []
        for i, comp in enumerate(comps):
            ctx = f"{context}.components[{i}]"
            _require_keys(comp, ("amplitudes", "weight"), ctx)
            parsed.append(
                (
                    _obj_to_amplitudes(comp["amplitudes"], f"{ctx}.amplitudes"),
                    _as_number(comp["weight"], f"{ctx}.weight"),
                )
            )
        return SourceModel(
            kind="classical_mixture",
            components=tuple(parsed),
            tensor_order=data.get("tensor_order"),
        )
    if kind == "bell_phi_plus":
        return SourceModel(
            kind="bell_phi_plus",
            phase=_as_number(data.get("phase", 0.0), f"{context}.phase"),
            visibility=_as_number(data.get("visibility", 1.0), f"{context}.visibility"),
        )
    if kind == "custom":
        _require_keys(data, ("matrix",), context)
        return SourceModel(
            kind="custom",
            matrix=obj_to_complex_matrix(data["matrix"], f"{context}.matrix"),
            tensor_order=data.get("tensor_order"),
        )
    raise ValidationError(f"{context}.kind: unknown source kind {kind!r}")


def _obj_to_config_setting(item, context: str) -> MeasurementSetting:
    if isinstance(item, str):
        from .tomography import BASIS_NAMES, pair_setting, single_setting

        if "x" in item:
            left, _, right = item.partition("x")
            if left not in BASIS_NAMES or right not in BASIS_NAMES:
                raise ValidationError(
                    f"{context}: expected a basis pair like 'HVxDA', got {item!r}"
                )
            return pair_setting(left, right)
        if item not in BASIS_NAMES:
            raise ValidationError(f"{context}: unknown basis name {item!r}")
        return single_setting(item)
    return obj_to_setting(item, context)


def obj_to_run_config(data, context: str = "config") -> RunConfig:
    _require_keys(data, ("source", "settings", "trials_per_setting", "seed"), context)
    settings_obj = data["settings"]
    if not isinstance(settings_obj, list) or not settings_obj:
        raise ValidationError(f"{context}.settings: expected a nonempty list")
    settings = tuple(
        _obj_to_config_setting(item, f"{context}.settings[{i}]")
        for i, item in enumerate(settings_obj)
    )
    arm_counts = {s.n_arms for s in settings}
    if len(arm_counts) != 1:
        raise ValidationError(f"{context}.settings: cannot mix one-arm and two-arm settings")
    trials = _as_int(data["trials_per_setting"], f"{context}.trials_per_setting")
    if trials <= 0:
        raise ValidationError(f"{context}.trials_per_setting: must be positive, got {trials}")
    efficiency = _as_number(data.get("efficiency", 1.0), f"{context}.efficiency")
    if not (0.0 < efficiency <= 1.0):
        raise ValidationError(f"{context}.efficiency: must be in (0, 1], got {efficiency}")
    background = _as_number(data.get("background", 0.0), f"{context}.background")
    if not (0.0 <= background < 1.0):
        raise ValidationError(f"{context}.background: must be in [0, 1), got {background}")
    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ValidationError(f"{context}.output_dir: expected a string or null")
    source = obj_to_source(data["source"], f"{context}.source")
    n_arms = settings[0].n_arms
    from .optics import make_source

    state = make_source(source)
    expected_dim = 2 if n_arms == 1 else 4
    if state.dim != expected_dim:
        raise ValidationError(
            f"{context}: source emits a dim-{state.dim} state but settings have "
            f"{n_arms} arm(s)"
        )
    return RunConfig(
        source=source,
        settings=settings,
        trials_per_setting=trials,
        efficiency=efficiency,
        seed=_as_int(data["seed"], f"{context}.seed"),
        background=background,
        output_dir=output_dir,
    )


def load_run_config(path) -> RunConfig:
    data = load_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a configuration object")
    return obj_to_run_config(data, context=str(path))


def config_hash(data) -> str:
    """Stable hash of a parsed JSON configuration object."""
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
