"""Command-line entry point: ``quasidarwin {exact,sweep,circuit,bench}``.

Usage:
    quasidarwin exact --tau 0,2.21,3.66
    quasidarwin sweep --omega 0,0.5,1,1.5 --settings 500 --seed 7 --format csv --out results/sweep
    quasidarwin circuit --shots 200000 --noise ibm-torino --out results/circuit
    quasidarwin bench --shots 10000
    quasidarwin sweep --config results/sweep/manifest.json   # byte-identical rerun

Every run writes its outputs plus a ``manifest.json`` (resolved config, seed, version) to
the output directory. Errors print a single ``error[<category>]: <message>`` line on stderr
and exit with the category's status code.
"""

import argparse
import json
import logging
import sys
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any, Literal, NoReturn, Self

import anyio
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from quasidarwin.circuit.cycle_test import (
    KDEstimate,
    OutcomePart,
    aestimate_kd,
    build_cycle_test,
    cnot_count,
)
from quasidarwin.circuit.noise import NOISE_ALIASES, NoiseModel, noise_preset, preset_names
from quasidarwin.constants import (
    BENCHMARK_OMEGA,
    BENCHMARK_TAUS,
    DEFAULT_SHOTS,
    DEFAULT_TRAJECTORIES,
    DEFAULT_TROTTER_STEPS,
    DEFAULT_WORKERS,
)
from quasidarwin.core.exceptions import ConfigError, InvalidSettingError, OutputError, QuasiDarwinError
from quasidarwin.core.kdq import (
    BasisLabel,
    InferenceResult,
    KDAnalysis,
    MeasurementSetting,
    analyze,
    basis_projector,
    benchmark_params,
    benchmark_setting,
    bloch_state,
    infer_benchmark_setting,
    qubit_state,
)
from quasidarwin.core.model import ModelParams
from quasidarwin.core.sweep import CdfDataset, HeatmapDataset, SweepConfig, setting_for, sweep_cdf, sweep_heatmap
from quasidarwin.reference import load_reference
from quasidarwin.utils.logging import RunLogger, configure_logging, render_table
from quasidarwin.utils.output import write_csv, write_json, write_manifest, write_text
from quasidarwin.utils.serialization import ComplexArray, complex_columns

__all__ = [
    "CircuitOptions",
    "Command",
    "OutputOptions",
    "RunConfig",
    "SettingSpec",
    "build_parser",
    "main",
    "run_bench",
    "run_circuit",
    "run_exact",
    "run_sweep",
]

logger = logging.getLogger(__name__)

# Threshold below which a random setting counts as showing no non-classicality
ZERO_THRESHOLD = 1e-5

# Alternative names accepted for setting kinds
SETTING_ALIASES = {"paper-inferred": "benchmark"}


class Command(StrEnum):
    EXACT = "exact"
    SWEEP = "sweep"
    CIRCUIT = "circuit"
    BENCH = "bench"


def _describe_validation(e: ValidationError) -> str:
    err = e.errors()[0]
    loc = ".".join(str(part) for part in err["loc"]) or e.title
    return f"{loc}: {err['msg']}"


class SettingSpec(BaseModel):
    """How the measurement setting is chosen.

    ``benchmark`` is the Z/Y pair on E_1/E_2 with ``|000>``;
    ``bases`` takes Pauli basis names; ``bloch`` takes Bloch vectors for ``A_0`` and ``B_0``;
    ``random`` draws the first Haar-random setting of the run seed; ``paper-inferred`` is
    accepted as another name for ``benchmark``. ``initial`` lists the
    initial factors (state labels or Bloch vectors), defaulting to ``|0...0>``.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["benchmark", "bases", "bloch", "random"] = "benchmark"
    basis_a: BasisLabel = "Z"
    basis_b: BasisLabel = "Y"
    bloch_a: tuple[float, float, float] = (0.0, 0.0, 1.0)
    bloch_b: tuple[float, float, float] = (0.0, 1.0, 0.0)
    initial: tuple[str | tuple[float, float, float], ...] | None = None
    site_a: int = 1
    site_b: int = 2

    @field_validator("kind", mode="before")
    @classmethod
    def _resolve_alias(cls, v: object) -> object:
        return SETTING_ALIASES.get(v, v) if isinstance(v, str) else v

    def _initial_factors(self, n_qubits: int) -> list:
        if self.initial is None:
            return [qubit_state("0") for _ in range(n_qubits)]
        if len(self.initial) != n_qubits:
            raise InvalidSettingError(f"setting.initial: {len(self.initial)} factors for a {n_qubits}-qubit model")
        return [qubit_state(f) if isinstance(f, str) else bloch_state(f) for f in self.initial]

    def resolve(self, params: ModelParams, seed: int) -> MeasurementSetting:
        """Build the setting (at ``time_a = 0``) for a model.

        Raises:
            InvalidSettingError: Naming the offending field.
        """
        try:
            match self.kind:
                case "benchmark":
                    if params.n_env != 2:
                        raise InvalidSettingError("setting.kind: 'benchmark' needs exactly two environment qubits")
                    setting = benchmark_setting()
                case "random":
                    setting = setting_for(seed, params, 0)
                case "bases":
                    setting = MeasurementSetting(
                        site_a=self.site_a,
                        a0=basis_projector(self.basis_a),
                        site_b=self.site_b,
                        b0=basis_projector(self.basis_b),
                        initial_factors=tuple(self._initial_factors(params.n_qubits)),
                    )
                case "bloch":
                    setting = MeasurementSetting.from_states(
                        bloch_state(self.bloch_a),
                        bloch_state(self.bloch_b),
                        self._initial_factors(params.n_qubits),
                        site_a=self.site_a,
                        site_b=self.site_b,
                    )
        except ValidationError as e:
            raise InvalidSettingError(f"setting.{_describe_validation(e)}") from e
        setting.validate_for(params)
        return setting


class CircuitOptions(BaseModel):
    """Shot, Trotter and noise options; ``shots=None`` decodes exact probabilities."""

    model_config = ConfigDict(frozen=True)

    shots: int | None = Field(default=DEFAULT_SHOTS, ge=1)
    n_trotter: int = Field(default=DEFAULT_TROTTER_STEPS, ge=1)
    noise: str = "none"
    custom_noise: NoiseModel | None = None
    n_trajectories: int = Field(default=DEFAULT_TRAJECTORIES, ge=1)
    workers: int = Field(default=DEFAULT_WORKERS, ge=1)
    bench_presets: tuple[str, ...] = ("ibm-torino", "ionq-aria")

    @model_validator(mode="after")
    def _check(self) -> Self:
        for name in (self.noise, *self.bench_presets):
            noise_preset(name, self.custom_noise)
        return self

    def noise_model(self, name: str | None = None) -> NoiseModel | None:
        return noise_preset(self.noise if name is None else name, self.custom_noise)


class OutputOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: Path = Path("results")
    format: Literal["csv", "json"] = "json"
    export_gates: bool = False


class RunConfig(BaseModel):
    """Fully resolved run configuration (also the ``config`` block of a manifest).

    The top-level ``seed`` is authoritative and is copied into ``sweep.seed``.
    """

    model_config = ConfigDict(frozen=True)

    command: Command = Command.EXACT
    model: ModelParams = ModelParams(omega=BENCHMARK_OMEGA)
    setting: SettingSpec = SettingSpec()
    taus: tuple[float, ...] = BENCHMARK_TAUS
    sweep: SweepConfig = SweepConfig()
    circuit: CircuitOptions = CircuitOptions()
    seed: int = Field(default=0, ge=0, lt=2**64)
    output: OutputOptions = OutputOptions()

    @model_validator(mode="before")
    @classmethod
    def _propagate_seed(cls, data: object) -> object:
        if isinstance(data, dict):
            sweep = data.get("sweep") or {}
            if isinstance(sweep, BaseModel):
                sweep = sweep.model_dump()
            data = {**data, "sweep": {**sweep, "seed": data.get("seed", 0)}}
        return data

    @field_validator("taus")
    @classmethod
    def _check_taus(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v or any(t < 0 for t in v):
            raise ValueError("taus must be a nonempty list of nonnegative times")
        return v

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        """Load a JSON config, or the ``config`` block of a previously written manifest.

        Raises:
            ConfigError: If the file is missing, not JSON, or fails validation.
        """
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from e
        if isinstance(data, dict) and isinstance(data.get("config"), dict) and "seed" in data:
            data = data["config"]
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"config {path}: {_describe_validation(e)}") from e

    def with_overrides(self, overrides: dict[str, Any]) -> "RunConfig":
        """Deep-merge ``overrides`` into the dumped config and revalidate."""
        return RunConfig.model_validate(_deep_merge(self.model_dump(mode="json"), overrides))


def _deep_merge(base: dict[str, Any], updates: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


# ---------------------------------------------------------------------------
# Workflows
# ---------------------------------------------------------------------------


def _fmt(x: float, digits: int = 3) -> str:
    return f"{x:.{digits}f}"


def _finish(config: RunConfig, outputs: list[Path]) -> Path:
    return write_manifest(config.output.path, config.model_dump(mode="json"), config.seed, outputs)


class ExactReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: ModelParams
    setting: MeasurementSetting
    analyses: list[KDAnalysis]
    inference: InferenceResult | None = None


def run_exact(config: RunConfig, *, level: int = logging.INFO) -> ExactReport:
    """Exact q, p, modification terms and measures for the configured setting at every τ."""
    params = config.model
    setting = config.setting.resolve(params, config.seed)
    with RunLogger("exact", total=len(config.taus), level=level) as run:
        analyses = []
        for k, tau in enumerate(config.taus):
            analyses.append(analyze(setting.with_time(tau), params))
            run.on_step(k + 1)
        inference = infer_benchmark_setting(params) if config.setting.kind == "benchmark" else None
        if inference is not None and params == benchmark_params() and not inference.matched:
            run.warning("No basis pair reproduces the reference N_AS values")
        report = ExactReport(model=params, setting=setting, analyses=analyses, inference=inference)

        out = config.output.path
        if config.output.format == "json":
            outputs = [write_json(out / "exact.json", report.model_dump(mode="json"))]
        else:
            q_rows = [
                {
                    "tau": a.time_a,
                    "i": i,
                    "j": j,
                    **complex_columns("q", a.kd.q[i, j]),
                    "p": float(a.tpm.p[i, j]),
                    "real_term": float(a.terms.real_term[i, j]),
                    "imag_term": float(a.terms.imag_term[i, j]),
                }
                for a in analyses
                for i in (0, 1)
                for j in (0, 1)
            ]
            m_rows = [{"tau": a.time_a, **a.report.model_dump()} for a in analyses]
            outputs = [
                write_csv(out / "exact_q.csv", q_rows, ["tau", "i", "j", "q_re", "q_im", "p", "real_term", "imag_term"]),
                write_csv(out / "exact_measures.csv", m_rows, list(m_rows[0])),
            ]
        outputs.append(_finish(config, outputs))

        run.show(
            render_table(
                "Non-classicality",
                ["τ_a", "N_AS", "N_H", "N_∞", "classical"],
                [
                    [f"{a.time_a:g}", _fmt(a.report.n_as), _fmt(a.report.n_h), _fmt(a.report.n_inf), str(a.kd.is_classical())]
                    for a in analyses
                ],
                caption=f"Δ={params.delta:g} Ω={params.omega:g} J={list(params.couplings)}",
            )
        )
        run.info("Wrote %s", ", ".join(str(p) for p in outputs))
    return report


@dataclass
class SweepReport:
    heatmap: HeatmapDataset
    cdf: CdfDataset
    outputs: list[Path] = field(default_factory=list)


def run_sweep(config: RunConfig, *, level: int = logging.INFO) -> SweepReport:
    """Heatmap over (Ω, τ) and CDF at ``sweep.cdf_tau`` for random settings."""
    sweep: SweepConfig = config.sweep
    with RunLogger("sweep", level=level) as run:
        heatmap = sweep_heatmap(sweep, config.model, on_progress=run.on_step)
        run.info("Heatmap done; sampling the CDF at τ_a=%g", sweep.cdf_tau)
        cdf = sweep_cdf(sweep, config.model, on_progress=run.on_step)

        out = config.output.path
        if config.output.format == "json":
            outputs = [
                write_json(out / "heatmap.json", heatmap.to_dict()),
                write_json(out / "cdf.json", cdf.to_dict()),
            ]
        else:
            outputs = [
                write_csv(out / "heatmap.csv", heatmap.to_rows(), ["omega", "tau", "bin_lo", "bin_hi", "count"]),
                write_csv(out / "designated.csv", heatmap.designated_rows(), ["omega", "tau", "value"]),
                write_csv(out / "cdf.csv", cdf.to_rows(), ["omega", "value", "cum_frac"]),
            ]
        outputs.append(_finish(config, outputs))

        below = cdf.count_below(ZERO_THRESHOLD)
        rows = [
            [f"{h['omega']:g}", f"{h['min']:.3g}", f"{h['median']:.3g}", f"{h['max']:.3g}", f"{underflow:.1%}", str(n)]
            for h, underflow, n in zip(
                heatmap.summary(),
                (heatmap.underflow_fraction(w) for w in range(heatmap.omegas.size)),
                below,
                strict=True,
            )
        ]
        run.show(
            render_table(
                f"{sweep.measure} over {sweep.n_settings} settings",
                ["Ω", "min", "median", "max", "underflow", f"< {ZERO_THRESHOLD:g} at τ={cdf.tau_a:g}"],
                rows,
            )
        )
        run.info("Wrote %s", ", ".join(str(p) for p in outputs))
    return SweepReport(heatmap=heatmap, cdf=cdf, outputs=outputs)


class CircuitRow(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau: float
    estimate: KDEstimate
    exact: ComplexArray
    rmse: float
    n_as_exact: float


class CircuitReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    noise: str
    shots: int | None
    n_trotter: int
    rows: list[CircuitRow]


def _estimate_rows(
    config: RunConfig,
    setting: MeasurementSetting,
    noise: NoiseModel | None,
    stream: int,
    run: RunLogger,
    done_offset: int,
    total: int,
) -> list[CircuitRow]:
    params = config.model
    opts = config.circuit
    rows = []
    for t, tau in enumerate(config.taus):
        timed = setting.with_time(tau)
        exact = analyze(timed, params)
        offset = done_offset + 8 * t
        estimate = anyio.run(
            lambda timed=timed, t=t, offset=offset: aestimate_kd(
                timed,
                params,
                opts.shots,
                noise,
                opts.n_trotter,
                seed=config.seed,
                stream=(t, stream),
                n_trajectories=opts.n_trajectories,
                workers=opts.workers,
                on_progress=lambda d, _n: run.on_step(offset + d, total),
            )
        )
        rows.append(
            CircuitRow(
                tau=tau,
                estimate=estimate,
                exact=exact.kd.q,
                rmse=estimate.rmse(exact.kd.q),
                n_as_exact=exact.report.n_as,
            )
        )
    return rows


def _export_gates(config: RunConfig, setting: MeasurementSetting) -> list[Path]:
    paths = []
    for tau in config.taus:
        for i in (0, 1):
            for j in (0, 1):
                for part in OutcomePart:
                    circuit = build_cycle_test(setting.with_time(tau), config.model, (i, j), part, config.circuit.n_trotter)
                    name = f"gates/tau{tau:g}_q{i}{j}_{part.value.lower()}.txt"
                    header = f"# cnot_count {cnot_count(circuit)}\n"
                    paths.append(write_text(config.output.path / name, header + circuit.to_text()))
    return paths


def run_circuit(config: RunConfig, *, level: int = logging.INFO) -> CircuitReport:
    """Cycle-test estimates of the KD table with standard errors, σ-deviations and RMSE."""
    params = config.model
    setting = config.setting.resolve(params, config.seed)
    opts = config.circuit
    noise = opts.noise_model()
    total = 8 * len(config.taus)
    with RunLogger("circuit", total=total, level=level) as run:
        rows = _estimate_rows(config, setting, noise, 0, run, 0, total)
        report = CircuitReport(noise="none" if noise is None else noise.name, shots=opts.shots, n_trotter=opts.n_trotter, rows=rows)

        out = config.output.path
        if config.output.format == "json":
            outputs = [write_json(out / "circuit.json", report.model_dump(mode="json"))]
        else:
            entry_rows = []
            for row in rows:
                dev_re, dev_im = row.estimate.deviation_sigma(row.exact)
                for i in (0, 1):
                    for j in (0, 1):
                        entry_rows.append(
                            {
                                "tau": row.tau,
                                "i": i,
                                "j": j,
                                **complex_columns("est", row.estimate.q[i, j]),
                                "se_re": float(row.estimate.stderr_re[i, j]),
                                "se_im": float(row.estimate.stderr_im[i, j]),
                                **complex_columns("exact", row.exact[i, j]),
                                "dev_re_sigma": float(dev_re[i, j]),
                                "dev_im_sigma": float(dev_im[i, j]),
                            }
                        )
            summary_rows = [
                {"tau": r.tau, "rmse": r.rmse, "n_as_estimate": r.estimate.n_as, "n_as_exact": r.n_as_exact} for r in rows
            ]
            outputs = [
                write_csv(out / "circuit_entries.csv", entry_rows, list(entry_rows[0])),
                write_csv(out / "circuit_summary.csv", summary_rows, list(summary_rows[0])),
            ]
        if config.output.export_gates:
            outputs += _export_gates(config, setting)
        outputs.append(_finish(config, outputs))

        run.show(
            render_table(
                "Circuit estimate",
                ["τ_a", "RMSE", "N_AS est.", "N_AS exact", "max dev (σ)"],
                [
                    [
                        f"{r.tau:g}",
                        _fmt(r.rmse),
                        _fmt(r.estimate.n_as),
                        _fmt(r.n_as_exact),
                        _fmt(float(np.max(np.concatenate([d.ravel() for d in r.estimate.deviation_sigma(r.exact)]))), 2),
                    ]
                    for r in rows
                ],
                caption=f"noise={report.noise} shots={opts.shots or 'exact'} trotter={opts.n_trotter}",
            )
        )
        run.info("Wrote %d files to %s", len(outputs), out)
    return report


class BenchRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    quantity: Literal["N_AS", "RMSE"]
    source: Literal["computed", "reference"]
    taus: tuple[float, ...]
    values: tuple[float, ...]


class BenchReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: list[BenchRow]
    provenance: str

    def table(self, quantity: str) -> list[BenchRow]:
        return [r for r in self.rows if r.quantity == quantity]


def run_bench(config: RunConfig, *, level: int = logging.INFO) -> BenchReport:
    """Theory, noiseless-circuit and noisy-circuit N_AS / RMSE per τ, next to published values."""
    params = config.model
    setting = config.setting.resolve(params, config.seed)
    opts = config.circuit
    taus = config.taus
    variants: list[tuple[str, NoiseModel | None]] = [("circuit (noiseless)", None)]
    variants += [(f"circuit ({name})", opts.noise_model(name)) for name in opts.bench_presets]
    total = 8 * len(taus) * len(variants)

    rows = [
        BenchRow(
            label="theory",
            quantity="N_AS",
            source="computed",
            taus=taus,
            values=tuple(analyze(setting.with_time(t), params).report.n_as for t in taus),
        )
    ]
    with RunLogger("bench", total=total, level=level) as run:
        for v, (label, noise) in enumerate(variants):
            estimates = _estimate_rows(config, setting, noise, v, run, 8 * len(taus) * v, total)
            rows.append(BenchRow(label=label, quantity="N_AS", source="computed", taus=taus, values=tuple(r.estimate.n_as for r in estimates)))
            rows.append(BenchRow(label=label, quantity="RMSE", source="computed", taus=taus, values=tuple(r.rmse for r in estimates)))

        reference = load_reference()
        for quantity, table in (("N_AS", reference.n_as), ("RMSE", reference.rmse)):
            for label, values in table.items():
                if label == "theory":
                    continue
                rows.append(BenchRow(label=label, quantity=quantity, source="reference", taus=reference.taus, values=values))
        report = BenchReport(rows=rows, provenance=reference.provenance)

        out = config.output.path
        if config.output.format == "json":
            outputs = [write_json(out / "bench.json", report.model_dump(mode="json"))]
        else:
            flat = [
                {"label": r.label, "quantity": r.quantity, "source": r.source, "tau": t, "value": value}
                for r in rows
                for t, value in zip(r.taus, r.values, strict=True)
            ]
            outputs = [write_csv(out / "bench.csv", flat, ["label", "quantity", "source", "tau", "value"])]
        outputs.append(_finish(config, outputs))

        for quantity in ("N_AS", "RMSE"):
            run.show(
                render_table(
                    quantity,
                    ["", *(f"τ_a={t:g}" for t in taus)],
                    [
                        [f"{r.label}{' [ref]' if r.source == 'reference' else ''}", *(_fmt(x) for x in r.values)]
                        for r in report.table(quantity)
                    ],
                    caption="[ref] rows are published hardware/simulator values" if quantity == "RMSE" else None,
                )
            )
        run.info("Wrote %s", ", ".join(str(p) for p in outputs))
    return report


RUNNERS: dict[Command, Callable[..., object]] = {
    Command.EXACT: run_exact,
    Command.SWEEP: run_sweep,
    Command.CIRCUIT: run_circuit,
    Command.BENCH: run_bench,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _shots(text: str) -> int | None:
    if text == "exact":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'exact', got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as ``ConfigError`` instead of printing usage and exiting."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config or manifest to start from")
    common.add_argument("--seed", type=int, help="Unsigned 64-bit seed")
    common.add_argument("--omega", type=_float_list, help="Transverse field Ω (sweep: comma-separated grid)")
    common.add_argument("--tau", type=_float_list, help="τ_a values (sweep: the CDF time)")
    common.add_argument(
        "--shots", type=_shots, default=argparse.SUPPRESS, help="Shots per circuit part, or 'exact'"
    )
    common.add_argument("--trotter", type=int, help="Trotter steps")
    common.add_argument(
        "--noise",
        choices=[*preset_names(), *NOISE_ALIASES],
        help="Noise preset for 'circuit'",
    )
    common.add_argument("--setting", choices=["benchmark", "random", *SETTING_ALIASES], help="Measurement setting")
    common.add_argument("--settings", type=int, help="Number of random settings for 'sweep'")
    common.add_argument("--measure", choices=["N_AS", "N_H", "N_INF"], help="Measure for 'sweep'")
    common.add_argument("--trajectories", type=int, help="Noise trajectories per circuit")
    common.add_argument("--workers", type=int, help="Worker threads")
    common.add_argument("--out", type=Path, help="Output directory")
    common.add_argument("--format", choices=["csv", "json"], help="Output format")
    common.add_argument("--export-gates", action="store_true", default=None, help="Write plain-text gate lists")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Only warnings and errors")

    parser = _Parser(
        prog="quasidarwin",
        description="Kirkwood-Dirac non-classicality and Quantum Darwinism in a qubit model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("exact", parents=[common], help="Exact KD distributions and measures")
    sub.add_parser("sweep", parents=[common], help="Random-setting heatmap and CDF")
    sub.add_parser("circuit", parents=[common], help="Cycle-test circuit estimates")
    sub.add_parser("bench", parents=[common], help="Theory vs circuit vs published values")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    command = Command(args.command)
    o: dict[str, Any] = {"command": command.value}
    if args.seed is not None:
        o["seed"] = args.seed
    if args.omega is not None:
        if command == Command.SWEEP:
            o.setdefault("sweep", {})["omega_grid"] = args.omega
        elif len(args.omega) != 1:
            raise ConfigError(f"--omega takes a single value for '{command.value}'")
        else:
            o["model"] = {"omega": args.omega[0]}
    if args.tau is not None:
        if command == Command.SWEEP:
            if len(args.tau) != 1:
                raise ConfigError("--tau takes a single CDF time for 'sweep'")
            o.setdefault("sweep", {})["cdf_tau"] = args.tau[0]
        else:
            o["taus"] = args.tau
    if args.settings is not None:
        o.setdefault("sweep", {})["n_settings"] = args.settings
    if args.measure is not None:
        o.setdefault("sweep", {})["measure"] = args.measure
    if args.workers is not None:
        o.setdefault("sweep", {})["workers"] = args.workers
        o.setdefault("circuit", {})["workers"] = args.workers
    circuit = o.setdefault("circuit", {})
    if hasattr(args, "shots"):
        circuit["shots"] = args.shots
    if args.trotter is not None:
        circuit["n_trotter"] = args.trotter
    if args.noise is not None:
        circuit["noise"] = args.noise
    if args.trajectories is not None:
        circuit["n_trajectories"] = args.trajectories
    if args.setting is not None:
        o["setting"] = {"kind": args.setting}
    output: dict[str, Any] = {}
    if args.out is not None:
        output["path"] = str(args.out)
    if args.format is not None:
        output["format"] = args.format
    if args.export_gates:
        output["export_gates"] = True
    if output:
        o["output"] = output
    return o


def load_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    return base.with_overrides(_overrides(args))


def _fail(category: str, message: str) -> None:
    print(f"error[{category}]: {' '.join(message.split())}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        _fail(e.category, str(e))
        return e.exit_code
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    configure_logging(level)

    try:
        config = load_config(args)
        logger.debug("Resolved config: %s", config.model_dump(mode="json"))
        RUNNERS[config.command](config, level=level)
    except QuasiDarwinError as e:
        _fail(e.category, str(e))
        return e.exit_code
    except ValidationError as e:
        _fail(ConfigError.category, _describe_validation(e))
        return ConfigError.exit_code
    except OSError as e:
        _fail(OutputError.category, str(e))
        return OutputError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
