from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import typer
from dotenv import load_dotenv

from .bounds import (
    COMPARE_COLUMNS,
    chen_stein_report,
    compare_table,
    conditional_tail_bound,
    lll_lower,
    sandwich,
    suen_upper,
)
from .coincidence import monte_carlo_coincidence, no_attack_probability, pair_probabilities
from .config import Config, load_config
from .errors import AttemptCapError, CapExceededError, ConfigError, DomainError
from .logging_utils import setup_logging
from .report import (
    FORMATS,
    format_compare_row,
    interval_fields,
    rational_fields,
    spectrum_law_frame,
    stream_rows,
    write_frame,
    write_record,
)
from .spectra import empirical_spectrum, spectrum_rate, tv_spectrum_exact
from .stirling_exact import Kind, Model, stirling
from .verify import failed, run_checks

load_dotenv()

app = typer.Typer(add_completion=False)

MAX_SEED = 2**64


@dataclass
class ExperimentConfig:
    command: str
    n: int
    model: Optional[Model] = None
    kind: Optional[Kind] = None
    k: Optional[int] = None
    r: Optional[int] = None
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    shards: int = 1
    fmt: str = "text"
    out: Optional[str] = None
    cap: int = 12
    paper_form: bool = False

    @property
    def t(self) -> Optional[float]:
        if self.r is None or self.n <= 0:
            return None
        return self.r / math.sqrt(self.n)

    def validate(self) -> "ExperimentConfig":
        if self.fmt not in FORMATS:
            raise ConfigError("format", f"must be one of {', '.join(FORMATS)}")
        if self.n < 1:
            raise ConfigError("n", f"must be positive, got {self.n}")
        if self.cap < 1:
            raise ConfigError("cap", f"must be positive, got {self.cap}")

        if self.command == "compare":
            if self.k_min is None or self.k_max is None:
                raise ConfigError("k_min", "compare needs both --k-min and --k-max")
            if not 1 <= self.k_min <= self.k_max <= self.n:
                raise ConfigError("k_min", f"need 1 <= k-min <= k-max <= n, got {self.k_min}..{self.k_max}")
        elif self.command != "coincidence":
            if (self.k is None) == (self.r is None):
                raise ConfigError("k", "give exactly one of --k and --r")
            if self.k is None:
                self.k = self.n - self.r
            self.r = self.n - self.k
            if not 0 <= self.k <= self.n:
                raise ConfigError("k", f"must lie in 0..{self.n}, got {self.k}")

        if self.command in ("sample", "coincidence"):
            if self.seed is None:
                raise ConfigError("seed", "sampling commands need --seed")
            if not 0 <= self.seed < MAX_SEED:
                raise ConfigError("seed", "must be a 64-bit unsigned integer")
            if self.samples is None or self.samples < 1:
                raise ConfigError("samples", "must be a positive integer")
            if self.shards < 1:
                raise ConfigError("shards", f"must be positive, got {self.shards}")
        return self


def _setup(config: str, verbose: bool):
    cfg = load_config(config, base_dir=".")
    logger = setup_logging(cfg.paths.get("logs_dir"), verbose=verbose)
    return cfg, logger


def _run(action: Callable[[], Optional[int]]) -> None:
    try:
        code = action()
    except (ConfigError, DomainError) as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=2)
    except (CapExceededError, AttemptCapError) as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=1)
    if code:
        raise typer.Exit(code=code)


def _cap(cfg: Config, cap: Optional[int]) -> int:
    return cap if cap is not None else cfg.enumeration_cap


@app.command("stirling")
def stirling_command(
    kind: Kind = typer.Option(..., help="first (cycles) or second (blocks)"),
    n: int = typer.Option(..., help="Ground-set size"),
    k: Optional[int] = typer.Option(None, help="Number of blocks or cycles"),
    r: Optional[int] = typer.Option(None, help="Number of rooks, n - k"),
    fmt: str = typer.Option("text", "--format", help="csv, json or text"),
    out: Optional[str] = typer.Option(None, help="Output path (stdout by default)"),
    config: str = typer.Option("configs/rookstat.yaml", help="Path to YAML config"),
    verbose: bool = typer.Option(False, help="Log debug output to stderr"),
) -> None:
    def action() -> None:
        _setup(config, verbose)
        exp = ExperimentConfig(command="stirling", kind=kind, n=n, k=k, r=r, fmt=fmt, out=out).validate()
        value = stirling(kind, exp.n, exp.k)
        if fmt == "text":
            _echo(str(value), out)
            return
        write_record({"kind": kind.value, "n": exp.n, "k": exp.k, "value": str(value)}, out, fmt)

    _run(action)


def _echo(text: str, out: Optional[str]) -> None:
    if out is None:
        typer.echo(text)
        return
    with open(out, "w") as handle:
        handle.write(text + "\n")


@app.command("bounds")
def bounds_command(
    n: int = typer.Option(..., help="Ground-set size"),
    k: Optional[int] = typer.Option(None, help="Number of blocks or cycles"),
    r: Optional[int] = typer.Option(None, help="Number of rooks, n - k"),
    kind: Optional[Kind] = typer.Option(None, help="Restrict Stirling bounds to one kind"),
    fmt: str = typer.Option("text", "--format", help="csv, json or text"),
    out: Optional[str] = typer.Option(None, help="Output path (stdout by default)"),
    config: str = typer.Option("configs/rookstat.yaml", help="Path to YAML config"),
    verbose: bool = typer.Option(False, help="Log debug output to stderr"),
) -> None:
    def action() -> None:
        cfg, logger = _setup(config, verbose)
        exp = ExperimentConfig(command="bounds", n=n, k=k, r=r, fmt=fmt, out=out).validate()
        if exp.n < 2:
            raise ConfigError("n", "bounds need n >= 2")
        precision = cfg.working_precision
        report = chen_stein_report(exp.n, exp.r)
        record: Dict[str, Any] = {"n": exp.n, "k": exp.k, "r": exp.r, "t": f"{exp.t:.6g}"}
        for name in (
            "p", "q", "b1_a", "b1_l", "b1_al", "b1", "b2_a", "b2_l", "b2_al", "b2",
            "d", "d_moment", "b1_display", "b2_display", "lambda_r", "lambda_c",
        ):
            record.update(rational_fields(name, getattr(report, name)))

        if exp.k >= 1:
            for which in [kind] if kind is not None else list(Kind):
                prefix = which.value
                sw = sandwich(which, exp.n, exp.k, precision=precision)
                record.update(interval_fields(f"{prefix}_sandwich_lower", sw.lower))
                record.update(interval_fields(f"{prefix}_sandwich_upper", sw.upper))
                record[f"{prefix}_sandwich_valid"] = sw.valid
                low = lll_lower(which, exp.n, exp.k, precision=precision)
                record.update(interval_fields(f"{prefix}_lll_lower", low.value))
                record[f"{prefix}_lll_valid"] = low.valid
                high = suen_upper(which, exp.n, exp.k, precision=precision)
                record.update(interval_fields(f"{prefix}_suen_upper", high.value))
                record[f"{prefix}_suen_valid"] = high.valid
                for variant, value in sorted(high.variants.items()):
                    record.update(interval_fields(f"{prefix}_suen_{variant}", value))
            for model in Model:
                tail = conditional_tail_bound(model, exp.n, exp.k, precision=precision)
                record.update(interval_fields(f"{model.value}_tail", tail.value))
                record[f"{model.value}_tail_valid"] = tail.valid
        logger.info("Bounds computed for n=%s r=%s", exp.n, exp.r)
        write_record(record, out, fmt)

    _run(action)


@app.command("compare")
def compare_command(
    kind: Kind = typer.Option(..., help="first or second"),
    n: int = typer.Option(..., help="Ground-set size"),
    k_min: Optional[int] = typer.Option(None, help="Smallest k"),
    k_max: Optional[int] = typer.Option(None, help="Largest k"),
    fmt: str = typer.Option("csv", "--format", help="csv, json or text"),
    out: Optional[str] = typer.Option(None, help="Output path (stdout by default)"),
    config: str = typer.Option("configs/rookstat.yaml", help="Path to YAML config"),
    verbose: bool = typer.Option(False, help="Log debug output to stderr"),
) -> None:
    def action() -> None:
        cfg, logger = _setup(config, verbose)
        exp = ExperimentConfig(command="compare", kind=kind, n=n, k_min=k_min, k_max=k_max, fmt=fmt, out=out)
        exp.validate()
        if exp.n < 2:
            raise ConfigError("n", "compare needs n >= 2")
        max_n = int(cfg.limits.get("compare_max_n", 2000))
        # largest k first, so rows run in increasing rook count
        ks = range(exp.k_max, exp.k_min - 1, -1)
        rows = (
            format_compare_row(row)
            for row in compare_table(kind, exp.n, ks, max_n=max_n, precision=cfg.working_precision)
        )
        written = stream_rows(rows, out, fmt, COMPARE_COLUMNS)
        logger.info("Wrote %s comparison rows", written)

    _run(action)


@app.command("sample")
def sample_command(
    model: Model = typer.Option(..., help="partition or permutation"),
    n: int = typer.Option(..., help="Ground-set size"),
    k: Optional[int] = typer.Option(None, help="Number of blocks or cycles"),
    r: Optional[int] = typer.Option(None, help="Number of rooks, n - k"),
    samples: int = typer.Option(..., help="Number of accepted samples"),
    seed: Optional[int] = typer.Option(None, help="Master seed (64-bit unsigned)"),
    shards: Optional[int] = typer.Option(None, help="Independent sub-streams"),
    fmt: str = typer.Option("csv", "--format", help="csv, json or text"),
    out: Optional[str] = typer.Option(None, help="Output path (stdout by default)"),
    config: str = typer.Option("configs/rookstat.yaml", help="Path to YAML config"),
    verbose: bool = typer.Option(False, help="Log debug output to stderr"),
) -> None:
    def action() -> None:
        cfg, logger = _setup(config, verbose)
        exp = ExperimentConfig(
            command="sample",
            model=model,
            n=n,
            k=k,
            r=r,
            samples=samples,
            seed=seed,
            shards=shards if shards is not None else int(cfg.sampling.get("shards", 1)),
            fmt=fmt,
            out=out,
        ).validate()
        if exp.k < 1:
            raise ConfigError("k", "must be at least 1")
        result = empirical_spectrum(
            model,
            exp.n,
            exp.k,
            exp.samples,
            exp.seed,
            exp.shards,
            batch_size=int(cfg.sampling.get("batch_size", 4096)),
            max_workers=int(cfg.sampling.get("max_workers", 4)),
            attempt_cap=int(cfg.limits.get("attempt_cap", 1_000_000)),
        )
        logger.info(
            "Acceptance rate %.6f over %s attempts (t=%.4f)", float(result.acceptance_rate), result.attempts, exp.t
        )
        write_frame(spectrum_law_frame(result.frequencies), out, fmt)

    _run(action)


@app.command("tv")
def tv_command(
    model: Model = typer.Option(..., help="partition or permutation"),
    n: int = typer.Option(..., help="Ground-set size"),
    k: Optional[int] = typer.Option(None, help="Number of blocks or cycles"),
    r: Optional[int] = typer.Option(None, help="Number of rooks, n - k"),
    cap: Optional[int] = typer.Option(None, help="Enumeration cap (overrides ROOKSTAT_CAP)"),
    paper_form: bool = typer.Option(False, help="Use the (n-2k+Z, k-2Z, Z) approximating vector"),
    fmt: str = typer.Option("text", "--format", help="csv, json or text"),
    out: Optional[str] = typer.Option(None, help="Output path (stdout by default)"),
    config: str = typer.Option("configs/rookstat.yaml", help="Path to YAML config"),
    verbose: bool = typer.Option(False, help="Log debug output to stderr"),
) -> None:
    def action() -> None:
        cfg, _ = _setup(config, verbose)
        exp = ExperimentConfig(
            command="tv", model=model, n=n, k=k, r=r, fmt=fmt, out=out, cap=_cap(cfg, cap), paper_form=paper_form
        ).validate()
        if exp.k < 1:
            raise ConfigError("k", "must be at least 1")
        tv = tv_spectrum_exact(
            model, exp.n, exp.k, cap=exp.cap, paper_form=paper_form, precision=cfg.working_precision
        )
        record: Dict[str, Any] = {"model": model.value, "n": exp.n, "k": exp.k, "paper_form": paper_form}
        record.update(rational_fields("rate", spectrum_rate(model, exp.n, exp.k)))
        record.update(interval_fields("tv", tv))
        write_record(record, out, fmt)

    _run(action)


@app.command("coincidence")
def coincidence_command(
    n: int = typer.Option(..., help="Board size"),
    r: int = typer.Option(..., help="Number of iid rooks"),
    samples: int = typer.Option(..., help="Number of placements"),
    seed: Optional[int] = typer.Option(None, help="Master seed (64-bit unsigned)"),
    shards: Optional[int] = typer.Option(None, help="Independent sub-streams"),
    fmt: str = typer.Option("text", "--format", help="csv, json or text"),
    out: Optional[str] = typer.Option(None, help="Output path (stdout by default)"),
    config: str = typer.Option("configs/rookstat.yaml", help="Path to YAML config"),
    verbose: bool = typer.Option(False, help="Log debug output to stderr"),
) -> None:
    def action() -> None:
        cfg, _ = _setup(config, verbose)
        exp = ExperimentConfig(
            command="coincidence",
            n=n,
            r=r,
            samples=samples,
            seed=seed,
            shards=shards if shards is not None else int(cfg.sampling.get("shards", 1)),
            fmt=fmt,
            out=out,
        ).validate()
        if exp.n < 2 or exp.r < 0:
            raise ConfigError("n", "need n >= 2 and r >= 0")
        summary = monte_carlo_coincidence(
            exp.n,
            exp.r,
            exp.samples,
            exp.seed,
            exp.shards,
            batch_size=int(cfg.sampling.get("batch_size", 4096)),
            max_workers=int(cfg.sampling.get("max_workers", 4)),
        )
        pp = pair_probabilities(exp.n)
        pairs = math.comb(exp.r, 2)
        record: Dict[str, Any] = {"n": exp.n, "r": exp.r, "samples": summary.samples}
        for name in ("w_rr", "w_cc", "w_rc", "w_cr"):
            record[f"{name}_mean"] = repr(summary.means[name])
            record[f"{name}_se"] = repr(summary.std_errors[name])
        record.update(rational_fields("exact_w_rr_mean", pairs * pp.p))
        record.update(rational_fields("exact_w_rc_mean", pairs * pp.q))
        record["no_attack_partition"] = repr(summary.no_attack_partition)
        record["no_attack_permutation"] = repr(summary.no_attack_permutation)
        if exp.r < exp.n:
            record.update(
                rational_fields("exact_no_attack_partition", no_attack_probability(Model.PARTITION, exp.n, exp.r))
            )
            record.update(
                rational_fields("exact_no_attack_permutation", no_attack_probability(Model.PERMUTATION, exp.n, exp.r))
            )
        write_record(record, out, fmt)

    _run(action)


@app.command("verify")
def verify_command(
    max_n: Optional[int] = typer.Option(None, help="Largest n for exhaustive checks"),
    samples: Optional[int] = typer.Option(None, help="Monte Carlo samples per check"),
    seed: Optional[int] = typer.Option(None, help="Monte Carlo seed"),
    cap: Optional[int] = typer.Option(None, help="Enumeration cap (overrides ROOKSTAT_CAP)"),
    skip_monte_carlo: bool = typer.Option(False, help="Run exact checks only"),
    config: str = typer.Option("configs/rookstat.yaml", help="Path to YAML config"),
    verbose: bool = typer.Option(False, help="Log debug output to stderr"),
) -> None:
    def action() -> int:
        cfg, logger = _setup(config, verbose)
        results = run_checks(
            max_n=max_n if max_n is not None else int(cfg.verify.get("max_n", 7)),
            cap=_cap(cfg, cap),
            samples=samples if samples is not None else int(cfg.verify.get("samples", 20000)),
            seed=seed if seed is not None else int(cfg.verify.get("seed", 20240611)),
            placement_cap=cfg.placement_cap,
            include_monte_carlo=not skip_monte_carlo,
        )
        width = max(len(result.name) for result in results)
        for result in results:
            status = "PASS" if result.passed else "FAIL"
            typer.echo(f"{result.name.ljust(width)}  {status}  {result.detail}")
        failures = failed(results)
        if failures:
            logger.error("Failed checks: %s", ", ".join(failures))
            return 1
        return 0

    _run(action)


if __name__ == "__main__":
    app()
