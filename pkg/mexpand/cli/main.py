"""`mexpand <kind> --config <path> [--out <dir>] [--seed <u64>]`."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import orjson
import typer
from loguru import logger

from mexpand.cli.experiments import get_experiment
from mexpand.cli.output import write_errors_csv, write_result
from mexpand.cli.schema import ExperimentConfig
from mexpand.cli.specs import ResolvedExperiment
from mexpand.config import ConfigModel, get_config
from mexpand.exceptions import ConfigError, MexpandError
from mexpand.validator import TypeValidator

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_EXPECTATION_FAILED = 2

app = typer.Typer(add_completion=False, help="Sampling-expansion experiments.")


def load_config(path: Path, kind: str, seed: int | None) -> ExperimentConfig:
    try:
        raw = orjson.loads(path.read_bytes())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except orjson.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("the config document must be a JSON object")
    if raw.get("kind", kind) != kind:
        raise ConfigError(f"config declares kind '{raw['kind']}' but '{kind}' was requested")
    raw["kind"] = kind
    if seed is not None:
        raw["seed"] = seed
    return TypeValidator(ExperimentConfig).validate_object(raw).unwrap()


def run_experiment(kind: str, config_path: Path, out: Path, seed: int | None = None) -> int:
    """Run one experiment, write its outputs and return the exit status."""
    cfg = get_config()
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        typer.echo(f"config_error: cannot create output directory {out}: {e}", err=True)
        return EXIT_ERROR
    cfg.init_logger(log_file=str(out / "run.log"))
    try:
        with logger.contextualize(run_id=kind):
            try:
                experiment = get_experiment(kind)
                config = load_config(config_path, kind, seed)
                logger.info(f"running {kind} from {config_path}")
                outcome = experiment(ResolvedExperiment(config), config)
                document = {
                    "kind": kind,
                    "version": cfg.version,
                    "config": config.model_dump(mode="json"),
                    "result": outcome.result,
                    "checks": outcome.checks,
                    "passed": outcome.passed,
                }
                write_result(out, document)
                if outcome.rows is not None:
                    write_errors_csv(out, outcome.rows)
            except MexpandError as e:
                logger.error(str(e))
                typer.echo(str(e), err=True)
                return e.exit_code
            if not outcome.passed:
                failed = sorted(name for name, ok in outcome.checks.items() if not ok)
                logger.warning(f"expectations failed: {', '.join(failed)}")
                return EXIT_EXPECTATION_FAILED
            logger.info("all expectations met")
            return EXIT_PASS
    finally:
        cfg.init_logger()


@app.command()
def main(
    kind: str = typer.Argument(..., help="converge | strang-fix | compat | solve-coeffs | reproduce | brown | falsify | ode-demo"),
    config: Path = typer.Option(..., "--config", help="JSON experiment document"),
    out: Path = typer.Option(Path("mexpand-out"), "--out", help="Directory for result.json and errors.csv"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Seed for Monte Carlo oracles"),
    debug: bool = typer.Option(False, "--debug", help="Log at DEBUG level"),
    diagnose: bool = typer.Option(False, "--diagnose", help="Log with backtraces and variable values"),
):
    if debug or diagnose:
        overrides = ConfigModel(debug=debug or None, diagnose=diagnose or None)
        get_config().update(**overrides.model_dump(exclude_none=True))
    raise typer.Exit(run_experiment(kind, config, out, seed))


if __name__ == "__main__":
    app()
