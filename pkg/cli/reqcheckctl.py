"""Command-line front end: verify requirements, synthesize pattern routines, translate ASM rules."""

import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import click
import typer

from reqcheck.asm.oracle import check_one_step
from reqcheck.asm.translate import translate_machine
from reqcheck.config import load_verify_config
from reqcheck.errors import ReqCheckError
from reqcheck.frontend import elaborate, load_model, parse_expression, parse_model, print_routine
from reqcheck.patterns import PatternInstance, PatternKind, synth
from reqcheck.transforms import drop_case_arm, inject_error, parse_arm_spec
from reqcheck.verifier import ExitStatus, aggregate_exit_status, check_all
from reqcheck.verifier.report import check_report

app = typer.Typer(help="Requirements verification for state-machine models.", no_args_is_help=True)

logger = logging.getLogger("reqcheck.cli")


def _configure_logging(verbose: bool = False):
    level = "DEBUG" if verbose else os.getenv("REQCHECK_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        force=True,
    )


def _table(verdicts) -> List[str]:
    rows = [("requirement", "result", "states", "worst delta")]
    rows += [(v.requirement, v.result.value.upper(), str(v.states_explored), str(v.max_duration_delta))
             for v in verdicts]
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    return ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]


@app.command()
def check(
    path: Path = typer.Argument(..., help="A .req model file."),
    requirement: Optional[List[str]] = typer.Option(None, "--requirement", "-r", help="Only check this requirement (repeatable)."),
    unroll: Optional[int] = typer.Option(None, "--unroll", help="Loop unroll bound."),
    inject: bool = typer.Option(False, "--inject-error", help="Drop the closing_state arm of open_door."),
    drop_arm: Optional[List[str]] = typer.Option(None, "--drop-case-arm", help="ROUTINE:WHEN arm to remove (repeatable)."),
    as_json: bool = typer.Option(False, "--json", help="Print the JSON report."),
    trace: bool = typer.Option(False, "--trace", help="Include counterexample traces."),
    max_counterexamples: int = typer.Option(3, "--max-counterexamples", min=0),
    config: Optional[Path] = typer.Option(None, "--config", help="YAML settings file."),
    workers: Optional[int] = typer.Option(None, "--workers", help="Threads per requirement."),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    Verify the requirements of a model over every initial state.

    Exit status: 0 all pass, 1 some fail, 2 some unknown and none fail.
    """
    _configure_logging(verbose)
    settings = load_verify_config(config)
    overrides = {k: v for k, v in (("unroll_bound", unroll), ("workers", workers)) if v is not None}
    if overrides:
        settings = replace(settings, **overrides)

    model = load_model(path)
    for spec in drop_arm or []:
        model = drop_case_arm(model, *parse_arm_spec(spec))
    if inject:
        model = inject_error(model)
    logger.info(f"Loaded model {model.name} from {path}")

    verdicts = check_all(model, settings, names=requirement or None)
    report = check_report(model.name, verdicts, max_counterexamples, include_trace=trace)
    if as_json:
        typer.echo(report.model_dump_json(indent=2))
    else:
        for line in _table(verdicts):
            typer.echo(line)
        for verdict in report.verdicts:
            for example in verdict.counterexamples:
                state = ", ".join(f"{k}={v}" for k, v in example.initial_state.items())
                typer.echo(f"  {verdict.requirement}: {example.kind} from {{{state}}}")
                for step in example.trace:
                    typer.echo(f"    {step.routine}: {step.statement}")
    raise typer.Exit(code=int(aggregate_exit_status(verdicts)))


@app.command("synth")
def synth_routine(
    pattern: PatternKind = typer.Argument(..., help="p1, p2, p3 or p4."),
    prop: List[str] = typer.Option(..., "--prop", help="Condition or property (repeatable for p1)."),
    inner: str = typer.Option(..., "--inner", help="Routine the pattern calls."),
    name: Optional[str] = typer.Option(None, "--name", help="Name of the new routine."),
    time: Optional[int] = typer.Option(None, "--time", help="Time bound for p3 and p4."),
    model_path: Optional[Path] = typer.Option(None, "--model", help="Validate against this model."),
    annotation: Optional[str] = typer.Option(None, "--annotation", help="Comment to emit above the routine."),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Print the routine a pattern instance synthesizes, in .req syntax."""
    _configure_logging(verbose)
    model = load_model(model_path) if model_path is not None else None
    instance = PatternInstance(
        pattern,
        name or f"{pattern.value}_{inner}",
        tuple(parse_expression(p, model) for p in prop),
        inner,
        time,
        annotation=annotation,
    )
    typer.echo(print_routine(synth(instance, model)), nl=False)


@app.command("translate-asm")
def translate_asm(
    path: Path = typer.Argument(..., help="A .req file with rule declarations."),
    check_oracle: bool = typer.Option(False, "--check-oracle", help="Compare against the ASM update semantics."),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Translate the rule declarations of a file into routines."""
    _configure_logging(verbose)
    parsed = parse_model(path.read_text(encoding="utf-8"), str(path))
    main_rule = parsed.step_name if any(r.name == parsed.step_name for r in parsed.rules) else None
    routines = translate_machine(parsed.rules, main_rule, parsed)
    typer.echo("\n".join(print_routine(r) for r in routines), nl=False)
    if not check_oracle:
        return
    report = check_one_step(elaborate(parsed), parsed.rules)
    for mismatch in report.mismatches:
        typer.echo(f"mismatch: {mismatch}")
    typer.echo(f"oracle: {report.compared} comparisons, {len(report.mismatches)} mismatches")
    if not report.clean:
        raise typer.Exit(code=int(ExitStatus.FAIL))


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI, mapping usage and model errors to exit status 3."""
    try:
        status = app(args=argv, prog_name="reqcheckctl", standalone_mode=False)
    except typer.Abort:
        typer.echo("aborted", err=True)
        return int(ExitStatus.ERROR)
    except click.ClickException as exc:
        typer.echo(f"error: {exc.format_message()}", err=True)
        return int(ExitStatus.ERROR)
    except (ReqCheckError, OSError, ValueError) as exc:
        typer.echo(f"error: {exc}", err=True)
        return int(ExitStatus.ERROR)
    return int(status or 0)


if __name__ == "__main__":
    sys.exit(main())
