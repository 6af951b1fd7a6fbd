"""Command-line front end: `pvpatch <verb> [flags] [INPUT]`.

Inputs and reports are JSON documents tagged "schema": "pvpatch/1". Exit
codes: 0 success, 1 verification failure, 2 input error, 3 exhaustion.
"""

from __future__ import annotations

import random
import sys

import click

from .config import RunConfig
from .errors import PVError, SchemaError

OUTPUT = {"json": True}


def _pair(text: str, n: int, what: str) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise click.BadParameter(f"{what} must be {n} comma-separated integers, got {text!r}")
    if len(vals) != n:
        raise click.BadParameter(f"{what} must be {n} comma-separated integers, got {text!r}")
    return vals


def _config(ctx) -> RunConfig:
    o = ctx.obj
    return RunConfig(t_prec=o["t_prec"], x_window=o["x_window"], degree_cap=o["degree_cap"],
                     bounds=o["bounds"], seed=o["seed"])


def render_text(rep: dict) -> str:
    lines = [f"pvpatch {' '.join(rep['command'])}"]
    cfg = rep.get("config")
    if cfg:
        lines.append("config: " + ", ".join(f"{k}={v}" for k, v in sorted(cfg.items())))
    for c in rep["checks"]:
        b = ", ".join(f"{k}={v}" for k, v in sorted(c["bounds"].items()))
        lines.append(f"  [{c['verdict'].upper()}] {c['name']}" + (f"  ({b})" if b else ""))
    if "error" in rep:
        lines.append(f"error: {rep['error']['type']}: {rep['error']['message']}")
    lines.append(f"status: {rep['status']} (exit {rep['exit_code']})")
    return "\n".join(lines)


def emit(rep: dict):
    from .serialize import dumps

    click.echo(dumps(rep) if OUTPUT["json"] else render_text(rep))
    sys.exit(rep["exit_code"])


def run(ctx, command: list, body):
    """Call `body(cfg)` and map any PVError onto its exit code."""
    from .demos import error_report

    cfg = None
    try:
        cfg = _config(ctx)
        rep = body(cfg)
    except PVError as ex:
        rep = error_report(command, cfg, ex)
    emit(rep)


def _read(path: str) -> str:
    try:
        return click.open_file(path, "r").read()
    except OSError as ex:
        raise SchemaError(f"cannot read {path}: {ex}") from ex


@click.group()
@click.option("--t-prec", type=int, default=10, show_default=True, help="t-adic precision.")
@click.option("--x-window", default="-12,12", show_default=True, help="x-exponent window lo,hi.")
@click.option("--degree-cap", type=int, default=4, show_default=True, help="Monomial degree cap.")
@click.option("--bounds", default="8,8,8,8", show_default=True,
              help="Reconstruction bounds dx_num,dx_den,dt_num,dt_den.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized suites.")
@click.option("--json/--text", "as_json", default=True, help="Report format.")
@click.pass_context
def main(ctx, t_prec, x_window, degree_cap, bounds, seed, as_json):
    """Patching of Picard-Vessiot torsors over k((t))(x)."""
    OUTPUT["json"] = as_json
    ctx.obj = {"t_prec": t_prec, "x_window": _pair(x_window, 2, "--x-window"), "degree_cap": degree_cap,
               "bounds": _pair(bounds, 4, "--bounds"), "seed": seed}


@main.command()
@click.argument("input", required=False)
@click.option("--random", "rand_n", type=click.IntRange(1, 3), help="Factor a seeded random n x n matrix.")
@click.pass_context
def factorize(ctx, input, rand_n):
    """Factor A in GL_n(F0) as A2^-1 A1."""
    from .demos import run_factorize
    from .serialize import load_document, matrix_from_json

    def body(cfg):
        if rand_n is not None:
            from .factorization import random_laurent_matrix

            A = random_laurent_matrix(random.Random(cfg.seed), rand_n, cfg.t_prec, cfg.x_window)
        else:
            if input is None:
                raise SchemaError("factorize needs an INPUT document or --random N")
            doc = load_document(_read(input), ("matrix",))
            prec = int(doc.get("t_prec", cfg.t_prec))
            window = tuple(doc.get("x_window", cfg.x_window))
            if "A" not in doc:
                raise SchemaError("matrix document lacks 'A'")
            A = matrix_from_json(doc["A"], prec, window, "A")
        return run_factorize(A, cfg, ["factorize"])

    run(ctx, ["factorize"], body)


@main.command()
@click.argument("input")
@click.pass_context
def patch(ctx, input):
    """Solve a patching problem and verify the result."""
    from .demos import run_patch
    from .serialize import load_document, problem_from_json

    def body(cfg):
        doc = load_document(_read(input), ("patching-problem",))
        return run_patch(problem_from_json(doc, cfg), cfg, ["patch"])

    run(ctx, ["patch"], body)


@main.command("solve-ebp")
@click.argument("input")
@click.pass_context
def solve_ebp(ctx, input):
    """Solve a split embedding problem."""
    from .demos import run_ebp
    from .serialize import ebp_from_json, load_document

    def body(cfg):
        doc = load_document(_read(input), ("split-ebp", "ebp"))
        return run_ebp(ebp_from_json(doc, cfg), cfg, ["solve-ebp"])

    run(ctx, ["solve-ebp"], body)


@main.command()
@click.argument("input")
@click.pass_context
def verify(ctx, input):
    """Re-run the verifier, optionally against a supplied matrix A."""
    from .demos import run_patch
    from .serialize import birat_matrix_from_json, load_document, problem_from_json

    def body(cfg):
        doc = load_document(_read(input), ("verify",))
        if "problem" not in doc:
            raise SchemaError("verify document lacks 'problem'")
        problem = problem_from_json(doc["problem"], cfg)
        A = birat_matrix_from_json(doc["A"], "A") if "A" in doc else None
        return run_patch(problem, cfg, ["verify"], A_override=A)

    run(ctx, ["verify"], body)


@main.command()
@click.argument("input")
@click.pass_context
def invariants(ctx, input):
    """Bounded invariants, quotients and induction."""
    from .demos import run_invariants
    from .serialize import load_document

    def body(cfg):
        doc = load_document(_read(input), ("invariants",))
        try:
            return run_invariants(doc, cfg, ["invariants"])
        except KeyError as ex:
            raise SchemaError(f"invariants document lacks {ex}") from ex

    run(ctx, ["invariants"], body)


@main.command()
@click.argument("name", type=click.Choice(["sl2", "sl2-literal", "borel-ebp", "gm-inverse"]))
@click.pass_context
def demo(ctx, name):
    """Run a shipped demonstration."""
    from .demos import demo as run_demo

    run(ctx, ["demo", name], lambda cfg: run_demo(name, cfg, ["demo", name]))


@main.command()
@click.option("--only", type=click.IntRange(1, 11), multiple=True, help="Run only these criteria.")
@click.pass_context
def suite(ctx, only):
    """Run the acceptance criteria."""
    from .demos import suite_report

    cmd = ["suite"] + [f"--only={k}" for k in only]
    run(ctx, cmd, lambda cfg: suite_report(cfg, cmd, list(only) or None))


if __name__ == "__main__":
    main()
