"""Main CLI entry point for critspace."""

import json
from pathlib import Path
from typing import List, Optional

import typer
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from . import theme
from .als import cp_als
from .codec import read_point, read_tensor
from .config import SolverConfig, find_campaign, load_campaigns
from .critical_space import generators_for, membership_breakdown, orbit_dimension, space_of
from .ed_degree import (
    FlagWeight,
    binary_segre_veronese_eddegree,
    flag_degree,
    flag_dimension,
    flag_euler_characteristic,
    flag_hilbert,
    flag_weyl_dimension,
)
from .exterior import AlternatingTensor
from .experiments import CampaignReport, emit_report, run_campaign
from .solvers import (
    SolveResult,
    binary_eigenvectors,
    closest_real_point,
    grassmann_critical_points,
    singular_tuples,
)
from .tensor_core import PSTensor, VectorTuple, rank_one

app = typer.Typer(help="critspace - critical spaces, critical points and ED degrees")
eddeg_app = typer.Typer(help="Closed-form ED degree and flag-variety formulas")
app.add_typer(eddeg_app, name="eddeg")


def _fail(message: str) -> None:
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(1)


def _load(path: Path):
    try:
        return read_tensor(path)
    except ValueError as e:
        _fail(str(e))


def _emit_json(text: str, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(text)
        return
    try:
        out.write_text(text + "\n")
    except OSError as e:
        _fail(f"cannot write {out}: {e}")
    theme.console.print(f"✓ Wrote {out}")


def _log(verbose: bool):
    if not verbose:
        return None

    def log_callback(msg: str):
        typer.echo(msg, err=True)

    return log_callback


def _solver_config(seed: int, restarts: int, tol: Optional[float]) -> SolverConfig:
    update = {"master_seed": seed, "restarts": restarts}
    if tol is not None:
        update["certify_tol"] = tol
    try:
        return SolverConfig(**update)
    except ValueError as e:
        _fail(str(e))


def _points_table(title: str, result: SolveResult) -> Table:
    table = Table(title=title)
    table.add_column("#", style="cyan")
    table.add_column("Kind", style="magenta")
    table.add_column("First-order", style="green")
    table.add_column("Membership", style="green")
    table.add_column("Mult.")
    table.add_column("Real")
    table.add_column("Isotropic")
    for idx, p in enumerate(result.all_points):
        table.add_row(
            str(idx),
            p.kind,
            f"{p.first_order_residual:.2e}",
            f"{p.membership_residual:.2e}",
            str(p.cluster_size),
            "✓" if p.real else "",
            "✓" if p.isotropic else "",
        )
    return table


def _with_progress(run, description: str):
    """Run ``run(on_progress)`` under a rich progress bar on stderr."""
    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        TimeElapsedColumn(),
        console=theme.console,
        transient=True,
    ) as progress:
        task = progress.add_task(description, total=None)

        def on_progress(done: int, total: int, desc: str):
            progress.update(task, completed=done, total=total, description=desc)

        return run(on_progress)


@app.command()
def eig(
    tensor: Path = typer.Option(..., "--tensor", help="Binary form (JSON tensor file)"),
    seed: int = typer.Option(0, "--seed", help="Master seed (echoed; the solver is exact)"),
    restarts: int = typer.Option(1, "--restarts", help="Restarts (echoed; the solver is exact)"),
    tol: float = typer.Option(1e-6, "--tol", help="Projective dedupe tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here"),
):
    """Exact eigenvectors of a binary form via the roots of D01 f."""
    theme.print_banner()
    f = _load(tensor)
    if not isinstance(f, PSTensor):
        _fail("eig needs a binary form, not an alternating tensor")
    try:
        cfg = SolverConfig(master_seed=seed, restarts=restarts, dedupe_tol=tol)
        result = binary_eigenvectors(f, dedupe_tol=cfg.dedupe_tol)
    except ValueError as e:
        _fail(str(e))
    result.config = cfg
    theme.console.print(_points_table(f"Eigenvectors of {f.shape.label()}", result))
    _emit_json(result.model_dump_json(indent=2, exclude_none=True), out)


@app.command()
def singular(
    tensor: Path = typer.Option(..., "--tensor", help="Partially symmetric tensor (JSON)"),
    seed: int = typer.Option(0, "--seed", help="Master seed"),
    restarts: int = typer.Option(200, "--restarts", help="Newton restarts"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Certification tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log solver progress"),
):
    """Singular tuples by multistart Newton over C."""
    theme.print_banner()
    f = _load(tensor)
    if not isinstance(f, PSTensor):
        _fail("singular needs a partially symmetric tensor")
    cfg = _solver_config(seed, restarts, tol)
    try:
        result = _with_progress(
            lambda on_progress: singular_tuples(f, cfg, on_log=_log(verbose), on_progress=on_progress),
            "Newton restarts",
        )
    except ValueError as e:
        _fail(str(e))
    theme.console.print(_points_table(f"Singular tuples of {f.shape.label()}", result))
    nearest = closest_real_point(result, f)
    if nearest is not None:
        theme.console.print(f"Closest real rank-one point: distance {nearest.distance:.6f}")
    _emit_json(result.model_dump_json(indent=2, exclude_none=True), out)


@app.command()
def grassmann(
    tensor: Path = typer.Option(..., "--tensor", help="Alternating tensor (JSON)"),
    seed: int = typer.Option(0, "--seed", help="Master seed"),
    restarts: int = typer.Option(200, "--restarts", help="Newton restarts"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Certification tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log solver progress"),
):
    """Critical k-planes of the distance to an alternating tensor."""
    theme.print_banner()
    f = _load(tensor)
    if not isinstance(f, AlternatingTensor):
        _fail("grassmann needs an alternating tensor")
    cfg = _solver_config(seed, restarts, tol)
    try:
        result = _with_progress(
            lambda on_progress: grassmann_critical_points(f, f.k, cfg, on_log=_log(verbose), on_progress=on_progress),
            "Newton restarts",
        )
    except ValueError as e:
        _fail(str(e))
    theme.console.print(_points_table(f"Critical planes in ∧{f.k} C{f.n_plus_1}", result))
    _emit_json(result.model_dump_json(indent=2, exclude_none=True), out)


@app.command()
def als(
    tensor: Path = typer.Option(..., "--tensor", help="Real ordinary tensor (JSON)"),
    rank: int = typer.Option(1, "--rank", help="Number of rank-one terms"),
    seed: int = typer.Option(0, "--seed", help="Master seed"),
    restarts: int = typer.Option(3, "--restarts", help="Random initializations"),
    max_iters: int = typer.Option(500, "--max-iters", help="ALS sweeps per initialization"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Relative fit-change tolerance"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log fit summaries"),
):
    """Best rank-q approximation by alternating least squares."""
    theme.print_banner()
    f = _load(tensor)
    update = {"master_seed": seed, "restarts": restarts, "max_iters": max_iters}
    if tol is not None:
        update["newton_tol"] = tol
    try:
        cfg = SolverConfig(**update)
        report = cp_als(f, rank, cfg, on_log=_log(verbose))
    except ValueError as e:
        _fail(str(e))
    theme.console.print(
        f"stationarity {report.stationarity:.2e}, membership {report.membership_residual:.2e}, "
        f"converged={report.converged}"
    )
    _emit_json(report.model_dump_json(indent=2, exclude_none=True), out)


@app.command()
def membership(
    tensor: Path = typer.Option(..., "--tensor", help="The tensor f (JSON)"),
    point: Path = typer.Option(..., "--point", help="Tensor or vector tuple to test against H_f"),
    tol: float = typer.Option(1e-8, "--tol", help="Acceptance threshold"),
):
    """Test whether a point lies in the critical space H_f."""
    theme.print_banner()
    f = _load(tensor)
    try:
        v = read_point(point)
        if isinstance(v, VectorTuple):
            if not isinstance(f, PSTensor):
                _fail("vector tuples are only accepted for partially symmetric tensors")
            v = rank_one(v, f.shape)
        if space_of(v) != space_of(f):
            _fail("shape mismatch between point and tensor")
        gens = generators_for(f)
        breakdown = membership_breakdown(v, f, gens)
        info = orbit_dimension(gens, f=f)
    except ValueError as e:
        _fail(str(e))

    table = Table(title="Membership in H_f")
    table.add_column("Generator", style="cyan")
    table.add_column("|q(v, D)| / |v||D|", style="green")
    for label, value in breakdown:
        table.add_row(str(label), f"{value:.3e}")
    theme.console.print(table)
    residual = max((value for _, value in breakdown), default=0.0)
    payload = {
        "membership_residual": residual,
        "in_critical_space": residual <= tol,
        "orbit_dimension": info.orbit_dimension,
        "codim_Hf": info.codim_Hf,
        "generators": [{"label": list(label), "residual": value} for label, value in breakdown],
    }
    typer.echo(json.dumps(payload, indent=2))


@app.command()
def orbit(
    tensor: Path = typer.Option(..., "--tensor", help="Tensor file (JSON)"),
    tol: float = typer.Option(1e-8, "--tol", help="Relative rank tolerance"),
):
    """Orbit dimension of f and the codimension of H_f."""
    theme.print_banner()
    f = _load(tensor)
    try:
        info = orbit_dimension(generators_for(f), tol, f)
    except ValueError as e:
        _fail(str(e))
    typer.echo(info.model_dump_json(indent=2))


def _int_list(values: List[str], option: str) -> List[int]:
    """Integers from ``--opt 2,3,4`` (repeating the option also works)."""
    parsed: List[int] = []
    for value in values:
        for item in value.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                parsed.append(int(item))
            except ValueError:
                _fail(f"{option} expects comma-separated integers, got {value!r}")
    if not parsed:
        _fail(f"{option} needs at least one integer")
    return parsed


@eddeg_app.command("binary")
def eddeg_binary(
    d: List[str] = typer.Option(..., "--d", help="Degrees of the binary factors, e.g. 2,3,4"),
):
    """k!·d_1···d_k for the binary Segre–Veronese variety."""
    degrees = _int_list(d, "--d")
    try:
        payload = {"degrees": degrees, "eddegree": binary_segre_veronese_eddegree(degrees)}
    except ValueError as e:
        _fail(str(e))
    typer.echo(json.dumps(payload, indent=2))


@app.command("flag")
@eddeg_app.command("flag")
def flag(
    n: int = typer.Option(..., "--n", help="Flags in C^(n+1)"),
    a: List[str] = typer.Option(..., "--a", help="Weight coefficients a_1..a_n, e.g. 1,2,1"),
    hilbert_t: Optional[int] = typer.Option(None, "--hilbert-t", help="Also evaluate the Hilbert function at t"),
):
    """Degree, ED degree, dimension and Euler characteristic of the complete flag variety."""
    coefficients = _int_list(a, "--a")
    try:
        w = FlagWeight(n=n, a=tuple(coefficients))
        degree = flag_degree(w)
        payload = {
            "n": n,
            "a": list(w.a),
            "degree": degree,
            "eddegree": degree,
            "dimension": flag_dimension(n),
            "euler_characteristic": flag_euler_characteristic(n),
            "weyl_dimension": flag_weyl_dimension(w),
            "hilbert_t": hilbert_t,
            "hilbert_value": flag_hilbert(w, hilbert_t) if hilbert_t is not None else None,
        }
    except ValueError as e:
        _fail(str(e))
    typer.echo(json.dumps(payload, indent=2))


def _summary_table(report: CampaignReport) -> Table:
    table = Table(title=f"Campaign {report.campaign} ({report.kind})")
    table.add_column("Status", style="cyan")
    table.add_column("Instances", style="magenta")
    for status, count in report.status_counts.items():
        table.add_row(theme.styled_status(status), str(count))
    return table


@app.command()
def verify(
    name: str = typer.Argument(..., help="Campaign name (see list-campaigns)"),
    config: Optional[Path] = typer.Option(None, "--config", help="Campaign JSON file"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the master seed"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Override the sample count"),
    out: Optional[Path] = typer.Option(None, "--out", help="Report path"),
    fmt: str = typer.Option("json", "--format", help="Report format: json or csv"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log campaign progress"),
):
    """Run a verification campaign; exit code 0 iff every assertion passes."""
    theme.print_banner()
    if fmt not in ("json", "csv"):
        _fail(f"unknown report format: {fmt}")
    try:
        campaign = find_campaign(name, config)
        if seed is not None:
            campaign = campaign.with_seed(seed)
        if samples is not None:
            campaign = campaign.model_copy(update={"samples": samples})
        report = _with_progress(
            lambda on_progress: run_campaign(campaign, on_log=_log(verbose), on_progress=on_progress),
            campaign.name,
        )
        if out is not None:
            emit_report(report, fmt, out)
            theme.console.print(f"✓ Wrote {out}")
        elif fmt == "json":
            typer.echo(report.model_dump_json(indent=2))
    except (ValueError, RuntimeError) as e:
        _fail(str(e))

    theme.console.print(_summary_table(report))
    for note in report.notes:
        theme.console.print(f"• {note}")
    theme.console.print(f"Wall clock: {report.wall_clock_seconds:.2f}s")
    if not report.passed:
        typer.echo(f"✗ Campaign {report.campaign} failed", err=True)
        raise typer.Exit(1)
    theme.console.print(f"[green]✓ Campaign {report.campaign} passed[/green]")


@app.command("list-campaigns")
def list_campaigns(
    config: Optional[Path] = typer.Option(None, "--config", help="Campaign JSON file"),
):
    """List the available verification campaigns."""
    try:
        campaigns = load_campaigns(config)
    except ValueError as e:
        _fail(str(e))
    table = Table(title="Campaigns")
    table.add_column("Name", style="cyan")
    table.add_column("Kind", style="magenta")
    table.add_column("Samples", style="green")
    table.add_column("Grid")
    for c in campaigns:
        grid = ", ".join([s.label() for s in c.shapes] + [e.label() for e in c.exterior]) or "-"
        table.add_row(c.name, c.kind, str(c.samples), grid)
    theme.console.print(table)
    for c in campaigns:
        typer.echo(c.name)


if __name__ == "__main__":
    app()
