"""
sweak command-line application.

Every subcommand renders one artifact (JSON, DOT, OFF or a text table) to
stdout. Artifacts are cached on disk by (s, command, configuration); errors go
through the error handler, which picks the exit code.
"""

import logging
from pathlib import Path
from typing import Callable, List, Optional

import orjson
import typer
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.table import Table

from app.core.config import settings
from app.core.exceptions import InputError
from app.core.logging_config import setup_logging
from app.core.rational import format_fraction, parse_vector
from app.models.bush import Bush, SComposition
from app.schemas.arc import ArcSchema, DownSetSchema, LambdaSchema, diagram_schema
from app.schemas.bush import BushSchema, FiberSchema, InsertResultSchema
from app.schemas.geometry import CellSchema, ComplexSchema, PolytopeSchema, QuotientoplexSchema
from app.schemas.lattice import CongruenceListSchema, CongruenceSchema, LatticeSchema, QuotientSchema
from app.schemas.run import CheckReportSchema, ConjectureReportSchema, RunConfig
from app.services.arc_service import arc_service
from app.services.cache_service import cache
from app.services.check_service import ALL, check_service
from app.services.congruence_service import congruence_service
from app.services.error_handler import error_handler
from app.services.export_service import export_service
from app.services.geometry_service import geometry_service
from app.services.insertion_service import insertion_service
from app.services.lattice_service import lattice_service
from app.services.sbase_service import BUSHES, TREES, TRUNKS, sbase_service
from app.services.shardoplex_service import shardoplex_service

logger = logging.getLogger(__name__)

app = typer.Typer(name=settings.app_name, help="The s-weak order, its congruences and their polyhedral quotients.")
console = Console()
err_console = Console(stderr=True)


class Options(BaseModel):
    use_cache: bool = True
    cache_dir: Optional[str] = None
    seed: int = 0
    enumeration_cap: int = 10**6
    arc_cap: int = 24


@app.callback()
def main(
    ctx: typer.Context,
    verbose: int = typer.Option(0, "--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG"),
    no_cache: bool = typer.Option(False, "--no-cache", help="Bypass the result cache"),
    cache_dir: Optional[str] = typer.Option(None, "--cache-dir", envvar="SWEAK_CACHE_DIR"),
    seed: int = typer.Option(settings.seed, "--seed", help="Seed for sampling checks"),
    enumeration_cap: int = typer.Option(settings.enumeration_cap, "--enumeration-cap"),
    arc_cap: int = typer.Option(settings.arc_cap, "--arc-cap"),
):
    level = {0: None, 1: "INFO"}.get(verbose, "DEBUG")
    setup_logging(level)
    ctx.obj = Options(
        use_cache=not no_cache,
        cache_dir=cache_dir,
        seed=seed,
        enumeration_cap=enumeration_cap,
        arc_cap=arc_cap,
    )


# ----------------------------------------------------------------------
# Plumbing
# ----------------------------------------------------------------------


def _fail(error: Exception, command: str, s: Optional[str], seed: int) -> None:
    report = error_handler.handle_error(error, operation=command, context={"s": s, "seed": seed})
    err_console.print(f"[red]error[/red] ({report['category']}) {report['error_type']}: {report['error_message']}")
    if "witness" in report:
        err_console.print(f"witness: {report['witness']}")
    raise typer.Exit(report["exit_code"])


def _config(ctx: typer.Context, s: str, command: str, out: str = "json", **files) -> RunConfig:
    options: Options = ctx.obj or Options()
    try:
        config = RunConfig(s=s, command=command, out=out, **options.model_dump(), **files)
    except (InputError, ValidationError) as e:
        _fail(e, command, s, options.seed)
    config.apply(settings)
    cache.configure(cache_dir=settings.cache_dir, enabled=config.use_cache)
    return config


def _execute(config: RunConfig, producer: Callable[[], str], **key) -> None:
    """Produce (or read back) an artifact and print it; errors exit with the handler's code."""
    try:
        params = config.cache_params(**key)
        hit = cache.get(config.command, **params)
        if hit is not None:
            text = hit["artifact"]
        else:
            text = producer()
            cache.set(config.command, {"artifact": text}, **params)
    except Exception as e:
        _fail(e, config.command, config.s, config.seed)
    typer.echo(text, nl=False)


def _json(payload) -> str:
    return export_service.to_json(payload).decode()


def _require(out: str, allowed: List[str]) -> None:
    if out not in allowed:
        raise typer.BadParameter(f"--out must be one of {', '.join(allowed)}")


def _read_json(path: Path):
    try:
        return orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def load_downset(path: Path, s: SComposition) -> frozenset:
    """
    Read a down-set file and check it against s.

    Raises:
        InputError: if the file names another composition or an arc is invalid
        NotADownSet: if the arcs are not closed under subarcs
    """
    raw = _read_json(path)
    schema = DownSetSchema.model_validate({"arcs": raw} if isinstance(raw, list) else raw)
    if schema.s is not None and tuple(schema.s) != s.values:
        raise InputError(f"{path} is for s=({','.join(map(str, schema.s))}), not s=({s})")
    arcs = [a.validate(s) for a in schema.to_arcs()]
    return congruence_service.validate_downset(s, arcs)


def load_lambdas(path: Optional[Path], s: SComposition) -> dict:
    if path is None:
        return {}
    schema = LambdaSchema.model_validate(_read_json(path))
    if schema.s is not None and tuple(schema.s) != s.values:
        raise InputError(f"{path} is for s=({','.join(map(str, schema.s))}), not s=({s})")
    return schema.to_mapping()


def _file_key(path: Optional[Path]) -> Optional[str]:
    if path is None:
        return None
    try:
        return path.read_bytes().decode(errors="replace")
    except OSError:
        return str(path)


def _vertex_name(v) -> str:
    return "(" + ",".join(format_fraction(c) for c in v) + ")"


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------


@app.command("enumerate")
def enumerate_command(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s", help="Weak composition, e.g. 1,2,0"),
    what: str = typer.Option(TREES, "--what", help="trees, trunks or bushes"),
    out: str = typer.Option("json", "--out"),
):
    """List the s-trees, s-trunks or all s-bushes."""
    _require(out, ["json", "text"])
    config = _config(ctx, s, "enumerate", out)

    def produce() -> str:
        if what not in (TREES, TRUNKS, BUSHES):
            raise InputError(f"--what must be {TREES}, {TRUNKS} or {BUSHES}")
        bushes = sbase_service.enumerate(config.composition, what, cap=config.enumeration_cap)
        if out == "text":
            return "\n".join(b.code for b in bushes) + "\n"
        return _json([BushSchema.from_bush(b) for b in bushes])

    _execute(config, produce, what=what)


@app.command()
def insert(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    x: str = typer.Option(..., "--x", help="Exact rationals, e.g. 1/2,0,3"),
):
    """Insert a point and print its bush with the H-description of its fiber."""
    config = _config(ctx, s, "insert")

    def produce() -> str:
        point = parse_vector(x)
        b = insertion_service.insert(config.composition, point)
        result = InsertResultSchema(
            x=list(point),
            bush=BushSchema.from_bush(b),
            code=b.code,
            fiber=FiberSchema.from_description(insertion_service.fiber_hrep(b)),
        )
        return _json(result)

    _execute(config, produce, x=x)


@app.command()
def lattice(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    facial: bool = typer.Option(False, "--facial", help="The facial order on all bushes"),
    out: str = typer.Option("json", "--out"),
):
    """The s-weak order (or the facial s-weak order)."""
    _require(out, ["json", "dot"])
    config = _config(ctx, s, "lattice", out)

    def produce() -> str:
        comp = config.composition
        result = lattice_service.facial_lattice(comp) if facial else lattice_service.sweak_lattice(comp)
        if out == "dot":
            return export_service.hasse_dot(result, name=f"W_{comp}".replace(",", "_"))
        return _json(LatticeSchema.from_lattice(comp, result))

    _execute(config, produce, facial=facial)


@app.command()
def arcs(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    tree: Optional[str] = typer.Option(None, "--tree", help="Attachment string of a tree, e.g. L1.L1.L2"),
    meet: bool = typer.Option(False, "--meet", help="Canonical meet diagram instead of the join diagram"),
):
    """All s-arcs, or the canonical join (meet) diagram of one tree."""
    config = _config(ctx, s, "arcs")

    def produce() -> str:
        comp = config.composition
        if tree is None:
            return _json(diagram_schema(arc_service.all_arcs(comp)))
        t = Bush.from_codes(comp, tree)
        if not t.is_tree:
            raise InputError(f"{tree} is not an s-tree")
        diagram = arc_service.delta_meet(t) if meet else arc_service.delta_join(t)
        return _json(diagram_schema(diagram))

    _execute(config, produce, tree=tree, meet=meet)


@app.command()
def congruences(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    count: bool = typer.Option(False, "--count"),
    list_: bool = typer.Option(False, "--list"),
    family: Optional[str] = typer.Option(None, "--family", help="sylvester, recoil, baxter, rectangulation, twist, cambrian or permutree"),
    decoration: Optional[str] = typer.Option(None, "--decoration", help="Permutree decoration, e.g. up,none,down"),
    arc: Optional[str] = typer.Option(None, "--arc", help='Cambrian arc as JSON, e.g. {"i":1,"j":3,"A":[2],"B":[],"r":1}'),
    p: Optional[int] = typer.Option(None, "--p", help="Twist parameter"),
):
    """Count or list the congruences, or print the down set of a named family."""
    config = _config(ctx, s, "congruences")

    def produce() -> str:
        comp = config.composition
        if family is not None:
            alpha = ArcSchema.model_validate(orjson.loads(arc)).to_arc() if arc else None
            deco = decoration.split(",") if decoration else None
            down = congruence_service.named_downset(comp, family, alpha=alpha, decoration=deco, p=p)
            return _json(DownSetSchema.from_downset(comp, down))
        downsets = congruence_service.all_congruences(comp, cap=config.arc_cap)
        listed = [diagram_schema(d) for d in downsets] if list_ or not count else []
        return _json(CongruenceListSchema(s=list(comp.values), count=len(downsets), downsets=listed))

    _execute(config, produce, count=count, list=list_, family=family, decoration=decoration, arc=arc, p=p)


@app.command()
def quotient(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    downset: Path = typer.Option(..., "--downset", help="Down-set JSON file"),
    out: str = typer.Option("json", "--out"),
):
    """The quotient lattice of the congruence given by a down set."""
    _require(out, ["json", "dot"])
    config = _config(ctx, s, "quotient", out, downset_file=downset)

    def produce() -> str:
        comp = config.composition
        congruence = congruence_service.congruence_from_downset(comp, load_downset(downset, comp))
        result = congruence_service.quotient(congruence)
        if out == "dot":
            return export_service.hasse_dot(result, name="quotient")
        return _json(QuotientSchema(
            congruence=CongruenceSchema.from_congruence(congruence),
            lattice=LatticeSchema.from_lattice(comp, result),
        ))

    _execute(config, produce, downset=_file_key(downset))


@app.command()
def foam(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    downset: Optional[Path] = typer.Option(None, "--downset", help="Quotient foam of this down set"),
    out: str = typer.Option("json", "--out"),
):
    """The s-foam, or the quotient foam of a down set."""
    _require(out, ["json", "off", "dot"])
    config = _config(ctx, s, "foam", out, downset_file=downset)

    def produce() -> str:
        comp = config.composition
        if downset is None:
            complex_ = geometry_service.foam(comp, cap=config.enumeration_cap)
        else:
            complex_ = geometry_service.quotient_foam(comp, load_downset(downset, comp))
        if out == "off":
            return export_service.complex_off(complex_)
        dual = geometry_service.dual_graph(complex_)
        if out == "dot":
            return export_service.digraph_dot(dual, complex_.name, node_name=lambda t: t.code)
        cells = [CellSchema.from_polyhedron(t.code, poly) for t, poly in complex_.maximal.items()]
        return _json(ComplexSchema(
            name=complex_.name,
            dim=complex_.dim,
            f_vector=list(complex_.f_vector),
            cells=sorted(cells, key=lambda c: c.label),
            dual_edges=sorted((a.code, b.code) for a, b in dual.edges),
        ))

    _execute(config, produce, downset=_file_key(downset))


@app.command()
def quotientoplex(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    downset: Path = typer.Option(..., "--downset"),
    lambda_file: Optional[Path] = typer.Option(None, "--lambda", help="Coefficients per arc; missing arcs get 1"),
    out: str = typer.Option("json", "--out"),
):
    """The quotientoplex of a down set with positive coefficients."""
    _require(out, ["json", "off", "dot"])
    config = _config(ctx, s, "quotientoplex", out, downset_file=downset, lambda_file=lambda_file)

    def produce() -> str:
        comp = config.composition
        down = load_downset(downset, comp)
        complex_ = shardoplex_service.quotientoplex(comp, down, load_lambdas(lambda_file, comp))
        if out == "off":
            return export_service.trunk_complex_off(complex_)
        skeleton = complex_.skeleton(insertion_service.omega(comp.n))
        if out == "dot":
            return export_service.digraph_dot(skeleton, complex_.name, node_name=_vertex_name)
        cells = [
            PolytopeSchema.from_polytope(",".join(map(str, q)), poly)
            for q, poly in sorted(complex_.maximal.items())
        ]
        support = shardoplex_service.support_polytope(comp, complex_.lambdas)
        lambdas = LambdaSchema.from_mapping(comp, complex_.lambdas).lambdas
        return _json(QuotientoplexSchema(
            s=list(comp.values),
            name=complex_.name,
            arcs=diagram_schema(complex_.arcs),
            lambdas=lambdas,
            f_vector=list(complex_.f_vector),
            cells=cells,
            skeleton=sorted((_vertex_name(u), _vertex_name(v)) for u, v in skeleton.edges),
            support=PolytopeSchema.from_polytope("support", support),
        ))

    _execute(config, produce, downset=_file_key(downset), lambdas=_file_key(lambda_file))


@app.command()
def conjectures(
    ctx: typer.Context,
    s: str = typer.Option(..., "--s"),
    family: str = typer.Option(..., "--family", help="cambrian, permutree or regular"),
    decoration: Optional[List[str]] = typer.Option(None, "--decoration", help="Repeat to compare specific decorations"),
):
    """Collect evidence for the cambrian, permutree and regularity conjectures."""
    config = _config(ctx, s, "conjectures")

    def produce() -> str:
        decos = [d.split(",") for d in decoration] if decoration else None
        report = congruence_service.conjecture_report(config.composition, family, decos)
        return _json(ConjectureReportSchema.from_report(report))

    _execute(config, produce, family=family, decoration=decoration)


@app.command()
def check(
    ctx: typer.Context,
    s: Optional[str] = typer.Option(None, "--s", help="Composition to check; omit with --desk"),
    suite: str = typer.Option(ALL, "--suite", help="all, or a comma separated list of suites"),
    desk: bool = typer.Option(False, "--desk", help="Run on every desk-scale composition"),
    out: str = typer.Option("json", "--out"),
):
    """Run the acceptance checks; exits 4 when a check fails."""
    _require(out, ["json", "text"])
    if (s is None) == (not desk):
        raise typer.BadParameter("pass exactly one of --s and --desk")
    config = _config(ctx, s or "1", "check", out)
    try:
        if desk:
            reports = check_service.run_desk(suite)
        else:
            reports = [check_service.run(config.composition, suite)]
    except Exception as e:
        _fail(e, "check", s, config.seed)
    failed = not all(r.passed for r in reports)
    if out == "text":
        _print_reports(reports)
    else:
        typer.echo(_json(reports if desk else reports[0]), nl=False)
    if failed:
        raise typer.Exit(4)


def _print_reports(reports: List[CheckReportSchema]) -> None:
    table = Table(title=f"Acceptance checks (seed {settings.seed})")
    table.add_column("s")
    table.add_column("#", justify="right")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail", overflow="fold")
    for report in reports:
        for r in report.results:
            status = "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]"
            table.add_row(r.s, str(r.criterion), r.name, status, r.detail)
    console.print(table)


if __name__ == "__main__":
    app()
