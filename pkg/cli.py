"""
Command-line front end: grow models, compute Wiener indices and MFPTs, run the
formula audit, fit scaling exponents and scan the dimension equality.

Exit codes: 0 success, 1 usage or parameter error, 2 canonical formula
mismatch in ``verify``, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

import closed_forms as cf
from analysis import delta_v, dim_equality_scan, mean_distance_series, model_dimensions, persistence, scaling_fit
from config import Config
from growth_ops import cumulative_degree_distribution, fit_exponential_tail, grow, predicted_counts, resolve_seed
from ledger_store import DEFAULT_LEDGER_FILENAME, DEFAULT_RECORDS_FILENAME, LedgerStore
from models.tree_models import (
    EDGE_FAMILIES,
    AuditGrid,
    AuditRecord,
    BadParam,
    CliConfig,
    CountSource,
    Family,
    FormulaName,
    GrowReport,
    ModelSpec,
    OutputFormat,
    ResourceCapExceeded,
    ScaleReport,
    SeedKind,
    SeedSpec,
    Tier,
    TreeAuditError,
    WalkConfig,
    WienerReport,
    parse_key_values,
)
from random_walk import mfpt
from tree_core import degree_stats, diameter, oracle_wiener, to_dot, to_edge_list_text
from utils.helpers import fixed_width_table, format_large_number, format_ratio, format_rate
from verify import audit, compare, ledger, ledger_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_RESOURCE_CAP = 3


class UsageError(Exception):
    """Bad command line"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# --- Argument parsing -------------------------------------------------------

def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=[f.value for f in Family], help="Model family")
    p.add_argument("-m", type=int, help="Subdivision / pendant-leaf / children parameter m")
    p.add_argument("-w", type=int, help="Star centres per edge w")
    p.add_argument("-n", type=int, help="Cayley coordination number n")
    p.add_argument("--seed", help="'edge', 'star', or an explicit edge list like 0-1,1-2")
    p.add_argument("-t", type=int, help="Number of growth steps")
    p.add_argument("--config", help="Key-value file with defaults (family=..., m=..., ...)")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TEXT.value)
    p.add_argument("--output", help="Output file (relative paths resolve against the output directory)")
    p.add_argument("--threads", type=int, default=Config.DEFAULT_THREADS)
    p.add_argument("--verbose", action="store_true", help="Debug logging and extra report detail")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treeaudit", description="Exact Wiener index and MFPT audit for treelike models")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("grow", help="Build a model tree and emit it")
    _add_spec_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("wiener", help="Canonical and printed Wiener index, checked against the oracle")
    _add_spec_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("mfpt", help="Exact and Monte-Carlo mean first-passage time")
    _add_spec_flags(p)
    _add_common_flags(p)
    p.add_argument("--mc-trials", type=int, default=0, help="Monte-Carlo trials (0 disables)")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, help="Truncate walks after this many steps")

    p = sub.add_parser("verify", help="Audit every formula over a parameter grid")
    _add_common_flags(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--default-grid", action="store_true", help="Full default grid")
    group.add_argument("--quick", action="store_true", help="Small grid touching every formula")
    p.add_argument("--ledger-dir", help="Directory for the ledger files (default: output directory)")

    p = sub.add_parser("scale", help="Scaling-exponent fit, dimensions and growth ratio")
    _add_spec_flags(p)
    _add_common_flags(p)
    p.add_argument("--t-min", type=int, default=1)
    p.add_argument("--t-max", type=int, default=8)
    p.add_argument("--plot-data", action="store_true", help="Emit only the (x, y) fit points as CSV")

    p = sub.add_parser("solve-dim", help="Integer solutions of the dimension equality")
    _add_common_flags(p)
    p.add_argument("--max", type=int, default=50, help="Bound for w, n and m")
    return parser


def _spec_from_args(args: argparse.Namespace) -> ModelSpec:
    fields: Dict[str, Any] = {}
    if getattr(args, "config", None):
        try:
            fields.update(parse_key_values(Path(args.config).read_text(encoding="utf-8")))
        except OSError as e:
            raise UsageError(f"cannot read config file: {e}") from None
        except ValueError as e:
            raise UsageError(f"bad config file: {e}") from None
    if args.family:
        fields["family"] = Family(args.family)
    for key in ("m", "w", "n", "t"):
        value = getattr(args, key, None)
        if value is not None:
            fields[key] = value
    if args.seed:
        try:
            fields["seed"] = SeedSpec.parse(args.seed)
        except ValueError as e:
            raise UsageError(str(e)) from None
    if "family" not in fields:
        raise UsageError("--family is required (or family= in --config)")
    try:
        return ModelSpec(**fields)
    except ValidationError as e:
        raise BadParam(_first_error(e)) from None


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(p) for p in err.get("loc", ())) or "spec"
    return f"{where}: {err.get('msg', 'invalid value')}"


def parse_cli(argv: Optional[Sequence[str]] = None) -> tuple[CliConfig, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    spec = _spec_from_args(args) if args.command in ("grow", "wiener", "mfpt", "scale") else None
    try:
        cfg = CliConfig(
            command=args.command,
            format=OutputFormat(args.format),
            output=args.output,
            threads=args.threads,
            verbose=args.verbose,
            spec=spec,
        )
    except ValidationError as e:
        raise BadParam(_first_error(e)) from None
    return cfg, args


# --- Output -----------------------------------------------------------------

def _dump_json(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    elif isinstance(payload, list):
        payload = [p.model_dump(mode="json") if isinstance(p, BaseModel) else p for p in payload]
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(cfg: CliConfig, text: str) -> None:
    if cfg.output:
        path = LedgerStore().write_text(cfg.output, text)
        logger.info(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _unsupported(cfg: CliConfig) -> None:
    raise UsageError(f"{cfg.command} does not support --format {cfg.format.value}")


def _record_rows(records: List[AuditRecord]) -> List[List[str]]:
    return [
        [
            r.formula.key,
            " ".join(f"{k}={v}" for k, v in sorted(r.params.items())),
            format_ratio(r.oracle_value),
            format_ratio(r.formula_value),
            r.verdict.value,
        ]
        for r in records
    ]


# --- Commands ---------------------------------------------------------------

def _predicted_header(spec: ModelSpec) -> str:
    v, e = predicted_counts(spec)[CountSource.CORRECTED].at(spec.t)
    return f"{spec.serialize()} predicted |V|={v} |E|={e}"


def cmd_grow(cfg: CliConfig) -> int:
    spec = cfg.spec
    assert spec is not None
    tree = grow(spec)
    logger.info(f"{spec.serialize()}: {format_large_number(tree.n)} vertices, diameter {diameter(tree)}")
    header = _predicted_header(spec)
    if cfg.format in (OutputFormat.TEXT, OutputFormat.EDGES):
        _emit(cfg, to_edge_list_text(tree, header))
    elif cfg.format == OutputFormat.DOT:
        _emit(cfg, to_dot(tree, name=spec.family.value, header_comment=header))
    elif cfg.format == OutputFormat.CSV:
        _emit(cfg, _csv(["u", "v"], tree.edges()))
    else:
        _, average = degree_stats(tree)
        tail = None
        if spec.family == Family.EXPONENTIAL and tree.n > 2:
            distribution = cumulative_degree_distribution(tree)
            if len(distribution) >= 2:
                tail = fit_exponential_tail(distribution)
        report = GrowReport(
            spec=spec.serialize(),
            vertices=tree.n,
            edges=tree.edge_count,
            predicted={k.value: v for k, v in predicted_counts(spec).items()},
            diameter=diameter(tree),
            average_degree=average,
            degree_tail=tail,
            edge_list=tree.edges(),
            generation_tags=list(tree.generation_tags),
        )
        _emit(cfg, _dump_json(report))
    return EXIT_OK


def _printed_values(spec: ModelSpec) -> List[tuple]:
    """(FormulaId, params, value) for every published form applying to ``spec`` at its final step."""
    out: List[tuple] = []
    seed = resolve_seed(spec)
    t = spec.t
    if spec.family in EDGE_FAMILIES:
        assert seed is not None
        s0 = oracle_wiener(seed, Config.BFS_ORACLE_MAX_VERTICES)
        n0 = seed.n
        for r in cf.iterate_wiener(spec, s0, n0):
            if r.formula.tier == Tier.AS_PRINTED and r.params.get("t") == t:
                out.append((r.formula, r.params, r.value))
        if t == 1:
            params = {"S": s0, "n": n0}
            printed = cf.fid
            if spec.family == Family.FIRST_ORDER_SUBDIVISION:
                out.append((printed(FormulaName.LEMMA2_SUB1, Tier.AS_PRINTED), params, Fraction(cf.lemma2(s0, n0))))
            elif spec.family == Family.SUBDIVISION:
                out.append((printed(FormulaName.THM1_SUBM, Tier.AS_PRINTED), dict(params, m=spec.m), cf.eq15(s0, n0, spec.m)))
            elif spec.family == Family.STAR_FRACTAL_1M:
                out.append((printed(FormulaName.LEMMA3_STAR1M, Tier.AS_PRINTED), dict(params, m=spec.m), Fraction(cf.lemma3(s0, n0, spec.m))))
            else:
                w, m = spec.w, spec.m
                p = dict(params, w=w, m=m)
                out.append((printed(FormulaName.THM2_EQ22, Tier.AS_PRINTED), p, cf.eq22(s0, n0, w, m)))
                out.append((printed(FormulaName.THM2_EQ29, Tier.AS_PRINTED), p, cf.eq29(s0, n0, w, m)))
    elif spec.family == Family.CAYLEY:
        n = spec.n
        params = {"n": n, "t": t}
        if seed is None:
            s, s1, s2, leaves, _ = cf.cayley_star_state(n)
            out.append((cf.fid(FormulaName.EQ45_CAYLEY, Tier.AS_PRINTED), params, cf.eq45(n, t)))
            out.append((cf.fid(FormulaName.EQ47_CAYLEYGEN, Tier.AS_PRINTED), params, cf.eq47(s, s1, s2, leaves, n - 1, t - 1)))
        else:
            s1, s2, leaves = cf.seed_leaf_sums(seed)
            s0 = oracle_wiener(seed, Config.BFS_ORACLE_MAX_VERTICES)
            out.append((cf.fid(FormulaName.EQ47_CAYLEYGEN, Tier.AS_PRINTED), params, cf.eq47(s0, s1, s2, leaves, n - 1, t)))
    else:
        assert seed is not None
        s0 = oracle_wiener(seed, Config.BFS_ORACLE_MAX_VERTICES)
        params = {"m": spec.m, "t": t}
        out.append((cf.fid(FormulaName.EQ49_EXPONENTIAL, Tier.AS_PRINTED), params, cf.eq49(s0, seed.n, spec.m, t)))
        if spec.seed.kind == SeedKind.EDGE:
            out.append((cf.fid(FormulaName.EQ50_EXPEDGE, Tier.AS_PRINTED), params, cf.eq50(spec.m, t)))
    return out


def wiener_report(spec: ModelSpec, verbose: bool = False) -> WienerReport:
    _, vertices, canonical = cf.wiener_sequence(spec)[-1]
    oracle: Optional[int] = None
    if vertices <= Config.ORACLE_MAX_VERTICES:
        oracle = oracle_wiener(grow(spec), Config.BFS_ORACLE_MAX_VERTICES)
    reference = canonical if oracle is None else oracle
    formulas = [compare(formula, params, reference, value) for formula, params, value in _printed_values(spec)]
    parts = None
    if verbose and spec.family == Family.CAYLEY and spec.seed.kind == SeedKind.STAR:
        parts = cf.cayley_parts(spec.n, spec.t)
    return WienerReport(
        spec=spec.serialize(),
        vertices=vertices,
        canonical=Fraction(canonical),
        oracle=None if oracle is None else Fraction(oracle),
        formulas=formulas,
        cayley_parts=parts,
    )


def cmd_wiener(cfg: CliConfig) -> int:
    assert cfg.spec is not None
    report = wiener_report(cfg.spec, cfg.verbose)
    if cfg.format == OutputFormat.JSON:
        _emit(cfg, _dump_json(report))
    elif cfg.format == OutputFormat.CSV:
        _emit(cfg, _csv(["formula", "params", "oracle", "value", "verdict"], _record_rows(report.formulas)))
    elif cfg.format == OutputFormat.TEXT:
        lines = [
            f"{report.spec}",
            f"vertices   {report.vertices}",
            f"canonical  {format_ratio(report.canonical)}",
            f"oracle     {format_ratio(report.oracle)}",
        ]
        if report.cayley_parts is not None:
            p = report.cayley_parts
            lines.append(f"|A_t|={p.ingredient_order} theta={p.theta} omega12={p.omega12} gamma={p.gamma}")
        text = "\n".join(lines) + "\n"
        if report.formulas:
            text += fixed_width_table(["formula", "params", "reference", "value", "verdict"], _record_rows(report.formulas))
        _emit(cfg, text)
    else:
        _unsupported(cfg)
    return EXIT_OK


def cmd_mfpt(cfg: CliConfig, args: argparse.Namespace) -> int:
    assert cfg.spec is not None
    tree = grow(cfg.spec)
    walk = None
    if args.mc_trials > 0:
        try:
            walk = WalkConfig(rng_seed=args.rng_seed, trials=args.mc_trials, max_steps=args.max_steps, threads=cfg.threads)
        except ValidationError as e:
            raise BadParam(_first_error(e)) from None
    report = mfpt(tree, walk)
    if cfg.format == OutputFormat.JSON:
        _emit(cfg, _dump_json(report))
    elif cfg.format == OutputFormat.TEXT:
        lines = [
            cfg.spec.serialize(),
            f"vertices         {report.n}",
            f"wiener           {format_ratio(report.wiener)}",
            f"exact            {format_ratio(report.exact)}",
            f"2S/|V|           {format_ratio(report.from_wiener_2S_over_V)}",
            f"printed S/|V|    {format_ratio(report.printed_S_over_V)}",
            f"lemma factor     {format_ratio(report.lemma_factor)}",
        ]
        if report.mc is not None:
            lines.append(f"monte carlo      {report.mc.estimate:.6f} +/- {report.mc.stderr:.6f} ({report.mc.trials} walks, {report.mc.truncated} truncated)")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _unsupported(cfg)
    return EXIT_OK


def cmd_verify(cfg: CliConfig, args: argparse.Namespace) -> int:
    grid = AuditGrid.quick() if args.quick else AuditGrid()
    grid = grid.model_copy(update={"threads": cfg.threads})
    records = audit(grid)
    summary = ledger(records)
    store = LedgerStore(args.ledger_dir)
    store.write_records(records, DEFAULT_RECORDS_FILENAME)
    table = ledger_text(summary)
    path = store.write_text(DEFAULT_LEDGER_FILENAME, table)
    logger.info(f"ledger written to {path}")

    if cfg.format == OutputFormat.JSON:
        _emit(cfg, _dump_json(summary))
    elif cfg.format == OutputFormat.CSV:
        rows = [
            [r.formula.key, r.total, r.matches, r.mismatches, r.undefined, format_rate(r.pass_rate),
             " ".join(f"{k}={v}" for k, v in (r.first_failure or {}).items())]
            for r in summary.rows
        ]
        _emit(cfg, _csv(["formula", "total", "match", "mismatch", "undefined", "pass_rate", "first_failure"], rows))
    elif cfg.format == OutputFormat.TEXT:
        _emit(cfg, table)
    else:
        _unsupported(cfg)
    if not summary.canonical_ok:
        logger.error("canonical formulas disagree with the oracle")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_scale(cfg: CliConfig, args: argparse.Namespace) -> int:
    spec = cfg.spec
    assert spec is not None
    if args.t_max < args.t_min:
        raise UsageError("--t-max must be >= --t-min")
    steps = list(range(args.t_min, args.t_max + 1))
    fit = scaling_fit(spec, steps)
    if args.plot_data:
        _emit(cfg, _csv(["x", "y"], fit.points))
        return EXIT_OK
    series = mean_distance_series(spec, steps) if spec.family in (Family.CAYLEY, Family.EXPONENTIAL) else []
    report = ScaleReport(
        spec=spec.serialize(),
        fit=fit,
        dimensions=model_dimensions(spec),
        persistence=persistence(spec),
        delta_v=delta_v(spec),
        mean_distance=series,
    )
    if cfg.format == OutputFormat.JSON:
        _emit(cfg, _dump_json(report))
    elif cfg.format == OutputFormat.CSV:
        _emit(cfg, _csv(["x", "y"], fit.points))
    elif cfg.format == OutputFormat.TEXT:
        d = report.dimensions
        lines = [
            report.spec,
            f"regression        {fit.regression} over t={args.t_min}..{args.t_max}",
            f"fitted exponent   {fit.exponent:.6f} (r^2={fit.r_squared:.6f})",
            f"analytic          {fit.analytic_exponent:.6f}",
            f"printed           {format_rate(fit.printed_exponent, 6)}",
            f"diameter-based    {format_rate(fit.diameter_exponent, 6)}",
            f"dimensions        {d.kind.value} d_f={format_rate(d.d_f)} d_w={format_rate(d.d_w)} spectral={format_rate(d.d_spectral)}",
            f"persistence       {report.persistence.value}",
            f"delta_v           limit={report.delta_v.limit} empirical(t={report.delta_v.empirical_t})={float(report.delta_v.empirical):.6f} printed={format_ratio(report.delta_v.printed)}",
        ]
        for p in series:
            lines.append(f"t={p.t} |V|={p.vertices} <S>={p.mean_distance:.6f} <S>/ln|V|={p.ratio_to_log_v:.6f} limit={p.limit:.6f}")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _unsupported(cfg)
    return EXIT_OK


def cmd_solve_dim(cfg: CliConfig, args: argparse.Namespace) -> int:
    bound = args.max
    solutions = dim_equality_scan(bound, bound, bound)
    rows = [[s.w, s.n, s.m, f"{s.d_f:.6f}", s.rule] for s in solutions]
    if cfg.format == OutputFormat.JSON:
        _emit(cfg, _dump_json(solutions))
    elif cfg.format == OutputFormat.CSV:
        _emit(cfg, _csv(["w", "n", "m", "d_f", "rule"], rows))
    elif cfg.format == OutputFormat.TEXT:
        _emit(cfg, fixed_width_table(["w", "n", "m", "d_f", "rule"], rows) + f"{len(solutions)} solutions\n")
    else:
        _unsupported(cfg)
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    cfg, args = parse_cli(argv)
    if cfg.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    if cfg.command == "grow":
        return cmd_grow(cfg)
    if cfg.command == "wiener":
        return cmd_wiener(cfg)
    if cfg.command == "mfpt":
        return cmd_mfpt(cfg, args)
    if cfg.command == "verify":
        return cmd_verify(cfg, args)
    if cfg.command == "scale":
        return cmd_scale(cfg, args)
    return cmd_solve_dim(cfg, args)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and map errors to exit codes; messages go to stderr."""
    try:
        return run(argv)
    except ResourceCapExceeded as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_RESOURCE_CAP
    except (UsageError, TreeAuditError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


__all__ = ["build_parser", "parse_cli", "wiener_report", "run", "main"]
