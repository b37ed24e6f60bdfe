"""``hdlslice`` command line.

Every subcommand prints its main result on stdout; ``--out DIR`` also writes
the corresponding files. Errors are reported as ``file:line:col: error: msg``
and map to exit codes 2 (parse), 3 (elaboration), 4 (config), 5 (runtime).
``oracle`` exits 1 when pruning lost a detectable fault.
"""

from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path

from ..depgraph import build_pdg, static_slice, write_edge_list
from ..errors import ConfigError, HdlSliceError
from ..frontend import SignalKind, pretty
from ..sim import write_coverage, write_golden
from ..slicer import PruneMode, Semantics, write_fault_list
from .config import CampaignConfig, load_config
from .generator import GeneratorParams, generate_random_design
from .pipeline import analyse, compare_with_oracle, load_design_file, run_pipeline
from .report import emit_report


def _config(args) -> CampaignConfig:
    cfg = load_config(args.config) if args.config else CampaignConfig()
    return cfg.replace(
        mode=getattr(args, "mode", None),
        semantics=getattr(args, "semantics", None),
        workers=getattr(args, "workers", None),
        seed=getattr(args, "seed", None),
        out=args.out,
    )


def _write(out: Path | None, name: str, text: str) -> None:
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _describe(design) -> str:
    lines = [f"module {design.name}"]
    for sig in design.signals:
        extra = f" depth {sig.depth}" if sig.kind is SignalKind.MEMORY else ""
        port = " port" if sig.port else ""
        lines.append(f"signal {sig.id} {sig.name} {sig.kind.name.lower()} width {sig.width}{extra}{port}")
    for stmt in design.statements:
        du = design.defuse[stmt.id]
        parent = design.parent[stmt.id]
        names = lambda ids: ",".join(sorted(design.signals[i].name for i in ids)) or "-"
        lines.append(
            f"stmt {stmt.id} {stmt.kind.name.lower()} line {stmt.loc.line}"
            f" parent {'-' if parent is None else parent}"
            f" def {names(du.defs)} use {names(du.uses)}"
        )
    return "\n".join(lines) + "\n"


def cmd_parse(args) -> int:
    if args.design:
        path = Path(args.design)
    else:
        cfg = _config(args)
        cfg.require("design")
        path = cfg.design
    design = load_design_file(path)
    text = pretty(design) if args.pretty else _describe(design)
    sys.stdout.write(text)
    _write(args.out, "design.mrtl" if args.pretty else "design.txt", text)
    return 0


def cmd_slice(args) -> int:
    cfg = _config(args)
    cfg.require("design", "observation")
    design = load_design_file(cfg.design)
    pdg = build_pdg(design)
    sl = static_slice(pdg, design, cfg.observation)
    lines = [
        f"{sid}: {design.source_line(design.statements[sid].loc.line)}" for sid in sorted(sl.statements)
    ]
    regs = ", ".join(sorted(design.signals[s].name for s in sl.registers))
    text = "\n".join(lines) + f"\nregisters: {regs}\n"
    sys.stdout.write(text)
    _write(cfg.out, "slice.txt", text)
    if args.graph:
        buf = io.StringIO()
        write_edge_list(pdg, buf)
        if args.graph == "-":
            sys.stdout.write(buf.getvalue())
        else:
            Path(args.graph).write_text(buf.getvalue())
    return 0


def cmd_golden(args) -> int:
    cfg = _config(args)
    an = analyse(cfg)
    buf = io.StringIO()
    write_golden(an.design, an.golden, buf)
    sys.stdout.write(buf.getvalue())
    _write(cfg.out, "golden.csv", buf.getvalue())
    if cfg.out is not None:
        cov = io.StringIO()
        write_coverage(an.coverage, cov)
        _write(cfg.out, "coverage.txt", cov.getvalue())
    return 0


def cmd_faults(args) -> int:
    cfg = _config(args)
    an = analyse(cfg)
    faults = an.fault_list(cfg)
    buf = io.StringIO()
    write_fault_list(an.design, faults, buf)
    if cfg.out is None:
        sys.stdout.write(buf.getvalue())
    else:
        _write(cfg.out, "faults.csv", buf.getvalue())
        print(f"{faults.mode.value}: {len(faults)} of {faults.universe_size} faults")
    return 0


def cmd_run(args) -> int:
    cfg = _config(args)
    report = run_pipeline(cfg)
    sys.stdout.write(emit_report(report, "Text").decode())
    return 0


def cmd_oracle(args) -> int:
    cfg = _config(args)
    an = analyse(cfg)
    cmp = compare_with_oracle(cfg, analysis=an)
    text = cmp.text(an.design)
    sys.stdout.write(text)
    _write(cfg.out, "oracle.txt", text)
    return 0 if cmp.verdict else 1


def cmd_gen(args) -> int:
    cfg = _config(args)
    params = cfg.generator
    overrides = {
        k: v
        for k, v in (("max_regs", args.max_regs), ("max_stmts", args.max_stmts), ("memory", args.memory))
        if v is not None
    }
    if overrides:
        try:
            params = GeneratorParams(**{**params.__dict__, **overrides})
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    gen = generate_random_design(cfg.seed, params)
    if cfg.out is None:
        sys.stdout.write(gen.text)
    else:
        _write(cfg.out, "design.mrtl", gen.text)
        _write(cfg.out, "stimulus.csv", gen.stimulus_csv)
        _write(cfg.out, "campaign.cfg", gen.config_text())
        print(f"wrote design.mrtl, stimulus.csv, campaign.cfg to {cfg.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdlslice",
        description="Dynamic-slice fault-list pruning and bit-flip injection for MiniRTL designs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, campaign=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="campaign config file (key = value)")
        p.add_argument("--out", type=Path, help="directory for output files")
        if campaign:
            p.add_argument("--mode", choices=[m.value for m in PruneMode])
            p.add_argument("--semantics", choices=[s.value for s in Semantics])
            p.add_argument("--workers", type=int)
        p.set_defaults(fn=fn)
        return p

    p = add("parse", cmd_parse, "parse and elaborate a design")
    p.add_argument("design", nargs="?", help="design file (default: from --config)")
    p.add_argument("--pretty", action="store_true", help="print canonical MiniRTL")

    p = add("slice", cmd_slice, "static backward slice of the observation list")
    p.add_argument("--graph", help="write the dependence graph edge list here ('-' for stdout)")

    add("golden", cmd_golden, "golden run: observation trace and coverage")
    add("faults", cmd_faults, "generate the (pruned) fault list", campaign=True)
    add("run", cmd_run, "run a pruned injection campaign and report", campaign=True)
    add("oracle", cmd_oracle, "check a pruned campaign against the exhaustive one", campaign=True)

    p = add("gen", cmd_gen, "generate a random design, stimulus and config")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-regs", type=int)
    p.add_argument("--max-stmts", type=int)
    p.add_argument("--memory", action="store_true", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except HdlSliceError as exc:
        filename = getattr(exc, "filename", None) or str(args.config or getattr(args, "design", None) or "hdlslice")
        print(exc.format(filename), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
