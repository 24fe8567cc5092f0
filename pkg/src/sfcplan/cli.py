"""Command-line simulator.

    sfcplan --scenario world.json --out runs/demo
    sfcplan --scenario sparse.json --out runs/batch --seeds 0..9

Each run directory receives ``trace.jsonl``, ``metrics.json`` and, unless
``--no-svg`` is given, ``path.svg``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, replace
from typing import Any, Dict, List, NoReturn, Optional, Sequence

from .graph import Connectivity
from .nonuniform import CompositeRegion, run_composite_mission
from .render import render_composite_svg, render_svg
from .scenario import ScenarioError, composite_parts, composite_worlds, parse_scenario
from .simulator import MissionError, MissionTrace, ScenarioConfig, dumps_jsonl, run_mission, trace_records

log = logging.getLogger("sfcplan")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFINED = 2


@dataclass(frozen=True)
class RunFlags:
    svg: bool = True
    fail_on_confinement: bool = False


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _single_metrics(config: ScenarioConfig, trace: MissionTrace) -> Dict[str, Any]:
    out = trace.metrics.to_dict()
    out.update({
        "iteration": config.spec.iteration,
        "connectivity": config.connectivity.value,
        "start": config.start,
        "terminal": trace.terminal,
    })
    return out


def _write_single(config: ScenarioConfig, trace: MissionTrace, out_dir: str, flags: RunFlags) -> None:
    os.makedirs(out_dir, exist_ok=True)
    _write(os.path.join(out_dir, "trace.jsonl"), dumps_jsonl(trace_records(trace.events)))
    _write(os.path.join(out_dir, "metrics.json"), _dump_json(_single_metrics(config, trace)))
    if flags.svg:
        _write(os.path.join(out_dir, "path.svg"), render_svg(trace, config.world(), config.spec))


def _run_single(config: ScenarioConfig, out_dir: str, flags: RunFlags) -> int:
    trace = run_mission(config)
    _write_single(config, trace, out_dir, flags)
    flagged = trace.metrics.confinement.paper_flag
    if flagged and config.auto_refine_on_confinement:
        fine = config.refined()
        log.info("confinement flagged at iteration %d; re-planning at %d",
                 config.spec.iteration, fine.spec.iteration)
        fine_trace = run_mission(fine)
        _write_single(fine, fine_trace, os.path.join(out_dir, "run-2"), flags)
        flagged = fine_trace.metrics.confinement.paper_flag
    if flagged and flags.fail_on_confinement:
        return EXIT_CONFINED
    return EXIT_OK


def _run_composite(config: ScenarioConfig, out_dir: str, flags: RunFlags) -> int:
    parts = composite_parts(config)
    region = CompositeRegion(tuple(p.subregion for p in parts))
    worlds = composite_worlds(config)
    result = run_composite_mission(region, worlds, config.connectivity, config.start)

    records: List[Dict[str, Any]] = []
    by_target = {t.to_region: t for t in result.transitions}
    for sub in region.subregions:
        rec = by_target.get(sub.id)
        if rec is not None:
            records.append(rec.to_dict())
        trace = result.traces.get(sub.id)
        if trace is not None:
            records.extend(
                dict(ev.to_dict(), region=sub.id) for ev in trace.events
            )
    records = [dict(r, t=i) for i, r in enumerate(records)]

    regions = {rid: tr.metrics.to_dict() for rid, tr in result.traces.items()}
    # A->B walk plus the B->C crossing
    crossing_edges = sum(len(t.route) for t in result.transitions if t.C is not None)
    metrics = {
        "edges_traversed": sum(m["edges_traversed"] for m in regions.values()) + crossing_edges,
        "cells_visited": sum(m["cells_visited"] for m in regions.values()),
        "obstacles_found": sum(m["obstacles_found"] for m in regions.values()),
        "revisit_count": sum(m["revisit_count"] for m in regions.values())
        + sum(len(t.route) - 1 for t in result.transitions if t.C is not None),
        "confinement": {
            "paper_flag": any(m["confinement"]["paper_flag"] for m in regions.values()),
            "regions": {rid: m["confinement"] for rid, m in regions.items()},
        },
        "regions": regions,
        "entries": result.entries,
        "skipped": result.skipped,
    }
    os.makedirs(out_dir, exist_ok=True)
    _write(os.path.join(out_dir, "trace.jsonl"), dumps_jsonl(records))
    _write(os.path.join(out_dir, "metrics.json"), _dump_json(metrics))
    if flags.svg:
        specs = [(s.id, s.spec) for s in region.subregions]
        svg = render_composite_svg(specs, result.traces, worlds, [t.to_dict() for t in result.transitions])
        _write(os.path.join(out_dir, "path.svg"), svg)
    if metrics["confinement"]["paper_flag"] and flags.fail_on_confinement:
        return EXIT_CONFINED
    return EXIT_OK


def run_command(config: ScenarioConfig, out_dir: str, flags: RunFlags = RunFlags()) -> int:
    """Run one scenario and write its outputs into ``out_dir``.

    Returns 0 on completion, or 2 when ``fail_on_confinement`` is set and the
    final run is flagged as confined.
    """
    if config.composite is not None:
        return _run_composite(config, out_dir, flags)
    return _run_single(config, out_dir, flags)


def parse_seed_range(text: str) -> List[int]:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if b < a:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return list(range(a, b + 1))


class _Parser(argparse.ArgumentParser):
    # status 2 is reserved for confinement
    def error(self, message: str) -> "NoReturn":  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="sfcplan",
        description="Online obstacle-evading coverage along a Hilbert curve.",
    )
    p.add_argument("--scenario", required=True, metavar="PATH", help="scenario JSON file")
    p.add_argument("--out", required=True, metavar="DIR", help="output directory")
    p.add_argument("--svg", dest="svg", action="store_true", default=True, help="write path.svg (default)")
    p.add_argument("--no-svg", dest="svg", action="store_false", help="skip path.svg")
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, help="override the random-obstacle seed")
    seeds.add_argument("--seeds", type=parse_seed_range, metavar="A..B",
                       help="batch over seeds A..B inclusive, one seed-N/ directory each")
    p.add_argument("--connectivity", choices=[c.value for c in Connectivity],
                   help="override the scenario's grid connectivity")
    p.add_argument("--fail-on-confinement", action="store_true",
                   help="exit with status 2 when the final run is flagged as confined")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = parse_scenario(args.scenario)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.connectivity:
        config = replace(config, connectivity=Connectivity(args.connectivity))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    flags = RunFlags(svg=args.svg, fail_on_confinement=args.fail_on_confinement)

    jobs = [(config, args.out)]
    if args.seeds:
        jobs = [(config.with_seed(s), os.path.join(args.out, f"seed-{s}")) for s in args.seeds]
    status = EXIT_OK
    for cfg, out_dir in jobs:
        try:
            code = run_command(cfg, out_dir, flags)
        except (MissionError, ScenarioError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_ERROR
        except OSError as e:
            print(f"error: cannot write to {out_dir}: {e.strerror}", file=sys.stderr)
            return EXIT_ERROR
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
