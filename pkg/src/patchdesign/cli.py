"""Command-line front end: load -> build -> solve -> emit pipelines."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__, availability, evaluate, netfile, srn
from .model import Bounds, ModelError, load_model

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2

_BOUND_KEYS = {"phi": float, "psi": float, "xi": int, "omega": int, "kappa": int}


def _parse_bounds(text: str) -> Bounds:
    values = {}
    for pair in text.split(","):
        if not pair:
            continue
        if "=" not in pair:
            raise ModelError("bounds", f"expected key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        if key not in _BOUND_KEYS:
            raise ModelError("bounds", f"unknown bound {key!r} "
                             f"(expected one of {sorted(_BOUND_KEYS)})")
        values[key] = _BOUND_KEYS[key](raw)
    return Bounds(asp_upper=values.get("phi"), coa_lower=values.get("psi"),
                  noev_upper=values.get("xi"), noap_upper=values.get("omega"),
                  noep_upper=values.get("kappa"))


def _apply_rate_overrides(model, overrides):
    templates = dict(model.templates)
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ModelError("rate-override", f"expected tier.param=value, got {item!r}")
        target, raw = item.split("=", 1)
        tier, param = target.split(".", 1)
        if tier not in templates:
            raise ModelError("rate-override", f"unknown tier {tier!r}")
        if not hasattr(templates[tier], param) or param in ("tier", "attack_tree"):
            raise ModelError("rate-override", f"unknown rate parameter {param!r}")
        templates[tier] = dataclasses.replace(templates[tier], **{param: float(raw)})
    return dataclasses.replace(model, templates=templates)


def _select_designs(model, selector):
    if selector in (None, "all"):
        return sorted(model.designs.values(), key=lambda d: d.label)
    if selector not in model.designs:
        raise ModelError("design", f"unknown design {selector!r} "
                         f"(known: {sorted(model.designs)})")
    return [model.designs[selector]]


def _write_atomic(path: Path, content: str) -> None:
    # write-then-rename: error paths never leave a partial data file
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_rows(header, rows, fmt, out):
    if fmt == "json":
        print(json.dumps([dict(zip(header, r)) for r in rows], indent=2), file=out)
    elif fmt == "csv":
        print(",".join(header), file=out)
        for r in rows:
            print(",".join(str(x) for x in r), file=out)
    else:
        widths = [max(len(str(x)) for x in [h] + [r[i] for r in rows])
                  for i, h in enumerate(header)]
        print("  ".join(h.ljust(w) for h, w in zip(header, widths)), file=out)
        for r in rows:
            print("  ".join(str(x).ljust(w) for x, w in zip(r, widths)), file=out)


def _fmt6(x: float) -> str:
    return f"{x:.6g}"


def cmd_security(args, out) -> int:
    model = _apply_rate_overrides(load_model(args.model), args.rate_override)
    designs = _select_designs(model, args.design)
    rows = []
    for design in designs:
        from . import harm
        h = harm.build_harm(design, model.templates, model.reachability,
                            args.patched, model.policy)
        m = harm.network_metrics(h)
        rows.append([design.label, str(args.patched).lower(), _fmt6(m.aim),
                     _fmt6(m.asp), m.noev, m.noap, m.noep])
    _emit_rows(["design", "patched", "aim", "asp", "noev", "noap", "noep"],
               rows, args.format, out)
    return EXIT_OK


def cmd_availability(args, out) -> int:
    model = _apply_rate_overrides(load_model(args.model), args.rate_override)
    designs = _select_designs(model, args.design)
    rates = availability.aggregate_all(model.templates, model.policy)
    rows = [[tier, _fmt6(agg.mttp), _fmt6(agg.lambda_eq),
             _fmt6(agg.mttr), _fmt6(agg.mu_eq)]
            for tier, agg in rates.items()]
    _emit_rows(["service", "mttp_hours", "patch_rate", "mttr_hours", "recovery_rate"],
               rows, args.format, out)
    for design in designs:
        coa = availability.compute_coa(design, rates)
        print(f"COA[{design.label}] = {coa:.6g}", file=out)
    return EXIT_OK


def cmd_compare(args, out) -> int:
    model = _apply_rate_overrides(load_model(args.model), args.rate_override)
    designs = _select_designs(model, args.design)
    bounds_list = [_parse_bounds(b) for b in args.bounds or []]
    result = evaluate.sweep(model, bounds_list, patched=args.patched,
                            designs=designs)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_atomic(outdir / "scatter.csv", evaluate.scatter_csv(result.evaluations))
    _write_atomic(outdir / "radar.csv", evaluate.radar_csv(result.evaluations))
    _write_atomic(outdir / "regions.json", evaluate.regions_json(result.regions))
    print(f"wrote scatter.csv, radar.csv, regions.json to {outdir}", file=out)
    for bounds, accepted in result.regions:
        print(f"accepted: {', '.join(accepted) if accepted else '(none)'}", file=out)
    return EXIT_OK


def cmd_solve_srn(args, out) -> int:
    doc = netfile.parse_net(Path(args.netfile).read_text())
    solution, rewards = netfile.solve_document(doc, state_cap=args.state_cap)
    print(f"tangible states: {len(solution.states)}", file=out)
    print(f"residual: {solution.residual:.3g}", file=out)
    order = sorted(range(len(solution.states)), key=lambda i: -solution.pi[i])
    for i in order[:10]:
        print(f"  pi{solution.states[i]} = {solution.pi[i]:.6g}", file=out)
    if len(order) > 10:
        print(f"  ... {len(order) - 10} more states", file=out)
    for name in sorted(rewards):
        print(f"reward {name} = {rewards[name]:.6g}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patchdesign",
        description="Evaluate server-redundancy designs under security "
                    "patching: attack-model metrics and capacity-oriented "
                    "availability.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    def add_model_args(p):
        p.add_argument("--model", required=True, help="model file (JSON)")
        p.add_argument("--design", default="all", help="design label, or 'all'")
        patch = p.add_mutually_exclusive_group()
        patch.add_argument("--patched", dest="patched", action="store_true",
                           default=True)
        patch.add_argument("--unpatched", dest="patched", action="store_false")
        p.add_argument("--rate-override", action="append", metavar="tier.param=value")

    p = sub.add_parser("security", help="print security metric rows")
    add_model_args(p)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")

    p = sub.add_parser("availability", help="print aggregated rates and COA")
    add_model_args(p)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")

    p = sub.add_parser("compare", help="sweep designs and write comparison files")
    add_model_args(p)
    p.add_argument("--bounds", action="append",
                   metavar="phi=..,psi=..[,xi=..,omega=..,kappa=..]")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("solve-srn", help="solve a textual net file")
    p.add_argument("netfile")
    p.add_argument("--state-cap", type=int, default=srn.DEFAULT_STATE_CAP)
    return parser


_COMMANDS = {
    "security": cmd_security,
    "availability": cmd_availability,
    "compare": cmd_compare,
    "solve-srn": cmd_solve_srn,
}


def run(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    parser = build_parser()
    if not argv and argv is not None or argv is None and len(sys.argv) == 1:
        parser.print_usage(err)
        return EXIT_VALIDATION
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 is reserved for solver failures
        return EXIT_OK if e.code in (0, None) else EXIT_VALIDATION
    if args.command is None:
        parser.print_usage(err)
        return EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](args, out)
    except (ModelError, netfile.NetFileError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=err)
        return EXIT_VALIDATION
    except srn.SrnError as e:
        print(f"solver error: {e}", file=err)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run())
