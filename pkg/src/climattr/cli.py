"""Command-line front end.

One YAML configuration drives every subcommand:

* ``fit``          fit diagnostics only
* ``attribute``    fit plus scenario changes (and decompositions if configured)
* ``granger``      the configured Granger causality tests
* ``fingerprint``  the configured fingerprint regressions
* ``simulate``     generate synthetic data from a causal-graph spec
* ``report``       everything the config requests, plus plot-data CSVs

Exit codes: 0 success, 1 configuration/data error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config, with_overrides
from .exceptions import DataError, NumericalError
from .io import write_csv
from .report import emit_plot_data, run_analysis, write_report
from .simulate import CausalGraphSpec, Edge, simulate


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="YAML analysis configuration")
    parser.add_argument("--out", default="climattr_out", help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configured random seed")
    parser.add_argument("--level", type=float, default=None,
                        help="override the configured confidence level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="climattr",
        description="Observation-driven climate change detection and attribution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("fit", "fit the configured model and report diagnostics"),
        ("attribute", "scenario changes with confidence intervals"),
        ("granger", "Granger causality tests from the config"),
        ("fingerprint", "fingerprint scaling-factor regressions"),
        ("simulate", "generate synthetic data from a causal graph spec"),
        ("report", "run every configured analysis and emit plot data"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    return parser


_SECTIONS = {
    "fit": {"fit"},
    "attribute": {"fit", "attribute"},
    "granger": {"fit", "granger"},
    "fingerprint": {"fit", "fingerprint"},
    "report": None,  # everything
}


def _cmd_simulate(config, out_dir: Path) -> int:
    spec_dict = config.simulate
    if not spec_dict:
        raise DataError("config has no 'simulate' section")
    from . import simulate as sim

    if "graph" in spec_dict:
        preset = str(spec_dict["graph"])
        builders = {
            "mediator": sim.mediator_graph,
            "confounder": sim.confounder_graph,
            "confounder_plus_independent": sim.confounder_plus_independent_graph,
            "null": sim.null_graph,
            "direct": sim.direct_edge_graph,
        }
        if preset not in builders:
            raise DataError(
                f"unknown preset graph {preset!r}; have {sorted(builders)}"
            )
        kwargs = {k: v for k, v in spec_dict.items()
                  if k not in ("graph", "response")}
        spec = builders[preset](**kwargs)
    else:
        edges = tuple(
            Edge(str(e["source"]), str(e["target"]), int(e["lag"]), float(e["coef"]))
            for e in spec_dict.get("edges", [])
        )
        spec = CausalGraphSpec(
            edges=edges,
            noise_sd={str(k): float(v)
                      for k, v in spec_dict.get("noise_sd", {}).items()},
            length=int(spec_dict.get("length", 500)),
            seed=int(spec_dict.get("seed", 0)),
        )
    dataset = simulate(spec, response=str(spec_dict.get("response", "Y")))
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(dataset.response, out_dir / f"{dataset.response.name}.csv")
    for ts_, _ in dataset.covariates:
        write_csv(ts_, out_dir / f"{ts_.name}.csv")
    print(f"wrote {1 + len(dataset.covariates)} series to {out_dir}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        config = with_overrides(config, seed=args.seed, level=args.level)
        out_dir = Path(args.out)

        if args.command == "simulate":
            return _cmd_simulate(config, out_dir)

        report = run_analysis(config, sections=_SECTIONS[args.command])
        json_path = write_report(report, out_dir)
        if args.command == "report":
            emit_plot_data(config, out_dir)
        print(f"wrote {json_path}")
        for q in report.get("quantities", []):
            ci = ""
            if q["ci_lo"] is not None:
                ci = f"  [{q['ci_lo']:.4g}, {q['ci_hi']:.4g}]"
            p = "" if q["p_value"] is None else f"  p={q['p_value']:.3g}"
            print(f"  {q['name']}: {q['best_estimate']:.4g}{ci}{p} ({q['units']})")
        return 0
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
