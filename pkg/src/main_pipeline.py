"""
Main Pipeline Entry Point

Subcommands:
    solve            train one agent on one field strength
    grl-pipeline     easy → intermediate → hard with gadget extraction
    extract-gadgets  grow a gadget library from a stored top-k corpus
    exact-energy     E0, gap and fake minimum of a TFIM instance
    gap-scan         E0 and gap over a range of field strengths (CSV)
    transpile-count  native gate counts of a stored circuit
    report           aggregate a run directory into tables and plots

Any GrlError ends the command with a one-line message on stderr and exit
code 1.
"""

import argparse
import dataclasses
import logging
import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from analysis.run_report import report as build_and_write_report
from analysis.transpile import format_count_row, transpile_count
from communication.protocol_definition import (
    load_circuit_file,
    load_gadget_library,
    load_gadget_provenance,
    save_gadget_library,
)
from config.grl_parameters import PRESETS, load_config, params
from grl_errors import GrlError, InvalidConfigError
from models.hamiltonians import (
    TfimSpec,
    build_tfim,
    fake_minimum_energy,
    gap_scan,
    write_gap_csv,
)
from models.statevector import ground_state_oracle
from pipeline.grl_pipeline import (
    accepted_provenance,
    extract_library,
    grammar_primitives,
    run_pipeline,
    solve,
)
from pipeline.topk_store import TopKStore


def _overrides(args) -> dict:
    overrides = {}
    if getattr(args, "out", None):
        overrides["output_dir"] = args.out
    if getattr(args, "qubits", None) is not None:
        overrides.setdefault("model", {})["num_qubits"] = args.qubits
    if getattr(args, "gate_set", None):
        overrides.setdefault("environment", {})["gate_set"] = args.gate_set
    if getattr(args, "library", None):
        overrides.setdefault("gadgets", {})["library_file"] = args.library
    if getattr(args, "no_extract", False):
        overrides.setdefault("gadgets", {})["enabled"] = False
    if getattr(args, "seed", None) is not None and args.command == "grl-pipeline":
        overrides["schedule"] = {"seeds": [args.seed]}
    return overrides


def _config(args):
    return load_config(args.config, args.preset, _overrides(args))


def _print_banner(title: str):
    print("=" * 70)
    print(title)
    print("=" * 70)


def cmd_solve(args) -> int:
    config = _config(args)
    gadgets = load_gadget_library(args.library) if args.library else []
    episodes = args.episodes or config.schedule.regimes[0].episodes
    seed = args.seed if args.seed is not None else 0
    outcome = solve(config, args.field, episodes, seed, gadgets)
    spec = TfimSpec(config.model.num_qubits, config.model.coupling, args.field,
                    config.model.boundary)
    exact = ground_state_oracle(build_tfim(spec)).energy
    _print_banner(f"SOLVE  N={spec.num_qubits}  h={args.field:g}  seed={outcome.seed}")
    print(f"Best energy:  {outcome.best_energy:.12f}")
    print(f"Exact E0:     {exact:.12f}")
    print(f"Error:        {abs(outcome.best_energy - exact):.3e}")
    print(f"Successes:    {outcome.successes}/{outcome.episodes}")
    print("=" * 70)
    return 0


def cmd_pipeline(args) -> int:
    config = _config(args)
    result = run_pipeline(config, resume=args.resume)
    summary = build_and_write_report(config.output_dir, plots=not args.no_plots)
    _print_banner("GRL PIPELINE")
    for regime in summary.regimes:
        print(f"{regime.regime:>10}  seeds={regime.seeds}  min error={regime.min_error:.3e}  "
              f"avg error={regime.avg_error:.3e}")
    print(f"Gadgets: {', '.join(g.gadget_id for g in result.gadgets) or 'none'}")
    print(f"Artifacts: {config.output_dir}")
    print("=" * 70)
    return 0


def cmd_extract(args) -> int:
    config = _config(args)
    store = TopKStore.load(args.corpus)
    library = load_gadget_library(args.library) if args.library else []
    settings = config.gadgets
    if args.max_new is not None:
        settings = dataclasses.replace(settings, max_new=args.max_new)
    new_gadgets, result = extract_library(store, library, settings, grammar_primitives(config))
    _print_banner("GADGET EXTRACTION")
    print(f"Corpus: {len(store)} circuit(s), base score {result.base_score:.4f}")
    for gadget, accepted in zip(new_gadgets, result.accepted):
        print(f"{gadget.gadget_id}: {accepted.fragment.canonical}  |p|={accepted.fragment.size}  "
              f"ΔS={accepted.score_delta:+.4f}  occurrences={accepted.occurrences}")
        print(f"    {gadget.program}")
    if not new_gadgets:
        print("No fragment improves the score")
    if args.output:
        provenance = load_gadget_provenance(args.library) if args.library else {}
        provenance.update(accepted_provenance(new_gadgets, result, args.field))
        save_gadget_library(args.output, library + new_gadgets, provenance)
        print(f"Library written to {args.output}")
    print("=" * 70)
    return 0


def cmd_exact(args) -> int:
    spec = TfimSpec(args.qubits, args.coupling, args.field, args.boundary)
    result = ground_state_oracle(build_tfim(spec))
    _print_banner(f"EXACT ENERGY  N={spec.num_qubits}  J={spec.coupling:g}  h={spec.field:g}  "
                  f"({spec.boundary})")
    print(f"E0:          {result.energy:.12f}")
    print(f"E1 - E0:     {result.gap:.12e}")
    print(f"Fake min μ:  {fake_minimum_energy(spec):.12f}")
    print("=" * 70)
    return 0


def cmd_gap_scan(args) -> int:
    if args.h_min <= 0 or args.h_max < args.h_min or args.points < 1:
        raise InvalidConfigError("gap-scan needs 0 < h_min <= h_max and points >= 1")
    h_values = np.logspace(np.log10(args.h_min), np.log10(args.h_max), args.points)
    spec = TfimSpec(args.qubits, args.coupling, 0.0, args.boundary)
    points = gap_scan(spec, h_values)
    write_gap_csv(points, args.output)
    print(f"✓ {len(points)} points written to {args.output}")
    return 0


def cmd_transpile(args) -> int:
    circuit = load_circuit_file(args.circuit)
    print(format_count_row(transpile_count(circuit)))
    return 0


def cmd_report(args) -> int:
    summary = build_and_write_report(args.run_dir, plots=not args.no_plots)
    _print_banner(f"RUN REPORT  {args.run_dir}")
    for regime in summary.regimes:
        print(f"{regime.regime:>10}  seeds={regime.seeds}  min error={regime.min_error:.3e}  "
              f"avg error={regime.avg_error:.3e}  avg gates={regime.avg_gates:.2f}")
    print("=" * 70)
    return 0


def _add_config_flags(parser):
    parser.add_argument('--config', help='JSON config file')
    parser.add_argument('--preset', choices=sorted(PRESETS), help='Parameter preset')
    parser.add_argument('--out', help='Output directory')
    parser.add_argument('--seed', type=int, help='Random seed')
    parser.add_argument('--qubits', type=int, help='Number of qubits N')
    parser.add_argument('--gate-set', choices=['native', 'universal'], help='Gate set')
    parser.add_argument('--library', help='Gadget library file to preload')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Gadget reinforcement learning for TFIM ground states'
    )
    parser.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('solve', help='Train one agent on one field strength')
    _add_config_flags(p)
    p.add_argument('--field', type=float, default=params.regime_fields[0], help='Field h')
    p.add_argument('--episodes', type=int, help='Episode budget')
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser('grl-pipeline', help='Run the regime schedule with gadget extraction')
    _add_config_flags(p)
    p.add_argument('--resume', action='store_true', help='Skip completed seeds')
    p.add_argument('--no-extract', action='store_true', help='RL-only baseline')
    p.add_argument('--no-plots', action='store_true', help='Skip PNG plots')
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser('extract-gadgets', help='Extract gadgets from a top-k corpus')
    _add_config_flags(p)
    p.add_argument('--corpus', required=True, help='topk.json file')
    p.add_argument('--max-new', type=int, help='Maximum number of new gadgets')
    p.add_argument('--field', type=float, help='Field h of the corpus regime (provenance)')
    p.add_argument('--output', help='Library file to write')
    p.set_defaults(handler=cmd_extract)

    for name, handler, help_text in (('exact-energy', cmd_exact, 'Exact E0 and gap'),
                                     ('gap-scan', cmd_gap_scan, 'E0 and gap over h (CSV)')):
        p = sub.add_parser(name, help=help_text)
        p.add_argument('--qubits', type=int, default=2, help='Number of qubits N')
        p.add_argument('--coupling', type=float, default=params.coupling, help='Coupling J')
        p.add_argument('--boundary', choices=['open', 'periodic'], default=params.boundary)
        if name == 'exact-energy':
            p.add_argument('--field', type=float, default=1.0, help='Field h')
        else:
            p.add_argument('--h-min', type=float, default=1e-4)
            p.add_argument('--h-max', type=float, default=10.0)
            p.add_argument('--points', type=int, default=41)
            p.add_argument('--output', default='gap_scan.csv', help='CSV file to write')
        p.set_defaults(handler=handler)

    p = sub.add_parser('transpile-count', help='Native gate counts of a circuit file')
    p.add_argument('circuit', help='Circuit or circuit-record JSON file')
    p.set_defaults(handler=cmd_transpile)

    p = sub.add_parser('report', help='Aggregate a run directory')
    p.add_argument('run_dir', help='Run directory')
    p.add_argument('--no-plots', action='store_true', help='Skip PNG plots')
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except GrlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
