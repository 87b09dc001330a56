"""Command line entry point: ``rpsprefs <command> [options]``.

Commands: compare, simulate, ce, curve, allais, witness, kconv.  Each prints
a one-line summary; with ``--out DIR`` it also writes CSV or JSON files whose
names carry the utility/phi configuration.  Existing files are never
overwritten.  Options may also come from ``--config file.json`` (keys are the
long option names with dashes or underscores); flags given on the command line
take precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from rpsprefs import analysis, engine, simulator
from rpsprefs.engine import ProspectPair, StimulusModel, parse_stimulus
from rpsprefs.errors import BadSpecString, ConfigError, MissingInput, RPSError, UnknownCommand
from rpsprefs.lottery import UtilityFn, expected_utility, load_lottery, parse_utility

COMMANDS = ("compare", "simulate", "ce", "curve", "allais", "witness", "kconv")
RANDOMIZED = {"simulate", "kconv"}


@dataclass
class RunConfig:
    command: str
    utility: UtilityFn
    phi: StimulusModel
    a: Path | None = None
    b: Path | None = None
    lottery: Path | None = None
    seed: int | None = None
    steps: int | None = None
    k: int | None = 1
    out: Path | None = None
    fmt: str = "csv"
    options: dict[str, Any] = field(default_factory=dict)

    def echo(self) -> dict[str, Any]:
        """Configuration block written into JSON outputs (no output path)."""
        d = {
            "command": self.command,
            "utility": self.utility.spec,
            "phi": self.phi.spec,
            "a": _name(self.a),
            "b": _name(self.b),
            "lottery": _name(self.lottery),
            "seed": self.seed,
            "steps": self.steps,
            "k": self.k,
            "format": self.fmt,
        }
        d.update(self.options)
        return {k: v for k, v in d.items() if v is not None}


def _name(path):
    return None if path is None else Path(path).name


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _k_value(text: str) -> int | None:
    if text in ("inf", "unbounded", "none"):
        return None
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError("k must be >= 1 or 'inf'")
    return k


def _k_flag(text: str) -> int | float:
    # unbounded memory is inf here because None already means "flag not given"
    k = _k_value(text)
    return math.inf if k is None else k


def _k_list(text: str) -> list[int | None]:
    return [_k_value(t.strip()) for t in text.split(",") if t.strip()]


def _build_parser() -> _Parser:
    parser = _Parser(prog="rpsprefs", description="RPS(1)/RPS(k) adaptive preferences")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, utility="linear", phi="identity"):
        p.add_argument("--utility", default=None, help=f"utility spec (default {utility})")
        p.add_argument("--phi", default=None, help=f"stimulus spec (default {phi})")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        p.add_argument("--config", type=Path, default=None, help="JSON file with option defaults")
        p.set_defaults(_utility_default=utility, _phi_default=phi)

    def pair_args(p):
        p.add_argument("--a", type=Path, default=None, help="lottery file for prospect A")
        p.add_argument("--b", type=Path, default=None, help="lottery file for prospect B")

    p = sub.add_parser("compare", help="RPS(1) comparison of two lotteries")
    pair_args(p)
    p.add_argument("--prior-a", type=float, default=None)
    p.add_argument("--prior-b", type=float, default=None)
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo of the iterated choice process")
    pair_args(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--k", type=_k_flag, default=None, help="memory length or 'inf'")
    p.add_argument("--burn-in", type=int, default=None)
    common(p)

    p = sub.add_parser("ce", help="certainty equivalent of a lottery")
    p.add_argument("--lottery", type=Path, default=None)
    p.add_argument("--bracket", type=float, nargs=2, default=None, metavar=("LOW", "HIGH"))
    p.add_argument("--rule", choices=analysis.RULES, default=None)
    common(p)

    p = sub.add_parser("curve", help="certainty-equivalent curve of a two-point family")
    p.add_argument("--family", choices=tuple(analysis.FAMILIES), default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--rule", choices=analysis.RULES, default=None)
    common(p)

    p = sub.add_parser("allais", help="region where common dilution reverses preference")
    p.add_argument("--weight", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--rule", choices=analysis.RULES, default=None)
    common(p, utility="power:0.2")

    p = sub.add_parser("witness", help="search for independence or transitivity violations")
    p.add_argument("--kind", choices=("intransitivity", "independence"), default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--weight", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--rule", choices=analysis.RULES, default=None)
    common(p)

    p = sub.add_parser("kconv", help="RPS(k) frequency preference across memory lengths")
    pair_args(p)
    p.add_argument("--k-values", type=_k_list, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--steps", type=int, default=None, help="epochs per replication")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--confidence", type=float, default=None)
    common(p)
    return parser


_DEFAULTS = {
    "fmt": "csv",
    "steps": None,
    "k": 1,
    "family": "gains",
    "grid": 101,
    "rule": "rps",
    "weight": 0.2,
    "kind": "intransitivity",
    "budget": 100_000,
    "k_values": [1, 5, 25, 125],
    "replications": 20,
    "confidence": 0.99,
}

_STEPS_DEFAULT = {"simulate": 100_000, "kconv": 50_000}

_CONVERTERS = {"k": lambda v: _k_flag(str(v)), "k_values": lambda v: _k_list(v) if isinstance(v, str) else [
    _k_value(str(k)) for k in v]}


def _merge_config_file(ns: argparse.Namespace) -> None:
    path = ns.config
    if path is None:
        return
    if not Path(path).is_file():
        raise MissingInput(f"--config: file {str(path)!r} not found")
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ConfigError("--config: top level must be an object")
    known = {k for k in vars(ns) if not k.startswith("_")} - {"command", "config"}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest == "format":
            dest = "fmt"
        if dest not in known:
            raise ConfigError(f"--config: unknown key {key!r}")
        if getattr(ns, dest) is None:
            if dest in _CONVERTERS:
                value = _CONVERTERS[dest](value)
            elif dest in ("a", "b", "lottery", "out"):
                # relative paths are taken relative to the config file
                value = Path(path).parent / value
            setattr(ns, dest, value)


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Validate ``argv`` into a :class:`RunConfig`.

    Raises:
        UnknownCommand: first argument is not a known command.
        BadSpecString: a ``--utility`` or ``--phi`` string does not parse.
        MissingInput: a required file or flag is absent.
        ConfigError: any other usage error.
    """
    argv = list(argv)
    if not argv or argv[0] not in COMMANDS:
        if argv and argv[0] in ("-h", "--help"):
            _build_parser().parse_args(argv)
        raise UnknownCommand(f"unknown command {argv[0] if argv else ''!r}; expected one of {COMMANDS}")
    ns = _build_parser().parse_args(argv)
    _merge_config_file(ns)
    cmd = ns.command

    try:
        utility = parse_utility(ns.utility or ns._utility_default)
    except BadSpecString as exc:
        raise BadSpecString(f"--utility: {exc}") from None
    try:
        phi = parse_stimulus(ns.phi or ns._phi_default)
    except BadSpecString as exc:
        raise BadSpecString(f"--phi: {exc}") from None

    def opt(name):
        value = getattr(ns, name, None)
        return _DEFAULTS.get(name) if value is None else value

    def need_file(flag):
        path = getattr(ns, flag)
        if path is None:
            raise MissingInput(f"--{flag}: required for {cmd}")
        if not Path(path).is_file():
            raise MissingInput(f"--{flag}: file {str(path)!r} not found")
        return Path(path)

    cfg = RunConfig(cmd, utility, phi, out=ns.out, fmt=opt("fmt"))
    if cmd in ("compare", "simulate", "kconv"):
        cfg.a, cfg.b = need_file("a"), need_file("b")
    if cmd == "ce":
        cfg.lottery = need_file("lottery")
    if cmd in RANDOMIZED or (cmd == "witness" and opt("kind") == "intransitivity"):
        if ns.seed is None:
            raise MissingInput(f"--seed: {cmd} is randomized and needs an explicit seed")
        cfg.seed = ns.seed
    if cmd in _STEPS_DEFAULT:
        cfg.steps = ns.steps if ns.steps is not None else _STEPS_DEFAULT[cmd]
        if cfg.steps < 2:
            raise ConfigError("--steps: must be at least 2")

    o = cfg.options
    if cmd == "compare":
        o.update(prior_a=ns.prior_a, prior_b=ns.prior_b)
    elif cmd == "simulate":
        k = opt("k")
        cfg.k = None if k == math.inf else k
        o["burn_in"] = ns.burn_in
    elif cmd == "ce":
        o.update(bracket=ns.bracket, rule=opt("rule"))
    elif cmd == "curve":
        o.update(family=opt("family"), grid=opt("grid"), rule=opt("rule"))
    elif cmd == "allais":
        o.update(weight=opt("weight"), grid=opt("grid"), rule=opt("rule"))
    elif cmd == "witness":
        o.update(kind=opt("kind"), rule=opt("rule"))
        if o["kind"] == "intransitivity":
            o["budget"] = opt("budget")
        else:
            o.update(weight=opt("weight"), grid=opt("grid"))
    elif cmd == "kconv":
        o.update(
            k_values=opt("k_values"), replications=opt("replications"), confidence=opt("confidence")
        )
    cfg.options = {k: v for k, v in o.items() if v is not None}
    return cfg


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def render(records: list[dict], columns: Sequence[str], fmt: str, echo: dict, extra: dict | None = None) -> str:
    """Serialize records as CSV (given column order) or JSON with a config block."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="raise")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in rec.items()})
        return buf.getvalue()
    doc = {"config": echo, "records": records}
    if extra:
        doc.update(extra)
    return json.dumps(_json_safe(doc), indent=2) + "\n"


def _tag(*parts) -> str:
    return "_".join(str(p).replace(":", "-").replace("/", "-") for p in parts if p is not None and p != "")


def _pair(cfg: RunConfig, prior_a=None, prior_b=None) -> ProspectPair:
    return ProspectPair(load_lottery(cfg.a), load_lottery(cfg.b), cfg.utility, cfg.phi, prior_a, prior_b)


def _sim_config(cfg: RunConfig) -> simulator.SimConfig:
    return simulator.SimConfig(
        _pair(cfg), cfg.k, cfg.steps, cfg.seed, cfg.options.get("burn_in")
    )


def produce(cfg: RunConfig) -> tuple[str, dict[str, str]]:
    """Run the command; return the summary line and ``{filename: content}``."""
    o, fmt, echo = cfg.options, cfg.fmt, cfg.echo()
    base = _tag(cfg.command, cfg.utility.spec, cfg.phi.spec)
    files: dict[str, str] = {}

    if cfg.command == "compare":
        pair = _pair(cfg, o.get("prior_a"), o.get("prior_b"))
        out = engine.rps1_sides(pair)
        chain = engine.markov_model(pair)
        rec = {"relation": out.relation.value, "lhs": out.lhs, "rhs": out.rhs, "stationary_p": chain.stationary_p}
        files[f"{base}.{fmt}"] = render([rec], list(rec), fmt, echo)
        return f"{out.relation} lhs={out.lhs:.6f} rhs={out.rhs:.6f}", files

    if cfg.command == "simulate":
        sc = _sim_config(cfg)
        report = simulator.run(sc, trajectory=True)
        name = _tag(base, f"k{'inf' if cfg.k is None else cfg.k}", f"seed{cfg.seed}")
        recs = [r._asdict() for r in report.trajectory]
        cols = ["epoch", "chosen", "payoff", "s_a", "s_b", "lambda_a"]
        header = dict(zip(cols, simulator.TRAJECTORY_COLUMNS))
        recs = [{header[k]: v for k, v in r.items()} for r in recs]
        files[f"{name}.{fmt}"] = render(recs, simulator.TRAJECTORY_COLUMNS, fmt, echo)
        return f"freq_a={report.freq_a:.6f} freq_b={report.freq_b:.6f} epochs={report.epochs}", files

    if cfg.command == "ce":
        lottery = load_lottery(cfg.lottery)
        bracket = o.get("bracket")
        settings = analysis.SolverSettings(bracket=tuple(bracket)) if bracket else None
        root = analysis.certainty_equivalent_root(lottery, cfg.utility, cfg.phi, settings, o["rule"])
        eu = expected_utility(lottery, cfg.utility)
        eu_ce = analysis.eu_certainty_equivalent(lottery, cfg.utility)
        rec = {"c": root.value, "eu": eu, "eu_ce": eu_ce, "residual": root.residual}
        files[f"{_tag(base, o['rule'])}.{fmt}"] = render([rec], list(rec), fmt, echo)
        return f"CE={root.value:.10g} EU={eu:.10g} EU_CE={eu_ce:.10g} residual={root.residual:.3g}", files

    if cfg.command == "curve":
        grid = analysis.probability_grid(o["grid"])
        points = analysis.indifference_curve(o["family"], cfg.utility, cfg.phi, grid, rule=o["rule"])
        recs = [p.record() for p in points]
        files[f"{_tag('curve', o['family'], cfg.utility.spec, cfg.phi.spec, o['rule'])}.{fmt}"] = render(
            recs, ("c", "x", "side", "residual"), fmt, echo
        )
        failed = sum(not p.ok for p in points)
        return f"{len(points)} points, {failed} failed", files

    if cfg.command == "allais":
        n = o["grid"]
        region = analysis.allais_region(
            cfg.utility, cfg.phi, o["weight"], analysis.payoff_grid(n), analysis.probability_grid(n), rule=o["rule"]
        )
        stem = _tag(base, f"w{o['weight']!r}", o["rule"])
        cols = ("c", "x", "side", "residual")
        files[f"{stem}_direct.{fmt}"] = render([p.record() for p in region.direct], cols, fmt, echo)
        files[f"{stem}_diluted.{fmt}"] = render([p.record() for p in region.diluted], cols, fmt, echo)
        files[f"{stem}_mask.{fmt}"] = render(region.mask_records(), ("c", "x", "in_region"), fmt, echo)
        cells = int(region.mask.sum())
        return f"region area fraction={region.area_fraction:.6f} ({cells} cells)", files

    if cfg.command == "witness":
        if o["kind"] == "intransitivity":
            w = analysis.intransitivity_witness(o["budget"], cfg.seed, rule=o["rule"])
            name = _tag("witness", "intransitivity", o["rule"], f"seed{cfg.seed}")
            recs = [] if w is None else [
                {"kind": w.kind, "lottery": i, "payoff": v, "probability": p}
                for i, lot in enumerate(w.lotteries)
                for v, p in lot.outcomes
            ]
            extra = {"witness": None if w is None else w.to_dict()} if fmt == "json" else None
            files[f"{name}.{fmt}"] = render(recs, ("kind", "lottery", "payoff", "probability"), fmt, echo, extra)
            summary = "no witness" if w is None else f"{w.kind} witness at probe {w.probe}"
            return summary, files
        n = o["grid"]
        w = analysis.independence_violation_witness(
            cfg.utility, cfg.phi, (o["weight"],), analysis.payoff_grid(n), analysis.probability_grid(n), o["rule"]
        )
        name = _tag("witness", "independence", cfg.utility.spec, cfg.phi.spec, o["rule"])
        cols = ("c", "x", "mix_weight", "direct_relation", "direct_lhs", "direct_rhs",
                "diluted_relation", "diluted_lhs", "diluted_rhs")
        recs = [] if w is None else [{
            "c": w.c, "x": w.x, "mix_weight": w.mix_weight,
            "direct_relation": w.direct.relation.value, "direct_lhs": w.direct.lhs, "direct_rhs": w.direct.rhs,
            "diluted_relation": w.diluted.relation.value, "diluted_lhs": w.diluted.lhs,
            "diluted_rhs": w.diluted.rhs,
        }]
        files[f"{name}.{fmt}"] = render(recs, cols, fmt, echo)
        summary = "no witness" if w is None else f"independence witness c={w.c!r} x={w.x!r} weight={w.mix_weight!r}"
        return summary, files

    if cfg.command == "kconv":
        template = simulator.SimConfig(_pair(cfg), 1, cfg.steps, cfg.seed)
        rows = analysis.k_convergence_experiment(
            template.pair, o["k_values"], template, o["replications"], o["confidence"]
        )
        name = _tag(base, f"seed{cfg.seed}")
        files[f"{name}.{fmt}"] = render(
            [r.record() for r in rows], ("k", "freq_a", "relation", "p_value"), fmt, echo
        )
        return " ".join(f"k={'inf' if r.k is None else r.k}:{r.status}" for r in rows), files

    raise UnknownCommand(cfg.command)


def execute(cfg: RunConfig) -> int:
    """Run ``cfg``, write its files under ``cfg.out`` and print the summary."""
    summary, files = produce(cfg)
    if cfg.out is not None:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        clash = [name for name in files if (out / name).exists()]
        if clash:
            raise ConfigError(f"--out: refusing to overwrite {', '.join(clash)} in {out}")
        for name, content in files.items():
            (out / name).write_text(content)
    print(summary)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except ConfigError as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    try:
        return execute(cfg)
    except ConfigError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (RPSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
