"""Command-line interface: ``cml mc|bisim|sat|dist|axioms``.

Exit codes: 0 positive verdict or success, 1 negative verdict, 2 error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields

from . import axioms, bisim, metrics, sat as satmod
from .formula import (CapExceeded, ClosureSpec, ParseError, as_rational, enumerate_family,
                      format_rational, parse, to_text)
from .kernel import (ModelError, Process, UnknownLabelError, UnknownStateError, kernel_to_json,
                     load_model)

SCHEMA_VERSION = 1


@dataclass
class Config:
    grid_cap: int = 64
    atom_cap: int = 4096
    clamp: bool = False
    depth: int = 3
    granularity: int = 2
    max_index: str = "2"
    family_cap: int = 10_000
    seed: int = 0
    format: str = "auto"

    def validate(self) -> "Config":
        for name in ("grid_cap", "atom_cap", "granularity", "family_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"config: {name} must be positive")
        if self.depth < 0:
            raise ValueError("config: depth must be non-negative")
        if self.format not in ("auto", "json", "text"):
            raise ValueError("config: format must be auto, json or text")
        if as_rational(self.max_index) < 0:
            raise ValueError("config: max_index must be non-negative")
        return self

    @property
    def caps(self) -> satmod.Caps:
        return satmod.Caps(self.grid_cap, self.atom_cap)


def load_config(path: str | None) -> Config:
    if not path:
        return Config()
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    known = {f.name for f in fields(Config)}
    extra = set(data) - known
    if extra:
        raise ValueError(f"config: unknown keys {sorted(extra)}")
    return Config(**data).validate()


class CliError(Exception):
    pass


def read_formula(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    return parse(text)


def process_of(path: str, state: str) -> Process:
    return Process(load_model(path), state)


def emit(cfg: Config, payload: dict, text: str, default: str = "text") -> None:
    """Verdict commands default to text, report commands to JSON."""
    fmt = default if cfg.format == "auto" else cfg.format
    if fmt == "json":
        print(json.dumps({"schemaVersion": SCHEMA_VERSION, **payload}, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands

def cmd_mc(cfg: Config, args) -> int:
    p = process_of(args.model, args.state)
    phi = read_formula(args.formula)
    ok = satmod.engine.evaluate(p.kernel, [phi]).holds(phi, p.state)
    payload = {"command": "mc", "state": p.state, "formula": to_text(phi), "satisfied": ok}
    text = "true" if ok else "false"
    if args.d:
        d = metrics.dsat(p, phi, cfg.clamp)
        payload["d"] = format_rational(d)
        text += f"  d={format_rational(d)}"
    emit(cfg, payload, text)
    return 0 if ok else 1


def cmd_bisim(cfg: Config, args) -> int:
    p1 = process_of(args.model1, args.state1)
    p2 = process_of(args.model2, args.state2)
    phi = bisim.distinguishing_formula(p1, p2)
    same = phi is None
    payload = {"command": "bisim", "bisimilar": same,
               "distinguishing": None if same else to_text(phi)}
    emit(cfg, payload, "bisimilar" if same else f"distinguished-by {to_text(phi)}")
    return 0 if same else 1


def finite_model_json(fm: satmod.FiniteModel) -> dict:
    return {"schemaVersion": SCHEMA_VERSION, "parameter": fm.parameter,
            "model": kernel_to_json(fm.kernel), "atoms": fm.atom_table()}


def cmd_sat(cfg: Config, args) -> int:
    phi = read_formula(args.formula)
    witness = satmod.satisfiable(phi, cfg.caps)
    payload = {"command": "sat", "formula": to_text(phi), "satisfiable": witness is not None}
    text = "sat" if witness is not None else "unsat"
    if witness is not None:
        payload["witness"] = {"state": witness.state, "model": kernel_to_json(witness.kernel)}
    if args.synth and witness is not None:
        fm = satmod.synthesize_model(phi, cfg.caps)
        with open(args.synth, "w", encoding="utf-8") as fh:
            json.dump(finite_model_json(fm), fh, indent=2)
            fh.write("\n")
        payload["parameter"] = fm.parameter
        payload["atoms"] = len(fm.atoms)
        text += f"  atoms={len(fm.atoms)} p={fm.parameter} -> {args.synth}"
    emit(cfg, payload, text)
    return 0 if witness is not None else 1


def cmd_dist(cfg: Config, args) -> int:
    if args.mode == "pdist":
        if len(args.args) != 4:
            raise CliError("pdist needs MODEL1 STATE1 MODEL2 STATE2")
        p1 = process_of(args.args[0], args.args[1])
        p2 = process_of(args.args[2], args.args[3])
        labels = sorted(set(p1.kernel.labels) | set(p2.kernel.labels))
        spec = ClosureSpec(cfg.granularity, as_rational(cfg.max_index), cfg.depth, frozenset(labels))
        fam = enumerate_family(cfg.depth, spec, cap=cfg.family_cap, with_m=args.with_m)
        desc = dict(fam.descriptor, truncated=fam.truncated)
        common = [f for f in fam if all(lab in p1.kernel.labels and lab in p2.kernel.labels
                                        for lab in _labels(f))] or list(fam)
        rep = metrics.pdist(p1, p2, common, cfg.clamp, desc)
    elif args.mode == "fdist":
        if len(args.args) != 2 or not args.model:
            raise CliError("fdist needs PHI1 PHI2 --model MODEL [--states ...]")
        k = load_model(args.model)
        states = args.states.split(",") if args.states else list(k.states)
        ws = [Process(k, s) for s in states]
        rep = metrics.fdist(read_formula(args.args[0]), read_formula(args.args[1]), ws, cfg.clamp)
    else:
        if len(args.args) != 3:
            raise CliError("sdhat needs PSI PHI1 PHI2")
        psi, phi1, phi2 = (read_formula(x) for x in args.args)
        fm = satmod.synthesize_model(psi, cfg.caps)
        rep, par = metrics.sd_hat(psi, phi1, phi2, cfg.clamp, model=fm)
        payload = {"command": "dist", "mode": "sdhat", **rep.to_json(), "parameter": par}
        text = f"sdhat={format_rational(rep.value)} p={par}"
        code = 0
        if args.check_weak:
            p = process_of(*args.check_weak)
            wr = metrics.weak_robustness(p, psi, phi1, phi2, cfg.clamp, model=fm)
            payload["weakRobustness"] = wr.to_json()
            text += f"  weak-robustness={'holds' if wr.holds else 'FAILS'}"
            code = 0 if wr.holds else 1
        emit(cfg, payload, text, "json")
        return code
    emit(cfg, {"command": "dist", "mode": args.mode, **rep.to_json()},
         f"{args.mode}={format_rational(rep.value)}", "json")
    return 0


def _labels(f):
    from .formula import subformulas, L, M
    return {g.label for g in subformulas(f) if isinstance(g, (L, M))}


def cmd_axioms(cfg: Config, args) -> int:
    if args.samples <= 0:
        raise CliError("--samples must be positive")
    schemas = args.schemas.split(",") if args.schemas else list(axioms.SOUND)
    rep = axioms.soundness_campaign(schemas, args.samples, cfg.seed)
    data = rep.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")
    lines = [f"{s}: {r.samples} samples, {r.violations} violations" for s, r in rep.schemas.items()]
    emit(cfg, {"command": "axioms", **data}, "\n".join(lines), "json")
    # unsound PML schemas are expected to fail, so only sound ones decide the verdict
    return 0 if rep.sound_ok else 1


# ---------------------------------------------------------------------------

def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="JSON config file")
    parser.add_argument("--format", choices=("auto", "json", "text"), default=d)
    parser.add_argument("--seed", type=int, default=d)
    parser.add_argument("--clamp", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="clip quantitative values into [0, 1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cml", description=__doc__.splitlines()[0])
    _global_options(parser, False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mc", parents=[common], help="model-check a formula at a state")
    p.add_argument("model")
    p.add_argument("state")
    p.add_argument("formula", help="formula text or @file")
    p.add_argument("--d", action="store_true", help="also print the quantitative value")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("bisim", parents=[common], help="decide bisimilarity of two processes")
    p.add_argument("model1")
    p.add_argument("state1")
    p.add_argument("model2")
    p.add_argument("state2")
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("sat", parents=[common], help="decide satisfiability")
    p.add_argument("formula")
    p.add_argument("--synth", metavar="OUT", help="write the finite model of the closure")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("dist", parents=[common], help="distances")
    p.add_argument("mode", choices=("pdist", "fdist", "sdhat"))
    p.add_argument("args", nargs="*")
    p.add_argument("--model", help="fdist: model providing the witness processes")
    p.add_argument("--states", help="fdist: comma-separated witness states (default all)")
    p.add_argument("--with-m", action="store_true", help="pdist: include M in the family")
    p.add_argument("--check-weak", nargs=2, metavar=("MODEL", "STATE"),
                   help="sdhat: also check the weak robustness inequality at this process")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("axioms", parents=[common], help="randomized soundness campaign")
    p.add_argument("--schemas", help="comma-separated schema ids (default: all sound ones)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_axioms)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.format:
            cfg.format = args.format
        if args.seed is not None:
            cfg.seed = args.seed
        if args.clamp:
            cfg.clamp = True
        cfg.validate()
        return args.func(cfg, args)
    except (CliError, ParseError, ModelError, UnknownStateError, UnknownLabelError, OSError,
            CapExceeded, satmod.ClosureError, satmod.Unsatisfiable, axioms.SideConditionError,
            ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
