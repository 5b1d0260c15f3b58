"""Command line interface.

Exit codes: 0 on success, 1 when validation or a check fails, 2 on usage
errors.  ``--format machine`` switches every command to stable-schema JSON
on stdout; human output goes to stdout and diagnostics to stderr, never as
stack traces.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings as _warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import reasoner, synth
from .encoder import build_all_bases, encode_situation
from .errors import (
    Diagnostic,
    DuplicateComponentsWarning,
    SandraError,
    UnknownDescriptionError,
)
from .ontology import Ontology, build_ontology
from .parser import Situation, parse_ontology_text, parse_situation
from .reasoner import Mode

GRADCHECK_TOL = 1e-5

DEFAULT_BENCH_SIZES = (32, 64, 128, 256)


@dataclass(frozen=True)
class CliConfig:
    format: str = "human"
    mode: Mode = Mode.HEAVISIDE
    clamp: bool = False
    seed: int = 42


def _config(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        format=getattr(args, "format", "human"),
        mode=Mode(getattr(args, "mode", "heaviside")),
        clamp=getattr(args, "clamp", False),
        seed=getattr(args, "seed", 42),
    )


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load_ontology(path: str) -> Ontology:
    name = "<stdin>" if path == "-" else Path(path).name
    return build_ontology(parse_ontology_text(_read_text(path), filename=name))


def _load_situation(path: str) -> Situation:
    return parse_situation(_read_text(path))


def _emit_json(doc: Any) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _report_error(err: SandraError, fmt: str) -> None:
    if fmt == "machine":
        _emit_json({"ok": False, "diagnostics": [Diagnostic.from_error(err).to_json()]})
    else:
        print(err.render(), file=sys.stderr)


def _clamped(p: float, cfg: CliConfig) -> float:
    return min(p, 1.0) if cfg.clamp else p


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    onto = _load_ontology(args.ontology)
    bases = build_all_bases(onto)
    if cfg.format == "machine":
        _emit_json(
            {
                "ok": True,
                "roles": len(onto.roles),
                "descriptions": len(onto.descriptions),
                "dim": onto.dim,
                "warnings": list(onto.warnings),
                "ranks": {d.name: bases[d].rank for d in onto.description_order},
            }
        )
    else:
        plural_r = "role" if len(onto.roles) == 1 else "roles"
        plural_d = "description" if len(onto.descriptions) == 1 else "descriptions"
        print(
            f"ok: {len(onto.roles)} {plural_r},"
            f" {len(onto.descriptions)} {plural_d}, dimension {onto.dim}"
        )
        for w in onto.warnings:
            print(f"warning: {w}")
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    cfg = _config(args)
    onto = _load_ontology(args.ontology)
    situation = _load_situation(args.situation)
    v = encode_situation(onto, situation)
    if cfg.format == "machine":
        _emit_json(
            {"situation": situation.id, "dim": onto.dim, "vector": [float(x) for x in v]}
        )
    else:
        print(f"situation {situation.id} dimension {onto.dim}")
        for e in onto.elements:
            value = v[onto.index[e]]
            if value != 0.0:
                print(f"{e.name} {value:g}")
    return 0


def _satisfaction_rows(
    onto: Ontology, situation: Situation, cfg: CliConfig
) -> list[dict[str, Any]]:
    bases = build_all_bases(onto)
    v = encode_situation(onto, situation)
    rows = []
    for d in onto.description_order:
        rep = reasoner.satisfaction(bases[d], v, cfg.mode)
        rows.append(
            {
                "name": d.name,
                "probability": _clamped(rep.probability, cfg),
                "coefficients": [float(x) for x in rep.coefficients],
                "active": [bool(b) for b in rep.active_mask],
                "residual": rep.residual_norm,
            }
        )
    return rows


def cmd_infer(args: argparse.Namespace) -> int:
    cfg = _config(args)
    onto = _load_ontology(args.ontology)
    situation = _load_situation(args.situation)
    rows = _satisfaction_rows(onto, situation, cfg)
    if cfg.format == "machine":
        _emit_json(
            {
                "situation": situation.id,
                "mode": cfg.mode.value,
                "clamp": cfg.clamp,
                "descriptions": rows,
            }
        )
    else:
        for row in sorted(rows, key=lambda r: (-r["probability"], r["name"])):
            print(f"{row['name']} {row['probability']:.3f}")
    return 0


def cmd_explain(args: argparse.Namespace) -> int:
    cfg = _config(args)
    onto = _load_ontology(args.ontology)
    situation = _load_situation(args.situation)
    names = {d.name: d for d in onto.description_order}
    if args.description not in names:
        available = ", ".join(sorted(names)) or "none"
        raise UnknownDescriptionError(
            f"unknown description '{args.description}'; available: {available}",
            details={"name": args.description, "available": sorted(names)},
        )
    d = names[args.description]
    bases = build_all_bases(onto)
    v = encode_situation(onto, situation)
    rep = reasoner.satisfaction(bases[d], v, cfg.mode)
    components = []
    for i, comp in enumerate(bases[d].component_order):
        components.append(
            {
                "name": comp.name,
                "kind": comp.kind.value,
                "coefficient": float(rep.coefficients[i]),
                "active": bool(rep.active_mask[i]),
                "entities": list(reasoner.matching_entities(onto, situation, comp)),
            }
        )
    if cfg.format == "machine":
        _emit_json(
            {
                "description": d.name,
                "situation": situation.id,
                "mode": cfg.mode.value,
                "probability": _clamped(rep.probability, cfg),
                "residual": rep.residual_norm,
                "components": components,
            }
        )
    else:
        print(
            f"{d.name}: probability {_clamped(rep.probability, cfg):.3f},"
            f" residual {rep.residual_norm:.3f}, mode {cfg.mode.value}"
        )
        for c in components:
            state = "active" if c["active"] else "inactive"
            matched = ", ".join(c["entities"]) if c["entities"] else "none"
            print(
                f"  {c['name']}: coefficient {c['coefficient']:.3f},"
                f" {state}, matched by {matched}"
            )
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _config(args)
    onto = _load_ontology(args.ontology)
    situations = list(
        reasoner.enumerate_situations(
            onto,
            max_entities=args.max_entities,
            max_depth=args.max_depth,
            max_children=args.max_children,
        )
    )
    report = reasoner.verify_theorems(onto, situations)
    if cfg.format == "machine":
        _emit_json(
            {
                "situations": report.situations,
                "pairs": report.pairs,
                "counterexamples": [
                    {
                        "description": c.description.name,
                        "situation": c.situation.id,
                        "probability": c.probability,
                        "coefficients": list(c.coefficients),
                        "active": list(c.active_mask),
                        "oracle": {
                            "satisfied": c.verdict.satisfied,
                            "nearly_satisfied": c.verdict.nearly_satisfied,
                            "matched": [m.name for m in c.verdict.matched_components],
                        },
                    }
                    for c in report.counterexamples
                ],
            }
        )
    else:
        print(
            f"checked {report.situations} situations, {report.pairs} pairs:"
            f" {len(report.counterexamples)} counterexamples"
        )
        for c in report.counterexamples:
            print(f"counterexample: description {c.description.name}, situation {c.situation.id}")
            print(f"  probability {c.probability:g}, coefficients {list(c.coefficients)}")
            print(f"  active {list(c.active_mask)}")
            print(
                f"  oracle: satisfied={c.verdict.satisfied}"
                f" nearly={c.verdict.nearly_satisfied}"
                f" matched={[m.name for m in c.verdict.matched_components]}"
            )
    return 0 if report.ok else 1


def cmd_gradcheck(args: argparse.Namespace) -> int:
    cfg = _config(args)
    onto = _load_ontology(args.ontology)
    report = reasoner.gradient_check(onto, trials=args.trials, seed=cfg.seed)
    ok = report.vacuous or report.max_rel_error <= GRADCHECK_TOL
    if cfg.format == "machine":
        _emit_json(
            {
                "trials": report.trials,
                "max_rel_error": report.max_rel_error,
                "resamples": report.resamples,
                "tolerance": GRADCHECK_TOL,
                "vacuous": report.vacuous,
                "ok": ok,
            }
        )
    else:
        if report.vacuous:
            print("vacuous pass (0 trials)")
        else:
            verdict = "ok" if ok else "FAIL"
            print(
                f"trials {report.trials}, max relative error {report.max_rel_error:.3e},"
                f" resamples {report.resamples}: {verdict}"
            )
    return 0 if ok else 1


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise SandraError(f"invalid size list '{text}'") from None
    if not sizes or any(s < 1 for s in sizes):
        raise SandraError(f"invalid size list '{text}'")
    return sizes


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _config(args)
    sizes = _parse_sizes(args.sizes)
    rows = []
    for n in sizes:
        best = float("inf")
        dim = 0
        for _ in range(args.repeats):
            onto = synth.synthesize(args.shape, n, cfg.seed)
            start = time.perf_counter()
            build_all_bases(onto)
            elapsed = time.perf_counter() - start
            best = min(best, max(elapsed, 1e-9))
            dim = onto.dim
        rows.append({"size": n, "seconds": best, "descriptions": n, "dim": dim})
    exponent: Optional[float] = None
    if len(sizes) >= 2:
        logs = np.log([r["size"] for r in rows])
        logt = np.log([r["seconds"] for r in rows])
        exponent = float(np.polyfit(logs, logt, 1)[0])
    if cfg.format == "machine":
        doc: dict[str, Any] = {
            "shape": args.shape,
            "seed": cfg.seed,
            "repeats": args.repeats,
            "rows": rows,
        }
        if exponent is not None:
            doc["exponent"] = exponent
        _emit_json(doc)
    else:
        print(f"shape {args.shape}, seed {cfg.seed}")
        for r in rows:
            print(
                f"size {r['size']}: {r['seconds']:.5f} s"
                f" ({r['descriptions']} descriptions, dimension {r['dim']})"
            )
        if exponent is not None:
            print(f"exponent {exponent:.2f}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--format",
        choices=("human", "machine"),
        default="human",
        help="output style (default: human)",
    )


def _add_mode(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--mode",
        choices=("heaviside", "relu"),
        default="heaviside",
        help="probability mode (default: heaviside)",
    )
    p.add_argument(
        "--clamp",
        action="store_true",
        help="clamp displayed probabilities to at most 1",
    )


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=42, help="random seed (default: 42)")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sandra",
        description="Validate ontologies, encode situations, and run graded inference.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse, validate and rank-check an ontology")
    p.add_argument("ontology", help="ontology file path, or - for stdin")
    _add_format(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("encode", help="print a situation's vector")
    p.add_argument("ontology")
    p.add_argument("situation", help="situation file path, or - for stdin")
    _add_format(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("infer", help="satisfaction probability of every description")
    p.add_argument("ontology")
    p.add_argument("situation")
    _add_mode(p)
    _add_format(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("explain", help="per-component account for one description")
    p.add_argument("ontology")
    p.add_argument("situation")
    p.add_argument("description")
    _add_mode(p)
    _add_format(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("verify", help="cross-check geometry against the symbolic oracle")
    p.add_argument("ontology")
    p.add_argument("--max-entities", type=int, default=4)
    p.add_argument("--max-depth", type=int, default=2)
    p.add_argument("--max-children", type=int, default=2)
    _add_format(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gradcheck", help="compare the jacobian to finite differences")
    p.add_argument("ontology")
    p.add_argument("--trials", type=int, default=100)
    _add_seed(p)
    _add_format(p)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("bench", help="time basis construction on synthetic shapes")
    p.add_argument("--sizes", default=",".join(str(s) for s in DEFAULT_BENCH_SIZES))
    p.add_argument("--shape", choices=synth.SHAPES, default="chain")
    p.add_argument("--repeats", type=int, default=3)
    _add_seed(p)
    _add_format(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code is None else int(exc.code)
    if getattr(args, "ontology", None) == "-" and getattr(args, "situation", None) == "-":
        print("error: only one of ontology and situation may come from stdin", file=sys.stderr)
        return 2
    with _warnings.catch_warnings():
        # identical-component warnings surface through `validate` output instead
        _warnings.simplefilter("ignore", DuplicateComponentsWarning)
        try:
            return args.func(args)
        except SandraError as err:
            _report_error(err, getattr(args, "format", "human"))
            return 1
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except Exception as exc:  # pragma: no cover - last-resort guard
            print(f"internal error: {exc}", file=sys.stderr)
            return 1


if __name__ == "__main__":
    sys.exit(main())
