"""Command line entry point ``sturmlab``.

Exit codes: 0 all checks passed, 1 a check failed, 2 malformed config or
input outside the domain, 3 precision exhausted, 4 insufficient depth.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .errors import DomainError, InsufficientDepth, PrecisionExhausted, SchemaError, WindowError
from .exact import Mat2, Point
from .geometry import _grid, _system_covering, compare, cycle_ratio, minima_profile, parametric_exponents, translate_parametric
from .limits import XiHandle, empirical_exponents, predicted_for
from .sturm import SturmSeq, check_recurrence, growth, new_seq, reconstruct, verify_identities
from .words import SeqSpec, phi_morphism, sturmian_word

EXIT_OK, EXIT_CHECK, EXIT_SCHEMA, EXIT_PRECISION, EXIT_DEPTH = 0, 1, 2, 3, 4
DUMP_FORMAT = "sturmlab-dump/1"
BUNDLED = ("bl-fibonacci-12", "bl-sigma-2", "det-growth")


# configuration ---------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    name: str
    seed: dict
    s: SeqSpec
    k_max: int = 22
    i_max: int = 21
    precision_bits: int = 256
    q_range: Tuple[Fraction, Fraction, int] = (Fraction(20), Fraction(150), 60)
    checks: Dict[str, float] = field(default_factory=dict)

    KEYS = {"name", "seed", "s", "k_max", "i_max", "precision_bits", "q_range", "checks"}

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise SchemaError("config must be a JSON object")
        unknown = set(obj) - cls.KEYS
        if unknown:
            raise SchemaError(f"unknown config keys: {sorted(unknown)}")
        for key in ("seed", "s"):
            if key not in obj:
                raise SchemaError(f"config is missing '{key}'")
        cfg = cls(name=str(obj.get("name", "unnamed")), seed=obj["seed"], s=SeqSpec.from_json(obj["s"]))
        for key in ("k_max", "i_max", "precision_bits"):
            if key in obj:
                if not isinstance(obj[key], int) or isinstance(obj[key], bool):
                    raise SchemaError(f"'{key}' must be an integer")
                setattr(cfg, key, obj[key])
        if "q_range" in obj:
            cfg.q_range = parse_q_range(obj["q_range"])
        checks = obj.get("checks", {})
        if not isinstance(checks, dict) or not all(isinstance(v, (int, float)) for v in checks.values()):
            raise SchemaError("'checks' must map names to numbers")
        cfg.checks = dict(checks)
        cfg.validate()
        return cfg

    def validate(self):
        if self.k_max < 6 or self.i_max < 6:
            raise InsufficientDepth("k_max and i_max must be at least 6")
        if self.precision_bits < 64:
            raise SchemaError("precision_bits must be at least 64")
        self.sequence()

    def sequence(self) -> SturmSeq:
        seed = self.seed
        if not isinstance(seed, dict):
            raise SchemaError("'seed' must be an object")
        try:
            if set(seed) == {"w0", "w1"}:
                return new_seq(_matrix(seed["w0"]), _matrix(seed["w1"]), self.s)
            if set(seed) == {"letters"}:
                a, b = seed["letters"]
                w0 = phi_morphism(sturmian_word(self.s, a, b, 0))
                w1 = phi_morphism(sturmian_word(self.s, a, b, 1))
                return new_seq(w0, w1, self.s)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise SchemaError(f"bad seed: {exc}") from exc
        raise SchemaError("seed must be {w0, w1} or {letters: [a, b]}")


def _matrix(rows) -> Mat2:
    if (not isinstance(rows, list) or len(rows) != 2
            or not all(isinstance(r, list) and len(r) == 2 and all(isinstance(e, int) for e in r) for r in rows)):
        raise SchemaError(f"a matrix must be [[a, b], [c, d]] of integers: {rows!r}")
    return Mat2.from_rows(rows)


def parse_q_range(value) -> Tuple[Fraction, Fraction, int]:
    """``LO:HI:N`` or ``[LO, HI, N]``."""
    try:
        parts = value.split(":") if isinstance(value, str) else list(value)
        if len(parts) != 3:
            raise ValueError
        lo, hi, n = Fraction(str(parts[0])), Fraction(str(parts[1])), int(parts[2])
    except (ValueError, TypeError, ZeroDivisionError):
        raise SchemaError(f"q-range must be LO:HI:N, got {value!r}") from None
    if not 0 <= lo < hi or n < 2:
        raise SchemaError("q-range needs 0 <= LO < HI and N >= 2")
    return lo, hi, n


def load_config(ref: str) -> ExperimentConfig:
    """A config file path, or the name of a bundled config."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    elif ref in BUNDLED:
        text = resources.files("sturmlab").joinpath("configs", f"{ref}.json").read_text()
    else:
        raise SchemaError(f"no config file or bundled config named {ref!r}")
    try:
        return ExperimentConfig.from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from exc


# dumps -----------------------------------------------------------------------------

def _coords(p: Point) -> List[str]:
    return [str(Fraction(c)) for c in p.coords()]


def _point(values) -> Point:
    try:
        return Point(*(Fraction(v) for v in values))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad point {values!r}") from exc


def sequence_dump(seq: SturmSeq, i_max: int) -> dict:
    points = []
    for i in range(-2, i_max + 1):
        entry = {"i": i, "y": _coords(seq.y(i))}
        if i >= -1:
            entry["z"] = _coords(seq.z(i))
        points.append(entry)
    return {
        "format": DUMP_FORMAT,
        "seed": seq.seed_json(),
        "N": [[str(Fraction(e)) for e in row] for row in seq.N.rows()],
        "admissible": seq.admissible,
        "i_max": i_max,
        "points": points,
    }


def verify_dump(dump: dict) -> dict:
    """Identities (3) and (4) on the stored points, then the seed round trip."""
    if not isinstance(dump, dict) or dump.get("format") != DUMP_FORMAT:
        raise SchemaError(f"not a {DUMP_FORMAT} document")
    try:
        s = SeqSpec.from_json(dump["seed"]["s"])
        i_max = int(dump["i_max"])
        y = {int(e["i"]): _point(e["y"]) for e in dump["points"]}
        w0, w1 = _matrix(dump["seed"]["w0"]), _matrix(dump["seed"]["w1"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"dump is missing fields: {exc}") from exc
    missing = [i for i in range(-2, i_max + 1) if i not in y]
    if missing:
        raise SchemaError(f"dump lacks points {missing}")
    report = check_recurrence(lambda i: y[i], s, i_max)
    out = report.as_dict()
    try:
        rebuilt = reconstruct(y[-2], y[-1], y[0], s)
        seed_ok = rebuilt.w0 == w0 and rebuilt.w1 == w1
    except DomainError:
        seed_ok = False
    out["seed_round_trip"] = seed_ok
    out["ok"] = report.ok and seed_ok
    failure = report.first_failure()
    if failure is not None:
        out["first_failure"] = {"identity": failure[0], "index": failure[1]}
    elif not seed_ok:
        out["first_failure"] = {"identity": "seed", "index": None}
    return out


# commands ------------------------------------------------------------------------------

def _effective(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.depth is not None:
        if args.depth < 6:
            raise InsufficientDepth("--depth must be at least 6")
        cfg.i_max = cfg.k_max = args.depth
    if args.precision is not None:
        if args.precision < 64:
            raise SchemaError("--precision must be at least 64")
        cfg.precision_bits = args.precision
    if args.q_range is not None:
        cfg.q_range = parse_q_range(args.q_range)
    return cfg


def cmd_gen(cfg: ExperimentConfig):
    seq = cfg.sequence()
    if not seq.admissible:
        raise DomainError("non-admissible seed: the points are not defined")
    return sequence_dump(seq, cfg.i_max), True, _gen_text


def _gen_text(out):
    lines = [f"seed {out['seed']}", f"N {out['N']}"]
    lines += [f"y_{e['i']} = ({', '.join(e['y'])})" for e in out["points"]]
    return lines


def cmd_verify(cfg: Optional[ExperimentConfig], dump_path: Optional[str]):
    if dump_path is not None:
        try:
            dump = json.loads(Path(dump_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read dump {dump_path}: {exc}") from exc
        out = verify_dump(dump)
        return out, out["ok"], _verify_text
    seq = cfg.sequence()
    report = verify_identities(seq, cfg.i_max)
    out = report.as_dict()
    failure = report.first_failure()
    if failure is not None:
        out["first_failure"] = {"identity": failure[0], "index": failure[1]}
    return out, report.ok, _verify_text


def _verify_text(out):
    lines = []
    for name, tally in out["identities"].items():
        lines.append(f"identity ({name}): {tally['passed']}/{tally['checked']} exact")
    if "seed_round_trip" in out:
        lines.append(f"seed round trip: {'ok' if out['seed_round_trip'] else 'FAILED'}")
    if "first_failure" in out:
        f = out["first_failure"]
        lines.append(f"FAIL: identity ({f['identity']}) at i = {f['index']}")
    return lines


def cmd_growth(cfg: ExperimentConfig):
    report = growth(cfg.sequence(), cfg.k_max)
    out = report.as_dict()
    return out, all(report.laws.values()), _growth_text


def _growth_text(out):
    lines = [f"{k:<16}{out[k]}" for k in ("alpha", "beta", "rho", "beta_reduced", "delta", "growth_constant")]
    lines += [f"law {k}: {'ok' if v else 'FAILED'}" for k, v in out["laws"].items()]
    return lines


def cmd_exponents(cfg: ExperimentConfig):
    seq = cfg.sequence()
    handle = XiHandle(seq)
    xi = handle.value(cfg.precision_bits)
    found = empirical_exponents(seq, cfg.i_max, handle)
    report = growth(seq, cfg.k_max)
    predicted = predicted_for(seq, report, cfg.k_max)
    out = {
        "xi": xi.as_list(15),
        "i_max": cfg.i_max,
        "delta": report.delta.as_list(),
        "exponents": found.as_dict(predicted),
    }
    agree = {}
    for name in found.NAMES:
        got, want = found.get(name), predicted.get(name)
        if got is None or want is None:
            continue
        ok = got.overlaps(want)
        if not ok and name == "lambda2_hat" and "lambda2_hat" in found.notes:
            jarnik = found.lambda2_hat_jarnik
            ok = want.lo >= got.lo and jarnik is not None and jarnik.overlaps(want)
        agree[name] = ok
    out["agreement"] = agree
    return out, all(agree.values()), _exponents_text


def _exponents_text(out):
    lines = [f"xi in {out['xi']}"]
    for name, entry in out["exponents"].items():
        if name in ("notes", "derived"):
            continue
        lines.append(f"{name:<20}empirical {entry['bracket']}  predicted {entry.get('predicted')}"
                     f"  {'' if name not in out['agreement'] else ('ok' if out['agreement'][name] else 'MISMATCH')}")
    for name, value in out["exponents"]["derived"].items():
        lines.append(f"{name:<20}derived     {value}")
    for name, note in out["exponents"].get("notes", {}).items():
        lines.append(f"note {name}: {note}")
    return lines


def _checks(cfg: ExperimentConfig) -> Dict[str, float]:
    out = {"max_deviation": 0.05, "minkowski_ratio": 0.02, "mahler_ratio": 0.02, "sandwich_slack": 0.05}
    out.update(cfg.checks)
    return out


def cmd_threesystem(cfg: ExperimentConfig):
    seq = cfg.sequence()
    lo, hi, n = cfg.q_range
    limits = _checks(cfg)
    system = _system_covering(seq, hi, None, growth(seq, cfg.k_max))
    rep = compare(seq, lo, hi, n, system=system, slack=limits["sandwich_slack"])
    summary = rep.summary()
    cycle = cycle_ratio(seq.s)
    psi = parametric_exponents(rep.profile, cycle=cycle)
    translated = translate_parametric(psi)
    out = {
        "system": system.as_dict(),
        "compare": summary,
        "parametric_window": [float(max(lo, hi / Fraction(cycle))), float(hi)],
        "parametric": {k: v.as_list() for k, v in psi.items()},
        "translated": {k: None if v is None else v.as_list() for k, v in translated.items()},
    }
    passed = dict(system.checks)
    passed["minkowski"] = summary["minkowski_ratio_top_half"] <= limits["minkowski_ratio"]
    passed["mahler"] = summary["mahler_ratio_top_half"] <= limits["mahler_ratio"]
    if summary["max_deviation_I_top_half"] is not None:
        passed["deviation_I"] = summary["max_deviation_I_top_half"] <= limits["max_deviation"]
    passed["sandwich_I_prime"] = not summary["sandwich_failures"]
    out["checks"] = passed
    return out, all(passed.values()), _threesystem_text


def _threesystem_text(out):
    c = out["compare"]
    lines = [
        f"model range q in {out['system']['range']}, i0 = {out['system']['i0']}",
        f"zones {c['zones']}",
        f"max |L - P|/q on I (top half): {c['max_deviation_I_top_half']}",
        f"Minkowski C = {c['minkowski_constant']:.6f}, C/q = {c['minkowski_ratio_top_half']:.6f}",
        f"Mahler    C = {c['mahler_constant']:.6f}, C/q = {c['mahler_ratio_top_half']:.6f}",
    ]
    lines += [f"{k:<14}{v}" for k, v in out["translated"].items()]
    lines += [f"check {k}: {'ok' if v else 'FAILED'}" for k, v in out["checks"].items()]
    return lines


def cmd_minima(cfg: ExperimentConfig):
    seq = cfg.sequence()
    lo, hi, n = cfg.q_range
    try:
        system = _system_covering(seq, hi, None, growth(seq, cfg.k_max))
    except (WindowError, DomainError):
        system = None
    handle = XiHandle(seq)
    profile = minima_profile(handle, _grid(lo, hi, n), system)
    return profile, True, None


# entry point -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sturmlab", description="Sturmian matrix sequences and their exponents.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("gen", "verify", "growth", "exponents", "threesystem", "minima"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="config file or bundled name: " + ", ".join(BUNDLED))
        p.add_argument("--out", help="write the output here instead of stdout")
        p.add_argument("--depth", type=int, help="override i_max and k_max")
        p.add_argument("--precision", type=int, help="bits of xi (>= 64)")
        p.add_argument("--q-range", dest="q_range", help="LO:HI:N")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="JSON output")
        fmt.add_argument("--csv", action="store_true", help="CSV output (minima)")
        if name == "verify":
            p.add_argument("dump", nargs="?", help="a dump written by 'gen --json'")
    return parser


def _emit(text: str, out_path: Optional[str]):
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    if args.command == "verify" and args.dump is not None:
        cfg = None
    else:
        if not args.config:
            raise SchemaError("--config is required")
        cfg = _effective(load_config(args.config), args)

    if args.command == "minima":
        profile, _, _ = cmd_minima(cfg)
        if args.json:
            text = json.dumps([p.row() for p in profile.points], indent=2) + "\n"
        else:
            text = profile.to_csv()
        _emit(text, args.out)
        return EXIT_OK

    if args.csv:
        raise SchemaError("--csv is only available for 'minima'")
    if args.command == "gen":
        out, ok, render = cmd_gen(cfg)
    elif args.command == "verify":
        out, ok, render = cmd_verify(cfg, args.dump)
    elif args.command == "growth":
        out, ok, render = cmd_growth(cfg)
    elif args.command == "exponents":
        out, ok, render = cmd_exponents(cfg)
    else:
        out, ok, render = cmd_threesystem(cfg)

    if args.json or args.out and args.command == "gen":
        text = json.dumps(out, indent=2) + "\n"
    else:
        text = "\n".join(render(out)) + "\n"
    _emit(text, args.out)
    if not ok:
        failure = out.get("first_failure") if isinstance(out, dict) else None
        if failure:
            print(f"identity ({failure['identity']}) fails at i = {failure['index']}", file=sys.stderr)
        else:
            print("one or more checks failed", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (InsufficientDepth, WindowError) as exc:
        print(f"insufficient depth: {exc}", file=sys.stderr)
        return EXIT_DEPTH
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
