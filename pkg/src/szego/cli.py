"""Command-line surface: spectrum, evolve, solitons, growth, actionangle,
roundtrip, validate.

Every run writes its artifacts plus a manifest.json (config echo, library
version, wall time, artifact list) into the output directory.  Artifact
files are written atomically and are byte-identical across runs with the
same configuration and seed; only the manifest carries timing.

Exit codes: 0 success, 2 invalid input, 3 mathematical precondition
violated, 4 tolerance exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import InputError, NumericalError, PreconditionError, ToleranceExceeded
from .rational import inner_product, load_symbol, to_json_dict
from .hankel import decomposition_to_json, eigendecompose
from .flow import trajectory
from .actionangle import (
    chi,
    chi_inverse,
    coords_from_json,
    coords_to_json,
    _coords_distance,
)
from .asymptotics import growth_fit, nongeneric_analysis, remainder_norms
from .oracle import compare, self_convergence
from .sampling import random_coords, random_generic


def _parse_times(spec: str) -> list[float]:
    if spec.startswith("lin:") or spec.startswith("log:"):
        kind, a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
        if n < 1:
            raise InputError("times spec needs at least one point")
        if kind == "lin":
            return [float(v) for v in np.linspace(a, b, n)]
        if a == 0 or b == 0 or (a < 0) != (b < 0):
            raise InputError("log spacing needs nonzero endpoints of one sign")
        sgn = 1.0 if a > 0 else -1.0
        return [float(sgn * v) for v in np.geomspace(abs(a), abs(b), n)]
    try:
        return [float(v) for v in spec.split(",") if v.strip() != ""]
    except ValueError as e:
        raise InputError(f"bad times spec {spec!r}: {e}") from e


def _parse_list(spec: str) -> list[float]:
    try:
        return [float(v) for v in spec.split(",") if v.strip() != ""]
    except ValueError as e:
        raise InputError(f"bad list {spec!r}: {e}") from e


def _load_symbol_arg(arg: str):
    if arg is None:
        raise InputError("--symbol is required for this command")
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return load_symbol(fh.read())
    return load_symbol(arg)


class _Run:
    """Collects artifacts for one CLI invocation and writes the manifest."""

    def __init__(self, outdir: str | None, command: str, config: dict):
        self.outdir = outdir
        self.command = command
        self.config = config
        self.artifacts: list[str] = []
        self.t0 = time.monotonic()
        if outdir:
            os.makedirs(outdir, exist_ok=True)

    def _write_atomic(self, name: str, data: str):
        if not self.outdir:
            return
        path = os.path.join(self.outdir, name)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
        self.artifacts.append(name)

    def write_json(self, name: str, obj):
        self._write_atomic(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def write_csv(self, name: str, header: list[str], rows: list[list]):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        self._write_atomic(name, buf.getvalue())

    def finish(self):
        if self.outdir:
            manifest = {
                "command": self.command,
                "config": self.config,
                "version": __version__,
                "wall_time_s": time.monotonic() - self.t0,
                "artifacts": sorted(self.artifacts),
            }
            path = os.path.join(self.outdir, "manifest.json")
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(manifest, fh, indent=2, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, path)


def _cmd_spectrum(args) -> int:
    u = _load_symbol_arg(args.symbol)
    run = _Run(args.out, "spectrum", {"symbol": args.symbol})
    dec = eigendecompose(u)
    doc = decomposition_to_json(dec)
    run.write_json("spectrum.json", doc)
    print("lambda:     ", " ".join(f"{v:.12g}" for v in doc["lambda"]))
    print("nu:         ", " ".join(f"{v:.12g}" for v in doc["nu"]))
    print("two_phi:    ", " ".join(f"{v:.12g}" for v in doc["two_phi"]))
    print("gamma:      ", " ".join(f"{v:.12g}" for v in doc["gamma"]))
    print("genericity: ", doc["genericity"])
    run.finish()
    return 0


def _cmd_evolve(args) -> int:
    u = _load_symbol_arg(args.symbol)
    times = _parse_times(args.times)
    hs = tuple(_parse_list(args.hs)) if args.hs else ()
    observables = tuple(args.observables.split(","))
    rows = trajectory(u, times, observables=observables, hs=hs)
    run = _Run(args.out, "evolve", {
        "symbol": args.symbol, "times": args.times,
        "observables": args.observables, "hs": args.hs,
        "format": args.format,
    })
    n = max((len(r.get("poles", ())) for r in rows), default=0)
    header = ["time"]
    for k in range(1, n + 1):
        header += [f"pole_{k}_re", f"pole_{k}_im", f"coeff_{k}_re", f"coeff_{k}_im"]
    if "conserved" in observables:
        header += ["J2", "J4", "J6", "J8"]
    if "norms" in observables:
        header += ["L2", "H12"] + [f"Hdot{s:g}" for s in hs]
    table = []
    for r in rows:
        row = [r["time"]]
        poles = r.get("poles", [])
        coeffs = r.get("coefficients", [])
        for k in range(n):
            if k < len(poles):
                row += [poles[k].real, poles[k].imag, coeffs[k].real, coeffs[k].imag]
            else:
                row += [float("nan")] * 4
        if "conserved" in observables:
            row += list(r["J"])
        if "norms" in observables:
            row += [r["L2"], r["H12"]] + [r[f"Hdot{s:g}"] for s in hs]
        table.append(row)
    if args.format == "csv":
        run.write_csv("trajectory.csv", header, table)
    else:
        run.write_json("trajectory.json", {
            "columns": header,
            "rows": [[v for v in row] for row in table],
        })
    print(f"evolved {len(rows)} times; columns: {', '.join(header[:6])}, ...")
    run.finish()
    return 0


def _cmd_solitons(args) -> int:
    u = _load_symbol_arg(args.symbol)
    times = _parse_times(args.times)
    svals = _parse_list(args.s)
    rep = remainder_norms(u, times, svals)
    run = _Run(args.out, "solitons", {
        "symbol": args.symbol, "times": args.times, "s": args.s,
    })
    run.write_json("solitons.json", {
        "direction": rep.direction,
        "solitons": [
            {
                "amplitude": [sp.amplitude.real, sp.amplitude.imag],
                "pole": [sp.pole.real, sp.pole.imag],
                "speed": sp.speed,
                "frequency": sp.frequency,
            }
            for sp in rep.solitons
        ],
        "s_values": list(rep.s_values),
        "decay_exponents": list(rep.exponents),
    })
    header = ["time"] + [f"remainder_H{s:g}" for s in rep.s_values]
    for k in range(1, len(rep.solitons) + 1):
        header += [f"soliton_{k}_pole_re", f"soliton_{k}_pole_im"]
    rows = []
    for i, t in enumerate(rep.times):
        row = [t] + [float(v) for v in rep.norms[i]]
        for sp in rep.solitons:
            track = sp.pole + sp.speed * t
            row += [track.real, track.imag]
        rows.append(row)
    run.write_csv("remainder.csv", header, rows)
    print("decay exponents:", " ".join(f"{e:.4f}" for e in rep.exponents))
    run.finish()
    return 0


def _cmd_growth(args) -> int:
    u = _load_symbol_arg(args.symbol)
    times = _parse_times(args.times)
    svals = _parse_list(args.s)
    run = _Run(args.out, "growth", {
        "symbol": args.symbol, "times": args.times, "s": args.s,
    })
    out = []
    for s in svals:
        g = growth_fit(u, s, times)
        out.append({k: g[k] for k in ("s", "slope", "intercept", "h_half_drift")})
        print(f"s={s:g}: slope {g['slope']:.4f}  (h_half drift {g['h_half_drift']:.2e})")
    doc = {"fits": out}
    try:
        rep = nongeneric_analysis(u, times=[t for t in times if t != 0])
        doc["double_eigenvalue"] = {
            "lambda_sq": rep.eigenvalue,
            "soliton_speed": rep.soliton.speed,
            "e2_imag_exponent": rep.e2_imag_exponent,
        }
    except PreconditionError:
        pass
    run.write_json("growth.json", doc)
    run.finish()
    return 0


def _cmd_actionangle(args) -> int:
    run = _Run(args.out, "actionangle", {
        "symbol": args.symbol, "coords": args.coords,
    })
    if args.coords:
        if os.path.exists(args.coords):
            with open(args.coords, "r", encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = args.coords
        try:
            coords = coords_from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON: {e}") from e
        u = chi_inverse(coords)
        back = chi(eigendecompose(u))
        doc = {
            "input_coords": coords_to_json(coords),
            "symbol": to_json_dict(u),
            "forward_coords": coords_to_json(back),
            "max_error": _coords_distance(coords, back),
        }
        run.write_json("actionangle.json", doc)
        print(f"reconstructed symbol; round-trip error {doc['max_error']:.3e}")
    else:
        u = _load_symbol_arg(args.symbol)
        coords = chi(eigendecompose(u))
        run.write_json("actionangle.json", {"coords": coords_to_json(coords)})
        print("actions_i:     ", " ".join(f"{v:.12g}" for v in coords.actions_i))
        print("actions_lambda:", " ".join(f"{v:.12g}" for v in coords.actions_lambda))
        print("angles:        ", " ".join(f"{v:.12g}" for v in coords.angles))
        print("gammas:        ", " ".join(f"{v:.12g}" for v in coords.gammas))
    run.finish()
    return 0


def _cmd_roundtrip(args) -> int:
    rng = np.random.default_rng(args.seed)
    run = _Run(args.out, "roundtrip", {
        "n": args.n, "count": args.count, "seed": args.seed, "tol": args.tol,
    })
    worst_coords = 0.0
    worst_symbol = 0.0
    for _ in range(args.count):
        c = random_coords(args.n, rng)
        u = chi_inverse(c)
        back = chi(eigendecompose(u))
        worst_coords = max(worst_coords, _coords_distance(c, back))
        v = random_generic(args.n, rng)
        v2 = chi_inverse(chi(eigendecompose(v)))
        diff = v2 - v
        worst_symbol = max(worst_symbol, float(np.sqrt(abs(inner_product(diff, diff)))))
    doc = {
        "count": args.count,
        "n": args.n,
        "max_coords_error": worst_coords,
        "max_symbol_l2_error": worst_symbol,
        "tol": args.tol,
    }
    run.write_json("roundtrip.json", doc)
    print(f"coords round trip max error: {worst_coords:.3e}")
    print(f"symbol round trip max L2 error: {worst_symbol:.3e}")
    run.finish()
    if max(worst_coords, worst_symbol) > args.tol:
        raise ToleranceExceeded(
            f"round-trip error above tolerance {args.tol:g}"
        )
    return 0


def _cmd_validate(args) -> int:
    u = _load_symbol_arg(args.symbol)
    run = _Run(args.out, "validate", {
        "symbol": args.symbol, "t": args.t, "L": args.L, "M": args.M,
        "dt": args.dt, "tol": args.tol, "convergence": args.convergence,
    })
    rep = compare(u, args.t, args.L, args.M, args.dt)
    if args.convergence:
        tc = min(abs(args.t), 1.0) or 1.0
        rep["self_convergence"] = self_convergence(u, tc, args.L, args.M, tc / 25.0)
    run.write_json("validate.json", rep)
    print(f"l2_error: {rep['l2_error']:.3e}  linf_error: {rep['linf_error']:.3e}")
    print(f"j2 drift: oracle {rep['j2_drift_oracle']:.2e} "
          f"explicit {rep['j2_drift_explicit']:.2e}")
    if args.convergence:
        print(f"measured RK4 order: {rep['self_convergence']['order']:.2f}")
    run.finish()
    if rep["l2_error"] > args.tol:
        raise ToleranceExceeded(
            f"oracle comparison {rep['l2_error']:.3e} above tolerance {args.tol:g}"
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="szego",
        description="Exact evolution and spectral analysis for the cubic "
                    "Szego equation with rational data.",
        epilog="Any subcommand accepts '--config FILE' holding flat "
               "'key = value' lines; explicit flags override config values.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, symbol=True):
        if symbol:
            sp.add_argument("--symbol", help="symbol JSON (path or inline)")
        sp.add_argument("--out", help="output directory for artifacts")
        sp.add_argument("--seed", type=int, default=0, help="RNG seed")
        sp.add_argument("--tol", type=float, default=None, help="tolerance")

    sp = sub.add_parser("spectrum", help="eigendata of the Hankel operator")
    common(sp)
    sp.set_defaults(func=_cmd_spectrum)

    sp = sub.add_parser("evolve", help="closed-form trajectory table")
    common(sp)
    sp.add_argument("--times", required=True,
                    help="times: 'lin:a:b:n', 'log:a:b:n' or comma list")
    sp.add_argument("--observables", default="poles,coefficients,conserved,norms")
    sp.add_argument("--hs", default="", help="extra homogeneous Sobolev indices")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=_cmd_evolve)

    sp = sub.add_parser("solitons", help="soliton resolution report")
    common(sp)
    sp.add_argument("--times", required=True)
    sp.add_argument("--s", default="0,0.5,1", help="Sobolev indices")
    sp.set_defaults(func=_cmd_solitons)

    sp = sub.add_parser("growth", help="Sobolev growth slopes")
    common(sp)
    sp.add_argument("--times", default="log:1e2:1e4:17")
    sp.add_argument("--s", default="0.75,1,2")
    sp.set_defaults(func=_cmd_growth)

    sp = sub.add_parser("actionangle", help="coordinates of a symbol, or "
                                            "reconstruction from --coords")
    common(sp)
    sp.add_argument("--coords", help="coordinates JSON (path or inline)")
    sp.set_defaults(func=_cmd_actionangle)

    sp = sub.add_parser("roundtrip", help="random action-angle round trips")
    common(sp, symbol=False)
    sp.add_argument("--n", type=int, default=3, help="symbol degree")
    sp.add_argument("--count", type=int, default=10)
    sp.set_defaults(func=_cmd_roundtrip, tol_default=1e-7)

    sp = sub.add_parser("validate", help="pseudo-spectral cross-check")
    common(sp)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--L", type=float, default=200.0)
    sp.add_argument("--M", type=int, default=2**14)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--convergence", action="store_true")
    sp.set_defaults(func=_cmd_validate)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Load a flat key=value config file as subcommand defaults.

    Flags given on the command line keep precedence (they override the
    injected defaults).  Returns argv with the --config option stripped.
    """
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    try:
        path = argv[i + 1]
    except IndexError:
        raise InputError("--config needs a file path") from None
    rest = argv[:i] + argv[i + 2:]
    entries = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise InputError(f"bad config line: {line!r}")
                key, val = (s.strip() for s in line.split("=", 1))
                entries[key.replace("-", "_")] = val
    except OSError as e:
        raise InputError(f"cannot read config: {e}") from e
    # find the subcommand parser to learn the argument types
    converted = {}
    subcmd = next((a for a in rest if not a.startswith("-")), None)
    choices = parser._subparsers._group_actions[0].choices
    if subcmd in choices:
        actions = {a.dest: a for a in choices[subcmd]._actions}
        for key, val in entries.items():
            act = actions.get(key)
            if act is None:
                raise InputError(f"unknown config key {key!r}")
            converted[key] = act.type(val) if act.type else val
            act.required = False
        choices[subcmd].set_defaults(**converted)
    return rest


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        argv = _apply_config(parser, list(argv))
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    if args.tol is None:
        args.tol = 1e-7 if args.command == "roundtrip" else 2e-4
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (PreconditionError, NumericalError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ToleranceExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
