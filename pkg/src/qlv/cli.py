"""Command-line front end: ``qlv sweep-delay | sweep-clone | crlb | state``.

Sweep settings come from an optional INI file (sections ``[delay]`` and
``[clone]``, shared keys under ``[DEFAULT]``) and are overridden by flags.

Exit status: 0 on success, 2 for invalid input, 3 for a degenerate scenario.
"""

from __future__ import annotations

import argparse
import configparser
import json
import re
import sys
from pathlib import Path

from . import geometry as geo
from .errors import DegenerateScenarioError, DomainError, QLVError
from .gaussian import (
    CloningChannelParams,
    is_entangled,
    standard_form_blocks,
    symplectic_spectrum,
    tmsv,
    tmsv_fock_coefficients,
)
from .records import config_echo, format_number, records_from_sweep, to_csv, to_json
from .simulator import Placement, ScenarioConfig, ThresholdPolicy, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_DEGENERATE = 0, 2, 3

DEFAULTS = {
    "delay": {
        "n_values": "3,4,5,6,8,10,12,15,20",
        "trials": "100000",
        "seed": "0",
        "sigma_t": "1e-6",
        "d_v": "1000",
        "eve_strategy": "toward_rs",
        "lambda": "1",
        "gamma_policy": "fixed",
        "rs_radius": "5000",
        "rs_points": "",
        "p0": "0.5",
    },
    "clone": {
        "n_values": "1,2,5,10,20,50,100",
        "trials": "100000",
        "seed": "0",
        "lambda": "1",
        "gamma_policy": "2N",
        "nc": "1",
        "mc": "5",
        "sigma0": "1",
        "p0": "0.5",
    },
}

_STRATEGY_ALIASES = {"minimize": "minimize_mahalanobis"}


class UsageError(QLVError):
    pass


def parse_int_list(text: str) -> list[int]:
    """``"1,2,5"`` or ranges ``"1-10"``; items may be mixed."""
    values = []
    for item in filter(None, (part.strip() for part in text.split(","))):
        if re.fullmatch(r"\d+-\d+", item):
            lo, hi = map(int, item.split("-"))
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(item))
    return values


def parse_points(text: str) -> list[tuple[float, float]]:
    """``"x1,y1;x2,y2;..."`` in meters."""
    points = []
    for item in filter(None, (part.strip() for part in text.split(";"))):
        x, y = item.split(",")
        points.append((float(x), float(y)))
    return points


def parse_gamma_policy(text: str, lam: float) -> ThresholdPolicy:
    if text == "fixed":
        return ThresholdPolicy.fixed_lambda(lam)
    match = re.fullmatch(r"(\d*\.?\d*)N", text)
    if not match:
        raise UsageError(f"gamma policy must be 'fixed' or '<k>N', got {text!r}")
    return ThresholdPolicy.gamma_equals(float(match.group(1) or 1))


def _settings(mode: str, args: argparse.Namespace) -> dict[str, str]:
    settings = dict(DEFAULTS[mode])
    if args.config:
        parser = configparser.ConfigParser()
        if not parser.read(args.config):
            raise UsageError(f"cannot read config file {args.config}")
        section = parser[mode] if parser.has_section(mode) else parser.defaults()
        unknown = set(section) - set(settings)
        if unknown:
            raise UsageError(f"unknown config keys for {mode}: {', '.join(sorted(unknown))}")
        settings.update(section)
    for key in settings:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = str(flag)
    return settings


def build_config(mode: str, args: argparse.Namespace) -> ScenarioConfig:
    s = _settings(mode, args)
    try:
        lam = float(s["lambda"])
        common = dict(
            n_values=parse_int_list(s["n_values"]),
            trials=int(s["trials"]),
            seed=int(s["seed"]),
            p0=float(s["p0"]),
            threshold_policy=parse_gamma_policy(s["gamma_policy"], lam),
        )
        if mode == "clone":
            params = CloningChannelParams(int(s["nc"]), int(s["mc"]), float(s["sigma0"]))
            return ScenarioConfig(mode="clone", clone_inputs=params, **common)
        points = parse_points(s["rs_points"])
        return ScenarioConfig(
            mode="delay",
            rs_placement=Placement.FIXED if points else Placement.RANDOM_DISC,
            rs_points=tuple(points) or None,
            rs_radius=float(s["rs_radius"]),
            sigma_t_std=float(s["sigma_t"]),
            d_v=float(s["d_v"]),
            eve_strategy=_STRATEGY_ALIASES.get(s["eve_strategy"], s["eve_strategy"]),
            **common,
        )
    except ValueError as exc:
        if isinstance(exc, QLVError):
            raise
        raise UsageError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_sweep(mode: str, args: argparse.Namespace) -> int:
    config = build_config(mode, args)
    result = run_sweep(config, workers=args.workers)
    records = records_from_sweep(result)
    policy = config.threshold_policy
    gamma_policy = "fixed" if policy.kind == "fixed_lambda" else f"{policy.value:g}N"
    echo = config_echo(config, {"gamma_policy": gamma_policy})
    if args.format == "json":
        _emit(to_json(records, echo), args.out)
    else:
        _emit(to_csv(records), args.out)
        if args.out:
            Path(args.out + ".meta.json").write_text(
                json.dumps({"config": echo}, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
    return EXIT_OK


def _print_pairs(pairs: list[tuple[str, str]], fmt: str, out: str | None) -> None:
    if fmt == "json":
        _emit(json.dumps(dict(pairs), indent=2) + "\n", out)
    else:
        _emit("".join(f"{k} = {v}\n" for k, v in pairs), out)


def cmd_crlb(args: argparse.Namespace) -> int:
    points = parse_points(args.rs_points)
    geometry = geo.NetworkGeometry(points, parse_points(args.claimed)[0])
    timing = geo.TimingModel(args.sigma_t)
    bound = geo.crlb_position_std(geometry, timing, args.n)
    pairs = [("crlb_position_std_m", format_number(bound))]
    if args.quantum is not None:
        n_photons = float(args.quantum.split("=")[-1])
        n_obs = geometry.n_stations if args.n is None else args.n
        factor = geo.quantum_scaling_advantage(n_obs, n_photons)
        pairs += [
            ("quantum_advantage", format_number(factor)),
            ("quantum_position_std_m", format_number(bound / factor)),
        ]
    _print_pairs(pairs, args.format, args.out)
    return EXIT_OK


def cmd_state(args: argparse.Namespace) -> int:
    state = tmsv(args.r)
    blocks = standard_form_blocks(state.covariance)
    pt = symplectic_spectrum(blocks, partial_transpose=True)
    plain = symplectic_spectrum(blocks, partial_transpose=False)
    pairs = [
        ("r", format_number(args.r)),
        ("v", format_number(blocks.a_tilde)),
        ("pt_spectrum", f"{format_number(pt.nu_minus)}, {format_number(pt.nu_plus)}"),
        ("spectrum", f"{format_number(plain.nu_minus)}, {format_number(plain.nu_plus)}"),
        ("entangled", str(is_entangled(state)).lower()),
    ]
    if args.fock is not None:
        fock = tmsv_fock_coefficients(args.r, args.fock)
        pairs += [
            ("fock_coefficients", ", ".join(format_number(c) for c in fock.coefficients)),
            ("fock_norm", format_number(fock.norm)),
        ]
    _print_pairs(pairs, args.format, args.out)
    return EXIT_OK


def _shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output file (default: standard output)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _sweep_parser(sub, name: str, mode: str) -> None:
    p = sub.add_parser(name, help=f"run the {mode} N-sweep")
    _shared(p)
    p.add_argument("--config", help="INI file with a [%s] section" % mode)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--n-values", dest="n_values")
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--gamma-policy", dest="gamma_policy")
    p.add_argument("--p0", type=float)
    if mode == "delay":
        p.add_argument("--sigma-t", dest="sigma_t", type=float, help="timing noise std (s)")
        p.add_argument("--d-v", dest="d_v", type=float, help="verification distance (m)")
        p.add_argument("--eve-strategy", dest="eve_strategy", choices=("toward_rs", "minimize", "minimize_mahalanobis"))
        p.add_argument("--rs-radius", dest="rs_radius", type=float)
        p.add_argument("--rs-points", dest="rs_points", help="fixed stations 'x,y;x,y;...' (m)")
    else:
        p.add_argument("--nc", type=int)
        p.add_argument("--mc", type=int)
        p.add_argument("--sigma0", type=float)
    p.set_defaults(handler=lambda args: cmd_sweep(mode, args))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _sweep_parser(sub, "sweep-delay", "delay")
    _sweep_parser(sub, "sweep-clone", "clone")

    p = sub.add_parser("crlb", help="classical timing bound on position error")
    _shared(p)
    p.add_argument("--rs-points", dest="rs_points", required=True, help="'x,y;x,y;...' (m)")
    p.add_argument("--claimed", default="0,0", help="device position 'x,y' (m)")
    p.add_argument("--sigma-t", dest="sigma_t", type=float, default=1e-6, help="timing noise std (s)")
    p.add_argument("--n", type=int, help="observation count (default: number of stations)")
    p.add_argument("--quantum", help="also report the quantum advantage, e.g. n_p=25")
    p.set_defaults(handler=cmd_crlb)

    p = sub.add_parser("state", help="two-mode squeezed vacuum diagnostics")
    _shared(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--fock", type=int, help="also print Fock coefficients up to this photon number")
    p.set_defaults(handler=cmd_state)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except DegenerateScenarioError as exc:
        print(f"qlv: degenerate scenario: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (QLVError, DomainError, ValueError) as exc:
        print(f"qlv: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
