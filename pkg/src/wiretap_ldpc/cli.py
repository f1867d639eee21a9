"""Command-line driver: capacity curves, code design, construction,
encoding/decoding, simulation, and bound evaluation with stable file
formats (JSON for specs/settings, CSV for series, alist for matrices)."""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys

import numpy as np

from . import __version__
from .alist import AlistFormatError, read_alist, write_alist
from .channel import ChannelSetting, OutOfRegionError, bpsk_capacity, llr
from .channel import region_boundary as channel_region_boundary
from .channel import secrecy_capacity, transmit
from .degrees import DegreeDistribution, design_rate
from .gf2 import DegenerateGraphError
from .search import SearchConfig, round_log_csv, search_for_setting
from .secret import (
    SecretCode,
    bits_to_symbols,
    build_secret_code,
    destination_decode,
    equivocation_lower_bound,
    k_for_secret_rate,
    load_secret_code,
    save_secret_code,
    secret_encode,
)
from .simulate import estimate, records_to_csv
from .tanner import SwapBudgetExhaustedError, UnrealizableDegreeSequenceError, sample_graph

CODE_SPEC_VERSION = 1


class DomainError(Exception):
    """User-level failure mapped to exit code 1."""


def _load_setting(path: str) -> ChannelSetting:
    try:
        with open(path) as f:
            return ChannelSetting.from_json(f.read())
    except (OSError, ValueError, KeyError) as exc:
        raise DomainError(f"cannot read channel setting {path}: {exc}") from exc


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    seed = secrets.randbits(32)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _read_bits(path: str, expect: int | None = None) -> np.ndarray:
    with open(path) as f:
        raw = f.read().split()
    bits = np.array([int(tok) for tok in "".join(raw)], dtype=np.uint8)
    if np.any(bits > 1):
        raise DomainError(f"{path}: message must be 0/1 bits")
    if expect is not None and bits.size != expect:
        raise DomainError(f"{path}: expected {expect} bits, got {bits.size}")
    return bits


def _code_spec_dict(dist: DegreeDistribution, secret_rate, seed, provenance) -> dict:
    return {
        "version": CODE_SPEC_VERSION,
        "lambda": {str(d): f for d, f in dist.lam.items()},
        "rho": {str(d): f for d, f in dist.rho.items()},
        "design_rate": design_rate(dist),
        "secret_rate": secret_rate,
        "seed": seed,
        "provenance": provenance,
    }


def _load_code_spec(path: str) -> dict:
    try:
        with open(path) as f:
            spec = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read code spec {path}: {exc}") from exc
    if spec.get("version") != CODE_SPEC_VERSION:
        raise DomainError(
            f"{path}: unsupported code spec version {spec.get('version')!r}"
        )
    dist = DegreeDistribution.from_json_dict(spec)
    recomputed = design_rate(dist)
    if abs(recomputed - float(spec["design_rate"])) > 1e-6:
        raise DomainError(
            f"{path}: stored design_rate {spec['design_rate']} does not match "
            f"the distributions ({recomputed:.8f})"
        )
    return spec


def _cmd_capacity(args) -> int:
    rows = ["snr_db,value"]
    for t in args.t:
        if t < 0:
            raise DomainError("gain must be nonnegative")
        snr_db = -math.inf if t == 0 else 20.0 * math.log10(t)
        rows.append(f"{snr_db!r},{bpsk_capacity(t)!r}")
    _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def _cmd_secrecy_capacity(args) -> int:
    setting = _load_setting(args.setting)
    rows = ["snr_db,value"]
    if args.sweep:
        lo, hi, steps = args.sweep
        for snr_db in np.linspace(lo, hi, int(steps)):
            cb, _ = secrecy_capacity(
                ChannelSetting(float(snr_db), setting.alpha_sq_db)
            )
            rows.append(f"{float(snr_db)!r},{cb!r}")
    else:
        cb, _ = secrecy_capacity(setting)
        rows.append(f"{setting.max_snr_db!r},{cb!r}")
    _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def _cmd_region(args) -> int:
    setting = _load_setting(args.setting)
    rows = ["secret_rate,value"]
    try:
        for rs in args.rs:
            rows.append(f"{rs!r},{channel_region_boundary(rs, setting)!r}")
    except OutOfRegionError as exc:
        raise DomainError(str(exc)) from exc
    _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def _cmd_design(args) -> int:
    setting = _load_setting(args.setting)
    if args.start:
        with open(args.start) as f:
            start = DegreeDistribution.from_json(f.read())
    else:
        start = DegreeDistribution(
            lam={2: 0.21991, 3: 0.23328, 4: 0.02058, 6: 0.08543, 7: 0.06540,
                 8: 0.04767, 9: 0.01912, 10: 0.30861},
            rho={7: 0.63676, 8: 0.36324},
        )
    seed = _resolve_seed(args)
    config = SearchConfig(
        max_var_degree=args.dv,
        max_chk_degree=args.dc,
        delta=args.delta,
        target=args.epsilon,
        max_rounds=args.max_rounds,
    )
    try:
        dist, log = search_for_setting(start, setting, args.secret_rate, config)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    spec = _code_spec_dict(
        dist,
        args.secret_rate,
        seed,
        {
            "setting": json.loads(setting.to_json()),
            "search_config": {
                "dv": args.dv, "dc": args.dc, "delta": args.delta,
                "epsilon": args.epsilon, "max_rounds": args.max_rounds,
            },
            "round_log_path": args.round_log,
        },
    )
    _write_text(args.out, json.dumps(spec, indent=2) + "\n")
    if args.round_log:
        _write_text(args.round_log, round_log_csv(log))
    return 0


def _materialize(spec: dict, n: int, seed: int) -> SecretCode:
    dist = DegreeDistribution.from_json_dict(spec)
    secret_rate = float(spec["secret_rate"])
    p = secret_rate / (1.0 + secret_rate)
    n_total = int(round(n / (1.0 - p)))
    k = k_for_secret_rate(n_total, secret_rate)
    try:
        graph = sample_graph(dist, n_total, seed)
        return build_secret_code(graph, k, seed + 1)
    except (
        SwapBudgetExhaustedError,
        UnrealizableDegreeSequenceError,
        DegenerateGraphError,
    ) as exc:
        raise DomainError(str(exc)) from exc


def _cmd_construct(args) -> int:
    spec = _load_code_spec(args.code)
    seed = _resolve_seed(args)
    code = _materialize(spec, args.n, seed)
    save_secret_code(code, args.out_alist, args.out_sidecar, seed=seed)
    print(
        f"n={code.n_transmitted} k={code.n_message} l={code.n_info} "
        f"mother_rate={code.mother_rate:.6f} secret_rate={code.secret_rate:.6f}",
        file=sys.stderr,
    )
    return 0


def _load_materialized(args) -> SecretCode:
    try:
        return load_secret_code(args.alist, args.sidecar)
    except (OSError, AlistFormatError, DegenerateGraphError, ValueError) as exc:
        raise DomainError(str(exc)) from exc


def _cmd_encode(args) -> int:
    code = _load_materialized(args)
    message = _read_bits(args.message, expect=code.n_message)
    seed = _resolve_seed(args)
    parts = secret_encode(code, message, np.random.default_rng(seed))
    _write_text(args.out, "".join(str(int(b)) for b in parts.transmitted) + "\n")
    return 0


def _cmd_decode(args) -> int:
    code = _load_materialized(args)
    setting = _load_setting(args.setting)
    with open(args.observations) as f:
        y = np.array([float(tok) for tok in f.read().split()])
    if y.size != code.n_transmitted:
        raise DomainError(
            f"expected {code.n_transmitted} observations, got {y.size}"
        )
    m_hat, _, res = destination_decode(
        code, y, setting.operating_gain, max_iters=args.max_iters
    )
    _write_text(args.out, "".join(str(int(b)) for b in m_hat) + "\n")
    if not res.converged:
        print("warning: decoder did not converge", file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    setting = _load_setting(args.setting)
    seed = _resolve_seed(args)
    if args.alist and args.sidecar:
        code = _load_materialized(args)
    elif args.code and args.n:
        code = _materialize(_load_code_spec(args.code), args.n, seed)
    else:
        raise DomainError(
            "need either --alist with --sidecar, or --code with --n"
        )
    record = estimate(
        code, setting, trials=args.trials, seed=seed, max_iters=args.max_iters
    )
    _write_text(args.out, records_to_csv([record]))
    return 0


def _cmd_evaluate(args) -> int:
    setting = _load_setting(args.setting)
    c_w = bpsk_capacity(setting.wiretap_gain)
    try:
        r_e, frac = equivocation_lower_bound(
            args.code_rate, args.secret_rate, c_w, args.eps_w, args.n
        )
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    rows = [
        "secret_rate,code_rate,wiretap_capacity,eps_w,n,"
        "equivocation_rate,fractional_equivocation",
        f"{args.secret_rate!r},{args.code_rate!r},{c_w!r},"
        f"{args.eps_w!r},{args.n},{r_e!r},{frac!r}",
    ]
    _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wiretap-ldpc",
        description="Secret-message LDPC coding over the BPSK Gaussian "
        "wiretap channel",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("capacity", help="BPSK-AWGN capacity at given gains")
    c.add_argument("--t", type=float, action="append", required=True,
                   help="channel gain (repeatable)")
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_capacity)

    c = sub.add_parser("secrecy-capacity", help="secrecy capacity of a setting")
    c.add_argument("--setting", required=True)
    c.add_argument("--sweep", nargs=3, type=float, metavar=("LO", "HI", "STEPS"),
                   help="sweep max SNR in dB")
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_secrecy_capacity)

    c = sub.add_parser("region", help="fractional-equivocation boundary")
    c.add_argument("--setting", required=True)
    c.add_argument("--rs", type=float, action="append", required=True)
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_region)

    c = sub.add_parser("design", help="degree-distribution search")
    c.add_argument("--setting", required=True)
    c.add_argument("--secret-rate", type=float, required=True)
    c.add_argument("--dv", type=int, default=10)
    c.add_argument("--dc", type=int, default=10)
    c.add_argument("--delta", type=float, default=0.5)
    c.add_argument("--epsilon", type=float, default=1e-2)
    c.add_argument("--max-rounds", type=int, default=8)
    c.add_argument("--seed", type=int)
    c.add_argument("--start", help="starting distribution JSON")
    c.add_argument("--round-log", help="write per-round CSV here")
    c.add_argument("--out", default=None, help="code spec JSON")
    c.set_defaults(func=_cmd_design)

    c = sub.add_parser("construct", help="materialize a code instance")
    c.add_argument("--code", required=True, help="code spec JSON")
    c.add_argument("--n", type=int, required=True, help="transmitted length")
    c.add_argument("--seed", type=int)
    c.add_argument("--out-alist", required=True)
    c.add_argument("--out-sidecar", required=True)
    c.set_defaults(func=_cmd_construct)

    c = sub.add_parser("encode", help="encode a message file")
    c.add_argument("--alist", required=True)
    c.add_argument("--sidecar", required=True)
    c.add_argument("--message", required=True)
    c.add_argument("--seed", type=int)
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_encode)

    c = sub.add_parser("decode", help="destination decoding of observations")
    c.add_argument("--alist", required=True)
    c.add_argument("--sidecar", required=True)
    c.add_argument("--setting", required=True)
    c.add_argument("--observations", required=True)
    c.add_argument("--max-iters", type=int, default=200)
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_decode)

    c = sub.add_parser("simulate", help="Monte-Carlo error estimation")
    c.add_argument("--alist")
    c.add_argument("--sidecar")
    c.add_argument("--code", help="code spec JSON (construct on the fly)")
    c.add_argument("--n", type=int, help="transmitted length with --code")
    c.add_argument("--setting", required=True)
    c.add_argument("--trials", type=int, required=True)
    c.add_argument("--seed", type=int)
    c.add_argument("--max-iters", type=int, default=200)
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_simulate)

    c = sub.add_parser("evaluate", help="equivocation bound from inputs")
    c.add_argument("--setting", required=True)
    c.add_argument("--code-rate", type=float, required=True)
    c.add_argument("--secret-rate", type=float, required=True)
    c.add_argument("--eps-w", type=float, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_evaluate)

    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AlistFormatError, OutOfRegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
