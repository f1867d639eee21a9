"""Monte-Carlo estimation of decoder error rates on concrete code instances.

Each trial encodes a fresh message, sends it through both channels with
independent noise, runs the destination decoder (punctured positions at
zero LLR) and the message-informed eavesdropper decoder (pinned), and
tallies frame and bit errors.  Frame error rates feed the equivocation
bound; bit error rates ride along as diagnostics.  Trials derive their RNG
streams from (seed, trial index), so results are independent of worker
scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSetting, bpsk_capacity, region_boundary, transmit
from .decoder import DEFAULT_MAX_ITERS
from .secret import (
    SecretCode,
    bits_to_symbols,
    destination_decode,
    equivocation_lower_bound,
    secret_encode,
    wiretapper_decode,
)

THREADS_ENV = "WIRETAP_LDPC_THREADS"
DESK_SCALE_BLOCKLENGTH = 500_000  # validity thresholds relax below this


@dataclass
class EvaluationRecord:
    """Estimated operating point of one code instance at one setting."""

    setting: ChannelSetting
    n: int
    trials: int
    eps_d: float
    eps_d_halfwidth: float
    eps_w: float
    eps_w_halfwidth: float
    eps_d_bit: float
    eps_w_bit: float
    secret_rate: float
    code_rate: float
    wiretap_capacity: float
    equivocation_rate: float
    fractional_equivocation: float
    threshold_d: float
    threshold_w: float
    valid: bool
    dest_error_trials: list[int] = field(default_factory=list)
    wire_error_trials: list[int] = field(default_factory=list)


def _confidence_halfwidth(errors: int, trials: int) -> float:
    """95% half-width: normal approximation, Wilson when errors are scarce."""
    if trials == 0:
        return float("nan")
    z = 1.959963984540054
    p = errors / trials
    if errors < 10 or trials - errors < 10:
        z2 = z * z
        denom = 1.0 + z2 / trials
        center = (p + z2 / (2 * trials)) / denom
        half = (
            z
            * np.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
            / denom
        )
        lo = max(0.0, center - half)
        hi = min(1.0, center + half)
        return (hi - lo) / 2
    return z * float(np.sqrt(p * (1 - p) / trials))


_WORKER_STATE: dict = {}


def _init_worker(code: SecretCode, setting: ChannelSetting, max_iters: int):
    _WORKER_STATE["code"] = code
    _WORKER_STATE["setting"] = setting
    _WORKER_STATE["max_iters"] = max_iters


def _one_trial(args) -> tuple[int, bool, bool, int, int]:
    seed, trial = args
    code: SecretCode = _WORKER_STATE["code"]
    setting: ChannelSetting = _WORKER_STATE["setting"]
    max_iters: int = _WORKER_STATE["max_iters"]

    rng = np.random.default_rng([seed, trial])
    message = rng.integers(0, 2, size=code.n_message).astype(np.uint8)
    parts = secret_encode(code, message, rng)
    symbols = bits_to_symbols(parts.transmitted)
    y = transmit(symbols, setting.operating_gain, rng)
    z = transmit(symbols, setting.wiretap_gain, rng)

    m_hat, dest_err, _ = destination_decode(
        code, y, setting.operating_gain, max_iters=max_iters, true_message=message
    )
    _, wire_err, wres = wiretapper_decode(
        code, z, setting.wiretap_gain, message,
        max_iters=max_iters, true_padding=parts.random_bits,
    )
    d_bits = int(np.sum(m_hat != message))
    w_hat = wres.hard[code.tri.column_perm[code.n_message : code.n_info]]
    w_bits = int(np.sum(w_hat != parts.random_bits))
    return trial, bool(dest_err), bool(wire_err), d_bits, w_bits


def worker_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def estimate(
    code: SecretCode,
    setting: ChannelSetting,
    trials: int,
    seed: int,
    max_iters: int = DEFAULT_MAX_ITERS,
    threshold_d: float | None = None,
    threshold_w: float | None = None,
) -> EvaluationRecord:
    """Estimate (eps_d, eps_w) over seeded trials and apply the bound.

    Thresholds default to 0.01 at large blocklength and 0.02 at desk
    scale; the record carries whichever was used.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    n = code.n_transmitted
    if threshold_d is None:
        threshold_d = 0.01 if n >= DESK_SCALE_BLOCKLENGTH else 0.02
    if threshold_w is None:
        threshold_w = 0.01 if n >= DESK_SCALE_BLOCKLENGTH else 0.02

    jobs = [(seed, t) for t in range(trials)]
    workers = min(worker_count(), trials)
    results = []
    if workers == 1:
        _init_worker(code, setting, max_iters)
        results = [_one_trial(j) for j in jobs]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(code, setting, max_iters),
        ) as pool:
            results = list(pool.map(_one_trial, jobs, chunksize=4))
    results.sort()

    dest_frames = [t for t, de, we, db, wb in results if de]
    wire_frames = [t for t, de, we, db, wb in results if we]
    dest_bits = sum(db for _, _, _, db, _ in results)
    wire_bits = sum(wb for _, _, _, _, wb in results)
    eps_d = len(dest_frames) / trials
    eps_w = len(wire_frames) / trials

    c_w = bpsk_capacity(setting.wiretap_gain)
    r_e, r_e_frac = equivocation_lower_bound(
        code.code_rate, code.secret_rate, c_w, eps_w, n
    )
    return EvaluationRecord(
        setting=setting,
        n=n,
        trials=trials,
        eps_d=eps_d,
        eps_d_halfwidth=_confidence_halfwidth(len(dest_frames), trials),
        eps_w=eps_w,
        eps_w_halfwidth=_confidence_halfwidth(len(wire_frames), trials),
        eps_d_bit=dest_bits / (trials * code.n_message) if code.n_message else 0.0,
        eps_w_bit=(
            wire_bits / (trials * (code.n_info - code.n_message))
            if code.n_info > code.n_message
            else 0.0
        ),
        secret_rate=code.secret_rate,
        code_rate=code.code_rate,
        wiretap_capacity=c_w,
        equivocation_rate=r_e,
        fractional_equivocation=r_e_frac,
        threshold_d=threshold_d,
        threshold_w=threshold_w,
        valid=(eps_d <= threshold_d and eps_w <= threshold_w),
        dest_error_trials=dest_frames,
        wire_error_trials=wire_frames,
    )


def sweep(
    code: SecretCode,
    settings: list[ChannelSetting],
    trials: int,
    seed: int,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> list[EvaluationRecord]:
    """Independent estimates across settings (one estimate per setting)."""
    return [
        estimate(code, s, trials, seed + i, max_iters=max_iters)
        for i, s in enumerate(settings)
    ]


RECORD_COLUMNS = [
    "max_snr_db",
    "alpha_sq_db",
    "operating_gain",
    "n",
    "trials",
    "eps_d",
    "eps_d_halfwidth",
    "eps_w",
    "eps_w_halfwidth",
    "eps_d_bit",
    "eps_w_bit",
    "secret_rate",
    "code_rate",
    "wiretap_capacity",
    "equivocation_rate",
    "fractional_equivocation",
    "threshold_d",
    "threshold_w",
    "valid",
    "boundary_fractional_equivocation",
]


def records_to_csv(records: list[EvaluationRecord]) -> str:
    lines = [",".join(RECORD_COLUMNS)]
    for r in records:
        boundary = region_boundary(r.secret_rate, r.setting)
        row = [
            repr(r.setting.max_snr_db),
            repr(r.setting.alpha_sq_db),
            repr(r.setting.operating_gain),
            str(r.n),
            str(r.trials),
            repr(r.eps_d),
            repr(r.eps_d_halfwidth),
            repr(r.eps_w),
            repr(r.eps_w_halfwidth),
            repr(r.eps_d_bit),
            repr(r.eps_w_bit),
            repr(r.secret_rate),
            repr(r.code_rate),
            repr(r.wiretap_capacity),
            repr(r.equivocation_rate),
            repr(r.fractional_equivocation),
            repr(r.threshold_d),
            repr(r.threshold_w),
            str(int(r.valid)),
            repr(boundary),
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
