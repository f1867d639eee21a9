"""Secret coding over the wiretap channel via message-punctured LDPC codes.

The mother code spans n_total bits; the message occupies n_message
positions that are punctured from transmission.  The destination decodes
with zero intrinsic LLR at punctured positions; the fictitious
(message-informed) eavesdropper receiver pins them to saturated LLRs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .alist import read_alist, write_alist
from .decoder import DEFAULT_MAX_ITERS, LLR_CAP, DecodeResult, SumProductDecoder
from .gf2 import DegenerateGraphError, TriangularizedCode, encode, triangularize
from .tanner import TannerGraph


@dataclass
class SecretCode:
    """Mother code plus the punctured message positions."""

    tri: TriangularizedCode
    n_message: int

    def __post_init__(self):
        if self.n_message < 0:
            raise ValueError("message length must be nonnegative")
        if self.n_message > self.tri.n_info:
            raise ValueError(
                f"message length {self.n_message} exceeds information "
                f"length {self.tri.n_info}"
            )

    @property
    def n_total(self) -> int:
        return self.tri.n_total

    @property
    def n_info(self) -> int:
        return self.tri.n_info

    @property
    def n_transmitted(self) -> int:
        return self.n_total - self.n_message

    @property
    def puncture_fraction(self) -> float:
        return self.n_message / self.n_total

    @property
    def secret_rate(self) -> float:
        return self.n_message / self.n_transmitted

    @property
    def code_rate(self) -> float:
        return self.n_info / self.n_transmitted

    @property
    def mother_rate(self) -> float:
        return self.n_info / self.n_total

    @property
    def message_vars(self) -> np.ndarray:
        """Graph variable indices of the punctured message positions."""
        return self.tri.column_perm[: self.n_message]

    @property
    def transmitted_vars(self) -> np.ndarray:
        return self.tri.column_perm[self.n_message :]

    @cached_property
    def _decoder(self) -> SumProductDecoder:
        return SumProductDecoder(self.tri.graph)

    def punctured_degree_profile(self) -> dict[int, int]:
        """Realized variable-degree histogram of the punctured positions."""
        degs = self.tri.graph.var_degrees()[self.message_vars]
        return {int(d): int(c) for d, c in zip(*np.unique(degs, return_counts=True))}


@dataclass
class SecretCodewordParts:
    """One encoded frame, split per the [message | padding | parity] layout."""

    message_bits: np.ndarray
    random_bits: np.ndarray
    parity_bits: np.ndarray

    @property
    def transmitted(self) -> np.ndarray:
        """The n transmitted bits; message bits are excluded by construction."""
        return np.concatenate([self.random_bits, self.parity_bits])

    @property
    def full_codeword(self) -> np.ndarray:
        return np.concatenate([self.message_bits, self.random_bits, self.parity_bits])


def k_for_secret_rate(n_total: int, secret_rate: float) -> int:
    """Message length giving the requested secret rate on an n_total-bit code."""
    p = secret_rate / (1.0 + secret_rate)
    return int(round(p * n_total))


def build_secret_code(
    graph: TannerGraph, n_message: int, seed, max_attempts: int = 20
) -> SecretCode:
    """Puncture a uniformly random subset of positions as the message.

    A subset occasionally leaves some parity-check combination supported
    only on message positions (no triangular form exists); such draws are
    rejected and a fresh subset is tried, deterministically from the seed.
    """
    rng = np.random.default_rng(seed)
    last_error: Exception | None = None
    for _ in range(max_attempts):
        positions = rng.choice(graph.n_var, size=n_message, replace=False)
        try:
            tri = triangularize(graph, positions)
        except DegenerateGraphError as exc:
            last_error = exc
            continue
        return SecretCode(tri=tri, n_message=n_message)
    raise DegenerateGraphError(
        f"no valid puncture pattern in {max_attempts} attempts: {last_error}"
    )


def secret_encode(code: SecretCode, message, rng) -> SecretCodewordParts:
    """Embed the message, pad with uniform random bits, extend to a codeword."""
    msg = np.asarray(message, dtype=np.uint8) & 1
    if msg.shape != (code.n_message,):
        raise ValueError(f"expected {code.n_message} message bits, got {msg.shape}")
    if not hasattr(rng, "integers"):
        rng = np.random.default_rng(rng)
    padding = rng.integers(0, 2, size=code.n_info - code.n_message).astype(np.uint8)
    cw = encode(code.tri, np.concatenate([msg, padding]))
    return SecretCodewordParts(
        message_bits=cw[: code.n_message],
        random_bits=cw[code.n_message : code.n_info],
        parity_bits=cw[code.n_info :],
    )


def bits_to_symbols(bits: np.ndarray) -> np.ndarray:
    """GF(2) to BPSK: bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def _intrinsic_from_channel(
    code: SecretCode, observations, gain: float, pinned_message=None
) -> np.ndarray:
    y = np.asarray(observations, dtype=np.float64)
    if y.shape != (code.n_transmitted,):
        raise ValueError(
            f"expected {code.n_transmitted} channel observations, got {y.shape}"
        )
    intrinsic = np.zeros(code.n_total, dtype=np.float64)
    intrinsic[code.transmitted_vars] = 2.0 * gain * y
    if pinned_message is not None:
        pins = np.asarray(pinned_message, dtype=np.uint8) & 1
        intrinsic[code.message_vars] = LLR_CAP * bits_to_symbols(pins)
    return intrinsic


def destination_decode(
    code: SecretCode,
    observations,
    gain: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    true_message=None,
) -> tuple[np.ndarray, bool | None, DecodeResult]:
    """Recover the message from destination observations.

    Punctured positions enter with zero intrinsic LLR.  Returns the message
    estimate, a frame-error flag when the true message is supplied, and the
    raw decode result.
    """
    intrinsic = _intrinsic_from_channel(code, observations, gain)
    res = code._decoder.decode(intrinsic, max_iters=max_iters)
    m_hat = res.hard[code.message_vars]
    frame_error = None
    if true_message is not None:
        truth = np.asarray(true_message, dtype=np.uint8) & 1
        frame_error = bool(np.any(m_hat != truth))
    return m_hat, frame_error, res


def wiretapper_decode(
    code: SecretCode,
    observations,
    gain: float,
    message,
    max_iters: int = DEFAULT_MAX_ITERS,
    true_padding=None,
) -> tuple[np.ndarray, bool | None, DecodeResult]:
    """Fictitious message-informed receiver at the eavesdropper.

    Message positions are pinned to saturated LLRs matching the true bits;
    the frame-error flag covers the unknown padding bits (when supplied),
    matching the Fano-style accounting used for the equivocation bound.
    """
    intrinsic = _intrinsic_from_channel(
        code, observations, gain, pinned_message=message
    )
    res = code._decoder.decode(intrinsic, max_iters=max_iters)
    cw_hat = res.hard[code.tri.column_perm]  # permuted order
    x_hat = cw_hat[code.n_message :]
    frame_error = None
    if true_padding is not None:
        truth = np.asarray(true_padding, dtype=np.uint8) & 1
        d_hat = cw_hat[code.n_message : code.n_info]
        frame_error = bool(np.any(d_hat != truth))
    return x_hat, frame_error, res


def equivocation_lower_bound(
    code_rate: float,
    secret_rate: float,
    wiretap_capacity: float,
    eps_w: float,
    n: int,
) -> tuple[float, float]:
    """Achievable equivocation from the Fano-style bound.

    R_e = max(0, R_c - C_w - (R_c - R_s) * eps_w - 1/n)
    and its fraction of the secret rate (capped at 1).
    """
    if secret_rate == 0:
        raise ValueError("fractional equivocation undefined at zero secret rate")
    if not 0.0 <= eps_w <= 1.0:
        raise ValueError("eps_w must lie in [0, 1]")
    if secret_rate > code_rate + 1e-12:
        raise ValueError("secret rate cannot exceed the code rate")
    r_e = code_rate - wiretap_capacity - (code_rate - secret_rate) * eps_w - 1.0 / n
    r_e = max(0.0, r_e)
    return r_e, min(1.0, r_e / secret_rate)


def save_secret_code(code: SecretCode, alist_path, sidecar_path, seed=None) -> None:
    write_alist(alist_path, code.tri.graph)
    sidecar = {
        "k": int(code.n_message),
        "column_permutation": [int(j) for j in code.tri.column_perm],
        "seed": seed,
    }
    with open(sidecar_path, "w") as f:
        json.dump(sidecar, f)


def load_secret_code(alist_path, sidecar_path) -> SecretCode:
    graph = read_alist(alist_path)
    with open(sidecar_path) as f:
        sidecar = json.load(f)
    k = int(sidecar["k"])
    perm = np.asarray(sidecar["column_permutation"], dtype=np.int64)
    # re-triangularize with the recorded message positions; the permutation
    # of the parity block may legitimately differ, the code does not
    tri = triangularize(graph, perm[:k])
    return SecretCode(tri=tri, n_message=k)
