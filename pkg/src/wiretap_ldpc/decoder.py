"""Flooding-schedule sum-product decoding in the LLR domain.

Check-node updates run in sign-magnitude form with log-domain correction
terms, so saturated (pinned) messages at the +/-50 LLR cap stay exact and
zero-LLR (punctured) inputs are handled without special cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .tanner import TannerGraph

LLR_CAP = 50.0
DEFAULT_MAX_ITERS = 200


@dataclass
class DecodeResult:
    hard: np.ndarray  # uint8 bit decisions per variable node
    converged: bool
    iterations: int
    posterior: np.ndarray  # posterior LLRs per variable node


@njit(cache=True, inline="always")
def _log_tanh_half(x):
    # log tanh(x/2) for x > 0, stable at both ends
    if x > 37.0:
        return -2.0 * math.exp(-x)
    u = math.expm1(-x)  # tanh(x/2) = -u / (2 + u)
    return math.log(-u / (2.0 + u))


@njit(cache=True, inline="always")
def _atanh_exp_doubled(s, cap):
    # 2 * atanh(exp(s)) for s <= 0, clipped to cap
    if s >= 0.0:
        return cap
    if s < -37.0:
        return 2.0 * math.exp(s)
    u = math.expm1(s)  # 2 atanh(e^s) = log((1+e^s)/(1-e^s))
    v = math.log((2.0 + u) / (-u))
    return v if v < cap else cap


@njit(cache=True)
def _n_unsat(chk_ptr, cv, posterior):
    bad = 0
    for c in range(chk_ptr.size - 1):
        par = 0
        for e in range(chk_ptr[c], chk_ptr[c + 1]):
            if posterior[cv[e]] < 0.0:
                par ^= 1
        bad += par
    return bad


@njit(cache=True)
def _bp_run(chk_ptr, cv, intrinsic, max_iters, cap, early_stop):
    n_edges = cv.size
    n_var = intrinsic.size
    q = np.empty(n_edges, dtype=np.float64)
    r = np.empty(n_edges, dtype=np.float64)
    posterior = intrinsic.copy()

    if early_stop and _n_unsat(chk_ptr, cv, posterior) == 0:
        return posterior, True, 0

    for e in range(n_edges):
        x = intrinsic[cv[e]]
        if x > cap:
            x = cap
        elif x < -cap:
            x = -cap
        q[e] = x

    iters = 0
    converged = False
    for _ in range(max_iters):
        iters += 1
        # check-node update: q -> r (r doubles as the log-tanh scratch)
        for c in range(chk_ptr.size - 1):
            lo, hi = chk_ptr[c], chk_ptr[c + 1]
            total = 0.0
            neg = 0
            for e in range(lo, hi):
                x = q[e]
                if x < 0.0:
                    neg += 1
                    x = -x
                if x < 1e-30:
                    x = 1e-30
                lt = _log_tanh_half(x)
                r[e] = lt
                total += lt
            for e in range(lo, hi):
                mag = _atanh_exp_doubled(total - r[e], cap)
                odd = neg - (1 if q[e] < 0.0 else 0)
                r[e] = -mag if (odd & 1) else mag

        # variable-node update: r -> q, full posterior
        for v in range(n_var):
            posterior[v] = intrinsic[v]
        for e in range(n_edges):
            posterior[cv[e]] += r[e]
        for e in range(n_edges):
            x = posterior[cv[e]] - r[e]
            if x > cap:
                x = cap
            elif x < -cap:
                x = -cap
            q[e] = x

        converged = _n_unsat(chk_ptr, cv, posterior) == 0
        if converged and early_stop:
            break

    return posterior, converged, iters


class SumProductDecoder:
    """Reusable decoder for one Tanner graph; decode calls are independent."""

    def __init__(self, graph: TannerGraph):
        self.graph = graph
        degs = graph.chk_degrees()
        self.chk_ptr = np.concatenate([[0], np.cumsum(degs)]).astype(np.int64)
        self.cv = np.concatenate(graph.chk_adj).astype(np.int64)

    def decode(
        self,
        intrinsic_llrs,
        max_iters: int = DEFAULT_MAX_ITERS,
        early_stop: bool = True,
    ) -> DecodeResult:
        llrs = np.ascontiguousarray(intrinsic_llrs, dtype=np.float64)
        if llrs.shape != (self.graph.n_var,):
            raise ValueError(
                f"expected {self.graph.n_var} intrinsic LLRs, got {llrs.shape}"
            )
        llrs = np.nan_to_num(llrs, posinf=LLR_CAP, neginf=-LLR_CAP)
        posterior, converged, iters = _bp_run(
            self.chk_ptr, self.cv, llrs, max_iters, LLR_CAP, early_stop
        )
        hard = (posterior < 0.0).astype(np.uint8)
        return DecodeResult(
            hard=hard, converged=bool(converged), iterations=int(iters),
            posterior=posterior,
        )


def bp_decode(
    graph: TannerGraph,
    intrinsic_llrs,
    max_iters: int = DEFAULT_MAX_ITERS,
    early_stop: bool = True,
) -> DecodeResult:
    """One-off decode of a graph; builds the decoder structure each call."""
    return SumProductDecoder(graph).decode(intrinsic_llrs, max_iters, early_stop)
