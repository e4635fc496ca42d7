"""Seeded Monte Carlo simulator providing statistical oracles for the closed forms.

Determinism contract: trials are processed in fixed-size chunks and chunk i of
a run draws from Generator(Philox(SeedSequence([master_seed, mode_salt, i]))).
Chunk tallies are integers and their sum is associative, so the estimate is
bit-identical for any worker count and any execution order. Within a chunk the
draw order is fixed and documented on each simulate function.

Attempt counts are floored to integers here (attempts are physical events);
the closed forms keep real exponents. Comparisons between the two must use
the floored closed form.

Window modes sample each station's within-window success one of two ways,
chosen deterministically from the per-window draw budget: attempt-by-attempt
Bernoulli draws when stations * attempts <= 512, otherwise inversion of the
time-to-first-success geometric law. The two are identical in distribution.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .network import NetworkDesign, timings
from .params import ParameterProfile
from .rates import (
    attempt_rate,
    fiber_transmittance,
    link_success_prob,
    nv_attempt_rate,
    nv_link_success_prob,
    segment_success_prob,
    transfer_efficiency,
)

__all__ = [
    "McConfig",
    "McEstimate",
    "McMode",
    "floored_attempts",
    "floored_window_rate",
    "simulate_link",
    "simulate_no_buffer",
    "simulate_nv_chain",
    "simulate_routed",
    "simulate_segment",
]

CHUNK_TRIALS = 4096
PER_ATTEMPT_DRAW_LIMIT = 512

MAX_SEED = 2**64 - 1


class McMode(enum.Enum):
    MICRO_LINK = "micro-link"
    MICRO_SEGMENT = "micro-segment"
    WINDOW_ROUTED = "window-routed"
    WINDOW_NV = "window-nv"
    WINDOW_NO_BUFFER = "window-nobuffer"


# Frozen per-mode stream salts; changing one re-keys every estimate of that mode.
_MODE_SALTS = {
    McMode.MICRO_LINK: 1,
    McMode.MICRO_SEGMENT: 2,
    McMode.WINDOW_ROUTED: 3,
    McMode.WINDOW_NV: 4,
    McMode.WINDOW_NO_BUFFER: 5,
}


@dataclass(frozen=True)
class McConfig:
    master_seed: int
    trials: int
    mode: McMode
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ValueError(f"master_seed = {self.master_seed!r} outside [0, 2^64)")
        if self.trials < 1:
            raise ValueError(f"trials = {self.trials!r} must be >= 1")
        if self.workers < 1:
            raise ValueError(f"workers = {self.workers!r} must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    mean: float        # probability for micro modes, rate in Hz for window modes
    std_error: float
    trials: int
    seed: int


def _clip01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def _chunk_rng(master_seed: int, salt: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence([master_seed, salt, index])
    return np.random.Generator(np.random.Philox(seq))


def _run_chunks(cfg: McConfig, chunk_fn: Callable[[np.random.Generator, int], int]) -> int:
    salt = _MODE_SALTS[cfg.mode]
    n_chunks = (cfg.trials + CHUNK_TRIALS - 1) // CHUNK_TRIALS

    def run_chunk(index: int) -> int:
        count = min(CHUNK_TRIALS, cfg.trials - index * CHUNK_TRIALS)
        return chunk_fn(_chunk_rng(cfg.master_seed, salt, index), count)

    if cfg.workers == 1:
        return sum(run_chunk(i) for i in range(n_chunks))
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return sum(pool.map(run_chunk, range(n_chunks)))


def _estimate(successes: int, cfg: McConfig, scale: float) -> McEstimate:
    p_hat = successes / cfg.trials
    std = math.sqrt(p_hat * (1.0 - p_hat) / cfg.trials)
    return McEstimate(
        mean=p_hat * scale,
        std_error=std * scale,
        trials=cfg.trials,
        seed=cfg.master_seed,
    )


def _require_mode(cfg: McConfig, mode: McMode) -> None:
    if cfg.mode is not mode:
        raise ValueError(f"config mode is {cfg.mode.value!r}, expected {mode.value!r}")


def floored_attempts(omega: float, usable_window_s: float) -> int:
    """Whole attempts that fit in the usable part of a window."""
    return max(0, math.floor(omega * usable_window_s))


def floored_window_rate(p_attempt: float, k: int, stations: int, tau_s: float) -> float:
    """Closed-form window rate evaluated with an integer attempt count.

    This is the comparison target for the window simulators: same success law,
    same discretization, so discrepancies are pure sampling error.
    """
    if k <= 0 or p_attempt <= 0.0:
        return 0.0
    if p_attempt >= 1.0:
        return 1.0 / tau_s
    p_station = -math.expm1(k * math.log1p(-p_attempt))
    return p_station ** stations / tau_s


def simulate_link(profile: ParameterProfile, ell_km: float, cfg: McConfig) -> McEstimate:
    """Estimate the per-attempt link success probability at the mode level.

    Draw order per chunk: spectral-mode binomial, then the two retrieval
    uniforms.
    """
    _require_mode(cfg, McMode.MICRO_LINK)
    p_mode = _clip01(
        fiber_transmittance(profile, ell_km) * profile.eta_bsm * profile.eta_det ** 2
    )
    retrieval = profile.eta_afc * profile.eta_shift
    gamma_f = profile.gamma_f

    def chunk(rng: np.random.Generator, count: int) -> int:
        heralded = rng.binomial(gamma_f, p_mode, size=count) >= 1
        kept = rng.random(count) < retrieval
        kept &= rng.random(count) < retrieval
        return int(np.count_nonzero(heralded & kept))

    return _estimate(_run_chunks(cfg, chunk), cfg, scale=1.0)


def simulate_segment(profile: ParameterProfile, design: NetworkDesign, cfg: McConfig) -> McEstimate:
    """Estimate the per-attempt segment success probability.

    Draw order per chunk: for each link a spectral-mode binomial and two
    retrieval uniforms, then the n-1 swap uniforms, then the two transfer
    uniforms.
    """
    _require_mode(cfg, McMode.MICRO_SEGMENT)
    p_mode = _clip01(
        fiber_transmittance(profile, design.ell_km) * profile.eta_bsm * profile.eta_det ** 2
    )
    retrieval = profile.eta_afc * profile.eta_shift
    transfer = transfer_efficiency(profile, design.config, design.n)
    gamma_f = profile.gamma_f
    n = design.n
    eta_bsm = profile.eta_bsm

    def chunk(rng: np.random.Generator, count: int) -> int:
        ok = np.ones(count, dtype=bool)
        for _link in range(n):
            heralded = rng.binomial(gamma_f, p_mode, size=count) >= 1
            kept = rng.random(count) < retrieval
            kept &= rng.random(count) < retrieval
            ok &= heralded & kept
        for _swap in range(n - 1):
            ok &= rng.random(count) < eta_bsm
        ok &= rng.random(count) < transfer
        ok &= rng.random(count) < transfer
        return int(np.count_nonzero(ok))

    return _estimate(_run_chunks(cfg, chunk), cfg, scale=1.0)


def _station_success_chunk(
    rng: np.random.Generator,
    count: int,
    stations: int,
    k: int,
    p_attempt: float,
    micro_draw: Callable[[np.random.Generator, tuple[int, ...]], np.ndarray] | None,
) -> int:
    """Windows in this chunk where every station succeeds within k attempts.

    Per-attempt path draw order: one (count, stations, k) block (uniforms, or
    the mode-level draw for spin-photon links). Geometric path: one
    (count, stations) uniform block.
    """
    if k <= 0 or p_attempt <= 0.0:
        return 0
    if p_attempt >= 1.0:
        return count
    if stations * k <= PER_ATTEMPT_DRAW_LIMIT:
        if micro_draw is not None:
            hits = micro_draw(rng, (count, stations, k))
        else:
            hits = rng.random((count, stations, k)) < p_attempt
        station_ok = hits.any(axis=2)
    else:
        u = rng.random((count, stations))
        with np.errstate(divide="ignore"):
            first_success = np.floor(np.log(u) / math.log1p(-p_attempt)) + 1.0
        station_ok = first_success <= k
    return int(np.count_nonzero(station_ok.all(axis=1)))


def simulate_routed(
    profile: ParameterProfile,
    design: NetworkDesign,
    tau_s: float,
    cfg: McConfig,
) -> McEstimate:
    """Estimate the buffered routed-chain rate over fixed windows of tau_s."""
    _require_mode(cfg, McMode.WINDOW_ROUTED)
    t = timings(design, profile)
    k = floored_attempts(attempt_rate(profile), tau_s - t.t_trans)
    p_seg = segment_success_prob(profile, design)
    big_n = design.big_n

    def chunk(rng: np.random.Generator, count: int) -> int:
        return _station_success_chunk(rng, count, big_n, k, p_seg, None)

    return _estimate(_run_chunks(cfg, chunk), cfg, scale=1.0 / tau_s)


def simulate_nv_chain(
    profile: ParameterProfile,
    design: NetworkDesign,
    tau_s: float,
    cfg: McConfig,
) -> McEstimate:
    """Estimate the spin-photon chain rate over fixed windows of tau_s.

    Attempts are sampled at the temporal-mode level: each attempt draws a
    binomial over gamma_t modes and succeeds when any mode heralds.
    """
    _require_mode(cfg, McMode.WINDOW_NV)
    t = timings(design, profile)
    k = floored_attempts(nv_attempt_rate(design.ell_km), tau_s / 2.0 - t.t_trans_tilde)
    p_mode = _clip01(
        profile.eta_qfc_1588 ** 2
        * fiber_transmittance(profile, design.ell_km)
        * profile.eta_bsm
    )
    p_link = nv_link_success_prob(profile, design.ell_km)
    gamma_t = profile.gamma_t
    n = design.n

    def micro_draw(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        return rng.binomial(gamma_t, p_mode, size=shape) >= 1

    def chunk(rng: np.random.Generator, count: int) -> int:
        return _station_success_chunk(rng, count, n, k, p_link, micro_draw)

    return _estimate(_run_chunks(cfg, chunk), cfg, scale=1.0 / tau_s)


def simulate_no_buffer(
    profile: ParameterProfile,
    design: NetworkDesign,
    tau_s: float,
    cfg: McConfig,
) -> McEstimate:
    """Estimate the buffer-free routed-chain rate over windows of tau_s.

    Per-attempt segment success is sampled from the buffer-free pipeline law,
    and only half of each window is usable for attempts.
    """
    _require_mode(cfg, McMode.WINDOW_NO_BUFFER)
    t = timings(design, profile)
    k = floored_attempts(attempt_rate(profile), tau_s / 2.0 - t.t_trans)
    p_seg = segment_success_prob(profile, design, include_buffer=False)
    big_n = design.big_n

    def chunk(rng: np.random.Generator, count: int) -> int:
        return _station_success_chunk(rng, count, big_n, k, p_seg, None)

    return _estimate(_run_chunks(cfg, chunk), cfg, scale=1.0 / tau_s)
