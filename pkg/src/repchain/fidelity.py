"""End-to-end fidelity of the distributed pairs, via Werner-state algebra.

Every imperfect stage acts as a depolarizing channel, so a chain of stages
multiplies Werner weights. The scalar pipeline here computes those products
in closed form; compose_oracle replays the same stages on an explicit 4x4
density matrix and must agree to 1e-12, giving an independent check of the
bookkeeping (stage multiplicities, storage decay, router swaps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import Config, NetworkDesign
from .params import DEFAULT_DECOHERENCE_RATE_PER_S, ParameterProfile

__all__ = [
    "InternalCheckError",
    "WernerReport",
    "compose_oracle",
    "decohere",
    "end_to_end_report",
    "fidelity_to_werner",
    "link_werner",
    "profile_stage_fidelities",
    "qber",
    "router_pair_werner",
    "segment_werner",
    "transfer_werner",
    "werner_to_fidelity",
]

_TRACE_TOL = 1e-10

# Bell state (|00> + |11>) / sqrt(2) in basis order 00, 01, 10, 11.
_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
_RHO_BELL = np.outer(_PHI_PLUS, _PHI_PLUS)
_EYE4 = np.eye(4)


class InternalCheckError(RuntimeError):
    """Raised when an internal consistency invariant fails; indicates a bug."""


@dataclass(frozen=True)
class WernerReport:
    w_link: float                 # one elementary pair
    w_segment: float              # n links swapped into one segment pair
    w_transfer: float             # state transfer into a router memory
    w_router_pair: float          # router-router pair before storage
    w_router_pair_stored: float   # after storing for tau_s
    w_end_to_end: float           # after all router swaps and readout
    fidelity: float
    qber: float
    tau_s: float


def fidelity_to_werner(f: float) -> float:
    """Werner weight of a state with Bell fidelity f, for f in [0.25, 1]."""
    if not 0.25 <= f <= 1.0:
        raise ValueError(f"fidelity {f!r} outside [0.25, 1]")
    return (4.0 * f - 1.0) / 3.0


def werner_to_fidelity(w: float) -> float:
    """Bell fidelity of a Werner state with weight w, for w in [0, 1]."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"Werner weight {w!r} outside [0, 1]")
    return (3.0 * w + 1.0) / 4.0


def qber(f: float) -> float:
    """Bit-error probability of measurements on a Werner pair of fidelity f."""
    if not 0.25 <= f <= 1.0:
        raise ValueError(f"fidelity {f!r} outside [0.25, 1]")
    return 2.0 / 3.0 * (1.0 - f)


def decohere(
    w: float,
    tau_s: float,
    rate_per_s: float = DEFAULT_DECOHERENCE_RATE_PER_S,
) -> float:
    """Werner weight after storing one qubit of the pair for tau_s seconds."""
    if tau_s < 0:
        raise ValueError(f"tau_s = {tau_s!r} must be >= 0")
    return w * math.exp(-rate_per_s * tau_s)


def link_werner(profile: ParameterProfile) -> float:
    """Werner weight of one elementary pair: midpoint swap of two stored halves."""
    w_src = (
        fidelity_to_werner(profile.f_epps)
        * fidelity_to_werner(profile.f_afc)
        * fidelity_to_werner(profile.f_ffsmm)
    )
    return fidelity_to_werner(profile.f_bsm) * w_src ** 2


def segment_werner(profile: ParameterProfile, n: int) -> float:
    """Werner weight after swapping n links into one segment pair."""
    if n < 1:
        raise ValueError(f"n = {n!r} must be >= 1")
    return fidelity_to_werner(profile.f_bsm) ** (n - 1) * link_werner(profile) ** n


def transfer_werner(profile: ParameterProfile, config: Config, n: int) -> float:
    """Werner weight of the transfer into a router memory (one segment end)."""
    if n < 1:
        raise ValueError(f"n = {n!r} must be >= 1")
    w = (
        fidelity_to_werner(profile.f_buff)
        * fidelity_to_werner(profile.f_qfc)
        * fidelity_to_werner(profile.f_tb_pol)
        * fidelity_to_werner(profile.f_map)
    )
    if config is Config.A:
        w *= fidelity_to_werner(profile.f_afc) ** (n - 1)
    return w


def _storage_factor(w_c13: float, tau_s: float, rate_per_s: float) -> float:
    # Storage is a discrete event: a pair held for exactly zero time never
    # enters the memory, so the swap-fidelity penalty does not apply either.
    if tau_s == 0.0:
        return 1.0
    return (w_c13 * math.exp(-rate_per_s * tau_s)) ** 2


def router_pair_werner(
    profile: ParameterProfile,
    config: Config,
    n: int,
    tau_s: float,
) -> float:
    """Werner weight of a router-router pair after storage for tau_s."""
    if tau_s < 0:
        raise ValueError(f"tau_s = {tau_s!r} must be >= 0")
    w = segment_werner(profile, n) * transfer_werner(profile, config, n) ** 2
    return w * _storage_factor(
        fidelity_to_werner(profile.f_c13), tau_s, profile.decoherence_rate_per_s
    )


def end_to_end_report(
    profile: ParameterProfile,
    design: NetworkDesign,
    tau_s: float,
) -> WernerReport:
    """Full pipeline report for a routed chain of big_n segments."""
    if tau_s < 0:
        raise ValueError(f"tau_s = {tau_s!r} must be >= 0")
    w_link = link_werner(profile)
    w_segment = segment_werner(profile, design.n)
    w_transfer = transfer_werner(profile, design.config, design.n)
    w_pair = w_segment * w_transfer ** 2
    storage = _storage_factor(
        fidelity_to_werner(profile.f_c13), tau_s, profile.decoherence_rate_per_s
    )
    w_pair_stored = w_pair * storage
    router_factor = (
        storage
        * fidelity_to_werner(profile.f_cnot)
        * fidelity_to_werner(profile.f_rout)
    )
    w_end = w_pair_stored ** design.big_n * router_factor ** (design.big_n - 1)
    f_end = werner_to_fidelity(w_end)
    return WernerReport(
        w_link=w_link,
        w_segment=w_segment,
        w_transfer=w_transfer,
        w_router_pair=w_pair,
        w_router_pair_stored=w_pair_stored,
        w_end_to_end=w_end,
        fidelity=f_end,
        qber=qber(f_end),
        tau_s=tau_s,
    )


# Order of the stage-fidelity sequence consumed by compose_oracle.
STAGE_ORDER = (
    "f_epps", "f_afc", "f_bsm", "f_ffsmm", "f_buff", "f_qfc",
    "f_tb_pol", "f_map", "f_c13", "f_cnot", "f_rout",
)


def profile_stage_fidelities(profile: ParameterProfile) -> tuple[float, ...]:
    """Stage fidelities of a profile in the STAGE_ORDER sequence."""
    return tuple(getattr(profile, name) for name in STAGE_ORDER)


def _check_state(rho: np.ndarray) -> None:
    if abs(np.trace(rho).real - 1.0) > _TRACE_TOL:
        raise InternalCheckError(f"density matrix trace drifted: {np.trace(rho)!r}")
    if np.abs(rho - rho.conj().T).max() > _TRACE_TOL:
        raise InternalCheckError("density matrix lost Hermiticity")


def _depolarize(rho: np.ndarray, alpha: float) -> np.ndarray:
    rho = alpha * rho + (1.0 - alpha) / 4.0 * _EYE4
    _check_state(rho)
    return rho


def compose_oracle(
    stage_fidelities: Sequence[float],
    tau_s: float,
    n: int,
    big_n: int,
    config: Config,
    decoherence_rate_per_s: float = DEFAULT_DECOHERENCE_RATE_PER_S,
) -> float:
    """Replay the whole pipeline as explicit depolarizing channels on a 4x4 state.

    stage_fidelities follows STAGE_ORDER: (epps, afc, bsm, ffsmm, buff, qfc,
    tb_pol, map, c13, cnot, rout). Returns the Bell fidelity of the final
    state; must match the scalar pipeline to 1e-12.
    """
    if len(stage_fidelities) != len(STAGE_ORDER):
        raise ValueError(
            f"expected {len(STAGE_ORDER)} stage fidelities, got {len(stage_fidelities)}"
        )
    if n < 1 or big_n < 1:
        raise ValueError("n and big_n must be >= 1")
    if tau_s < 0:
        raise ValueError(f"tau_s = {tau_s!r} must be >= 0")
    w = {
        name: fidelity_to_werner(f)
        for name, f in zip(STAGE_ORDER, stage_fidelities)
    }
    decay = math.exp(-decoherence_rate_per_s * tau_s)

    rho = _RHO_BELL.copy()
    _check_state(rho)
    for _segment in range(big_n):
        for _link in range(n):
            for alpha in (w["f_epps"], w["f_epps"], w["f_afc"], w["f_afc"],
                          w["f_ffsmm"], w["f_ffsmm"], w["f_bsm"]):
                rho = _depolarize(rho, alpha)
        for _swap in range(n - 1):
            rho = _depolarize(rho, w["f_bsm"])
        for alpha in (w["f_buff"], w["f_qfc"], w["f_tb_pol"], w["f_map"]):
            rho = _depolarize(rho, alpha)
            rho = _depolarize(rho, alpha)
        if config is Config.A:
            for _extra in range(2 * (n - 1)):
                rho = _depolarize(rho, w["f_afc"])
        if tau_s > 0.0:
            for _held_side in range(2):
                rho = _depolarize(rho, w["f_c13"])
                rho = _depolarize(rho, decay)
    for _router in range(big_n - 1):
        if tau_s > 0.0:
            for _held_side in range(2):
                rho = _depolarize(rho, w["f_c13"])
                rho = _depolarize(rho, decay)
        rho = _depolarize(rho, w["f_cnot"])
        rho = _depolarize(rho, w["f_rout"])
    return float(_PHI_PLUS @ rho @ _PHI_PLUS)
