"""Hardware parameter profiles for the repeater-chain capacity engine.

A profile bundles every scalar the rate and fidelity models consume: device
efficiencies, storage and gate times, source rates, multiplexed mode counts,
fiber attenuation, and per-stage fidelities. Three built-in eras are shipped
(near, long, ideal); user profiles are plain-text files that override fields
on top of a named base era.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "Era",
    "ParameterProfile",
    "ParameterValidationError",
    "ProfileParseError",
    "builtin_profile",
    "load_profile",
    "serialize_profile",
    "validate_profile",
]

DEFAULT_DECOHERENCE_RATE_PER_S = 1.0 / 3.0


class ProfileParseError(ValueError):
    """Raised when a profile file does not follow the key = value schema."""


class ParameterValidationError(ValueError):
    """Raised when a parameter value is outside its allowed range."""


class Era(enum.Enum):
    NEAR_TERM = "near"
    LONG_TERM = "long"
    IDEAL = "ideal"


@dataclass(frozen=True)
class ParameterProfile:
    """Immutable set of device parameters for one hardware era.

    Efficiencies (eta_*) are dimensionless in [0, 1], fidelities (f_*) in
    [0.25, 1] so the derived Werner weight is nonnegative, times (t_*) in
    seconds, r_epps in hertz, gamma_* are nonnegative integer mode counts,
    alpha_db_per_km in dB/km.
    """

    eta_nv: float            # spin-photon emission efficiency (stored, unused by the rate model)
    t_nv: float              # router internal memory storage time, s
    t_c13: float             # electron to carbon-13 swap time, s
    eta_c13: float           # electron to carbon-13 swap efficiency
    t_cnot: float            # router CNOT time, s
    eta_qfc_1588: float      # router-to-telecom frequency conversion efficiency
    gamma_t: int             # temporal mode count
    eta_epps: float          # entangled-pair source efficiency
    eta_afc: float           # multimode memory efficiency
    t_afc: float             # multimode memory storage time, s
    r_epps: float            # source repetition rate, Hz
    gamma_f: int             # spectral mode count
    eta_shift: float         # mode-mapping shift and filter efficiency
    eta_bsm: float           # linear-optic Bell measurement efficiency
    eta_det: float           # single-photon detector efficiency
    alpha_db_per_km: float   # fiber attenuation, dB/km
    eta_buff: float          # buffer memory efficiency
    t_buff_opt: float        # buffer optical coherence time, s
    t_buff_spin: float       # buffer spin storage time, s
    eta_map: float           # photon-to-electron mapping efficiency
    eta_pol: float           # time-bin to polarization conversion efficiency
    eta_qfc_637: float       # buffer-to-router wavelength conversion efficiency
    f_epps: float
    f_afc: float
    f_bsm: float
    f_ffsmm: float
    f_buff: float
    f_qfc: float
    f_tb_pol: float
    f_map: float
    f_c13: float
    f_cnot: float
    f_rout: float
    decoherence_rate_per_s: float = DEFAULT_DECOHERENCE_RATE_PER_S


_EFFICIENCY_FIELDS = (
    "eta_nv", "eta_c13", "eta_qfc_1588", "eta_epps", "eta_afc", "eta_shift",
    "eta_bsm", "eta_det", "eta_buff", "eta_map", "eta_pol", "eta_qfc_637",
)
_FIDELITY_FIELDS = (
    "f_epps", "f_afc", "f_bsm", "f_ffsmm", "f_buff", "f_qfc", "f_tb_pol",
    "f_map", "f_c13", "f_cnot", "f_rout",
)
_TIME_FIELDS = ("t_nv", "t_c13", "t_cnot", "t_afc", "t_buff_opt", "t_buff_spin")
_COUNT_FIELDS = ("gamma_t", "gamma_f")

_FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ParameterProfile))

# Long-term fidelities double as the ideal column, which has no published values.
_FID_NEAR = dict(
    f_epps=0.933, f_afc=0.968, f_bsm=0.972, f_ffsmm=0.970, f_buff=0.996,
    f_qfc=0.998, f_tb_pol=0.974, f_map=0.944, f_c13=0.997, f_cnot=0.972,
    f_rout=0.945,
)
_FID_LONG = dict(
    f_epps=0.99, f_afc=0.99, f_bsm=0.99, f_ffsmm=0.99, f_buff=0.999,
    f_qfc=0.999, f_tb_pol=0.99, f_map=0.99, f_c13=0.999, f_cnot=0.99,
    f_rout=0.99,
)

_NEAR = ParameterProfile(
    eta_nv=0.05,  t_nv=1.0,   t_c13=500e-6, eta_c13=0.90,  t_cnot=500e-6,
    eta_qfc_1588=0.43, gamma_t=27,   eta_epps=0.10, eta_afc=0.40, t_afc=100e-6,
    r_epps=1e8,   gamma_f=30,  eta_shift=0.70, eta_bsm=0.50, eta_det=0.95,
    alpha_db_per_km=0.2, eta_buff=0.30, t_buff_opt=30e-9, t_buff_spin=1e-3,
    eta_map=0.06, eta_pol=0.90, eta_qfc_637=0.43,
    **_FID_NEAR,
)
_LONG = ParameterProfile(
    eta_nv=0.40,  t_nv=10.0,  t_c13=100e-6, eta_c13=0.99,  t_cnot=100e-6,
    eta_qfc_1588=0.70, gamma_t=100,  eta_epps=0.10, eta_afc=0.75, t_afc=300e-6,
    r_epps=1e9,   gamma_f=300, eta_shift=0.95, eta_bsm=0.50, eta_det=0.99,
    alpha_db_per_km=0.146, eta_buff=0.90, t_buff_opt=100e-9, t_buff_spin=100e-3,
    eta_map=0.50, eta_pol=0.99, eta_qfc_637=0.70,
    **_FID_LONG,
)
_IDEAL = ParameterProfile(
    eta_nv=1.00,  t_nv=20.0,  t_c13=10e-6,  eta_c13=0.999, t_cnot=10e-6,
    eta_qfc_1588=0.99, gamma_t=1000, eta_epps=0.10, eta_afc=0.99, t_afc=500e-6,
    r_epps=2e9,   gamma_f=3000, eta_shift=0.99, eta_bsm=0.75, eta_det=0.999,
    alpha_db_per_km=0.146, eta_buff=0.99, t_buff_opt=500e-6, t_buff_spin=500e-3,
    eta_map=0.99, eta_pol=0.99, eta_qfc_637=0.99,
    **_FID_LONG,
)

_BUILTIN = {Era.NEAR_TERM: _NEAR, Era.LONG_TERM: _LONG, Era.IDEAL: _IDEAL}


def builtin_profile(era: Era | str) -> ParameterProfile:
    """Return the built-in profile for an era ("near", "long", or "ideal")."""
    if isinstance(era, str):
        try:
            era = Era(era)
        except ValueError:
            raise ParameterValidationError(
                f"unknown era {era!r}; expected one of "
                + ", ".join(e.value for e in Era)
            ) from None
    return _BUILTIN[era]


def validate_profile(profile: ParameterProfile) -> ParameterProfile:
    """Check every field range; raise ParameterValidationError naming the field."""
    for name in _EFFICIENCY_FIELDS:
        value = getattr(profile, name)
        if not 0.0 <= value <= 1.0:
            raise ParameterValidationError(f"{name} = {value!r} outside [0, 1]")
    for name in _FIDELITY_FIELDS:
        value = getattr(profile, name)
        if not 0.25 <= value <= 1.0:
            raise ParameterValidationError(f"{name} = {value!r} outside [0.25, 1]")
    for name in _TIME_FIELDS:
        value = getattr(profile, name)
        if not value > 0.0:
            raise ParameterValidationError(f"{name} = {value!r} must be > 0")
    if not profile.r_epps > 0.0:
        raise ParameterValidationError(f"r_epps = {profile.r_epps!r} must be > 0")
    for name in _COUNT_FIELDS:
        value = getattr(profile, name)
        if not isinstance(value, int) or value < 0:
            raise ParameterValidationError(
                f"{name} = {value!r} must be a nonnegative integer"
            )
    if profile.alpha_db_per_km < 0.0:
        raise ParameterValidationError(
            f"alpha_db_per_km = {profile.alpha_db_per_km!r} must be >= 0"
        )
    if profile.decoherence_rate_per_s < 0.0:
        raise ParameterValidationError(
            f"decoherence_rate_per_s = {profile.decoherence_rate_per_s!r} must be >= 0"
        )
    return profile


def _parse_value(key: str, text: str, lineno: int):
    if key in _COUNT_FIELDS:
        try:
            as_float = float(text)
        except ValueError:
            raise ProfileParseError(
                f"line {lineno}: value for {key} is not a number: {text!r}"
            ) from None
        if as_float != int(as_float):
            raise ParameterValidationError(
                f"{key} = {text} must be a nonnegative integer"
            )
        return int(as_float)
    try:
        return float(text)
    except ValueError:
        raise ProfileParseError(
            f"line {lineno}: value for {key} is not a number: {text!r}"
        ) from None


def load_profile(path: str | Path) -> ParameterProfile:
    """Load a profile file: `key = value` lines over a mandatory base era.

    Missing keys inherit from the base era profile; unknown keys are rejected;
    the resulting profile is validated before being returned.
    """
    text = Path(path).read_text(encoding="utf-8")
    base: Era | None = None
    overrides: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProfileParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ProfileParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key == "base":
            if base is not None:
                raise ProfileParseError(f"line {lineno}: duplicate 'base' line")
            try:
                base = Era(value)
            except ValueError:
                raise ProfileParseError(
                    f"line {lineno}: base must be near, long, or ideal, got {value!r}"
                ) from None
            continue
        if key not in _FIELD_NAMES:
            raise ProfileParseError(f"line {lineno}: unknown key {key!r}")
        if key in overrides:
            raise ProfileParseError(f"line {lineno}: duplicate key {key!r}")
        overrides[key] = _parse_value(key, value, lineno)
    if base is None:
        raise ProfileParseError("missing mandatory 'base = near|long|ideal' line")
    profile = dataclasses.replace(builtin_profile(base), **overrides)
    return validate_profile(profile)


def serialize_profile(profile: ParameterProfile) -> str:
    """Render a profile as file text; load_profile inverts it exactly."""
    lines = ["base = near"]
    for name in _FIELD_NAMES:
        lines.append(f"{name} = {getattr(profile, name)!r}")
    return "\n".join(lines) + "\n"
