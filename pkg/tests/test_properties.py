"""Randomized invariants over profiles, designs, and window durations."""

import dataclasses
import tempfile
from pathlib import Path

from hypothesis import given, settings, strategies as st

from repchain import (
    Config,
    NetworkDesign,
    attempt_rate,
    builtin_profile,
    end_to_end_report,
    link_success_prob,
    load_profile,
    no_buffer_cutoff_time,
    nv_cutoff_time,
    nv_link_success_prob,
    routed_cutoff_time,
    routed_rate,
    segment_success_prob,
    serialize_profile,
    timings,
    transfer_efficiency,
)

ERAS = ("near", "long")

eta = st.floats(0.0, 1.0)
fid = st.floats(0.25, 1.0)
lengths = st.floats(1.0, 150.0)
links = st.integers(1, 8)
routers = st.integers(1, 10)
eras = st.sampled_from(ERAS)
configs = st.sampled_from((Config.A, Config.B))


@st.composite
def profiles(draw):
    base = builtin_profile(draw(eras))
    return dataclasses.replace(
        base,
        eta_bsm=draw(eta), eta_det=draw(eta), eta_afc=draw(eta),
        eta_shift=draw(eta), eta_epps=draw(eta), eta_buff=draw(eta),
        eta_qfc_637=draw(eta), eta_pol=draw(eta), eta_map=draw(eta),
        eta_c13=draw(eta), eta_qfc_1588=draw(eta),
        gamma_f=draw(st.integers(1, 500)), gamma_t=draw(st.integers(1, 200)),
    )


@settings(max_examples=200, deadline=None)
@given(profile=profiles(), ell=lengths, n=links, config=configs,
       include_buffer=st.booleans())
def test_success_probabilities_stay_in_range(profile, ell, n, config, include_buffer):
    design = NetworkDesign(config, ell, n, 1, xi=8)
    assert 0.0 <= link_success_prob(profile, ell) <= 1.0
    assert 0.0 <= nv_link_success_prob(profile, ell) <= 1.0
    assert 0.0 <= transfer_efficiency(profile, config, n) <= 1.0
    assert 0.0 <= segment_success_prob(profile, design, include_buffer=include_buffer) <= 1.0


@settings(max_examples=200, deadline=None)
@given(era=eras, ell_pair=st.tuples(lengths, lengths),
       gamma_pair=st.tuples(st.integers(1, 500), st.integers(1, 500)))
def test_link_success_monotonicity(era, ell_pair, gamma_pair):
    profile = builtin_profile(era)
    lo_ell, hi_ell = sorted(ell_pair)
    assert link_success_prob(profile, hi_ell) <= link_success_prob(profile, lo_ell)
    lo_g, hi_g = sorted(gamma_pair)
    few = dataclasses.replace(profile, gamma_f=lo_g)
    many = dataclasses.replace(profile, gamma_f=hi_g)
    assert link_success_prob(many, 20.0) >= link_success_prob(few, 20.0)


@settings(max_examples=200, deadline=None)
@given(era=eras, ell=st.floats(1.0, 100.0), n=links, big_n=routers,
       epsilon=st.floats(1e-6, 0.9))
def test_cutoff_windows_stay_bounded(era, ell, n, big_n, epsilon):
    profile = builtin_profile(era)
    design = NetworkDesign(Config.A, ell, n, big_n, epsilon=epsilon)
    t = timings(design, profile)
    for cutoff, floor in (
        (routed_cutoff_time, t.t_trans),
        (no_buffer_cutoff_time, t.t_trans),
        (nv_cutoff_time, t.t_trans_tilde),
    ):
        tau, clamped = cutoff(profile, design)
        assert floor <= tau <= profile.t_nv
        assert isinstance(clamped, bool)


@settings(max_examples=200, deadline=None)
@given(era=eras, ell=st.floats(1.0, 100.0), n=st.integers(1, 4),
       big_n=st.integers(1, 9))
def test_routed_rate_bounded_and_monotone_in_routers(era, ell, n, big_n):
    profile = builtin_profile(era)
    report = routed_rate(profile, NetworkDesign(Config.A, ell, n, big_n))
    longer = routed_rate(profile, NetworkDesign(Config.A, ell, n, big_n + 1))
    assert 0.0 <= report.rate_hz <= attempt_rate(profile)
    assert longer.rate_hz <= report.rate_hz


@settings(max_examples=200, deadline=None)
@given(era=eras, config=configs, ell=lengths, n=links, big_n=routers,
       tau_pair=st.tuples(st.floats(0.0, 2.0), st.floats(0.0, 2.0)))
def test_end_to_end_werner_monotone_and_in_range(era, config, ell, n, big_n, tau_pair):
    profile = builtin_profile(era)
    design = NetworkDesign(config, ell, n, big_n, xi=8)
    lo_tau, hi_tau = sorted(tau_pair)
    report = end_to_end_report(profile, design, lo_tau)
    for w in (report.w_link, report.w_segment, report.w_transfer,
              report.w_router_pair, report.w_router_pair_stored,
              report.w_end_to_end):
        assert 0.0 <= w <= 1.0
    assert report.w_segment <= report.w_link
    assert report.w_router_pair <= report.w_segment
    assert report.w_router_pair_stored <= report.w_router_pair
    assert report.w_end_to_end <= report.w_router_pair_stored
    assert 0.25 <= report.fidelity <= 1.0
    assert 0.0 <= report.qber <= 0.5

    assert end_to_end_report(profile, design, hi_tau).w_end_to_end \
        <= report.w_end_to_end
    more_links = NetworkDesign(config, ell, n + 1, big_n, xi=9)
    assert end_to_end_report(profile, more_links, lo_tau).w_end_to_end \
        <= report.w_end_to_end
    more_routers = NetworkDesign(config, ell, n, big_n + 1, xi=8)
    assert end_to_end_report(profile, more_routers, lo_tau).w_end_to_end \
        <= report.w_end_to_end


@settings(max_examples=200, deadline=None)
@given(profile=profiles())
def test_profile_serialization_round_trips(profile):
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "profile.txt"
        path.write_text(serialize_profile(profile), encoding="utf-8")
        loaded = load_profile(path)
    assert loaded == profile
