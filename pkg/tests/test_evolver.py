import math

import numpy as np
import pytest

from kzquench import closedform as cf
from kzquench import evolver as ev
from kzquench import lattice as lat
from kzquench import protocol as proto


def test_sudden_limit_state_frozen():
    # tau_Q -> 0+: the state cannot follow; excitation against the new ground
    # state equals the frozen-amplitude overlap
    q = 0.9
    sch = proto.one_way(10.0, 0.2, 1e-7)
    state = ev.evolve_mode(sch, q, ev.SolverOptions(1e-10, 1e-12))
    eq0 = lat.equilibrium_amplitudes(lat.ising_bdg(lat.IsingParams(10.0), q))
    assert abs(state.u - eq0.u) < 1e-5 and abs(state.v - eq0.v) < 1e-5
    p = ev.excitation_probability(state, lat.ising_bdg(lat.IsingParams(0.2), q))
    eqf = lat.equilibrium_amplitudes(lat.ising_bdg(lat.IsingParams(0.2), q))
    p_frozen = abs(eq0.u * eqf.v - eq0.v * eqf.u) ** 2
    assert abs(p - p_frozen) < 1e-5


def test_adiabatic_limit_gapped_mode():
    sch = proto.round_trip(0.0, 500.0, 1.0, g_i=3.0, g_f=3.0)
    res = ev.evolve_modes(sch, [math.pi / 2], ev.SolverOptions(1e-9, 1e-11))
    assert res["p"][0] < 1e-6


def test_one_way_matches_landau_zener(fast_opts):
    # p_q ~ exp(-2 pi tau q^2) within 2% for small q with q sqrt(tau) <= 1
    tau = 20.0
    sch = proto.one_way(10.0, 0.0, tau)
    q = np.array([0.02, 0.05, 0.08, 0.1])
    res = ev.evolve_modes(sch, q, fast_opts)
    ref = cf.pq0(q, tau)
    assert np.max(np.abs(res["p"] / ref - 1.0)) < 0.02


def test_norm_conservation_along_trajectory(tight_opts):
    sch = proto.round_trip(0.0, 12.0, 1.0)
    sp = ev.evolve_spectrum(sch, 128, tight_opts)
    assert sp.norm_drift <= 10.0 * tight_opts.rel_tol
    assert np.max(np.abs(np.abs(sp.u) ** 2 + np.abs(sp.v) ** 2 - 1.0)) <= 10.0 * tight_opts.rel_tol


def test_determinism_bitwise(fast_opts):
    sch = proto.round_trip(0.0, 9.0, 1.3)
    a = ev.evolve_modes(sch, lat.mode_grid(64).q, fast_opts)
    b = ev.evolve_modes(sch, lat.mode_grid(64).q, fast_opts)
    assert np.array_equal(a["u"], b["u"]) and np.array_equal(a["v"], b["v"])


def test_batch_independence_of_composition(fast_opts):
    # evolving a mode alone or inside a batch gives the same result to tolerance
    sch = proto.round_trip(0.0, 9.0, 1.0)
    q = lat.mode_grid(32).q
    batch = ev.evolve_modes(sch, q, fast_opts)
    single = ev.evolve_modes(sch, [q[5]], fast_opts)
    assert abs(batch["p"][5] - single["p"][0]) < 1e-6


def test_frames_agree(tight_opts):
    sch = proto.round_trip(0.0, 11.0, 1.0)
    q = np.array([0.05, 0.2, 0.7])
    lab = ev.evolve_modes(sch, q, ev.SolverOptions(1e-10, 1e-12, frame="lab"))
    adi = ev.evolve_modes(sch, q, ev.SolverOptions(1e-10, 1e-12, frame="adiabatic"))
    assert np.max(np.abs(lab["p"] - adi["p"])) < 1e-8


def test_excitation_probability_limits():
    coeffs = lat.ising_bdg(lat.IsingParams(2.0), 0.8)
    eq = lat.equilibrium_amplitudes(coeffs)
    ground = ev.ModeState(u=complex(eq.u), v=complex(eq.v), t=0.0)
    excited = ev.ModeState(u=complex(-eq.v), v=complex(eq.u), t=0.0)
    assert ev.excitation_probability(ground, coeffs) < 1e-30
    assert abs(ev.excitation_probability(excited, coeffs) - 1.0) < 1e-14
    with pytest.raises(lat.DegenerateModeError):
        ev.excitation_probability(ground, lat.ising_bdg(lat.IsingParams(1.0), 0.0))


def test_interference_revival_smallest_mode(fast_opts):
    # after the first ramp the q = pi/N mode saturates; after the full round
    # trip it returns almost to the ground state
    tau = 12.87
    q = math.pi / 1000.0
    half = proto.one_way(10.0, 0.0, tau)
    full = proto.round_trip(0.0, tau, 1.0)
    p_half = ev.evolve_modes(half, [q], fast_opts)["p"][0]
    p_full = ev.evolve_modes(full, [q], fast_opts)["p"][0]
    assert p_half > 0.99
    assert p_full < 0.01


def test_interference_peak_not_at_origin(fast_opts):
    # p_q^f peaks near q* ~ sqrt(ln2/(2 pi tau)), not at q -> 0
    tau = 12.87
    sp = ev.evolve_spectrum(proto.round_trip(0.0, tau, 1.0), 1000, fast_opts)
    qpk = sp.q[int(np.argmax(sp.p))]
    assert abs(qpk - cf.qstar(tau, 1.0)) < 0.03


def test_defect_density_trivial_cases():
    sch = proto.one_way(10.0, 0.0, 5.0)
    spec = ev.SpectrumResult(schedule=sch, q=np.array([0.1, 0.2]),
                             p=np.zeros(2), u=None, v=None, u_rot=None, v_rot=None)
    assert ev.defect_density(spec) == 0.0
    spec1 = ev.SpectrumResult(schedule=sch, q=np.array([0.1, 0.2]),
                              p=np.ones(2), u=None, v=None, u_rot=None, v_rot=None)
    assert ev.defect_density(spec1) == 1.0


def test_one_way_density_baseline(fast_opts):
    tau = 50.0
    sch = proto.one_way(10.0, 0.0, tau)
    n = ev.defect_density(ev.evolve_spectrum_quadrature(sch, fast_opts))
    assert abs(n - 1.0 / (2.0 * math.pi * math.sqrt(2.0 * tau))) < 0.03 / (2.0 * math.pi * math.sqrt(2.0 * tau))


def test_short_wave_modes_contribute_negligibly(fast_opts):
    # Short-wave modes never cross the gap, so their only excitation is the
    # O(sin^2 q / (64 tau^2)) boundary response to the ramp's endpoint kinks
    # (measured here at the g = 0 end where omega = 2).  Their contribution to
    # n is bounded by that envelope and is a vanishing fraction of the core.
    tau = 10.0
    sch = proto.one_way(10.0, 0.0, tau)
    sp = ev.evolve_spectrum_quadrature(sch, fast_opts)
    m = sp.q > math.pi / 2.0
    envelope = np.sin(sp.q[m]) ** 2 / (64.0 * tau * tau)
    assert np.all(sp.p[m] <= 3.0 * envelope + 1e-12)
    tail = float(np.sum(sp.weights[m] * sp.p[m]) / math.pi)
    assert tail < 1e-4
    assert tail < 0.002 * ev.defect_density(sp)


def test_time_reversal_sanity(fast_opts):
    # a gapped mode driven out and back adiabatically returns to the ground
    # state; the residual is the turning-point kink response ~ sin^2 q/(16 tau^2)
    q = 1.2
    p200 = ev.evolve_modes(proto.round_trip(0.0, 200.0, 1.0, g_i=4.0, g_f=4.0),
                           [q], fast_opts)["p"][0]
    p400 = ev.evolve_modes(proto.round_trip(0.0, 400.0, 1.0, g_i=4.0, g_f=4.0),
                           [q], fast_opts)["p"][0]
    assert p200 < 1e-5
    assert p400 < 0.5 * p200  # -> 0 as tau grows


def test_spectrum_rejects_bad_modes(fast_opts):
    sch = proto.one_way(10.0, 0.0, 5.0)
    with pytest.raises(ValueError):
        ev.evolve_modes(sch, [0.0], fast_opts)
    with pytest.raises(ValueError):
        ev.evolve_modes(sch, [math.pi], fast_opts)


def test_solver_options_validation():
    with pytest.raises(ValueError):
        ev.SolverOptions(rel_tol=1e-2)
    with pytest.raises(ValueError):
        ev.SolverOptions(frame="bogus")


def test_evolved_bounds_sample(fast_opts):
    # evolved p within the long-wave interference bounds at R=1 (1e-3 slack)
    tau = 10.0
    sp = ev.evolve_spectrum(proto.round_trip(0.0, tau, 1.0), 200, fast_opts)
    t = cf.interference_terms_roundtrip(sp.q, tau, 1.0)
    assert np.all(sp.p >= (t.A - t.B) ** 2 - 1e-3)
    assert np.all(sp.p <= (t.A + t.B) ** 2 + 1e-3)


def test_closed_form_pqf_matches_evolved(fast_opts):
    # |p_closed - p_evolved| < 0.01 for q <= 3/sqrt(tau) at tau = 32, R = 1
    tau = 32.0
    sch = proto.round_trip(0.0, tau, 1.0)
    q = np.linspace(0.01, 3.0 / math.sqrt(tau), 40)
    res = ev.evolve_modes(sch, q, fast_opts)
    p_cf = cf.pqf(cf.interference_terms_roundtrip(q, tau, 1.0, psi_mode="exact"))
    assert np.max(np.abs(res["p"] - p_cf)) < 0.01
