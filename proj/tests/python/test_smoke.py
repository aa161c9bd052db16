import json
import math

import numpy as np
import pytest

import diraclab as dl


def small_profiles(a=0.1):
    return [
        dl.ProfileSpec(dl.ProfileKind.gaussian, dl.Component.u, -2.0, 1.0, a, 0.0),
        dl.ProfileSpec(dl.ProfileKind.gaussian, dl.Component.v, 2.0, 1.0, a, 0.5),
    ]


def test_presets_and_a2():
    th = dl.preset("thirring", 1.0, 1.0)
    n1, n2 = dl.eval_N(th, 2.0, 1.0)
    assert n1 == pytest.approx(2.0)
    assert n2 == pytest.approx(4.0)
    gn = dl.preset("gross_neveu", 1.0, 0.0)
    assert dl.eval_N(gn, 1.0, 1.0)[0] == pytest.approx(4.0)
    assert dl.sample_a2(gn, 1000).max_rel < 1e-12
    with pytest.raises(dl.ConfigurationError):
        dl.preset("sine_gordon", 1.0, 1.0)


def test_constants():
    k = dl.derive_constants(dl.preset("thirring", 1.0, 1.0), samples=20000)
    assert k.c == pytest.approx(2.0)
    assert k.delta == pytest.approx(1.0 / (4.0 * k.c_star))


def test_field_roundtrip_and_functionals():
    g = dl.Grid(-20.0, 20.0, 4096)
    f = dl.build_initial(g, [dl.ProfileSpec(dl.ProfileKind.gaussian, dl.Component.u)])
    assert f.u.shape == (4096,)
    assert f.u.dtype == np.complex128
    assert np.allclose(np.abs(f.u) ** 2, np.exp(-2 * g.centers() ** 2), atol=1e-12)
    pw = dl.pointwise_functionals(f)
    assert pw["L0"] == pytest.approx(math.sqrt(math.pi / 2), abs=1e-6)

    rng = np.random.default_rng(3)
    h = dl.Grid(-4.0, 4.0, 256)
    u = rng.normal(size=256) + 1j * rng.normal(size=256)
    v = rng.normal(size=256) + 1j * rng.normal(size=256)
    r = dl.SpinorField(h, u, v)
    assert np.array_equal(r.u, u)
    assert dl.bony_Q0(r) == pytest.approx(dl.brute_force_Q0(r), rel=1e-12)
    assert dl.pair_functionals(r, r)["L1"] == 0.0


def test_trajectory_conserves_charge():
    g = dl.Grid(-16.0, 16.0, 512)
    p = dl.preset("thirring", 1.0, 1.0)
    k = dl.derive_constants(p, samples=20000)
    init = dl.build_initial(g, small_profiles(), 2.0)
    records, final = dl.run_trajectory(init, p, k, 2.0, stride=8)
    assert records[0]["t"] == 0.0
    assert final.t == pytest.approx(2.0)
    for rec in records:
        assert rec["L0"] == pytest.approx(records[0]["L0"], rel=1e-12)


def test_step_is_reversible():
    g = dl.Grid(-12.0, 12.0, 192)
    p = dl.preset("gross_neveu", 1.0, 1.0)
    f = dl.build_initial(g, small_profiles(0.5))
    back = dl.step(dl.step(f, p), p, backward=True)
    assert np.max(np.abs(back.u - f.u)) < 1e-13
    assert np.max(np.abs(back.v - f.v)) < 1e-13


def test_oracle_refinement():
    p = dl.preset("thirring", 1.0, 0.0)
    rows = dl.refinement_study(p, small_profiles(1.0), -16.0, 16.0, 256, 2.0, levels=3)
    assert len(rows) == 3
    for row in rows[1:]:
        assert 1.9 <= row["observed_order"] <= 2.1


def test_dispatch(tmp_path):
    cfg = dl.parse_config("[model]\npreset = gross_neveu\nalpha = 1\nmass = 0\nsamples = 20000\n", "validate")
    assert cfg.experiment == "validate"
    code, summary = dl.dispatch(cfg, str(tmp_path))
    assert code == 0
    s = json.loads(summary)
    assert s["constants"]["c"] == pytest.approx(8.0)
    assert (tmp_path / "summary.json").read_text() == summary


def test_config_errors():
    with pytest.raises(dl.ConfigurationError):
        dl.parse_config("[model]\npreset = thirring\nmass = -1\n", "validate")
