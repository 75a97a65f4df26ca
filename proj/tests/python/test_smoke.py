"""Smoke tests for the python bindings: shapes, determinism, closed forms."""

import math

import numpy as np
import pytest

import satground as sg


def test_schedule_basics():
    sched = sg.make_schedule(1000, 1e-4, 0.02)
    assert sched.num_train_steps == 1000
    assert sched.betas[0] == pytest.approx(1e-4)
    assert sched.betas[-1] == pytest.approx(0.02)
    bars = np.asarray(sched.alpha_bars)
    assert np.all(np.diff(bars) < 0)
    assert sched.alpha_bar(-1) == 1.0
    assert sched.alpha_bar(0) == pytest.approx(1.0 - 1e-4)
    with pytest.raises(RuntimeError):
        sched.alpha_bar(1000)


def test_make_schedule_rejects_bad_args():
    with pytest.raises(ValueError):
        sg.make_schedule(0, 1e-4, 0.02)
    with pytest.raises(ValueError):
        sg.make_schedule(10, 0.5, 0.1)


def test_inference_timesteps_cover_endpoints():
    ts = sg.inference_timesteps(1000, 20)
    assert len(ts) == 20
    assert ts[0] == 999
    assert ts[-1] == 0
    assert all(a > b for a, b in zip(ts, ts[1:]))


def test_add_noise_then_invert():
    sched = sg.make_schedule(1000, 1e-4, 0.02)
    rng = np.random.default_rng(11)
    z0 = rng.normal(size=(1, 4, 8, 8))
    eps = rng.normal(size=(1, 4, 8, 8))
    z_t = sg.add_noise(z0, 640, eps, sched)
    back = sg.ddim_step(z_t, eps, 640, -1, sched)
    assert np.max(np.abs(back - z0)) < 1e-9


def test_cfg_combine_identities():
    u = np.full((1, 1, 2, 2), 0.25)
    c = np.full((1, 1, 2, 2), 0.75)
    assert np.array_equal(sg.cfg_combine(u, c, 1.0), c)
    assert np.array_equal(sg.cfg_combine(u, c, 0.0), u)
    got = sg.cfg_combine(u, c, 7.5)
    assert got == pytest.approx(0.25 + 7.5 * 0.5)


def test_sample_guided_deterministic_and_telescoping():
    sched = sg.make_schedule(1000, 1e-4, 0.02)
    zero = lambda z, t, is_null: np.zeros_like(z)
    a = sg.sample_guided(zero, sched, views=2, channels=3, height=8, width=8, seed=9)
    b = sg.sample_guided(zero, sched, views=2, channels=3, height=8, width=8, seed=9)
    assert a.shape == (2, 3, 8, 8)
    assert np.array_equal(a, b)
    c = sg.sample_guided(zero, sched, views=2, channels=3, height=8, width=8, seed=10)
    assert not np.array_equal(a, c)
    # with a zero predictor the loop just rescales the initial noise
    assert np.std(a) == pytest.approx(1.0 / math.sqrt(sched.alpha_bar(999)), rel=0.2)


def test_sample_temporal_shape_and_input_contract():
    sched = sg.make_schedule(1000, 1e-4, 0.02)
    init = np.random.default_rng(3).normal(size=(1, 4, 8, 8))
    seen = []

    def pred(z, t, is_null):
        seen.append(z.shape)
        return 0.1 * z[:, 4:, :, :]

    out = sg.sample_temporal(pred, init, sched, num_views=3, num_steps=5, seed=1)
    assert out.shape == (3, 4, 8, 8)
    assert seen == [(3, 8, 8, 8)] * 5


def test_psnr_closed_forms():
    rng = np.random.default_rng(5)
    ref = (rng.uniform(size=(32, 32, 3)) * 0.5).astype(np.float32)
    assert math.isinf(sg.psnr(ref, ref))
    cand = ref + np.float32(16.0 / 255.0)
    assert sg.psnr(ref, cand) == pytest.approx(20.0 * math.log10(255.0 / 16.0), abs=0.01)
    with pytest.raises(RuntimeError):
        sg.psnr(ref, ref[:16, :16])


def test_ssim_self_is_one():
    img = np.random.default_rng(6).uniform(size=(24, 20, 3)).astype(np.float32)
    assert sg.ssim(img, img) == pytest.approx(1.0, abs=1e-9)


def test_resample_perspective_shapes_and_constancy():
    pano = np.full((64, 128, 3), 0.25, dtype=np.float32)
    view = sg.resample_perspective(pano, theta=60.0, phi=15.0, width=48, height=40)
    assert view.shape == (40, 48, 3)
    assert np.allclose(view, 0.25)
    with pytest.raises(RuntimeError):
        sg.resample_perspective(np.zeros((64, 100, 3), dtype=np.float32))  # not 2:1


def test_angle_round_trip():
    u, v = 321.75, 100.25
    theta, phi = sg.pano_to_angles(u, v, 1024, 512)
    u2, v2 = sg.angles_to_pano(theta, phi, 1024, 512)
    assert u2 == pytest.approx(u, abs=1e-9)
    assert v2 == pytest.approx(v, abs=1e-9)


def test_rasterize_quad():
    # unit quad 5 m in front of an identity camera
    verts = np.array(
        [[-2, -2, 5], [2, -2, 5], [2, 2, 5], [-2, 2, 5]], dtype=np.float64
    )
    faces = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
    color, depth = sg.rasterize(
        verts, faces, np.eye(3), np.zeros(3), fov=75.0, width=64, height=64
    )
    assert color.shape == (64, 64, 3)
    assert depth.shape == (64, 64)
    assert depth[32, 32] == pytest.approx(5.0, abs=1e-5)
    assert not math.isfinite(depth[0, 0])  # corner rays miss the quad
    assert color[32, 32, 0] == pytest.approx(0.5)  # untextured surfaces render mid-gray


def test_tile_extent_and_split():
    tiles = sg.tile_extent(0, 0, 1800, 1800, 600)
    assert len(tiles) == 9
    assert tiles[0][:2] == (0, 0)
    assert tiles[0][2] == (0, 0, 600, 600)
    labels = sg.split_assignments(90, train=70, test=20, seed=7)
    assert labels.count("train") == 70
    assert labels.count("test") == 20
    assert sg.split_assignments(90, train=70, test=20, seed=7) == labels
