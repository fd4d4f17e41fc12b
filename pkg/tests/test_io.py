import json

import numpy as np
import pytest

from sisfit import FiberField, FiberizedSignal, GridConfig, MeasurementSet, SisModel, build_filter
from sisfit import io as sio
from sisfit.extra import assemble_optimal
from sisfit.paley_wiener import optimize_tile

from conftest import crandn, random_kernel, random_measurements


def test_dumps_is_deterministic_and_exact():
    obj = {"b": [0.1, 1 / 3, 1e-300], "a": 2, "c": [1 + 2j], "d": True}
    text = sio.dumps(obj)
    assert text == sio.dumps(obj)
    back = json.loads(text)
    assert back["b"] == [0.1, 1 / 3, 1e-300]
    assert back["c"] == [[1, 2]]
    assert list(back) == ["b", "a", "c", "d"]
    with pytest.raises(ValueError):
        sio.dumps({"x": float("nan")})


def test_atomic_write_leaves_no_temp(tmp_path):
    sio.atomic_write(tmp_path / "a.txt", "hello")
    sio.atomic_write(tmp_path / "a.txt", "world")
    assert (tmp_path / "a.txt").read_text() == "world"
    assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]


def test_kernel_round_trip(tmp_path, cfg, rng):
    g = random_kernel(cfg, rng)
    sio.write_json(tmp_path / "k.json", sio.kernel_to_dict(g))
    g2 = sio.load_kernel(tmp_path / "k.json")
    assert g2.config == g.config
    assert np.array_equal(g2.fibers, g.fibers)


def test_bundled_kernel_loads():
    g = sio.load_kernel(sio.example_kernel_path())
    assert g.bound_M > 0
    assert g.config.n0 == 2


def test_measurement_csv_round_trip(tmp_path, cfg, rng):
    Y = random_measurements(cfg, 3, rng)
    seq = Y.sequences.copy()
    seq[1, :] = 0
    seq[2, 2] = 0
    Y = MeasurementSet(cfg, seq)
    sio.write_measurements(tmp_path / "y.csv", Y)
    Y2 = sio.read_measurements(tmp_path / "y.csv", cfg)
    assert np.array_equal(Y2.sequences, Y.sequences)
    assert (tmp_path / "y.csv").read_text().splitlines()[0] == "j,k,re,im"


@pytest.mark.parametrize(
    "body, message",
    [
        ("j,k,re\n1,0,1\n", ":1: header"),
        ("j,k,re,im\n1,0,1,0\n1,x,1,0\n", ":3: cannot parse"),
        ("j,k,re,im\n1,99,1,0\n", ":2: k=99"),
        ("j,k,re,im\n0,0,1,0\n", ":2: j must be"),
        ("j,k,re,im\n1,0,1,0\n1,0,2,0\n", ":3: duplicate"),
        ("j,k,re,im\n1,0,1\n", ":2: expected 4"),
        ("j,k,re,im\n", "no measurements"),
    ],
)
def test_measurement_csv_diagnostics(tmp_path, cfg, body, message):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(sio.InputError, match=message):
        sio.read_measurements(p, cfg)


def test_model_round_trip(tmp_path, rng):
    cfg = GridConfig(n0=3, G=4, L=1, K=2, lam=0.5)
    filt = build_filter(random_kernel(cfg, rng))
    res = assemble_optimal(random_measurements(cfg, 2, rng), filt, 2)
    sio.write_json(tmp_path / "m.json", sio.model_to_dict(res.W))
    m2 = sio.model_from_dict(sio.read_json(tmp_path / "m.json", "sisfit-model"))
    assert m2.orthonormality_error() <= 1e-10
    assert np.array_equal(m2.dims(), res.W.dims())
    for a, b in zip(res.W.bases, m2.bases):
        if a.shape[0]:
            # same span: projector difference
            w = m2.weights
            Pa = a.T @ (np.conj(a) * w)
            Pb = b.T @ (np.conj(b) * w)
            assert np.allclose(Pa, Pb, atol=1e-10)


def test_model_loader_rejects_bad_entries(cfg):
    doc = sio.model_to_dict(SisModel.empty(cfg))
    doc["per_point"] = [{"t": cfg.T, "basis": []}]
    with pytest.raises(sio.InputError, match="outside"):
        sio.model_from_dict(doc)
    doc["per_point"] = [{"t": 0, "band": 1, "basis": [[[1, 0]] * cfg.dim]}]
    with pytest.raises(sio.InputError, match="band"):
        sio.model_from_dict(doc)


def test_tile_round_trip(rng):
    cfg = GridConfig(n0=2, G=8, L=2, K=4)
    g = random_kernel(cfg, rng)
    res = optimize_tile(random_measurements(cfg, 1, rng), g, 1.0, 2, 2)
    doc = json.loads(sio.dumps(sio.tile_to_dict(res, 2)))
    tile = sio.tile_from_dict(doc)
    assert tile.cells() == res.tile.cells()


def test_read_json_checks(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(sio.InputError, match=":1:"):
        sio.read_json(p)
    p.write_text(json.dumps({"format": "sisfit-kernel", "version": 99}))
    with pytest.raises(sio.InputError, match="version"):
        sio.read_json(p, "sisfit-kernel")
    with pytest.raises(sio.InputError, match="format"):
        sio.read_json(p, "sisfit-model")


def test_signal_and_field_round_trip(cfg, rng):
    f = FiberizedSignal(cfg, crandn(rng, cfg.T, cfg.width))
    assert np.array_equal(sio.signal_from_dict(json.loads(sio.dumps(sio.signal_to_dict(f)))).fibers, f.fibers)
    fld = FiberField(cfg, crandn(rng, cfg.T, cfg.dim))
    assert np.array_equal(sio.field_from_dict(json.loads(sio.dumps(sio.field_to_dict(fld)))).points, fld.points)
