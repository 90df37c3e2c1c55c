import json

import numpy as np
import pytest

import czlab


def segment(n=200, a=(-1.0, 0.0), b=(1.0, 0.0)):
    spec = {"kind": "segment", "a": list(a), "b": list(b), "n": n}
    return czlab.measure_from_spec(json.dumps(spec))


def truncated_kernel_field(atoms, weights, targets, delta):
    """Dense numpy evaluation of the planar 1-Riesz field, the oracle."""
    diff = targets[:, None, :] - atoms[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    denom = np.maximum(r, delta) ** 2
    vals = np.where(r[..., None] > 0, diff / np.maximum(denom, 1e-300)[..., None], 0.0)
    return np.einsum("tjc,j->tc", vals, weights)


def test_measure_roundtrip(tmp_path):
    mu = segment(150)
    assert len(mu) == 150
    assert mu.dim == 2
    assert mu.total_mass == pytest.approx(2.0, rel=1e-12)
    atoms = mu.atoms()
    w = mu.weights()
    assert atoms.shape == (150, 2)
    assert w.shape == (150,)
    assert w.sum() == pytest.approx(mu.total_mass, rel=1e-12)

    path = str(tmp_path / "seg.txt")
    czlab.save_measure(mu, path)
    back = czlab.load_measure(path)
    assert np.array_equal(back.atoms(), atoms)
    assert np.array_equal(back.weights(), w)
    assert back.tag == mu.tag


def test_measure_from_arrays():
    atoms = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    w = np.array([0.5, 0.25, 0.25])
    mu = czlab.Measure(2, atoms, w, 0.1, 1.0, "triple")
    assert len(mu) == 3
    assert czlab.ball_mass(mu, np.zeros(2), 0.5) == pytest.approx(0.5)
    assert czlab.ball_mass(mu, np.zeros(2), 2.0) == pytest.approx(1.0)


def test_apply_matches_numpy_oracle():
    mu = segment(80)
    K = czlab.riesz_kernel(2, 1.0)
    assert K.ncomp == 2
    rng = np.random.default_rng(5)
    targets = rng.uniform(-2, 2, size=(7, 2))
    got = czlab.apply(K, mu, 0.3, None, targets, method="dense")
    want = truncated_kernel_field(mu.atoms(), mu.weights(), targets, 0.3)
    assert got.shape == (7, 2)
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)


def test_operator_norm_matches_svd():
    mu = segment(40)
    K = czlab.riesz_kernel(2, 1.0)
    delta = 0.2
    r = czlab.operator_norm(K, mu, delta, tol=1e-11)
    assert r["converged"]

    atoms, w = mu.atoms(), mu.weights()
    n = len(mu)
    diff = atoms[:, None, :] - atoms[None, :, :]
    rad = np.linalg.norm(diff, axis=2)
    denom = np.maximum(rad, delta) ** 2
    kv = np.where(rad[..., None] > 0, diff / denom[..., None], 0.0)
    sw = np.sqrt(w)
    B = (kv * sw[:, None, None] * sw[None, :, None]).transpose(0, 2, 1).reshape(2 * n, n)
    sigma = np.linalg.svd(B, compute_uv=False)[0]
    assert r["value"] == pytest.approx(sigma, rel=1e-7)


def test_ttilde_shape_and_finiteness():
    mu = segment(120, a=(-3.0, 0.0), b=(3.0, 0.0))
    K = czlab.riesz_kernel(2, 1.0)
    deltas = np.array([0.2, 0.8])
    targets = mu.atoms()[::10]
    out = czlab.ttilde_one(K, mu, deltas, targets)
    assert out.shape == (2, len(targets), 2)
    assert np.isfinite(out).all()


def test_defect_reports_family():
    mu = segment(400, a=(-4.0, 0.0), b=(4.0, 0.0))
    K = czlab.riesz_kernel(2, 1.0)
    d = czlab.defect(K, mu, np.zeros(2), 1.5)
    assert d["members"] > 0
    assert d["member_rel"].shape == (d["members"],)
    assert 0.0 <= d["max_rel"] < 1.0
    assert d["argmax"] < d["members"]


def test_growth_constant_scale_invariance():
    mu = segment(500)
    radii = [0.05, 0.2, 0.8]
    lam = czlab.growth_constant(mu, 1.0, radii)
    assert lam > 0
    big = czlab.rescale(mu, 2.0, 1.0)
    lam2 = czlab.growth_constant(big, 1.0, [2 * r for r in radii])
    assert lam2 == pytest.approx(lam, rel=1e-9)


def test_run_report_norm():
    rep = czlab.run_report({
        "operation": "norm",
        "seed": 3,
        "measure": {"kind": "segment", "a": [-1.0, 0.0], "b": [1.0, 0.0], "n": 80},
        "kernel": {"kind": "riesz", "d": 2, "s": 1.0},
        "params": {"delta": 0.1},
    })
    assert rep["format"] == "czlab-report-v1"
    assert all(c["status"] == "pass" for c in rep["checks"])
    assert rep["tables"]["norm"]["rows"][0][0] > 0

    with pytest.raises(ValueError):
        czlab.run_config("{\"operation\": \"nope\"}")


def test_quick_suite_passes():
    rep = json.loads(czlab.quick_suite(20260818))
    assert rep["format"] == "czlab-report-v1"
    bad = [c for c in rep["checks"] if c["status"] != "pass"]
    assert bad == []
