import math

import numpy as np
import pytest

import rfh

CONFIG = {
    "model": {"kind": "abstract", "truncation": [2], "complex_structure": False},
    "potential": {"kind": "sphere", "symmetry": "z2"},
    "window": [-2.5, 2.5],
    "flavor": "z2",
    "seed": 4,
}


def test_model_spectrum():
    m = rfh.build_model("abstract", [3])
    assert m.labels == [-3, -2, -1, 1, 2, 3]
    assert m.eigenvalues == [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]
    assert m.real_dim == 6
    assert m.negative_dim == 3


def test_sphere_action_matches_closed_form():
    m = rfh.build_model("abstract", [2])
    pot = rfh.potential({"kind": "sphere"}, m)
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = rng.normal(size=m.real_dim)
        lam = rng.normal()
        fu = 0.5 * (u @ u - 1.0)
        expected = 0.5 * np.dot(m.eigenvalues, u * u) - lam * fu
        assert math.isclose(pot.value(m, u), fu, rel_tol=1e-12, abs_tol=1e-14)
        assert math.isclose(rfh.action(m, pot, u, lam), expected, rel_tol=1e-12, abs_tol=1e-12)
        assert np.allclose(pot.gradient(m, u), u)


def test_sphere_critical_points_are_unit_eigenvectors():
    m = rfh.build_model("abstract", [2])
    pot = rfh.potential({"kind": "sphere", "symmetry": "z2"}, m)
    recs = rfh.find_critical_points(m, pot, -2.5, 2.5, n_starts=100, seed=1)
    assert len(recs) == 8
    for r in recs:
        a = np.array(r["point"]["coeffs"])
        assert math.isclose(np.linalg.norm(a), 1.0, rel_tol=1e-9)
        i = int(np.argmax(np.abs(a)))
        assert math.isclose(r["point"]["multiplier"], m.eigenvalues[i], rel_tol=1e-9)


def test_compute_complex_z2_sphere():
    out = rfh.compute_complex(CONFIG)
    assert out["gates"]["ok"]
    ranks = out["homology"]["ranks"]
    assert all(v == 1 for v in ranks.values())


def test_bad_config_raises_validation_error():
    bad = dict(CONFIG, window=[2.5, -2.5])
    with pytest.raises(rfh.RfhError) as info:
        rfh.validate_config(bad)
    assert info.value.code == "ValidationError"


def test_pipeline_writes_artifacts(tmp_path):
    gates = rfh.run_pipeline(CONFIG, str(tmp_path))
    assert gates["ok"]
    for name in ("critical_points.json", "boundary.json", "homology.json", "diagnostics.json"):
        assert (tmp_path / name).exists()
    assert "degree" in rfh.report(str(tmp_path))
