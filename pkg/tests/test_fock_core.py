import json
import math

import numpy as np
import pytest

from wehrlkit import (DensityMatrix, FockVector, NotPSD, PhasePoint,
                      TailTooLarge, coherent_fock_vector, load_state,
                      random_density_matrix, random_fock_vector,
                      safe_coherent_radius, save_state, spectral_decompose)
from wehrlkit.fock_core import coherent_tail_mass, state_from_dict, state_to_dict


def test_phase_point_roundtrip():
    p = PhasePoint(1.25, -0.75)
    assert p.z == complex(1.25, 0.75)
    q = PhasePoint.from_z(p.z)
    assert q.x == p.x and q.omega == p.omega


def test_vacuum_is_zero_centered_coherent():
    f = coherent_fock_vector(PhasePoint(0.0, 0.0), 8)
    expected = np.zeros(8, dtype=complex)
    expected[0] = 1.0
    assert np.allclose(f.coeffs, expected, atol=1e-15)


def test_first_coefficient_magnitude():
    f = coherent_fock_vector(PhasePoint(1.0, 0.0), 32)
    assert abs(abs(f.coeffs[0]) - math.exp(-math.pi / 2)) < 1e-12


@pytest.mark.parametrize("z1,z2", [
    ((0.0, 0.0), (1.0, 0.0)),
    ((0.4, -0.7), (-0.9, 0.3)),
    ((2.0, 0.0), (0.0, 2.0)),
])
def test_overlap_law(z1, z2):
    # brute-force inner product at dim 64 against the Gaussian law
    c1 = coherent_fock_vector(PhasePoint(*z1), 64)
    c2 = coherent_fock_vector(PhasePoint(*z2), 64)
    brute = abs(np.vdot(c1.coeffs, c2.coeffs)) ** 2
    dist2 = (z1[0] - z2[0]) ** 2 + (z1[1] - z2[1]) ** 2
    assert abs(brute - math.exp(-math.pi * dist2)) < 1e-10


def test_norm_and_tail_inside_safe_radius():
    for r in (0.5, 1.5, 2.5):
        f = coherent_fock_vector(PhasePoint(r, 0.0), 64)
        assert abs(np.sum(np.abs(f.coeffs) ** 2) - 1.0) < 1e-12
        assert coherent_tail_mass(r * r, 64) < 1e-12


def test_tail_guard():
    # |z0| = 3 exceeds the dim-64 guard; a larger truncation accepts it
    with pytest.raises(TailTooLarge):
        coherent_fock_vector(PhasePoint(3.0, 0.0), 64)
    f = coherent_fock_vector(PhasePoint(3.0, 0.0), 128)
    assert abs(np.linalg.norm(f.coeffs) - 1.0) < 1e-12
    assert safe_coherent_radius(64) < 3.0 < safe_coherent_radius(128)


def test_fock_vector_normalizes_and_is_immutable():
    f = FockVector([3.0, 4.0])
    assert abs(np.linalg.norm(f.coeffs) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        f.coeffs[0] = 0.0
    with pytest.raises(ValueError):
        FockVector([0.0, 0.0])


def test_density_matrix_validation():
    with pytest.raises(NotPSD):
        DensityMatrix(np.diag([1.0, -0.5]))
    rho = DensityMatrix(np.diag([2.0, 2.0]))
    assert abs(np.trace(rho.entries).real - 1.0) < 1e-15
    assert np.array_equal(rho.entries, rho.entries.conj().T)


def test_spectral_rank_one():
    f = coherent_fock_vector(PhasePoint(0.0, 0.0), 6)
    dec = spectral_decompose(f.projector(), cutoff=1e-12)
    assert dec.weights.size == 1
    assert abs(dec.weights[0] - 1.0) < 1e-12
    assert abs(abs(np.vdot(dec.states[0].coeffs, f.coeffs)) - 1.0) < 1e-12


def test_spectral_diagonal():
    m = np.zeros((4, 4))
    m[0, 0] = m[1, 1] = 0.5
    dec = spectral_decompose(DensityMatrix(m), cutoff=1e-12)
    assert np.allclose(dec.weights, [0.5, 0.5], atol=1e-14)
    g = np.array([[abs(np.vdot(a.coeffs, b.coeffs)) for a in dec.states]
                  for b in dec.states])
    assert np.allclose(g, np.eye(2), atol=1e-10)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_spectral_rebuild_identity(seed):
    rho = random_density_matrix(8, 3, seed)
    dec = spectral_decompose(rho, cutoff=1e-14)
    res = np.linalg.norm(dec.rebuild().entries - rho.entries)
    assert res < 1e-10


def test_random_density_matrix_determinism():
    a = random_density_matrix(8, 8, 1)
    b = random_density_matrix(8, 8, 1)
    assert np.array_equal(a.entries, b.entries)


def test_random_density_matrix_properties():
    rho = random_density_matrix(6, 2, 5)
    w = rho.eigenvalues()
    assert w[0] > -1e-12
    assert abs(w.sum() - 1.0) < 1e-12
    pure = random_density_matrix(4, 1, 3)
    w = pure.eigenvalues()
    assert abs(w[-1] - 1.0) < 1e-12 and abs(w[:-1]).max() < 1e-12
    with pytest.raises(ValueError):
        random_density_matrix(4, 5, 0)


def test_json_roundtrip_pure(tmp_path):
    f = random_fock_vector(7, 9)
    path = tmp_path / "pure.json"
    save_state(f, path)
    g = load_state(path)
    assert isinstance(g, FockVector)
    assert np.array_equal(f.coeffs, g.coeffs)


def test_json_roundtrip_mixed(tmp_path):
    rho = random_density_matrix(5, 3, 7)
    path = tmp_path / "mixed.json"
    save_state(rho, path)
    sigma = load_state(path)
    assert isinstance(sigma, DensityMatrix)
    assert np.array_equal(rho.entries, sigma.entries)


def test_json_schema_fields(tmp_path):
    rho = random_density_matrix(3, 2, 1)
    doc = state_to_dict(rho)
    assert set(doc) == {"dim", "kind", "re", "im"}
    assert doc["kind"] == "mixed" and len(doc["re"]) == 9
    # serialized text round-trips through the generic json module too
    text = json.dumps(doc)
    back = state_from_dict(json.loads(text))
    assert np.array_equal(back.entries, rho.entries)
    with pytest.raises(ValueError):
        state_from_dict({"dim": 2, "kind": "pure", "re": [1.0], "im": [0.0]})
    with pytest.raises(ValueError):
        state_from_dict({"dim": 1, "kind": "other", "re": [1.0], "im": [0.0]})
