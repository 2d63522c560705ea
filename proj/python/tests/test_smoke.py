import json
import math

import numpy as np
import pytest

import freeconvex as fc


def chsh_win():
    w = np.zeros((2, 2, 2, 2), dtype=np.uint8)
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    w[a, b, x, y] = (x ^ y) == (a & b)
    return w


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def test_eigenvalues_match_numpy():
    rng = np.random.default_rng(0)
    for n in (1, 3, 6):
        h = random_hermitian(rng, n)
        assert np.allclose(fc.eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-12)
        assert fc.min_eigenvalue(h) == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-12)


def test_non_hermitian_input_raises_with_kind():
    with pytest.raises(fc.FreeconvexError) as info:
        fc.min_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert info.value.kind == "invalid-input"


def test_chsh_values():
    value, alice, bob = fc.classical_value(chsh_win())
    assert value == 0.75
    assert len(alice) == 2 and len(bob) == 2
    assert fc.npa_upper_bound(chsh_win(), 1) == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-6)


def test_lambda_max_sdp():
    rng = np.random.default_rng(1)
    a = random_hermitian(rng, 4)
    sol = fc.solve_sdp([4], [-a], [([np.eye(4)], 1.0)], tol=1e-9)
    assert sol["status"] == "optimal"
    assert -sol["primal_objective"] == pytest.approx(np.linalg.eigvalsh(a)[-1], abs=1e-6)


def test_birkhoff_reconstructs():
    m = np.array([[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]])
    terms = fc.birkhoff_decompose(m)
    rebuilt = np.zeros((3, 3))
    for weight, perm in terms:
        rebuilt[np.arange(3), perm] += weight
    assert np.allclose(rebuilt, m, atol=1e-12)
    assert sum(w for w, _ in terms) == pytest.approx(1.0, abs=1e-12)


def test_naimark_marginals():
    effects = [np.diag([0.25, 0.5]), np.diag([0.75, 0.5])]
    v, pvm = fc.naimark_dilate(effects)
    assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-12)
    for e, p in zip(effects, pvm):
        assert np.allclose(v.conj().T @ p @ v, e, atol=1e-12)


def test_rank_two_separable():
    rng = np.random.default_rng(2)
    def psd(n):
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return g @ g.conj().T
    s1, t1, s2, t2 = psd(3), psd(3), psd(3), psd(3)
    rho = np.kron(s1, t1) + np.kron(s2, t2)
    terms = fc.separable_rank2(s1, t1, s2, t2)
    assert len(terms) <= 2
    rebuilt = sum(np.kron(a, b) for a, b in terms)
    assert np.linalg.norm(rebuilt - rho) <= 1e-8 * np.linalg.norm(rho)
    for a, b in terms:
        assert np.linalg.eigvalsh(a)[0] >= -1e-9
        assert np.linalg.eigvalsh(b)[0] >= -1e-9


def test_joint_measurability_threshold():
    ez = np.diag([1.0, 0.0])
    ex = np.full((2, 2), 0.5)
    assert fc.jointly_measurable([ez, ex])["verdict"] == "no"
    lower, upper = fc.noise_threshold([ez, ex])
    assert lower <= 1 / math.sqrt(2) <= upper
    assert upper - lower <= 1e-3


def test_mpdo_moment_of_product():
    a = np.diag([0.7, 0.3])
    b = np.diag([0.6, 0.4])
    rho = np.kron(a, b)
    for k in range(1, 5):
        expected = np.trace(np.linalg.matrix_power(rho, k))
        assert fc.mpdo_moment(1, [[a], [b]], k) == pytest.approx(expected, abs=1e-14)


def test_psd_distance_bounds_bracket():
    rng = np.random.default_rng(3)
    h = random_hermitian(rng, 5)
    ev = np.linalg.eigvalsh(h)
    exact = -ev[ev < 0].sum()
    moments = [np.sum(ev ** k) for k in range(1, 9)]
    lower, upper = fc.psd_distance_bounds(5, moments, 8)
    assert lower - 1e-9 <= exact <= upper + 1e-9


def test_cli_in_process(tmp_path):
    game = {"qa": 2, "qb": 2, "aa": 2, "ab": 2, "w": chsh_win().tolist()}
    path = tmp_path / "chsh.json"
    path.write_text(json.dumps(game))
    code, out = fc.run_cli(["games", "value", str(path), "--npa-level", "1"])
    assert code == 0
    report = json.loads(out)
    assert report["classical"] == 0.75
    code, out = fc.run_cli(["games", "value", str(tmp_path / "missing.json")])
    assert code == 2
    assert json.loads(out)["error"]["kind"] == "invalid-input"
