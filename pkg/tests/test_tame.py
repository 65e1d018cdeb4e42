import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blockjacobi import (
    SpectralData,
    SpectralPoint,
    TameSystem,
    forward_map,
    hankel_block,
    is_p_tame,
    polynomial_obstruction,
    validate_sp,
)
from blockjacobi.io import gen_operator, gen_spectral
from blockjacobi.tame import CHECK_NAMES, eval_vector_polynomial

from conftest import adversarial_system, random_projector, shared_kernel_data


def test_hankel_p1_is_projector_sum(rng):
    P = [random_projector(rng, 3, k) for k in (1, 2, 3)]
    sys = TameSystem(3, [0.0, 1.0, 2.0], P)
    np.testing.assert_allclose(hankel_block(sys, 1), sum(P), atol=1e-14)


def test_identity_projectors_are_tame():
    m, p = 2, 3
    lam = np.array([-1.0, 0.5, 2.0])
    sys = TameSystem(m, lam, [np.eye(m)] * p)
    H = hankel_block(sys, p)
    scalar = np.array([[np.sum(lam ** (s + k)) for k in range(p)] for s in range(p)])
    np.testing.assert_allclose(H, np.kron(scalar, np.eye(m)), atol=1e-13)
    assert np.linalg.eigvalsh(H).min() > 0
    assert is_p_tame(sys, p).tame
    assert polynomial_obstruction(sys, p) is None


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_hankel_psd_and_quadratic_form(m, p, N, seed):
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.uniform(-1.5, 1.5, N))
    P = [random_projector(rng, m, int(rng.integers(1, m + 1))) for _ in range(N)]
    sys = TameSystem(m, lam, P)
    H = hankel_block(sys, p)
    assert np.linalg.eigvalsh(H).min() >= -1e-10 * np.linalg.norm(H, 2)
    v = rng.standard_normal((p, m)) + 1j * rng.standard_normal((p, m))
    quad = v.reshape(-1).conj() @ H @ v.reshape(-1)
    direct = sum(eval_vector_polynomial(v, l).conj() @ Pj @ eval_vector_polynomial(v, l) for l, Pj in zip(lam, P))
    assert abs(quad - direct) <= 1e-10 * (1 + abs(direct))


def test_scalar_two_points():
    assert is_p_tame(TameSystem(1, [0.0, 1.0], [np.eye(1)] * 2), 2).tame
    assert not is_p_tame(TameSystem(1, [0.5, 0.5], [np.eye(1)] * 2), 2).tame


@pytest.mark.parametrize("m", [2, 3, 4])
def test_two_level_kernel_intersection(rng, m):
    for trial in range(10):
        k1 = int(rng.integers(1, m))
        P1 = random_projector(rng, m, k1)
        shared = trial % 2 == 1
        if shared:
            ker1 = np.linalg.svd(P1)[2][-1].conj()
            P2 = random_projector(rng, m, m - k1, avoid=ker1)
        else:
            P2 = random_projector(rng, m, m - k1)
        sys = TameSystem(m, [-1.0, 0.0, 1.0], [P1, P2, np.eye(m)])
        stacked = np.vstack([P1, P2])
        trivial_kernel = np.linalg.svd(stacked, compute_uv=False)[-1] > 1e-8
        assert trivial_kernel == (not shared)
        assert is_p_tame(sys, 2).tame == trivial_kernel
        assert (polynomial_obstruction(sys, 2) is None) == trivial_kernel


def test_obstruction_example():
    P = np.diag([1.0, 0.0]).astype(complex)
    sys = TameSystem(2, [0.0, 1.0], [P, P])
    F = polynomial_obstruction(sys, 2)
    assert F is not None and np.linalg.norm(F) > 0
    for z in (0.0, 1.0, 3.7):
        assert abs(eval_vector_polynomial(F, z)[0]) < 1e-12
    assert not is_p_tame(sys, 2).tame


def test_obstruction_annihilated(rng):
    for _ in range(20):
        m, p = int(rng.integers(2, 5)), int(rng.integers(1, 5))
        sys = adversarial_system(rng, m, p)
        F = polynomial_obstruction(sys, p)
        assert F is not None
        for l, P in zip(sys.lambdas, sys.projectors):
            assert np.linalg.norm(P @ eval_vector_polynomial(F, l)) < 1e-8


def test_tame_agrees_with_obstruction(rng):
    agree = 0
    for i in range(100):
        m, p = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        if i % 2 == 0 or m == 1:
            sys = TameSystem.from_spectral(forward_map(gen_operator(m, p, "splus", 1000 + i)))
        else:
            sys = adversarial_system(rng, m, p)
        agree += is_p_tame(sys, p).tame == (polynomial_obstruction(sys, p) is None)
    assert agree == 100


def test_validate_forward_output():
    for seed in range(8):
        report = validate_sp(gen_spectral(1 + seed % 4, 1 + seed % 5, seed))
        assert report.ok, report.to_text()
        assert [c.name for c in report.checks] == list(CHECK_NAMES)


def test_validate_scaled_weight_fails_residue_sum():
    data = gen_spectral(2, 3, 7)
    pts = list(data.points)
    pts[0] = SpectralPoint(pts[0].lam, pts[0].P, 2 * pts[0].g)
    report = validate_sp(SpectralData(2, 3, pts))
    assert report.failed() == ["residue_sum"]


def test_validate_too_few_points():
    data = SpectralData(1, 2, [SpectralPoint(0.0, np.eye(1), np.eye(1))])
    report = validate_sp(data)
    assert not report["point_count"].passed


def test_validate_shared_kernel_fails_tameness_only():
    report = validate_sp(shared_kernel_data())
    assert report.failed() == ["p_tame"]


def test_report_text_and_dict():
    report = validate_sp(shared_kernel_data())
    text = report.to_text()
    assert text.splitlines()[0] == "ok: false"
    assert "FAIL p_tame" in text
    d = report.to_dict()
    assert d["ok"] is False and len(d["checks"]) == 7


def test_gram_is_congruent_to_hankel():
    from blockjacobi.tame import gram_matrix, stacked_evaluation

    sys = TameSystem.from_spectral(gen_spectral(2, 3, 5))
    S = stacked_evaluation(sys, 3)
    G = gram_matrix(sys, 3)
    np.testing.assert_allclose(G, S.conj().T @ S, atol=1e-12)
    # both positive definite on a tame system, and G's smallest eigenvalue is sigma_min(S)^2
    assert np.linalg.eigvalsh(hankel_block(sys, 3)).min() > 0
    assert np.linalg.eigvalsh(G).min() == pytest.approx(is_p_tame(sys, 3).min_eig, rel=1e-6)
