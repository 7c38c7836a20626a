import numpy as np
import pytest

from conftest import random_hermitian, random_pd
from opjensen.constants import (
    OptOptions,
    brute_force_quartic_dim2,
    choi_forms,
    compute_choi_delta,
    compute_delta,
    compute_zeta,
    maximize_quartic_form,
)
from opjensen.errors import ValidationError
from opjensen.instances import GeneratorSpec, generate_instance, random_map
from opjensen.instances import random_hermitian as spectral_hermitian
from opjensen.matcore import SpectralInterval, hermitian, inv_sqrt, loewner_leq
from opjensen.posmaps import PositiveLinearMap, PositiveMapFamily, normalize_family
from opjensen.scalarfun import builtin, parse_function
from opjensen.theorems import (
    ERROR,
    VERIFIED,
    VIOLATED,
    InequalityInstance,
    find_cdj_counterexample,
    parallel_sum,
    parallel_sum_identities,
    power_constant,
    power_forms,
    verify_beta_reverse,
    verify_cdj_naive,
    verify_choi_forward,
    verify_choi_reverse,
    verify_forward_jensen,
    verify_parallel_sum_forward,
    verify_parallel_sum_reverse,
    verify_power,
    verify_reverse_jensen,
    weighted_forms,
)

I2 = np.eye(2)
IDENTITY_MAP = PositiveMapFamily((PositiveLinearMap.kraus([I2]),))
DIAG01 = np.diag([0.0, 1.0])
MIXED = ("kraus", "compression", "transpose_then_kraus")


def diag_instance(f="power:2"):
    return InequalityInstance(IDENTITY_MAP, [DIAG01], parse_function(f), "diag01")


def random_instance(f, d_h=4, d_k=3, n=2, seed=0, kinds=MIXED):
    spec = GeneratorSpec(d_h, d_k, n=n, map_kinds=kinds, spectrum=SpectralInterval(0.2, 2.0), floor=0.2, seed=seed)
    return generate_instance(spec, parse_function(f))


def test_instance_validation():
    with pytest.raises(ValidationError, match="2 operators for 1 maps"):
        InequalityInstance(IDENTITY_MAP, [DIAG01, DIAG01], builtin("exp"))
    with pytest.raises(ValidationError, match="outside"):
        InequalityInstance(IDENTITY_MAP, [DIAG01], builtin("xlogx"))
    with pytest.raises(ValidationError, match="strictly positive"):
        InequalityInstance(IDENTITY_MAP, [np.diag([1e-9, 1.0])], builtin("xlogx"))
    with pytest.raises(ValidationError, match="outside"):
        InequalityInstance(IDENTITY_MAP, [-DIAG01], builtin("power", [2]))
    half = PositiveMapFamily((PositiveLinearMap.scaled_identity(0.5, 2),))
    with pytest.raises(ValidationError, match="not unital"):
        InequalityInstance(half, [DIAG01], builtin("exp"))


# reverse / forward / beta -----------------------------------------------------

def test_identity_function_gives_equality():
    inst = random_instance("identity", seed=3)
    for rep, key in ((verify_reverse_jensen(inst), "delta"), (verify_forward_jensen(inst), "zeta"),
                     (verify_beta_reverse(inst), "beta")):
        assert rep.verdict == VERIFIED
        assert abs(rep.margin) <= 1e-10
        assert abs(getattr(rep.constants, key)) <= 1e-10


def test_reverse_on_diag_example():
    rep = verify_reverse_jensen(diag_instance())
    assert rep.verdict == VERIFIED
    assert rep.constants.delta == pytest.approx(0.5, abs=1e-9)
    np.testing.assert_allclose(rep.lhs, DIAG01, atol=1e-12)
    np.testing.assert_allclose(rep.rhs, np.diag([0.5, 1.5]), atol=1e-9)
    assert rep.margin == pytest.approx(0.5, abs=1e-9)
    assert rep.pointwise_min >= -1e-9


def test_forward_on_diag_example():
    rep = verify_forward_jensen(diag_instance())
    assert rep.verdict == VERIFIED
    assert rep.constants.zeta == pytest.approx(0.5, abs=1e-9)
    np.testing.assert_allclose(rep.lhs, DIAG01, atol=1e-12)
    np.testing.assert_allclose(rep.rhs, DIAG01 + 0.5 * I2, atol=1e-9)
    assert rep.margin == pytest.approx(0.5, abs=1e-9)


def test_beta_on_diag_example():
    rep = verify_beta_reverse(diag_instance())
    assert rep.verdict == VERIFIED
    assert rep.constants.beta == pytest.approx(0.25, abs=1e-12)
    np.testing.assert_allclose(rep.rhs - rep.lhs, 0.25 * I2, atol=1e-12)
    assert rep.constants.beta < rep.constants.delta


@pytest.mark.parametrize("seed", range(4))
def test_random_exp_instances_verify(seed):
    rng = np.random.default_rng(seed)
    d_h = int(rng.integers(2, 7))
    d_k = int(rng.integers(1, d_h + 1))
    inst = random_instance("exp", d_h, d_k, n=int(rng.integers(1, 4)), seed=seed)
    for verify in (verify_reverse_jensen, verify_beta_reverse):
        rep = verify(inst)
        assert rep.verdict == VERIFIED and rep.margin >= -1e-7
        assert rep.pointwise_min >= -1e-9


@pytest.mark.parametrize("seed", range(4))
def test_random_compression_power4_forward(seed):
    inst = random_instance("power:4", 4, 2, n=1, seed=seed, kinds=("compression",))
    rep = verify_forward_jensen(inst)
    assert rep.verdict == VERIFIED and rep.margin >= -1e-7
    assert rep.pointwise_min >= -1e-9


def test_report_dict_is_plain_data():
    d = verify_reverse_jensen(diag_instance()).to_dict()
    assert d["verdict"] == VERIFIED and d["inequality_id"] == "reverse-jensen"
    assert d["constants"]["witnesses"]["delta"]["restarts_used"] >= 64
    assert d["lhs_eig_range"] == pytest.approx([0.0, 1.0], abs=1e-12)


def test_verdict_tracks_margin_and_tol():
    rep = verify_reverse_jensen(diag_instance(), tol=1e-7)
    assert (rep.verdict == VERIFIED) == (rep.margin >= -rep.tol)


def test_violation_triggers_recheck(monkeypatch):
    import dataclasses

    import opjensen.theorems as th

    inst = random_instance("power:4", 4, 2, n=2, seed=11)
    true_delta = compute_delta(inst.function, inst.family, inst.operators).delta
    real = th.maximize_quartic_form

    def underestimate(*args, **kw):
        return dataclasses.replace(real(*args, **kw), value=0.0)

    monkeypatch.setattr(th, "maximize_quartic_form", underestimate)
    # without the recheck a zero constant is too small
    assert verify_reverse_jensen(inst, samples=0, recheck=False).verdict == VIOLATED
    rep = verify_reverse_jensen(inst, samples=0)
    assert rep.verdict == VERIFIED
    assert "dim-2 grid oracle" in rep.diagnostics
    assert rep.constants.delta == pytest.approx(true_delta, abs=1e-4)


@pytest.mark.parametrize("selector", ["power:2", "power:3", "exp", "power:-1", "xlogx", "abs:1"])
def test_scalar_reduction(selector):
    for seed in range(5):
        f = parse_function(selector)
        spec = GeneratorSpec(1, 1, n=3, spectrum=SpectralInterval(0.2, 2.0), floor=0.2, seed=seed)
        inst = generate_instance(spec, f)
        for rep in (verify_reverse_jensen(inst), verify_forward_jensen(inst), verify_beta_reverse(inst)):
            assert rep.verdict == VERIFIED and rep.margin >= -1e-12, (selector, seed, rep.inequality_id)
        # scalar Jensen itself holds exactly
        assert verify_cdj_naive(inst).margin >= -1e-12


# non-monotone functions: outcomes are recorded, not asserted

@pytest.mark.parametrize("selector", ["abs:1", "xlogx"])
def test_non_monotone_functions_are_run(selector):
    outcomes = []
    for seed in range(5):
        inst = random_instance(selector, seed=seed)
        for verify in (verify_reverse_jensen, verify_forward_jensen):
            rep = verify(inst)
            assert rep.verdict in (VERIFIED, VIOLATED)
            outcomes.append((rep.inequality_id, rep.verdict, rep.margin))
    assert len(outcomes) == 10


# uncorrected inequality ---------------------------------------------------------

def test_cdj_naive_holds_for_square():
    for seed in range(5):
        assert verify_cdj_naive(random_instance("power:2", seed=seed)).verdict == VERIFIED


def test_counterexample_search():
    found = find_cdj_counterexample(builtin("power", [4]), 3, 2, trials=100_000, seed=1)
    assert found is not None and found.margin <= -1e-3
    rep = verify_cdj_naive(found.instance)
    assert rep.verdict == VIOLATED and rep.margin == pytest.approx(found.margin, abs=1e-12)
    assert find_cdj_counterexample(builtin("power", [2]), 3, 2, trials=20_000, seed=1) is None
    assert find_cdj_counterexample(builtin("identity"), 3, 2, trials=5_000, seed=1) is None


# power functions ---------------------------------------------------------------

@pytest.mark.parametrize("p", [2.0, 3.0, 4.0, -1.0])
def test_power_constants_factor_out_p(p):
    inst = random_instance(f"power:{p:g}", seed=int(abs(p)))
    d_thm = compute_delta(inst.function, inst.family, inst.operators).delta
    z_thm = compute_zeta(inst.function, inst.family, inst.operators).zeta
    assert d_thm == pytest.approx(p * power_constant(inst, "reverse"), abs=1e-8)
    assert z_thm == pytest.approx(p * power_constant(inst, "forward"), abs=1e-8)
    for which in ("reverse", "forward"):
        rep = verify_power(inst, which)
        assert rep.verdict == VERIFIED and rep.margin >= -1e-7


def test_literal_sup_reading_fails_for_negative_exponent():
    # for p < 0, using the supremum of the unscaled form (instead of the infimum)
    # gives a correction p * sup that is too small on some instances
    failures = 0
    for seed in range(10):
        inst = random_instance("power:-1", seed=seed)
        literal = maximize_quartic_form(*power_forms(inst, "reverse")).value
        rhs = inst.function.of(inst.combined()) + (-1.0) * literal * np.eye(inst.d_k)
        ok, _ = loewner_leq(inst.mapped_f(), rhs, 1e-7)
        failures += not ok
    assert failures >= 1


def test_power_forms_need_power_function():
    rep = verify_power(random_instance("exp"), "reverse")
    assert rep.verdict == ERROR and "power" in rep.diagnostics


# weighted means ----------------------------------------------------------------

def test_weighted_family_matches_raw_weighted_sums():
    rng = np.random.default_rng(8)
    w = np.array([0.2, 0.5, 0.3])
    F = PositiveMapFamily(tuple(PositiveLinearMap.scaled_identity(x, 3) for x in w))
    for selector in ("exp", "power:3", "power:-1"):
        f = parse_function(selector)
        ops = [spectral_hermitian(rng, 3, 0.3, 2.0) for _ in w]
        inst = InequalityInstance(F, ops, f)
        rep = verify_reverse_jensen(inst)
        mean_f, f_mean = weighted_forms(w, ops, f)
        assert np.abs(rep.lhs - mean_f).max() <= 1e-12
        assert np.abs(rep.rhs - (f_mean + rep.constants.delta * np.eye(3))).max() <= 1e-12
        # the weighted delta assembled from raw sums
        from opjensen.scalarfun import subgradient_operator
        C = [subgradient_operator(f, A) for A in ops]
        P = sum(x * c @ A for x, c, A in zip(w, C, ops))
        Q = sum(x * A for x, A in zip(w, ops))
        R = sum(x * c for x, c in zip(w, C))
        raw = maximize_quartic_form(hermitian(P), hermitian(Q), hermitian(R)).value
        assert rep.constants.delta == pytest.approx(raw, abs=1e-10)


# Choi inequality -----------------------------------------------------------------

def test_choi_forward_examples(rng):
    A = hermitian(random_pd(rng, 3))
    F = normalize_family([random_map(rng, "compression", 3, 2)])
    rep = verify_choi_forward(F, A, A)
    assert rep.verdict == VERIFIED and abs(rep.margin) <= 1e-9
    np.testing.assert_allclose(rep.lhs, F(A), atol=1e-9)
    B = hermitian(random_hermitian(rng, 2))
    A2 = hermitian(random_pd(rng, 2))
    rep = verify_choi_forward(IDENTITY_MAP, A2, B)
    assert rep.verdict == VERIFIED and abs(rep.margin) <= 1e-9
    np.testing.assert_allclose(rep.lhs, rep.rhs, atol=1e-9)
    for _ in range(5):
        B = hermitian(random_hermitian(rng, 3))
        assert verify_choi_forward(F, A, B).margin >= -1e-9


def test_choi_reverse_examples(rng):
    A = hermitian(random_pd(rng, 3))
    F = normalize_family([random_map(rng, "kraus", 3, 2)])
    rep = verify_choi_reverse(F, A, A)
    assert rep.verdict == VERIFIED and abs(rep.constants.delta) <= 1e-10 and abs(rep.margin) <= 1e-9
    rep = verify_choi_reverse(IDENTITY_MAP, I2, DIAG01)
    assert rep.constants.delta == pytest.approx(0.25, abs=1e-9)
    np.testing.assert_allclose(rep.rhs - rep.lhs, 0.5 * I2, atol=1e-9)
    assert rep.margin == pytest.approx(0.5, abs=1e-9)
    for _ in range(5):
        B = hermitian(random_hermitian(rng, 3))
        assert verify_choi_reverse(F, A, B).margin >= -1e-7


def test_choi_forms_match_psi_construction(rng):
    from opjensen.constants import choi_psi_instance

    F = normalize_family([random_map(rng, "transpose_then_kraus", 3, 2)])
    A = hermitian(random_pd(rng, 3))
    B = hermitian(random_hermitian(rng, 3))
    psi, T = choi_psi_instance(F, A, B)
    P, Q = choi_forms(F, A, B)
    assert np.abs(psi(np.eye(3)) - np.eye(2)).max() <= 1e-10
    np.testing.assert_allclose(psi(T @ T), P, atol=1e-9)
    np.testing.assert_allclose(psi(T), Q, atol=1e-9)


def test_choi_with_singular_a_is_an_error():
    rep = verify_choi_forward(IDENTITY_MAP, DIAG01, I2)
    assert rep.verdict == ERROR and "minimum eigenvalue" in rep.diagnostics


# parallel sums ----------------------------------------------------------------

def test_parallel_sum_examples(rng):
    np.testing.assert_allclose(parallel_sum(I2, I2), 0.5 * I2, atol=1e-15)
    np.testing.assert_allclose(parallel_sum(np.diag([1.0, 2.0]), 2 * I2), np.diag([2 / 3, 1.0]), atol=1e-15)
    for _ in range(10):
        A, B = hermitian(random_pd(rng, 4)), hermitian(random_pd(rng, 4))
        assert np.abs(parallel_sum(A, B) - parallel_sum(B, A)).max() <= 1e-10
        a, b = parallel_sum_identities(A, B)
        assert max(a, b) <= 1e-9


def test_parallel_sum_forward_examples(rng):
    A, B = hermitian(random_pd(rng, 2)), hermitian(random_pd(rng, 2))
    rep = verify_parallel_sum_forward(IDENTITY_MAP, A, B)
    assert rep.verdict == VERIFIED and abs(rep.margin) <= 1e-9
    F = normalize_family([random_map(rng, "compression", 3, 2)])
    A3 = hermitian(random_pd(rng, 3))
    rep = verify_parallel_sum_forward(F, A3, A3)
    np.testing.assert_allclose(rep.lhs, F(A3) / 2, atol=1e-12)
    assert abs(rep.margin) <= 1e-9
    for _ in range(5):
        A3, B3 = hermitian(random_pd(rng, 3)), hermitian(random_pd(rng, 3))
        assert verify_parallel_sum_forward(F, A3, B3).margin >= -1e-9


def test_parallel_sum_reverse_identity_map(rng):
    A, B = hermitian(random_pd(rng, 2)), hermitian(random_pd(rng, 2))
    rep = verify_parallel_sum_reverse(IDENTITY_MAP, A, B)
    # both sides agree before the correction term is added
    np.testing.assert_allclose(rep.lhs, parallel_sum(A, B), atol=1e-12)
    # delta is the variance-type supremum for Q = (A+B)^-1/2 A (A+B)^-1/2
    S = inv_sqrt(A + B)
    Q = S @ A @ S
    assert rep.constants.delta == pytest.approx(brute_force_quartic_dim2(Q @ Q, Q, Q), abs=1e-4)
    assert rep.margin == pytest.approx(2 * rep.constants.delta * np.linalg.eigvalsh(A + B)[0], abs=1e-9)
    rep = verify_parallel_sum_reverse(IDENTITY_MAP, A, A)
    assert abs(rep.constants.delta) <= 1e-10 and abs(rep.margin) <= 1e-9


def test_parallel_sum_reverse_random(rng):
    F = normalize_family([random_map(rng, "kraus", 4, 2), random_map(rng, "compression", 4, 2)])
    for _ in range(5):
        A, B = hermitian(random_pd(rng, 4)), hermitian(random_pd(rng, 4))
        rep = verify_parallel_sum_reverse(F, A, B)
        assert rep.verdict == VERIFIED and rep.margin >= -1e-7
        assert rep.constants.delta == pytest.approx(compute_choi_delta(F, A + B, A).delta, abs=1e-12)
