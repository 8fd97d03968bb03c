import math

import numpy as np
import pytest

from app.core.errors import (
    DimensionTooLargeError,
    FSobolevNotVerifiedError,
    InfeasibleSliceError,
    ModelValidationError,
    OutOfRangeError,
    PoincareConstantError,
)
from app.models.bounds import BoundFamily, FSobolevVerdict
from app.models.markov import ProbDist
from app.models.tilted import BernsteinParams, FSobolevFunction
from app.services.bounds_service import BoundsService
from app.services.tilted_service import TiltedService
from conftest import make_model, random_models

ORDER_TOL = 1e-12
CONJ_TOL = 1e-9


def sqrt_sobolev(constant: float) -> FSobolevFunction:
    # F(x) = 2C(√x - 1): creciente, cóncava, F(1) = 0 y F(0) = -2C finito
    return FSobolevFunction(
        name=f"{constant}*sqrt",
        func=lambda x: 2.0 * constant * (np.sqrt(x) - 1.0),
        inverse=lambda y: (1.0 + np.asarray(y) / (2.0 * constant)) ** 2,
        at_zero=-2.0 * constant,
    )


def test_bound_parameters(two_state):
    params = BoundsService.bound_parameters(two_state)
    assert params.sigma_hat_sq == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert params.var_pi == pytest.approx(2.0, abs=1e-12)
    assert params.sigma_tilde_sq == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert params.gap == pytest.approx(3.0, abs=1e-12)
    assert (params.f_sup, params.f_plus_sup) == (2.0, 1.0)
    assert (params.f_max, params.f_min) == (1.0, -2.0)


def test_general_bound_edges(two_state, two_state_stationary):
    at_zero = BoundsService.bound_general(two_state, 1.0, 0.0)
    assert at_zero.rate == pytest.approx(0.0, abs=1e-12)
    assert at_zero.prefactor == pytest.approx(math.sqrt(1.5), rel=1e-12)
    assert at_zero.bound == 1.0

    assert BoundsService.bound_general(two_state_stationary, 1.0, 0.0).bound == 1.0

    above = BoundsService.bound_general(two_state, 1.0, 1.5)
    assert math.isinf(above.rate)
    assert above.bound == 0.0
    assert "infinite_rate" in above.notes

    with pytest.raises(OutOfRangeError):
        BoundsService.bound_general(two_state, 1.0, -0.1)


def test_perturbation_bound_branches(two_state, spectral):
    sd = spectral(two_state)
    params = BoundsService.bound_parameters(two_state, sd)
    assert BoundsService.bound_perturbation(two_state, 1.0, 0.0, sd).rate == 0.0

    bp = BernsteinParams(v=params.sigma_hat_sq, c=2.0 * params.f_sup / params.gap)
    for u in (0.1, 0.5, 1.0):
        point = BoundsService.bound_perturbation(two_state, 1.0, u, sd)
        assert point.branch == "a"
        assert point.rate == pytest.approx(TiltedService.bernstein_conjugate(bp, u), abs=1e-12)

    threshold = 2.0 * params.sigma_hat_sq * params.gap / params.f_sup
    left = BoundsService.bound_perturbation(two_state, 1.0, threshold, sd)
    right = BoundsService.bound_perturbation(two_state, 1.0, threshold * (1.0 + 1e-12), sd)
    assert (left.branch, right.branch) == ("a", "b")
    assert abs(left.rate - right.rate) <= 1e-9


def test_poincare_bound(two_state, spectral):
    sd = spectral(two_state)
    params = BoundsService.bound_parameters(two_state, sd)
    assert BoundsService.bound_poincare(two_state, 1.0, 0.0, sd=sd).rate == 0.0

    scale = params.f_sup / params.gap
    for u in (0.2, 0.5, 0.9):
        point = BoundsService.bound_poincare(two_state, 1.0, u, sd=sd)
        assert "u_under_square_root" in point.notes
        numeric = TiltedService.fenchel_conjugate(
            lambda r: r * r * params.sigma_tilde_sq / (2.0 * (1.0 - r * scale)), u, r_max=1.0 / scale
        )
        assert point.rate == pytest.approx(numeric.value, abs=CONJ_TOL)

    with pytest.raises(PoincareConstantError):
        BoundsService.bound_poincare(two_state, 1.0, 0.5, constant=0.1, sd=sd)
    looser = BoundsService.bound_poincare(two_state, 1.0, 0.5, constant=1.0, sd=sd)
    tight = BoundsService.bound_poincare(two_state, 1.0, 0.5, sd=sd)
    assert looser.rate < tight.rate


@pytest.mark.parametrize("name", ["two_state", "cycle", "birth_death"])
def test_bound_ordering_on_fixtures(name, request, spectral):
    model = request.getfixturevalue(name)
    sd = spectral(model)
    params = BoundsService.bound_parameters(model, sd)
    threshold = 2.0 * params.sigma_hat_sq * params.gap / params.f_sup
    top = min(params.f_max, threshold)
    for u in np.linspace(0.0, top, 12)[:-1]:
        general = BoundsService.bound_general(model, 1.0, u, sd)
        bernstein = BoundsService.bound_bernstein_general(model, 1.0, u, sd)
        perturbation = BoundsService.bound_perturbation(model, 1.0, u, sd)
        poincare = BoundsService.bound_poincare(model, 1.0, u, sd=sd)
        assert perturbation.branch == "a"
        assert bernstein.rate >= perturbation.rate - ORDER_TOL
        assert bernstein.rate >= poincare.rate - ORDER_TOL
        assert general.rate >= bernstein.rate - CONJ_TOL
        assert "alpha_condition_violated" not in bernstein.notes


def test_lambda0_upper_bounds_on_random_models(spectral):
    for model in random_models(20, seed=17):
        sd = spectral(model)
        params = BoundsService.bound_parameters(model, sd)
        f, pi = model.f, model.pi
        for r in np.linspace(0.0, params.gap / (3.0 * params.f_sup), 25):
            lam = TiltedService.lambda0(sd, f, pi, r)
            phi_form = BoundsService.lambda0_bound_phi(params, r)
            assert lam <= phi_form + 1e-10
            assert phi_form <= BoundsService.lambda0_bound_phi_relaxed(params, r) + 1e-12
        for r in np.linspace(0.0, 0.99 * params.gap / params.f_plus_sup, 25):
            lam = TiltedService.lambda0(sd, f, pi, r)
            assert lam <= BoundsService.lambda0_bound_bernstein(params, r) + 1e-10


def test_poincare_cumulant_dominates_bernstein_cumulant(two_state):
    params = BoundsService.bound_parameters(two_state)
    for r in np.linspace(0.0, 0.99 * params.gap / params.f_sup, 20):
        assert BoundsService.lambda0_bound_poincare(params, r) >= BoundsService.lambda0_bound_bernstein(params, r) - 1e-12


def test_check_f_sobolev_two_state(two_state):
    log_sobolev = FSobolevFunction.log_sobolev(0.5)
    assert BoundsService.check_f_sobolev(two_state, log_sobolev).verdict == FSobolevVerdict.holds
    assert BoundsService.check_f_sobolev(two_state, log_sobolev.scaled(0.5)).verdict == FSobolevVerdict.holds
    assert BoundsService.check_f_sobolev(two_state, FSobolevFunction.log_sobolev(1e-3)).verdict == FSobolevVerdict.holds

    violated = BoundsService.check_f_sobolev(two_state, FSobolevFunction.log_sobolev(100.0))
    assert violated.verdict == FSobolevVerdict.violated
    witness = np.array(violated.witness)
    assert two_state.pi.weights @ witness ** 2 == pytest.approx(1.0, abs=1e-12)
    assert violated.max_violation > 0


def test_check_f_sobolev_three_states(birth_death):
    violated = BoundsService.check_f_sobolev(birth_death, FSobolevFunction.log_sobolev(100.0), n_restarts=5, seed=1)
    assert violated.verdict == FSobolevVerdict.violated
    small = BoundsService.check_f_sobolev(birth_death, FSobolevFunction.log_sobolev(0.01), n_restarts=5, seed=1)
    assert small.verdict == FSobolevVerdict.inconclusive


def test_fsobolev_bound(two_state, birth_death):
    constant = 0.5
    fs = FSobolevFunction.log_sobolev(constant)
    assert BoundsService.bound_fsobolev(two_state, 1.0, 0.0, fs).rate == pytest.approx(0.0, abs=1e-12)
    for u in (0.1, 0.5):
        point = BoundsService.bound_fsobolev(two_state, 1.0, u, fs)
        static = TiltedService.cramer_transform_static(two_state.pi, two_state.f, u).value
        assert point.rate == pytest.approx(constant * static, abs=1e-8)
        assert math.isinf(point.diagnostics["r_f"])

    with pytest.raises(FSobolevNotVerifiedError):
        BoundsService.bound_fsobolev(birth_death, 1.0, 0.3, FSobolevFunction.log_sobolev(0.01), n_restarts=3)
    assumed = BoundsService.bound_fsobolev(birth_death, 1.0, 0.3, FSobolevFunction.log_sobolev(0.01), assume=True)
    assert "assumed" in assumed.notes and assumed.rate > 0


def test_fsobolev_bound_with_finite_domain(birth_death):
    fs = sqrt_sobolev(0.2)
    r_f = BoundsService.fsobolev_domain(birth_death, fs)
    assert r_f == pytest.approx(0.2)
    point = BoundsService.bound_fsobolev(birth_death, 1.0, 0.3, fs, assume=True)
    assert point.rate >= 0
    assert point.diagnostics["argmax_r"] < r_f
    # F(π(F⁻¹(0))) = 0 en r = 0
    assert BoundsService.lambda0_bound_fsobolev(birth_death, fs, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_donsker_varadhan_info(two_state, spectral):
    q, pi = two_state.q, two_state.pi
    assert BoundsService.donsker_varadhan_info(q, pi, pi) == pytest.approx(0.0, abs=1e-12)
    assert BoundsService.donsker_varadhan_info(q, pi, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-12)
    assert BoundsService.donsker_varadhan_info(q, pi, ProbDist(weights=np.array([0.0, 1.0]))) == pytest.approx(2.0, abs=1e-12)

    rng = np.random.default_rng(23)
    for model in random_models(10, seed=19):
        for beta in rng.dirichlet(np.ones(model.n), 50):
            info = BoundsService.donsker_varadhan_info(model.q, model.pi, beta)
            assert info > 1e-10


def test_info_representation(two_state, birth_death, cycle):
    zero = BoundsService.verify_info_representation(two_state, 0.0)
    assert zero.info_inf == pytest.approx(0.0, abs=1e-12)
    assert BoundsService.verify_info_representation(two_state, 0.5).gap <= 1e-6

    for model in (birth_death, cycle):
        fine = BoundsService.verify_info_representation(model, 0.4)
        coarse = BoundsService.verify_info_representation(model, 0.4, grid_density=100)
        assert fine.gap <= 1e-4
        assert coarse.info_inf >= fine.info_inf - 1e-12
        assert sum(fine.argmin_beta) == pytest.approx(1.0)

    big = random_models(1, seed=2, sizes=(4,))[0]
    with pytest.raises(DimensionTooLargeError):
        BoundsService.verify_info_representation(big, 0.0)
    with pytest.raises(InfeasibleSliceError):
        BoundsService.verify_info_representation(two_state, 1.5)


def test_bound_via_alpha(two_state, spectral):
    sd = spectral(two_state)
    trivial = BoundsService.bound_via_alpha(two_state, 2.0, 0.5, lambda u: 0.0, sd=sd)
    assert trivial.bound == min(1.0, trivial.prefactor)

    bp = BoundsService.bernstein_general_params(two_state, sd)
    via = BoundsService.bound_via_alpha(
        two_state, 2.0, 0.5, lambda u: TiltedService.bernstein_conjugate(bp, u), BoundFamily.bernstein_general, sd
    )
    direct = BoundsService.bound_bernstein_general(two_state, 2.0, 0.5, sd)
    assert via.bound == direct.bound and via.rate == direct.rate

    star = TiltedService.lambda0_star(sd, two_state.f, two_state.pi, 0.5).value
    too_big = BoundsService.bound_via_alpha(two_state, 2.0, 0.5, lambda u: star + 0.5, sd=sd)
    assert "alpha_condition_violated" in too_big.notes


def test_lower_tail_and_two_sided(spectral):
    symmetric = make_model([[-1.0, 1.0], [1.0, -1.0]], [1.0, -1.0], nu=[0.5, 0.5])
    sd = spectral(symmetric)
    for u in (0.2, 0.6):
        upper = BoundsService.bound(symmetric, 3.0, u, BoundFamily.general, sd)
        lower = BoundsService.lower_tail(symmetric, 3.0, -u, BoundFamily.general, sd)
        assert lower.rate == pytest.approx(upper.rate, abs=1e-10)
        assert "lower_tail" in lower.notes and lower.u == -u

        both = BoundsService.two_sided(symmetric, 3.0, u, BoundFamily.general, sd)
        assert both.branch == "two_sided"
        assert both.raw_bound == pytest.approx(upper.raw_bound + lower.raw_bound)

    assert BoundsService.lower_tail(symmetric, 3.0, 0.0, BoundFamily.general, sd).bound == 1.0
    with pytest.raises(OutOfRangeError):
        BoundsService.lower_tail(symmetric, 3.0, 0.1, BoundFamily.general, sd)


def test_iid_sum_bound():
    single = BoundsService.iid_sum_bound(lambda u: 0.1, 1, 0.5, prefactor=1.0)
    assert single.bound == pytest.approx(math.exp(-0.1))
    pair = BoundsService.iid_sum_bound(lambda u: 0.1, 2, 0.5, prefactor=1.0)
    assert pair.bound == pytest.approx(math.exp(-0.2))
    assert "product_prefactor" in pair.notes
    spread = BoundsService.iid_sum_bound(lambda u: 0.1, 3, 0.5, t=2.0, prefactor=1.2)
    assert spread.bound == pytest.approx(1.2 ** 3 * math.exp(-0.6))
    assert spread.bound_single_prefactor == pytest.approx(1.2 * math.exp(-0.6))
    with pytest.raises(OutOfRangeError):
        BoundsService.iid_sum_bound(lambda u: 0.1, 0, 0.5)


def test_bound_curve_and_dispatch(two_state, spectral):
    sd = spectral(two_state)
    grid = np.linspace(0.0, 0.9, 5)
    curve = BoundsService.bound_curve(two_state, 2.0, grid, BoundFamily.perturbation, sd)
    assert len(curve.points) == 5
    assert curve.branches == ["a"]
    assert curve.parameters.gap == pytest.approx(3.0)
    assert all(0.0 <= p.bound <= 1.0 for p in curve.points)

    fs_point = BoundsService.bound(two_state, 2.0, 0.3, BoundFamily.fsobolev, sd, fs=FSobolevFunction.log_sobolev(0.5))
    assert fs_point.family == BoundFamily.fsobolev
    with pytest.raises(ModelValidationError):
        BoundsService.bound(two_state, 2.0, 0.3, BoundFamily.fsobolev, sd)
    with pytest.raises(ModelValidationError):
        BoundsService.bound_general(two_state, 0.0, 0.3, sd)
