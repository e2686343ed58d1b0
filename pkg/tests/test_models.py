import numpy as np
import pytest

from app.lib.errors import (
    BranchAmbiguity,
    ConfigError,
    DomainError,
    NoClosedForm,
    NoSimGraph,
    SingularState,
    SolutionPole,
    UnknownModel,
)
from app.ops.models import (
    CustomModel,
    DavisSkodjeModel,
    DavisSkodjeParams,
    FlowCoefficients,
    LinearModel,
    LinearModelParams,
    MichaelisMentenModel,
    MichaelisMentenParams,
    build_model,
)

COMPLEX_STATE = np.array([0.7 + 0.3j, 0.2 - 0.4j])


def test_davis_skodje_field_and_real_inputs_stay_real(ds3):
    f = ds3.eval_field([1.0, 0.5])
    # −γ·0.5 + ((γ−1) + γ)/4 = −1.5 + 1.25
    np.testing.assert_allclose(f, [-1.0, -0.25])
    assert f.dtype == complex
    assert np.all(f.imag == 0)


@pytest.mark.parametrize(
    "model",
    [
        DavisSkodjeModel(DavisSkodjeParams(3.0)),
        LinearModel.diagonal(-1.0, -2.0),
        MichaelisMentenModel(MichaelisMentenParams(10.0)),
        MichaelisMentenModel(MichaelisMentenParams(10.0, fast_sign="positive_z2")),
    ],
)
def test_jacobian_matches_finite_differences(model):
    assert model.check_jacobian(COMPLEX_STATE) < 1e-6

    # Re z₁ ≥ 0 keeps every state clear of the z₁ = −1 locus
    rng = np.random.default_rng(11)
    states = rng.uniform(0.0, 2.0, size=(100, 2)) + 1j * rng.uniform(-1.0, 1.0, size=(100, 2))
    assert max(model.check_jacobian(z) for z in states) < 1e-6


def test_singular_locus_rejects_evaluation(ds3):
    with pytest.raises(SingularState):
        ds3.eval_field([-1.0, 0.0])


def test_gamma_must_exceed_one():
    with pytest.raises(ConfigError):
        DavisSkodjeParams(1.0)
    with pytest.raises(ConfigError):
        MichaelisMentenParams(0.5)


def test_davis_skodje_closed_form_reproduces_initial_point(ds3):
    z0 = np.array([1.0, 0.9])
    coeffs = ds3.fit_coefficients(z0)
    np.testing.assert_allclose(coeffs.c, [1.0, 0.4])
    np.testing.assert_allclose(ds3.closed_form_solution(coeffs, 0.0), z0)


def test_davis_skodje_closed_form_solves_the_field(ds3):
    coeffs = FlowCoefficients([2.0, 0.3])
    t, h = 0.3 + 0.7j, 1e-6
    derivative = (ds3.closed_form_solution(coeffs, t + h) - ds3.closed_form_solution(coeffs, t - h)) / (2 * h)
    np.testing.assert_allclose(derivative, ds3.eval_field(ds3.closed_form_solution(coeffs, t)), atol=1e-8)


def test_davis_skodje_closed_form_pole(ds3):
    with pytest.raises(SolutionPole):
        ds3.closed_form_solution(FlowCoefficients([1.0, 0.0]), 1j * np.pi)


def test_davis_skodje_sim_graph(ds3):
    assert ds3.sim_graph(1.0) == pytest.approx(0.5)
    assert ds3.fit_coefficients([3.0, ds3.sim_graph(3.0)]).c[1] == pytest.approx(0.0)
    with pytest.raises(DomainError):
        ds3.sim_graph(-2.0)


def test_davis_skodje_analytic_spectrum_large_c1(ds10):
    lines = ds10.analytic_spectrum(FlowCoefficients([2.0, 0.3]))
    by_key = {(line.component, line.xi): line.amplitude for line in lines}

    assert by_key[(0, -1.0)] == pytest.approx(2.0)
    assert by_key[(1, -10.0)] == pytest.approx(0.3)
    # w/(1+w) = Σ (−1)^k c₁^{−k} e^{ikτ}
    assert by_key[(1, 0.0)] == pytest.approx(1.0)
    assert by_key[(1, 1.0)] == pytest.approx(-0.5)
    assert by_key[(1, 2.0)] == pytest.approx(0.25)
    assert all(line.xi >= 0 for line in lines if line.component == 1 and line.xi != -10.0)


def test_davis_skodje_analytic_spectrum_small_c1(ds3):
    lines = ds3.analytic_spectrum(FlowCoefficients([0.5, 0.0]))
    comb = {line.xi: line.amplitude for line in lines if line.component == 1}
    assert comb[-1.0] == pytest.approx(0.5)
    assert comb[-2.0] == pytest.approx(-0.25)
    assert comb[-3.0] == pytest.approx(0.125)
    assert all(xi < 0 for xi in comb)


def test_davis_skodje_analytic_spectrum_preconditions(ds3):
    with pytest.raises(BranchAmbiguity):
        ds3.analytic_spectrum(FlowCoefficients([1.0, 0.0]))
    with pytest.raises(DomainError):
        ds3.analytic_spectrum(FlowCoefficients([0.0, 0.1]))
    with pytest.raises(DomainError):
        ds3.analytic_spectrum(FlowCoefficients([1.0 + 1.0j, 0.1]))


def test_linear_model_closed_form_and_comb(linear12):
    coeffs = linear12.fit_coefficients([1.0, 1.0])
    np.testing.assert_allclose(linear12.closed_form_solution(coeffs, 1j * np.pi), [-1.0, 1.0], atol=1e-12)

    lines = linear12.analytic_spectrum(coeffs)
    assert [(line.component, line.xi) for line in lines] == [(0, -1.0), (1, -2.0)]
    assert all(line.amplitude == pytest.approx(1.0) for line in lines)
    with pytest.raises(NoSimGraph):
        linear12.sim_graph(1.0)


def test_linear_model_from_eigenpairs():
    params = LinearModelParams.from_eigenpairs([-1.0, -3.0], np.array([[1.0, 1.0], [0.0, 1.0]]))
    np.testing.assert_allclose(params.matrix @ [1.0, 1.0], [-3.0, -3.0])
    np.testing.assert_allclose(params.matrix @ [1.0, 0.0], [-1.0, 0.0])


def test_linear_model_rejects_rotation():
    with pytest.raises(ConfigError):
        LinearModelParams.from_matrix([[0.0, 1.0], [-1.0, 0.0]])


def test_linear_model_slow_span():
    model = LinearModel(LinearModelParams.from_eigenpairs([-1.0, -100.0], np.array([[1.0, 1.0], [0.0, 1.0]])))
    slow = model.slow_eigenvectors(1)
    np.testing.assert_allclose(slow[0], [1.0, 0.0])
    assert model.distance_to_slow_span([2.0, 0.0], 1) == pytest.approx(0.0)
    assert model.distance_to_slow_span([0.0, 1.0], 1) == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        model.slow_eigenvectors(3)


def test_michaelis_menten_sim_graph_orders(mm10):
    assert mm10.sim_graph(1.0, order=0) == pytest.approx(0.5)
    assert mm10.sim_graph(1.0, order=1) == pytest.approx(0.525)
    # ε²·z₁(1 − 5z₁/2)/(2(1+z₁))⁷ at z₁ = 1
    assert mm10.sim_graph(1.0, order=2) == pytest.approx(0.525 - 0.015 / 4**7)


def test_michaelis_menten_ungrouped_denominator():
    model = MichaelisMentenModel(MichaelisMentenParams(10.0), eps2_grouping="ungrouped")
    assert model.sim_graph(1.0, order=2) == pytest.approx(0.525 - 0.015 / (2 * 2**7))


@pytest.mark.parametrize("gamma", [10.0, 40.0])
@pytest.mark.parametrize("grouping", ["grouped", "ungrouped"])
def test_michaelis_menten_sim_orders_shrink(gamma, grouping):
    model = MichaelisMentenModel(MichaelisMentenParams(gamma), eps2_grouping=grouping)
    for z1 in np.linspace(0.0, 5.0, 26):
        order0, order1, order2 = (model.sim_graph(z1, order=k) for k in range(3))
        assert abs(order2 - order1) <= 5 * model.eps * abs(order1 - order0)


def test_michaelis_menten_fast_sign(mm10):
    positive = MichaelisMentenModel(MichaelisMentenParams(10.0, fast_sign="positive_z2"))
    np.testing.assert_allclose(mm10.eval_field([0.0, 1.0]), [0.05, -1.0])
    np.testing.assert_allclose(positive.eval_field([0.0, 1.0]), [0.05, 1.0])
    with pytest.raises(NoClosedForm):
        mm10.fit_coefficients([1.0, 0.5])


def test_fixed_point_and_stability(ds10, mm10):
    np.testing.assert_allclose(ds10.find_fixed_point(), [0.0, 0.0], atol=1e-14)
    assert ds10.is_attracting(np.zeros(2))
    assert mm10.is_attracting(mm10.find_fixed_point())


def test_custom_model_checks_jacobian():
    def field(z):
        return np.array([-z[0] ** 2])

    good = CustomModel("square", 1, field, lambda z: np.array([[-2 * z[0]]]), probe_state=[0.5])
    assert good.eval_field([2.0]) == pytest.approx(-4.0)
    with pytest.raises(ConfigError):
        CustomModel("square", 1, field, lambda z: np.array([[-z[0]]]), probe_state=[0.5])


def test_registry():
    model = build_model("davis-skodje", gamma=5.0)
    assert isinstance(model, DavisSkodjeModel)
    assert model.gamma == 5.0

    linear = build_model("linear", eigenvalues=[-1.0, -3.0], eigenvectors=[[1.0, 0.0], [1.0, 1.0]])
    np.testing.assert_allclose(linear.linear_params.eigenvectors[:, 1], [1.0, 1.0])

    with pytest.raises(UnknownModel):
        build_model("lorenz")
    with pytest.raises(ConfigError):
        build_model("davis-skodje")
