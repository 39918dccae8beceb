import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from solitonlab.energy import (
    CurvatureEnergy,
    EnergyKind,
    FlowMode,
    SolitonProblem,
    curvature_range,
    el_residual,
    energy_from_flow,
    evaluate,
    first_integral,
    flow_from_energy,
    tangential_term,
)
from solitonlab.errors import DegenerateEnergy, DomainError, NoSolitonError, RangeEmpty

from conftest import sech

exponents = st.sampled_from([-2.0, -1.0, -0.5, 1 / 3, 0.5, 1.5, 2.0, 3.0, 4.0])
lambdas = st.floats(-3, 3, allow_nan=False)
positive_kappa = st.floats(0.05, 20.0)


def energies():
    power = st.builds(CurvatureEnergy.power, exponents, lambdas)
    return st.one_of(power, st.builds(CurvatureEnergy.entropy, lambdas),
                     st.builds(CurvatureEnergy.log, lambdas))


# -- evaluate ------------------------------------------------------------------

def test_evaluate_power_two():
    jet = evaluate(CurvatureEnergy.power(2, 0), 3.0)
    assert (jet.P, jet.dP, jet.ddP, jet.dddP) == (9.0, 6.0, 2.0, 0.0)


def test_evaluate_entropy_at_one():
    jet = evaluate(CurvatureEnergy.entropy(5.0), 1.0)
    assert jet.P == 5.0 and jet.dP == 1.0 and jet.ddP == 1.0


def test_evaluate_square_root():
    jet = evaluate(CurvatureEnergy.power(0.5, 0.0), 4.0)
    assert jet.P == pytest.approx(2.0, rel=1e-15)
    assert jet.dP == pytest.approx(0.25, rel=1e-15)
    assert jet.ddP == pytest.approx(-0.03125, rel=1e-15)


@pytest.mark.parametrize("energy", [
    CurvatureEnergy.power(0.5, 0.0), CurvatureEnergy.power(-1.0, 0.0),
    CurvatureEnergy.entropy(0.0), CurvatureEnergy.log(1.0)])
@pytest.mark.parametrize("kappa", [0.0, -1.0])
def test_convexity_required(energy, kappa):
    assert energy.requires_convexity
    with pytest.raises(DomainError):
        evaluate(energy, kappa)


def test_integer_power_accepts_negative_curvature():
    jet = evaluate(CurvatureEnergy.power(3, 1.0), -2.0)
    assert (jet.P, jet.dP, jet.ddP, jet.dddP) == (-7.0, 12.0, -12.0, 6.0)


def test_evaluate_is_vectorised():
    k = np.linspace(0.5, 2.0, 7)
    jet = evaluate(CurvatureEnergy.log(0.0), k)
    np.testing.assert_allclose(jet.P, np.log(k), rtol=1e-15)
    np.testing.assert_allclose(jet.dddP, 2.0 / k**3, rtol=1e-15)


@given(energies(), positive_kappa)
def test_derivatives_match_central_differences(energy, kappa):
    h = 1e-5
    lo, mid, hi = evaluate(energy, kappa - h), evaluate(energy, kappa), evaluate(energy, kappa + h)
    for f_lo, f_hi, deriv in ((lo.P, hi.P, mid.dP), (lo.dP, hi.dP, mid.ddP),
                              (lo.ddP, hi.ddP, mid.dddP)):
        fd = (f_hi - f_lo) / (2 * h)
        scale = max(abs(deriv), abs(f_hi) + abs(f_lo), 1e-3)
        # FD truncation ~ h^2 * f''' / 6, roundoff ~ eps * |f| / h
        assert abs(fd - deriv) <= 1e-6 * scale


# -- dictionary ----------------------------------------------------------------

def test_energy_from_flow_examples():
    assert energy_from_flow(SolitonProblem.power(2, b=1.0)) == CurvatureEnergy.power(2, -1.0)
    assert energy_from_flow(SolitonProblem.power(1, b=0.0)) == CurvatureEnergy.entropy(0.0)
    assert energy_from_flow(SolitonProblem.logarithmic(b=0.0)) == CurvatureEnergy.log(1.0)


def test_flow_from_energy_examples():
    gr = flow_from_energy(CurvatureEnergy.entropy(0.0), 1.0)
    assert (gr.mode, gr.p, gr.a, gr.b, gr.V) == (FlowMode.POWER, 1.0, 1.0, 0.0, (0.0, 1.0))
    cat = flow_from_energy(CurvatureEnergy.power(0.5, 0.0), 0.25)
    assert (cat.p, cat.a, cat.b) == (0.5, -1.0, 0.0)
    cyc = flow_from_energy(CurvatureEnergy.power(-1.0, 0.0), 64.0)
    assert (cyc.p, cyc.a, cyc.b) == (-1.0, -4.0, 0.0)
    log = flow_from_energy(CurvatureEnergy.log(1.0), 4.0)
    assert (log.mode, log.a, log.b) == (FlowMode.LOG, -2.0, 0.0)


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_degenerate_power_refused(p):
    energy = CurvatureEnergy.power(p, 1.0)
    assert energy.is_degenerate
    with pytest.raises(DegenerateEnergy):
        flow_from_energy(energy, 1.0)
    assert issubclass(DegenerateEnergy, NoSolitonError)


def test_length_functional_message():
    with pytest.raises(DegenerateEnergy, match="length functional"):
        flow_from_energy(CurvatureEnergy.power(0.0, 1.0), 1.0)


def test_affine_energy_residual_reduces():
    # P = kappa + lambda has P'' = 0 and EL = -lambda * kappa
    energy = CurvatureEnergy.power(1.0, 0.7)
    k = np.array([0.3, 1.0, 2.5])
    np.testing.assert_allclose(evaluate(energy, k).ddP, 0.0)
    np.testing.assert_allclose(el_residual(energy, k, 0.4, -1.2), -0.7 * k, rtol=1e-14)


@given(st.one_of(exponents, st.just(1.0)), st.floats(-3, 3, allow_nan=False))
def test_round_trip_flow_energy_flow(p, b):
    problem = SolitonProblem.power(p, a=1.0, b=b)
    back = flow_from_energy(energy_from_flow(problem), 1.0)
    assert back.mode is FlowMode.POWER and back.p == p
    # b(1 - p) / (1 - p) may differ from b by one rounding
    assert back.b == pytest.approx(b, rel=2.3e-16, abs=1e-300)


@given(st.floats(-3, 3, allow_nan=False))
def test_round_trip_log(b):
    back = flow_from_energy(energy_from_flow(SolitonProblem.logarithmic(b=b)), 2.0)
    assert back.mode is FlowMode.LOG and back.b == pytest.approx(b, rel=2.3e-16, abs=1e-15)


@given(energies(), st.floats(0.1, 9.0))
def test_round_trip_energy_flow_energy(energy, d):
    back = energy_from_flow(flow_from_energy(energy, d))
    assert back.kind is energy.kind and back.p == energy.p
    assert back.lam == pytest.approx(energy.lam, rel=2.3e-16, abs=5e-16)


@pytest.mark.parametrize("p,b", [(2, 0), (2, 1), (0.5, 0), (1 / 3, 0), (-1, 0), (1, 0), (1, -1)])
def test_listed_round_trips_are_exact(p, b):
    problem = SolitonProblem.power(p, b=b)
    back = flow_from_energy(energy_from_flow(problem), 1.0)
    assert (back.p, back.b) == (problem.p, problem.b)


@given(energies(), st.sampled_from([0.25, 1.0, 4.0]), st.floats(0.0, 1.0))
def test_matching_relation(energy, d, u):
    try:
        rng = curvature_range(energy, d)
    except NoSolitonError:
        return
    hi = rng.hi if math.isfinite(rng.hi) else rng.lo * 10
    lo = rng.lo if rng.lo > 0 else hi * 1e-3
    kappa = lo + u * (hi - lo)
    problem = flow_from_energy(energy, d)
    lhs = (problem.speed_law(kappa) + problem.b) / problem.a
    rhs = tangential_term(energy, kappa) / math.sqrt(d)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


def test_problem_validation():
    with pytest.raises(ValueError):
        SolitonProblem.power(2, a=0.0)
    with pytest.raises(ValueError):
        SolitonProblem.power(2, V=(1.0, 1.0))
    with pytest.raises(DomainError):
        SolitonProblem.logarithmic().speed_law(0.0)


# -- residuals -------------------------------------------------------------------

def test_el_residual_grim_reaper():
    k = sech(1.0)
    ks = -sech(1.0) * math.tanh(1.0)
    kss = sech(1.0) * math.tanh(1.0) ** 2 - sech(1.0) ** 3
    assert abs(el_residual(CurvatureEnergy.entropy(0.0), k, ks, kss)) < 1e-12


def test_el_residual_unit_circle_power_two():
    assert el_residual(CurvatureEnergy.power(2, 1.0), 1.0, 0.0, 0.0) == 0.0


def test_el_residual_catenary():
    s = 2.0
    k, ks, kss = 1 / (1 + s * s), -2 * s / (1 + s * s) ** 2, (6 * s * s - 2) / (1 + s * s) ** 3
    assert abs(el_residual(CurvatureEnergy.power(0.5, 0.0), k, ks, kss)) < 1e-12


def test_first_integral_families():
    s = np.linspace(-3.5, 3.5, 21)
    cat = first_integral(CurvatureEnergy.power(0.5, 0), 1 / (1 + s * s), -2 * s / (1 + s * s) ** 2)
    np.testing.assert_allclose(cat, 0.25, atol=1e-14)
    gr = first_integral(CurvatureEnergy.entropy(0), sech(s), -sech(s) * np.tanh(s))
    np.testing.assert_allclose(gr, 1.0, atol=1e-14)
    rho = np.sqrt(16 - s * s)
    cyc = first_integral(CurvatureEnergy.power(-1, 0), 1 / rho, s / rho**3)
    np.testing.assert_allclose(cyc, 64.0, rtol=1e-13)


@given(st.floats(-4, 4))
def test_first_integral_conserved_along_grim_reaper(s):
    # d/ds of the first integral, by the chain rule, vanishes where EL does
    energy = CurvatureEnergy.entropy(0.0)
    k, ks = sech(s), -sech(s) * np.tanh(s)
    kss = sech(s) * np.tanh(s) ** 2 - sech(s) ** 3
    jet = evaluate(energy, k)
    f = tangential_term(energy, k)
    g = jet.ddP * ks
    dg = jet.dddP * ks * ks + jet.ddP * kss
    df = k * jet.ddP * ks
    assert abs(2 * g * dg + 2 * f * df) < 1e-12


# -- curvature range --------------------------------------------------------------

@pytest.mark.parametrize("energy,d,lo,hi", [
    (CurvatureEnergy.entropy(0.0), 1.0, 0.0, 1.0),
    (CurvatureEnergy.entropy(1.8), 1.0, 0.8, 2.8),
    (CurvatureEnergy.entropy(1.0), 0.25, 0.5, 1.5),
    (CurvatureEnergy.power(2, 0.0), 16.0, 0.0, 2.0),
    (CurvatureEnergy.power(-1, 0.0), 64.0, 0.25, math.inf),
    (CurvatureEnergy.log(1.0), 1.0, math.exp(-1), math.e),
])
def test_curvature_range(energy, d, lo, hi):
    rng = curvature_range(energy, d)
    assert rng.lo == pytest.approx(lo, rel=1e-12, abs=0)
    assert rng.hi == pytest.approx(hi, rel=1e-12)
    assert rng.vertex in rng
    assert rng.lo_open == (lo == 0.0)


def test_range_empty():
    # f = kappa**2 + 1 never reaches sqrt(d) = 1 for kappa > 0
    with pytest.raises(RangeEmpty):
        curvature_range(CurvatureEnergy.power(2, -1.0), 1.0)


def test_energy_kinds_and_labels():
    assert CurvatureEnergy.entropy(0.0).kind is EnergyKind.ENTROPY
    assert "entropy" in CurvatureEnergy.entropy(0.0).label()
    with pytest.raises(ValueError):
        CurvatureEnergy(EnergyKind.LOG, 0.0, p=2.0)
