import warnings

import pytest

from robust_beam import RobustBeamService, disable_robust_beam_warnings
from robust_beam.rblib.exceptions import CustomWarningCheck, RobustBeamWarning
from robust_beam.rblib.experiment_config import ExperimentConfig
from robust_beam.rblib.util import get_config


@pytest.fixture
def service(degenerate_config) -> RobustBeamService:
    return RobustBeamService(ExperimentConfig.from_dict(degenerate_config))


def test_robust_angle_as_dict_and_frame(service: RobustBeamService) -> None:
    summary = service.get_robust_angle()
    assert summary["status"] == "converged"
    assert summary["T"] == 4
    assert summary["theta_star_murad"] == pytest.approx(0.01)
    trace = service.get_robust_angle(T=2, as_df=True)
    assert list(trace.columns) == get_config()["columns"]["trace"]


def test_scheme_angles(service: RobustBeamService) -> None:
    angles = service.get_scheme_angles()
    assert set(angles) == {"SA", "AA"}
    assert angles["SA"] == service.config.alpha
    assert service.config.alpha <= angles["AA"] <= service.config.omega


def test_worst_case_sweep(service: RobustBeamService) -> None:
    sweep = service.get_worst_case_sweep()
    assert sorted(sweep) == ["2", "3"]
    assert set(sweep["2"]["schemes"]) == {"RA", "SA", "AA"}
    assert len(service.get_worst_case_sweep(as_df=True)) == 6


def test_stressed_sweep_robust_angle_dominates(stressed_config) -> None:
    service = RobustBeamService(ExperimentConfig.from_dict(stressed_config))
    epsilon = stressed_config["epsilon_gbps"]
    for T, horizon in service.get_worst_case_sweep().items():
        worst = {name: s["worst_sum_rate_gbps"] for name, s in horizon["schemes"].items()}
        assert worst["RA"] >= worst["AA"] - epsilon, T
        assert worst["AA"] >= worst["SA"], T
        robust = horizon["robust"]
        assert robust["lb_gbps"] <= robust["ub_gbps"] * (1.0 + 1e-9)
        assert worst["RA"] == pytest.approx(robust["worst_case_gbps"], rel=1e-12)


def test_monte_carlo_summary(service: RobustBeamService) -> None:
    summary = service.get_monte_carlo()
    assert summary["attempts"]["total"] >= 5
    assert summary["sampler"] == "uniform-rejection"
    assert len(service.get_monte_carlo(as_df=True)) == 5


def test_service_description_lists_schemes(service: RobustBeamService) -> None:
    text = str(service)
    assert '"solve_T": 4' in text
    assert '"RA"' in text


def test_robust_beam_warnings_can_be_silenced() -> None:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        CustomWarningCheck.sequential_sampler_warning()
        assert [w.category for w in caught] == [RobustBeamWarning]
        disable_robust_beam_warnings()
        CustomWarningCheck.sequential_sampler_warning()
        assert len(caught) == 1
