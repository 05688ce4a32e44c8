import pytest
from hypothesis import HealthCheck, settings

from preassess import graph as graphmod
from preassess.store import bundled_fixture, parse_counts_csv, parse_episodes_csv

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def graph():
    return graphmod.load_graph(bundled_fixture("sql_ontology.json"))


@pytest.fixture(scope="session")
def episodes():
    return parse_episodes_csv(bundled_fixture("episode_records.csv"))


@pytest.fixture(scope="session")
def cohort():
    return parse_counts_csv(bundled_fixture("cohort_counts.csv"))


@pytest.fixture(scope="session")
def single_student():
    return parse_counts_csv(bundled_fixture("single_student_counts.csv"))
