import pytest

from scopekit.catalog import load_default_catalog
from scopekit.schema import load_default_schema
from scopekit.turtle import parse_turtle

from pathlib import Path

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "src" / "scopekit" / "fixtures"


@pytest.fixture(scope="session")
def schema():
    return load_default_schema()


@pytest.fixture(scope="session")
def catalog():
    return load_default_catalog()


@pytest.fixture(scope="session")
def scenario1():
    return parse_turtle((FIXTURE_DIR / "scenario1.ttl").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def scenario2():
    return parse_turtle((FIXTURE_DIR / "scenario2.ttl").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def scenario3():
    return parse_turtle((FIXTURE_DIR / "scenario3.ttl").read_text(encoding="utf-8"))


def fixture_text(name: str) -> str:
    return (FIXTURE_DIR / f"{name}.ttl").read_text(encoding="utf-8")
