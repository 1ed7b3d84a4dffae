"""Nox sessions."""
import nox

PYTHON_VERSIONS = ["3.9", "3.11", "3.12"]
nox.options.sessions = ["tests", "mypy"]


@nox.session(python=PYTHON_VERSIONS)
def tests(session: nox.Session) -> None:
    """Run the fast test suite."""
    session.install("-e", ".[test]")
    session.run("pytest", "-m", "not slow", *session.posargs)


@nox.session(python=PYTHON_VERSIONS[-1])
def tests_slow(session: nox.Session) -> None:
    """Run the full-size experiment tests."""
    session.install("-e", ".[test]")
    session.run("pytest", "-m", "slow", *session.posargs)


@nox.session(python=PYTHON_VERSIONS[-1])
def mypy(session: nox.Session) -> None:
    """Type-check the package."""
    session.install("-e", ".", "mypy")
    session.run("mypy", "src")
