import os
import subprocess
import sys

import pytest

from aptriples.arith import sieve_primes

SRC = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")


@pytest.fixture(scope="session")
def table_1m():
    return sieve_primes(10**6)


@pytest.fixture(scope="session")
def table_small():
    return sieve_primes(10**4)


def run_cli(*args, timeout=600):
    """Run the CLI in a subprocess with src/ on the path."""
    env = dict(os.environ)
    env["PYTHONPATH"] = SRC + os.pathsep + env.get("PYTHONPATH", "")
    return subprocess.run(
        [sys.executable, "-m", "aptriples.cli", *map(str, args)],
        capture_output=True,
        text=True,
        timeout=timeout,
        env=env,
    )
