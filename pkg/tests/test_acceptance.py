"""Acceptance criteria, one test each.

Every test prints a ``CRITERION <n> PASS|FAIL`` line followed by the
individual checks, so the outcome is readable in the plain pytest log.
"""

import pytest

from mtfa.verify import run_suite


def _report(capsys, number, title, results):
    ok = all(r.passed for r in results)
    with capsys.disabled():
        print(f"\nCRITERION {number} {'PASS' if ok else 'FAIL'}: {title}")
        for r in results:
            for line in r.lines():
                print(f"    {line}")
    return ok


def _criterion(capsys, number, title, *suites):
    results = [run_suite(name, seed=0) for name in suites]
    ok = _report(capsys, number, title, results)
    failed = [c.line() for r in results for c in r.checks if not c.passed]
    assert ok, "\n".join(failed)


def test_criterion_1_moyal(capsys):
    _criterion(capsys, 1, "Moyal identity (oracle and grid) within the runtime budget", "moyal")


def test_criterion_2_covariance_theorem(capsys):
    _criterion(capsys, 2, "covariance and Cohen multiplier on template matrices; A_st fails exact covariance",
               "covariance", "cohen")


def test_criterion_3_rescaled_stft(capsys):
    _criterion(capsys, 3, "general and fast paths agree; modulus of the rescaled STFT", "rescaled")


def test_criterion_4_path_consistency(capsys):
    _criterion(capsys, 4, "eight named distributions match their projections", "paths")


def test_criterion_5_frames(capsys):
    _criterion(capsys, 5, "canonical dual window for A_st and A_1/2 at a = b = 1/2; diagnostic at a = b = 1",
               "frames")


def test_criterion_6_inversion(capsys):
    _criterion(capsys, 6, "continuous inversion formula for A_st and A_1/2", "inversion")


def test_criterion_7_norms(capsys):
    _criterion(capsys, 7, "Rihaczek norm identity, chirp sweep divergence, equivalence envelopes", "modnorm")


@pytest.mark.slow
def test_criterion_8_factorization(capsys):
    _criterion(capsys, 8, "10^4 random factorizations within residual and runtime budgets", "factorization")
