import pytest

from cartankak.partition import (
    build_quotient_algebra,
    intrinsic_quotient_algebra,
    removing_process,
    standard_basis,
    standard_word_center,
)


@pytest.fixture(scope="session")
def word_qa():
    """Word-basis quotient algebras over the intrinsic center, by dimension."""
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = build_quotient_algebra(standard_word_center(n), standard_basis(n))
        return cache[n]

    return get


@pytest.fixture(scope="session")
def lambda_qa():
    """Lambda-basis quotient algebras (via the removing process off 2^p)."""
    cache = {}

    def get(n):
        if n not in cache:
            p = max(1, (n - 1).bit_length())
            qa = intrinsic_quotient_algebra(1 << p)
            cache[n] = qa if n == (1 << p) else removing_process(qa, n)
        return cache[n]

    return get
