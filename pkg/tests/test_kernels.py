import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleanring import _kernels_py, kernels
from cleanring.matring import parse_ring
from cleanring.predicates import find_inner_inverses


def test_python_backend_always_available():
    assert "python" in kernels.available_backends()


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_switching(backend):
    assert kernels.backend() == backend


def test_m2f2_table(backend):
    table = kernels.matmul_table(2, 2)
    assert len(table) == 256
    one = 1 + 8  # digits (1,0,0,1)
    assert all(table[one * 16 + x] == x == table[x * 16 + one] for x in range(16))
    assert len(kernels.idempotents(table, 16)) == 8
    assert len(kernels.units(table, 16, one)) == 6


def test_m2f3_counts(backend):
    table = kernels.matmul_table(2, 3)
    N = 81
    one = 1 + 27
    assert len(kernels.units(table, N, one)) == 48
    assert len(kernels.idempotents(table, N)) == 14
    assert len(kernels.inner_inverses(table, N, 0)) == N


def test_rref(backend):
    rows, piv = kernels.rref_modp([[2, 4, 1], [1, 2, 0]], 5)
    assert piv == [0, 2]
    assert rows[0] == [1, 2, 0] and rows[1] == [0, 0, 1]


def test_monomial_nf(backend):
    lhs = [b"\x00\x00"]
    rhs = [None]
    word, steps = kernels.monomial_nf(b"\x01\x00\x00", lhs, rhs, [0])
    assert word is None and steps == [0]
    word, steps = kernels.monomial_nf(b"\x01\x00", lhs, rhs, [0])
    assert word == b"\x01\x00" and steps == []


def test_backends_agree_on_tables():
    if "cython" not in kernels.available_backends():
        pytest.skip("compiled extension not built")
    compiled = kernels.get_backend("cython")
    for n, p in ((2, 2), (2, 3), (3, 2)):
        assert list(compiled.matmul_table(n, p)) == list(_kernels_py.matmul_table(n, p))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=4, max_size=4), min_size=1, max_size=4))
def test_rref_backends_agree(rows):
    results = {name: kernels.get_backend(name).rref_modp(rows, 7) for name in kernels.available_backends()}
    first = next(iter(results.values()))
    assert all((list(map(list, r[0])), list(r[1])) == (list(map(list, first[0])), list(first[1]))
               for r in results.values())


def test_predicates_identical_across_backends():
    M = parse_ring("M2(F3)")
    rng = random.Random(1)
    samples = [M.random_element(rng) for _ in range(10)]
    answers = []
    previous = kernels.backend()
    try:
        for name in kernels.available_backends():
            kernels.use_backend(name)
            answers.append([len(find_inner_inverses(a, M)) for a in samples])
    finally:
        kernels.use_backend(previous)
    assert all(x == answers[0] for x in answers)


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    module_spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(bench)
    assert bench.main(["--repeat", "1", "--json"]) == 0
    assert "matmul_table M2(F3)" in capsys.readouterr().out
