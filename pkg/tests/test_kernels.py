import numpy as np
import pytest

from metric_forge import _pykernels, kernels

compiled = kernels.compiled_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def random_ranks(rng, n, levels=4, density=0.8):
    r = rng.integers(0, levels, size=(n, n))
    r[rng.random((n, n)) > density] = -1
    np.fill_diagonal(r, -1)
    return r.astype(np.int64)


@pytest.fixture(params=["python", "compiled"])
def backend(request):
    if request.param == "compiled":
        if compiled is None:
            pytest.skip("compiled kernels not built")
        return compiled
    return _pykernels


def test_pair_index_is_lexicographic(backend):
    n = 6
    idx = [backend.pair_index(lo, hi, n) for lo in range(n) for hi in range(lo + 1, n)]
    assert idx == list(range(n * (n - 1) // 2))
    assert backend.pair_index(4, 1, n) == backend.pair_index(1, 4, n)


def test_toposort_prefers_smallest(backend):
    # 2 -> 0, 1 -> 2
    indptr = np.array([0, 0, 1, 2], dtype=np.int64)
    indices = np.array([2, 0], dtype=np.int64)
    assert backend.lex_toposort(3, indptr, indices).tolist() == [1, 2, 0]
    cyc = backend.lex_toposort(2, np.array([0, 1, 2]), np.array([1, 0]))
    assert len(cyc) == 0


def test_empty_inputs(backend):
    r = np.full((3, 3), -1, dtype=np.int64)
    assert backend.build_edges(r).shape == (0, 2)
    assert backend.compat_violations(r, r).shape == (0, 3)
    assert len(backend.premise_search(r, 5)) == 0


@needs_compiled
@pytest.mark.parametrize("trial", range(25))
def test_backends_agree(trial):
    rng = np.random.default_rng(trial)
    n = int(rng.integers(2, 9))
    rf = random_ranks(rng, n)
    rd = random_ranks(rng, n, levels=6, density=1.0)
    assert np.array_equal(compiled.build_edges(rf), _pykernels.build_edges(rf))
    assert np.array_equal(compiled.compat_violations(rf, rd), _pykernels.compat_violations(rf, rd))
    ml = min(n * (n - 1) // 2 + 1, 7)
    assert np.array_equal(compiled.premise_search(rf, ml), _pykernels.premise_search(rf, ml))
    edges = _pykernels.build_edges(rf)
    k = n * (n - 1) // 2
    indptr = np.zeros(k + 1, dtype=np.int64)
    np.add.at(indptr, edges[:, 0] + 1, 1)
    indptr = np.cumsum(indptr)
    assert np.array_equal(compiled.lex_toposort(k, indptr, edges[:, 1].copy()),
                          _pykernels.lex_toposort(k, indptr, edges[:, 1].copy()))
    d = rng.integers(1, 10, size=(n, n))
    d = d + d.T
    np.fill_diagonal(d, 0)
    assert np.array_equal(compiled.triangle_violations(d.astype(np.int64)),
                          _pykernels.triangle_violations(d.astype(np.int64)))
    df = d / 7.0
    assert np.array_equal(compiled.triangle_violations(df, 1e-12, 3),
                          _pykernels.triangle_violations(df, 1e-12, 3))


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@needs_compiled
def test_benchmark_script_runs(capsys):
    import runpy
    from pathlib import Path

    bench = runpy.run_path(str(Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"))
    assert bench["main"](["--m", "3", "--repeat", "1"]) == 0
    out = capsys.readouterr().out
    assert "triangle_violations" in out and "disagree" not in out
