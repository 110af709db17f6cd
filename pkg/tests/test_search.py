import itertools
import random

import pytest

from conftest import TOY_GENERATORS, random_s_arithmetic_pair
from lrwitness.exact import IDENTITY, ProjectiveMatrix
from lrwitness.family import evaluate_word, from_generators, long_reid_generators
from lrwitness.search import (
    Frontier,
    FrontierCorruptError,
    FrontierVersionError,
    LayerEnumerator,
    MemoryBudgetExceeded,
    SearchConfig,
    SearchStats,
    bfs_search,
    load_frontier,
    mitm_search,
    persist_frontier,
    prime_factors,
)
from lrwitness.tree import is_vertex_stabilizer
from lrwitness.witness import classify_order
from lrwitness.words import LETTERS, is_reduced


def brute_force(gens, max_length, emit_torsion=False):
    """Evaluate every reduced word directly; shortlex-least word per element."""
    fam = from_generators(*gens)
    primes = SearchConfig(1, generators=gens).prime_support()
    best: dict[ProjectiveMatrix, str] = {}
    for n in range(max_length + 1):
        for letters in itertools.product(LETTERS, repeat=n):
            w = "".join(letters)
            if not is_reduced(w):
                continue
            m = evaluate_word(w, fam)
            if m not in best:
                best[m] = w
    out = {}
    for m, w in best.items():
        if m == IDENTITY or not is_vertex_stabilizer(m, primes):
            continue
        if classify_order(m).is_finite and not emit_torsion:
            continue
        out[m] = w
    return out, best


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(0)
    with pytest.raises(ValueError):
        SearchConfig(3, mode="dfs")
    assert SearchConfig(5, mode="mitm").half_depth == 3
    assert SearchConfig(6, mode="mitm").half_depth == 3
    assert SearchConfig(3).prime_support() == (2, 3)
    assert SearchConfig(3, generators=TOY_GENERATORS).prime_support() == (2,)


def test_prime_factors():
    assert prime_factors(64) == [2]
    assert prime_factors(-360) == [2, 3, 5]
    assert prime_factors(1) == []


def test_long_reid_short_search_is_empty():
    # brute force over all reduced words of length <= 4 finds no stabilizer element
    expected, _ = brute_force(long_reid_generators(), 4, emit_torsion=True)
    assert expected == {}
    assert list(bfs_search(SearchConfig(4, emit_torsion=True))) == []


def test_toy_group_length_one():
    recs = list(bfs_search(SearchConfig(1, generators=TOY_GENERATORS)))
    assert [r.word for r in recs] == ["b", "B"]
    assert recs[0].matrix.entries == (1, 1, 0, 1)
    assert not recs[0].order.is_finite
    assert {r.matrix for r in mitm_search(SearchConfig(1, mode="mitm", generators=TOY_GENERATORS))} == {
        r.matrix for r in recs
    }


def test_empty_word_never_emitted():
    for cfg in (SearchConfig(4, generators=TOY_GENERATORS, emit_torsion=True),
                SearchConfig(4, mode="mitm", generators=TOY_GENERATORS, emit_torsion=True)):
        recs = list(bfs_search(cfg) if cfg.mode == "bfs" else mitm_search(cfg))
        assert recs and all(r.word and r.matrix != IDENTITY for r in recs)


@pytest.mark.parametrize("max_length", [1, 2, 3, 4, 5, 6])
def test_bfs_matches_brute_force_toy(max_length):
    expected, _ = brute_force(TOY_GENERATORS, max_length, emit_torsion=True)
    recs = list(bfs_search(SearchConfig(max_length, generators=TOY_GENERATORS, emit_torsion=True)))
    assert {r.matrix: r.word for r in recs} == expected


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bfs_and_mitm_match_brute_force_random_groups(seed):
    gens = random_s_arithmetic_pair(random.Random(seed))
    expected, _ = brute_force(gens, 5, emit_torsion=True)
    for mode in ("bfs", "mitm"):
        cfg = SearchConfig(5, mode=mode, generators=gens, emit_torsion=True)
        got = list(bfs_search(cfg) if mode == "bfs" else mitm_search(cfg))
        assert {r.matrix for r in got} == set(expected)
        assert all(len(r.word) <= 5 for r in got)


def test_frontier_words_are_shortlex_least():
    gens = long_reid_generators()
    _, best = brute_force(gens, 6)
    enum = LayerEnumerator(gens)
    seen = {IDENTITY.entries: ""}
    for _ in range(6):
        seen.update(enum.step())
    assert {ProjectiveMatrix(*k): w for k, w in seen.items()} == best


def test_layer_sizes_bounded_by_free_group():
    stats = SearchStats()
    list(bfs_search(SearchConfig(8), stats))
    sizes = stats.layer_sizes
    assert sizes[:4] == [1, 4, 12, 36]
    for n, size in enumerate(sizes[1:], start=1):
        assert size <= 4 * 3 ** (n - 1)
    assert sizes == sorted(sizes)


def test_records_reproduce_on_re_evaluation():
    gens = random_s_arithmetic_pair(random.Random(7))
    fam = from_generators(*gens)
    for mode in ("bfs", "mitm"):
        cfg = SearchConfig(6, mode=mode, generators=gens)
        for rec in (bfs_search(cfg) if mode == "bfs" else mitm_search(cfg)):
            assert evaluate_word(rec.word, fam) == rec.matrix
            assert (rec.displacement2, rec.displacement3) == (0, 0)
            assert rec.order == classify_order(rec.matrix)


def test_odd_length_mitm_does_not_overshoot():
    gens = random_s_arithmetic_pair(random.Random(2))
    for L in (3, 5):
        b = {r.matrix for r in bfs_search(SearchConfig(L, generators=gens))}
        m = {r.matrix for r in mitm_search(SearchConfig(L, mode="mitm", generators=gens))}
        assert b == m


def test_parallel_expansion_is_identical():
    gens = random_s_arithmetic_pair(random.Random(9))
    serial = [r.to_json() for r in bfs_search(SearchConfig(6, generators=gens, emit_torsion=True))]
    parallel = [r.to_json() for r in bfs_search(SearchConfig(6, generators=gens, emit_torsion=True, workers=2))]
    assert serial == parallel


def test_deterministic_streams():
    gens = random_s_arithmetic_pair(random.Random(2))
    for mode in ("bfs", "mitm"):
        cfg = SearchConfig(6, mode=mode, generators=gens, emit_torsion=True)
        run = lambda: "".join(r.to_json() + "\n" for r in (bfs_search(cfg) if mode == "bfs" else mitm_search(cfg)))
        assert run() == run()


def test_memory_budget_abort():
    stats = SearchStats()
    with pytest.raises(MemoryBudgetExceeded) as info:
        list(bfs_search(SearchConfig(12, memory_budget=2_000_000), stats))
    assert info.value.last_completed_layer == stats.layers
    assert 0 < stats.layers < 12


# --- persistence ---------------------------------------------------------------


def test_frontier_round_trip_layer_zero(tmp_path):
    f = Frontier(0, {IDENTITY.entries: ""})
    path = tmp_path / "f0.txt"
    persist_frontier(f, path)
    assert load_frontier(path) == f


def test_frontier_round_trip_layer_three(tmp_path):
    enum = LayerEnumerator(long_reid_generators())
    for _ in range(3):
        enum.step()
    f = enum.frontier()
    path = tmp_path / "f3.txt"
    persist_frontier(f, path)
    g = load_frontier(path)
    assert g == f
    assert len(g.elements) == 36 and len(g.previous) == 12


def test_truncated_frontier_is_corrupt(tmp_path):
    enum = LayerEnumerator(long_reid_generators())
    for _ in range(3):
        enum.step()
    path = tmp_path / "f.txt"
    persist_frontier(enum.frontier(), path)
    data = path.read_bytes()
    for cut in (len(data) - 1, len(data) // 2, 30):
        path.write_bytes(data[:cut])
        with pytest.raises(FrontierCorruptError):
            load_frontier(path)


def test_frontier_version_mismatch(tmp_path):
    path = tmp_path / "f.txt"
    persist_frontier(Frontier(0, {IDENTITY.entries: ""}), path)
    path.write_text(path.read_text().replace("lrwitness-frontier 1", "lrwitness-frontier 99"))
    with pytest.raises(FrontierVersionError):
        load_frontier(path)


def test_resume_continues_stream(tmp_path):
    gens = random_s_arithmetic_pair(random.Random(1))
    full = [r.to_json() for r in bfs_search(SearchConfig(6, generators=gens, emit_torsion=True))]
    ckpt = tmp_path / "ckpt.txt"
    head = [r.to_json() for r in bfs_search(SearchConfig(3, generators=gens, emit_torsion=True, persist_path=ckpt))]
    assert load_frontier(ckpt).layer == 3
    tail = [
        r.to_json()
        for r in bfs_search(SearchConfig(6, generators=gens, emit_torsion=True, resume_from=ckpt))
    ]
    assert head + tail == full
    assert all(len(r) for r in tail)


def test_resume_with_other_generators_rejected(tmp_path):
    ckpt = tmp_path / "ckpt.txt"
    list(bfs_search(SearchConfig(2, persist_path=ckpt)))
    with pytest.raises(Exception, match="different generators"):
        list(bfs_search(SearchConfig(4, generators=TOY_GENERATORS, resume_from=ckpt)))
