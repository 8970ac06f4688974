"""Acceptance criteria, one test per criterion.

Each test prints a single pass line on success (visible with `pytest -rA`
or `-s`); assertions carry the details on failure.
"""

import math
import time

import pytest

from creach.cli import cerny, generate, main, serialize_automaton
from creach.core import StateSet, image, preimage
from creach.extension import (extension_length_budget,
                              find_short_properly_extending_word,
                              max_nested_boxes, max_nested_boxes_capped,
                              reach_word, reset_word)
from creach.oracle import (build_atlas, oracle_is_completely_reachable,
                           oracle_max_laminar, oracle_reset_threshold,
                           oracle_witnesses)
from creach.witness import find_all_witnesses, find_witness
from conftest import embed


@pytest.fixture(scope="module")
def fixture_files(tmp_path_factory):
    base = tmp_path_factory.mktemp("fixtures")
    files = {}
    for name, A in (("fig1", generate("fig1")), ("fig2", generate("fig2")),
                    ("cerny4", cerny(4)), ("cerny7", cerny(7))):
        path = base / f"{name}.dfa"
        path.write_text(serialize_automaton(A))
        files[name] = str(path)
    return files


@pytest.fixture(scope="module")
def cr_instances(suite500):
    return [A for A in suite500
            if A.n > 1 and oracle_is_completely_reachable(build_atlas(A))]


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_criterion_1_fig1_witnesses(capsys, fixture_files):
    start = time.perf_counter()
    code, out, _ = run_cli(capsys, "witnesses", fixture_files["fig1"])
    assert code == 1
    assert sorted(out.splitlines()) == ["{0,1,3,4}", "{0,2,3,5}", "{1,2,4,5}"]
    code, _, _ = run_cli(capsys, "check", fixture_files["fig1"])
    assert code == 1
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"PASS criterion 1: fig1 witnesses exact, check exits 1 "
          f"({elapsed:.3f}s)")


def test_criterion_2_fig2_check_and_short_extend(capsys, fixture_files, fig2):
    start = time.perf_counter()
    code, _, _ = run_cli(capsys, "check", fixture_files["fig2"])
    assert code == 0
    code, out, _ = run_cli(capsys, "extend", fixture_files["fig2"],
                           "--set", "0,10", "--short")
    assert code == 0
    word_line, set_line = out.splitlines()
    assert len(word_line) <= 22
    letters = [ord(c) - ord("a") for c in word_line]
    from creach.core import Word
    S = StateSet(12, [0, 10])
    P = preimage(fig2, S, Word(letters))
    assert len(P) > 2 and image(fig2, P, Word(letters)) == S
    assert set_line == "{" + ",".join(str(q) for q in P) + "}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"PASS criterion 2: fig2 reachable, short extension length "
          f"{len(letters)} <= 22 ({elapsed:.3f}s)")


def test_criterion_3_oracle_equivalence_sweep(suite500):
    start = time.perf_counter()
    for A in suite500:
        atlas = build_atlas(A)
        cr = oracle_is_completely_reachable(atlas)
        assert (find_witness(A) is None) == cr
        assert set(find_all_witnesses(A)) == set(oracle_witnesses(atlas))
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    print(f"PASS criterion 3: 500 random instances agree with the oracle "
          f"({elapsed:.1f}s)")


def test_criterion_4_bound_compliance_sweep(cr_instances):
    import itertools
    subsets = 0
    for A in cr_instances:
        n = A.n
        for r in range(1, n):
            for comb in itertools.combinations(range(n), r):
                S = StateSet(n, comb)
                w = find_short_properly_extending_word(A, S)
                assert len(w) <= 2 * n - math.ceil(n / (n - r))
                rw = reach_word(A, S)
                assert len(rw) <= math.ceil(extension_length_budget(n, r))
                assert image(A, StateSet.full(n), rw) == S
                subsets += 1
    assert subsets > 0
    print(f"PASS criterion 4: zero bound violations over "
          f"{len(cr_instances)} instances / {subsets} subsets")


def test_criterion_5_cerny_thresholds():
    A4 = cerny(4)
    assert oracle_reset_threshold(build_atlas(A4)) == 9
    w4 = reset_word(A4)
    assert len(image(A4, StateSet.full(4), w4)) == 1
    assert 9 <= len(w4) <= 12
    for n in range(5, 11):
        A = cerny(n)
        assert oracle_reset_threshold(build_atlas(A)) == (n - 1) ** 2
        w = reset_word(A)
        assert len(image(A, StateSet.full(n), w)) == 1
        assert len(w) <= math.ceil(extension_length_budget(n, 2)) + 1
    print("PASS criterion 5: Cerny 4..10 thresholds and reset-word bounds")


def test_criterion_6_nested_boxes_formulas():
    for n in range(1, 201):
        assert max_nested_boxes(n) == 2 * n - 1
        for k in range(1, n + 1):
            assert max_nested_boxes_capped(n, k) == oracle_max_laminar(n, k)
    print("PASS criterion 6: nested-boxes formulas exact for n <= 200")


def test_criterion_7_performance_smoke():
    find_witness(cerny(64))  # warm up the optional compiled kernel
    start = time.perf_counter()
    assert find_witness(cerny(1000)) is None
    t_cerny = time.perf_counter() - start
    assert t_cerny < 30.0
    start = time.perf_counter()
    assert find_witness(embed(1200)) is None
    t_embed = time.perf_counter() - start
    assert t_embed < 30.0
    print(f"PASS criterion 7: cerny 1000 in {t_cerny:.1f}s, 1200-state "
          f"analogue in {t_embed:.1f}s (< 30s each)")


def test_criterion_8_determinism(capsys, fixture_files):
    invocations = []
    for name, path in fixture_files.items():
        invocations += [
            ("check", path), ("witnesses", path), ("reset", path),
            ("oracle", path), ("verify", path),
            ("extend", path, "--set", "0"),
            ("extend", path, "--set", "0", "--short"),
            ("reach", path, "--set", "0"),
        ]
    invocations += [
        ("bounds", "--n", "12", "--size", "2"),
        ("gen", "fig1"), ("gen", "fig2"), ("gen", "cerny", "10"),
        ("gen", "random", "8", "3", "--seed", "5"),
    ]
    for argv in invocations:
        first = run_cli(capsys, *argv)
        second = run_cli(capsys, *argv)
        assert first == second, argv
    print(f"PASS criterion 8: {len(invocations)} invocations byte-identical "
          f"on repeat")
