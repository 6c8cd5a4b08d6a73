import numpy as np
import pytest

from hyplyap import winding as w
from hyplyap.monodromy import MonodromySet, build
from hyplyap.params import HGParams

from conftest import random_params

IDENT = ((1, 0), (0, 1))


def tautological_set():
    y = np.array(w.GEN_Y, dtype=complex)
    x = np.array(w.GEN_X, dtype=complex)
    return MonodromySet(2, y, np.linalg.inv(y) @ x, np.linalg.inv(x))


def letters_matrix(letters):
    m = IDENT
    for ch in letters:
        m = w.mat_mul(m, w._LETTER_MAT[ch])
    return m


class TestStepTable:
    def test_identity_left(self):
        word, nxt = w.step(0, "L")
        assert word == () and nxt == 1

    def test_two_lefts_give_y(self):
        word, nxt = w.step(1, "L")
        assert word == (("y", 1),) and nxt == 0

    def test_two_rights_give_x(self):
        word, nxt = w.step(2, "R")
        assert word == (("x", 1),) and nxt == 0

    def test_table_words_are_even(self):
        for entry in w.STEP_TABLE.values():
            lift = w.word_to_matrix(entry.word)
            assert w.mat_mod2(lift) == IDENT

    def test_cumulative_word_for_r4(self):
        coset = 0
        total = ()
        for _ in range(4):
            word, coset = w.step(coset, "R")
            total = w.word_mul(total, word)
        assert total == (("x", 2),) and coset == 0

    def test_exact_reconstruction_on_random_words(self, rng):
        for _ in range(1000):
            length = int(rng.integers(1, 1001))
            letters = ["L" if b else "R" for b in rng.integers(0, 2, size=length)]
            coset = 0
            word = ()
            for ch in letters:
                emitted, coset = w.step(coset, ch)
                word = w.word_mul(word, emitted)
            lhs = w.mat_mul(w.word_to_matrix(word), w.TRANSVERSAL[coset])
            rhs = letters_matrix(letters)
            assert lhs == rhs or lhs == w.mat_neg(rhs)

    def test_word_factorization_roundtrip(self, rng):
        for _ in range(300):
            pairs = []
            gen = "x" if rng.integers(0, 2) else "y"
            for _ in range(int(rng.integers(1, 8))):
                pairs.append((gen, int(rng.integers(1, 6)) * (1 if rng.integers(0, 2) else -1)))
                gen = "y" if gen == "x" else "x"
            word = w.word_reduce(pairs)
            lift = w.word_to_matrix(word)
            assert w.word_from_matrix(lift) == word


class TestRuns:
    def test_l4_from_identity(self):
        rho = w.representation(tautological_set())
        mat, event, coset = w.run_to_monodromy(0, "L", 4, rho)
        assert event == w.WindingEvent("B", 2, None)
        assert coset == 0
        y2 = np.array(w.word_to_matrix((("y", 2),)), dtype=complex)
        assert np.allclose(mat, y2) or np.allclose(mat, -y2)

    def test_r2_from_identity(self):
        rho = w.representation(tautological_set())
        mat, event, coset = w.run_to_monodromy(0, "R", 2, rho)
        assert event == w.WindingEvent("A", -1, None)
        assert coset == 0
        assert np.allclose(mat, np.array(w.GEN_X, float))

    def test_single_left_is_residual(self):
        rho = w.representation(tautological_set())
        mat, event, coset = w.run_to_monodromy(0, "L", 1, rho)
        assert np.allclose(mat, np.eye(2))
        assert event == w.WindingEvent("B", 0, "L")
        assert coset == 1

    def test_run_equals_letter_steps(self, rng):
        params = random_params(rng, 2)
        rho = w.representation(build(params))
        for _ in range(200):
            coset = int(rng.integers(0, 6))
            letter = "L" if rng.integers(0, 2) else "R"
            length = int(rng.integers(1, 40))
            prod = np.eye(2, dtype=complex)
            c = coset
            for _ in range(length):
                word, c = w.step(c, letter)
                prod = prod @ rho.word_matrix(word)
            mat, _, c_run = w.run_to_monodromy(coset, letter, length, rho)
            assert c_run == c
            assert np.allclose(prod, mat, atol=1e-9 * max(1.0, np.abs(mat).max()))

    def test_spectral_power_matches_exact_products(self, rng):
        params = random_params(rng, 3)
        rho = w.representation(build(params))
        for coset in range(6):
            for letter in "LR":
                base = rho._even_base[(coset, letter)]
                direct = np.eye(3, dtype=complex)
                for _ in range(80):
                    direct = direct @ base
                spec = rho.even_power(coset, letter, 80)
                assert np.abs(spec - direct).max() <= 1e-9 * max(1.0, np.abs(direct).max())

    def test_homomorphism_letter_vs_run_products(self, rng):
        params = random_params(rng, 2)
        rho = w.representation(build(params))
        for _ in range(50):
            length = int(rng.integers(2, 200))
            letters = []
            letter = "L" if rng.integers(0, 2) else "R"
            while len(letters) < length:
                run = int(rng.integers(1, 6))
                letters.extend([letter] * run)
                letter = "R" if letter == "L" else "L"
            # letter-by-letter
            coset = 0
            prod_letters = np.eye(2, dtype=complex)
            for ch in letters:
                word, coset = w.step(coset, ch)
                prod_letters = prod_letters @ rho.word_matrix(word)
            # run-by-run
            coset2 = 0
            prod_runs = np.eye(2, dtype=complex)
            i = 0
            while i < len(letters):
                j = i
                while j < len(letters) and letters[j] == letters[i]:
                    j += 1
                mat, _, coset2 = w.run_to_monodromy(coset2, letters[i], j - i, rho)
                prod_runs = prod_runs @ mat
                i = j
            assert coset == coset2
            scale = max(1.0, np.abs(prod_letters).max())
            assert np.abs(prod_letters - prod_runs).max() <= 1e-10 * scale


class TestRepresentation:
    def test_rank_one_scalar_case(self):
        rho = w.representation(build(HGParams([0.0], [0.5])))
        assert rho.generator("x")[0, 0] == pytest.approx(-1.0)
        assert rho.generator("y")[0, 0] == pytest.approx(1.0)

    def test_identity_representation(self):
        ms = MonodromySet(2, np.eye(2, dtype=complex), np.eye(2, dtype=complex),
                          np.eye(2, dtype=complex))
        rho = w.representation(ms)
        assert np.allclose(rho.word_matrix((("x", 3), ("y", -2))), np.eye(2))

    def test_cusp_one_loop_in_rank_one_class(self, rng):
        # x y^{-1} is parabolic around the third cusp: n-1 unit eigenvalues
        for n in (2, 3, 4):
            params = random_params(rng, n)
            rho = w.representation(build(params))
            mat = rho.word_matrix((("x", 1), ("y", -1)))
            eigs = np.linalg.eigvals(mat)
            close_to_one = np.sum(np.abs(eigs - 1.0) < 1e-6)
            assert close_to_one >= n - 1


class TestTriangles:
    def test_left_crossing_swaps_right_and_opposite(self):
        state = w.TriangleState("A", "B", "C", "white")
        assert w.triangle_step(state, "L") == w.TriangleState("A", "C", "B", "blue")

    def test_right_crossing_swaps_left_and_opposite(self):
        state = w.TriangleState("A", "B", "C", "white")
        assert w.triangle_step(state, "R") == w.TriangleState("C", "B", "A", "blue")

    def test_left_run_keeps_left_label(self):
        state = w.TriangleState("A", "B", "C", "white")
        for _ in range(4):
            state = w.triangle_step(state, "L")
            assert state.left == "A"

    def test_labels_remain_permutations(self, rng):
        state = w.triangle_state_for(0)
        for _ in range(500):
            letter = "L" if rng.integers(0, 2) else "R"
            state = w.triangle_step(state, letter)
            assert sorted((state.left, state.right, state.opposite)) == ["A", "B", "C"]

    def test_pivot_agreement_with_coset_cusps(self, rng):
        # the run cusp from the automaton equals the constant triangle label
        for _ in range(10000):
            coset = int(rng.integers(0, 6))
            letter = "L" if rng.integers(0, 2) else "R"
            length = int(rng.integers(1, 9))
            cusp = w.run_cusp(coset, letter)
            state = w.triangle_state_for(coset)
            for _ in range(length):
                label = state.left if letter == "L" else state.right
                assert label == cusp
                state = w.triangle_step(state, letter)

    def test_triangle_track_follows_coset_track(self, rng):
        coset = 0
        state = w.triangle_state_for(0)
        for _ in range(300):
            letter = "L" if rng.integers(0, 2) else "R"
            _, coset = w.step(coset, letter)
            state = w.triangle_step(state, letter)
            expect = w.triangle_state_for(coset, color=state.color)
            assert state == expect
