import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from salience import ConfigError
from salience.memory import (
    Ledger,
    LedgerEntry,
    MemoryConfig,
    decay_and_read,
    level_trace,
    new_entry,
    refresh,
    surprise,
    tune_delta,
)
from tests.oracles import eager_levels, oracle_counts

CFG = MemoryConfig(100.0, 1.0)
word = st.sampled_from(["a", "b", "c", "d"])
sentences = st.lists(st.lists(word, min_size=1, max_size=7), min_size=1, max_size=12)


def entry_at(tau):
    return new_entry("x", tau, CFG)


class TestDecay:
    def test_gap_30(self):
        assert decay_and_read(entry_at(0), 30, CFG) == 70

    def test_floor(self):
        assert decay_and_read(entry_at(0), 200, CFG) == 0

    def test_refresh_tick(self):
        assert decay_and_read(entry_at(5), 5, CFG) == 100

    def test_reading_the_past_is_an_error(self):
        with pytest.raises(ValueError):
            decay_and_read(entry_at(5), 4, CFG)

    @given(st.integers(0, 500), st.integers(1, 100))
    def test_lazy_matches_stepwise(self, gap, delta):
        cfg = MemoryConfig(100.0, float(delta))
        stepwise = level_trace(["x"] + ["y"] * gap, "x", cfg)[-1]
        assert decay_and_read(new_entry("x", 0, cfg), gap, cfg) == stepwise

    @given(st.integers(0, 300), st.integers(0, 300))
    def test_surprise_monotone(self, g1, g2):
        lo, hi = sorted((g1, g2))
        e = entry_at(0)
        assert 0 <= surprise(e, lo, CFG) <= surprise(e, hi, CFG) <= 1


class TestRefresh:
    def test_reset(self):
        e = entry_at(0)
        assert decay_and_read(e, 30, CFG) == 70
        refresh(e, 30, CFG)
        assert (e.level, e.count, e.last_refresh_tau, e.first_seen_tau) == (100, 2, 30, 0)

    def test_first_occurrence(self):
        e = new_entry("a b", 7, CFG)
        assert (e.n, e.count, e.level) == (2, 1, 100)

    def test_nested_same_tau_independent(self):
        ledger = Ledger(3, CFG)
        ledger.observe_sentence(["p", "q", "r"], 0, 0)
        ledger.observe_sentence(["p", "z"], 10, 0)
        # "p" was refreshed at 10, "p q" and "p q r" still carry tau 0
        assert ledger.read_level("p", 10) == 100
        assert ledger.read_level("p q", 10) == 90
        assert ledger.read_level("p q r", 10) == 90
        assert ledger.entry("p").count == 2
        assert ledger.entry("p q").count == 1


class TestSurprise:
    def test_unseen(self):
        assert surprise(None, 10, CFG) == 1.0
        assert Ledger(2, CFG).surprise_at(None, 3) == 1.0

    def test_just_refreshed(self):
        assert surprise(entry_at(9), 9, CFG) == 0.0

    def test_gap_30(self):
        assert surprise(entry_at(0), 30, CFG) == pytest.approx(0.30)


class TestConfig:
    @pytest.mark.parametrize("l0, delta", [(0, 1), (-1, 1), (100, 0), (100, 101)])
    def test_invalid(self, l0, delta):
        with pytest.raises(ConfigError):
            MemoryConfig(l0, delta)

    def test_xi(self):
        assert MemoryConfig(100, 4).xi == 25


class TestTuning:
    def test_every_tenth_word(self):
        window = [w for i in range(30) for w in ["of"] + [f"f{i}_{j}" for j in range(9)]]
        assert tune_delta(window, 100) == 10

    def test_no_repeats(self):
        assert tune_delta([f"w{i}" for i in range(40)], 100) == 2.5

    def test_tie_goes_to_earliest_in_alphabet(self):
        # "b" and "a" both appear twice; "a" wins the tie and has gap 4
        assert tune_delta(["b", "a", "b", "x", "y", "a"], 100) == 25

    def test_common_word_is_never_forgotten(self):
        window = [w for i in range(50) for w in ["of"] + [f"f{i}_{j}" for j in range(9)]]
        cfg = MemoryConfig(100, tune_delta(window, 100))
        levels = level_trace(window, "of", cfg)
        assert all(level > 0 for level in levels)

    def test_clustered_word_is_forgotten_between_clusters(self):
        window = [w for i in range(50) for w in ["of"] + [f"f{i}_{j}" for j in range(9)]]
        cfg = MemoryConfig(100, tune_delta(window, 100))
        stream = ["economy"] * 3 + window + ["economy"] * 3
        levels = level_trace(stream, "economy", cfg)
        assert min(levels[3:-3]) == 0
        assert levels[-1] == 100

    @given(st.lists(word, min_size=2, max_size=80))
    def test_top_word_mean_level_positive(self, window):
        cfg = MemoryConfig(100, min(100.0, tune_delta(window, 100)))
        top = min(set(window), key=lambda w: (-window.count(w), w))
        levels = level_trace(window, top, cfg)
        first = window.index(top)
        assert sum(levels[first:]) / len(levels[first:]) > 0


def stream_of(sents, n_max):
    """Per word position, the fragments starting there."""
    out = []
    for words in sents:
        for i in range(len(words)):
            out.append([" ".join(words[i:i + n]) for n in range(1, n_max + 1) if i + n <= len(words)])
    return out


class TestLedger:
    @given(sentences, st.integers(1, 4), st.sampled_from([1.0, 7.0, 30.0]))
    def test_lazy_vs_eager(self, sents, n_max, delta):
        cfg = MemoryConfig(100.0, delta)
        history = eager_levels(stream_of(sents, n_max), 100.0, delta)
        ledger = Ledger(n_max, cfg)
        tau = 0
        for words in sents:
            ledger.observe_sentence(words, tau, 0)
            tau += len(words)
            expected = history[tau - 1]
            assert {k: ledger.read_level(k, tau - 1) for k in expected} == expected

    @given(sentences, st.integers(1, 6))
    def test_counts_match_oracle(self, sents, n_max):
        ledger = Ledger(n_max, CFG)
        tau = 0
        for words in sents:
            ledger.observe_sentence(words, tau, 0)
            tau += len(words)
        assert ledger.counts() == oracle_counts(sents, n_max)
        assert sorted(ledger.decode(range(len(ledger))).values()) == sorted(ledger.keys())

    def test_slot_order_and_lookup(self):
        ledger = Ledger(2, CFG)
        slots = ledger.observe_sentence(["a", "b", "a"], 0, 0)
        assert [ledger.keys()[s] for s in slots] == ["a", "a b", "b", "b a", "a"]
        assert ledger.slot("b a") == slots[3]
        assert ledger.slot("a a") is None
        assert ledger.slot("zzz") is None

    def test_leg_counts_reset(self):
        ledger = Ledger(1, CFG)
        ledger.observe_sentence(["a", "a", "b"], 0, 0)
        assert ledger.entry("a").leg_count == 2
        assert ledger.n0_leg == 1.5
        ledger.observe_sentence(["a"], 3, 1)
        e = ledger.entry("a")
        assert (e.count, e.leg_count) == (3, 1)
        # "b" is not active in the new leg
        assert ledger.entry("b").leg_count == 0
        assert ledger.n0_leg == 1.0

    def test_top_slots(self):
        ledger = Ledger(2, CFG)
        ledger.observe_sentence(["x", "y", "y", "z", "z"], 0, 0)
        names = ledger.decode(ledger.top_slots(1, 2))
        assert [names[s] for s in ledger.top_slots(1, 2)] == ["y", "z"]

    def test_dump(self):
        ledger = Ledger(2, CFG)
        ledger.observe_sentence(["a", "b"], 0, 0)
        rows = json.loads(json.dumps(ledger.dump(at_tau=10)))
        assert rows[1] == {"key": "a b", "n": 2, "count": 1, "level": 90.0, "first_seen_tau": 0}

    def test_entry_is_a_ledger_entry(self):
        ledger = Ledger(2, CFG)
        ledger.observe_sentence(["a", "b"], 0, 0)
        assert isinstance(ledger.entry("a b"), LedgerEntry)
        assert ledger.entry("nope") is None
