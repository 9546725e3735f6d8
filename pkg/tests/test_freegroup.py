"""Tests for reduced-word arithmetic and the free-group interpretation."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from lambrack.freegroup import (
    IDENTITY, close_letter, inv, mul, open_letter, prim_letter, print_word,
    shrinking_pair, wlen, word, word_of,
)
from lambrack.syntax import parse_hedge, parse_sequent, parse_type

a = (prim_letter("a"),)
b = (prim_letter("b"),)


def test_mul_cancellation():
    assert mul(a, inv(a)) == IDENTITY
    assert mul((prim_letter("a"), prim_letter("b")),
               (prim_letter("b", -1), prim_letter("a"))) == \
        (prim_letter("a"), prim_letter("a"))


def test_wlen_inverse():
    u = (open_letter(1), prim_letter("p1"))
    assert wlen(inv(u)) == wlen(u) == 2


def test_word_normalizes():
    letters = [prim_letter("a"), prim_letter("b"), prim_letter("b", -1),
               prim_letter("a", -1)]
    assert word(letters) == IDENTITY


def test_interpret_examples():
    assert word_of(parse_type("dia:2 p1")) == \
        (open_letter(2), prim_letter("p1"), close_letter(2))
    assert word_of(parse_type("boxd:2 p1")) == \
        (open_letter(2, -1), prim_letter("p1"), close_letter(2, -1))
    assert word_of(parse_hedge("[:1 p1 [:2 ]:2 ]:1")) == \
        (open_letter(1), prim_letter("p1"), open_letter(2), close_letter(2),
         close_letter(1))


def test_interpret_under_over_unit():
    assert word_of(parse_type("p1 \\ p2")) == \
        (prim_letter("p1", -1), prim_letter("p2"))
    assert word_of(parse_type("p2 / p1")) == \
        (prim_letter("p2"), prim_letter("p1", -1))
    assert word_of(parse_type("1")) == IDENTITY
    # dia boxd p collapses to p
    assert word_of(parse_type("dia:1 boxd:1 p1")) == (prim_letter("p1"),)


def test_interpret_rejects_plain():
    with pytest.raises(ValueError):
        word_of(parse_type("dia p"))
    with pytest.raises(ValueError):
        word_of(parse_hedge("[ p ]"))
    assert word_of(parse_type("dia p"), allow_plain=True) == \
        (open_letter(None), prim_letter("p"), close_letter(None))
    # modality-free input is fine without the flag
    assert word_of(parse_type("p \\ q")) == \
        (prim_letter("p", -1), prim_letter("q"))


_letters = st.builds(
    lambda kind, idx, sign: (kind, idx, sign),
    st.sampled_from(["p", "<", ">"]),
    st.sampled_from(["x", "y", 1, 2]),
    st.sampled_from([1, -1]),
)
_words = st.lists(_letters, max_size=12).map(word)


@settings(derandomize=True, max_examples=200)
@given(_words, _words, _words)
def test_group_laws(u, v, w):
    assert mul(mul(u, v), w) == mul(u, mul(v, w))
    assert mul(u, IDENTITY) == u == mul(IDENTITY, u)
    assert mul(u, inv(u)) == IDENTITY == mul(inv(u), u)
    assert wlen(inv(u)) == wlen(u)


@settings(derandomize=True, max_examples=100)
@given(st.lists(_letters, max_size=14), st.randoms(use_true_random=False))
def test_reduction_confluence(letters, rng):
    """Cancelling adjacent inverse pairs in any order gives the normal form."""
    work = list(letters)
    while True:
        pairs = [i for i in range(len(work) - 1)
                 if work[i] == (work[i + 1][0], work[i + 1][1], -work[i + 1][2])]
        if not pairs:
            break
        i = rng.choice(pairs)
        del work[i:i + 2]
    assert tuple(work) == word(letters)


def test_shrinking_pair_examples():
    u = (open_letter(1), prim_letter("p"))
    assert shrinking_pair([u, inv(u)]) == 1
    assert shrinking_pair([a, b, inv(b), inv(a)]) == 2


def test_shrinking_pair_errors():
    with pytest.raises(ValueError):
        shrinking_pair([a])
    with pytest.raises(ValueError):
        shrinking_pair([a, a])


def _random_identity_tuple(rng, n, max_half=2, gens="abc"):
    """Telescoping factorization: u_i = v_{i-1}^{-1} v_i with v_0 = v_n = e."""
    vs = [IDENTITY]
    for _ in range(n - 1):
        letters = [prim_letter(rng.choice(gens), rng.choice((1, -1)))
                   for _ in range(rng.randint(0, max_half))]
        vs.append(word(letters))
    vs.append(IDENTITY)
    return [mul(inv(vs[i]), vs[i + 1]) for i in range(n)]


def test_shrinking_pair_randomized():
    rng = random.Random(20240817)
    for _ in range(500):
        n = rng.randint(2, 6)
        words = _random_identity_tuple(rng, n)
        k = shrinking_pair(words)
        assert 1 <= k < n
        assert wlen(mul(words[k - 1], words[k])) <= max(wlen(words[k - 1]),
                                                        wlen(words[k]))
        # least witness: brute-force scan agrees
        oracle = next(i + 1 for i in range(n - 1)
                      if wlen(mul(words[i], words[i + 1]))
                      <= max(wlen(words[i]), wlen(words[i + 1])))
        assert k == oracle


def test_word_length_bounded_by_type_length():
    for text in ["p1", "dia:1 p1", "boxd:2 (p1 * p2)", "(p1 \\ p2) / p1",
                 "dia:1 boxd:1 p1", "1", "dia:3 1"]:
        t = parse_type(text)
        assert wlen(word_of(t)) <= t.length


def test_provable_reference_sequent_is_word_balanced():
    s = parse_sequent("[:2 [:1 p1 ]:1 dia:1 p1 \\ p2 ]:2 => boxd:3 dia:3 dia:2 p2")
    assert word_of(s.antecedent) == word_of(s.succedent)


def test_print_word():
    assert print_word(IDENTITY) == "e"
    assert print_word((open_letter(1), prim_letter("p1"),
                       close_letter(2, -1))) == "<1 p1 >2'"
