"""Proof search, proof checking, and the bracket-erasing translation."""

import pytest
from hypothesis import given, settings, strategies as st

from lambrack.freegroup import word_of
from lambrack.prover import (
    Proof, ProofSearchTimeout, Prover, check, deindex_proof, instances,
    is_guarded, parse_proof, premises_of, print_proof, prove, prove_flat,
    translate_flat,
)
from lambrack.syntax import (
    L, L1STAR, L1STAR_DIA, LDIA, LDIA_M, LSTAR, LSTAR_DIA, UNIT, boxdown,
    bracket, calculus, dia, leaf, over, parse_sequent, parse_type, prim,
    print_sequent, prod, sequent, under,
)

GOLDEN = "[ [ p ] dia p \\ p ] => boxd dia dia p"

GOLDEN_PROOF = """\
BoxDownR  [ [ p ] dia p \\ p ] => boxd dia dia p
  DiaR  [ [ [ p ] dia p \\ p ] ] => dia dia p
    DiaR  [ [ p ] dia p \\ p ] => dia p
      UnderL  [ p ] dia p \\ p => p
        DiaR  [ p ] => dia p
          Ax  p => p
        Ax  p => p"""


class TestGoldens:
    def test_bracket_modality_proof(self):
        p = prove(parse_sequent(GOLDEN), LDIA)
        assert p is not None
        assert print_proof(p) == GOLDEN_PROOF
        assert check(p, LDIA)

    def test_canonical_proof_is_deterministic(self):
        s = parse_sequent(GOLDEN)
        a, b = prove(s, LDIA), prove(s, LDIA)

        def principals(q):
            yield q.principal
            for sub in q.premises:
                yield from principals(sub)

        assert a == b
        assert list(principals(a)) == list(principals(b))

    def test_distribution_over_product_fails(self):
        s = parse_sequent("dia boxd p dia boxd q => dia boxd (p * q)")
        assert prove(s, LDIA) is None
        # both sides have the same free-group image, so the refutation
        # comes from the search itself, not from the word filter
        assert word_of(s.antecedent, allow_plain=True) == \
            word_of(s.succedent, allow_plain=True)

    def test_modality_adjunction_asymmetry(self):
        assert prove(parse_sequent("p => boxd dia p"), LDIA) is not None
        assert prove(parse_sequent("dia boxd p => p"), LDIA) is not None
        assert prove(parse_sequent("dia boxd p => boxd dia p"), LDIA) is not None
        assert prove(parse_sequent("boxd dia p => dia boxd p"), LDIA) is None

    def test_bracket_introduces_diamond(self):
        assert prove(parse_sequent("[ p ] => dia p"), LDIA) is not None
        assert prove(parse_sequent("p => dia p"), LDIA) is None

    def test_indexed_sequent(self):
        s = parse_sequent("[:2 [:1 p1 ]:1 dia:1 p1 \\ p2 ]:2 => boxd:3 dia:3 dia:2 p2")
        p = prove(s, LDIA_M)
        assert p is not None and check(p, LDIA_M)
        # mismatched indices are rejected by the search
        bad = parse_sequent("[:2 p1 ]:2 => dia:1 p1")
        assert prove(bad, LDIA_M) is None

    def test_conclusion_is_the_input(self):
        s = parse_sequent(GOLDEN)
        assert prove(s, LDIA).conclusion == s


class TestStarredAndUnit:
    def test_empty_antecedent(self):
        assert prove(parse_sequent("=> p / p"), LSTAR) is not None
        assert prove(parse_sequent("=> p \\ p"), LSTAR) is not None
        with pytest.raises(ValueError):
            prove(parse_sequent("=> p / p"), L)

    def test_unit_axiom_and_deletion(self):
        assert print_proof(prove(parse_sequent("=> 1"), L1STAR)) == "UnitR  => 1"
        p = prove(parse_sequent("1 => 1"), L1STAR)
        assert print_proof(p) == "UnitL  1 => 1\n  UnitR  => 1"
        assert prove(parse_sequent("q 1 => q"), L1STAR) is not None

    def test_empty_bracket(self):
        p = prove(parse_sequent("[ ] => dia 1"), L1STAR_DIA)
        assert print_proof(p) == "DiaR  [ ] => dia 1\n  UnitR  => 1"
        with pytest.raises(ValueError):
            prove(parse_sequent("[ ] => dia 1"), LDIA)

    def test_short_unit_double_dual_tower(self):
        # the tower q, (1/q)\1, (1/((1/q)\1))\1, ... applies the double
        # dual X -> (1/X)\1 repeatedly; that map is a closure operator,
        # so from the first level on all levels are interderivable and
        # only the bottom level sits strictly below
        tower = [parse_type("q")]
        for _ in range(4):
            tower.append(under(over(UNIT, tower[-1]), UNIT))
        assert all(t.length == 1 for t in tower)
        for i, a in enumerate(tower):
            for j, b in enumerate(tower):
                p = prove(sequent((leaf(a),), b), L1STAR)
                if j == 0 and i > 0:
                    assert p is None, (i, j)
                else:
                    assert p is not None and check(p, L1STAR), (i, j)

    def test_telescope_sequent(self):
        s = parse_sequent("1/1 1/q q 1\\1 1\\1 => 1")
        p = prove(s, L1STAR)
        assert p is not None and check(p, L1STAR)

    def test_plain_proofs_lift_to_starred(self):
        # every rule instance of the non-starred calculus is also an
        # instance of the starred one, so the proof itself lifts
        p = prove(parse_sequent(GOLDEN), LDIA)
        assert check(p, LSTAR_DIA)


def _types(max_conn, prims=("p", "q"), unit=False, mods=True):
    levels = [[prim(x) for x in prims] + ([UNIT] if unit else [])]
    for c in range(1, max_conn + 1):
        layer = []
        for i in range(c):
            for a in levels[i]:
                for b in levels[c - 1 - i]:
                    layer += [under(a, b), over(a, b), prod(a, b)]
        if mods:
            layer += [dia(a) for a in levels[c - 1]]
            layer += [boxdown(a) for a in levels[c - 1]]
        levels.append(layer)
    return [t for layer in levels for t in layer]


_SHAPES_1 = [
    lambda t: (leaf(t),),
    lambda t: (bracket((leaf(t),)),),
    lambda t: (bracket((bracket((leaf(t),)),)),),
]
_SHAPES_2 = [
    lambda t, u: (leaf(t), leaf(u)),
    lambda t, u: (bracket((leaf(t),)), leaf(u)),
    lambda t, u: (leaf(t), bracket((leaf(u),))),
    lambda t, u: (bracket((leaf(t), leaf(u))),),
    lambda t, u: (bracket((leaf(t),)), bracket((leaf(u),))),
    lambda t, u: (bracket((bracket((leaf(t),)),)), leaf(u)),
    lambda t, u: (leaf(t), bracket((bracket((leaf(u),)),))),
    lambda t, u: (bracket((bracket((leaf(t),)), leaf(u))),),
    lambda t, u: (bracket((leaf(t), bracket((leaf(u),)))),),
    lambda t, u: (bracket((bracket((leaf(t), leaf(u))),)),),
]


def _small_sequents(max_total_conn=2):
    """Every sequent over {p} with at most two antecedent leaves, two
    brackets, and the given total connective budget."""
    by_conn = {}
    for t in _types(max_total_conn, prims=("p",)):
        by_conn.setdefault(_type_conn(t), []).append(t)
    out = []
    for cs, succs in by_conn.items():
        for c1 in range(max_total_conn - cs + 1):
            for t in by_conn.get(c1, ()):
                for shape in _SHAPES_1:
                    for c in succs:
                        out.append(sequent(shape(t), c))
                for c2 in range(max_total_conn - cs - c1 + 1):
                    for u in by_conn.get(c2, ()):
                        for shape in _SHAPES_2:
                            for c in succs:
                                out.append(sequent(shape(t, u), c))
    return out


def _type_conn(t):
    if isinstance(t, type(prim("p"))):
        return 0
    if t is UNIT:
        return 0
    if hasattr(t, "body"):
        return 1 + _type_conn(t.body)
    return 1 + _type_conn(t.left) + _type_conn(t.right)


# An independent reference search: no memoization, no free-group
# filter, rule instances built by direct tuple surgery and explored in
# the reverse of the canonical order.  Agreement with the main prover
# on an exhaustive universe guards against ordering, filtering, and
# transcription slips.

def _alt_positions(h):
    acc = []

    def walk(trees, prefix):
        for j, tr in enumerate(trees):
            acc.append((prefix, j, tr, trees))
            if not hasattr(tr, "type"):
                walk(tr.children, prefix + (j,))

    walk(h, ())
    return acc


def _alt_rebuild(h, parent, lo, hi, repl):
    if not parent:
        return h[:lo] + repl + h[hi:]
    i = parent[0]
    inner = _alt_rebuild(h[i].children, parent[1:], lo, hi, repl)
    return h[:i] + (bracket(inner, h[i].index),) + h[i + 1:]


def _alt_provable(s, calc):
    calc = calculus(calc)
    ante, c = s.antecedent, s.succedent
    goals = []
    for parent, j, tr, sibs in reversed(_alt_positions(ante)):
        if hasattr(tr, "type"):
            t = tr.type
            k = type(t).__name__
            if k == "Under":
                hi = j + 1 if calc.starred else j
                for g in reversed(range(0, hi)):
                    goals.append([sequent(sibs[g:j], t.left),
                                  sequent(_alt_rebuild(ante, parent, g, j + 1,
                                                       (leaf(t.right),)), c)])
            elif k == "Over":
                lo = j + 1 if calc.starred else j + 2
                for e in reversed(range(lo, len(sibs) + 1)):
                    goals.append([sequent(sibs[j + 1:e], t.right),
                                  sequent(_alt_rebuild(ante, parent, j, e,
                                                       (leaf(t.left),)), c)])
            elif k == "Prod":
                goals.append([sequent(_alt_rebuild(
                    ante, parent, j, j + 1,
                    (leaf(t.left), leaf(t.right))), c)])
            elif k == "Dia":
                goals.append([sequent(_alt_rebuild(
                    ante, parent, j, j + 1,
                    (bracket((leaf(t.body),), t.index),)), c)])
            elif t is UNIT and calc.unit:
                goals.append([sequent(_alt_rebuild(ante, parent, j, j + 1, ()), c)])
        elif (len(tr.children) == 1 and hasattr(tr.children[0], "type")
                and type(tr.children[0].type).__name__ == "BoxDown"
                and tr.children[0].type.index == tr.index):
            goals.append([sequent(_alt_rebuild(
                ante, parent, j, j + 1,
                (leaf(tr.children[0].type.body),)), c)])
    k = type(c).__name__
    if k == "Under":
        goals.append([sequent((leaf(c.left),) + ante, c.right)])
    elif k == "Over":
        goals.append([sequent(ante + (leaf(c.right),), c.left)])
    elif k == "Prod":
        lo, hi = (0, len(ante)) if calc.starred else (1, len(ante) - 1)
        for i in reversed(range(lo, hi + 1)):
            goals.append([sequent(ante[:i], c.left),
                          sequent(ante[i:], c.right)])
    elif k == "Dia":
        if len(ante) == 1 and not hasattr(ante[0], "type") \
                and ante[0].index == c.index:
            goals.append([sequent(ante[0].children, c.body)])
    elif k == "BoxDown":
        goals.append([sequent((bracket(ante, c.index),), c.body)])
    if calc.unit and c is UNIT and not ante:
        return True
    if len(ante) == 1 and hasattr(ante[0], "type") and ante[0].type == c \
            and type(c).__name__ == "Prim":
        return True
    return any(all(_alt_provable(g, calc) for g in gs) for gs in goals)


class TestAgreement:
    def test_exhaustive_small_universe(self):
        prover = Prover(LDIA)
        n_provable = 0
        for s in _small_sequents(2):
            got = prover.prove(s)
            want = _alt_provable(s, LDIA)
            assert (got is not None) == want, print_sequent(s)
            if got is not None:
                n_provable += 1
                assert got.conclusion == s
                assert check(got, LDIA)
                assert check(got, LSTAR_DIA)
                # derivability forces equal free-group images
                assert word_of(s.antecedent, allow_plain=True) == \
                    word_of(s.succedent, allow_plain=True)
        assert n_provable > 20

    def test_sampled_unit_universe(self):
        import random
        rng = random.Random(20240817)
        ts = _types(2, prims=("p",), unit=True)
        prover = Prover(L1STAR_DIA)
        batch = [sequent((leaf(t),), t) for t in ts[:40]]
        for _ in range(300):
            shape = rng.choice(_SHAPES_1 + _SHAPES_2 + [lambda: ()])
            n = shape.__code__.co_argcount
            batch.append(sequent(shape(*(rng.choice(ts) for _ in range(n))),
                                 rng.choice(ts)))
        seen_provable = 0
        for s in batch:
            got = prover.prove(s)
            assert (got is not None) == _alt_provable(s, L1STAR_DIA), \
                print_sequent(s)
            if got is not None:
                seen_provable += 1
                assert check(got, L1STAR_DIA)
        assert seen_provable >= 40

    def test_instances_always_yield_legal_premises(self):
        for s in _small_sequents(2)[::7]:
            for rule, principal in instances(s, LDIA):
                assert premises_of(s, rule, principal, LDIA) is not None


_type_strategy = st.recursive(
    st.sampled_from([prim("p"), prim("q")]),
    lambda inner: st.one_of(
        st.builds(under, inner, inner),
        st.builds(over, inner, inner),
        st.builds(prod, inner, inner),
        st.builds(dia, inner),
        st.builds(boxdown, inner),
    ),
    max_leaves=4,
)


class TestProperties:
    @settings(derandomize=True, max_examples=60, deadline=None)
    @given(_type_strategy)
    def test_identity_is_provable(self, t):
        p = prove(sequent((leaf(t),), t), LDIA)
        assert p is not None and check(p, LDIA)

    @settings(derandomize=True, max_examples=40, deadline=None)
    @given(_type_strategy)
    def test_proof_text_roundtrip(self, t):
        p = prove(sequent((leaf(t),), t), LDIA)
        q = parse_proof(print_proof(p))
        assert q == p
        assert check(q, LDIA)
        assert print_proof(q) == print_proof(p)


class TestCheck:
    def test_rejects_wrong_calculus(self):
        p = prove(parse_sequent(GOLDEN), LDIA)
        assert not check(p, L)
        u = prove(parse_sequent("=> 1"), L1STAR)
        assert check(u, L1STAR_DIA)
        assert not check(u, LSTAR)

    def test_rejects_tampering(self):
        p = prove(parse_sequent(GOLDEN), LDIA)
        wrong_rule = Proof(p.conclusion, "DiaR", p.premises)
        assert not check(wrong_rule, LDIA)
        missing = Proof(p.conclusion, p.rule, (), p.principal)
        assert not check(missing, LDIA)
        swapped = Proof(p.conclusion, p.rule,
                        (prove(parse_sequent("p => p"), LDIA),), p.principal)
        assert not check(swapped, LDIA)

    def test_infers_and_records_principals(self):
        q = parse_proof(GOLDEN_PROOF)
        assert q.principal is None
        assert check(q, LDIA)
        under_node = q.premises[0].premises[0].premises[0]
        assert under_node.rule == "UnderL"
        assert under_node.principal == ((), 0, 1)

    def test_parse_proof_errors(self):
        with pytest.raises(ValueError):
            parse_proof("")
        with pytest.raises(ValueError):
            parse_proof(" Ax  p => p")
        with pytest.raises(ValueError):
            parse_proof("Nope  p => p")
        with pytest.raises(ValueError):
            parse_proof("Ax  p => p\nAx  q => q")

    def test_deindex_proof(self):
        s = parse_sequent("[:2 [:1 p1 ]:1 dia:1 p1 \\ p2 ]:2 => boxd:3 dia:3 dia:2 p2")
        p = prove(s, LDIA_M)
        theta = {"p1": "a", "p2": "b"}
        q = deindex_proof(p, theta)
        assert print_sequent(q.conclusion) == "[ [ a ] dia a \\ b ] => boxd dia dia b"
        assert check(q, LDIA)


class TestEngine:
    def test_flat_helper(self):
        assert prove_flat(parse_sequent("p p \\ q => q"), L) is not None
        with pytest.raises(ValueError):
            prove_flat(parse_sequent("p => p"), LDIA)
        with pytest.raises(ValueError):
            prove_flat(parse_sequent("[ p ] => dia p"), L)

    def test_timeout(self):
        s = parse_sequent(" ".join(["q"] + ["p \\ p"] * 12 + ["=> q"]))
        with pytest.raises(ProofSearchTimeout):
            prove(s, LDIA, timeout_ms=0)
        assert prove(s, LDIA) is None

    def test_prover_reuse_matches_fresh_calls(self):
        shared = Prover(LDIA)
        for text in [GOLDEN, "dia boxd p dia boxd q => dia boxd (p * q)",
                     "p => boxd dia p", GOLDEN]:
            s = parse_sequent(text)
            a, b = shared.prove(s), prove(s, LDIA)
            assert (a is None) == (b is None)
            if a is not None:
                assert print_proof(a) == print_proof(b)
        assert len(shared.memo) > 0


class TestTranslation:
    def test_goldens(self):
        assert str(translate_flat(parse_type("dia p"))) == "m * (p * n)"
        assert str(translate_flat(parse_type("boxd p"))) == "(m \\ p) / n"
        assert str(translate_flat(parse_type("dia boxd p"))) == \
            "m * (((m \\ p) / n) * n)"
        assert str(translate_flat(parse_type("p \\ q"))) == "p \\ q"
        assert translate_flat(parse_type("p * q")) is parse_type("p * q")

    def test_errors(self):
        with pytest.raises(ValueError):
            translate_flat(parse_type("dia m"))
        with pytest.raises(ValueError):
            translate_flat(parse_type("n"))
        with pytest.raises(ValueError):
            translate_flat(parse_type("dia:1 p"))

    def test_image_of_failed_distribution_is_provable(self):
        # the translation forgets bracket discipline: the distribution
        # over the product, underivable with brackets, holds flatly
        a = translate_flat(parse_type("dia boxd p"))
        b = translate_flat(parse_type("dia boxd q"))
        c = translate_flat(parse_type("dia boxd (p * q)"))
        assert prove(parse_sequent("dia boxd p dia boxd q => dia boxd (p * q)"),
                     LDIA) is None
        assert prove_flat(sequent((leaf(a), leaf(b)), c), L) is not None

    def test_translation_preserves_provability(self):
        s = parse_sequent("dia p => dia p")
        img = sequent(tuple(leaf(translate_flat(tr.type))
                            for tr in s.antecedent),
                      translate_flat(s.succedent))
        assert prove(s, LDIA) is not None
        assert prove_flat(img, L) is not None


class TestGuardedness:
    def test_cases(self):
        good = ["p", "dia 1", "dia dia 1", "p \\ dia 1", "boxd dia 1",
                "dia (p * dia 1)"]
        bad = ["1", "boxd 1", "dia (1 \\ 1)", "1 \\ p", "dia (p * 1)"]
        for text in good:
            assert is_guarded(parse_type(text)), text
        for text in bad:
            assert not is_guarded(parse_type(text)), text
