"""Tests for interpolant extraction, thin indexing, bracket
elimination, and the flat Cut reduction."""

import pytest
from hypothesis import given, settings, strategies as st

from lambrack.cfgkit import cut_leaf, cut_node, replay_cuts
from lambrack.freegroup import wlen, word_of
from lambrack.interpolate import (
    cut_reduce_flat, eliminate_bracket, extract_interpolant,
    indexed_counterpart, partition_at, thin_index,
    thin_interpolant_length_ok,
)
from lambrack.prover import Proof, check, is_guarded, prove
from lambrack.syntax import (
    HOLE, L1STAR, L1STAR_DIA, L1STAR_DIA_M, LDIA, LDIA_M, LSTAR_DIA, UNIT,
    boxdown, bracket, bracket_addresses, children_at, deindex, dia,
    hole_coords, is_thin, leaf, length, mod_counts, over, parse_sequent,
    parse_type, plug, prim, prim_counts, print_sequent, prod, replace_span,
    sequent, sequent_types, under,
)
from test_prover import GOLDEN, _small_sequents

P, Q = prim("p"), prim("q")


def _partitions(ante, calc):
    """Every selectable span of the hedge, empty ones only with a unit."""
    for parent in [()] + list(bracket_addresses(ante)):
        width = len(children_at(ante, parent))
        for lo in range(width + 1):
            start = lo if calc.unit else lo + 1
            for hi in range(start, width + 1):
                yield partition_at(ante, parent, lo, hi)


def _provable_small(calc=LDIA):
    out = []
    for s in _small_sequents(2):
        pf = prove(s, calc)
        if pf is not None:
            out.append((s, pf))
    return out


class TestPartitionAt:
    def test_round_trip(self):
        ante = (leaf(P), bracket((leaf(Q), leaf(P))), leaf(Q))
        part = partition_at(ante, (1,), 0, 1)
        assert plug(part.context, part.selected) == ante
        assert part.selected == (leaf(Q),)
        assert hole_coords(part.context) == ((1,), 0)

    types = st.sampled_from([P, Q, under(P, Q), dia(P), prod(P, Q)])

    @st.composite
    def hedges(draw, depth=2):
        kids = []
        for _ in range(draw(st.integers(0, 3))):
            if depth > 0 and draw(st.booleans()):
                kids.append(bracket(draw(TestPartitionAt.hedges(depth - 1))))
            else:
                kids.append(leaf(draw(TestPartitionAt.types)))
        return tuple(kids)

    @settings(max_examples=120, deadline=None)
    @given(hedges(), st.data())
    def test_plug_restores_antecedent(self, ante, data):
        parents = [()] + list(bracket_addresses(ante))
        parent = data.draw(st.sampled_from(parents))
        width = len(children_at(ante, parent))
        lo = data.draw(st.integers(0, width))
        hi = data.draw(st.integers(lo, width))
        part = partition_at(ante, parent, lo, hi)
        assert plug(part.context, part.selected) == ante
        assert hole_coords(part.context) == (parent, lo)
        assert len(part.selected) == hi - lo


class TestIndexedCounterpart:
    def test_mapping(self):
        assert indexed_counterpart(LDIA) is LDIA_M
        assert indexed_counterpart(LDIA_M) is LDIA_M
        assert indexed_counterpart(LSTAR_DIA) is L1STAR_DIA_M
        assert indexed_counterpart(L1STAR_DIA) is L1STAR_DIA_M
        assert indexed_counterpart(L1STAR_DIA_M) is L1STAR_DIA_M


class TestThinIndex:
    def test_golden_conclusion(self):
        pf = prove(parse_sequent(GOLDEN), LDIA)
        q, theta = thin_index(pf, LDIA)
        p1, p2 = prim("p1"), prim("p2")
        expected = sequent(
            (bracket((bracket((leaf(p1),), 1),
                      leaf(under(dia(p1, 1), p2))), 2),),
            boxdown(dia(dia(p2, 2), 3), 3))
        assert q.conclusion == expected
        assert theta == {"p1": "p", "p2": "p"}
        assert is_thin(q.conclusion)
        assert check(q, LDIA_M)
        assert deindex(q.conclusion, theta) == pf.conclusion

    def test_axiom(self):
        pf = prove(parse_sequent("p => p"), LDIA)
        q, theta = thin_index(pf, LDIA)
        assert q.conclusion == parse_sequent("p1 => p1")
        assert theta == {"p1": "p"}

    def test_small_sweep(self):
        for s, pf in _provable_small():
            q, theta = thin_index(pf, LDIA)
            assert is_thin(q.conclusion)
            assert check(q, LDIA_M)
            assert deindex(q.conclusion, theta) == s


def _occurrence_bounds_ok(res, part, succedent):
    """Interpolant occurrence counts within the min of the two sides."""
    pe, me = prim_counts(res.interpolant), mod_counts(res.interpolant)
    pl = prim_counts(part.selected)
    ml = mod_counts(part.selected)
    ctx = sequent(plug(part.context, ()), succedent)
    pr_, mr = prim_counts(ctx), mod_counts(ctx)
    return (all(v <= min(pl[k], pr_[k]) for k, v in pe.items())
            and all(v <= min(ml[k], mr[k]) for k, v in me.items()))


def _extraction_ok(res, part, s, calc):
    return (res.left_proof.conclusion == sequent(part.selected,
                                                 res.interpolant)
            and res.right_proof.conclusion == sequent(
                plug(part.context, (leaf(res.interpolant),)), s.succedent)
            and check(res.left_proof, calc)
            and check(res.right_proof, calc)
            and _occurrence_bounds_ok(res, part, s.succedent))


class TestExtractGoldens:
    def test_unit_bracket_interpolant(self):
        # without the unit no interpolant exists for this partition;
        # with it, the diamond-wrapped product does the job
        s = parse_sequent(
            "p3 / dia:1 (p1 * dia:2 (p2 / p2)) [:1 p1 [:2 ]:2 ]:1 => p3")
        pf = prove(s, L1STAR_DIA_M)
        assert pf is not None
        part = partition_at(s.antecedent, (), 1, 2)
        res = extract_interpolant(pf, part, L1STAR_DIA_M)
        assert res.interpolant is parse_type("dia:1 (p1 * dia:2 1)")
        assert _extraction_ok(res, part, s, L1STAR_DIA_M)

    def test_axiom_whole_span(self):
        s = parse_sequent("p => p")
        pf = prove(s, LDIA)
        part = partition_at(s.antecedent, (), 0, 1)
        res = extract_interpolant(pf, part, LDIA)
        assert res.interpolant is P

    def test_empty_selection_gives_unit(self):
        s = parse_sequent("p p \\ p => p")
        pf = prove(s, L1STAR_DIA)
        part = partition_at(s.antecedent, (), 1, 1)
        res = extract_interpolant(pf, part, L1STAR_DIA, guarded=False)
        assert res.interpolant is UNIT
        assert _extraction_ok(res, part, s, L1STAR_DIA)

    def test_empty_selection_needs_unit(self):
        s = parse_sequent("p p \\ p => p")
        pf = prove(s, LDIA)
        part = partition_at(s.antecedent, (), 1, 1)
        with pytest.raises(ValueError):
            extract_interpolant(pf, part, LDIA)

    def test_guarded_needs_nonempty_selection(self):
        s = parse_sequent("p p \\ p => p")
        pf = prove(s, L1STAR_DIA)
        part = partition_at(s.antecedent, (), 1, 1)
        with pytest.raises(ValueError):
            extract_interpolant(pf, part, L1STAR_DIA, guarded=True)

    def test_mismatched_partition(self):
        s = parse_sequent("p p \\ p => p")
        pf = prove(s, LDIA)
        other = parse_sequent("q q \\ p => p")
        part = partition_at(other.antecedent, (), 0, 1)
        with pytest.raises(ValueError):
            extract_interpolant(pf, part, LDIA)


def _unit_identity():
    return Proof(sequent((leaf(UNIT),), UNIT), "UnitL",
                 (Proof(sequent((), UNIT), "UnitR", ()),), principal=((), 0))


def _telescope(i):
    """The canonical derivation of (1/1)^(i-1) 1/q q (1\\1)^i => 1.

    Each step strips one end of the row: the rightmost 1\\1 consumes
    everything to its left, then the leftmost 1/1 consumes everything
    to its right, down to 1/q q => 1.
    """
    lunit, runit, uq = over(UNIT, UNIT), under(UNIT, UNIT), over(UNIT, Q)
    row = (lunit,) * (i - 1) + (uq, Q) + (runit,) * i
    if i == 1:
        ax = Proof(sequent((leaf(Q),), Q), "Ax", ())
        e = Proof(sequent((leaf(uq), leaf(Q)), UNIT), "OverL",
                  (ax, _unit_identity()), principal=((), 0, 2))
    else:
        erow = (lunit,) * (i - 1) + (uq, Q) + (runit,) * (i - 1)
        e = Proof(sequent(tuple(map(leaf, erow)), UNIT), "OverL",
                  (_telescope(i - 1), _unit_identity()),
                  principal=((), 0, 2 * i))
    return Proof(sequent(tuple(map(leaf, row)), UNIT), "UnderL",
                 (e, _unit_identity()), principal=((), 0, 2 * i))


def _slash_family(n):
    """q, (1/q)\\1, (1/((1/q)\\1))\\1, ... all of free-group length one."""
    out = [Q]
    for _ in range(n):
        out.append(under(over(UNIT, out[-1]), UNIT))
    return out


class TestTelescopeFamily:
    def test_interpolants(self):
        family = _slash_family(3)
        for i in (1, 2, 3):
            d = _telescope(i)
            assert check(d, L1STAR)
            part = partition_at(d.conclusion.antecedent, (), i, 2 * i + 1)
            res = extract_interpolant(d, part, L1STAR)
            assert res.interpolant is family[i]
            assert _extraction_ok(res, part, d.conclusion, L1STAR)

    def test_family_facts(self):
        family = _slash_family(4)
        for a in family:
            assert wlen(word_of(a)) == 1
            assert prove(sequent((leaf(a),), a), L1STAR) is not None
        for a in family[1:]:
            assert prove(sequent((leaf(a),), family[0]), L1STAR) is None


class TestExtractSweeps:
    def test_plain_small_universe(self):
        seen = 0
        for s, pf in _provable_small():
            for part in _partitions(s.antecedent, LDIA):
                res = extract_interpolant(pf, part, LDIA)
                assert _extraction_ok(res, part, s, LDIA), print_sequent(s)
                seen += 1
        assert seen > 50

    def test_unit_universe(self):
        rows = [
            "p => p",
            "p p \\ q => q",
            "1 p => p",
            "p 1 => p",
            "1 => 1",
            "=> 1",
            "p p \\ q q \\ q => q",
            "[ p ] => dia p",
            "[ 1 p ] => dia p",
            "[ p ] dia p \\ q => q",
            "[ [ p ] ] => dia dia p",
            "p * q => p * (q * 1)",
            "[ 1 ] => dia 1",
            "q / p p => q * 1",
            "q / p p 1 => q",
            "[ [ boxd q ] 1 ] => dia q",
        ]
        seen = 0
        for text in rows:
            s = parse_sequent(text)
            pf = prove(s, L1STAR_DIA)
            assert pf is not None, text
            for part in _partitions(s.antecedent, L1STAR_DIA):
                res = extract_interpolant(pf, part, L1STAR_DIA,
                                          guarded=False)
                assert _extraction_ok(res, part, s, L1STAR_DIA), text
                seen += 1
        assert seen > 60

    def test_starred_universe(self):
        rows = [
            "=> p / p",
            "p => q / (p \\ q)",
            "[ p p \\ q ] => dia q",
            "q / p => q / p",
            "p \\ p => p \\ p",
            "dia boxd p => dia boxd p",
        ]
        for text in rows:
            s = parse_sequent(text)
            pf = prove(s, LSTAR_DIA)
            assert pf is not None, text
            for part in _partitions(s.antecedent, LSTAR_DIA):
                res = extract_interpolant(pf, part, LSTAR_DIA)
                assert _extraction_ok(res, part, s, LSTAR_DIA), text

    def test_guarded_universe(self):
        rows = [
            "[ ] => dia 1",
            "dia 1 / dia 1 [ ] => dia 1",
            "[ ] dia 1 \\ p p \\ q => q",
            "[ dia 1 dia 1 \\ p ] => dia p",
            "[ p [ ] ] => dia (p * dia 1)",
            "p => (p * dia 1) / dia 1",
        ]
        seen = 0
        for text in rows:
            s = parse_sequent(text)
            assert all(is_guarded(t) for t in sequent_types(s)), text
            pf = prove(s, L1STAR_DIA)
            assert pf is not None, text
            for parent in [()] + list(bracket_addresses(s.antecedent)):
                width = len(children_at(s.antecedent, parent))
                for lo in range(width):
                    for hi in range(lo + 1, width + 1):
                        part = partition_at(s.antecedent, parent, lo, hi)
                        res = extract_interpolant(pf, part, L1STAR_DIA)
                        assert is_guarded(res.interpolant), text
                        assert _extraction_ok(res, part, s, L1STAR_DIA)
                        seen += 1
        assert seen > 10


class TestThinInterpolantLength:
    def test_small_sweep(self):
        for s, pf in _provable_small():
            q, _ = thin_index(pf, LDIA)
            for part in _partitions(q.conclusion.antecedent, LDIA_M):
                assert thin_interpolant_length_ok(q, part)

    def test_golden(self):
        pf = prove(parse_sequent(GOLDEN), LDIA)
        q, _ = thin_index(pf, LDIA)
        ante = q.conclusion.antecedent
        part = partition_at(ante, (0,), 0, 1)
        assert thin_interpolant_length_ok(q, part)
        res = extract_interpolant(q, part, LDIA_M)
        assert length(res.interpolant) == wlen(word_of(part.selected))

    def test_rejects_non_thin(self):
        s = parse_sequent("p p \\ p => p")
        pf = prove(s, LDIA)
        part = partition_at(s.antecedent, (), 0, 1)
        with pytest.raises(ValueError):
            thin_interpolant_length_ok(pf, part)


def _bracket_hole(ante, beta):
    """The antecedent with the bracket at ``beta`` replaced by a hole."""
    return replace_span(ante, beta[:-1], beta[-1], beta[-1] + 1, (HOLE,))


def _recompose(s, beta, b, variant, pa, pb, calc):
    """Cut the two halves back together through the bridging sequent."""
    idx = 1 if calc.indexed else None
    if variant == "dia":
        bridge = sequent((bracket((leaf(b),), idx),), dia(b, idx))
    else:
        bridge = sequent((bracket((leaf(boxdown(b, idx)),), idx),), b)
    assert prove(bridge, calc) is not None
    inner = cut_node(cut_leaf(pa.conclusion), cut_leaf(bridge),
                     (bracket((HOLE,), idx),))
    full = cut_node(inner, cut_leaf(pb.conclusion), _bracket_hole(
        s.antecedent, beta))
    assert full.conclusion == s
    assert replay_cuts(full, {pa.conclusion, pb.conclusion, bridge})


class TestEliminateBracket:
    def test_dia_variant(self):
        s = parse_sequent("[ p ] => dia p")
        pf = prove(s, LDIA)
        b, variant, (pa, pb) = eliminate_bracket(pf, LDIA)
        assert (b, variant) == (P, "dia")
        assert pa.conclusion == parse_sequent("p => p")
        assert pb.conclusion == parse_sequent("dia p => dia p")
        assert check(pa, LDIA) and check(pb, LDIA)

    def test_boxd_variant(self):
        s = parse_sequent("[ boxd q ] => q")
        pf = prove(s, LDIA)
        b, variant, (pa, pb) = eliminate_bracket(pf, LDIA)
        assert (b, variant) == (Q, "boxd")
        assert pa.conclusion == parse_sequent("boxd q => boxd q")
        assert pb.conclusion == parse_sequent("q => q")

    def test_rule_acting_inside_the_bracket(self):
        # the slash step rewrites the bracket's own contents, so the
        # rebuilt half must carry the step, re-rooted to the bracket
        s = parse_sequent("[ p p \\ boxd p ] => p")
        pf = prove(s, LDIA)
        b, variant, (pa, pb) = eliminate_bracket(pf, LDIA)
        assert (b, variant) == (P, "boxd")
        assert pa.conclusion == parse_sequent("p p \\ boxd p => boxd p")
        assert pb.conclusion == parse_sequent("p => p")
        assert check(pa, LDIA) and check(pb, LDIA)
        _recompose(s, (0,), b, variant, pa, pb, LDIA)

    def test_recomposition_sweep(self):
        extra = [
            "[ p p \\ boxd p ] => p",
            "[ [ p ] dia p \\ p ] => dia p",
            "q / dia p [ p ] => q",
            "[ p ] dia p \\ dia p => dia p",
        ]
        cases = [(s, pf) for s, pf in _provable_small()
                 if bracket_addresses(s.antecedent)]
        cases += [(parse_sequent(t), prove(parse_sequent(t), LDIA))
                  for t in extra]
        assert len(cases) >= 10
        for s, pf in cases:
            for beta in bracket_addresses(s.antecedent):
                b, variant, (pa, pb) = eliminate_bracket(pf, LDIA, beta)
                assert check(pa, LDIA) and check(pb, LDIA)
                _recompose(s, beta, b, variant, pa, pb, LDIA)

    def test_bridge_length_bound(self):
        # the bridging type is as short as the bracket contents' image
        s = parse_sequent("[ [ p ] dia p \\ p ] => dia p")
        pf = prove(s, LDIA)
        b, _, _ = eliminate_bracket(pf, LDIA, (0,))
        contents = children_at(s.antecedent, (0,))
        image = wlen(word_of(contents, allow_plain=True))
        assert length(b) <= max(1, image)

    def test_no_bracket(self):
        pf = prove(parse_sequent("p => p"), LDIA)
        with pytest.raises(ValueError):
            eliminate_bracket(pf, LDIA)

    def test_empty_bracket(self):
        pf = prove(parse_sequent("[ ] => dia 1"), L1STAR_DIA)
        with pytest.raises(ValueError):
            eliminate_bracket(pf, L1STAR_DIA)

    def test_bad_address(self):
        pf = prove(parse_sequent("[ p ] => dia p"), LDIA)
        with pytest.raises(ValueError):
            eliminate_bracket(pf, LDIA, bracket_addr=(3,))

    def test_bracketless_calculus(self):
        pf = prove(parse_sequent("p => p"), LDIA)
        with pytest.raises(ValueError):
            eliminate_bracket(pf, "L")


class TestCutReduceFlat:
    def test_width_two_is_a_leaf(self):
        s = parse_sequent("p p \\ p => p")
        d = cut_reduce_flat(s, {"p"}, 2, LDIA)
        assert d.is_leaf and d.conclusion == s

    def test_width_one_is_a_leaf(self):
        s = parse_sequent("p => p")
        d = cut_reduce_flat(s, {"p"}, 2, LDIA)
        assert d.is_leaf and d.conclusion == s

    def test_single_cut_chain(self):
        s = parse_sequent("p p \\ p p \\ p => p")
        d = cut_reduce_flat(s, {"p"}, 2, LDIA)
        assert d.conclusion == s
        assert d.cut_count() == 1
        assert set(d.leaves()) == {parse_sequent("p p \\ p => p")}
        assert replay_cuts(d)

    def _check_reduction(self, s, d, prims, m, calc):
        assert d.conclusion == s
        assert replay_cuts(d)
        for leaf_seq in d.leaves():
            assert len(leaf_seq.antecedent) <= 2
            for t in sequent_types(leaf_seq):
                assert length(t) <= m
                assert set(prim_counts(t)) <= prims
            assert prove(leaf_seq, calc) is not None

    def test_sweep_small_rows(self):
        import itertools
        pool = [P, under(P, P), over(P, P), prod(P, P)]
        assert all(length(t) <= 2 for t in pool)
        reduced = 0
        for width in (3, 4):
            for row in itertools.product(pool, repeat=width):
                for succ in (P, prod(P, P)):
                    s = sequent(tuple(map(leaf, row)), succ)
                    if prove(s, LDIA) is None:
                        continue
                    d = cut_reduce_flat(s, {"p"}, 2, LDIA)
                    self._check_reduction(s, d, {"p"}, 2, LDIA)
                    reduced += 1
        assert reduced == 28

    def test_unit_guarded_rows(self):
        rows = [
            "dia 1 dia 1 \\ p p \\ p => p",
            "p p \\ dia 1 dia 1 \\ p => p",
            "dia 1 dia 1 \\ (p / p) p => p",
        ]
        for text in rows:
            s = parse_sequent(text)
            d = cut_reduce_flat(s, {"p"}, 4, L1STAR_DIA)
            self._check_reduction(s, d, {"p"}, 4, L1STAR_DIA)

    def test_rejects_bracketed_antecedent(self):
        s = parse_sequent("[ p ] => dia p")
        with pytest.raises(ValueError):
            cut_reduce_flat(s, {"p"}, 2, LDIA)

    def test_rejects_foreign_primitive(self):
        s = parse_sequent("q => q")
        with pytest.raises(ValueError):
            cut_reduce_flat(s, {"p"}, 2, LDIA)

    def test_rejects_long_type(self):
        s = parse_sequent("p p \\ (p \\ p) => p")
        with pytest.raises(ValueError):
            cut_reduce_flat(s, {"p"}, 2, LDIA)

    def test_rejects_unprovable(self):
        s = parse_sequent("p p p \\ p => p")
        with pytest.raises(ValueError):
            cut_reduce_flat(s, {"p"}, 2, LDIA)
