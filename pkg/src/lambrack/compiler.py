"""Compilation of bracketed categorial grammars into context-free form.

A grammar over length-bounded types only ever needs finitely many
provable building blocks: the flat sequents with at most two antecedent
types, and the bridges that trade one bracket pair against a diamond or
box-down occurrence.  Every bounded provable sequent is reachable from
these by Cut alone, so a context-free grammar whose nonterminals are
the bounded types and whose productions mirror the building blocks
generates exactly the strings the categorial grammar recognizes.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .cfgkit import Cfg
from .freegroup import IDENTITY, mul, word_of
from .prover import Proof, prove
from .syntax import (
    L1STAR_DIA, LDIA, UNIT, Grammar, Sequent, Type, boxdown, bracket,
    calculus, dia, leaf, length, over, parse_sequent, prim, print_sequent,
    print_type, prod, sequent, under,
)

__all__ = ["RuleSets", "enum_types", "build_rulesets", "compile_cfg"]


def enum_types(prims, m: int, guarded: bool = False) -> list:
    """All types over the primitives with length at most ``m``.

    In guarded mode the unit is admitted, but only directly under a
    diamond, so ``dia 1`` acts as one extra atom of length two; every
    guarded type arises that way, and nothing else does.  The order is
    deterministic: by length, then by printed form.
    """
    if m < 1:
        raise ValueError("the length bound must be at least 1")
    names = sorted({str(name) for name in prims})
    by_len = {n: [] for n in range(m + 1)}
    by_len[1] = [prim(name) for name in names]
    if guarded and m >= 2:
        by_len[2].append(dia(UNIT))
    for n in range(2, m + 1):
        layer = by_len[n]
        for a in by_len[n - 2]:
            layer.append(dia(a))
            layer.append(boxdown(a))
        for k in range(1, n):
            for a in by_len[k]:
                for b in by_len[n - k]:
                    layer.extend((under(a, b), over(a, b), prod(a, b)))
    out = []
    for n in range(1, m + 1):
        out.extend(sorted(by_len[n], key=print_type))
    return out


@dataclass(frozen=True)
class RuleSets:
    """The finite sequent bases a compiled grammar rests on.

    ``flat_rules`` holds every provable flat sequent with at most two
    antecedent types drawn from the bounded enumeration;
    ``bridge_rules`` holds the bracket bridges (and, in guarded mode,
    the empty-bracket axiom).  Each member's proof is kept alongside.
    """

    mode: str          # "plain" or "guarded"
    prims: frozenset
    m: int
    calc_name: str
    flat_rules: tuple
    bridge_rules: tuple
    proofs: dict = field(compare=False, repr=False)

    @property
    def rules(self) -> tuple:
        return self.flat_rules + self.bridge_rules

    def proof_of(self, s: Sequent) -> Proof:
        return self.proofs[s]


def _flat_candidates(types, calc):
    """Provable flat sequents with at most two antecedent types.

    Candidates are pruned through the free-group image first: the
    antecedent's word must equal the succedent's, a necessary
    condition for provability, so only matching buckets reach the
    prover.  The surviving order equals the plain nested-loop order.
    """
    buckets = {}
    for t in types:
        buckets.setdefault(word_of(t, allow_plain=True), []).append(t)
    found = []
    widths = (0, 1, 2) if calc.unit else (1, 2)
    for n in widths:
        if n == 0:
            rows = [()]
        elif n == 1:
            rows = [(a,) for a in types]
        else:
            rows = [(a, b) for a in types for b in types]
        for row in rows:
            w = IDENTITY
            for t in row:
                w = mul(w, word_of(t, allow_plain=True))
            for c in buckets.get(w, ()):
                s = sequent(tuple(leaf(t) for t in row), c)
                proof = prove(s, calc)
                if proof is not None:
                    found.append((s, proof))
    return found


def _bridge_sequents(types, m, calc):
    out = []
    if calc.unit:
        out.append(sequent((bracket(()),), dia(UNIT)))
    for a in types:
        if length(a) <= m - 2:
            out.append(sequent((bracket((leaf(a),)),), dia(a)))
            out.append(sequent((bracket((leaf(boxdown(a)),)),), a))
    return out


def _cache_file(cache_dir, prims, m, calc) -> Path:
    tag = "-".join(sorted(prims)) or "none"
    return Path(cache_dir) / f"rules-{calc.name}-{tag}-m{m}.txt"


def _cache_header(prims, m, calc) -> str:
    return (f"# rule cache v{__version__} "
            f"B={','.join(sorted(prims))} m={m} calculus={calc.name}")


def _load_cached_flat(path: Path, prims, m, calc):
    try:
        lines = path.read_text().splitlines()
    except OSError:
        return None
    if not lines or lines[0].strip() != _cache_header(prims, m, calc):
        return None
    out = []
    for line in lines[1:]:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            s = parse_sequent(line)
        except ValueError:
            return None
        proof = prove(s, calc)
        if proof is None:
            return None
        out.append((s, proof))
    return out


def _store_cached_flat(path: Path, prims, m, calc, flat) -> None:
    lines = [_cache_header(prims, m, calc)]
    lines.extend(print_sequent(s) for s, _ in flat)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def build_rulesets(prims, m: int, calc, cache_dir=None) -> RuleSets:
    """Enumerate the bounded types and collect their rule sets.

    ``calc`` picks the mode: the plain bracket calculus gives the
    plain sets, the unit calculus the guarded ones.  The expensive
    flat-sequent search can be cached on disk: the cache is keyed by
    primitive set, bound, calculus and tool version, and is re-proved
    on load, so a stale file only costs time, never soundness.
    """
    calc = calculus(calc)
    if calc.name not in ("Ldia", "L1starDia"):
        raise ValueError(
            f"rule sets are built in Ldia or L1starDia, not {calc.name}")
    if m < 1:
        raise ValueError("the length bound must be at least 1")
    prims = frozenset(str(p) for p in prims)
    guarded = calc.unit
    types = enum_types(prims, m, guarded=guarded)
    flat = None
    path = None
    if cache_dir is not None:
        path = _cache_file(cache_dir, prims, m, calc)
        flat = _load_cached_flat(path, prims, m, calc)
    if flat is None:
        flat = _flat_candidates(types, calc)
        if path is not None:
            _store_cached_flat(path, prims, m, calc, flat)
    proofs = dict(flat)
    bridges = []
    for s in _bridge_sequents(types, m, calc):
        proof = prove(s, calc)
        assert proof is not None, print_sequent(s)
        bridges.append(s)
        proofs[s] = proof
    return RuleSets(
        mode="guarded" if guarded else "plain",
        prims=prims,
        m=m,
        calc_name=calc.name,
        flat_rules=tuple(s for s, _ in flat),
        bridge_rules=tuple(bridges),
        proofs=proofs,
    )


def compile_cfg(g: Grammar, calc, max_types: int = 4000,
                cache_dir=None) -> Cfg:
    """The context-free grammar equivalent to a categorial grammar.

    ``calc`` is the recognition calculus (plain or starred bracket
    calculus).  Nonterminals are all types over the grammar's
    primitives bounded by the longest type mentioned; productions copy
    the flat rule set, trade modalities for brackets, close the unit
    diamond off in starred mode, and attach the lexicon.
    """
    calc = calculus(calc)
    if calc.name not in ("Ldia", "LstarDia"):
        raise ValueError(
            f"grammars are compiled for Ldia or LstarDia, not {calc.name}")
    starred = calc.starred
    for _, t in g.lexicon + (("", g.distinguished),):
        if t.units:
            raise ValueError(
                f"grammar types must be unit-free: {print_type(t)}")
    base = sorted(g.primitives())
    m = max([length(t) for _, t in g.lexicon] + [length(g.distinguished)])
    types = enum_types(base, m, guarded=starred)
    if len(types) > max_types:
        raise ValueError(
            f"type enumeration too large: {len(types)} > {max_types}")
    rs = build_rulesets(base, m, L1STAR_DIA if starred else LDIA,
                        cache_dir=cache_dir)
    prods = []
    for s in rs.flat_rules:
        prods.append((s.succedent, tuple(tr.type for tr in s.antecedent)))
    if starred:
        prods.append((dia(UNIT), ()))
    short = [a for a in types if length(a) <= m - 2]
    for a in short:
        prods.append((dia(a), (a,)))
    for a in short:
        prods.append((a, (boxdown(a),)))
    for word, t in g.lexicon:
        prods.append((t, (word,)))
    terminals = frozenset(word for word, _ in g.lexicon)
    return Cfg(frozenset(types), terminals, g.distinguished,
               tuple(dict.fromkeys(prods)))
