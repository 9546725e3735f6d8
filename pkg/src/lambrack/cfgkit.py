"""Context-free grammars and Cut-only derivations over sequents.

Two kinds of finite objects live here.  ``Cfg`` is a plain context-free
grammar whose nonterminals are category types; membership testing works
on an epsilon-eliminated, binarized image with back-mapping, and
``language_upto`` enumerates the generated strings up to a length bound.
``CutDerivation`` is a tree of Cut inferences over a finite base set of
sequents: a leaf is a base sequent, and an inner node combines a
derivation of ``Γ ⇒ A`` with a derivation of ``Δ[A] ⇒ B`` into one of
``Δ[Γ] ⇒ B``, where ``position`` records the context ``Δ[∎]``.
``cut_derives`` searches for such a derivation by dynamic programming
over the sub-hedges of the goal's antecedent.
"""

import itertools
from dataclasses import dataclass
from typing import Optional

from .syntax import (
    HOLE, Bracket, Hedge, Leaf, Sequent, Type,
    bracket_addresses, children_at, leaf, parse_type, plug, print_sequent,
    print_type, replace_span, sequent,
)

__all__ = [
    "Cfg", "Derivation", "derivation_yield", "derives", "language_upto",
    "print_cfg", "parse_cfg",
    "CutDerivation", "cut_leaf", "cut_node", "replay_cuts", "cut_derives",
]


# ---------------------------------------------------------------------------
# Cut derivations


@dataclass(frozen=True)
class CutDerivation:
    """A derivation using only the Cut rule from a base set of sequents.

    Leaves carry just a conclusion.  Inner nodes hold two
    sub-derivations and the context ``position`` (a hedge with one
    hole): plugging the left conclusion's antecedent into ``position``
    gives this node's antecedent, and plugging a single leaf of the
    left conclusion's succedent gives the right conclusion's
    antecedent.
    """

    conclusion: Sequent
    left: Optional["CutDerivation"] = None
    right: Optional["CutDerivation"] = None
    position: Optional[Hedge] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def leaves(self):
        """Base sequents used, left to right."""
        if self.is_leaf:
            yield self.conclusion
        else:
            yield from self.left.leaves()
            yield from self.right.leaves()

    def cut_count(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + self.left.cut_count() + self.right.cut_count()

    def __repr__(self):
        kind = "leaf" if self.is_leaf else f"{self.cut_count()} cuts"
        return f"<cut derivation {print_sequent(self.conclusion)} ({kind})>"


def cut_leaf(s: Sequent) -> CutDerivation:
    return CutDerivation(s)


def cut_node(left: CutDerivation, right: CutDerivation,
             position: Hedge) -> CutDerivation:
    """One Cut: from ``Γ ⇒ A`` and ``Δ[A] ⇒ B`` infer ``Δ[Γ] ⇒ B``.

    The conclusion is computed from the parts;  a mismatch between
    ``position`` and the right premise raises.
    """
    cut_type = left.conclusion.succedent
    expected = plug(position, (leaf(cut_type),))
    if expected != right.conclusion.antecedent:
        raise ValueError(
            "position filled with the cut type does not match the right "
            f"premise: {print_sequent(right.conclusion)}")
    conclusion = sequent(plug(position, left.conclusion.antecedent),
                         right.conclusion.succedent)
    return CutDerivation(conclusion, left, right, position)


def replay_cuts(d: CutDerivation, base=None) -> bool:
    """Re-check a derivation bottom-up.

    Every inner node must be a correct Cut instance, and when ``base``
    is given (any container supporting ``in``), every leaf conclusion
    must belong to it.
    """
    if d.is_leaf:
        return base is None or d.conclusion in base
    if d.left is None or d.right is None or d.position is None:
        return False
    try:
        rebuilt = cut_node(d.left, d.right, d.position)
    except ValueError:
        return False
    if rebuilt.conclusion != d.conclusion:
        return False
    return replay_cuts(d.left, base) and replay_cuts(d.right, base)


# ---------------------------------------------------------------------------
# Context-free grammars

# A grammar symbol is a Type (nonterminal) or a str (terminal).


@dataclass(frozen=True)
class Cfg:
    """A context-free grammar whose nonterminals are types.

    ``productions`` is an ordered, duplicate-free tuple of
    ``(lhs, rhs)`` pairs; ``rhs`` is a tuple of symbols and may be
    empty.  Two structurally equal types are the same nonterminal.
    """

    nonterminals: frozenset
    terminals: frozenset
    start: Type
    productions: tuple

    def __post_init__(self):
        if self.start not in self.nonterminals:
            raise ValueError("the start symbol is not a nonterminal")
        for lhs, rhs in self.productions:
            if lhs not in self.nonterminals:
                raise ValueError(f"unknown production head {lhs!r}")
            for sym in rhs:
                if isinstance(sym, Type):
                    if sym not in self.nonterminals:
                        raise ValueError(
                            f"unknown nonterminal {print_type(sym)!r}")
                elif sym not in self.terminals:
                    raise ValueError(f"unknown terminal {sym!r}")

    def __repr__(self):
        return (f"<cfg start {print_type(self.start)}: "
                f"{len(self.nonterminals)} nonterminals, "
                f"{len(self.productions)} productions>")


def cfg(start: Type, productions) -> Cfg:
    """Build a ``Cfg``, inferring the symbol sets from the productions."""
    prods = []
    seen = set()
    nts = {start}
    terms = set()
    for lhs, rhs in productions:
        entry = (lhs, tuple(rhs))
        if entry in seen:
            continue
        seen.add(entry)
        prods.append(entry)
        nts.add(lhs)
        for sym in entry[1]:
            if isinstance(sym, Type):
                nts.add(sym)
            else:
                terms.add(sym)
    return Cfg(frozenset(nts), frozenset(terms), start, tuple(prods))


@dataclass(frozen=True)
class Derivation:
    """A grammar derivation tree down to a sentential form.

    A node with a ``production`` applied it and carries one child per
    right-hand-side symbol; a node without one is a fringe symbol (a
    terminal, or a nonterminal left underived).
    """

    symbol: object
    production: Optional[tuple] = None
    children: tuple = ()

    def fringe(self) -> tuple:
        if self.production is None:
            return (self.symbol,)
        return tuple(s for c in self.children for s in c.fringe())

    def __repr__(self):
        sym = (print_type(self.symbol) if isinstance(self.symbol, Type)
               else self.symbol)
        return f"<derivation of {sym!r}>"


def derivation_yield(d: Derivation) -> tuple:
    """The fringe of a derivation, as a tuple of symbols."""
    return d.fringe()


def replay_derivation(d: Derivation, g: Cfg) -> bool:
    """Check that every step of ``d`` applies a production of ``g``."""
    if d.production is None:
        return isinstance(d.symbol, Type) or d.symbol in g.terminals
    lhs, rhs = d.production
    if d.production not in g.productions or lhs != d.symbol:
        return False
    if len(rhs) != len(d.children):
        return False
    return all(c.symbol == sym and replay_derivation(c, g)
               for sym, c in zip(rhs, d.children))


def _null_derivations(g: Cfg) -> dict:
    """An empty-string derivation for every nullable nonterminal."""
    null = {}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            if lhs in null:
                continue
            if all(sym in null for sym in rhs):
                null[lhs] = Derivation(
                    lhs, (lhs, rhs), tuple(null[sym] for sym in rhs))
                changed = True
    return null


def _eps_free(g: Cfg, null: dict) -> dict:
    """Epsilon-eliminated productions with back-mapping.

    Maps ``(lhs, reduced_rhs)`` (nonempty) to ``(original_production,
    kept_positions)``; dropping any subset of nullable positions of an
    original right-hand side yields a reduced one.
    """
    out = {}
    for prod in g.productions:
        lhs, rhs = prod
        nullable = [i for i, sym in enumerate(rhs) if sym in null]
        for r in range(len(nullable) + 1):
            for drop in itertools.combinations(nullable, r):
                kept = tuple(i for i in range(len(rhs)) if i not in drop)
                if not kept:
                    continue
                rhs2 = tuple(rhs[i] for i in kept)
                key = (lhs, rhs2)
                if key not in out:
                    out[key] = (prod, kept)
    return out


def _apply_efree(key, efree, null, children):
    """Rebuild an original-production node from reduced children."""
    (lhs, rhs2) = key
    prod, kept = efree[key]
    _, rhs = prod
    full = []
    it = iter(children)
    for i, sym in enumerate(rhs):
        if i in kept:
            full.append(next(it))
        else:
            full.append(null[sym])
    return Derivation(lhs, prod, tuple(full))


class _Recognizer:
    """The epsilon-free, binarized, unary-closed image of a grammar."""

    def __init__(self, g: Cfg):
        self.g = g
        self.null = _null_derivations(g)
        self.efree = _eps_free(g, self.null)
        # token rules: lhs -> single symbol
        self.unary = {}      # key (lhs, rhs2) with len(rhs2) == 1
        self.binary = []     # (head, x, y, efree_key, part_index)
        for key in self.efree:
            lhs, rhs2 = key
            if len(rhs2) == 1:
                self.unary[key] = None
            elif len(rhs2) == 2:
                self.binary.append((lhs, rhs2[0], rhs2[1], key, 0))
            else:
                syn = [("#syn", key, t) for t in range(len(rhs2) - 2)]
                heads = [lhs] + syn
                tails = syn + [rhs2[-1]]
                for t in range(len(rhs2) - 1):
                    self.binary.append(
                        (heads[t], rhs2[t], tails[t], key, t))
        # unary closure over nonterminal-to-nonterminal reduced rules
        self.chains = {}     # (a, b) -> tuple of unary efree keys, a =>+ b
        frontier = {}
        for key in self.unary:
            lhs, (sym,) = key
            if isinstance(sym, Type):
                if (lhs, sym) not in self.chains:
                    self.chains[(lhs, sym)] = (key,)
                    frontier[(lhs, sym)] = (key,)
        while frontier:
            new = {}
            for (a, b), chain in frontier.items():
                for key in self.unary:
                    lhs, (sym,) = key
                    if sym == a and isinstance(sym, Type):
                        pair = (lhs, b)
                        if pair not in self.chains and lhs != b:
                            ext = (key,) + chain
                            self.chains[pair] = ext
                            new[pair] = ext
            frontier = new

    def parse(self, tokens):
        """CKY chart for a sentential form; returns the chart."""
        n = len(tokens)
        chart = {}

        def close(cell):
            added = True
            while added:
                added = False
                for (a, b), chain in self.chains.items():
                    if b in cell and a not in cell:
                        cell[a] = ("chain", chain, b)
                        added = True

        for i, tok in enumerate(tokens):
            # the token stands for itself, so binary rules can consume
            # terminals directly wherever they sit in a right-hand side
            cell = {tok: ("self",)}
            for key in self.unary:
                lhs, (sym,) = key
                if not isinstance(sym, Type) and sym == tok:
                    cell.setdefault(lhs, ("tok", key))
            close(cell)
            chart[(i, i + 1)] = cell
        for width in range(2, n + 1):
            for i in range(n - width + 1):
                j = i + width
                cell = {}
                for k in range(i + 1, j):
                    left, right = chart[(i, k)], chart[(k, j)]
                    for rule in self.binary:
                        head, x, y, key, part = rule
                        if head in cell:
                            continue
                        if x in left and y in right:
                            cell[head] = ("bin", rule, k)
                close(cell)
                chart[(i, j)] = cell
        return chart

    def rebuild(self, chart, i, j, sym, tokens):
        """A Derivation over original productions for a chart entry."""
        entry = chart[(i, j)][sym]
        tag = entry[0]
        if tag == "self":
            return Derivation(sym)
        if tag == "tok":
            key = entry[1]
            child = Derivation(tokens[i])
            return _apply_efree(key, self.efree, self.null, (child,))
        if tag == "chain":
            _, chain, b = entry
            d = self.rebuild(chart, i, j, b, tokens)
            for key in reversed(chain):
                d = _apply_efree(key, self.efree, self.null, (d,))
            return d
        # binary: walk the synthetic tail to gather all reduced children
        _, rule, k = entry
        head, x, y, key, part = rule
        children = [self.rebuild(chart, i, k, x, tokens)]
        cur, lo = y, k
        while isinstance(cur, tuple) and cur and cur[0] == "#syn":
            sub = chart[(lo, j)][cur]
            _, rule2, k2 = sub
            _, x2, y2, _, _ = rule2
            children.append(self.rebuild(chart, lo, k2, x2, tokens))
            cur, lo = y2, k2
        children.append(self.rebuild(chart, lo, j, cur, tokens))
        return _apply_efree(key, self.efree, self.null, tuple(children))


def derives(g: Cfg, nt: Type, symbols) -> Optional[Derivation]:
    """A derivation of the sentential form ``symbols`` from ``nt``.

    ``symbols`` mixes terminals and nonterminals; the empty sequence
    asks whether ``nt`` is nullable.  Returns ``None`` when no
    derivation exists, and raises on symbols outside the grammar.
    """
    if nt not in g.nonterminals:
        raise ValueError(f"unknown nonterminal {print_type(nt)!r}")
    toks = tuple(symbols)
    for sym in toks:
        if isinstance(sym, Type):
            if sym not in g.nonterminals:
                raise ValueError(f"unknown nonterminal {print_type(sym)!r}")
        elif sym not in g.terminals:
            raise ValueError(f"unknown symbol {sym!r}")
    rec = _Recognizer(g)
    if not toks:
        return rec.null.get(nt)
    chart = rec.parse(toks)
    if nt not in chart[(0, len(toks))]:
        return None
    d = rec.rebuild(chart, 0, len(toks), nt, toks)
    assert d.fringe() == toks
    return d


def language_upto(g: Cfg, n: int) -> set:
    """Exactly the generated strings of at most ``n`` terminals.

    Strings are space-joined terminal sequences; the empty string
    stands for the empty sequence.
    """
    sets = {nt: set() for nt in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            acc = {()}
            for sym in rhs:
                if isinstance(sym, Type):
                    parts = sets[sym]
                else:
                    parts = {(sym,)}
                acc = {a + b for a in acc for b in parts
                       if len(a) + len(b) <= n}
                if not acc:
                    break
            new = acc - sets[lhs]
            if new:
                sets[lhs].update(new)
                changed = True
    return {" ".join(w) for w in sets[g.start]}


# ---------------------------------------------------------------------------
# Grammar text format


def print_cfg(g: Cfg) -> str:
    """Render a grammar in the line-oriented text format.

    The first line names the start type; each further line is one
    production, with types double-quoted, terminals bare, and ``eps``
    for an empty right-hand side.
    """
    def show(sym):
        if isinstance(sym, Type):
            return f'"{print_type(sym)}"'
        if not sym or any(c.isspace() for c in sym) or '"' in sym \
                or sym in ("eps", "->") or sym.startswith("start:"):
            raise ValueError(f"terminal not printable in this format: "
                             f"{sym!r}")
        return sym

    lines = [f'start: "{print_type(g.start)}"']
    for lhs, rhs in g.productions:
        body = " ".join(show(s) for s in rhs) if rhs else "eps"
        lines.append(f'{show(lhs)} -> {body}')
    return "\n".join(lines) + "\n"


def parse_cfg(text: str) -> Cfg:
    """Parse the output of ``print_cfg``."""

    def tokens_of(line):
        out = []
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch.isspace():
                pos += 1
            elif ch == '"':
                end = line.index('"', pos + 1)
                out.append(parse_type(line[pos + 1:end]))
                pos = end + 1
            else:
                end = pos
                while end < len(line) and not line[end].isspace():
                    end += 1
                out.append(line[pos:end])
                pos = end
        return out

    start = None
    prods = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("start:"):
            if start is not None:
                raise ValueError("duplicate start line")
            (start,) = tokens_of(line[len("start:"):])
            if not isinstance(start, Type):
                raise ValueError("the start symbol must be a quoted type")
            continue
        if "->" not in line:
            raise ValueError(f"not a production line: {line!r}")
        head, _, body = line.partition("->")
        (lhs,) = tokens_of(head)
        if not isinstance(lhs, Type):
            raise ValueError("production heads must be quoted types")
        rhs = tokens_of(body)
        if rhs == ["eps"]:
            rhs = []
        prods.append((lhs, tuple(rhs)))
    if start is None:
        raise ValueError("missing start line")
    return cfg(start, prods)


# ---------------------------------------------------------------------------
# Cut-only derivability


def cut_derives(base, s: Sequent) -> Optional[CutDerivation]:
    """A Cut-only derivation of ``s`` from the base set, or ``None``.

    Dynamic programming over the connected sub-hedges of the goal's
    antecedent: a span rewrites to a type ``E`` when some base sequent
    with succedent ``E`` matches it, each base antecedent leaf covering
    either one equal goal leaf or a sub-span already rewritten to that
    leaf's type.  This normal form is complete: in any Cut tree the
    final base sequent's antecedent splits the goal the same way.
    """
    base_seqs = []
    seen = set()
    for b in base:
        if b not in seen:
            seen.add(b)
            base_seqs.append(b)
    by_succ = {}
    for b in base_seqs:
        by_succ.setdefault(b.succedent, []).append(b)
    goal_ante = s.antecedent
    parents = [()] + list(bracket_addresses(goal_ante))
    states = []
    for parent in parents:
        w = len(children_at(goal_ante, parent))
        for lo in range(w + 1):
            for hi in range(lo, w + 1):
                for e in by_succ:
                    states.append((parent, lo, hi, e))
    table = {}

    def match_hedge(trees, qpath, parent, lo, hi):
        """Match base antecedent trees against the span; returns a list
        of (base leaf address, table state) substitutions or None."""
        sibs = children_at(goal_ante, parent)

        def go(ti, pos):
            if ti == len(trees):
                return [] if pos == hi else None
            tr = trees[ti]
            if isinstance(tr, Bracket):
                if pos < hi:
                    orig = sibs[pos]
                    if (isinstance(orig, Bracket)
                            and orig.index == tr.index):
                        sub = match_hedge(tr.children, qpath + (ti,),
                                          parent + (pos,), 0,
                                          len(orig.children))
                        if sub is not None:
                            rest = go(ti + 1, pos + 1)
                            if rest is not None:
                                return sub + rest
                return None
            f = tr.type
            if (pos < hi and isinstance(sibs[pos], Leaf)
                    and sibs[pos].type is f):
                rest = go(ti + 1, pos + 1)
                if rest is not None:
                    return rest
            for end in range(pos, hi + 1):
                state = (parent, pos, end, f)
                if table.get(state) is not None:
                    rest = go(ti + 1, end)
                    if rest is not None:
                        return [((qpath, ti), state)] + rest
            return None

        return go(0, lo)

    changed = True
    while changed:
        changed = False
        for state in states:
            if table.get(state) is not None:
                continue
            parent, lo, hi, e = state
            for b in by_succ[e]:
                sub = match_hedge(b.antecedent, (), parent, lo, hi)
                if sub is not None:
                    table[state] = (b, sub)
                    changed = True
                    break

    built = {}

    def build(state):
        if state in built:
            return built[state]
        b, subs = table[state]
        d = cut_leaf(b)
        for (qpath, c), substate in sorted(
                subs, key=lambda it: it[0][0] + (it[0][1],), reverse=True):
            piece = build(substate)
            position = replace_span(d.conclusion.antecedent, qpath, c, c + 1,
                                    (HOLE,))
            d = cut_node(piece, d, position)
        built[state] = d
        return d

    if s.succedent not in by_succ:
        return None
    top = ((), 0, len(goal_ante), s.succedent)
    if table.get(top) is None:
        return None
    d = build(top)
    assert d.conclusion == s, print_sequent(d.conclusion)
    return d
