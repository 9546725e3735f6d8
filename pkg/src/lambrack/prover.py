"""Cut-free backward proof search for the bracketed Lambek calculi.

The sequent rules, read backward, all strictly decrease the number of
connective and unit occurrences in the sequent, so depth-first search
with memoization terminates and is complete.  The search explores rule
instances in one fixed order (axioms, then the right rule matching the
succedent, then left rules by principal position in preorder, with
antecedent splits tried left to right), so the first proof found is a
deterministic function of the sequent: the canonical proof.  All
downstream machinery (thin indexing, interpolant extraction) consumes
canonical proofs, which keeps every derived artifact reproducible.

As a sound pruning step, a subgoal whose antecedent and succedent have
different free-group images is refuted without search: every rule
preserves equality of the two images from premises to conclusion, so
no such sequent is derivable.
"""

from __future__ import annotations

import time
from typing import Iterator, Optional

from .freegroup import word_of
from .syntax import (
    UNIT, BoxDown, Bracket, Dia, Leaf, Over, Prim, Prod, Sequent, Type,
    Under, Calculus, calculus, children_at, leaf, bracket, deindex,
    over, parse_sequent, prim, prim_count, print_sequent,
    prod, replace_span, sequent, under, validate_sequent,
)

__all__ = [
    "Proof", "ProofSearchTimeout", "RULES",
    "Prover", "prove", "prove_flat", "check",
    "premises_of", "instances",
    "print_proof", "parse_proof", "deindex_proof",
    "translate_flat", "is_guarded",
]

RULES = ("Ax", "UnderL", "UnderR", "OverL", "OverR", "ProdL", "ProdR",
         "DiaL", "DiaR", "BoxDownL", "BoxDownR", "UnitL", "UnitR")

# rules whose principal field is always None
_NO_PRINCIPAL = frozenset(["Ax", "UnitR", "UnderR", "OverR", "DiaR", "BoxDownR"])


class ProofSearchTimeout(RuntimeError):
    """Raised when a prover call exceeds its wall-clock budget."""


class Proof:
    """A rule-labeled derivation tree.

    ``principal`` identifies the rule instance: ``None`` for rules
    determined by the sequent alone, the split position ``k`` for the
    product right rule, and a position tuple for left rules (see
    ``premises_of``).  Proofs parsed from text carry ``None``
    principals throughout; ``check`` infers them.
    """

    __slots__ = ("conclusion", "rule", "premises", "principal")

    def __init__(self, conclusion: Sequent, rule: str, premises=(),
                 principal=None):
        if rule not in RULES:
            raise ValueError(f"unknown rule tag {rule!r}")
        self.conclusion = conclusion
        self.rule = rule
        self.premises = tuple(premises)
        self.principal = principal

    def __repr__(self):
        return f"<proof {self.rule} {print_sequent(self.conclusion)}>"

    def __eq__(self, other):
        return (isinstance(other, Proof)
                and self.conclusion == other.conclusion
                and self.rule == other.rule
                and self.premises == other.premises)

    def __hash__(self):
        return hash((self.conclusion, self.rule, self.premises))

    def size(self) -> int:
        return 1 + sum(q.size() for q in self.premises)


# ---------------------------------------------------------------------------
# Rule instances
#
# Principal encodings:
#   UnderL   (parent, g, j): leaf ``A \\ B`` at position j under the bracket
#            node at ``parent`` (() is the root hedge), with the argument
#            hedge being the siblings g..j-1.
#   OverL    (parent, j, e): leaf ``B / A`` at j, argument siblings j+1..e-1.
#   ProdL, DiaL, UnitL  (parent, j): the principal leaf position.
#   BoxDownL (parent, j): position of the bracket holding the boxd leaf.
#   ProdR    k: the antecedent split point.


def premises_of(s: Sequent, rule: str, principal, calc: Calculus):
    """Premises of the rule instance, or None if it is not legal.

    This is the single constructor of premise sequents: the search and
    the checker both go through it, so they cannot disagree on what a
    rule instance means.
    """
    ante, succ = s.antecedent, s.succedent
    if rule == "Ax":
        ok = (len(ante) == 1 and isinstance(ante[0], Leaf)
              and isinstance(succ, Prim) and ante[0].type is succ)
        return () if ok else None
    if rule == "UnitR":
        return () if calc.unit and not ante and succ is UNIT else None
    if rule == "UnderR":
        if not isinstance(succ, Under):
            return None
        return (sequent((leaf(succ.left),) + ante, succ.right),)
    if rule == "OverR":
        if not isinstance(succ, Over):
            return None
        return (sequent(ante + (leaf(succ.right),), succ.left),)
    if rule == "ProdR":
        if not isinstance(succ, Prod) or not isinstance(principal, int):
            return None
        k = principal
        lo, hi = (0, len(ante)) if calc.starred else (1, len(ante) - 1)
        if not lo <= k <= hi:
            return None
        return (sequent(ante[:k], succ.left), sequent(ante[k:], succ.right))
    if rule == "DiaR":
        if (isinstance(succ, Dia) and len(ante) == 1
                and isinstance(ante[0], Bracket) and ante[0].index == succ.index):
            return (sequent(ante[0].children, succ.body),)
        return None
    if rule == "BoxDownR":
        if not isinstance(succ, BoxDown):
            return None
        return (sequent((bracket(ante, succ.index),), succ.body),)

    # left rules
    try:
        parent, rest = principal[0], principal[1:]
        siblings = children_at(ante, parent)
    except (TypeError, IndexError, AttributeError):
        return None

    def leaf_at(j):
        if 0 <= j < len(siblings) and isinstance(siblings[j], Leaf):
            return siblings[j].type
        return None

    if rule == "UnderL":
        if len(rest) != 2:
            return None
        g, j = rest
        t = leaf_at(j)
        if not isinstance(t, Under) or not 0 <= g <= j:
            return None
        if g == j and not calc.starred:
            return None
        return (sequent(siblings[g:j], t.left),
                sequent(replace_span(ante, parent, g, j + 1,
                                     (leaf(t.right),)), succ))
    if rule == "OverL":
        if len(rest) != 2:
            return None
        j, e = rest
        t = leaf_at(j)
        if not isinstance(t, Over) or not j + 1 <= e <= len(siblings):
            return None
        if e == j + 1 and not calc.starred:
            return None
        return (sequent(siblings[j + 1:e], t.right),
                sequent(replace_span(ante, parent, j, e,
                                     (leaf(t.left),)), succ))
    if len(rest) != 1:
        return None
    (j,) = rest
    if rule == "ProdL":
        t = leaf_at(j)
        if not isinstance(t, Prod):
            return None
        return (sequent(replace_span(ante, parent, j, j + 1,
                                     (leaf(t.left), leaf(t.right))), succ),)
    if rule == "DiaL":
        t = leaf_at(j)
        if not isinstance(t, Dia):
            return None
        return (sequent(replace_span(ante, parent, j, j + 1,
                                     (bracket((leaf(t.body),), t.index),)),
                        succ),)
    if rule == "UnitL":
        if not calc.unit or leaf_at(j) is not UNIT:
            return None
        return (sequent(replace_span(ante, parent, j, j + 1, ()), succ),)
    if rule == "BoxDownL":
        if not (0 <= j < len(siblings) and isinstance(siblings[j], Bracket)):
            return None
        br = siblings[j]
        if len(br.children) != 1 or not isinstance(br.children[0], Leaf):
            return None
        t = br.children[0].type
        if not isinstance(t, BoxDown) or t.index != br.index:
            return None
        return (sequent(replace_span(ante, parent, j, j + 1,
                                     (leaf(t.body),)), succ),)
    return None


def _positions(h) -> Iterator:
    """(parent, index, tree, siblings) for every node, preorder."""

    def walk(trees, prefix):
        for j, tr in enumerate(trees):
            yield prefix, j, tr, trees
            if isinstance(tr, Bracket):
                yield from walk(tr.children, prefix + (j,))

    yield from walk(h, ())


def instances(s: Sequent, calc: Calculus) -> Iterator:
    """All (rule, principal) pairs applicable to ``s``, canonical order."""
    ante, succ = s.antecedent, s.succedent
    if (len(ante) == 1 and isinstance(ante[0], Leaf)
            and isinstance(succ, Prim) and ante[0].type is succ):
        yield "Ax", None
    if calc.unit and not ante and succ is UNIT:
        yield "UnitR", None
    if isinstance(succ, Under):
        yield "UnderR", None
    elif isinstance(succ, Over):
        yield "OverR", None
    elif isinstance(succ, Prod):
        lo, hi = (0, len(ante)) if calc.starred else (1, len(ante) - 1)
        for k in range(lo, hi + 1):
            yield "ProdR", k
    elif isinstance(succ, Dia):
        if (len(ante) == 1 and isinstance(ante[0], Bracket)
                and ante[0].index == succ.index):
            yield "DiaR", None
    elif isinstance(succ, BoxDown):
        yield "BoxDownR", None
    for parent, j, tr, siblings in _positions(ante):
        if isinstance(tr, Bracket):
            if (len(tr.children) == 1 and isinstance(tr.children[0], Leaf)
                    and isinstance(tr.children[0].type, BoxDown)
                    and tr.children[0].type.index == tr.index):
                yield "BoxDownL", (parent, j)
            continue
        t = tr.type
        if isinstance(t, Under):
            for g in range(0, j + (1 if calc.starred else 0)):
                yield "UnderL", (parent, g, j)
        elif isinstance(t, Over):
            for e in range(j + (1 if calc.starred else 2), len(siblings) + 1):
                yield "OverL", (parent, j, e)
        elif isinstance(t, Prod):
            yield "ProdL", (parent, j)
        elif isinstance(t, Dia):
            yield "DiaL", (parent, j)
        elif t is UNIT and calc.unit:
            yield "UnitL", (parent, j)


# ---------------------------------------------------------------------------
# Search


class Prover:
    """Backward proof search with a persistent memo table.

    One instance may serve many ``prove`` calls; memoized results are
    facts about sequents, independent of which top-level call computed
    them, so sharing an instance across a sweep changes nothing except
    speed.  Instances are not thread-safe.
    """

    def __init__(self, calc, timeout_ms: Optional[float] = None):
        self.calc = calculus(calc)
        self.timeout_ms = timeout_ms
        self.memo: dict = {}
        self._deadline = None
        self._ticks = 0

    def prove(self, s: Sequent) -> Optional[Proof]:
        validate_sequent(s, self.calc)
        if self.timeout_ms is not None:
            self._deadline = time.monotonic() + self.timeout_ms / 1000.0
        # an unbalanced top-level goal is refuted without touching the
        # memo table, so bulk enumeration does not grow it
        if word_of(s.antecedent, allow_plain=True) != \
                word_of(s.succedent, allow_plain=True):
            return None
        return self._search(s)

    def _search(self, s: Sequent) -> Optional[Proof]:
        if self._deadline is not None:
            self._ticks += 1
            if self._ticks % 32 == 0 and time.monotonic() > self._deadline:
                raise ProofSearchTimeout(
                    f"no answer for {print_sequent(s)} within "
                    f"{self.timeout_ms} ms")
        found, result = self._lookup(s)
        if found:
            return result
        result = None
        if word_of(s.antecedent, allow_plain=True) == \
                word_of(s.succedent, allow_plain=True):
            for rule, principal in instances(s, self.calc):
                premises = premises_of(s, rule, principal, self.calc)
                subproofs = []
                for premise in premises:
                    sub = self._search(premise)
                    if sub is None:
                        break
                    subproofs.append(sub)
                else:
                    result = Proof(s, rule, tuple(subproofs), principal)
                    break
        self.memo[s] = result
        return result

    def _lookup(self, s):
        sentinel = _MISSING
        r = self.memo.get(s, sentinel)
        if r is sentinel:
            return False, None
        return True, r


_MISSING = object()


def prove(s: Sequent, calc, timeout_ms: Optional[float] = None) -> Optional[Proof]:
    """Search for a cut-free proof; None means not provable.

    Each call uses a fresh memo table; reuse a ``Prover`` instance when
    running many related queries.
    """
    return Prover(calc, timeout_ms).prove(s)


def prove_flat(s: Sequent, calc, timeout_ms: Optional[float] = None) -> Optional[Proof]:
    """``prove`` restricted to the bracket-free calculi (L, L*, L*1)."""
    c = calculus(calc)
    if c.brackets:
        raise ValueError(f"prove_flat expects a bracket-free calculus, got {c.name}")
    return prove(s, c, timeout_ms)


# ---------------------------------------------------------------------------
# Checking


def check(p: Proof, calc) -> bool:
    """True iff every node of ``p`` is a legal rule instance of ``calc``.

    Independent of the search: usable as an oracle on hand-built or
    parsed proofs.  Nodes without principal data get it inferred (first
    instance, in canonical order, whose premises match the stored ones)
    and recorded on the node, so a checked proof is ready for the
    machinery that dispatches on principal positions.
    """
    calc = calculus(calc)
    try:
        validate_sequent(p.conclusion, calc)
    except ValueError:
        return False
    return _check_node(p, calc)


def _check_node(p: Proof, calc: Calculus) -> bool:
    try:
        validate_sequent(p.conclusion, calc)
    except ValueError:
        return False
    stored = tuple(q.conclusion for q in p.premises)
    if p.principal is None and p.rule not in _NO_PRINCIPAL:
        for rule, principal in instances(p.conclusion, calc):
            if rule != p.rule:
                continue
            premises = premises_of(p.conclusion, rule, principal, calc)
            if premises == stored:
                p.principal = principal
                break
        else:
            return False
    else:
        premises = premises_of(p.conclusion, p.rule, p.principal, calc)
        if premises is None or premises != stored:
            return False
    return all(_check_node(q, calc) for q in p.premises)


# ---------------------------------------------------------------------------
# Proof text


def print_proof(p: Proof) -> str:
    """One node per line, two-space indentation per premise depth."""
    lines = []

    def walk(node, depth):
        lines.append(f"{'  ' * depth}{node.rule}  {print_sequent(node.conclusion)}")
        for q in node.premises:
            walk(q, depth + 1)

    walk(p, 0)
    return "\n".join(lines)


def parse_proof(text: str) -> Proof:
    """Inverse of ``print_proof``; principals are left to be inferred."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if indent % 2:
            raise ValueError(f"line {lineno}: odd indentation")
        parts = stripped.split(None, 1)
        if len(parts) != 2 or parts[0] not in RULES:
            raise ValueError(f"line {lineno}: expected '<rule>  <sequent>'")
        entries.append((indent // 2, parts[0], parse_sequent(parts[1])))
    if not entries:
        raise ValueError("empty proof text")

    def build(i, depth):
        d, rule, s = entries[i]
        if d != depth:
            raise ValueError(f"node {i}: expected depth {depth}, got {d}")
        i += 1
        premises = []
        while i < len(entries) and entries[i][0] > depth:
            sub, i = build(i, depth + 1)
            premises.append(sub)
        return Proof(s, rule, tuple(premises)), i

    root, end = build(0, 0)
    if end != len(entries):
        raise ValueError("trailing proof lines outside the root derivation")
    return root


def deindex_proof(p: Proof, theta: Optional[dict] = None) -> Proof:
    """Deindex every sequent in the proof; rule structure is unchanged."""
    return Proof(deindex(p.conclusion, theta), p.rule,
                 tuple(deindex_proof(q, theta) for q in p.premises),
                 p.principal)


# ---------------------------------------------------------------------------
# The bracket-erasing translation and guardedness

_M = "m"
_N = "n"


def translate_flat(t: Type) -> Type:
    """Erase modalities into bracket-simulating primitives ``m``, ``n``.

    ``dia A`` becomes ``m * (A * n)`` and ``boxd A`` becomes
    ``(m \\ A) / n``; everything else is homomorphic.  The input must
    not mention the reserved primitives and must be non-indexed.
    """
    if t.mode == "indexed":
        raise ValueError("translate_flat needs non-indexed input")
    if prim_count(_M, t) or prim_count(_N, t):
        raise ValueError(f"type {t} already uses the reserved primitives m, n")
    m, n = prim(_M), prim(_N)

    def go(x: Type) -> Type:
        if isinstance(x, Prim) or x is UNIT:
            return x
        if isinstance(x, Under):
            return under(go(x.left), go(x.right))
        if isinstance(x, Over):
            return over(go(x.left), go(x.right))
        if isinstance(x, Prod):
            return prod(go(x.left), go(x.right))
        if isinstance(x, Dia):
            return prod(m, prod(go(x.body), n))
        return over(under(m, go(x.body)), n)

    return go(t)


def is_guarded(t: Type) -> bool:
    """True iff every unit occurrence is the immediate body of a dia."""
    if t is UNIT:
        return False
    if isinstance(t, (Prim,)):
        return True
    if isinstance(t, Dia):
        return t.body is UNIT or is_guarded(t.body)
    if isinstance(t, BoxDown):
        return is_guarded(t.body)
    return is_guarded(t.left) and is_guarded(t.right)
