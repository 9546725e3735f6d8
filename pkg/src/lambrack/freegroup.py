"""Free-group interpretation of indexed types and hedges.

Types and hedges map into the free group generated by the primitive
names together with one opening and one closing generator per bracket
index.  Words are kept reduced at all times, so the group-theoretic
length of a word is just ``len``.

A word is a tuple of letters; a letter is ``(kind, value, sign)`` with
``kind`` one of ``"p"`` (primitive), ``"<"`` (opening bracket) or
``">"`` (closing bracket), ``value`` the primitive name or bracket
index, and ``sign`` +1 or -1.

The provability-invariant carried by this interpretation: in every
derivable sequent the word of the antecedent equals the word of the
succedent.  The prover uses that as a sound pruning filter, and the
harness re-verifies it on every provable sequent it encounters.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Tuple

from .syntax import (
    UNIT, BoxDown, Bracket, Dia, Hole, Leaf, Over, Prim, Prod, Tree, Type,
    Under,
)

__all__ = [
    "Letter", "Word", "IDENTITY",
    "prim_letter", "open_letter", "close_letter", "word",
    "mul", "inv", "wlen", "word_of", "shrinking_pair", "print_word",
]

Letter = Tuple[str, object, int]
Word = Tuple[Letter, ...]

IDENTITY: Word = ()


def prim_letter(name: str, sign: int = 1) -> Letter:
    return ("p", name, sign)


def open_letter(index: Optional[int], sign: int = 1) -> Letter:
    return ("<", index, sign)


def close_letter(index: Optional[int], sign: int = 1) -> Letter:
    return (">", index, sign)


def _inverse_letter(letter: Letter) -> Letter:
    kind, value, sign = letter
    return (kind, value, -sign)


def word(letters: Iterable[Letter]) -> Word:
    """Reduce an arbitrary letter sequence to its normal form."""
    stack = []
    for letter in letters:
        if stack and stack[-1] == _inverse_letter(letter):
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def mul(u: Word, v: Word) -> Word:
    """Product of two reduced words (cancellation happens at the seam)."""
    i = len(u)
    j = 0
    n = len(v)
    while i > 0 and j < n and u[i - 1] == _inverse_letter(v[j]):
        i -= 1
        j += 1
    return u[:i] + v[j:]


def inv(u: Word) -> Word:
    return tuple((kind, value, -sign) for kind, value, sign in reversed(u))


def wlen(u: Word) -> int:
    return len(u)


_type_words: dict = {}


def _word_of_type(t: Type) -> Word:
    w = _type_words.get(t)
    if w is not None:
        return w
    if isinstance(t, Prim):
        w = (prim_letter(t.name),)
    elif t is UNIT:
        w = IDENTITY
    elif isinstance(t, Under):
        w = mul(inv(_word_of_type(t.left)), _word_of_type(t.right))
    elif isinstance(t, Over):
        w = mul(_word_of_type(t.left), inv(_word_of_type(t.right)))
    elif isinstance(t, Prod):
        w = mul(_word_of_type(t.left), _word_of_type(t.right))
    elif isinstance(t, Dia):
        w = mul(mul((open_letter(t.index),), _word_of_type(t.body)),
                (close_letter(t.index),))
    elif isinstance(t, BoxDown):
        w = mul(mul((open_letter(t.index, -1),), _word_of_type(t.body)),
                (close_letter(t.index, -1),))
    else:
        raise TypeError(f"cannot interpret {t!r}")
    _type_words[t] = w
    return w


def _word_of_tree(tr: Tree) -> Word:
    if isinstance(tr, Leaf):
        return _word_of_type(tr.type)
    if isinstance(tr, Bracket):
        w = (open_letter(tr.index),)
        for ch in tr.children:
            w = mul(w, _word_of_tree(ch))
        return mul(w, (close_letter(tr.index),))
    raise TypeError(f"cannot interpret {tr!r}")


def word_of(x, allow_plain: bool = False) -> Word:
    """Interpret an indexed type, tree or hedge as a reduced group word.

    Non-indexed modalities are rejected unless ``allow_plain`` is set,
    in which case all of them are read as carrying one fixed index.
    That collapsed reading is what the prover's pruning filter uses; it
    is sound because the provability invariant holds index by index and
    in the collapsed form alike.
    """
    mode = getattr(x, "mode", None)
    if isinstance(x, tuple):
        w = IDENTITY
        has_plain = False
        for tr in x:
            if tr.mode == "plain":
                has_plain = True
            w = mul(w, _word_of_tree(tr))
        if has_plain and not allow_plain:
            raise ValueError("word_of needs indexed input")
        return w
    if mode == "plain" and not allow_plain:
        raise ValueError("word_of needs indexed input")
    if isinstance(x, Type):
        return _word_of_type(x)
    if isinstance(x, Tree):
        return _word_of_tree(x)
    raise TypeError(f"cannot interpret {x!r}")


def shrinking_pair(words: Sequence[Word]) -> int:
    """Least 1-based ``k`` with ``|u_k u_{k+1}| <= max(|u_k|, |u_{k+1}|)``.

    The input words must be reduced and multiply out to the identity;
    such a pair then always exists for two or more factors.
    """
    n = len(words)
    if n < 2:
        raise ValueError(f"need at least two words, got {n}")
    total = IDENTITY
    for u in words:
        total = mul(total, u)
    if total != IDENTITY:
        raise ValueError("the words do not multiply out to the identity")
    for k in range(n - 1):
        u, v = words[k], words[k + 1]
        if wlen(mul(u, v)) <= max(wlen(u), wlen(v)):
            return k + 1
    raise AssertionError("unreachable: an identity product admits a shrinking pair")


def print_word(u: Word) -> str:
    """Debug rendering: ``p1 <2 >2'`` style, ``e`` for the identity."""
    if not u:
        return "e"
    parts = []
    for kind, value, sign in u:
        if kind == "p":
            text = str(value)
        else:
            text = kind if value is None else f"{kind}{value}"
        parts.append(text + ("'" if sign < 0 else ""))
    return " ".join(parts)
