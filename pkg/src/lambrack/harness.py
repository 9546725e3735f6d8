"""Cross-validation harness: every checkable claim as an executable report.

Each ``run_*`` function exercises one family of claims end to end and
returns a Report; ``run_all`` executes the whole battery in a fixed
order and can persist the results as ``report.json`` and ``report.txt``.
Randomized suites take an explicit seed, exhaustive suites enumerate in
a deterministic order, so two runs with the same arguments reach the
same verdicts and counts (elapsed times naturally vary).

Where a sweep needs the language of a grammar, the two sides are
decided by disjoint code paths: the grammar side by brute-force hedge
enumeration plus proof search, the compiled side by chart parsing.
Agreement between them is therefore a genuine cross-check rather than
one implementation confirming itself.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Mapping, Optional

from .cfgkit import cut_derives, derives, print_cfg, replay_cuts
from .compiler import build_rulesets, compile_cfg, enum_types
from .freegroup import (
    IDENTITY, inv, mul, prim_letter, print_word, shrinking_pair, wlen, word,
    word_of,
)
from .interpolate import (
    extract_interpolant, partition_at, thin_index, thin_interpolant_length_ok,
)
from .prover import (
    ProofSearchTimeout, Prover, check, parse_proof, print_proof, prove,
    translate_flat,
)
from .syntax import (
    L, L1STAR, L1STAR_DIA, L1STAR_DIA_M, LDIA, LDIA_M, LSTAR_DIA, UNIT,
    Grammar, boxdown, bracket, calculus, deindex, dia, is_thin, leaf, length,
    mod_counts, mod_total, over, parse_grammar, parse_sequent, parse_type,
    partitions, plug, prim, prim_counts, print_sequent, prod, sequent, under,
)

__all__ = [
    "Report",
    "BUNDLED_GRAMMARS",
    "DEFAULT_SEED",
    "bundled_grammar",
    "load_grammar",
    "run_golden",
    "run_interpolation_sweep",
    "run_shrinking_trials",
    "run_reduction_sweep",
    "run_cut_completeness",
    "run_equivalence",
    "run_identity_family",
    "run_freegroup_soundness",
    "run_all",
    "format_reports",
    "write_reports",
]

DEFAULT_SEED = 1729

# Reference sequents exercised by run_golden.
REFERENCE_BRACKETED = "[ [ p ] dia p \\ p ] => boxd dia dia p"
REFERENCE_BRACKETED_THIN = \
    "[:2 [:1 p1 ]:1 dia:1 p1 \\ p2 ]:2 => boxd:3 dia:3 dia:2 p2"
REFERENCE_UNDERIVABLE = "dia boxd p dia boxd q => dia boxd (p * q)"
REFERENCE_UNIT = \
    "p3 / dia:1 (p1 * dia:2 (p2 / p2)) [:1 p1 [:2 ]:2 ]:1 => p3"
REFERENCE_UNIT_INTERPOLANT = "dia:1 (p1 * dia:2 1)"

# Grammars shipped with the package and the calculus each recognizes in.
BUNDLED_GRAMMARS = (
    ("anbn.lg", "Ldia"),
    ("brackets.lg", "Ldia"),
    ("starred.lg", "LstarDia"),
)


def bundled_grammar(name: str) -> Grammar:
    """Load one of the grammars shipped under ``lambrack/grammars``."""
    path = resources.files("lambrack") / "grammars" / name
    try:
        text = path.read_text()
    except (FileNotFoundError, OSError):
        known = ", ".join(n for n, _ in BUNDLED_GRAMMARS)
        raise ValueError(f"no bundled grammar {name!r}; have {known}")
    return parse_grammar(text)


@dataclass(frozen=True)
class Report:
    """Outcome of one claim family: verdict, tallies, and provenance."""

    claim: str
    status: str
    counts: Mapping[str, int]
    elapsed: float
    artifacts: tuple = ()
    reproducer: Optional[str] = None
    notes: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "status": self.status,
            "counts": dict(self.counts),
            "elapsed": self.elapsed,
            "artifacts": list(self.artifacts),
            "reproducer": self.reproducer,
            "notes": list(self.notes),
        }


def _finish(claim, started, counts, failures, notes=(), artifacts=()):
    failures = list(failures)
    return Report(
        claim=claim,
        status="fail" if failures else "pass",
        counts=dict(counts),
        elapsed=time.monotonic() - started,
        artifacts=tuple(str(a) for a in artifacts),
        reproducer=failures[0] if failures else None,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Hedge enumeration for the brute-force side of language membership


@lru_cache(maxsize=None)
def _hedges_exact(seg: tuple, b: int, allow_empty: bool) -> tuple:
    """All hedges with yield ``seg`` and exactly ``b`` bracket pairs.

    Decomposition by the first tree is unique, so no hedge is produced
    twice.  ``allow_empty`` admits brackets with no contents, which only
    the calculi with empty antecedents accept.
    """
    if b == 0:
        return (tuple(leaf(t) for t in seg),)
    out = []
    if seg:
        for rest in _hedges_exact(seg[1:], b, allow_empty):
            out.append((leaf(seg[0]),) + rest)
    for k in range(len(seg) + 1):
        for i in range(b):
            for inner in _hedges_exact(seg[:k], i, allow_empty):
                if not inner and not allow_empty:
                    continue
                first = bracket(inner)
                for rest in _hedges_exact(seg[k:], b - 1 - i, allow_empty):
                    out.append((first,) + rest)
    return tuple(out)


def _bracketings(row, budget, allow_empty):
    for b in range(budget + 1):
        yield from _hedges_exact(tuple(row), b, allow_empty)


# ---------------------------------------------------------------------------
# Reference sequents


def run_golden(timeout_ms: Optional[float] = None, out_dir=None) -> Report:
    """Check the fixed reference sequents and the thin-indexing golden.

    Covers: the bracketed demonstration sequent proves and its emitted
    derivation survives a text round-trip plus replay; thin indexing of
    that proof yields the expected indexed conclusion and substitution;
    the modal distribution sequent is underivable while its flat
    translation proves; the unit-calculus reference interpolates to the
    expected guarded type.
    """
    started = time.monotonic()
    failures = []
    notes = []
    artifacts = []
    checks = 0

    def expect(cond, label):
        nonlocal checks
        checks += 1
        if not cond:
            failures.append(label)

    try:
        s1 = parse_sequent(REFERENCE_BRACKETED)
        p1 = prove(s1, LDIA, timeout_ms=timeout_ms)
        expect(p1 is not None, f"not provable: {REFERENCE_BRACKETED}")
        if p1 is not None:
            expect(check(p1, LDIA), "emitted derivation fails replay")
            back = parse_proof(print_proof(p1))
            expect(back == p1 and check(back, LDIA),
                   "proof text round-trip changed the derivation")
            thin, theta = thin_index(p1, LDIA)
            expect(thin.conclusion == parse_sequent(REFERENCE_BRACKETED_THIN),
                   f"thin conclusion is {print_sequent(thin.conclusion)}")
            expect(theta == {"p1": "p", "p2": "p"},
                   f"thin substitution is {theta}")
            expect(is_thin(thin.conclusion), "thin conclusion is not thin")
            expect(check(thin, LDIA_M), "thin proof fails replay")
            expect(deindex(thin.conclusion, theta) == s1,
                   "deindexing does not recover the original")
            if out_dir is not None:
                path = Path(out_dir) / "reference-bracketed.proof"
                path.write_text(print_proof(p1))
                artifacts.append(path)

        s2 = parse_sequent(REFERENCE_UNDERIVABLE)
        expect(prove(s2, LDIA, timeout_ms=timeout_ms) is None,
               f"unexpectedly provable: {REFERENCE_UNDERIVABLE}")
        flat = sequent(
            tuple(leaf(translate_flat(tr.type)) for tr in s2.antecedent),
            translate_flat(s2.succedent))
        expect(prove(flat, L, timeout_ms=timeout_ms) is not None,
               f"flat translation not provable: {print_sequent(flat)}")
        notes.append(
            "flat translation of the underivable reference: "
            + print_sequent(flat))

        s3 = parse_sequent(REFERENCE_UNIT)
        p3 = prove(s3, L1STAR_DIA_M, timeout_ms=timeout_ms)
        expect(p3 is not None, f"not provable: {REFERENCE_UNIT}")
        if p3 is not None:
            part = partition_at(s3.antecedent, (), 1, 2)
            res = extract_interpolant(p3, part, L1STAR_DIA_M)
            expect(res.interpolant is parse_type(REFERENCE_UNIT_INTERPOLANT),
                   f"interpolant is {res.interpolant}")
            expect(check(res.left_proof, L1STAR_DIA_M)
                   and check(res.right_proof, L1STAR_DIA_M),
                   "interpolation proofs fail replay")
            if out_dir is not None:
                path = Path(out_dir) / "reference-unit.proof"
                path.write_text(print_proof(p3))
                artifacts.append(path)
    except ProofSearchTimeout as exc:
        failures.append(f"proof search timed out: {exc}")

    return _finish("golden-sequents", started, {"checks": checks},
                   failures, notes, artifacts)


# ---------------------------------------------------------------------------
# Interpolation sweep


def _types_by_connectives(prims, max_conn):
    """Types over ``prims`` grouped by connective count 0..max_conn."""
    by_conn = {0: [prim(str(name)) for name in sorted(prims)]}
    for c in range(1, max_conn + 1):
        layer = []
        for a in by_conn[c - 1]:
            layer.append(dia(a))
            layer.append(boxdown(a))
        for k in range(c):
            for a in by_conn[k]:
                for b in by_conn[c - 1 - k]:
                    layer.extend((under(a, b), over(a, b), prod(a, b)))
        by_conn[c] = layer
    return by_conn


_POPULATIONS: dict = {}


def _interp_population(timeout_ms=None):
    """All bracketed sequents provable in the plain bracket calculus with
    at most 3 antecedent leaves, 3 connectives in total, primitives
    {p, q}, and bracket counts within the modality budget.

    Each bracket pair of a provable sequent is consumed by a modality
    occurrence, so hedges never need more brackets than the sequent has
    modalities; the compiled population is cached for reuse by the
    free-group soundness sweep.
    """
    if "interp" in _POPULATIONS:
        return _POPULATIONS["interp"]
    by_conn = _types_by_connectives(("p", "q"), 3)
    succ_by_word = {}
    for c in range(4):
        for t in by_conn[c]:
            key = word_of(t, allow_plain=True)
            succ_by_word.setdefault(key, []).append((c, t))

    rows = []

    def grow(row, conn, mods):
        if row:
            rows.append((row, conn, mods))
        if len(row) == 3:
            return
        for c in range(4 - conn):
            for t in by_conn[c]:
                grow(row + (t,), conn + c, mods + mod_total(t))

    grow((), 0, 0)
    prover = Prover(LDIA, timeout_ms=timeout_ms)
    found = []
    for row, conn, mods in rows:
        for h in _bracketings(row, mods, False):
            hw = word_of(h, allow_plain=True)
            for c_succ, succ in succ_by_word.get(hw, ()):
                if conn + c_succ > 3:
                    continue
                s = sequent(h, succ)
                pf = prover.prove(s)
                if pf is not None:
                    found.append((s, pf))
    _POPULATIONS["interp"] = found
    return found


def _interpolant_bounds_ok(interpolant, part, succedent):
    """Occurrence bounds: each primitive and each modality index occurs
    in the interpolant no more often than on either side of the cut."""
    ctx = sequent(plug(part.context, ()), succedent)
    for counter in (prim_counts, mod_counts):
        inner = counter(interpolant)
        selected = counter(part.selected)
        outer = counter(ctx)
        for key, n in inner.items():
            if n > min(selected[key], outer[key]):
                return False
    return True


def run_interpolation_sweep(timeout_ms: Optional[float] = None) -> Report:
    """Interpolate every partition of every small provable sequent.

    For each interpolation result the four contract conditions are
    rechecked from scratch: the selected span derives the interpolant,
    plugging the interpolant back derives the original succedent, both
    emitted proofs replay, and the occurrence bounds hold.  After thin
    indexing, the interpolant extracted at every partition has length
    equal to the reduced free-group word of the selected span.
    """
    started = time.monotonic()
    failures = []
    n_parts = n_thin = 0
    pairs = []
    try:
        pairs = _interp_population(timeout_ms)
        for s, pf in pairs:
            for parent, lo, hi in partitions(s.antecedent):
                part = partition_at(s.antecedent, parent, lo, hi)
                res = extract_interpolant(pf, part, LDIA)
                n_parts += 1
                left = sequent(part.selected, res.interpolant)
                right = sequent(plug(part.context, (leaf(res.interpolant),)),
                                s.succedent)
                ok = (res.left_proof.conclusion == left
                      and res.right_proof.conclusion == right
                      and check(res.left_proof, LDIA)
                      and check(res.right_proof, LDIA)
                      and _interpolant_bounds_ok(res.interpolant, part,
                                                 s.succedent))
                if not ok:
                    failures.append(
                        f"interpolation contract fails at {parent} "
                        f"[{lo}:{hi}] of {print_sequent(s)}")
        for s, pf in pairs:
            thin, _ = thin_index(pf, LDIA)
            tante = thin.conclusion.antecedent
            for parent, lo, hi in partitions(tante):
                part = partition_at(tante, parent, lo, hi)
                n_thin += 1
                if not thin_interpolant_length_ok(thin, part, LDIA_M):
                    failures.append(
                        f"thin interpolant length mismatch at {parent} "
                        f"[{lo}:{hi}] of "
                        f"{print_sequent(thin.conclusion)}")
    except ProofSearchTimeout as exc:
        failures.append(f"proof search timed out: {exc}")

    counts = {"sequents": len(pairs), "partitions": n_parts,
              "thin_partitions": n_thin}
    return _finish("interpolation-sweep", started, counts, failures)


# ---------------------------------------------------------------------------
# Shrinking-pair trials


def run_shrinking_trials(trials: int = 10000, max_factors: int = 6,
                      max_len: int = 4,
                      seed: int = DEFAULT_SEED) -> Report:
    """Randomized check that identity products admit a shrinking pair.

    Tuples are built by telescoping: random short words ``v_i`` give
    factors ``u_i = inv(v_{i-1}) * v_i`` whose product collapses to the
    identity and whose lengths stay within ``max_len``.  Every tuple
    must yield an adjacent pair whose product is no longer than the
    longer factor.
    """
    started = time.monotonic()
    failures = []
    rng = random.Random(seed)
    letters = [prim_letter(name, sign)
               for name in ("a", "b", "c") for sign in (1, -1)]

    def random_word(max_half):
        out = IDENTITY
        for _ in range(rng.randint(0, max_half)):
            grown = [mul(out, word([l])) for l in letters]
            out = rng.choice([w for w in grown if wlen(w) > wlen(out)])
        return out

    splits = 0
    for _ in range(trials):
        n = rng.randint(2, max_factors)
        vs = [IDENTITY] + [random_word(max_len // 2) for _ in range(n - 1)]
        vs.append(IDENTITY)
        us = [mul(inv(vs[i]), vs[i + 1]) for i in range(n)]
        total = IDENTITY
        for u in us:
            total = mul(total, u)
        if total != IDENTITY or any(wlen(u) > max_len for u in us):
            failures.append("generator emitted an invalid tuple: "
                            + ", ".join(print_word(u) for u in us))
            continue
        k = shrinking_pair(us)
        merged = mul(us[k - 1], us[k])
        if not (1 <= k <= n - 1
                and wlen(merged) <= max(wlen(us[k - 1]), wlen(us[k]))):
            failures.append("no valid shrinking pair for: "
                            + ", ".join(print_word(u) for u in us))
        else:
            splits += 1

    counts = {"trials": trials, "splits": splits}
    return _finish("shrinking-pairs", started, counts, failures)


# ---------------------------------------------------------------------------
# Flat reduction sweep


def run_reduction_sweep(timeout_ms: Optional[float] = None,
                        cache_dir=None) -> Report:
    """Reduce every short provable flat sequent to bounded Cut pieces.

    The population is every provable flat sequent with one to five
    antecedent types drawn from the length-2 enumeration over {p, q}
    (unprovability of word-unbalanced rows follows from the free-group
    invariant, so only balanced rows reach the prover).  Each reduction
    must replay to its sequent, its leaves must be members of the
    two-premise rule set, and every intermediate conclusion must be
    provable on its own.
    """
    from .interpolate import cut_reduce_flat

    started = time.monotonic()
    failures = []
    types = enum_types({"p", "q"}, 2)
    words = {t: word_of(t, allow_plain=True) for t in types}
    by_word = {}
    for t in types:
        by_word.setdefault(words[t], []).append(t)

    candidates = []

    def walk(row, w, depth):
        if row:
            for succ in by_word.get(w, ()):
                candidates.append((row, succ))
        if depth == 5:
            return
        for t in types:
            walk(row + (t,), mul(w, words[t]), depth + 1)

    walk((), IDENTITY, 0)
    prover = Prover(LDIA, timeout_ms=timeout_ms)
    rules = build_rulesets({"p", "q"}, 2, LDIA, cache_dir=cache_dir)
    base = set(rules.flat_rules)
    provable = nodes = 0
    try:
        for row, succ in candidates:
            s = sequent(tuple(leaf(t) for t in row), succ)
            if prover.prove(s) is None:
                continue
            provable += 1
            d = cut_reduce_flat(s, {"p", "q"}, 2, LDIA)
            if d.conclusion != s or not replay_cuts(d, base):
                failures.append(f"reduction fails for {print_sequent(s)}")
                continue
            stack = [d]
            while stack:
                node = stack.pop()
                nodes += 1
                if node.left is None:
                    if node.conclusion not in base:
                        failures.append(
                            f"leaf outside the rule set: "
                            f"{print_sequent(node.conclusion)}")
                elif prover.prove(node.conclusion) is None:
                    failures.append(
                        f"unprovable intermediate: "
                        f"{print_sequent(node.conclusion)}")
                if node.left is not None:
                    stack.extend((node.left, node.right))
    except ProofSearchTimeout as exc:
        failures.append(f"proof search timed out: {exc}")

    counts = {"balanced_candidates": len(candidates), "provable": provable,
              "derivation_nodes": nodes}
    return _finish("flat-reduction-sweep", started, counts, failures)


# ---------------------------------------------------------------------------
# Cut completeness


def _cut_candidates(calc, types):
    """Candidate bracketed sequents: yields up to 4 types, brackets
    within the modality budget of the sequent."""
    lo_n = 0 if calc.starred else 1
    for n in range(lo_n, 5):
        for row in product(types, repeat=n):
            mods = sum(mod_total(t) for t in row)
            for succ in types:
                budget = mods + mod_total(succ)
                for b in range(budget + 1):
                    if b == 0 and n == 0 and not calc.starred:
                        continue
                    for h in _hedges_exact(tuple(row), b, calc.starred):
                        yield sequent(h, succ)


def run_cut_completeness(timeout_ms: Optional[float] = None,
                         sample_stride: int = 50,
                         cache_dir=None) -> Report:
    """Provability coincides with Cut-derivability from the rule sets.

    For primitive set {p} at length bound 2, in both the plain and the
    guarded mode: every candidate whose free-group words balance gets
    the full biconditional check (prove, Cut-derive, replay the
    derivation against the base).  Word-unbalanced candidates are
    unprovable by the free-group invariant, and Cut-derivability would
    contradict the provability of the base, so on that side every
    ``sample_stride``-th candidate is checked to be underivable rather
    than all of them; small populations are checked exhaustively.
    """
    started = time.monotonic()
    failures = []
    total = balanced_n = provable = derivable = sampled = 0
    thin_forms = []
    try:
        for calc, guarded in ((LDIA, False), (L1STAR_DIA, True)):
            types = enum_types({"p"}, 2, guarded=guarded)
            rules = build_rulesets({"p"}, 2, calc, cache_dir=cache_dir)
            base = list(rules.rules)
            prover = Prover(calc, timeout_ms=timeout_ms)
            succ_words = {t: word_of(t, allow_plain=True) for t in types}
            candidates = list(_cut_candidates(calc, types))
            total += len(candidates)
            stride = 1 if len(candidates) <= 10000 else sample_stride
            unbalanced_i = 0
            for s in candidates:
                hw = word_of(s.antecedent, allow_plain=True)
                if hw == succ_words[s.succedent]:
                    balanced_n += 1
                    pf = prover.prove(s)
                    d = cut_derives(base, s)
                    if pf is not None:
                        provable += 1
                        thin_forms.append(thin_index(pf, calc)[0].conclusion)
                    if d is not None:
                        derivable += 1
                        if not replay_cuts(d, base):
                            failures.append(
                                f"derivation fails replay: "
                                f"{print_sequent(s)}")
                    if (pf is None) != (d is None):
                        failures.append(
                            f"provability and Cut-derivability disagree: "
                            f"{print_sequent(s)}")
                else:
                    if unbalanced_i % stride == 0:
                        sampled += 1
                        if cut_derives(base, s) is not None:
                            failures.append(
                                f"word-unbalanced sequent Cut-derives: "
                                f"{print_sequent(s)}")
                    unbalanced_i += 1
    except ProofSearchTimeout as exc:
        failures.append(f"proof search timed out: {exc}")

    _POPULATIONS["cut_thin"] = thin_forms
    counts = {"candidates": total, "balanced": balanced_n,
              "provable": provable, "cut_derivable": derivable,
              "unbalanced_checked": sampled}
    notes = ("word-unbalanced candidates are spot-checked at a fixed "
             "stride; the full biconditional runs on every balanced one",)
    return _finish("cut-completeness", started, counts, failures, notes)


# ---------------------------------------------------------------------------
# Grammar equivalence


def load_grammar(source):
    """Load a grammar from a filesystem path or a bundled grammar name.

    Returns the pair of a short display name and the parsed grammar.
    """
    path = Path(source)
    if path.exists():
        return path.stem, parse_grammar(path.read_text())
    name = str(source)
    return name.rsplit(".", 1)[0], bundled_grammar(name)


def _grammar_member(g, word_toks, calc, prover, extra_brackets=0):
    """Brute-force membership: some bracketing of some lexicon type
    assignment derives the distinguished type."""
    target = g.distinguished
    target_word = word_of(target, allow_plain=True)
    assigns = [g.types_of(tok) for tok in word_toks]
    for row in product(*assigns):
        budget = (sum(mod_total(t) for t in row) + length(target)
                  + extra_brackets)
        for h in _bracketings(row, budget, calc.starred):
            if not h and not calc.starred:
                continue
            if word_of(h, allow_plain=True) != target_word:
                continue
            if prover.prove(sequent(h, target)) is not None:
                return True
    return False


def run_equivalence(source, calc=LDIA, max_len: Optional[int] = None,
                    timeout_ms: Optional[float] = None, out_dir=None,
                    cache_dir=None) -> Report:
    """Grammar and compiled CFG agree on all short strings.

    The grammar side enumerates every lexicon type assignment and every
    bracketing within the modality budget (plus the distinguished
    type's length) and asks the prover; the compiled side parses with
    the chart recognizer.  Each string is additionally re-decided with
    one extra bracket allowed, which must not change the answer: no
    witness appears first at the boundary.
    """
    started = time.monotonic()
    failures = []
    calc = calculus(calc)
    if calc.name not in ("Ldia", "LstarDia"):
        raise ValueError("equivalence runs on the plain or the starred "
                         f"bracket calculus, not {calc.name}")
    name, g = load_grammar(source)
    if max_len is None:
        max_len = 4 if calc.starred else 5
    cfg = compile_cfg(g, calc, cache_dir=cache_dir)
    prover = Prover(calc, timeout_ms=timeout_ms)
    alphabet = sorted(g.alphabet)
    strings = []
    for n in range(0 if calc.starred else 1, max_len + 1):
        strings.extend(product(alphabet, repeat=n))
    members = 0
    artifacts = []
    try:
        for toks in strings:
            direct = _grammar_member(g, toks, calc, prover)
            compiled = derives(cfg, cfg.start, list(toks)) is not None
            shown = " ".join(toks) if toks else "the empty string"
            if direct != compiled:
                failures.append(
                    f"membership disagrees on {shown}: grammar side "
                    f"{direct}, compiled side {compiled}")
                continue
            if _grammar_member(g, toks, calc, prover,
                               extra_brackets=1) != direct:
                failures.append(
                    f"a witness for {shown} appears only at the bracket "
                    f"boundary")
                continue
            if direct:
                members += 1
        if calc.starred:
            eps_compiled = derives(cfg, cfg.start, []) is not None
            eps_direct = prove(sequent((), g.distinguished), L1STAR_DIA,
                               timeout_ms=timeout_ms) is not None
            if eps_compiled != eps_direct:
                failures.append(
                    "empty-string membership disagrees with the "
                    "degenerate empty-antecedent check")
    except ProofSearchTimeout as exc:
        failures.append(f"proof search timed out: {exc}")

    if out_dir is not None:
        path = Path(out_dir) / f"{name}-cfg.txt"
        path.write_text(print_cfg(cfg))
        artifacts.append(path)
    counts = {"strings": len(strings), "members": members}
    return _finish(f"equivalence-{name}", started, counts, failures,
                   artifacts=artifacts)


# ---------------------------------------------------------------------------
# The length-one identity family


def run_identity_family(max_i: int = 4,
                  timeout_ms: Optional[float] = None) -> Report:
    """Facts about the family q, (1/q)\\1, (1/(1/q)\\1)\\1, ...

    Every member has length one, proves itself, and fails to prove the
    base primitive; those are the checked claims.  The full ordered
    provability matrix is also measured and reported in the counts: in
    this calculus every member proves every other member except the
    bare primitive, so only the arrows into the base distinguish the
    family.
    """
    if not 1 <= max_i <= 6:
        raise ValueError("the family sweep is sized for indices 1 to 6")
    started = time.monotonic()
    failures = []
    family = [prim("q")]
    for _ in range(max_i):
        family.append(under(over(UNIT, family[-1]), UNIT))

    identities = refutations = provable_pairs = 0
    try:
        for i, t in enumerate(family):
            if length(t) != 1:
                failures.append(f"member {i} has length {length(t)}")
            s = sequent((leaf(t),), t)
            if prove(s, L1STAR, timeout_ms=timeout_ms) is None:
                failures.append(f"identity fails for member {i}")
            else:
                identities += 1
        for i in range(1, max_i + 1):
            s = sequent((leaf(family[i]),), family[0])
            if prove(s, L1STAR, timeout_ms=timeout_ms) is not None:
                failures.append(
                    f"member {i} unexpectedly proves the base primitive")
            else:
                refutations += 1
        for i in range(max_i + 1):
            for j in range(max_i + 1):
                if i == j:
                    continue
                s = sequent((leaf(family[i]),), family[j])
                if prove(s, L1STAR, timeout_ms=timeout_ms) is not None:
                    provable_pairs += 1
    except ProofSearchTimeout as exc:
        failures.append(f"proof search timed out: {exc}")

    counts = {"members": max_i + 1, "identities": identities,
              "base_refutations": refutations,
              "provable_ordered_pairs": provable_pairs}
    notes = ("all ordered pairs prove except the arrows into the base "
             "primitive; the members beyond the base are mutually "
             "interderivable",)
    return _finish("identity-family", started, counts, failures, notes)


# ---------------------------------------------------------------------------
# Free-group soundness over the sweep populations


def run_freegroup_soundness(timeout_ms: Optional[float] = None) -> Report:
    """Thin-indexed provable sequents interpret to equal group words.

    Re-walks the interpolation-sweep population and the balanced
    provables of the Cut-completeness sweep (reusing populations cached
    in this process where available), thin-indexes each proof, and
    compares the free-group interpretations of antecedent and
    succedent.
    """
    started = time.monotonic()
    failures = []
    checked = 0
    try:
        thin_seqs = [thin_index(pf, LDIA)[0].conclusion
                     for _, pf in _interp_population(timeout_ms)]
        if "cut_thin" not in _POPULATIONS:
            run_cut_completeness(timeout_ms=timeout_ms)
        thin_seqs.extend(_POPULATIONS["cut_thin"])
        for s in thin_seqs:
            checked += 1
            if word_of(s.antecedent) != word_of(s.succedent):
                failures.append(
                    f"unbalanced thin provable sequent: {print_sequent(s)}")
    except ProofSearchTimeout as exc:
        failures.append(f"proof search timed out: {exc}")

    counts = {"sequents": checked}
    return _finish("free-group-soundness", started, counts, failures)


# ---------------------------------------------------------------------------
# The full battery


def run_all(seed: int = DEFAULT_SEED,
            timeout_ms: Optional[float] = 60000.0,
            out_dir=None, cache_dir=None) -> list:
    """Run every claim family in a fixed order.

    When ``out_dir`` is given, artifacts are emitted there and the
    combined results are written as ``report.json`` and ``report.txt``.
    """
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    reports = [
        run_golden(timeout_ms=timeout_ms, out_dir=out_dir),
        run_interpolation_sweep(timeout_ms=timeout_ms),
        run_shrinking_trials(seed=seed),
        run_reduction_sweep(timeout_ms=timeout_ms, cache_dir=cache_dir),
        run_cut_completeness(timeout_ms=timeout_ms, cache_dir=cache_dir),
    ]
    for name, calc_name in BUNDLED_GRAMMARS:
        reports.append(run_equivalence(name, calc_name,
                                       timeout_ms=timeout_ms,
                                       out_dir=out_dir,
                                       cache_dir=cache_dir))
    reports.append(run_identity_family(timeout_ms=timeout_ms))
    reports.append(run_freegroup_soundness(timeout_ms=timeout_ms))
    if out_dir is not None:
        write_reports(reports, out_dir, seed=seed)
    return reports


def format_reports(reports, seed: Optional[int] = None) -> str:
    lines = []
    if seed is not None:
        lines.append(f"seed {seed}")
    for r in reports:
        tallies = ", ".join(f"{k}={v}" for k, v in r.counts.items())
        lines.append(f"{r.status.upper():4s} {r.claim} "
                     f"({tallies}; {r.elapsed:.1f}s)")
        if r.reproducer is not None:
            lines.append(f"     reproducer: {r.reproducer}")
        for note in r.notes:
            lines.append(f"     note: {note}")
        for a in r.artifacts:
            lines.append(f"     artifact: {a}")
    ok = all(r.ok for r in reports)
    lines.append("ALL PASS" if ok else "FAILURES PRESENT")
    return "\n".join(lines) + "\n"


def write_reports(reports, out_dir, seed: Optional[int] = None):
    """Persist reports as ``report.json`` and ``report.txt``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "seed": seed,
        "ok": all(r.ok for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    json_path = out_dir / "report.json"
    txt_path = out_dir / "report.txt"
    json_path.write_text(json.dumps(payload, indent=2) + "\n")
    txt_path.write_text(format_reports(reports, seed=seed))
    return json_path, txt_path
