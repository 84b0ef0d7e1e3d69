"""Covariant-derivative calculus: commutation rewriting and integration by parts.

The engine implements

* Leibniz differentiation in the three frame directions 1, 1-bar ("b"), 0;
* the three-dimensional Ricci commutation rules

      X_{,1b} - X_{,b1} = i X_{,0} + alpha X R                      (rule "comm-1b")
      X_{,01} - X_{,10} = X_{,b} A11 - alpha X A11_{b}              (rule "comm-01")
      X_{,0b} - X_{,b0} = X_{,1} Ab1b1 + alpha X Ab1b1_{1}          (rule "comm-0b")

  where alpha counts (#1 - #1bar) over the base indices plus the derivative
  letters already applied (letters left of the swap; 0 is alpha-neutral);
* canonicalization: every derivative string is sorted to 1 < b < 0 by
  bubble-sorting with the commutation rules, and like terms are collected;
* integration by parts under INT[...]: INT[(u v)_{,a}] = 0, including the
  T-direction a = 0 (the divergence theorem holds in all three directions;
  the 0-direction rule is required to close several catalog identities);
* a complete decision procedure for equality modulo integration by parts:
  the difference is canonicalized and reduced, by exact Gaussian elimination,
  against the full space of divergence relations of its weight class.  The
  reduction returns a replayable certificate (which relation was used with
  which coefficient), so every equality decision doubles as an audit trail.

All operations are pure; the only module state is a cache of canonical forms.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .expr import DERIV_LETTERS, Expression, Factor, Term
from .scalar import I, ONE, ScalarExact

__all__ = [
    "CalculusError", "RewriteTrace", "Rule",
    "differentiate", "commute_swap", "canonicalize", "integrate_by_parts",
    "apply_rule", "equal_mod_ibp", "ibp_residual",
]

_LETTER_ORDER = {"1": 0, "b": 1, "0": 2}

# Hard cap on the relation system built per equality query; the catalog
# needs well under a thousand relations.
MAX_RELATIONS = 10_000


class CalculusError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------

@dataclass
class RewriteTrace:
    """Ordered audit log: (rule id, before, after) triples.

    For canonicalization steps the entries are directly replayable: replacing
    `before` (a term) by `after` (its expansion) reproduces the final
    expression.  For equality-mod-IBP decisions the entries record the
    divergence relations used and their coefficients in the certified
    combination difference = sum(coeff * relation).
    """

    entries: list[dict] = field(default_factory=list)
    residual: Expression | None = None
    # structured relation combination (row id, coefficient) backing the
    # equality decision; see check_certificate
    certificate: list[tuple[tuple, ScalarExact]] = field(default_factory=list)

    def record(self, rule: str, before: str, after: str, **extra):
        entry = {"rule": rule, "before": before, "after": after}
        entry.update(extra)
        self.entries.append(entry)

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            extra = "".join(f" [{k}={v}]" for k, v in e.items()
                            if k not in ("rule", "before", "after"))
            lines.append(f"{e['rule']}: {e['before']}  ==>  {e['after']}{extra}")
        if self.residual is not None:
            lines.append(f"residual: {self.residual}")
        return "\n".join(lines)

    def to_json(self) -> str:
        payload = {"entries": self.entries}
        if self.residual is not None:
            payload["residual"] = str(self.residual)
        return json.dumps(payload, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def differentiate(e: Expression, letters: str | Iterable[str]) -> Expression:
    """Covariant derivative of a non-integrated expression (Leibniz rule)."""
    if isinstance(letters, str):
        letters = (letters,)
    out = e
    for letter in letters:
        if letter not in DERIV_LETTERS:
            raise CalculusError(f"unknown derivative letter {letter!r}")
        acc = Expression.zero()
        for key, coeff in out.items():
            integrated, factors = key
            if integrated:
                raise CalculusError("cannot differentiate an integrated expression")
            for j in range(len(factors)):
                new = factors[:j] + (factors[j].with_deriv(letter),) + factors[j + 1:]
                acc = acc + Expression.from_term(coeff, new)
        out = acc
    return out


# ---------------------------------------------------------------------------
# Commutation rules
# ---------------------------------------------------------------------------

def _diff_tail(e: Expression, tail: Sequence[str]) -> Expression:
    return differentiate(e, tail) if tail else e


def commute_swap(factor: Factor, position: int) -> Expression:
    """Swap the adjacent derivative pair at `position` (0-based).

    Returns the factor with the pair swapped plus the curvature/torsion
    correction terms; corrections acquired before trailing letters are
    Leibniz-differentiated by the tail.
    """
    derivs = factor.derivs
    if not 0 <= position <= len(derivs) - 2:
        raise CalculusError(
            f"swap position {position} out of range for {factor}")
    a, b = derivs[position], derivs[position + 1]
    if a == b:
        return Expression.from_factor(factor)
    prefix = derivs[:position]
    tail = derivs[position + 2:]
    alpha = factor.alpha_prefix(position)
    swapped = Expression.from_factor(
        Factor(factor.symbol, prefix + (b, a) + tail))
    base = Expression.from_factor(Factor(factor.symbol, prefix))

    def fac(sym, *ds):
        return Expression.from_factor(Factor(sym, tuple(ds)))

    pair = (a, b)
    if pair == ("1", "b"):
        corr = (Expression.from_factor(Factor(factor.symbol, prefix + ("0",))) * I
                + base * fac("R") * alpha)
    elif pair == ("b", "1"):
        corr = -(Expression.from_factor(Factor(factor.symbol, prefix + ("0",))) * I
                 + base * fac("R") * alpha)
    elif pair == ("0", "1"):
        corr = (Expression.from_factor(Factor(factor.symbol, prefix + ("b",)))
                * fac("A11") - base * fac("A11", "b") * alpha)
    elif pair == ("1", "0"):
        corr = -(Expression.from_factor(Factor(factor.symbol, prefix + ("b",)))
                 * fac("A11") - base * fac("A11", "b") * alpha)
    elif pair == ("0", "b"):
        corr = (Expression.from_factor(Factor(factor.symbol, prefix + ("1",)))
                * fac("Ab1b1") + base * fac("Ab1b1", "1") * alpha)
    elif pair == ("b", "0"):
        corr = -(Expression.from_factor(Factor(factor.symbol, prefix + ("1",)))
                 * fac("Ab1b1") + base * fac("Ab1b1", "1") * alpha)
    else:  # pragma: no cover
        raise CalculusError(f"unhandled pair {pair}")
    return swapped + _diff_tail(corr, tail)


_SWAP_RULE_NAME = {
    frozenset(("1", "b")): "comm-1b",
    frozenset(("0", "1")): "comm-01",
    frozenset(("0", "b")): "comm-0b",
}

_canon_cache: dict[Factor, Expression] = {}


def _first_disorder(derivs: tuple[str, ...]) -> int | None:
    for p in range(len(derivs) - 1):
        if _LETTER_ORDER[derivs[p]] > _LETTER_ORDER[derivs[p + 1]]:
            return p
    return None


def canonicalize_factor(factor: Factor) -> Expression:
    """Expansion of a factor whose derivative string is sorted to 1 < b < 0."""
    cached = _canon_cache.get(factor)
    if cached is not None:
        return cached
    p = _first_disorder(factor.derivs)
    if p is None:
        out = Expression.from_factor(factor)
    else:
        out = Expression.zero()
        for key, coeff in commute_swap(factor, p).items():
            _, factors = key
            prod = Expression.scalar(coeff)
            for f in factors:
                prod = prod * canonicalize_factor(f)
            out = out + prod
    _canon_cache[factor] = out
    return out


def canonicalize(e: Expression, trace: RewriteTrace | None = None) -> Expression:
    """Sort every derivative string with the commutation rules and collect.

    The result is unique for a given input: the sweep always rewrites the
    leftmost out-of-order pair of each factor, and corrections are recursively
    canonicalized.
    """
    out = Expression.zero()
    for key, coeff in e.items():
        integrated, factors = key
        prod = Expression.scalar(coeff)
        dirty = False
        for f in factors:
            if f.is_canonical():
                prod = prod * Expression.from_factor(f)
            else:
                dirty = True
                prod = prod * canonicalize_factor(f)
        if integrated:
            prod = prod.integrate()
        if dirty and trace is not None:
            before = Expression.from_term(coeff, factors, integrated)
            trace.record("canonicalize", str(before), str(prod))
        out = out + prod
    return out


# ---------------------------------------------------------------------------
# Integration by parts
# ---------------------------------------------------------------------------

def _ibp_term(coeff: ScalarExact, factors: tuple[Factor, ...],
              j: int) -> Expression:
    """Move the last derivative of factors[j] onto the others (negated)."""
    letter = factors[j].derivs[-1]
    shortened = Factor(factors[j].symbol, factors[j].derivs[:-1])
    rest = factors[:j] + factors[j + 1:]
    out = Expression.zero()
    for k in range(len(rest)):
        new = rest[:k] + (rest[k].with_deriv(letter),) + rest[k + 1:]
        out = out + Expression.from_term(-coeff, new + (shortened,), True)
    return out


def integrate_by_parts(e: Expression, term_index: int, factor_index: int,
                       allow_t_direction: bool = False,
                       trace: RewriteTrace | None = None) -> Expression:
    """Integrate the selected factor's last derivative by parts.

    `term_index` counts the terms of `e` in canonical print order and
    `factor_index` the factors of that term in canonical factor order.  The
    T-direction (letter 0) is rejected unless `allow_t_direction` is set;
    INT[X_{,0}] = 0 holds and the equality engine uses it, so the flag only
    controls this manual entry point.
    """
    items = list(e.items())
    if not 0 <= term_index < len(items):
        raise CalculusError(f"term index {term_index} out of range")
    key, coeff = items[term_index]
    integrated, factors = key
    if not integrated:
        raise CalculusError("integration by parts requires an integrated term")
    if not 0 <= factor_index < len(factors):
        raise CalculusError(f"factor index {factor_index} out of range")
    factor = factors[factor_index]
    if not factor.derivs:
        raise CalculusError(f"factor {factor} has no derivatives")
    letter = factor.derivs[-1]
    if letter == "0" and not allow_t_direction:
        raise CalculusError(
            "integration by parts in the 0 direction is disabled "
            "(pass allow_t_direction=True)")
    replaced = _ibp_term(coeff, factors, factor_index)
    before = Expression.from_term(coeff, factors, True)
    if trace is not None:
        trace.record("ibp0" if letter == "0" else "ibp",
                     str(before), str(replaced), factor=str(factor))
    return (e - before) + replaced


# ---------------------------------------------------------------------------
# Substitution rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    """Rewrite factors symbol_{prefix+tail} -> replacement differentiated by tail."""

    name: str
    symbol: str
    prefix: tuple[str, ...]
    replacement: Expression

    def matches(self, factor: Factor) -> bool:
        return (factor.symbol == self.symbol
                and factor.derivs[:len(self.prefix)] == self.prefix)


def apply_rule(e: Expression, rule: Rule, max_rounds: int = 64,
               trace: RewriteTrace | None = None) -> Expression:
    """Apply a substitution rule everywhere, to a fixpoint."""
    current = e
    for _ in range(max_rounds):
        out = Expression.zero()
        changed = False
        for key, coeff in current.items():
            integrated, factors = key
            hit = next((j for j, f in enumerate(factors) if rule.matches(f)), None)
            if hit is None:
                out = out + Expression.from_term(coeff, factors, integrated)
                continue
            changed = True
            tail = factors[hit].derivs[len(rule.prefix):]
            repl = differentiate(rule.replacement, tail) if tail else rule.replacement
            prod = Expression.scalar(coeff) * repl
            for k, f in enumerate(factors):
                if k != hit:
                    prod = prod * Expression.from_factor(f)
            if integrated:
                prod = prod.integrate()
            if trace is not None:
                trace.record(f"subst:{rule.name}",
                             str(Expression.from_term(coeff, factors, integrated)),
                             str(prod))
            out = out + prod
        current = out
        if not changed:
            return current
    raise CalculusError(f"substitution rule {rule.name} did not reach a fixpoint")


# ---------------------------------------------------------------------------
# Equality modulo integration by parts
# ---------------------------------------------------------------------------

Monomial = tuple[Factor, ...]


def _monomial_weight(m: Monomial) -> int:
    return sum(f.weight() for f in m)


def _monomial_balance(m: Monomial) -> int:
    return sum(f.alpha() for f in m)


def _monomial_sort_key(m: Monomial):
    return (len(m), tuple(f.sort_key() for f in m))


def _canonical_vector(e: Expression) -> dict[Monomial, ScalarExact]:
    vec: dict[Monomial, ScalarExact] = {}
    for key, coeff in e.items():
        _, factors = key
        vec[factors] = vec.get(factors, ScalarExact(0)) + coeff
    return {m: c for m, c in vec.items() if not c.is_zero()}


def _single_deletions(m: Monomial):
    """Yield (parent, letter) for every single derivative-letter deletion."""
    for j, f in enumerate(m):
        for p, letter in enumerate(f.derivs):
            parent = m[:j] + (Factor(f.symbol, f.derivs[:p] + f.derivs[p + 1:]),) \
                + m[j + 1:]
            yield tuple(sorted(parent, key=Factor.sort_key)), letter


def _relation_row(parent: Monomial, direction: str) -> dict[Monomial, ScalarExact]:
    """INT[(product of parent)_{,direction}] = 0, canonicalized."""
    expr = Expression.zero()
    for k in range(len(parent)):
        new = parent[:k] + (parent[k].with_deriv(direction),) + parent[k + 1:]
        expr = expr + Expression.from_term(1, new)
    return _canonical_vector(canonicalize(expr))


class _LinearSystem:
    """Exact row reduction with a certificate over the original rows."""

    def __init__(self):
        # leading monomial -> (vector, combo over original row ids)
        self.pivots: dict[Monomial, tuple[dict, dict]] = {}

    @staticmethod
    def _leading(vec: dict) -> Monomial:
        return max(vec, key=_monomial_sort_key)

    def _reduce(self, vec: dict, combo: dict, sign: int) -> tuple[dict, dict]:
        # Pivot rows maintain the invariant  pvec = sum(pcombo * rows), so an
        # elimination vec -= f*pvec updates combo by -f*pcombo when combo
        # tracks "vec as a combination of rows" (sign = -1, used when adding
        # rows), and by +f*pcombo when combo tracks "what was subtracted from
        # the original vector" (sign = +1, used when reducing a query).
        while vec:
            lead = self._leading(vec)
            pivot = self.pivots.get(lead)
            if pivot is None:
                return vec, combo
            pvec, pcombo = pivot
            factor = vec[lead] / pvec[lead]
            for m, c in pvec.items():
                val = vec.get(m, ScalarExact(0)) - factor * c
                if val.is_zero():
                    vec.pop(m, None)
                else:
                    vec[m] = val
            for rid, c in pcombo.items():
                val = combo.get(rid, ScalarExact(0)) + sign * factor * c
                if val.is_zero():
                    combo.pop(rid, None)
                else:
                    combo[rid] = val
        return vec, combo

    def add_row(self, row_id, vec: dict):
        vec, combo = self._reduce(dict(vec), {row_id: ONE}, sign=-1)
        if vec:
            self.pivots[self._leading(vec)] = (vec, combo)

    def reduce_vector(self, vec: dict) -> tuple[dict, dict]:
        return self._reduce(dict(vec), {}, sign=+1)


def _enumerate_strings(weight: int) -> list[tuple[str, ...]]:
    """Canonical derivative strings (1s, then bs, then 0s) of given weight."""
    out = []
    for zeros in range(weight // 2 + 1):
        rest = weight - 2 * zeros
        for ones in range(rest + 1):
            bars = rest - ones
            out.append(("1",) * ones + ("b",) * bars + ("0",) * zeros)
    return out


def _enumerate_ra_monomials(weight: int) -> list[tuple[Factor, ...]]:
    """Monomials in R, A11, Ab1b1 (with derivatives) of the given weight."""
    if weight == 0:
        return [()]
    out: list[tuple[Factor, ...]] = []
    base = ("R", "A11", "Ab1b1")
    for nfac in range(1, weight // 2 + 1):
        for syms in itertools.combinations_with_replacement(base, nfac):
            budget = weight - 2 * nfac
            if budget < 0:
                continue
            for split in itertools.product(range(budget + 1), repeat=nfac):
                if sum(split) != budget:
                    continue
                choices = [
                    [Factor(sym, s) for s in _enumerate_strings(w)]
                    for sym, w in zip(syms, split)
                ]
                for combo in itertools.product(*choices):
                    out.append(tuple(sorted(combo, key=Factor.sort_key)))
    return sorted(set(out), key=_monomial_sort_key)


def _enumerate_e_linear(weight: int, balance: int) -> list[Monomial]:
    """Degree-1 monomials in E11/Eb1b1 times an R/A monomial."""
    out = []
    for sym in ("E11", "Eb1b1"):
        for ra_w in range(weight + 1):
            e_w = weight - ra_w
            for s in _enumerate_strings(e_w):
                e_fac = Factor(sym, s)
                for ra in _enumerate_ra_monomials(ra_w):
                    mono = tuple(sorted((e_fac,) + ra, key=Factor.sort_key))
                    if _monomial_balance(mono) == balance:
                        out.append(mono)
    return sorted(set(out), key=_monomial_sort_key)


def _build_relations(seed: Iterable[Monomial], system: _LinearSystem,
                     trace: RewriteTrace | None) -> None:
    """Saturate the divergence relations touching the seed's weight class."""
    seen_rel: set[tuple[Monomial, str]] = set()
    seen_mono: set[Monomial] = set(seed)
    frontier = list(seen_mono)
    count = 0
    while frontier:
        mono = frontier.pop()
        new_rels: list[tuple[Monomial, str]] = []
        for parent, letter in _single_deletions(mono):
            if letter == "0":
                new_rels.append((parent, "0"))
            else:
                new_rels.append((parent, "1"))
                new_rels.append((parent, "b"))
                # grandparents reached by removing two single-weight letters
                # feed the 0-direction relations of the same weight class
                for gparent, letter2 in _single_deletions(parent):
                    if letter2 != "0":
                        new_rels.append((gparent, "0"))
        for rel in new_rels:
            if rel in seen_rel:
                continue
            seen_rel.add(rel)
            count += 1
            if count > MAX_RELATIONS:
                offending = "*".join(str(f) for f in mono)
                raise CalculusError(
                    f"relation cap ({MAX_RELATIONS}) exceeded while "
                    f"processing the class of INT[{offending}]")
            row = _relation_row(*rel)
            rid = ("ibp", rel[0], rel[1])
            system.add_row(rid, row)
            for m in row:
                if m not in seen_mono:
                    seen_mono.add(m)
                    frontier.append(m)


def _row_id_str(rid) -> str:
    if rid[0] == "ibp":
        parent, direction = rid[1], rid[2]
        prod = "*".join(str(f) for f in parent) or "1"
        return f"INT[({prod})_{{{direction}}}]"
    if rid[0] == "modulo":
        gen_index, mult = rid[1], rid[2]
        prod = "*".join(str(f) for f in mult) or "1"
        return f"INT[S{gen_index}*{prod}]"
    return str(rid)


def ibp_residual(a: Expression, b: Expression,
                 modulo: Sequence[Expression] = (),
                 trace: RewriteTrace | None = None
                 ) -> tuple[Expression, RewriteTrace]:
    """Normal form of a - b modulo integration by parts (and `modulo` rules).

    `modulo` entries are non-integrated scalar expressions S that vanish
    identically on the configurations considered (for instance a divergence
    constraint); the reduction may use INT[S * N] = 0 for any monomial
    multiplier N of matching weight.  Returns (residual, trace); the residual
    is zero exactly when a == b modulo the stated relations.
    """
    if trace is None:
        trace = RewriteTrace()
    d = canonicalize(a - b)
    if d.is_zero():
        return Expression.zero(), trace
    if not d.integrated:
        if d.has_mixed_integration():
            raise CalculusError("mixed integrated and plain terms")
        trace.residual = d
        return d, trace

    vec = _canonical_vector(d)
    groups: dict[tuple[int, int], dict[Monomial, ScalarExact]] = {}
    for mono, coeff in vec.items():
        key = (_monomial_weight(mono), _monomial_balance(mono))
        groups.setdefault(key, {})[mono] = coeff

    residual = Expression.zero()
    for (weight, balance), gvec in sorted(groups.items()):
        system = _LinearSystem()
        _build_relations(list(gvec), system, trace)
        for gi, gen in enumerate(modulo):
            gen_weights = {Term(c, k[1], k[0]).weight() for k, c in gen.items()}
            gen_balances = {Term(c, k[1], k[0]).alpha() for k, c in gen.items()}
            if len(gen_weights) != 1 or len(gen_balances) != 1:
                raise CalculusError("modulo generators must be homogeneous")
            gw, gb = gen_weights.pop(), gen_balances.pop()
            mw, mb = weight - gw, balance - gb
            if mw < 0:
                continue
            for mult in _enumerate_e_linear(mw, mb):
                prod = gen
                for f in mult:
                    prod = prod * Expression.from_factor(f)
                row = _canonical_vector(canonicalize(prod))
                system.add_row(("modulo", gi, mult), row)
        reduced, combo = system.reduce_vector(gvec)
        for rid, coeff in sorted(combo.items(), key=lambda kv: str(kv[0])):
            trace.record("relation", _row_id_str(rid), "0",
                         coefficient=str(coeff))
            trace.certificate.append((rid, coeff))
        for mono, coeff in reduced.items():
            residual = residual + Expression.from_term(coeff, mono, True)

    trace.residual = None if residual.is_zero() else residual
    return residual, trace


def equal_mod_ibp(a: Expression, b: Expression,
                  modulo: Sequence[Expression] = ()
                  ) -> tuple[bool, RewriteTrace]:
    """Decide a == b modulo integration by parts; trace carries the audit."""
    residual, trace = ibp_residual(a, b, modulo)
    return residual.is_zero(), trace


def check_certificate(a: Expression, b: Expression, trace: RewriteTrace,
                      modulo: Sequence[Expression] = ()) -> bool:
    """Replay an equality certificate: a - b == sum(c * relation) + residual.

    Every relation row is rebuilt from its id and the combination is checked
    by exact arithmetic, so a True result is an independent proof that the
    recorded decision was sound.
    """
    total = _canonical_vector(canonicalize(a - b))
    for rid, coeff in trace.certificate:
        if rid[0] == "ibp":
            row = _relation_row(rid[1], rid[2])
        elif rid[0] == "modulo":
            prod = modulo[rid[1]]
            for f in rid[2]:
                prod = prod * Expression.from_factor(f)
            row = _canonical_vector(canonicalize(prod))
        else:  # pragma: no cover
            raise CalculusError(f"unknown certificate row {rid!r}")
        for mono, c in row.items():
            val = total.get(mono, ScalarExact(0)) - coeff * c
            if val.is_zero():
                total.pop(mono, None)
            else:
                total[mono] = val
    residual_vec = ({} if trace.residual is None
                    else _canonical_vector(trace.residual))
    return total == residual_vec
