"""Structural laws of the expression layer: collection, conjugation, weight."""

import random

import pytest

from phbochner.expr import Expression, Factor, Term
from phbochner.parser import parse
from phbochner.scalar import I, ScalarExact

from test_scalar import random_scalar

SYMS = ["f", "R", "A11", "Ab1b1", "E11", "Eb1b1"]
LETTERS = ["1", "b", "0"]


def random_expression(rng, nterms=5, integrated=False):
    out = Expression.zero()
    for _ in range(nterms):
        nfac = rng.randint(1, 3)
        factors = [
            Factor(rng.choice(SYMS),
                   tuple(rng.choice(LETTERS) for _ in range(rng.randint(0, 3))))
            for _ in range(nfac)
        ]
        out = out + Expression.from_term(random_scalar(rng), factors, integrated)
    return out


def test_collection_confluence():
    rng = random.Random(7)
    for _ in range(50):
        parts = []
        for _ in range(8):
            f = Factor(rng.choice(SYMS),
                       tuple(rng.choice(LETTERS) for _ in range(rng.randint(0, 2))))
            parts.append(Expression.from_term(random_scalar(rng), [f]))
        total = Expression.zero()
        for p in parts:
            total = total + p
        shuffled = parts[:]
        rng.shuffle(shuffled)
        total2 = Expression.zero()
        for p in shuffled:
            total2 = total2 + p
        assert total == total2


def test_zero_coefficients_dropped():
    e = parse("A11*f") - parse("A11*f")
    assert e.is_zero()
    assert len(e) == 0


def test_conjugate_is_involutive_ring_hom():
    rng = random.Random(21)
    for _ in range(30):
        a = random_expression(rng)
        b = random_expression(rng)
        assert a.conjugate().conjugate() == a
        assert (a + b).conjugate() == a.conjugate() + b.conjugate()
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()


def test_real_symbols_conjugate_to_themselves():
    assert Factor("f", ("1",)).conjugate() == Factor("f", ("b",))
    assert Factor("R", ("1", "0")).conjugate() == Factor("R", ("b", "0"))
    assert Factor("A11", ("b",)).conjugate() == Factor("Ab1b1", ("1",))
    assert Factor("E11").conjugate() == Factor("Eb1b1")
    # conj fixes real scalars up to the index flip
    e = parse("R_{1} + R_{b}")
    assert e.conjugate() == e


def test_spec_weight_examples():
    assert Term(ScalarExact(1), (Factor("f", ("1", "1", "b", "b")),), False).weight() == 4
    assert Term(ScalarExact(1), (Factor("f", ("0", "0")),), False).weight() == 4
    assert Term(ScalarExact(1), (Factor("A11"), Factor("Eb1b1")), False).weight() == 2


def test_expression_is_real():
    assert parse("2Re[ i*A11*f ]").is_real()
    assert not parse("i*A11*f").is_real()


def test_integration_flag_rules():
    e = parse("A11*f")
    ie = e.integrate()
    assert ie.integrated
    with pytest.raises(ValueError):
        ie.integrate()
    with pytest.raises(ValueError):
        ie * ie
    with pytest.raises(ValueError):
        ie * e
    # scalars can multiply integrated expressions
    assert (ie * 2) == (e * 2).integrate()
    assert (ie * I).conjugate() == (e.conjugate() * (-I)).integrate()


def test_coefficient_lookup():
    e = parse("(29/48)*E11_{b1}*Eb1b1_{1b}").integrate()
    got = e.coefficient((Factor("E11", ("b", "1")), Factor("Eb1b1", ("1", "b"))),
                        integrated=True)
    assert got == ScalarExact.coerce(29) / 48


def test_scalar_value():
    assert parse("(1/2)*i + (1/2)*i").scalar_value() == I
    with pytest.raises(ValueError):
        parse("A11").scalar_value()


def test_rename_symbol():
    e = parse("g_{1} + i*gb")
    r = e.rename_symbol("g", "f")
    assert r == parse("f_{1} + i*f")
