import cmath
import random
import zlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bergman_lab.expr import (BinOp, EvalError, Num, ParseError, Var, evaluate, parse,
                              parse_radial, pretty, radial_function, strip_offsets)


def build_corpus(n=50, seed=11):
    """Random analytic expressions with no singularities in the closed disk."""
    rng = random.Random(seed)
    consts = ["2", "0.5", "-3", "1.25", "2i", "(1+0.5i)", "i", "1e-1"]

    def gen(depth):
        if depth == 0 or rng.random() < 0.25:
            return rng.choice(["z", "z", rng.choice(consts)])
        kind = rng.randrange(7)
        a = gen(depth - 1)
        if kind == 0:
            return f"{a} + {gen(depth - 1)}"
        if kind == 1:
            return f"({a}) - ({gen(depth - 1)})"
        if kind == 2:
            return f"({a}) * ({gen(depth - 1)})"
        if kind == 3:
            return f"({a}) / (3 - {rng.choice(['0.5', '0.9', '0.2i'])}*z)"
        if kind == 4:
            return f"(1 - 0.5*z)^{rng.choice(['2', '-2', '0.5', '-1.5', '3'])}"
        if kind == 5:
            return f"exp(({a})/8)"
        return f"kernel({rng.choice(['0', '1', '2.5'])}; {rng.choice(['0.3', '-0.5i', '0.1+0.2i'])})"

    return [gen(3) for _ in range(n)]


CORPUS = build_corpus()


def test_parse_variable():
    e = parse("z")
    assert isinstance(strip_offsets(e.root), Var)


def test_parse_power_structure():
    root = strip_offsets(parse("(1-0.5*z)^-2").root)
    assert isinstance(root, BinOp) and root.op == "^"
    assert evaluate(parse("-2"), 0) == -2
    assert isinstance(strip_offsets(root.left), BinOp)


def test_spec_evaluations():
    assert evaluate(parse("z*z"), 1 + 1j) == 2j
    assert evaluate(parse("(1-0.5*z)^-2"), 0.5) == pytest.approx(16 / 9)
    assert evaluate(parse("z^2^3"), 2) == 256
    assert evaluate(parse("-z^2"), 3) == -9
    assert evaluate(parse("2-3-4"), 0) == -5
    assert evaluate(parse("8/4/2"), 0) == 1
    assert evaluate(parse("kernel(0; 0.5)"), 0.5) == pytest.approx(1 / 0.75 ** 2)
    assert evaluate(parse("exp(i)"), 0) == pytest.approx(cmath.exp(1j))


@given(st.complex_numbers(max_magnitude=0.999))
def test_contraction_stays_in_disk(z):
    assert abs(evaluate(parse("0.5*z"), z)) < 1


@pytest.mark.parametrize("src,offset", [("z +", 3), ("(z", 2), ("2 $ z", 2), ("exp z", 4),
                                        ("kernel(z; 0)", 7), ("w", 0)])
def test_parse_errors_carry_offsets(src, offset):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert info.value.offset == offset


def test_parse_error_offsets_are_bytes():
    with pytest.raises(ParseError) as info:
        parse("é + z")
    assert info.value.offset == 0
    with pytest.raises(ParseError) as info:
        parse("z + é")
    assert info.value.offset == 4


def test_eval_errors():
    with pytest.raises(EvalError):
        evaluate(parse("1/z"), 0)
    with pytest.raises(EvalError):
        evaluate(parse("z^0.5"), -1)
    assert evaluate(parse("z^2"), -1) == 1


def test_radial_language():
    e = parse_radial("1 + u^2")
    f = radial_function(e)
    np.testing.assert_allclose(f(np.array([0.0, 0.5])), [1.0, 1.25])
    with pytest.raises(ParseError):
        parse_radial("1 + z")


def test_corpus_size():
    assert len(CORPUS) == 50
    for src in CORPUS:
        parse(src)


@pytest.mark.parametrize("src", CORPUS)
def test_pretty_round_trip(src):
    once = pretty(parse(src))
    assert pretty(parse(once)) == once
    z = 0.3 - 0.4j
    assert evaluate(parse(once), z) == pytest.approx(evaluate(parse(src), z), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("src", CORPUS)
def test_cauchy_riemann_residual(src):
    e = parse(src)
    rng = np.random.default_rng(zlib.crc32(src.encode()))
    z = 0.95 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    h = 1e-5
    dx = (evaluate(e, z + h) - evaluate(e, z - h)) / (2 * h)
    dy = (evaluate(e, z + 1j * h) - evaluate(e, z - 1j * h)) / (2 * h)
    residual = np.abs(dx + 1j * dy) / np.maximum(1.0, np.abs(dx))
    assert residual.max() < 1e-6


def test_hand_built_ast_matches_parse():
    tree = BinOp("^", Var("z"), BinOp("^", Num(2), Num(3)))
    assert strip_offsets(parse("z^2^3").root) == strip_offsets(tree)
