import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plienard import errors
from plienard import expr as ex

GOLDEN = json.loads((Path(__file__).parent / "data" / "expr_golden.json").read_text())


def _id(case):
    return case["src"] or "<empty>"


@pytest.mark.parametrize("case", GOLDEN, ids=[_id(c) for c in GOLDEN])
def test_golden(case):
    params = case.get("params", [])
    if "error" in case:
        with pytest.raises(getattr(errors, case["error"])) as info:
            ex.parse_expr(case["src"], params)
        assert type(info.value).__name__ == case["error"]
        assert info.value.offset == case["offset"]
        return
    tree = ex.parse_expr(case["src"], params)
    assert tree.sexpr() == case["tree"]
    if "eval_error" in case:
        with pytest.raises(errors.EvalError):
            ex.evaluate(tree, case["env"])
        return
    got = ex.evaluate(tree, case["env"])
    assert got == pytest.approx(case["value"], rel=1e-15, abs=0)


def test_golden_suite_size():
    assert len(GOLDEN) == 30


def test_tokenize_examples():
    toks = ex.tokenize("1/x^2")
    assert [(t.kind, t.lexeme) for t in toks] == [
        ("number", "1"), ("operator", "/"), ("identifier", "x"), ("operator", "^"), ("number", "2")]
    assert ex.tokenize("") == []
    toks = ex.tokenize("3 + sin(2*pi*t)")
    assert [t.lexeme for t in toks] == ["3", "+", "sin", "(", "2", "*", "pi", "*", "t", ")"]
    assert any(t.kind == "identifier" and t.lexeme == "pi" for t in toks)
    assert ex.parse(toks).sexpr() == "(+ 3.0 (sin (* (* 2.0 pi) t)))"


def test_tokenize_reports_byte_offset():
    with pytest.raises(errors.LexError) as info:
        ex.tokenize("é + #")
    assert info.value.offset == 0
    with pytest.raises(errors.LexError) as info:
        ex.tokenize("x + é")
    assert info.value.offset == 4


def test_validate_examples():
    assert ex.validate(ex.parse_expr("1/x"), {"x"}).ok
    rep = ex.validate(ex.parse_expr("1/u"), {"x"})
    assert not rep.ok and rep.names() == ["u"] and rep.offenders[0][1] == 2
    assert ex.validate(ex.parse_expr("sigma/x^mu", ["sigma", "mu"]), {"x", "sigma", "mu"}).ok


def test_unbound_symbol():
    with pytest.raises(errors.UnboundSymbol):
        ex.evaluate(ex.parse_expr("x + y"), {"x": 1.0})


def test_e_is_not_predefined():
    tree = ex.parse_expr("e")
    with pytest.raises(errors.UnboundSymbol):
        ex.evaluate(tree, {})


def test_compiled_matches_scalar():
    tree = ex.parse_expr("3 + sin(2*pi*t) - t^2/(1 + abs(t))")
    fn = ex.compile_expr(tree)
    ts = np.linspace(-2, 2, 41)
    np.testing.assert_array_equal(fn(t=ts), [ex.evaluate(tree, {"t": float(t)}) for t in ts])


def test_compiled_domain_error():
    fn = ex.compile_expr(ex.parse_expr("1/x"))
    with pytest.raises(errors.EvalError):
        fn(x=np.array([1.0, 0.0]))


# -- random trees -----------------------------------------------------------

_leaf = st.one_of(
    st.floats(0, 10, allow_nan=False).map(lambda v: ex.Const(round(v, 3))),
    st.sampled_from([ex.Var("x"), ex.Var("y"), ex.Const(math.pi, "pi")]),
)


def _grow(children):
    return st.one_of(
        children.map(ex.Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda a: ex.BinOp(*a)),
        st.tuples(st.sampled_from(["sin", "cos", "abs"]), children).map(lambda a: ex.Call(*a)),
    )


trees = st.recursive(_leaf, _grow, max_leaves=12)


def _safe_eval(tree, env):
    try:
        return ex.evaluate(tree, env)
    except errors.EvalError:
        return "err"


@settings(max_examples=300, deadline=None)
@given(trees, st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=100, max_size=100))
def test_print_reparse_round_trip(tree, points):
    again = ex.parse_expr(ex.to_text(tree))
    assert again.sexpr() == tree.sexpr()
    for x, y in points:
        a, b = _safe_eval(tree, {"x": x, "y": y}), _safe_eval(again, {"x": x, "y": y})
        if isinstance(a, float) and math.isnan(a):
            assert isinstance(b, float) and math.isnan(b)
        else:
            assert a == b


_atoms = ["x", "1", "2.5", "pi", "(x)", "sin(x)", "(1+x)"]
_ops = ["+", "-", "*", "/", "^"]


@settings(max_examples=10_000, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(_ops), st.booleans(), st.sampled_from(_atoms)), max_size=6),
       st.sampled_from(_atoms))
def test_fuzz_well_formed_strings_parse(chain, first):
    src = first + "".join(f"{op}{'-' if neg else ''}{atom}" for op, neg, atom in chain)
    tree = ex.parse_expr(src)
    assert ex.symbols(tree) <= {"x"}


@settings(max_examples=200, deadline=None)
@given(trees, st.floats(-3, 3), st.floats(-3, 3))
def test_evaluate_is_pure(tree, x, y):
    a, b = _safe_eval(tree, {"x": x, "y": y}), _safe_eval(tree, {"x": x, "y": y})
    assert repr(a) == repr(b)
