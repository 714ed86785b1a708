import json
import random
import re
import string
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from astra.errors import NotAFunction
from astra.structure import normalize_identifiers
from astra.structure.normalizer import analyze

from oracles import normalize_by_list, rename_locals

CPP_KEYWORDS = {"int", "for", "if", "do", "auto", "const", "new", "try", "and", "or", "not",
                "void", "long", "char", "bool", "case", "else", "enum", "goto", "this"}


def load_cases(fixtures):
    locals_ = json.loads((fixtures / "normalize" / "locals.json").read_text())
    return [(name, (fixtures / "normalize" / name).read_text(), names)
            for name, names in locals_.items()]


def fresh_names(rng, count, avoid):
    out = []
    while len(out) < count:
        n = rng.choice(string.ascii_lowercase) + "".join(
            rng.choice(string.ascii_lowercase + string.digits + "_")
            for _ in range(rng.randint(0, 7)))
        if n not in avoid and n not in out and n not in CPP_KEYWORDS and not n.startswith("var"):
            out.append(n)
    return out


def test_simple_example():
    assert normalize_identifiers("int f(int a){int b=a; return b;}") == \
        "int f(int a){int VAR1=a; return VAR1;}"


def test_no_locals_identity():
    src = "double twice(double v)\n{\n    return 2.0 * v;\n}\n"
    assert normalize_identifiers(src) == src


def test_gaussian_kernel_body_over_mf_dx():
    src = """void kernel(amrex::MultiFab& mf, const amrex::Real* dx)
{
    amrex::Real x = (i+0.5) * dx[0];
    amrex::Real y = (j+0.5) * dx[1];
    amrex::Real z = (k+0.5) * dx[2];
    amrex::Real r_squared = ((x-0.5)*(x-0.5)+(y-0.5)*(y-0.5)+
                            (z-0.5)*(z-0.5))/0.01;
    mf_array(i,j,k) = 1.0 + std::exp(-r_squared);
}
"""
    out = normalize_identifiers(src)
    assert "amrex::Real VAR1 = (i+0.5) * dx[0];" in out
    assert "amrex::Real VAR4 = ((VAR1-0.5)*(VAR1-0.5)+(VAR2-0.5)*(VAR2-0.5)+" in out
    assert "(VAR3-0.5)*(VAR3-0.5))/0.01;" in out
    assert "std::exp(-VAR4)" in out
    assert out.startswith("void kernel(amrex::MultiFab& mf, const amrex::Real* dx)")


def test_gaussian_fill_full_loop(fixtures):
    src = (fixtures / "normalize" / "01_fill.cpp").read_text()
    n = analyze(src)
    assert n.mapping == {"mfi": "VAR1", "bx": "VAR2", "mf_array": "VAR3", "x": "VAR4",
                         "y": "VAR5", "z": "VAR6", "r_squared": "VAR7"}
    out = n.text
    for kept in ("amrex::MFIter", "amrex::Real", "mf.array(VAR1)", "VAR1.validbox()",
                 "int i, int j, int k", "dx[0]"):
        assert kept in out


def test_preserve_list():
    src = "int f(int a){int b=a; int c=b; return c;}"
    assert normalize_identifiers(src, ["b"]) == "int f(int a){int b=a; int VAR1=b; return VAR1;}"


def test_members_and_qualified_untouched():
    src = "void f(P& p){int x = p.x; int y = p->y; x = ns::x + y; p.x = x;}"
    out = normalize_identifiers(src)
    assert out == "void f(P& p){int VAR1 = p.x; int VAR2 = p->y; VAR1 = ns::x + VAR2; p.x = VAR1;}"


def test_type_positions_untouched():
    src = "void f(){Box box; Box* other = &box; other->grow(1);}"
    assert normalize_identifiers(src) == \
        "void f(){Box VAR1; Box* VAR2 = &VAR1; VAR2->grow(1);}"


def test_for_header_declarations():
    src = "int f(int n){int s=0; for (int i=0, j=n; i<j; ++i) s+=i; return s;}"
    assert normalize_identifiers(src) == \
        "int f(int n){int VAR1=0; for (int VAR2=0, VAR3=n; VAR2<VAR3; ++VAR2) VAR1+=VAR2; return VAR1;}"


def test_shadowing_first_declaration_wins():
    src = "void f(){int a=1; { int a=2; use(a); } use(a);}"
    n = analyze(src)
    assert n.text == "void f(){int VAR1=1; { int VAR1=2; use(VAR1); } use(VAR1);}"
    assert n.warnings


def test_placeholder_collision_skipped():
    src = "void f(){int a = VAR1; use(a);}"
    assert normalize_identifiers(src) == "void f(){int VAR2 = VAR1; use(VAR2);}"


def test_comments_and_strings_preserved():
    src = 'void f(){int count = 0; // count things\n log("count"); ++count;}'
    assert normalize_identifiers(src) == \
        'void f(){int VAR1 = 0; // count things\n log("count"); ++VAR1;}'


@pytest.mark.parametrize("text", ["", "int x = 3;", "just some prose", "struct S { int a; };"])
def test_not_a_function(text):
    with pytest.raises(NotAFunction):
        normalize_identifiers(text)


def test_hand_listed_locals(fixtures):
    for name, src, names in load_cases(fixtures):
        assert list(analyze(src).mapping) == names, name
        assert normalize_identifiers(src) == normalize_by_list(src, names), name


def test_idempotent(fixtures):
    for name, src, _ in load_cases(fixtures):
        once = normalize_identifiers(src)
        assert normalize_identifiers(once) == once, name


FIXTURES = Path(__file__).parent / "fixtures"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rename_invariance(seed):
    rng = random.Random(seed)
    for name, src, names in load_cases(FIXTURES):
        avoid = set(re_tokens(src))
        renamed = rename_locals(src, names, fresh_names(rng, len(names), avoid))
        assert normalize_identifiers(renamed) == normalize_identifiers(src), name


def re_tokens(text):
    return re.findall(r"[A-Za-z_]\w*", text)
