import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from basisdiag import diagram as dg
from basisdiag import hilb
from basisdiag.cli import loads_interp, parse, to_dot, to_text
from basisdiag.cli.language import format_complex, parse_complex
from basisdiag.cli.main import main
from basisdiag.errors import ParseError

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
seeds = hs.integers(min_value=0, max_value=10**6)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------- language


def test_parse_frobenius_lhs():
    f = parse("delta(Q) >> dag(delta(Q))")
    assert dg.isomorphic(f, dg.then(dg.delta("Q"), dg.delta_dagger("Q")))


def test_parse_snake():
    f = parse("(id(Q) || cup(Q)) >> (cap(Q) || id(Q))")
    expected = dg.then(dg.tensor(dg.identity("Q"), dg.cup("Q")), dg.tensor(dg.cap("Q"), dg.identity("Q")))
    assert dg.isomorphic(f, expected)


def test_parallel_binds_tighter_than_sequential():
    a = parse("delta(Q) || id(Q) >> dag(delta(Q)) || id(Q)")
    b = parse("(delta(Q) || id(Q)) >> (dag(delta(Q)) || id(Q))")
    assert dg.isomorphic(a, b)


def test_unclosed_paren_error_position():
    with pytest.raises(ParseError) as err:
        parse("delta(Q >>")
    assert (err.value.line, err.value.column) == (1, 9)
    assert "')'" in err.value.expected


def test_error_on_later_line():
    with pytest.raises(ParseError) as err:
        parse("delta(Q)\n  >> gamma(Q) || foo(Q)")
    assert (err.value.line, err.value.column) == (2, 18)


def test_type_mismatch_is_a_positioned_error():
    with pytest.raises(ParseError) as err:
        parse("delta(Q) >> gamma(Q)")
    assert err.value.column == 10


def test_boxes_scalars_and_variants():
    f = parse("box(f : A, B* -> C) >> box(g : C -> ) || scalar(0.5-2i)")
    assert f.dom == (dg.wire("A"), dg.wire("B*")) and f.cod == ()
    kinds = sorted(g.kind.value for g in f.nodes.values())
    assert kinds == ["box", "box", "scalar"]
    assert parse("conj(box(g : C -> ))").dom == (dg.wire("C*"),)
    assert parse("transp(box(f : A -> B, C))").signature == ((dg.wire("C*"), dg.wire("B*")), (dg.wire("A*"),))


@pytest.mark.parametrize("text,value", [
    ("1", 1), ("-2.5", -2.5), ("i", 1j), ("-i", -1j), ("0.5+2i", 0.5 + 2j), ("3-i", 3 - 1j), ("1e-3i", 1e-3j),
])
def test_complex_literals(text, value):
    assert parse_complex(text) == value


@settings(max_examples=100, deadline=None)
@given(hs.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_complex_literal_round_trip(z):
    assert parse_complex(format_complex(z)) == pytest.approx(z, rel=1e-11, abs=1e-11)


@settings(max_examples=150, deadline=None)
@given(seeds, hs.booleans())
def test_print_parse_round_trip(seed, connected):
    f = hilb.random_diagram(seed, connected=connected, objects=("A", "B"),
                            boxes=(("f", ("A",), ("B", "A*")), ("g", ("B",), ())))
    assert dg.isomorphic(parse(to_text(f)), f)


# ----------------------------------------------------- interpretation file


def test_interp_file_boxes_and_tags():
    interp = loads_interp("object Q dim 2 basis Y\nbox U : 2x2 = 0 1, 1 0  # X\ntag U permutation\n")
    assert np.allclose(interp.boxes["U"], [[0, 1], [1, 0]])
    assert interp.tags == {"U": {"permutation"}}
    assert interp.structure(dg.wire("Q")).name == "Y"


def test_interp_file_custom_vectors():
    text = (SAMPLES / "y-basis.interp").read_text()
    interp = loads_interp(text)
    snake = parse((SAMPLES / "snake.sd").read_text())
    assert np.allclose(hilb.evaluate(snake, interp), np.eye(2))


@pytest.mark.parametrize("text,line", [
    ("object Q dim 2 basis W", 1),
    ("object Q dim 2 basis Z\nbox U : 2x2 = 1 0 0", 2),
    ("# header\n\nstructure Q delta = 1", 3),
    ("object Q dim 2 basis custom\nstructure Q vectors = 1 1 0 1", 1),
    ("object Q dim 2 basis Z\nbox U : 2x2 = 1 0 0 1\ntag V unitary", 3),
    ("frobnicate", 1),
])
def test_interp_file_errors_carry_lines(text, line):
    with pytest.raises(ParseError) as err:
        loads_interp(text)
    assert err.value.line == line


# ------------------------------------------------------------------ render


def test_dot_has_one_node_per_generator_and_reversed_duals():
    f = parse("(id(Q) || cup(Q)) >> (cap(Q) || id(Q))")
    dot = to_dot(f)
    assert dot.startswith('digraph "diagram" {') and dot.rstrip().endswith("}")
    assert sum(" [shape=box," in line for line in dot.splitlines()) == len(f.nodes)
    assert "in0 [shape=plaintext" in dot and "out0 [shape=plaintext" in dot
    dual_edges = [line for line in dot.splitlines() if 'label="Q*"' in line]
    assert dual_edges and all("dir=back" in line for line in dual_edges)
    assert all("dir=back" not in line for line in dot.splitlines() if 'label="Q"' in line)


@pytest.mark.skipif(shutil.which("dot") is None, reason="graphviz not installed")
def test_dot_is_accepted_by_graphviz():
    dot = to_dot(parse((SAMPLES / "teleport-core.sd").read_text()))
    subprocess.run(["dot", "-Tsvg"], input=dot.encode(), check=True, capture_output=True)


# ---------------------------------------------------------------- commands


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", SAMPLES / "snake.sd")
    assert code == 0 and out.startswith("valid")
    code, _, err = run(capsys, "validate", "delta(Q >>")
    assert code == 1 and "1:9" in err


def test_eval_text_and_json(capsys):
    code, out, _ = run(capsys, "eval", SAMPLES / "transfer-core.sd", "--interp", SAMPLES / "qubit.interp")
    assert code == 0
    assert out.splitlines()[1:] == ["1+0i  0+0i", "0+0i  1+0i"]
    code, out, _ = run(capsys, "eval", "box(H : Q -> Q)", "--interp", SAMPLES / "qubit.interp", "--json")
    data = json.loads(out)
    assert data["shape"] == [2, 2]
    assert data["entries"][0] == {"im": 0.0, "re": 0.707106781187}
    assert list(data) == sorted(data)


def test_eval_output_is_byte_stable(capsys):
    args = ("eval", SAMPLES / "teleport-core.sd", "--interp", SAMPLES / "y-basis.interp", "--json")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_normalize_with_trace(capsys):
    code, out, _ = run(capsys, "normalize", SAMPLES / "snake.sd", "--trace")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "id(Q)"
    assert lines[1] == "# trace: 4 steps"
    assert lines[-1] == "spider-identity forward @ 0"


def test_normalize_uses_interp_tags(capsys):
    src = "box(X : Q -> Q) >> dag(box(X : Q -> Q))"
    assert run(capsys, "normalize", src)[1].strip() != "id(Q)"
    code, out, _ = run(capsys, "normalize", src, "--interp", SAMPLES / "qubit.interp")
    assert out.strip() == "id(Q)"


def test_prove_equal_cores(capsys):
    code, out, _ = run(capsys, "prove-equal", SAMPLES / "teleport-core.sd", SAMPLES / "transfer-core.sd")
    assert code == 0 and "frobenius" in out


def test_prove_equal_not_proved(capsys):
    code, out, err = run(capsys, "prove-equal", SAMPLES / "transfer-core.sd", SAMPLES / "id.sd",
                         "--rules", "no-frobenius")
    assert code == 2 and "not proved" in err and "# lhs normal form" in out


def test_prove_equal_budget(capsys):
    code, _, err = run(capsys, "prove-equal", SAMPLES / "transfer-core.sd", SAMPLES / "id.sd", "--budget", "1")
    assert code == 3 and "budget" in err


def test_prove_equal_signature_mismatch(capsys):
    code, _, err = run(capsys, "prove-equal", "delta(Q)", SAMPLES / "id.sd")
    assert code == 1 and err


def test_verify_teleport_both(capsys):
    code, out, _ = run(capsys, "verify", "teleport", "--mode", "both")
    assert code == 0 and out.startswith("status: pass")
    assert out.count("branch: ") == 4


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "state-transfer", "--json")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_verify_partial_exits_nonzero(capsys):
    code, out, _ = run(capsys, "verify", "state-transfer", "--rules", "no-frobenius")
    assert code == 2 and "PARTIAL" in out


def test_selfcheck(capsys):
    code, out, _ = run(capsys, "selfcheck")
    assert code == 0
    assert "rule         frobenius" in out
    assert out.splitlines()[-1].endswith("checks within 1e-09")


def test_render_formats(capsys):
    code, out, _ = run(capsys, "render", SAMPLES / "snake.sd", "--format", "ascii")
    assert code == 0 and "cap(Q)" in out and "<-" in out
    code, out, _ = run(capsys, "render", SAMPLES / "snake.sd")
    assert out.startswith("digraph")


def test_usage_errors_exit_one(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["render", "x.sd", "--format", "png"])
    assert e.value.code == 1
    code, _, err = run(capsys, "eval", "missing.sd", "--interp", SAMPLES / "qubit.interp")
    assert code == 1 and "no such file" in err
    bad = tmp_path / "bad.interp"
    bad.write_text("object Q dim 2 basis Z\nbox Z : 2x2 = 1 0 0\n")
    code, _, err = run(capsys, "eval", "box(Z : Q -> Q)", "--interp", bad)
    assert code == 1 and f"{bad}:2:" in err


def test_stdin_source(capsys, monkeypatch):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO("delta(Q) >> dag(delta(Q))"))
    code, out, _ = run(capsys, "normalize", "-")
    assert code == 0 and out.strip() == "id(Q)"


def test_console_script():
    exe = shutil.which("basisdiag")
    if exe is None:
        pytest.skip("package not installed")
    res = subprocess.run([exe, "validate", str(SAMPLES / "id.sd")], capture_output=True, text=True)
    assert res.returncode == 0
