"""Command-line workflows: check, validate, stats, reduce."""

import json

import pytest

from tlace.checker import explain
from tlace.cli import main, render_text
from tlace.epistemic import save_mas
from tlace.formula import ActionAtom, Atom, Exists, Next
from tlace.model import save_model
from tlace.tlace import TlaceNode, from_xml, to_json, to_xml


@pytest.fixture
def model_file(tmp_path, two_state_chain):
    path = tmp_path / "chain.model.json"
    path.write_text(save_model(two_state_chain), encoding="utf-8")
    return str(path)


@pytest.fixture
def crypto_file(tmp_path, crypto_mas):
    path = tmp_path / "crypto.mas.json"
    path.write_text(save_mas(crypto_mas), encoding="utf-8")
    return str(path)


CRYPTO_PROPERTY = "!a.payer -> AF (K<a> b.payer | K<a> c.payer)"


class TestCheck:
    def test_tautology_exit_zero(self, model_file, capsys):
        assert main(["check", model_file, "-f", "TRUE"]) == 0
        assert "holds" in capsys.readouterr().out

    def test_violation_writes_witness(self, model_file, tmp_path, capsys):
        out = tmp_path / "witness.xml"
        code = main(["check", model_file, "-f", "A<u>G p", "--format", "xml",
                     "--output", str(out)])
        assert code == 1
        assert "violated" in capsys.readouterr().out
        witness = from_xml(out.read_text(encoding="utf-8"))
        assert witness.state == "s0"

    def test_crypto_property_violated(self, crypto_file, tmp_path):
        out = tmp_path / "crypto.tlace.xml"
        code = main(["check", crypto_file, "--dialect", "ctlk",
                     "-f", CRYPTO_PROPERTY, "--format", "xml",
                     "--output", str(out)])
        assert code == 1
        assert out.exists()

    def test_explain_ops_filter_truncates(self, crypto_file, tmp_path):
        out = tmp_path / "crypto.tlace.json"
        code = main(["check", crypto_file, "--dialect", "ctlk",
                     "-f", CRYPTO_PROPERTY, "--format", "json",
                     "--explain-ops", "EaX", "--output", str(out)])
        assert code == 1
        document = json.loads(out.read_text(encoding="utf-8"))
        root = document["root"]
        assert root["truncated"]
        assert any(b["path"] is None and b["formula"].startswith("E<RUN>G")
                   for b in root["branches"])

    def test_missing_file(self, capsys):
        assert main(["check", "nowhere.json", "-f", "TRUE"]) == 2
        assert "error" in capsys.readouterr().err

    def test_formula_error_location(self, model_file, capsys):
        assert main(["check", model_file, "-f", "E<u>X"]) == 2
        assert "1:" in capsys.readouterr().err

    def test_both_formula_sources_rejected(self, model_file, tmp_path, capsys):
        f = tmp_path / "prop.txt"
        f.write_text("TRUE", encoding="utf-8")
        assert main(["check", model_file, "-f", "TRUE",
                     "--formula-file", str(f)]) == 2

    def test_formula_file(self, model_file, tmp_path):
        f = tmp_path / "prop.txt"
        f.write_text("E<u>X p\n", encoding="utf-8")
        assert main(["check", model_file, "--formula-file", str(f)]) == 0

    def test_byte_identical_outputs(self, crypto_file, tmp_path):
        outs = []
        for name in ("one.xml", "two.xml"):
            out = tmp_path / name
            main(["check", crypto_file, "--dialect", "ctlk",
                  "-f", CRYPTO_PROPERTY, "--format", "xml",
                  "--output", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_ctlk_dialect_needs_mas(self, model_file):
        assert main(["check", model_file, "--dialect", "ctlk",
                     "-f", "EX p"]) == 2


class TestValidate:
    def test_accepts_emitted_counterexample(self, model_file, tmp_path, capsys):
        out = tmp_path / "w.xml"
        main(["check", model_file, "-f", "A<u>G p", "--format", "xml",
              "--output", str(out)])
        code = main(["validate", model_file, str(out), "-f", "A<u>G p"])
        assert code == 0
        assert "adequate" in capsys.readouterr().out

    def test_rejects_mutated_witness(self, model_file, tmp_path, capsys):
        out = tmp_path / "w.xml"
        main(["check", model_file, "-f", "A<u>G p", "--format", "xml",
              "--output", str(out)])
        text = out.read_text(encoding="utf-8").replace(
            "<literal>!p</literal>", "<literal>p</literal>")
        mutated = tmp_path / "mutated.xml"
        mutated.write_text(text, encoding="utf-8")
        assert main(["validate", model_file, str(mutated), "-f", "A<u>G p"]) == 1
        assert "inadequate" in capsys.readouterr().out

    def test_rejects_wrong_model(self, model_file, tmp_path, capsys):
        out = tmp_path / "w.xml"
        main(["check", model_file, "-f", "A<u>G p", "--format", "xml",
              "--output", str(out)])
        from tlace.model import MixedTransitionSystem

        other_mts = MixedTransitionSystem(
            ["p", "q"], ["u"],
            {"t0": {"p": True, "q": False}}, ["t0"],
            {"a": {"u": True}}, [])
        other = tmp_path / "other.model.json"
        other.write_text(save_model(other_mts), encoding="utf-8")
        code = main(["validate", str(other), str(out), "-f", "A<u>G p"])
        assert code == 1
        assert "matches" in capsys.readouterr().out

    def test_witness_mode(self, model_file, tmp_path, two_state_chain):
        f = Exists(ActionAtom("u"), Next(Atom("p")))
        witness = explain(two_state_chain, "s0", f)
        doc = tmp_path / "w.json"
        doc.write_text(to_json(witness), encoding="utf-8")
        assert main(["validate", model_file, str(doc), "-f", "E<u>X p",
                     "--witness"]) == 0

    def test_schema_violation_exit_two(self, model_file, tmp_path):
        doc = tmp_path / "bad.xml"
        doc.write_text("<tlace version='1'><oops/></tlace>", encoding="utf-8")
        assert main(["validate", model_file, str(doc), "-f", "TRUE"]) == 2

    def test_primality_pipeline_self_certifying(self, tmp_path):
        from tlace.epistemic import build_primality_model

        # the range must include 49, the first composite coprime to 2, 3, 5,
        # so that some answer pattern mixes primes and composites
        mas_path = tmp_path / "primality.mas.json"
        mas_path.write_text(save_mas(build_primality_model(low=10, high=50)),
                            encoding="utf-8")
        out = tmp_path / "primality.tlace.json"
        prop = "AF (K<bob> prime | K<bob> !prime)"
        assert main(["check", str(mas_path), "--dialect", "ctlk", "-f", prop,
                     "--format", "json", "--output", str(out)]) == 1
        assert main(["validate", str(mas_path), str(out), "--dialect", "ctlk",
                     "-f", prop]) == 0


class TestStats:
    def test_single_node(self, tmp_path, capsys):
        doc = tmp_path / "w.xml"
        doc.write_text(to_xml(TlaceNode("s0", atomics=frozenset({Atom("p")}))),
                       encoding="utf-8")
        assert main(["stats", str(doc)]) == 0
        assert "1 node, 0 branches" in capsys.readouterr().out

    def test_malformed_exit_two(self, tmp_path, capsys):
        doc = tmp_path / "bad.json"
        doc.write_text("{}", encoding="utf-8")
        assert main(["stats", str(doc)]) == 2


class TestReduce:
    def test_roundtrip_two_states(self, tmp_path, capsys):
        from tlace.epistemic import MultiAgentSystem

        mas = MultiAgentSystem(["x"], {"s0": {"x": False}, "s1": {"x": True}},
                               ["s0"], [("s0", "s1")], {"ag1": ["x"]})
        src = tmp_path / "two.mas.json"
        src.write_text(save_mas(mas), encoding="utf-8")
        out = tmp_path / "two.model.json"
        assert main(["reduce", str(src), "-o", str(out)]) == 0
        assert main(["check", str(out), "-f", "E<RUN>X x"]) == 0

    def test_crypto_reduction_checkable(self, crypto_file, tmp_path):
        out = tmp_path / "crypto.model.json"
        assert main(["reduce", crypto_file, "-o", str(out)]) == 0
        assert main(["check", str(out), "-f", "Init"]) == 0

    def test_missing_agents_section(self, model_file, capsys):
        assert main(["reduce", model_file, "-o", "-"]) == 2
        assert "agents" in capsys.readouterr().err


class TestRenderText:
    def test_mentions_annotations_and_loop(self, loop_state):
        from tlace.formula import Globally

        f = Exists(ActionAtom("u"), Globally(Atom("p")))
        text = render_text(explain(loop_state, "s0", f))
        assert "state s0" in text
        assert "branch E<u>G p" in text
        assert "loop to position 0" in text
