import json
from fractions import Fraction

import numpy as np
import pytest

from conftest import rational_separable_decomposition, rational_state_of
from sepscan import states
from sepscan.cli import main
from sepscan.qsep import bits_required, reduce_wmem_to_qsep, truncate_decomposition
from sepscan.serialize import (
    density_from_json,
    density_to_json,
    dump_json,
    graph_to_json,
    qsep_certificate_from_json,
    qsep_certificate_to_json,
    qsep_instance_from_json,
    qsep_instance_to_json,
    rational_matrix_to_json,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture()
def bell_path(tmp_path):
    path = tmp_path / "bell.json"
    dump_json(density_to_json(states.bell()), path)
    return str(path)


@pytest.fixture()
def maxmixed_path(tmp_path):
    path = tmp_path / "maxmixed22.json"
    dump_json(density_to_json(states.maximally_mixed(2, 2)), path)
    return str(path)


class TestSerialization:
    def test_density_round_trip(self):
        rho = states.werner(0.37)
        again = density_from_json(density_to_json(rho))
        np.testing.assert_allclose(again.mat, rho.mat, atol=1e-12)
        assert (again.m, again.n) == (2, 2)

    def test_rational_round_trip(self):
        decomp = rational_separable_decomposition(2, 2, 4, seed=13)
        rho = rational_state_of(decomp, 2, 2)
        inst = reduce_wmem_to_qsep(rho, 2, 2, Fraction(1, 2))
        again = qsep_instance_from_json(json.loads(json.dumps(qsep_instance_to_json(inst))))
        assert again.rho == inst.rho
        assert again.delta_p == inst.delta_p

    def test_certificate_round_trip(self):
        decomp = rational_separable_decomposition(2, 2, 4, seed=14)
        cert = truncate_decomposition(decomp, 12, 2, 2)
        again = qsep_certificate_from_json(
            json.loads(json.dumps(qsep_certificate_to_json(cert)))
        )
        assert again.terms == cert.terms


class TestTestCommand:
    def test_bell_exits_entangled(self, capsys, bell_path):
        code, report = run_cli(capsys, "test", "--input", bell_path)
        assert code == 1
        assert report["verdict"]["reason"] == "ppt"
        assert report["verdict"]["exact"] is True

    def test_maxmixed_exits_separable(self, capsys, maxmixed_path):
        code, report = run_cli(capsys, "test", "--input", maxmixed_path)
        assert code == 0
        assert report["verdict"]["reason"] == "frobenius_ball"

    def test_missing_file_is_input_error(self, capsys, tmp_path):
        code, report = run_cli(capsys, "test", "--input", str(tmp_path / "nope.json"))
        assert code == 64
        assert report["kind"] == "input"

    def test_malformed_matrix_is_input_error(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        dump_json({"m": 2, "n": 2, "matrix": [[1, 2], [3]]}, path)
        code, report = run_cli(capsys, "test", "--input", str(path))
        assert code == 64


class TestWitnessCommand:
    def test_werner_entangled_with_witness_artifact(self, capsys, tmp_path):
        rho_path = tmp_path / "werner09.json"
        dump_json(density_to_json(states.werner(0.9)), rho_path)
        out_path = tmp_path / "witness.json"
        code, report = run_cli(
            capsys,
            "witness",
            "--input",
            str(rho_path),
            "--delta",
            "0.05",
            "--net-cache",
            str(tmp_path / "nets"),
            "--witness-out",
            str(out_path),
        )
        assert code == 1
        assert report["witness"]["margin"] > 0
        emitted = json.loads(out_path.read_text())
        assert max(abs(x) for x in emitted["bloch_sup_normalized"]) == pytest.approx(1.0)

    def test_too_coarse_net_is_infeasible(self, capsys, bell_path):
        code, report = run_cli(
            capsys, "witness", "--input", bell_path, "--delta", "0.05",
            "--net-delta", "0.2",
        )
        assert code == 65
        assert report["kind"] == "infeasible"


class TestSymextCommand:
    def test_bell_flagged(self, capsys, bell_path):
        code, report = run_cli(
            capsys, "symext", "--input", bell_path, "--delta", "0.5"
        )
        assert code == 1
        assert report["verdict"]["reason"].startswith("symext_infeasible")

    def test_maxmixed_separable(self, capsys, maxmixed_path):
        code, report = run_cli(
            capsys, "symext", "--input", maxmixed_path, "--delta", "2.0"
        )
        assert code == 0


class TestWoptCommand:
    def test_reports_value_and_guarantee(self, capsys, tmp_path):
        op = {"m": 2, "n": 2, "matrix": [[[1, 0], [0, 0], [0, 0], [0, 0]],
                                          [[0, 0], [-1, 0], [0, 0], [0, 0]],
                                          [[0, 0], [0, 0], [-1, 0], [0, 0]],
                                          [[0, 0], [0, 0], [0, 0], [1, 0]]]}
        path = tmp_path / "zz.json"
        dump_json(op, path)
        code, report = run_cli(capsys, "wopt", "--op", str(path), "--delta", "0.2")
        assert code == 0
        assert report["value"] == pytest.approx(1.0, abs=2 * 0.2 * 2.0)
        assert report["guarantee"] == pytest.approx(2 * 0.2 * 2.0)


class TestQsepCommands:
    def test_reduce_then_verify_round_trip(self, capsys, tmp_path):
        decomp = rational_separable_decomposition(2, 2, 5, seed=21)
        rho = rational_state_of(decomp, 2, 2)
        rho_path = tmp_path / "rho.rational.json"
        dump_json(
            {"m": 2, "n": 2, "rational": True, "matrix": rational_matrix_to_json(rho)},
            rho_path,
        )
        inst_path = tmp_path / "inst.json"
        code, report = run_cli(
            capsys, "qsep-reduce", "--input", str(rho_path), "--delta", "1/2",
            "--out", str(inst_path),
        )
        assert code == 0
        p = report["bits"]
        cert = truncate_decomposition(decomp, p, 2, 2)
        cert_path = tmp_path / "cert.json"
        dump_json(qsep_certificate_to_json(cert), cert_path)
        code, report = run_cli(
            capsys, "qsep-verify", "--instance", str(inst_path), "--cert", str(cert_path)
        )
        assert code == 0
        assert report["result"]["accepted"] is True

    def test_bogus_certificate_rejected(self, capsys, tmp_path):
        decomp = rational_separable_decomposition(2, 2, 5, seed=22)
        rho = rational_state_of(decomp, 2, 2)
        inst = reduce_wmem_to_qsep(rho, 2, 2, Fraction(1, 4))
        inst_path = tmp_path / "inst.json"
        dump_json(qsep_instance_to_json(inst), inst_path)
        p = bits_required(inst.delta_p)
        other = rational_separable_decomposition(2, 2, 5, seed=99)
        cert_path = tmp_path / "cert.json"
        dump_json(qsep_certificate_to_json(truncate_decomposition(other, p, 2, 2)), cert_path)
        code, report = run_cli(
            capsys, "qsep-verify", "--instance", str(inst_path), "--cert", str(cert_path)
        )
        assert code == 2
        assert report["result"]["accepted"] is False


class TestGadgetCommand:
    def test_triangle_chain(self, capsys, tmp_path):
        from sepscan.gadgets import Graph

        path = tmp_path / "k3.json"
        dump_json(graph_to_json(Graph.complete(3)), path)
        code, report = run_cli(
            capsys, "gadget", "--graph", str(path), "--clique", "3"
        )
        assert code == 0
        assert report["chain"]["consistent"] is True
        assert report["chain"]["decided_yes"] is True


class TestNetCommand:
    def test_build_and_verify(self, capsys, tmp_path):
        code, report = run_cli(
            capsys, "net", "--m", "2", "--delta", "0.4",
            "--net-cache", str(tmp_path), "--verify-samples", "2000",
        )
        assert code == 0
        assert report["passed"] is True


class TestStateCommand:
    def test_emit_and_reload(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        code, report = run_cli(
            capsys, "state", "--name", "werner", "--param", "w=0.8", "--out", str(path)
        )
        assert code == 0
        rho = density_from_json(json.loads(path.read_text()))
        np.testing.assert_allclose(rho.mat, states.werner(0.8).mat, atol=1e-12)

    def test_unknown_name_is_input_error(self, capsys):
        code, report = run_cli(capsys, "state", "--name", "nonsense")
        assert code == 64


class TestDeterminism:
    def test_reports_identical_modulo_timing(self, capsys, bell_path):
        code1, rep1 = run_cli(capsys, "test", "--input", bell_path)
        code2, rep2 = run_cli(capsys, "test", "--input", bell_path)
        rep1.pop("timings")
        rep2.pop("timings")
        assert code1 == code2 and rep1 == rep2
