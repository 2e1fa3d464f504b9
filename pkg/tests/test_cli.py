"""Command line behavior: artifacts, exit codes and messages.

All invocations run in-process through ``main(argv)`` against
documents written into ``tmp_path``, which keeps the suite hermetic
while still exercising the real argument parser.
"""

import json

import pytest

import roofskel.cli
import roofskel.session
from roofskel.cli import main
from roofskel.kinetics import RobustnessFault
from roofskel.oracle import OracleReport

SQUARE_DOC = {
    "loops": [[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]],
    "edges": [{"weight": 1.0}] * 4,
}


@pytest.fixture()
def square_path(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps(SQUARE_DOC))
    return path


def test_build_writes_the_requested_artifacts(square_path, tmp_path, capsys):
    outs = {kind: tmp_path / f"out.{kind}" for kind in ("json", "svg", "obj")}
    code = main(
        [
            "build",
            str(square_path),
            "--step",
            "0.25",
            "--skeleton",
            str(outs["json"]),
            "--svg",
            str(outs["svg"]),
            "--obj",
            str(outs["obj"]),
        ]
    )
    assert code == 0
    assert outs["json"].read_bytes().startswith(b'{"z":0.5,"status":"terminated"')
    assert outs["svg"].read_bytes().startswith(b"<svg xmlns=")
    assert outs["obj"].read_text().splitlines()[0] == "v 0 0 0"
    summary = capsys.readouterr().out
    assert "terminated: z=0.5, 5 nodes, 4 arcs, 4 faces" in summary


def test_build_report_writes_figure_and_node_table(square_path, tmp_path, capsys):
    stem = tmp_path / "run"
    code = main(["build", str(square_path), "--report", str(stem)])
    assert code == 0
    png = stem.with_suffix(".png")
    csv_path = stem.with_suffix(".csv")
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "id,kind,x,y,z"
    assert any(",collapse," in line for line in lines[1:])
    out = capsys.readouterr().out
    assert str(png) in out and str(csv_path) in out


def test_oracle_check_passes_on_the_square(square_path, capsys):
    code = main(["build", str(square_path), "--oracle-check"])
    assert code == 0
    assert "oracle: ok" in capsys.readouterr().out


def test_oracle_mismatch_fails_the_run(square_path, monkeypatch, capsys):
    report = OracleReport(
        max_position_error=1.0,
        event_sequence_match=False,
        face_count_match=True,
        notes=["node sets differ"],
    )
    monkeypatch.setattr(roofskel.cli, "verify_skeleton", lambda *a, **k: report)
    code = main(["build", str(square_path), "--oracle-check"])
    assert code == 1
    captured = capsys.readouterr()
    assert "oracle: node sets differ" in captured.out
    assert "oracle: MISMATCH" in captured.err


def test_missing_input_exits_2(tmp_path, capsys):
    code = main(["build", str(tmp_path / "absent.json")])
    assert code == 2
    assert "cannot read" in capsys.readouterr().err


def test_malformed_document_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"loops": [[[0, 0], [1, 0]]], "edges": []}')
    code = main(["build", str(path)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_nonpositive_step_exits_2(square_path, capsys):
    code = main(["build", str(square_path), "--step", "0"])
    assert code == 2
    assert "positive" in capsys.readouterr().err


def test_open_ended_input_requires_max_z(tmp_path, capsys):
    doc = dict(SQUARE_DOC, edges=[{"weight": 1.0}] * 3 + [{"stationary": True}])
    path = tmp_path / "walled.json"
    path.write_text(json.dumps(doc))

    code = main(["build", str(path)])
    assert code == 2
    assert "--max-z" in capsys.readouterr().err

    code = main(["build", str(path), "--max-z", "0.3", "--skeleton", str(tmp_path / "w.json")])
    assert code == 0
    assert "running: z=0.3" in capsys.readouterr().out


def test_engine_fault_dumps_state_and_exits_1(square_path, monkeypatch, capsys):
    def refuse(w, dt, vz, observer):
        raise RobustnessFault("tolerance collapse", dump={"t": w.t})

    monkeypatch.setattr(roofskel.session, "step", refuse)
    code = main(["build", str(square_path)])
    assert code == 1
    dump_path = square_path.with_suffix(".fault.json")
    assert json.loads(dump_path.read_text())["message"] == "tolerance collapse"
    err = capsys.readouterr().err
    assert "fault: tolerance collapse" in err
    assert dump_path.name in err


def test_serve_arguments_parse_without_binding():
    parser = roofskel.cli._build_parser()
    args = parser.parse_args(["serve"])
    assert args.command == "serve" and args.port == 8000
    assert parser.parse_args(["serve", "--port", "9100"]).port == 9100


def test_unknown_command_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["demolish"])
    assert exc.value.code == 2
    assert "invalid choice" in capsys.readouterr().err
