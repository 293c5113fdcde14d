import json
import os
from fractions import Fraction

import pytest

from crnf import GaussRat, Surface, harmonic_power
from crnf.cli import main
from crnf.poly import poly_to_records
from crnf.surface import FormalMap, map_to_json, surface_to_json


@pytest.fixture
def workdir(tmp_path):
    seed = Surface(6, {(3, 0): 1, (2, 1): GaussRat(Fraction(1, 2))})
    (tmp_path / "seed.json").write_text(json.dumps(surface_to_json(seed)))
    c3 = harmonic_power(3)
    (tmp_path / "c3surf.json").write_text(
        json.dumps(surface_to_json(Surface(6, dict(c3.coeff))))
    )
    (tmp_path / "z3.json").write_text(json.dumps(poly_to_records(c3 * 0 + c3)))
    (tmp_path / "z3mono.json").write_text(json.dumps([{"m": 3, "n": 0, "re": "1"}]))
    kmap = FormalMap(6, {(1, 1): 1}, {(0, 2): 2})
    (tmp_path / "kmap.json").write_text(json.dumps(map_to_json(kmap)))
    return tmp_path


def test_fischer_divide_verb(workdir, capsys):
    assert main(["fischer", "divide", "--in", str(workdir / "z3mono.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["trace_free"] is True
    assert report["quotient"] == [{"m": 1, "n": 0, "re": "3/4"}]


def test_fischer_chain_verb(workdir, capsys):
    assert main(["fischer", "chain", "--in", str(workdir / "z3mono.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["reassembles"] is True
    assert len(report["remainders"]) == 1


def test_fischer_w_verb(workdir, capsys):
    assert main(["fischer", "W", "--in", str(workdir / "z3mono.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["nonzero"] is True
    assert main(["fischer", "W", "--in", str(workdir / "z3.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["nonzero"] is False


def test_gate_verb(capsys):
    assert main(["gate", "--f10", "i", "--g01", "-1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["accepted"] is True
    assert main(["gate", "--f10", "1+i", "--g01", "2i"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["accepted"] is False


def test_normalize_model_is_fixed_point(workdir, capsys):
    model = workdir / "model.json"
    model.write_text(json.dumps(surface_to_json(Surface.model(6))))
    assert main(["normalize", "--in", str(model)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["surface"] == {"truncation": 6, "coeffs": []}
    assert report["map"] == {"truncation": 6, "f": [], "g": []}


def test_normalize_exit_code_degenerate(workdir):
    assert main(["normalize", "--in", str(workdir / "c3surf.json")]) == 2
    out = workdir / "off.json"
    assert (
        main(
            [
                "normalize",
                "--in",
                str(workdir / "c3surf.json"),
                "--resonance",
                "off",
                "--out",
                str(out),
            ]
        )
        == 0
    )
    report = json.loads(out.read_text())
    assert report["unresolved"]


def test_nonaffine_exit_code(monkeypatch, workdir):
    from crnf import cli
    from crnf.errors import NonAffineResolutionError

    def boom(*args, **kwargs):
        raise NonAffineResolutionError(5, "synthetic")

    monkeypatch.setattr(cli, "normalize", boom)
    assert main(["normalize", "--in", str(workdir / "seed.json")]) == 3


def test_schema_error_exit_code_and_location(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"truncation": 6,\n "coeffs": [{"m": 3, "n": 0, "re": "0.5"}]}')
    assert main(["normalize", "--in", str(bad)]) == 4
    err = capsys.readouterr().err
    assert "line 2" in err
    malformed = tmp_path / "malformed.json"
    malformed.write_text("{not json")
    assert main(["normalize", "--in", str(malformed)]) == 4


def test_atomic_write_leaves_no_temp(workdir):
    out = workdir / "nf.json"
    assert main(["normalize", "--in", str(workdir / "seed.json"), "--out", str(out)]) == 0
    assert out.exists()
    leftovers = [p for p in os.listdir(workdir) if p.startswith(".crnf-")]
    assert leftovers == []


def test_pushforward_verb(workdir, capsys):
    model = workdir / "model.json"
    model.write_text(json.dumps(surface_to_json(Surface.model(6))))
    assert main(
        ["pushforward", "--in", str(model), "--map", str(workdir / "kmap.json")]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    coeffs = {(c["m"], c["n"]): c["re"] for c in report["coeffs"]}
    assert coeffs == {(6, 0): "-1", (4, 2): "-3", (2, 4): "-3", (0, 6): "-1"}


def test_residual_verb(workdir, capsys):
    model = workdir / "model.json"
    model.write_text(json.dumps(surface_to_json(Surface.model(6))))
    push = workdir / "pushed.json"
    assert main(
        [
            "pushforward",
            "--in",
            str(model),
            "--map",
            str(workdir / "kmap.json"),
            "--out",
            str(push),
        ]
    ) == 0
    assert main(
        [
            "residual",
            "--in",
            str(model),
            "--map",
            str(workdir / "kmap.json"),
            "--target",
            str(push),
        ]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["zero"] is True


def test_invariance_deterministic_bytes(workdir):
    out1 = workdir / "inv1.json"
    out2 = workdir / "inv2.json"
    args = [
        "invariance",
        "--in",
        str(workdir / "seed.json"),
        "--trials",
        "2",
        "--seed",
        "7",
    ]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert report["all_equal"] is True


def test_invariance_explicit_map_resonance_off(workdir, capsys):
    assert main(
        [
            "invariance",
            "--in",
            str(workdir / "seed.json"),
            "--map",
            str(workdir / "kmap.json"),
            "--resonance",
            "off",
        ]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["all_equal"] is False
    assert report["trials"][0]["first_discrepancy"] == 6


def test_randtest_deterministic(workdir):
    out1 = workdir / "rt1.json"
    out2 = workdir / "rt2.json"
    assert main(["randtest", "--seed", "3", "--trials", "20", "--out", str(out1)]) == 0
    assert main(["randtest", "--seed", "3", "--trials", "20", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert report["all_passed"] is True


def test_invariance_explicit_map_reports_param_ledgers(workdir, capsys):
    assert main(
        [
            "invariance",
            "--in",
            str(workdir / "seed.json"),
            "--map",
            str(workdir / "kmap.json"),
        ]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    trial = report["trials"][0]
    assert trial["base_params"] and trial["image_params"]


def test_param_degree_cap_env(monkeypatch, workdir, capsys):
    monkeypatch.setenv("CRNF_PARAM_DEGREE_CAP", "6")
    assert main(["normalize", "--in", str(workdir / "seed.json")]) == 0
    from crnf.scalars import param_degree_cap, set_param_degree_cap

    assert param_degree_cap() == 6
    set_param_degree_cap(4)
    monkeypatch.setenv("CRNF_PARAM_DEGREE_CAP", "zero")
    assert main(["normalize", "--in", str(workdir / "seed.json")]) == 4


def test_verify_verb(workdir, capsys):
    assert main(["verify", "--in", str(workdir / "seed.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    degree3 = next(d for d in report["degrees"] if d["degree"] == 3)
    assert degree3["ok"] is False  # z^3 component has a nonzero image part


def test_normalize_roundtrip_surface(workdir):
    out = workdir / "nf.json"
    assert main(["normalize", "--in", str(workdir / "seed.json"), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    # the embedded surface parses back and re-normalizes to itself
    from crnf.surface import surface_from_json

    nf = surface_from_json(report["surface"])
    out2 = workdir / "nf2.json"
    (workdir / "nfsurf.json").write_text(json.dumps(report["surface"]))
    assert main(
        ["normalize", "--in", str(workdir / "nfsurf.json"), "--out", str(out2)]
    ) == 0
    report2 = json.loads(out2.read_text())
    assert report2["surface"] == report["surface"]
    assert report2["map"] == {"truncation": 6, "f": [], "g": []}
