import json

import numpy as np
import pytest

from schurkit import serialize
from schurkit.cli import main
from conftest import permutation_colligation


@pytest.fixture
def system_path(tmp_path):
    path = tmp_path / "sys.json"
    assert main(["random", "--seed", "7", "--state-dim", "4", "--io-dim", "2",
                 "--output", str(path)]) == 0
    return path


def test_random_emits_unitary_colligation(system_path):
    obj = json.loads(system_path.read_text())
    sys = serialize.system_from_json(obj)
    full = sys.colligation()
    resid = np.linalg.norm(full.conj().T @ full - np.eye(full.shape[1]), 2)
    assert resid <= 1e-12
    assert obj["classification"]["simple"]


def test_random_deterministic(tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    main(["random", "--seed", "3", "--output", str(p1)])
    main(["random", "--seed", "3", "--output", str(p2)])
    assert p1.read_bytes() == p2.read_bytes()


def test_analyze(system_path, tmp_path, capsys):
    out = tmp_path / "analysis.json"
    assert main(["analyze", "--input", str(system_path), "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["classification"]["conservative"]
    assert report["classification"]["simple"]
    profile = report["defect_profile"]
    assert profile["delta"][0] == 2
    assert all(a >= b for a, b in zip(profile["delta"], profile["delta"][1:]))


def test_analyze_unitary_without_inputs(tmp_path):
    # a rotation acting alone as a 0-input system: conservative, not simple
    blocks = {
        "m": 0, "n": 0, "h": 2, "k": 2,
        "D": {"rows": 0, "cols": 0, "data": []},
        "C": {"rows": 0, "cols": 2, "data": []},
        "B": {"rows": 2, "cols": 0, "data": []},
        "A": {"rows": 2, "cols": 2, "data": [[0, 0], [1, 0], [-1, 0], [0, 0]]},
    }
    path = tmp_path / "unitary.json"
    path.write_text(json.dumps(blocks))
    out = tmp_path / "analysis.json"
    assert main(["analyze", "--input", str(path), "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["classification"]["conservative"]
    assert not report["classification"]["simple"]
    assert report["defect_profile"] is None


def test_schur_chain_output(tmp_path):
    path = tmp_path / "anchor.json"
    path.write_text(serialize.dumps(serialize.system_to_json(permutation_colligation())))
    out = tmp_path / "chain.json"
    assert main(["schur", "--input", str(path), "--n-max", "3",
                 "--output", str(out)]) == 0
    chain = json.loads(out.read_text())
    gammas = [g["data"] for g in chain["gammas"]]
    assert len(gammas) == 3
    assert chain["terminated"] is True
    assert chain["h_dims"] == [2, 1, 0]
    assert abs(gammas[2][0][0] - 1.0) <= 1e-10


def test_realize_output(system_path, tmp_path):
    out = tmp_path / "realized.json"
    assert main(["realize", "--input", str(system_path), "--output", str(out)]) == 0
    realized = json.loads(out.read_text())
    assert realized["terminated"]
    for family in realized["iterates"]:
        for sysobj in family:
            assert sysobj["classification"]["conservative"]
            assert sysobj["classification"]["simple"]


def test_verify_pass_and_determinism(system_path, tmp_path):
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["verify", "--input", str(system_path), "--output", str(r1)]) == 0
    assert main(["verify", "--input", str(system_path), "--output", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
    report = json.loads(r1.read_text())
    assert report["pass"] is True
    assert report["termination_step"] is not None


def test_verify_rejects_corruption(system_path, tmp_path):
    obj = json.loads(system_path.read_text())
    obj["B"]["data"][0][0] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    out = tmp_path / "badreport.json"
    assert main(["verify", "--input", str(bad), "--output", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["pass"] is False


def test_parse_error_exit(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["verify", "--input", str(broken)]) == 2
    assert main(["verify", "--input", str(tmp_path / "missing.json")]) == 2


def test_validation_error_exit(tmp_path):
    # conservative but not simple: schur construction must refuse
    blocks = {
        "m": 0, "n": 0, "h": 2, "k": 2,
        "D": {"rows": 0, "cols": 0, "data": []},
        "C": {"rows": 0, "cols": 2, "data": []},
        "B": {"rows": 2, "cols": 0, "data": []},
        "A": {"rows": 2, "cols": 2, "data": [[0, 0], [1, 0], [-1, 0], [0, 0]]},
    }
    path = tmp_path / "nonsimple.json"
    path.write_text(json.dumps(blocks))
    assert main(["schur", "--input", str(path)]) == 3


def test_sample_csv(system_path, tmp_path):
    out = tmp_path / "samples.csv"
    assert main(["sample", "--input", str(system_path), "--grid-radii", "0.5",
                 "--output", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("re_lambda,im_lambda,re_0_0,im_0_0")
    assert len(lines) == 1 + 1 + 8  # header, origin, 8 angles at one radius
    first = [float(tok) for tok in lines[1].split(",")]
    assert first[0] == 0.0 and first[1] == 0.0


def test_schur_single_blaschke_factor(tmp_path):
    import math

    r = math.sqrt(0.84)
    blocks = {
        "m": 1, "n": 1, "h": 1, "k": 1,
        "D": {"rows": 1, "cols": 1, "data": [[0.4, 0]]},
        "C": {"rows": 1, "cols": 1, "data": [[r, 0]]},
        "B": {"rows": 1, "cols": 1, "data": [[r, 0]]},
        "A": {"rows": 1, "cols": 1, "data": [[-0.4, 0]]},
    }
    path = tmp_path / "factor.json"
    path.write_text(json.dumps(blocks))
    out = tmp_path / "chain.json"
    assert main(["schur", "--input", str(path), "--n-max", "3",
                 "--output", str(out)]) == 0
    chain = json.loads(out.read_text())
    got = [g["data"][0][0] for g in chain["gammas"]]
    assert np.allclose(got, [0.4, 1.0], atol=1e-10)
    assert chain["terminated"] is True


def test_schur_report_reproducible(tmp_path, system_path):
    c1, c2 = tmp_path / "c1.json", tmp_path / "c2.json"
    main(["schur", "--input", str(system_path), "--output", str(c1)])
    main(["schur", "--input", str(system_path), "--output", str(c2)])
    assert c1.read_bytes() == c2.read_bytes()


def test_tolerance_overrides_flow_through(system_path, tmp_path):
    out = tmp_path / "rep.json"
    assert main(["verify", "--input", str(system_path), "--rank-tol", "1e-8",
                 "--eq-tol", "1e-7", "--output", str(out)]) == 0
    assert main(["verify", "--input", str(system_path), "--rank-tol", "2",
                 "--output", str(out)]) == 3  # rank_rel must lie in (0, 1)
