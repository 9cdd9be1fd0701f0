import io
import json
from pathlib import Path

import pytest

from liftlab import serialize
from liftlab.cli import Config, main
from liftlab.core import BooleanFunction
from liftlab.errors import InputError

TRIANGLE = "csp maxcut 2 3 3\n1 2\n2 3\n1 3\n"


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def report(text):
    # the JSON report is the last top-level object on stdout
    return json.loads(text[text.index("{"):])


@pytest.fixture
def work(tmp_path):
    (tmp_path / "triangle.csp").write_text(TRIANGLE)
    f = 1 - BooleanFunction.coordinate(1, 0)
    (tmp_path / "f.json").write_text(serialize.dumps(serialize.function_to_json(f)))
    return tmp_path


def test_sa_value_prints_one_and_writes_witness(work):
    code, out = run(["--out", str(work / "o"), "sa-value", "--instance", str(work / "triangle.csp"), "--degree", "2"])
    assert code == 0 and out.splitlines()[0] == "1"
    pe = json.loads((work / "o" / "pseudoexpectation.json").read_text())
    assert pe["n"] == 3 and pe["d"] == 2


def test_decompose_uniform(work):
    code, out = run(["--out", str(work / "o"), "decompose", "--b", "20", "--n", "2", "--d", "2", "--input", "uniform"])
    rep = report(out)
    assert code == 0 and rep["good_rectangles"] == 1 and rep["error_mass"]["exact"] == "0"
    assert (work / "o" / "good_rectangles.csv").read_text().count("\n") == 2


def test_decompose_is_byte_identical_across_runs(work):
    args = ["decompose", "--b", "20", "--n", "3", "--d", "2", "--input", "random", "--planted", "2", "--seed", "5"]
    run(["--out", str(work / "a")] + args)
    run(["--out", str(work / "b")] + args)
    for name in ("decomposition.json", "good_rectangles.csv"):
        assert (work / "a" / name).read_bytes() == (work / "b" / name).read_bytes()
    code, out = run(["verify-decomposition", "--decomposition", str(work / "a" / "decomposition.json")])
    assert code == 0 and report(out)["failed"] == []


def test_tampered_witness_exits_one(work):
    o = work / "o"
    code, _ = run(["--out", str(o), "lift-witness", "--f", str(work / "f.json"), "--b", "20", "--d", "1"])
    assert code == 0
    code, _ = run(["verify-witness", "--f", str(work / "f.json"), "--witness", str(o / "witness.json")])
    assert code == 0
    w = json.loads((o / "witness.json").read_text())
    w["terms"][0]["lambda"] = "1/2"
    (work / "bad.json").write_text(json.dumps(w))
    code, out = run(["verify-witness", "--f", str(work / "f.json"), "--witness", str(work / "bad.json")])
    assert code == 1 and report(out)["failed"] == ["reconstruction"]


def test_duality_degp_pattern_acc_nnr(work):
    o = str(work / "o")
    tri = str(work / "triangle.csp")
    code, out = run(["--out", o, "duality-check", "--instance", tri, "--degree", "2", "--c", "5/6"])
    assert code == 0 and report(out)["sa_le_c"] is False
    code, out = run(["--out", o, "degp", "--instance", tri, "--c", "5/6", "--degree", "2", "--eta", "1/24"])
    assert code == 0 and report(out)["feasible"] is False and Path(o, "functional.json").exists()
    code, _ = run(["--out", o, "pattern-build", "--instance", tri, "--c", "1", "--b", "1"])
    assert code == 0 and all(Path(o, n).exists() for n in ("pattern.csv", "pattern.bin", "pattern_manifest.json"))
    from liftlab.core import Density

    (work / "u.json").write_text(serialize.dumps(serialize.density_to_json(Density.uniform(4, 1))))
    code, out = run(["--out", o, "acc", "--u", str(work / "u.json"), "--v", str(work / "u.json")])
    assert code == 0 and report(out)["acc"]["values"] == ["3/4", "5/4"]
    code, out = run(["--out", o, "nnr-report", "--f", str(work / "f.json"), "--b", "1", "--d-max", "1"])
    assert code == 0 and report(out)["rows"][1]["verified"] is True


def test_exit_codes(work):
    tri = str(work / "triangle.csp")
    assert run(["duality-check", "--instance", tri, "--degree", "2", "--c", "abc"])[0] == 2
    assert run(["sa-value", "--instance", str(work / "missing.csp"), "--degree", "2"])[0] == 2
    assert run(["no-such-command"])[0] == 2
    (work / "tiny.cfg").write_text("max_n = 2\n")
    code, out = run(["--config", str(work / "tiny.cfg"), "sa-value", "--instance", tri, "--degree", "2"])
    assert code == 3 and report(out)["error"] == "ResourceError"


def test_config_round_trip():
    cfg = Config(max_n=12, max_nb=10, eta="1/24", seed=7, out_dir="out", emit_format="csv")
    assert Config.load(cfg.dump()) == cfg
    assert Config.load(Config().dump()) == Config()
    assert Config.load("# comment\nseed = 3  # trailing\n").seed == 3


@pytest.mark.parametrize("text", ["max_n = 0\n", "bogus = 1\n", "seed\n", "eta = -1\n", "emit_format = xml\n", "max_n = x\n"])
def test_config_rejects_bad_files(text):
    with pytest.raises(InputError):
        Config.load(text)


def test_selftest_quick_examples_pass():
    from liftlab.acceptance import operation_examples

    assert all(ok for _, ok, _ in operation_examples())
