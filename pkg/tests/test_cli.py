import json
import os

import pytest

from squadkit.cli import run

FIX = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fx(name):
    return os.path.join(FIX, name)


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = call(capsys, "validate", fx("finsets2.json"))
    assert code == 0 and "valid" in out


def test_k0_finsets3(capsys):
    code, out, _ = call(capsys, "k0", fx("finsets3.json"))
    assert code == 0 and out.strip() == "pi0: Z"


def test_one_generator_presentation(capsys):
    code, out, _ = call(capsys, "k1", "--presentation", fx("one_generator.json"))
    assert code == 0 and out.strip() == "pi1: Z/2"
    code, out, _ = call(capsys, "--format", "json", "kinv", "--presentation", fx("one_generator.json"))
    data = json.loads(out)
    assert code == 0 and data["surjective"] and not data["zero"]


def test_check_tau_additive(capsys):
    code, out, _ = call(capsys, "check-tau", fx("f2vect2.json"), "--object", "V1", "--additive")
    assert code == 0
    assert "tau: holds" in out and "minus_one: holds" in out


def test_unknown_object_is_input_error(capsys):
    code, _, err = call(capsys, "check-tau", fx("f2vect2.json"), "--object", "nope")
    assert code == 2 and "unknown object" in err


def test_nerve_compare(capsys):
    code, out, _ = call(capsys, "nerve-compare", fx("finsets2.json"))
    assert code == 0 and "N1 equal: True" in out


def test_product(capsys):
    code, out, _ = call(capsys, "--format", "json", "product", fx("finsets3.json"), fx("finsets2.json"),
                        fx("finsets3.json"), "--pairing", fx("smash_3_2_3.json"))
    assert code == 0
    data = json.loads(out)
    assert data["ok"] and set(data["products"]) == {"00", "01", "10"}


def test_homotopy_check(capsys):
    f = fx("id_f3vect1.json")
    code, out, _ = call(capsys, "homotopy-check", fx("f3vect1.json"), fx("f3vect1.json"),
                        "--functors", f"{f},{f}", "--transformation", fx("minus_one_f3vect1.json"))
    assert code == 0 and "homotopy laws: hold" in out


def test_dstar_roundtrip(capsys, tmp_path):
    out_file = str(tmp_path / "p.json")
    code, _, _ = call(capsys, "dstar", fx("f3vect1.json"), "--out", out_file)
    assert code == 0 and os.path.exists(out_file)
    _, a, _ = call(capsys, "k1", "--presentation", out_file)
    _, b, _ = call(capsys, "k1", fx("f3vect1.json"))
    assert a == b


def test_jobs_do_not_change_output(capsys):
    _, one, _ = call(capsys, "--format", "json", "--jobs", "1", "dstar", fx("finsets3.json"))
    _, three, _ = call(capsys, "--format", "json", "--jobs", "3", "dstar", fx("finsets3.json"))
    assert one == three
    assert json.loads(one)["consistent"] is True


def test_bad_json_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = call(capsys, "k0", str(p))
    assert code == 2 and "not valid JSON" in err


def test_missing_file_exit_2(capsys):
    code, _, _ = call(capsys, "k0", "/nonexistent/cat.json")
    assert code == 2


def test_schema_error_exit_2(capsys, tmp_path):
    p = tmp_path / "cat.json"
    p.write_text(json.dumps({"objects": ["*"]}))
    code, _, err = call(capsys, "validate", str(p))
    assert code == 2 and err


def test_invalid_category_exit_1(capsys, tmp_path):
    with open(fx("finsets2.json")) as fh:
        data = json.load(fh)
    data["weakEquivalences"] = []
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(data))
    code, out, err = call(capsys, "validate", str(p))
    assert code == 1
    assert "INVALID" in out and "witness" in err


@pytest.mark.parametrize("cmd", ["k0", "k1", "kinv"])
def test_json_format(capsys, cmd):
    code, out, _ = call(capsys, "--format", "json", cmd, fx("finsets2.json"))
    assert code == 0
    json.loads(out)
