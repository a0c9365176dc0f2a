import json

import numpy as np
import pytest

from qprecond import channel_reps as cr
from qprecond.cli import EXIT_CHECK_FAILED, EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from qprecond.encoding import channel_from_json, channel_to_json, code_to_json, matrix_from_json, matrix_to_json
from qprecond.info_metrics import capacity_code
from qprecond.random_instances import random_holevo_channel
from qprecond.transform_unitaries import fourier_unitary, sine_unitary


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_unitary_examples(capsys):
    code, out, _ = run(capsys, "unitary", "--kind", "fourier", "--n", "2")
    assert code == EXIT_OK
    U = matrix_from_json(json.loads(out))
    assert np.abs(U - np.array([[1, 1], [1, -1]]) / np.sqrt(2)).max() < 1e-15
    code, out, _ = run(capsys, "unitary", "--kind", "sine", "--n", "1")
    assert code == EXIT_OK and np.allclose(matrix_from_json(json.loads(out)), [[1]])


@pytest.mark.parametrize(
    "argv",
    [
        ["unitary", "--kind", "fourier", "--n", "0"],
        ["unitary", "--kind", "cosine", "--n", "2"],
        ["unitary", "--kind", "fourier"],
        ["frobnicate"],
        [],
        ["--tol", "-1", "suite"],
        ["suite", "--trials", "0"],
    ],
)
def test_usage_errors_exit_64(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_global_flags_accepted_before_or_after_verb(capsys, files):
    path = files("p.json", channel_to_json(cr.preconditioner(fourier_unitary(3))))
    before = run(capsys, "--tol", "1e-6", "verify", "--channel", path)
    after = run(capsys, "verify", "--channel", path, "--tol", "1e-6")
    assert before == after
    assert json.loads(before[1].splitlines()[0])["tol"] == 1e-6


def test_verify_examples(capsys, files):
    good = files("p.json", channel_to_json(cr.preconditioner(fourier_unitary(4))))
    code, out, _ = run(capsys, "verify", "--channel", good)
    assert code == EXIT_OK and all(json.loads(line)["pass"] for line in out.splitlines())
    half = files("half.json", {"type": "kraus", "ops": [matrix_to_json(np.eye(2) / 2)]})
    code, out, _ = run(capsys, "verify", "--channel", half)
    rows = {json.loads(line)["check"]: json.loads(line) for line in out.splitlines()}
    assert code == EXIT_CHECK_FAILED and not rows["trace_preservation"]["pass"]
    bad = files("bad.json", "{oops")
    assert run(capsys, "verify", "--channel", bad)[0] == EXIT_DATA


def test_data_errors_exit_65(capsys, files, tmp_path):
    assert run(capsys, "verify", "--channel", str(tmp_path / "missing.json"))[0] == EXIT_DATA
    mismatch = files("m.json", {"type": "kraus", "ops": [matrix_to_json(np.eye(2)), matrix_to_json(np.eye(3))]})
    assert run(capsys, "verify", "--channel", mismatch)[0] == EXIT_DATA
    ch = files("c.json", channel_to_json(cr.preconditioner(fourier_unitary(2))))
    state = files("s.json", matrix_to_json(np.eye(3) / 3))
    assert run(capsys, "fidelity", "--channel", ch, "--state", state)[0] == EXIT_DATA


def test_apply_compose_and_conversions(capsys, files):
    U = sine_unitary(3)
    P = cr.preconditioner(U, [[0, 1], [2]])
    ch = files("p.json", channel_to_json(P))
    A = np.arange(9).reshape(3, 3) + 1j
    inp = files("a.json", matrix_to_json(A))
    code, out, _ = run(capsys, "apply", "--channel", ch, "--input", inp)
    assert code == EXIT_OK and np.abs(matrix_from_json(json.loads(out)) - P.apply(A)).max() < 1e-12

    code, out, _ = run(capsys, "compose", ch, ch)
    composed = json.loads(out)
    assert code == EXIT_OK and composed["type"] == "kraus"
    assert cr.basis_residual(channel_from_json(composed), P) < 1e-12

    code, out, _ = run(capsys, "choi", "--channel", ch)
    assert np.abs(matrix_from_json(json.loads(out)) - cr.choi_matrix(P).mat).max() < 1e-12
    code, out, _ = run(capsys, "kraus", "--channel", ch)
    assert json.loads(out)["type"] == "kraus" and len(json.loads(out)["ops"]) == 2
    code, out, _ = run(capsys, "stinespring", "--channel", ch)
    assert json.loads(out)["env_dim"] == 2


def test_compose_holevo_pair_stays_holevo(capsys, files):
    rng = np.random.default_rng(0)
    a = files("a.json", channel_to_json(random_holevo_channel(rng, 2, 2)))
    b = files("b.json", channel_to_json(random_holevo_channel(rng, 2, 3)))
    code, out, _ = run(capsys, "compose", a, b)
    assert code == EXIT_OK and json.loads(out)["type"] == "holevo" and len(json.loads(out)["povm"]) == 3


def test_semigroup_verbs(capsys, files):
    U = fourier_unitary(3)
    p = files("p.json", channel_to_json(cr.preconditioner(U)))
    code, out, _ = run(capsys, "stochastic", "--channel", p)
    obj = json.loads(out)
    assert code == EXIT_OK and obj["size"] == 3 and np.abs(np.array(obj["entries"]) - np.eye(3)).max() < 1e-12

    code, out, _ = run(capsys, "idempotent", "--channel", p, "--method", "both")
    obj = json.loads(out)
    assert code == EXIT_OK and obj["agree"] and obj["holevo"]["idempotent"] and obj["operational"]["idempotent"]

    code, out, _ = run(capsys, "ginverse", "--a", p, "--a-dagger", p)
    assert code == EXIT_OK and all(v["holds"] for v in json.loads(out).values())

    blocks = files("b.json", channel_to_json(cr.preconditioner(U, [[0, 1], [2]])))
    code, out, _ = run(capsys, "rdc-check", "--delta", p, "--phi", blocks)
    obj = json.loads(out)
    assert obj["absorb_left"]["holds"] and obj["absorb_right"]["holds"]


def test_stochastic_rejects_block_preconditioner(capsys, files):
    b = files("b.json", channel_to_json(cr.preconditioner(fourier_unitary(3), [[0, 1], [2]])))
    assert run(capsys, "stochastic", "--channel", b)[0] == EXIT_DATA


def test_info_verbs(capsys, files):
    p = files("p.json", channel_to_json(cr.preconditioner(np.eye(2))))
    s = files("s.json", matrix_to_json(np.full((2, 2), 0.5)))
    code, out, _ = run(capsys, "fidelity", "--channel", p, "--state", s)
    assert code == EXIT_OK and abs(json.loads(out)["entanglement_fidelity"] - 0.5) < 1e-12
    code, out, _ = run(capsys, "eb-check", "--channel", p)
    assert json.loads(out) == {"verdict": "proved-EB", "cq_structure": "c-q"}


def test_capacity_and_code_test(capsys, files, tmp_path):
    out_path = tmp_path / "cap.json"
    code, out, _ = run(capsys, "capacity", "--J", "2", "--block-length", "2", "--out", str(out_path))
    assert code == EXIT_OK and out == ""
    obj = json.loads(out_path.read_text())
    assert obj["capacity"] == 1.0 and obj["error_probability"] <= 1e-12 and obj["code"]["block_length"] == 2

    code_file = files("code.json", obj["code"])
    ch = files("p.json", channel_to_json(cr.preconditioner(fourier_unitary(2))))
    code, out, _ = run(capsys, "code-test", "--code", code_file, "--channel", ch)
    assert code == EXIT_OK and json.loads(out)["error_probability"] <= 1e-12

    embedded = dict(code_to_json(capacity_code(fourier_unitary(2), 1)))
    embedded["channel"] = channel_to_json(cr.preconditioner(fourier_unitary(2)))
    code, out, _ = run(capsys, "code-test", "--code", files("e.json", embedded))
    assert code == EXIT_OK and json.loads(out)["size"] == 2

    assert run(capsys, "code-test", "--code", code_file)[0] == EXIT_DATA


def test_capacity_rejects_zero(capsys):
    assert run(capsys, "capacity", "--J", "0")[0] == EXIT_USAGE


def test_capacity_budget_is_a_data_error(capsys):
    assert run(capsys, "--max-dim", "8", "capacity", "--J", "4", "--block-length", "2", "--no-code")[0] == EXIT_DATA


def test_suite_is_deterministic_and_tolerance_sensitive(capsys):
    args = ("suite", "--trials", "3", "--only", "matrix_core", "--only", "channel_reps.fixed")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first[0] == EXIT_OK and first == second
    names = [json.loads(line)["check"] for line in first[1].splitlines()]
    assert names == sorted(names)
    strict = run(capsys, "--tol", "1e-15", *args)
    assert strict[0] == EXIT_CHECK_FAILED
    assert any(not json.loads(line)["pass"] for line in strict[1].splitlines())


def test_suite_seed_changes_output(capsys):
    args = ("suite", "--trials", "3", "--only", "channel_reps.holevo_compose")

    def residuals(seed):
        out = run(capsys, "--seed", seed, *args)[1]
        rows = [json.loads(line) for line in out.splitlines()]
        assert all(r["params"]["seed"] == int(seed) for r in rows)
        return [r["residual"] for r in rows]

    assert residuals("1") != residuals("2")
