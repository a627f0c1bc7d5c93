import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from respkern.cli import build_run_config, label_kernel_vectors, main, read_config, run
from respkern.errors import ConfigError
from respkern.fock import ManyBodyOperator
from respkern.model import solve_ground
from respkern.response import OperatorSet, kernel_by_conditions

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

RUNS = [
    ("kernel", "dimer_density.cfg"),
    ("kernel", "dimer_rdm.cfg"),
    ("kernel", "dimer_file.cfg"),
    ("kernel", "triplet_m0.cfg"),
    ("kernel", "equal_amplitudes.cfg"),
    ("kernel", "ring3_rdm.cfg"),
    ("power-identity", "dimer_rdm.cfg"),
    ("gs-uniqueness", "dimer_rdm.cfg"),
    ("propagate", "dimer_density.cfg"),
    ("propagate", "triplet_quadrupole.cfg"),
    ("verify-hydrogen", "hydrogen.cfg"),
    ("verify-nodal", "nodal.cfg"),
]


@pytest.mark.parametrize("analysis,cfg", RUNS)
def test_shipped_configs_pass(analysis, cfg, tmp_path):
    out = tmp_path / "r.json"
    assert main([analysis, "--config", str(CONFIGS / cfg), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == 1 and doc["analysis"] == analysis and doc["passed"]
    assert all(c["pass"] for c in doc["checks"])


def test_density_kernel_report(tmp_path):
    code, doc = run("kernel", CONFIGS / "dimer_density.cfg", tmp_path / "r.json")
    assert code == 0 and doc["kernel_dim"] == 1
    assert [e["label"] for e in doc["kernel"]] == ["constant"]
    assert doc["cross_check"]["method_agreement_angle"] < 1e-7


def test_rdm_kernel_labels(tmp_path):
    _, doc = run("kernel", CONFIGS / "dimer_rdm.cfg", tmp_path / "r.json")
    labels = [e["label"] for e in doc["kernel"]]
    assert doc["kernel_dim"] == 7 and "unidentified" not in labels
    assert sorted(labels) == sorted(["N̂"] + [f"pair{a}({k})" for k in (0, 1) for a in "XYZ"])
    assert {"Sz", "Sx", "Sy"} <= set(doc["contained"])
    assert all(e["residual_f0"] < 1e-10 for e in doc["kernel"])
    assert all("l_eigenvalue" in e for e in doc["kernel"])


def test_spin_labels_on_triplet_m0(tmp_path):
    _, doc = run("kernel", CONFIGS / "triplet_m0.cfg", tmp_path / "r.json")
    found = {e["label"] for e in doc["kernel"]} | set(doc["contained"])
    assert {"Sz", "Sx", "Sy"} <= found


def test_hydrogen_report(tmp_path):
    _, doc = run("verify-hydrogen", CONFIGS / "hydrogen.cfg", tmp_path / "r.json")
    names = [c["name"] for c in doc["checks"]]
    assert sum(n.startswith("<") and "|2s>" in n and "[" not in n for n in names) == 4
    assert set(doc["hydrogen"]["cases"]) == {"a", "b", "c"}


def test_report_roundtrip_bit_exact(tmp_path):
    out = tmp_path / "r.json"
    _, doc = run("kernel", CONFIGS / "dimer_rdm.cfg", out)
    again = json.loads(out.read_text())
    a = np.array([e["coeffs"] for e in doc["kernel"]])
    b = np.array([e["coeffs"] for e in again["kernel"]])
    assert np.array_equal(a, b)
    assert json.loads(json.dumps(again)) == again


def test_failed_expectation_exit_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text((CONFIGS / "dimer_density.cfg").read_text().replace("expect.kernel_dim = 1", "expect.kernel_dim = 2"))
    assert main(["kernel", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 2


@pytest.mark.parametrize("text", [
    "model.kind = hubbard_chain\nmodel.bogus = 1\n",
    "model.kind = hubbard_chain\noperators.set = everything\n",
    "model.kind = lattice\n",
    "model.kind = hubbard_chain\nmodel.periodic = maybe\n",
    "operators.set = density\n",
    "model.kind = integral_file\nmodel.path = missing.txt\n",
    "model.kind = hubbard_chain\nmodel.sites = 2\nmodel.electrons = 2\noperators.set = custom\n",
])
def test_config_errors_exit_1(text, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(text)
    assert main(["kernel", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 1


def test_missing_config_exit_1(tmp_path):
    assert main(["kernel", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_declared_analysis_mismatch():
    with pytest.raises(ConfigError):
        build_run_config({"analysis.type": "propagate", "model.kind": "hubbard_chain"}, "kernel")


def test_sections_are_prefixes(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("[model]\nkind = hubbard_chain\nu = 2\n[tol]\nnullspace = 1e-9\n")
    flat = read_config(cfg)
    assert flat == {"model.kind": "hubbard_chain", "model.u": "2", "tol.nullspace": "1e-9"}


def test_custom_operator_files(tmp_path):
    (tmp_path / "n1.txt").write_text("NORB 4 NELEC 2\n1 1 0 0 1.0\n2 2 0 0 1.0\n")
    (tmp_path / "n2.txt").write_text("NORB 4 NELEC 2\n3 3 0 0 1.0\n4 4 0 0 1.0\n")
    cfg = tmp_path / "c.cfg"
    cfg.write_text("model.kind = hubbard_chain\nmodel.u = 4\nmodel.electrons = 2\n"
                   "operators.set = custom\noperators.files = n1.txt, n2.txt\nexpect.kernel_dim = 1\n")
    code, doc = run("kernel", cfg, tmp_path / "r.json")
    assert code == 0 and doc["model"]["operator_labels"] == ["n1", "n2"]
    assert [e["label"] for e in doc["kernel"]] == ["N̂"]
    (tmp_path / "w.txt").write_text("NORB 4 NELEC 2\n1 1 2 2 1.0\n")
    cfg.write_text(cfg.read_text().replace("n1.txt, n2.txt", "w.txt"))
    assert main(["kernel", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 1


def test_unidentified_kernel_vector():
    # truncated model: Psi0 is also an eigenstate of Q, an artifact of the tiny basis
    h = np.diag([0.0, 1.0, 2.0])
    q = np.diag([0.0, 1.0, -1.0])
    off = np.zeros((3, 3))
    off[0, 1] = off[1, 0] = 1.0
    ops = OperatorSet([ManyBodyOperator("1", np.eye(3)), ManyBodyOperator("Q", q), ManyBodyOperator("V", off)])
    kern = kernel_by_conditions(ops, solve_ground(h))
    assert kern.dim == 2
    lab = label_kernel_vectors(kern, [("1", np.array([1.0, 0, 0]))])
    assert lab.labels == ["1", "unidentified"]
    assert np.allclose(np.abs(lab.vectors[1]), [0, 1, 0], atol=1e-10)


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "respkern", "kernel", "--config", str(CONFIGS / "dimer_density.cfg"),
                           "--out", str(out), "--seed", "7"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["seed"] == 7
