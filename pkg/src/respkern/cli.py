"""Command-line driver: ``respkern <analysis> --config <path> [--out report.json] [--seed N]``.

The config is flat ``key = value`` text with dotted keys (``model.kind``,
``model.u``, ``operators.set``, ``tol.degeneracy`` ...); ``[section]`` headers
are also accepted and prefix their keys.  Exit codes: 0 success, 2 a check
failed, 1 error.
"""
import argparse
import configparser
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import ConfigError, NonPairedStructureError, NotTwoElectronError, RespKernError
from .fock import ManyBodyOperator, build_one_body
from .model import ModelSpec, build_model, parse_integral_text, solve_ground
from .response import (
    OperatorSet,
    Perturbation,
    ResponseKernelResult,
    kernel_by_chi_nullspace,
    kernel_by_conditions,
    kernel_diagnostics,
    lehmann_convolution,
    power_identity_check,
    static_rdm_change,
    transition_moments,
)
from .symops import (
    SpinLayout,
    number_op,
    one_body_operator_set,
    site_density_ops,
    spin_one_body,
    spin_ops,
    translation_generator,
)

ANALYSES = ("kernel", "power-identity", "propagate", "verify-hydrogen", "verify-nodal", "gs-uniqueness")
OPERATOR_SETS = ("density", "rdm_full", "spin", "spin_quadrupole", "custom")
MODEL_FREE = ("verify-hydrogen", "verify-nodal")
LABEL_OVERLAP = 0.999
SCHEMA = 1


# ---------------------------------------------------------------- config

def _floats(text):
    return [float(x) for x in text.replace(",", " ").split()]


def _complexes(text):
    return [complex(x.replace(" ", "")) for x in text.split(",")]


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config(path) -> dict:
    """Flatten a config file into ``{dotted.key: raw string}``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[__root__]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from None
    flat = {}
    for sec in parser.sections():
        for key, value in parser.items(sec):
            flat[key if sec == "__root__" else f"{sec}.{key}"] = value.strip()
    return flat


@dataclass
class RunConfig:
    analysis: str
    model: Optional[ModelSpec]
    operator_set: str = "density"
    custom_files: list = field(default_factory=list)
    psi0: Optional[list] = None
    psi0_resolve: Optional[str] = None
    tol_deg: float = 1e-8
    tol_null: float = 1e-8
    expect: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = 0
    source: Optional[Path] = None

    def param(self, key, default, conv=float):
        raw = self.params.get(key)
        return default if raw is None else conv(raw)


_MODEL_KEYS = {
    "sites": int, "t": float, "u": float, "periodic": _bool, "electrons": int,
    "levels": lambda s: tuple(_floats(s)), "g": float, "exchange": float, "path": str,
}


def build_run_config(flat: dict, analysis: str, seed: int = 0, source=None) -> RunConfig:
    flat = dict(flat)
    declared = flat.pop("analysis.type", None)
    if declared is not None and declared != analysis:
        raise ConfigError(f"config declares analysis {declared!r} but {analysis!r} was requested")
    if analysis not in ANALYSES:
        raise ConfigError(f"unknown analysis {analysis!r}; choose from {ANALYSES}")
    tol_deg = float(flat.pop("tol.degeneracy", 1e-8))
    tol_null = float(flat.pop("tol.nullspace", 1e-8))

    model = None
    kind = flat.pop("model.kind", None)
    kwargs = {}
    for key, conv in _MODEL_KEYS.items():
        raw = flat.pop(f"model.{key}", None)
        if raw is not None:
            try:
                kwargs[key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"model.{key}: {exc}") from None
    if kind is not None:
        if kwargs.get("path") and source is not None and not Path(kwargs["path"]).is_absolute():
            kwargs["path"] = str(Path(source).parent / kwargs["path"])
        model = ModelSpec(kind, tol_deg=tol_deg, **kwargs)
    elif analysis not in MODEL_FREE:
        raise ConfigError("model.kind is required for this analysis")

    psi0 = flat.pop("model.psi0", None)
    resolve = flat.pop("model.psi0_resolve", None)
    if resolve is not None and resolve.lower() in ("none", ""):
        resolve = None
    if resolve is not None and resolve not in ("Sz", "Sx", "Sy", "S2"):
        raise ConfigError(f"model.psi0_resolve must be Sz, Sx, Sy or S2, got {resolve!r}")
    opset = flat.pop("operators.set", "density")
    if opset not in OPERATOR_SETS:
        raise ConfigError(f"operators.set must be one of {OPERATOR_SETS}, got {opset!r}")
    files = [f.strip() for f in flat.pop("operators.files", "").split(",") if f.strip()]
    if opset == "custom" and not files:
        raise ConfigError("operators.set = custom needs operators.files")
    if source is not None:
        files = [str(Path(source).parent / f) if not Path(f).is_absolute() else f for f in files]
    expect = {k[len("expect."):]: v for k, v in flat.items() if k.startswith("expect.")}
    params = {k: v for k, v in flat.items() if not k.startswith("expect.")}
    unknown = [k for k in params if k.split(".")[0] not in ("power", "propagate", "uniqueness", "kernel", "nodal")]
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return RunConfig(analysis, model, opset, files, _complexes(psi0) if psi0 else None, resolve,
                     tol_deg, tol_null, expect, params, seed, Path(source) if source else None)


# ---------------------------------------------------------------- operator sets

def load_custom_operator(path, space) -> ManyBodyOperator:
    """One-body operator from a file in the integral format (one-electron lines only)."""
    text = Path(path).read_text()
    m, _, core, h, eri = parse_integral_text(text, str(path))
    if np.any(eri != 0) or core != 0:
        raise ConfigError(f"{path}: custom operators must be one-body (r = s = 0 lines only)")
    if m != space.n_orbitals:
        raise ConfigError(f"{path}: NORB {m} differs from model orbital count {space.n_orbitals}")
    return build_one_body(space, h, Path(path).stem)


def make_operator_set(cfg: RunConfig, H) -> OperatorSet:
    space = H.space
    if cfg.operator_set == "density":
        return site_density_ops(space)
    if cfg.operator_set == "rdm_full":
        return one_body_operator_set(space)
    if cfg.operator_set in ("spin", "spin_quadrupole"):
        sp = spin_ops(space)
        ops = [number_op(space)] + [sp[a] for a in ("Sx", "Sy", "Sz")]
        if cfg.operator_set == "spin_quadrupole":
            ops += [ManyBodyOperator(f"{a}^2", sp[a].matrix @ sp[a].matrix, space=space) for a in ("Sx", "Sy", "Sz")]
        return OperatorSet(ops)
    return OperatorSet([load_custom_operator(p, space) for p in cfg.custom_files])


def _resolve_op(name, space):
    if name == "S2":
        sp = spin_ops(space)
        return sum(sp[a].matrix @ sp[a].matrix for a in ("Sx", "Sy", "Sz"))
    return spin_ops(space)[name].matrix


def solve(cfg: RunConfig, H):
    resolve = _resolve_op(cfg.psi0_resolve, H.space) if cfg.psi0_resolve else None
    return solve_ground(H, tol_deg=cfg.tol_deg, psi0=cfg.psi0, resolve=resolve)


def known_vectors(cfg: RunConfig, opset: OperatorSet, H, gs) -> list:
    """Named reference directions in the weight space of ``opset``, in labeling priority."""
    space = H.space
    if cfg.operator_set == "density":
        return [("constant", np.ones(len(opset)))]
    if any(op.one_body is None for op in opset):
        return [(lab, row) for lab, row in zip(opset.labels, np.eye(len(opset)))]
    cand = [("N̂", np.eye(space.n_orbitals))]
    if space.n_particles == 2:
        from .rdm import build_pair_kernel_ops, two_electron_expansion

        try:
            exp = two_electron_expansion(gs.psi0, space)
            cand += [(op.label, op.u) for op in build_pair_kernel_ops(exp)]
        except (NonPairedStructureError, NotTwoElectronError, RuntimeError):
            pass
    if cfg.model is not None and cfg.model.kind == "hubbard_chain" and cfg.model.periodic and cfg.model.sites > 2:
        cand.append(("P", translation_generator(space).one_body))
    if space.n_orbitals % 2 == 0:
        sob = spin_one_body(SpinLayout.for_orbitals(space.n_orbitals))
        cand += [(a, sob[a]) for a in ("Sz", "Sx", "Sy")]
    out = []
    for lab, u in cand:
        w, res = opset.coefficients_of(u)
        if res < 1e-8 * max(1.0, np.linalg.norm(u)):
            out.append((lab, w))
    return out


@dataclass
class LabeledKernel:
    vectors: np.ndarray  # orthonormal rows spanning the kernel
    labels: list
    contained: list  # known directions lying in the kernel but not given their own row


def label_kernel_vectors(kernel: ResponseKernelResult, known: list) -> LabeledKernel:
    """Rotate the kernel basis onto known directions where possible.

    Known vectors are visited in order; one whose projection onto the still
    unlabeled part of the kernel has norm > 0.999 claims that direction.  A
    known vector already inside the kernel span but no longer separable is
    listed as contained.  Leftover directions are kept as "unidentified".
    """
    rest = kernel.basis.copy()  # rows
    vecs, labels, contained = [], [], []
    for lab, w in known:
        w = np.asarray(w, dtype=float)
        nw = np.linalg.norm(w)
        if nw == 0:
            continue
        w = w / nw
        p = rest.T @ (rest @ w) if rest.shape[0] else np.zeros_like(w)
        if np.linalg.norm(p) > LABEL_OVERLAP:
            d = p / np.linalg.norm(p)
            vecs.append(d)
            labels.append(lab)
            proj = rest - np.outer(rest @ d, d)
            u, s, vt = np.linalg.svd(proj, full_matrices=False)
            rest = vt[s > 0.5]
        elif kernel.dim and np.linalg.norm(kernel.basis @ w) > LABEL_OVERLAP:
            contained.append(lab)
    for row in rest:
        vecs.append(row)
        labels.append("unidentified")
    basis = np.array(vecs) if vecs else np.zeros((0, kernel.basis.shape[1]))
    return LabeledKernel(basis, labels, contained)


# ---------------------------------------------------------------- reports

class Report:
    def __init__(self, analysis: str, seed: int):
        self.doc = {"schema": SCHEMA, "analysis": analysis, "version": __version__, "seed": seed,
                    "model": None, "kernel": [], "cross_check": {}, "checks": [], "timings": {}}
        self._t = time.perf_counter()

    def lap(self, name):
        now = time.perf_counter()
        self.doc["timings"][name] = round(now - self._t, 6)
        self._t = now

    def check(self, name, value, expected, tol, passed=None):
        if passed is None:
            passed = bool(abs(np.asarray(value) - np.asarray(expected)).max() <= tol)
        self.doc["checks"].append({"name": name, "value": _jsonable(value), "expected": _jsonable(expected),
                                   "tol": tol, "pass": bool(passed)})
        return passed

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.doc["checks"])


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def kernel_entries(labeled: LabeledKernel, opset: OperatorSet, gs, commutators=None) -> list:
    out = []
    for lab, w in zip(labeled.labels, labeled.vectors):
        d = kernel_diagnostics(opset, gs, w, commutators)
        entry = {"coeffs": [float(c) for c in w], "label": lab,
                 "residual_f0": d.residual_f0, "residual_comm": d.residual_comm}
        if d.eigen_residual is not None and d.eigen_residual < 1e-8:
            entry["l_eigenvalue"] = d.eigenvalue
        out.append(entry)
    return out


def model_section(cfg: RunConfig, H, gs, opset) -> dict:
    spec = asdict(cfg.model) if cfg.model else None
    return {"spec": _jsonable(spec), "label": H.label, "dim": int(H.matrix.shape[0]), "E0": gs.e0,
            "D": gs.D, "operator_set": cfg.operator_set, "operator_labels": opset.labels}


# ---------------------------------------------------------------- analyses

def _setup(cfg, rep):
    H = build_model(cfg.model)
    gs = solve(cfg, H)
    opset = make_operator_set(cfg, H)
    rep.doc["model"] = model_section(cfg, H, gs, opset)
    rep.lap("setup")
    return H, gs, opset


def _kernels(cfg, opset, gs, rep):
    kern = kernel_by_conditions(opset, gs, cfg.tol_null)
    s_samples = _floats(cfg.params.get("kernel.s_samples", "0.5 1 2 4"))
    kchi = kernel_by_chi_nullspace(transition_moments(opset, gs), s_samples, cfg.tol_null)
    angle = kern.angle_to(kchi)
    rep.doc["cross_check"] = {"method_agreement_angle": angle, "conditions_dim": kern.dim,
                              "chi_nullspace_dim": kchi.dim, "s_samples": s_samples}
    rep.check("method_agreement", angle, 0.0, 1e-7, kern.dim == kchi.dim and angle < 1e-7)
    return kern


def run_kernel(cfg: RunConfig, rep: Report):
    H, gs, opset = _setup(cfg, rep)
    kern = _kernels(cfg, opset, gs, rep)
    rep.lap("kernel")
    labeled = label_kernel_vectors(kern, known_vectors(cfg, opset, H, gs))
    entries = kernel_entries(labeled, opset, gs)
    rep.doc["kernel"] = entries
    rep.doc["kernel_dim"] = kern.dim
    rep.doc["contained"] = labeled.contained
    if entries:
        rep.check("residual_f0", max(e["residual_f0"] for e in entries), 0.0, 1e-10)
        if gs.D > 1:
            rep.check("residual_comm", max(e["residual_comm"] for e in entries), 0.0, 1e-10)
    if "kernel_dim" in cfg.expect:
        rep.check("kernel_dim", kern.dim, int(cfg.expect["kernel_dim"]), 0)
    if "labels" in cfg.expect:
        want = sorted(x.strip() for x in cfg.expect["labels"].split(","))
        got = sorted(set(labeled.labels) | set(labeled.contained))
        rep.check("labels", got, want, 0, all(w in got for w in want))
    rep.lap("labeling")


def _random_weights(rng, n, count):
    w = rng.standard_normal((count, n))
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def run_power_identity(cfg: RunConfig, rep: Report):
    H, gs, opset = _setup(cfg, rep)
    tm = transition_moments(opset, gs)
    rng = np.random.default_rng(cfg.seed)
    n_w = cfg.param("power.n_weights", 20, int)
    s_vals = _floats(cfg.params.get("power.s", "0.5 1 2"))
    profile = cfg.params.get("power.profile", "exponential")
    rate = cfg.param("power.rate", 1.0)
    worst, rhs_max = 0.0, -np.inf
    for w in _random_weights(rng, len(opset), n_w):
        pert = Perturbation(w, profile, rate)
        for s in s_vals:
            r = power_identity_check(tm, pert, s)
            worst = max(worst, r.residual)
            rhs_max = max(rhs_max, r.rhs)
    rep.check("max_abs_lhs_minus_rhs", worst, 0.0, 1e-10)
    rep.check("max_rhs", rhs_max, 0.0, 0.0, rhs_max <= 0.0)
    kern = kernel_by_conditions(opset, gs, cfg.tol_null)
    k_rhs = max((abs(power_identity_check(tm, Perturbation(w, profile, rate), s).rhs)
                 for w in kern.basis for s in s_vals), default=0.0)
    rep.check("kernel_rhs_zero", k_rhs, 0.0, 0.0, k_rhs == 0.0)
    rep.doc["kernel_dim"] = kern.dim
    rep.doc["kernel"] = kernel_entries(LabeledKernel(kern.basis, ["kernel"] * kern.dim, []), opset, gs)
    rep.lap("power_identity")


def _nonkernel_direction(kern, n, seed):
    """Random unit weight vector orthogonal to the kernel, or None if the kernel is everything."""
    if kern.dim >= n:
        return None
    w = np.random.default_rng(seed).standard_normal(n)
    if kern.dim:
        w -= kern.basis.T @ (kern.basis @ w)
    return w / np.linalg.norm(w)


def run_propagate(cfg: RunConfig, rep: Report):
    from .propagate import epsilon_scaling, evolve_linear_response

    H, gs, opset = _setup(cfg, rep)
    t_grid = np.linspace(0.0, cfg.param("propagate.t_max", 10.0), cfg.param("propagate.n_times", 101, int))
    eps_k = cfg.param("propagate.epsilon_kernel", 1e-3)
    eps_n = cfg.param("propagate.epsilon", 1e-4)
    profile = cfg.params.get("propagate.profile", "exponential")
    rate = cfg.param("propagate.rate", 1.0)
    dt = cfg.params.get("propagate.dt")
    dt = float(dt) if dt else None
    kern = kernel_by_conditions(opset, gs, cfg.tol_null)
    rep.doc["kernel_dim"] = kern.dim
    rows = []
    for n, w in enumerate(kern.basis):
        sc = epsilon_scaling(H, gs, Perturbation(w, profile, rate), opset, t_grid, eps_k, dt)
        rows.append({"index": n, "max_dq": sc.maxima[0], "max_dq_half": sc.maxima[1], "ratio": sc.ratio})
        rep.check(f"kernel[{n}].max_dq", sc.maxima[0], 0.0, 1e-5)
        if sc.maxima[0] > 1e-11:  # above round-off: the leading term must be quadratic
            rep.check(f"kernel[{n}].eps_ratio", sc.ratio, 4.0, 0.5)
    rep.doc["kernel_propagation"] = rows
    rep.lap("kernel_propagation")

    w = _nonkernel_direction(kern, len(opset), cfg.seed)
    if w is None:
        rep.doc["nonkernel"] = {"note": "kernel spans the whole operator set"}
        return
    pert = Perturbation(w, profile, rate)
    traj = evolve_linear_response(H, gs, pert, opset, t_grid, eps_n, dt)
    conv = lehmann_convolution(transition_moments(opset, gs), pert, t_grid)
    err = float(np.max(np.abs(traj.delta_q / eps_n - conv)))
    rep.doc["nonkernel"] = {"weights": w.tolist(), "epsilon": eps_n, "dt": traj.dt,
                            "max_response": float(np.max(np.abs(conv))), "norm_drift": traj.norm_drift}
    rep.check("nonkernel_vs_lehmann", err, 0.0, 1e-4)
    rep.lap("nonkernel_propagation")


def run_gs_uniqueness(cfg: RunConfig, rep: Report):
    H, gs, opset = _setup(cfg, rep)
    eps = cfg.param("uniqueness.epsilon", 1e-3)
    kern = kernel_by_conditions(opset, gs, cfg.tol_null)
    rep.doc["kernel_dim"] = kern.dim
    rep.doc["kernel"] = kernel_entries(label_kernel_vectors(kern, known_vectors(cfg, opset, H, gs)), opset, gs)
    changes = []
    for n, e in enumerate(rep.doc["kernel"]):
        d = static_rdm_change(H, gs, opset, np.array(e["coeffs"]), eps)
        changes.append(d)
        rep.check(f"kernel[{n}].delta_gamma", d, 0.0, 1e-9)
    w = _nonkernel_direction(kern, len(opset), cfg.seed)
    if w is None:
        rep.doc["nonkernel"] = {"note": "kernel spans the whole operator set"}
        return
    sweep = [eps, eps / 2, eps / 4]
    dn = [static_rdm_change(H, gs, opset, w, e) for e in sweep]
    ratios = [dn[0] / dn[1], dn[1] / dn[2]]
    rep.doc["nonkernel"] = {"weights": w.tolist(), "epsilons": sweep, "delta_gamma": dn, "ratios": ratios}
    rep.check("nonkernel_nonzero", dn[0], 1e-6 * eps, 0.0, dn[0] > 1e-6 * eps)
    rep.check("nonkernel_linear_ratio", ratios, [2.0, 2.0], 0.1)
    rep.lap("uniqueness")


def run_verify_hydrogen(cfg: RunConfig, rep: Report):
    from .demos.hydrogen import EXACT, EXACT_COMMUTATOR, hydrogen_example_kernels, matrix_element

    rep.doc["model"] = {"label": "hydrogen n=2 toy space", "basis": ["2s", "2p_x", "2p_y", "3p_x"]}
    elements = {}
    for (op, bra, ket), exact in EXACT.items():
        val = matrix_element(op, bra, ket)
        elements[f"<{bra}|{op}|{ket}>"] = val
        rep.check(f"<{bra}|{op}|{ket}>", val, exact, 1e-8)
    cases = hydrogen_example_kernels()
    rep.check("<2s|[x,i∂x³]|2s>", cases.commutator, EXACT_COMMUTATOR, 1e-8)
    rep.lap("elements")
    y_only = np.zeros((2, 3))
    y_only[0, 0] = y_only[1, 2] = 1.0
    ref_c = np.zeros((2, 4))
    ref_c[0, 0] = ref_c[1, 2] = 1.0
    rep.check("case_a.kernel_dim", cases.a.dim, 3, 0)
    rep.check("case_a.max_chi", cases.chi_max_a, 0.0, 1e-12)
    rep.check("case_b.kernel_dim", cases.b.dim, 2, 0)
    rep.check("case_b.span_1_y", _angle(cases.b.basis, y_only), 0.0, 1e-7)
    rep.check("case_c.kernel_dim", cases.c.dim, 2, 0)
    rep.check("case_c.span_1_y", _angle(cases.c.basis, ref_c), 0.0, 1e-7)
    rep.check("case_c.f0_candidates", cases.c_candidates_f0, 4, 0)
    rep.check("case_c.excluded", sorted(cases.c_exclusions), ["i∂x³", "x"], 0,
              sorted(cases.c_exclusions) == ["i∂x³", "x"])
    rep.check("case_c.exclusion_residual", max(cases.c_exclusions.values()), 0.25, 1e-8)
    rep.doc["hydrogen"] = {
        "elements": _jsonable(elements),
        "commutator_unprojected": _jsonable(cases.commutator),
        "commutator_projected": _jsonable(cases.commutator_projected),
        "cases": {k: {"dim": r.dim, "basis": r.basis.tolist(), "labels": r.labels}
                  for k, r in zip("abc", cases)},
        "case_c_exclusions": cases.c_exclusions,
    }
    rep.doc["kernel"] = [{"coeffs": row.tolist(), "label": lab, "residual_f0": d.residual_f0,
                          "residual_comm": d.residual_comm}
                         for row, lab, d in zip(cases.c.basis, ("1", "y"), cases.c.diagnostics)]
    rep.lap("kernels")


def _angle(a, b):
    from .response import subspace_angle

    return subspace_angle(a, b)


def run_verify_nodal(cfg: RunConfig, rep: Report):
    from .demos.nodal import nodal_demo

    demo = nodal_demo(cfg.param("nodal.refinements", 4, int))
    rep.doc["model"] = {"label": "Psi0 ~ x exp(-r^2/2), PsiK ~ y exp(-r^2/2) on [-6,6]^2"}
    tables = {"divergent": demo.divergent, "control_same": demo.control_same, "control_far": demo.control_far}
    rep.doc["nodal"] = {k: asdict(t) for k, t in tables.items()}
    r = demo.divergent.ratios
    rep.check("divergent.min_ratio", min(r), 1.5, 0.0, demo.divergent.diverges(1.5))
    rep.check("control_same.converges", demo.control_same.integrals[-1], demo.control_same.integrals[-2],
              1e-2 * abs(demo.control_same.integrals[-1]), demo.control_same.converges())
    rep.check("control_far.converges", demo.control_far.integrals[-1], demo.control_far.integrals[-2],
              1e-2 * abs(demo.control_far.integrals[-1]), demo.control_far.converges())
    rep.lap("nodal")


RUNNERS = {
    "kernel": run_kernel,
    "power-identity": run_power_identity,
    "propagate": run_propagate,
    "verify-hydrogen": run_verify_hydrogen,
    "verify-nodal": run_verify_nodal,
    "gs-uniqueness": run_gs_uniqueness,
}


def run(analysis: str, config_path, out=None, seed: int = 0) -> tuple:
    """Execute one analysis; returns ``(exit_code, report_dict)``."""
    cfg = build_run_config(read_config(config_path), analysis, seed, source=config_path)
    rep = Report(analysis, seed)
    RUNNERS[analysis](cfg, rep)
    rep.doc["passed"] = rep.passed
    text = json.dumps(_jsonable(rep.doc), indent=2, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)
    return (0 if rep.passed else 2), rep.doc


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="respkern", description=__doc__.splitlines()[0])
    ap.add_argument("analysis", choices=ANALYSES)
    ap.add_argument("--config", required=True, help="key = value config file")
    ap.add_argument("--out", help="write the JSON report here (default: stdout)")
    ap.add_argument("--seed", type=int, default=0, help="seed for random directions")
    args = ap.parse_args(argv)
    try:
        code, doc = run(args.analysis, args.config, args.out, args.seed)
    except (RespKernError, OSError, KeyError, np.linalg.LinAlgError) as exc:
        print(f"respkern: error: {exc}", file=sys.stderr)
        return 1
    failed = [c["name"] for c in doc["checks"] if not c["pass"]]
    if failed:
        print(f"respkern: {len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
