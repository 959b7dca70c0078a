"""``ridgelab`` command-line front end.

Every subcommand resolves a configuration (defaults < ``--config`` file <
command-line flags), runs one experiment and emits a JSON report that embeds
the resolved config and the tool version. Exit codes: 0 pass, 1 check
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from .deepexact import deep_exact_report
from .errors import ConfigError, InputError, RidgelabError
from .fields import Grid, SampledField, param_grid
from .groups import cyclic_gset, random_affine
from .invariants import (AFFINE_ACTIONS, BROKEN_AFFINE_ACTIONS, InvariantFeature, affine_feature,
                         check_joint_invariance, load_profile_csv, profile)
from .spectrum import spectral_pairing
from .targets import target_field
from .transforms import intertwining_check, nn_apply, reconstruct, synthesize_network
from .voice import WaveletParams, wavelet_reconstruction_error

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# building blocks from a resolved config


def _profile(cfg: dict, which: str):
    path = cfg["feature"][f"{which}_csv"]
    return load_profile_csv(path) if path else profile(cfg["feature"][which])


def _x_grid(q: dict, m: int) -> Grid:
    lo, hi = q["x_range"]
    return Grid.cube(lo, hi, q["x_points"], m)


def _xi_grid(q: dict, m: int) -> Grid:
    (alo, ahi), (blo, bhi) = q["a_range"], q["b_range"]
    return param_grid([(alo, ahi, q["a_points"])] * m, (blo, bhi, q["b_points"]))


def _target(cfg: dict, grid: Grid) -> SampledField:
    path = cfg["target"]["csv"]
    if path:
        f = SampledField.from_csv(path)
        if f.m != cfg["group"]["m"]:
            raise InputError(f"target CSV is {f.m}-dimensional but group.m = {cfg['group']['m']}")
        return f
    return target_field(cfg["target"]["name"], grid)


def _cplx(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


# ---------------------------------------------------------------------------
# commands; each returns (passed, result dict, extra files {name: text})


def cmd_invariance(cfg: dict):
    kind = cfg["group"]["kind"]
    inv = cfg["invariance"]
    tol = cfg["tolerances"]["invariance"]
    rng = np.random.default_rng(cfg["experiment"]["seed"])
    if kind == "cyclic":
        n = cfg["group"]["n"]
        psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        phi = InvariantFeature(cfg["feature"]["pairing"] if cfg["feature"]["pairing"] != "affine_theta"
                               else "group_compose", psi=psi, gset=cyclic_gset(n))
        rep = check_joint_invariance(phi, tol=tol)
    else:
        phi = affine_feature(_profile(cfg, "sigma"), cfg["group"]["m"])
        actions = BROKEN_AFFINE_ACTIONS if inv["actions"] == "broken" else AFFINE_ACTIONS
        if inv["actions"] not in ("default", "broken"):
            raise ConfigError("invariance.actions must be 'default' or 'broken'")
        rep = check_joint_invariance(phi, actions, n_samples=inv["n_samples"], tol=tol, rng=rng)
    return rep.passed, rep.to_dict(), {}


def cmd_reconstruct(cfg: dict):
    m = cfg["group"]["m"]
    q = cfg["quadrature"]
    f = _target(cfg, _x_grid(q, m))
    out, rep = reconstruct(f, _profile(cfg, "sigma"), _profile(cfg, "rho"), None, _xi_grid(q, m))
    c = rep.c_theory if rep.c_theory is not None else rep.c_est
    res = rep.to_dict()
    res["tol"] = cfg["tolerances"]["reconstruct"]
    passed = rep.rel_l2_error <= res["tol"]
    lines = [",".join([f"x{k + 1}" for k in range(m)] + ["f_re", "f_im", "recon_re", "recon_im"])]
    for p, fv, rv in zip(f.grid.points, f.flat.astype(complex), out.flat / c):
        lines.append(",".join([repr(float(v)) for v in p]
                              + [repr(fv.real), repr(fv.imag), repr(float(rv.real)), repr(float(rv.imag))]))
    return passed, res, {"reconstruct.csv": "\n".join(lines) + "\n"}


def cmd_synth(cfg: dict):
    m = cfg["group"]["m"]
    s = cfg["synth"]
    f = _target(cfg, _x_grid(cfg["quadrature"], m))
    sigma, rho = _profile(cfg, "sigma"), _profile(cfg, "rho")
    atoms = synthesize_network(f, rho, sigma, (s["a_box"], s["b_box"]), s["width"], s["scheme"],
                               cfg["experiment"]["seed"], convention=cfg["feature"]["convention"])
    lo, hi = s["eval_range"]
    n = s["eval_points"]
    pts = np.linspace(lo, hi, n)
    X = np.stack(np.meshgrid(*([pts] * m), indexing="ij"), axis=-1).reshape(-1, m)
    if f.evaluator is None:
        raise InputError("synth needs a built-in target (closed form) for the error evaluation")
    truth = np.asarray(f.evaluator(X))
    approx = nn_apply(atoms, affine_feature(sigma, m), X)
    err = float(np.linalg.norm(approx - truth) / np.linalg.norm(truth))
    tol = cfg["tolerances"]["synth"]
    res = {"width": atoms.width, "scheme": s["scheme"], "rel_l2_error": err, "tol": tol,
           "eval_grid": {"lo": lo, "hi": hi, "n": n}}
    return err <= tol, res, {"atoms.json": atoms.to_json()}


def cmd_bilinear(cfg: dict):
    m = cfg["group"]["m"]
    q = cfg["quadrature"]
    res = spectral_pairing(_profile(cfg, "sigma"), _profile(cfg, "rho"), m, cfg["feature"]["convention"],
                           omega_max=q["omega_max"], n_points=q["omega_points"])
    out = res.to_dict()
    out.update({"convention": res.convention, "m": m, "sigma": cfg["feature"]["sigma"], "rho": cfg["feature"]["rho"]})
    return True, out, {}


def cmd_deep_exact(cfg: dict):
    rep = deep_exact_report(cfg["group"]["n"], cfg["feature"]["psi"], cfg["experiment"]["seed"])
    tol = cfg["tolerances"]["deep_exact"]
    rep["tol"] = tol
    passed = rep["max_deviation"] <= tol and rep["dft_match"] and rep["commutator"] <= tol
    return passed, rep, {}


def cmd_wavelet(cfg: dict):
    w = cfg["wavelet"]
    params = WaveletParams(w["a_min"], w["a_max"], w["scales"], w["b_range"][0], w["b_range"][1], w["b_points"])
    grid = Grid(((w["x_range"][0], w["x_range"][1], w["x_points"]),))
    f = _target(cfg, grid)
    err, _, W = wavelet_reconstruction_error(f, profile(w["psi"]), params)
    tol = cfg["tolerances"]["wavelet"]
    res = {"rel_l2_error": err, "tol": tol, "psi": w["psi"], "n_scales": params.n_scales,
           "n_b": params.n_b, "warnings": W.warnings}
    return err <= tol, res, {"wavelet.csv": W.to_csv()}


def cmd_intertwine(cfg: dict):
    m = cfg["group"]["m"]
    q = cfg["quadrature"]
    it = cfg["intertwine"]
    f = _target(cfg, _x_grid(q, m))
    xi = _xi_grid(q, m)
    rng = np.random.default_rng(cfg["experiment"]["seed"])
    rows = []
    for _ in range(it["n_elements"]):
        g = random_affine(rng, m)
        r = intertwining_check(g, f, _profile(cfg, "rho"), _profile(cfg, "sigma"), xi_grid=xi,
                               normalized=it["normalized"], transport=it["transport"])
        rows.append(r.to_dict())
    worst = max((r["max_dev"] for r in rows), default=0.0)
    tol = cfg["tolerances"]["intertwine"]
    return worst <= tol, {"max_dev": worst, "tol": tol, "elements": rows}, {}


COMMANDS = {
    "invariance": cmd_invariance,
    "reconstruct": cmd_reconstruct,
    "synth": cmd_synth,
    "bilinear": cmd_bilinear,
    "deep-exact": cmd_deep_exact,
    "wavelet": cmd_wavelet,
    "intertwine": cmd_intertwine,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="TOML or JSON experiment file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output directory (for wavelet a path ending in .csv names the CSV itself)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the machine-readable report to stdout")
    common.add_argument("--no-timing", action="store_true", default=argparse.SUPPRESS,
                        help="write null runtimes so repeated runs are byte-identical")

    parser = _Parser(prog="ridgelab", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"ridgelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    p = add("invariance", "joint-invariance check of a feature")
    p.add_argument("--m", type=int)
    p.add_argument("--sigma")
    p.add_argument("--actions", choices=["default", "broken"])
    p.add_argument("--samples", type=int)

    for name, help_ in (("reconstruct", "S o R reconstruction of a target"),
                        ("synth", "finite-width network synthesis"),
                        ("intertwine", "intertwining identities for random group elements")):
        p = add(name, help_)
        p.add_argument("--m", type=int)
        p.add_argument("--sigma")
        p.add_argument("--rho")
        p.add_argument("--target")
        if name == "synth":
            p.add_argument("--width", type=int)
            p.add_argument("--scheme", choices=["grid_topk", "importance_mc"])

    p = add("bilinear", "spectral pairing <<sigma, rho>>")
    p.add_argument("--m", type=int)
    p.add_argument("--sigma")
    p.add_argument("--rho")
    p.add_argument("--convention", choices=["thm1", "appendixA"])

    p = add("deep-exact", "deep ridgelet scalars on Z_n")
    p.add_argument("--n", type=int)
    p.add_argument("--psi", choices=["delta0", "ones", "random"])

    p = add("wavelet", "continuous wavelet transform and Calderon inversion")
    p.add_argument("--target")
    p.add_argument("--psi")
    p.add_argument("--scales", type=int)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    o: dict = {}

    def put(section, key, value):
        if value is not None:
            o.setdefault(section, {})[key] = value

    get = lambda k: getattr(args, k, None)  # noqa: E731
    put("experiment", "seed", get("seed"))
    put("group", "m", get("m"))
    put("feature", "sigma", get("sigma"))
    put("feature", "rho", get("rho"))
    put("feature", "convention", get("convention"))
    put("target", "name", get("target"))
    put("invariance", "actions", get("actions"))
    put("invariance", "n_samples", get("samples"))
    put("synth", "width", get("width"))
    put("synth", "scheme", get("scheme"))
    put("group", "n", get("n"))
    if args.command == "deep-exact":
        put("group", "kind", "cyclic")
        put("feature", "psi", get("psi"))
    if args.command == "wavelet":
        put("wavelet", "psi", get("psi"))
        put("wavelet", "scales", get("scales"))
    return o


def _write_outputs(out: str, command: str, report_text: str, files: dict) -> None:
    target = Path(out)
    if command == "wavelet" and target.suffix.lower() == ".csv":
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(files.get("wavelet.csv", ""))
        target.with_suffix(".json").write_text(report_text)
        return
    target.mkdir(parents=True, exist_ok=True)
    (target / f"{command}.json").write_text(report_text)
    for name, text in files.items():
        (target / name).write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    timing = not getattr(args, "no_timing", False)
    t0 = time.perf_counter()
    try:
        cfg = cfgmod.resolve(cfgmod.load(getattr(args, "config", None)), _overrides(args))
    except ConfigError as exc:
        print(f"ridgelab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = {"command": args.command, "version": __version__, "config": cfg}
    files: dict = {}
    try:
        passed, result, files = COMMANDS[args.command](cfg)
        code = EXIT_PASS if passed else EXIT_FAIL
        report.update({"pass": bool(passed), "result": result})
    except ConfigError as exc:
        print(f"ridgelab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RidgelabError as exc:
        code = EXIT_FAIL
        report.update({"pass": False, "error": {"type": type(exc).__name__, "message": str(exc)}})
    if not timing and isinstance(report.get("result"), dict) and "runtime_s" in report["result"]:
        report["result"]["runtime_s"] = None
    report["runtime_s"] = round(time.perf_counter() - t0, 6) if timing else None
    text = json.dumps(report, indent=2) + "\n"

    out = getattr(args, "out", None) or cfg["experiment"]["output_dir"]
    if out:
        _write_outputs(out, args.command, text, files)
    if getattr(args, "json", False):
        sys.stdout.write(text)
    else:
        status = "PASS" if report.get("pass") else "FAIL"
        detail = report.get("error", {}).get("message") or _summary(args.command, report.get("result", {}))
        print(f"{args.command}: {status}  {detail}")
    return code


def _summary(command: str, res: dict) -> str:
    keys = ("rel_l2_error", "max_rel_dev", "max_dev", "max_deviation", "value", "lambdas")
    parts = [f"{k}={res[k]}" for k in keys if k in res]
    return " ".join(parts)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
