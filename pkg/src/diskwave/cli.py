"""Command-line interface: subcommand dispatch and run-manifest plumbing.

Every stage reads an optional key=value config file (or a previous run's
manifest), writes its data files plus a ``manifest.json`` into ``--out``,
and exits 0 on success.  Error families map to fixed exit codes: bad
input/config 2, numerical failure 3, resonant normal-form point 4.  Data
files (tables, frames, reports) are byte-deterministic; wall-clock
timings appear only in the manifest.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import manifest as man
from .errors import DiskwaveError, ConfigError, NumericalError
from .model import ModelParams, steady_state

__all__ = ["main"]

_CHAR_RESIDUAL_MAX = 1e-10


def _jsonable(obj):
    """Recursively convert numpy/complex values for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_stage_config(schema, path: str | None):
    raw = cfgmod.load_raw_config(path) if path else {}
    return cfgmod.coerce(schema, raw), raw


def _model_record(p: ModelParams) -> dict:
    rec = dataclasses.asdict(p)
    ss = steady_state(p)
    rec["u_star"] = ss.u_star
    rec["v_star"] = ss.v_star
    return rec


# --------------------------------------------------------------------------
# stages


def _cmd_spectrum(args) -> int:
    cfg, raw = _load_stage_config(cfgmod.SpectrumConfig, args.config)
    out = _out_dir(args)
    timer = man.StageTimer()

    timer.start("compute")
    from .spectrum import mode_table
    modes = mode_table(cfg.R, cfg.n_max, cfg.m_max,
                       include_constant=cfg.include_constant)
    timer.start("write")
    rows = [(md.n, md.m, md.beta, md.lam) for md in modes]
    table = out / "modes.tsv"
    table.write_text(man.format_table(["n", "m", "beta", "lambda"], rows))
    timer.stop()

    man.write_manifest(
        out / "manifest.json", command="spectrum", config=raw,
        parameters={"R": cfg.R},
        tolerances={"radial_zero": "bracketed bisection + brentq polish, "
                                   "machine precision"},
        truncation={"n_max": cfg.n_max, "m_max": cfg.m_max},
        timings=timer.seconds, outputs=[table])
    return 0


def _cmd_hopf_curves(args) -> int:
    cfg, raw = _load_stage_config(cfgmod.HopfCurvesConfig, args.config)
    out = _out_dir(args)
    p = cfgmod.model_from(cfg)
    timer = man.StageTimer()

    timer.start("compute")
    from .linstab import scan_hopf_curves, char_coeffs, char_value
    chis = np.linspace(cfg.chi_min, cfg.chi_max, cfg.chi_count)
    points, truncation = scan_hopf_curves(
        p, chis, k_max=cfg.k_max, lam_cap_factor=cfg.lam_cap_factor)

    timer.start("verify")
    worst = 0.0
    for q in points:
        cc = char_coeffs(p.with_(chi=q.chi), q.lam)
        worst = max(worst, abs(char_value(1j * q.omega, cc, q.tau)))
    if worst > _CHAR_RESIDUAL_MAX:
        raise NumericalError(
            f"characteristic residual {worst:.3e} exceeds "
            f"{_CHAR_RESIDUAL_MAX:g} on the emitted curve points")

    timer.start("write")
    rows = [(q.chi, q.n, q.m, q.k, q.omega, q.tau, q.d_gamma.real)
            for q in points]
    table = out / "curves.tsv"
    table.write_text(man.format_table(
        ["chi", "n", "m", "k", "omega_star", "tau_c", "transversality"],
        rows))
    timer.stop()

    man.write_manifest(
        out / "manifest.json", command="hopf-curves", config=raw,
        parameters=_model_record(p),
        tolerances={"char_residual_max": _CHAR_RESIDUAL_MAX,
                    "worst_char_residual": worst},
        truncation=truncation, timings=timer.seconds, outputs=[table])
    return 0


def _cmd_normal_form(args) -> int:
    cfg, raw = _load_stage_config(cfgmod.NormalFormConfig, args.config)
    out = _out_dir(args)
    p = cfgmod.model_from(cfg)
    timer = man.StageTimer()

    timer.start("compute")
    from .normalform import normal_form, NormalFormOptions
    options = NormalFormOptions(family_size=cfg.family_size,
                                radial_nodes=cfg.radial_nodes)
    results = [normal_form(p, cfg.n, cfg.m, branch=branch, k=cfg.k,
                           options=options)
               for branch in cfg.branches]

    timer.start("write")
    rows = [(r.n, r.m, r.k, r.branch, r.g21.real, r.g21.imag,
             r.tau_prime, r.rho_prime, r.supercritical)
            for r in results]
    table = out / "normal-form.tsv"
    table.write_text(man.format_table(
        ["n", "m", "k", "branch", "re_g21", "im_g21", "tau_prime",
         "rho_prime", "supercritical"], rows))
    timer.stop()

    diagnostics = {r.branch: _jsonable(dict(
        r.residuals, omega=r.omega, tau_c=r.tau_c,
        d_gamma={"re": r.d_gamma.real, "im": r.d_gamma.imag}))
        for r in results}
    man.write_manifest(
        out / "manifest.json", command="normal-form", config=raw,
        parameters=_model_record(p),
        tolerances={"kernel_residual_tol": options.kernel_residual_tol,
                    "resonance_cond_max": options.resonance_cond_max},
        truncation={"family_size": options.family_size,
                    "radial_nodes": options.radial_nodes},
        timings=timer.seconds, outputs=[table],
        extra={"diagnostics": diagnostics})
    return 0


def _cmd_simulate(args) -> int:
    cfg, raw = _load_stage_config(cfgmod.SimulateConfig, args.config)
    out = _out_dir(args)
    p = cfgmod.model_from(cfg)
    timer = man.StageTimer()

    timer.start("setup")
    from .simulate import PolarGrid, SimOptions, run_simulation
    from .seeds import make_history
    grid = PolarGrid(cfg.n_r, cfg.n_theta, cfg.R)
    opts = SimOptions(dt=cfg.dt, t_end=cfg.t_end,
                      store_every=cfg.store_every,
                      taxis_face=cfg.taxis_face,
                      max_halvings=cfg.max_halvings,
                      negativity_tol=cfg.negativity_tol,
                      cfl_max=cfg.cfl_max)
    history = make_history(cfg.initial, p, amplitude=cfg.amplitude,
                           seed=cfg.seed_or_none, grid=grid)

    timer.start("integrate")
    result = run_simulation(p, grid, opts, history)

    timer.start("write")
    frames = out / "frames.bin"
    man.write_frames(frames, result)
    timer.stop()

    initial = {"name": cfg.initial, "amplitude": cfg.amplitude,
               "rng_seed": cfg.seed_or_none}
    man.write_manifest(
        out / "manifest.json", command="simulate", config=raw,
        parameters=_model_record(p),
        tolerances={"negativity_tol": cfg.negativity_tol,
                    "cfl_max": cfg.cfl_max},
        seed=cfg.seed_or_none,
        timings=dict(timer.seconds, integrate_core=result.wall_seconds),
        outputs=[frames],
        extra=man.trajectory_extra(result, frames.name, initial))
    return 0


_MODEL_KEYS = ("d1", "d2", "chi", "alpha", "K", "d", "tau", "R")


def _cmd_classify(args) -> int:
    cfg, raw = _load_stage_config(cfgmod.ClassifyConfig, args.config)
    out = _out_dir(args)
    timer = man.StageTimer()

    timer.start("load")
    times, frames_u, _, grid, doc = man.load_trajectory(args.trajectory)
    params = doc.get("parameters", {})
    missing = [k for k in _MODEL_KEYS if k not in params]
    if missing:
        raise ConfigError(
            f"trajectory manifest lacks model parameter(s) "
            f"{', '.join(missing)}")
    p = ModelParams(**{k: float(params[k]) for k in _MODEL_KEYS})
    u_star = steady_state(p).u_star

    timer.start("classify")
    from . import diagnostics as diag
    report = diag.classify(times, frames_u, grid, u_star, tau=p.tau,
                           config=cfg.diagnostics_config(), trim=cfg.trim)

    timer.start("residuals")
    sel = (times >= report.window[0]) & (times <= report.window[1])
    tw, fw = times[sel], frames_u[sel]
    tested = [("identity",
               diag.symmetry_residual(tw, fw, grid, u_star, "identity"))]
    if report.n >= 1:
        tested.append(("half-period-rotation", diag.symmetry_residual(
            tw, fw, grid, u_star, "half-period-rotation",
            n=report.n, period=report.period)))
    if report.classification.startswith("rotating"):
        quarter = 0.25 * report.period
        tested.append(("rotation", diag.symmetry_residual(
            tw, fw, grid, u_star, "rotation",
            angle=report.phase_velocity * quarter, time_shift=quarter)))
    if report.classification == "standing" and report.axis_angles:
        antinode = (report.axis_angles[0]
                    - 0.5 * np.pi / report.n) % (np.pi / report.n)
        tested.append(("half-period-reflection", diag.symmetry_residual(
            tw, fw, grid, u_star, "half-period-reflection",
            n=report.n, period=report.period, axis=float(antinode))))

    timer.start("write")
    rows = [(rel, s.angle_requested, s.angle_used, s.time_shift,
             s.reflected, s.value)
            for rel, s in tested]
    residuals_table = out / "residuals.tsv"
    residuals_table.write_text(man.format_table(
        ["relation", "angle_requested", "angle_used", "time_shift",
         "reflected", "residual"], rows))

    import json
    report_doc = _jsonable(dict(
        dataclasses.asdict(report),
        thresholds=dataclasses.asdict(cfg),
        parameters=_model_record(p),
        input_manifest=Path(args.trajectory).name,
        code_version=man.__version__))
    report_path = out / "report.json"
    report_path.write_text(json.dumps(report_doc, indent=2, sort_keys=True)
                           + "\n")
    timer.stop()

    man.write_manifest(
        out / "manifest.json", command="classify", config=raw,
        parameters=_model_record(p),
        tolerances=dataclasses.asdict(cfg),
        timings=timer.seconds, outputs=[report_path, residuals_table],
        extra={"input": {"manifest": str(args.trajectory),
                         "sha256": man.sha256_file(args.trajectory)}})
    return 0


def _cmd_case_preset(args) -> int:
    out = _out_dir(args)
    files = cfgmod.preset_files(args.case)
    written = []
    for name, text in sorted(files.items()):
        path = out / name
        path.write_text(text)
        written.append(path)
    man.write_manifest(
        out / "manifest.json", command="case-preset",
        config={"case": args.case},
        parameters=_model_record(cfgmod.case_params(args.case)),
        outputs=written)
    for path in written:
        print(path)
    return 0


# --------------------------------------------------------------------------
# parser / dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diskwave",
        description="Delay-driven rotating and standing waves on a disk: "
                    "mode tables, critical-delay curves, branch "
                    "coefficients, simulation, and wave classification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name: str, fn, help_text: str, config_arg: bool = True):
        sp = sub.add_parser(name, help=help_text)
        if config_arg:
            sp.add_argument("config", nargs="?", default=None,
                            help="key=value config file or a previous "
                                 "manifest.json (defaults apply if omitted)")
        sp.add_argument("--out", required=True,
                        help="output directory (created if missing)")
        sp.set_defaults(func=fn)
        return sp

    stage("spectrum", _cmd_spectrum,
          "no-flux Laplacian mode table (n, m, beta, lambda)")
    stage("hopf-curves", _cmd_hopf_curves,
          "critical delays of every crossing mode over a taxis grid")
    stage("normal-form", _cmd_normal_form,
          "cubic branch coefficients for one mode and crossing")
    stage("simulate", _cmd_simulate,
          "integrate the model and store frames + manifest")

    sp = sub.add_parser("classify",
                        help="classify a stored trajectory by wave type")
    sp.add_argument("trajectory", help="trajectory manifest.json to read")
    sp.add_argument("--config", default=None,
                    help="threshold config file (defaults apply if omitted)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("case-preset",
                        help="emit ready-to-run config files for a named "
                             "showcase")
    sp.add_argument("case", help=f"one of {', '.join(cfgmod.CASE_NAMES)}")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_case_preset)
    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except DiskwaveError as exc:
        print(f"diskwave: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
