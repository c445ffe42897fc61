"""Command-line entry point: ``hapticad <command> ...``.

Structured results go to files (JSON, CSV, OBJ); a short human-readable
summary goes to stdout. Exit status is 0 on success, 2 for bad input or
usage, 3 when controller training misses its error bound.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import calib, contour, devicesim, elasticity, haptics, kernels
from .config import Config, ConfigError, load_config
from .errors import HapticadError, MissingPhase, NonConvergence

COMPOSITE_RMS_BOUND_N = 0.25
COMPOSITE_MAX_BOUND_N = 0.3


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path, text: str):
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _emit_json(obj, out):
    text = _dump_json(obj)
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)


def cmd_calibrate(args, cfg: Config) -> int:
    samples = calib.load_samples(args.samples)
    lm = calib.fit_line(samples)
    report = lm.to_dict() | {"samples": len(samples)}
    _write(args.out, _dump_json(report))
    print(f"slope {lm.slope:.6g} mm/unit, intercept {lm.intercept:.6g} mm, r^2 {lm.r_squared:.6f}")
    return 0


def cmd_scan(args, cfg: Config) -> int:
    events = contour.load_script(args.script)
    session = contour.replay(events, cfg.calibration, cfg.ring_spacing_mm)
    if not session.rings:
        raise HapticadError("no rings")
    if session.phase is not contour.Phase.DONE:
        raise HapticadError("scan script does not end with 'done'")
    close_seam = cfg.close_seam and not args.open_seam
    mesh = contour.build_cast_mesh(session, cfg.vertex_count, close_seam)
    out = Path(args.out)
    _write(out, contour.write_obj(mesh))
    summary = {"rings": len(session.rings)} | contour.mesh_summary(mesh)
    print(f"{summary['rings']} rings, {summary['vertices']} vertices, {summary['faces']} faces -> {out}")
    if args.halves:
        for i, half in enumerate(contour.split_halves(mesh), start=1):
            p = out.with_name(f"{out.stem}_half{i}{out.suffix}")
            _write(p, contour.write_obj(half))
            print(f"half {i}: {len(half.vertices)} vertices, {len(half.faces)} faces -> {p}")
    return 0


def _hysteresis_dict(trace) -> dict:
    try:
        h = elasticity.analyze_hysteresis(trace)
    except MissingPhase:
        return {"k_up": None, "k_down": None, "release_drop": None}
    return {"k_up": h.k_up, "k_down": h.k_down, "release_drop": h.release_drop}


def cmd_estimate_spring(args, cfg: Config) -> int:
    trace = devicesim.load_trace(args.trace)
    est = elasticity.estimate_spring_rate(trace)
    report = {"k": est.k, "intercept": est.intercept, "r_squared": est.r_squared}
    report |= _hysteresis_dict(trace)
    _emit_json(report, args.out)
    if args.out:
        print(f"k = {est.k:.6g} N/mm (r^2 {est.r_squared:.6f})")
    return 0


def cmd_analyze_hysteresis(args, cfg: Config) -> int:
    trace = devicesim.load_trace(args.trace)
    h = elasticity.analyze_hysteresis(trace)
    report = {"k_up": h.k_up, "k_down": h.k_down, "release_drop": h.release_drop}
    _emit_json(report, args.out)
    if args.out:
        print(f"k_up {h.k_up:.6g}, k_down {h.k_down:.6g} N/mm, release drop {h.release_drop:.4g} N")
    return 0


def cmd_train_controller(args, cfg: Config) -> int:
    data = haptics.generate_training_set(cfg.actuator, cfg.grid)
    mlp = haptics.train_inverse_mlp(data, cfg.actuator, cfg.train)
    metrics = haptics.evaluate_composite(mlp, cfg.actuator, haptics.validation_grid(cfg.actuator, cfg.validation_grid))
    ok = metrics["composite_rms_n"] <= COMPOSITE_RMS_BOUND_N and metrics["composite_max_n"] <= COMPOSITE_MAX_BOUND_N
    mlp.meta.update(
        {
            "backend": kernels.BACKEND,
            "grid": list(cfg.grid),
            "validation": metrics | {"grid": list(cfg.validation_grid)},
            "accepted": ok,
        }
    )
    _write(args.out, mlp.to_json())
    print(
        f"trained on {len(data)} rows ({kernels.BACKEND} kernels): composite RMS "
        f"{metrics['composite_rms_n']:.4f} N, max {metrics['composite_max_n']:.4f} N -> {args.out}"
    )
    if not ok:
        raise NonConvergence(
            f"composite error above bound (RMS <= {COMPOSITE_RMS_BOUND_N} N, max <= {COMPOSITE_MAX_BOUND_N} N)"
        )
    return 0


def cmd_simulate(args, cfg: Config) -> int:
    mlp = haptics.Mlp.from_json(Path(args.mlp).read_text(encoding="utf-8"))
    spring = haptics.VirtualSpring(args.k if args.k is not None else cfg.spring_k)
    traj = haptics.triangle_trajectory(args.cycles, args.peak, args.steps, args.dt)
    trace = haptics.run_interaction(spring, mlp, traj, args.mode, cfg.actuator, cfg.ki)
    devicesim.save_trace(trace, args.out)
    est = elasticity.estimate_spring_rate(trace)
    summary = {
        "mode": args.mode,
        "k_virtual": spring.k,
        "k": est.k,
        "intercept": est.intercept,
        "r_squared": est.r_squared,
        "tracking_rms_n": haptics.tracking_rms(trace, spring, cfg.actuator.f_max),
        "samples": len(trace),
    } | _hysteresis_dict(trace)
    if args.summary:
        _write(args.summary, _dump_json(summary))
    print(
        f"{args.mode}-loop: k {est.k:.5f} N/mm (virtual {spring.k}), k_up {summary['k_up']:.5f}, "
        f"k_down {summary['k_down']:.5f}, tracking RMS {summary['tracking_rms_n']:.4f} N -> {args.out}"
    )
    return 0


def cmd_synth_trace(args, cfg: Config) -> int:
    trace = devicesim.synth_spring_trace(
        args.k, args.cycles, args.peak_x, args.sigma_f, args.sigma_x, cfg.seed
    )
    devicesim.save_trace(trace, args.out)
    print(f"{len(trace)} samples (k {args.k} N/mm, seed {cfg.seed}) -> {args.out}")
    return 0


def cmd_scan_script(args, cfg: Config) -> int:
    profile = devicesim.ArmProfile.from_json(args.profile)
    events = devicesim.scripted_scan_session(profile, cfg.calibration)
    _write(args.out, json.dumps(events, indent=2) + "\n")
    print(f"{len(profile.stations)} stations, {len(events)} events -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hapticad", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="fit reading -> distance map from CSV samples")
    p.add_argument("samples", help="CSV with header reading,distance_mm")
    p.add_argument("-o", "--out", required=True, help="output JSON")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("scan", help="replay a scan script and write the cast mesh as OBJ")
    p.add_argument("script", help="JSON list of pinch/command events")
    p.add_argument("-o", "--out", required=True, help="output OBJ")
    p.add_argument("--halves", action="store_true", help="also write <out>_half1/2.obj")
    p.add_argument("--open-seam", action="store_true", help="leave the ring seam open")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("estimate-spring", help="spring rate and hysteresis from a trace CSV")
    p.add_argument("trace", help="CSV with header t_s,x_mm,f_n")
    p.add_argument("-o", "--out", help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_estimate_spring)

    p = sub.add_parser("analyze-hysteresis", help="compression/release slopes and release drop")
    p.add_argument("trace", help="CSV with header t_s,x_mm,f_n")
    p.add_argument("-o", "--out", help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_analyze_hysteresis)

    p = sub.add_parser("train-controller", help="train the inverse-actuator network")
    p.add_argument("-o", "--out", required=True, help="output network JSON")
    p.set_defaults(func=cmd_train_controller)

    p = sub.add_parser("simulate", help="virtual-spring interaction, open or closed loop")
    p.add_argument("--mlp", required=True, help="network JSON from train-controller")
    p.add_argument("--mode", choices=["open", "closed"], default="open")
    p.add_argument("--k", type=float, help="virtual spring rate in N/mm")
    p.add_argument("--cycles", type=int, default=3)
    p.add_argument("--peak", type=float, default=0.8, help="peak position reading")
    p.add_argument("--steps", type=int, default=200, help="samples per stroke")
    p.add_argument("--dt", type=float, default=0.01, help="sample period in s")
    p.add_argument("-o", "--out", required=True, help="output trace CSV")
    p.add_argument("--summary", help="output summary JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth-trace", help="synthetic noisy spring compression trace")
    p.add_argument("--k", type=float, required=True, help="spring rate in N/mm")
    p.add_argument("--cycles", type=int, default=3)
    p.add_argument("--peak-x", type=float, default=20.0, help="peak displacement in mm")
    p.add_argument("--sigma-f", type=float, default=0.05, help="force noise in N")
    p.add_argument("--sigma-x", type=float, default=0.1, help="displacement noise in mm")
    p.add_argument("-o", "--out", required=True, help="output trace CSV")
    p.set_defaults(func=cmd_synth_trace)

    p = sub.add_parser("scan-script", help="scan script an operator would produce for an arm profile")
    p.add_argument("profile", help="JSON list of {z_mm, width_mm, height_mm}")
    p.add_argument("-o", "--out", required=True, help="output script JSON")
    p.set_defaults(func=cmd_scan_script)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else Config()
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        return args.func(args, cfg)
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (HapticadError, ConfigError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
