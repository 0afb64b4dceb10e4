"""Command-line front end: simulate, diagnose, instances.

Configs are JSON; outputs are deterministic (byte-identical for identical
inputs on one platform): ``trace.csv`` and ``state.csv`` use LF endings,
``.`` decimals and shortest round-trip float formatting, ``summary.json``
echoes the fully defaulted config.

Exit codes: 0 success, 1 config error, 2 numerical failure (partial
outputs flushed), 3 validation failure.  The environment variable
``FLUIDALG_SEED_OVERRIDE`` (integer) overrides every seed in the config,
for CI reruns.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .core import (
    AlgebraDataError,
    AlgebraFormatError,
    AlgebraValidationError,
    FluidAlgebra,
    g_norm,
    load_algebra,
    make_rng,
    validate,
)
from .diagnostics import run_identity_suite
from .instances import (
    TorusSizeError,
    beltrami_state,
    build_torus_algebra,
    random_algebra,
    rigid_body,
    so3,
)
from .integrators import IntegratorSpec, ProjectionSettings, integrate

__all__ = ["main", "entry"]

SEED_OVERRIDE_ENV = "FLUIDALG_SEED_OVERRIDE"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VALIDATION = 3

INSTANCE_SCHEMAS = [
    ("rigid-body", "moments: [I1, I2, I3], all > 0"),
    ("so3", "no parameters"),
    ("torus", "K: int >= 1; max_dim: int (default 512)"),
    ("random", "seed: int; n: int >= 1"),
    ("custom", "path: JSON algebra file (dim/triple/linking/metric)"),
]


class ConfigError(Exception):
    """Problem with the run configuration (not the algebra itself)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fluidalg",
        description="Finite-dimensional fluid algebra simulator and checker.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    sim = sub.add_parser(
        "simulate", help="integrate the Euler ODE and write CSV traces"
    )
    sim.add_argument("--config", required=True, help="JSON config path")
    sim.add_argument("--output", default=None, help="output directory")
    sim.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config entry by dotted path, e.g. integrator.dt=1e-3",
    )

    diag = sub.add_parser(
        "diagnose", help="run the identity suite against an instance"
    )
    diag.add_argument("--config", required=True, help="JSON config path")
    diag.add_argument("--output", default=None, help="output directory")

    sub.add_parser("instances", help="list built-in instances")
    return parser


# ---------------------------------------------------------------------------
# config handling


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _apply_overrides(cfg: dict, overrides) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set path {key!r} crosses a non-object")
        node[parts[-1]] = value
    return cfg


def _seed_override():
    raw = os.environ.get(SEED_OVERRIDE_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(
            f"{SEED_OVERRIDE_ENV} must be an integer, got {raw!r}"
        ) from exc


def _override_seeds(cfg: dict, seed) -> dict:
    if seed is None:
        return cfg
    inst = cfg.get("instance")
    if isinstance(inst, dict) and "seed" in inst:
        inst["seed"] = seed
    for key in ("initial_state", "probe"):
        val = cfg.get(key)
        if isinstance(val, dict) and "seed" in val:
            val["seed"] = seed
    diag = cfg.get("diagnostics")
    if isinstance(diag, dict):
        diag["seed"] = seed
    return cfg


def _build_instance(spec) -> tuple:
    """Returns (algebra, torus_basis_or_None)."""
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError('config needs an "instance" object with a "name"')
    name = spec["name"]
    if name == "rigid-body":
        moments = spec.get("moments")
        if (
            not isinstance(moments, (list, tuple))
            or len(moments) != 3
        ):
            raise ConfigError('rigid-body needs "moments": [I1, I2, I3]')
        try:
            return rigid_body(*moments), None
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if name == "so3":
        return so3(), None
    if name == "torus":
        if "K" not in spec:
            raise ConfigError('torus needs "K"')
        try:
            alg, basis = build_torus_algebra(
                int(spec["K"]), max_dim=int(spec.get("max_dim", 512))
            )
        except (TorusSizeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return alg, basis
    if name == "random":
        if "seed" not in spec or "n" not in spec:
            raise ConfigError('random needs "seed" and "n"')
        try:
            return random_algebra(int(spec["seed"]), int(spec["n"])), None
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if name == "custom":
        if "path" not in spec:
            raise ConfigError('custom needs "path"')
        # validation problems in the file map to exit 3 at the caller
        return load_algebra(spec["path"]), None
    known = ", ".join(name for name, _ in INSTANCE_SCHEMAS)
    raise ConfigError(f"unknown instance {name!r}; known: {known}")


_AXIS_PRESETS = {"axis1": 0, "axis2": 1, "axis3": 2}


def _resolve_state(alg: FluidAlgebra, basis, form, label: str) -> np.ndarray:
    if isinstance(form, (list, tuple)):
        state = np.asarray(form, dtype=float)
        if state.shape != (alg.dim,):
            raise ConfigError(
                f"{label} has {state.size} coordinates, expected {alg.dim}"
            )
        return state
    if isinstance(form, str):
        if form in _AXIS_PRESETS:
            axis = _AXIS_PRESETS[form]
            if axis >= alg.dim:
                raise ConfigError(f"{label} preset {form!r} needs dim > {axis}")
            state = np.zeros(alg.dim)
            state[axis] = 1.0
            return state
        if form == "beltrami":
            if basis is None:
                raise ConfigError(
                    f"{label} preset 'beltrami' needs the torus instance"
                )
            return beltrami_state(basis)
        raise ConfigError(f"unknown {label} preset {form!r}")
    if isinstance(form, dict):
        if "seed" not in form:
            raise ConfigError(f"{label} object form needs a \"seed\"")
        norm = float(form.get("norm", 1.0))
        rng = make_rng(int(form["seed"]))
        state = rng.standard_normal(alg.dim)
        current = g_norm(alg, state)
        if current == 0.0:
            raise ConfigError(f"{label} random draw degenerate")
        return state * (norm / current)
    raise ConfigError(
        f"{label} must be a coordinate list, a preset name, or "
        f'{{"seed": ..., "norm": ...}}'
    )


def _integrator_spec(cfg: dict) -> IntegratorSpec:
    section = cfg.get("integrator")
    if not isinstance(section, dict):
        raise ConfigError('config needs an "integrator" object')
    proj = section.get("projection", {})
    if not isinstance(proj, dict):
        raise ConfigError('"integrator.projection" must be an object')
    try:
        return IntegratorSpec(
            method=section.get("method", "rk4"),
            dt=float(section["dt"]),
            t_end=float(section["t_end"]),
            record_every=int(section.get("record_every", 1)),
            projection=ProjectionSettings(
                max_iter=int(proj.get("max_iter", 10)),
                tol=float(proj.get("tol", 1e-12)),
            ),
        )
    except KeyError as exc:
        raise ConfigError(f"integrator config missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad integrator config: {exc}") from exc


def _echo_config(cfg: dict, spec: IntegratorSpec, output_dir: str) -> dict:
    return {
        "instance": cfg.get("instance"),
        "initial_state": cfg.get("initial_state"),
        "probe": cfg.get("probe"),
        "integrator": {
            "method": spec.method,
            "dt": spec.dt,
            "t_end": spec.t_end,
            "record_every": spec.record_every,
            "projection": {
                "max_iter": spec.projection.max_iter,
                "tol": spec.projection.tol,
            },
        },
        "output_dir": output_dir,
    }


# ---------------------------------------------------------------------------
# output writers


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_trace(path, records) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("t,energy,helicity,probe_linking\n")
        for r in records:
            probe = "" if r.probe_linking is None else _fmt(r.probe_linking)
            fh.write(f"{_fmt(r.t)},{_fmt(r.energy)},{_fmt(r.helicity)},{probe}\n")


def _write_states(path, records, dim: int) -> None:
    header = "t," + ",".join(f"x{i}" for i in range(dim))
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for r in records:
            coords = ",".join(_fmt(v) for v in r.state)
            fh.write(f"{_fmt(r.t)},{coords}\n")


def _write_json(path, payload) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    try:
        cfg = _load_config(args.config)
        cfg = _apply_overrides(cfg, args.overrides)
        cfg = _override_seeds(cfg, _seed_override())
        spec = _integrator_spec(cfg)
        output_dir = args.output or cfg.get("output_dir", ".")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        alg, basis = _build_instance(cfg.get("instance"))
        if "initial_state" not in cfg:
            raise ConfigError('config needs "initial_state"')
        X0 = _resolve_state(alg, basis, cfg["initial_state"], "initial_state")
        probe = None
        if cfg.get("probe") is not None:
            probe = _resolve_state(alg, basis, cfg["probe"], "probe")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AlgebraValidationError, AlgebraFormatError, AlgebraDataError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    os.makedirs(output_dir, exist_ok=True)
    result = integrate(alg, X0, spec, probe=probe)
    records = result.records

    e0 = records[0].energy
    h0 = records[0].helicity
    p0 = records[0].probe_linking
    max_de = max(abs(r.energy - e0) for r in records)
    max_dh = max(abs(r.helicity - h0) for r in records)
    max_dp = (
        None
        if p0 is None
        else max(abs(r.probe_linking - p0) for r in records)
    )

    _write_trace(os.path.join(output_dir, "trace.csv"), records)
    _write_states(os.path.join(output_dir, "state.csv"), records, alg.dim)
    summary = {
        "tool": "fluidalg",
        "version": __version__,
        "config": _echo_config(cfg, spec, output_dir),
        "dim": alg.dim,
        "initial": {"energy": e0, "helicity": h0, "probe_linking": p0},
        "final": {
            "energy": records[-1].energy,
            "helicity": records[-1].helicity,
            "probe_linking": records[-1].probe_linking,
        },
        "max_energy_drift": max_de,
        "max_helicity_drift": max_dh,
        "max_probe_linking_drift": max_dp,
        "steps": result.steps,
        "records": len(records),
        "projection_failures": result.projection_failures,
        "failed": result.failed,
        "failure_message": result.failure_message,
    }
    _write_json(os.path.join(output_dir, "summary.json"), summary)
    if result.failed:
        print(f"numerical failure: {result.failure_message}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_diagnose(args) -> int:
    try:
        cfg = _load_config(args.config)
        cfg = _override_seeds(cfg, _seed_override())
        output_dir = args.output or cfg.get("output_dir", ".")
        diag_cfg = cfg.get("diagnostics", {})
        if not isinstance(diag_cfg, dict):
            raise ConfigError('"diagnostics" must be an object')
        num_states = int(diag_cfg.get("num_states", 20))
        num_triples = int(diag_cfg.get("num_triples", 40))
        seed = int(diag_cfg.get("seed", 2024))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        alg, _ = _build_instance(cfg.get("instance"))
        validate(alg).require()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AlgebraValidationError, AlgebraFormatError, AlgebraDataError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = run_identity_suite(
        alg, num_states=num_states, seed=seed, num_triples=num_triples
    )
    os.makedirs(output_dir, exist_ok=True)
    payload = {
        "tool": "fluidalg",
        "version": __version__,
        "instance": cfg.get("instance"),
        "diagnostics": {
            "num_states": num_states,
            "num_triples": num_triples,
            "seed": seed,
        },
    }
    payload.update(report.to_dict())
    _write_json(os.path.join(output_dir, "diagnostics.json"), payload)
    for r in report.identities:
        status = "pass" if r.passed else ("FAIL" if r.passed is not None else "info")
        tol = "-" if r.tolerance is None else f"{r.tolerance:g}"
        print(f"{r.name:34s} defect {r.max_defect:10.3e}  tol {tol:>8s}  {status}")
    if not report.passed:
        print("identity suite FAILED", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_instances(_args) -> int:
    print("built-in instances:")
    for name, schema in INSTANCE_SCHEMAS:
        print(f"  {name:12s} {schema}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    if args.command == "simulate":
        return cmd_simulate(args)
    if args.command == "diagnose":
        return cmd_diagnose(args)
    if args.command == "instances":
        return cmd_instances(args)
    parser.print_usage(sys.stderr)
    return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())
