"""Command-line entry point: ``hybridwigner {state,wigner,evolve,render,verify}``.

Settings resolve as command-line flags, then the ``--config`` JSON file, then
built-in defaults.  Exit codes: 0 ok, 2 invalid input, 3 numeric or
truncation failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import dynamics, fieldio, render, states, verify, wigner
from .errors import (
    HybridWignerError,
    InvalidInputError,
    MissingSliceError,
    NumericError,
    TruncationWarning,
)
from .grids import CvGrid, SphereGrid
from .operators import Ket, density_report, partial_trace, tensor

log = logging.getLogger("hybridwigner")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


@dataclass
class JobConfig:
    """Everything a pipeline run needs; mirrors the ``--config`` JSON layout."""

    state: Optional[dict] = None
    grids: dict = field(default_factory=dict)
    render: dict = field(default_factory=dict)
    evolution: dict = field(default_factory=dict)
    output_dir: str = "."
    strictness: str = "warn"

    def __post_init__(self):
        if self.strictness not in ("warn", "error"):
            raise InvalidInputError(f"strictness must be 'warn' or 'error', got {self.strictness!r}")
        if isinstance(self.state, dict):
            # validate eagerly, keep the canonical form
            self.state = states.StateSpec.from_dict(self.state).to_dict()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise InvalidInputError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except FileNotFoundError:
            raise InvalidInputError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config {path} is not JSON: {exc}") from None


def _pick(flag, config_value, default):
    if flag is not None:
        return flag
    if config_value is not None:
        return config_value
    return default


def _complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


# --------------------------------------------------------------------------- state


def cmd_state(args, config):
    if args.spec:
        spec = states.StateSpec.from_json(args.spec)
    elif args.kind:
        params = {
            k: getattr(args, k)
            for k in ("n", "beta", "a", "b", "eta", "sign", "phase")
            if getattr(args, k) is not None
        }
        spec = states.StateSpec(kind=args.kind, dim_field=_pick(args.dim, None, states.DEFAULT_DIM),
                                **params)
    elif config.state is not None:
        spec = states.StateSpec.from_dict(config.state)
        if args.dim is not None:
            spec.dim_field = args.dim
    else:
        raise InvalidInputError("state needs --kind, --spec or a config 'state' block")

    built = spec.build()
    rho = wigner.as_density(built)
    report = density_report(rho)
    if isinstance(built, Ket):
        report["norm"] = built.norm()
    out = Path(args.output or Path(config.output_dir) / "state.json")
    fieldio.write_state(out, built, spec=spec.to_dict(), report=report)
    _emit({"state_file": str(out), "spec": spec.to_dict(), "report": report})
    if not report["valid"]:
        log.error("state violates density-operator invariants")
        return EXIT_NUMERIC
    return EXIT_OK


# --------------------------------------------------------------------------- wigner


def _grids(args, config):
    g = config.grids
    cv_cfg, sp_cfg = g.get("cv", {}), g.get("sphere", {})
    cv = CvGrid(
        tuple(_pick(args.re_range, cv_cfg.get("re_range"), (-6.0, 6.0))),
        tuple(_pick(args.im_range, cv_cfg.get("im_range"), (-6.0, 6.0))),
        _pick(args.n_re, cv_cfg.get("n_re"), 201),
        _pick(args.n_im, cv_cfg.get("n_im"), 201),
    )
    sp = SphereGrid(
        _pick(args.n_theta, sp_cfg.get("n_theta"), 64),
        _pick(args.n_phi, sp_cfg.get("n_phi"), 128),
        _pick(args.sphere_rule, sp_cfg.get("rule"), "gauss"),
    )
    return cv, sp


def _is_field_dump(path):
    with open(path, "rb") as fh:
        head = fh.read(1)
    return head != b"{"


def cmd_wigner(args, config):
    cv, sp = _grids(args, config)
    out = Path(args.output or Path(config.output_dir) / "field.bin")
    if _is_field_dump(args.input):
        dump = fieldio.read_field(args.input)
        if dump.kind != "hybrid" or not args.reduced:
            raise InvalidInputError("a field dump input needs kind 'hybrid' and --reduced")
        hybrid = dump.to_hybrid()
        values = wigner.marginal(hybrid, args.reduced)
        grid_kw = {"cv_grid": hybrid.cv_grid} if args.reduced == "cv" else {
            "sphere_grid": hybrid.sphere_grid}
        label, target = dump.state_label, dump.trace_target
    else:
        state = fieldio.read_state(args.input)
        rho = wigner.as_density(state)
        label, target = Path(args.input).stem, float(rho.tr().real)
        if rho.dim_atom == 2 and rho.dim_field > 1:
            if args.reduced == "cv":
                values, grid_kw = wigner.evaluate_cv(partial_trace(rho, "field"), cv), {"cv_grid": cv}
            elif args.reduced == "dv":
                values, grid_kw = wigner.evaluate_dv(partial_trace(rho, "atom"), sp), {"sphere_grid": sp}
            else:
                hybrid = wigner.evaluate_hybrid(rho, cv, sp, label)
                fieldio.write_field(out, hybrid)
                integral = wigner.integrate(hybrid)
                _emit({"field": str(out), "kind": "hybrid", "integral": integral,
                       "trace_target": target})
                return EXIT_OK
        elif rho.dim_atom == 2:
            values, grid_kw = wigner.evaluate_dv(rho, sp), {"sphere_grid": sp}
        else:
            values, grid_kw = wigner.evaluate_cv(rho, cv), {"cv_grid": cv}
    if np.iscomplexobj(values):
        raise NumericError("operator is not Hermitian; refusing to dump a complex field")
    fieldio.write_field(out, values, state_label=label, trace_target=target, **grid_kw)
    if args.csv:
        fieldio.write_csv(args.csv, values, **grid_kw)
    kind = "cv" if "cv_grid" in grid_kw else "dv"
    _emit({"field": str(out), "kind": kind, "integral": wigner.integrate(values, **grid_kw),
           "trace_target": target})
    return EXIT_OK


# --------------------------------------------------------------------------- evolve


def cmd_evolve(args, config):
    evo = config.evolution
    omega = float(_pick(args.omega, evo.get("omega"), 1.0))
    beta = complex(_pick(args.beta, _json_complex(evo.get("beta")), 0.0))
    dim = int(_pick(args.dim, evo.get("dim_field"), dynamics.DEFAULT_JC_DIM if beta else 10))
    mode = "fig6" if args.fig6 else "auto-fig7" if args.auto_fig7 else None
    times = args.times
    if mode is None and times is None:
        sched = evo.get("times")
        if sched in ("fig6", "auto-fig7"):
            mode = sched
        elif sched is not None:
            times = [float(t) for t in sched]
    model = dynamics.JcModel(omega, dim)
    psi0 = tensor(states.coherent(beta, dim), states.excited())

    extra = {}
    if mode == "fig6":
        times = list(dynamics.fig6_times(omega))
        labels = ["Phi-", "Phi+"]
    elif mode == "auto-fig7":
        if beta == 0:
            raise InvalidInputError("--auto-fig7 needs a nonzero --beta")
        sched = dynamics.fig7_schedule(model, beta)
        times, labels = list(sched["times"]), ["t_r/9", "t_r/2", "t_r"]
        extra["t_revival"] = sched["t_revival"]
    elif times:
        labels = [None] * len(times)
    else:
        raise InvalidInputError("evolve needs --times, --fig6 or --auto-fig7")

    cv_cfg = config.grids.get("cv", {})
    cv = CvGrid(
        tuple(_pick(args.re_range, cv_cfg.get("re_range"), (-6.0, 6.0))),
        tuple(_pick(args.im_range, cv_cfg.get("im_range"), (-6.0, 6.0))),
        _pick(args.n_re, cv_cfg.get("n_re"), 13),
        _pick(args.n_im, cv_cfg.get("n_im"), 13),
    )
    sp_cfg = config.grids.get("sphere", {})
    sp = SphereGrid(_pick(args.n_theta, sp_cfg.get("n_theta"), 64),
                    _pick(args.n_phi, sp_cfg.get("n_phi"), 128))

    out_dir = Path(args.out_dir or config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for k, (t, label) in enumerate(zip(times, labels)):
        psi = dynamics.evolve(model, psi0, t)
        state_path = out_dir / f"snapshot_{k:03d}.state.json"
        field_path = out_dir / f"snapshot_{k:03d}.field.bin"
        fieldio.write_state(state_path, psi, report=density_report(psi.proj()))
        entry = {"t": float(t), "state": str(state_path)}
        if not args.no_fields:
            hybrid = wigner.evaluate_hybrid(psi.proj(), cv, sp, label or f"t={t:g}")
            fieldio.write_field(field_path, hybrid)
            entry["field"] = str(field_path)
        else:
            entry["field"] = None
        if label:
            entry["label"] = label
        if mode == "fig6":
            entry["fidelity"] = psi.fidelity(states.bell_fock(label[-1], dim))
        entry["inversion"] = float(dynamics.inversion_series(model, psi0, [t])[0])
        manifest.append(entry)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    _emit({"manifest": str(out_dir / "manifest.json"), "snapshots": manifest, **extra})
    return EXIT_OK


def _json_complex(v):
    if v is None:
        return None
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


# --------------------------------------------------------------------------- render


def _hex_color(text):
    text = text.lstrip("#")
    if len(text) != 6:
        raise argparse.ArgumentTypeError(f"colour must be RRGGBB, got {text!r}")
    return tuple(int(text[i:i + 2], 16) / 255 for i in (0, 2, 4))


def cmd_render(args, config):
    out = Path(args.output)
    fmt = out.suffix.lower().lstrip(".")
    if fmt not in ("png", "svg"):
        raise InvalidInputError(f"unknown output extension {out.suffix!r} (use .png or .svg)")
    dump = fieldio.read_field(args.input)
    opts = dict(config.render)
    limits = args.limits or opts.pop("limits", "auto")
    if limits != "auto":
        try:
            lo, hi = (float(x) for x in str(limits).split(","))
        except ValueError:
            raise InvalidInputError(f"--limits must be 'auto' or LO,HI, got {limits!r}") from None
        opts["vmin"], opts["vmax"] = lo, hi
    if dump.kind == "hybrid" and args.disc_grid is None and "disc_grid" not in opts:
        shape = dump.cv_grid.shape
        opts["disc_grid"] = shape if max(shape) <= 25 else (13, 13)
    for key in ("disc_grid", "disc_resolution", "transparency_norm", "image_size",
                "neg_color", "pos_color"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    if args.equator:
        opts["equator"] = True
    opts["output"] = fmt
    spec = render.RenderSpec.from_dict(opts)

    if dump.kind == "hybrid":
        img = render.render_hybrid(dump.to_hybrid(), spec)
        extent = (dump.cv_grid.re_range, dump.cv_grid.im_range)
    elif dump.kind == "cv":
        img = render.render_cv(dump.values, dump.cv_grid, spec)
        extent = (dump.cv_grid.re_range, dump.cv_grid.im_range)
    else:
        img = render.render_dv_disc(dump.values, dump.sphere_grid, spec, dump.trace_target)
        extent = None
    digest = render.save_image(out, img, fmt, extent)
    result = {"image": str(out), "sha256": digest, "limits": spec.limits(dump.kind, dump.trace_target)}
    if args.manifest:
        render.write_manifest(args.manifest, spec, args.input, out, digest)
        result["manifest"] = args.manifest
    _emit(result)
    return EXIT_OK


# --------------------------------------------------------------------------- verify


def cmd_verify(args, config):
    report = verify.run_checks(args.only)
    text = json.dumps(report, indent=2)
    if args.report:
        Path(args.report).write_text(text)
    print(text)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# --------------------------------------------------------------------------- parser


def _add_grid_flags(p):
    p.add_argument("--re-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--im-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--n-re", type=int)
    p.add_argument("--n-im", type=int)
    p.add_argument("--n-theta", type=int)
    p.add_argument("--n-phi", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="hybridwigner", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON job configuration")
    parser.add_argument("--strictness", choices=["warn", "error"],
                        help="treat truncation warnings as errors with 'error'")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="build a state and write it with an invariant report")
    p.add_argument("--kind", choices=states.KINDS)
    p.add_argument("--spec", help="StateSpec as a JSON string")
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=_complex)
    p.add_argument("--a", type=_complex)
    p.add_argument("--b", type=_complex)
    p.add_argument("--eta", type=float)
    p.add_argument("--sign", choices=["+", "-"])
    p.add_argument("--phase", type=_complex)
    p.add_argument("--dim", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("wigner", help="evaluate a Wigner function on a grid")
    p.add_argument("input", help="state file, or a hybrid field dump with --reduced")
    _add_grid_flags(p)
    p.add_argument("--sphere-rule", choices=["gauss", "midpoint"])
    p.add_argument("--reduced", choices=["cv", "dv"])
    p.add_argument("--csv", help="also write a CSV table (2-D fields only)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("evolve", help="Jaynes-Cummings snapshots")
    p.add_argument("--omega", type=float)
    p.add_argument("--beta", type=_complex, help="initial |beta>|e>; 0 gives the vacuum run")
    p.add_argument("--dim", type=int)
    p.add_argument("--times", type=float, nargs="+")
    p.add_argument("--fig6", action="store_true", help="Bell-Fock times pi/4w, 3pi/4w")
    p.add_argument("--auto-fig7", action="store_true", help="t_r/9, t_r/2, t_r schedule")
    p.add_argument("--no-fields", action="store_true", help="skip hybrid field dumps")
    _add_grid_flags(p)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("render", help="render a field dump to PNG or SVG")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--limits", help="'auto' or LO,HI")
    p.add_argument("--disc-grid", type=int, nargs=2)
    p.add_argument("--disc-resolution", type=int)
    p.add_argument("--transparency-norm", type=float)
    p.add_argument("--image-size", type=int, nargs=2)
    p.add_argument("--neg-color", type=_hex_color)
    p.add_argument("--pos-color", type=_hex_color)
    p.add_argument("--equator", action="store_true")
    p.add_argument("--manifest", help="write a figure manifest JSON here")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--report", help="also write the JSON report to this file")
    p.add_argument("--only", nargs="+", help="run only these named checks")
    p.set_defaults(func=cmd_verify)
    return parser


def _join_negative_limits(argv):
    # "--limits -1,1" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--limits":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--limits={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = _join_negative_limits(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = JobConfig.load(args.config) if args.config else JobConfig()
        strictness = _pick(args.strictness, None, config.strictness)
        with warnings.catch_warnings():
            if strictness == "error":
                warnings.simplefilter("error", TruncationWarning)
            return args.func(args, config)
    except TruncationWarning as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidInputError, MissingSliceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except HybridWignerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
