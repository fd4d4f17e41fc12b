"""
Command-line front end.

Each run writes its artifacts into one output directory together with a
``manifest.json`` listing every artifact's SHA-256 and a hash of the run
configuration.  Exit status: 0 on success, 2 for bad input, 3 when a
numerical invariant fails.
"""

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import io as sio
from .bands import SisModel, kernel_consistency_error, model_length
from .extra import assemble_optimal, residual_split
from .grid import ConfigMismatchError, FiberizedSignal, field_norm_sq
from .oracle import verify_all
from .paley_wiener import EnumerationCapError, optimize_tile, tile_model, validate_multitile
from .projection import build_filter, data_residual, reconstruct
from .sampling import UnderResolvedError, random_smooth_fibers, synthesize, verify_kernel_bound

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
SPLIT_RTOL = 1e-9


class NumericalInvariantError(RuntimeError):
    def __init__(self, prop, detail):
        super().__init__(f"invariant {prop} failed: {detail}")
        self.prop = prop


@dataclass
class RunConfig:
    command: str
    kernel: str = None
    measurements: str = None
    model: str = None
    out: str = None
    grid: int = None
    truncation: int = None
    lam: float = None
    l: int = None
    N: int = None
    enum_cap: int = None
    seed: int = 0
    params: dict = field(default_factory=dict)
    version: int = sio.VERSION

    def validate(self):
        for name in ("l", "N", "grid", "enum_cap"):
            v = getattr(self, name)
            if v is not None and v < (0 if name == "N" else 1):
                raise sio.InputError(f"--{name.replace('_', '-')} must be positive")
        if self.truncation is not None and self.truncation < 0:
            raise sio.InputError("--truncation must be nonnegative")
        if self.lam is not None and not self.lam > 0:
            raise sio.InputError("--lambda must be positive")
        for name in ("kernel", "measurements", "model"):
            p = getattr(self, name)
            if p is not None and not os.path.isfile(p):
                raise sio.InputError(f"{p}: no such file")
        if self.version != sio.VERSION:
            raise sio.InputError(f"unsupported run config version {self.version}")

    def fingerprint(self):
        """Hash of the parameters and of the input file contents (not their paths)."""
        d = asdict(self)
        d.pop("out")
        for name in ("kernel", "measurements", "model"):
            if d[name] is not None:
                d[name] = sio.sha256_file(d[name])
        return sio.sha256_text(sio.dumps(d))


class Run:
    """Collects artifacts for one output directory."""

    def __init__(self, rc):
        self.rc = rc
        self.artifacts = []
        os.makedirs(rc.out, exist_ok=True)

    def write(self, name, text):
        sio.atomic_write(os.path.join(self.rc.out, name), text)
        self.artifacts.append({"name": name, "sha256": sio.sha256_text(text)})

    def write_json(self, name, obj):
        self.write(name, sio.dumps(obj))

    def finish(self, status="ok"):
        manifest = {
            "format": "sisfit-manifest",
            "version": sio.VERSION,
            "command": self.rc.command,
            "config_hash": self.rc.fingerprint(),
            "status": status,
            "artifacts": self.artifacts,
        }
        sio.write_json(os.path.join(self.rc.out, "manifest.json"), manifest)


def _kernel(rc):
    path = rc.kernel or sio.example_kernel_path()
    g = sio.load_kernel(path)
    c = g.config
    if rc.grid is not None and rc.grid != c.G:
        raise ConfigMismatchError(f"--grid {rc.grid} does not match kernel grid G={c.G}")
    if rc.truncation is not None and rc.truncation != c.L:
        raise ConfigMismatchError(f"--truncation {rc.truncation} does not match kernel L={c.L}")
    if rc.lam is not None:
        g = type(g)(c.with_lam(rc.lam), g.fibers)
    return g


def _measurements(rc, config):
    if rc.measurements is None:
        raise sio.InputError("--measurements is required")
    return sio.read_measurements(rc.measurements, config)


def _require(rc, *names):
    for n in names:
        if getattr(rc, n) is None:
            raise sio.InputError(f"--{n.replace('_', '-')} is required")


# -- commands ----------------------------------------------------------------


def cmd_check_kernel(rc):
    g = _kernel(rc)
    M = verify_kernel_bound(g)
    print(f"M = {M:.17g}")
    if rc.out:
        run = Run(rc)
        run.write_json("kernel_report.json", {"config": g.config.to_dict(), "bound_M": M})
        run.finish()
    return EXIT_OK


def cmd_denoise(rc):
    _require(rc, "out")
    g = _kernel(rc)
    Y = _measurements(rc, g.config)
    filt = build_filter(g)
    run = Run(rc)
    fields, rows = [], []
    for j, y in enumerate(Y, start=1):
        r = reconstruct(y, filt)
        fields.append(sio.field_to_dict(r))
        rows.append([j, data_residual(y, filt), field_norm_sq(r)])
    run.write_json("reconstruction.json", {
        "format": "sisfit-reconstruction",
        "version": sio.VERSION,
        "fields": fields,
    })
    run.write("summary.csv", sio.rows_to_csv(["j", "residual", "lift_norm_sq"], rows))
    run.finish()
    return EXIT_OK


def cmd_fit_extra(rc):
    _require(rc, "out", "l")
    g = _kernel(rc)
    Y = _measurements(rc, g.config)
    filt = build_filter(g)
    res = assemble_optimal(Y, filt, rc.l)
    length = model_length(res.W)
    if length > rc.l:
        raise NumericalInvariantError("model_length", f"{length} > l={rc.l}")
    run = Run(rc)
    run.write_json("result.json", {
        "format": "sisfit-extra-result",
        "version": sio.VERSION,
        "l": rc.l,
        "objective_U": res.objective_U,
        "objective_W": res.objective_W,
        "degenerate": res.degenerate,
        "model_length": length,
        "D": [list(d) for d in res.D],
        "W": sio.model_to_dict(res.W),
    })
    rows = [[t, k, float(res.energies[t, k])] for t in range(g.config.G) for k in range(g.config.n0)]
    run.write("band_energies.csv", sio.rows_to_csv(["t", "band", "energy"], rows))
    run.finish()
    print(f"objective_W = {res.objective_W:.17g}")
    return EXIT_OK


def cmd_fit_pw(rc):
    _require(rc, "out", "l", "N")
    g = _kernel(rc)
    Y = _measurements(rc, g.config)
    res = optimize_tile(Y, g, g.config.lam, rc.N, rc.l, cap=rc.enum_cap)
    ok, problems = validate_multitile(res.tile, rc.l)
    if not ok:
        raise NumericalInvariantError("multitile", "; ".join(problems))
    run = Run(rc)
    run.write_json("tile.json", sio.tile_to_dict(res, rc.l))
    rows = [
        [t, " ".join(str(j) for j in a.cells), float(res.tile.scores[t])]
        for t, a in enumerate(res.tile.assignments)
    ]
    run.write("tiles.csv", sio.rows_to_csv(["t", "cells", "score"], rows))
    run.finish()
    print(f"captured = {res.captured:.17g}  residual = {res.residual:.17g}")
    return EXIT_OK


def _load_any_model(path, g):
    doc = sio.read_json(path, ("sisfit-model", "sisfit-tile", "sisfit-extra-result"))
    fmt = doc["format"]
    if fmt == "sisfit-model":
        model = sio.model_from_dict(doc, str(path))
    elif fmt == "sisfit-extra-result":
        model = sio.model_from_dict(doc["W"], str(path))
    else:
        tile = sio.tile_from_dict(doc, str(path))
        sio_check = (tile.config.n0, tile.config.G, tile.config.L, tile.config.K)
        if sio_check != (g.config.n0, g.config.G, g.config.L, g.config.K):
            raise ConfigMismatchError("tile grid does not match kernel grid")
        model = tile_model(tile, g, g.config.lam)
    if (model.config.n0, model.config.G, model.config.L, model.config.K) != (
        g.config.n0, g.config.G, g.config.L, g.config.K
    ):
        raise ConfigMismatchError("model grid does not match kernel grid")
    # the model is evaluated in the kernel's metric
    model = SisModel.from_spanning_sets(g.config, model.bases, model.class_tag)
    return model


def cmd_evaluate(rc):
    _require(rc, "out", "model")
    g = _kernel(rc)
    Y = _measurements(rc, g.config)
    filt = build_filter(g)
    model = _load_any_model(rc.model, g)
    split = residual_split(model, Y, filt)
    consistency = kernel_consistency_error(model, g)
    passed = split["relative_gap"] <= SPLIT_RTOL
    report = {
        "format": "sisfit-evaluation",
        "version": sio.VERSION,
        "form1": split["form1"],
        "form2": split["form2"],
        "data_residual": split["data_residual"],
        "gap": split["gap"],
        "relative_gap": split["relative_gap"],
        "kernel_consistency_error": consistency,
        "model_length": model_length(model),
        "split": "PASS" if passed else "FAIL",
    }
    run = Run(rc)
    run.write_json("evaluation.json", report)
    run.finish("ok" if passed else "failed")
    print(f"form1 = {split['form1']:.17g}")
    print(f"form2 = {split['form2']:.17g}")
    print(f"data_residual = {split['data_residual']:.17g}")
    print(f"residual split: {report['split']} (relative gap {split['relative_gap']:.3e})")
    if not passed:
        raise NumericalInvariantError("residual_split", f"relative gap {split['relative_gap']:.3e}")
    return EXIT_OK


def cmd_synthesize(rc):
    _require(rc, "out")
    g = _kernel(rc)
    cfg = g.config
    p = rc.params
    rng = np.random.default_rng(rc.seed)
    gens = tuple(
        FiberizedSignal(cfg, random_smooth_fibers(cfg, p["degree"], rng)) for _ in range(p["r"])
    )
    model = SisModel.from_generators(g, gens, "generic")
    P = p["P"]
    coef = rng.normal(size=(p["m"], p["r"], 2 * P + 1)) + 1j * rng.normal(size=(p["m"], p["r"], 2 * P + 1))
    signals, Y = synthesize(model, coef, g, noise=p["noise"] or None, seed=rc.seed)
    run = Run(rc)
    run.write("measurements.csv", sio.measurements_to_csv(Y))
    run.write_json("model.json", sio.model_to_dict(model))
    run.write_json("generators.json", {
        "format": "sisfit-signals",
        "version": sio.VERSION,
        "signals": [sio.signal_to_dict(f) for f in gens],
    })
    run.write_json("coefficients.json", {
        "format": "sisfit-coefficients",
        "version": sio.VERSION,
        "P": P,
        "coefficients": sio.complex_to_json(coef),
    })
    run.finish()
    print(f"wrote {Y.m} measurement sequences to {rc.out}")
    return EXIT_OK


def cmd_oracle_verify(rc):
    _require(rc, "out", "l")
    g = _kernel(rc)
    Y = _measurements(rc, g.config)
    filt = build_filter(g)
    report = verify_all(Y, filt, rc.l, N=rc.N, n_candidates=rc.params["candidates"], seed=rc.seed)
    props = {
        name: {"status": "PASS" if ok else "FAIL", "value": float(val)}
        for name, (ok, val) in report.items()
    }
    failed = [n for n, v in props.items() if v["status"] == "FAIL"]
    run = Run(rc)
    run.write_json("oracle_report.json", {
        "format": "sisfit-oracle-report",
        "version": sio.VERSION,
        "properties": props,
    })
    run.finish("failed" if failed else "ok")
    for n, v in props.items():
        print(f"{v['status']}  {n}  {v['value']:.3e}")
    if failed:
        raise NumericalInvariantError(failed[0], "oracle disagreement")
    return EXIT_OK


COMMANDS = {
    "check-kernel": cmd_check_kernel,
    "denoise": cmd_denoise,
    "fit-extra": cmd_fit_extra,
    "fit-pw": cmd_fit_pw,
    "evaluate": cmd_evaluate,
    "synthesize": cmd_synthesize,
    "oracle-verify": cmd_oracle_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="sisfit", description=__doc__.split("\n\n")[1].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        p.add_argument("--kernel", help="kernel JSON (default: bundled example)")
        p.add_argument("--lambda", dest="lam", type=float, help="regularization weight")
        p.add_argument("--grid", type=int, help="expected grid points per unit interval")
        p.add_argument("--truncation", type=int, help="expected fiber half-width L")
        p.add_argument("--out", help="output directory")
        if data:
            p.add_argument("--measurements", help="measurement CSV (j,k,re,im)")

    p = sub.add_parser("check-kernel", help="report the kernel bound M")
    p.add_argument("kernel_path", nargs="?", help="kernel JSON (default: bundled example)")
    common(p, data=False)

    p = sub.add_parser("denoise", help="regularized reconstructions of every sequence")
    common(p)

    p = sub.add_parser("fit-extra", help="optimal extra-invariant model")
    common(p)
    p.add_argument("--l", type=int, help="maximal model length")

    p = sub.add_parser("fit-pw", help="optimal Paley-Wiener multi-tile")
    common(p)
    p.add_argument("--l", type=int, help="tiling multiplicity")
    p.add_argument("--N", type=int, help="cell cutoff")
    p.add_argument("--enum-cap", type=int, help="enumeration cap (env SISFIT_ENUM_CAP)")

    p = sub.add_parser("evaluate", help="Form-1, Form-2 and data residual of a model")
    common(p)
    p.add_argument("--model", help="model, tile or fit-extra result JSON")

    p = sub.add_parser("synthesize", help="random generators, model and measurements")
    common(p, data=False)
    p.add_argument("--r", type=int, default=1, help="number of generators")
    p.add_argument("--m", type=int, default=3, help="number of signals")
    p.add_argument("--P", type=int, default=1, help="translates -P..P per generator")
    p.add_argument("--degree", type=int, default=1, help="trigonometric degree of generator fibers")
    p.add_argument("--noise", type=float, default=0.0, help="complex Gaussian noise level")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("oracle-verify", help="brute-force verification report")
    common(p)
    p.add_argument("--l", type=int, help="model length / tiling multiplicity")
    p.add_argument("--N", type=int, help="also verify the multi-tile optimizer with this cutoff")
    p.add_argument("--candidates", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(args):
    params = {}
    if args.command == "synthesize":
        params = {"r": args.r, "m": args.m, "P": args.P, "degree": args.degree, "noise": args.noise}
        for k in ("r", "m", "degree"):
            if params[k] < 1:
                raise sio.InputError(f"--{k} must be positive")
        if args.P < 0 or args.noise < 0:
            raise sio.InputError("--P and --noise must be nonnegative")
    if args.command == "oracle-verify":
        params = {"candidates": args.candidates}
    kernel = args.kernel
    if args.command == "check-kernel" and args.kernel_path:
        kernel = args.kernel_path
    rc = RunConfig(
        command=args.command,
        kernel=kernel,
        measurements=getattr(args, "measurements", None),
        model=getattr(args, "model", None),
        out=args.out,
        grid=args.grid,
        truncation=args.truncation,
        lam=args.lam,
        l=getattr(args, "l", None),
        N=getattr(args, "N", None),
        enum_cap=getattr(args, "enum_cap", None),
        seed=getattr(args, "seed", 0),
        params=params,
    )
    rc.validate()
    return rc


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rc = config_from_args(args)
        return COMMANDS[rc.command](rc)
    except NumericalInvariantError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ArithmeticError as e:
        print(f"error: numerical invariant failed: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (sio.InputError, ConfigMismatchError, UnderResolvedError, EnumerationCapError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
