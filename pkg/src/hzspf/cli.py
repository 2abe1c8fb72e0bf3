"""Command-line entry point.

Subcommands::

    hzspf segment  --input IMG.pgm [--truth T.pgm] --out DIR
    hzspf segment  --suite single-bias --out DIR
    hzspf synth    --suite multi3-bias --out DIR
    hzspf noise    --input IMG.pgm --kind gaussian --variance 0.02 --out NOISY.pgm
    hzspf bench    --suite noise-sweep --models hzspf,cv,sbgfrls --out results.csv

Parameters come from ``ModelParams`` defaults, then ``--config FILE.json``
(a flat JSON object), then ``--set key=value`` overrides.  Every run writes
the effective parameters next to its outputs.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .evolve import MODELS, ModelParams, run_model
from .grid import ImageError, load_image, mask_boundary, mask_from_phi, save_image, save_mask
from .metrics import evaluate
from .noise import NOISE_KINDS, NoiseSpec, add_noise
from .spf import DegenerateRegionError
from .synth import SUITES, SynthSpec, generate, suite_cases

log = logging.getLogger("hzspf")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

BENCH_HEADER = ("case", "model", "dsc", "js", "iterations", "seconds")

# config keys that are not solver parameters
RUN_KEYS = ("model", "input", "truth", "output_dir", "suite", "case", "spec", "seed")


class ConfigError(ValueError):
    pass


def fmt(x):
    """Reals in CSV output: 6 significant digits."""
    return f"{x:.6g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a flat JSON object")
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"{key}: config values must be scalars")
    return data


def _parse_sets(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _split_config(config):
    """Separate run keys from solver parameters and build ``ModelParams``."""
    run = {k: config[k] for k in RUN_KEYS if k in config}
    solver = {k: v for k, v in config.items() if k not in RUN_KEYS}
    params = ModelParams.from_dict({**ModelParams().to_dict(), **solver})
    return run, params


def _resolve(args):
    config = _load_config(args.config)
    config.update(_parse_sets(getattr(args, "set", None)))
    for key in RUN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return _split_config(config)


def _check_model(model):
    if model not in MODELS:
        raise ConfigError(f"model: unknown model {model!r}; expected one of {', '.join(MODELS)}")


def _seed(value):
    try:
        seed = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"seed: expected an integer, got {value!r}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed: must be a 64-bit unsigned integer, got {seed}")
    return seed


def _pick_case(suite, case, seed):
    cases = suite_cases(suite, seed)
    if case is None:
        return cases[0]
    for name, spec in cases:
        if name == case:
            return name, spec
    raise ConfigError(f"case: suite {suite!r} has no case {case!r}; choose from {[n for n, _ in cases]}")


def _read_spec(path, seed=None):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read spec ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: synth spec must be a JSON object")
    if seed is not None:
        data["seed"] = _seed(seed)
    try:
        return SynthSpec.from_dict(data)
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"{path}: invalid synth spec ({exc})") from exc


def _spec_seed(spec):
    return spec.noise.seed if spec.noise is not None else spec.seed


# ---------------------------------------------------------------------------
# segment
# ---------------------------------------------------------------------------

def cmd_segment(args):
    run, params = _resolve(args)
    model = run.get("model", "hzspf")
    _check_model(model)
    out = Path(run.get("output_dir") or "out")
    seed = None
    truth = None
    source = {}
    given = [k for k in ("input", "suite", "spec") if run.get(k) is not None]
    if len(given) > 1:
        raise ConfigError(f"{given[1]}: give only one of --input, --suite, --spec")
    if run.get("input") is not None:
        image = load_image(run["input"])
        source["input"] = str(run["input"])
        if run.get("truth") is not None:
            truth = load_image(run["truth"]) >= 0.5
            source["truth"] = str(run["truth"])
            if truth.shape != image.shape:
                raise ConfigError(f"truth: {run['truth']} does not match the input size")
    elif run.get("suite") is not None:
        case, spec = _pick_case(run["suite"], run.get("case"), _seed(run.get("seed", 0)))
        image, truth = generate(spec)
        seed = _spec_seed(spec)
        source.update(suite=run["suite"], case=case, synth=spec.to_dict())
    elif run.get("spec") is not None:
        spec = _read_spec(run["spec"])
        image, truth = generate(spec)
        seed = _spec_seed(spec)
        source.update(spec=str(run["spec"]), synth=spec.to_dict())
    else:
        raise ConfigError("input: no input image, suite or spec given")

    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "params.json", {"model": model, **source, "params": params.to_dict()})

    phi, report = run_model(model, image, params, seed=seed)
    mask = mask_from_phi(phi)
    save_mask(mask, out / "mask.pgm")
    overlay = np.where(mask_boundary(mask), 1.0, image)
    save_image(overlay, out / "overlay.pgm")
    _write_csv(
        out / "report.csv",
        ("iteration", "residual"),
        [(i, fmt(r)) for i, r in enumerate(report.residuals, start=1)],
    )
    if truth is not None:
        m = evaluate(mask, truth)
        _write_csv(out / "metrics.csv", ("dsc", "js"), [(fmt(m.dsc), fmt(m.js))])
        log.info("dsc=%s js=%s", fmt(m.dsc), fmt(m.js))
    log.info(
        "%s: %d iterations, %s", model, report.iterations,
        "converged" if report.converged else "stopped at max_iter",
    )
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def _write_scene(spec, out):
    out.mkdir(parents=True, exist_ok=True)
    image, truth = generate(spec)
    save_image(image, out / "image.pgm")
    save_mask(truth, out / "truth.pgm")
    _write_json(out / "spec.json", spec.to_dict())


def cmd_synth(args):
    out = Path(args.out or "out")
    if args.spec is not None:
        _write_scene(_read_spec(args.spec, args.seed), out)
        return EXIT_OK
    if args.suite is None:
        raise ConfigError("suite: give --suite or --spec")
    seed = _seed(args.seed if args.seed is not None else 0)
    if args.case is not None:
        _, spec = _pick_case(args.suite, args.case, seed)
        _write_scene(spec, out)
        return EXIT_OK
    cases = suite_cases(args.suite, seed)
    if len(cases) == 1:
        _write_scene(cases[0][1], out)
    else:
        for name, spec in cases:
            _write_scene(spec, out / name)
    return EXIT_OK


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------

def cmd_noise(args):
    spec = NoiseSpec(
        args.kind,
        mean=args.mean,
        variance=args.variance,
        density=args.density,
        seed=_seed(args.seed if args.seed is not None else 0),
    )
    image = load_image(args.input)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_image(add_noise(image, spec), out)
    _write_json(out.with_suffix(".params.json"), {"input": str(args.input), "noise": spec.to_dict()})
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def bench_rows(suite, models, params, seed=0, timing=False):
    """Run every (case, model) pair of ``suite`` and return CSV rows.

    Rows follow suite order, then model order.  ``seconds`` is left blank
    unless ``timing`` is set, which keeps repeated runs byte-identical.
    """
    rows = []
    for case, spec in suite_cases(suite, seed):
        image, truth = generate(spec)
        for model in models:
            try:
                phi, report = run_model(model, image, params, seed=_spec_seed(spec))
            except (DegenerateRegionError, FloatingPointError) as exc:
                log.warning("%s/%s failed: %s", case, model, exc)
                rows.append((case, model, "nan", "nan", "", ""))
                continue
            m = evaluate(mask_from_phi(phi), truth)
            seconds = fmt(report.wall_time) if timing else ""
            rows.append((case, model, fmt(m.dsc), fmt(m.js), report.iterations, seconds))
    return rows


def cmd_bench(args):
    if args.suite not in SUITES:
        raise ConfigError(f"suite: unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    if not models:
        raise ConfigError("models: no model given")
    for model in models:
        _check_model(model)
    config = _load_config(args.config)
    config.update(_parse_sets(args.set))
    _, params = _split_config({k: v for k, v in config.items() if k not in RUN_KEYS})
    seed = _seed(args.seed if args.seed is not None else config.get("seed", 0))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_json(
        out.with_suffix(".params.json"),
        {"suite": args.suite, "models": models, "seed": seed, "params": params.to_dict()},
    )
    rows = bench_rows(args.suite, models, params, seed=seed, timing=args.timing)
    _write_csv(out, BENCH_HEADER, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="hzspf", description="Hybrid signed-pressure level-set segmentation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbose = argparse.ArgumentParser(add_help=False)
    verbose.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat JSON file of parameters")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter")
        p.add_argument("--seed", help="base seed for synthetic inputs")

    p = sub.add_parser("segment", parents=[verbose], help="segment one image")
    common(p)
    p.add_argument("--model", help=f"one of {', '.join(MODELS)} (default hzspf)")
    p.add_argument("--input", help="8-bit grayscale PGM or PNG")
    p.add_argument("--truth", help="ground-truth mask image (nonzero = object)")
    p.add_argument("--suite", help=f"segment a synthetic case from one of {', '.join(SUITES)}")
    p.add_argument("--case", help="case name within --suite (default: first)")
    p.add_argument("--spec", help="segment a scene from a JSON synth spec")
    p.add_argument("--out", dest="output_dir", help="output directory (default ./out)")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("synth", parents=[verbose], help="write a synthetic image and its ground truth")
    p.add_argument("--suite", help=f"one of {', '.join(SUITES)}")
    p.add_argument("--case", help="single case within --suite")
    p.add_argument("--spec", help="JSON synth spec instead of a suite")
    p.add_argument("--seed", help="seed (overrides the synth spec's)")
    p.add_argument("--out", help="output directory (default ./out)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("noise", parents=[verbose], help="add seeded noise to an image")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", required=True, choices=NOISE_KINDS)
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--variance", type=float, default=0.01)
    p.add_argument("--density", type=float, default=0.01)
    p.add_argument("--seed")
    p.add_argument("--out", required=True, help="output PGM path")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("bench", parents=[verbose], help="score models on a synthetic suite")
    common(p)
    p.add_argument("--suite", required=True, help=f"one of {', '.join(SUITES)}")
    p.add_argument("--models", default=",".join(MODELS), help="comma-separated model list")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--timing", action="store_true", help="fill the seconds column (output no longer reproducible)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, ImageError, ValueError, DegenerateRegionError, FloatingPointError) as exc:
        print(f"hzspf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
