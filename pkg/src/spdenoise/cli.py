"""Command-line entry point: ``spdenoise <command> ...``.

Exit codes: 0 success, 1 I/O error, 2 validation error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .assets import cap_edge, lena
from .bench import (
    LENA_LEVEL, aggregate, curves, lena_scores, sort_rows, summary, write_csv,
)
from .config import (
    SCHEMES, ConfigError, config_to_dict, load_preset, parse_config, preset_names,
    required_fields, run_scheme,
)
from .entropy import EntropySpec, dilate, entropy_map
from .image import ImageFormatError, load_image, save_image
from .metrics import SsimSpec, build_report
from .noise import NoiseSpec, corrupted_count, inject_sp_noise

log = logging.getLogger("spdenoise")

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


class UsageError(ValueError):
    pass


def _write_manifest(path, command, argv, config, inputs, outputs, seeds, started):
    manifest = {
        "command": command,
        "argv": list(argv),
        "version": __version__,
        "config": config,
        "inputs": {k: str(v) for k, v in inputs.items()},
        "outputs": {k: str(v) for k, v in outputs.items()},
        "seeds": list(seeds),
        "wall_clock_s": round(time.perf_counter() - started, 3),
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def _manifest_path(args, out) -> Path:
    return Path(args.manifest) if args.manifest else Path(str(out) + ".manifest.json")


def cmd_noise(args, argv):
    t0 = time.perf_counter()
    spec = NoiseSpec(args.model, args.level, args.seed)
    img = load_image(args.input)
    noisy = inject_sp_noise(img, spec)
    save_image(noisy, args.output)
    _write_manifest(_manifest_path(args, args.output), "noise", argv, dataclasses.asdict(spec),
                    {"input": args.input}, {"image": args.output}, [args.seed], t0)
    print(f"corrupted {corrupted_count(spec.level, img.size)} of {img.size} pixels")
    return EXIT_OK


def _resolve_config(args):
    if args.config is None:
        scheme = args.scheme
        if scheme is None:
            raise ConfigError("--config is required (a JSON file or a preset: "
                              + ", ".join(preset_names()) + ")")
        raise ConfigError(f"--config is required; scheme {scheme!r} needs fields: "
                          + ", ".join(required_fields(scheme)))
    path = Path(args.config)
    if path.is_file():
        doc = json.loads(path.read_text())
        if args.scheme and "scheme" not in doc:
            doc["scheme"] = args.scheme
        scheme, cfg = parse_config(doc)
    elif path.suffix in ("", ".json") and path.stem in preset_names() and not path.parent.parts:
        scheme, cfg = load_preset(path.stem)
    else:
        raise FileNotFoundError(f"config {args.config!r} not found")
    if args.scheme and args.scheme != scheme:
        raise ConfigError(f"--scheme {args.scheme} does not match config scheme {scheme}")
    if args.seed is not None and hasattr(cfg, "ae"):
        cfg = dataclasses.replace(cfg, ae=dataclasses.replace(cfg.ae, seed=args.seed))
    return scheme, cfg


def cmd_denoise(args, argv):
    t0 = time.perf_counter()
    scheme, cfg = _resolve_config(args)
    source = load_image(args.input)
    clean = load_image(args.clean) if args.clean else None
    if clean is not None and clean.shape != source.shape:
        raise UsageError(f"--clean shape {clean.shape} differs from input {source.shape}")
    restored = run_scheme(source, scheme, cfg)
    save_image(restored, args.output)
    config = config_to_dict(scheme, cfg)
    outputs = {"image": args.output}
    if clean is not None:
        espec = EntropySpec()
        report = build_report(clean, restored, espec, SsimSpec(), provenance={
            "denoise": config,
            "entropy": {**dataclasses.asdict(espec), "window": espec.window.side},
            "ssim": dataclasses.asdict(SsimSpec()),
            "input": str(args.input), "clean": str(args.clean)})
        report_path = args.report or str(args.output) + ".report.json"
        Path(report_path).write_text(report.to_json(indent=2) + "\n")
        outputs["report"] = report_path
        print(f"ssim_img={report.ssim_img:.4f} ssim_map={report.ssim_map_standard:.4f} "
              f"ssim_map_dilated={report.ssim_map_dilated:.4f} delta_pct={report.delta_pct:.2f}")
    elif args.report:
        raise UsageError("--report needs --clean")
    seeds = [cfg.ae.seed] if hasattr(cfg, "ae") else []
    _write_manifest(_manifest_path(args, args.output), "denoise", argv, config,
                    {"input": args.input, **({"clean": args.clean} if args.clean else {})},
                    outputs, seeds, t0)
    return EXIT_OK


def cmd_entropy_map(args, argv):
    t0 = time.perf_counter()
    spec = EntropySpec(window=args.window, r=args.r, r_mode=args.r_mode)
    img = load_image(args.input)
    emap = entropy_map(img, spec)
    if args.dilate:
        emap = dilate(emap)
    save_image(emap, args.output)
    outputs = {"image": args.output}
    if args.csv:
        np.savetxt(args.csv, emap, delimiter=",", fmt="%.17g")
        outputs["csv"] = args.csv
    config = {**dataclasses.asdict(spec), "window": spec.window.side, "dilate": args.dilate}
    _write_manifest(_manifest_path(args, args.output), "entropy-map", argv, config,
                    {"input": args.input}, outputs, [], t0)
    return EXIT_OK


def cmd_ssim(args, argv):
    clean, restored = load_image(args.clean), load_image(args.restored)
    if clean.shape != restored.shape:
        raise UsageError(f"dimension mismatch: {clean.shape} vs {restored.shape}")
    report = build_report(clean, restored, EntropySpec(), SsimSpec(window=args.window),
                          provenance={"clean": args.clean, "restored": args.restored})
    text = report.to_json(indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def _bench_image(name):
    if name == "lena":
        return lena()
    if name == "cap-edge":
        return cap_edge()
    return load_image(name)


def cmd_bench(args, argv):
    t0 = time.perf_counter()
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    seeds = list(range(args.seed_base, args.seed_base + args.seeds))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    maps = not args.no_maps
    progress = log.info
    if args.suite == "curves":
        image = args.image or "cap-edge"
        clean = _bench_image(image)
        rows = curves(clean, seeds, model=args.model or "interval", maps=maps, progress=progress)
        config = {"image": image, "model": args.model or "interval", "maps": maps}
    else:
        image = args.image or "lena"
        clean = _bench_image(image)
        model = args.model or ("fixed" if args.suite == "table4" else "interval")
        if args.config:
            _, mcfg = _resolve_config(argparse.Namespace(config=args.config, scheme="mfs-ae", seed=None))
        else:
            _, mcfg = load_preset("table3")
        rows = lena_scores(clean, seeds, model=model, level=args.level, cfg=mcfg, maps=maps,
                           experiment=args.suite, progress=progress)
        config = {"image": image, "model": model, "mu_sp": args.level, "maps": maps,
                  "scheme": config_to_dict("mfs-ae", mcfg)}
    rows = sort_rows(rows)
    stem = out / args.suite
    write_csv(rows, f"{stem}.csv")
    aggs = aggregate(rows)
    write_csv(aggs, f"{stem}_summary.csv", columns=list(aggs[0].keys()))
    outputs = {"rows": f"{stem}.csv", "summary": f"{stem}_summary.csv"}
    if args.suite != "curves":
        doc = {"suite": args.suite, "model": config["model"], "mu_sp": args.level, "seeds": seeds,
               "schemes": summary(rows)}
        Path(f"{stem}.json").write_text(json.dumps(doc, indent=2) + "\n")
        outputs["json"] = f"{stem}.json"
        for name, agg in doc["schemes"].items():
            print(f"{name:8s} ssim_img {agg['ssim_img_mean']:.4f} +/- {agg['ssim_img_std']:.4f}")
    if not args.no_plots:
        from .plotting import plot_curves, plot_scores

        figs = plot_curves(rows, out, args.suite) if args.suite == "curves" else \
            plot_scores(rows, out, args.suite)
        for i, p in enumerate(figs):
            outputs[f"figure_{i}"] = p
    _write_manifest(_manifest_path(args, stem), "bench", argv, config, {"image": image},
                    outputs, seeds, t0)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spdenoise",
                                description="Salt-and-pepper denoising with median filters and autoencoders.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--manifest", help="manifest path (default: <output>.manifest.json)")

    sp = sub.add_parser("noise", help="inject salt-and-pepper noise")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--model", choices=("interval", "fixed"), default="interval")
    sp.add_argument("--level", type=float, required=True, help="percent of corrupted pixels")
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_noise)

    sp = sub.add_parser("denoise", help="restore an image with one scheme")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--scheme", choices=SCHEMES)
    sp.add_argument("--config", help="JSON config file or preset name (" + ", ".join(preset_names()) + ")")
    sp.add_argument("--clean", help="reference image; enables the SSIM report")
    sp.add_argument("--report", help="report path (default: <output>.report.json)")
    sp.add_argument("--seed", type=int, default=None, help="override the AE seed")
    common(sp)
    sp.set_defaults(func=cmd_denoise)

    sp = sub.add_parser("entropy-map", help="export the normalized entropy map")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--dilate", action="store_true", help="5x5 grey dilation, one iteration")
    sp.add_argument("--csv", help="full-precision CSV of the map")
    sp.add_argument("--window", type=int, default=5)
    sp.add_argument("--r", type=float, default=0.2)
    sp.add_argument("--r-mode", choices=("std", "absolute"), default="std")
    common(sp)
    sp.set_defaults(func=cmd_entropy_map)

    sp = sub.add_parser("ssim", help="SSIM report for a clean/restored pair")
    sp.add_argument("clean")
    sp.add_argument("restored")
    sp.add_argument("--window", type=int, default=7)
    sp.add_argument("--out", help="also write the JSON report here")
    sp.set_defaults(func=cmd_ssim)

    sp = sub.add_parser("bench", help="benchmark sweeps with CSV/JSON and PNG figures")
    sp.add_argument("--suite", choices=("curves", "table4", "fig12"), required=True)
    sp.add_argument("--seeds", type=int, default=5, help="number of seeds")
    sp.add_argument("--seed", dest="seed_base", type=int, default=0, help="first seed")
    sp.add_argument("--out", default="bench_out")
    sp.add_argument("--image", help="lena, cap-edge or an image path")
    sp.add_argument("--model", choices=("interval", "fixed"))
    sp.add_argument("--level", type=float, default=LENA_LEVEL, help="noise level for table4/fig12")
    sp.add_argument("--config", help="mfs-ae config for table4/fig12 (default: table3 preset)")
    sp.add_argument("--no-maps", action="store_true", help="skip entropy-map scores")
    sp.add_argument("--no-plots", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args, argv)
    except (ImageFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, UsageError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
