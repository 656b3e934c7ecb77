"""Command-line front end: build/sample/decode/analyze/footprint workflows.

Configuration is a flat key=value text file; command-line flags override
file values and unknown keys are rejected.  Every output embeds the fully
resolved configuration and seed as header comments, so any artifact can be
reproduced standalone.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import analysis
from . import dem as demlib
from . import decoder as declib
from . import sampler as samplib
from .arch import ArchitectureParams, CodeVariant, MemoryBasis, chip_area, footprint
from .builder import build_memory_experiment, default_rounds
from .circuit import emit as emit_circuit, parse as parse_circuit
from .noise import IdleDuringSwaps, NoiseParams

_CHUNK = 1 << 16  # shots per sample/decode chunk inside `memory`


def _parse_int_list(s: str) -> list[int]:
    return [int(tok) for tok in s.split(",") if tok]


def _parse_float_list(s: str) -> list[float]:
    return [float(tok) for tok in s.split(",") if tok]


# key -> (parser, default); None defaults are resolved downstream.
_CONFIG_KEYS = {
    "nx": (int, 2),
    "ny": (int, 3),
    "d": (_parse_int_list, [3]),
    "variant": (str, "xzzx"),
    "basis": (str, ""),  # comma list; empty = variant default
    "p": (_parse_float_list, [0.001]),
    "eta": (float, 100.0),
    "xi_reset": (float, 7.0),
    "idle_during_swaps": (str, "per_step"),
    "swap_rate_override": (float, None),
    "rounds": (int, None),
    "shots": (int, 20_000_000),
    "max_failures": (int, 100_000),
    "seed": (int, 0),
    "out": (str, None),
    "workers": (int, None),
}


class ConfigError(ValueError):
    pass


def load_config(path: str | None, overrides: dict) -> dict:
    """Resolve defaults <- config file <- CLI flags; reject unknown keys."""
    config = {k: default for k, (_, default) in _CONFIG_KEYS.items()}
    if path is not None:
        with open(path) as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_KEYS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                parser = _CONFIG_KEYS[key][0]
                try:
                    config[key] = parser(value.strip())
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        config[key] = value
    if config["workers"] is None:
        config["workers"] = int(os.environ.get("SPINHEX_WORKERS", "1"))
    if not config["basis"]:
        config["basis"] = "h,v" if config["variant"] == "xzzx" else "z,x"
    for key in ("d", "p"):
        if not config[key]:
            raise ConfigError(f"config key {key!r} must be a nonempty list")
    return config


def _bases(config: dict) -> list[MemoryBasis]:
    return [MemoryBasis(tok.strip().lower()) for tok in config["basis"].split(",") if tok.strip()]


def _noise(config: dict) -> NoiseParams:
    return NoiseParams(
        p=config["_p"],
        eta=config["eta"],
        xi_reset=config["xi_reset"],
        idle_during_swaps=IdleDuringSwaps(config["idle_during_swaps"]),
        swap_rate_override=config["swap_rate_override"],
    )


def _arch(config: dict, d: int, basis: MemoryBasis) -> ArchitectureParams:
    return ArchitectureParams(
        n_x=config["nx"],
        n_y=config["ny"],
        distance=d,
        variant=CodeVariant(config["variant"]),
        basis=basis,
    )


def _config_header(config: dict) -> str:
    parts = []
    for key in sorted(_CONFIG_KEYS):
        value = config[key]
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        parts.append(f"{key}={value}")
    return " ".join(parts)


def _single(config: dict, what: str):
    values = config[what]
    if len(values) != 1:
        raise ConfigError(f"subcommand needs exactly one value for {what!r}, got {values}")
    return values[0]


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as f:
            f.write(text)


def _built_circuit(config: dict):
    d = _single(config, "d")
    bases = _bases(config)
    if len(bases) != 1:
        raise ConfigError(f"subcommand needs exactly one basis, got {config['basis']}")
    config["_p"] = _single(config, "p")
    arch = _arch(config, d, bases[0])
    rounds = config["rounds"] if config["rounds"] is not None else default_rounds(d)
    return build_memory_experiment(arch, _noise(config), rounds), rounds


def cmd_build(config: dict) -> None:
    circuit, _ = _built_circuit(config)
    text = f"# spinhex build {_config_header(config)}\n" + emit_circuit(circuit)
    _write_or_print(text, config["out"])


def cmd_dem(config: dict) -> None:
    circuit, _ = _built_circuit(config)
    model = demlib.build_dem(circuit)
    text = f"# spinhex dem {_config_header(config)}\n" + demlib.emit(model)
    _write_or_print(text, config["out"])


def cmd_sample(config: dict) -> None:
    circuit, _ = _built_circuit(config)
    if config["out"] is None:
        raise ConfigError("sample requires out=<path> for the bit file")
    result = samplib.sample(
        circuit, config["shots"], config["seed"], workers=config["workers"]
    )
    samplib.write_bits(result, config["out"], extra=_config_header(config))


def cmd_decode(config: dict, dem_path: str, bits_path: str) -> None:
    with open(dem_path) as f:
        model = demlib.parse(f.read())
    graph = declib.build_matching_graph(model)
    result = samplib.read_bits(bits_path)
    failures = declib.logical_error_count(result, graph)
    print(f"shots {result.shots} failures {failures}")


def cmd_memory(config: dict) -> None:
    rows = []
    header = f"spinhex memory {_config_header(config)}"
    variant = CodeVariant(config["variant"])
    for basis in _bases(config):
        for d in config["d"]:
            rounds = config["rounds"] if config["rounds"] is not None else default_rounds(d)
            for p in config["p"]:
                config["_p"] = p
                arch = _arch(config, d, basis)
                circuit = build_memory_experiment(arch, _noise(config), rounds)
                graph = declib.build_matching_graph(demlib.build_dem(circuit))
                shots_done = 0
                failures = 0
                while shots_done < config["shots"] and failures < config["max_failures"]:
                    chunk = min(_CHUNK, config["shots"] - shots_done)
                    result = samplib.sample(
                        circuit,
                        chunk,
                        config["seed"],
                        first_shot=shots_done,
                        check=(shots_done == 0),
                        workers=config["workers"],
                    )
                    failures += declib.logical_error_count(result, graph)
                    shots_done += chunk
                point = analysis.CurvePoint.from_counts(
                    p=p, d=d, rounds=rounds, shots=shots_done, failures=failures
                )
                rows.append(
                    {
                        "variant": variant.value,
                        "basis": basis.value,
                        "nx": config["nx"],
                        "ny": config["ny"],
                        "d": d,
                        "p": p,
                        "eta": config["eta"],
                        "rounds": rounds,
                        "shots": shots_done,
                        "failures": failures,
                        "pl_round": point.p_L_round,
                        "ci_low": point.ci_low,
                        "ci_high": point.ci_high,
                    }
                )
                if config["out"] is not None:
                    # rewrite after every point so long sweeps are inspectable
                    analysis.write_csv(config["out"], rows, header)
    if config["out"] is None:
        analysis.write_csv("/dev/stdout", rows, header)
    else:
        analysis.write_csv(config["out"], rows, header)


def cmd_threshold(csv_paths: list[str]) -> None:
    rows = []
    for path in csv_paths:
        rows.extend(analysis.read_csv(path))
    estimate = analysis.threshold_estimate(analysis.aggregate_curve(rows))
    print(f"threshold {estimate.value:.6f} +- {estimate.uncertainty:.6f}")
    for crossing in estimate.crossings:
        print(f"crossing {crossing:.6f}")


def cmd_fit(csv_paths: list[str]) -> None:
    rows = []
    for path in csv_paths:
        rows.extend(analysis.read_csv(path))
    ps = sorted({r["p"] for r in rows})
    for p in ps:
        pts = [(r["d"], r["pl_round"]) for r in rows if r["p"] == p]
        projection = analysis.fit_and_project(pts)
        cells = " ".join(
            f"target={target:g} d={dist}" for target, dist in projection.items()
        )
        print(f"p={p:g} {cells}")


def cmd_footprint(config: dict, n_logical: int, overhead: float) -> None:
    d = _single(config, "d")
    bases = _bases(config)
    arch = _arch(config, d, bases[0])
    report = footprint(arch)
    print(f"# spinhex footprint {_config_header(config)}")
    for key, value in report.as_dict().items():
        print(f"{key} {value}")
    area = chip_area(arch, n_logical, overhead)
    print(f"chip_area_cm2 n_logical={n_logical} overhead={overhead} {area}")


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="flat key=value config file")
    sub.add_argument("--nx", type=int)
    sub.add_argument("--ny", type=int)
    sub.add_argument("--d", type=_parse_int_list)
    sub.add_argument("--variant", choices=["xzzx", "css"])
    sub.add_argument("--basis", help="comma list: h,v (xzzx) or z,x (css)")
    sub.add_argument("--p", type=_parse_float_list)
    sub.add_argument("--eta", type=float)
    sub.add_argument("--xi-reset", dest="xi_reset", type=float)
    sub.add_argument(
        "--idle-during-swaps",
        dest="idle_during_swaps",
        choices=["per_step", "single"],
    )
    sub.add_argument("--swap-rate-override", dest="swap_rate_override", type=float)
    sub.add_argument("--rounds", type=int)
    sub.add_argument("--shots", type=int)
    sub.add_argument("--max-failures", dest="max_failures", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", type=str)
    sub.add_argument("--workers", type=int)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinhex",
        description="SpinHex surface-code memory experiments",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("build", "dem", "sample", "memory"):
        _add_config_flags(subs.add_parser(name))

    dec = subs.add_parser("decode")
    dec.add_argument("--dem", required=True, help="DEM text file")
    dec.add_argument("--bits", required=True, help="sampled bit file")

    thr = subs.add_parser("threshold")
    thr.add_argument("csv", nargs="+")

    fit = subs.add_parser("fit")
    fit.add_argument("csv", nargs="+")

    foot = subs.add_parser("footprint")
    _add_config_flags(foot)
    foot.add_argument("--logical", type=int, default=1)
    foot.add_argument("--overhead", type=float, default=1.0)

    args = parser.parse_args(argv)
    try:
        if args.command == "decode":
            cmd_decode({}, args.dem, args.bits)
            return 0
        if args.command == "threshold":
            cmd_threshold(args.csv)
            return 0
        if args.command == "fit":
            cmd_fit(args.csv)
            return 0
        overrides = {
            k: getattr(args, k) for k in _CONFIG_KEYS if hasattr(args, k)
        }
        config = load_config(args.config, overrides)
        if args.command == "build":
            cmd_build(config)
        elif args.command == "dem":
            cmd_dem(config)
        elif args.command == "sample":
            cmd_sample(config)
        elif args.command == "memory":
            cmd_memory(config)
        elif args.command == "footprint":
            cmd_footprint(config, args.logical, args.overhead)
        else:
            raise AssertionError(args.command)
        return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
