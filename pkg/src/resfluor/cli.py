"""Command-line interface.

Subcommands: spectrum (closed-form line sets and sampled spectra), oracle
(master-equation spectra), figures (the three reference datasets), validate
(self-check suites), fit and infer (parameter recovery from spectrum files).

Exit codes: 0 success, 1 validation failure, 2 invalid input, 3 fit or
inference failure, 4 numerical failure.  Every run is deterministic given
its flags; noise is only ever injected through an explicit --seed.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from importlib.metadata import version as _dist_version
from pathlib import Path

import numpy as np

from . import checks, inference
from .analytic import (LineSpectrum, SampledSpectrum, evaluate_spectrum,
                       general_lines, mollow_limit_lines, three_atom_lines,
                       two_atom_lines)
from .core import SecularRegimeWarning, SystemParams, make_params
from .io import (GridSpec, ParseError, read_spectrum, write_lines,
                 write_spectrum)
from .liouville import (LiouvilleError, bare_spectrum_oracle,
                        dressed_spectrum_oracle)

__all__ = ["main", "entry"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVALID = 2
EXIT_INFERENCE = 3
EXIT_NUMERICAL = 4

_MODELS = {
    "general": general_lines,
    "mollow": mollow_limit_lines,
    "n2": two_atom_lines,
    "n3": three_atom_lines,
}

_FIGURES = {
    # caption parameters: (N, rabi, dd_coupling)
    1: (2, 50.0, 20.0),
    2: (3, 50.0, 20.0),
    3: (5, 100.0, 60.0),
}


def _tool_version() -> str:
    try:
        return _dist_version("resfluor")
    except Exception:
        return "unknown"


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="number of emitters N")
    p.add_argument("--rabi", type=float, required=True, help="drive strength, units of gamma")
    p.add_argument("--dd", type=float, default=0.0, help="dipole-dipole coupling, units of gamma")
    p.add_argument("--detuning", type=float, default=0.0, help="drive detuning, units of gamma")


def _add_grid_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", type=str, default=None, metavar="LO:HI:POINTS",
                   help="evaluation grid (default: symmetric, +-(2*rabi+dd+20), 4001 points)")


def _parse_grid(arg: str | None, params: SystemParams) -> GridSpec:
    if arg is None:
        hi = 2.0 * params.rabi + params.dd_coupling + 20.0 * params.gamma
        return GridSpec(-hi, hi, 4001)
    parts = arg.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be LO:HI:POINTS, got {arg!r}")
    return GridSpec(float(parts[0]), float(parts[1]), int(parts[2]))


def _params_from_args(args) -> SystemParams:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SecularRegimeWarning)
        params = make_params(args.n, args.rabi, args.dd, args.detuning)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return params


def _provenance(args, generator: str, params: SystemParams) -> dict:
    return {
        "generator": generator,
        "version": _tool_version(),
        "params": (f"n_emitters={params.n_emitters} rabi={_fmt(params.rabi)} "
                   f"dd_coupling={_fmt(params.dd_coupling)} "
                   f"detuning={_fmt(params.detuning)}"),
    }


def _peaks_to_lines(peaks) -> list:
    return [inference.SpectralLine(pk.location, pk.half_width,
                                   pk.height * pk.half_width) for pk in peaks]


# --------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args) -> int:
    params = _params_from_args(args)
    lines = _MODELS[args.model](params)
    grid = _parse_grid(args.grid, params)
    spectrum = evaluate_spectrum(lines, grid.array())
    if args.noise > 0:
        spectrum = inference.add_multiplicative_noise(spectrum, args.noise, args.seed)
    prov = _provenance(args, f"spectrum --model {args.model}", params)
    if args.noise > 0:
        prov["noise"] = f"level={_fmt(args.noise)} seed={args.seed}"
    write_spectrum(spectrum, args.out, provenance=prov)
    write_lines(lines, args.lines_out, provenance=prov)
    print(f"wrote {len(lines)} lines to {args.lines_out} and "
          f"{len(spectrum)} samples to {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    params = _params_from_args(args)
    grid = _parse_grid(args.grid, params)
    if args.frame == "secular":
        spectrum = dressed_spectrum_oracle(params, grid.array())
    else:
        spectrum = bare_spectrum_oracle(params, grid.array())
    prov = _provenance(args, f"oracle --frame {args.frame}", params)
    write_spectrum(spectrum, args.out, provenance=prov)
    print(f"wrote {len(spectrum)} samples to {args.out}")
    return EXIT_OK


def cmd_figures(args) -> int:
    n, rabi, dd = _FIGURES[args.which]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = make_params(n, rabi, dd, 0.0)
    lines = general_lines(params)
    hi = 2.0 * params.rabi + params.dd_coupling + 20.0
    grid = np.linspace(-hi, hi, 4001)
    spectrum = evaluate_spectrum(lines, grid)
    scaled = SampledSpectrum(grid=grid, values=spectrum.values / n ** 2)
    out = Path(args.out_dir) / f"fig{args.which}.csv"
    prov = _provenance(args, f"figures --which {args.which}", params)
    prov["normalization"] = "intensity divided by N^2"
    write_spectrum(scaled, out, provenance=prov)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    results = checks.run_suite(args.suite)
    report = "\n".join(r.line() for r in results)
    print(report)
    if args.report:
        Path(args.report).write_text(report + "\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_VALIDATION


def cmd_fit(args) -> int:
    spectrum = read_spectrum(args.infile)
    peaks = inference.detect_peaks(spectrum, args.prominence)
    if not peaks:
        print("error: no peaks found; nothing to fit", file=sys.stderr)
        return EXIT_INFERENCE
    fit = inference.fit_lorentzians(spectrum, _peaks_to_lines(peaks),
                                    max_iter=args.max_iter, tol=args.tol)
    print(f"converged: {str(fit.converged).lower()}")
    print(f"iterations: {fit.iterations}")
    print(f"residual: {_fmt(fit.residual_norm)}")
    for ln in fit.lines:
        print(f"line: center={_fmt(ln.center)} half_width={_fmt(ln.half_width)} "
              f"weight={_fmt(ln.weight)}")
    return EXIT_OK if fit.converged else EXIT_INFERENCE


def cmd_infer(args) -> int:
    spectrum = read_spectrum(args.infile)
    peaks = inference.detect_peaks(spectrum, args.prominence)
    if not peaks:
        print("error: no peaks found", file=sys.stderr)
        return EXIT_INFERENCE
    fit = inference.fit_lorentzians(spectrum, _peaks_to_lines(peaks),
                                    max_iter=args.max_iter, tol=args.tol)
    if not fit.converged:
        print("error: line fit did not converge", file=sys.stderr)
        return EXIT_INFERENCE
    try:
        result = inference.infer_parameters(fit)
    except inference.InferenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.merged_proxy:
            try:
                proxy, _ = inference.merged_regime_proxy(spectrum)
                print(f"merged_regime_coupling_proxy: {_fmt(proxy)}")
            except inference.InferenceError as exc2:
                print(f"error: merged-regime proxy failed: {exc2}", file=sys.stderr)
        return EXIT_INFERENCE
    print(f"n_hat: {result.n_hat}")
    print(f"delta_hat: {_fmt(result.delta_hat)}")
    print(f"omega_hat: {_fmt(result.omega_hat)}")
    print(f"delta_hat_spacing: {_fmt(result.delta_hat_spacing)}")
    print(f"distinguishability: {_fmt(result.distinguishability)}")
    print(f"flags: {','.join(result.flags) if result.flags else 'none'}")
    print(f"fit_residual: {_fmt(fit.residual_norm)}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resfluor",
        description="Collective resonance fluorescence spectra of coupled "
                    "two-level emitters, and the inverse problem.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="closed-form line set and sampled spectrum")
    _add_param_flags(p)
    p.add_argument("--model", choices=sorted(_MODELS), default="general")
    _add_grid_flag(p)
    p.add_argument("--out", default="spectrum.csv", help="sampled-spectrum output path")
    p.add_argument("--lines-out", default="lines.json", help="line-set output path")
    p.add_argument("--noise", type=float, default=0.0,
                   help="multiplicative Gaussian noise level")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("oracle", help="numeric master-equation spectrum")
    _add_param_flags(p)
    p.add_argument("--frame", choices=("secular", "bare"), required=True)
    _add_grid_flag(p)
    p.add_argument("--out", default="oracle.csv", help="output path")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("figures", help="reference figure datasets (S/N^2)")
    p.add_argument("--which", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--out-dir", default=".", help="output directory")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("validate", help="run self-check suites")
    p.add_argument("--suite", choices=("algebra", "appendix", "oracle",
                                       "inference", "all"), default="all")
    p.add_argument("--report", default=None, help="also write the report here")
    p.set_defaults(func=cmd_validate)

    for name, func, help_text in (("fit", cmd_fit, "fit Lorentzians to a spectrum file"),
                                  ("infer", cmd_infer, "recover N, coupling and drive")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--in", dest="infile", required=True, help="spectrum file")
        p.add_argument("--prominence", type=float, default=inference.DEFAULT_PROMINENCE,
                       help="peak prominence threshold, fraction of the maximum")
        p.add_argument("--max-iter", type=int, default=200)
        p.add_argument("--tol", type=float, default=1e-10)
        if name == "infer":
            p.add_argument("--merged-proxy", action="store_true",
                           help="on failure, report the merged-regime coupling proxy")
        p.set_defaults(func=func)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help; keep its convention
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (inference.InferenceError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFERENCE
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (LiouvilleError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
