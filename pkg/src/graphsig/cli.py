"""Command line front end.

Exit codes: 0 on success, 1 for usage problems (bad flags, missing files),
2 when a toolbox operation raises one of its typed errors.  Every successful
run writes a JSON manifest next to its primary output (override with
``--manifest``) recording the exact argument vector, resolved parameters,
output paths and headline numbers; ``graphsig rerun <manifest>`` replays the
stored argument vector, reproducing the outputs bit for bit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import io as gio
from .exceptions import BadParameter, GraphSigError
from .filters import design as design_bank
from .filters import filter_analysis, filter_synthesis, frame_bounds
from .generators import (comet, community, erdos_renyi, grid2d, path, ring,
                         sbm, sensor, swiss_roll, two_moons)
from .graphs import LaplacianKind
from .optimize import prox_tv, snr, solve_bpdn, tik_denoise, wavelet_denoise
from .plotting import PlotStyle, export_graph_dot, export_graph_svg, \
    export_filter_svg
from .pyramid import graph_multiresolution, pyramid_analysis, pyramid_synthesis
from .spectral import compute_fourier_basis, estimate_lmax


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _manifest_path(primary_out: str, override: Optional[str]) -> str:
    if override:
        return override
    base, _ = os.path.splitext(primary_out)
    return base + ".manifest.json"


def _write_manifest(args, argv: List[str], primary_out: str,
                    parameters: dict, outputs: List[str],
                    results: Optional[dict] = None) -> str:
    payload = {
        "tool": "graphsig",
        "command": args.command,
        "argv": list(argv),
        "parameters": parameters,
        "outputs": [str(p) for p in outputs],
    }
    if results:
        payload["results"] = results
    mpath = _manifest_path(primary_out, getattr(args, "manifest", None))
    with open(mpath, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return mpath


def _parse_directed(raw: str):
    return {"auto": "auto", "true": True, "false": False}[raw]


def _load_graph(args):
    kind = getattr(args, "kind", None)
    return gio.load_graph(args.graph, directed=_parse_directed(args.directed),
                          kind=kind)


def _require_file(path: str) -> str:
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    return path


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def _cmd_generate(args, argv):
    kind = args.kind
    seed = args.seed
    if kind == "ring":
        G = ring(args.n)
    elif kind == "path":
        G = path(args.n)
    elif kind == "comet":
        G = comet(args.tail, args.star_degree)
    elif kind == "grid2d":
        G = grid2d(args.rows, args.cols)
    elif kind == "erdos_renyi":
        G = erdos_renyi(args.n, args.p, seed=seed)
    elif kind == "sensor":
        G = sensor(args.n, seed=seed, k=args.k)
    elif kind == "community":
        G = community(args.n, args.communities, seed=seed)
    elif kind == "sbm":
        blocks = [int(b) for b in args.blocks.split(",") if b.strip()]
        G = sbm(blocks, args.p_in, args.p_out, seed=seed,
                n=args.n if args.n > 0 else None)
    elif kind == "swiss_roll":
        G = swiss_roll(args.n, seed=seed, noise=args.noise, k=args.k)
    elif kind == "two_moons":
        G = two_moons(args.n, seed=seed, noise=args.noise,
                      radius=args.radius, k=args.k)
    else:  # pragma: no cover - argparse restricts choices
        raise BadParameter(f"unknown graph kind {kind!r}")
    outputs = gio.save_graph(args.out, G)
    params = {"kind": kind, "n": G.N, "seed": seed}
    results = {"vertices": G.N, "edges": G.Ne}
    _write_manifest(args, argv, args.out, params, outputs, results)
    return 0


# ---------------------------------------------------------------------------
# laplacian / fourier
# ---------------------------------------------------------------------------

def _cmd_laplacian(args, argv):
    if not args.out and not args.out_eigenvalues:
        raise _UsageError("laplacian needs --out and/or --out-eigenvalues")
    _require_file(args.graph)
    G = _load_graph(args)
    outputs = []
    results = {"kind": G.lap_kind.value, "vertices": G.N, "edges": G.Ne}
    if args.out:
        gio.save_sparse_matrix(args.out, G.L)
        outputs.append(args.out)
    if args.out_eigenvalues:
        S = compute_fourier_basis(G)
        gio.save_signal(args.out_eigenvalues, S.e)
        outputs.append(args.out_eigenvalues)
        results["lmax"] = S.lmax
    primary = args.out or args.out_eigenvalues
    _write_manifest(args, argv, primary,
                    {"kind": G.lap_kind.value, "directed": G.directed},
                    outputs, results)
    return 0


def _cmd_fourier(args, argv):
    if not args.out_eigenvalues and not args.out_basis:
        raise _UsageError("fourier needs --out-eigenvalues and/or --out-basis")
    _require_file(args.graph)
    G = _load_graph(args)
    S = compute_fourier_basis(G)
    outputs = []
    if args.out_eigenvalues:
        gio.save_signal(args.out_eigenvalues, S.e)
        outputs.append(args.out_eigenvalues)
    if args.out_basis:
        gio.save_signal(args.out_basis, S.U)
        outputs.append(args.out_basis)
    primary = args.out_eigenvalues or args.out_basis
    results = {"lmax": S.lmax, "coherence": S.mu,
               "kind": G.lap_kind.value}
    _write_manifest(args, argv, primary, {"kind": G.lap_kind.value},
                    outputs, results)
    return 0


# ---------------------------------------------------------------------------
# filter banks
# ---------------------------------------------------------------------------

_DESIGN_FLAGS = {
    "heat": {"tau": "tau"},
    "mexican_hat": {"scales": "n_scales"},
    "itersine": {"filters": "n_filters"},
    "regular": {"degree": "degree"},
    "gabor": {"shifts": "n_shifts", "width": "width"},
    "expwin": {"band": "band", "transition": "transition"},
    "warped_translates": {"filters": "n_filters"},
}


def _design_params(args) -> dict:
    mapping = _DESIGN_FLAGS.get(args.design, {})
    params = {}
    for flag, kwarg in mapping.items():
        val = getattr(args, flag, None)
        if val is not None:
            params[kwarg] = val
    return params


def _build_bank(args, G):
    if getattr(args, "bank", None):
        return gio.load_filter_bank(_require_file(args.bank))
    if args.design == "warped_translates":
        compute_fourier_basis(G)
        return design_bank(args.design, G, **_design_params(args))
    if args.method == "exact":
        compute_fourier_basis(G)
    estimate_lmax(G)
    return design_bank(args.design, G, **_design_params(args))


def _cmd_filter(args, argv):
    _require_file(args.graph)
    _require_file(args.signal)
    G = _load_graph(args)
    f = gio.load_signal(args.signal)
    bank = _build_bank(args, G)
    if args.method == "exact":
        compute_fourier_basis(G)
    else:
        estimate_lmax(G)
    coef = filter_analysis(G, bank, f, method=args.method, order=args.order)
    gio.save_signal(args.out, coef)
    outputs = [args.out]
    if args.save_bank:
        gio.save_filter_bank(args.save_bank, bank)
        outputs.append(args.save_bank)
    a, b = frame_bounds(bank)
    params = {"design": args.design if not args.bank else "from-file",
              "method": args.method, "order": args.order,
              "kernels": len(bank)}
    results = {"frame_lower": a, "frame_upper": b, "lmax": bank.lmax}
    _write_manifest(args, argv, args.out, params, outputs, results)
    return 0


# ---------------------------------------------------------------------------
# pyramid
# ---------------------------------------------------------------------------

def _cmd_pyramid_analyze(args, argv):
    _require_file(args.graph)
    _require_file(args.signal)
    G = _load_graph(args)
    f = gio.load_signal(args.signal)
    mr = graph_multiresolution(G, args.levels, alpha=args.alpha,
                               epsilon=args.epsilon)
    pyr = pyramid_analysis(mr, f)
    outputs = gio.save_pyramid(args.out, mr, pyr, signal=f)
    params = {"levels": args.levels, "alpha": args.alpha,
              "epsilon": args.epsilon}
    results = {"level_sizes": mr.level_sizes(),
               "fallback_levels": mr.fallback_levels}
    _write_manifest(args, argv, os.path.join(args.out, "run"),
                    params, outputs, results)
    return 0


def _cmd_pyramid_synthesize(args, argv):
    _require_file(args.graph)
    if not os.path.isdir(args.pyramid_dir):
        raise FileNotFoundError(f"no such directory: {args.pyramid_dir}")
    G = _load_graph(args)
    mr, pyr, signal = gio.load_pyramid(args.pyramid_dir, G)
    rec = pyramid_synthesis(mr, pyr)
    gio.save_signal(args.out, rec)
    results = {"level_sizes": mr.level_sizes()}
    if signal is not None:
        results["max_abs_diff"] = float(np.max(np.abs(rec - signal)))
    _write_manifest(args, argv, args.out,
                    {"alpha": mr.alpha, "epsilon": mr.epsilon},
                    [args.out], results)
    return 0


# ---------------------------------------------------------------------------
# denoise
# ---------------------------------------------------------------------------

def _cmd_denoise(args, argv):
    _require_file(args.graph)
    _require_file(args.signal)
    G = _load_graph(args)
    y = gio.load_signal(args.signal)
    outputs = [args.out]
    params = {"solver": args.solver}
    if args.solver == "tv":
        x, report = prox_tv(G, y, args.gamma, max_iter=args.max_iter,
                            tol=args.tol)
        params["gamma"] = args.gamma
    elif args.solver == "tik":
        x, report = tik_denoise(G, y, args.gamma)
        params["gamma"] = args.gamma
    elif args.solver == "wavelet":
        bank = _build_bank(args, G)
        if args.method == "exact":
            compute_fourier_basis(G)
        else:
            estimate_lmax(G)
        x, report = wavelet_denoise(G, bank, y, args.tau,
                                    method=args.method, order=args.order)
        params.update({"tau": args.tau, "design": args.design,
                       "method": args.method})
    elif args.solver == "bpdn":
        bank = _build_bank(args, G)
        if args.method == "exact":
            compute_fourier_basis(G)
        else:
            estimate_lmax(G)
        mask = None
        if args.mask:
            mask = gio.load_signal(_require_file(args.mask)) > 0.5
        coef, report = solve_bpdn(G, bank, y, lam=args.lam, mask=mask,
                                  max_iter=args.max_iter, tol=args.tol,
                                  method=args.method, order=args.order)
        x = filter_synthesis(G, bank, coef, method=args.method,
                             order=args.order)
        if args.out_coefficients:
            gio.save_signal(args.out_coefficients, coef)
            outputs.append(args.out_coefficients)
        params.update({"lam": args.lam, "design": args.design,
                       "method": args.method})
    else:  # pragma: no cover - argparse restricts choices
        raise BadParameter(f"unknown solver {args.solver!r}")
    gio.save_signal(args.out, x)
    if args.report:
        gio.save_report(args.report, report)
        outputs.append(args.report)
    results = {"iterations": report.iterations,
               "objective": report.objective,
               "converged": report.converged,
               "snr_vs_input": snr(y, x) if np.asarray(y).ndim == 1 else None}
    _write_manifest(args, argv, args.out, params, outputs, results)
    return 0


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------

def _style_from_args(args) -> Optional[PlotStyle]:
    overrides = {}
    if args.width:
        overrides["width"] = args.width
    if args.height:
        overrides["height"] = args.height
    if args.colormap:
        overrides["colormap"] = args.colormap
    return PlotStyle(**overrides) if overrides else None


def _cmd_plot_graph(args, argv):
    _require_file(args.graph)
    G = _load_graph(args)
    signal = gio.load_signal(_require_file(args.signal)) if args.signal \
        else None
    ext = os.path.splitext(args.out)[1].lower()
    fmt = args.format or ("dot" if ext == ".dot" else "svg")
    if fmt == "dot":
        export_graph_dot(G, path=args.out)
    else:
        export_graph_svg(G, signal=signal, style=_style_from_args(args),
                         path=args.out)
    _write_manifest(args, argv, args.out,
                    {"format": fmt, "signal": bool(args.signal)},
                    [args.out], {"vertices": G.N, "edges": G.Ne})
    return 0


def _cmd_plot_filters(args, argv):
    if args.graph:
        _require_file(args.graph)
        G = _load_graph(args)
        if args.design == "warped_translates":
            compute_fourier_basis(G)
        else:
            estimate_lmax(G)
        bank = (gio.load_filter_bank(_require_file(args.bank)) if args.bank
                else design_bank(args.design, G, **_design_params(args)))
    else:
        if args.bank:
            bank = gio.load_filter_bank(_require_file(args.bank))
        elif args.lmax:
            if args.design == "warped_translates":
                raise _UsageError(
                    "warped_translates needs --graph, not --lmax")
            bank = design_bank(args.design, args.lmax,
                               **_design_params(args))
        else:
            raise _UsageError("plot filters needs --graph, --bank or --lmax")
    export_filter_svg(bank, grid_size=args.grid, path=args.out)
    a, b = frame_bounds(bank)
    _write_manifest(args, argv, args.out,
                    {"design": args.design, "kernels": len(bank)},
                    [args.out], {"frame_lower": a, "frame_upper": b})
    return 0


# ---------------------------------------------------------------------------
# rerun
# ---------------------------------------------------------------------------

def _cmd_rerun(args, argv):
    mpath = _require_file(args.manifest_file)
    try:
        with open(mpath, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        stored = list(manifest["argv"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise BadParameter(f"malformed manifest {mpath}: {exc}") from exc
    if stored and stored[0] == "rerun":
        raise BadParameter("refusing to rerun a rerun manifest")
    return main(stored)


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _add_graph_args(p):
    p.add_argument("graph", help="weight matrix in Matrix Market (.mtx)")
    p.add_argument("--directed", choices=["auto", "true", "false"],
                   default="auto", help="directedness of the input matrix")
    p.add_argument("--kind",
                   choices=[k.value for k in LaplacianKind], default=None,
                   help="laplacian to attach (default matches directedness)")


def _add_design_args(p, include_bank=True):
    p.add_argument("--design", default="itersine",
                   choices=sorted(_DESIGN_FLAGS),
                   help="filter bank design")
    if include_bank:
        p.add_argument("--bank", default=None,
                       help="load the bank from a JSON descriptor instead")
    p.add_argument("--tau", type=float, default=None,
                   help="heat diffusion time / shrinkage threshold")
    p.add_argument("--scales", type=int, default=None,
                   help="mexican_hat: number of wavelet scales")
    p.add_argument("--filters", type=int, default=None,
                   help="itersine / warped_translates: number of kernels")
    p.add_argument("--degree", type=int, default=None,
                   help="regular: transition iteration depth")
    p.add_argument("--shifts", type=int, default=None,
                   help="gabor: number of window translates")
    p.add_argument("--width", type=float, default=None,
                   help="gabor: window width")
    p.add_argument("--band", type=float, default=None,
                   help="expwin: passband fraction of lmax")
    p.add_argument("--transition", type=float, default=None,
                   help="expwin: rolloff length as a fraction of the band")
    p.add_argument("--method", choices=["exact", "chebyshev"],
                   default="chebyshev", help="filtering path")
    p.add_argument("--order", type=int, default=30,
                   help="chebyshev polynomial order")


def build_parser() -> _Parser:
    parser = _Parser(prog="graphsig",
                     description="Graph signal processing toolbox")
    parser.add_argument("--manifest", default=None,
                        help="run-manifest path (default: next to the output)")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("generate", help="write a graph from a named family")
    p.add_argument("kind", choices=["ring", "path", "comet", "grid2d",
                                    "erdos_renyi", "sensor", "community",
                                    "sbm", "swiss_roll", "two_moons"])
    p.add_argument("--out", required=True, help="output .mtx path")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--rows", type=int, default=4)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--tail", type=int, default=10)
    p.add_argument("--star-degree", type=int, default=6)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--p-in", type=float, default=0.3)
    p.add_argument("--p-out", type=float, default=0.02)
    p.add_argument("--blocks", default="",
                   help="sbm block sizes, comma separated")
    p.add_argument("--communities", type=int, default=4)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("laplacian", help="build and export a laplacian")
    _add_graph_args(p)
    p.add_argument("--out", default=None, help="laplacian .mtx output")
    p.add_argument("--out-eigenvalues", default=None,
                   help="eigenvalue CSV output (triggers a dense solve)")
    p.set_defaults(func=_cmd_laplacian)

    p = sub.add_parser("fourier", help="dense eigendecomposition")
    _add_graph_args(p)
    p.add_argument("--out-eigenvalues", default=None)
    p.add_argument("--out-basis", default=None,
                   help="CSV of eigenvectors, one per column")
    p.set_defaults(func=_cmd_fourier)

    p = sub.add_parser("filter", help="run a filter bank over a signal")
    _add_graph_args(p)
    p.add_argument("--signal", required=True, help="input signal CSV")
    p.add_argument("--out", required=True, help="coefficient CSV output")
    _add_design_args(p)
    p.add_argument("--save-bank", default=None,
                   help="also write the bank descriptor JSON here")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("pyramid", help="multiresolution analysis/synthesis")
    psub = p.add_subparsers(dest="pyramid_command")
    pa = psub.add_parser("analyze", help="decompose a signal")
    _add_graph_args(pa)
    pa.add_argument("--signal", required=True)
    pa.add_argument("--levels", type=int, default=3)
    pa.add_argument("--alpha", type=float, default=1.0)
    pa.add_argument("--epsilon", type=float, default=0.005)
    pa.add_argument("--out", required=True, help="output directory")
    pa.set_defaults(func=_cmd_pyramid_analyze)
    ps = psub.add_parser("synthesize", help="reconstruct from a directory")
    _add_graph_args(ps)
    ps.add_argument("pyramid_dir", help="directory written by analyze")
    ps.add_argument("--out", required=True, help="reconstruction CSV")
    ps.set_defaults(func=_cmd_pyramid_synthesize)

    p = sub.add_parser("denoise", help="graph-regularized denoising")
    _add_graph_args(p)
    p.add_argument("--signal", required=True, help="noisy signal CSV")
    p.add_argument("--out", required=True, help="denoised signal CSV")
    p.add_argument("--solver", required=True,
                   choices=["tv", "tik", "wavelet", "bpdn"])
    p.add_argument("--gamma", type=float, default=0.5,
                   help="tv/tik regularization strength")
    p.add_argument("--lam", type=float, default=0.1,
                   help="bpdn sparsity weight")
    p.add_argument("--mask", default=None,
                   help="bpdn: CSV of 0/1 observed-vertex flags")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--report", default=None, help="solver report JSON path")
    p.add_argument("--out-coefficients", default=None,
                   help="bpdn: also write the coefficient matrix CSV")
    _add_design_args(p)
    p.set_defaults(func=_cmd_denoise)

    p = sub.add_parser("plot", help="SVG/DOT export")
    plsub = p.add_subparsers(dest="plot_command")
    pg = plsub.add_parser("graph", help="draw a graph")
    _add_graph_args(pg)
    pg.add_argument("--signal", default=None, help="color vertices by this CSV")
    pg.add_argument("--out", required=True, help=".svg or .dot output")
    pg.add_argument("--format", choices=["svg", "dot"], default=None,
                    help="override the extension-derived format")
    pg.add_argument("--width", type=int, default=None)
    pg.add_argument("--height", type=int, default=None)
    pg.add_argument("--colormap", default=None)
    pg.set_defaults(func=_cmd_plot_graph)
    pf = plsub.add_parser("filters", help="draw a filter bank")
    pf.add_argument("--graph", default=None,
                    help="take the spectral interval from this graph")
    pf.add_argument("--directed", choices=["auto", "true", "false"],
                    default="auto")
    pf.add_argument("--kind",
                    choices=[k.value for k in LaplacianKind], default=None)
    pf.add_argument("--lmax", type=float, default=None,
                    help="spectral interval endpoint when no graph is given")
    pf.add_argument("--out", required=True, help=".svg output")
    pf.add_argument("--grid", type=int, default=500,
                    help="evaluation points")
    _add_design_args(pf)
    pf.set_defaults(func=_cmd_plot_filters)

    p = sub.add_parser("rerun", help="replay a run manifest")
    p.add_argument("manifest_file")
    p.set_defaults(func=_cmd_rerun)

    return parser


def main(argv=None) -> int:
    """Parse and dispatch; returns the process exit code."""
    if argv is None:
        argv = sys.argv[1:]
    argv = [str(a) for a in argv]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        code = exc.code
        return 0 if code in (0, None) else 1
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    if args.command == "pyramid" and getattr(args, "pyramid_command", None) \
            is None:
        print("usage error: pyramid needs 'analyze' or 'synthesize'",
              file=sys.stderr)
        return 1
    if args.command == "plot" and getattr(args, "plot_command", None) is None:
        print("usage error: plot needs 'graph' or 'filters'", file=sys.stderr)
        return 1
    try:
        return args.func(args, argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except GraphSigError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:  # pragma: no cover - thin wrapper
    sys.exit(main())
