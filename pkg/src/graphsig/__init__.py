"""graphsig: graph signal processing at desk scale.

Sparse weighted graphs with a family of Laplacians, graph Fourier analysis,
spectral filter banks with Chebyshev acceleration, Kron-reduction
multiresolution pyramids, graph-regularized denoising, and deterministic
SVG/DOT export.  Everything is plain functions over a small set of data
holders; the graph is always the first argument.
"""

from .exceptions import GraphSigError
from .filters import (ChebyshevCoeffs, FilterBank, Kernel, bank_from_descriptor,
                      chebyshev_apply, chebyshev_coeffs, design, expwin,
                      filter_analysis, filter_synthesis, frame_bounds, gabor,
                      heat, itersine, mexican_hat, regular_hp_lp,
                      warped_translates)
from .generators import (comet, community, erdos_renyi, grid2d, nn_graph,
                         patch_graph, path, ring, sbm, sensor, swiss_roll,
                         two_moons)
from .graphs import (DirectedData, Graph, LaplacianKind, graph_from_weights,
                     laplacian, stationary_distribution)
from .operators import IncidenceOperator, div, grad, incidence
from .optimize import (SolverReport, prox_tv, snr, solve_bpdn, tik_denoise,
                       wavelet_denoise)
from .plotting import (PlotStyle, export_filter_svg, export_graph_dot,
                       export_graph_svg)
from .pyramid import (Multiresolution, Pyramid, graph_multiresolution,
                      interpolate, kron_reduce, multiresolution_from_keeps,
                      pyramid_analysis, pyramid_synthesis)
from .spectral import (SpectralData, compute_fourier_basis, estimate_lmax,
                       get_lmax, get_spectral, gft, igft, localize)

__version__ = "0.1.0"

__all__ = [
    "ChebyshevCoeffs", "DirectedData", "FilterBank", "Graph",
    "GraphSigError", "IncidenceOperator", "Kernel", "LaplacianKind",
    "Multiresolution", "PlotStyle", "Pyramid", "SolverReport",
    "SpectralData", "bank_from_descriptor", "chebyshev_apply",
    "chebyshev_coeffs", "comet", "community", "compute_fourier_basis",
    "design", "div", "erdos_renyi", "estimate_lmax", "expwin",
    "export_filter_svg", "export_graph_dot", "export_graph_svg",
    "filter_analysis", "filter_synthesis", "frame_bounds", "gabor",
    "get_lmax", "get_spectral", "gft", "grad", "graph_from_weights",
    "graph_multiresolution", "grid2d", "heat",
    "igft", "incidence", "interpolate", "itersine", "kron_reduce",
    "laplacian", "localize", "mexican_hat", "multiresolution_from_keeps",
    "nn_graph", "patch_graph", "path", "prox_tv", "pyramid_analysis",
    "pyramid_synthesis", "regular_hp_lp", "ring", "sbm", "sensor", "snr",
    "solve_bpdn", "stationary_distribution", "swiss_roll", "tik_denoise",
    "two_moons", "warped_translates", "wavelet_denoise",
]
