"""Transfer (Ruelle) operators of rational maps: closed forms, series, residues, spectra."""

from .config import DEFAULT_CONFIG, RunConfig, load_config
from .errors import RuelleKitError
from .maps import INFINITY, MobiusTransform, RationalMap, conjugate, is_normalized, normalize_fixed, orbit
from .measures import AtomicMeasure, cauchy_transform, convergence_report, measure_from_span, mu_n, nu_l, pair
from .polynomial import Polynomial, find_roots
from .series import (
    backward_series,
    cauchy_product,
    forward_series,
    identity_residuals,
    modified_series,
    rs_series,
    s_series,
)
from .span import SpanFunction, gamma, tau
from .spectral import TransferMatrix, postcritical_set, spectrum, transfer_matrix
from .strong_convergence import (
    bn,
    contour_oracle,
    envelope_check,
    hyperbolicity_check,
    instability_diagnostic,
    residue_closed_form,
    residue_table,
    strong_convergence_report,
)
from .transfer import (
    beltrami_point,
    cesaro,
    dual_transfer,
    lp_pushforward,
    pullback_point,
    pushforward_point,
    ruelle_point,
    span_iterates,
    span_pushforward,
)
from .tree import preimage_tree

__version__ = "0.1.0"
