"""Exact combinatorics and peeling simulation for Markovian planar triangulations."""

__version__ = "0.1.0"

from .mapcore import TriComplex, build, canonical_code, decode, includes, occ_count  # noqa: E402
from .series import QuadNum, PowerSeriesQ, Z_p_at, lambda_of_h, tau  # noqa: E402
from .coeffs import MixtureAtom, a_coeff, b_from_a, c_genfun, c_psht, c_recursive  # noqa: E402

__all__ = [
    "TriComplex", "build", "canonical_code", "decode", "includes", "occ_count",
    "QuadNum", "PowerSeriesQ", "Z_p_at", "lambda_of_h", "tau",
    "MixtureAtom", "a_coeff", "b_from_a", "c_genfun", "c_psht", "c_recursive",
]
