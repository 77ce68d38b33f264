"""Exact construction of a Lebesgue-measure-preserving Besicovitch-Morse function.

The package builds the irregular Cantor staircases, the nested step-triangle
frames of the limit function ``f``, the measure-preserving piecewise-linear
approximants ``g_n`` and finite-scale difference-quotient probes, all in exact
rational arithmetic.
"""

from bmorse.numerics import Enclosure, hull, normalize
from bmorse.discontinuum import (
    StaircaseNode,
    StaircaseTree,
    build_staircase,
    expansion_factor,
    get_tree,
    staircase_eval,
    survivor_length,
)
from bmorse.bmfunction import (
    ROOT,
    Chain,
    Frame,
    child_frames,
    f_eval,
    f_eval_frames,
    fn_eval,
    locate,
    max_height,
)
from bmorse.plmap import (
    MeasureReport,
    PLMap,
    build_g,
    eval_pl,
    modify,
    preimage_measure,
    sup_distance,
    tent,
    verify_measure,
)
from bmorse.probes import DiniScan, QuotientRecord, dini_scan, morse_report, quotient, witness_sequence

__all__ = [
    "Enclosure", "hull", "normalize",
    "StaircaseNode", "StaircaseTree", "build_staircase", "expansion_factor", "get_tree",
    "staircase_eval", "survivor_length",
    "ROOT", "Chain", "Frame", "child_frames", "f_eval", "f_eval_frames", "fn_eval", "locate", "max_height",
    "MeasureReport", "PLMap", "build_g", "eval_pl", "modify", "preimage_measure",
    "sup_distance", "tent", "verify_measure",
    "DiniScan", "QuotientRecord", "dini_scan", "morse_report", "quotient", "witness_sequence",
]
