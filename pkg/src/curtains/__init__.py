"""Exact computations with braids, charts and curtains.

Curtains are motion pictures of charts that describe 3-dimensional braids,
and through them simple branched covers of the 3-ball and 3-sphere.
"""

from .braid import (
    BandGeneratorForm,
    BraidError,
    BraidWord,
    NormalForm,
    Permutation,
    band_word,
    compose,
    conjugate,
    format_word,
    hurwitz_act,
    invert,
    is_band_generator,
    left_normal_form,
    normal_form_word,
    parse_word,
    permutation_of,
    tuples_equal,
    words_equal,
)
from .builder import (
    BuildError,
    CertificateError,
    MonodromyData,
    build_curtain,
    random_admissible_data,
    validate_monodromy_data,
)
from .chart import (
    Chart,
    ChartEdge,
    ChartError,
    ChartVertex,
    PLPath,
    apply_disk_replacement,
    apply_keyframe_isotopy,
    build_oval_nest,
    build_ribbon_chart,
    intersection_word,
    loop_monodromy,
    loop_removal,
    standard_meridians,
    validate_chart,
)
from .cover import analyze, cover_components, handle_ledger, permutation_monodromy, slice_euler
from .curtain import (
    Curtain,
    CurtainError,
    CurtainEvent,
    Segment,
    extract_braid,
    internal_boundary,
    meridian_monodromy,
    slice_at,
    validate_curtain,
)
from .geometry import Point, Q
from .report import ValidationReport

__version__ = "0.1.0"
