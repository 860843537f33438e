"""Two-level quarter-fraction designs from quaternary (Z4) linear codes."""

from .analysis import (
    AnalysisReport,
    JSpectrum,
    Word,
    WordlengthPattern,
    aliasing_index,
    analyze,
    enumerate_words,
    generalized_resolution,
    is_regular_design,
    j_characteristic,
    j_spectrum,
    projectivity,
    wordlength_pattern,
)
from .optimal import (
    Criterion,
    DesignCandidate,
    compare_wlp,
    exhaustive_search,
    max_projectivity_profile,
    max_resolution_profile,
    min_aberration_profile,
    optimal_full,
    optimal_half,
    regular_reference,
    table2,
)
from .theory import NOT_COVERED, BranchClass, FrequencyProfile, predict
from .z4core import (
    BinaryDesign,
    ColumnClass,
    binary_image,
    build_design,
    canonical_v,
    column_class,
    expand_code,
    frequency_profile,
    generator_matrix,
    gray_map,
    half_fraction,
)

__version__ = "0.1.0"
