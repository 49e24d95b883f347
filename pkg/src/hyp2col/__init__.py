"""Random k-uniform hypergraph 2-colouring: models, exact counts, moments, experiments."""

from .core import (
    Colouring,
    Flavour,
    Hypergraph,
    ModelParams,
    OverlapMatrix,
    connected_components,
    derive_rng,
    derive_seed,
    is_proper,
    monochromatic_edge_count,
    overlap_matrix,
    sample_hypergraph,
    sample_hypergraph_with_replacement,
    sample_planted_pair,
    sample_simple_hypergraph,
)
from .counting import (
    CountReport,
    DensityGrid,
    count_colourings,
    count_pairs_by_overlap,
    sample_gibbs_pair,
)
from .cycles import CycleCensus, count_cycles, count_isolated_triangles
from .errors import (
    DimensionError,
    DivergenceError,
    DomainError,
    Hyp2ColError,
    InfeasibleError,
    ParameterError,
    ParseError,
    RejectionLimitError,
    ResourceLimitError,
)
from .fluctuation import (
    FluctuationLaw,
    FluctuationMoments,
    fluctuation_moments,
    fluctuation_samples,
    make_fluctuation_law,
    sample_fluctuation,
)
from .formulas import (
    CycleLaw,
    MomentValue,
    QuadraticConstants,
    RegimeFlags,
    SecondMomentRatio,
    balanced_pair_moment_rate,
    cycle_conditioned_ratio,
    cycle_law,
    cycle_laws,
    expected_count_at_density,
    expected_count_in_stratum,
    expected_count_total,
    expected_pair_count,
    first_moment_rate,
    log_sum_expected_counts,
    pair_moment_rate,
    quadratic_constants,
    regime_check,
    second_moment_ratio,
)
from .hgio import (
    load_colouring,
    load_hypergraph,
    save_colouring,
    save_hypergraph,
)

__version__ = "0.1.0"
