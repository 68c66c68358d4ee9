"""Spectral estimation from modulo-folded samples: simulation, CRBs and matrix pencil."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateFrequency,
    EstimationError,
    OrderTooLarge,
    RankDeficient,
    SingularFim,
    SnapError,
    ValidationError,
)
from .signal import (  # noqa: E402
    FoldedTrace,
    ResidueSpec,
    SamplingConfig,
    Sinusoid,
    SoSParams,
    acquire,
    diff_norm_bound,
    finite_difference,
    fold,
    max_step,
    residue,
    synthesize,
)
from .bounds import (  # noqa: E402
    CrbReport,
    FimMatrices,
    NoiseModelReport,
    bernoulli_residue_stats,
    crb_closed_form,
    crb_conventional,
    crb_conventional_asymptotic,
    crb_fim,
    gamma,
    pdf_approx_error,
    r_matrix_asymptotic,
    trig_power_sum,
)
from .estimator import EstimateResult, back_out_difference_model, estimate  # noqa: E402
from .experiments import SweepConfig, SweepResult, classify_regions, run_sweep  # noqa: E402
