from .trials import (
    NO_REGION,
    TrialRecord,
    TrialBudget,
    TrialLog,
    sample_context,
    simulate_trials,
    simulate_calibration_trials,
    split_records,
)
from .estimation import estimate_statistics, estimate_forward_matrix, cell_counts
from .bootstrap import bootstrap_distribution, bootstrap_sigma, analytic_sigma, trial_budget_sigma
from .protocol import ProtocolReport, CalibrationSummary, run_protocol
