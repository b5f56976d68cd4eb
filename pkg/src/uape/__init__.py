"""Multi-topic attitude cascades on directed social graphs."""

from .baselines import ICConfig, run_ic, run_ic_topics
from .config import EdgeGate, EpsilonRule, Model, SimulationConfig, parse_config
from .dynamics import (IndicatorMode, OpinionState, PersistenceState, attitude_similarity,
                       degroot_update, influence_probability, interest_probability,
                       persistence_update, xor_indicator)
from .engine import (CascadeTrace, EngineState, TraceEvent, get_att, read_trace, run_monte_carlo,
                     run_uape, transition, write_trace)
from .evaluation import (EvaluationReport, GroundTruth, UndefinedAUCError, activation_curve,
                         apply_trace, evaluate_run, roc_auc)
from .graph import (Attitude, AttitudeState, DirectedGraph, FormatError, generate_synthetic,
                    load_attitude_table, load_edge_list, load_seed_file, out_neighbors)

__version__ = "0.1.0"

DATASET_SHAPES = {
    "I": (1331, 8737, 1, 20),
    "II": (1109, 7723, 1, 23),
    "III": (1801, 8493, 1, 27),
    "IV": (2351, 14739, 2, 41),
    "V": (2817, 13283, 2, 45),
    "VI": (4028, 23151, 3, 69),
}
