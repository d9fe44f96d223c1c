"""Travelling thief problem with time windows: instances, evaluation,
window generation, and a dual-search solver."""

from .dsea import (RunResult, SolverConfig, VARIANTS, baseline_random_restart,
                   solve, variant_config)
from .evaluation import (BudgetExhausted, Evaluation, EvaluationBudget,
                         Solution, as_plan, as_tour, compare, evaluate,
                         evaluate_windowless, evaluation_report, is_better,
                         is_feasible, load_solution, parse_solution,
                         save_solution, write_solution)
from .harness import (CampaignReport, CampaignSpec, brute_force, main,
                      read_campaign_csv, run_campaign, summarize_campaign,
                      write_campaign_csv)
from .initialization import initialize_tour, score_city
from .instance import (TimeWindows, TtpInstance, TtpParseError, TtptwInstance,
                       attach_windows, distance, load_ttp, load_windows,
                       open_windows, parse_ttp, parse_windows, save_ttp,
                       save_windows, serialize_ttp, write_windows)
from .operators import (OperatorParams, SearchState, iip, itp, mutate_swap,
                        rain, topo)
from .packing import (PackParams, greedy_order, item_scores, pack,
                      pack_iterative, repack, tail_distances)
from .seeding import child_rng
from .windows import (DEFAULT_TIGHTNESS, ReferenceTimes, TwGenSpec,
                      audit_window_feasibility, generate_nested,
                      reference_arrivals, sample_windows)

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted", "CampaignReport", "CampaignSpec", "DEFAULT_TIGHTNESS", "Evaluation",
    "EvaluationBudget", "OperatorParams", "PackParams", "ReferenceTimes",
    "RunResult", "SearchState", "Solution", "SolverConfig", "TimeWindows",
    "TtpInstance", "TtpParseError", "TtptwInstance", "TwGenSpec", "VARIANTS",
    "as_plan", "as_tour", "attach_windows", "audit_window_feasibility",
    "baseline_random_restart", "brute_force", "child_rng", "compare",
    "distance", "evaluate", "evaluate_windowless", "evaluation_report",
    "generate_nested", "greedy_order", "iip", "initialize_tour",
    "is_better", "is_feasible", "item_scores", "itp", "load_solution",
    "load_ttp", "load_windows", "main", "mutate_swap", "open_windows",
    "pack", "pack_iterative", "parse_solution", "parse_ttp", "parse_windows",
    "rain", "read_campaign_csv", "reference_arrivals", "repack",
    "run_campaign", "sample_windows", "save_solution", "save_ttp",
    "save_windows", "score_city", "serialize_ttp", "solve",
    "summarize_campaign", "tail_distances", "topo", "variant_config",
    "write_campaign_csv", "write_solution", "write_windows",
]
