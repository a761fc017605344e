"""Lurker ranking for directed social graphs."""
from ._core import BACKEND, get_threads, set_threads
from .evalmetrics import (RelevanceSets, bpref, build_relevance_sets, comparison_report,
                          fagin_intersection, kendall_tau)
from .graph import (DegreeTable, DirectedGraph, EdgeListError, degrees, estimate_avg_path_length,
                    induced_subgraph, load_edge_list, max_strongly_connected_component,
                    reciprocity_counts, write_edge_list, write_id_map)
from .lurkcoef import (LurkingCoefficientReport, local_lurking_coefficient,
                       local_lurking_coefficients, lurking_coefficient)
from .netanalysis import (DelurkResult, PowerLawFit, RandomizationParams, attachment_distributions,
                          delurk_randomize, directed_topological_overlap, fit_power_law,
                          overlaps, percolation_match, reciprocity_report, resilience_curve)
from .rank import (LR_VARIANTS, ActivityTable, RankParams, RankVector, TrustStatements,
                   alpha_centrality, data_driven_rank, fair_bets, in_out_ratio_rank, lurker_rank,
                   pagerank, rank_method, ranking, trust_biased_lurker_rank, trust_oracle_entropy,
                   trustrank)

__version__ = "0.1.0"
