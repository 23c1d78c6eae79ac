"""Lloyd-type label recovery for weighted, directed stochastic block models."""

from .baselines import SpectralConfig, gradient_descent, kmeans, spectral, vem
from .core import canonical, check_graph, check_labels, cross_counts, partition, read_graph, read_labels
from .distances import L1, L2, DistanceKind
from .estimators import block_means, delta_gap, expected_loss, loss, node_means, profiles
from .likelihood import ScoreVariant, bernoulli_loglik, profile_loglik, score
from .lloyd import FitResult, IterationBudget, labels_equal_up_to_relabeling, lloyd_mle, lloyd_sbm
from .metrics import delta_mismatch, gamma, gamma_raw
from .simulate import ExperimentPoint, p_asym, p_sym, sample_instance

__version__ = "0.1.0"
