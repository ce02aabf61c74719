"""hybridfl: hybrid federated learning simulator for interbank fraud detection.

A transaction party holds transaction-level records and labels; banks hold
private account-level features for disjoint customer sets. Training fuses
per-party embeddings at the transaction party and routes embedding gradients
back to the owning banks, with periodic federated averaging of the bank
encoders. Centralized and transaction-only baselines bracket the result.
"""

__version__ = "0.1.0"

from .errors import HybridFLError
