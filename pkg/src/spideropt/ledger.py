"""Oracle-call accounting.

SFO counts single component-gradient evaluations; a full-gradient call on an
n-component problem is n SFO units. Proximal / Bregman subproblem solves are
counted separately as PO units. Solvers keep two ledgers: the algorithm ledger
(what the complexity statements bill) and a diagnostic ledger for trace
metrics, which never contaminates the algorithm counts.
"""

from dataclasses import dataclass, field


@dataclass
class SfoLedger:
    component_gradient_evals: int = 0
    full_gradient_evals: int = 0
    prox_calls: int = 0
    value_evals: int = 0

    def charge_components(self, count: int) -> None:
        self.component_gradient_evals += int(count)

    def charge_full_gradient(self, n: int) -> None:
        # n-weighted into the component count, plus the call counter itself.
        self.component_gradient_evals += int(n)
        self.full_gradient_evals += 1

    def charge_prox(self) -> None:
        self.prox_calls += 1

    def charge_value(self, count: int = 1) -> None:
        self.value_evals += int(count)

    def as_dict(self) -> dict:
        return {
            "component_gradient_evals": self.component_gradient_evals,
            "full_gradient_evals": self.full_gradient_evals,
            "prox_calls": self.prox_calls,
            "value_evals": self.value_evals,
        }


@dataclass
class LedgerPair:
    """Algorithm ledger plus the diagnostic side channel."""

    algorithm: SfoLedger = field(default_factory=SfoLedger)
    diagnostic: SfoLedger = field(default_factory=SfoLedger)


def epoch_convention_total(refreshes: int, iterations: int, anchor_batch: int, s2: int) -> int:
    """SFO total under the epoch billing convention: anchors at their batch
    size plus every iteration billed one inner batch (refresh iterations
    included). The per-index convention is what the ledger itself counts."""
    return int(refreshes) * int(anchor_batch) + int(iterations) * int(s2)


def per_index_total(refreshes: int, iterations: int, anchor_batch: int, s2: int) -> int:
    """Closed form for the per-index convention: anchors at their batch size,
    two gradients per sampled index on every non-refresh iteration."""
    return int(refreshes) * int(anchor_batch) + 2 * int(s2) * (int(iterations) - int(refreshes))
