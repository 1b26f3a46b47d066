"""LOCC measurement protocols: outcome trees, mutual information, bounds.

A protocol is a sequence of local measurement rounds with the classical
record shared after every round. Instruments are Kraus-operator valued so
posterior ensembles are well defined. The transcript stores, per outcome
history, the path probability and the conditional ensemble over the source
hypotheses; every bound of the suite is evaluated from that tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .entropy import (
    BipartiteEnsemble,
    MEASURE_AUTO,
    entanglement,
    holevo_chi,
    shannon_entropy,
    von_neumann_entropy,
)
from .linalg import DEFAULT_TOL, DensityOperator, hermitize, partial_trace, validate_density

PRUNE_TOL = 1e-12
# Member-conditional outcome weights below this leave the posterior state
# undefined (0/0); such hypotheses keep their prior state at weight zero.
_MEMBER_EPS = 1e-14

PARTIES = ("A", "B")


def _other(party: str) -> str:
    return "B" if party == "A" else "A"


@dataclass(frozen=True)
class KrausInstrument:
    """One local measurement step: acting party plus labelled Kraus operators.

    The operators act on the party's subsystem alone and must satisfy the
    completeness relation sum_k K_k^dagger K_k = I within 1e-9.
    """

    party: str
    outcomes: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        if self.party not in PARTIES:
            raise ValueError(f"party must be 'A' or 'B', got {self.party!r}")
        if not self.outcomes:
            raise ValueError("instrument needs at least one outcome")
        outcomes = []
        dim = None
        accum = None
        labels = set()
        for label, op in self.outcomes:
            label = str(label)
            if label in labels:
                raise ValueError(f"duplicate outcome label {label!r}")
            labels.add(label)
            op = np.array(op, dtype=complex)
            if op.ndim != 2 or op.shape[0] != op.shape[1]:
                raise ValueError(f"outcome {label!r}: Kraus operator must be square, got {op.shape}")
            if dim is None:
                dim = op.shape[0]
                accum = np.zeros((dim, dim), dtype=complex)
            elif op.shape[0] != dim:
                raise ValueError(f"outcome {label!r}: size {op.shape[0]} != {dim}")
            accum += op.conj().T @ op
            op.setflags(write=False)
            outcomes.append((label, op))
        completeness = np.abs(accum - np.eye(dim)).max()
        if completeness > DEFAULT_TOL:
            raise ValueError(
                f"incomplete instrument: max |sum K^dagger K - I| = {completeness:.3e}"
            )
        object.__setattr__(self, "outcomes", tuple(outcomes))

    @property
    def dim(self) -> int:
        return self.outcomes[0][1].shape[0]

    @classmethod
    def projective(cls, party: str, basis, labels=None) -> "KrausInstrument":
        """Rank-one projective instrument from an orthonormal basis.

        ``basis`` holds the basis kets as rows or as matrix columns of a
        square array; labels default to "0", "1", ...
        """
        vectors = np.asarray(basis, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise ValueError(f"projective basis must be square, got {vectors.shape}")
        kets = [np.asarray(v).reshape(-1) for v in vectors]
        gram = np.array([[kets[i].conj() @ kets[j] for j in range(len(kets))] for i in range(len(kets))])
        if np.abs(gram - np.eye(len(kets))).max() > 1e-8:
            raise ValueError("projective basis is not orthonormal")
        if labels is None:
            labels = [str(i) for i in range(len(kets))]
        if len(labels) != len(kets):
            raise ValueError(f"{len(labels)} labels for {len(kets)} basis vectors")
        ops = [(str(lab), np.outer(k, k.conj())) for lab, k in zip(labels, kets)]
        return cls(party=party, outcomes=tuple(ops))


@dataclass(frozen=True)
class ProtocolNode:
    """One outcome history: its path probability and conditional ensemble."""

    path: tuple[str, ...]
    probability: float
    party: str | None  # party whose measurement produced this node; None at root
    ensemble: BipartiteEnsemble
    children: tuple["ProtocolNode", ...]


@dataclass(frozen=True)
class ProtocolTranscript:
    """Full outcome tree of a protocol, depth = number of rounds."""

    root: ProtocolNode
    depth: int
    round_parties: tuple[str, ...]

    @property
    def root_ensemble(self) -> BipartiteEnsemble:
        return self.root.ensemble

    def nodes_at(self, depth: int) -> list[ProtocolNode]:
        level = [self.root]
        for _ in range(depth):
            level = [child for node in level for child in node.children]
        return level

    def leaves(self) -> list[ProtocolNode]:
        return self.nodes_at(self.depth)


def measure_branch(
    ensemble: BipartiteEnsemble,
    instrument: KrausInstrument,
    prune_tol: float = PRUNE_TOL,
) -> list[tuple[str, float, BipartiteEnsemble]]:
    """Apply one local instrument to every hypothesis of an ensemble.

    Returns (label, outcome probability, posterior ensemble) per outcome.
    Kraus operators are embedded as K (x) I for party A and I (x) K for
    party B. Outcomes below ``prune_tol`` are pruned and the survivors
    renormalized; posterior member weights follow Bayes' rule.
    """
    dim_a, dim_b = ensemble.dim_a, ensemble.dim_b
    local_dim = dim_a if instrument.party == "A" else dim_b
    if instrument.dim != local_dim:
        raise ValueError(
            f"dimension mismatch: instrument on {instrument.party} has size {instrument.dim}, "
            f"party dimension is {local_dim}"
        )

    branches = []
    for label, op in instrument.outcomes:
        if instrument.party == "A":
            embedded = np.kron(op, np.eye(dim_b))
        else:
            embedded = np.kron(np.eye(dim_a), op)
        updated = []
        weights = []
        for prior_p, state in ensemble.members:
            raw = embedded @ state.matrix @ embedded.conj().T
            weight = float(np.trace(raw).real)
            weights.append(max(weight, 0.0))
            if weight > _MEMBER_EPS:
                updated.append(validate_density(hermitize(raw / weight), dim_a, dim_b))
            else:
                updated.append(state)
        joint = np.array([p for p, _ in ensemble.members]) * np.array(weights)
        p_outcome = float(joint.sum())
        if p_outcome < prune_tol:
            continue
        posterior_probs = np.clip(joint / p_outcome, 0.0, None)
        posterior_probs /= posterior_probs.sum()
        posterior = BipartiteEnsemble(tuple(zip(posterior_probs.tolist(), updated)))
        branches.append((label, p_outcome, posterior))

    if not branches:
        raise ValueError("all outcomes pruned: instrument annihilates the ensemble")
    total = sum(p for _, p, _ in branches)
    return [(label, p / total, post) for label, p, post in branches]


def run_protocol(
    ensemble: BipartiteEnsemble,
    chooser: Mapping[tuple[str, ...], KrausInstrument] | Callable[[tuple[str, ...]], KrausInstrument],
    depth: int,
) -> ProtocolTranscript:
    """Build the outcome tree of an adaptive protocol.

    ``chooser`` maps each outcome history (tuple of labels, one per earlier
    round) to the instrument for the next round; a callable models classical
    communication by inspecting the whole history. Every reachable history
    up to ``depth`` must be covered. Within one round every branch must be
    measured by the same party, so each round has a well-defined acting
    party.
    """
    if depth < 0:
        raise ValueError(f"depth must be nonnegative, got {depth}")
    if callable(chooser):
        lookup = chooser
    else:
        mapping = chooser

        def lookup(history: tuple[str, ...]) -> KrausInstrument:
            return mapping[history]

    round_parties: list[str | None] = [None] * depth

    def expand(
        path: tuple[str, ...],
        probability: float,
        ens: BipartiteEnsemble,
        produced_by: str | None,
    ) -> ProtocolNode:
        level = len(path)
        if level == depth:
            return ProtocolNode(path, probability, produced_by, ens, ())
        try:
            instrument = lookup(path)
        except KeyError:
            raise ValueError(f"chooser undefined for history {path!r}") from None
        if round_parties[level] is None:
            round_parties[level] = instrument.party
        elif round_parties[level] != instrument.party:
            raise ValueError(
                f"round {level + 1}: party {instrument.party!r} conflicts with "
                f"{round_parties[level]!r} chosen on another branch"
            )
        children = tuple(
            expand(path + (label,), probability * p, posterior, instrument.party)
            for label, p, posterior in measure_branch(ens, instrument)
        )
        return ProtocolNode(path, probability, produced_by, ens, children)

    root = expand((), 1.0, ensemble, None)
    return ProtocolTranscript(root=root, depth=depth, round_parties=tuple(round_parties))


def _level_conditional_entropy(nodes: list[ProtocolNode]) -> float:
    """H(X | outcome record) at one tree level."""
    total = 0.0
    for node in nodes:
        if node.probability > 0.0:
            total += node.probability * shannon_entropy(node.ensemble.probabilities())
    return total


def chain_mutual_information(transcript: ProtocolTranscript) -> tuple[list[float], float]:
    """Per-round and total mutual information between hypothesis and record.

    Round k contributes I(X; Y_k | Y_1..Y_{k-1}) = H(X|Y_{<k}) - H(X|Y_{<=k});
    the terms telescope to the total I(X; Y_1..Y_n).
    """
    level_entropy = [
        _level_conditional_entropy(transcript.nodes_at(k)) for k in range(transcript.depth + 1)
    ]
    per_round = [level_entropy[k - 1] - level_entropy[k] for k in range(1, transcript.depth + 1)]
    return per_round, level_entropy[0] - level_entropy[-1]


def _leaf_average_state(node: ProtocolNode) -> DensityOperator:
    ens = node.ensemble
    return validate_density(ens.average_matrix(), ens.dim_a, ens.dim_b)


def average_output_entanglement(transcript: ProtocolTranscript, selector: str = MEASURE_AUTO) -> float:
    """Mean entanglement of the leaf-average states, weighted by path probability."""
    total = 0.0
    for leaf in transcript.leaves():
        if leaf.probability > 0.0:
            total += leaf.probability * entanglement(_leaf_average_state(leaf), selector)
    return total


def average_input_entanglement(ensemble: BipartiteEnsemble, selector: str = MEASURE_AUTO) -> float:
    """Probability-weighted entanglement of the initial hypothesis states."""
    total = 0.0
    for p, state in ensemble.members:
        if p > 0.0:
            total += p * entanglement(state, selector)
    return total


@dataclass(frozen=True)
class BoundReport:
    """Measured protocol quantities and every upper bound with its slack.

    The two step-refined bounds need at least one measurement round and are
    None on depth-zero transcripts.
    """

    i_locc: float
    per_round_info: tuple[float, ...]
    e_in_avg: float
    e_out_avg: float
    n_qubits: float
    bound_local_holevo: float
    bound_last_step: float | None
    bound_next_to_last: float | None
    bound_output_adjusted: float
    bound_complementarity: float

    def bounds(self) -> dict[str, float | None]:
        return {
            "local_holevo": self.bound_local_holevo,
            "last_step": self.bound_last_step,
            "next_to_last_step": self.bound_next_to_last,
            "output_adjusted": self.bound_output_adjusted,
            "complementarity": self.bound_complementarity,
        }

    def slacks(self) -> dict[str, float | None]:
        return {
            name: (None if value is None else value - self.i_locc)
            for name, value in self.bounds().items()
        }


def _mean_member_marginal_entropy(nodes: list[ProtocolNode], side: str) -> float:
    """Average over the level of sum_x p_x S(rho_x^side)."""
    total = 0.0
    for node in nodes:
        if node.probability <= 0.0:
            continue
        inner = 0.0
        for p, state in node.ensemble.members:
            if p > 0.0:
                inner += p * von_neumann_entropy(state.marginal(side))
        total += node.probability * inner
    return total


def _mean_average_marginal_entropy(nodes: list[ProtocolNode], side: str) -> float:
    """Average over the level of S(sum_x p_x rho_x^side)."""
    total = 0.0
    for node in nodes:
        if node.probability <= 0.0:
            continue
        dims = (node.ensemble.dim_a, node.ensemble.dim_b)
        reduced = partial_trace(node.ensemble.average_matrix(), side, dims)
        total += node.probability * von_neumann_entropy(reduced)
    return total


def bound_suite(
    transcript: ProtocolTranscript,
    selector_in: str = MEASURE_AUTO,
    selector_out: str = MEASURE_AUTO,
) -> BoundReport:
    """Evaluate every upper bound on the protocol's mutual information.

    local_holevo:     S(rho^A) + S(rho^B) - max over sides of the mean
                      member marginal entropy; protocol independent.
    last_step:        refinement subtracting the leaf-average marginal
                      entropy on the last acting party's side, with the mean
                      member term moved to the opposite side.
    next_to_last_step: the interchanged variant, whose final term sits one
                      level above the leaves on the distant party's side.
    output_adjusted:  local_holevo minus the average output entanglement.
    complementarity:  total qubits minus average input minus average output
                      entanglement; extracted plus unused information cannot
                      exceed the ensemble's fixed budget.
    """
    root = transcript.root_ensemble
    dims = (root.dim_a, root.dim_b)
    average = root.average_matrix()
    entropy_a = von_neumann_entropy(partial_trace(average, "A", dims))
    entropy_b = von_neumann_entropy(partial_trace(average, "B", dims))

    root_level = [transcript.root]
    mean_member_a = _mean_member_marginal_entropy(root_level, "A")
    mean_member_b = _mean_member_marginal_entropy(root_level, "B")
    mean_member = {"A": mean_member_a, "B": mean_member_b}

    per_round, total_info = chain_mutual_information(transcript)
    e_out = average_output_entanglement(transcript, selector_out)
    e_in = average_input_entanglement(root, selector_in)
    n_qubits = float(np.log2(root.dim_a * root.dim_b))

    local_holevo = entropy_a + entropy_b - max(mean_member_a, mean_member_b)

    last_step = None
    next_to_last = None
    if transcript.depth >= 1:
        last_party = transcript.round_parties[-1]
        distant = _other(last_party)
        leaf_term = _mean_average_marginal_entropy(transcript.leaves(), last_party)
        last_step = entropy_a + entropy_b - mean_member[distant] - leaf_term
        prev_term = _mean_average_marginal_entropy(
            transcript.nodes_at(transcript.depth - 1), distant
        )
        next_to_last = entropy_a + entropy_b - mean_member[last_party] - prev_term

    return BoundReport(
        i_locc=total_info,
        per_round_info=tuple(per_round),
        e_in_avg=e_in,
        e_out_avg=e_out,
        n_qubits=n_qubits,
        bound_local_holevo=local_holevo,
        bound_last_step=last_step,
        bound_next_to_last=next_to_last,
        bound_output_adjusted=local_holevo - e_out,
        bound_complementarity=n_qubits - e_in - e_out,
    )


@dataclass(frozen=True)
class RoundAudit:
    """Per-round consistency record for one measurement step.

    holevo_slack checks that the information gained in the round does not
    exceed the drop in the acting side's average Holevo quantity.
    distant_marginal_deviation checks that the distant party's conditional
    average state is untouched by the round. entropy_drop_slack checks that
    the acting side's average member-entropy drop is at least the distant
    side's.
    """

    round_index: int
    party: str
    info: float
    chi_before: float
    chi_after: float
    holevo_slack: float
    distant_marginal_deviation: float
    local_entropy_drop: float
    distant_entropy_drop: float
    entropy_drop_slack: float


def _level_marginal_chi(nodes: list[ProtocolNode], side: str) -> float:
    total = 0.0
    for node in nodes:
        if node.probability > 0.0:
            total += node.probability * holevo_chi(node.ensemble.marginal_members(side))
    return total


def audit_rounds(transcript: ProtocolTranscript) -> list[RoundAudit]:
    """Audit every measurement round of a transcript."""
    per_round, _ = chain_mutual_information(transcript)
    audits = []
    for k in range(1, transcript.depth + 1):
        party = transcript.round_parties[k - 1]
        distant = _other(party)
        parents = transcript.nodes_at(k - 1)
        children = transcript.nodes_at(k)

        chi_before = _level_marginal_chi(parents, party)
        chi_after = _level_marginal_chi(children, party)
        info = per_round[k - 1]

        deviation = 0.0
        for parent in parents:
            if parent.probability <= 0.0:
                continue
            dims = (parent.ensemble.dim_a, parent.ensemble.dim_b)
            before = partial_trace(parent.ensemble.average_matrix(), distant, dims)
            after = np.zeros_like(before)
            for child in parent.children:
                weight = child.probability / parent.probability
                after += weight * partial_trace(child.ensemble.average_matrix(), distant, dims)
            deviation = max(deviation, float(np.abs(before - after).max()))

        local_drop = _mean_member_marginal_entropy(parents, party) - _mean_member_marginal_entropy(
            children, party
        )
        distant_drop = _mean_member_marginal_entropy(parents, distant) - _mean_member_marginal_entropy(
            children, distant
        )

        audits.append(
            RoundAudit(
                round_index=k,
                party=party,
                info=info,
                chi_before=chi_before,
                chi_after=chi_after,
                holevo_slack=chi_before - chi_after - info,
                distant_marginal_deviation=deviation,
                local_entropy_drop=local_drop,
                distant_entropy_drop=distant_drop,
                entropy_drop_slack=local_drop - distant_drop,
            )
        )
    return audits
