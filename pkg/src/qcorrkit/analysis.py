"""Schmidt-spectrum analysis and structural certificates for strategies.

Four mechanisms live here:

* Schmidt decomposition of bipartite vectors (SVD of the coefficient matrix),
  with multiset utilities for tolerance-aware spectrum comparison.
* Block decomposition of a strategy whose induced correlation is a direct
  sum: recovers per-block sub-states, subspaces, and restricted strategies,
  verifying along the way that the answer-block projectors act on the state
  independently of the question asked.
* The operator relations tied to Bob's question 4 (it duplicates Alice's
  question 0, and the shifted-pair question 2 refines the same split).
* Descent chains: maximal sequences of Schmidt coefficients, each a factor
  alpha below the previous.  For the truncated ideal strategy the longest
  chain has length exactly 2m, so its unbounded growth with m is the
  finite-dimension witness at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .correlation import BlockSpec, Correlation, block_structure_check, distance
from .strategy import Strategy, induce, projected_substate

__all__ = [
    "SchmidtSpectrum",
    "SchmidtResult",
    "BlockDecomposition",
    "DescentChain",
    "Y4Report",
    "SchmidtPartition",
    "SchmidtSumCheck",
    "BijectionReport",
    "AnalysisError",
    "BlockDecompositionError",
    "schmidt",
    "strategy_block_decompose",
    "verify_y4_relations",
    "schmidt_partition",
    "descent_chain",
    "schmidt_sum_check",
    "verify_schmidt_bijections",
    "multiset_match",
    "multiset_equal",
    "multiset_subtract",
    "ZERO_CUTOFF",
    "MULTISET_REL_TOL",
]

ZERO_CUTOFF = 1e-9
MULTISET_REL_TOL = 1e-8


class AnalysisError(ValueError):
    """An analysis precondition or certified identity failed."""


class BlockDecompositionError(AnalysisError):
    """The strategy does not decompose over the requested answer blocks."""


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Nonzero Schmidt coefficients in descending order.

    Coefficients at or below ``zero_cutoff`` are discarded before
    construction; the stored values are strictly positive, sorted descending,
    and their squares sum to at most 1 (subnormalized spectra come from
    projected, unnormalized vectors).
    """

    coefficients: tuple[float, ...]
    zero_cutoff: float = ZERO_CUTOFF

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coefficients)
        if any(c <= 0.0 for c in coeffs):
            raise AnalysisError("Schmidt coefficients must be strictly positive")
        if any(coeffs[i] < coeffs[i + 1] for i in range(len(coeffs) - 1)):
            raise AnalysisError("Schmidt coefficients must be sorted descending")
        if sum(c * c for c in coeffs) > 1.0 + 1e-10:
            raise AnalysisError("squared Schmidt coefficients exceed unit total")
        object.__setattr__(self, "coefficients", coeffs)

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def scaled(self, factor: float) -> "SchmidtSpectrum":
        """Spectrum with every coefficient multiplied by ``factor`` in (0, 1]."""
        if not (0.0 < factor <= 1.0):
            raise AnalysisError(f"scale factor must lie in (0, 1], got {factor!r}")
        return SchmidtSpectrum(
            tuple(factor * c for c in self.coefficients), self.zero_cutoff
        )

    def as_list(self) -> list[float]:
        return list(self.coefficients)


@dataclass(frozen=True, eq=False)
class SchmidtResult:
    """Spectrum plus the matching orthonormal bases on each side."""

    spectrum: SchmidtSpectrum
    left_basis: np.ndarray  # dA x k, columns are the A-side Schmidt vectors
    right_basis: np.ndarray  # dB x k


def _svd_spectrum(
    vec: np.ndarray, dA: int, dB: int, zero_cutoff: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.size != dA * dB:
        raise AnalysisError(f"vector length {vec.size} != dA*dB = {dA * dB}")
    mat = vec.reshape(dA, dB)
    u, sing, vh = np.linalg.svd(mat, full_matrices=False)
    keep = sing > zero_cutoff
    return sing[keep], u[:, keep], vh[keep].T


def schmidt(
    state: np.ndarray, dA: int, dB: int, zero_cutoff: float = ZERO_CUTOFF
) -> SchmidtResult:
    """Schmidt decomposition of a normalized bipartite vector.

    Singular values below ``zero_cutoff`` are dropped; the discarded square
    mass is at most min(dA, dB) * zero_cutoff^2.
    """
    vec = np.asarray(state, dtype=complex).reshape(-1)
    if vec.size != dA * dB:
        raise AnalysisError(f"vector length {vec.size} != dA*dB = {dA * dB}")
    if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
        raise AnalysisError("schmidt expects a unit-norm state")
    sing, left, right = _svd_spectrum(vec, dA, dB, zero_cutoff)
    return SchmidtResult(
        spectrum=SchmidtSpectrum(tuple(sing.tolist()), zero_cutoff),
        left_basis=left,
        right_basis=right,
    )


def multiset_match(
    a: Sequence[float], b: Sequence[float], rel_tol: float = MULTISET_REL_TOL
) -> list[tuple[int, int]] | None:
    """Greedy largest-first matching of two positive multisets.

    Returns index pairs (into the given sequences) when every element of one
    multiset pairs with an element of the other within relative tolerance,
    else None.  Sorting both descending makes the greedy pairing canonical.
    """
    if len(a) != len(b):
        return None
    order_a = sorted(range(len(a)), key=lambda i: -a[i])
    order_b = sorted(range(len(b)), key=lambda i: -b[i])
    pairs: list[tuple[int, int]] = []
    for ia, ib in zip(order_a, order_b):
        va, vb = a[ia], b[ib]
        if abs(va - vb) > rel_tol * max(abs(va), abs(vb)):
            return None
        pairs.append((ia, ib))
    return pairs


def multiset_equal(
    a: Sequence[float], b: Sequence[float], rel_tol: float = MULTISET_REL_TOL
) -> bool:
    return multiset_match(a, b, rel_tol) is not None


def multiset_subtract(
    a: Sequence[float], b: Sequence[float], rel_tol: float = MULTISET_REL_TOL
) -> list[float]:
    """Remove one matching occurrence of every element of ``b`` from ``a``."""
    remaining = sorted(a, reverse=True)
    for vb in b:
        for i, va in enumerate(remaining):
            if abs(va - vb) <= rel_tol * max(abs(va), abs(vb)):
                remaining.pop(i)
                break
        else:
            raise AnalysisError(f"element {vb!r} has no match to subtract")
    return remaining


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Per-block data recovered from a direct-sum strategy.

    ``sub_states`` keep the full-space coordinates and their natural
    (unnormalized) scale: the squared norm of block i is its weight.
    ``restricted`` holds the strategies on the block subspaces (None for
    weight-zero blocks).  ``residuals`` collects the worst deviation seen in
    each verified identity.
    """

    weights: tuple[float, ...]
    sub_states: tuple[np.ndarray, ...]
    alice_bases: tuple[np.ndarray, ...]
    bob_bases: tuple[np.ndarray, ...]
    restricted: tuple[Strategy | None, ...]
    blocks: tuple[Correlation | None, ...]
    residuals: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "block_dims": [
                [int(ba.shape[1]), int(bb.shape[1])]
                for ba, bb in zip(self.alice_bases, self.bob_bases)
            ],
            "residuals": dict(self.residuals),
        }


def strategy_block_decompose(
    s: Strategy,
    alice_partition: Sequence[Sequence[int]],
    bob_partition: Sequence[Sequence[int]],
    tol: float = 1e-9,
) -> BlockDecomposition:
    """Decompose a strategy along answer blocks of its induced correlation.

    Requires the induced correlation to pass :func:`block_structure_check`
    for the same partitions.  For each block the summed answer projector must
    act on the state identically for every question on either side; that
    common image is the block sub-state, its squared norm the block weight.
    The block subspaces are spanned by the nontrivial eigenvectors of the
    reduced densities (eigenvalue cutoff tol^2); restricted measurement
    elements must stay projections and the normalized restricted strategy
    must induce the block's sub-correlation.
    """
    spec = BlockSpec(tuple(tuple(c) for c in alice_partition), tuple(tuple(c) for c in bob_partition))
    p = induce(s)
    chk = block_structure_check(p, spec, tol)
    if not chk.ok:
        raise BlockDecompositionError(
            f"induced correlation is not a direct sum: {chk.failure.detail}"
        )
    assert chk.weights is not None and chk.blocks is not None

    num_blocks = spec.num_blocks
    residuals = {
        "question_independence": 0.0,
        "side_agreement": 0.0,
        "weight_consistency": 0.0,
        "substate_orthogonality": 0.0,
        "restricted_idempotence": 0.0,
        "subspace_leakage": 0.0,
        "induced_block_mismatch": 0.0,
    }

    sub_states: list[np.ndarray] = []
    for i in range(num_blocks):
        a_vecs = [projected_substate(s, "A", x, spec.alice_partition[i]) for x in range(s.m)]
        b_vecs = [projected_substate(s, "B", y, spec.bob_partition[i]) for y in range(s.n)]
        ref = a_vecs[0]
        worst_q = max(
            [float(np.linalg.norm(v - ref)) for v in a_vecs[1:]]
            + [float(np.linalg.norm(v - b_vecs[0])) for v in b_vecs[1:]],
            default=0.0,
        )
        side_gap = float(np.linalg.norm(ref - b_vecs[0]))
        residuals["question_independence"] = max(residuals["question_independence"], worst_q)
        residuals["side_agreement"] = max(residuals["side_agreement"], side_gap)
        if worst_q > tol or side_gap > tol:
            raise BlockDecompositionError(
                f"block {i} projector image depends on the question "
                f"(residual {max(worst_q, side_gap):.3e} > tol {tol:.1e})"
            )
        sub_states.append(ref)

    weights = [float(np.linalg.norm(v) ** 2) for v in sub_states]
    for i, (w, w_corr) in enumerate(zip(weights, chk.weights)):
        gap = abs(w - w_corr)
        residuals["weight_consistency"] = max(residuals["weight_consistency"], gap)
        if gap > tol:
            raise BlockDecompositionError(
                f"block {i} state mass {w!r} disagrees with correlation weight "
                f"{w_corr!r} beyond tol"
            )
    for i in range(num_blocks):
        for j in range(i + 1, num_blocks):
            ov = abs(complex(np.vdot(sub_states[i], sub_states[j])))
            residuals["substate_orthogonality"] = max(
                residuals["substate_orthogonality"], ov
            )

    alice_bases: list[np.ndarray] = []
    bob_bases: list[np.ndarray] = []
    restricted: list[Strategy | None] = []
    cutoff = tol * tol
    for i in range(num_blocks):
        psi_i = sub_states[i].reshape(s.dA, s.dB)
        if weights[i] <= tol:
            alice_bases.append(np.zeros((s.dA, 0), dtype=complex))
            bob_bases.append(np.zeros((s.dB, 0), dtype=complex))
            restricted.append(None)
            continue
        rho_a = psi_i @ psi_i.conj().T
        rho_b = psi_i.T @ psi_i.conj()
        evals_a, evecs_a = np.linalg.eigh(rho_a)
        evals_b, evecs_b = np.linalg.eigh(rho_b)
        basis_a = evecs_a[:, evals_a > cutoff]
        basis_b = evecs_b[:, evals_b > cutoff]
        alice_bases.append(basis_a)
        bob_bases.append(basis_b)

        restricted_alice = []
        for x in range(s.m):
            row = []
            for a in spec.alice_partition[i]:
                proj = s.alice_meas[x][a]
                r_op = basis_a.conj().T @ proj @ basis_a
                leak = float(np.linalg.norm(proj @ basis_a - basis_a @ r_op))
                idem = float(np.linalg.norm(r_op @ r_op - r_op))
                residuals["subspace_leakage"] = max(residuals["subspace_leakage"], leak)
                residuals["restricted_idempotence"] = max(
                    residuals["restricted_idempotence"], idem
                )
                if idem > tol:
                    raise BlockDecompositionError(
                        f"restricted element (A, x={x}, a={a}) of block {i} is not a "
                        f"projection: residual {idem:.3e}"
                    )
                row.append(r_op)
            restricted_alice.append(row)
        restricted_bob = []
        for y in range(s.n):
            row = []
            for b in spec.bob_partition[i]:
                proj = s.bob_meas[y][b]
                r_op = basis_b.conj().T @ proj @ basis_b
                leak = float(np.linalg.norm(proj @ basis_b - basis_b @ r_op))
                idem = float(np.linalg.norm(r_op @ r_op - r_op))
                residuals["subspace_leakage"] = max(residuals["subspace_leakage"], leak)
                residuals["restricted_idempotence"] = max(
                    residuals["restricted_idempotence"], idem
                )
                if idem > tol:
                    raise BlockDecompositionError(
                        f"restricted element (B, y={y}, b={b}) of block {i} is not a "
                        f"projection: residual {idem:.3e}"
                    )
                row.append(r_op)
            restricted_bob.append(row)

        block_state = basis_a.conj().T @ psi_i @ basis_b.conj()
        block_state = block_state / np.linalg.norm(block_state)
        sub_strategy = Strategy(
            dA=basis_a.shape[1],
            dB=basis_b.shape[1],
            state=block_state.reshape(-1),
            alice_meas=restricted_alice,
            bob_meas=restricted_bob,
        )
        restricted.append(sub_strategy)

        expected = chk.blocks[i]
        assert expected is not None
        got = induce(sub_strategy, check=False)
        gap = distance(got, expected, "max_tv")
        residuals["induced_block_mismatch"] = max(residuals["induced_block_mismatch"], gap)
        if gap > tol:
            raise BlockDecompositionError(
                f"block {i} restricted strategy induces the wrong sub-correlation "
                f"(max_tv {gap:.3e} > tol {tol:.1e})"
            )

    return BlockDecomposition(
        weights=tuple(weights),
        sub_states=tuple(sub_states),
        alice_bases=tuple(alice_bases),
        bob_bases=tuple(bob_bases),
        restricted=tuple(restricted),
        blocks=chk.blocks,
        residuals=residuals,
    )


_Y4_SHAPE = (4, 5, 3, 3)


@dataclass(frozen=True)
class Y4Report:
    """Residual norms of the operator identities hinging on Bob's question 4."""

    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def worst(self) -> tuple[str, float]:
        name = max(self.residuals, key=self.residuals.get)  # type: ignore[arg-type]
        return name, self.residuals[name]

    def as_dict(self) -> dict:
        return {"residuals": dict(self.residuals), "tol": self.tol, "passed": self.passed}


def verify_y4_relations(s: Strategy, tol: float = 1e-12) -> Y4Report:
    """Check the three state identities relating questions 0, 2, and Bob's 4.

    (i) answer 0 of Alice's question 0, answer 0 of Bob's question 4, and
    answers {0, 2} of Alice's question 2 all project the state to the same
    vector; (ii) same for answer 1 against answer 1; (iii) the two diagonal
    double projections reassemble the state.
    """
    if (s.m, s.n, s.r, s.s) != _Y4_SHAPE:
        raise AnalysisError(
            f"expected a 4x5-question, 3-answer strategy, got ({s.m},{s.n},{s.r},{s.s})"
        )
    a0_0 = projected_substate(s, "A", 0, (0,))
    a0_1 = projected_substate(s, "A", 0, (1,))
    b4_0 = projected_substate(s, "B", 4, (0,))
    b4_1 = projected_substate(s, "B", 4, (1,))
    a2_02 = projected_substate(s, "A", 2, (0, 2))
    a2_1 = projected_substate(s, "A", 2, (1,))

    psi = s.state_matrix()
    rebuilt = (
        s.alice_meas[0][0] @ psi @ s.bob_meas[4][0].T
        + s.alice_meas[0][1] @ psi @ s.bob_meas[4][1].T
    )
    residuals = {
        "a0_answer0_vs_b4": float(np.linalg.norm(a0_0 - b4_0)),
        "a0_answer0_vs_a2_kernel_plus": float(np.linalg.norm(a0_0 - a2_02)),
        "a0_answer1_vs_b4": float(np.linalg.norm(a0_1 - b4_1)),
        "a0_answer1_vs_a2": float(np.linalg.norm(a0_1 - a2_1)),
        "state_reconstruction": float(np.linalg.norm(psi - rebuilt)),
    }
    return Y4Report(residuals=residuals, tol=tol)


@dataclass(frozen=True, eq=False)
class SchmidtPartition:
    """The state spectrum split by the question-0 answer, plus the point block.

    ``s0``/``s1`` come from the doubly projected vectors (answer 0 with Bob's
    question-4 answer 0, answer 1 with answer 1), kept at their original,
    unnormalized scale; ``s2`` from the answer-2 double projection of the
    shifted-pair questions.  ``s`` equals the disjoint union of ``s0`` and
    ``s1`` and contains ``s2``.
    """

    s: SchmidtSpectrum
    s0: SchmidtSpectrum
    s1: SchmidtSpectrum
    s2: SchmidtSpectrum

    def as_dict(self) -> dict:
        return {
            "s": self.s.as_list(),
            "s0": self.s0.as_list(),
            "s1": self.s1.as_list(),
            "s2": self.s2.as_list(),
        }


def schmidt_partition(s: Strategy, tol: float = 1e-9) -> SchmidtPartition:
    """Split the state spectrum along the question-0 answers and certify it.

    Requires :func:`verify_y4_relations` to pass at ``tol``; that licenses
    computing the split spectra from the doubly projected vectors, whose
    bipartite reshape is unambiguous.  Verifies the multiset identity
    S = S0 u S1 and the containment S2 <= S0 at relative tolerance ``tol``.
    """
    y4 = verify_y4_relations(s, tol)
    if not y4.passed:
        name, value = y4.worst()
        raise AnalysisError(
            f"question-4 relations fail ({name} residual {value:.3e} > {tol:.1e}); "
            f"the Schmidt split is not licensed"
        )
    psi = s.state_matrix()
    spec_s = schmidt(s.state, s.dA, s.dB).spectrum
    vec0 = s.alice_meas[0][0] @ psi @ s.bob_meas[4][0].T
    vec1 = s.alice_meas[0][1] @ psi @ s.bob_meas[4][1].T
    vec2 = s.alice_meas[2][2] @ psi @ s.bob_meas[2][2].T
    cutoff = spec_s.zero_cutoff
    s0 = SchmidtSpectrum(tuple(_svd_spectrum(vec0, s.dA, s.dB, cutoff)[0]), cutoff)
    s1 = SchmidtSpectrum(tuple(_svd_spectrum(vec1, s.dA, s.dB, cutoff)[0]), cutoff)
    s2 = SchmidtSpectrum(tuple(_svd_spectrum(vec2, s.dA, s.dB, cutoff)[0]), cutoff)

    merged = sorted(list(s0) + list(s1), reverse=True)
    if not multiset_equal(spec_s.as_list(), merged, tol):
        raise AnalysisError(
            "spectrum does not split as S = S0 u S1; the two projected parts "
            "are not orthogonal on both subsystems at the working tolerance"
        )
    try:
        multiset_subtract(s0.as_list(), s2.as_list(), tol)
    except AnalysisError as exc:
        raise AnalysisError(f"S2 is not contained in S0: {exc}") from exc
    return SchmidtPartition(s=spec_s, s0=s0, s1=s1, s2=s2)


@dataclass(frozen=True)
class DescentChain:
    """Maximal coefficient chains with successive ratio ~ alpha.

    ``chains`` hold coefficient values largest-first; ``index_chains`` index
    into the descending input spectrum.  A finite ``max_length`` certifies a
    strategy dimension of at least that size; for the truncated ideal state
    it equals the truncation dimension exactly, growing without bound as the
    truncation is refined.
    """

    ratio: float
    rel_tol: float
    chains: tuple[tuple[float, ...], ...]
    index_chains: tuple[tuple[int, ...], ...]
    max_length: int

    def as_dict(self) -> dict:
        return {
            "ratio": self.ratio,
            "rel_tol": self.rel_tol,
            "max_length": self.max_length,
            "chains": [list(c) for c in self.index_chains],
        }


def descent_chain(
    spectrum: SchmidtSpectrum, ratio: float, rel_tol: float = 1e-6
) -> DescentChain:
    """Greedily link coefficients lam -> lam' with lam'/lam within rel_tol of ratio.

    Chains start at the largest unused coefficient and always extend to the
    largest admissible successor, so degenerate groups are consumed one
    member at a time.  ``rel_tol`` must stay below (1 - ratio)/2 or chain
    membership would be ambiguous.
    """
    if not (0.0 < ratio < 1.0):
        raise AnalysisError(f"ratio must lie in (0, 1), got {ratio!r}")
    if rel_tol >= (1.0 - ratio) / 2.0:
        raise AnalysisError(
            f"rel_tol {rel_tol!r} too large for ratio {ratio!r}: chains would overlap"
        )
    values = list(spectrum.coefficients)
    used = [False] * len(values)
    chains: list[tuple[float, ...]] = []
    index_chains: list[tuple[int, ...]] = []
    lo, hi = ratio * (1.0 - rel_tol), ratio * (1.0 + rel_tol)
    for start in range(len(values)):
        if used[start]:
            continue
        chain = [start]
        used[start] = True
        current = values[start]
        while True:
            successor = None
            for j in range(len(values)):
                if used[j]:
                    continue
                if lo * current <= values[j] <= hi * current:
                    successor = j  # descending order: first hit is the largest
                    break
            if successor is None:
                break
            used[successor] = True
            chain.append(successor)
            current = values[successor]
        chains.append(tuple(values[i] for i in chain))
        index_chains.append(tuple(chain))
    return DescentChain(
        ratio=ratio,
        rel_tol=rel_tol,
        chains=tuple(chains),
        index_chains=tuple(index_chains),
        max_length=max((len(c) for c in chains), default=0),
    )


@dataclass(frozen=True, eq=False)
class SchmidtSumCheck:
    """Outcome of the two-part spectrum-additivity test.

    ``ok`` requires the two parts to have orthogonal reduced densities on
    both sides (operator norms of the products below tolerance) and the
    spectra to merge into the total spectrum as multisets.
    """

    ok: bool
    overlap_a: float
    overlap_b: float
    multiset_ok: bool
    pairing: tuple[tuple[int, int], ...] | None
    total: SchmidtSpectrum
    part_phi: SchmidtSpectrum
    part_eta: SchmidtSpectrum

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "overlap_a": self.overlap_a,
            "overlap_b": self.overlap_b,
            "multiset_ok": self.multiset_ok,
            "total": self.total.as_list(),
            "part_phi": self.part_phi.as_list(),
            "part_eta": self.part_eta.as_list(),
        }


def schmidt_sum_check(
    psi: np.ndarray,
    phi: np.ndarray,
    eta: np.ndarray,
    dA: int,
    dB: int,
    tol: float = 1e-9,
) -> SchmidtSumCheck:
    """Certify Schmidt(psi) = Schmidt(phi) u Schmidt(eta) for psi = phi + eta.

    The identity requires phi and eta to be orthogonal on both subsystems:
    the products of their reduced densities must vanish.  Returns ok=False
    with the violating overlap when they do not; raises if psi != phi + eta.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    eta = np.asarray(eta, dtype=complex).reshape(-1)
    if psi.size != dA * dB or phi.size != dA * dB or eta.size != dA * dB:
        raise AnalysisError("all vectors must have length dA*dB")
    defect = float(np.linalg.norm(psi - phi - eta))
    if defect > tol:
        raise AnalysisError(
            f"decomposition identity fails: ||psi - phi - eta|| = {defect:.3e} > {tol:.1e}"
        )
    phi_m = phi.reshape(dA, dB)
    eta_m = eta.reshape(dA, dB)
    sigma_a = phi_m @ phi_m.conj().T
    tau_a = eta_m @ eta_m.conj().T
    sigma_b = phi_m.T @ phi_m.conj()
    tau_b = eta_m.T @ eta_m.conj()
    overlap_a = float(np.linalg.norm(sigma_a @ tau_a, 2))
    overlap_b = float(np.linalg.norm(sigma_b @ tau_b, 2))

    cutoff = ZERO_CUTOFF
    total = SchmidtSpectrum(tuple(_svd_spectrum(psi, dA, dB, cutoff)[0]), cutoff)
    part_phi = SchmidtSpectrum(tuple(_svd_spectrum(phi, dA, dB, cutoff)[0]), cutoff)
    part_eta = SchmidtSpectrum(tuple(_svd_spectrum(eta, dA, dB, cutoff)[0]), cutoff)

    if overlap_a > tol or overlap_b > tol:
        return SchmidtSumCheck(
            ok=False,
            overlap_a=overlap_a,
            overlap_b=overlap_b,
            multiset_ok=False,
            pairing=None,
            total=total,
            part_phi=part_phi,
            part_eta=part_eta,
        )
    merged = sorted(list(part_phi) + list(part_eta), reverse=True)
    pairing = multiset_match(total.as_list(), merged, max(tol, MULTISET_REL_TOL))
    return SchmidtSumCheck(
        ok=pairing is not None,
        overlap_a=overlap_a,
        overlap_b=overlap_b,
        multiset_ok=pairing is not None,
        pairing=tuple(pairing) if pairing is not None else None,
        total=total,
        part_phi=part_phi,
        part_eta=part_eta,
    )


@dataclass(frozen=True)
class BijectionReport:
    """The two scaled correspondences between the split spectra.

    First: S1 = alpha * S0 exactly (coefficient count included).  Second:
    S0 \\ S2 = alpha * S1 after excluding the single truncation-boundary
    coefficient, which is the smallest member of S1 (the infinite-dimensional
    identity cannot survive a finite cut unmodified, so the excluded value is
    surfaced rather than hidden).
    """

    ok_first: bool
    ok_second: bool
    s2_size: int
    boundary_coefficient: float
    max_pair_deviation: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.ok_first and self.ok_second and self.s2_size == 1

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "ok_first": self.ok_first,
            "ok_second": self.ok_second,
            "s2_size": self.s2_size,
            "boundary_coefficient": self.boundary_coefficient,
            "max_pair_deviation": self.max_pair_deviation,
            "tol": self.tol,
        }


def _max_pair_deviation(a: Sequence[float], b: Sequence[float]) -> float:
    if len(a) != len(b) or not a:
        return float("inf") if a or b else 0.0
    sa = sorted(a, reverse=True)
    sb = sorted(b, reverse=True)
    return max(abs(x - y) / max(x, y) for x, y in zip(sa, sb))


def verify_schmidt_bijections(
    s: Strategy, alpha: float, tol: float = 1e-9
) -> BijectionReport:
    """Check the alpha-scaling correspondences on the partitioned spectrum."""
    part = schmidt_partition(s, tol)
    scaled0 = [alpha * c for c in part.s0]
    ok_first = multiset_equal(part.s1.as_list(), scaled0, tol)

    boundary = min(part.s1) if len(part.s1) else float("nan")
    rem0 = multiset_subtract(part.s0.as_list(), part.s2.as_list(), tol)
    s1_trimmed = multiset_subtract(part.s1.as_list(), [boundary], tol) if len(part.s1) else []
    scaled1 = [alpha * c for c in s1_trimmed]
    ok_second = multiset_equal(rem0, scaled1, tol)

    dev = max(
        _max_pair_deviation(part.s1.as_list(), scaled0),
        _max_pair_deviation(rem0, scaled1),
    )
    return BijectionReport(
        ok_first=ok_first,
        ok_second=ok_second,
        s2_size=len(part.s2),
        boundary_coefficient=float(boundary),
        max_pair_deviation=float(dev),
        tol=tol,
    )
