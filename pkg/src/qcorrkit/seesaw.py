"""See-saw search for the best fixed-dimension approximation to a correlation.

Alternating minimization of the squared Euclidean distance between a target
table and the correlation of a dimension-d model.  The iterate is kept in
relaxed form (a mixed state on C^d (x) C^d and one POVM per question) so
every block subproblem is convex:

* state block: quadratic over density operators, attacked with conditional
  gradient whose linear subproblem is an extreme-eigenvector computation;
* measurement block: quadratic over one question's POVM, attacked with
  conditional gradient whose linear subproblem assigns, eigen-direction by
  eigen-direction of the gradient, full weight to the minimizing outcome.

Exact line search keeps the objective non-increasing across every step.
Results are heuristic upper bounds on the true infimum; no optimality
certificate is produced.  On request the relaxed iterate is rounded to an
honest projective strategy on a larger space (purification plus one ancilla
register per side), which reproduces its correlation exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .correlation import Correlation
from .separating import truncation_distance
from .strategy import Strategy

__all__ = [
    "SeesawConfig",
    "SeesawResult",
    "RestartTrace",
    "SeesawError",
    "optimize",
    "upper_bound_from_truncation",
]


class SeesawError(ValueError):
    """Invalid configuration or target for the see-saw search."""


@dataclass(frozen=True)
class SeesawConfig:
    """Knobs for one search run.

    ``local_dim`` is the per-party dimension d of the relaxed model.  Only
    the Euclidean metric is supported: the objective must stay a quadratic
    for the block subproblems to be convex.  ``rounding="projective"``
    additionally returns a strategy on the dilated space.
    """

    local_dim: int
    max_outer_iters: int = 80
    restarts: int = 10
    seed: int = 0
    convergence_tol: float = 1e-10
    metric: str = "l2"
    rounding: str = "none"
    state_steps: int = 40
    meas_steps: int = 12
    polish_iters: int = 0

    def __post_init__(self) -> None:
        if self.local_dim < 1:
            raise SeesawError(f"local_dim must be >= 1, got {self.local_dim}")
        if self.max_outer_iters < 1 or self.restarts < 1:
            raise SeesawError("max_outer_iters and restarts must be >= 1")
        if self.metric != "l2":
            raise SeesawError("only the l2 metric is supported")
        if self.rounding not in ("none", "projective"):
            raise SeesawError(f"unknown rounding mode {self.rounding!r}")
        if self.state_steps < 1 or self.meas_steps < 1:
            raise SeesawError("state_steps and meas_steps must be >= 1")
        if self.polish_iters < 0:
            raise SeesawError("polish_iters must be >= 0")


@dataclass
class RestartTrace:
    restart: int
    objectives: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


@dataclass(eq=False)
class SeesawResult:
    """Best relaxed iterate over all restarts, plus per-restart traces.

    ``distance`` is the Euclidean distance of the best iterate's correlation
    from the target.  ``strategy`` (and ``dilated_dims``) are populated only
    under projective rounding; the dilated dimensions are reported separately
    from the search dimension.
    """

    distance: float
    rho: np.ndarray
    alice_povms: list[list[np.ndarray]]
    bob_povms: list[list[np.ndarray]]
    traces: list[RestartTrace]
    config: SeesawConfig
    converged: bool
    strategy: Strategy | None = None
    dilated_dims: tuple[int, int] | None = None

    def trace_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["restart", "iter", "objective"])
        for trace in self.traces:
            for i, obj in enumerate(trace.objectives):
                writer.writerow([trace.restart, i, repr(float(obj))])
        return buf.getvalue()

    def summary_dict(self) -> dict:
        return {
            "distance": self.distance,
            "local_dim": self.config.local_dim,
            "restarts": self.config.restarts,
            "converged": self.converged,
            "iterations": [t.iterations for t in self.traces],
            "final_objectives": [t.objectives[-1] for t in self.traces],
            "dilated_dims": list(self.dilated_dims) if self.dilated_dims else None,
        }


def _partial_trace_b(rho4: np.ndarray, op: np.ndarray) -> np.ndarray:
    # tr_B[rho (I (x) op)]
    return np.einsum("ijkl,lj->ik", rho4, op)


def _partial_trace_a(rho4: np.ndarray, op: np.ndarray) -> np.ndarray:
    # tr_A[rho (op (x) I)]
    return np.einsum("ijkl,ki->jl", rho4, op)


def _hermitize(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.conj().T)


def _all_probs(
    rho4: np.ndarray,
    alice: list[list[np.ndarray]],
    bob: list[list[np.ndarray]],
) -> np.ndarray:
    m, r = len(alice), len(alice[0])
    n, s = len(bob), len(bob[0])
    out = np.empty((m, n, r, s))
    reduced = [[_partial_trace_b(rho4, bob[y][b]) for b in range(s)] for y in range(n)]
    for x in range(m):
        for y in range(n):
            for a in range(r):
                for b in range(s):
                    out[x, y, a, b] = float(np.real(np.sum(alice[x][a] * reduced[y][b].T)))
    return out


def _line_search(res: np.ndarray, step: np.ndarray) -> float:
    # minimize ||res + gamma*step||^2 over gamma in [0, 1]
    denom = float(step @ step)
    if denom <= 0.0:
        return 0.0
    gamma = -float(res @ step) / denom
    return min(1.0, max(0.0, gamma))


def _eigh2(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix."""
    a = h[0, 0].real
    c = h[1, 1].real
    b = h[0, 1]
    half = 0.5 * (a + c)
    rad = np.sqrt((0.5 * (a - c)) ** 2 + (b.real**2 + b.imag**2))
    scale = abs(a) + abs(c) + abs(b)
    if rad <= 1e-15 * max(scale, 1e-300):
        return np.array([half - rad, half + rad]), np.eye(2, dtype=complex)
    w1 = half + rad
    va = np.array([b, w1 - a], dtype=complex)
    vb = np.array([w1 - c, np.conj(b)], dtype=complex)
    v1 = va if np.linalg.norm(va) >= np.linalg.norm(vb) else vb
    v1 = v1 / np.linalg.norm(v1)
    v0 = np.array([-np.conj(v1[1]), np.conj(v1[0])], dtype=complex)
    return np.array([half - rad, w1]), np.stack([v0, v1], axis=1)


def _eigh_small(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = h.shape[0]
    if k == 1:
        return np.array([h[0, 0].real]), np.ones((1, 1), dtype=complex)
    if k == 2:
        return _eigh2(h)
    return np.linalg.eigh(h)


def _state_block(
    rho: np.ndarray,
    res: np.ndarray,
    kconj: np.ndarray,
    steps: int,
    rel_gap: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise conditional-gradient descent over density operators.

    ``kconj`` holds the conjugated, flattened measurement tensor products, so
    probabilities are real parts of kconj @ vec(rho).  The linear subproblem
    min <grad, sigma> over densities is solved by the smallest eigenvector of
    the gradient; away steps over the active rank-one atoms avoid the
    zigzag stalls of the plain method near low-rank optima.  Every atom
    caches its residual-space image, so step selection costs dot products.
    """
    dim = rho.shape[0]
    evals, evecs = np.linalg.eigh(_hermitize(rho))
    order = np.nonzero(evals > 1e-14)[0]
    atoms = [evecs[:, j] for j in order]
    weights = [float(evals[j]) for j in order]
    images = [np.real(kconj @ (np.outer(v, v.conj())).reshape(-1)) for v in atoms]
    rho = sum(w * np.outer(v, v.conj()) for w, v in zip(weights, atoms))

    for _ in range(steps):
        grad = _hermitize((kconj.conj().T @ (2.0 * res)).reshape(dim, dim))
        gvals, gvecs = np.linalg.eigh(grad)
        v_fw = gvecs[:, 0]
        fw_img = np.real(kconj @ np.outer(v_fw, v_fw.conj()).reshape(-1))
        # <grad, rho> = 2 res . image(rho), and image(rho) = res + targets
        scores = 2.0 * np.array([res @ img for img in images])
        away = int(np.argmax(scores))
        rho_score = 2.0 * float(
            res @ sum(w * img for w, img in zip(weights, images))
        )
        fw_gap = float(gvals[0]) - rho_score
        if fw_gap > -rel_gap * max(float(res @ res), 1e-120):
            break

        # candidate 1: pairwise swap from the worst atom onto the new vertex
        step_pw = fw_img - images[away]
        cap = weights[away]
        denom = float(step_pw @ step_pw)
        gamma_pw = 0.0 if denom <= 0.0 else min(cap, max(0.0, -float(res @ step_pw) / denom))
        dec_pw = -gamma_pw * float(res @ step_pw) - 0.5 * gamma_pw**2 * denom

        # candidate 2: plain step toward the new vertex
        rho_img = sum(w * img for w, img in zip(weights, images))
        step_fw = fw_img - rho_img
        gamma_fw = _line_search(res, step_fw)
        denom_fw = float(step_fw @ step_fw)
        dec_fw = -gamma_fw * float(res @ step_fw) - 0.5 * gamma_fw**2 * denom_fw

        fw_vertex = np.outer(v_fw, v_fw.conj())
        if dec_pw >= dec_fw:
            if gamma_pw <= 0.0:
                break
            rho = rho + gamma_pw * (fw_vertex - np.outer(atoms[away], atoms[away].conj()))
            weights[away] -= gamma_pw
            atoms.append(v_fw)
            weights.append(gamma_pw)
            images.append(fw_img)
            res = res + gamma_pw * step_pw
        else:
            if gamma_fw <= 0.0:
                break
            rho = (1.0 - gamma_fw) * rho + gamma_fw * fw_vertex
            weights = [w * (1.0 - gamma_fw) for w in weights]
            atoms.append(v_fw)
            weights.append(gamma_fw)
            images.append(fw_img)
            res = res + gamma_fw * step_fw
        keep = [j for j, w in enumerate(weights) if w > 1e-15]
        atoms = [atoms[j] for j in keep]
        weights = [weights[j] for j in keep]
        images = [images[j] for j in keep]
    return _hermitize(rho), res


def _povm_vertex(grads: list[np.ndarray], sweeps: int = 2) -> list[np.ndarray]:
    """Linear subproblem over one question's POVM set.

    Builds an orthonormal basis greedily (eigen-direction by eigen-direction
    of the gradient blocks, each given full weight on its minimizing
    outcome), then polishes the assignment with exact two-outcome exchanges:
    restricted to the span owned by any outcome pair, the optimal split is
    the negative/nonnegative eigenspace split of the restricted gradient
    difference.
    """
    dim = grads[0].shape[0]
    num_out = len(grads)
    basis = np.eye(dim, dtype=complex)
    owners: list[list[np.ndarray]] = [[] for _ in range(num_out)]
    while basis.shape[1] > 0:
        best_val = None
        best = None
        for a, grad in enumerate(grads):
            sub = _hermitize(basis.conj().T @ grad @ basis)
            evals, evecs = _eigh_small(sub)
            if best_val is None or evals[0] < best_val:
                best_val = evals[0]
                best = (a, evecs[:, 0], evecs[:, 1:])
        a_star, v0, v_rest = best  # type: ignore[misc]
        owners[a_star].append(basis @ v0)
        basis = basis @ v_rest

    for _ in range(sweeps):
        improved = False
        for a in range(num_out):
            for b in range(a + 1, num_out):
                pool = owners[a] + owners[b]
                if not pool:
                    continue
                span = np.stack(pool, axis=1)
                diff = _hermitize(span.conj().T @ (grads[a] - grads[b]) @ span)
                evals, evecs = _eigh_small(diff)
                neg = evecs[:, evals < 0.0]
                pos = evecs[:, evals >= 0.0]
                if neg.shape[1] != len(owners[a]):
                    improved = True
                owners[a] = [span @ neg[:, j] for j in range(neg.shape[1])]
                owners[b] = [span @ pos[:, j] for j in range(pos.shape[1])]
        if not improved:
            break

    vertex = []
    for vecs in owners:
        if vecs:
            stack = np.stack(vecs, axis=1)
            vertex.append(stack @ stack.conj().T)
        else:
            vertex.append(np.zeros((dim, dim), dtype=complex))
    return vertex


def _povm_block(
    povm: list[np.ndarray],
    reduced: list[np.ndarray],
    targets: np.ndarray,
    steps: int,
    rel_gap: float = 1e-6,
) -> list[np.ndarray]:
    """Pairwise conditional-gradient descent over one question's POVM.

    ``reduced`` are the Hermitian partial-trace operators for the opposite
    side's (question, answer) pairs; the block objective is
    sum_(a,k) (tr(E^a reduced_k) - targets[a,k])^2.  The iterate is kept as
    a convex combination of discovered projective vertices (plus the
    entering POVM), each caching its residual-space image, so away-step
    selection and line searches cost dot products only.
    """
    num_out = len(povm)
    red_stack = np.stack(reduced)  # (num_red, d, d)

    def apply_map(elements: list[np.ndarray]) -> np.ndarray:
        vals = np.real(np.einsum("aij,kji->ak", np.stack(elements), red_stack))
        return vals.reshape(-1)

    current = [e.copy() for e in povm]
    cur_img = apply_map(current)
    res = cur_img - targets.reshape(-1)
    atoms: list[list[np.ndarray]] = [[e.copy() for e in povm]]
    weights = [1.0]
    images = [cur_img.copy()]

    for _ in range(steps):
        res_mat = res.reshape(num_out, -1)
        grads = [
            _hermitize(np.einsum("k,kij->ij", 2.0 * res_mat[a], red_stack))
            for a in range(num_out)
        ]
        vertex = _povm_vertex(grads)
        v_img = apply_map(vertex)
        # <grads, E> = 2 res . image(E)
        fw_gap = 2.0 * float(res @ (v_img - cur_img))
        if fw_gap > -rel_gap * max(float(res @ res), 1e-120):
            break
        away = int(np.argmax([res @ img for img in images]))

        step_pw = v_img - images[away]
        cap = weights[away]
        denom = float(step_pw @ step_pw)
        gamma_pw = 0.0 if denom <= 0.0 else min(cap, max(0.0, -float(res @ step_pw) / denom))
        dec_pw = -gamma_pw * float(res @ step_pw) - 0.5 * gamma_pw**2 * denom

        step_fw = v_img - cur_img
        gamma_fw = _line_search(res, step_fw)
        denom_fw = float(step_fw @ step_fw)
        dec_fw = -gamma_fw * float(res @ step_fw) - 0.5 * gamma_fw**2 * denom_fw

        if dec_pw >= dec_fw:
            if gamma_pw <= 0.0:
                break
            current = [
                current[a] + gamma_pw * (vertex[a] - atoms[away][a])
                for a in range(num_out)
            ]
            weights[away] -= gamma_pw
            atoms.append(vertex)
            weights.append(gamma_pw)
            images.append(v_img)
            res = res + gamma_pw * step_pw
            cur_img = cur_img + gamma_pw * step_pw
        else:
            if gamma_fw <= 0.0:
                break
            current = [
                current[a] + gamma_fw * (vertex[a] - current[a]) for a in range(num_out)
            ]
            weights = [w * (1.0 - gamma_fw) for w in weights]
            atoms.append(vertex)
            weights.append(gamma_fw)
            images.append(v_img)
            res = res + gamma_fw * step_fw
            cur_img = cur_img + gamma_fw * step_fw
        keep = [j for j, w in enumerate(weights) if w > 1e-15]
        atoms = [atoms[j] for j in keep]
        weights = [weights[j] for j in keep]
        images = [images[j] for j in keep]
    return [_hermitize(e) for e in current]


def _random_init(
    rng: np.random.Generator, dim: int, questions: int, answers: int
) -> list[list[np.ndarray]]:
    from .strategy import haar_unitary

    sizes = [dim // answers + (1 if i < dim % answers else 0) for i in range(answers)]
    povms = []
    for _ in range(questions):
        u = haar_unitary(rng, dim)
        elements = []
        col = 0
        for size in sizes:
            block = u[:, col : col + size]
            elements.append((block @ block.conj().T).astype(complex))
            col += size
        povms.append(elements)
    return povms


def _kron_stack(
    alice: list[list[np.ndarray]], bob: list[list[np.ndarray]]
) -> np.ndarray:
    rows = []
    for x in range(len(alice)):
        for y in range(len(bob)):
            for a in range(len(alice[0])):
                for b in range(len(bob[0])):
                    rows.append(np.kron(alice[x][a], bob[y][b]).reshape(-1).conj())
    return np.stack(rows)


def optimize(target: Correlation, cfg: SeesawConfig) -> SeesawResult:
    """Search for the dimension-d model closest to the target in l2.

    Runs ``cfg.restarts`` independent searches from Haar-random pure states
    and random projective measurements, alternating state and per-question
    measurement blocks until the improvement drops below
    ``cfg.convergence_tol`` or the iteration budget runs out; with
    ``polish_iters`` set, the best restart then continues for that many
    extra outer iterations.  Restarts that hit the budget are flagged as
    non-converged but still contribute their best iterate.
    """
    d = cfg.local_dim
    m, n, r, s = target.shape
    t_flat = target.table.reshape(-1)
    t4 = target.table

    def outer_iteration(rho, alice, bob):
        kconj = _kron_stack(alice, bob)
        res = np.real(kconj @ rho.reshape(-1)) - t_flat
        rho, res = _state_block(rho, res, kconj, cfg.state_steps)
        rho4 = rho.reshape(d, d, d, d)
        for x in range(m):
            reduced = [
                _hermitize(_partial_trace_b(rho4, bob[y][b]))
                for y in range(n)
                for b in range(s)
            ]
            block_targets = t4[x].transpose(1, 0, 2).reshape(r, n * s)
            alice[x] = _povm_block(alice[x], reduced, block_targets, cfg.meas_steps)
        for y in range(n):
            reduced = [
                _hermitize(_partial_trace_a(rho4, alice[x][a]))
                for x in range(m)
                for a in range(r)
            ]
            block_targets = t4[:, y].reshape(m * r, s).T
            bob[y] = _povm_block(bob[y], reduced, block_targets, cfg.meas_steps)
        probs = _all_probs(rho4, alice, bob)
        return rho, float(np.sqrt(((probs - t4) ** 2).sum()))

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    traces: list[RestartTrace] = []
    best = None  # (distance, rho, alice, bob, converged, trace)
    for k in range(cfg.restarts):
        rng = np.random.default_rng(seeds[k])
        vec = rng.normal(size=d * d) + 1j * rng.normal(size=d * d)
        vec /= np.linalg.norm(vec)
        rho = np.outer(vec, vec.conj())
        alice = _random_init(rng, d, m, r)
        bob = _random_init(rng, d, n, s)

        trace = RestartTrace(restart=k)
        probs = _all_probs(rho.reshape(d, d, d, d), alice, bob)
        trace.objectives.append(float(np.sqrt(((probs - t4) ** 2).sum())))
        converged = False
        for outer in range(cfg.max_outer_iters):
            rho, obj = outer_iteration(rho, alice, bob)
            trace.objectives.append(obj)
            trace.iterations = outer + 1
            if trace.objectives[-2] - obj < cfg.convergence_tol:
                converged = True
                break
        trace.converged = converged
        traces.append(trace)
        final = trace.objectives[-1]
        if best is None or final < best[0]:
            best = (final, rho, alice, bob, converged, trace)

    assert best is not None
    _, rho, alice, bob, converged, best_trace = best
    for _ in range(cfg.polish_iters):
        rho, obj = outer_iteration(rho, alice, bob)
        best_trace.objectives.append(obj)
        best_trace.iterations += 1
        if best_trace.objectives[-2] - obj < cfg.convergence_tol:
            best_trace.converged = True
            converged = True
            break
    dist = best_trace.objectives[-1]
    result = SeesawResult(
        distance=dist,
        rho=rho,
        alice_povms=alice,
        bob_povms=bob,
        traces=traces,
        config=cfg,
        converged=converged,
    )
    if cfg.rounding == "projective":
        strategy, dims = _round_to_projective(rho, alice, bob)
        result.strategy = strategy
        result.dilated_dims = dims
    return result


def _sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(_hermitize(mat))
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def _naimark(povms: list[list[np.ndarray]], dim: int) -> tuple[list[list[np.ndarray]], int]:
    """Projective dilations of every question's POVM on C^dim (x) C^r.

    Each question gets a unitary sending |phi>|0> to sum_a sqrt(E^a)|phi>|a>;
    conjugating the ancilla projectors through it yields projective elements
    that reproduce the POVM statistics on states with the ancilla at |0>.
    """
    num_out = len(povms[0])
    big = dim * num_out
    dilated = []
    for elements in povms:
        w = np.zeros((big, dim), dtype=complex)
        for a, e in enumerate(elements):
            root = _sqrtm_psd(e)
            for i in range(dim):
                w[i * num_out + a, :] = root[i, :]
        # complete the isometry's columns to a unitary
        q, _ = np.linalg.qr(np.concatenate([w, np.eye(big, dtype=complex)], axis=1))
        comp = q[:, dim:big]
        u = np.zeros((big, big), dtype=complex)
        for j in range(dim):
            u[:, j * num_out] = w[:, j]
        extra = 0
        for j in range(dim):
            for anc in range(1, num_out):
                u[:, j * num_out + anc] = comp[:, extra]
                extra += 1
        projs = []
        for a in range(num_out):
            anc_proj = np.zeros((big, big), dtype=complex)
            for i in range(dim):
                anc_proj[i * num_out + a, i * num_out + a] = 1.0
            projs.append(u.conj().T @ anc_proj @ u)
        dilated.append(projs)
    return dilated, big


def _round_to_projective(
    rho: np.ndarray,
    alice: list[list[np.ndarray]],
    bob: list[list[np.ndarray]],
) -> tuple[Strategy, tuple[int, int]]:
    """Purify the state (ancilla to Bob) and dilate both parties' POVMs.

    The rounded strategy induces exactly the correlation of the relaxed
    iterate, at local dimensions (d*r, d*k*s) with k the state rank.
    """
    d2 = rho.shape[0]
    d = int(round(np.sqrt(d2)))
    evals, evecs = np.linalg.eigh(_hermitize(rho))
    keep = evals > 1e-12
    lam = evals[keep]
    vecs = evecs[:, keep]
    k = int(lam.size)
    # psi[(i), (j, c)] with Bob keeping the purifying register
    psi = (vecs * np.sqrt(lam)).reshape(d, d, k).reshape(d, d * k)
    bob_big = [[np.kron(e, np.eye(k, dtype=complex)) for e in q] for q in bob]

    alice_proj, da_dilated = _naimark(alice, d)
    bob_proj, db_dilated = _naimark(bob_big, d * k)

    r = len(alice[0])
    s = len(bob[0])
    state = np.zeros((da_dilated, db_dilated), dtype=complex)
    for i in range(d):
        for j in range(d * k):
            state[i * r, j * s] = psi[i, j]
    strategy = Strategy(
        dA=da_dilated,
        dB=db_dilated,
        state=state.reshape(-1),
        alice_meas=alice_proj,
        bob_meas=bob_proj,
    )
    return strategy, (da_dilated, db_dilated)


def upper_bound_from_truncation(alpha: float, d: int, metric: str = "max_tv") -> float:
    """Constructive upper bound at even local dimension d from the ideal cut.

    The dimension-d truncation of the ideal strategy is itself a feasible
    dimension-d model, so its distance to the exact correlation bounds the
    optimum from above; useful as a regression target for :func:`optimize`.
    """
    if d % 2 != 0:
        raise SeesawError(f"d must be even, got {d}")
    if d < 4:
        raise SeesawError(f"d must be >= 4, got {d}")
    return truncation_distance(alpha, d // 2, metric)
