"""Structural versus fine-tuned independences, parameter perturbation, and the
pairwise-confounding expressiveness gap.

A statement that holds in a model's observed distribution is structural when
the model's DAG d-separates it, and fine-tuned otherwise. The randomized
perturbation test is illustrative; the d-separation verdict is authoritative.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .distributions import (
    DEFAULT_TOL,
    EXACT,
    FULL_SETS_LIMIT,
    CausalModel,
    Cpt,
    DistributionError,
    JointDistribution,
    all_ci,
    ci_holds,
    condition,
    joint_from_model,
    marginalize,
    random_distribution,
)
from .graphs import Dag, LatentStructure, d_separated
from .independence import CISet, CIStatement

STRUCTURAL = "structural"
FINE_TUNED = "fine_tuned"
FAITHFUL = "faithful"
UNFAITHFUL = "unfaithful"

DEFAULT_TRIALS = 200
DEFAULT_MAGNITUDE = Fraction(1, 10)
BELL_ROLES = ("S", "T", "A", "B")


@dataclass(frozen=True)
class FaithfulnessReport:
    observed: tuple[str, ...]
    verdicts: tuple[tuple[CIStatement, str], ...]
    survival: tuple[tuple[CIStatement, float], ...] = ()
    trials: int = 0
    seed: int | None = None

    @property
    def overall(self) -> str:
        return FAITHFUL if all(v == STRUCTURAL for _, v in self.verdicts) else UNFAITHFUL

    def verdict(self, s: CIStatement) -> str:
        for t, v in self.verdicts:
            if t == s:
                return v
        raise KeyError(f"{s} does not hold in the observed distribution")

    def survival_of(self, s: CIStatement) -> float | None:
        return dict(self.survival).get(s)

    def fine_tuned(self) -> list[CIStatement]:
        return [s for s, v in self.verdicts if v == FINE_TUNED]

    def to_json(self) -> dict:
        rates = dict(self.survival)
        rows = []
        for s, v in self.verdicts:
            row: dict[str, Any] = {"statement": str(s), "sets": s.to_json(), "verdict": v}
            if s in rates:
                row["survival"] = rates[s]
            rows.append(row)
        out: dict[str, Any] = {"observed": list(self.observed), "overall": self.overall, "statements": rows}
        if self.trials:
            out["trials"] = self.trials
            out["seed"] = self.seed
        return out

    def table(self) -> str:
        if not self.verdicts:
            return "no independences\noverall: faithful"
        rates = dict(self.survival)
        width = max(len(str(s)) for s, _ in self.verdicts)
        lines = [f"{'statement':<{width}}  {'verdict':<10}  survival"]
        for s, v in self.verdicts:
            rate = f"{rates[s]:.3f}" if s in rates else "-"
            lines.append(f"{str(s):<{width}}  {v:<10}  {rate}")
        lines.append(f"overall: {self.overall}")
        return "\n".join(lines)


def observed_joint(m: CausalModel, observed: Iterable[str] | None = None, tol: float = DEFAULT_TOL) -> JointDistribution:
    joint = joint_from_model(m, tol)
    if observed is None:
        return joint
    keep = list(observed)
    if set(keep) == set(joint.variables):
        return joint
    return marginalize(joint, keep)


def classify_independences(
    m: CausalModel,
    observed: Iterable[str] | None = None,
    scope: str | None = None,
    tol: float | None = None,
    trials: int = 0,
    magnitude: Fraction | float = DEFAULT_MAGNITUDE,
    seed: int = 0,
) -> FaithfulnessReport:
    """Label every CI statement of the observed marginal as structural or fine-tuned.

    ``scope`` defaults to full sets when there are at most six observed
    variables. With ``trials`` > 0 each statement also gets a perturbation
    survival rate.
    """
    obs = tuple(observed) if observed is not None else m.variables
    for v in obs:
        if v not in m.variables:
            raise DistributionError(f"observed variable {v} is not in the model", "unknown-variable")
    if scope is None:
        scope = "full_sets" if len(obs) <= FULL_SETS_LIMIT else "singleton_pairs"
    d = observed_joint(m, obs, DEFAULT_TOL if tol is None else tol)
    found = all_ci(d, scope, tol)
    verdicts = tuple((s, STRUCTURAL if d_separated(m.dag, s.x, s.y, s.z) else FINE_TUNED) for s in found)
    survival: tuple[tuple[CIStatement, float], ...] = ()
    if trials:
        runs = perturbation_runs(m, list(found), trials, magnitude, seed, obs, tol)
        survival = tuple((s, r.rate) for s, r in zip(found, runs))
    return FaithfulnessReport(obs, verdicts, survival, trials, seed if trials else None)


def _mix(row: Sequence[Any], noise: Sequence[Any], w: Any) -> tuple[Any, ...]:
    return tuple((1 - w) * a + w * b for a, b in zip(row, noise))


def perturb_model(m: CausalModel, rng: np.random.Generator, magnitude: Fraction | float) -> CausalModel:
    """Mix every CPT row with a random distribution at weight ``magnitude``.

    Rows stay normalized, so no clipping is needed. Exact models receive
    rational noise and stay exact.
    """
    exact = m.mode == EXACT
    w = Fraction(magnitude) if exact else float(magnitude)
    cpts = {}
    for v in m.variables:
        cpt = m.cpts[v]
        table = {}
        for key in sorted(cpt.table):
            noise = random_distribution(rng, cpt.card)
            if not exact:
                noise = tuple(float(x) for x in noise)
            table[key] = _mix(cpt.table[key], noise, w)
        cpts[v] = Cpt(v, cpt.parents, table)
    return m.replace_cpts(cpts)


@dataclass(frozen=True)
class PerturbationResult:
    statement: CIStatement
    trials: int
    magnitude: float
    seed: int
    survivors: tuple[int, ...]

    @property
    def rate(self) -> float:
        return len(self.survivors) / self.trials


def perturbation_runs(
    m: CausalModel,
    statements: Sequence[CIStatement],
    trials: int = DEFAULT_TRIALS,
    magnitude: Fraction | float = DEFAULT_MAGNITUDE,
    seed: int = 0,
    observed: Iterable[str] | None = None,
    tol: float | None = None,
) -> list[PerturbationResult]:
    """Shared trials for several statements; trial i draws from the stream (seed, i)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0 <= magnitude <= 1:
        raise ValueError("magnitude must lie in [0, 1]")
    obs = list(observed) if observed is not None else None
    survivors: list[list[int]] = [[] for _ in statements]
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        d = observed_joint(perturb_model(m, rng, magnitude), obs, DEFAULT_TOL if tol is None else tol)
        for k, s in enumerate(statements):
            if ci_holds(d, s, tol):
                survivors[k].append(i)
    return [PerturbationResult(s, trials, float(magnitude), seed, tuple(sv)) for s, sv in zip(statements, survivors)]


def perturbation_stability(
    m: CausalModel,
    s: CIStatement,
    trials: int = DEFAULT_TRIALS,
    magnitude: Fraction | float = DEFAULT_MAGNITUDE,
    seed: int = 0,
    tol: float | None = None,
) -> float:
    """Fraction of seeded perturbations of ``m`` under which ``s`` still holds."""
    return perturbation_runs(m, [s], trials, magnitude, seed, None, tol)[0].rate


def _role_vars(m: CausalModel) -> dict[str, str]:
    missing = [r for r in BELL_ROLES if r not in m.roles]
    if missing:
        raise DistributionError(f"model declares no variable for roles {missing}", "missing-role")
    return {r: m.roles[r] for r in BELL_ROLES}


def signalling_check(m: CausalModel | JointDistribution, tol: float | None = None) -> dict[str, bool]:
    """No-signalling on each wing; True means the wing's outcome ignores the remote setting.

    ``left`` is (A ⊥ T | S) and ``right`` is (B ⊥ S | T). A bare joint over
    variables named S, T, A, B is accepted too.
    """
    if isinstance(m, JointDistribution):
        r = {v: v for v in BELL_ROLES}
        d = m
    else:
        r = _role_vars(m)
        d = observed_joint(m, r.values())
    left = CIStatement.make(r["A"], r["T"], r["S"])
    right = CIStatement.make(r["B"], r["S"], r["T"])
    return {"left": ci_holds(d, left, tol), "right": ci_holds(d, right, tol)}


def empirical_model(d: JointDistribution, roles: Mapping[str, str] | None = None) -> CausalModel:
    """Wrap a joint as a model on the complete DAG in ``d``'s variable order.

    Each variable gets P(v | earlier variables); parent contexts of
    probability zero get a uniform row.
    """
    names = d.variables
    edges = [(names[i], names[j]) for j in range(len(names)) for i in range(j)]
    dag = Dag(names, frozenset(edges))
    cpts = {}
    exact = d.mode == EXACT
    for j, v in enumerate(names):
        parents = names[:j]
        marg = marginalize(d, names[: j + 1]).reorder(names[: j + 1])
        table = {}
        for key in product(*(range(d.card(p)) for p in parents)):
            try:
                sub = condition(marg, dict(zip(parents, key)))
                row = tuple(sub.probs.reshape(-1))
            except DistributionError:
                k = d.card(v)
                row = tuple(Fraction(1, k) if exact else 1.0 / k for _ in range(k))
            if not exact:
                total = float(sum(row))
                row = tuple(float(x) / total for x in row)
            table[key] = row
        cpts[v] = Cpt(v, parents, table)
    return CausalModel(dag, {v: d.card(v) for v in names}, cpts, dict(roles or {}))


# ---------------------------------------------------------------------------
# worked-example models

_H = Fraction(1, 2)
BELL = {"S": "S", "T": "T", "A": "A", "B": "B"}


def and_gate_model() -> CausalModel:
    """A and B uniform, C = A AND B."""
    dag = Dag.parse("A->C, B->C", "ABC")
    return CausalModel(
        dag,
        {"A": 2, "B": 2, "C": 2},
        {
            "A": Cpt.prior("A", [_H, _H]),
            "B": Cpt.prior("B", [_H, _H]),
            "C": Cpt.deterministic("C", ["A", "B"], [2, 2], lambda a, b: a * b),
        },
    )


def fine_tuned_abc_model() -> CausalModel:
    """C -> B, C -> A, B -> A with parameters that hide the A - B dependence.

    The row for B=0, C=1 is never reached; it is set uniform.
    """
    dag = Dag.parse("C->B, C->A, B->A", "ABC")
    return CausalModel(
        dag,
        {"A": 2, "B": 2, "C": 2},
        {
            "C": Cpt.prior("C", [Fraction(3, 4), Fraction(1, 4)]),
            "B": Cpt.from_rows("B", ["C"], [2], [[Fraction(2, 3), Fraction(1, 3)], [0, 1]]),
            "A": Cpt(
                "A",
                ("B", "C"),
                {(0, 0): (_H, _H), (0, 1): (_H, _H), (1, 0): (1, 0), (1, 1): (0, 1)},
            ),
        },
    )


def _uniform(k: int) -> list[Fraction]:
    return [Fraction(1, k)] * k


def _lam_prior(l1: Sequence[Any], l2: Sequence[Any]) -> list[Any]:
    # lambda = 2 * l1 + l2
    return [a * b for a, b in product(l1, l2)]


def xor_superluminal_model(lambda1: Sequence[Any] = (_H, _H)) -> CausalModel:
    """Superluminal S -> B with a hidden lambda = (l1, l2).

    A = l1; B = S xor l1 when T = 1 and B = l2 when T = 0. B depends on S
    only through S xor l1, which is uniform exactly when l1 is.
    """
    dag = Dag.parse("L->A, L->B, S->A, S->B, T->B", ("S", "T", "L", "A", "B"))
    cards = {"S": 2, "T": 2, "L": 4, "A": 2, "B": 2}
    cpts = {
        "S": Cpt.prior("S", [_H, _H]),
        "T": Cpt.prior("T", [_H, _H]),
        "L": Cpt.prior("L", _lam_prior(lambda1, (_H, _H))),
        "A": Cpt.deterministic("A", ["S", "L"], [2, 4], lambda s, lam: lam >> 1),
        "B": Cpt.deterministic("B", ["S", "T", "L"], [2, 2, 4], lambda s, t, lam: s ^ (lam >> 1) if t else lam & 1),
    }
    return CausalModel(dag, cards, cpts, dict(BELL))


def parity_superdeterminism_model() -> CausalModel:
    """lambda = (l1, l2) drives the setting S = l1; B = l2 and A = l1 xor l2.

    The part of lambda that S sees is correlated with the parity A xor B
    but not with B alone.
    """
    dag = Dag.parse("L->S, L->A, L->B, S->A, T->B", ("L", "S", "T", "A", "B"))
    cards = {"L": 4, "S": 2, "T": 2, "A": 2, "B": 2}
    cpts = {
        "L": Cpt.prior("L", _uniform(4)),
        "S": Cpt.deterministic("S", ["L"], [4], lambda lam: lam >> 1),
        "T": Cpt.prior("T", [_H, _H]),
        "A": Cpt.deterministic("A", ["L", "S"], [4, 2], lambda lam, s: (lam >> 1) ^ (lam & 1)),
        "B": Cpt.deterministic("B", ["L", "T"], [4, 2], lambda lam, t: lam & 1),
    }
    return CausalModel(dag, cards, cpts, dict(BELL))


def retrocausal_model() -> CausalModel:
    """The setting S causes lambda = (l1, l2) with l1 = S and l2 uniform; B = l2, A = l1 xor l2."""
    dag = Dag.parse("S->L, L->A, L->B, S->A, T->B", ("S", "T", "L", "A", "B"))
    cards = {"S": 2, "T": 2, "L": 4, "A": 2, "B": 2}
    rows = [[_H, _H, 0, 0], [0, 0, _H, _H]]
    cpts = {
        "S": Cpt.prior("S", [_H, _H]),
        "T": Cpt.prior("T", [_H, _H]),
        "L": Cpt.from_rows("L", ["S"], [2], rows),
        "A": Cpt.deterministic("A", ["S", "L"], [2, 4], lambda s, lam: (lam >> 1) ^ (lam & 1)),
        "B": Cpt.deterministic("B", ["T", "L"], [2, 4], lambda t, lam: lam & 1),
    }
    return CausalModel(dag, cards, cpts, dict(BELL))


# ---------------------------------------------------------------------------
# expressiveness gap


def triangle_structures() -> tuple[LatentStructure, LatentStructure]:
    """(three pairwise confounders of X, Y, Z; one common cause of all three)."""
    obs = ("X", "Y", "Z")
    pairwise = LatentStructure.build(obs, [], [{"X", "Y"}, {"Y", "Z"}, {"X", "Z"}])
    triple = LatentStructure.build(obs, [], [{"X", "Y", "Z"}])
    return pairwise, triple


class _Tensorized:
    """Float evaluation of a binary-observed latent structure over free CPTs."""

    def __init__(self, structure: LatentStructure, latent_card: int):
        dag = structure.dag
        self.names = dag.vertices
        self.observed = structure.observed
        self.cards = {v: latent_card if v in structure.latent else 2 for v in self.names}
        self.parents = {v: dag.ordered_parents(v) for v in self.names}
        letters = dict(zip(self.names, string.ascii_letters))
        terms = ["".join(letters[p] for p in self.parents[v]) + letters[v] for v in self.names]
        self.spec = ",".join(terms) + "->" + "".join(letters[v] for v in self.observed)
        self.shapes = {v: tuple(self.cards[p] for p in self.parents[v]) + (self.cards[v],) for v in self.names}

    def joint(self, params: Mapping[str, np.ndarray]) -> np.ndarray:
        return np.einsum(self.spec, *(params[v] for v in self.names))

    def random(self, rng: np.random.Generator, alpha: float) -> dict[str, np.ndarray]:
        return {v: rng.dirichlet([alpha] * self.cards[v], size=self.shapes[v][:-1]) for v in self.names}


def agreement(p: np.ndarray) -> float:
    """Overlap with the perfectly correlated uniform bits: 2 min(P(000), P(111))."""
    return float(2 * min(p[0, 0, 0], p[1, 1, 1]))


def _snap(row: np.ndarray, grid: int) -> np.ndarray:
    units = np.floor(row * grid).astype(int)
    short = grid - units.sum()
    order = np.argsort(-(row * grid - units), kind="stable")
    units[order[:short]] += 1
    return units / grid


def _refine(model: _Tensorized, params: dict[str, np.ndarray], grid: int) -> tuple[float, dict[str, np.ndarray]]:
    """Coordinate ascent on the grid of multiples of 1/grid, coarse steps first."""
    params = {v: np.apply_along_axis(_snap, -1, t, grid) for v, t in params.items()}
    best = agreement(model.joint(params))
    steps = []
    k = grid
    while k >= 1:
        steps.append(k)
        k //= 2
    for units in sorted(set(steps), reverse=True):
        step = units / grid
        improved = True
        while improved:
            improved = False
            for v in model.names:
                table = params[v]
                for key in np.ndindex(table.shape[:-1]):
                    row = table[key]
                    # jump to a corner of the simplex
                    for i in range(len(row)):
                        saved = row.copy()
                        row[:] = 0
                        row[i] = 1
                        score = agreement(model.joint(params))
                        if score > best + 1e-12:
                            best = score
                            improved = True
                        else:
                            row[:] = saved
                    for i, j in product(range(len(row)), repeat=2):
                        if i == j or row[i] < step - 1e-12:
                            continue
                        row[i] -= step
                        row[j] += step
                        score = agreement(model.joint(params))
                        if score > best + 1e-12:
                            best = score
                            improved = True
                        else:
                            row[i] += step
                            row[j] -= step
    return best, params


@dataclass(frozen=True)
class GapResult:
    pairwise_max: float
    triple_max: float
    pairwise_deterministic_max: float | None
    latent_card: int
    grid: int
    seed: int
    samples: int
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "objective": "2*min(P(000), P(111))",
            "pairwise_max": self.pairwise_max,
            "triple_max": self.triple_max,
            "pairwise_deterministic_max": self.pairwise_deterministic_max,
            "latent_card": self.latent_card,
            "grid": self.grid,
            "seed": self.seed,
            "samples": self.samples,
            **self.config,
        }


def search_agreement(
    structure: LatentStructure,
    latent_card: int,
    grid: int = 20,
    seed: int = 0,
    samples: int = 10_000,
    starts: int = 4,
    extra_starts: Sequence[dict[str, np.ndarray]] = (),
) -> tuple[float, dict[str, np.ndarray]]:
    """Seeded random search over CPTs, then grid refinement of the best draws and of ``extra_starts``."""
    model = _Tensorized(structure, latent_card)
    rng = np.random.default_rng(seed)
    scored = []
    for i in range(samples):
        # alternate flat and corner-seeking draws
        params = model.random(rng, 1.0 if i % 2 == 0 else 0.2)
        scored.append((agreement(model.joint(params)), i, params))
    scored.sort(key=lambda t: (-t[0], t[1]))
    best, best_params = scored[0][0], scored[0][2]
    for params in [p for _, _, p in scored[:starts]] + list(extra_starts):
        score, refined = _refine(model, {v: t.copy() for v, t in params.items()}, grid)
        if score > best:
            best, best_params = score, refined
    return best, best_params


def deterministic_max(structure: LatentStructure, grid: int = 10) -> tuple[float, dict[str, np.ndarray]]:
    """Exhaustive search with binary latents, deterministic observed responses and latent priors on a grid.

    Observed variables may only have latent parents. Returns the best
    agreement and float CPTs realizing it.
    """
    dag = structure.dag
    latents = sorted(structure.latent, key=dag.index)
    observed = structure.observed
    for v in observed:
        if not set(dag.parents(v)) <= structure.latent:
            raise ValueError("deterministic search needs observed variables with latent parents only")
    configs = list(product((0, 1), repeat=len(latents)))
    pos = {lam: i for i, lam in enumerate(latents)}
    outputs = []
    for v in observed:
        pa = dag.ordered_parents(v)
        keys = list(product((0, 1), repeat=len(pa)))
        tables = list(product((0, 1), repeat=len(keys)))
        col = [keys.index(tuple(c[pos[p]] for p in pa)) for c in configs]
        outputs.append(np.array([[t[k] for k in col] for t in tables]))
    q = np.arange(grid + 1) / grid
    priors = np.array(list(product(q, repeat=len(latents))))
    weight = np.ones((len(priors), len(configs)))
    for j, c in enumerate(configs):
        for i, bit in enumerate(c):
            weight[:, j] *= priors[:, i] if bit else 1 - priors[:, i]
    best, arg = -1.0, None
    for choice in product(*(range(len(o)) for o in outputs)):
        rows = np.array([o[k] for o, k in zip(outputs, choice)])
        zero = (rows == 0).all(axis=0).astype(float)
        one = (rows == 1).all(axis=0).astype(float)
        if not zero.any() or not one.any():
            continue
        scores = 2 * np.minimum(weight @ zero, weight @ one)
        g = int(np.argmax(scores))
        if scores[g] > best + 1e-12:
            best, arg = float(scores[g]), (choice, g)
    params: dict[str, np.ndarray] = {}
    if arg is not None:
        choice, g = arg
        for i, lam in enumerate(latents):
            params[lam] = np.array([1 - priors[g, i], priors[g, i]])
        for v, o, k in zip(observed, outputs, choice):
            pa = dag.ordered_parents(v)
            keys = list(product((0, 1), repeat=len(pa)))
            table = np.zeros((2,) * len(pa) + (2,))
            for key in keys:
                f = o[k][[configs.index(c) for c in configs if tuple(c[pos[p]] for p in pa) == key][0]]
                table[key + (int(f),)] = 1.0
            params[v] = table
    return max(best, 0.0), params


def _embed(params: Mapping[str, np.ndarray], structure: LatentStructure, latent_card: int) -> dict[str, np.ndarray]:
    """Lift binary-latent CPTs to ``latent_card`` values; extra latent values get zero prior."""
    dag = structure.dag
    out = {}
    for v, t in params.items():
        if v in structure.latent:
            row = np.zeros(latent_card)
            row[:2] = t
            out[v] = row
            continue
        pa = dag.ordered_parents(v)
        big = np.full(tuple(latent_card if p in structure.latent else 2 for p in pa) + (2,), 0.5)
        big[(slice(0, 2),) * len(pa)] = t
        out[v] = big
    return out


def expressive_gap_demo(
    pairwise: LatentStructure | None = None,
    triple: LatentStructure | None = None,
    latent_card: int = 4,
    grid: int = 20,
    seed: int = 0,
    samples: int = 10_000,
    deterministic_grid: int = 10,
) -> GapResult:
    """Best agreement with perfectly correlated uniform bits for each structure.

    The triple structure is searched with binary latents, which already
    suffice for an exact copy; the pairwise structure with ``latent_card``
    values per latent. The exhaustive deterministic optimum of the pairwise
    structure is reported separately and also seeds its refinement.
    """
    if pairwise is None or triple is None:
        default_pair, default_triple = triangle_structures()
        pairwise = pairwise or default_pair
        triple = triple or default_triple
    if not pairwise.is_pairwise:
        raise ValueError("first structure must be limited to pairwise confounding")
    triple_max, _ = search_agreement(triple, 2, grid, seed, samples)
    det, det_params = deterministic_max(pairwise, deterministic_grid)
    extra = [_embed(det_params, pairwise, latent_card)] if det_params else []
    pair_max, _ = search_agreement(pairwise, latent_card, grid, seed, samples, extra_starts=extra)
    config = {
        "triple_latent_card": 2,
        "refine_starts": 4,
        "deterministic_grid": deterministic_grid,
        "draws": "dirichlet alpha 1.0 / 0.2 alternating",
    }
    return GapResult(pair_max, triple_max, det, latent_card, grid, seed, samples, config)
