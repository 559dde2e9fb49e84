#!/usr/bin/env python3
"""
Seeded property campaigns over the whole toolkit.

Each campaign is split into fixed-size shards with seeds seed * 1000 + shard,
so the aggregated report does not depend on the number of workers. Shards run
in a process pool when more than one worker is configured.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple
import logging
import random

from data.exceptions import LatticeError
from data.gamma import (cyclic_group, symmetric_group_3, direct_product, random_gamma_form,
                        hermitianize, is_sesquilinear, twist, gamma_isometric_split_abelian,
                        GammaLattice, coradical_is_semisimple)
from data.lattice_forms import (GramForm, isometric_integral, isometric_integral_nearly_unimodular,
                                is_nearly_unimodular, rational_class, rational_class_of_matrix,
                                jordan_invariant_oracle, lift_isometry_with_trace)
from data.orders import (BlockOrder, radical_power, closed_form_radical_power,
                         radical_power_by_conductor, ideal_multiply, star_scan,
                         radical_sandwich_holds, candidate_lattices, residue_unitary_enumerate,
                         star_check, ValuationPattern, ValuationIdeal)
from data.pmatrix import PMatrix
from data.refine import AmbientForm, refine_with_trace
from data.transfer import build_context, descent_experiment, morphism_iso_test, morphism_isomorphism
from utils.random_forms import (random_nearly_unimodular, random_gl, random_rational_form,
                                random_morphism, transported_morphism, hensel_instance)
from utils.reports import CampaignReport
from utils.settings import ComputeConfig

logger = logging.getLogger(__name__)

SHARD_SIZE = 25
PRIMES = (3, 5, 7)


def shard_seed(seed: int, shard: int) -> int:
    return seed * 1000 + shard


def shard_plan(trials: int, seed: int) -> List[Tuple[int, int]]:
    """(trials, derived seed) per shard"""
    plan = []
    shard = 0
    while trials > 0:
        size = min(SHARD_SIZE, trials)
        plan.append((size, shard_seed(seed, shard)))
        trials -= size
        shard += 1
    return plan


# ---------------------------------------------------------------------------
# Individual campaigns (one shard each)
# ---------------------------------------------------------------------------

def oracle_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    """Nearly unimodular decision agrees with the Jordan oracle"""
    rng = random.Random(seed)
    report = CampaignReport("oracle")
    for t in range(trials):
        p = PRIMES[t % len(PRIMES)]
        rank = rng.randint(1, 6)
        f = random_nearly_unimodular(rng, p, rank)
        if rng.randrange(2):
            g = f.congruent(random_gl(rng, rank, p))
        else:
            g = random_nearly_unimodular(rng, p, rank)
        decision = isometric_integral_nearly_unimodular(f, g)
        oracle = isometric_integral(f, g)
        report.count("isometric" if oracle else "distinct")
        report.record(decision == oracle, f"p={p} f={f.gram} g={g.gram}: decision {decision}, oracle {oracle}")
    return report


def refine_non_uniqueness(p: int = 3) -> Tuple[list, list]:
    """Two start lattices in the <1,1,-1> space refining to oracle-distinct outputs"""
    gram = PMatrix.diagonal([1, 1, -1], p)
    first = refine_with_trace(AmbientForm.standard(gram)).output
    basis = PMatrix.from_columns([[1, 0, 0], [0, 2 * p, p], [0, 1, 2]], p)
    second = refine_with_trace(AmbientForm(gram, basis)).output
    return (jordan_invariant_oracle(first.restricted_form()),
            jordan_invariant_oracle(second.restricted_form()))


def refine_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    rng = random.Random(seed)
    report = CampaignReport("refine")
    for t in range(trials):
        p = PRIMES[t % len(PRIMES)]
        gram = random_rational_form(rng, p, rng.randint(1, 6))
        result = refine_with_trace(AmbientForm.standard(gram))
        out = result.output.restricted_form()
        ok = (is_nearly_unimodular(out) and rational_class(out) == rational_class_of_matrix(gram)
              and result.iterations <= result.initial_colength
              and all(step.chain_holds for step in result.trace))
        report.count("iterations", result.iterations)
        report.record(ok, f"p={p} gram={gram}: output {out.gram} after {result.iterations} iterations")
    if seed % 1000 == 0:
        a, b = refine_non_uniqueness()
        report.record(a != b, f"non-uniqueness exhibit produced equal outputs {a}")
    return report


def _block_orders(max_blocks: int = 3, max_size: int = 3) -> List[Tuple[int, ...]]:
    sizes: List[Tuple[int, ...]] = []
    frontier: List[Tuple[int, ...]] = [()]
    for _ in range(max_blocks):
        frontier = [s + (m,) for s in frontier for m in range(1, max_size + 1)]
        sizes.extend(frontier)
    return sizes


def radical_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    """Closed-form powers, the power law and the conductor description"""
    report = CampaignReport("radical")
    p = 3
    for n1 in range(1, 4):
        for n2 in range(1, 4):
            o = BlockOrder(p, (n1, n2))
            for n in range(-3, 4):
                report.record(radical_power(o, n) == closed_form_radical_power((n1, n2), n),
                              f"closed form differs for sizes ({n1},{n2}), n={n}")
    for sizes in _block_orders():
        o = BlockOrder(p, sizes)
        A = o.pattern.as_ideal()
        powers = {n: radical_power(o, n) for n in range(-6, 7)}
        report.record(ideal_multiply(powers[-1], powers[1]) == A, f"J^-1 J != A for {sizes}")
        for a in range(-3, 4):
            for b in range(-3, 4):
                report.record(ideal_multiply(powers[a], powers[b]) == powers[a + b],
                              f"J^{a} J^{b} != J^{a + b} for {sizes}")
        for n in range(-3, 0):
            report.record(radical_power_by_conductor(o, n) == powers[n],
                          f"conductor power differs for {sizes}, n={n}")
    return report


def descent_contexts() -> List[Tuple[int, List[int]]]:
    """Diagonal forms with anisotropic residue constituents at p = 3, 5"""
    return [(3, [1, 1]), (3, [1, 3]), (3, [1, 3, 3]), (3, [1, 1, 3, 3]),
            (5, [1, 2]), (5, [1, 5]), (5, [1, 5, 10]), (5, [1, 2, 5, 10])]


def descent_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    report = CampaignReport("descent")
    for index, (p, diag) in enumerate(descent_contexts()):
        ctx = build_context(GramForm.diagonal(diag, p))
        result = descent_experiment(ctx, trials, seed + index, config.denominator_bound,
                                    config.max_retries)
        report.trials += result.trials
        report.passed += result.integral_witness_count
        report.count("integral_witness_count", result.integral_witness_count)
        report.count("claim9_violations", result.claim9_violations)
        report.count("claim11_violations", result.claim11_violations)
        if result.claim9_violations or result.claim11_violations:
            report.failures.append(f"p={p} diag={diag}: valuation law violated")
    if seed % 1000 == 0:
        control = descent_experiment(build_context(GramForm.diagonal([1, -1], 3)),
                                     min(trials, 10), seed, config.denominator_bound,
                                     config.max_retries)
        report.count("isotropic_control_integral", control.integral_witness_count)
        report.count("isotropic_control_trials", control.trials)
    return report


def morphism_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    rng = random.Random(seed)
    report = CampaignReport("morphism")
    for t in range(trials):
        p = PRIMES[t % len(PRIMES)]
        first = random_morphism(rng, p)
        second = transported_morphism(rng, first) if rng.randrange(2) else random_morphism(rng, p)
        if not morphism_iso_test(first, second):
            report.count("non_isomorphic")
            report.record(True)
            continue
        try:
            phi, psi = morphism_isomorphism(first, second)
            ok = psi @ first.map == second.map @ phi
        except LatticeError as e:
            ok = False
            logger.debug(f"pair construction failed: {e}")
        report.count("pairs_constructed", int(ok))
        report.record(ok, f"p={p}: no verified pair for {first.map} / {second.map}")
    return report


def hensel_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    rng = random.Random(seed)
    report = CampaignReport("hensel")
    k = config.precision
    for t in range(trials):
        p = PRIMES[t % len(PRIMES)]
        G, Gt, X0 = hensel_instance(rng, p, rng.randint(1, 4))
        result = lift_isometry_with_trace(G, Gt, X0, k)
        history = result.defect_history
        doubling = all(b >= min(2 * a, k) for a, b in zip(history, history[1:]))
        ok = (G.congruent(result.witness).congruent_mod(Gt, k) and result.steps <= 4 and doubling)
        report.count("steps", result.steps)
        report.record(ok, f"p={p}: steps {result.steps}, defects {history}")
    return report


def residue_unitary_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    report = CampaignReport("residue_unitary")
    for p in (3, 5):
        first = residue_unitary_enumerate(p, involution="first")
        second = residue_unitary_enumerate(p, involution="second")
        report.record(first[0] == p, f"p={p}: first involution component {first[0]}")
        report.record(second[0] == p - 1, f"p={p}: second involution component {second[0]}")
    return report


def star_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    report = CampaignReport("star")
    p = 3
    bad = star_check(ValuationPattern(p, [[0, 1, 2], [0, 0, 1], [0, 0, 0]]),
                     ValuationIdeal([[0, 0, 1], [-1, -1, 0], [-1, -1, 0]]))
    report.record(not bad.holds, "3x3 pattern example did not violate the star property")
    good = star_check(ValuationPattern(p, [[0, 2], [0, 0]]), ValuationIdeal([[-1, 0], [-2, -1]]))
    report.record(good.holds, "2x2 pattern with its largest lattice violates the star property")
    for sizes in _block_orders(3, 2):
        if sum(sizes) > 3:
            continue
        o = BlockOrder(p, sizes)
        scan = star_scan(o, samples=config.star_scan_samples, seed=seed)
        report.count("lattices_scanned", scan["checked"])
        report.record(scan["violations"] == 0, f"star violations on block order {sizes}")
        rng = random.Random(seed)
        for L in candidate_lattices(o, samples=50, rng=rng):
            for n in (1, 2):
                report.record(radical_sandwich_holds(o, L, n),
                              f"radical sandwich fails for {sizes}, n={n}, L={L.to_json()}")
    return report


ROUNDTRIP_GROUPS = ("C2", "C3", "S3")
TWIST_CONFIGS = (("C2", 5), ("C2", 7), ("C3", 7), ("C2xC2", 5), ("C2xC2", 7))


def group_by_name(name: str):
    if name == "S3":
        return symmetric_group_3()
    if name == "C2xC2":
        return direct_product(cyclic_group(2), cyclic_group(2))
    return cyclic_group(int(name[1:]))


def gamma_roundtrip_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    rng = random.Random(seed)
    report = CampaignReport("gamma_roundtrip")
    for name in ROUNDTRIP_GROUPS:
        group = group_by_name(name)
        for p in (5, 7):
            for _ in range(trials):
                L = random_gamma_form(group, p, rng, pieces=rng.randint(1, 2))
                try:
                    table = hermitianize(L)
                    ok = is_sesquilinear(L, table) and coradical_is_semisimple(L)
                except LatticeError as e:
                    ok = False
                    logger.debug(f"round trip failed: {e}")
                report.record(ok, f"{name} p={p}: round trip failed for rank {L.rank}")
    return report


def sign_coradical_pair(p: int = 5) -> Tuple[GammaLattice, GammaLattice]:
    """diag(1, p) under C2: trivial action against the sign on the second coordinate"""
    group = cyclic_group(2)
    gram = PMatrix.diagonal([1, p], p)
    trivial = (PMatrix.identity(2, p), PMatrix.identity(2, p))
    signed = (PMatrix.identity(2, p), PMatrix.diagonal([1, -1], p))
    return GammaLattice(group, trivial, gram), GammaLattice(group, signed, gram)


def gamma_twist_shard(trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    rng = random.Random(seed)
    report = CampaignReport("gamma_twist")
    for t in range(trials):
        name, p = TWIST_CONFIGS[t % len(TWIST_CONFIGS)]
        L = random_gamma_form(group_by_name(name), p, rng, pieces=2)
        M = twist(L, random_gl(rng, L.rank, p))
        detected = gamma_isometric_split_abelian(L, M, seed, config.kgamma_exhaustive_limit,
                                                 config.kgamma_random_tries)
        report.record(detected, f"{name} p={p}: twist of rank {L.rank} not detected")
    if seed % 1000 == 0:
        L, M = sign_coradical_pair()
        report.record(not gamma_isometric_split_abelian(L, M), "sign/trivial coradical pair not separated")
    return report


CAMPAIGNS: Dict[str, Callable[[int, int, ComputeConfig], CampaignReport]] = {
    "oracle": oracle_shard,
    "refine": refine_shard,
    "radical": radical_shard,
    "descent": descent_shard,
    "morphism": morphism_shard,
    "hensel": hensel_shard,
    "residue_unitary": residue_unitary_shard,
    "star": star_shard,
    "gamma_roundtrip": gamma_roundtrip_shard,
    "gamma_twist": gamma_twist_shard,
}

# campaigns whose checks are fixed enumerations rather than random trials
DETERMINISTIC = {"radical", "residue_unitary", "star"}


def _run_shard(name: str, trials: int, seed: int, config: ComputeConfig) -> CampaignReport:
    return CAMPAIGNS[name](trials, seed, config)


def run_campaign(name: str, trials: int, seed: int, config: Optional[ComputeConfig] = None,
                 workers: Optional[int] = None) -> CampaignReport:
    """Run every shard of one campaign and merge the reports"""
    config = config or ComputeConfig()
    if name not in CAMPAIGNS:
        raise KeyError(name)
    plan = [(1, shard_seed(seed, 0))] if name in DETERMINISTIC else shard_plan(trials, seed)
    workers = workers or config.workers
    logger.info(f"🔄 Campaign {name}: {trials} trial(s) in {len(plan)} shard(s), {workers} worker(s)")
    if workers > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_shard, name, size, s, config) for size, s in plan]
            shards = [f.result() for f in futures]
    else:
        shards = [_run_shard(name, size, s, config) for size, s in plan]
    report = CampaignReport(name)
    for shard in shards:
        report = report.merge(shard)
    if report.ok:
        logger.info(f"✅ Campaign {name}: {report.passed}/{report.trials} passed")
    else:
        logger.error(f"❌ Campaign {name}: {report.trials - report.passed} failure(s)")
    return report


def run_all(seed: int, config: ComputeConfig, selftest: bool = True,
            names: Optional[List[str]] = None) -> List[CampaignReport]:
    return [run_campaign(name, config.trials_for(name, selftest), seed, config)
            for name in (names or list(CAMPAIGNS))]
