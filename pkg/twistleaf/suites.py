"""Verification suites: the checks each command runs, and the pool that runs them."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable, Optional, Union

import numpy as np
from loguru import logger

from . import double, homogeneous, poisson, wedge
from .config import DEFAULT_SCENARIOS, RunConfig, Settings, Tolerances
from .enums import Algebra, BlockVariant
from .exceptions import RangeError
from .lie import (
    build_block_subalgebra,
    build_sigma,
    child_seeds,
    conjugate_subspace,
    sample_group_element,
)
from .reports import CheckReport, RunReport
from .scalar import parse_rational

Task = tuple[Callable[..., Union[CheckReport, list[CheckReport]]], dict[str, Any]]
Builder = Callable[[RunConfig, Tolerances], list[Task]]

DEFAULT_NS = (3, 4, 5)
DEFAULT_CS = ("1/3", "1/2", "2/5")
# Exact double computations grow quickly with n.
DOUBLE_MAX_N = 4


def _ms(config: RunConfig) -> list[int]:
    if config.m_or_k is not None:
        return [config.m_or_k]
    return list(range(1, config.n // 2 + 1))


def _ks(config: RunConfig) -> list[int]:
    if config.m_or_k is not None:
        return [config.m_or_k]
    return list(range(1, config.n))


def _ls(config: RunConfig) -> list[int]:
    if config.l is not None:
        return [config.l]
    return list(range(1, config.n))


def _sampled(config: RunConfig, **kwargs: Any) -> dict[str, Any]:
    return {"n": config.n, "samples": config.samples, "seed": config.seed, **kwargs}


def cross_offset(n: int) -> wedge.Wedge2:
    """Σ_{j≥2} X+_{1j} ∧ X-_{1j}, the part of r that links coordinate 1 to the rest."""
    r = wedge.build_r(n)
    basis = r.basis
    out = wedge.Wedge2.zeros(basis)
    for j in range(2, n + 1):
        plus, minus = basis.plus(1, j), basis.minus(1, j)
        out.matrix[plus, minus] = r.matrix[plus, minus]
        out.matrix[minus, plus] = r.matrix[minus, plus]
    return out


def affine_identities(
    n: int,
    c: str,
    samples: int,
    seed: int,
    tolerance: float = poisson.ALGEBRA_TOLERANCE,
) -> list[CheckReport]:
    """Multiplicative, affine, translation and covariance identities for one (n, c)."""
    r = wedge.build_r(n)
    sigma = build_sigma(c, 1, n)
    standard = poisson.BivectorField.multiplicative(r)
    offset = poisson.BivectorField.affine(r, cross_offset(n))
    translated = poisson.BivectorField.translated(standard, sigma)
    reports = [
        poisson.check_multiplicative(standard, samples, seed, tolerance),
        poisson.check_affine(offset, samples, seed, tolerance),
        poisson.check_affine(translated, samples, seed, tolerance),
        poisson.check_lemma1_invariant(offset, sigma, samples, seed, tolerance),
        poisson.check_affine_covariance(offset, samples, seed, tolerance=tolerance),
        poisson.check_affine_covariance(
            translated, samples, seed, multiplicative=standard, tolerance=tolerance
        ),
        wedge.check_affine_poisson_cocycle(wedge.ad2(sigma.inverse(), r) - r, r),
    ]
    c = str(parse_rational(c))
    return [report.model_copy(update={"c": c}) for report in reports]


def theorem3_scenario(
    n: int,
    m: int,
    c: str,
    sigma_seed: Optional[int],
    samples: int,
    seed: int,
    tolerance: float = poisson.GROUP_TOLERANCE,
) -> CheckReport:
    """s(u(m) x u(n-m)) against σ(c, m), or a random σ when a seed is given."""
    h = build_block_subalgebra(n, m, BlockVariant.SU_BLOCK)
    if sigma_seed is None:
        sigma = build_sigma(c, m, n)
    else:
        sigma = sample_group_element(n, sigma_seed)
    report = poisson.check_theorem3(
        h, sigma, samples, seed, tolerance=tolerance, label=m
    )
    return report.model_copy(
        update={
            "c": str(parse_rational(c)) if sigma_seed is None else None,
            "details": {**report.details, "sigma_seed": sigma_seed},
        }
    )


def coisotropy_scenarios(
    n: int,
    m: int,
    c: str,
    samples: int,
    seed: int,
    tolerance: float = poisson.GROUP_TOLERANCE,
) -> list[CheckReport]:
    """Fixed coisotropy scenarios for one (n, m, c).

    The equivalence chain on a Poisson subgroup and on an affine field
    where c1 may diverge, then c4 on Ad_σ of the complementary block.
    """
    r = wedge.build_r(n)
    standard = poisson.BivectorField.multiplicative(r)
    h = build_block_subalgebra(n, m, BlockVariant.SU_BLOCK)
    reports = [poisson.check_equivalence_chain(standard, h, samples, seed, tolerance)]
    if m == 1:
        divergent = poisson.BivectorField.affine(r, cross_offset(n))
        chain = poisson.check_equivalence_chain(divergent, h, samples, seed, tolerance)
        reports.append(chain.model_copy(update={"claim": "coisotropy-divergence"}))
    other_block = build_block_subalgebra(n, n - m, BlockVariant.SU_BLOCK)
    moved = conjugate_subspace(build_sigma(c, m, n), other_block, r.basis)
    reports.append(poisson.check_coisotropy(standard, moved, "c4"))
    c = str(parse_rational(c))
    return [report.model_copy(update={"m_or_k": m, "c": c}) for report in reports]


def random_chain_scenario(
    n: int,
    m: int,
    scenario_seed: int,
    samples: int,
    tolerance: float = poisson.GROUP_TOLERANCE,
) -> CheckReport:
    """The equivalence chain on a seeded random (h, f) pair.

    h is the block subalgebra s(u(m) x u(n-m)), conjugated by a Haar
    element in half of the scenarios; f is the standard structure, a
    translate of it, or the standard structure plus a rotated offset.
    """
    h_seed, g_seed, chain_seed = child_seeds(scenario_seed, 3)
    rng = np.random.default_rng(scenario_seed)
    r = wedge.build_r(n)
    h = build_block_subalgebra(n, m, BlockVariant.SU_BLOCK).to_float()
    conjugated = bool(rng.integers(2))
    if conjugated:
        h = conjugate_subspace(sample_group_element(n, h_seed), h, r.basis)
    standard = poisson.BivectorField.multiplicative(r)
    g = sample_group_element(n, g_seed)
    kind = ("multiplicative", "translated", "affine")[int(rng.integers(3))]
    if kind == "translated":
        f = poisson.BivectorField.translated(standard, g)
    elif kind == "affine":
        f = poisson.BivectorField.affine(r, wedge.ad2(g, cross_offset(n).to_float()))
    else:
        f = standard
    report = poisson.check_equivalence_chain(f, h, samples, chain_seed, tolerance)
    return report.model_copy(
        update={
            "m_or_k": m,
            "details": {
                **report.details,
                "scenario_seed": scenario_seed,
                "field": kind,
                "conjugated": conjugated,
            },
        }
    )


def _proposition(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    tasks: list[Task] = []
    for m in _ms(config):
        args = {"n": config.n, "m": m, "c": config.c}
        for algebra in (Algebra.U, Algebra.SU):
            kwargs = {
                **args,
                "algebra": algebra,
                "mode": config.mode,
                "tolerance": tolerances.algebra,
            }
            tasks.append((wedge.check_main_proposition, kwargs))
        tasks += [
            (wedge.check_scalar_uniqueness, args),
            (wedge.check_decomposition, args),
            (wedge.check_conjugation_tables, args),
        ]
    return tasks


def _affine(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    args = _sampled(config, c=config.c, tolerance=tolerances.algebra)
    return [(affine_identities, args)]


def _theorem3(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    tasks: list[Task] = []
    for m in _ms(config):
        base = _sampled(config, m=m, c=config.c, tolerance=tolerances.group)
        tasks.append((theorem3_scenario, {**base, "sigma_seed": None}))
        for sigma_seed in child_seeds(config.seed + m, config.scenarios - 1):
            tasks.append((theorem3_scenario, {**base, "sigma_seed": sigma_seed}))
    return tasks


def _coisotropy(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    tasks: list[Task] = []
    ms = _ms(config)
    for m in ms:
        args = _sampled(config, m=m, c=config.c, tolerance=tolerances.group)
        tasks.append((coisotropy_scenarios, args))
        for l in _ls(config):
            args = {"n": config.n, "k": m, "l": l, "c": config.c}
            tasks.append((poisson.check_intersection_coisotropic, args))
    for i, scenario_seed in enumerate(child_seeds(config.seed, config.scenarios)):
        args = {
            "n": config.n,
            "m": ms[i % len(ms)],
            "scenario_seed": scenario_seed,
            "samples": config.samples,
            "tolerance": tolerances.group,
        }
        tasks.append((random_chain_scenario, args))
    return tasks


def _per_m(check: Callable[..., CheckReport]) -> Builder:
    def build(config: RunConfig, tolerances: Tolerances) -> list[Task]:
        if config.n > DOUBLE_MAX_N and config.m_or_k is None:
            logger.info(
                "Skipping {} for n={} (exact double is limited to n <= {})",
                check.__name__, config.n, DOUBLE_MAX_N,
            )
            return []
        return [(check, {"n": config.n, "m": m, "c": config.c}) for m in _ms(config)]

    return build


def _per_kl(check: Callable[..., CheckReport]) -> Builder:
    def build(config: RunConfig, tolerances: Tolerances) -> list[Task]:
        return [
            (check, {"n": config.n, "k": k, "l": l, "c": config.c})
            for k in _ms(config)
            for l in _ls(config)
        ]

    return build


def _diffeo(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    tasks: list[Task] = []
    for k in _ms(config):
        args = _sampled(config, k=k, c=config.c, tolerance=tolerances.group)
        tasks += [
            (homogeneous.check_poisson_diffeo, args),
            (homogeneous.check_quotient_descent, args),
        ]
    return tasks


def _covariance(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    return [
        (
            homogeneous.check_grassmann_covariance,
            _sampled(config, k=k, c=config.c, tolerance=tolerances.group),
        )
        for k in _ms(config)
    ]


def _cybe(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    return [
        (wedge.check_cybe, {"n": config.n, "algebra": algebra})
        for algebra in (Algebra.SU, Algebra.U)
    ]


def _leaves(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    tasks: list[Task] = [
        (
            homogeneous.check_leaf_equation,
            _sampled(config, c=config.c, k=k, tolerance=tolerances.point),
        )
        for k in _ks(config)
    ]
    for k in _ms(config):
        args = _sampled(config, k=k, c=config.c, rtol=tolerances.rank)
        tasks.append((homogeneous.check_torus_leaves, args))
    for k in _ks(config):
        args = _sampled(config, k=k, rtol=tolerances.rank)
        tasks.append((homogeneous.check_generic_leaf, args))
    return tasks


def _schubert(config: RunConfig, tolerances: Tolerances) -> list[Task]:
    tasks: list[Task] = []
    for k in _ks(config):
        args = _sampled(config, k=k, rtol=tolerances.rank)
        tasks.append((homogeneous.check_standard_images, args))
        bruhat = {**args, "samples": max(1, config.samples // 10)}
        tasks.append((homogeneous.check_bruhat_monotonicity, bruhat))
    return tasks


SUITES: dict[str, Builder] = {
    "proposition": _proposition,
    "affine": _affine,
    "theorem3": _theorem3,
    "coisotropy": _coisotropy,
    "lagrangian": _per_m(double.check_lagrangian),
    "hperp": _per_m(double.check_hperp_generators),
    "symmetry": _per_kl(homogeneous.check_symmetry_lemma),
    "dimensions": _per_kl(homogeneous.check_dimension_claims),
    "diffeo": _diffeo,
    "covariance": _covariance,
    "cybe": _cybe,
    "leaves": _leaves,
    "schubert": _schubert,
}


def build_tasks(
    config: RunConfig, tolerances: Optional[Tolerances] = None
) -> list[Task]:
    """Tasks of one command on one instance.

    Raises:
        RangeError: If the command is unknown
    """
    try:
        suite = SUITES[config.command]
    except KeyError as exc:
        raise RangeError(
            f"Unknown command {config.command!r}; expected one of {', '.join(SUITES)}"
        ) from exc
    return suite(config, tolerances or Tolerances())


def grid_configs(
    samples: int,
    seed: int,
    ns: Iterable[int] = DEFAULT_NS,
    cs: Iterable[str] = DEFAULT_CS,
    scenarios: int = DEFAULT_SCENARIOS,
) -> list[RunConfig]:
    """One config per (command, n, c) of the default grid.

    m, k and l range over all valid values.
    """
    cs = list(cs)
    configs = []
    for command in SUITES:
        for n in ns:
            for c in cs if command != "cybe" else cs[:1]:
                configs.append(
                    RunConfig(
                        command=command,
                        n=n,
                        c=c,
                        samples=samples,
                        scenarios=scenarios,
                        seed=seed,
                    )
                )
    return configs


def _run_task(task: Task) -> list[CheckReport]:
    check, kwargs = task
    result = check(**kwargs)
    return result if isinstance(result, list) else [result]


def run_tasks(tasks: list[Task], workers: int = 1) -> list[CheckReport]:
    """Run tasks, in a process pool when ``workers`` > 1; results keep task order."""
    if workers <= 1 or len(tasks) <= 1:
        chunks = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            chunks = list(pool.map(_run_task, tasks))
    return [report for chunk in chunks for report in chunk]


def run(config: RunConfig, settings: Optional[Settings] = None) -> RunReport:
    """Run one command and merge its reports."""
    settings = settings or Settings()
    tolerances = config.tolerances(settings)
    tasks = build_tasks(config, tolerances)
    logger.info(
        "{}: {} task(s) on {} worker(s)", config.command, len(tasks), settings.workers
    )
    report_config = {**config.report_config(), "tolerances": tolerances.model_dump()}
    return RunReport.collect(report_config, run_tasks(tasks, settings.workers))


def run_grid(
    samples: int,
    seed: int,
    settings: Optional[Settings] = None,
    ns: Iterable[int] = DEFAULT_NS,
    scenarios: int = DEFAULT_SCENARIOS,
) -> RunReport:
    """The default grid of every command, fanned out over one pool."""
    settings = settings or Settings()
    tolerances = settings.tolerances()
    ns = list(ns)
    configs = grid_configs(samples, seed, ns, scenarios=scenarios)
    tasks = [task for config in configs for task in build_tasks(config, tolerances)]
    expected_double = sum(
        len(_ms(config))
        for config in configs
        if config.command in ("lagrangian", "hperp") and config.n > DOUBLE_MAX_N
    )
    logger.info("all: {} task(s) on {} worker(s)", len(tasks), settings.workers)
    config = {
        "command": "all",
        "ns": ns,
        "cs": list(DEFAULT_CS),
        "samples": samples,
        "scenarios": scenarios,
        "seed": seed,
        "tolerances": tolerances.model_dump(),
    }
    reports = run_tasks(tasks, settings.workers)
    return RunReport.collect(config, reports, skipped=expected_double)
