"""Seeded instance generation and the per-trial property suite."""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

from .bsop import (
    BsopInstance,
    bsop_instance_for,
    check_banprops,
    e21_from_t,
    eae_pair_from_bsop,
    k_membership,
    normalize_to_k,
    params_from_bsop,
    solve_bsop,
)
from .decomp import decompose, verify_decomposition
from .eae import (
    KernelCokernelIso,
    WitnessParams,
    build_eae_witness,
    check_special_form,
    eae_test,
    verify_eae,
    verify_eae_condition,
)
from .fredholm import (
    complete_to_invertible,
    corner_extract,
    index,
    kernel_bookkeeping,
    normalize_injective,
    verify_normalization,
)
from .ratmat import (
    DEFAULT_ENTRY_BOUND,
    RatMatrix,
    corank,
    diag,
    identity,
    is_invertible,
    nullity,
    random_matrix,
    random_rank_from_rng,
    random_unimodular,
    rank,
    vstack,
    zeros,
)
from .sc import EaeSplit, ScWitness, sc_construct, schur_complements, seae_params, seae_test, verify_sc

KINDS = ("eae-pair", "sc-witness", "bsop-instance", "rect-fredholm")


@dataclass(frozen=True)
class FuzzConfig:
    seed: int
    trials: int = 100
    max_dim: int = 6
    entry_bound: int = DEFAULT_ENTRY_BOUND

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.max_dim < 1:
            raise ValueError("max_dim must be at least 1")
        if self.entry_bound < 1:
            raise ValueError("entry_bound must be at least 1")


def trial_rng(cfg: FuzzConfig, trial: int, kind: str) -> random.Random:
    # each trial owns seed + trial; the kind keeps generators independent of each other
    return random.Random(f"{cfg.seed + trial}/{kind}")


def _invertible(rng: random.Random, n: int, bound: int) -> RatMatrix:
    return random_rank_from_rng(rng, n, n, n, bound)


def random_eae_pair(rng: random.Random, max_dim: int, bound: int) -> tuple[RatMatrix, RatMatrix]:
    """Square pair ``P diag(core, 0) Q`` sharing the kernel dimension."""
    z = rng.randint(0, max_dim)
    a = rng.randint(0, max_dim - z)
    b = rng.randint(0, max_dim - z)
    u = random_unimodular(rng, a + z, bound) @ diag(_invertible(rng, a, bound), zeros(z, z)) @ random_unimodular(
        rng, a + z, bound
    )
    v = random_unimodular(rng, b + z, bound) @ diag(_invertible(rng, b, bound), zeros(z, z)) @ random_unimodular(
        rng, b + z, bound
    )
    return u, v


def random_sc_witness(rng: random.Random, max_dim: int, bound: int) -> ScWitness:
    n = rng.randint(1, max_dim)
    p = rng.randint(1, max_dim)
    return ScWitness(
        a=_invertible(rng, n, bound),
        b=random_matrix(rng, n, p, bound),
        c=random_matrix(rng, p, n, bound),
        d=_invertible(rng, p, bound),
    )


def generate_instance(cfg: FuzzConfig, kind: str, trial: int = 0) -> dict[str, Any]:
    """A JSON-ready instance, fully determined by ``(cfg, kind, trial)``."""
    if kind not in KINDS:
        raise ValueError(f"unknown instance kind {kind!r}")
    rng = trial_rng(cfg, trial, kind)
    out: dict[str, Any] = {"kind": kind, "seed": cfg.seed + trial}
    bound, top = cfg.entry_bound, cfg.max_dim
    if kind == "eae-pair":
        u, v = random_eae_pair(rng, top, bound)
        out.update(u=u.to_json(), v=v.to_json())
    elif kind == "sc-witness":
        m = random_sc_witness(rng, top, bound)
        u, v = schur_complements(m)
        out.update(witness=m.to_json(), u=u.to_json(), v=v.to_json())
    elif kind == "bsop-instance":
        z = rng.randint(0, top)
        inst = BsopInstance(rng.randint(0, top), rng.randint(0, top), z, z)
        out.update(dims=inst.to_json())
    else:
        m = rng.randint(0, top)
        n = rng.randint(m, top)
        f = random_rank_from_rng(rng, m, n, m, bound)
        out.update(f=f.to_json(), nullity=n - m)
    return out


# -- checks -------------------------------------------------------------------


def check_eae_pair(inst: dict[str, Any], rng: random.Random, bound: int) -> dict[str, bool]:
    u, v = RatMatrix.from_json(inst["u"]), RatMatrix.from_json(inst["v"])
    du, dv = decompose(u), decompose(v)
    checks = {
        "decomposition_u": verify_decomposition(u, du),
        "decomposition_v": verify_decomposition(v, dv),
        "eae_test": eae_test(u, v) is not None,
    }
    iso = KernelCokernelIso.random(rng, du.kernel_dim, du.cokernel_dim, bound)
    w = build_eae_witness(u, v, iso, WitnessParams.random(rng, du, dv, bound))
    checks["verify_eae"] = verify_eae(u, v, w.e, w.f)
    checks["special_form"] = check_special_form(w.e, w.f, u, v)
    checks["eae_condition"] = verify_eae_condition(u, v, w.e, w.f, du, dv)
    checks["f_inverse_closed_form"] = (w.f @ w.f_inv_claimed).is_identity()
    checks["sc_construct"] = verify_sc(u, v, sc_construct(u, v))
    params, iso0 = seae_params(u, v)
    strong = build_eae_witness(u, v, iso0, params)
    checks["seae_params"] = verify_eae(u, v, strong.e, strong.f) and seae_test(strong.e, strong.f, EaeSplit.of(u, v))
    return checks


def check_sc_witness(inst: dict[str, Any]) -> dict[str, bool]:
    m = ScWitness.from_json(inst["witness"])
    u, v = RatMatrix.from_json(inst["u"]), RatMatrix.from_json(inst["v"])
    return {
        "verify_sc": verify_sc(u, v, m),
        "swap_symmetry": verify_sc(v, u, m.swapped()),
        "kernel_symmetry": nullity(u) == nullity(v) and corank(u) == corank(v),
        "coupling_nullity": nullity(identity(m.a.rows) - m.b @ m.c) == nullity(identity(m.d.rows) - m.c @ m.b),
    }


def check_bsop_instance(inst: dict[str, Any], rng: random.Random, bound: int) -> dict[str, bool]:
    dims = BsopInstance.from_json(inst["dims"])
    sol = solve_bsop(dims)
    checks = {"banprops": check_banprops(dims), "solve_bsop": sol.verify()}
    v, w = dims.dim_v, dims.dim_w
    u, vv = eae_pair_from_bsop(dims, _invertible(rng, w, bound), _invertible(rng, v, bound))
    du, dv = decompose(u), decompose(vv)
    wit = build_eae_witness(u, vv, params=params_from_bsop(solve_bsop(bsop_instance_for(du, dv)), du, dv))
    checks["end_to_end_seae"] = verify_eae(u, vv, wit.e, wit.f) and seae_test(wit.e, wit.f, EaeSplit.of(u, vv))
    checks["e21_matches_t"] = is_invertible(e21_from_t(sol, _invertible(rng, v, bound)))
    x = random_rank_from_rng(rng, v, v, rng.randint(0, v), bound)
    fac = k_membership(x, w)
    expected = rank(identity(v) - x) <= w
    checks["k_rank_criterion"] = (fac is not None) == expected and (
        fac is None or identity(v) - fac[0] @ fac[1] == x
    )
    checks["zero_in_k_iff_embeds"] = (k_membership(zeros(v, v), w) is not None) == (v <= w)
    g = normalize_to_k(x, w)
    checks["normalize_to_k"] = (g is None) == (nullity(x) > w) and (
        g is None or (is_invertible(g) and k_membership(g @ x, w) is not None)
    )
    b1 = random_matrix(rng, v, w, bound)
    b2 = random_matrix(rng, w, v, bound)
    checks["normalize_injective"] = all(verify_normalization(b1, b2, normalize_injective(b1, b2)).values())
    return checks


def check_rect_fredholm(inst: dict[str, Any], rng: random.Random, bound: int) -> dict[str, bool]:
    f = RatMatrix.from_json(inst["f"])
    m, n = f.shape
    cert = index(f)
    xi = complete_to_invertible(f)
    t = _invertible(rng, n, bound)
    s = rng.randint(0, n)
    ker, restricted = corner_extract(t, (n - s, s), (n - s, s))
    return {
        "index_shape_law": cert.index == n - m and cert.nullity == inst["nullity"],
        "completion_invertible": is_invertible(vstack([f, xi])),
        "corner_restriction_injective": nullity(restricted) == 0 and ker.dim + restricted.cols == s,
        "kernel_bookkeeping": kernel_bookkeeping(t, s).ok,
    }


_CHECKERS: dict[str, Callable[..., dict[str, bool]]] = {
    "eae-pair": check_eae_pair,
    "bsop-instance": check_bsop_instance,
    "rect-fredholm": check_rect_fredholm,
}


def run_trial(cfg: FuzzConfig, trial: int) -> dict[str, Any]:
    """Generate every instance kind for this trial and run its checks."""
    checks: dict[str, bool] = {}
    failed: dict[str, Any] = {}
    for kind in KINDS:
        inst = generate_instance(cfg, kind, trial)
        rng = random.Random(f"{cfg.seed + trial}/{kind}/check")
        try:
            if kind == "sc-witness":
                got = check_sc_witness(inst)
            else:
                got = _CHECKERS[kind](inst, rng, cfg.entry_bound)
        except Exception as exc:  # a crash is a failed trial, recorded with its instance
            got = {"no_exception": False}
            inst = {**inst, "error": f"{type(exc).__name__}: {exc}"}
        for name, ok in got.items():
            checks[f"{kind}/{name}"] = bool(ok)
        if not all(got.values()):
            failed[kind] = inst
    return {"trial": trial, "seed": cfg.seed + trial, "pass": all(checks.values()), "checks": checks, "failed": failed}


def _run_one(args: tuple[FuzzConfig, int]) -> dict[str, Any]:
    return run_trial(*args)


def run_fuzz(cfg: FuzzConfig, workers: int | None = None) -> list[dict[str, Any]]:
    """All trials, ordered by trial index whatever the worker count."""
    if workers is None:
        workers = os.cpu_count() or 1
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if workers <= 1 or cfg.trials == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, cfg.trials // (4 * workers))))
