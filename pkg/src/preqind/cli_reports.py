"""Deterministic verification suites and the ``verify`` command line.

    verify --suite <name> [--seed N] [--samples N] [--tol X] [--fd-step X]
           [--n-max N] [--format json|text] [--timing]
    verify --list

The report goes to stdout, diagnostics to stderr.  Exit status is 0 when
every check passes, 1 when any fails and 2 on usage errors.  Worker threads
come from the THREADS environment variable; every sample is drawn from its
own (seed, index) stream, so reports do not depend on it.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import example_solvable as ex
from . import forms
from . import prequantum as pq
from .ham_spaces import cardinal_a_subspaces, cardinal_b_subspaces
from .induction import induced_dim
from .report import Check, check, parallel_map

log = logging.getLogger("preqind.verify")

LAMBDAS = (0.0, 0.3, 0.7)
CARDINAL_POINTS = 100
HAUSDORFF_POINTS = 500
ROUND_TRIP_POINTS = 50
CONTACT_POINTS = 100
CONSISTENCY_POINTS = 50


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    seed: int = 42
    samples: int = 200
    tol: float = 1e-6
    fd_step: float = 1e-5
    n_max: int = 8
    format: str = "json"
    timing: bool = False

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.format not in ("json", "text"):
            raise ValueError("format must be json or text")


@dataclass
class SuiteReport:
    suite: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    wall_time_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_text(self) -> str:
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            res = "" if c.residual_max is None else f"  residual_max={c.residual_max:.3g}"
            lines.append(f"  [{c.status}] {c.name}: expected={c.expected} observed={_short(c.observed)}{res}")
        return "\n".join(lines)


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else v


# ---------------------------------------------------------------- JSON with 17 significant digits


def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys are not imposed, floats carry 17 significant digits."""
    import json

    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    return json.dumps(str(obj))


# ---------------------------------------------------------------- suites


def _angle_max(pair) -> float:
    S1, S2 = pair
    if S1.dim != S2.dim:
        return float("inf")
    ang = forms.principal_angles(S1, S2)
    return float(np.max(ang, initial=0.0))


def suite_cardinal(cfg: SuiteConfig) -> list[Check]:
    n = min(cfg.samples, CARDINAL_POINTS)
    h = cfg.fd_step
    ind = ex.induced_Xprime()
    spaces = [
        ("X", ex.orbit_X(), ex.orbit_X().sample),
        ("X'", ex.orbit_Xprime(), ex.orbit_Xprime().sample),
        ("T*G' x {c|h'} level", ind.N, ind.sample_level),
    ]
    checks = []
    for name, X, sampler in spaces:
        pts = [sampler(np.random.default_rng([cfg.seed, i])) for i in range(n)]
        a = max(parallel_map(lambda x: _angle_max(cardinal_a_subspaces(X, x, h)), pts))
        b = max(parallel_map(lambda x: _angle_max(cardinal_b_subspaces(X, x, h)), pts))
        checks.append(check(f"{name} cardinal_a (ker dPhi = orbit perp)", a < cfg.tol, a, f"< {cfg.tol}", n))
        checks.append(check(f"{name} cardinal_b (im dPhi = stabilizer annihilator)", b < cfg.tol, b,
                            f"< {cfg.tol}", n))
    return checks


def suite_induction_dims(cfg: SuiteConfig) -> list[Check]:
    checks = []
    d = induced_dim(ex.group_G(), ex.group_H(), ex.point_c_h())
    dp = induced_dim(ex.group_Gprime(), ex.group_Hprime(), ex.point_c_hprime())
    checks.append(check("induced_dim(G,H,pt) = chart dim X", d == ex.orbit_X().chart_dim == 2, None, 2, d))
    checks.append(check("induced_dim(G',H',pt) = chart dim X'", dp == ex.orbit_Xprime().chart_dim == 2, None, 2, dp))
    # the same numbers read off sampled level sets: level tangents modulo H-orbit directions
    for tag, S in (("X", ex.induced_X()), ("X'", ex.induced_Xprime())):
        Q = S.quotient(n_max=cfg.n_max)
        pts = [Q.sample(cfg.seed, i) for i in range(min(cfg.samples, 10))]
        dims = sorted(set(parallel_map(lambda x: Q.local_dimension(x, h=cfg.fd_step), pts)))
        checks.append(check(f"Ind {tag} local dimension on level set", dims == [2], None, [2], dims))
    for tag, primed in (("X", False), ("X'", True)):
        dist = ex.moment_image_distance(primed, HAUSDORFF_POINTS, cfg.seed)
        checks.append(check(f"moment image of Ind = {tag} (Hausdorff, {HAUSDORFF_POINTS} points)", dist < 1e-6, dist,
                            "< 1e-06", dist))
        inj = ex.moment_injectivity(primed, 20, cfg.seed, cfg.n_max)
        ok = inj["witnessed"] == inj["n"] == inj["slice_agree"]
        checks.append(check(f"moment injective on classes of Ind {tag} (N_max={cfg.n_max})", ok, inj["residual_max"],
                            inj["n"], inj["witnessed"]))
    return checks


def suite_stages(cfg: SuiteConfig) -> list[Check]:
    S = ex.stages_example()
    checks = []
    n_rt = min(cfg.samples, ROUND_TRIP_POINTS)

    def round_trip(i):
        n = S.big.sample_level(np.random.default_rng([cfg.seed, i]))
        return float(np.max(np.abs(S.s(S.section(n)) - n)))

    r = max(parallel_map(round_trip, range(n_rt)))
    checks.append(check("s(section(n)) = n", r < 1e-9, r, "< 1e-09", n_rt))

    def fibre(i):
        rng = np.random.default_rng([cfg.seed, i])
        m = S.sample_level(rng)
        k = S.K.random_element(rng, box=3.0)
        return float(np.max(np.abs(S.s(S.act(S.G.identity(), k, S.H.identity(), m)) - S.s(m))))

    r = max(parallel_map(fibre, range(n_rt)))
    checks.append(check("s(k m) = s(m) for k in K", r < 1e-9, r, "< 1e-09", n_rt))

    Q = S.quotient(n_max=cfg.n_max)

    def fibre_back(i):
        m = S.sample_level(np.random.default_rng([cfg.seed, i]))
        m2 = S.section(S.s(m))
        w = Q.equivalent(m2, m)
        return np.inf if w is None else float(np.linalg.norm(Q.diff(Q.action(w, m2), m)))

    r = max(parallel_map(fibre_back, range(n_rt)))
    checks.append(check("section(s(m)) in the class of m", r < 1e-8, r, "< 1e-08", n_rt))

    pts = [S.sample_level(np.random.default_rng([cfg.seed, i])) for i in range(n_rt)]
    r = _stages_form(S, pts, cfg)
    checks.append(check("s* varpi_N = varpi_M on level tangents", r < cfg.tol, r, f"< {cfg.tol}", n_rt))

    n_cls, n_pts = _stages_bijection(S, Q, cfg)
    checks.append(check("class bijection [m] -> [s(m)]", n_cls[0] == n_cls[1] == n_pts, None,
                        {"classes_M": n_pts, "classes_N": n_pts}, {"classes_M": n_cls[0], "classes_N": n_cls[1]}))
    return checks


def _stages_form(S, pts, cfg: SuiteConfig) -> float:
    worst = 0.0
    for i, m in enumerate(pts):
        rng = np.random.default_rng([cfg.seed, 7, i])
        T = S.level_tangents(m, cfg.fd_step)
        for _ in range(3):
            v = T.basis @ rng.standard_normal(T.dim)
            worst = max(worst, S.pullback_residual(m, v, h=cfg.fd_step))
    return worst


def _stages_bijection(S, Q, cfg: SuiteConfig):
    """``samples`` fresh points, each paired with a random (k, h)-translate.

    M-classes are counted by witnessed orbit equivalence, N-classes of the
    s-images by canonical coset slices; the partitions must agree.
    """
    n_base = cfg.samples
    base, moved = [], []
    for i in range(n_base):
        rng = np.random.default_rng([cfg.seed, 11, i])
        m = S.sample_level(rng)
        k = S.K.random_element(rng, box=2.0)
        h = S.H.random_element(rng, box=2.0, n_max=2)
        base.append(m)
        moved.append(S.act(S.G.identity(), k, h, m))
    pts = base + moved
    ccM = Q.count_classes(pts, cfg.seed)
    canon = [S.big.canonical(S.s(m)) for m in pts]
    labels_N: list[int] = []
    reps: list[np.ndarray] = []
    for c in canon:
        for j, r in enumerate(reps):
            if np.linalg.norm(S.big.N.diff(c, r)) < 1e-7:
                labels_N.append(j)
                break
        else:
            reps.append(c)
            labels_N.append(len(reps) - 1)
    same = _same_partition(ccM.labels, labels_N)
    return (ccM.n_classes if same else -1, len(reps)), n_base


def _same_partition(a, b) -> bool:
    fwd, back = {}, {}
    for x, y in zip(a, b):
        if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
            return False
    return True


def suite_frobenius_symplectic(cfg: SuiteConfig) -> list[Check]:
    return ex.run_frobenius_example(cfg.seed, cfg.samples, cfg.n_max, min(cfg.samples, ROUND_TRIP_POINTS))


def _contact_spaces():
    return [("X~'", ex.preq_Xprime())] + [(f"X~_{lam:g}", ex.preq_Xlambda(lam)) for lam in LAMBDAS]


def suite_contact_reeb(cfg: SuiteConfig) -> list[Check]:
    n = min(cfg.samples, CONTACT_POINTS)
    h = cfg.fd_step
    checks = []
    for name, S in _contact_spaces():
        def one(i):
            rng = np.random.default_rng([cfg.seed, i])
            x = S.sample(rng)
            ok = pq.is_contact(S, x, h)
            r1, r2 = pq.reeb_residuals(S, x, rng, h=h)
            g = S.group.random_element(rng, box=3.0)
            v = rng.standard_normal(S.chart_dim)
            pull = pq.action_pullback_residual(S, g, x, v / np.linalg.norm(v), h)
            comm = pq.circle_commutation_residual(S, g, rng.uniform(0, 2 * np.pi), x)
            return ok, r1, r2, pull, comm

        res = parallel_map(one, range(n))
        contact = sum(r[0] for r in res)
        r1, r2, pull, comm = (max(r[j] for r in res) for j in range(1, 5))
        checks.append(check(f"{name} contact (Ker dvarpi a line transverse to Ker varpi)", contact == n, None, n,
                            contact))
        checks.append(check(f"{name} varpi(reeb) = 1", r1 < 1e-9, r1, "< 1e-09", r1))
        checks.append(check(f"{name} dvarpi(reeb, v) = 0", r2 < cfg.tol, r2, f"< {cfg.tol}", r2))
        checks.append(check(f"{name} action preserves varpi", pull < cfg.tol, pull, f"< {cfg.tol}", pull))
        checks.append(check(f"{name} action commutes with the circle", comm < 1e-10, comm, "< 1e-10", comm))
        flow = max(pq.circle_flow_residual(S, S.sample(np.random.default_rng([cfg.seed, 10**6, i])))
                   for i in range(min(n, 5)))
        checks.append(check(f"{name} circle action = Reeb flow", flow < 1e-6, flow, "< 1e-06", flow))
    return checks


def suite_prequantum_consistency(cfg: SuiteConfig) -> list[Check]:
    n = min(cfg.samples, CONSISTENCY_POINTS)
    h = cfg.fd_step
    checks = []
    for lam in LAMBDAS:
        tag = f"lambda={lam:g}"
        ind = ex.induced_T_lambda(lam)
        base = ind.underlying()
        d = ind.T.dim

        def one(i):
            rng = np.random.default_rng([cfg.seed, i])
            n_ = ind.sample_level(rng)
            gram = forms.exterior_derivative_gram(ind.N.varpi, n_, h)
            ref = np.zeros_like(gram)
            ref[:d, :d] = base.N.omega.gram(n_[:d])
            r_form = float(np.max(np.abs(gram - ref)))
            r_phi = float(np.max(np.abs(ind.preq_moment_G(n_, h) - base.phi(n_[:d]))))
            r_psi = float(np.max(np.abs(pq.preq_moment_vector(ind.N_H(), n_, h) - base.psi(n_[:d]))))
            x = ex.preq_Xlambda(lam).sample(rng)
            S = ex.preq_Xlambda(lam)
            r_desc = float(np.max(np.abs(pq.preq_moment_vector(S, x, h) - ex.orbit_X().moment(S.project(x)))))
            return r_form, r_phi, r_psi, r_desc

        res = parallel_map(one, range(n))
        r_form, r_phi, r_psi, r_desc = (max(r[j] for r in res) for j in range(4))
        checks.append(check(f"{tag} dvarpi of Ind T_lam = omega of Ind {{c|h}}", r_form < cfg.tol, r_form,
                            f"< {cfg.tol}", r_form))
        checks.append(check(f"{tag} G-momentum of Ind T_lam = phi of Ind {{c|h}}", r_phi < cfg.tol, r_phi,
                            f"< {cfg.tol}", r_phi))
        checks.append(check(f"{tag} H-momentum of T*G x T_lam = psi", r_psi < cfg.tol, r_psi, f"< {cfg.tol}", r_psi))
        checks.append(check(f"{tag} preq_moment of X~_lam descends to Phi_X", r_desc < 1e-8, r_desc, "< 1e-08",
                            r_desc))
        iso = ex.induced_iso_residuals(ind, ex.induced_to_Xlambda(lam), ex.preq_Xlambda(lam), min(n, 20), cfg.seed)
        worst = max(iso.values())
        checks.append(check(f"{tag} Ind_H^G T_lam = X~_lam (iso residuals)", worst < cfg.tol, worst, f"< {cfg.tol}",
                            iso))
        hol_i = ex.holonomy_induced(lam, 0.4)
        hol_x = ex.holonomy_Xlambda(lam, 0.4)
        checks.append(check(f"{tag} holonomy of Ind T_lam = holonomy of X~_lam", abs(hol_i - hol_x) < 1e-6,
                            abs(hol_i - hol_x), "< 1e-06", abs(hol_i - hol_x)))
        R = ind.reduction(n_max=cfg.n_max)
        orb = max(R.orbit_form_residual(R.sample(cfg.seed, i), h) for i in range(min(n, 5)))
        checks.append(check(f"{tag} descended form vanishes on H-orbits", orb < 1e-8, orb, "< 1e-08", orb))
    ind = ex.induced_T_prime()
    iso = ex.induced_iso_residuals(ind, ex.induced_to_Xprime(), ex.preq_Xprime(), min(n, 20), cfg.seed)
    worst = max(iso.values())
    checks.append(check("Ind_H'^G' T' = X~' (iso residuals)", worst < cfg.tol, worst, f"< {cfg.tol}", iso))
    return checks


def suite_gauge_holonomy(cfg: SuiteConfig) -> list[Check]:
    checks = []
    for lam in LAMBDAS:
        tag = f"lambda={lam:g}"
        F = ex.gauge_equivalence(lam, lam + 1)
        checks.append(check(f"{tag} gauge map to lambda+1 exists", F is not None, None, True, F is not None))
        F = F or ex.gauge_map(-1)
        pull, equi = ex.gauge_residuals(lam, lam + 1, F, seed=cfg.seed)
        checks.append(check(f"{tag} F* varpi_(lam+1) = varpi_lam", pull < 1e-10, pull, "< 1e-10", pull))
        checks.append(check(f"{tag} F is G-equivariant", equi < 1e-9, equi, "< 1e-09", equi))
        hol = ex.holonomy_Xlambda(lam, 0.0)
        err = abs(hol - ex.holonomy_expected(lam, 0.0))
        checks.append(check(f"{tag} holonomy over theta_q loop at p=0 = e^(-2 pi i lam)", err < 1e-6, err, "< 1e-06",
                            [hol.real, hol.imag]))
        diff = abs(hol - ex.holonomy_Xlambda(lam + 1, 0.0))
        checks.append(check(f"{tag} equivalent spaces have equal holonomy", diff < 1e-9, diff, "< 1e-09", diff))
    small = pq.holonomy(ex.preq_Xlambda(0.3), lambda t: np.array([0.5 + 1e-4 * np.cos(t), 1.0 + 1e-4 * np.sin(t)]))
    checks.append(check("small contractible loop holonomy -> 1", abs(small - 1) < 1e-6, abs(small - 1), "< 1e-06",
                        abs(small - 1)))
    absent = ex.gauge_equivalence(0.0, 0.5)
    checks.append(check("no gauge map between lambda=0 and 0.5", absent is None, None, None, None if absent is None
                        else "map"))
    gap = abs(ex.holonomy_Xlambda(0.0) - ex.holonomy_Xlambda(0.5))
    checks.append(check("|hol(0) - hol(0.5)| = 2", abs(gap - 2) < 1e-6, abs(gap - 2), 2.0, gap))
    return checks


def suite_frobenius_prequantum(cfg: SuiteConfig) -> list[Check]:
    checks = []
    for lam in LAMBDAS:
        checks += ex.run_prequantum_frobenius_example(lam, cfg.seed, cfg.samples, cfg.n_max)
    return checks


REGISTRY: dict[str, tuple[Callable[[SuiteConfig], list[Check]], str]] = {
    "cardinal": (suite_cardinal, "kernel/image identities of the momentum map on X, X' and T*G' x {c|h'}"),
    "induction-dims": (suite_induction_dims, "induced dimensions, moment images and injectivity for X and X'"),
    "stages": (suite_stages, "induction in stages on H < G < G' with Y = {c|h}"),
    "frobenius-symplectic": (suite_frobenius_symplectic, "Hom_G(X, Res X') is a point; reciprocity round trips"),
    "contact-reeb": (suite_contact_reeb, "contact forms, Reeb fields and lifted actions on X~' and X~_lambda"),
    "prequantum-consistency": (suite_prequantum_consistency, "prequantum induction prequantizes symplectic induction"),
    "gauge-holonomy": (suite_gauge_holonomy, "integer gauge equivalences and holonomy of X~_lambda"),
    "frobenius-prequantum": (suite_frobenius_prequantum, "Hom_G(X~_lambda, Res X~') is a single circle"),
}


def list_suites() -> str:
    width = max(map(len, REGISTRY))
    return "\n".join(f"{name:<{width}}  {desc}" for name, (_, desc) in REGISTRY.items())


class UnknownSuite(KeyError):
    pass


def run_suite(config: SuiteConfig) -> SuiteReport:
    if config.suite not in REGISTRY:
        raise UnknownSuite(config.suite)
    fn = REGISTRY[config.suite][0]
    cfg_echo = {k: v for k, v in asdict(config).items() if k not in ("format", "timing")}
    t0 = time.perf_counter()
    checks = fn(config)
    elapsed = (time.perf_counter() - t0) * 1000.0
    log.info("suite %s finished in %.0f ms", config.suite, elapsed)
    return SuiteReport(config.suite, cfg_echo, checks, round(elapsed, 3) if config.timing else 0.0)


# ---------------------------------------------------------------- command line


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Run a deterministic verification suite.")
    p.add_argument("--suite", choices=list(REGISTRY), help="suite to run")
    p.add_argument("--list", action="store_true", help="list the suites and exit")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--fd-step", type=float, default=1e-5)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timing", action="store_true",
                   help="record wall time in the report (the JSON is then no longer reproducible)")
    p.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.list:
        print(list_suites())
        return 0
    if args.suite is None:
        parser.print_usage(sys.stderr)
        print("verify: error: --suite is required", file=sys.stderr)
        return 2
    try:
        cfg = SuiteConfig(args.suite, args.seed, args.samples, args.tol, args.fd_step, args.n_max, args.format,
                          args.timing)
    except ValueError as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(cfg)
    print(report.to_json() if cfg.format == "json" else report.to_text())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
