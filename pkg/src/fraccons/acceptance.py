"""Self-test criteria exercising the whole library end to end.

Each criterion function returns a CriterionResult; run_all executes the full
battery. The CLI ``selftest`` subcommand and the acceptance test suite both
delegate here so the two views cannot drift apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specialfn import gamma, hyp2f1, mittag_leffler
from .fracops import (
    Kind,
    FractionalSpec,
    SingularTerm,
    TimeGrid,
    TimeSeries,
    caputo_left_derivative,
    diff1,
    j_integral,
    left_frac_integral,
    right_frac_integral,
    rl_left_derivative,
)
from .tfde import (
    Diffusivity,
    TFDEProblem,
    exact_linear_separable,
    exact_rl_power_mode,
    exact_rl_separable,
    exact_stationary_caputo,
    solve_nonlinear,
)
from .symcat import _sym, adjoint_residual, adjoint_substitution, rl_extra_beta
from .conslaw import (
    catalog_vector,
    correspondence,
    divergence_residual,
    noether_t,
    noether_vector,
    noether_x,
)

__all__ = ["CriterionResult", "run_all", "CRITERIA"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} criterion {self.number:2d} [{self.title}]: {self.detail}"


def criterion_1() -> CriterionResult:
    """Special-function identities."""
    e_err = abs(mittag_leffler(1.0, 1.0, 1.0) - math.e) / math.e
    f_err = abs(hyp2f1(1.0, 1.0, 2.0, 0.5) - 2.0 * math.log(2.0)) / (2.0 * math.log(2.0))
    ok = e_err <= 1e-10 and f_err <= 1e-10
    return CriterionResult(1, "special functions", ok,
                           f"E_1,1(1) rel err {e_err:.2e}, 2F1(1,1;2;1/2) rel err {f_err:.2e}")


def criterion_2() -> CriterionResult:
    """Fractional power rules on sampled linear data."""
    grid = TimeGrid(1.0, 256)
    f = TimeSeries.from_function(grid, lambda t: t)
    i_val = left_frac_integral(f, 0.5).values[-1]
    i_err = abs(i_val - gamma(2.0) / gamma(2.5))
    d_val = caputo_left_derivative(f, 0.5).values[-1]
    d_err = abs(d_val - 1.0 / gamma(1.5))
    ok = i_err <= 1e-12 and d_err <= 1e-8
    return CriterionResult(2, "power rules", ok,
                           f"I^0.5 t err {i_err:.2e} (<=1e-12), cD^0.5 t err {d_err:.2e} (<=1e-8)")


def criterion_3() -> CriterionResult:
    """Riemann-Liouville annihilation of the t^{alpha-1} mode.

    The mode is represented the way the library represents all initial-time
    power behavior: sampled values plus a declared power-law term (plain
    sampling of a non-integrable singularity loses O(sqrt(h)) of kernel mass
    and cannot annihilate). A sampled smooth multiple of the mode provides
    the honest numerical part of the check.
    """
    errs = []
    for n in (256, 512):
        grid = TimeGrid(1.0, n)
        t = grid.nodes()
        with np.errstate(divide="ignore"):
            f = TimeSeries(grid, t ** -0.5, (SingularTerm(1.0, -0.5),))
        d = rl_left_derivative(f, 0.5)
        # sampled component: D^0.5 of t^0.5 must match the power rule
        g = TimeSeries(grid, t ** 0.5)
        dg = rl_left_derivative(g, 0.5)
        mask = t >= 0.1
        e_mode = float(np.max(np.abs(d.values[mask])))
        e_pow = float(np.max(np.abs(dg.values[mask] - gamma(1.5))))
        errs.append((e_mode, e_pow))
    ok = (errs[0][0] <= 1e-4 and errs[1][0] <= errs[0][0]
          and errs[1][1] < errs[0][1])
    return CriterionResult(3, "RL annihilation", ok,
                           f"|D^0.5 t^-0.5| {errs[0][0]:.2e} at n=256 (<=1e-4); sampled "
                           f"power-rule err {errs[0][1]:.2e} -> {errs[1][1]:.2e} under refinement")


def criterion_4() -> CriterionResult:
    """J closed form and the differentiation property of J."""
    grid = TimeGrid(2.0, 512)
    one = TimeSeries.from_function(grid, lambda t: np.ones_like(t))
    jv = j_integral(one, one, 0.5).values
    i_mid = np.argmin(np.abs(grid.nodes() - 1.0))
    ref = (2.0 ** 1.5 - 2.0) / gamma(2.5)
    cf_err = abs(jv[i_mid] - ref)

    # property: D_t J(f, g) = f * rI^{1-a} g - g * 0I^{1-a} f for (f,g)=(t,1)
    def prop_err(n: int) -> float:
        g2 = TimeGrid(1.0, n)
        t = g2.nodes()
        f = TimeSeries(g2, t)
        g = TimeSeries.from_function(g2, lambda s: np.ones_like(s))
        lhs = diff1(j_integral(f, g, 0.5).values, g2.h)
        rhs = t * right_frac_integral(g, 0.5).values - left_frac_integral(f, 0.5).values
        lo = max(2, math.ceil(0.1 * (n + 1)))
        return float(np.max(np.abs((lhs - rhs)[lo:n + 1 - lo])))

    e1, e2 = prop_err(128), prop_err(256)
    order = math.log2(e1 / e2)
    ok = cf_err <= 1e-6 and order >= 1.8
    return CriterionResult(4, "J integral", ok,
                           f"closed-form err {cf_err:.2e} (<=1e-6), property order {order:.2f} (>=1.8)")


def criterion_5() -> CriterionResult:
    """Adjoint-equation residuals of the four substitution regimes."""
    details = []
    ok = True
    cases = [
        ("RL_sub", Kind.RIEMANN_LIOUVILLE, 0.5, 1e-12),
        ("RL_wave", Kind.RIEMANN_LIOUVILLE, 1.5, 1e-12),
        ("Caputo_sub", Kind.CAPUTO, 0.5, 1e-5),
        ("Caputo_wave", Kind.CAPUTO, 1.5, 1e-5),
    ]
    diffu = Diffusivity.constant(1.0)
    for regime, kind, alpha, tol in cases:
        spec = FractionalSpec(kind, alpha, 1.0)
        tg = TimeGrid(1.0, 512)
        x = np.linspace(0.0, 1.0, 65)
        u = exact_linear_separable(spec, 1.0, tg, x)
        sub = adjoint_substitution(regime, spec, c1=1.0, c2=0.5, c3=0.25, c4=0.125)
        v = sub.field(tg, x)
        res = adjoint_residual(v, u, diffu, spec)
        n = tg.n_steps
        cut = n + 1 - math.ceil(0.05 * (n + 1))
        linf = float(np.max(np.abs(res.values[1:cut, 1:-1])))
        ok = ok and linf <= tol
        details.append(f"{regime} {linf:.1e}")
    return CriterionResult(5, "adjoint substitutions", ok, ", ".join(details))


def criterion_6() -> CriterionResult:
    """Noether-operator fields match the linear-case closed forms (v = t x)."""
    alpha = 0.5
    spec = FractionalSpec(Kind.CAPUTO, alpha, 1.0)
    diffu = Diffusivity.constant(1.0)
    tg = TimeGrid(1.0, 256)
    x = np.linspace(0.0, 1.0, 129)
    u = exact_linear_separable(spec, 0.5, tg, x)
    sub = adjoint_substitution("Linear_particular", spec, c1=1.0)
    worst = 0.0
    for tag, sid in (("X1", "X1"), ("X3", "X3_lin")):
        sym = _sym(sid, alpha)
        ct_n = noether_t(sym, u, sub, spec, diffu).values
        cx_n = noether_x(sym, u, sub, spec, diffu).values
        cv = catalog_vector(f"Linear_Cap_sub_{tag}", spec, diffu, substitution=sub)
        ct_c, cx_c = cv.components(u)
        d = max(float(np.max(np.abs((ct_n - ct_c)[2:-1, 2:-2]))),
                float(np.max(np.abs((cx_n - cx_c)[2:-1, 2:-2]))))
        worst = max(worst, d)
    ok = worst <= 1e-6
    return CriterionResult(6, "Noether vs catalog", ok, f"max field difference {worst:.2e} (<=1e-6)")


def _decay_ratios(pid: str, spec, diffu, make_u, grids=(64, 128, 256), **kw) -> list[float]:
    linfs = []
    for n in grids:
        u = make_u(n)
        cv = catalog_vector(pid, spec, diffu, **kw)
        linfs.append(divergence_residual(cv, u).linf)
    return [linfs[i] / linfs[i + 1] for i in range(len(linfs) - 1)]


def criterion_7() -> CriterionResult:
    """Divergence decay on the exact linear Caputo solution."""
    spec = FractionalSpec(Kind.CAPUTO, 0.5, 1.0)
    diffu = Diffusivity.constant(1.0)
    sub = adjoint_substitution("Caputo_sub", spec, c1=1.0, c2=1.0)

    def make_u(n):
        return exact_linear_separable(spec, 1.0, TimeGrid(1.0, n),
                                      np.linspace(0.0, math.pi, n // 2 + 1))

    r1 = _decay_ratios("Trivial_Caputo", spec, diffu, make_u)
    r2 = _decay_ratios("Linear_Cap_sub_X3", spec, diffu, make_u, substitution=sub)
    ok = all(r >= 1.4 for r in r1 + r2)
    return CriterionResult(7, "linear conservation decay", ok,
                           f"Trivial_Caputo ratios {r1[0]:.2f}/{r1[1]:.2f}, "
                           f"X3 vector ratios {r2[0]:.2f}/{r2[1]:.2f} (>=1.4)")


def criterion_8() -> CriterionResult:
    """Tables 3 and 5 on the stationary solution with k(u) = u."""
    diffu = Diffusivity.power(1.0)
    tg = TimeGrid(1.0, 512)
    x = np.linspace(0.0, 1.0, 513)
    u = exact_stationary_caputo(diffu, 0.1, 1.0, tg, x)
    u0 = u.values[0].copy()
    ut0 = np.zeros_like(x)
    worst3 = worst5 = 0.0
    spec3 = FractionalSpec(Kind.CAPUTO, 0.5, 1.0)
    for i in range(1, 5):
        cv = catalog_vector(f"Table3_v{i}", spec3, diffu, initial=u0)
        worst3 = max(worst3, divergence_residual(cv, u).linf)
    spec5 = FractionalSpec(Kind.CAPUTO, 1.5, 1.0)
    for i in range(1, 7):
        cv = catalog_vector(f"Table5_v{i}", spec5, diffu, initial=u0, initial_velocity=ut0)
        worst5 = max(worst5, divergence_residual(cv, u).linf)
    ok = worst3 <= 1e-6 and worst5 <= 1e-5
    return CriterionResult(8, "stationary conservation", ok,
                           f"Table3 max {worst3:.2e} (<=1e-6), Table5 max {worst5:.2e} (<=1e-5)")


def criterion_9() -> CriterionResult:
    """Trivial vector on the pure t^{alpha-1} mode."""
    alpha = 0.5
    spec = FractionalSpec(Kind.RIEMANN_LIOUVILLE, alpha, 1.0)
    tg = TimeGrid(1.0, 128)
    x = np.linspace(0.0, 1.0, 33)
    c = 0.7
    u = exact_rl_power_mode(alpha, c, tg, x)
    cv = catalog_vector("Trivial_RL", spec, Diffusivity.constant(1.0))
    ct, _ = cv.components(u)
    t = tg.nodes()
    dev = float(np.max(np.abs(ct[t >= 0.1] - c * gamma(alpha))))
    div = divergence_residual(cv, u).linf
    ok = dev <= 1e-8 and div <= 1e-8
    return CriterionResult(9, "RL power mode", ok,
                           f"C^t deviation from c*Gamma(a) {dev:.2e}, divergence {div:.2e} (<=1e-8)")


def criterion_10() -> CriterionResult:
    """Conservation order on nonlinear RL solver output, k = u^2."""
    alpha = 0.5
    spec = FractionalSpec(Kind.RIEMANN_LIOUVILLE, alpha, 1.0)
    diffu = Diffusivity.power(2.0)
    a, b = 0.5, 1.0

    def c1(x):
        return diffu.K_inv(a * x + b) * (1.0 + 0.1 * np.sin(np.pi * x))

    prob = TFDEProblem(spec, diffu, 0.0, 1.0, c1,
                       boundary_lo=lambda t: c1(np.array([0.0]))[0] * t ** (alpha - 1.0),
                       boundary_hi=lambda t: c1(np.array([1.0]))[0] * t ** (alpha - 1.0))
    linfs = {pid: [] for pid in ("NL_RL_sub", "NL_RL_sub_t1", "NL_RL_sub_t2")}
    for n in (128, 256):
        u = solve_nonlinear(prob, TimeGrid(1.0, n), n)
        for pid in linfs:
            cv = catalog_vector(pid, spec, diffu)
            linfs[pid].append(divergence_residual(cv, u).linf)
    orders = {pid: math.log2(v[0] / v[1]) for pid, v in linfs.items()}
    ok = all(o >= 1.0 for o in orders.values())
    detail = ", ".join(f"{pid} order {o:.2f}" for pid, o in orders.items())
    return CriterionResult(10, "nonlinear RL solver", ok, detail + " (>=1.0)")


def criterion_11() -> CriterionResult:
    """Adjudication of the two readings of the sixth wave-regime table entry."""
    spec = FractionalSpec(Kind.RIEMANN_LIOUVILLE, 1.5, 1.0)
    diffu = Diffusivity.constant(1.0)

    def make_u(n):
        return exact_linear_separable(spec, 1.0, TimeGrid(1.0, n),
                                      np.linspace(0.0, math.pi, n // 2 + 1))

    ratios = {pid: _decay_ratios(pid, spec, diffu, make_u, grids=(64, 128, 256))
              for pid in ("Table1_v6", "Table1_v6_alt")}
    conv = {pid: all(r >= 1.4 for r in rs) for pid, rs in ratios.items()}
    ok = conv["Table1_v6"] != conv["Table1_v6_alt"]
    winner = "Table1_v6_alt" if conv["Table1_v6_alt"] else "Table1_v6"
    detail = (f"convergent form: {winner}; ratios as-printed "
              f"{ratios['Table1_v6'][0]:.2f}/{ratios['Table1_v6'][1]:.2f}, corrected "
              f"{ratios['Table1_v6_alt'][0]:.2f}/{ratios['Table1_v6_alt'][1]:.2f}")
    return CriterionResult(11, "table typo adjudication", ok, detail)


def criterion_12() -> CriterionResult:
    """Correspondence-table sweep over all reachable entries."""
    failures: list[str] = []
    checked = 0

    def check_decay(pid, spec, diffu, make_u, **kw):
        nonlocal checked
        checked += 1
        if pid == "Table1_v6":
            # the printed sixth entry is the typo'd form; use the corrected
            # reading established by the adjudication criterion
            pid = "Table1_v6_alt"
        linfs = []
        for n in (64, 128):
            cv = catalog_vector(pid, spec, diffu, **kw)
            linfs.append(divergence_residual(cv, make_u(n)).linf)
        # decay by >= 1.4 per halving, or already at the numerical floor
        if not (linfs[1] <= 1e-10 or linfs[0] / linfs[1] >= 1.4):
            failures.append(f"{pid} ratio {linfs[0] / max(linfs[1], 1e-300):.2f}")

    def check_zero(sym_id, regime, spec, diffu, make_u, const):
        # zero-marked entries: the Noether construction must produce a vector
        # whose divergence vanishes identically on solutions, so the measured
        # divergence is pure discretization noise: it must decay under
        # refinement exactly like the nonzero entries
        nonlocal checked
        checked += 1
        kwargs = {const: 1.0}
        sub = adjoint_substitution(regime, spec, **kwargs)
        sym = _sym(sym_id, spec.alpha, beta=diffu.beta)
        cv = noether_vector(sym, sub, spec, diffu)
        linfs = [divergence_residual(cv, make_u(n)).linf for n in (64, 128)]
        ok_here = linfs[1] <= 1e-8 or (linfs[0] / linfs[1] >= 1.4 and linfs[1] <= 1e-3)
        if not ok_here:
            failures.append(f"{sym_id}/{const} {regime} zero-entry linf {linfs[1]:.2e} "
                            f"ratio {linfs[0] / max(linfs[1], 1e-300):.2f}")

    # --- RL wave regime: separable exact solutions, power diffusivities
    alpha = 1.5
    spec = FractionalSpec(Kind.RIEMANN_LIOUVILLE, alpha, 1.0)
    rl_cases = {2.0: (0.5, 1.0), -4.0 / 3.0: (-0.1, -1.0), rl_extra_beta(alpha): (-0.1, -1.0)}
    syms_by_beta = {2.0: ("X1", "X2", "X3_pow"), -4.0 / 3.0: ("X4_pow43",),
                    rl_extra_beta(alpha): ("X4_rl",)}
    for beta, (a, b) in rl_cases.items():
        diffu = Diffusivity.power(beta)

        def make_u(n, beta=beta, a=a, b=b):
            return exact_rl_separable(Diffusivity.power(beta), alpha, a, b,
                                      TimeGrid(1.0, n), np.linspace(0.0, 1.0, n // 2 + 1))

        seen = set()
        for sym_id in syms_by_beta[beta]:
            for ci, const in enumerate(("c1", "c2", "c3", "c4")):
                for pid in correspondence(sym_id, const, "RL_wave"):
                    if pid == "Zero":
                        check_zero(sym_id, "RL_wave", spec, diffu, make_u, const)
                    elif pid not in seen:
                        seen.add(pid)
                        check_decay(pid, spec, diffu, make_u)

    # --- Caputo regimes: stationary exact solutions
    for regime, alpha_c, table_consts in (("Caputo_sub", 0.5, ("c1", "c2")),
                                          ("Caputo_wave", 1.5, ("c1", "c2", "c3", "c4"))):
        spec_c = FractionalSpec(Kind.CAPUTO, alpha_c, 1.0)
        cases = [(Diffusivity.power(2.0), 0.5, 1.0, ("X1", "X2", "X3_pow")),
                 (Diffusivity.exponential(), 0.5, 1.0, ("X3_exp",)),
                 (Diffusivity.power(-4.0 / 3.0), -0.1, -1.0, ("X4_pow43",))]
        if regime == "Caputo_wave":
            cases.append((Diffusivity.power(rl_extra_beta(alpha_c)), -0.1, -1.0, ("X4_rl",)))
        for diffu, a, b, sym_ids in cases:

            def make_u(n, diffu=diffu, a=a, b=b):
                return exact_stationary_caputo(diffu, a, b, TimeGrid(1.0, n),
                                               np.linspace(0.0, 1.0, n // 2 + 1))

            u0 = make_u(8).values[0]
            x0 = np.linspace(0.0, 1.0, 5)
            seen = set()
            for sym_id in sym_ids:
                for const in table_consts:
                    for pid in correspondence(sym_id, const, regime):
                        if pid == "Zero":
                            check_zero(sym_id, regime, spec_c, diffu, make_u, const)
                        elif pid not in seen:
                            seen.add(pid)
                            check_decay(pid, spec_c, diffu,
                                        lambda n, mk=make_u: mk(n),
                                        initial=lambda xx, d=diffu, a=a, b=b: d.K_inv(a * xx + b),
                                        initial_velocity=lambda xx: np.zeros_like(xx))
        del spec_c
    ok = not failures
    detail = f"{checked} entries checked" + ("" if ok else "; failures: " + "; ".join(failures))
    return CriterionResult(12, "correspondence sweep", ok, detail)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
            criterion_11, criterion_12)


def run_all(numbers=None) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        num = int(fn.__name__.split("_")[1])
        if numbers is not None and num not in numbers:
            continue
        results.append(fn())
    return results
