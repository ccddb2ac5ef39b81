"""The batch experiments behind the command line."""
import logging
import math
from functools import partial
from typing import Callable
from typing import Sequence

import numpy as np

from lp_tile_lab.carleson import CmMode
from lp_tile_lab.carleson import jn_battery
from lp_tile_lab.carleson import product_cm_norm
from lp_tile_lab.carleson import product_jn_recursion
from lp_tile_lab.carleson import random_product_carleson
from lp_tile_lab.carleson import separating_instance
from lp_tile_lab.config import ExperimentConfig
from lp_tile_lab.errors import ConfigError
from lp_tile_lab.errors import NumericalFailure
from lp_tile_lab.fileutils import write_carleson_csv
from lp_tile_lab.fileutils import write_coefficients_csv
from lp_tile_lab.fileutils import write_collection_csv
from lp_tile_lab.fileutils import write_product_carleson_csv
from lp_tile_lab.fileutils import write_signal_binary
from lp_tile_lab.fileutils import write_split_json
from lp_tile_lab.fileutils import write_step_csv
from lp_tile_lab.grid import DyadicInterval
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import RealArray
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.grid import TorusSignal2
from lp_tile_lab.grid import check_length
from lp_tile_lab.grid import lp_norm
from lp_tile_lab.grid import tensor_rectangles
from lp_tile_lab.multipliers import counterexample_multiplier
from lp_tile_lab.multipliers import counterexample_rubio
from lp_tile_lab.multipliers import crs_check
from lp_tile_lab.multipliers import decouple_check
from lp_tile_lab.multipliers import loglog_slope
from lp_tile_lab.multipliers import refined_lacunary
from lp_tile_lab.projections import default_window
from lp_tile_lab.projections import khintchine_gfunction
from lp_tile_lab.projections import square_lq
from lp_tile_lab.projections import square_sharp
from lp_tile_lab.projections import square_sharp_2d
from lp_tile_lab.projections import square_smooth
from lp_tile_lab.report import ExperimentResult
from lp_tile_lab.tiles import bessel_constant
from lp_tile_lab.tiles import bessel_constant_power
from lp_tile_lab.tiles import build_tiles
from lp_tile_lab.tiles import greedy_bmo_split
from lp_tile_lab.tiles import indicator_battery
from lp_tile_lab.tiles import pointwise_max_check
from lp_tile_lab.tiles import restricted_type_check
from lp_tile_lab.tiles import tail_decay_probe
from lp_tile_lab.tiles import tile_coefficients
from lp_tile_lab.tiles import tile_family
from lp_tile_lab.tiles import translation_average_check
from lp_tile_lab.variation import StepMultiplier
from lp_tile_lab.variation import martingale_decompose
from lp_tile_lab.variation import u_q_upper_bound
from lp_tile_lab.variation import var_q
from lp_tile_lab.variation import var_q_2d
from lp_tile_lab.variation import var_q_brute
from lp_tile_lab.well import refine


logger = logging.getLogger(__name__)

Runner = Callable[[ExperimentConfig, ExperimentResult], None]

EXPERIMENTS: dict[str, tuple[Runner, tuple[str, ...]]] = {}


def experiment(name: str, columns: Sequence[str]) -> Callable[[Runner], Runner]:
    """Register an experiment and the columns of its table."""

    def register(runner: Runner) -> Runner:
        EXPERIMENTS[name] = (runner, tuple(columns))
        return runner

    return register


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the configured experiment.

    Numerical failures end the experiment early; the rows gathered so far are
    kept and the failure is recorded.
    """
    runner, columns = EXPERIMENTS[config.experiment]
    result = ExperimentResult(config.experiment, columns)
    logger.info("running %s with seed %d", config.experiment, config.seed)
    try:
        runner(config, result)
    except NumericalFailure as exc:
        logger.error("%s: %s", config.experiment, exc)
        result.failures.append(str(exc))
    logger.info("%s: %d rows, %d failures", config.experiment, len(result.rows), len(result.failures))
    return result


def _grid(config: ExperimentConfig, default: int) -> int:
    n = config.get_int("n", default)
    check_length(n)
    return n


def _ratio(out: TorusSignal | TorusSignal2, f: TorusSignal | TorusSignal2, p: float) -> float:
    return lp_norm(out, p) / lp_norm(f, p)


@experiment("square-sweep", ("family", "n", "p", "max_ratio"))
def square_sweep(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Rough square functions of random signals over several arc families."""
    n = _grid(config, 1024)
    sizes = config.get_ints("sizes", [s for s in (n // 4, n // 2, n) if s >= 16])
    exponents = config.get_floats("p", (2.0, 3.0, 4.0))
    low = config.get_floats("p_low", (1.5,))
    trials = config.get_int("trials", 4)
    arcs = config.get_int("arcs", 16)
    sides = config.get_ints("sides", (16, 32))
    for size in sizes:
        check_length(size)
        rng = np.random.default_rng([config.seed, size])
        families = {
            "random": IntervalCollection.random_disjoint(size, min(arcs, size // 4), rng),
            "partition": IntervalCollection.random_partition(size, min(arcs, size // 2), rng),
            "lacunary": IntervalCollection.lacunary(size),
        }
        signals = [TorusSignal.random(size, rng) for _ in range(trials)]
        for family, omegas in families.items():
            outputs = [square_sharp(f, omegas) for f in signals]
            for p in exponents:
                ratio = max(_ratio(out, f, p) for out, f in zip(outputs, signals))
                result.add(family, size, p, ratio)
                if p == 2 and family != "random":
                    result.check(abs(ratio - 1) < 1e-10, f"{family} n={size}: L2 ratio {ratio!r}")
        for p in low:
            q = p / (p - 1) + 1
            ratio = max(_ratio(square_lq(f, families["random"], q), f, p) for f in signals)
            result.add(f"lq{q:g}", size, p, ratio)
    for side in sides:
        check_length(side)
        rng = np.random.default_rng([config.seed, side, side])
        rectangles = tensor_rectangles(
            IntervalCollection.random_partition(side, 4, rng),
            IntervalCollection.random_partition(side, 4, rng),
        )
        signals2 = [TorusSignal2.random((side, side), rng) for _ in range(trials)]
        outputs2 = [square_sharp_2d(f, rectangles) for f in signals2]
        for p in exponents:
            result.add("tensor-2d", side, p, max(_ratio(o, f, p) for o, f in zip(outputs2, signals2)))
    for p in exponents:
        for family in ("random", "tensor-2d"):
            rows = [(r[1], r[3]) for r in result.rows if r[0] == family and r[2] == p]
            result.summary[f"slope_{family}_p{p:g}"] = loglog_slope(*zip(*rows)) if rows else None


@experiment("well-distributed", ("collection", "arcs", "overlap", "constant", "p", "max_ratio"))
def well_distributed(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Refine random arcs and compare smooth square functions before and after."""
    n = _grid(config, 1024)
    arcs = config.get_int("arcs", 8)
    trials = config.get_int("trials", 4)
    exponents = config.get_floats("p", (2.0, 4.0))
    rng = np.random.default_rng([config.seed, n])
    omegas = IntervalCollection.random_disjoint(n, arcs, rng)
    refinement = refine(omegas)
    window = default_window(n)
    signals = [TorusSignal.random(n, rng) for _ in range(trials)]
    for label, collection in (("original", omegas), ("refined", refinement.collection)):
        outputs = [square_smooth(f, collection, window, override=True) for f in signals]
        first = outputs[0]
        for p in exponents:
            ratio = max(_ratio(out.signal, f, p) for out, f in zip(outputs, signals))
            result.add(label, len(collection), first.overlap, first.constant, p, ratio)
        if label == "refined":
            result.summary["well_distributed"] = first.well_distributed
            result.summary["overlap"] = first.overlap
    result.summary["lumped"] = len(refinement.lumped)
    result.summary["passthrough"] = len(refinement.passthrough)
    result.attach("original.csv", partial(write_collection_csv, omegas=omegas))
    result.attach("refined.csv", partial(write_collection_csv, omegas=refinement.collection))


@experiment(
    "tiles-bessel",
    ("omega_lo", "omega_hi", "tiles", "bessel", "bessel_power", "min_slack", "translation_error"),
)
def tiles_bessel(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Bessel constants, averaging identity and maximal bounds for tile families."""
    n = _grid(config, 256)
    arcs = config.get_int("arcs", 4)
    trials = config.get_int("trials", 50)
    p = config.get_float("p", 3.0)
    rng = np.random.default_rng([config.seed, n])
    omegas = IntervalCollection.random_disjoint(n, arcs, rng)
    window = default_window(n)
    tiles = build_tiles(omegas, window, n)
    for omega in omegas:
        family = tile_family(omega, window, n)
        bessel = bessel_constant(omega, window, n)
        slack = math.inf
        for trial in range(trials):
            f = TorusSignal.random(n, np.random.default_rng([config.seed, omega.lo, trial]))
            energy = float(np.sum(np.abs(family.coefficients(f.samples)) ** 2))
            slack = min(slack, bessel * lp_norm(f, 2) ** 2 - energy)
        error = translation_average_check(omega, window, TorusSignal.random(n, rng))
        result.add(
            omega.lo, omega.hi, family.count, bessel, bessel_constant_power(omega, window, n), slack, error
        )
        result.check(slack >= -1e-9 * max(bessel, 1.0), f"{omega}: Bessel slack {slack!r}")
        result.check(error <= 1e-10, f"{omega}: translation average error {error!r}")
    signals = [TorusSignal.random(n, rng) for _ in range(trials)]
    result.summary["pointwise_constant"] = pointwise_max_check(signals, tiles).constant
    result.attach("signal.bin", partial(write_signal_binary, signal=signals[0]))
    result.attach(
        "coefficients.csv",
        partial(write_coefficients_csv, coefficients=tile_coefficients(signals[0], tiles)),
    )
    restricted = restricted_type_check(tiles, indicator_battery(n, config.seed), p)
    result.summary["restricted_type_max"] = restricted.max_ratio
    result.summary["tiles"] = len(tiles)


@experiment("tail-probe", ("t", "t_rho", "ratio"))
def tail_probe(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Decay of tile energy inside ``I`` for signals vanishing on ``tI``."""
    n = _grid(config, 256)
    omega = FreqInterval(config.get_int("omega_lo", -8), config.get_int("omega_hi", 8))
    interval = DyadicInterval(config.get_int("level", 2), config.get_int("offset", 1))
    report = tail_decay_probe(
        omega,
        interval,
        config.get_floats("t", (1.5, 2.0, 2.5, 3.0)),
        default_window(n),
        starts=config.get_int("starts", 4),
        steps=config.get_int("steps", 60),
        seed=config.seed,
    )
    for row in report.rows:
        result.add(*row)
    ratios = [r[2] for r in report.rows]
    result.summary["monotone"] = all(a >= b for a, b in zip(ratios, ratios[1:]))
    result.summary["rho"] = report.rho
    result.summary["slope"] = report.slope


@experiment(
    "greedy-split",
    ("beta", "big", "small", "intervals", "cm_small", "shadow", "normalized_shadow", "bound"),
)
def greedy_split(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Greedy Carleson split of ``1_F`` over a range of thresholds.

    ``F`` is one dyadic interval unless ``subset = scattered`` asks for a
    random sample set of the same measure. Every extracted ``J`` carries
    mass ``beta/4 |J|``, so ``beta |sh(T_big)| / |F|`` never exceeds four
    times the energy ``sum_s |<1_F, phi_s>|^2 / |F|``.
    """
    n = _grid(config, 512)
    arcs = config.get_int("arcs", 8)
    level = config.get_int("level", 3)
    subset = config.get_str("subset", "interval")
    betas = config.get_floats("beta", [2.0**k for k in range(-6, 3)])
    if not betas:
        raise ConfigError("[greedy-split] beta: at least one threshold is needed")
    rng = np.random.default_rng([config.seed, n])
    tiles = build_tiles(IntervalCollection.random_disjoint(n, arcs, rng), default_window(n), n)
    mask = np.zeros(n, dtype=bool)
    if subset == "interval":
        interval = DyadicInterval(level, config.get_int("offset", 0))
        mask[interval.sample_slice(n)] = True
    elif subset == "scattered":
        mask[rng.choice(n, size=max(n >> level, 1), replace=False)] = True
    else:
        raise ConfigError(f"[greedy-split] subset: unknown set {subset!r}")
    coefficients = tile_coefficients(TorusSignal(mask.astype(np.float64)), tiles)
    energy = coefficients.energy() / mask.mean()
    bound = 4 * energy
    normalized = []
    for beta in sorted(betas, reverse=True):
        split = greedy_bmo_split(tiles, mask, beta)
        value = split.shadow * beta / split.measure
        normalized.append(value)
        result.add(
            beta,
            len(split.big),
            len(split.small),
            len(split.intervals),
            split.cm_small,
            split.shadow,
            value,
            bound,
        )
        result.check(split.cm_small < beta / 4, f"beta={beta!r}: CM of small part {split.cm_small!r}")
        result.check(
            value <= bound * (1 + 1e-9), f"beta={beta!r}: normalized shadow {value!r} exceeds {bound!r}"
        )
    positive = [v for v in normalized if v > 0]
    result.summary["energy"] = energy
    result.summary["shadow_constant"] = max(normalized)
    result.summary["shadow_spread"] = max(positive) / min(positive) if positive else None
    # The smallest beta moves the most tiles.
    result.attach("split.json", partial(write_split_json, split=split))
    result.attach("small.csv", partial(write_carleson_csv, alpha=split.small_carleson))


@experiment("carleson-jn", ("depth", "p", "max_ratio", "worst_kind"))
def carleson_jn(config: ExperimentConfig, result: ExperimentResult) -> None:
    """John-Nirenberg ratios of random Carleson sequences across tree depths."""
    depths = config.get_ints("depths", (8, 10, 12))
    exponents = config.get_floats("p", (1.0, 2.0, 3.0, 4.0))
    trials = config.get_int("trials", 200)
    per_p: dict[float, list[float]] = {p: [] for p in exponents}
    for depth in depths:
        battery = jn_battery(depth, exponents, trials, config.seed)
        for p in exponents:
            ratio = battery.max_ratio[p]
            per_p[p].append(ratio)
            result.add(depth, p, ratio, battery.worst_kind[p])
            if p == 1:
                result.check(ratio <= 1 + 1e-12, f"depth {depth}: p=1 ratio {ratio!r} exceeds 1")
    for p, ratios in per_p.items():
        result.summary[f"drift_p{p:g}"] = max(ratios) / min(ratios) if min(ratios) > 0 else None


@experiment(
    "product-jn",
    ("instance", "rect", "heuristic", "exhaustive", "steps", "ratio", "bound"),
)
def product_jn(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Product Carleson norms in three modes and the John-Nirenberg recursion."""
    depth = config.get_int("depth", 3)
    trials = config.get_int("trials", 10)
    p = config.get_float("p", 2.0)
    density = config.get_float("density", 0.25)
    instances = [("separating", separating_instance())]
    for trial in range(trials):
        rng = np.random.default_rng([config.seed, trial])
        instances.append((f"random-{trial}", random_product_carleson((depth, depth), rng, density)))
    for label, alpha in instances:
        rect = product_cm_norm(alpha, CmMode.Rect)
        heuristic = product_cm_norm(alpha, CmMode.Heuristic)
        exact = product_cm_norm(alpha, CmMode.Exhaustive)
        result.check(rect <= exact + 1e-12, f"{label}: rect {rect!r} > exhaustive {exact!r}")
        result.check(heuristic <= exact + 1e-12, f"{label}: heuristic {heuristic!r} > exhaustive {exact!r}")
        try:
            recursion = product_jn_recursion(alpha, np.ones(alpha.cells, dtype=bool), p)
        except NumericalFailure as exc:
            result.failures.append(f"{label}: {exc}")
            continue
        for step in recursion.steps:
            result.check(
                step.next_measure < step.measure / 2 or step.measure == 0,
                f"{label}: |V| = {step.next_measure!r} is not below |U|/2",
            )
        result.add(label, rect, heuristic, exact, recursion.depth, recursion.ratio, recursion.bound)
    result.summary["separating_gap"] = result.rows[0][3] - result.rows[0][1] if result.rows else None
    result.attach("separating.csv", partial(write_product_carleson_csv, alpha=instances[0][1]))


@experiment("varq", ("instance", "q", "fast", "oracle", "match"))
def varq(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Dynamic programming against exhaustive search, in one or two variables."""
    mode = config.get_str("mode", "oracle")
    exponents = sorted(config.get_floats("q", (1.0, 1.5, 2.0, 3.0)))
    if mode == "oracle":
        count = config.get_int("n", 12)
        instances = config.get_int("instances", 200)
    elif mode == "2d":
        count = config.get_int("side", 4)
        instances = config.get_int("instances", 50)
    else:
        raise ConfigError(f"unknown varq mode {mode!r}")
    mismatches = monotone = 0
    for instance in range(instances):
        rng = np.random.default_rng([config.seed, instance])
        previous = math.inf
        shape = (count,) if mode == "oracle" else (count, count)
        values = rng.standard_normal(shape)
        for q in exponents:
            if mode == "oracle":
                fast, oracle = var_q(values, q), var_q_brute(values, q)
            else:
                fast, oracle = var_q_2d(values, q, "grid"), var_q_2d(values, q, "brute")
            match = abs(fast - oracle) <= 1e-12 * max(1.0, oracle)
            if not match:
                mismatches += 1
                logger.warning("instance %d q=%g: fast %r, oracle %r", instance, q, fast, oracle)
            if mode == "oracle" and fast > previous * (1 + 1e-12):
                monotone += 1
            previous = fast
            result.add(instance, q, fast, oracle, match)
    if mode == "oracle":
        result.check(mismatches == 0, f"{mismatches} dynamic programming values differ from the oracle")
        result.summary["monotone_violations"] = monotone
    result.summary["gaps"] = mismatches


def _martingale_families(n: int, rng: np.random.Generator) -> dict[str, RealArray]:
    x = np.linspace(0.0, 1.0, n)
    walk = np.cumsum(rng.choice([-1.0, 1.0], size=n))
    return {
        "constant": np.full(n, 0.5),
        "ramp": x,
        "jump": (x >= 0.5).astype(np.float64),
        "walk": walk / np.abs(walk).max(),
    }


@experiment(
    "martingale",
    ("family", "n", "q", "max_cells", "constant", "u_q_bound", "residual"),
)
def martingale(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Martingale decompositions along the variation profile."""
    sizes = config.get_ints("sizes", (256, 1024))
    q = config.get_float("q", 2.0)
    j_max = config.get_int("j_max", 8)
    for n in sizes:
        rng = np.random.default_rng([config.seed, n])
        for family, values in _martingale_families(n, rng).items():
            decomposition = martingale_decompose(values, q, j_max)
            fill = max(level.cells / 2**level.level for level in decomposition)
            for coarse, fine in zip(decomposition.levels, decomposition.levels[1:]):
                result.check(
                    set(coarse.starts.tolist()) <= set(fine.starts.tolist()),
                    f"{family} n={n}: level {fine.level} does not refine level {coarse.level}",
                )
            result.check(fill <= 1, f"{family} n={n}: a partition has more than 2^j cells")
            if family in ("ramp", "jump"):
                result.check(
                    decomposition.constant <= 4,
                    f"{family} n={n}: constant {decomposition.constant!r} exceeds 4",
                )
            residual = float(np.abs(decomposition.residual).max())
            bound = u_q_upper_bound(values, q, j_max)
            result.add(family, n, q, fill, decomposition.constant, bound, residual)


def _lacunary_symbol(n: int, values: Sequence[Sequence[float]]) -> RealArray:
    """A symbol that takes ``values[i]`` on consecutive equal parts of block ``i``."""
    symbol = np.zeros(n)
    for block, parts in zip(IntervalCollection.lacunary(n), values):
        indices = np.arange(block.lo, block.hi) + n // 2
        for chunk, value in zip(np.array_split(indices, len(parts)), parts):
            symbol[chunk] = value
    return symbol


@experiment("crs", ("family", "draw", "lhs", "rhs", "ratio"))
def crs(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Estimated ``L^p`` norms against lacunary ``V_q`` norms."""
    n = _grid(config, 512)
    p = config.get_float("p", 3.0)
    q = config.get_float("q", 2.0)
    draws = config.get_int("draws", 10)
    restarts = config.get_int("restarts", 4)
    iters = config.get_int("iters", 60)
    blocks = len(IntervalCollection.lacunary(n))
    jump = StepMultiplier.from_blocks(refined_lacunary(n, 2), np.tile([0.0, 1.0], blocks))
    cases: list[tuple[str, int, RealArray]] = [("constant", 0, np.ones(n))]
    cases.append(("unit-jump", 0, jump.sample(n).real))
    for draw in range(draws):
        rng = np.random.default_rng([config.seed, draw])
        cases.append(("random-steps", draw, _lacunary_symbol(n, [(a,) for a in rng.uniform(-1, 1, blocks)])))
    ratios = []
    for family, draw, symbol in cases:
        report = crs_check(symbol, p, q, n, restarts, iters, config.seed)
        ratios.append(report.ratio)
        result.add(family, draw, report.lhs_estimate, report.rhs, report.ratio)
        if family == "constant":
            result.check(abs(report.lhs_estimate - 1) < 1e-9, f"identity norm {report.lhs_estimate!r}")
    result.summary["cap"] = max(ratios)
    result.attach("unit-jump.csv", partial(write_step_csv, m=jump))


@experiment("decouple", ("cells", "estimate", "sup_a", "normalized"))
def decouple(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Growth of step multiplier norms with the number of cells per block."""
    n = _grid(config, 512)
    q = config.get_float("q", 2.0)
    report = decouple_check(
        n,
        config.get_float("p", 4.0),
        q,
        cells=config.get_ints("cells", (1, 2, 4, 8, 16)),
        coefficients=config.get_str("coefficients", "signs"),
        seed=config.seed,
        restarts=config.get_int("restarts", 4),
        iters=config.get_int("iters", 60),
    )
    for count, value, top in report.rows:
        result.add(count, value, top, value / (count ** (1.0 / q) * top))
    result.summary["slope"] = report.slope
    result.summary["constant"] = report.constant


@experiment("counterexample-rubio", ("N", "ratio", "f_norm", "witness"))
def rubio(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Unit-arc square functions of Dirichlet kernels below ``L^2``."""
    n = _grid(config, 1024)
    p = config.get_float("p", 4 / 3)
    counts = config.get_ints("N", [c for c in (16, 32, 64, 128, 256, 512, 1024) if c <= n // 4])
    report = counterexample_rubio(counts, p, n)
    for row in report.rows:
        result.add(*row)
    result.summary["slope"] = report.slope
    result.summary["expected_slope"] = 1 / p - 0.5
    result.summary["norm_exponent"] = report.norm_exponent
    result.summary["expected_norm_exponent"] = 1 - 1 / p
    result.summary["witness_constant"] = report.witness_constant


@experiment("counterexample-multiplier", ("N", "witness", "khintchine", "var_q"))
def multiplier_counterexample(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Random-sign bump multipliers with growing numbers of bumps."""
    counts = config.get_ints("N", (4, 8, 16))
    spacing = config.get_int("spacing", 16)
    n = _grid(config, 2 ** math.ceil(math.log2(4 * max(counts) * spacing)))
    p = config.get_float("p", 4.0)
    report = counterexample_multiplier(
        counts,
        p,
        config.get_int("trials", 8),
        config.seed,
        spacing=spacing,
        n=n,
        q=config.get_float("q", 2.0),
    )
    for row in report.rows:
        result.add(*row)
    khintchine = [r[2] for r in report.rows]
    result.summary["slope"] = report.slope
    result.summary["expected_slope"] = abs(0.5 - 1 / p)
    result.summary["khintchine_spread"] = max(khintchine) / min(khintchine)


@experiment("khintchine", ("trial", "ratio"))
def khintchine(config: ExperimentConfig, result: ExperimentResult) -> None:
    """Random-sign smooth kernels against the dyadic G-function."""
    n = _grid(config, 1024)
    rng = np.random.default_rng([config.seed, n])
    report = khintchine_gfunction(
        TorusSignal.random(n, rng), config.get_int("trials", 20), config.seed
    )
    for trial, ratio in enumerate(report.trial_ratios):
        result.add(trial, ratio)
    result.summary["scales"] = report.scales
    for p, ratio in report.gfunction_ratios.items():
        result.summary[f"gfunction_p{p:g}"] = ratio
