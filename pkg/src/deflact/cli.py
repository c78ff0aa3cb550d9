"""Command-line interface.

Subcommands: gen, recycle, run, compare, sweep, inspect. Every command is
deterministic given its flags and seeds; re-running a generation command
produces byte-identical output directories.

Exit codes: 0 success, 1 runtime/solver failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import nonlinear, solvers
from ._kernels import active_backend
from .errors import ConfigError, DeflactError, RankDeficiencyError
from .gridio import read_rgrid, write_rgrid
from .harness import (IterationTrace, SweepRow, delta_sweep,
                      first_discrepancy_index, semiconvergence_index,
                      write_sweep_csv, write_trace_csv)
from .linops import gaussian_psf, norm_estimate, psf_operator
from .recycle import (RecycleSpace, basis_from_solutions, build_recycle_space,
                      error_bounds, gram, top_eigenvectors)
from .problems import (MANIFEST_NAME, TestProblem, _uniform_noise,
                       load_problem, make_blur_problem, make_diagonal_problem,
                       make_nonlinear_toy, save_problem)

LINEAR_METHODS = ("landweber", "sd", "cgne", "aug-landweber", "aug-sd")
NONLINEAR_METHODS = ("nl-gd", "nl-aug-landweber")
AUGMENTED = ("aug-landweber", "aug-sd", "nl-aug-landweber")


class UsageError(Exception):
    """Bad flag combination or value; exits with code 2."""


@dataclass
class RunManifest:
    """Validated description of one solver run."""

    problem: str
    method: str
    out: str
    recycle: str | None = None
    tau: float = 1.5
    delta: float | None = None
    delta_mode: str = "abs"
    beta: str = "auto"
    alpha: float | None = None
    max_iters: int = 200
    kappa: str = "auto"
    seed: int = 0

    def validate(self):
        if not os.path.isdir(self.problem):
            raise UsageError(f"--problem {self.problem}: no such directory")
        if not os.path.exists(os.path.join(self.problem, MANIFEST_NAME)):
            raise UsageError(f"--problem {self.problem}: not a problem "
                             f"directory (missing {MANIFEST_NAME})")
        if self.method not in LINEAR_METHODS + NONLINEAR_METHODS:
            raise UsageError(f"--method {self.method}: unknown method")
        if self.method in AUGMENTED:
            if self.recycle is None:
                raise UsageError(f"--method {self.method} requires --recycle")
            if not os.path.isdir(self.recycle):
                raise UsageError(f"--recycle {self.recycle}: no such directory")
        elif self.recycle is not None:
            raise UsageError(f"--recycle is only valid with augmented "
                             f"methods, not {self.method}")
        if self.method in ("sd", "cgne", "aug-sd") + NONLINEAR_METHODS \
                and self.beta != "auto":
            raise UsageError(f"--beta does not apply to {self.method}")
        if self.method in NONLINEAR_METHODS and self.alpha is None \
                and self.method == "nl-aug-landweber":
            raise UsageError("nl-aug-landweber requires --alpha")
        if self.tau <= 1:
            raise UsageError(f"--tau must exceed 1, got {self.tau}")
        if self.max_iters < 1:
            raise UsageError("--max-iters must be >= 1")
        if self.delta_mode not in ("abs", "rel"):
            raise UsageError(f"--delta-mode {self.delta_mode}: use abs or rel")
        if self.delta is not None and self.delta < 0:
            raise UsageError("--delta must be nonnegative")

    def write(self, path):
        with open(path, "w", encoding="ascii") as fh:
            for key in ("problem", "method", "recycle", "tau", "delta",
                        "delta_mode", "beta", "alpha", "max_iters", "kappa",
                        "seed", "out"):
                fh.write(f"{key} = {getattr(self, key)}\n")


def _parse_floats(text: str) -> list:
    """Comma list or a:b:n range syntax for equally spaced values."""
    text = text.strip()
    if ":" in text and not text.startswith("geo:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range syntax is a:b:n, got {text!r}")
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise UsageError(f"range count must be >= 1 in {text!r}")
        return [float(v) for v in np.linspace(a, b, n)]
    return [float(v) for v in text.split(",") if v]


def _parse_singular_values(text: str) -> np.ndarray:
    if text.startswith("geo:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError("geometric spectrum syntax is geo:a:r:n")
        a, r, n = float(parts[1]), float(parts[2]), int(parts[3])
        return a * r ** np.arange(n)
    return np.array([float(v) for v in text.split(",") if v])


def _problem_shape(problem: TestProblem):
    meta = problem.meta
    if "rows" in meta and "cols" in meta:
        return int(meta["rows"]), int(meta["cols"])
    return 1, problem.y_delta.size


def _load_recycle(path, problem: TestProblem) -> RecycleSpace:
    op = problem.op
    return RecycleSpace.load(path, dim_domain=op.dim_domain,
                             dim_range=op.dim_range)


def _effective_delta(manifest: RunManifest, problem: TestProblem) -> float:
    if manifest.delta is None:
        return problem.delta
    if manifest.delta_mode == "rel":
        return manifest.delta * float(np.linalg.norm(problem.y_delta))
    return manifest.delta


def _kappa_factor(opts, rs: RecycleSpace, problem: TestProblem,
                  delta: float) -> float:
    """Resolve the --kappa flag (auto / off / explicit factor)."""
    if opts.kappa == "off" or rs.k == 0:
        return 1.0
    if opts.kappa == "auto":
        return error_bounds(rs, norm_estimate(problem.op), delta).kappa_U
    try:
        value = float(opts.kappa)
    except ValueError:
        raise UsageError(f"--kappa must be auto, off or a number, "
                         f"got {opts.kappa!r}")
    if value < 1:
        raise UsageError("--kappa must be >= 1")
    return value


# ---------------------------------------------------------------------------
# gen

def cmd_gen(args) -> int:
    out = args.out
    if (args.noise_rel is None) == (args.noise_abs is None):
        raise UsageError("choose exactly one of --noise-rel / --noise-abs")

    if args.kind == "blur":
        if args.sigma is None or args.sigma <= 0:
            raise UsageError(f"--sigma must be positive, got {args.sigma}")
        rows = cols = args.size
        if rows is None or rows < 2:
            raise UsageError("--size must be >= 2 for blur problems")
        if args.noise_rel is not None:
            rel = args.noise_rel
        else:
            clean = make_blur_problem(rows, cols, args.sigma, args.image,
                                      0.0, args.seed)
            scale = float(np.linalg.norm(clean.y_exact))
            rel = args.noise_abs / scale if scale else 0.0
        if rel < 0:
            raise UsageError("noise level must be nonnegative")
        problem = make_blur_problem(rows, cols, args.sigma, args.image,
                                    rel, args.seed)
    elif args.kind == "diagonal":
        if not args.singular_values:
            raise UsageError("--singular-values is required for diagonal")
        sv = _parse_singular_values(args.singular_values)
        if args.x_true in (None, "ones"):
            xt = np.ones(sv.size)
        else:
            xt = np.array([float(v) for v in args.x_true.split(",") if v])
        y_exact = sv * xt
        if args.noise_abs is not None:
            delta = args.noise_abs
        else:
            delta = args.noise_rel * float(np.linalg.norm(y_exact))
        problem = make_diagonal_problem(sv, xt, delta, args.seed)
    elif args.kind == "nltoy":
        if args.n is None or args.n < 1:
            raise UsageError("--n must be >= 1 for nltoy problems")
        eps = args.epsilon if args.epsilon is not None else 0.01
        if args.noise_abs is not None:
            delta = args.noise_abs
        else:
            probe = make_nonlinear_toy(args.n, eps, 0.0, args.seed)
            delta = args.noise_rel * float(np.linalg.norm(probe.y_exact))
        problem = make_nonlinear_toy(args.n, eps, delta, args.seed)
    else:
        raise UsageError(f"--kind {args.kind}: unknown problem kind")

    if args.noise_abs is not None:
        problem.meta["noise_mode"] = "abs"
        problem.meta["noise_value"] = float(args.noise_abs)
    save_problem(problem, out)
    with open(os.path.join(out, MANIFEST_NAME), encoding="ascii") as fh:
        sys.stdout.write(fh.read())
    return 0


# ---------------------------------------------------------------------------
# recycle

def cmd_recycle(args) -> int:
    problem = load_problem(args.problem)
    op = problem.op

    if args.strategy == "prior-solves":
        if problem.meta.get("kind") != "blur":
            raise UsageError("--strategy prior-solves needs a blur problem")
        if not args.sigmas:
            raise UsageError("--strategy prior-solves requires --sigmas")
        if args.data == "clean":
            if problem.y_exact is None:
                raise UsageError("--data clean needs stored exact data")
            data = problem.y_exact
        else:
            data = problem.y_delta
        sigmas = _parse_floats(args.sigmas)
        rows, cols = _problem_shape(problem)
        vectors = []
        cfg = solvers.SolveConfig(method="steepest_descent", delta=0.0,
                                  max_iters=args.iters, record_error=False,
                                  keep_iterates=True)
        for sigma in sigmas:
            sub_op = psf_operator(gaussian_psf(rows, cols, sigma), rows, cols)
            result = solvers.steepest_descent(sub_op, data,
                                              np.zeros(op.dim_domain), cfg)
            vectors.extend(result.iterates[1:])  # skip the zero start
        raw = basis_from_solutions(vectors)
    elif args.strategy == "eigen":
        if args.count is None or args.count < 1:
            raise UsageError("--strategy eigen requires --count >= 1")
        if op.dim_domain != op.dim_range:
            raise UsageError("--strategy eigen needs a square operator")
        raw = top_eigenvectors(op, args.count, iters=args.power_iters,
                               seed=args.seed)
        if raw.k < args.count:
            print(f"pruned {args.count - raw.k} unconverged eigenpair(s), "
                  f"keeping {raw.k}")
    elif args.strategy == "files":
        if not args.files:
            raise UsageError("--strategy files requires --files")
        vectors = [read_rgrid(f).ravel() for f in args.files]
        raw = basis_from_solutions(vectors)
        if raw.k < len(vectors):
            print(f"dropped {len(vectors) - raw.k} dependent vector(s), "
                  f"keeping {raw.k}")
    else:
        raise UsageError(f"--strategy {args.strategy}: unknown strategy")

    try:
        if problem.meta.get("kind") == "nltoy":
            # nonlinear map: factorize against the derivative at the
            # zero start, matching the augmented iteration's first step
            rs = nonlinear._derivative_space(
                op, np.zeros(op.dim_domain), raw, 0)
        else:
            rs = build_recycle_space(op, raw)
    except RankDeficiencyError as exc:
        print(f"error: strategy {args.strategy}: {exc}", file=sys.stderr)
        return 1
    rs.save(args.out)
    print(f"recycle space with k={rs.k} written to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# run

def _linear_solve(method, problem, rs, cfg, x_true):
    op = problem.op
    x0 = np.zeros(op.dim_domain)
    if method == "landweber":
        return solvers.landweber(op, problem.y_delta, x0, cfg, x_true)
    if method == "sd":
        return solvers.steepest_descent(op, problem.y_delta, x0, cfg, x_true)
    if method == "cgne":
        return solvers.cgne(op, problem.y_delta, cfg, x_true)
    if method == "aug-landweber":
        return solvers.augmented_landweber(op, rs, problem.y_delta, x0, cfg,
                                           x_true)
    if method == "aug-sd":
        return solvers.augmented_steepest_descent(op, rs, problem.y_delta,
                                                  x0, cfg, x_true)
    raise UsageError(f"unknown linear method {method}")


def cmd_run(args) -> int:
    manifest = RunManifest(problem=args.problem, method=args.method,
                           out=args.out, recycle=args.recycle, tau=args.tau,
                           delta=args.delta, delta_mode=args.delta_mode,
                           beta=args.beta, alpha=args.alpha,
                           max_iters=args.max_iters, kappa=args.kappa,
                           seed=args.seed)
    manifest.validate()
    problem = load_problem(args.problem)
    is_nl = manifest.method in NONLINEAR_METHODS
    if is_nl and problem.meta.get("kind") != "nltoy":
        raise UsageError(f"{manifest.method} needs an nltoy problem")
    if not is_nl and problem.meta.get("kind") == "nltoy":
        raise UsageError(f"{manifest.method} cannot run on an nltoy problem")

    delta = _effective_delta(manifest, problem)
    beta = None if manifest.beta == "auto" else float(manifest.beta)
    cfg = solvers.SolveConfig(method=manifest.method, beta=beta,
                              tau=manifest.tau, delta=delta,
                              max_iters=manifest.max_iters)

    rs = None
    kappa = 1.0
    if manifest.method in AUGMENTED:
        rs = _load_recycle(manifest.recycle, problem)
        if not is_nl:
            kappa = _kappa_factor(manifest, rs, problem, delta)
            cfg.delta = kappa * delta

    if is_nl:
        print("warning: nonlinear methods are experimental; no convergence "
              "or regularization guarantee applies", file=sys.stderr)
        if manifest.method == "nl-gd":
            rule = "fixed" if manifest.alpha is not None else "steepest"
            result = nonlinear.gradient_descent(
                problem.op, problem.y_delta, np.zeros(problem.op.dim_domain),
                cfg, step_rule=rule, alpha=manifest.alpha,
                x_true=problem.x_true)
        else:
            result = nonlinear.augmented_landweber(
                problem.op, rs.U, problem.y_delta,
                np.zeros(problem.op.dim_domain), manifest.alpha, cfg,
                x_true=problem.x_true)
    else:
        result = _linear_solve(manifest.method, problem, rs, cfg,
                               problem.x_true)

    os.makedirs(args.out, exist_ok=True)
    manifest.write(os.path.join(args.out, "run.manifest"))
    write_trace_csv(result.trace, os.path.join(args.out, "trace.csv"))
    rows, cols = _problem_shape(problem)
    write_rgrid(os.path.join(args.out, "x.rg"), result.x.reshape(rows, cols))
    print(f"method={manifest.method} stop={result.stop_reason} "
          f"iter={result.trace.final.iter} "
          f"residual={result.trace.final.residual_norm!r} "
          f"kappa_delta={cfg.delta!r}")
    return 0


# ---------------------------------------------------------------------------
# compare

def cmd_compare(args) -> int:
    if args.family not in ("sd", "landweber"):
        raise UsageError(f"--family {args.family}: use sd or landweber")
    problem = load_problem(args.problem)
    if problem.meta.get("kind") == "nltoy":
        raise UsageError("compare supports linear problems only")
    rs = _load_recycle(args.recycle, problem)
    delta = problem.delta

    # full traces: no early stop, indices recovered by scanning afterwards
    cfg = solvers.SolveConfig(beta=None, tau=args.tau, delta=0.0,
                              max_iters=args.max_iters)
    x0 = np.zeros(problem.op.dim_domain)
    if args.family == "sd":
        plain = solvers.steepest_descent(problem.op, problem.y_delta, x0,
                                         cfg, problem.x_true)
        aug = solvers.augmented_steepest_descent(problem.op, rs,
                                                 problem.y_delta, x0, cfg,
                                                 problem.x_true)
    else:
        plain = solvers.landweber(problem.op, problem.y_delta, x0, cfg,
                                  problem.x_true)
        aug = solvers.augmented_landweber(problem.op, rs, problem.y_delta,
                                          x0, cfg, problem.x_true)

    kappa = _kappa_factor(args, rs, problem, delta)
    stop_plain = first_discrepancy_index(plain.trace, args.tau, delta)
    stop_aug = first_discrepancy_index(aug.trace, args.tau, delta)
    stop_aug_kappa = first_discrepancy_index(aug.trace, args.tau,
                                             kappa * delta)
    semi_plain = semiconvergence_index(plain.trace)
    semi_aug = semiconvergence_index(aug.trace)

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "compare.csv")
    with open(path, "w", newline="") as fh:
        fh.write("iter,residual_plain,error_plain,residual_aug,error_aug\n")
        for i in range(max(len(plain.trace), len(aug.trace))):
            cells = [str(i)]
            for res in (plain, aug):
                if i < len(res.trace):
                    row = res.trace[i]
                    cells.append(repr(row.residual_norm))
                    cells.append("" if row.error_norm is None
                                 else repr(row.error_norm))
                else:
                    cells.extend(["", ""])
            fh.write(",".join(cells) + "\n")

    def show(v):
        return "-" if v is None else str(v)

    summary = (f"family={args.family} k={rs.k} delta={delta!r} "
               f"tau={args.tau!r} kappa={kappa!r} | "
               f"stop_plain={show(stop_plain)} stop_aug={show(stop_aug)} "
               f"stop_aug_kappa={show(stop_aug_kappa)} "
               f"semiconv_plain={show(semi_plain)} "
               f"semiconv_aug={show(semi_aug)}")
    with open(os.path.join(args.out, "summary.txt"), "w") as fh:
        fh.write(summary + "\n")
    print(summary)
    return 0


# ---------------------------------------------------------------------------
# sweep

def cmd_sweep(args) -> int:
    problem = load_problem(args.problem)
    if problem.x_true is None or problem.y_exact is None:
        raise UsageError("sweep needs a problem with stored exact data")
    if args.method not in LINEAR_METHODS:
        raise UsageError(f"--method {args.method}: sweep supports linear "
                         "methods only")
    if args.method in AUGMENTED and not args.recycle:
        raise UsageError(f"--method {args.method} requires --recycle")
    deltas = _parse_floats(args.deltas)
    rs = _load_recycle(args.recycle, problem) if args.recycle \
        else RecycleSpace.empty(problem.op.dim_domain, problem.op.dim_range)
    seed = int(problem.meta.get("seed", 0))
    kind = problem.meta.get("kind")

    def family(delta):
        if delta == 0.0:
            y_delta = problem.y_exact.copy()
        else:
            rng = np.random.default_rng([seed, deltas.index(delta)])
            if kind == "blur":
                noise = _uniform_noise(rng, problem.y_exact.size, delta)
            else:
                noise = rng.standard_normal(problem.y_exact.size)
                noise *= delta / np.linalg.norm(noise)
            y_delta = problem.y_exact + noise
        return TestProblem(problem.op, y_delta, delta, problem.label,
                           problem.x_true, problem.y_exact, problem.meta)

    def run(p: TestProblem):
        kappa = _kappa_factor(args, rs, p, p.delta) \
            if args.method in AUGMENTED else 1.0
        cfg = solvers.SolveConfig(
            beta=None if args.beta == "auto" else float(args.beta),
            tau=args.tau, delta=kappa * p.delta, max_iters=args.max_iters)
        result = _linear_solve(args.method, p, rs, cfg, p.x_true)
        return result, kappa * p.delta

    rows = delta_sweep(family, run, deltas)
    os.makedirs(args.out, exist_ok=True)
    write_sweep_csv(rows, os.path.join(args.out, "sweep.csv"))
    for row in rows:
        print(f"delta={row.delta!r} kappa_delta={row.kappa_delta!r} "
              f"stop_iter={row.stop_iter} final_error={row.final_error!r} "
              f"stop={row.stop_reason}")
    return 0


# ---------------------------------------------------------------------------
# inspect

def cmd_inspect(args) -> int:
    path = args.path
    if os.path.isdir(path):
        manifest_path = os.path.join(path, MANIFEST_NAME)
        if os.path.exists(manifest_path):
            with open(manifest_path, encoding="ascii") as fh:
                sys.stdout.write(fh.read())
            problem = load_problem(path)
            print(f"||y_delta|| = {np.linalg.norm(problem.y_delta)!r}")
            return 0
        if os.path.exists(os.path.join(path, "r.csv")):
            rs = RecycleSpace.load(path, dim_domain=1, dim_range=1)
            print(f"recycle space: k={rs.k}")
            if rs.k:
                orth = np.linalg.norm(gram(rs.C, rs.C) - np.eye(rs.k))
                print(f"n={rs.U.n} ||(C,C) - I|| = {orth!r}")
            return 0
        raise UsageError(f"{path}: neither a problem nor a recycle directory")
    if path.endswith(".rg") and os.path.exists(path):
        grid = read_rgrid(path)
        print(f"RGRID {grid.shape[0]}x{grid.shape[1]} "
              f"min={grid.min()!r} max={grid.max()!r} sum={grid.sum()!r}")
        return 0
    raise UsageError(f"{path}: nothing to inspect")


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deflact",
        description="Matrix-free iterative regularization with subspace "
                    "recycling (backend: %s)" % active_backend())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a test problem directory")
    p.add_argument("--kind", required=True,
                   choices=["blur", "diagonal", "nltoy"])
    p.add_argument("--size", type=int, help="image side length (blur)")
    p.add_argument("--sigma", type=float, help="Gaussian blur spread")
    p.add_argument("--image", default="geometric",
                   help="geometric, starfield or file:<path>")
    p.add_argument("--singular-values",
                   help="comma list or geo:a:r:n (diagonal)")
    p.add_argument("--x-true", help="comma list or 'ones' (diagonal)")
    p.add_argument("--n", type=int, help="dimension (nltoy)")
    p.add_argument("--epsilon", type=float, help="nonlinearity (nltoy)")
    p.add_argument("--noise-rel", type=float)
    p.add_argument("--noise-abs", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("recycle", help="build a recycle space")
    p.add_argument("--problem", required=True)
    p.add_argument("--strategy", required=True,
                   choices=["prior-solves", "eigen", "files"])
    p.add_argument("--sigmas", help="a:b:n spread list (prior-solves)")
    p.add_argument("--iters", type=int, default=2,
                   help="steepest-descent steps per prior solve")
    p.add_argument("--count", type=int, help="eigenvector count (eigen)")
    p.add_argument("--power-iters", type=int, default=60)
    p.add_argument("--files", nargs="*", help="RGRID vectors (files)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_recycle)

    p = sub.add_parser("run", help="run one solver")
    p.add_argument("--problem", required=True)
    p.add_argument("--method", required=True,
                   choices=list(LINEAR_METHODS + NONLINEAR_METHODS))
    p.add_argument("--recycle")
    p.add_argument("--tau", type=float, default=1.5)
    p.add_argument("--delta", type=float,
                   help="override the problem's noise level")
    p.add_argument("--delta-mode", default="abs", choices=["abs", "rel"])
    p.add_argument("--beta", default="auto")
    p.add_argument("--alpha", type=float, help="fixed nonlinear step")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--kappa", default="auto",
                   help="auto, off, or explicit factor >= 1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="plain vs augmented on one problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--recycle", required=True)
    p.add_argument("--family", default="sd", choices=["sd", "landweber"])
    p.add_argument("--tau", type=float, default=1.5)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--kappa", default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="noise-level sweep")
    p.add_argument("--problem", required=True)
    p.add_argument("--method", required=True, choices=list(LINEAR_METHODS))
    p.add_argument("--recycle")
    p.add_argument("--deltas", required=True,
                   help="comma list of decreasing noise levels")
    p.add_argument("--tau", type=float, default=1.5)
    p.add_argument("--beta", default="auto")
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--kappa", default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("inspect", help="describe a problem/recycle dir or grid")
    p.add_argument("--path", required=True)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DeflactError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
