"""Command-line driver: ``boolcube-vqml fit|synth|verify --config <path> --out <dir>``.

Exit codes: 0 success, 1 numerical failure, 2 usage or config error.
Numerical modules are imported after ``BOOLCUBE_THREADS`` has been applied
so the BLAS thread cap takes effect.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

SCHEMA_VERSION = 1
EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2
EMBEDDINGS = ("phase", "qrac", "qrac-permuted", "ensemble-phase", "ensemble-qrac")
SYNTH_TOL = 1e-9
THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


def apply_thread_cap(env=os.environ) -> int | None:
    raw = env.get("BOOLCUBE_THREADS")
    if raw is None or raw == "":
        return None
    try:
        threads = int(raw)
    except ValueError:
        threads = 0
    if threads < 1:
        raise ConfigError(f"BOOLCUBE_THREADS must be a positive integer, got {raw!r}")
    for var in THREAD_VARS:
        env[var] = str(threads)
    return threads


# -- config ------------------------------------------------------------------

def load_config(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"field 'schema': expected {SCHEMA_VERSION}, got {doc.get('schema')!r}")
    return doc


def parse_target(doc: dict):
    """FourierSpectrum from ``target``: a preset (g3/g6) or an inline spectrum."""
    from .bitfourier import FourierSpectrum, g3_spectrum, g6_spectrum, string_to_mask

    target = doc.get("target")
    if not isinstance(target, dict):
        raise ConfigError("field 'target': expected an object with 'preset' or 'spectrum'")
    if "preset" in target:
        presets = {"g3": (g3_spectrum, ("a1", "a2", "a3")), "g6": (g6_spectrum, ("d1", "d2", "d3", "d4"))}
        name = target["preset"]
        if name not in presets:
            raise ConfigError(f"field 'target.preset': expected one of {sorted(presets)}, got {name!r}")
        fn, keys = presets[name]
        coeffs = target.get("coefficients", {})
        unknown = set(coeffs) - set(keys)
        if unknown:
            raise ConfigError(f"field 'target.coefficients': unknown keys {sorted(unknown)}; allowed {list(keys)}")
        try:
            return fn(**{k: float(v) for k, v in coeffs.items()})
        except (TypeError, ValueError):
            raise ConfigError("field 'target.coefficients': values must be numbers") from None
    if "spectrum" in target:
        spec = target["spectrum"]
        if not isinstance(spec, dict):
            raise ConfigError("field 'target.spectrum': expected an object mapping mask strings to numbers")
        lengths = {len(k) for k in spec}
        n = target.get("n")
        if n is None:
            if len(lengths) != 1:
                raise ConfigError("field 'target.n': required when the spectrum is empty or masks differ in length")
            n = lengths.pop()
        if not isinstance(n, int) or n < 1 or any(length != n for length in lengths):
            raise ConfigError(f"field 'target.spectrum': every mask must have length n = {n}")
        try:
            return FourierSpectrum(n, {string_to_mask(k): float(v) for k, v in spec.items()})
        except ValueError as exc:
            raise ConfigError(f"field 'target.spectrum': {exc}") from None
    raise ConfigError("field 'target': expected 'preset' or 'spectrum'")


def parse_embedding(doc: dict) -> str:
    emb = doc.get("embedding")
    if emb not in EMBEDDINGS:
        raise ConfigError(f"field 'embedding': expected one of {list(EMBEDDINGS)}, got {emb!r}")
    return emb


def parse_train(doc: dict):
    from .train import OPTIMIZERS, TrainConfig

    opt = doc.get("optimizer", {})
    if not isinstance(opt, dict):
        raise ConfigError("field 'optimizer': expected an object")
    kind = opt.get("kind", "nelder-mead")
    if kind not in OPTIMIZERS:
        raise ConfigError(f"field 'optimizer.kind': expected one of {list(OPTIMIZERS)}, got {kind!r}")
    for key in ("budget", "seed"):
        if key in opt and (not isinstance(opt[key], int) or isinstance(opt[key], bool)):
            raise ConfigError(f"field 'optimizer.{key}': expected an integer")
    shots = doc.get("shots", 0)
    if not isinstance(shots, int) or shots < 0:
        raise ConfigError("field 'shots': expected a non-negative integer")
    try:
        return TrainConfig(kind, opt.get("budget", 1000), opt.get("seed", 0), shots, opt.get("init", "uniform"))
    except ValueError as exc:
        raise ConfigError(f"field 'optimizer': {exc}") from None


def parse_layers(doc: dict, m: int) -> int:
    from .train import default_layers

    layers = doc.get("layers")
    if layers is None:
        return default_layers(m)
    if not isinstance(layers, int) or layers < 1:
        raise ConfigError("field 'layers': expected a positive integer")
    return layers


# -- output helpers ------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _spectrum_rows(target, model, n: int):
    from .bitfourier import ZERO_TOL, mask_to_string

    keys = sorted(set(target) | {s for s, v in model.items() if abs(v) > ZERO_TOL})
    return [(mask_to_string(s, n), _fmt(target.coeff(s)), _fmt(model.coeff(s))) for s in keys]


# -- model construction for fitting --------------------------------------------

def _greedy_cover(masks, candidates, covers):
    """Pick candidates in order until every mask is covered by one of them."""
    chosen, left = [], set(masks)
    while left:
        best = max(candidates, key=lambda c: sum(covers(c, s) for s in left))
        gained = {s for s in left if covers(best, s)}
        if not gained:
            raise ConfigError("field 'target': some masks cannot be reached by this embedding")
        chosen.append(best)
        left -= gained
    return chosen


def build_fit_model(spec, embedding: str, doc: dict):
    """Trainable model for ``embedding`` (``ModelEnsemble``) and a short description."""
    from .bitfourier import degree, popcount
    from .embed import PHASE, QRAC, Permutation, SubsetSelector, permute_mask, qubits_for
    from .qsim import PauliSum
    from .synth import find_permutation, in_kqe
    from .train import Ansatz, LinearModel, ModelEnsemble

    n = spec.n

    def member(emb, bits, pre):
        m = qubits_for(bits, emb)
        return LinearModel(emb, Ansatz(m, parse_layers(doc, m)), PauliSum.all_z(m), pre)

    if embedding in ("phase", "qrac"):
        return ModelEnsemble([member(embedding, n, None)]), {}
    if embedding == "qrac-permuted":
        tau = find_permutation(spec)
        if tau is None:
            raise ConfigError("field 'target': no permutation maps the support into K^QE")
        return ModelEnsemble([member(QRAC, n, tau)]), {"tau": list(tau.tau)}
    if embedding == "ensemble-phase":
        d = doc.get("d", max(1, degree(spec)))
        if not isinstance(d, int) or not 1 <= d <= n:
            raise ConfigError(f"field 'd': expected an integer in [1, {n}]")
        if degree(spec) > d:
            raise ConfigError(f"field 'd': spectrum degree {degree(spec)} exceeds d = {d}")
        subsets = SubsetSelector.all(n, d)
        chosen = _greedy_cover(list(spec), subsets, lambda w, s: s & ~w.mask(n) == 0) if spec else subsets[:1]
        return ModelEnsemble([member(PHASE, d, w) for w in chosen]), {"subsets": [list(w.w) for w in chosen]}
    m = qubits_for(n, QRAC)
    if degree(spec) > m:
        raise ConfigError(f"field 'target': degree {degree(spec)} exceeds ceil(n/3) = {m}")
    if n > 7:
        raise ConfigError("field 'target': ensemble-qrac enumerates S_n and needs n <= 7")
    perms = Permutation.all(n)
    covers = lambda tau, s: in_kqe(permute_mask(tau, s), m)  # noqa: E731
    chosen = _greedy_cover(sorted(spec, key=popcount), perms, covers) if spec else perms[:1]
    return ModelEnsemble([member(QRAC, n, tau) for tau in chosen]), {"permutations": [list(t.tau) for t in chosen]}


def _model_spectrum(model, theta, embedding: str, n: int, table):
    """Closed-form spectrum for single unpermuted models, WHT of the table otherwise."""
    from .bitfourier import wht_forward
    from .train import extract_trained_spectrum

    if embedding in ("phase", "qrac") and model.members[0].ansatz.m <= 10:
        mem = model.members[0]
        return extract_trained_spectrum(theta, mem.ansatz, mem.d, embedding, n)
    return wht_forward(table)


# -- commands --------------------------------------------------------------------

def cmd_fit(doc: dict, out: Path) -> int:
    import numpy as np

    from .bitfourier import BitVector, FunctionTable, mask_to_string, wht_inverse
    from .train import LinearModel, ModelEnsemble, TrainingSet, optimize_model

    spec = parse_target(doc)
    embedding = parse_embedding(doc)
    config = parse_train(doc)
    model, extra = build_fit_model(spec, embedding, doc)
    t = TrainingSet.full_cube(spec)
    start = time.perf_counter()
    if len(spec) == 0:
        # the zero target is met exactly by switching the measurement off
        model = ModelEnsemble([LinearModel(m.embedding, m.ansatz, m.d * 0.0, m.preprocessor) for m in model.members])
        theta = np.zeros(model.num_params)
        trace = [0.0]
    else:
        theta, trace = optimize_model(config, t, model)
    wall = time.perf_counter() - start
    values = model.values(theta, t)
    table = FunctionTable(spec.n, values)
    target = wht_inverse(spec).values
    risk = float(0.5 * np.mean((target - values) ** 2))
    model_spec = _model_spectrum(model, theta, embedding, spec.n, table)
    n = spec.n
    _write_csv(out / "loss.csv", ["iteration", "loss"], [(i, _fmt(v)) for i, v in enumerate(trace)])
    _write_csv(out / "values.csv", ["mask_binary", "target", "model"],
               [(mask_to_string(b.mask, n), _fmt(y), _fmt(f)) for b, y, f in zip(BitVector.all(n), target, values)])
    _write_csv(out / "spectrum.csv", ["mask_binary", "target_coeff", "model_coeff"], _spectrum_rows(spec, model_spec, n))
    coeff_err = max((abs(spec.coeff(s) - model_spec.coeff(s)) for s in set(spec) | set(model_spec)), default=0.0)
    _write_json(out / "summary.json", {
        "command": "fit",
        "embedding": embedding,
        "n": n,
        "members": len(model.members),
        "num_params": model.num_params,
        "optimizer": config.optimizer,
        "budget": config.budget,
        "seed": config.seed,
        "shots": config.shots,
        "iterations": len(trace) - 1,
        "final_risk": risk,
        "max_coeff_error": coeff_err,
        "wall_time_s": wall,
        "theta": [float(x) for x in theta],
        **extra,
    })
    print(f"fit {embedding}: final risk {risk:.3e}, max coefficient error {coeff_err:.3e}")
    return EXIT_OK if np.isfinite(risk) else EXIT_NUMERICAL


def cmd_synth(doc: dict, out: Path) -> int:
    import numpy as np

    from .bitfourier import degree, mask_to_string, wht_inverse
    from .embed import PHASE, QRAC
    from .synth import SupportError, ensemble_phase, ensemble_qrac, find_permutation, single_model

    spec = parse_target(doc)
    embedding = parse_embedding(doc)
    try:
        if embedding == "phase":
            e = single_model(spec, PHASE)
        elif embedding == "qrac":
            e = single_model(spec, QRAC)
        elif embedding == "qrac-permuted":
            tau = find_permutation(spec)
            if tau is None:
                raise ConfigError("field 'target': no permutation maps the support into K^QE")
            e = single_model(spec, QRAC, tau)
        elif embedding == "ensemble-phase":
            d = doc.get("d", max(1, degree(spec)))
            if not isinstance(d, int):
                raise ConfigError("field 'd': expected an integer")
            e = ensemble_phase(spec, d)
        else:
            e = ensemble_qrac(spec)
    except SupportError as exc:
        raise ConfigError(f"field 'target': mask {exc.mask} is not reachable with embedding {embedding!r}") from None
    except ValueError as exc:
        raise ConfigError(f"field 'target': {exc}") from None
    got = e.table().values
    want = wht_inverse(spec).values
    err = np.abs(got - want)
    max_err = float(err.max(initial=0.0))
    (out / "ensemble.json").write_text(e.to_json(indent=2) + "\n")
    rows = [(mask_to_string(b, spec.n), _fmt(want[b]), _fmt(got[b]), _fmt(err[b])) for b in range(1 << spec.n)]
    _write_csv(out / "verify.csv", ["mask_binary", "target", "model", "abs_error"], rows)
    _write_json(out / "summary.json", {
        "command": "synth", "embedding": embedding, "n": spec.n,
        "members": len(e), "max_abs_error": max_err, "tolerance": SYNTH_TOL,
        "passed": max_err < SYNTH_TOL,
    })
    print(f"synth {embedding}: {len(e)} member(s), max abs error {max_err:.3e}")
    return EXIT_OK if max_err < SYNTH_TOL else EXIT_NUMERICAL


def cmd_verify(doc: dict, out: Path, suite: str | None = None) -> int:
    from .verify import SUITES, run_suite

    name = suite or doc.get("suite")
    if name not in SUITES:
        raise ConfigError(f"field 'suite': expected one of {sorted(SUITES)}, got {name!r}")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("field 'seed': expected an integer")
    result = run_suite(name, seed)
    _write_json(out / "verify.json", result.to_dict())
    status = "pass" if result.passed else "FAIL"
    print(f"{name}: {status} ({result.checks} checks, max error {result.max_error:.3e})")
    if not result.passed:
        print(json.dumps(result.counterexample, indent=2), file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boolcube-vqml", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("fit", "train a variational model on a target function"),
        ("synth", "construct an exact observable or ensemble for a target spectrum"),
        ("verify", "run a property suite"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=name != "verify", help="JSON config (schema 1)")
        p.add_argument("--out", required=True, help="output directory")
        if name == "verify":
            p.add_argument("--suite", help="suite name; overrides the config's 'suite'")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        apply_thread_cap()
        doc = load_config(args.config) if args.config else {"schema": SCHEMA_VERSION}
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "fit":
            return cmd_fit(doc, out)
        if args.command == "synth":
            return cmd_synth(doc, out)
        return cmd_verify(doc, out, args.suite)
    except ConfigError as exc:
        print(f"boolcube-vqml: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, FloatingPointError, RuntimeError) as exc:
        print(f"boolcube-vqml: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
