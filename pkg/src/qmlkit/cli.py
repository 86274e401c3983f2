"""Command-line harness: one subcommand per experiment.

Every run resolves its configuration (defaults, then ``--config`` file, then
flags), writes ``<name>.csv``, ``<name>.json`` and ``<name>.config`` into the
output directory, and is fully determined by the seed and configuration.
The output directory defaults to ``$QMLKIT_OUTPUT_DIR`` or ``./results``.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Callable

import numpy as np

from .config import ConfigError, Key, format_config, parse_bool, read_config, resolve
from .data import IdxFormatError
from .io import emit_csv, emit_json, ensure_dir

OUTPUT_ENV = "QMLKIT_OUTPUT_DIR"


def _opt_str(text: str):
    return text or None


def _common() -> dict[str, Key]:
    return {"seed": Key(int, 0, "RNG seed")}


SCHEMAS: dict[str, dict[str, Key]] = {
    "autodiff-demo": {
        "x1": Key(float, 2.0, "first input"),
        "x2": Key(float, 1.0, "second input"),
    },
    "mnist": {
        "images": Key(_opt_str, None, "training images (IDX)"),
        "labels": Key(_opt_str, None, "training labels (IDX)"),
        "test_images": Key(_opt_str, None, "test images (IDX)"),
        "test_labels": Key(_opt_str, None, "test labels (IDX)"),
        "head": Key(str, "both", "softmax, regression or both"),
        "hidden": Key(int, 21, "hidden sigmoid units"),
        "epochs": Key(int, 10, "training epochs"),
        "lr": Key(float, 1e-3, "learning rate"),
        "optimizer": Key(str, "adam", "optimizer kind"),
        "batch_size": Key(int, 64, "mini-batch size"),
        "limit": Key(int, 0, "use only the first N training images (0 = all)"),
    },
    "ising-tc": {
        "L": Key(int, 30, "lattice side"),
        "samples_per_t": Key(int, 200, "snapshots per temperature"),
        "chains": Key(int, 10, "independent chains per temperature"),
        "equilibration": Key(int, 1000, "equilibration sweeps"),
        "decorrelation": Key(int, 10, "sweeps between snapshots"),
        "t_step": Key(float, 0.05, "test-grid spacing"),
        "init": Key(str, "cold", "cold or hot start"),
        "epochs": Key(int, 2, "classifier epochs"),
        "lr": Key(float, 1e-3, "classifier learning rate"),
        "export_snapshots": Key(parse_bool, False, "also write the snapshot CSV"),
    },
    "vqe": {
        "L": Key(int, 4, "chain length"),
        "delta": Key(float, 0.0, "ZZ anisotropy"),
        "layers": Key(int, 3, "ansatz layers"),
        "epochs": Key(int, 500, "Adam epochs"),
        "lr": Key(float, 0.05, "Adam learning rate"),
    },
    "qaoa": {
        "nodes": Key(int, 6, "graph size"),
        "edge_prob": Key(float, 0.6, "edge probability of the random graph"),
        "p": Key(int, 2, "QAOA depth"),
        "restarts": Key(int, 5, "random restarts"),
        "epochs": Key(int, 200, "Adam epochs per restart"),
        "lr": Key(float, 0.05, "Adam learning rate"),
        "shots": Key(int, 10000, "samples per restart"),
    },
    "nqs": {
        "model": Key(str, "xxz", "xxz or tfim"),
        "L": Key(int, 4, "chain length"),
        "delta": Key(float, 0.0, "XXZ anisotropy"),
        "field": Key(float, 1.0, "TFIM field"),
        "epochs": Key(int, 1000, "training epochs"),
        "samples": Key(int, 1024, "samples per epoch"),
        "chains": Key(int, 64, "parallel Markov chains"),
        "kernel": Key(str, "mixed", "proposal kernel: flip, pair or mixed"),
        "lr": Key(float, 0.01, "Adam learning rate"),
    },
    "rbm": {
        "bits": Key(int, 8, "visible bits"),
        "hidden": Key(int, 16, "hidden units"),
        "k": Key(int, 1, "Gibbs steps per update"),
        "lr": Key(float, 0.05, "learning rate"),
        "updates": Key(int, 10000, "CD updates"),
        "batch_size": Key(int, 64, "batch size"),
        "log_every": Key(int, 100, "KL logging interval"),
        "use_probabilities": Key(parse_bool, False, "hidden probabilities instead of samples"),
    },
}
for _schema in SCHEMAS.values():
    _schema.update(_common())


class Run:
    def __init__(self, name: str, cfg: dict[str, Any], out_dir: str):
        self.name = name
        self.cfg = cfg
        self.out_dir = out_dir
        self.rng = np.random.default_rng(cfg["seed"])

    def path(self, suffix: str) -> str:
        return os.path.join(self.out_dir, f"{self.name}{suffix}")

    def csv(self, rows, header, suffix: str = ".csv"):
        emit_csv(rows, header, self.path(suffix))

    def json(self, obj):
        emit_json(obj, self.path(".json"))


def cmd_autodiff_demo(run: Run) -> dict:
    from .autodiff import Tape, adjoints, check_grad, evaluate, forward_grad, primals, reverse_grad

    tape = Tape()
    x1, x2 = tape.inputs(2)
    tape.output = x1.ln() + x2.cos() - x1 * x2
    x = [run.cfg["x1"], run.cfg["x2"]]
    f = evaluate(tape, x)
    grad = reverse_grad(tape, x)
    fwd = [forward_grad(tape, x, k) for k in range(2)]
    vals, adj = primals(tape, x), adjoints(tape, x)
    run.csv([(n.id, n.op, v, a) for n, v, a in zip(tape.nodes, vals, adj)], ["node", "op", "value", "adjoint"])
    print(f"f({x[0]:g},{x[1]:g}) = {f:.3f}")
    print(f"gradient (reverse) = ({grad[0]:.3f}, {grad[1]:.3f})")
    print(f"gradient (forward) = ({fwd[0]:.3f}, {fwd[1]:.3f})")
    return {"f": f, "grad_reverse": grad, "grad_forward": fwd, "check_grad": check_grad(tape, x)}


def cmd_mnist(run: Run) -> dict:
    from .mnist import HEADS, load_mnist, train_mnist

    cfg = run.cfg
    paths = [cfg["images"], cfg["labels"], cfg["test_images"], cfg["test_labels"]]
    if any(p is None for p in paths):
        raise ConfigError("mnist needs --images, --labels, --test-images and --test-labels")
    for p in paths:
        if not os.path.exists(p):
            raise FileNotFoundError(f"IDX file not found: {p}")
    train = load_mnist(paths[0], paths[1], cfg["limit"] or None)
    test = load_mnist(paths[2], paths[3])
    heads = HEADS if cfg["head"] == "both" else (cfg["head"],)
    rows, summary = [], {}
    for head in heads:
        res = train_mnist(train, test, head, cfg["hidden"], cfg["epochs"], cfg["lr"], cfg["batch_size"],
                          cfg["optimizer"], np.random.default_rng(run.rng.integers(2**63)))
        rows += [(head, e, l, a) for e, (l, a) in enumerate(zip(res.loss, res.test_accuracy))]
        summary[head] = {"test_accuracy": res.accuracy, "fraction_correct": res.fraction_correct,
                         "confusion": res.confusion}
        print(f"{head}: test accuracy {res.accuracy:.4f} (fraction correct {res.fraction_correct:.4f})")
    run.csv(rows, ["head", "epoch", "train_loss", "test_accuracy"])
    return summary


def cmd_ising_tc(run: Run) -> dict:
    from .ising import T_C, PhaseClassifier, confidence_curve, estimate_tc, generate_dataset, group_by_temperature
    from .ising import write_snapshots_csv

    cfg, rng = run.cfg, run.rng
    train_t = list(np.linspace(1.0, 1.45, 4)) + list(np.linspace(3.05, 3.5, 4))
    test_t = np.round(np.arange(1.6, 3.0 - 1e-9, cfg["t_step"]), 6)
    common = dict(equilibration=cfg["equilibration"], decorrelation=cfg["decorrelation"], init=cfg["init"],
                  chains=cfg["chains"])
    train = generate_dataset(cfg["L"], train_t, cfg["samples_per_t"], rng=rng, **common)
    test = generate_dataset(cfg["L"], test_t, cfg["samples_per_t"], rng=rng, **common)
    clf = PhaseClassifier(cfg["L"], rng)
    history = clf.fit(train, epochs=cfg["epochs"], lr=cfg["lr"], rng=rng)
    groups = group_by_temperature(test)
    curve = confidence_curve(clf, groups)
    tc = estimate_tc(clf, groups)
    run.csv(sorted(curve.items()), ["T", "mean_confidence"])
    if cfg["export_snapshots"]:
        write_snapshots_csv(train + test, run.path("_snapshots.csv"))
    print(f"estimated T_c = {tc:.3f} (exact {T_C:.4f})")
    return {"tc_estimate": tc, "tc_exact": T_C, "train_loss": history}


def cmd_vqe(run: Run) -> dict:
    from .variational import run_vqe

    cfg = run.cfg
    res = run_vqe(cfg["L"], cfg["delta"], cfg["layers"], cfg["epochs"], cfg["lr"], run.rng)
    run.csv(res.trace.rows(), ["epoch", "energy", "entropy"])
    print(f"E = {res.energy:.6f}, E_ED = {res.exact:.6f}, gap = {res.gap:.2e}")
    return {"theta": res.theta, "energy": res.energy, "energy_ed": res.exact, "gap": res.gap,
            "entropy": res.entropy, "entropy_ed": res.exact_entropy}


def cmd_qaoa(run: Run) -> dict:
    from .optim import Adam
    from .variational import MaxCutGraph, brute_force_maxcut, cut_value, solve_maxcut

    cfg, rng = run.cfg, run.rng
    graph = MaxCutGraph.random(cfg["nodes"], rng, cfg["edge_prob"])
    res = solve_maxcut(graph, cfg["p"], cfg["restarts"], lambda: Adam(lr=cfg["lr"]), cfg["epochs"],
                       cfg["shots"], rng)
    best, optimal = brute_force_maxcut(graph)
    rows = [(b, c, cut_value(graph, b)) for b, c in sorted(res.histogram.items())]
    run.csv(rows, ["bitstring", "count", "cut"])
    print(f"peak {res.bitstring}: cut {res.cut:.6f}, optimum {best:.6f}")
    return {"weights": graph.weights, "peak": res.bitstring, "cut": res.cut, "optimum": best,
            "optimal_bitstrings": optimal, "solved": abs(res.cut - best) < 1e-9}


def cmd_nqs(run: Run) -> dict:
    from .nqs import WavefunctionModel, exact_energy, train_nqs
    from .optim import Adam
    from .quantum import exact_diagonalize
    from .quantum import tfim_chain
    from .variational import build_xxz

    cfg = run.cfg
    if cfg["model"] == "xxz":
        h = build_xxz(cfg["L"], cfg["delta"])
    elif cfg["model"] == "tfim":
        h = tfim_chain(cfg["L"], cfg["field"])
    else:
        raise ConfigError("model must be xxz or tfim")
    e0 = float(exact_diagonalize(h)[0][0])
    model = WavefunctionModel(cfg["L"], rng=run.rng)
    trace = train_nqs(model, h, Adam(lr=cfg["lr"]), cfg["epochs"], cfg["samples"], run.rng, cfg["chains"],
                      cfg["kernel"])
    run.csv(trace.rows(), ["epoch", "energy", "stderr", "eloc_variance", "acceptance"])
    e = exact_energy(model, h)
    print(f"E(model) = {e:.6f}, E_ED = {e0:.6f}, relative error {abs(e - e0) / abs(e0):.2e}")
    return {"energy_model": e, "energy_ed": e0, "relative_error": abs(e - e0) / abs(e0)}


def cmd_rbm(run: Run) -> dict:
    from .rbm import train_rbm

    cfg = run.cfg
    params, trace = train_rbm(n_bits=cfg["bits"], n_hidden=cfg["hidden"], k=cfg["k"], lr=cfg["lr"],
                              updates=cfg["updates"], batch_size=cfg["batch_size"], rng=run.rng,
                              log_every=cfg["log_every"], use_probabilities=cfg["use_probabilities"])
    run.csv(trace.rows(), ["step", "kl"])
    print(f"final KL = {trace.kl[-1]:.4f}")
    return {"kl": trace.kl[-1], "a": params.a, "b": params.b, "W": params.W}


COMMANDS: dict[str, Callable[[Run], dict]] = {
    "autodiff-demo": cmd_autodiff_demo,
    "mnist": cmd_mnist,
    "ising-tc": cmd_ising_tc,
    "vqe": cmd_vqe,
    "qaoa": cmd_qaoa,
    "nqs": cmd_nqs,
    "rbm": cmd_rbm,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmlkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="flat 'key = value' config file")
        p.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./results)")
        for key, spec in schema.items():
            # None means "not given" so config-file values are not clobbered
            p.add_argument("--" + key.replace("_", "-"), dest=key, type=spec.type, default=None, help=spec.help)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    name = args.command
    schema = SCHEMAS[name]
    try:
        file_values = read_config(args.config) if args.config else {}
        cfg = resolve(schema, file_values, {k: getattr(args, k) for k in schema})
        out_dir = ensure_dir(args.out or os.environ.get(OUTPUT_ENV) or "results")
        r = Run(name, cfg, out_dir)
        with open(r.path(".config"), "w") as fh:
            fh.write(format_config(cfg, name))
        summary = COMMANDS[name](r)
        r.json({"experiment": name, "config": cfg, **summary})
    except (FileNotFoundError, IdxFormatError, ConfigError) as exc:
        print(f"qmlkit {name}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
