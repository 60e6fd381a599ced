"""Command-line driver: ``enhg <command> [options]``.

Commands
--------
cluster      build a graph and run spectral clustering
classify     build a graph and propagate a stratified label draw
sweep        repeat cluster/classify over a parameter grid
solve        robust matrix elastic net only (Z, S, X0)
build        hypergraph only (JSON plus H / Theta / L as CSV)
eval         score a prediction file against a truth file
export-path  LARS-EN path of one sample against all others

Exit status is 0 on success, 2 for invalid configuration and 1 when the
pipeline itself fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import gaussian_graph, knn_hypergraph
from .datio import (
    CORRUPTION_MODES,
    LabelVector,
    check_sample_matrix,
    corrupt,
    load_idx,
    load_matrix_csv,
    normalize_columns,
    synth_blobs,
    synth_subspaces,
    write_matrix_csv,
)
from .elasticnet import lars_en_path, model_to_solver_weights, robust_matrix_elastic_net
from .hypergraph import ThresholdRule, hypergraph_from_coefficients, laplacian, theta_matrix
from .learn import label_matrix, predict_labels, propagate_labels, spectral_clustering
from .metrics import classification_accuracy, clustering_accuracy, nmi

SCHEMA = 1

# Desk-scale solver weights used when neither (lambda, gamma) nor (l1, l2) is given.
# The model's own (0.01, 0.18) maps to l1 = 1/0.18, which zeroes every coefficient
# of unit-norm data; these were picked on validation seeds 100-109 of the blobs task.
DEFAULT_L1 = 0.3
DEFAULT_L2 = 20.0

# sweep ranges used when --grid is omitted
DEFAULT_GRIDS = {
    "lambda": "0,0.001,0.01,0.1,1,10,100,1000",
    "gamma": "0.02:10:log",
}

DEFAULTS = {
    "csv": None,
    "csv_header": False,
    "labels_csv": None,
    "idx": None,
    "idx_labels": None,
    "synth": None,
    "corrupt": None,
    "normalize": True,
    "renormalize": True,
    "lambda_": None,
    "gamma": None,
    "l1": None,
    "l2": None,
    "threshold_rule": "mean_all",
    "baseline": "enhg",
    "k": None,
    "alpha": 0.99,
    "label_fraction": 0.1,
    "label_seed": None,
    "seed": 0,
    "restarts": 20,
    "out": "enhg_out",
    "ledger": None,
    "param": None,
    "grid": None,
    "task": "cluster",
    "column": 0,
    "pred": None,
    "truth": None,
    "nmi_average": "geometric",
}


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending option."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


# --------------------------------------------------------------------------
# argument parsing

def _input_options(p):
    g = p.add_argument_group("input (exactly one source)")
    g.add_argument("--csv", help="CSV matrix, one row per feature, one column per sample")
    g.add_argument("--csv-header", action="store_true", default=None,
                   help="skip the first CSV row")
    g.add_argument("--labels-csv", help="CSV with one integer label per sample")
    g.add_argument("--idx", help="IDX image file")
    g.add_argument("--idx-labels", help="IDX label file")
    g.add_argument("--synth", help="blobs:k=3,d=20,n_per=30,sep=10,noise=1 or "
                                   "subspaces:k=3,d=20,sub_dim=3,n_per=30,noise=0")
    g.add_argument("--corrupt", help="MODE:FRACTION:MAGNITUDE applied to the normalized data, "
                                     "which is then normalized again; "
                                     f"MODE in {', '.join(CORRUPTION_MODES)}")
    g.add_argument("--no-normalize", dest="normalize", action="store_false", default=None)
    g.add_argument("--no-renormalize", dest="renormalize", action="store_false", default=None,
                   help="keep the corrupted columns at their corrupted norms")


def _graph_options(p):
    g = p.add_argument_group("graph construction")
    g.add_argument("--lambda", dest="lambda_", type=float, help="ridge weight of the model")
    g.add_argument("--gamma", type=float, help="residual weight of the model")
    g.add_argument("--l1", type=float, help="solver l1 weight (overrides lambda/gamma)")
    g.add_argument("--l2", type=float, help="solver l2 weight (overrides lambda/gamma)")
    g.add_argument("--threshold-rule", help="mean_all | mean_nonzero | fixed:<value>")
    g.add_argument("--baseline", help="enhg (default) | gauss | knn<K>, e.g. knn8")


def _common(p):
    p.add_argument("--config", help="JSON file of option values; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--ledger", help="CSV file that metric rows are appended to")


def build_parser():
    parser = argparse.ArgumentParser(prog="enhg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="spectral clustering")
    _common(p), _input_options(p), _graph_options(p)
    p.add_argument("--k", type=int, help="number of clusters (default: number of classes)")
    p.add_argument("--restarts", type=int)

    p = sub.add_parser("classify", help="semi-supervised label propagation")
    _common(p), _input_options(p), _graph_options(p)
    p.add_argument("--label-fraction", type=float)
    p.add_argument("--label-seed", type=int, help="seed of the label draw (default: --seed)")
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("sweep", help="parameter sweep")
    _common(p), _input_options(p), _graph_options(p)
    p.add_argument("--param", help="lambda | gamma | l1 | l2")
    p.add_argument("--grid", help="START:STOP[:NUM]:log|lin or a comma list "
                                  "(lambda and gamma have default ranges)")
    p.add_argument("--task", help="cluster | classify")
    p.add_argument("--k", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--label-fraction", type=float)
    p.add_argument("--label-seed", type=int)
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("solve", help="robust matrix elastic net")
    _common(p), _input_options(p), _graph_options(p)

    p = sub.add_parser("build", help="hypergraph construction")
    _common(p), _input_options(p), _graph_options(p)

    p = sub.add_parser("eval", help="score predictions")
    _common(p)
    p.add_argument("--pred", help="CSV of predicted labels (one per row, last column used)")
    p.add_argument("--truth", help="CSV of true labels")
    p.add_argument("--nmi-average", help="geometric | arithmetic")

    p = sub.add_parser("export-path", help="LARS-EN path of one sample")
    _common(p), _input_options(p), _graph_options(p)
    p.add_argument("--column", type=int, help="sample whose path is traced")
    return parser


def resolve_config(args) -> dict:
    """Merge defaults, the JSON config file and explicit flags (in that order)."""
    cfg = dict(DEFAULTS)
    explicit = {k: v for k, v in vars(args).items() if v is not None}
    path = explicit.pop("config", None)
    if path:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top level must be a JSON object")
        for key, value in loaded.items():
            norm = key.replace("-", "_")
            norm = "lambda_" if norm == "lambda" else norm
            if norm not in cfg:
                raise ConfigError(key, "unknown configuration key")
            cfg[norm] = value
    cfg.update(explicit)
    _validate(cfg)
    return cfg


def _validate(cfg):
    cmd = cfg["command"]
    if cmd != "eval":
        sources = [k for k in ("csv", "idx", "synth") if cfg[k]]
        if len(sources) != 1:
            raise ConfigError("input", "give exactly one of --csv, --idx, --synth")
    if cfg["lambda_"] is not None and cfg["lambda_"] < 0:
        raise ConfigError("lambda", "must be >= 0")
    if cfg["gamma"] is not None and not cfg["gamma"] > 0:
        raise ConfigError("gamma", "must be > 0")
    if (cfg["l1"] is None) != (cfg["l2"] is None):
        raise ConfigError("l1", "--l1 and --l2 must be given together")
    if cfg["l1"] is not None and (not cfg["l1"] > 0 or cfg["l2"] < 0):
        raise ConfigError("l1", "need l1 > 0 and l2 >= 0")
    if not 0 < cfg["alpha"] < 1:
        raise ConfigError("alpha", "must be in (0, 1)")
    if not 0 < cfg["label_fraction"] <= 1:
        raise ConfigError("label_fraction", "must be in (0, 1]")
    if cfg["restarts"] < 1:
        raise ConfigError("restarts", "must be >= 1")
    if cfg["k"] is not None and cfg["k"] < 2:
        raise ConfigError("k", "must be >= 2")
    if cfg["task"] not in ("cluster", "classify"):
        raise ConfigError("task", "must be cluster or classify")
    try:
        ThresholdRule.parse(cfg["threshold_rule"])
    except ValueError as exc:
        raise ConfigError("threshold_rule", str(exc)) from None
    _parse_baseline(cfg["baseline"])
    if cfg["corrupt"]:
        _parse_corrupt(cfg["corrupt"])
    if cmd == "sweep":
        if cfg["param"] not in ("lambda", "gamma", "l1", "l2"):
            raise ConfigError("param", "must be lambda, gamma, l1 or l2")
        if not cfg["grid"]:
            if cfg["param"] not in DEFAULT_GRIDS:
                raise ConfigError("grid", f"required when sweeping {cfg['param']}")
            cfg["grid"] = DEFAULT_GRIDS[cfg["param"]]
        parse_grid(cfg["grid"])
    if cmd == "eval" and not (cfg["pred"] and cfg["truth"]):
        raise ConfigError("pred", "eval needs --pred and --truth")
    if cfg["nmi_average"] not in ("geometric", "arithmetic"):
        raise ConfigError("nmi_average", "must be geometric or arithmetic")


def _parse_baseline(text):
    if text in ("enhg", "gauss"):
        return text, None
    if text.startswith("knn"):
        try:
            K = int(text[3:] or 8)
        except ValueError:
            raise ConfigError("baseline", f"bad neighbour count in {text!r}") from None
        if K < 1:
            raise ConfigError("baseline", "K must be >= 1")
        return "knn", K
    raise ConfigError("baseline", f"unknown baseline {text!r}; use enhg, gauss or knn<K>")


def _parse_corrupt(text):
    parts = text.split(":")
    if len(parts) != 3 or parts[0] not in CORRUPTION_MODES:
        raise ConfigError("corrupt", "use MODE:FRACTION:MAGNITUDE")
    try:
        fraction, magnitude = float(parts[1]), float(parts[2])
    except ValueError:
        raise ConfigError("corrupt", "fraction and magnitude must be numbers") from None
    if not 0 <= fraction <= 1 or magnitude < 0:
        raise ConfigError("corrupt", "need fraction in [0, 1] and magnitude >= 0")
    return parts[0], fraction, magnitude


def parse_grid(text):
    """``START:STOP[:NUM]:log|lin`` (NUM defaults to 10) or ``a,b,c``."""
    try:
        if "," in text or ":" not in text:
            values = [float(v) for v in text.split(",")]
        else:
            parts = text.split(":")
            scale = parts[-1]
            if scale not in ("log", "lin") or len(parts) not in (3, 4):
                raise ValueError
            start, stop = float(parts[0]), float(parts[1])
            num = int(parts[2]) if len(parts) == 4 else 10
            if num < 1 or (scale == "log" and not (start > 0 and stop > 0)):
                raise ValueError
            space = np.geomspace if scale == "log" else np.linspace
            values = space(start, stop, num).tolist()
    except ValueError:
        raise ConfigError("grid", f"cannot parse {text!r}; use START:STOP[:NUM]:log|lin") from None
    return values


def _parse_synth(text, seed):
    kind, _, rest = text.partition(":")
    opts = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError("synth", f"bad option {item!r}; use key=value")
        opts[key.strip()] = float(value)
    try:
        if kind == "blobs":
            params = {"k": 3, "d": 20, "n_per": 30, "sep": 10.0, "noise": 1.0, **opts}
            X, labels = synth_blobs(int(params["k"]), int(params["d"]), int(params["n_per"]),
                                    params["sep"], params["noise"], seed)
        elif kind == "subspaces":
            params = {"k": 3, "d": 20, "sub_dim": 3, "n_per": 30, "noise": 0.0, **opts}
            X, labels = synth_subspaces(int(params["k"]), int(params["d"]), int(params["sub_dim"]),
                                        int(params["n_per"]), params["noise"], seed)
        else:
            raise ConfigError("synth", f"unknown generator {kind!r}; use blobs or subspaces")
    except TypeError as exc:
        raise ConfigError("synth", str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("synth", str(exc)) from None
    return X, labels


# --------------------------------------------------------------------------
# pipeline pieces

def _read_label_csv(path):
    rows = load_matrix_csv(path)
    values = rows[:, -1] if rows.shape[1] > 1 else rows[:, 0]
    if rows.shape[0] == 1 and rows.shape[1] > 1:
        values = rows[0]
    if np.any(values != np.round(values)):
        raise ConfigError("labels", f"{path}: labels must be integers")
    return LabelVector.known(values.astype(np.int64))


def load_input(cfg):
    labels = None
    if cfg["csv"]:
        X = load_matrix_csv(cfg["csv"], bool(cfg["csv_header"]))
        if cfg["labels_csv"]:
            labels = _read_label_csv(cfg["labels_csv"])
    elif cfg["idx"]:
        X, labels = load_idx(cfg["idx"], cfg["idx_labels"])
    else:
        X, labels = _parse_synth(cfg["synth"], cfg["seed"])
    X = check_sample_matrix(X)
    if labels is not None and len(labels) != X.shape[1]:
        raise ConfigError("labels", f"{len(labels)} labels for {X.shape[1]} samples")
    if cfg["normalize"]:
        X = normalize_columns(X)
    if cfg["corrupt"]:
        mode, fraction, magnitude = _parse_corrupt(cfg["corrupt"])
        X = corrupt(X, mode, fraction, magnitude, cfg["seed"])
        if cfg["normalize"] and cfg["renormalize"]:
            # every construction expects unit-norm columns
            X = normalize_columns(X)
    return X, labels


def solver_weights(cfg):
    if cfg["l1"] is not None:
        return cfg["l1"], cfg["l2"]
    if cfg["lambda_"] is None and cfg["gamma"] is None:
        return DEFAULT_L1, DEFAULT_L2
    lam = 0.01 if cfg["lambda_"] is None else cfg["lambda_"]
    gamma = 0.18 if cfg["gamma"] is None else cfg["gamma"]
    return model_to_solver_weights(lam, gamma)


def build_graph(X, cfg):
    """Return ``(hypergraph, decomposition or None)`` for the configured construction."""
    kind, K = _parse_baseline(cfg["baseline"])
    if kind == "gauss":
        return gaussian_graph(X), None
    if kind == "knn":
        return knn_hypergraph(X, K), None
    l1, l2 = solver_weights(cfg)
    dec = robust_matrix_elastic_net(X, l1_weight=l1, l2_weight=l2)
    return hypergraph_from_coefficients(dec.Z, cfg["threshold_rule"]), dec


def stratified_mask(labels: LabelVector, fraction, seed) -> np.ndarray:
    """Pick ``max(1, round(fraction * count))`` labeled samples from every class."""
    rng = np.random.default_rng(seed)
    mask = np.zeros(len(labels), dtype=bool)
    for c in np.unique(labels.labels):
        idx = np.flatnonzero(labels.labels == c)
        take = min(idx.size, max(1, int(round(fraction * idx.size))))
        mask[rng.choice(idx, size=take, replace=False)] = True
    return mask


def _metric(name, value, n, seed):
    return {"metric": name, "value": float(value), "n": int(n), "seed": int(seed)}


def _nmi_metrics(pred, truth, cfg):
    """``NMI`` under the configured normalization, plus the other one for reference."""
    chosen = cfg["nmi_average"]
    other = "arithmetic" if chosen == "geometric" else "geometric"
    n = len(truth)
    return [_metric("NMI", nmi(pred, truth, chosen), n, cfg["seed"]),
            _metric(f"NMI_{other}", nmi(pred, truth, other), n, cfg["seed"])]


def run_cluster(X, labels, cfg, G=None):
    if G is None:
        G, _ = build_graph(X, cfg)
    k = cfg["k"]
    if k is None:
        if labels is None:
            raise ConfigError("k", "required when the input has no labels")
        k = labels.n_classes
    result = spectral_clustering(G, k, seed=cfg["seed"], restarts=cfg["restarts"])
    metrics = []
    if labels is not None:
        n = X.shape[1]
        metrics.append(_metric("AC", clustering_accuracy(result.assignments, labels), n, cfg["seed"]))
        metrics.extend(_nmi_metrics(result.assignments, labels, cfg))
    return result, metrics


def run_classify(X, labels, cfg, G=None):
    if labels is None:
        raise ConfigError("labels", "classification needs labeled input")
    if G is None:
        G, _ = build_graph(X, cfg)
    label_seed = cfg["seed"] if cfg["label_seed"] is None else cfg["label_seed"]
    mask = stratified_mask(labels, cfg["label_fraction"], label_seed)
    if mask.all():
        raise ConfigError("label_fraction", "every sample is labeled; nothing to evaluate")
    Y = label_matrix(LabelVector(labels.labels, mask), labels.n_classes)
    pred = predict_labels(propagate_labels(G, Y, cfg["alpha"]))
    acc = classification_accuracy(pred, labels, ~mask)
    metrics = [_metric("accuracy", acc, int((~mask).sum()), label_seed)]
    return pred, mask, metrics


# --------------------------------------------------------------------------
# output

def _params(cfg):
    keep = {k: v for k, v in cfg.items() if k not in ("out", "ledger", "config")}
    if "lambda_" in keep:
        keep["lambda"] = keep.pop("lambda_")
    if cfg["command"] not in ("eval",):
        keep["solver_l1"], keep["solver_l2"] = solver_weights(cfg)
    return keep


def _write_results(out, cfg, metrics, extra=None, started=None):
    doc = {
        "schema": SCHEMA,
        "command": cfg["command"],
        "params": _params(cfg),
        "seed": cfg["seed"],
        "metrics": metrics,
    }
    if extra:
        doc.update(extra)
    doc["wall_time"] = round(time.perf_counter() - started, 6) if started else 0.0
    (out / "results.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n",
                                      encoding="utf-8")
    if cfg["ledger"]:
        path = Path(cfg["ledger"])
        fresh = not path.exists()
        with path.open("a", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if fresh:
                writer.writerow(["command", "metric", "value", "n", "seed", "params"])
            for m in metrics:
                writer.writerow([cfg["command"], m["metric"], repr(m["value"]), m["n"], m["seed"],
                                 json.dumps(_params(cfg), sort_keys=True)])


def _write_graph_files(out, G, dec):
    (out / "hypergraph.json").write_text(G.dumps() + "\n", encoding="utf-8")
    if dec is not None:
        write_matrix_csv(out / "Z.csv", dec.Z)
        write_matrix_csv(out / "S.csv", dec.S)


def _write_labels(path, header, columns):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([int(v) for v in row])


# --------------------------------------------------------------------------
# commands

def cmd_cluster(cfg, out, started):
    X, labels = load_input(cfg)
    G, dec = build_graph(X, cfg)
    result, metrics = run_cluster(X, labels, cfg, G)
    _write_graph_files(out, G, dec)
    n = X.shape[1]
    truth = labels.labels if labels is not None else np.full(n, -1)
    _write_labels(out / "assignments.csv", ["index", "cluster", "truth"],
                  [np.arange(n), result.assignments, truth])
    _write_results(out, cfg, metrics, {"inertia": result.inertia}, started)


def cmd_classify(cfg, out, started):
    X, labels = load_input(cfg)
    if labels is None:
        raise ConfigError("labels", "classification needs labeled input")
    G, dec = build_graph(X, cfg)
    pred, mask, metrics = run_classify(X, labels, cfg, G)
    _write_graph_files(out, G, dec)
    n = X.shape[1]
    _write_labels(out / "predictions.csv", ["index", "labeled", "truth", "prediction"],
                  [np.arange(n), mask, labels.labels, pred.labels])
    _write_results(out, cfg, metrics, None, started)


def cmd_sweep(cfg, out, started):
    X, labels = load_input(cfg)
    values = parse_grid(cfg["grid"])
    param = cfg["param"]
    key = {"lambda": "lambda_"}.get(param, param)
    rows, all_metrics = [], []
    for value in values:
        point = dict(cfg)
        point[key] = value
        if param in ("l1", "l2"):
            point["l1"] = point["l1"] if point["l1"] is not None else DEFAULT_L1
            point["l2"] = point["l2"] if point["l2"] is not None else DEFAULT_L2
        elif point["lambda_"] is None or point["gamma"] is None:
            point["lambda_"] = 0.01 if point["lambda_"] is None else point["lambda_"]
            point["gamma"] = 0.18 if point["gamma"] is None else point["gamma"]
        row = {"param": param, "value": value, "status": "ok"}
        try:
            l1, l2 = solver_weights(point)
            row["solver_l1"], row["solver_l2"] = l1, l2
            if cfg["task"] == "cluster":
                _, metrics = run_cluster(X, labels, point)
            else:
                _, _, metrics = run_classify(X, labels, point)
        except ConfigError:
            raise
        except ValueError as exc:
            # e.g. no usable hypergraph at this grid point
            row["status"] = f"error: {exc}"
            metrics = []
        for m in metrics:
            row[m["metric"]] = m["value"]
            all_metrics.append({**m, "param": param, "param_value": value})
        rows.append(row)
    names = sorted({k for r in rows for k in r} - {"param", "value", "status", "solver_l1",
                                                    "solver_l2"})
    header = ["param", "value", "solver_l1", "solver_l2", *names, "status"]
    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([repr(r[h]) if isinstance(r.get(h), float) else r.get(h, "")
                             for h in header])
    _write_results(out, cfg, all_metrics, {"rows": rows}, started)


def cmd_solve(cfg, out, started):
    X, _ = load_input(cfg)
    l1, l2 = solver_weights(cfg)
    dec = robust_matrix_elastic_net(X, l1_weight=l1, l2_weight=l2)
    write_matrix_csv(out / "Z.csv", dec.Z)
    write_matrix_csv(out / "Zabs.csv", np.abs(dec.Z))
    write_matrix_csv(out / "S.csv", dec.S)
    write_matrix_csv(out / "X0.csv", dec.clean)
    norms = np.linalg.norm(dec.S, axis=0)
    extra = {"error_l21": float(norms.sum()), "nonzeros": int(np.count_nonzero(dec.Z))}
    _write_results(out, cfg, [], extra, started)


def cmd_build(cfg, out, started):
    X, _ = load_input(cfg)
    G, dec = build_graph(X, cfg)
    _write_graph_files(out, G, dec)
    write_matrix_csv(out / "H.csv", G.H)
    write_matrix_csv(out / "theta.csv", theta_matrix(G))
    write_matrix_csv(out / "L.csv", laplacian(G))
    sizes = G.edge_degrees[G.kept]
    extra = {"kept_edges": int(G.kept.sum()), "dropped_edges": int((~G.kept).sum()),
             "mean_edge_size": float(sizes.mean()), "edge_size_var": float(sizes.var())}
    _write_results(out, cfg, [], extra, started)


def cmd_eval(cfg, out, started):
    pred = _read_label_csv(cfg["pred"])
    truth = _read_label_csv(cfg["truth"])
    n = len(truth)
    metrics = [_metric("AC", clustering_accuracy(pred, truth), n, cfg["seed"]),
               *_nmi_metrics(pred, truth, cfg)]
    _write_results(out, cfg, metrics, None, started)


def cmd_export_path(cfg, out, started):
    X, _ = load_input(cfg)
    i = cfg["column"]
    n = X.shape[1]
    if not 0 <= i < n:
        raise ConfigError("column", f"must be in [0, {n - 1}]")
    l1, l2 = solver_weights(cfg)
    others = np.r_[0:i, i + 1:n]
    path = lars_en_path(X[:, others], X[:, i], l2, l1_weight=l1)
    fractions = path.path_fraction
    with (out / "path.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["knot_index", "s", "atom_index", "coefficient"])
        for knot_index, (knot, s) in enumerate(zip(path.knots, fractions)):
            for atom, coef in enumerate(knot.coef):
                writer.writerow([knot_index, repr(float(s)), int(others[atom]), repr(float(coef))])
    extra = {"knots": len(path.knots), "annotations": path.annotations}
    _write_results(out, cfg, [], extra, started)


COMMANDS = {
    "cluster": cmd_cluster,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "solve": cmd_solve,
    "build": cmd_build,
    "eval": cmd_eval,
    "export-path": cmd_export_path,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"enhg: invalid configuration: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg["out"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[cfg["command"]](cfg, out, started)
    except ConfigError as exc:
        print(f"enhg: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"enhg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
