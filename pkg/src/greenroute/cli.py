"""Command line pipeline: synth -> label -> cv/train -> evaluate.

Every stage reads and writes plain files under ``--out`` so stages can be
re-run on their own. Settings come from defaults, then an optional
``--config`` file (INI, section ``[pipeline]``, keys named like the long
flags with dashes or underscores), then explicit flags.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import statistics
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import bundled_topology
from .eeroute import Router, UtilityInterval
from .learn import (
    CvReport,
    cross_validate_k,
    load_model,
    pca_fit,
    pca_project,
    prediction_accuracy,
    regress_fit,
    regress_predict,
    save_model,
)
from .learn.regression import TARGETS
from .netmodel import Topology, load_topology
from .traffic import (
    TrafficError,
    load_snapshot_dir,
    save_snapshot,
    scale_snapshot,
    synth_snapshots,
    to_feature_vector,
)
from .tune import EeEvaluator, brute_force_optimal, label_snapshots, refine

log = logging.getLogger("greenroute")

FLOAT = "{:.4f}"


class PipelineError(RuntimeError):
    pass


def _load_topology(source: str) -> Topology:
    """A topology file path, or ``builtin:<name>`` for a bundled network."""
    if source.startswith("builtin:"):
        try:
            return bundled_topology(source.split(":", 1)[1])
        except FileNotFoundError:
            raise PipelineError(f"no bundled topology {source!r}") from None
    return load_topology(source)


@dataclass
class PipelineConfig:
    topology: str | None = None
    snapshots: str | None = None
    volumes: list[float] = field(default_factory=lambda: [float(v) for v in range(10, 100, 10)])
    k: str = "auto"
    folds: int = 10
    alpha: float = 1.0
    beta: float = 0.0
    epsilon: float = 3.0
    paths_k: int = 4
    seed: int = 0
    out: str = "out"
    label_step: float = 5.0
    count: int = 100
    latent_dim: int = 3
    mean_rate: float | None = None
    jobs: int = 1

    def validate(self, need_snapshots: bool = True) -> "PipelineConfig":
        builtin = bool(self.topology) and self.topology.startswith("builtin:")
        if not builtin and (not self.topology or not Path(self.topology).is_file()):
            raise PipelineError(f"topology file not found: {self.topology}")
        if need_snapshots and (not self.snapshots or not Path(self.snapshots).is_dir()):
            raise PipelineError(f"snapshot directory not found: {self.snapshots}")
        if not self.volumes:
            raise PipelineError("volume grid is empty")
        for v in self.volumes:
            if not 0 < v <= 100:
                raise PipelineError(f"volume {v} outside (0, 100]")
        if self.k != "auto":
            try:
                if int(self.k) < 1:
                    raise ValueError
            except ValueError:
                raise PipelineError(f"--k must be 'auto' or a positive integer, got {self.k!r}") from None
        return self

    @property
    def out_dir(self) -> Path:
        p = Path(self.out)
        p.mkdir(parents=True, exist_ok=True)
        return p


def _parse_volumes(text: str) -> list[float]:
    return [float(v) for v in str(text).replace(" ", "").split(",") if v]


_CONVERT = {
    "volumes": _parse_volumes,
    "folds": int, "paths_k": int, "seed": int, "count": int, "latent_dim": int, "jobs": int,
    "alpha": float, "beta": float, "epsilon": float, "label_step": float, "mean_rate": float,
    "k": str, "topology": str, "snapshots": str, "out": str,
}


def load_config(path: str | Path | None, overrides: dict) -> PipelineConfig:
    cfg = PipelineConfig()
    values: dict = {}
    if path:
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise PipelineError(f"cannot read config file {path}")
        section = parser["pipeline"] if parser.has_section("pipeline") else parser[parser.default_section]
        for key, raw in section.items():
            name = key.replace("-", "_")
            if name not in _CONVERT:
                raise PipelineError(f"unknown config key {key!r}")
            values[name] = raw
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(PipelineConfig)}
    for name, raw in values.items():
        if name in known:
            setattr(cfg, name, _CONVERT[name](raw) if isinstance(raw, str) else raw)
    return cfg


def _f(x: float) -> str:
    return FLOAT.format(x)


def _write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_f(v) if isinstance(v, float) else v for v in r])
    return path


def _volume_snapshots(snapshots, volumes):
    for s in snapshots:
        for v in volumes:
            yield v, scale_snapshot(s, v)


def cmd_synth(cfg: PipelineConfig) -> Path:
    """Write seeded synthetic snapshots as native-format files."""
    t = _load_topology(cfg.topology)
    target = Path(cfg.snapshots) if cfg.snapshots else cfg.out_dir / "snapshots"
    target.mkdir(parents=True, exist_ok=True)
    mean_rate = cfg.mean_rate
    if mean_rate is None:
        mean_rate = 0.01 * statistics.median(l.capacity for l in t.links)
    snaps = synth_snapshots(t, cfg.latent_dim, cfg.count, cfg.seed, mean_rate=mean_rate)
    for s in snaps:
        save_snapshot(target / f"{s.timestamp}.txt", s)
    log.info("wrote %d snapshots to %s", len(snaps), target)
    return target


def cmd_label(cfg: PipelineConfig) -> Path:
    """Brute-force labels for every snapshot x volume; writes labels.csv and features.csv."""
    cfg.validate()
    t = _load_topology(cfg.topology)
    snaps = load_snapshot_dir(cfg.snapshots, t)
    scaled = [s for _, s in _volume_snapshots(snaps, cfg.volumes)]
    labels = label_snapshots(t, scaled, cfg.label_step, cfg.paths_k, jobs=cfg.jobs)
    out = cfg.out_dir
    _write_csv(out / "labels.csv", ["timestamp", "umin_opt", "umax_opt", "ee_opt"],
               ([l.timestamp, float(l.umin), float(l.umax), float(l.ee)] for l in labels))
    n = t.n_nodes * (t.n_nodes - 1)
    _write_csv(out / "features.csv", ["timestamp"] + [f"f{i}" for i in range(n)],
               ([l.timestamp] + [float(x) for x in l.features] for l in labels))
    log.info("labelled %d samples", len(labels))
    return out / "labels.csv"


def read_training_data(out: Path):
    """(timestamps, feature matrix, umin labels, umax labels) from a label run."""
    lab_path, feat_path = out / "labels.csv", out / "features.csv"
    if not lab_path.exists() or not feat_path.exists():
        raise PipelineError(f"missing labels.csv/features.csv in {out}; run 'label' first")
    with open(lab_path) as fh:
        labels = list(csv.DictReader(fh))
    with open(feat_path) as fh:
        rows = list(csv.reader(fh))[1:]
    if [r[0] for r in rows] != [l["timestamp"] for l in labels]:
        raise PipelineError("labels.csv and features.csv rows do not line up")
    x = np.array([[float(v) for v in r[1:]] for r in rows])
    umin = np.array([float(l["umin_opt"]) for l in labels])
    umax = np.array([float(l["umax_opt"]) for l in labels])
    return [l["timestamp"] for l in labels], x, umin, umax


def _write_cv(path: Path, report: CvReport) -> None:
    _write_csv(path, ["k", "size_reduction", "accuracy", "variance_retained", "chosen"],
               ([r.k, r.size_reduction, r.accuracy, r.variance_retained, int(r.k == report.chosen_k)]
                for r in report.rows))


def cmd_cv(cfg: PipelineConfig) -> CvReport:
    _, x, umin, umax = read_training_data(cfg.out_dir)
    if x.shape[0] < cfg.folds:
        raise PipelineError(f"{x.shape[0]} samples are not enough for {cfg.folds} folds")
    report = cross_validate_k(x, np.column_stack([umin, umax]), None, cfg.folds, cfg.seed,
                              cfg.epsilon, jobs=cfg.jobs)
    _write_cv(cfg.out_dir / "cv.csv", report)
    log.info("cross-validation picked k=%d of %d", report.chosen_k, x.shape[1])
    return report


def cmd_train(cfg: PipelineConfig):
    """Fit PCA and the four regression models; returns (k, CvReport or None)."""
    _, x, umin, umax = read_training_data(cfg.out_dir)
    if x.shape[0] < 2:
        raise PipelineError("need at least two labelled samples")
    report = None
    if cfg.k == "auto":
        report = cmd_cv(cfg)
        k = report.chosen_k
    else:
        k = int(cfg.k)
        if k > x.shape[1]:
            raise PipelineError(f"k={k} exceeds feature size {x.shape[1]}")
    pca = pca_fit(x, k)
    z = pca_project(pca, x)
    models_dir = cfg.out_dir / "models"
    models_dir.mkdir(exist_ok=True)
    inputs = {
        "umin": (z, umin),
        "umax": (z, umax),
        "umin_given_umax": (np.column_stack([z, umax]), umin),
        "umax_given_umin": (np.column_stack([z, umin]), umax),
    }
    summary = []
    for target in TARGETS:
        zz, y = inputs[target]
        reg = regress_fit(zz, y, target)
        save_model(models_dir / f"{target}.model", pca, reg)
        pred = regress_predict(reg, zz)
        acc = float(np.mean([prediction_accuracy(tv, pv, cfg.epsilon) for tv, pv in zip(y, pred)]))
        summary.append([target, k, acc, int(reg.ridge)])
    _write_csv(cfg.out_dir / "train_summary.csv", ["target", "k", "training_accuracy", "ridge"], summary)
    log.info("trained models with k=%d", k)
    return k, report


def _snap_grid(x: float, alpha: float) -> float:
    return float(min(100.0, max(0.0, round(x / alpha) * alpha)))


REPORT_HEADER = [
    "volume", "timestamp",
    "pred_umin", "pred_umax", "refined_umin", "refined_umax", "oracle_umin", "oracle_umax",
    "acc_umin", "acc_umax", "acc_umin_given_umax", "acc_umax_given_umin", "acc_tv_zero",
    "evaluations", "speedup", "ee_predicted", "ee_refined", "ee_oracle",
    "energy_saving", "avg_path_length",
]


def evaluate_snapshot(t: Topology, router: Router, s, models, cfg: PipelineConfig) -> dict:
    """One report row: predict, refine, compare against the oracle."""
    x = to_feature_vector(s, t)
    pca, _ = models["umin"]
    if x.shape[0] != pca.n_features:
        raise PipelineError(f"model expects {pca.n_features} features, topology gives {x.shape[0]}")
    z = pca_project(pca, x)
    p_umin = regress_predict(models["umin"][1], z)
    p_umax = regress_predict(models["umax"][1], z)

    ee = EeEvaluator.for_snapshot(t, s, router=router)
    oracle = brute_force_optimal(EeEvaluator.for_snapshot(t, s, router=router), cfg.label_step)
    cond_umin = regress_predict(models["umin_given_umax"][1], np.append(z, oracle.umax))
    cond_umax = regress_predict(models["umax_given_umin"][1], np.append(z, oracle.umin))

    start_umax = _snap_grid(p_umax, cfg.alpha)
    start_umin = min(_snap_grid(p_umin, cfg.alpha), start_umax)
    ee_pred = ee(start_umin, start_umax)
    ee.calls = 0
    res = refine(ee, start_umin, start_umax, cfg.alpha, cfg.beta)
    outcome = router.route(s, UtilityInterval(res.umin, res.umax))
    eps = cfg.epsilon
    return {
        "timestamp": s.timestamp,
        "pred_umin": p_umin, "pred_umax": p_umax,
        "refined_umin": res.umin, "refined_umax": res.umax,
        "oracle_umin": oracle.umin, "oracle_umax": oracle.umax,
        "acc_umin": prediction_accuracy(oracle.umin, p_umin, eps),
        "acc_umax": prediction_accuracy(oracle.umax, p_umax, eps),
        "acc_umin_given_umax": prediction_accuracy(oracle.umin, cond_umin, eps),
        "acc_umax_given_umin": prediction_accuracy(oracle.umax, cond_umax, eps),
        # accuracy is only defined for a non-zero true value; 1 marks rows scored by the fallback rule
        "acc_tv_zero": int(oracle.umin == 0 or oracle.umax == 0),
        "evaluations": res.evaluations, "speedup": res.speedup,
        "ee_predicted": ee_pred, "ee_refined": res.ee, "ee_oracle": oracle.ee,
        "energy_saving": outcome.energy_saving, "avg_path_length": outcome.avg_path_length,
    }


def load_models(models_dir: Path) -> dict:
    models = {}
    for target in TARGETS:
        path = models_dir / f"{target}.model"
        if not path.exists():
            raise PipelineError(f"missing model {path}; run 'train' first")
        models[target] = load_model(path)
    return models


def cmd_evaluate(cfg: PipelineConfig) -> list[dict]:
    cfg.validate()
    t = _load_topology(cfg.topology)
    snaps = load_snapshot_dir(cfg.snapshots, t)
    models = load_models(cfg.out_dir / "models")
    router = Router(t, cfg.paths_k)
    rows = []
    for vol, s in _volume_snapshots(snaps, cfg.volumes):
        row = evaluate_snapshot(t, router, s, models, cfg)
        row["volume"] = vol
        rows.append(row)
    out = cfg.out_dir
    _write_csv(out / "report.csv", REPORT_HEADER, ([r[h] for h in REPORT_HEADER] for r in rows))
    _write_plot_data(out, rows, cfg.volumes)
    log.info("evaluated %d snapshot/volume pairs", len(rows))
    return rows


def _write_plot_data(out: Path, rows: list[dict], volumes) -> None:
    def per_volume(cols):
        for v in volumes:
            sel = [r for r in rows if r["volume"] == v]
            if sel:
                yield [float(v)] + [float(np.mean([r[c] for r in sel])) for c in cols]

    acc_cols = ["acc_umin", "acc_umax", "acc_umin_given_umax", "acc_umax_given_umin"]
    _write_csv(out / "accuracy_vs_volume.csv", ["volume"] + acc_cols, per_volume(acc_cols))
    _write_csv(out / "energy_vs_volume.csv", ["volume", "energy_saving"], per_volume(["energy_saving"]))
    _write_csv(out / "path_length_vs_volume.csv", ["volume", "avg_path_length"], per_volume(["avg_path_length"]))
    _write_csv(out / "speedup_vs_volume.csv", ["volume", "speedup", "evaluations"],
               per_volume(["speedup", "evaluations"]))
    cv = out / "cv.csv"
    if cv.exists():
        (out / "cv_curves.csv").write_text(cv.read_text())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [pipeline] section")
    common.add_argument("--topology", help="topology file, or builtin:abilene")
    common.add_argument("--snapshots", help="directory of snapshot files")
    common.add_argument("--volumes", help="comma separated percents, e.g. 10,20,30")
    common.add_argument("--k", help="PCA components: 'auto' or an integer")
    common.add_argument("--folds", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--paths-k", dest="paths_k", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")
    common.add_argument("--label-step", dest="label_step", type=float,
                        help="grid step of the brute-force oracle (percent)")
    common.add_argument("--count", type=int, help="synth: number of snapshots")
    common.add_argument("--latent-dim", dest="latent_dim", type=int, help="synth: latent rank")
    common.add_argument("--mean-rate", dest="mean_rate", type=float, help="synth: mean demand rate")
    common.add_argument("--jobs", type=int, help="worker processes/threads")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="greenroute", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("synth", "generate synthetic low-rank snapshots"),
        ("label", "brute-force optimal (umin, umax) labels"),
        ("cv", "cross-validate the number of principal components"),
        ("train", "fit PCA and regression models"),
        ("evaluate", "predict, refine and score against the oracle"),
    ]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "command", "verbose")}
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "synth":
            cfg.validate(need_snapshots=False)
            print(cmd_synth(cfg))
        elif args.command == "label":
            print(cmd_label(cfg))
        elif args.command == "cv":
            print(f"chosen_k={cmd_cv(cfg).chosen_k}")
        elif args.command == "train":
            k, _ = cmd_train(cfg)
            print(f"k={k}")
        elif args.command == "evaluate":
            rows = cmd_evaluate(cfg)
            print(f"rows={len(rows)}")
    except (PipelineError, TrafficError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
