"""Command-line interface.

Subcommands: train, eval, recommend, generate, sweep-hidden, sweep-eta.
Exit codes: 0 success, 1 runtime failure, 2 usage/config error.  Every
randomized subcommand prints the effective seed so runs can be replayed.
"""

import argparse
import os
import sys

import numpy as np

from . import backends
from .corruption import CorruptionProcess
from .data import estimate_supports, parse_transactions, serialize_transactions, split
from .errors import BasketDaeError, ConfigError
from .evaluation import evaluate_baskets, misclassification_rate, rates, roc
from .generation import GenConfig, frequency_report, frequency_report_to_csv, generate
from .model import load_model, save_model
from .optimizer import ClipSchedule
from .training import TrainConfig, WalkbackConfig, sweep_hidden, sweep_threshold, train

DEFAULT_SEED = 42
ETA_GRID = [i / 100 for i in range(101)]


def _load_dataset(path, catalog=None):
    if not os.path.exists(path):
        raise ConfigError(f"data file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return parse_transactions(fh, catalog=catalog)


def _train_config(args):
    walkback = None
    if args.walkback_k > 0:
        walkback = WalkbackConfig(k=args.walkback_k, fraction=args.walkback_frac)
    return TrainConfig(
        n_hidden=args.hidden,
        batch_size=args.batch,
        rounds=args.rounds,
        lr=args.lr,
        clip=ClipSchedule(delta0=args.clip_delta, decay=args.clip_decay),
        walkback=walkback,
        eta=args.eta,
        eval_every=args.eval_every,
        seed=args.seed,
    )


def cmd_train(args):
    ds = _load_dataset(args.data)
    train_ds, eval_ds = split(ds, args.train_fraction, args.seed)
    cfg = _train_config(args)
    print(f"seed: {args.seed}")
    print(f"backend: {backends.BACKEND_NAME}")
    print(f"split: {len(train_ds)} train / {len(eval_ds)} eval baskets, p={ds.p}")
    model, log = train(train_ds, eval_ds, cfg)
    save_model(model, args.model)
    with open(args.out, "w", encoding="utf-8") as fh:
        log.to_csv(fh)
    final = log.records[-1]
    print(f"model written to {args.model}")
    print(f"training log written to {args.out}")
    print(f"final eval loss: {final.eval_loss:.6f}")
    print(f"final miss-classification rate (eta={cfg.eta}): {final.misclass_rate:.6f}")
    return 0


def cmd_eval(args):
    model = load_model(args.model)
    ds = _load_dataset(args.data, catalog=model.catalog)
    eta = model.eta if args.eta is None else args.eta
    rng = np.random.default_rng(args.seed)
    print(f"seed: {args.seed}")
    baskets = ds.nonzero_rows()
    cm = evaluate_baskets(model, baskets, eta=eta, rng=rng, repeats=args.repeats)
    fpr, tpr = rates(cm)
    mis = misclassification_rate(cm)
    curve = roc(model, baskets, ETA_GRID, rng=np.random.default_rng(args.seed))
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "confusion.csv"), "w", encoding="utf-8") as fh:
        cm.to_csv(fh)
    with open(os.path.join(args.out, "confusion.txt"), "w", encoding="utf-8") as fh:
        fh.write(cm.to_table() + "\n")
    with open(os.path.join(args.out, "summary.csv"), "w", encoding="utf-8") as fh:
        fh.write("eta,fpr,tpr,misclass_rate\n")
        fh.write(f"{eta!r},{fpr!r},{tpr!r},{mis!r}\n")
    with open(os.path.join(args.out, "roc.csv"), "w", encoding="utf-8") as fh:
        curve.to_csv(fh)
    print(cm.to_table())
    print(f"eta={eta}  FPR={fpr:.4f}  TPR={tpr:.4f}  misclassification={mis:.4f}")
    print(f"reports written to {args.out}")
    return 0


def cmd_recommend(args):
    model = load_model(args.model)
    labels = [t.strip() for t in args.basket.split(",") if t.strip()]
    if not labels:
        raise ConfigError("basket must contain at least one item label")
    x = np.zeros(model.p)
    for label in labels:
        col = model.catalog.index.get(label)
        if col is None:
            raise ConfigError(
                f"unknown label {label!r}; valid labels: {', '.join(model.catalog.names)}"
            )
        x[col] = 1.0
    from .network import forward

    y = forward(model.params, x).y
    absent = [i for i in range(model.p) if x[i] == 0.0]
    ranked = sorted(absent, key=lambda i: (-y[i], i))
    if args.top_k is not None:
        ranked = ranked[: args.top_k]
    print(f"basket: {', '.join(labels)}")
    if not ranked:
        print("no recommendations: basket already contains every catalog item")
    for i in ranked:
        print(f"{model.catalog.names[i]}\t{y[i]:.6f}")
    return 0


def cmd_generate(args):
    model = load_model(args.model)
    ds = _load_dataset(args.data, catalog=model.catalog)
    cfg = GenConfig(
        n_samples=args.n,
        burn_in=args.burn_in,
        thinning=args.thinning,
        seed=args.seed,
        chains=args.chains,
        init=args.init,
    )
    print(f"seed: {args.seed}")
    generated = generate(model, ds, cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        serialize_transactions(generated, fh)
    report = frequency_report(generated, ds)
    freq_path = args.freq_out or os.path.splitext(args.out)[0] + "_frequency.csv"
    with open(freq_path, "w", encoding="utf-8") as fh:
        frequency_report_to_csv(report, fh)
    print(f"{len(generated)} baskets written to {args.out}")
    print(f"frequency report written to {freq_path}")
    worst = max(report, key=lambda r: r[3])
    print(f"largest train/generated frequency gap: {worst[0]} ({worst[3]:.4f})")
    return 0


def cmd_sweep_hidden(args):
    ds = _load_dataset(args.data)
    train_ds, eval_ds = split(ds, args.train_fraction, args.seed)
    candidates = [int(t) for t in args.candidates.split(",") if t.strip()]
    print(f"seed: {args.seed}")
    rows = sweep_hidden(train_ds, eval_ds, candidates, _train_config(args))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("n_hidden,misclass_rate\n")
        for n, rate in rows:
            fh.write(f"{n},{rate!r}\n")
    for n, rate in rows:
        print(f"n_hidden={n}\tmisclassification={rate:.6f}")
    print(f"sweep written to {args.out}")
    return 0


def cmd_sweep_eta(args):
    model = load_model(args.model)
    ds = _load_dataset(args.data, catalog=model.catalog)
    etas = [i / (args.grid - 1) for i in range(args.grid)] if args.grid > 1 else [0.5]
    print(f"seed: {args.seed}")
    rows, best = sweep_threshold(model, ds, etas, seed=args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("eta,misclass_rate\n")
        for eta, rate in rows:
            fh.write(f"{eta!r},{rate!r}\n")
    print(f"sweep written to {args.out}")
    print(f"best eta: {best} (misclassification {dict(rows)[best]:.6f})")
    return 0


def _add_train_flags(sub):
    sub.add_argument("--hidden", type=int, default=100, help="hidden layer width")
    sub.add_argument("--batch", type=int, default=64, help="minibatch size")
    sub.add_argument("--rounds", type=int, default=50_000, help="minibatch steps")
    sub.add_argument("--lr", type=float, default=1e-5, help="Adam learning rate")
    sub.add_argument("--clip-delta", type=float, default=1.0, help="gradient clip threshold")
    sub.add_argument("--clip-decay", type=float, default=0.0,
                     help="clip threshold decay rate (delta/(1+decay*t))")
    sub.add_argument("--eta", type=float, default=0.5, help="decision threshold")
    sub.add_argument("--walkback-k", type=int, default=0,
                     help="walkback chain steps (0 disables walkback)")
    sub.add_argument("--walkback-frac", type=float, default=0.5,
                     help="share of each batch that gets walkback augmentation")
    sub.add_argument("--train-fraction", type=float, default=0.7001,
                     help="train split fraction")
    sub.add_argument("--eval-every", type=int, default=500, help="checkpoint cadence")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="basketdae",
        description="Denoising auto-encoder over market baskets: train, evaluate, "
                    "recommend missing items, and generate synthetic baskets.",
    )
    parser.add_argument("--version", action="version", version="basketdae 0.1.0")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("train", help="train a model on a transaction file")
    sp.add_argument("--data", required=True, help="transaction file (one basket per line)")
    sp.add_argument("--model", required=True, help="output model path")
    sp.add_argument("--out", default="train_log.csv", help="training log CSV path")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_train_flags(sp)
    sp.set_defaults(func=cmd_train)

    sp = subs.add_parser("eval", help="evaluate a model on a transaction file")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", default="eval_report", help="report directory")
    sp.add_argument("--eta", type=float, default=None, help="threshold override")
    sp.add_argument("--repeats", type=int, default=1,
                    help="corruption draws per basket to average over")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.set_defaults(func=cmd_eval)

    sp = subs.add_parser("recommend", help="rank items missing from a basket")
    sp.add_argument("--model", required=True)
    sp.add_argument("--basket", required=True, help="comma-separated item labels")
    sp.add_argument("--top-k", type=int, default=None)
    sp.set_defaults(func=cmd_recommend)

    sp = subs.add_parser("generate", help="sample synthetic baskets from a model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True, help="chain initialization / frequency baseline")
    sp.add_argument("--out", default="generated.txt", help="generated transaction file")
    sp.add_argument("--freq-out", default=None, help="frequency report CSV path")
    sp.add_argument("--n", type=int, required=True, help="baskets to generate")
    sp.add_argument("--burn-in", type=int, default=100)
    sp.add_argument("--thinning", type=int, default=10)
    sp.add_argument("--chains", type=int, default=1)
    sp.add_argument("--init", choices=["dataset", "product"], default="dataset")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.set_defaults(func=cmd_generate)

    sp = subs.add_parser("sweep-hidden", help="cross-validate the hidden width")
    sp.add_argument("--data", required=True)
    sp.add_argument("--candidates", required=True, help="comma-separated widths")
    sp.add_argument("--out", default="sweep_hidden.csv")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_train_flags(sp)
    sp.set_defaults(func=cmd_sweep_hidden)

    sp = subs.add_parser("sweep-eta", help="cross-validate the decision threshold")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", default="sweep_eta.csv")
    sp.add_argument("--grid", type=int, default=101, help="number of thresholds in [0, 1]")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.set_defaults(func=cmd_sweep_eta)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BasketDaeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
