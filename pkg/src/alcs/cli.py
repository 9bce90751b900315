"""Command-line interface.

Math-library thread pools are pinned to a single thread before numpy loads
so that report bytes do not depend on the host's thread configuration; this
is part of the reproducibility contract for emitted CSV files.
"""

from __future__ import annotations

import os

for _var in (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
):
    os.environ[_var] = "1"

import argparse  # noqa: E402
import json  # noqa: E402
import sys  # noqa: E402
from pathlib import Path  # noqa: E402

import numpy as np  # noqa: E402

from . import corpus as corpus_mod  # noqa: E402
from . import dvec, features, harness, lsi, selection  # noqa: E402

__all__ = ["main"]


def _parse_embedding_args(pairs):
    out = {}
    for pair in pairs or []:
        tag, sep, path = pair.partition("=")
        if not sep or not tag or not path:
            raise harness.SpecError("--embeddings expects TAG=PATH, got %r" % pair)
        out[tag] = path
    return out


def _full_corpus_features(repr_spec, corpus, min_df, embeddings):
    """Features for the whole corpus, rows aligned with document ids."""
    texts = [doc.text for doc in corpus.documents]
    ids = [doc.id for doc in corpus.documents]
    if repr_spec.kind == "embedding":
        path = embeddings.get(repr_spec.tag)
        if path is None:
            raise harness.SpecError(
                "embedding tag %r needs --embeddings %s=PATH"
                % (repr_spec.tag, repr_spec.tag)
            )
        matrix = dvec.load_embeddings(path)
        if matrix.ids is None:
            raise harness.SpecError("embedding file %s lacks the .ids sidecar" % path)
        row_of = {doc_id: row for row, doc_id in enumerate(matrix.ids)}
        try:
            rows = [row_of[i] for i in ids]
        except KeyError as exc:
            raise harness.SpecError(
                "embedding file %s lacks a row for document id %s" % (path, exc.args[0])
            ) from exc
        return matrix.take_rows(rows)
    vocab = features.fit_vocabulary(texts, min_df=min_df)
    bow = features.tfidf(texts, vocab, ids=ids)
    if repr_spec.kind == "bow":
        return bow
    model = lsi.lsi_fit(bow, repr_spec.dim)
    return lsi.lsi_project(model, bow)


def _cmd_run(args) -> int:
    spec = harness.ExperimentSpec.from_json(args.spec)
    report = harness.run_experiment(spec)
    harness.emit_report(report, args.out, format="csv")
    print("wrote %s (%d cells)" % (args.out, len(report.cells)))
    if args.json:
        harness.emit_report(report, args.json, format="json")
        print("wrote %s" % args.json)
    if args.figures:
        from .plots import plot_report

        for path in plot_report(report, args.figures):
            print("wrote %s" % path)
    return 0


def _cmd_sweep_lsi(args) -> int:
    spec = harness.ExperimentSpec.from_json(args.spec)
    dims = [int(d) for d in args.dims.split(",") if d.strip()]
    report = harness.sweep_lsi_dims(spec, dims)
    harness.emit_report(report, args.out, format="csv")
    print("wrote %s (%d cells)" % (args.out, len(report.cells)))
    if args.json:
        harness.emit_report(report, args.json, format="json")
        print("wrote %s" % args.json)
    if args.figures:
        from .plots import plot_report

        for path in plot_report(report, args.figures):
            print("wrote %s" % path)
    return 0


def _cmd_select(args) -> int:
    repr_spec = harness.parse_repr(args.repr)
    corpus = corpus_mod.load_corpus(args.corpus, args.format)
    matrix = _full_corpus_features(
        repr_spec, corpus, args.min_df, _parse_embedding_args(args.embeddings)
    )
    view = features.similarity_view(matrix)
    dist_min = (
        args.dist_min
        if args.dist_min is not None
        else selection.default_dist_min(repr_spec.kind)
    )
    cfg = selection.SelectionConfig(budget=args.budget, k=args.k, dist_min=dist_min)
    result = selection.dwds_select(view, cfg)
    payload = result.to_dict()
    Path(args.out).write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )
    print(
        "wrote %s (%d selected%s)"
        % (args.out, len(result.selected), ", exhausted" if result.exhausted else "")
    )
    return 0


def _cmd_represent(args) -> int:
    if args.kind == "lsi" and args.dims is None:
        raise harness.SpecError("--kind lsi requires --dims")
    label = "bow" if args.kind == "bow" else "lsi(%d)" % args.dims
    repr_spec = harness.parse_repr(label)
    corpus = corpus_mod.load_corpus(args.corpus, args.format)
    matrix = _full_corpus_features(repr_spec, corpus, args.min_df, {})
    data = matrix.data.toarray() if matrix.is_sparse else matrix.data
    dvec.save_embeddings(np.asarray(data, dtype=np.float32), args.out, ids=matrix.ids)
    print("wrote %s (%d x %d)" % (args.out, matrix.n_rows, matrix.n_cols))
    return 0


def _cmd_plot(args) -> int:
    from .plots import plot_report

    report = harness.read_report(args.report)
    for path in plot_report(report, args.out_dir):
        print("wrote %s" % path)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alcs",
        description=(
            "Cold-start active-learning experiments: density/diversity "
            "selection, linear classification, macro-F1 reports."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment grid from a JSON spec")
    p_run.add_argument("--spec", required=True)
    p_run.add_argument("--out", required=True, help="CSV report path")
    p_run.add_argument("--json", help="also write the full JSON report here")
    p_run.add_argument("--figures", help="also render figures into this directory")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep-lsi", help="latent-dimension sweep plus raw BoW")
    p_sweep.add_argument("--spec", required=True)
    p_sweep.add_argument("--dims", required=True, help="comma-separated list, e.g. 96,192")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--json")
    p_sweep.add_argument("--figures")
    p_sweep.set_defaults(func=_cmd_sweep_lsi)

    p_sel = sub.add_parser("select", help="run selection once over a whole corpus")
    p_sel.add_argument("--repr", required=True, help="bow, lsi(D), or embedding(TAG)")
    p_sel.add_argument("--budget", type=int, required=True)
    p_sel.add_argument("--k", type=int, default=10)
    p_sel.add_argument("--dist-min", type=float, default=None)
    p_sel.add_argument("--corpus", required=True)
    p_sel.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")
    p_sel.add_argument("--min-df", type=int, default=2)
    p_sel.add_argument("--embeddings", nargs="*", metavar="TAG=PATH")
    p_sel.add_argument("--out", required=True)
    p_sel.set_defaults(func=_cmd_select)

    p_rep = sub.add_parser("represent", help="export corpus features as a DVEC matrix")
    p_rep.add_argument("--kind", choices=("bow", "lsi"), required=True)
    p_rep.add_argument("--dims", type=int)
    p_rep.add_argument("--corpus", required=True)
    p_rep.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")
    p_rep.add_argument("--min-df", type=int, default=2)
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=_cmd_represent)

    p_plot = sub.add_parser("plot", help="render figures from a JSON report")
    p_plot.add_argument("--report", required=True)
    p_plot.add_argument("--out-dir", required=True)
    p_plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        harness.SpecError,
        harness.SidecarError,
        corpus_mod.CorpusError,
        dvec.DvecFormatError,
        ValueError,
        OSError,
    ) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
