"""Experiment orchestration: fit representations per fold, select with the
density/diversity strategy, train on the revealed labels, evaluate macro-F1,
aggregate with confidence intervals and paired significance tests.

Leakage rules enforced here: vocabularies, idf weights, latent bases and
selection all see the pool side of a fold only; test labels are read at
evaluation time and nowhere else.  Selection runs once per (fold,
representation) at the largest budget; smaller budgets reuse prefixes, which
is exact because the scan order is budget-independent.
"""

from __future__ import annotations

import csv
import json
import re
import shlex
import subprocess
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import features, lsi, metrics, selection, svm
from .dvec import load_embeddings

__all__ = [
    "ReprSpec",
    "parse_repr",
    "ExperimentSpec",
    "CellResult",
    "AggregateResult",
    "PairwiseResult",
    "SelectionTrace",
    "ExperimentReport",
    "SpecError",
    "SidecarError",
    "run_experiment",
    "sweep_lsi_dims",
    "emit_report",
    "read_report",
    "invoke_sidecar",
    "write_pool_texts",
    "DEFAULT_BUDGETS",
    "DEFAULT_SWEEP_DIMS",
]

DEFAULT_BUDGETS = (50, 100, 200, 400, 800, 1600)
DEFAULT_SWEEP_DIMS = (96, 192, 384, 768, 1536, 3072)
LARGE_CORPUS_FOLD_CUTOFF = 100_000

CSV_COLUMNS = (
    "dataset", "fold", "budget", "selection_repr", "classification_repr",
    "macro_f1", "status", "n_selected", "exhausted", "ci_low", "ci_high",
    "statistic", "p_value", "n_effective", "method", "significant",
)

_REPR_RE = re.compile(r"^(bow|lsi\((\d+)\)|embedding\(([A-Za-z0-9_.-]+)\))$")


class SpecError(ValueError):
    """Experiment specification fails validation."""


class SidecarError(RuntimeError):
    """Sidecar subprocess failed or broke the file contract."""


@dataclass(frozen=True)
class ReprSpec:
    kind: str  # bow | lsi | embedding
    dim: int | None = None  # lsi only
    tag: str | None = None  # embedding only

    def label(self) -> str:
        if self.kind == "bow":
            return "bow"
        if self.kind == "lsi":
            return "lsi(%d)" % self.dim
        return "embedding(%s)" % self.tag


def parse_repr(text: str) -> ReprSpec:
    """Parse a representation label: bow, lsi(<d>), or embedding(<tag>)."""
    m = _REPR_RE.match(text.strip())
    if not m:
        raise SpecError("unrecognized representation %r" % text)
    if m.group(2) is not None:
        d = int(m.group(2))
        if d < 1:
            raise SpecError("lsi dimension must be >= 1, got %d" % d)
        return ReprSpec(kind="lsi", dim=d)
    if m.group(3) is not None:
        return ReprSpec(kind="embedding", tag=m.group(3))
    return ReprSpec(kind="bow")


def _as_repr_list(value, field_name: str) -> tuple[ReprSpec, ...]:
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not value:
        raise SpecError("%s must be a string or non-empty list of strings" % field_name)
    return tuple(parse_repr(v) for v in value)


@dataclass(frozen=True)
class ExperimentSpec:
    corpus_path: str
    corpus_format: str = "jsonl"
    dataset: str | None = None
    n_folds: int | None = None  # None -> 10, or 5 for very large corpora
    seed: int = 0
    budgets: tuple[int, ...] = DEFAULT_BUDGETS
    selection_reprs: tuple[ReprSpec, ...] = (ReprSpec(kind="bow"),)
    classification_reprs: tuple[ReprSpec, ...] = (ReprSpec(kind="bow"),)
    k: int = 10
    dist_min: float | None = None  # None -> per-kind default
    C: float = 1.0
    epochs: int = 50
    min_df: int = 2
    embeddings: dict = field(default_factory=dict)  # tag -> DVEC path
    sidecar_command: tuple[str, ...] | None = None
    sidecar_requests: dict = field(default_factory=dict)  # tag -> request fields
    config_pairs: tuple | None = None  # explicit (sel, cls) pairs; else cross product

    def __post_init__(self):
        budgets = tuple(int(b) for b in self.budgets)
        if not budgets or any(b < 1 for b in budgets):
            raise SpecError("budgets must be positive integers")
        if any(b2 <= b1 for b1, b2 in zip(budgets, budgets[1:])):
            raise SpecError("budgets must be strictly increasing: %r" % (budgets,))
        object.__setattr__(self, "budgets", budgets)
        for spec in self.selection_reprs + self.classification_reprs:
            if spec.kind == "embedding" and spec.tag not in self.embeddings:
                if self.sidecar_command is None or spec.tag not in self.sidecar_requests:
                    raise SpecError(
                        "embedding tag %r resolves to neither a file nor the sidecar"
                        % spec.tag
                    )

    @property
    def dataset_name(self) -> str:
        return self.dataset or Path(self.corpus_path).stem

    def pairs(self) -> tuple:
        raw = self.config_pairs
        if raw is None:
            raw = [
                (sel, cls)
                for sel in self.selection_reprs
                for cls in self.classification_reprs
            ]
        seen, out = set(), []
        for pair in raw:
            if pair not in seen:
                seen.add(pair)
                out.append(pair)
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "corpus_path": self.corpus_path,
            "corpus_format": self.corpus_format,
            "dataset": self.dataset_name,
            "n_folds": self.n_folds,
            "seed": self.seed,
            "budgets": list(self.budgets),
            "selection_repr": [r.label() for r in self.selection_reprs],
            "classification_repr": [r.label() for r in self.classification_reprs],
            "k": self.k,
            "dist_min": self.dist_min,
            "C": self.C,
            "epochs": self.epochs,
            "min_df": self.min_df,
            "embeddings": dict(self.embeddings),
            "sidecar_command": list(self.sidecar_command) if self.sidecar_command else None,
            "sidecar_requests": dict(self.sidecar_requests),
        }

    @staticmethod
    def from_json(path: str | Path) -> "ExperimentSpec":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SpecError("%s: invalid JSON (%s)" % (path, exc)) from exc
        return ExperimentSpec.from_dict(raw, base_dir=Path(path).parent)

    @staticmethod
    def from_dict(raw: dict, base_dir: Path | None = None) -> "ExperimentSpec":
        if not isinstance(raw, dict):
            raise SpecError("spec root must be a JSON object")
        if "corpus_path" not in raw:
            raise SpecError("spec is missing required field corpus_path")

        def _resolve(p: str) -> str:
            path = Path(p)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return str(path)

        command = raw.get("sidecar_command")
        if isinstance(command, str):
            command = shlex.split(command)
        embeddings = {
            tag: _resolve(p) for tag, p in dict(raw.get("embeddings", {})).items()
        }
        return ExperimentSpec(
            corpus_path=_resolve(raw["corpus_path"]),
            corpus_format=raw.get("corpus_format", "jsonl"),
            dataset=raw.get("dataset"),
            n_folds=raw.get("n_folds"),
            seed=int(raw.get("seed", 0)),
            budgets=tuple(raw.get("budgets", DEFAULT_BUDGETS)),
            selection_reprs=_as_repr_list(raw.get("selection_repr", "bow"), "selection_repr"),
            classification_reprs=_as_repr_list(
                raw.get("classification_repr", "bow"), "classification_repr"
            ),
            k=int(raw.get("k", 10)),
            dist_min=raw.get("dist_min"),
            C=float(raw.get("C", 1.0)),
            epochs=int(raw.get("epochs", 50)),
            min_df=int(raw.get("min_df", 2)),
            embeddings=embeddings,
            sidecar_command=tuple(command) if command else None,
            sidecar_requests=dict(raw.get("sidecar_requests", {})),
        )


@dataclass(frozen=True)
class CellResult:
    fold: int
    budget: int
    selection_repr: str
    classification_repr: str
    macro_f1: float | None
    status: str  # "ok", "degenerate labels", or "error: ..."
    n_selected: int
    exhausted: bool

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "budget": self.budget,
            "selection_repr": self.selection_repr,
            "classification_repr": self.classification_repr,
            "macro_f1": self.macro_f1,
            "status": self.status,
            "n_selected": self.n_selected,
            "exhausted": self.exhausted,
        }


@dataclass(frozen=True)
class AggregateResult:
    budget: int
    selection_repr: str
    classification_repr: str
    mean: float | None
    ci_low: float | None
    ci_high: float | None
    n_folds_ok: int

    def to_dict(self) -> dict:
        return {
            "budget": self.budget,
            "selection_repr": self.selection_repr,
            "classification_repr": self.classification_repr,
            "mean": self.mean,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_folds_ok": self.n_folds_ok,
        }


@dataclass(frozen=True)
class PairwiseResult:
    budget: int
    config_a: str
    config_b: str
    statistic: float | None
    p_value: float | None
    n_effective: int | None
    method: str  # exact | normal_approximation | insufficient_folds
    significant: bool | None

    def to_dict(self) -> dict:
        return {
            "budget": self.budget,
            "config_a": self.config_a,
            "config_b": self.config_b,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n_effective": self.n_effective,
            "method": self.method,
            "significant": self.significant,
        }


@dataclass(frozen=True)
class SelectionTrace:
    fold: int
    selection_repr: str
    k: int
    dist_min: float
    budget_max: int
    selected_ids: tuple  # corpus document ids in selection order
    exhausted: bool
    audit: tuple  # per-candidate dicts: id/density/diversity/accepted

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "selection_repr": self.selection_repr,
            "k": self.k,
            "dist_min": self.dist_min,
            "budget_max": self.budget_max,
            "selected_ids": list(self.selected_ids),
            "exhausted": self.exhausted,
            "audit": [dict(a) for a in self.audit],
        }


@dataclass
class ExperimentReport:
    dataset: str
    spec: dict
    cells: list
    aggregates: list
    pairwise: list
    selections: list
    runtime: dict

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "spec": self.spec,
            "cells": [c.to_dict() for c in self.cells],
            "aggregates": [a.to_dict() for a in self.aggregates],
            "pairwise": [p.to_dict() for p in self.pairwise],
            "selections": [s.to_dict() for s in self.selections],
            "runtime": self.runtime,
        }


def _pair_label(sel: str, cls: str) -> str:
    return "%s->%s" % (sel, cls)


def write_pool_texts(ids, texts, path: str | Path) -> None:
    """Write one JSON object {"id", "text"} per line for sidecar consumption."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id, text in zip(ids, texts):
            fh.write(json.dumps({"id": int(doc_id), "text": text}, ensure_ascii=False))
            fh.write("\n")


def invoke_sidecar(command, request: dict, request_path: str | Path,
                   expected_rows: int, timeout: float = 3600.0) -> dict:
    """Run the embedding sidecar over the file-based request/reply contract.

    Writes the request JSON, launches `command + [request_path]`, then
    validates the `.done` reply echo and the promised DVEC output shape.
    """
    request_path = Path(request_path)
    request_path.write_text(json.dumps(request, indent=2), encoding="utf-8")
    proc = subprocess.run(
        [*command, str(request_path)],
        capture_output=True,
        text=True,
        timeout=timeout,
    )
    log = (proc.stdout or "") + (proc.stderr or "")
    if proc.returncode != 0:
        raise SidecarError(
            "sidecar exited with code %d; log:\n%s" % (proc.returncode, log)
        )
    reply_path = Path(str(request_path) + ".done")
    if not reply_path.exists():
        raise SidecarError("sidecar reply %s missing; log:\n%s" % (reply_path, log))
    reply = json.loads(reply_path.read_text(encoding="utf-8"))
    for key in ("variant", "model", "out"):
        if reply.get(key) != request[key]:
            raise SidecarError(
                "sidecar reply echoes %s=%r, request had %r"
                % (key, reply.get(key), request[key])
            )
    echoed = [(entry["id"], entry["label"]) for entry in reply.get("labeled", [])]
    wanted = [(entry["id"], entry["label"]) for entry in request.get("labeled", [])]
    if echoed != wanted:
        raise SidecarError("sidecar reply's labeled echo does not match the request")
    out_path = Path(request["out"])
    if not out_path.exists():
        raise SidecarError("sidecar did not produce %s; log:\n%s" % (out_path, log))
    matrix = load_embeddings(out_path)
    if matrix.n_rows != expected_rows:
        raise SidecarError(
            "sidecar output %s has %d rows, expected %d"
            % (out_path, matrix.n_rows, expected_rows)
        )
    return reply


def _resolve_embedding(spec: ExperimentSpec, tag: str, corpus) -> features.FeatureMatrix:
    """Load the DVEC for a tag, running the sidecar first if needed."""
    path = spec.embeddings.get(tag)
    if path is None or not Path(path).exists():
        if spec.sidecar_command is None or tag not in spec.sidecar_requests:
            raise SpecError("embedding tag %r has no DVEC file and no sidecar route" % tag)
        extra = dict(spec.sidecar_requests[tag])
        out = path or extra.pop("out", None)
        if out is None:
            raise SpecError("sidecar request for %r does not name an output path" % tag)
        extra.pop("pool_texts", None)
        pool_path = str(out) + ".pool.jsonl"
        ids = [doc.id for doc in corpus.documents]
        write_pool_texts(ids, [doc.text for doc in corpus.documents], pool_path)
        request = {
            "variant": extra.pop("variant", "none"),
            "model": extra.pop("model", ""),
            "pool_texts": pool_path,
            "labeled": extra.pop("labeled", []),
            "out": str(out),
            "epochs_mlm": extra.pop("epochs_mlm", 10),
            "epochs_atc": extra.pop("epochs_atc", 5),
            "lr": extra.pop("lr", 5e-5),
        }
        if "seed" in extra:
            request["seed"] = extra.pop("seed")
        invoke_sidecar(spec.sidecar_command, request, str(out) + ".request.json",
                       expected_rows=len(ids))
        path = str(out)
    matrix = load_embeddings(path)
    if matrix.ids is None:
        raise SpecError("embedding file %s lacks the .ids sidecar" % path)
    return matrix


class _FoldRepresentations:
    """Per-fold cache mapping a ReprSpec to (pool features, test features)."""

    def __init__(self, spec, pool_texts, test_texts, pool_ids, test_ids, embeddings):
        self.spec = spec
        self.pool_texts = pool_texts
        self.test_texts = test_texts
        self.pool_ids = pool_ids
        self.test_ids = test_ids
        self.embeddings = embeddings  # tag -> full-corpus FeatureMatrix
        self._bow = None
        self._lsi = {}

    def _bow_pair(self):
        if self._bow is None:
            vocab = features.fit_vocabulary(self.pool_texts, min_df=self.spec.min_df)
            pool = features.tfidf(self.pool_texts, vocab, ids=self.pool_ids)
            test = features.tfidf(self.test_texts, vocab, ids=self.test_ids)
            self._bow = (pool, test)
        return self._bow

    def _embedding_pair(self, tag):
        matrix = self.embeddings[tag]
        row_of = {doc_id: row for row, doc_id in enumerate(matrix.ids)}
        try:
            pool_rows = [row_of[i] for i in self.pool_ids]
            test_rows = [row_of[i] for i in self.test_ids]
        except KeyError as exc:
            raise SpecError(
                "embedding %r lacks a row for document id %s" % (tag, exc.args[0])
            ) from exc
        return matrix.take_rows(pool_rows), matrix.take_rows(test_rows)

    def pair(self, repr_spec: ReprSpec):
        if repr_spec.kind == "bow":
            return self._bow_pair()
        if repr_spec.kind == "embedding":
            return self._embedding_pair(repr_spec.tag)
        if repr_spec.dim not in self._lsi:
            bow_pool, bow_test = self._bow_pair()
            model = lsi.lsi_fit(bow_pool, repr_spec.dim)
            self._lsi[repr_spec.dim] = (
                lsi.lsi_project(model, bow_pool),
                lsi.lsi_project(model, bow_test),
            )
        return self._lsi[repr_spec.dim]


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Execute the full grid of (fold, budget, representation pair) cells."""
    started = time.time()
    corpus = corpus_mod.load_corpus(spec.corpus_path, spec.corpus_format)
    n_docs = len(corpus.documents)
    n_folds = spec.n_folds or (5 if n_docs > LARGE_CORPUS_FOLD_CUTOFF else 10)
    plan = corpus_mod.make_folds(corpus, n_folds, spec.seed)
    labels_all = corpus.labels()
    pairs = spec.pairs()
    sel_specs = []
    for sel, _ in pairs:
        if sel not in sel_specs:
            sel_specs.append(sel)

    embeddings = {}
    emb_errors = {}
    for repr_spec in {r for p in pairs for r in p if r.kind == "embedding"}:
        try:
            embeddings[repr_spec.tag] = _resolve_embedding(spec, repr_spec.tag, corpus)
        except (SpecError, SidecarError, OSError, ValueError) as exc:
            emb_errors[repr_spec.tag] = "error: %s" % exc

    max_budget = max(spec.budgets)
    cells = {}
    traces = []
    for fold in range(n_folds):
        pool_ids, test_ids = corpus_mod.fold_split(corpus, plan, fold)
        pool_ids = np.asarray(pool_ids)
        test_ids = np.asarray(test_ids)
        reps = _FoldRepresentations(
            spec,
            [corpus.documents[i].text for i in pool_ids],
            [corpus.documents[i].text for i in test_ids],
            pool_ids,
            test_ids,
            embeddings,
        )
        test_labels = labels_all[test_ids]
        for sel in sel_specs:
            sel_label = sel.label()
            cls_list = [cls for s, cls in pairs if s == sel]
            dist_min = (
                spec.dist_min
                if spec.dist_min is not None
                else selection.default_dist_min(sel.kind)
            )
            try:
                if sel.kind == "embedding" and sel.tag in emb_errors:
                    raise SpecError(emb_errors[sel.tag])
                pool_feats, _ = reps.pair(sel)
                view = features.similarity_view(pool_feats)
                cfg = selection.SelectionConfig(
                    budget=max_budget, k=spec.k, dist_min=dist_min
                )
                result = selection.dwds_select(view, cfg)
            except Exception as exc:  # noqa: BLE001 - cell isolation by contract
                status = str(exc) if str(exc).startswith("error: ") else "error: %s" % exc
                for budget in spec.budgets:
                    for cls in cls_list:
                        cells[(fold, budget, sel_label, cls.label())] = CellResult(
                            fold, budget, sel_label, cls.label(), None, status, 0, False
                        )
                continue
            traces.append(
                SelectionTrace(
                    fold=fold,
                    selection_repr=sel_label,
                    k=spec.k,
                    dist_min=dist_min,
                    budget_max=max_budget,
                    selected_ids=tuple(int(i) for i in result.selected),
                    exhausted=result.exhausted,
                    audit=tuple(
                        {
                            "id": int(rec.id),
                            "density": rec.density,
                            "diversity": rec.diversity,
                            "accepted": rec.accepted,
                        }
                        for rec in result.audit
                    ),
                )
            )
            for budget in spec.budgets:
                sel_rows = list(result.selected_rows[:budget])
                exhausted = len(result.selected_rows) < budget
                y_train = labels_all[pool_ids[sel_rows]]
                for cls in cls_list:
                    key = (fold, budget, sel_label, cls.label())
                    try:
                        if cls.kind == "embedding" and cls.tag in emb_errors:
                            raise SpecError(emb_errors[cls.tag])
                        cls_pool, cls_test = reps.pair(cls)
                        train_feats = cls_pool.take_rows(sel_rows)
                        model = svm.train(
                            train_feats, y_train, C=spec.C, epochs=spec.epochs,
                            seed=spec.seed,
                        )
                        pred = svm.predict(model, cls_test)
                        score = metrics.macro_f1(test_labels, pred)
                        cells[key] = CellResult(
                            fold, budget, sel_label, cls.label(), score, "ok",
                            len(sel_rows), exhausted,
                        )
                    except svm.DegenerateLabelsError:
                        cells[key] = CellResult(
                            fold, budget, sel_label, cls.label(), None,
                            "degenerate labels", len(sel_rows), exhausted,
                        )
                    except Exception as exc:  # noqa: BLE001 - cell isolation
                        msg = str(exc)
                        status = msg if msg.startswith("error: ") else "error: %s" % msg
                        cells[key] = CellResult(
                            fold, budget, sel_label, cls.label(), None, status,
                            len(sel_rows), exhausted,
                        )

    ordered_cells = [
        cells[(fold, budget, sel.label(), cls.label())]
        for fold in range(n_folds)
        for budget in spec.budgets
        for sel, cls in pairs
    ]
    aggregates = _aggregate(ordered_cells, spec, pairs)
    pairwise = _pairwise(ordered_cells, spec, pairs, n_folds)
    runtime = {
        "elapsed_seconds": round(time.time() - started, 3),
        "n_folds": n_folds,
        "n_docs": n_docs,
        "n_cells": len(ordered_cells),
    }
    return ExperimentReport(
        dataset=spec.dataset_name,
        spec=spec.to_dict(),
        cells=ordered_cells,
        aggregates=aggregates,
        pairwise=pairwise,
        selections=traces,
        runtime=runtime,
    )


def _aggregate(cells, spec, pairs):
    out = []
    for budget in spec.budgets:
        for sel, cls in pairs:
            scores = [
                c.macro_f1
                for c in cells
                if c.budget == budget
                and c.selection_repr == sel.label()
                and c.classification_repr == cls.label()
                and c.status == "ok"
            ]
            if len(scores) >= 2:
                mean, lo, hi = metrics.mean_ci(scores)
            elif len(scores) == 1:
                mean, lo, hi = scores[0], None, None
            else:
                mean = lo = hi = None
            out.append(
                AggregateResult(budget, sel.label(), cls.label(), mean, lo, hi,
                                len(scores))
            )
    return out


def _pairwise(cells, spec, pairs, n_folds):
    """Paired signed-rank tests between configurations sharing ok folds."""
    out = []
    labels = [( _pair_label(sel.label(), cls.label()), sel.label(), cls.label())
              for sel, cls in pairs]
    by_key = {
        (c.fold, c.budget, c.selection_repr, c.classification_repr): c for c in cells
    }
    for budget in spec.budgets:
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                label_a, sel_a, cls_a = labels[i]
                label_b, sel_b, cls_b = labels[j]
                a_scores, b_scores = [], []
                for fold in range(n_folds):
                    ca = by_key.get((fold, budget, sel_a, cls_a))
                    cb = by_key.get((fold, budget, sel_b, cls_b))
                    if ca and cb and ca.status == "ok" and cb.status == "ok":
                        a_scores.append(ca.macro_f1)
                        b_scores.append(cb.macro_f1)
                if len(a_scores) < 5:
                    out.append(
                        PairwiseResult(budget, label_a, label_b, None, None, None,
                                       "insufficient_folds", None)
                    )
                    continue
                res = metrics.wilcoxon_paired(a_scores, b_scores)
                out.append(
                    PairwiseResult(
                        budget, label_a, label_b, res.statistic, res.p_value,
                        res.n_effective, res.method, res.p_value < 0.05,
                    )
                )
    return out


def sweep_lsi_dims(spec: ExperimentSpec, dims) -> ExperimentReport:
    """One diagonal configuration per latent dimension plus a raw-BoW row.

    Each swept d uses lsi(d) for both stages; the extra "all" row is the
    uncompressed BoW pairing.
    """
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise SpecError("sweep dims must be positive integers")
    pairs = [(ReprSpec(kind="lsi", dim=d), ReprSpec(kind="lsi", dim=d)) for d in dims]
    pairs.append((ReprSpec(kind="bow"), ReprSpec(kind="bow")))
    swept = replace(
        spec,
        selection_reprs=tuple(s for s, _ in pairs),
        classification_reprs=(ReprSpec(kind="bow"),),
        config_pairs=tuple(pairs),
    )
    return run_experiment(swept)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: ExperimentReport, path: str | Path, format: str = "csv") -> None:
    """Write the report as CSV rows (data, aggregate, wilcoxon) or full JSON."""
    path = Path(path)
    if format == "json":
        path.write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return
    if format != "csv":
        raise ValueError("unknown report format %r" % format)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in report.cells:
            writer.writerow([
                report.dataset, c.fold, c.budget, c.selection_repr,
                c.classification_repr, _fmt(c.macro_f1), c.status, c.n_selected,
                _fmt(c.exhausted), "", "", "", "", "", "", "",
            ])
        for a in report.aggregates:
            writer.writerow([
                report.dataset, "aggregate", a.budget, a.selection_repr,
                a.classification_repr, _fmt(a.mean),
                "ok" if a.n_folds_ok else "empty", "", "",
                _fmt(a.ci_low), _fmt(a.ci_high), "", "", a.n_folds_ok, "", "",
            ])
        for p in report.pairwise:
            writer.writerow([
                report.dataset, "wilcoxon", p.budget, p.config_a, p.config_b,
                "", "", "", "", "", "", _fmt(p.statistic), _fmt(p.p_value),
                _fmt(p.n_effective), p.method,
                "" if p.significant is None else _fmt(p.significant),
            ])


def read_report(path: str | Path) -> ExperimentReport:
    """Rebuild an ExperimentReport from its JSON export."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return ExperimentReport(
        dataset=raw["dataset"],
        spec=raw["spec"],
        cells=[CellResult(**c) for c in raw["cells"]],
        aggregates=[AggregateResult(**a) for a in raw["aggregates"]],
        pairwise=[PairwiseResult(**p) for p in raw["pairwise"]],
        selections=[
            SelectionTrace(
                fold=s["fold"],
                selection_repr=s["selection_repr"],
                k=s["k"],
                dist_min=s["dist_min"],
                budget_max=s["budget_max"],
                selected_ids=tuple(s["selected_ids"]),
                exhausted=s["exhausted"],
                audit=tuple(s["audit"]),
            )
            for s in raw["selections"]
        ],
        runtime=raw["runtime"],
    )
