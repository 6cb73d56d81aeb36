"""
Simulation service: the XOR toy experiment, a synthetic review corpus and the
n-gram screening study
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.preprocessing import normalize

from influence_lab.core.config import settings
from influence_lab.core.exceptions import ValidationError
from influence_lab.core.seeding import derive_seed
from influence_lab.schemas.dataset import LabeledDataset, SplitSpec, TextCorpus, TextDocument
from influence_lab.schemas.neural import TrainConfig
from influence_lab.schemas.screening import BdaConfig
from influence_lab.schemas.simlab import (
    GUESSED_MODEL_LABELS,
    ArmResult,
    GuessedModel,
    TextStudyConfig,
    TextStudyReport,
    ToyConfig,
    ToyReport,
    ToyRow,
)
from influence_lab.schemas.textfeat import Vocabulary
from influence_lab.services.dagger_service import DaggerService
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.influence_service import InfluenceService
from influence_lab.services.metrics_service import MetricsService
from influence_lab.services.neural_service import NeuralService
from influence_lab.services.screening_service import ScreeningService
from influence_lab.services.textfeat_service import TextFeatureService

logger = logging.getLogger(__name__)

FILLER_WORDS = (
    "the a an this that it was is movie film story plot scene scenes actor actors cast "
    "director camera music score minutes hour ending start middle character characters "
    "dialogue screen time moment moments audience theater night friend friends family "
    "watched saw felt thought seemed went came made took looked about after before "
    "during while with from into over under again then there here some many most "
    "other another first second last year years version sequel part role"
).split()

POSITIVE_PHRASES = (
    "highly recommend",
    "great acting",
    "loved it",
    "well worth",
    "truly moving",
    "beautifully shot",
    "must see",
    "brilliant script",
)

NEGATIVE_PHRASES = (
    "waste of",
    "poorly written",
    "fell asleep",
    "badly acted",
    "not worth",
    "complete mess",
    "utterly boring",
    "avoid this",
)


def _mean_sd(values: Sequence[float]) -> Tuple[float, float]:
    array = np.asarray(values, dtype=np.float64)
    sd = float(np.std(array, ddof=1)) if array.size > 1 else 0.0
    return float(array.mean()), sd


class SimulationService:
    """Runs the reproducible experiments on top of the other services"""

    def __init__(
        self,
        dataset_service: Optional[DatasetService] = None,
        influence_service: Optional[InfluenceService] = None,
        metrics_service: Optional[MetricsService] = None,
        screening_service: Optional[ScreeningService] = None,
        dagger_service: Optional[DaggerService] = None,
        textfeat_service: Optional[TextFeatureService] = None,
        neural_service: Optional[NeuralService] = None,
        max_workers: Optional[int] = None,
    ):
        self.dataset_service = dataset_service or DatasetService()
        self.influence_service = influence_service or InfluenceService()
        self.metrics_service = metrics_service or MetricsService()
        self.max_workers = max_workers if max_workers is not None else settings.MAX_WORKERS
        self.screening_service = screening_service or ScreeningService(
            self.influence_service, max_workers=self.max_workers
        )
        self.dagger_service = dagger_service or DaggerService(self.influence_service.partition_service)
        self.textfeat_service = textfeat_service or TextFeatureService()
        self.neural_service = neural_service or NeuralService(self.metrics_service)

    # -- XOR toy ---------------------------------------------------------------------------

    def generate_toy(self, cfg: ToyConfig, rep: int) -> LabeledDataset:
        """p Bernoulli(0.5) columns with Y = (X1 + X2) mod 2"""
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, rep]))
        features = rng.integers(0, 2, size=(cfg.n, cfg.p)).astype(np.float64)
        response = (features[:, 0] + features[:, 1]) % 2
        return LabeledDataset(
            features=features,
            column_names=[f"X{j + 1}" for j in range(cfg.p)],
            response=response,
        )

    def guessed_predictor(self, ds: LabeledDataset, model: GuessedModel, epsilon: float) -> np.ndarray:
        if ds.p < 2:
            raise ValidationError("guessed models need X1 and X2")
        try:
            model = GuessedModel(model)
        except ValueError:
            raise ValidationError(f"unknown guessed model {model!r}") from None
        x1 = ds.features[:, 0]
        x2 = ds.features[:, 1]
        if model == GuessedModel.SUM:
            return x1 + x2
        if model == GuessedModel.DIFF:
            return x1 - x2
        if model == GuessedModel.PROD:
            return x1 * x2
        if model == GuessedModel.RATIO:
            return x1 / (x2 + epsilon)
        if model == GuessedModel.TRUE_MODEL:
            return (x1 + x2) % 2
        if model == GuessedModel.DAGGER:
            # fitted on the first half, applied to every row
            first_half, _ = self.dataset_service.split(ds, SplitSpec(train_fraction=0.5, shuffle=False))
            dagger_map = self.dagger_service.fit_dagger(first_half, [0, 1])
            return self.dagger_service.transform_dagger(dagger_map, ds)
        raise ValidationError("the pair set has no scalar predictor")

    def _toy_rep(self, cfg: ToyConfig, rep: int) -> Dict[str, Tuple[Optional[float], float]]:
        ds = self.generate_toy(cfg, rep)
        y = ds.response
        results: Dict[str, Tuple[Optional[float], float]] = {}
        for j, name in enumerate(ds.column_names):
            column = ds.features[:, j]
            results[name] = (
                self.metrics_service.auc_or_none(y, column),
                self.influence_service.iscore_for_column(column, y).normalized,
            )
        for model in GuessedModel:
            label = GUESSED_MODEL_LABELS[model]
            if model == GuessedModel.PAIR_SET:
                results[label] = (None, self.influence_service.score_subset(ds, [0, 1]).normalized)
                continue
            values = self.guessed_predictor(ds, model, cfg.epsilon)
            results[label] = (
                self.metrics_service.auc_or_none(y, values),
                self.influence_service.iscore_for_column(values, y).normalized,
            )
        return results

    def run_toy_experiment(self, cfg: ToyConfig) -> ToyReport:
        logger.info(f"Toy experiment: n={cfg.n}, p={cfg.p}, reps={cfg.reps}, seed={cfg.seed}")
        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                per_rep = list(pool.map(lambda rep: self._toy_rep(cfg, rep), range(cfg.reps)))
        else:
            per_rep = [self._toy_rep(cfg, rep) for rep in range(cfg.reps)]

        names = list(per_rep[0].keys())
        rep_iscores = {name: [rep[name][1] for rep in per_rep] for name in names}
        rep_aucs = {
            name: [rep[name][0] for rep in per_rep]
            for name in names
            if all(rep[name][0] is not None for rep in per_rep)
        }

        rows = []
        for name in names:
            if name in (f"X{j + 1}" for j in range(cfg.p)):
                group = "important" if name in ("X1", "X2") else "noisy"
            elif name == GUESSED_MODEL_LABELS[GuessedModel.TRUE_MODEL]:
                group = "true"
            else:
                group = "guessed"
            mean_iscore, sd_iscore = _mean_sd(rep_iscores[name])
            mean_auc, sd_auc = _mean_sd(rep_aucs[name]) if name in rep_aucs else (None, None)
            rows.append(
                ToyRow(
                    name=name,
                    group=group,
                    mean_auc=mean_auc,
                    sd_auc=sd_auc,
                    mean_iscore=mean_iscore,
                    sd_iscore=sd_iscore,
                )
            )
        report = ToyReport(config=cfg, rows=rows, rep_iscores=rep_iscores, rep_aucs=rep_aucs)
        true_row = report.row(GUESSED_MODEL_LABELS[GuessedModel.TRUE_MODEL])
        logger.info(f"Toy experiment done: true model mean I-score {true_row.mean_iscore:.2f}")
        return report

    # -- desk corpus -----------------------------------------------------------------------

    def generate_desk_corpus(
        self,
        n_docs: int,
        seed: int = 0,
        doc_length: int = 60,
        cross_rate: float = 0.3,
    ) -> TextCorpus:
        """
        Balanced synthetic reviews: filler words with 1-3 planted phrases of the document's
        polarity and, at `cross_rate`, one phrase of the opposite polarity
        """
        if n_docs < 2:
            raise ValidationError("a corpus needs at least 2 documents")
        if doc_length < 1:
            raise ValidationError("doc_length must be at least 1")
        rng = np.random.default_rng(seed)
        labels = rng.permutation(np.r_[np.ones(n_docs - n_docs // 2, dtype=int), np.zeros(n_docs // 2, dtype=int)])

        documents = []
        for i, label in enumerate(labels):
            own, other = (POSITIVE_PHRASES, NEGATIVE_PHRASES) if label == 1 else (NEGATIVE_PHRASES, POSITIVE_PHRASES)
            words: List[str] = [FILLER_WORDS[k] for k in rng.integers(0, len(FILLER_WORDS), size=doc_length)]
            phrases = [own[k] for k in rng.integers(0, len(own), size=int(rng.integers(1, 4)))]
            if rng.random() < cross_rate:
                phrases.append(other[int(rng.integers(0, len(other)))])
            # positions index the filler words; inserting right to left keeps phrases whole
            positions = rng.integers(0, doc_length + 1, size=len(phrases))
            for position, phrase in sorted(zip(positions.tolist(), phrases), reverse=True):
                words[position:position] = phrase.split()
            documents.append(TextDocument(text=" ".join(words) + ".", label=int(label), source=f"synthetic-{i:05d}"))
        logger.info(f"Generated desk corpus: {n_docs} documents (seed {seed})")
        return TextCorpus(documents=tuple(documents))

    # -- n-gram screening study ------------------------------------------------------------

    def _split_three(
        self, ds: LabeledDataset, seed: int
    ) -> Tuple[LabeledDataset, LabeledDataset, LabeledDataset]:
        """Seeded 60/20/20 train/validation/test split"""
        if ds.n < 5:
            raise ValidationError("the study needs at least 5 documents")
        order = np.random.default_rng(seed).permutation(ds.n)
        n_train = int(math.floor(0.6 * ds.n))
        n_val = int(math.floor(0.2 * ds.n))
        take = self.dataset_service.take_rows
        return (
            take(ds, order[:n_train]),
            take(ds, order[n_train : n_train + n_val]),
            take(ds, order[n_train + n_val :]),
        )

    def _train_arm(
        self,
        arm: str,
        cfg: TextStudyConfig,
        splits: Tuple[LabeledDataset, LabeledDataset, LabeledDataset],
        columns: Sequence[int],
    ) -> ArmResult:
        """
        Train the configured classifier on `columns`. The feed-forward network sees only the
        selected columns; the RNN reads every column as a time step with the others gated off.
        """
        train, val, test = splits
        columns = list(columns)
        train_cfg = TrainConfig(
            eta=cfg.eta,
            epochs=cfg.epochs,
            seed=derive_seed(cfg.seed, "text-init"),
            init_scale=cfg.init_scale,
            patience=cfg.patience,
            min_delta=cfg.min_delta,
        )
        names = [train.column_names[c] for c in columns]
        neural = self.neural_service

        if cfg.classifier == "ffn":
            train_in, val_in, test_in = (self._ffn_inputs(ds, columns, cfg.row_norm) for ds in splits)
            params, curve = neural.train_ffn(train_in, val_in, cfg.hidden_width, train_cfg)
            scores = neural.ffn_forward(params, test_in.features)
        else:
            gate = np.zeros(train.p, dtype=bool)
            gate[columns] = True
            p0 = neural.init_rnn_params(
                cfg.hidden_width, 1, seed=train_cfg.seed, init_scale=cfg.init_scale
            )
            params, curve = neural.train_rnn(
                p0,
                neural.sequences_from_dataset(train),
                neural.sequences_from_dataset(val),
                train_cfg,
                mask=gate,
            )
            scores = neural.rnn_predict(params, neural.sequences_from_dataset(test), mask=gate)

        result = ArmResult(
            arm=arm,
            n_features=len(columns),
            feature_names=names,
            test_auc=self.metrics_service.auc_or_none(test.response, scores),
            best_val_epoch=curve.best_val_epoch,
            curve=curve,
        )
        logger.info(f"Arm {arm}: {len(columns)} features, test AUC {result.test_auc}")
        return result

    def _ffn_inputs(self, ds: LabeledDataset, columns: Sequence[int], row_norm: str) -> LabeledDataset:
        """Selected columns, each row scaled to unit L2 norm unless `row_norm` is "none"; empty rows stay zero"""
        selected = self.dataset_service.select_columns(ds, columns)
        if row_norm == "none":
            return selected
        return LabeledDataset(
            features=normalize(selected.features, norm="l2"),
            column_names=selected.column_names,
            response=selected.response,
            response_name=selected.response_name,
        )

    def _discretized_splits(
        self,
        corpus: TextCorpus,
        vocab: Vocabulary,
        cfg: TextStudyConfig,
        seed: int,
    ) -> Tuple[LabeledDataset, LabeledDataset, LabeledDataset]:
        """Count-coded n-grams binarized by thresholds learned on the training split"""
        sets = [
            self.textfeat_service.vectorize(corpus, vocab, n, cfg.max_features, cfg.max_tokens, coding="count")
            for n in cfg.ngram_orders
        ]
        train, val, test = self._split_three(self.textfeat_service.concat_grams(sets), seed)
        rules, train = self.screening_service.discretize_all(train)
        for rule in rules:
            val = self.screening_service.apply_rule(val, rule)
            test = self.screening_service.apply_rule(test, rule)
        return train, val, test

    def _dagger_splits(
        self,
        cfg: TextStudyConfig,
        splits: Tuple[LabeledDataset, LabeledDataset, LabeledDataset],
        gated: Sequence[int],
    ) -> Tuple[LabeledDataset, LabeledDataset, LabeledDataset]:
        """X_dagger columns built from the best BDA return sets over the gated features"""
        select = self.dataset_service.select_columns
        train, val, test = (select(ds, gated) for ds in splits)
        bda = BdaConfig(
            subset_size=min(cfg.dagger_subset_size, train.p),
            num_draws=cfg.dagger_draws,
            seed=derive_seed(cfg.seed, "text-bda"),
        )
        return_sets: List[Tuple[int, ...]] = []
        for trace in self.screening_service.bda_search(train, bda):
            if trace.return_set not in return_sets:
                return_sets.append(trace.return_set)
            if len(return_sets) == cfg.dagger_sets:
                break

        columns = []
        for subset in return_sets:
            dagger_map, values = self.dagger_service.fit_transform(train, [train, val, test], subset)
            columns.append(("dagger:" + "+".join(dagger_map.subset_names), values))

        def build(ds: LabeledDataset, k: int) -> LabeledDataset:
            return LabeledDataset(
                features=np.column_stack([values[k] for _, values in columns]),
                column_names=[name for name, _ in columns],
                response=ds.response,
            )

        return build(train, 0), build(val, 1), build(test, 2)

    def run_text_experiment(self, corpus: TextCorpus, cfg: TextStudyConfig) -> TextStudyReport:
        logger.info(
            f"Text study: {len(corpus)} documents, orders {cfg.ngram_orders}, arms {cfg.arms}, "
            f"classifier {cfg.classifier}"
        )
        vocab = self.textfeat_service.build_vocab(corpus, cfg.vocab_size)
        sets = [
            self.textfeat_service.vectorize(corpus, vocab, n, cfg.max_features, cfg.max_tokens)
            for n in cfg.ngram_orders
        ]
        full = self.textfeat_service.concat_grams(sets)
        split_seed = derive_seed(cfg.seed, "text-split")
        splits = self._split_three(full, split_seed)
        train = splits[0]

        scores = self.screening_service.marginal_scores(train)
        gate = self.screening_service.gate_threshold(scores, cfg.top_fraction)
        gated = gate.kept
        ranked = sorted(range(train.p), key=lambda c: (-scores[c], c))
        logger.info(f"Gate kept {len(gated)} of {train.p} n-gram features")

        arms: List[ArmResult] = []
        for arm in cfg.arms:
            if arm == "full":
                arms.append(self._train_arm(arm, cfg, splits, range(train.p)))
            elif arm == "gated":
                arms.append(self._train_arm(arm, cfg, splits, gated))
            elif arm == "random":
                rng = np.random.default_rng(derive_seed(cfg.seed, "text-random"))
                chosen = sorted(int(c) for c in rng.choice(train.p, size=len(gated), replace=False))
                arms.append(self._train_arm(arm, cfg, splits, chosen))
            elif arm == "topk":
                top = self.screening_service.rank_top_k(scores, cfg.top_k)
                arms.append(self._train_arm(arm, cfg, splits, top.kept))
            elif arm == "discretized":
                binarized = self._discretized_splits(corpus, vocab, cfg, split_seed)
                binarized_gate = self.screening_service.gate_threshold(
                    self.screening_service.marginal_scores(binarized[0]), cfg.top_fraction
                )
                arms.append(self._train_arm(arm, cfg, binarized, binarized_gate.kept))
            elif arm == "dagger":
                dagger_splits = self._dagger_splits(cfg, splits, gated)
                arms.append(self._train_arm(arm, cfg, dagger_splits, range(dagger_splits[0].p)))
            else:
                raise ValidationError(f"unknown arm {arm!r}")

        return TextStudyReport(
            config=cfg,
            n_documents=len(corpus),
            n_candidate_features=full.p,
            top_features=[full.column_names[c] for c in ranked[: len(gated)]],
            arms=arms,
        )
