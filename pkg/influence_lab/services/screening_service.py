"""
Screening service: supervised discretization, the Backward Dropping Algorithm,
marginal ranking and quantile gating
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from influence_lab.core.config import settings
from influence_lab.core.exceptions import ConstantColumnError, ConstantResponseError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.schemas.screening import (
    BdaConfig,
    BdaStep,
    BdaTrace,
    DiscretizationRule,
    FeatureScore,
    GateMask,
)
from influence_lab.services.influence_service import InfluenceService
from influence_lab.services.partition_service import PartitionService

logger = logging.getLogger(__name__)


class ScreeningService:
    """Variable screening built on the normalized I-score"""

    def __init__(
        self,
        influence_service: Optional[InfluenceService] = None,
        max_workers: Optional[int] = None,
    ):
        self.influence_service = influence_service or InfluenceService()
        self.partition_service = self.influence_service.partition_service
        self.max_workers = max_workers if max_workers is not None else settings.MAX_WORKERS

    # -- discretization ------------------------------------------------------------------

    def threshold_scores(self, ds: LabeledDataset, column: int) -> Tuple[np.ndarray, np.ndarray]:
        """Normalized I-score of 1(X > t) for every observed unique value t, ascending in t"""
        if not 0 <= column < ds.p:
            raise ValidationError(f"column index {column} out of range for p={ds.p}")
        x = ds.features[:, column]
        y = ds.response
        candidates = np.unique(x)
        if candidates.size < 2:
            raise ConstantColumnError(f"constant column {ds.column_names[column]!r}")
        sigma2 = float(np.var(y))
        if sigma2 <= 0.0:
            raise ConstantResponseError("constant response")

        n = ds.n
        order = np.argsort(x, kind="mergesort")
        sorted_x = x[order]
        cumulative_y = np.cumsum(y[order])
        total_y = float(cumulative_y[-1])
        global_mean = total_y / n

        # rows with x <= t form the lower cell
        lower_n = np.searchsorted(sorted_x, candidates, side="right")
        lower_sum = cumulative_y[lower_n - 1]
        upper_n = n - lower_n
        upper_sum = total_y - lower_sum
        raw = (lower_sum - lower_n * global_mean) ** 2 + np.where(
            upper_n > 0, (upper_sum - upper_n * global_mean) ** 2, 0.0
        )
        return candidates, raw / (n * sigma2)

    def discretize(self, ds: LabeledDataset, column: int) -> DiscretizationRule:
        candidates, scores = self.threshold_scores(ds, column)
        best = 0
        for i in range(1, len(scores)):
            if scores[i] > scores[best]:
                best = i
        rule = DiscretizationRule(
            column=column,
            column_name=ds.column_names[column],
            threshold=float(candidates[best]),
            iscore_at_best=float(scores[best]),
        )
        logger.debug(f"Discretized {rule.column_name}: t*={rule.threshold:g}, I={rule.iscore_at_best:.4f}")
        return rule

    def apply_rule(self, ds: LabeledDataset, rule: DiscretizationRule) -> LabeledDataset:
        features = ds.features.copy()
        features[:, rule.column] = (features[:, rule.column] > rule.threshold).astype(np.float64)
        return LabeledDataset(
            features=features,
            column_names=list(ds.column_names),
            response=ds.response,
            response_name=ds.response_name,
        )

    def discretize_all(
        self, ds: LabeledDataset, columns: Optional[Sequence[int]] = None
    ) -> Tuple[List[DiscretizationRule], LabeledDataset]:
        """Binarize each requested column (all by default); constant columns are left as is"""
        columns = range(ds.p) if columns is None else columns
        rules = []
        for column in columns:
            try:
                rule = self.discretize(ds, column)
            except ConstantColumnError:
                logger.warning(f"Column {ds.column_names[column]!r} is constant; left unchanged")
                continue
            rules.append(rule)
            ds = self.apply_rule(ds, rule)
        logger.info(f"Discretized {len(rules)} columns")
        return rules, ds

    # -- backward dropping ---------------------------------------------------------------

    def _score(self, ds: LabeledDataset, subset: Sequence[int]) -> float:
        return self.influence_service.score_subset(ds, subset).normalized

    def bda_run(self, ds: LabeledDataset, initial: Sequence[int], draw: int = 0) -> BdaTrace:
        current = tuple(int(c) for c in initial)
        if not current:
            raise ValidationError("initial subset is empty")
        if len(set(current)) != len(current):
            raise ValidationError("initial subset has repeated columns")
        for column in current:
            self.partition_service.check_discrete(ds, column)

        steps = [BdaStep(subset=current, score=self._score(ds, current))]
        while len(current) > 1:
            best_subset = None
            best_score = -math.inf
            best_dropped = -1
            for dropped in current:
                candidate = tuple(c for c in current if c != dropped)
                score = self._score(ds, candidate)
                # equal scores: drop the larger column index
                if score > best_score or (score == best_score and dropped > best_dropped):
                    best_subset, best_score, best_dropped = candidate, score, dropped
            current = best_subset
            steps.append(BdaStep(subset=current, score=best_score))

        best_step = steps[0]
        for step in steps[1:]:
            if step.score > best_step.score:
                best_step = step
        return BdaTrace(draw=draw, steps=steps, return_set=best_step.subset, return_score=best_step.score)

    def bda_search(self, ds: LabeledDataset, cfg: BdaConfig) -> List[BdaTrace]:
        if cfg.subset_size > ds.p:
            raise ValidationError(f"subset size k={cfg.subset_size} exceeds p={ds.p}")
        rng = np.random.default_rng(cfg.seed)
        initials = [
            tuple(sorted(int(c) for c in rng.choice(ds.p, size=cfg.subset_size, replace=False)))
            for _ in range(cfg.num_draws)
        ]

        def run(draw: int) -> BdaTrace:
            return self.bda_run(ds, initials[draw], draw=draw)

        if self.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                traces = list(pool.map(run, range(cfg.num_draws)))
        else:
            traces = [run(draw) for draw in range(cfg.num_draws)]

        traces.sort(key=lambda t: (-t.return_score, t.draw))
        best = traces[0]
        logger.info(
            f"BDA k={cfg.subset_size} B={cfg.num_draws}: best return set "
            f"{[ds.column_names[c] for c in best.return_set]} (I={best.return_score:.4f})"
        )
        return traces

    # -- marginal ranking and gating -----------------------------------------------------

    def marginal_scores(self, ds: LabeledDataset) -> List[float]:
        """Normalized I-score of every column in column order"""
        if float(np.var(ds.response)) <= 0.0:
            raise ConstantResponseError("constant response")
        return [self._score(ds, [column]) for column in range(ds.p)]

    def rank_marginal(self, ds: LabeledDataset) -> List[FeatureScore]:
        scores = self.marginal_scores(ds)
        ranked = sorted(range(ds.p), key=lambda c: (-scores[c], c))
        return [FeatureScore(column=c, name=ds.column_names[c], score=scores[c]) for c in ranked]

    def gate_threshold(self, scores: Sequence[float], top_fraction: float) -> GateMask:
        scores = [float(s) for s in scores]
        if not scores:
            raise ValidationError("no scores to gate")
        if not 0.0 < top_fraction <= 1.0:
            raise ValidationError("top_fraction must lie in (0, 1]")
        keep = math.ceil(round(top_fraction * len(scores), 9))
        return self._gate_top(scores, keep, top_fraction)

    def rank_top_k(self, scores: Sequence[float], k: int) -> GateMask:
        """Keep exactly the k best features"""
        scores = [float(s) for s in scores]
        if not scores:
            raise ValidationError("no scores to gate")
        if k < 1:
            raise ValidationError("k must be at least 1")
        k = min(k, len(scores))
        return self._gate_top(scores, k, k / len(scores))

    @staticmethod
    def _gate_top(scores: List[float], keep: int, top_fraction: float) -> GateMask:
        ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
        kept = set(ranked[:keep])
        threshold = scores[ranked[keep]] if keep < len(scores) else -math.inf
        return GateMask(
            scores=scores,
            threshold=threshold,
            quantile=float(np.quantile(scores, 1.0 - top_fraction)),
            mask=[i in kept for i in range(len(scores))],
        )
