"""
Text feature service: tokenization, vocabulary, n-grams and vectorization
"""

import logging
import unicodedata
from typing import Callable, Hashable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer

from influence_lab.core.config import settings
from influence_lab.core.exceptions import DimensionMismatchError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset, TextCorpus
from influence_lab.schemas.textfeat import UNK_INDEX, UNK_TOKEN, NGram, NGramFeatureSet, Vocabulary

logger = logging.getLogger(__name__)


class TextFeatureService:
    """Turns a corpus into discrete n-gram features"""

    def tokenize(self, text: str) -> List[str]:
        """Lowercase, drop Unicode punctuation, split on whitespace"""
        stripped = "".join(ch for ch in text.lower() if not unicodedata.category(ch).startswith("P"))
        return stripped.split()

    @staticmethod
    def _ranked_terms(texts: Sequence[str], analyzer: Callable[[str], list]) -> List[Tuple[Hashable, int]]:
        """(term, corpus count) pairs, most frequent first, ties in ascending term order"""
        counter = CountVectorizer(analyzer=analyzer, dtype=np.int64)
        try:
            counts = counter.fit_transform(texts)
        except ValueError:
            # no document yields a single term
            return []
        totals = np.asarray(counts.sum(axis=0)).reshape(-1)
        ranked = sorted(counter.vocabulary_.items(), key=lambda item: (-totals[item[1]], item[0]))
        return [(term, int(totals[column])) for term, column in ranked]

    def build_vocab(self, corpus: TextCorpus, max_size: int) -> Vocabulary:
        if len(corpus) == 0:
            raise ValidationError("empty corpus")
        if max_size < 1:
            raise ValidationError("vocabulary size must be at least 1")
        ranked = [item for item in self._ranked_terms(corpus.texts, self.tokenize) if item[0] != UNK_TOKEN]

        token_to_index = {UNK_TOKEN: UNK_INDEX}
        for token, _ in ranked[: max_size - 1]:
            token_to_index[token] = len(token_to_index)
        logger.info(f"Vocabulary: {len(token_to_index)} of {len(ranked) + 1} tokens kept")
        return Vocabulary(token_to_index=token_to_index, max_size=max_size)

    def extract_ngrams(self, tokens: Sequence, n: int) -> List[Tuple]:
        if n < 1:
            raise ValidationError("n-gram order must be at least 1")
        tokens = list(tokens)
        return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]

    def encode(self, text: str, vocab: Vocabulary, max_tokens: Optional[int] = None) -> List[int]:
        """Token indices of the first `max_tokens` tokens"""
        limit = settings.MAX_TOKENS if max_tokens is None else max_tokens
        return [vocab.lookup(token) for token in self.tokenize(text)[:limit]]

    def vectorize(
        self,
        corpus: TextCorpus,
        vocab: Vocabulary,
        n: int,
        max_features: int,
        max_tokens: Optional[int] = None,
        coding: Literal["presence", "count"] = "presence",
    ) -> NGramFeatureSet:
        """
        Document x n-gram matrix over the `max_features` most frequent n-grams of token indices;
        equal frequencies keep the lexicographically smaller index tuple
        """
        if max_features < 1:
            raise ValidationError("max_features must be at least 1")
        if n < 1:
            raise ValidationError("n-gram order must be at least 1")

        def analyzer(text: str) -> List[NGram]:
            return self.extract_ngrams(self.encode(text, vocab, max_tokens), n)

        columns: List[NGram] = [gram for gram, _ in self._ranked_terms(corpus.texts, analyzer)[:max_features]]

        if columns:
            vectorizer = CountVectorizer(
                analyzer=analyzer,
                vocabulary={gram: j for j, gram in enumerate(columns)},
                binary=coding == "presence",
                lowercase=False,
                dtype=np.float64,
            )
            matrix = vectorizer.fit_transform(corpus.texts).toarray()
        else:
            matrix = np.zeros((len(corpus), 0), dtype=np.float64)

        tokens = vocab.index_to_token
        names = [" ".join(tokens[index] for index in gram) for gram in columns]
        logger.info(f"Vectorized {len(corpus)} documents into {len(columns)} {n}-gram columns ({coding})")
        return NGramFeatureSet(
            n=n,
            columns=columns,
            column_names=names,
            matrix=matrix,
            labels=corpus.labels,
            coding=coding,
        )

    def concat_grams(self, sets: Sequence[NGramFeatureSet]) -> LabeledDataset:
        if not sets:
            raise ValidationError("nothing to concatenate")
        documents = sets[0].num_documents
        for feature_set in sets[1:]:
            if feature_set.num_documents != documents:
                raise DimensionMismatchError(
                    f"feature sets cover {documents} and {feature_set.num_documents} documents"
                )
            if not np.array_equal(feature_set.labels, sets[0].labels):
                raise DimensionMismatchError("feature sets were built from different corpora")

        names: List[str] = []
        for feature_set in sets:
            names.extend(f"{feature_set.n}g:{name}" for name in feature_set.column_names)
        matrix = np.hstack([feature_set.matrix for feature_set in sets])
        return LabeledDataset(features=matrix, column_names=names, response=sets[0].labels)

    def export_vocab(self, vocab: Vocabulary) -> List[Tuple[str, int]]:
        return sorted(vocab.token_to_index.items(), key=lambda item: item[1])
