import argparse
import logging

from influence_lab.cli.base import BaseCommand
from influence_lab.core.seeding import derive_seed
from influence_lab.schemas.run import RunConfig, TextParams
from influence_lab.schemas.simlab import TextStudyConfig
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.report_service import ReportService
from influence_lab.services.simlab_service import SimulationService

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    name = "text"
    help = "N-gram screening study: train on I-score gated features against full and random selections."
    params_model = TextParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--corpus", help="directory with pos/ and neg/ text files (default: synthetic corpus)")
        parser.add_argument("--synthetic-docs", type=int, help="size of the synthetic corpus")
        parser.add_argument("--ngram-orders", help="comma-separated n-gram orders, e.g. 2,3")
        parser.add_argument("--vocab-size", type=int)
        parser.add_argument("--max-features", type=int, help="n-gram columns kept per order")
        parser.add_argument("--max-tokens", type=int, help="tokens read per document")
        parser.add_argument("--top-fraction", type=float, help="share of features passing the gate")
        parser.add_argument("--top-k", type=int, help="feature count of the topk arm")
        parser.add_argument("--arms", help="comma-separated: full,gated,random,topk,discretized,dagger")
        parser.add_argument("--classifier", choices=["ffn", "rnn"])
        parser.add_argument("--hidden-width", type=int)
        parser.add_argument("--epochs", type=int)
        parser.add_argument("--eta", type=float, help="learning rate")
        parser.add_argument("--patience", type=int, help="epochs without validation gain before stopping; 0 disables")

    def handle(self, run: RunConfig, params: TextParams, reports: ReportService) -> None:
        simulation_service = SimulationService(max_workers=run.max_workers)
        if params.corpus is not None:
            corpus = DatasetService().load_text_corpus(params.corpus)
        else:
            logger.info("No corpus given; generating the synthetic desk corpus")
            corpus = simulation_service.generate_desk_corpus(
                params.synthetic_docs, seed=derive_seed(run.seed, "desk-corpus")
            )

        cfg = TextStudyConfig(
            **params.model_dump(exclude={"corpus", "synthetic_docs"}),
            seed=derive_seed(run.seed, "text"),
        )
        report = simulation_service.run_text_experiment(corpus, cfg)
        reports.write_text_report(report)
