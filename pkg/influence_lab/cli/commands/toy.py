import argparse

from influence_lab.cli.base import BaseCommand
from influence_lab.core.seeding import derive_seed
from influence_lab.schemas.run import RunConfig, ToyParams
from influence_lab.schemas.simlab import ToyConfig
from influence_lab.services.report_service import ReportService
from influence_lab.services.simlab_service import SimulationService


class Command(BaseCommand):
    name = "toy"
    help = "XOR toy simulation: AUC and I-score of single columns and guessed models over repetitions."
    params_model = ToyParams

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--n", type=int, help="observations per repetition (even)")
        parser.add_argument("--p", type=int, help="number of Bernoulli(0.5) columns")
        parser.add_argument("--reps", type=int, help="repetitions")
        parser.add_argument("--epsilon", type=float, help="constant of the ratio model")

    def handle(self, run: RunConfig, params: ToyParams, reports: ReportService) -> None:
        cfg = ToyConfig(
            n=params.n,
            p=params.p,
            reps=params.reps,
            epsilon=params.epsilon,
            seed=derive_seed(run.seed, "toy"),
        )
        report = SimulationService(max_workers=run.max_workers).run_toy_experiment(cfg)
        reports.write_toy_report(report)
