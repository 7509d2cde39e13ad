import logging

from cli.base import ExperimentCommand
from cli.serializers import StrataConfigSerializer
from cli.services.experiments import strata_scaling
from cli.utils import rows_to_csv, to_json

logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = "Stratified versus i.i.d. expected squared wce on S^2, with log-log slopes."
    serializer_class = StrataConfigSerializer

    def add_arguments(self, parser):
        self.add_kernel_arguments(parser)
        parser.add_argument("--M", type=int, nargs="+", required=True, help="cell counts")
        parser.add_argument("--empirical-max-n", type=int, default=None)
        parser.add_argument("--draws", type=int, default=None)
        self.add_common_arguments(parser)

    def run(self, config):
        return strata_scaling(
            self.kernel_params(config, 2),
            config["M"],
            config["seed"],
            empirical_max_n=config["empirical_max_n"],
            draws=config["draws"],
        )

    def render(self, result, config):
        rows, slopes = result
        if config["format"] == "json":
            return to_json({"rows": rows, "slopes": slopes})
        logger.info(f"strata slopes: {slopes}")
        return rows_to_csv(rows)
