import logging

from django.core.management.base import BaseCommand, CommandError

from cli.utils import read_csv_array, rows_to_csv, to_json, write_output
from common.exceptions import ConfigurationError, SphereConeError
from lds.direction_numbers import load_direction_numbers
from spheremap.mapping import SpacePoints
from wce.kernels import KernelParams

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    """
    Validates the options with `serializer_class`, runs `run(config)` and writes
    its result. Library failures map to the exit code of the raised error.
    """

    serializer_class = None
    default_format = "csv"

    def add_common_arguments(self, parser, formats=True):
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--dirfile", default=None, help="direction-number file")
        parser.add_argument("--output", default=None, help="write here instead of stdout")
        if formats:
            parser.add_argument("--format", choices=["csv", "json"], default=self.default_format)

    def add_kernel_arguments(self, parser):
        parser.add_argument("--mu", type=float, required=True)
        parser.add_argument("--A", type=float, required=True)
        parser.add_argument("--B", type=float, required=True)

    def handle(self, *args, **options):
        serializer = self.serializer_class(
            data={k: v for k, v in options.items() if v is not None}
        )
        if not serializer.is_valid():
            logger.error(f"{self.name}: invalid options {dict(serializer.errors)}")
            raise CommandError(f"invalid options: {dict(serializer.errors)}", returncode=2)
        config = dict(serializer.validated_data)
        logger.info(f"{self.name} config: {config}")
        try:
            result = self.run(config)
        except SphereConeError as e:
            logger.error(f"{self.name} failed: {str(e)}")
            raise CommandError(str(e), returncode=e.exit_code) from e
        write_output(self.render(result, config), config.get("output"), self.stdout)

    @property
    def name(self):
        return self.__module__.rsplit(".", 1)[-1]

    def direction_numbers(self, config):
        return load_direction_numbers(config.get("dirfile"))

    def kernel_params(self, config, d):
        return KernelParams(mu=config["mu"], A=config["A"], B=config["B"], d=d)

    def read_points(self, config):
        """
        Points of R^{d+1} from --input: cartesian columns, or with --polar the
        radius followed by the unit direction.
        """
        values = read_csv_array(config["input"])
        if config.get("polar"):
            if values.shape[1] < 3:
                raise ConfigurationError("polar input needs a radius and at least two direction columns")
            return SpacePoints(values[:, 1:], values[:, 0])
        if values.shape[1] < 2:
            raise ConfigurationError("points need at least two coordinates")
        return SpacePoints.from_cartesian(values)

    def render(self, result, config):
        if config.get("format") == "json":
            return to_json(result)
        return rows_to_csv(result if isinstance(result, list) else [result])

    def run(self, config):
        raise NotImplementedError
