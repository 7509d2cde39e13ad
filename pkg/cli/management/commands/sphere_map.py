from cli.base import ExperimentCommand
from cli.serializers import SphereMapConfigSerializer
from cli.utils import array_to_csv, point_header, read_csv_array, to_json
from lds.sobol import SobolStream
from spheremap.mapping import map_to_sphere


class Command(ExperimentCommand):
    help = "Map cube points (from --input, or Sobol' points) onto the unit sphere in R^dim."
    serializer_class = SphereMapConfigSerializer

    def add_arguments(self, parser):
        parser.add_argument("--input", default=None, help="CSV of points in [0,1)^s")
        parser.add_argument("--dim", type=int, default=None, help="ambient dimension of the sphere")
        parser.add_argument("--n", type=int, default=None)
        parser.add_argument("--no-scramble", action="store_true")
        self.add_common_arguments(parser)

    def run(self, config):
        if config["input"] is not None:
            return map_to_sphere(read_csv_array(config["input"]))
        stream = SobolStream(
            config["dim"] - 1,
            seed=config["seed"],
            scramble=not config["no_scramble"],
            table=self.direction_numbers(config),
        )
        return map_to_sphere(stream.take(config["n"]))

    def render(self, result, config):
        if config["format"] == "json":
            return to_json(result.tolist())
        return array_to_csv(result, point_header(result.shape[1]))
