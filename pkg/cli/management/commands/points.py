import numpy as np

from cli.base import ExperimentCommand
from cli.serializers import PointsConfigSerializer
from cli.utils import array_to_csv, point_header, to_json
from common.constants import U_FLOOR
from common.utils import make_rng
from lds.sobol import SobolStream
from spheremap.mapping import lift_to_space
from specfun.normal import inv_normal_cdf


class Command(ExperimentCommand):
    help = "Generate Sobol', random, inverse-normal or sphere-normal points as CSV."
    serializer_class = PointsConfigSerializer

    def add_arguments(self, parser):
        parser.add_argument("--dim", type=int, required=True)
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--gen", choices=["sobol", "random", "sphere", "normal"], default="sphere")
        parser.add_argument("--no-scramble", action="store_true")
        parser.add_argument("--polar", action="store_true", help="radius then direction columns")
        self.add_common_arguments(parser)

    def run(self, config):
        dim, n, gen = config["dim"], config["n"], config["gen"]
        if gen == "random":
            return make_rng(config["seed"]).random((n, dim))
        stream = SobolStream(
            dim,
            seed=config["seed"],
            scramble=not config["no_scramble"],
            table=self.direction_numbers(config),
        )
        cube = stream.take(n)
        if gen == "sobol":
            return cube
        if gen == "normal":
            return inv_normal_cdf(np.clip(cube, U_FLOOR, 1.0 - U_FLOOR))
        points = lift_to_space(cube)
        if config["polar"]:
            return np.column_stack([points.radii, points.directions])
        return points.cartesian()

    def render(self, result, config):
        if config["format"] == "json":
            return to_json(result.tolist())
        dim = result.shape[1] - 1 if config["polar"] else result.shape[1]
        return array_to_csv(result, point_header(dim, config["polar"]))
