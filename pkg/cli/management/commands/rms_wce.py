from cli.base import ExperimentCommand
from cli.serializers import RmsWceConfigSerializer
from common.exceptions import ConfigurationError
from wce.closed_forms import (
    expected_wce_sq_permutation,
    rms_wce_fixed_directions,
    rms_wce_iid,
)


class Command(ExperimentCommand):
    help = (
        "Expected squared wce for i.i.d. points; with --input also for the given "
        "directions with i.i.d. radii and for a random pairing of its radii."
    )
    serializer_class = RmsWceConfigSerializer

    def add_arguments(self, parser):
        parser.add_argument("--dim", type=int, default=None, help="ambient dimension")
        parser.add_argument("--n", type=int, default=None)
        parser.add_argument("--input", default=None, help="CSV of points, one per row")
        parser.add_argument("--polar", action="store_true", help="radius then direction columns")
        self.add_kernel_arguments(parser)
        self.add_common_arguments(parser)

    def run(self, config):
        points = self.read_points(config) if config["input"] is not None else None
        if points is None:
            dim, n = config["dim"], config["n"]
        else:
            dim, n = points.ambient_dimension, len(points)
            if config["dim"] is not None and config["dim"] != dim:
                raise ConfigurationError(f"--dim {config['dim']} does not match the {dim} input columns")
        p = self.kernel_params(config, dim - 1)
        constant = rms_wce_iid(p)
        row = {"dim": dim, "n": n, "iid_constant": constant, "iid_expected_wce_sq": constant / n}
        if points is not None:
            row["fixed_directions_expected_wce_sq"] = rms_wce_fixed_directions(p, points.directions)
            row["permutation_expected_wce_sq"] = expected_wce_sq_permutation(
                p, points.directions, points.radii
            )
        return row
