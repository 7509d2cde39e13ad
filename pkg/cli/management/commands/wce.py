from cli.base import ExperimentCommand
from cli.serializers import WceConfigSerializer
from wce.closed_forms import wce_nakagami
from wce.serializers import WceReportSerializer


class Command(ExperimentCommand):
    help = "Closed-form spherical-cone worst-case error of a point set in R^{d+1}."
    serializer_class = WceConfigSerializer
    default_format = "json"

    def add_arguments(self, parser):
        parser.add_argument("--input", required=True, help="CSV of points, one per row")
        parser.add_argument("--polar", action="store_true", help="radius then direction columns")
        self.add_kernel_arguments(parser)
        self.add_common_arguments(parser)

    def run(self, config):
        points = self.read_points(config)
        p = self.kernel_params(config, points.sphere_dimension)
        return WceReportSerializer(wce_nakagami(p, points)).data
