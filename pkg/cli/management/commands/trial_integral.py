from cli.base import ExperimentCommand
from cli.serializers import TrialIntegralConfigSerializer
from cli.services.experiments import TrialGenerator, trial_integral


class Command(ExperimentCommand):
    help = "Error of the sphere integral of (x_1 + ... + x_d)^2 for each N."
    serializer_class = TrialIntegralConfigSerializer

    def add_arguments(self, parser):
        parser.add_argument("--dim", type=int, required=True)
        parser.add_argument("--N", type=int, nargs="+", required=True)
        parser.add_argument("--gen", choices=TrialGenerator.values, default=TrialGenerator.INVERSE_BETA)
        self.add_common_arguments(parser)

    def run(self, config):
        return trial_integral(
            config["dim"],
            config["N"],
            config["gen"],
            config["seed"],
            table=self.direction_numbers(config),
        )
