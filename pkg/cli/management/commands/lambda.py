from cli.base import ExperimentCommand
from cli.serializers import LambdaConfigSerializer
from cli.utils import format_value, to_json
from wce.closed_forms import lambda_k, lambda_k_residual


class Command(ExperimentCommand):
    help = "Lambda_K = (1/K) sum_k Q(mu, c Q^{-1}(mu, k/K))."
    serializer_class = LambdaConfigSerializer

    def add_arguments(self, parser):
        parser.add_argument("--mu", type=float, required=True)
        parser.add_argument("--c", type=float, required=True)
        parser.add_argument("--K", type=int, required=True)
        self.add_common_arguments(parser)

    def run(self, config):
        mu, c, K = config["mu"], config["c"], config["K"]
        return {
            "mu": mu,
            "c": c,
            "K": K,
            "lambda": lambda_k(mu, c, K),
            "residual": lambda_k_residual(mu, c, K),
        }

    def render(self, result, config):
        if config["format"] == "json":
            return to_json(result)
        return format_value(result["lambda"])
